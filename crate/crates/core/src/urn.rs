//! Urn mechanism for the increase substep.
//!
//! Elementary urn `B_i` holds `m_i - k_i + 1` balls of color `c_i` and
//! `k_i - m_{i+1}` balls of color `d_i`. One complete experiment draws one
//! ball (with replacement) from each union urn `B_{lo,hi}` in canonical order
//! and records its color; the resulting word falls into exactly one class
//! `j`, and the state moves to `m + e_j`.
//!
//! The sample space is over letter types, so a letter whose color has no
//! balls is still a word position value; it just carries probability zero.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sampling::draw_u64;
use crate::state::StateSignature;

/// Largest `n` for which whole sample spaces are enumerated (`|S_5| = 294912`).
pub const ENUMERATION_CAP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    C,
    D,
}

/// A colored letter `c_i` or `d_i` (1-based `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub color: Color,
    pub index: usize,
}

impl Letter {
    pub fn c(index: usize) -> Self {
        Letter { color: Color::C, index }
    }

    pub fn d(index: usize) -> Self {
        Letter { color: Color::D, index }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.color {
            Color::C => 'c',
            Color::D => 'd',
        };
        write!(f, "{c}{}", self.index)
    }
}

impl FromStr for Letter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a letter: {s:?}"));
        let mut chars = s.chars();
        let color = match chars.next() {
            Some('c') | Some('C') => Color::C,
            Some('d') | Some('D') => Color::D,
            _ => return Err(bad()),
        };
        let index: usize = chars.as_str().parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(Letter { color, index })
    }
}

/// Urns `B_{lo,hi}` in experiment order: `hi` ascending, and for equal `hi`
/// `lo` descending from `hi` to 1.
pub fn urn_order(n: usize) -> Vec<(usize, usize)> {
    (1..=n)
        .flat_map(|hi| (1..=hi).rev().map(move |lo| (lo, hi)))
        .collect()
}

/// Letters allowed at urn `B_{lo,hi}`, in a fixed order (`c_lo, d_lo, c_{lo+1}, ...`).
pub fn urn_letters(lo: usize, hi: usize) -> Vec<Letter> {
    (lo..=hi).flat_map(|i| [Letter::c(i), Letter::d(i)]).collect()
}

pub fn word_length(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Ball counts of `B_{lo,hi}` at a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UrnView {
    pub lo: usize,
    pub hi: usize,
    /// `(count(c_i), count(d_i))` for `i = lo..=hi`.
    pub counts: Vec<(u64, u64)>,
}

impl UrnView {
    pub fn new(m: &StateSignature, lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || lo > hi || hi > m.n() {
            return Err(Error::Structure(format!(
                "urn B_{{{lo},{hi}}} does not exist for n = {}",
                m.n()
            )));
        }
        let counts = (lo..=hi)
            .map(|i| {
                let c = m.get(i) - m.k().get(i) + 1;
                let d = m.k().get(i) - m.get(i + 1);
                (c as u64, d as u64)
            })
            .collect();
        Ok(UrnView { lo, hi, counts })
    }

    pub fn count(&self, letter: Letter) -> u64 {
        if letter.index < self.lo || letter.index > self.hi {
            return 0;
        }
        let (c, d) = self.counts[letter.index - self.lo];
        match letter.color {
            Color::C => c,
            Color::D => d,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|(c, d)| c + d).sum()
    }

    /// Counts aligned with [`urn_letters`].
    pub fn weights(&self) -> Vec<u64> {
        self.counts.iter().flat_map(|&(c, d)| [c, d]).collect()
    }
}

/// One outcome of a complete experiment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Parses `c1,c2,d2` and checks it against the urn layout for `n`.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let letters = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<Letter>>>()?;
        let word = Word(letters);
        check_word(&word.0, n)?;
        Ok(word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Partition class `S_{j,n+1}`; `j` is the coordinate that increases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub usize);

fn check_word(letters: &[Letter], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Structure("n must be at least 1".into()));
    }
    if letters.len() != word_length(n) {
        return Err(Error::Structure(format!(
            "word has {} letters, expected {} for n = {n}",
            letters.len(),
            word_length(n)
        )));
    }
    for (pos, ((lo, hi), l)) in urn_order(n).into_iter().zip(letters).enumerate() {
        if l.index < lo || l.index > hi {
            return Err(Error::Structure(format!(
                "letter {l} at position {} is not in urn B_{{{lo},{hi}}}",
                pos + 1
            )));
        }
    }
    Ok(())
}

/// Class of a well-formed letter sequence. Recursion on `n`: classify the
/// prefix for `n - 1`; within the next block of `n` letters (urns
/// `B_{n,n}, ..., B_{1,n}`), the letter drawn from `B_{i,n}` decides between
/// class `i` (not `d_n`) and class `n + 1` (`d_n`).
pub(crate) fn classify_letters(letters: &[Letter], n: usize) -> usize {
    let mut class = match letters[0].color {
        Color::C => 1,
        Color::D => 2,
    };
    for level in 2..=n {
        let block_start = word_length(level - 1);
        let decisive = letters[block_start + level - class];
        class = if decisive == Letter::d(level) { level + 1 } else { class };
    }
    class
}

pub fn classify(word: &Word, n: usize) -> Result<ClassId> {
    check_word(&word.0, n)?;
    Ok(ClassId(classify_letters(&word.0, n)))
}

/// `|S_{n+1}| = prod_{1 <= lo <= hi <= n} 2 (hi - lo + 1)`.
pub fn sample_space_size(n: usize) -> BigUint {
    urn_order(n)
        .into_iter()
        .map(|(lo, hi)| BigUint::from(2 * (hi - lo + 1)))
        .product()
}

/// Class sizes `|S_{j,n+1}|`, `j = 1..=n+1`, from the size recursion
/// (no enumeration).
pub fn class_cardinality_recursive(n: usize) -> Vec<BigUint> {
    assert!(n >= 1);
    let mut sizes = vec![BigUint::one(), BigUint::one()];
    for level in 2..=n {
        // letters per urn B_{i,level} in the new block: 2 (level - i + 1)
        let factor = |i: usize| BigUint::from(2 * (level - i + 1));
        let others = |skip: usize| -> BigUint {
            (1..=level).filter(|&i| i != skip).map(factor).product()
        };
        let mut next = Vec::with_capacity(level + 1);
        let mut last = BigUint::zero();
        for (j0, prev) in sizes.iter().enumerate() {
            let j = j0 + 1;
            let rest = others(j);
            next.push(prev * BigUint::from(2 * (level - j) + 1) * &rest);
            last += prev * &rest;
        }
        next.push(last);
        sizes = next;
    }
    sizes
}

pub fn class_cardinality(j: usize, n: usize) -> Result<BigUint> {
    if j == 0 || j > n + 1 {
        return Err(Error::IndexOutOfRange { index: j, max: n + 1 });
    }
    Ok(class_cardinality_recursive(n).swap_remove(j - 1))
}

fn check_cap(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Structure("n must be at least 1".into()));
    }
    if n > ENUMERATION_CAP {
        return Err(Error::Resource {
            what: "n for sample-space enumeration",
            cap: ENUMERATION_CAP,
            got: n,
        });
    }
    Ok(())
}

/// Visits every word of the sample space for `n` in odometer order (last
/// position fastest). `choices[p]` indexes into `urn_letters` of urn `p`.
pub(crate) fn for_each_choice(n: usize, mut visit: impl FnMut(&[usize], &[Letter])) {
    let alphabets: Vec<Vec<Letter>> = urn_order(n)
        .into_iter()
        .map(|(lo, hi)| urn_letters(lo, hi))
        .collect();
    let len = alphabets.len();
    let mut choices = vec![0usize; len];
    let mut letters: Vec<Letter> = alphabets.iter().map(|a| a[0]).collect();
    loop {
        visit(&choices, &letters);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if choices[pos] + 1 < alphabets[pos].len() {
                choices[pos] += 1;
                letters[pos] = alphabets[pos][choices[pos]];
                for p in pos + 1..len {
                    choices[p] = 0;
                    letters[p] = alphabets[p][0];
                }
                break;
            }
        }
    }
}

/// The whole sample space `S_{n+1}`, `n <= 4`.
pub fn enumerate_words(n: usize) -> Result<Vec<Word>> {
    check_cap(n)?;
    let mut out = Vec::new();
    for_each_choice(n, |_, letters| out.push(Word(letters.to_vec())));
    Ok(out)
}

/// Class sizes by enumerating and classifying every word.
pub fn class_cardinality_enumerated(n: usize) -> Result<Vec<u64>> {
    check_cap(n)?;
    let mut sizes = vec![0u64; n + 1];
    for_each_choice(n, |_, letters| sizes[classify_letters(letters, n) - 1] += 1);
    Ok(sizes)
}

/// Per-position weight tables at a state, aligned with `urn_letters`.
fn position_weights(m: &StateSignature) -> Vec<Vec<u64>> {
    urn_order(m.n())
        .into_iter()
        .map(|(lo, hi)| UrnView::new(m, lo, hi).expect("urn in range").weights())
        .collect()
}

/// Product over positions of (balls of the drawn color) / (urn total).
pub fn word_probability(word: &Word, m: &StateSignature) -> Result<Rational> {
    let n = m.n();
    check_word(&word.0, n)?;
    let mut p = Rational::one();
    for ((lo, hi), l) in urn_order(n).into_iter().zip(&word.0) {
        let urn = UrnView::new(m, lo, hi)?;
        p *= Rational::new(urn.count(*l).into(), urn.total().into());
    }
    Ok(p)
}

/// Exact class probabilities by brute-force enumeration, given integer
/// weights per position (all words share the denominator `prod totals`).
pub(crate) fn class_distribution_from_weights(
    n: usize,
    weights: &[Vec<u64>],
) -> Vec<Rational> {
    let mut sums = vec![BigUint::zero(); n + 1];
    for_each_choice(n, |choices, letters| {
        let mut prod: u128 = 1;
        let mut big: Option<BigUint> = None;
        for (p, &c) in choices.iter().enumerate() {
            let w = weights[p][c];
            if w == 0 {
                return;
            }
            match big.as_mut() {
                Some(b) => *b *= w,
                None => match prod.checked_mul(w as u128) {
                    Some(v) => prod = v,
                    None => big = Some(BigUint::from(prod) * w),
                },
            }
        }
        let class = classify_letters(letters, n) - 1;
        match big {
            Some(b) => sums[class] += b,
            None => sums[class] += prod,
        }
    });
    let denom: BigUint = weights.iter().map(|w| BigUint::from(w.iter().sum::<u64>())).product();
    sums.into_iter()
        .map(|s| Rational::new(s.into(), denom.clone().into()))
        .collect()
}

/// Probabilities of all classes `j = 1..=n+1` by enumeration, `n <= 4`.
pub fn class_distribution(m: &StateSignature) -> Result<Vec<Rational>> {
    check_cap(m.n())?;
    Ok(class_distribution_from_weights(m.n(), &position_weights(m)))
}

pub fn class_probability(j: usize, m: &StateSignature) -> Result<Rational> {
    let n = m.n();
    if j == 0 || j > n + 1 {
        return Err(Error::IndexOutOfRange { index: j, max: n + 1 });
    }
    Ok(class_distribution(m)?.swap_remove(j - 1))
}

/// Draws one word: each position independently, weighted by ball counts.
pub fn sample_word<R: Rng + ?Sized>(m: &StateSignature, rng: &mut R) -> Word {
    let letters = urn_order(m.n())
        .into_iter()
        .map(|(lo, hi)| {
            let urn = UrnView::new(m, lo, hi).expect("urn in range");
            let alphabet = urn_letters(lo, hi);
            alphabet[draw_u64(&urn.weights(), rng)]
        })
        .collect();
    Word(letters)
}

/// One increase step driven by the urns: sample, classify, move to `m + e_j`.
pub fn urn_step<R: Rng + ?Sized>(m: &StateSignature, rng: &mut R) -> StateSignature {
    let word = sample_word(m, rng);
    let j = classify_letters(&word.0, m.n());
    m.moved(j, None)
}

/// Contents of the elementary urns `B_1..B_n` as `(count(c_i), count(d_i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryUrns(pub Vec<(i64, i64)>);

impl ElementaryUrns {
    pub fn at(m: &StateSignature) -> Self {
        ElementaryUrns(
            (1..=m.n())
                .map(|i| (m.get(i) - m.k().get(i) + 1, m.k().get(i) - m.get(i + 1)))
                .collect(),
        )
    }

    /// Ball bookkeeping after an outcome in class `j`: take one `d_{j-1}` ball
    /// out of `B_{j-1}` and add one `c_j` ball to `B_j`.
    pub fn after_outcome(&self, j: usize) -> Self {
        let mut urns = self.0.clone();
        if j >= 2 {
            urns[j - 2].1 -= 1;
        }
        if j <= urns.len() {
            urns[j - 1].0 += 1;
        }
        ElementaryUrns(urns)
    }
}
