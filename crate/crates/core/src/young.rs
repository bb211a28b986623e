//! Young-diagram mechanism for the increase substep.
//!
//! A state `(m, k)` with `m_{n+1} >= 0` is drawn as the diagram with rows
//! `m_1, k_1, m_2, ..., k_n, m_{n+1}`. Experiment `E_{lo,hi}` inserts a box
//! into an odd row `2i-1` (one of `m_i - k_i + 1` slots) or deletes one from
//! an even row `2i` (one of `k_i - m_{i+1}` boxes), `lo <= i <= hi`, uniformly
//! over all those slots. Inserting into row `2i-1` plays the role of drawing
//! `c_i`, deleting from row `2i` of drawing `d_i`; classification reuses the
//! urn partition.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sampling::draw_u64;
use crate::state::{KWeight, StateSignature};
use crate::urn::{self, urn_order, ClassId, Color, Letter};

pub const DEFAULT_GLYPH: &str = "▢";

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct YoungState {
    rows: Vec<i64>,
    k: KWeight,
}

impl YoungState {
    pub fn from_signature(m: &StateSignature) -> Result<Self> {
        let n = m.n();
        if m.get(n + 1) < 0 {
            return Err(Error::MechanismUnavailable(format!(
                "Young diagrams need m_{} >= 0, got {}",
                n + 1,
                m.get(n + 1)
            )));
        }
        let mut rows = Vec::with_capacity(2 * n + 1);
        for i in 1..=n {
            rows.push(m.get(i));
            rows.push(m.k().get(i));
        }
        rows.push(m.get(n + 1));
        Ok(YoungState { rows, k: m.k().clone() })
    }

    pub fn n(&self) -> usize {
        self.k.n()
    }

    /// Row lengths, top to bottom.
    pub fn rows(&self) -> &[i64] {
        &self.rows
    }

    /// Length of row `row` (1-based).
    pub fn row(&self, row: usize) -> i64 {
        self.rows[row - 1]
    }

    pub fn to_signature(&self) -> StateSignature {
        let m: Vec<i64> = self.rows.iter().step_by(2).copied().collect();
        StateSignature::new(m, &self.k).expect("diagram rows interlace by construction")
    }
}

impl fmt::Debug for YoungState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YoungState{:?}", self.rows)
    }
}

/// Insert a box into odd row `2i-1`, or delete one from even row `2i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementaryMove {
    Insert { row: usize },
    Delete { row: usize },
}

impl ElementaryMove {
    pub fn from_letter(l: Letter) -> Self {
        match l.color {
            Color::C => ElementaryMove::Insert { row: 2 * l.index - 1 },
            Color::D => ElementaryMove::Delete { row: 2 * l.index },
        }
    }

    pub fn to_letter(self) -> Result<Letter> {
        match self {
            ElementaryMove::Insert { row } if row % 2 == 1 => Ok(Letter::c(row.div_ceil(2))),
            ElementaryMove::Delete { row } if row % 2 == 0 && row > 0 => Ok(Letter::d(row / 2)),
            other => Err(Error::Structure(format!(
                "{other}: inserts go to odd rows, deletions to even rows"
            ))),
        }
    }
}

impl fmt::Display for ElementaryMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryMove::Insert { row } => write!(f, "D+e{row}"),
            ElementaryMove::Delete { row } => write!(f, "D-e{row}"),
        }
    }
}

/// Outcomes of all experiments, one move per experiment in urn order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExperimentTuple(pub Vec<ElementaryMove>);

/// Weighted outcomes of `E_{lo,hi}`: for each `i` in `lo..=hi`, insertion
/// into row `2i-1` with multiplicity `m_i - k_i + 1` then deletion from row
/// `2i` with multiplicity `k_i - m_{i+1}`. The draw is uniform over slots.
pub fn experiment_outcomes(lo: usize, hi: usize, state: &YoungState) -> Result<Vec<(ElementaryMove, u64)>> {
    if lo == 0 || lo > hi || hi > state.n() {
        return Err(Error::Structure(format!(
            "experiment E_{{{lo},{hi}}} does not exist for n = {}",
            state.n()
        )));
    }
    let mut out = Vec::with_capacity(2 * (hi - lo + 1));
    for i in lo..=hi {
        let odd = 2 * i - 1;
        let even = 2 * i;
        let slots = state.row(odd) - state.row(even) + 1;
        let boxes = state.row(even) - state.row(even + 1);
        out.push((ElementaryMove::Insert { row: odd }, slots as u64));
        out.push((ElementaryMove::Delete { row: even }, boxes as u64));
    }
    Ok(out)
}

fn tuple_letters(tuple: &ExperimentTuple) -> Result<Vec<Letter>> {
    tuple.0.iter().map(|mv| mv.to_letter()).collect()
}

pub fn classify_tuple(tuple: &ExperimentTuple, n: usize) -> Result<ClassId> {
    urn::classify(&urn::Word(tuple_letters(tuple)?), n)
}

fn experiment_weights(state: &YoungState) -> Vec<Vec<u64>> {
    urn_order(state.n())
        .into_iter()
        .map(|(lo, hi)| {
            experiment_outcomes(lo, hi, state)
                .expect("experiment in range")
                .into_iter()
                .map(|(_, w)| w)
                .collect()
        })
        .collect()
}

/// Exact class probabilities by enumerating every tuple, `n <= 4`.
pub fn class_distribution(state: &YoungState) -> Result<Vec<Rational>> {
    let n = state.n();
    if n > urn::ENUMERATION_CAP {
        return Err(Error::Resource {
            what: "n for sample-space enumeration",
            cap: urn::ENUMERATION_CAP,
            got: n,
        });
    }
    Ok(urn::class_distribution_from_weights(n, &experiment_weights(state)))
}

/// Class sizes counted two ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSizes {
    /// Every tuple of moves, including moves with no slot.
    pub letter_level: Vec<u64>,
    /// Only tuples whose every move has at least one slot.
    pub realizable: Vec<u64>,
}

impl ClassSizes {
    pub fn realizable_total(&self) -> u64 {
        self.realizable.iter().sum()
    }
}

pub fn class_sizes(state: &YoungState) -> Result<ClassSizes> {
    let n = state.n();
    if n > urn::ENUMERATION_CAP {
        return Err(Error::Resource {
            what: "n for sample-space enumeration",
            cap: urn::ENUMERATION_CAP,
            got: n,
        });
    }
    let weights = experiment_weights(state);
    let mut letter_level = vec![0u64; n + 1];
    let mut realizable = vec![0u64; n + 1];
    urn::for_each_choice(n, |choices, letters| {
        let class = urn::classify_letters(letters, n) - 1;
        letter_level[class] += 1;
        if choices.iter().enumerate().all(|(p, &c)| weights[p][c] > 0) {
            realizable[class] += 1;
        }
    });
    Ok(ClassSizes { letter_level, realizable })
}

/// Runs every experiment once.
pub fn sample_tuple<R: Rng + ?Sized>(state: &YoungState, rng: &mut R) -> ExperimentTuple {
    let moves = urn_order(state.n())
        .into_iter()
        .map(|(lo, hi)| {
            let outcomes = experiment_outcomes(lo, hi, state).expect("experiment in range");
            let weights: Vec<u64> = outcomes.iter().map(|(_, w)| *w).collect();
            outcomes[draw_u64(&weights, rng)].0
        })
        .collect();
    ExperimentTuple(moves)
}

/// One increase step: class `j` adds a box to row `2j - 1`. Rows `k` never change.
pub fn young_step<R: Rng + ?Sized>(state: &YoungState, rng: &mut R) -> YoungState {
    let tuple = sample_tuple(state, rng);
    let class = classify_tuple(&tuple, state.n()).expect("sampled tuples are well formed");
    let mut next = state.clone();
    next.rows[2 * class.0 - 2] += 1;
    debug_assert!(next.rows.windows(2).all(|p| p[0] >= p[1]));
    next
}

/// Draws row lengths as lines of glyphs; zero-length rows are skipped.
pub fn render_rows(rows: &[i64], glyph: &str) -> String {
    let mut out = String::new();
    for &len in rows.iter().filter(|&&len| len > 0) {
        out.push_str(&glyph.repeat(len as usize));
        out.push('\n');
    }
    out
}

pub fn render(state: &YoungState, glyph: &str) -> String {
    render_rows(state.rows(), glyph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::a_row;
    use crate::rational::{int, ratio};
    use crate::sampling::seeded;

    fn ys(m: &[i64], k: &[i64]) -> YoungState {
        let k = KWeight::new(k.to_vec()).unwrap();
        YoungState::from_signature(&StateSignature::new(m.to_vec(), &k).unwrap()).unwrap()
    }

    #[test]
    fn rows_layout() {
        let d = ys(&[8, 5, 1], &[6, 3]);
        assert_eq!(d.rows(), &[8, 6, 5, 3, 1]);
        assert_eq!(d.to_signature().m(), &[8, 5, 1]);
    }

    #[test]
    fn negative_last_row_rejected() {
        let k = KWeight::new(vec![6, 3]).unwrap();
        let m = StateSignature::new(vec![8, 5, -1], &k).unwrap();
        assert!(matches!(
            YoungState::from_signature(&m),
            Err(Error::MechanismUnavailable(_))
        ));
    }

    #[test]
    fn outcome_weights() {
        let d = ys(&[8, 5, 1], &[6, 3]);
        let w: Vec<u64> = experiment_outcomes(1, 2, &d).unwrap().iter().map(|o| o.1).collect();
        assert_eq!(w, vec![3, 1, 3, 2]);
        assert_eq!(w.iter().sum::<u64>(), 9);

        let degenerate = ys(&[6, 6, 1], &[6, 3]);
        let out = experiment_outcomes(1, 1, &degenerate).unwrap();
        assert_eq!(out[1], (ElementaryMove::Delete { row: 2 }, 0));
    }

    #[test]
    fn weights_match_urn_counts() {
        let k = KWeight::new(vec![6, 3]).unwrap();
        let m = StateSignature::new(vec![8, 5, 1], &k).unwrap();
        let d = YoungState::from_signature(&m).unwrap();
        for (lo, hi) in urn_order(2) {
            let view = urn::UrnView::new(&m, lo, hi).unwrap();
            let from_rows: Vec<u64> = experiment_outcomes(lo, hi, &d).unwrap().iter().map(|o| o.1).collect();
            assert_eq!(from_rows, view.weights());
        }
    }

    #[test]
    fn move_letter_map() {
        assert_eq!(ElementaryMove::Insert { row: 3 }.to_letter().unwrap(), Letter::c(2));
        assert_eq!(ElementaryMove::Delete { row: 4 }.to_letter().unwrap(), Letter::d(2));
        assert!(ElementaryMove::Insert { row: 2 }.to_letter().is_err());
        assert!(ElementaryMove::Delete { row: 3 }.to_letter().is_err());
    }

    #[test]
    fn explicit_partition_n2() {
        use ElementaryMove::{Delete as Del, Insert as Ins};
        // S_{2,3} = (D - e_2, D + e_3, anything)
        for third in [Ins { row: 1 }, Del { row: 2 }, Ins { row: 3 }, Del { row: 4 }] {
            let t = ExperimentTuple(vec![Del { row: 2 }, Ins { row: 3 }, third]);
            assert_eq!(classify_tuple(&t, 2).unwrap(), ClassId(2));
        }
        // S_{3,3} first part: D_1 = D + e_1, D_3 = D - e_4
        let t = ExperimentTuple(vec![Ins { row: 1 }, Del { row: 4 }, Del { row: 4 }]);
        assert_eq!(classify_tuple(&t, 2).unwrap(), ClassId(3));
        let bad = ExperimentTuple(vec![Ins { row: 1 }, Ins { row: 1 }, Del { row: 4 }]);
        assert!(classify_tuple(&bad, 2).is_err());
    }

    #[test]
    fn class_sizes_generic_and_degenerate() {
        let generic = class_sizes(&ys(&[8, 5, 1], &[6, 3])).unwrap();
        assert_eq!(generic.letter_level, vec![6, 4, 6]);
        assert_eq!(generic.realizable, vec![6, 4, 6]);

        let degenerate = class_sizes(&ys(&[6, 6, 1], &[6, 3])).unwrap();
        assert_eq!(degenerate.letter_level, vec![6, 4, 6]);
        assert_eq!(degenerate.realizable, vec![4, 0, 2]);
        assert_eq!(degenerate.realizable_total(), 6);
    }

    #[test]
    fn degenerate_probabilities() {
        let d = ys(&[6, 6, 1], &[6, 3]);
        assert_eq!(class_distribution(&d).unwrap(), vec![ratio(5, 7), int(0), ratio(2, 7)]);
    }

    #[test]
    fn distribution_equals_coefficients() {
        let d = ys(&[8, 5, 1], &[6, 3]);
        assert_eq!(class_distribution(&d).unwrap(), a_row(&d.to_signature()));
    }

    #[test]
    fn step_adds_box_to_odd_row() {
        let d = ys(&[8, 5, 1], &[6, 3]);
        let mut rng = seeded(9);
        for _ in 0..200 {
            let next = young_step(&d, &mut rng);
            let diff: Vec<i64> = next.rows().iter().zip(d.rows()).map(|(a, b)| a - b).collect();
            assert_eq!(diff.iter().sum::<i64>(), 1);
            let row = diff.iter().position(|&x| x == 1).unwrap();
            assert_eq!(row % 2, 0, "box landed in an even row");
            assert!(next.to_signature().m().len() == 3);
        }
    }

    #[test]
    fn rendering() {
        assert_eq!(render_rows(&[2, 1], "#"), "##\n#\n");
        let d = ys(&[8, 5, 1], &[6, 3]);
        let text = render(&d, DEFAULT_GLYPH);
        let lens: Vec<usize> = text.lines().map(|l| l.chars().count()).collect();
        assert_eq!(lens, vec![8, 6, 5, 3, 1]);
        let zero_last = ys(&[4, 2, 0], &[3, 1]);
        assert_eq!(render(&zero_last, "x").lines().count(), 4);
    }
}
