//! State space: the fixed weight `k`, interlacing signatures `m`, and the
//! `(w, r)` coordinates of the hyperplane `s_m = s_k`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Fixed weakly decreasing n-tuple of integers. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KWeight(Arc<[i64]>);

impl KWeight {
    pub fn new(k: Vec<i64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::EmptyWeight);
        }
        for (i, pair) in k.windows(2).enumerate() {
            if pair[0] < pair[1] {
                return Err(Error::NotDecreasing {
                    i: i + 1,
                    left: pair[0],
                    right: pair[1],
                });
            }
        }
        Ok(KWeight(k.into()))
    }

    /// Number of entries of `k`; states have `n + 1` entries.
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// 1-based access, matching the usual `k_i` notation.
    pub fn get(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `k_n >= 0`, the precondition for Young-diagram states.
    pub fn young_ready(&self) -> bool {
        self.0[self.n() - 1] >= 0
    }

    /// Smallest admissible `w` offset, `max(0, -k_n)`.
    pub fn min_offset(&self) -> i64 {
        (-self.0[self.n() - 1]).max(0)
    }

    /// Upper bounds `k_i - k_{i+1}` of the omega box.
    pub fn omega_bounds(&self) -> Vec<i64> {
        self.0.windows(2).map(|p| p[0] - p[1]).collect()
    }

    /// `N = prod (k_i - k_{i+1} + 1)`.
    pub fn omega_size(&self) -> usize {
        self.omega_bounds()
            .iter()
            .map(|&b| (b + 1) as usize)
            .product()
    }
}

impl fmt::Debug for KWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KWeight{:?}", &*self.0)
    }
}

impl fmt::Display for KWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, xs: &[i64]) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

/// Checks `m_i >= k_i >= m_{i+1}` for all `i`, returning the first violated
/// inequality as an error.
pub fn check_interlacing(m: &[i64], k: &KWeight) -> Result<()> {
    let n = k.n();
    if m.len() != n + 1 {
        return Err(Error::Dimension {
            expected: n + 1,
            got: m.len(),
        });
    }
    for i in 0..n {
        let ki = k.as_slice()[i];
        if m[i] < ki {
            return Err(Error::NotInterlacing {
                rel: format!("m_{} >= k_{}", i + 1, i + 1),
                detail: format!("m_{} = {}, k_{} = {}", i + 1, m[i], i + 1, ki),
            });
        }
        if ki < m[i + 1] {
            return Err(Error::NotInterlacing {
                rel: format!("k_{} >= m_{}", i + 1, i + 2),
                detail: format!("k_{} = {}, m_{} = {}", i + 1, ki, i + 2, m[i + 1]),
            });
        }
    }
    Ok(())
}

/// True iff `m` interlaces `k`. Errors only on a length mismatch.
pub fn validate_interlacing(m: &[i64], k: &KWeight) -> Result<bool> {
    match check_interlacing(m, k) {
        Ok(()) => Ok(true),
        Err(Error::NotInterlacing { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// An (n+1)-tuple interlacing a fixed `k`. Construction validates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSignature {
    m: Vec<i64>,
    k: KWeight,
}

impl StateSignature {
    pub fn new(m: Vec<i64>, k: &KWeight) -> Result<Self> {
        check_interlacing(&m, k)?;
        Ok(StateSignature { m, k: k.clone() })
    }

    pub fn m(&self) -> &[i64] {
        &self.m
    }

    pub fn k(&self) -> &KWeight {
        &self.k
    }

    pub fn n(&self) -> usize {
        self.k.n()
    }

    /// 1-based access to `m_i`.
    pub fn get(&self, i: usize) -> i64 {
        self.m[i - 1]
    }

    pub fn sum(&self) -> i64 {
        self.m.iter().sum()
    }

    pub fn in_p(&self) -> bool {
        self.sum() == self.k.sum()
    }

    /// Raw tuple `m + delta * e_i` (1-based `i`), without validation.
    pub fn shifted_raw(&self, i: usize, delta: i64) -> Vec<i64> {
        let mut m = self.m.clone();
        m[i - 1] += delta;
        m
    }

    /// `m + delta * e_i` if it still interlaces.
    pub fn shifted(&self, i: usize, delta: i64) -> Option<StateSignature> {
        let m = self.shifted_raw(i, delta);
        check_interlacing(&m, &self.k).ok()?;
        Some(StateSignature { m, k: self.k.clone() })
    }

    /// Same as [`shifted`](Self::shifted) but for a move already known to be
    /// admissible; panics otherwise.
    pub(crate) fn moved(&self, up: usize, down: Option<usize>) -> StateSignature {
        let mut m = self.m.clone();
        m[up - 1] += 1;
        if let Some(d) = down {
            m[d - 1] -= 1;
        }
        StateSignature::new(m, &self.k).expect("move with positive probability left the dual")
    }

    pub(crate) fn from_parts_unchecked(m: Vec<i64>, k: &KWeight) -> StateSignature {
        debug_assert!(check_interlacing(&m, k).is_ok());
        StateSignature { m, k: k.clone() }
    }
}

impl fmt::Debug for StateSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m=")?;
        write_tuple(f, &self.m)?;
        write!(f, " k=")?;
        write_tuple(f, self.k.as_slice())
    }
}

impl fmt::Display for StateSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.m)
    }
}

/// `r = (r_1, ..., r_{n-1})` with `0 <= r_i <= k_i - k_{i+1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OmegaIndex(pub Vec<i64>);

impl OmegaIndex {
    pub fn new(r: Vec<i64>, k: &KWeight) -> Result<Self> {
        let bounds = k.omega_bounds();
        if r.len() != bounds.len() {
            return Err(Error::Dimension {
                expected: bounds.len(),
                got: r.len(),
            });
        }
        for (i, (&v, &max)) in r.iter().zip(&bounds).enumerate() {
            if v < 0 || v > max {
                return Err(Error::OmegaOutOfRange { i: i + 1, value: v, max });
            }
        }
        Ok(OmegaIndex(r))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// Position of this index in [`enumerate_omega`] order.
    pub fn position(&self, k: &KWeight) -> usize {
        let bounds = k.omega_bounds();
        self.0
            .iter()
            .zip(&bounds)
            .fold(0usize, |acc, (&v, &b)| acc * (b + 1) as usize + v as usize)
    }

    /// `r + delta * e_j` (1-based `j`) if it stays inside the box.
    pub fn shifted(&self, j: usize, delta: i64, k: &KWeight) -> Option<OmegaIndex> {
        let mut r = self.0.clone();
        r[j - 1] += delta;
        OmegaIndex::new(r, k).ok()
    }
}

impl fmt::Display for OmegaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

/// A point `(w, r)` of the block-matrix index set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PCoordinate {
    pub w: i64,
    pub r: OmegaIndex,
}

impl PCoordinate {
    pub fn new(w: i64, r: Vec<i64>, k: &KWeight) -> Result<Self> {
        let min = k.min_offset();
        if w < min {
            return Err(Error::OffsetTooSmall { w, min });
        }
        Ok(PCoordinate {
            w,
            r: OmegaIndex::new(r, k)?,
        })
    }
}

impl fmt::Display for PCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w={} r={}", self.w, self.r)
    }
}

/// All of omega in ascending lexicographic order.
pub fn enumerate_omega(k: &KWeight) -> Vec<OmegaIndex> {
    let bounds = k.omega_bounds();
    let mut out = Vec::with_capacity(k.omega_size());
    let mut cur = vec![0i64; bounds.len()];
    loop {
        out.push(OmegaIndex(cur.clone()));
        // odometer, last coordinate fastest
        let mut pos = bounds.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] < bounds[pos] {
                cur[pos] += 1;
                for c in &mut cur[pos + 1..] {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// `m(w, r) = (w + k_1, r_1 + k_2, ..., r_{n-1} + k_n, -(w + sum r))`.
pub fn state_from_wr(p: &PCoordinate, k: &KWeight) -> Result<StateSignature> {
    let checked = PCoordinate::new(p.w, p.r.0.clone(), k)?;
    let ks = k.as_slice();
    let mut m = Vec::with_capacity(k.n() + 1);
    m.push(checked.w + ks[0]);
    for (ri, kj) in checked.r.0.iter().zip(&ks[1..]) {
        m.push(ri + kj);
    }
    m.push(-(checked.w + checked.r.0.iter().sum::<i64>()));
    StateSignature::new(m, k)
}

/// Inverse of [`state_from_wr`] on `P`.
pub fn wr_from_state(m: &StateSignature) -> Result<PCoordinate> {
    let k = m.k();
    let (s_m, s_k) = (m.sum(), k.sum());
    if s_m != s_k {
        return Err(Error::NotInP { s_m, s_k });
    }
    let ks = k.as_slice();
    let w = m.get(1) - ks[0];
    let r = (1..k.n()).map(|i| m.m()[i] - ks[i]).collect();
    PCoordinate::new(w, r, k)
}
