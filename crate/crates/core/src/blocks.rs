//! Omega-by-omega blocks of the block-tridiagonal matrix `M` and of its
//! two bidiagonal factors, plus row views of the lattice-indexed `M~`.
//!
//! Rows and columns of every [`Block`] follow [`enumerate_omega`] order.
//! Truncated matrices keep block rows `w = 0..=w_max` and simply drop the
//! mass that would leave the window; nothing is reflected.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::coeffs::{a_row, b_row, b_row_lifted};
use crate::error::{Error, Result};
use crate::rational::{to_pq, Rational};
use crate::state::{enumerate_omega, state_from_wr, KWeight, OmegaIndex, PCoordinate, StateSignature};

/// Dense `N x N` rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    size: usize,
    entries: Vec<Rational>,
}

impl Block {
    pub fn zeros(size: usize) -> Self {
        Block {
            size,
            entries: vec![Rational::zero(); size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Rational) {
        self.entries[row * self.size + col] = v;
    }

    fn add_at(&mut self, row: usize, col: usize, v: &Rational) {
        self.entries[row * self.size + col] += v;
    }

    pub fn row_sum(&self, row: usize) -> Rational {
        self.entries[row * self.size..(row + 1) * self.size].iter().sum()
    }

    /// Non-zero entries of one row as `(col, value)`.
    pub fn row_entries(&self, row: usize) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries[row * self.size..(row + 1) * self.size]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|v| !v.is_negative())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.size).all(|r| self.row_entries(r).all(|(c, _)| c == r))
    }

    /// Product, skipping structural zeros.
    pub fn mul(&self, rhs: &Block) -> Block {
        assert_eq!(self.size, rhs.size);
        let mut out = Block::zeros(self.size);
        for r in 0..self.size {
            for (q, left) in self.row_entries(r) {
                for (s, right) in rhs.row_entries(q) {
                    out.add_at(r, s, &(left * right));
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Block) -> Block {
        assert_eq!(self.size, rhs.size);
        Block {
            size: self.size,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// First entry where the two blocks differ.
    pub fn first_difference(&self, other: &Block) -> Option<(usize, usize)> {
        (0..self.size * self.size)
            .find(|&i| self.entries[i] != other.entries[i])
            .map(|i| (i / self.size, i % self.size))
    }
}

/// Which of the three blocks a case-list entry feeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    A,
    B,
    C,
}

/// One term `a_up^2(m) * b_down^2(m + e_up)` of the composed step, with the
/// omega shift the case list assigns to it (`+e_plus`, `-e_minus`, 1-based,
/// `None` for no shift).
struct Case {
    part: Part,
    up: usize,
    down: usize,
    plus: Option<usize>,
    minus: Option<usize>,
}

/// Case lists of the three blocks. `i` and `j` range over `1..=n-1`.
fn cases(n: usize) -> Vec<Case> {
    let last = n + 1;
    let mut out = Vec::new();
    let mut push = |part, up, down, plus, minus| out.push(Case { part, up, down, plus, minus });
    // A_w: to block w - 1
    push(Part::A, last, 1, None, None);
    for j in 1..n {
        push(Part::A, j + 1, 1, Some(j), None);
    }
    // C_w: to block w + 1
    push(Part::C, 1, last, None, None);
    for j in 1..n {
        push(Part::C, 1, j + 1, None, Some(j));
    }
    // B_w: same block
    for j in 1..=last {
        push(Part::B, j, j, None, None);
    }
    for j in 1..n {
        push(Part::B, j + 1, last, Some(j), None);
        push(Part::B, last, j + 1, None, Some(j));
        for i in 1..n {
            if i != j {
                push(Part::B, j + 1, i + 1, Some(j), Some(i));
            }
        }
    }
    out
}

/// `a_up^2(m) * b_down^2(m + e_up)`; zero when the increase is blocked.
fn composed_term(m: &StateSignature, a: &[Rational], up: usize, down: usize) -> Rational {
    let au = &a[up - 1];
    if au.is_zero() {
        return Rational::zero();
    }
    let mid = m.shifted(up, 1).expect("positive a_sq implies an admissible increase");
    au * &b_row(&mid)[down - 1]
}

fn shift_omega(r: &OmegaIndex, plus: Option<usize>, minus: Option<usize>, k: &KWeight) -> Option<OmegaIndex> {
    let mut v = r.0.clone();
    if let Some(j) = plus {
        v[j - 1] += 1;
    }
    if let Some(i) = minus {
        v[i - 1] -= 1;
    }
    OmegaIndex::new(v, k).ok()
}

fn state_at(w: i64, r: &OmegaIndex, k: &KWeight) -> Result<StateSignature> {
    state_from_wr(&PCoordinate { w, r: r.clone() }, k)
}

fn check_offset(w: i64, k: &KWeight) -> Result<()> {
    let min = k.min_offset();
    if w < min {
        return Err(Error::OffsetTooSmall { w, min });
    }
    Ok(())
}

/// Blocks `(A_w, B_w, C_w)` of `M` built from their case lists.
pub fn build_abc(w: i64, k: &KWeight) -> Result<(Block, Block, Block)> {
    check_offset(w, k)?;
    let omega = enumerate_omega(k);
    let size = omega.len();
    let (mut a_blk, mut b_blk, mut c_blk) = (Block::zeros(size), Block::zeros(size), Block::zeros(size));
    let case_list = cases(k.n());
    for (row, r) in omega.iter().enumerate() {
        let m = state_at(w, r, k)?;
        let a = a_row(&m);
        for case in &case_list {
            let v = composed_term(&m, &a, case.up, case.down);
            if v.is_zero() {
                continue;
            }
            let s = shift_omega(r, case.plus, case.minus, k)
                .expect("positive transition mass pointed outside omega");
            let blk = match case.part {
                Part::A => &mut a_blk,
                Part::B => &mut b_blk,
                Part::C => &mut c_blk,
            };
            blk.add_at(row, s.position(k), &v);
        }
    }
    Ok((a_blk, b_blk, c_blk))
}

/// `(X_w, Y_w)`: the increase substep in `(w, r)` coordinates.
pub fn build_xy(w: i64, k: &KWeight) -> Result<(Block, Block)> {
    check_offset(w, k)?;
    let omega = enumerate_omega(k);
    let n = k.n();
    let (mut x, mut y) = (Block::zeros(omega.len()), Block::zeros(omega.len()));
    for (row, r) in omega.iter().enumerate() {
        let a = a_row(&state_at(w, r, k)?);
        x.set(row, row, a[0].clone());
        y.set(row, row, a[n].clone());
        for (j, v) in a.iter().enumerate().take(n).skip(1) {
            if v.is_zero() {
                continue;
            }
            let s = r.shifted(j, 1, k).expect("positive a_sq pointed outside omega");
            y.set(row, s.position(k), v.clone());
        }
    }
    Ok((x, y))
}

/// `(R_w, S_w)`: the decrease substep, coefficients taken at `m(w,r) + e_{n+1}`.
///
/// When `m(w,r) + e_{n+1}` leaves the dual the row is vacuous (no mass can
/// reach it under `M1`); it is filled with a unit on the diagonal of `S_w`.
pub fn build_rs(w: i64, k: &KWeight) -> Result<(Block, Block)> {
    check_offset(w, k)?;
    let omega = enumerate_omega(k);
    let n = k.n();
    let (mut r_blk, mut s_blk) = (Block::zeros(omega.len()), Block::zeros(omega.len()));
    for (row, r) in omega.iter().enumerate() {
        let Some(b) = b_row_lifted(&state_at(w, r, k)?) else {
            s_blk.set(row, row, Rational::one());
            continue;
        };
        r_blk.set(row, row, b[0].clone());
        s_blk.set(row, row, b[n].clone());
        for (j, v) in b.iter().enumerate().take(n).skip(1) {
            if v.is_zero() {
                continue;
            }
            let s = r.shifted(j, -1, k).expect("positive b_sq pointed outside omega");
            s_blk.set(row, s.position(k), v.clone());
        }
    }
    Ok((r_blk, s_blk))
}

/// Block structure of a truncated semi-infinite matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Tridiagonal `M` with blocks `A_w, B_w, C_w`.
    M,
    /// Upper bidiagonal `M1` with blocks `Y_w, X_w`.
    M1,
    /// Lower bidiagonal `M2` with blocks `R_w, S_w`.
    M2,
}

impl std::str::FromStr for Layout {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "M" => Ok(Layout::M),
            "M1" => Ok(Layout::M1),
            "M2" => Ok(Layout::M2),
            _ => Err(Error::Parse(format!("unknown matrix {s:?}; expected M, M1 or M2"))),
        }
    }
}

/// Block row `w` as (block offset, block) pairs: offset -1, 0 or +1.
type BlockRow = Vec<(i64, Block)>;

/// Semi-infinite block matrix cut off after block row `w_max`.
#[derive(Clone, Debug)]
pub struct TruncatedBlockMatrix {
    layout: Layout,
    k: KWeight,
    omega: Vec<OmegaIndex>,
    w_min: i64,
    w_max: i64,
    rows: Vec<BlockRow>,
}

/// Whether `w >= max(0, -k_n)` parametrises every state of `P`.
pub fn covers_p(k: &KWeight) -> bool {
    k.young_ready() || k.n() == 1
}

impl TruncatedBlockMatrix {
    /// Needs the `(w, r)` window to cover all of `P`: `k_n >= 0`, or `n = 1`.
    /// Block rows run from the minimal offset up to `w_max`.
    pub fn build(layout: Layout, k: &KWeight, w_max: i64) -> Result<Self> {
        if !covers_p(k) {
            return Err(Error::Domain(format!(
                "block matrices need k_n >= 0 when n > 1, got k = {k}"
            )));
        }
        let w_min = k.min_offset();
        if w_max < w_min {
            return Err(Error::Domain(format!("w_max must be >= {w_min}, got {w_max}")));
        }
        let mut rows = Vec::with_capacity((w_max - w_min) as usize + 1);
        for w in w_min..=w_max {
            let row = match layout {
                Layout::M => {
                    let (a, b, c) = build_abc(w, k)?;
                    vec![(-1, a), (0, b), (1, c)]
                }
                Layout::M1 => {
                    let (x, y) = build_xy(w, k)?;
                    vec![(0, y), (1, x)]
                }
                Layout::M2 => {
                    let (r, s) = build_rs(w, k)?;
                    vec![(-1, r), (0, s)]
                }
            };
            rows.push(row);
        }
        Ok(TruncatedBlockMatrix {
            layout,
            k: k.clone(),
            omega: enumerate_omega(k),
            w_min,
            w_max,
            rows,
        })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn w_max(&self) -> i64 {
        self.w_max
    }

    pub fn w_min(&self) -> i64 {
        self.w_min
    }

    pub fn k(&self) -> &KWeight {
        &self.k
    }

    pub fn omega(&self) -> &[OmegaIndex] {
        &self.omega
    }

    pub fn block(&self, w: i64, offset: i64) -> Option<&Block> {
        let row = self.rows.get(usize::try_from(w - self.w_min).ok()?)?;
        row.iter().find(|(o, _)| *o == offset).map(|(_, b)| b)
    }

    /// Whether row block `w` keeps all of its mass inside the window.
    pub fn is_interior(&self, w: i64) -> bool {
        match self.layout {
            Layout::M | Layout::M1 => w < self.w_max,
            Layout::M2 => w <= self.w_max,
        }
    }

    /// Non-zero entries of the `(w, r)` row that land inside the window.
    pub fn row(&self, w: i64, r_pos: usize) -> Vec<(PCoordinate, Rational)> {
        let mut out = Vec::new();
        for (offset, blk) in &self.rows[(w - self.w_min) as usize] {
            let col_w = w + offset;
            if col_w < self.w_min || col_w > self.w_max {
                continue;
            }
            for (s, v) in blk.row_entries(r_pos) {
                out.push((
                    PCoordinate {
                        w: col_w,
                        r: self.omega[s].clone(),
                    },
                    v.clone(),
                ));
            }
        }
        out
    }

    pub fn row_sum(&self, w: i64, r_pos: usize) -> Rational {
        self.row(w, r_pos).iter().map(|(_, v)| v).sum()
    }

    /// Rows whose sum is wrong: interior rows must sum to exactly 1,
    /// boundary rows to at most 1, and no entry may be negative.
    pub fn stochasticity_violations(&self) -> Vec<(PCoordinate, Rational)> {
        let mut bad = Vec::new();
        for w in self.w_min..=self.w_max {
            for (pos, r) in self.omega.iter().enumerate() {
                let row = self.row(w, pos);
                let sum: Rational = row.iter().map(|(_, v)| v).sum();
                let negative = row.iter().any(|(_, v)| v.is_negative());
                let ok = if self.is_interior(w) {
                    sum.is_one()
                } else {
                    sum <= Rational::one()
                };
                if !ok || negative {
                    bad.push((PCoordinate { w, r: r.clone() }, sum));
                }
            }
        }
        bad
    }

    /// CSV dump `w_row,r_row,w_col,r_col,value_p_over_q` (non-zero entries).
    /// Omega tuples are written with `;` between coordinates.
    pub fn to_csv(&self, with_float: bool) -> String {
        let mut out = String::from("w_row,r_row,w_col,r_col,value_p_over_q");
        if with_float {
            out.push_str(",value_float");
        }
        out.push('\n');
        for w in self.w_min..=self.w_max {
            for (pos, r) in self.omega.iter().enumerate() {
                for (col, v) in self.row(w, pos) {
                    let _ = write!(
                        out,
                        "{},{},{},{},{}",
                        w,
                        omega_field(r),
                        col.w,
                        omega_field(&col.r),
                        to_pq(&v)
                    );
                    if with_float {
                        let _ = write!(out, ",{}", crate::rational::to_f64(&v));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

pub(crate) fn omega_field(r: &OmegaIndex) -> String {
    r.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

/// Outcome of one factorization identity at one `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    /// `"A = Y R"`, `"B = X R' + Y S"` or `"C = X S'"`.
    pub identity: &'static str,
    pub w: i64,
    /// First offending `(row, col, lhs, rhs)`, if any.
    pub violation: Option<(usize, usize, Rational, Rational)>,
}

#[derive(Clone, Debug, Default)]
pub struct FactorizationReport {
    pub checks: Vec<IdentityCheck>,
}

impl FactorizationReport {
    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.violation.is_none())
    }

    pub fn violations(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| c.violation.is_some())
    }

    /// One line per identity per `w`: `OK` or the offending entry.
    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| match &c.violation {
                None => format!("w={} {}: OK", c.w, c.identity),
                Some((r, s, lhs, rhs)) => format!(
                    "w={} {}: MISMATCH at ({r},{s}): {} != {}",
                    c.w,
                    c.identity,
                    to_pq(lhs),
                    to_pq(rhs)
                ),
            })
            .collect()
    }
}

/// Checks `A_w = Y_w R_w`, `B_w = X_w R_{w+1} + Y_w S_w`, `C_w = X_w S_{w+1}`
/// for `w_max` consecutive levels starting at the minimal offset.
pub fn check_factorization(k: &KWeight, w_max: i64) -> Result<FactorizationReport> {
    if w_max < 1 {
        return Err(Error::Domain(format!("w_max must be >= 1, got {w_max}")));
    }
    let start = k.min_offset();
    let mut report = FactorizationReport::default();
    let mut rs_cur = build_rs(start, k)?;
    for w in start..start + w_max {
        let (a, b, c) = build_abc(w, k)?;
        let (x, y) = build_xy(w, k)?;
        let rs_next = build_rs(w + 1, k)?;
        let (r_w, s_w) = &rs_cur;
        let (r_next, s_next) = &rs_next;
        let pairs = [
            ("A = Y R", a, y.mul(r_w)),
            ("B = X R' + Y S", b, x.mul(r_next).add(&y.mul(s_w))),
            ("C = X S'", c, x.mul(s_next)),
        ];
        for (identity, lhs, rhs) in pairs {
            let violation = lhs
                .first_difference(&rhs)
                .map(|(r, s)| (r, s, lhs.get(r, s).clone(), rhs.get(r, s).clone()));
            report.checks.push(IdentityCheck { identity, w, violation });
        }
        rs_cur = rs_next;
    }
    Ok(report)
}

/// Which lattice-indexed walk a [`tilde_row`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tilde {
    /// Increase substep: `m -> m + e_j` with `a_j^2(m)`.
    Increase,
    /// Decrease substep: `m -> m - e_j` with `b_j^2(m + e_{n+1})`.
    Decrease,
    /// Their composition `M~ = M~1 M~2`.
    Composed,
}

/// Row of `M~1`, `M~2` or `M~` at `m`, as a finite distribution over states.
///
/// For [`Tilde::Decrease`] at a state with `m_{n+1} = k_n` the lifted state
/// leaves the dual; the row is vacuous and keeps all mass at `m`.
pub fn tilde_row(m: &StateSignature, which: Tilde) -> BTreeMap<StateSignature, Rational> {
    let n = m.n();
    let mut out: BTreeMap<StateSignature, Rational> = BTreeMap::new();
    let mut put = |s: StateSignature, v: Rational| {
        if !v.is_zero() {
            *out.entry(s).or_insert_with(Rational::zero) += v;
        }
    };
    match which {
        Tilde::Increase => {
            for (j, v) in a_row(m).into_iter().enumerate() {
                if !v.is_zero() {
                    put(m.moved(j + 1, None), v);
                }
            }
        }
        Tilde::Decrease => match b_row_lifted(m) {
            None => put(m.clone(), Rational::one()),
            Some(b) => {
                for (j, v) in b.into_iter().enumerate() {
                    if !v.is_zero() {
                        let target = m
                            .shifted(j + 1, -1)
                            .expect("positive lifted b_sq implies an admissible decrease");
                        put(target, v);
                    }
                }
            }
        },
        Tilde::Composed => {
            let a = a_row(m);
            for case in cases(n) {
                let v = composed_term(m, &a, case.up, case.down);
                if v.is_zero() {
                    continue;
                }
                // Case lists name the target through the omega shift; in
                // state terms r + e_j is m_{j+1} + 1 and block w +- 1 is m_1 +- 1,
                // with m_{n+1} absorbing the difference.
                let mut t = m.m().to_vec();
                match case.part {
                    Part::A => t[0] -= 1,
                    Part::C => t[0] += 1,
                    Part::B => {}
                }
                if let Some(j) = case.plus {
                    t[j] += 1;
                }
                if let Some(i) = case.minus {
                    t[i] -= 1;
                }
                let drift: i64 = t.iter().sum::<i64>() - m.sum();
                t[n] -= drift;
                put(StateSignature::from_parts_unchecked(t, m.k()), v);
            }
        }
    }
    out
}

/// Result of [`evolve`].
#[derive(Clone, Debug)]
pub struct Evolution {
    pub distribution: BTreeMap<PCoordinate, Rational>,
    /// Mass pushed past `w_max` and dropped.
    pub leaked: Rational,
    /// Set when the initial support sits within `t` blocks of the cut-off;
    /// carries an upper bound on the mass that can leak.
    pub warning: Option<TruncationWarning>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationWarning {
    pub leaked_mass_bound: Rational,
}

impl Evolution {
    pub fn total_mass(&self) -> Rational {
        self.distribution.values().sum()
    }
}

/// `initial * M^t` on the window `w <= w_max`.
pub fn evolve(
    initial: &BTreeMap<PCoordinate, Rational>,
    t: usize,
    k: &KWeight,
    w_max: i64,
) -> Result<Evolution> {
    let matrix = TruncatedBlockMatrix::build(Layout::M, k, w_max)?;
    evolve_with(&matrix, initial, t)
}

/// Same as [`evolve`] with a prebuilt `M`.
pub fn evolve_with(
    matrix: &TruncatedBlockMatrix,
    initial: &BTreeMap<PCoordinate, Rational>,
    t: usize,
) -> Result<Evolution> {
    if matrix.layout() != Layout::M {
        return Err(Error::Domain("evolve needs the composed matrix M".into()));
    }
    let k = matrix.k();
    let w_max = matrix.w_max();
    let mut bound = Rational::zero();
    for (p, v) in initial {
        PCoordinate::new(p.w, p.r.0.clone(), k)?;
        if p.w > w_max {
            return Err(Error::Domain(format!(
                "initial support at w = {} is outside the window w <= {w_max}",
                p.w
            )));
        }
        if v.is_negative() {
            return Err(Error::Domain(format!("negative initial mass at {p}")));
        }
        if p.w + t as i64 > w_max {
            bound += v;
        }
    }
    let warning = (!bound.is_zero()).then_some(TruncationWarning {
        leaked_mass_bound: bound,
    });

    let mut dist: BTreeMap<PCoordinate, Rational> = initial
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(p, v)| (p.clone(), v.clone()))
        .collect();
    let mut leaked = Rational::zero();
    for _ in 0..t {
        let mut next: BTreeMap<PCoordinate, Rational> = BTreeMap::new();
        for (p, mass) in &dist {
            let pos = p.r.position(k);
            let row = matrix.row(p.w, pos);
            let mut kept = Rational::zero();
            for (q, v) in row {
                let add = mass * &v;
                kept += &add;
                *next.entry(q).or_insert_with(Rational::zero) += add;
            }
            leaked += mass - kept;
        }
        dist = next;
    }
    Ok(Evolution {
        distribution: dist,
        leaked,
        warning,
    })
}
