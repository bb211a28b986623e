//! The walk itself: increase substep, decrease substep, their composition,
//! exact one-step rows and parallel Monte Carlo.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::blocks::{covers_p, evolve, Evolution};
use crate::coeffs::{a_row, a_weights_small, b_row, b_row_lifted, b_weights_small};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};
use crate::sampling::{draw_rational, draw_u128, walker_rng};
use crate::state::{state_from_wr, wr_from_state, KWeight, StateSignature};
use crate::{urn, young};

/// Exact finitely supported distribution over states.
pub type ExactDistribution = BTreeMap<StateSignature, Rational>;

/// How the increase substep is sampled. All three induce the same law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mechanism {
    /// Categorical draw straight from `a_j^2(m)`.
    Direct,
    /// Ordered urn experiments.
    Urn,
    /// Young-diagram experiments; needs `m_{n+1} >= 0`.
    Young,
}

impl Mechanism {
    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Direct => "direct",
            Mechanism::Urn => "urn",
            Mechanism::Young => "young",
        }
    }
}

impl FromStr for Mechanism {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Mechanism::Direct),
            "urn" => Ok(Mechanism::Urn),
            "young" => Ok(Mechanism::Young),
            _ => Err(Error::Parse(format!(
                "unknown mechanism {s:?}; expected direct, urn or young"
            ))),
        }
    }
}

fn draw_weighted<R: Rng + ?Sized>(
    small: Option<Vec<u128>>,
    exact: impl FnOnce() -> Vec<Rational>,
    rng: &mut R,
) -> usize {
    match small {
        Some(w) if w.iter().try_fold(0u128, |acc, &x| acc.checked_add(x)).is_some() => {
            draw_u128(&w, rng)
        }
        _ => draw_rational(&exact(), rng),
    }
}

/// Increase substep: `m -> m + e_j` with probability `a_j^2(m)`.
pub fn step_increase<R: Rng + ?Sized>(
    m: &StateSignature,
    rng: &mut R,
    mechanism: Mechanism,
) -> Result<StateSignature> {
    match mechanism {
        Mechanism::Direct => {
            let j = draw_weighted(a_weights_small(m), || a_row(m), rng);
            Ok(m.moved(j + 1, None))
        }
        Mechanism::Urn => Ok(urn::urn_step(m, rng)),
        Mechanism::Young => {
            let d = young::YoungState::from_signature(m)?;
            Ok(young::young_step(&d, rng).to_signature())
        }
    }
}

/// Lowers one coordinate of `mid` with probabilities `b_j^2(mid)`.
fn lower_from<R: Rng + ?Sized>(mid: &StateSignature, rng: &mut R) -> StateSignature {
    let j = draw_weighted(b_weights_small(mid), || b_row(mid), rng);
    mid.shifted(j + 1, -1)
        .expect("positive b_sq implies an admissible decrease")
}

/// Decrease substep: `m -> m - e_j` with probability `b_j^2(m + e_{n+1})`.
/// When `m_{n+1} = k_n` the lifted state leaves the dual and the walker stays.
pub fn step_decrease<R: Rng + ?Sized>(m: &StateSignature, rng: &mut R) -> StateSignature {
    let last = m.n() + 1;
    match m.shifted(last, 1) {
        None => m.clone(),
        Some(lifted) => {
            let j = draw_weighted(b_weights_small(&lifted), || b_row(&lifted), rng);
            m.shifted(j + 1, -1)
                .expect("positive lifted b_sq implies an admissible decrease")
        }
    }
}

/// One step of the composed walk: raise `m_i` (law `a_i^2(m)`), then lower
/// `m_j` with law `b_j^2` at the intermediate state `m + e_i`.
pub fn full_step<R: Rng + ?Sized>(
    m: &StateSignature,
    rng: &mut R,
    mechanism: Mechanism,
) -> Result<StateSignature> {
    let mid = step_increase(m, rng, mechanism)?;
    Ok(lower_from(&mid, rng))
}

/// Exact row of the composed walk: `sum_i a_i^2(m) b_j^2(m + e_i)` on `m + e_i - e_j`.
pub fn exact_row(m: &StateSignature) -> ExactDistribution {
    let mut out = ExactDistribution::new();
    for (i, ai) in a_row(m).into_iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let mid = m.moved(i + 1, None);
        for (j, bj) in b_row(&mid).into_iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            let target = mid.shifted(j + 1, -1).expect("admissible decrease");
            *out.entry(target).or_insert_with(Rational::zero) += &ai * &bj;
        }
    }
    out
}

/// Row of the increase substep alone, as a distribution.
pub fn increase_row(m: &StateSignature) -> ExactDistribution {
    a_row(m)
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (m.moved(i + 1, None), v))
        .collect()
}

/// Row of the decrease substep alone, as a distribution.
pub fn decrease_row(m: &StateSignature) -> ExactDistribution {
    match b_row_lifted(m) {
        None => ExactDistribution::from([(m.clone(), Rational::one())]),
        Some(b) => b
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (m.shifted(j + 1, -1).expect("admissible decrease"), v))
            .collect(),
    }
}

/// `t` composed steps by repeated exact rows on the lattice.
pub fn evolve_lattice(initial: &ExactDistribution, t: usize) -> ExactDistribution {
    let mut dist = initial.clone();
    for _ in 0..t {
        let mut next = ExactDistribution::new();
        for (s, mass) in &dist {
            for (target, p) in exact_row(s) {
                *next.entry(target).or_insert_with(Rational::zero) += mass * &p;
            }
        }
        dist = next;
    }
    dist
}

/// `t` composed steps from a point mass, computed with the truncated block
/// matrix `M`. States off `P` are handled by the uniform shift
/// `(m, k) -> (m - d, k - d)`, `d = s_m - s_k`, which leaves every
/// coefficient unchanged and lands on `P`.
pub fn evolve_blocks(start: &StateSignature, t: usize, w_max: i64) -> Result<(ExactDistribution, Evolution)> {
    let d = start.sum() - start.k().sum();
    let k_shift = KWeight::new(start.k().as_slice().iter().map(|v| v - d).collect())?;
    if !covers_p(&k_shift) {
        return Err(Error::Domain(format!(
            "the shifted weight {k_shift} has k_n < 0 with n > 1; its (w, r) window misses part of P"
        )));
    }
    let m_shift = StateSignature::new(start.m().iter().map(|v| v - d).collect(), &k_shift)?;
    let p = wr_from_state(&m_shift)?;
    let ev = evolve(&BTreeMap::from([(p, Rational::one())]), t, &k_shift, w_max)?;
    let mut out = ExactDistribution::new();
    for (q, mass) in &ev.distribution {
        let shifted = state_from_wr(q, &k_shift)?;
        let back = StateSignature::new(shifted.m().iter().map(|v| v + d).collect(), start.k())?;
        out.insert(back, mass.clone());
    }
    Ok((out, ev))
}

/// Empirical counts over states.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Empirical {
    pub counts: BTreeMap<StateSignature, u64>,
    pub total: u64,
}

impl Empirical {
    pub fn frequency(&self, s: &StateSignature) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        *self.counts.get(s).unwrap_or(&0) as f64 / self.total as f64
    }

    /// Total-variation distance to an exact distribution.
    pub fn tv_distance(&self, exact: &ExactDistribution) -> f64 {
        let mut sum = 0.0;
        for (s, p) in exact {
            sum += (self.frequency(s) - to_f64(p)).abs();
        }
        for s in self.counts.keys() {
            if !exact.contains_key(s) {
                sum += self.frequency(s);
            }
        }
        sum / 2.0
    }

    /// CSV `state,count,frequency`; the state is written as `"m1,m2,..."`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state,count,frequency\n");
        for (s, c) in &self.counts {
            let _ = writeln!(out, "\"{}\",{},{}", join(s.m()), c, self.frequency(s));
        }
        out
    }
}

fn join(m: &[i64]) -> String {
    m.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Recorded trajectories for a subset of walkers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryLog {
    pub seed: u64,
    pub mechanism: Mechanism,
    /// `(walker_id, states at steps 0..=t)`.
    pub walkers: Vec<(u64, Vec<StateSignature>)>,
}

impl TrajectoryLog {
    /// One record per step: `walker_id,step,"m1,m2,..."` under a fixed header.
    pub fn to_records(&self) -> String {
        let mut out = String::from("walker_id,step,m\n");
        for (id, path) in &self.walkers {
            for (step, s) in path.iter().enumerate() {
                let _ = writeln!(out, "{id},{step},\"{}\"", join(s.m()));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub initial: StateSignature,
    pub steps: usize,
    pub walkers: u64,
    pub seed: u64,
    pub mechanism: Mechanism,
    /// Worker threads; results do not depend on it.
    pub workers: usize,
    /// Walkers `0..log_walkers` have their full path recorded.
    pub log_walkers: u64,
}

#[derive(Clone, Debug)]
pub struct SimOutcome {
    pub empirical: Empirical,
    pub log: TrajectoryLog,
}

fn run_walker(cfg: &SimConfig, id: u64) -> Result<(StateSignature, Option<Vec<StateSignature>>)> {
    let mut rng = walker_rng(cfg.seed, id);
    let mut cur = cfg.initial.clone();
    let mut path = (id < cfg.log_walkers).then(|| vec![cur.clone()]);
    for _ in 0..cfg.steps {
        cur = full_step(&cur, &mut rng, cfg.mechanism)?;
        if let Some(p) = path.as_mut() {
            p.push(cur.clone());
        }
    }
    Ok((cur, path))
}

/// Runs `walkers` independent composed walks for `steps` steps.
///
/// Walker `i` draws from its own stream derived from `(seed, i)`, so the
/// outcome is identical for any number of worker threads.
pub fn simulate(cfg: &SimConfig) -> Result<SimOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let results: Vec<(StateSignature, Option<Vec<StateSignature>>)> = pool.install(|| {
        (0..cfg.walkers)
            .into_par_iter()
            .map(|id| run_walker(cfg, id))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut empirical = Empirical::default();
    let mut walkers = Vec::new();
    for (id, (end, path)) in results.into_iter().enumerate() {
        *empirical.counts.entry(end).or_insert(0) += 1;
        empirical.total += 1;
        if let Some(p) = path {
            walkers.push((id as u64, p));
        }
    }
    Ok(SimOutcome {
        empirical,
        log: TrajectoryLog {
            seed: cfg.seed,
            mechanism: cfg.mechanism,
            walkers,
        },
    })
}
