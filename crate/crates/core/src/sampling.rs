//! Seeded random streams and exact categorical draws.
//!
//! Draws never go through floating point: weights are integers (ball counts,
//! or rationals rescaled to a common denominator) and one uniform integer
//! below the total picks the outcome.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{common_denominator_weights, Rational};

/// Generator used throughout the crate.
pub type StreamRng = ChaCha8Rng;

/// Independent stream for one walker: the seed picks the key, the walker
/// index picks the ChaCha stream. Results never depend on which thread runs
/// the walker.
pub fn walker_rng(seed: u64, walker: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(walker);
    rng
}

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Index `i` with probability `weights[i] / sum(weights)`. Panics on an
/// all-zero weight vector.
pub fn draw_u64<R: Rng + ?Sized>(weights: &[u64], rng: &mut R) -> usize {
    let total: u64 = weights.iter().sum();
    assert!(total > 0, "categorical draw over zero total weight");
    let mut ticket = rng.gen_range(0..total);
    for (i, &w) in weights.iter().enumerate() {
        if ticket < w {
            return i;
        }
        ticket -= w;
    }
    unreachable!("ticket below total always lands")
}

pub fn draw_u128<R: Rng + ?Sized>(weights: &[u128], rng: &mut R) -> usize {
    let total = weights
        .iter()
        .try_fold(0u128, |acc, &w| acc.checked_add(w))
        .expect("weight total overflows u128");
    assert!(total > 0, "categorical draw over zero total weight");
    let mut ticket = rng.gen_range(0..total);
    for (i, &w) in weights.iter().enumerate() {
        if ticket < w {
            return i;
        }
        ticket -= w;
    }
    unreachable!("ticket below total always lands")
}

pub fn draw_big<R: Rng + ?Sized>(weights: &[BigUint], rng: &mut R) -> usize {
    if let Some(small) = weights.iter().map(|w| w.to_u64()).collect::<Option<Vec<u64>>>() {
        if small.iter().try_fold(0u64, |acc, &w| acc.checked_add(w)).is_some() {
            return draw_u64(&small, rng);
        }
    }
    let total: BigUint = weights.iter().sum();
    assert!(!total.is_zero(), "categorical draw over zero total weight");
    let mut ticket = rng.gen_biguint_below(&total);
    for (i, w) in weights.iter().enumerate() {
        if &ticket < w {
            return i;
        }
        ticket -= w;
    }
    unreachable!("ticket below total always lands")
}

/// Index `i` with probability `probs[i]` (normalised by their sum).
pub fn draw_rational<R: Rng + ?Sized>(probs: &[Rational], rng: &mut R) -> usize {
    draw_big(&common_denominator_weights(probs), rng)
}
