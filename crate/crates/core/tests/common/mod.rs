#![allow(dead_code)]

use dualwalk::{KWeight, PCoordinate, StateSignature};
use proptest::prelude::*;
use rand::Rng;

/// Weakly decreasing `k` of length `n`, entries near zero, small gaps.
pub fn k_strategy(n: usize, max_gap: i64) -> impl Strategy<Value = KWeight> {
    (-3i64..=6, proptest::collection::vec(0..=max_gap, n - 1)).prop_map(|(top, gaps)| {
        let mut k = vec![top];
        for g in gaps {
            let last = *k.last().unwrap();
            k.push(last - g);
        }
        KWeight::new(k).unwrap()
    })
}

/// Interlacing state for `k`, with `m_1 - k_1` and `k_n - m_{n+1}` up to `spread`.
pub fn state_strategy(n: usize, max_gap: i64, spread: i64) -> impl Strategy<Value = StateSignature> {
    k_strategy(n, max_gap).prop_flat_map(move |k| {
        let ks = k.as_slice().to_vec();
        let inner: Vec<_> = (1..n).map(|i| ks[i]..=ks[i - 1]).collect();
        (Just(k), 0..=spread, inner, 0..=spread).prop_map(move |(k, top, mid, bottom)| {
            let mut m = vec![ks[0] + top];
            m.extend(mid);
            m.push(ks[n - 1] - bottom);
            StateSignature::new(m, &k).unwrap()
        })
    })
}

pub fn any_state(max_n: usize) -> impl Strategy<Value = StateSignature> {
    (1..=max_n).prop_flat_map(|n| state_strategy(n, 3, 6))
}

/// Same distributions as the strategies above, driven by a plain rng.
pub fn random_state<R: Rng>(rng: &mut R, n: usize, max_gap: i64, spread: i64) -> StateSignature {
    let mut k = vec![rng.gen_range(-3i64..=6)];
    for _ in 1..n {
        let last = *k.last().unwrap();
        k.push(last - rng.gen_range(0..=max_gap));
    }
    let kw = KWeight::new(k.clone()).unwrap();
    let mut m = vec![k[0] + rng.gen_range(0..=spread)];
    for i in 1..n {
        m.push(rng.gen_range(k[i]..=k[i - 1]));
    }
    m.push(k[n - 1] - rng.gen_range(0..=spread));
    StateSignature::new(m, &kw).unwrap()
}

/// Random state of `P` for a `k` with `k_n >= 0` (or `n = 1`), via `(w, r)`.
pub fn random_p_state<R: Rng>(rng: &mut R, n: usize, max_gap: i64, max_w: i64) -> StateSignature {
    let low = if n == 1 { -3 } else { 0 };
    let mut k = vec![rng.gen_range(low..=low + 6)];
    for _ in 1..n {
        let last = *k.last().unwrap();
        k.push((last - rng.gen_range(0..=max_gap)).max(0));
    }
    let kw = KWeight::new(k).unwrap();
    let r = kw.omega_bounds().iter().map(|&b| rng.gen_range(0..=b)).collect();
    let w = kw.min_offset() + rng.gen_range(0..=max_w);
    dualwalk::state_from_wr(&PCoordinate::new(w, r, &kw).unwrap(), &kw).unwrap()
}
