//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use dualwalk::blocks::{check_factorization, tilde_row, Layout, Tilde, TruncatedBlockMatrix};
use dualwalk::rational::{int, ratio, to_f64, to_pq};
use dualwalk::sampling::seeded;
use dualwalk::urn::{self, UrnView};
use dualwalk::walk::{evolve_blocks, exact_row, simulate, Mechanism, SimConfig};
use dualwalk::young::{self, YoungState};
use dualwalk::{a_row, b_row, state_from_wr, wr_from_state, KWeight, Rational, StateSignature};
use num_bigint::BigUint;
use num_traits::{One, Zero};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn kw(k: &[i64]) -> KWeight {
    KWeight::new(k.to_vec()).unwrap()
}

fn st(m: &[i64], k: &[i64]) -> StateSignature {
    StateSignature::new(m.to_vec(), &kw(k)).unwrap()
}

fn within(limit: Duration, started: Instant) -> std::result::Result<Duration, String> {
    let took = started.elapsed();
    if took <= limit {
        Ok(took)
    } else {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    }
}

fn unit_sums() -> Outcome {
    let started = Instant::now();
    let mut rng = seeded(1);
    let mut count = 0;
    for n in 1..=5 {
        for _ in 0..120 {
            let m = common::random_state(&mut rng, n, 4, 8);
            let sa: Rational = a_row(&m).iter().sum();
            let sb: Rational = b_row(&m).iter().sum();
            if !sa.is_one() || !sb.is_one() {
                return Err(format!("{m}: sum a = {}, sum b = {}", to_pq(&sa), to_pq(&sb)));
            }
            count += 1;
        }
    }
    let took = within(Duration::from_secs(5), started)?;
    Ok(format!("{count} states, n = 1..5, in {took:.2?}"))
}

/// Weights with `k_n >= 0` (or `n = 1`, any sign) used for the matrix criteria.
fn matrix_weights() -> Vec<Vec<i64>> {
    vec![
        vec![3],
        vec![-2],
        vec![0],
        vec![6, 3],
        vec![2, 2],
        vec![4, 0],
        vec![3, 2, 0],
        vec![4, 2, 1],
        vec![2, 1, 1, 0],
        vec![3, 2, 1, 0],
    ]
}

fn stochasticity() -> Outcome {
    let mut rows = 0usize;
    for k in matrix_weights() {
        let k = kw(&k);
        for layout in [Layout::M, Layout::M1, Layout::M2] {
            let mat = TruncatedBlockMatrix::build(layout, &k, 12).map_err(|e| e.to_string())?;
            if let Some((p, s)) = mat.stochasticity_violations().into_iter().next() {
                return Err(format!("{layout:?} for k = {k}: row {p} sums to {}", to_pq(&s)));
            }
            for w in mat.w_min()..=mat.w_max() {
                if mat.is_interior(w) {
                    rows += k.omega_size();
                }
            }
        }
    }
    Ok(format!("{rows} interior rows of M, M1, M2 with W_max = 12, n <= 4"))
}

fn factorization() -> Outcome {
    let mut total = 0;
    for k in matrix_weights() {
        let k = kw(&k);
        let report = check_factorization(&k, 12).map_err(|e| e.to_string())?;
        if let Some(bad) = report.violations().next() {
            return Err(format!("k = {k}: {} fails at w = {}", bad.identity, bad.w));
        }
        let ws: Vec<i64> = report.checks.iter().map(|c| c.w).collect();
        if ws.first() != Some(&k.min_offset()) || ws.last() != Some(&(k.min_offset() + 11)) {
            return Err(format!("k = {k}: unexpected w range {ws:?}"));
        }
        total += report.checks.len();
    }
    Ok(format!("{total} block identities, 12 levels each, n <= 4"))
}

/// Class probabilities by walking every word; each word contributes the
/// product of its ball counts over the common denominator.
fn brute_force_classes(m: &StateSignature) -> Vec<Rational> {
    let n = m.n();
    let views: Vec<UrnView> = urn::urn_order(n)
        .into_iter()
        .map(|(lo, hi)| UrnView::new(m, lo, hi).unwrap())
        .collect();
    let denominator: BigUint = views.iter().map(|v| BigUint::from(v.total())).product();
    let mut sums = vec![0u128; n + 1];
    for word in urn::enumerate_words(n).unwrap() {
        let weight: u128 = word.0.iter().zip(&views).map(|(l, v)| v.count(*l) as u128).product();
        if weight > 0 {
            sums[urn::classify(&word, n).unwrap().0 - 1] += weight;
        }
    }
    sums.into_iter()
        .map(|s| Rational::new(BigUint::from(s).into(), denominator.clone().into()))
        .collect()
}

fn urn_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = seeded(4);
    let mut checked = Vec::new();
    for (n, count) in [(1, 100), (2, 100), (3, 100), (4, 5)] {
        for _ in 0..count {
            let m = common::random_state(&mut rng, n, 3, 6);
            let brute = brute_force_classes(&m);
            if brute != a_row(&m) {
                return Err(format!("{m}: urn classes differ from a_sq"));
            }
        }
        checked.push(format!("n={n}: {count}"));
    }
    let took = within(Duration::from_secs(120), started)?;
    Ok(format!("{} states, words enumerated, in {took:.2?}", checked.join(", ")))
}

fn cardinalities() -> Outcome {
    let expected: [(usize, u64, Vec<u64>); 3] = [
        (2, 16, vec![6, 4, 6]),
        (3, 768, vec![240, 144, 144, 240]),
        (4, 294_912, vec![80640, 46080, 41472, 46080, 80640]),
    ];
    for (n, size, classes) in expected {
        let enumerated = urn::class_cardinality_enumerated(n).map_err(|e| e.to_string())?;
        let recursive: Vec<u64> = urn::class_cardinality_recursive(n)
            .iter()
            .map(|v| u64::try_from(v).unwrap())
            .collect();
        let words = urn::enumerate_words(n).map_err(|e| e.to_string())?.len() as u64;
        if enumerated != classes || recursive != classes || words != size || urn::sample_space_size(n) != size.into() {
            return Err(format!(
                "n = {n}: enumerated {enumerated:?}, recursive {recursive:?}, {words} words, expected {classes:?} of {size}"
            ));
        }
    }
    Ok("|S_3| = 16, |S_4| = 768, |S_5| = 294912 with their class tables, by enumeration and by recursion".into())
}

fn young_model() -> Outcome {
    let mut rng = seeded(6);
    let mut checked = 0;
    for n in 1..=3 {
        while checked < 60 * n {
            let m = common::random_state(&mut rng, n, 3, 6);
            if m.get(n + 1) < 0 {
                continue;
            }
            let d = YoungState::from_signature(&m).map_err(|e| e.to_string())?;
            let from_young = young::class_distribution(&d).map_err(|e| e.to_string())?;
            let from_urn = urn::class_distribution(&m).map_err(|e| e.to_string())?;
            if from_young != from_urn || from_urn != a_row(&m) {
                return Err(format!("{m}: young, urn and a_sq disagree"));
            }
            checked += 1;
        }
    }
    let m = st(&[6, 6, 1], &[6, 3]);
    let d = YoungState::from_signature(&m).unwrap();
    let sizes = young::class_sizes(&d).map_err(|e| e.to_string())?;
    let (m1, k2, m3) = (6, 3, 1);
    let expected = vec![ratio(m1 - k2 + 2, m1 - m3 + 2), int(0), ratio(k2 - m3, m1 - m3 + 2)];
    let probs = young::class_distribution(&d).map_err(|e| e.to_string())?;
    if sizes.realizable != [4, 0, 2] || probs != expected || probs != a_row(&m) {
        return Err(format!(
            "degenerate {m}: realizable {:?}, probabilities {:?}",
            sizes.realizable,
            probs.iter().map(to_pq).collect::<Vec<_>>()
        ));
    }
    Ok(format!(
        "{checked} states n <= 3, degenerate k_1 = m_2 gives sizes (4,0,2) and (5/7, 0, 2/7)"
    ))
}

fn composition() -> Outcome {
    let mut rng = seeded(7);
    for n in 1..=3 {
        for _ in 0..100 {
            let m = common::random_state(&mut rng, n, 3, 6);
            let row = exact_row(&m);
            if row != tilde_row(&m, Tilde::Composed) {
                return Err(format!("{m}: composed row differs from the block formulas"));
            }
            if row.len() > n * (n + 1) + 1 {
                return Err(format!("{m}: support {} exceeds n(n+1)+1", row.len()));
            }
        }
        for _ in 0..100 {
            let m = common::random_p_state(&mut rng, n, 2, 6);
            let p = wr_from_state(&m).map_err(|e| e.to_string())?;
            let mat = TruncatedBlockMatrix::build(Layout::M, m.k(), p.w + 1).map_err(|e| e.to_string())?;
            let from_m: BTreeMap<_, _> = mat
                .row(p.w, p.r.position(m.k()))
                .into_iter()
                .map(|(q, v)| (state_from_wr(&q, m.k()).unwrap(), v))
                .collect();
            if exact_row(&m) != from_m {
                return Err(format!("{m}: composed row differs from the M row at {p}"));
            }
        }
    }
    Ok("100 lattice states and 100 states of P per n = 1..3; support bound holds".into())
}

fn monte_carlo() -> Outcome {
    let started = Instant::now();
    let start = st(&[5, 2], &[3]);
    let walkers = 100_000u64;
    let cfg = |steps| SimConfig {
        initial: start.clone(),
        steps,
        walkers,
        seed: 2718,
        mechanism: Mechanism::Direct,
        workers: std::thread::available_parallelism().map_or(1, |p| p.get()),
        log_walkers: 0,
    };
    let exact = exact_row(&start);
    let reference = [
        (st(&[5, 2], &[3]), ratio(8, 15)),
        (st(&[6, 1], &[3]), ratio(3, 10)),
        (st(&[4, 3], &[3]), ratio(1, 6)),
    ];
    for (s, p) in &reference {
        if exact.get(s) != Some(p) {
            return Err(format!("exact one-step mass at {s} is not {}", to_pq(p)));
        }
    }
    let one = simulate(&cfg(1)).map_err(|e| e.to_string())?;
    let mut gaps = Vec::new();
    for (s, p) in &reference {
        let p = to_f64(p);
        let sigma = (p * (1.0 - p) / walkers as f64).sqrt();
        let z = (one.empirical.frequency(s) - p).abs() / sigma;
        if z > 4.0 {
            return Err(format!("one-step frequency at {s} is {z:.2} sigma from {p}"));
        }
        gaps.push(format!("{z:.2}"));
    }
    let ten = simulate(&cfg(10)).map_err(|e| e.to_string())?;
    let (dist, ev) = evolve_blocks(&start, 10, 16).map_err(|e| e.to_string())?;
    if !ev.leaked.is_zero() {
        return Err(format!("truncated evolution lost {}", to_pq(&ev.leaked)));
    }
    let tv = ten.empirical.tv_distance(&dist);
    if tv > 0.02 {
        return Err(format!("t = 10 total-variation distance {tv:.4} > 0.02"));
    }
    let took = within(Duration::from_secs(30), started)?;
    Ok(format!(
        "one step (8/15, 3/10, 1/6) at z = {}, t = 10 TV = {tv:.4}, {walkers} walkers, in {took:.2?}",
        gaps.join("/")
    ))
}

fn determinism() -> Outcome {
    let run = |workers| {
        simulate(&SimConfig {
            initial: st(&[8, 5, 1], &[6, 3]),
            steps: 25,
            walkers: 2_000,
            seed: 99,
            mechanism: Mechanism::Urn,
            workers,
            log_walkers: 2_000,
        })
        .map(|o| (o.log.to_records(), o.empirical.to_csv()))
        .map_err(|e| e.to_string())
    };
    let base = run(1)?;
    for workers in [2, 4, 8] {
        if run(workers)? != base {
            return Err(format!("output with {workers} workers differs from 1 worker"));
        }
    }
    let dir = std::env::temp_dir().join(format!("dualwalk-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut logs = Vec::new();
    for workers in ["1", "3"] {
        let path = dir.join(format!("log-{workers}.csv"));
        let argv = [
            "dualwalk", "simulate", "--k", "6,3", "--m", "8,5,1", "--t", "10", "--walkers", "500",
            "--seed", "5", "--mechanism", "urn", "--workers", workers, "--log",
            path.to_str().unwrap(), "--log-walkers", "500",
        ];
        let mut err = Vec::new();
        let code = dualwalk::cli::run(argv, &mut Vec::new(), &mut err);
        if code != 0 {
            return Err(format!("simulate exited with {code}: {}", String::from_utf8_lossy(&err).trim()));
        }
        logs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    if logs[0] != logs[1] {
        return Err("CLI trajectory logs differ between worker counts".into());
    }
    Ok(format!(
        "trajectory logs byte-identical across 1/2/4/8 workers ({} bytes) and via the CLI",
        base.0.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("unit sums of a_sq and b_sq", unit_sums),
        ("interior rows of M, M1, M2 are stochastic", stochasticity),
        ("block factorization A = YR, B = XR' + YS, C = XS'", factorization),
        ("urn class probabilities equal a_sq", urn_oracle),
        ("urn sample-space cardinalities", cardinalities),
        ("Young classes equal urn classes equal a_sq", young_model),
        ("composed row equals block formulas and M rows", composition),
        ("Monte Carlo agrees with exact distributions", monte_carlo),
        ("simulation is independent of worker count", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
