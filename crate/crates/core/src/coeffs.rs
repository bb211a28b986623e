//! Transition coefficients `a_i^2(m, k)` and `b_i^2(m, k)`.
//!
//! Both are ratios of integer products:
//!
//! ```text
//! a_i^2 = | prod_{j=1..n} (k_j - m_i - j + i - 1) / prod_{j != i} (m_j - m_i - j + i) |
//! b_i^2 = | prod_{j=1..n} (k_j - m_i - j + i)     / prod_{j != i} (m_j - m_i - j + i) |
//! ```
//!
//! For an interlacing `m` the denominator never vanishes and each family
//! sums to one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::state::StateSignature;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    A,
    B,
}

/// Evaluates the formula on an arbitrary integer tuple. `None` when the
/// denominator vanishes, which cannot happen for interlacing tuples.
fn eval(family: Family, m: &[i64], k: &[i64], i: usize) -> Option<Rational> {
    let n = k.len();
    debug_assert_eq!(m.len(), n + 1);
    let ii = i as i64;
    let mi = m[i - 1];
    let shift = match family {
        Family::A => -1,
        Family::B => 0,
    };
    let mut num = BigInt::from(1);
    for (j0, &kj) in k.iter().enumerate() {
        let j = j0 as i64 + 1;
        num *= kj - mi - j + ii + shift;
    }
    let mut den = BigInt::from(1);
    for (j0, &mj) in m.iter().enumerate() {
        if j0 + 1 == i {
            continue;
        }
        let j = j0 as i64 + 1;
        den *= mj - mi - j + ii;
    }
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den).abs())
}

/// Integer weights proportional to the whole row, computed in `i128`.
/// `None` on overflow; callers fall back to exact big rationals.
fn small_weights(family: Family, m: &[i64], k: &[i64]) -> Option<Vec<u128>> {
    let n = k.len();
    let shift: i128 = match family {
        Family::A => -1,
        Family::B => 0,
    };
    let mut fracs = Vec::with_capacity(n + 1);
    for i in 1..=n + 1 {
        let ii = i as i128;
        let mi = m[i - 1] as i128;
        let mut num: i128 = 1;
        for (j0, &kj) in k.iter().enumerate() {
            let j = j0 as i128 + 1;
            num = num.checked_mul((kj as i128 - mi - j + ii + shift).abs())?;
        }
        let mut den: i128 = 1;
        for (j0, &mj) in m.iter().enumerate() {
            if j0 + 1 == i {
                continue;
            }
            let j = j0 as i128 + 1;
            den = den.checked_mul((mj as i128 - mi - j + ii).abs())?;
        }
        if den == 0 {
            return None;
        }
        let g = num.gcd(&den);
        fracs.push((num / g, den / g));
    }
    let lcm = fracs
        .iter()
        .try_fold(1i128, |acc, &(_, d)| acc.checked_mul(d / acc.gcd(&d)))?;
    fracs
        .iter()
        .map(|&(p, q)| p.checked_mul(lcm / q).map(|v| v as u128))
        .collect()
}

/// Weights proportional to `a_row(m)`, if they fit in machine integers.
pub(crate) fn a_weights_small(m: &StateSignature) -> Option<Vec<u128>> {
    small_weights(Family::A, m.m(), m.k().as_slice())
}

/// Weights proportional to `b_row(m)`, if they fit in machine integers.
pub(crate) fn b_weights_small(m: &StateSignature) -> Option<Vec<u128>> {
    small_weights(Family::B, m.m(), m.k().as_slice())
}

fn check_index(m: &StateSignature, i: usize) -> Result<()> {
    let max = m.n() + 1;
    if i == 0 || i > max {
        return Err(Error::IndexOutOfRange { index: i, max });
    }
    Ok(())
}

fn on_state(family: Family, m: &StateSignature, i: usize) -> Result<Rational> {
    check_index(m, i)?;
    let v = eval(family, m.m(), m.k().as_slice(), i);
    Ok(v.expect("coefficient denominator vanished on an interlacing state"))
}

/// Probability that the increase substep raises `m_i` (1-based `i`).
pub fn a_sq(m: &StateSignature, i: usize) -> Result<Rational> {
    on_state(Family::A, m, i)
}

/// Probability that the decrease substep lowers `m_i` (1-based `i`).
pub fn b_sq(m: &StateSignature, i: usize) -> Result<Rational> {
    on_state(Family::B, m, i)
}

/// `[a_1^2, ..., a_{n+1}^2]`.
pub fn a_row(m: &StateSignature) -> Vec<Rational> {
    (1..=m.n() + 1)
        .map(|i| eval(Family::A, m.m(), m.k().as_slice(), i).expect("interlacing state"))
        .collect()
}

/// `[b_1^2, ..., b_{n+1}^2]`.
pub fn b_row(m: &StateSignature) -> Vec<Rational> {
    (1..=m.n() + 1)
        .map(|i| eval(Family::B, m.m(), m.k().as_slice(), i).expect("interlacing state"))
        .collect()
}

/// `b_i^2` at the raw tuple `m + e_{n+1}`, or `None` when that tuple leaves
/// the dual (`m_{n+1} = k_n`). Callers decide how to treat the vacuous row.
pub fn b_row_lifted(m: &StateSignature) -> Option<Vec<Rational>> {
    let lifted = m.shifted(m.n() + 1, 1)?;
    Some(b_row(&lifted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::state::KWeight;
    use num_traits::One;

    fn st(m: &[i64], k: &[i64]) -> StateSignature {
        StateSignature::new(m.to_vec(), &KWeight::new(k.to_vec()).unwrap()).unwrap()
    }

    // Independent closed forms for n = 2, written out by hand.
    fn a_n2(m: &[i64], k: &[i64]) -> [Rational; 3] {
        let (m1, m2, m3, k1, k2) = (m[0], m[1], m[2], k[0], k[1]);
        [
            ratio((m1 - k1 + 1) * (m1 - k2 + 2), (m1 - m2 + 1) * (m1 - m3 + 2)),
            ratio((k1 - m2) * (m2 - k2 + 1), (m1 - m2 + 1) * (m2 - m3 + 1)),
            ratio((k1 - m3 + 1) * (k2 - m3), (m1 - m3 + 2) * (m2 - m3 + 1)),
        ]
    }

    #[test]
    fn a_examples() {
        let m = st(&[8, 5, 1], &[6, 3]);
        assert_eq!(a_sq(&m, 1).unwrap(), ratio(7, 12));
        assert_eq!(a_sq(&m, 2).unwrap(), ratio(3, 20));
        assert_eq!(a_sq(&m, 3).unwrap(), ratio(4, 15));
        assert_eq!(a_sq(&st(&[6, 6, 1], &[6, 3]), 2).unwrap(), int(0));
    }

    #[test]
    fn b_examples() {
        let m = st(&[8, 5, 1], &[6, 3]);
        assert_eq!(b_row(&m), vec![ratio(1, 3), ratio(1, 5), ratio(7, 15)]);
        assert_eq!(b_sq(&st(&[8, 3, 1], &[6, 3]), 2).unwrap(), int(0));
        assert_eq!(b_sq(&st(&[3, 1], &[3]), 1).unwrap(), int(0));
    }

    #[test]
    fn matches_hand_expanded_n2() {
        for m1 in 6..10 {
            for m2 in 3..=6 {
                for m3 in -2..=3 {
                    let m = st(&[m1, m2, m3], &[6, 3]);
                    assert_eq!(a_row(&m), a_n2(m.m(), &[6, 3]).to_vec(), "{m:?}");
                }
            }
        }
    }

    #[test]
    fn small_weights_are_proportional() {
        let m = st(&[8, 5, 1], &[6, 3]);
        assert_eq!(a_weights_small(&m).unwrap(), vec![35, 9, 16]);
        assert_eq!(b_weights_small(&m).unwrap(), vec![5, 3, 7]);
    }

    #[test]
    fn index_errors() {
        let m = st(&[8, 5, 1], &[6, 3]);
        assert!(matches!(a_sq(&m, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(b_sq(&m, 4), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn n1_closed_form() {
        // a_1^2 = (m1-k1+1)/(m1-m2+1), b_1^2 = (m1-k1)/(m1-m2+1)
        let m = st(&[5, 2], &[3]);
        assert_eq!(a_row(&m), vec![ratio(3, 4), ratio(1, 4)]);
        assert_eq!(b_row(&m), vec![ratio(2, 4), ratio(2, 4)]);
        let total: Rational = b_row(&m).iter().sum();
        assert!(total.is_one());
    }

    #[test]
    fn lifted_row_is_vacuous_on_the_boundary() {
        assert!(b_row_lifted(&st(&[5, 3], &[3])).is_none());
        let lifted = b_row_lifted(&st(&[8, 5, 1], &[6, 3])).unwrap();
        assert_eq!(lifted, b_row(&st(&[8, 5, 2], &[6, 3])));
    }
}
