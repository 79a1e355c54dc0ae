//! Cylinder geometry and the probabilities of the digit process under
//! Lebesgue measure.
//!
//! The cylinder with base `(j_1, ..., j_n)` has length
//! `(a_1...a_{n-1}) / (b_1...b_{n-1}) * 1 / (j_n (j_n - 1))`, and the digits
//! form a Markov chain with `P(d_n = k | d_{n-1} = j) = h_{n-1}(j) / (k (k - 1))`
//! for `k > h_{n-1}(j)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Result, RoeError};
use crate::expansion::DigitSeq;
use crate::rational::{self, serde_forms};
use crate::system::RoeSystem;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cylinder {
    pub base: DigitSeq,
    #[serde(with = "serde_forms::pq")]
    pub inf: BigRational,
    #[serde(with = "serde_forms::pq")]
    pub sup: BigRational,
    #[serde(with = "serde_forms::pq")]
    pub length: BigRational,
}

impl Cylinder {
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.inf <= x && x <= &self.sup
    }
}

/// Builds the cylinder over an admissible base, computing the endpoints and
/// the closed-form length separately and cross-checking them.
pub fn cylinder(base: &DigitSeq) -> Cylinder {
    let (inf, sup) = base.evaluate_interval();
    let length = closed_form_length(base);
    assert_eq!(&sup - &inf, length, "cylinder endpoints disagree with closed-form length");
    Cylinder {
        base: base.clone(),
        inf,
        sup,
        length,
    }
}

pub fn cylinder_from_digits(system: &RoeSystem, digits: &[u64]) -> Result<Cylinder> {
    Ok(cylinder(&DigitSeq::from_u64(system, digits)?))
}

/// `(a_1...a_{n-1}) / (b_1...b_{n-1}) / (d_n (d_n - 1))`.
pub fn closed_form_length(base: &DigitSeq) -> BigRational {
    let products = base.coefficient_products();
    let last = base.digits().last().expect("non-empty base");
    let weight = products.last().expect("non-empty base").clone();
    weight / BigRational::from_integer(last * (last - 1u32))
}

fn check_digit(j: &BigInt, what: &str) -> Result<()> {
    if j < &BigInt::from(2) {
        Err(RoeError::domain(format!("{what} = {j} must be at least 2")))
    } else {
        Ok(())
    }
}

/// `P(d_1 = j) = 1 / (j (j - 1))`.
pub fn first_digit_prob(j: &BigInt) -> Result<BigRational> {
    check_digit(j, "j")?;
    Ok(rational::reduced(BigInt::one(), j * (j - 1u32)))
}

/// `P(d_n = k | d_{n-1} = j)`, exactly zero when `k <= h_{n-1}(j)`.
pub fn transition_prob(system: &RoeSystem, n: usize, j: &BigInt, k: &BigInt) -> Result<BigRational> {
    if n < 2 {
        return Err(RoeError::domain("transitions start at position 2"));
    }
    check_digit(j, "j")?;
    check_digit(k, "k")?;
    let h = system.h(n - 1, j)?;
    if k <= &h {
        return Ok(BigRational::zero());
    }
    Ok(rational::reduced(h, k * (k - 1u32)))
}

/// Ratio of the child cylinder with difference symbol `i` at position
/// `n + 1` to its parent ending in `j_parent` at position `n`:
/// `h / ((h + i)(h + i - 1))` with `h = h_n(j_parent)`.
pub fn child_ratio(system: &RoeSystem, n: usize, j_parent: &BigInt, i: &BigInt) -> Result<BigRational> {
    if n < 1 {
        return Err(RoeError::domain("positions start at 1"));
    }
    check_digit(j_parent, "j_parent")?;
    if i < &BigInt::one() {
        return Err(RoeError::domain(format!("difference symbol {i} < 1")));
    }
    let h = system.h(n, j_parent)?;
    let k = &h + i;
    Ok(rational::reduced(h, &k * (&k - 1u32)))
}

/// Uniform bound `l_k` on the child ratio at position `k >= 2`, the
/// supremum over all admissible histories.
pub fn uniform_bound_l(system: &RoeSystem, k: usize) -> Result<BigRational> {
    let bounds = uniform_bounds(system, k, k)?;
    Ok(bounds.into_iter().next().expect("one bound"))
}

/// `l_k` for every `k` in `[from, to]`, sharing one minimal growth path.
///
/// With h nondecreasing in j, every digit at position `k - 1` is at least
/// `d_min[k - 1]`, and the child ratio is largest at symbol 1, so
/// `l_k = 1 / (h_{k-1}(d_min[k - 1]) + 1)`.
pub fn uniform_bounds(system: &RoeSystem, from: usize, to: usize) -> Result<Vec<BigRational>> {
    if from < 2 || to < from {
        return Err(RoeError::domain(format!("bad bound range [{from}, {to}]")));
    }
    if !system.monotone_verified() {
        return Err(RoeError::MonotonicityUnverified(system.name().to_string()));
    }
    let path = system.min_growth_path(to - 1)?;
    (from..=to)
        .map(|k| {
            let h = system.h(k - 1, &path[k - 2])?;
            // 1 / n is already in lowest terms.
            Ok(BigRational::new_raw(BigInt::one(), h + 1u32))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convergence {
    Summable,
    NonSummable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailSum {
    pub from: usize,
    pub to: usize,
    pub terms: Vec<BigRational>,
    pub sum: BigRational,
    pub verdict: Convergence,
}

/// Exact `sum_{k=from}^{to} l_k` with a finite-range convergence verdict:
/// `Summable` when every ratio `l_{k+1} / l_k` is at most 1/2,
/// `NonSummable` when no term drops below half of `l_from`, otherwise
/// `Inconclusive`. A single-term range is always `Inconclusive`.
pub fn tail_sum_l(system: &RoeSystem, from: usize, to: usize) -> Result<TailSum> {
    let terms = uniform_bounds(system, from, to)?;
    let sum = rational::sum_exact(&terms);
    let verdict = classify_terms(&terms);
    Ok(TailSum {
        from,
        to,
        terms,
        sum,
        verdict,
    })
}

pub(crate) fn classify_terms(terms: &[BigRational]) -> Convergence {
    if terms.len() < 2 {
        return Convergence::Inconclusive;
    }
    // Compare `2 a <= b` for nonnegative rationals by cross-multiplying;
    // ratio arithmetic would reduce huge operands at every step.
    let twice_cmp = |a: &BigRational, b: &BigRational| {
        (a.numer() * b.denom() * 2u32).cmp(&(b.numer() * a.denom()))
    };
    let geometric = terms.windows(2).all(|w| {
        if w[0].is_zero() {
            w[1].is_zero()
        } else {
            twice_cmp(&w[1], &w[0]).is_le()
        }
    });
    if geometric {
        return Convergence::Summable;
    }
    if !terms[0].is_zero() && terms.iter().all(|t| twice_cmp(t, &terms[0]).is_ge()) {
        return Convergence::NonSummable;
    }
    Convergence::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn b(v: u64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn cylinder_examples() {
        for sys in [RoeSystem::engel(), RoeSystem::sylvester(), RoeSystem::luroth()] {
            let c = cylinder_from_digits(&sys, &[2]).unwrap();
            assert_eq!((c.inf, c.sup, c.length), (ratio(1, 2), ratio(1, 1), ratio(1, 2)));
        }
        let s = cylinder_from_digits(&RoeSystem::sylvester(), &[2, 3]).unwrap();
        assert_eq!(s.length, ratio(1, 6));
        let e = cylinder_from_digits(&RoeSystem::engel(), &[2, 2]).unwrap();
        assert_eq!(e.length, ratio(1, 4));
        assert!(matches!(
            cylinder_from_digits(&RoeSystem::sylvester(), &[3, 6]),
            Err(RoeError::InvalidDigits(_))
        ));
    }

    #[test]
    fn cylinder_json_shape() {
        let c = cylinder_from_digits(&RoeSystem::sylvester(), &[2, 3]).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"base": ["2", "3"], "inf": "5/6", "sup": "1/1", "length": "1/6"})
        );
    }

    #[test]
    fn first_digit_probabilities() {
        assert_eq!(first_digit_prob(&b(2)).unwrap(), ratio(1, 2));
        assert_eq!(first_digit_prob(&b(3)).unwrap(), ratio(1, 6));
        assert!(first_digit_prob(&b(1)).is_err());
        for big_j in [2u64, 5, 17, 100] {
            let total: BigRational = (2..=big_j).map(|j| first_digit_prob(&b(j)).unwrap()).sum();
            assert_eq!(total, BigRational::one() - ratio(1, big_j as i64));
        }
    }

    #[test]
    fn transition_probabilities() {
        let s = RoeSystem::sylvester();
        assert_eq!(transition_prob(&s, 2, &b(3), &b(7)).unwrap(), ratio(1, 7));
        assert_eq!(transition_prob(&s, 2, &b(3), &b(6)).unwrap(), BigRational::zero());
        assert_eq!(
            transition_prob(&RoeSystem::engel(), 2, &b(2), &b(2)).unwrap(),
            ratio(1, 2)
        );
        assert!(transition_prob(&s, 1, &b(3), &b(7)).is_err());
        let bad = RoeSystem::from_polynomials("bad", &[1], &[1, 1]);
        assert!(matches!(
            transition_prob(&bad, 2, &b(2), &b(9)),
            Err(RoeError::NonIntegralH { .. })
        ));
    }

    #[test]
    fn child_ratios() {
        let s = RoeSystem::sylvester();
        assert_eq!(child_ratio(&s, 1, &b(2), &b(1)).unwrap(), ratio(1, 3));
        let parent = cylinder_from_digits(&s, &[2]).unwrap();
        let child = cylinder_from_digits(&s, &[2, 3]).unwrap();
        assert_eq!(child.length / parent.length, ratio(1, 3));
        for j in 2..30u64 {
            assert_eq!(
                child_ratio(&RoeSystem::luroth(), 1, &b(j), &b(1)).unwrap(),
                ratio(1, 2)
            );
        }
        assert!(child_ratio(&s, 1, &b(2), &b(0)).is_err());
    }

    #[test]
    fn child_ratio_peaks_at_first_symbol() {
        for sys in [RoeSystem::engel(), RoeSystem::sylvester(), RoeSystem::luroth()] {
            for j in 2..12u64 {
                let h = sys.h_u64(1, j).unwrap();
                let first = child_ratio(&sys, 1, &b(j), &b(1)).unwrap();
                assert_eq!(first, BigRational::new(BigInt::one(), h + 1u32));
                let mut prev = first;
                for i in 2..40u64 {
                    let r = child_ratio(&sys, 1, &b(j), &b(i)).unwrap();
                    assert!(r < prev);
                    prev = r;
                }
            }
        }
    }

    #[test]
    fn sylvester_bounds() {
        let s = RoeSystem::sylvester();
        let ls: Vec<_> = (2..=5).map(|k| uniform_bound_l(&s, k).unwrap()).collect();
        assert_eq!(ls, vec![ratio(1, 3), ratio(1, 7), ratio(1, 43), ratio(1, 1807)]);
        assert!(uniform_bound_l(&s, 1).is_err());
    }

    #[test]
    fn engel_and_luroth_bounds_are_constant() {
        for sys in [RoeSystem::engel(), RoeSystem::luroth()] {
            for k in 2..10 {
                assert_eq!(uniform_bound_l(&sys, k).unwrap(), ratio(1, 2));
            }
        }
    }

    #[test]
    fn unverified_system_refuses_bounds() {
        let sys = RoeSystem::from_polynomials("ex5", &[0, 1], &[1]);
        assert!(matches!(
            uniform_bound_l(&sys, 3),
            Err(RoeError::MonotonicityUnverified(_))
        ));
        let (sys, _) = sys.validated(1, 100).unwrap();
        assert_eq!(uniform_bound_l(&sys, 2).unwrap(), ratio(1, 5));
    }

    #[test]
    fn tail_sums() {
        let s = tail_sum_l(&RoeSystem::sylvester(), 2, 6).unwrap();
        let expected = ratio(1, 3) + ratio(1, 7) + ratio(1, 43) + ratio(1, 1807) + ratio(1, 3263443);
        assert_eq!(s.sum, expected);
        assert_eq!(s.verdict, Convergence::Summable);
        for sys in [RoeSystem::engel(), RoeSystem::luroth()] {
            let t = tail_sum_l(&sys, 2, 10).unwrap();
            assert_eq!(t.sum, ratio(9, 2));
            assert_eq!(t.verdict, Convergence::NonSummable);
        }
        assert_eq!(
            tail_sum_l(&RoeSystem::sylvester(), 4, 4).unwrap().verdict,
            Convergence::Inconclusive
        );
    }

    #[test]
    fn classification_heuristic() {
        let harmonic: Vec<_> = (1..20).map(|k| ratio(1, k)).collect();
        assert_eq!(classify_terms(&harmonic), Convergence::Inconclusive);
        let zeros = vec![BigRational::zero(); 3];
        assert_eq!(classify_terms(&zeros), Convergence::Summable);
    }
}
