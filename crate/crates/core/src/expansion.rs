//! Digit extraction, partial sums and the difference re-coding.
//!
//! With `x_1 = x`, each step takes `d_k = floor(1 / x_k) + 1` and continues
//! with `x_{k+1} = (b_k / a_k) * (x_k - 1 / d_k)`, where the coefficients are
//! evaluated at `d_k`. The remainders stay in `(0, 1]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Result, RoeError};
use crate::system::RoeSystem;

/// An admissible prefix `(d_1, ..., d_n)` of denominators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitSeq {
    system: RoeSystem,
    digits: Vec<BigInt>,
}

/// Difference symbols `(alpha_1, ..., alpha_n)`, all at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffDigitSeq {
    system: RoeSystem,
    alphas: Vec<BigInt>,
}

/// An expansion together with the remainders `x_1, ..., x_{n+1}`.
#[derive(Debug, Clone)]
pub struct ExpansionTrace {
    pub digits: DigitSeq,
    pub remainders: Vec<BigRational>,
}

pub fn is_admissible(system: &RoeSystem, digits: &[BigInt]) -> bool {
    admissibility_error(system, digits).is_none()
}

fn admissibility_error(system: &RoeSystem, digits: &[BigInt]) -> Option<String> {
    let Some(first) = digits.first() else {
        return Some("empty digit sequence".into());
    };
    if first < &BigInt::from(2) {
        return Some(format!("d_1 = {first} < 2"));
    }
    for (k, pair) in digits.windows(2).enumerate() {
        let n = k + 1;
        let h = match system.h(n, &pair[0]) {
            Ok(h) => h,
            Err(e) => return Some(e.to_string()),
        };
        if pair[1] <= h {
            return Some(format!(
                "d_{} = {} must be at least h_{}({}) + 1 = {}",
                n + 1,
                pair[1],
                n,
                pair[0],
                h + 1u32
            ));
        }
    }
    None
}

impl DigitSeq {
    pub fn new(system: &RoeSystem, digits: Vec<BigInt>) -> Result<Self> {
        if digits.is_empty() {
            return Err(RoeError::InvalidDigits("empty digit sequence".into()));
        }
        if let Some(reason) = admissibility_error(system, &digits) {
            return Err(RoeError::InvalidDigits(reason));
        }
        for d in &digits {
            system.check_bits(d)?;
        }
        Ok(DigitSeq {
            system: system.clone(),
            digits,
        })
    }

    pub fn from_u64(system: &RoeSystem, digits: &[u64]) -> Result<Self> {
        Self::new(system, digits.iter().map(|&d| BigInt::from(d)).collect())
    }

    pub(crate) fn new_unchecked(system: &RoeSystem, digits: Vec<BigInt>) -> Self {
        DigitSeq {
            system: system.clone(),
            digits,
        }
    }

    pub fn system(&self) -> &RoeSystem {
        &self.system
    }

    pub fn digits(&self) -> &[BigInt] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn into_digits(self) -> Vec<BigInt> {
        self.digits
    }

    /// Prefix of the first `n` digits.
    pub fn prefix(&self, n: usize) -> DigitSeq {
        DigitSeq::new_unchecked(&self.system, self.digits[..n.min(self.len())].to_vec())
    }

    /// Running products `a_1...a_k / b_1...b_k` for `k = 0..n-1`.
    pub(crate) fn coefficient_products(&self) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(self.digits.len());
        let mut product = BigRational::one();
        for (k, d) in self.digits.iter().enumerate() {
            out.push(product.clone());
            if k + 1 < self.digits.len() {
                let (a, b) = self
                    .system
                    .coefficients(k + 1, d)
                    .expect("admissible digits have valid coefficients");
                product *= BigRational::new(a, b);
            }
        }
        out
    }

    fn partial_sums(&self) -> (BigRational, BigRational, BigRational) {
        let products = self.coefficient_products();
        let n = self.digits.len();
        let mut head = BigRational::zero();
        for (d, p) in self.digits[..n - 1].iter().zip(&products) {
            head += p / d;
        }
        let last = &self.digits[n - 1];
        let weight = products[n - 1].clone();
        (head, weight, BigRational::from_integer(last.clone()))
    }

    /// The partial sum of the series, which is the infimum of the cylinder.
    pub fn evaluate(&self) -> BigRational {
        let (head, weight, last) = self.partial_sums();
        head + weight / last
    }

    /// `(inf, sup)` of the cylinder: the supremum replaces the last term
    /// `1/d_n` with `1/(d_n - 1)`.
    pub fn evaluate_interval(&self) -> (BigRational, BigRational) {
        let (head, weight, last) = self.partial_sums();
        let inf = &head + &weight / &last;
        let sup = head + weight / (last - BigRational::one());
        (inf, sup)
    }

    /// `alpha_1 = d_1 - 1`, `alpha_{k+1} = d_{k+1} - h_k(d_k)`.
    pub fn to_difference(&self) -> DiffDigitSeq {
        let mut alphas = Vec::with_capacity(self.digits.len());
        alphas.push(&self.digits[0] - 1u32);
        for (k, pair) in self.digits.windows(2).enumerate() {
            let h = self
                .system
                .h(k + 1, &pair[0])
                .expect("admissible digits have integral h");
            alphas.push(&pair[1] - h);
        }
        DiffDigitSeq {
            system: self.system.clone(),
            alphas,
        }
    }
}

impl DiffDigitSeq {
    pub fn new(system: &RoeSystem, alphas: Vec<BigInt>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(RoeError::domain("empty difference sequence"));
        }
        if let Some((k, a)) = alphas.iter().enumerate().find(|(_, a)| *a < &BigInt::one()) {
            return Err(RoeError::domain(format!("alpha_{} = {a} < 1", k + 1)));
        }
        Ok(DiffDigitSeq {
            system: system.clone(),
            alphas,
        })
    }

    pub fn from_u64(system: &RoeSystem, alphas: &[u64]) -> Result<Self> {
        Self::new(system, alphas.iter().map(|&a| BigInt::from(a)).collect())
    }

    pub fn system(&self) -> &RoeSystem {
        &self.system
    }

    pub fn alphas(&self) -> &[BigInt] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Inverse of [`DigitSeq::to_difference`].
    pub fn from_difference(&self) -> Result<DigitSeq> {
        let mut digits: Vec<BigInt> = Vec::with_capacity(self.alphas.len());
        for (k, alpha) in self.alphas.iter().enumerate() {
            let d = match digits.last() {
                None => alpha + 1u32,
                Some(prev) => self.system.h(k, prev)? + alpha,
            };
            self.system.check_bits(&d)?;
            digits.push(d);
        }
        Ok(DigitSeq::new_unchecked(&self.system, digits))
    }

    pub fn to_digits(&self) -> Result<DigitSeq> {
        self.from_difference()
    }
}

/// Runs the digit-extraction algorithm on an exact rational in (0, 1).
pub fn expand(system: &RoeSystem, x: &BigRational, depth: usize) -> Result<DigitSeq> {
    Ok(expand_trace(system, x, depth)?.digits)
}

pub fn expand_trace(system: &RoeSystem, x: &BigRational, depth: usize) -> Result<ExpansionTrace> {
    if x <= &BigRational::zero() || x >= &BigRational::one() {
        return Err(RoeError::domain(format!("x = {x} is not in (0, 1)")));
    }
    if depth < 1 {
        return Err(RoeError::domain("depth must be at least 1"));
    }
    let cap = system.limits().depth_cap;
    if depth > cap {
        return Err(RoeError::domain(format!("depth {depth} exceeds the cap of {cap}")));
    }
    let mut digits = Vec::with_capacity(depth);
    let mut remainders = Vec::with_capacity(depth + 1);
    let mut rem = x.clone();
    for n in 1..=depth {
        // floor(1/x) + 1 with x = p/q is floor(q/p) + 1.
        let d = rem.denom() / rem.numer() + 1u32;
        system.check_bits(&d)?;
        let (a, b) = system.coefficients(n, &d)?;
        let next = (&rem - BigRational::new(BigInt::one(), d.clone())) * BigRational::new(b, a);
        debug_assert!(next > BigRational::zero() && next <= BigRational::one());
        remainders.push(rem);
        digits.push(d);
        rem = next;
    }
    remainders.push(rem);
    Ok(ExpansionTrace {
        digits: DigitSeq::new_unchecked(system, digits),
        remainders,
    })
}

/// Expands a binary float via its exact dyadic value.
pub fn expand_f64(system: &RoeSystem, x: f64, depth: usize) -> Result<DigitSeq> {
    expand(system, &crate::rational::from_f64_exact(x)?, depth)
}

impl Serialize for DigitSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::rational::serde_forms::int_seq::serialize(&self.digits, s)
    }
}

impl Serialize for DiffDigitSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::rational::serde_forms::int_seq::serialize(&self.alphas, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn big_vec(v: &[u64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn expands_one_half() {
        let half = ratio(1, 2);
        let syl = expand(&RoeSystem::sylvester(), &half, 4).unwrap();
        assert_eq!(syl.digits(), big_vec(&[3, 7, 43, 1807]).as_slice());
        let engel = expand(&RoeSystem::engel(), &half, 5).unwrap();
        assert_eq!(engel.digits(), big_vec(&[3, 3, 3, 3, 3]).as_slice());
        let luroth = expand(&RoeSystem::luroth(), &half, 4).unwrap();
        assert_eq!(luroth.digits(), big_vec(&[3, 2, 2, 2]).as_slice());
    }

    #[test]
    fn luroth_remainder_reaches_one() {
        let trace = expand_trace(&RoeSystem::luroth(), &ratio(1, 2), 3).unwrap();
        assert_eq!(trace.remainders[1], BigRational::one());
        assert_eq!(trace.remainders[2], BigRational::one());
    }

    #[test]
    fn upper_half_starts_with_two() {
        for sys in [RoeSystem::engel(), RoeSystem::sylvester(), RoeSystem::luroth()] {
            for x in [ratio(501, 1000), ratio(3, 4), ratio(999, 1000)] {
                assert_eq!(expand(&sys, &x, 1).unwrap().digits()[0], BigInt::from(2));
            }
        }
    }

    #[test]
    fn expand_rejects_out_of_domain() {
        let sys = RoeSystem::sylvester();
        for x in [ratio(0, 1), ratio(1, 1), ratio(3, 2), ratio(-1, 2)] {
            assert!(matches!(expand(&sys, &x, 3), Err(RoeError::Domain(_))));
        }
        assert!(matches!(expand(&sys, &ratio(1, 3), 0), Err(RoeError::Domain(_))));
        assert!(matches!(expand(&sys, &ratio(1, 3), 65), Err(RoeError::Domain(_))));
        let engel = RoeSystem::engel().with_depth_cap(100);
        assert_eq!(expand(&engel, &ratio(1, 3), 65).unwrap().len(), 65);
    }

    #[test]
    fn expand_hits_bit_budget() {
        let sys = RoeSystem::sylvester().with_bit_budget(100);
        assert!(matches!(
            expand(&sys, &ratio(1, 2), 10),
            Err(RoeError::BitSizeExceeded { budget: 100, .. })
        ));
    }

    #[test]
    fn float_input_is_exact() {
        let d = expand_f64(&RoeSystem::engel(), 0.5, 4).unwrap();
        assert_eq!(d.digits(), big_vec(&[3, 3, 3, 3]).as_slice());
        assert!(expand_f64(&RoeSystem::engel(), f64::NAN, 4).is_err());
    }

    #[test]
    fn evaluates_partial_sums() {
        let e = DigitSeq::from_u64(&RoeSystem::engel(), &[3, 3, 3]).unwrap();
        assert_eq!(e.evaluate(), ratio(13, 27));
        let s = DigitSeq::from_u64(&RoeSystem::sylvester(), &[3, 7, 43]).unwrap();
        assert_eq!(s.evaluate(), ratio(451, 903));
        let l = DigitSeq::from_u64(&RoeSystem::luroth(), &[3, 2]).unwrap();
        assert_eq!(l.evaluate(), ratio(5, 12));
    }

    #[test]
    fn evaluates_intervals() {
        let s = DigitSeq::from_u64(&RoeSystem::sylvester(), &[2, 3]).unwrap();
        assert_eq!(s.evaluate_interval(), (ratio(5, 6), ratio(1, 1)));
        let e = DigitSeq::from_u64(&RoeSystem::engel(), &[2, 2]).unwrap();
        assert_eq!(e.evaluate_interval(), (ratio(3, 4), ratio(1, 1)));
        for j in 2..20i64 {
            let one = DigitSeq::from_u64(&RoeSystem::luroth(), &[j as u64]).unwrap();
            assert_eq!(one.evaluate_interval(), (ratio(1, j), ratio(1, j - 1)));
        }
    }

    #[test]
    fn admissibility() {
        let s = RoeSystem::sylvester();
        assert!(is_admissible(&s, &big_vec(&[3, 7, 43])));
        assert!(!is_admissible(&s, &big_vec(&[3, 6])));
        assert!(!is_admissible(&s, &big_vec(&[1, 6])));
        assert!(!is_admissible(&s, &[]));
        assert!(is_admissible(&RoeSystem::luroth(), &big_vec(&[2; 12])));
        assert!(!is_admissible(&RoeSystem::engel(), &big_vec(&[5, 4])));
        assert!(matches!(
            DigitSeq::from_u64(&s, &[3, 6]),
            Err(RoeError::InvalidDigits(_))
        ));
    }

    #[test]
    fn difference_coding() {
        let s = DigitSeq::from_u64(&RoeSystem::sylvester(), &[3, 7, 43]).unwrap();
        assert_eq!(s.to_difference().alphas(), big_vec(&[2, 1, 1]).as_slice());
        let e = DigitSeq::from_u64(&RoeSystem::engel(), &[3, 3, 3]).unwrap();
        assert_eq!(e.to_difference().alphas(), big_vec(&[2, 1, 1]).as_slice());
        let l = DigitSeq::from_u64(&RoeSystem::luroth(), &[3, 2, 2]).unwrap();
        assert_eq!(l.to_difference().alphas(), big_vec(&[2, 1, 1]).as_slice());

        let back = DiffDigitSeq::from_u64(&RoeSystem::sylvester(), &[2, 1, 1])
            .unwrap()
            .from_difference()
            .unwrap();
        assert_eq!(back.digits(), big_vec(&[3, 7, 43]).as_slice());
        let single = DiffDigitSeq::from_u64(&RoeSystem::engel(), &[1]).unwrap();
        assert_eq!(single.from_difference().unwrap().digits(), big_vec(&[2]).as_slice());
    }

    #[test]
    fn difference_rejects_zero_symbols() {
        let err = DiffDigitSeq::new(&RoeSystem::sylvester(), big_vec(&[1, 0, 2])).unwrap_err();
        assert!(matches!(err, RoeError::Domain(_)));
    }

    #[test]
    fn serializes_as_decimal_strings() {
        let s = DigitSeq::from_u64(&RoeSystem::sylvester(), &[3, 7, 43]).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"["3","7","43"]"#);
        assert_eq!(serde_json::to_string(&s.to_difference()).unwrap(), r#"["2","1","1"]"#);
    }
}
