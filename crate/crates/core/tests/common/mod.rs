//! Reference implementations shared by the integration tests. They use only
//! machine integers and hand-written coefficient formulas, never the
//! library's own systems.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Engel,
    Sylvester,
    Luroth,
}

pub const BUILTINS: [Builtin; 3] = [Builtin::Engel, Builtin::Sylvester, Builtin::Luroth];

impl Builtin {
    pub fn system(self) -> roe::RoeSystem {
        match self {
            Builtin::Engel => roe::RoeSystem::engel(),
            Builtin::Sylvester => roe::RoeSystem::sylvester(),
            Builtin::Luroth => roe::RoeSystem::luroth(),
        }
    }

    /// `(a(j), b(j))`.
    pub fn coefficients(self, j: i128) -> (i128, i128) {
        match self {
            Builtin::Engel => (1, j),
            Builtin::Sylvester => (1, 1),
            Builtin::Luroth => (1, j * (j - 1)),
        }
    }

    pub fn h(self, j: i128) -> i128 {
        match self {
            Builtin::Engel => j - 1,
            Builtin::Sylvester => j * (j - 1),
            Builtin::Luroth => 1,
        }
    }

    pub fn h_big(self, j: &BigInt) -> BigInt {
        match self {
            Builtin::Engel => j - 1,
            Builtin::Sylvester => j * (j - 1),
            Builtin::Luroth => BigInt::from(1),
        }
    }

    pub fn coefficients_big(self, j: &BigInt) -> (BigInt, BigInt) {
        match self {
            Builtin::Engel => (BigInt::from(1), j.clone()),
            Builtin::Sylvester => (BigInt::from(1), BigInt::from(1)),
            Builtin::Luroth => (BigInt::from(1), j * (j - 1)),
        }
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Digit extraction on `p/q` with `i128` fractions, step by step.
pub fn brute_force_expand(system: Builtin, p: i128, q: i128, depth: usize) -> Vec<i128> {
    let (mut num, mut den) = (p, q);
    let mut digits = Vec::new();
    for _ in 0..depth {
        let d = den / num + 1;
        // x - 1/d = (num d - den) / (den d)
        let mut n2 = num * d - den;
        let mut d2 = den * d;
        let g = gcd(n2, d2);
        n2 /= g;
        d2 /= g;
        let (a, b) = system.coefficients(d);
        n2 *= b;
        d2 *= a;
        let g = gcd(n2, d2);
        num = n2 / g;
        den = d2 / g;
        assert!(num > 0 && num <= den, "remainder left (0, 1]");
        digits.push(d);
    }
    digits
}

/// Cylinder length from coefficient products, without partial sums.
pub fn closed_form_length(system: Builtin, digits: &[BigInt]) -> BigRational {
    let mut length = BigRational::from_integer(BigInt::from(1));
    for d in &digits[..digits.len() - 1] {
        let (a, b) = system.coefficients_big(d);
        length *= BigRational::new(a, b);
    }
    let last = digits.last().unwrap();
    length / BigRational::from_integer(last * (last - 1))
}

/// The Sylvester sequence 2, 3, 7, 43, 1807, ...
pub fn sylvester_sequence(count: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(2)];
    while out.len() < count {
        let s = out.last().unwrap();
        out.push(s * s - s + 1);
    }
    out
}

/// `sum_{k=from}^{to} 1/s_k` for Sylvester numbers `s_1 = 2, s_2 = 3, ...`,
/// via the telescoping identity `1/s_k = 1/(s_k - 1) - 1/(s_{k+1} - 1)`.
/// With `A = s_from - 1` dividing `B = s_{to+1} - 1`, the sum is
/// `(B/A - 1) / B`. The result is left unreduced; comparisons on ratios do
/// not need lowest terms.
pub fn sylvester_reciprocal_sum(from: usize, to: usize) -> BigRational {
    let s = sylvester_sequence(to + 1);
    let a = &s[from - 1] - 1;
    let b = &s[to] - 1;
    let quotient = &b / &a;
    assert_eq!(&quotient * &a, b);
    BigRational::new_raw(quotient - 1, b)
}

/// Two-sided bounds on `P(alpha_n = 1 for some n in [4, last])` for the
/// Sylvester system under Lebesgue measure.
///
/// `alpha_4 = 1` has conditional probability `1 / (h(d_3) + 1)` given
/// `d_3`. The lower bound enumerates `d_1, d_2, d_3` over finite ranges; the
/// upper bound adds each skipped tail's mass times the largest conditional
/// probability inside it, plus `sum_{n=5}^{last} 1/s_n` for later positions.
pub fn sylvester_window_probability(last: usize) -> (f64, f64) {
    const SPAN: u64 = 300;
    let h = |j: f64| j * (j - 1.0);
    let alpha_one = |d3: f64| 1.0 / (h(d3) + 1.0);
    // Given H = h(d_2), d_3 = k > H has probability H / (k (k - 1)).
    let q = |big_h: f64| -> (f64, f64) {
        let mut s = 0.0;
        for i in 1..=SPAN {
            let k = big_h + i as f64;
            s += big_h / h(k) * alpha_one(k);
        }
        let top = big_h + SPAN as f64;
        (s, s + big_h / top * alpha_one(top + 1.0))
    };
    let (mut low, mut high) = (0.0, 0.0);
    for d1 in 2..=SPAN + 1 {
        let p1 = 1.0 / h(d1 as f64);
        let h1 = h(d1 as f64);
        for i in 1..=SPAN {
            let d2 = h1 + i as f64;
            let (ql, qh) = q(h(d2));
            low += p1 * h1 / h(d2) * ql;
            high += p1 * h1 / h(d2) * qh;
        }
        let d2_min = h1 + SPAN as f64 + 1.0;
        high += p1 * h1 / (d2_min - 1.0) * alpha_one(h(d2_min) + 1.0);
    }
    let d1_min = SPAN as f64 + 2.0;
    high += 1.0 / (d1_min - 1.0) * alpha_one(h(h(d1_min) + 1.0) + 1.0);
    let later = num_traits::ToPrimitive::to_f64(&sylvester_reciprocal_sum(5, last)).unwrap();
    (low, high + later)
}
