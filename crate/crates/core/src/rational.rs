//! Exact rational helpers: parsing, `p/q` rendering, decimal rendering and
//! batched summation.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, RoeError};

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Parses `p/q`, an integer, or a decimal such as `0.125` or `2.5e-3`.
/// Decimals are converted exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(RoeError::Parse("empty rational".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| RoeError::Parse(format!("bad numerator in `{s}`")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| RoeError::Parse(format!("bad denominator in `{s}`")))?;
        if q.is_zero() {
            return Err(RoeError::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(p, q));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || RoeError::Parse(format!("`{s}` is not a rational or decimal"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let mut numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac.len() as i64;
    let ten = BigInt::from(10u32);
    let r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// Exact value of a binary float (every finite float is a dyadic rational).
pub fn from_f64_exact(value: f64) -> Result<BigRational> {
    BigRational::from_float(value)
        .ok_or_else(|| RoeError::Parse(format!("non-finite float {value}")))
}

/// Canonical `p/q` rendering, always with an explicit denominator.
pub fn to_pq(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering rounded to `sig` significant digits (half away from
/// zero). Plain notation for moderate magnitudes, scientific otherwise.
pub fn to_decimal(r: &BigRational, sig: usize) -> String {
    let sig = sig.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let abs = r.abs();
    let mut exp = decimal_exponent(&abs);
    let mut digits = round_scaled(&abs, sig as i64 - 1 - exp);
    // Rounding may carry into a new leading digit.
    if digits.to_string().len() > sig {
        exp += 1;
        digits = round_scaled(&abs, sig as i64 - 1 - exp);
    }
    let mut text = digits.to_string();
    while text.len() < sig {
        text.insert(0, '0');
    }
    let body = if (-6..21).contains(&exp) {
        place_point(&text, exp)
    } else {
        let (lead, rest) = text.split_at(1);
        let rest = rest.trim_end_matches('0');
        if rest.is_empty() {
            format!("{lead}e{exp}")
        } else {
            format!("{lead}.{rest}e{exp}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn place_point(text: &str, exp: i64) -> String {
    let out = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), text)
    } else {
        let int_len = exp as usize + 1;
        if text.len() <= int_len {
            format!("{}{}", text, "0".repeat(int_len - text.len()))
        } else {
            format!("{}.{}", &text[..int_len], &text[int_len..])
        }
    };
    if out.contains('.') {
        out.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        out
    }
}

/// floor(log10(r)) for r > 0.
fn decimal_exponent(r: &BigRational) -> i64 {
    let bits = r.numer().bits() as f64 - r.denom().bits() as f64;
    let mut e = (bits * std::f64::consts::LOG10_2).floor() as i64;
    let ten = BigInt::from(10u32);
    loop {
        let lower = pow10(&ten, e);
        let upper = pow10(&ten, e + 1);
        if r < &lower {
            e -= 1;
        } else if r >= &upper {
            e += 1;
        } else {
            return e;
        }
    }
}

fn pow10(ten: &BigInt, e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(num_traits::pow(ten.clone(), e as usize))
    } else {
        BigRational::new_raw(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
    }
}

/// round(r * 10^shift) for r >= 0.
fn round_scaled(r: &BigRational, shift: i64) -> BigInt {
    let ten = BigInt::from(10u32);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    let (numer, denom) = if shift >= 0 {
        (r.numer() * scale, r.denom().clone())
    } else {
        (r.numer().clone(), r.denom() * scale)
    };
    let (q, rem) = numer.div_rem(&denom);
    if rem * 2 >= denom {
        q + 1
    } else {
        q
    }
}

/// Sums exactly, deferring normalization to a single final gcd. Summing
/// unit fractions with huge coprime denominators would otherwise pay a
/// full gcd per term.
pub fn sum_exact<'a, I>(terms: I) -> BigRational
where
    I: IntoIterator<Item = &'a BigRational>,
{
    let mut layer: Vec<(BigInt, BigInt)> = terms
        .into_iter()
        .map(|t| (t.numer().clone(), t.denom().clone()))
        .collect();
    if layer.is_empty() {
        return BigRational::zero();
    }
    // Pairwise tree keeps operand sizes balanced.
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        let mut it = layer.into_iter();
        while let Some((n1, d1)) = it.next() {
            match it.next() {
                Some((n2, d2)) => {
                    if d1 == d2 {
                        next.push((n1 + n2, d1));
                    } else {
                        next.push((n1 * &d2 + n2 * &d1, d1 * d2));
                    }
                }
                None => next.push((n1, d1)),
            }
        }
        layer = next;
    }
    let (n, d) = layer.pop().expect("non-empty");
    reduced(n, d)
}

/// Greatest common divisor by Euclidean division. The binary gcd behind
/// `BigRational::new` subtracts, which is quadratic when one operand is far
/// smaller than the other; the remainder step collapses that case at once.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        if b.bits() <= 64 {
            let small = b.to_u64().expect("fits in 64 bits");
            let rest = (&a % &b).to_u64().expect("remainder is below b");
            return BigInt::from(small.gcd(&rest));
        }
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// `n / d` in lowest terms, using [`gcd`].
pub fn reduced(n: BigInt, d: BigInt) -> BigRational {
    assert!(!d.is_zero(), "zero denominator");
    let (n, d) = if d.is_negative() { (-n, -d) } else { (n, d) };
    let g = gcd(&n, &d);
    if g.is_one() {
        BigRational::new_raw(n, d)
    } else {
        BigRational::new_raw(n / &g, d / g)
    }
}

/// Lossy conversion used only for statistics and display heuristics.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Scale both parts down when they overflow f64.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
        if d == 0.0 {
            match r.numer().sign() {
                Sign::Minus => f64::NEG_INFINITY,
                _ => f64::INFINITY,
            }
        } else {
            n / d
        }
    })
}

/// Serde adapters for JSON forms: rationals as `"p/q"` strings and big
/// integer sequences as arrays of decimal strings.
pub mod serde_forms {
    use super::*;
    use serde::de::{self, Deserializer};
    use serde::ser::Serializer;
    use serde::{Deserialize, Serialize};

    pub mod pq {
        use super::*;

        pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&to_pq(r))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
            let value = NumberOrString::deserialize(d)?;
            value.to_rational().map_err(de::Error::custom)
        }
    }

    pub mod int_seq {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            let strings: Vec<String> = v.iter().map(|d| d.to_string()).collect();
            strings.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            let values = Vec::<NumberOrString>::deserialize(d)?;
            values
                .into_iter()
                .map(|v| v.to_integer().map_err(de::Error::custom))
                .collect()
        }
    }

    /// JSON scalar accepted wherever a number is expected.
    #[derive(Debug, Clone, Deserialize)]
    #[serde(untagged)]
    pub enum NumberOrString {
        Int(i64),
        Float(f64),
        Text(String),
    }

    impl NumberOrString {
        pub fn to_integer(&self) -> crate::error::Result<BigInt> {
            match self {
                NumberOrString::Int(i) => Ok(BigInt::from(*i)),
                NumberOrString::Float(f) if f.fract() == 0.0 && f.is_finite() => {
                    Ok(from_f64_exact(*f)?.to_integer())
                }
                NumberOrString::Float(f) => Err(RoeError::Parse(format!("{f} is not an integer"))),
                NumberOrString::Text(t) => t
                    .trim()
                    .parse()
                    .map_err(|_| RoeError::Parse(format!("`{t}` is not an integer"))),
            }
        }

        pub fn to_rational(&self) -> crate::error::Result<BigRational> {
            match self {
                NumberOrString::Int(i) => Ok(int(*i)),
                NumberOrString::Float(f) => from_f64_exact(*f),
                NumberOrString::Text(t) => parse_rational(t),
            }
        }

        /// True when the value came from a binary float.
        pub fn is_float(&self) -> bool {
            matches!(self, NumberOrString::Float(_))
        }
    }
}
