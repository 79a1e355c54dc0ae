//! Restricted Oppenheim coefficient systems.
//!
//! A system supplies positive integers `a_n(j)` and `b_n(j)` for a position
//! `n >= 1` and a denominator `j >= 2`. It is a restricted system when
//! `h_n(j) = a_n(j) * j * (j - 1) / b_n(j)` is always an integer; admissible
//! digit sequences then satisfy `d_{n+1} >= h_n(d_n) + 1`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, RoeError};
use crate::rational::serde_forms::NumberOrString;

/// Default cap on the bit length of any digit.
pub const DEFAULT_BIT_BUDGET: u64 = 1_000_000;
/// Default cap on expansion depth.
pub const DEFAULT_DEPTH_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Engel,
    Sylvester,
    Luroth,
    Custom,
}

impl SystemKind {
    pub fn builtin_name(self) -> &'static str {
        match self {
            SystemKind::Engel => "engel",
            SystemKind::Sylvester => "sylvester",
            SystemKind::Luroth => "luroth",
            SystemKind::Custom => "custom",
        }
    }
}

/// Integer polynomial in `j`, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial(pub Vec<BigInt>);

impl Polynomial {
    pub fn new(coefficients: Vec<BigInt>) -> Self {
        Polynomial(coefficients)
    }

    pub fn eval(&self, j: &BigInt) -> BigInt {
        self.0
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * j + c)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (deg, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match deg {
                0 => c.to_string(),
                1 => format!("{c}*j"),
                _ => format!("{c}*j^{deg}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRule {
    pub a: Polynomial,
    pub b: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Rule {
    Engel,
    Sylvester,
    Luroth,
    /// `by_position[n - 1]` overrides `default` at position `n`.
    Polynomial {
        default: PolyRule,
        by_position: Vec<PolyRule>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub bit_budget: u64,
    pub depth_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            bit_budget: DEFAULT_BIT_BUDGET,
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
struct Inner {
    kind: SystemKind,
    name: String,
    rule: Rule,
    limits: Limits,
    /// Largest j for which integrality and monotonicity of h were verified;
    /// `Some(u64::MAX)` for builtins, whose h has a closed form.
    j_validation_max: Option<u64>,
}

/// An immutable, cheaply clonable coefficient system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoeSystem {
    inner: Arc<Inner>,
}

impl RoeSystem {
    pub fn builtin(kind: SystemKind) -> Result<Self> {
        let rule = match kind {
            SystemKind::Engel => Rule::Engel,
            SystemKind::Sylvester => Rule::Sylvester,
            SystemKind::Luroth => Rule::Luroth,
            SystemKind::Custom => {
                return Err(RoeError::Config(
                    "custom systems need coefficient polynomials".into(),
                ))
            }
        };
        Ok(RoeSystem {
            inner: Arc::new(Inner {
                kind,
                name: kind.builtin_name().to_string(),
                rule,
                limits: Limits::default(),
                j_validation_max: Some(u64::MAX),
            }),
        })
    }

    pub fn engel() -> Self {
        Self::builtin(SystemKind::Engel).expect("builtin")
    }

    pub fn sylvester() -> Self {
        Self::builtin(SystemKind::Sylvester).expect("builtin")
    }

    pub fn luroth() -> Self {
        Self::builtin(SystemKind::Luroth).expect("builtin")
    }

    /// A custom system; positions past `by_position` use `default`.
    pub fn custom(name: impl Into<String>, default: PolyRule, by_position: Vec<PolyRule>) -> Self {
        RoeSystem {
            inner: Arc::new(Inner {
                kind: SystemKind::Custom,
                name: name.into(),
                rule: Rule::Polynomial {
                    default,
                    by_position,
                },
                limits: Limits::default(),
                j_validation_max: None,
            }),
        }
    }

    /// Custom j-only system from integer polynomial coefficients.
    pub fn from_polynomials(name: impl Into<String>, a: &[i64], b: &[i64]) -> Self {
        let poly = |c: &[i64]| Polynomial::new(c.iter().map(|&x| BigInt::from(x)).collect());
        Self::custom(
            name,
            PolyRule {
                a: poly(a),
                b: poly(b),
            },
            Vec::new(),
        )
    }

    /// Parses the custom system JSON form
    /// `{"a_poly": [...], "b_poly": [...], "name": "..."}`, optionally with
    /// `"by_position": [{"a_poly": [...], "b_poly": [...]}, ...]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: CustomConfig =
            serde_json::from_str(text).map_err(|e| RoeError::Config(e.to_string()))?;
        let default = config.rule.to_rule()?;
        let by_position = config
            .by_position
            .iter()
            .map(RuleConfig::to_rule)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::custom(
            config.name.unwrap_or_else(|| "custom".into()),
            default,
            by_position,
        ))
    }

    fn with_inner(&self, f: impl FnOnce(&mut Inner)) -> Self {
        let mut inner = Inner {
            kind: self.inner.kind,
            name: self.inner.name.clone(),
            rule: self.inner.rule.clone(),
            limits: self.inner.limits,
            j_validation_max: self.inner.j_validation_max,
        };
        f(&mut inner);
        RoeSystem {
            inner: Arc::new(inner),
        }
    }

    pub fn with_bit_budget(&self, bits: u64) -> Self {
        self.with_inner(|i| i.limits.bit_budget = bits)
    }

    pub fn with_depth_cap(&self, depth: usize) -> Self {
        self.with_inner(|i| i.limits.depth_cap = depth)
    }

    pub fn kind(&self) -> SystemKind {
        self.inner.kind
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn limits(&self) -> Limits {
        self.inner.limits
    }

    pub fn j_validation_max(&self) -> Option<u64> {
        self.inner.j_validation_max
    }

    /// Whether h_n(j) is known to be nondecreasing in j.
    pub fn monotone_verified(&self) -> bool {
        self.inner.j_validation_max.is_some()
    }

    /// True when the coefficients never depend on the position.
    pub fn position_independent(&self) -> bool {
        match &self.inner.rule {
            Rule::Polynomial { by_position, .. } => by_position.is_empty(),
            _ => true,
        }
    }

    pub(crate) fn check_bits(&self, value: &BigInt) -> Result<()> {
        let bits = value.bits();
        let budget = self.inner.limits.bit_budget;
        if bits > budget {
            Err(RoeError::BitSizeExceeded { bits, budget })
        } else {
            Ok(())
        }
    }

    /// `(a_n(j), b_n(j))`, both checked positive.
    pub fn coefficients(&self, n: usize, j: &BigInt) -> Result<(BigInt, BigInt)> {
        if n == 0 {
            return Err(RoeError::domain("positions start at 1"));
        }
        if j < &BigInt::from(2) {
            return Err(RoeError::domain(format!("denominator {j} < 2")));
        }
        let (a, b) = match &self.inner.rule {
            Rule::Engel => (BigInt::one(), j.clone()),
            Rule::Sylvester => (BigInt::one(), BigInt::one()),
            Rule::Luroth => (BigInt::one(), j * (j - 1u32)),
            Rule::Polynomial {
                default,
                by_position,
            } => {
                let rule = by_position.get(n - 1).unwrap_or(default);
                (rule.a.eval(j), rule.b.eval(j))
            }
        };
        for (which, v) in [('a', &a), ('b', &b)] {
            if !v.is_positive() {
                return Err(RoeError::NonPositiveCoefficient {
                    which,
                    n,
                    j: j.to_string(),
                });
            }
        }
        Ok((a, b))
    }

    /// `h_n(j) = a_n(j) * j * (j - 1) / b_n(j)`, exactly.
    pub fn h(&self, n: usize, j: &BigInt) -> Result<BigInt> {
        let (a, b) = self.coefficients(n, j)?;
        let numerator = a * j * (j - 1u32);
        if b.is_one() {
            return Ok(numerator);
        }
        let (q, r) = numerator.div_rem(&b);
        if !r.is_zero() {
            return Err(RoeError::NonIntegralH {
                n,
                j: j.to_string(),
            });
        }
        Ok(q)
    }

    pub fn h_u64(&self, n: usize, j: u64) -> Result<BigInt> {
        self.h(n, &BigInt::from(j))
    }

    /// Exhaustive check of integrality, positivity and monotonicity of h
    /// over `n <= n_max`, `2 <= j <= j_max`.
    pub fn validate(&self, n_max: usize, j_max: u64) -> Result<ValidationReport> {
        if n_max < 1 || j_max < 2 {
            return Err(RoeError::domain("validation needs n_max >= 1 and j_max >= 2"));
        }
        // Position-independent rules give identical rows for every n.
        let rows = if self.position_independent() {
            1
        } else {
            match &self.inner.rule {
                Rule::Polynomial { by_position, .. } => n_max.min(by_position.len() + 1),
                _ => 1,
            }
        };
        let mut failures = Vec::new();
        let mut monotone = true;
        for n in 1..=rows {
            let mut previous: Option<BigInt> = None;
            for j in 2..=j_max {
                let jb = BigInt::from(j);
                match self.h(n, &jb) {
                    Ok(h) => {
                        if let Some(prev) = &previous {
                            if &h < prev {
                                monotone = false;
                                failures.push(ValidationFailure {
                                    n,
                                    j,
                                    reason: FailureReason::NotMonotone,
                                });
                            }
                        }
                        previous = Some(h);
                    }
                    Err(RoeError::NonIntegralH { .. }) => {
                        failures.push(ValidationFailure {
                            n,
                            j,
                            reason: FailureReason::NonIntegral,
                        });
                        previous = None;
                    }
                    Err(RoeError::NonPositiveCoefficient { .. }) => {
                        failures.push(ValidationFailure {
                            n,
                            j,
                            reason: FailureReason::NonPositive,
                        });
                        previous = None;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        let integrality_ok = !failures
            .iter()
            .any(|f| f.reason != FailureReason::NotMonotone);
        Ok(ValidationReport {
            checked_range: (n_max, j_max),
            integrality_ok,
            h_monotone_in_j: monotone && integrality_ok,
            failures,
        })
    }

    /// Validates and, when integrality and monotonicity hold, returns a copy
    /// marked as verified up to `j_max`.
    pub fn validated(&self, n_max: usize, j_max: u64) -> Result<(Self, ValidationReport)> {
        let report = self.validate(n_max, j_max)?;
        let system = if report.integrality_ok && report.h_monotone_in_j {
            let verified = match self.inner.j_validation_max {
                Some(existing) => existing.max(j_max),
                None => j_max,
            };
            self.with_inner(|i| i.j_validation_max = Some(verified))
        } else {
            self.clone()
        };
        Ok((system, report))
    }

    /// The slowest admissible digit path: `d[1] = 2`,
    /// `d[k + 1] = h_k(d[k]) + 1`.
    pub fn min_growth_path(&self, depth: usize) -> Result<Vec<BigInt>> {
        if depth < 1 {
            return Err(RoeError::domain("depth must be at least 1"));
        }
        let mut path = Vec::with_capacity(depth);
        let mut d = BigInt::from(2);
        for k in 1..=depth {
            self.check_bits(&d)?;
            path.push(d.clone());
            if k < depth {
                d = self.h(k, &d)? + 1u32;
            }
        }
        Ok(path)
    }
}

impl fmt::Display for RoeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.inner.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    NonIntegral,
    NonPositive,
    NotMonotone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationFailure {
    pub n: usize,
    pub j: u64,
    pub reason: FailureReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checked_range: (usize, u64),
    pub integrality_ok: bool,
    pub h_monotone_in_j: bool,
    pub failures: Vec<ValidationFailure>,
}

#[derive(Debug, Deserialize)]
struct RuleConfig {
    a_poly: Vec<NumberOrString>,
    b_poly: Vec<NumberOrString>,
}

impl RuleConfig {
    fn to_rule(&self) -> Result<PolyRule> {
        let convert = |v: &[NumberOrString]| -> Result<Polynomial> {
            if v.is_empty() {
                return Err(RoeError::Config("empty coefficient polynomial".into()));
            }
            Ok(Polynomial::new(
                v.iter().map(NumberOrString::to_integer).collect::<Result<_>>()?,
            ))
        };
        Ok(PolyRule {
            a: convert(&self.a_poly)?,
            b: convert(&self.b_poly)?,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomConfig {
    #[serde(flatten)]
    rule: RuleConfig,
    name: Option<String>,
    #[serde(default)]
    by_position: Vec<RuleConfig>,
}
