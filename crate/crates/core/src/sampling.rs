//! Seeded samplers for digit sequences under Lebesgue measure and under
//! the law of a random real with independent difference symbols.
//!
//! Every sample owns a ChaCha8 substream selected by `(seed, stream_id)`,
//! so results never depend on scheduling. Uniform draws are dyadic:
//! `u = r / 2^64` with `r` in `[1, 2^64 - 1]` for the Markov sampler and
//! `R / 2^256` for the expansion-based sampler.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Result, RoeError};
use crate::expansion::{self, DiffDigitSeq, DigitSeq};
use crate::rational::{self, serde_forms::NumberOrString};
use crate::system::RoeSystem;

/// Default largest difference symbol a symbol law may produce.
pub const DEFAULT_SUPPORT_CAP: u64 = 1_000_000_000;

const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RandomStream { seed, stream_id }
    }

    pub fn uniforms(&self) -> Uniforms {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        Uniforms { rng }
    }
}

/// Source of dyadic uniforms in (0, 1).
pub struct Uniforms {
    rng: ChaCha8Rng,
}

impl Uniforms {
    /// Numerator `r` of `u = r / 2^64`, never zero.
    pub fn next_u64_nonzero(&mut self) -> u64 {
        loop {
            let r = self.rng.next_u64();
            if r != 0 {
                return r;
            }
        }
    }

    /// Numerator `R` of `u = R / 2^256`, never zero.
    pub fn next_u256_nonzero(&mut self) -> BigInt {
        loop {
            let mut bytes = [0u8; 32];
            self.rng.fill_bytes(&mut bytes);
            let value = BigInt::from_bytes_le(Sign::Plus, &bytes);
            if !value.is_zero() {
                return value;
            }
        }
    }
}

/// `d_1 = floor(1/u) + 1` for `u = r / 2^64`.
pub fn first_digit_from_uniform(r: u64) -> BigInt {
    assert!(r != 0, "uniform numerator must be nonzero");
    BigInt::from((1u128 << 64) / r as u128 + 1)
}

/// `k = floor(h / (1 - u)) + 1` for `u = r / 2^64`.
pub fn transition_from_uniform(h: &BigInt, r: u64) -> BigInt {
    assert!(r != 0, "uniform numerator must be nonzero");
    let complement = (1u128 << 64) - r as u128;
    (h << 64u32) / BigInt::from(complement) + 1u32
}

/// The set of real `u` that the first-digit rule maps to `j`: `(1/j, 1/(j-1)]`.
pub fn first_digit_cell(j: u64) -> (BigRational, BigRational) {
    assert!(j >= 2);
    (
        BigRational::new(BigInt::one(), BigInt::from(j)),
        BigRational::new(BigInt::one(), BigInt::from(j - 1)),
    )
}

/// The set of real `u` that the transition rule maps to `k`:
/// `[1 - h/(k-1), 1 - h/k)`, empty when `k <= h`.
pub fn transition_cell(h: &BigInt, k: &BigInt) -> Option<(BigRational, BigRational)> {
    if k <= h {
        return None;
    }
    let one = BigRational::one();
    let lo = &one - BigRational::new(h.clone(), k - 1u32);
    let hi = one - BigRational::new(h.clone(), k.clone());
    Some((lo, hi))
}

/// Lebesgue-distributed digits drawn from the digit Markov chain by
/// inverse CDF.
pub fn sample_lebesgue_digits(system: &RoeSystem, depth: usize, stream: RandomStream) -> Result<DigitSeq> {
    if depth < 1 {
        return Err(RoeError::domain("depth must be at least 1"));
    }
    let mut uniforms = stream.uniforms();
    let mut digits = Vec::with_capacity(depth);
    let first = first_digit_from_uniform(uniforms.next_u64_nonzero());
    system.check_bits(&first)?;
    digits.push(first);
    for n in 2..=depth {
        let h = system.h(n - 1, &digits[n - 2])?;
        let d = transition_from_uniform(&h, uniforms.next_u64_nonzero());
        system.check_bits(&d)?;
        digits.push(d);
    }
    DigitSeq::new(system, digits)
}

/// Reference sampler: expands a uniform 256-bit dyadic rational.
pub fn sample_lebesgue_via_expand(system: &RoeSystem, depth: usize, stream: RandomStream) -> Result<DigitSeq> {
    let mut uniforms = stream.uniforms();
    let numer = uniforms.next_u256_nonzero();
    let x = BigRational::new(numer, BigInt::one() << 256u32);
    expansion::expand(system, &x, depth)
}

/// Difference symbols of a Lebesgue sample, censored once they provably
/// exceed `watch`.
///
/// Positions past `exact.len()` (up to `depth`) all carry symbols larger
/// than `watch` under the 64-bit Markov sampler: once `h >= watch * 2^64`,
/// every draw gives `alpha = floor(h u / (1 - u)) + 1 > watch`, and if
/// `h_k(watch * 2^64 + 1) >= watch * 2^64` for every later position the
/// condition persists by monotonicity of h.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensoredSymbols {
    pub exact: Vec<BigInt>,
    pub depth: usize,
    pub watch: u64,
}

impl CensoredSymbols {
    pub fn is_censored(&self) -> bool {
        self.exact.len() < self.depth
    }

    /// Occurrences of `symbol` at positions `m..=n` (1-based).
    pub fn count_in_window(&self, symbol: u64, m: usize, n: usize) -> Result<u64> {
        if symbol > self.watch && self.is_censored() {
            return Err(RoeError::domain(format!(
                "symbol {symbol} is above the censoring level {}",
                self.watch
            )));
        }
        if n > self.depth {
            return Err(RoeError::LengthMismatch {
                len: self.depth,
                required: n,
            });
        }
        let target = BigInt::from(symbol);
        Ok(self
            .exact
            .iter()
            .enumerate()
            .filter(|(idx, a)| (m..=n).contains(&(idx + 1)) && **a == target)
            .count() as u64)
    }
}

/// Same draws as [`sample_lebesgue_digits`], stopping once the remaining
/// symbols are certain to exceed `watch`. Systems without verified
/// monotone h are sampled in full.
pub fn sample_lebesgue_symbols(
    system: &RoeSystem,
    depth: usize,
    watch: u64,
    stream: RandomStream,
) -> Result<CensoredSymbols> {
    if depth < 1 {
        return Err(RoeError::domain("depth must be at least 1"));
    }
    if watch < 1 {
        return Err(RoeError::domain("watch level must be at least 1"));
    }
    let threshold = BigInt::from(watch) << 64u32;
    let persistent_from = persistence_start(system, depth, &threshold)?;
    let mut uniforms = stream.uniforms();
    let mut exact = Vec::with_capacity(depth);
    let mut prev = first_digit_from_uniform(uniforms.next_u64_nonzero());
    system.check_bits(&prev)?;
    exact.push(&prev - 1u32);
    for n in 2..=depth {
        let h = system.h(n - 1, &prev)?;
        if let Some(start) = persistent_from {
            if n >= start && h >= threshold {
                break;
            }
        }
        let d = transition_from_uniform(&h, uniforms.next_u64_nonzero());
        system.check_bits(&d)?;
        exact.push(&d - &h);
        prev = d;
    }
    Ok(CensoredSymbols { exact, depth, watch })
}

/// Smallest position `n` such that `h_k(T + 1) >= T` for all `k` in
/// `n..depth`, or `None` when censoring is not allowed.
fn persistence_start(system: &RoeSystem, depth: usize, threshold: &BigInt) -> Result<Option<usize>> {
    if !system.monotone_verified() {
        return Ok(None);
    }
    let probe = threshold + 1u32;
    let holds = |k: usize| -> Result<bool> { Ok(&system.h(k, &probe)? >= threshold) };
    if system.position_independent() {
        return Ok(if holds(1)? { Some(2) } else { None });
    }
    let mut start = depth + 1;
    for k in (2..depth).rev() {
        if holds(k)? {
            start = k;
        } else {
            break;
        }
    }
    // At position `depth` no later h is needed.
    Ok(Some(start.min(depth)))
}

/// Law of one difference symbol on `{1, 2, 3, ...}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolLaw {
    /// `p_1, ..., p_M`; symbols above `M` have zero mass.
    Table(Vec<BigRational>),
    /// `p_i = (1 - p)^(i - 1) p`.
    Geometric(BigRational),
}

impl SymbolLaw {
    pub fn table(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(RoeError::Config("empty probability table".into()));
        }
        if values.iter().any(|p| p.is_negative()) {
            return Err(RoeError::Config("negative probability".into()));
        }
        let total: BigRational = values.iter().sum();
        if total != BigRational::one() {
            return Err(RoeError::Config(format!(
                "probabilities sum to {} instead of 1",
                rational::to_pq(&total)
            )));
        }
        Ok(SymbolLaw::Table(values))
    }

    pub fn geometric(p: BigRational) -> Result<Self> {
        if !p.is_positive() || p > BigRational::one() {
            return Err(RoeError::Config(format!(
                "geometric parameter {} is not in (0, 1]",
                rational::to_pq(&p)
            )));
        }
        Ok(SymbolLaw::Geometric(p))
    }

    pub fn prob(&self, i: u64) -> BigRational {
        if i == 0 {
            return BigRational::zero();
        }
        match self {
            SymbolLaw::Table(values) => values
                .get((i - 1) as usize)
                .cloned()
                .unwrap_or_else(BigRational::zero),
            SymbolLaw::Geometric(p) => {
                let q = BigRational::one() - p;
                num_traits::pow(q, (i - 1) as usize) * p
            }
        }
    }

    pub fn is_point_mass(&self) -> bool {
        match self {
            SymbolLaw::Table(values) => values.iter().any(|p| p.is_one()),
            SymbolLaw::Geometric(p) => p.is_one(),
        }
    }

    /// Inverse CDF at `u = r / 2^64`: the smallest `i` with `u < F(i)`.
    fn draw(&self, r: u64, cap: u64) -> Result<u64> {
        let scale = BigInt::one() << 64u32;
        let r = BigInt::from(r);
        match self {
            SymbolLaw::Table(values) => {
                let mut cumulative = BigRational::zero();
                for (idx, p) in values.iter().enumerate() {
                    cumulative += p;
                    // r / 2^64 < c.numer / c.denom
                    if &r * cumulative.denom() < cumulative.numer() * &scale {
                        let symbol = idx as u64 + 1;
                        return if symbol > cap {
                            Err(RoeError::SupportOverflow { cap })
                        } else {
                            Ok(symbol)
                        };
                    }
                }
                unreachable!("table sums to one and u < 1")
            }
            SymbolLaw::Geometric(p) => {
                if p.is_one() {
                    return Ok(1);
                }
                // Smallest i with q^i < v, v = 1 - u.
                let q = BigRational::one() - p;
                let v_numer = &scale - &r;
                let below = |i: u64| -> bool {
                    let qi = num_traits::pow(q.clone(), i as usize);
                    qi.numer() * &scale < &v_numer * qi.denom()
                };
                let v = v_numer.to_f64().unwrap_or(0.0) / 2f64.powi(64);
                let estimate = (v.ln() / rational::to_f64(&q).ln()).floor() + 1.0;
                if !estimate.is_finite() || estimate > cap as f64 + 2.0 {
                    return Err(RoeError::SupportOverflow { cap });
                }
                let mut i = (estimate as u64).max(1);
                if i <= 1024 {
                    while i > 1 && below(i - 1) {
                        i -= 1;
                    }
                    while !below(i) {
                        i += 1;
                    }
                }
                if i > cap {
                    Err(RoeError::SupportOverflow { cap })
                } else {
                    Ok(i)
                }
            }
        }
    }
}

/// Per-position laws of the independent symbols `xi_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolDistribution {
    columns: Vec<SymbolLaw>,
    iid: bool,
    support_cap: u64,
}

impl SymbolDistribution {
    pub fn iid(law: SymbolLaw) -> Self {
        SymbolDistribution {
            columns: vec![law],
            iid: true,
            support_cap: DEFAULT_SUPPORT_CAP,
        }
    }

    /// Independent, non-identical columns; position `k` uses `columns[k - 1]`.
    pub fn columns(columns: Vec<SymbolLaw>) -> Result<Self> {
        if columns.is_empty() {
            return Err(RoeError::Config("no columns".into()));
        }
        Ok(SymbolDistribution {
            columns,
            iid: false,
            support_cap: DEFAULT_SUPPORT_CAP,
        })
    }

    pub fn with_support_cap(mut self, cap: u64) -> Self {
        self.support_cap = cap;
        self
    }

    pub fn is_iid(&self) -> bool {
        self.iid
    }

    pub fn support_cap(&self) -> u64 {
        self.support_cap
    }

    /// Number of positions with a defined law, `None` when unbounded.
    pub fn defined_positions(&self) -> Option<usize> {
        if self.iid {
            None
        } else {
            Some(self.columns.len())
        }
    }

    pub fn column(&self, k: usize) -> Result<&SymbolLaw> {
        if k < 1 {
            return Err(RoeError::domain("positions start at 1"));
        }
        if self.iid {
            return Ok(&self.columns[0]);
        }
        self.columns.get(k - 1).ok_or_else(|| {
            RoeError::domain(format!(
                "distribution defines {} positions, position {k} requested",
                self.columns.len()
            ))
        })
    }

    /// `p_{i k}`.
    pub fn prob(&self, i: u64, k: usize) -> Result<BigRational> {
        Ok(self.column(k)?.prob(i))
    }

    /// True when every column is a point mass.
    pub fn all_point_masses(&self) -> bool {
        self.columns.iter().all(SymbolLaw::is_point_mass)
    }

    /// Parses `{"iid": true, "pmf": {...}}` or
    /// `{"iid": false, "columns": [{...}, ...]}` where each law is
    /// `{"type": "geometric", "p": "1/2"}` or
    /// `{"type": "table", "values": ["1/2", "1/4", "1/4"]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: DistConfig =
            serde_json::from_str(text).map_err(|e| RoeError::Config(e.to_string()))?;
        let mut dist = if config.iid {
            let pmf = config
                .pmf
                .ok_or_else(|| RoeError::Config("iid distribution needs `pmf`".into()))?;
            SymbolDistribution::iid(pmf.to_law()?)
        } else {
            let columns = config
                .columns
                .ok_or_else(|| RoeError::Config("non-iid distribution needs `columns`".into()))?;
            SymbolDistribution::columns(
                columns.iter().map(LawConfig::to_law).collect::<Result<_>>()?,
            )?
        };
        if let Some(cap) = config.support_cap {
            dist = dist.with_support_cap(cap);
        }
        Ok(dist)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistConfig {
    iid: bool,
    pmf: Option<LawConfig>,
    columns: Option<Vec<LawConfig>>,
    support_cap: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum LawConfig {
    Geometric { p: NumberOrString },
    Table { values: Vec<NumberOrString> },
}

impl LawConfig {
    fn to_law(&self) -> Result<SymbolLaw> {
        match self {
            LawConfig::Geometric { p } => SymbolLaw::geometric(p.to_rational()?),
            LawConfig::Table { values } => {
                let mut exact = values
                    .iter()
                    .map(NumberOrString::to_rational)
                    .collect::<Result<Vec<_>>>()?;
                if values.iter().any(NumberOrString::is_float) {
                    let total: BigRational = exact.iter().sum();
                    let gap = (rational::to_f64(&total) - 1.0).abs();
                    if gap > FLOAT_SUM_TOLERANCE {
                        return Err(RoeError::Config(format!(
                            "float probabilities sum to {} (tolerance {FLOAT_SUM_TOLERANCE:e})",
                            rational::to_f64(&total)
                        )));
                    }
                    if total.is_positive() {
                        exact = exact.into_iter().map(|p| p / &total).collect();
                    }
                }
                SymbolLaw::table(exact)
            }
        }
    }
}

/// Independent symbols `xi_1, ..., xi_depth`.
pub fn sample_xi_symbols(dist: &SymbolDistribution, depth: usize, stream: RandomStream) -> Result<Vec<u64>> {
    if depth < 1 {
        return Err(RoeError::domain("depth must be at least 1"));
    }
    let mut uniforms = stream.uniforms();
    (1..=depth)
        .map(|k| {
            dist.column(k)?
                .draw(uniforms.next_u64_nonzero(), dist.support_cap)
        })
        .collect()
}

/// Symbols drawn from `dist` together with the digits they encode.
pub fn sample_xi_digits(
    system: &RoeSystem,
    dist: &SymbolDistribution,
    depth: usize,
    stream: RandomStream,
) -> Result<(DiffDigitSeq, DigitSeq)> {
    let symbols = sample_xi_symbols(dist, depth, stream)?;
    let diff = DiffDigitSeq::from_u64(system, &symbols)?;
    let digits = diff.from_difference()?;
    Ok((diff, digits))
}
