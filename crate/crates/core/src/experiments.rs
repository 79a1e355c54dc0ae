//! Finite-depth diagnostics for digit-occurrence finiteness under Lebesgue
//! measure and for the separation between Lebesgue measure and the law of
//! a real with independent difference symbols.
//!
//! The asymptotic event "symbol `i0` occurs infinitely often" is replaced
//! by `E = {alpha_n = i0 for some n in [m, N]}`, for which
//! `mu(E) = 1 - prod (1 - p_{i0 n})` exactly and `lambda(E) <= sum l_n`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cylinder::{self, Convergence, TailSum};
use crate::error::{Result, RoeError};
use crate::expansion::DiffDigitSeq;
use crate::rational::{self, to_decimal, to_pq};
use crate::sampling::{self, RandomStream, SymbolDistribution};
use crate::stats;
use crate::system::RoeSystem;

/// Stream ids at or above this value belong to symbol-law samples.
pub const XI_STREAM_BASE: u64 = 1 << 62;

pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_DEPTH: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    SingularityEvidence,
    HypothesisFails,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Divergence {
    Divergent,
    Convergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExperimentKind {
    Finiteness,
    Singularity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExperimentParams {
    pub i0: u64,
    /// `(m, N)`, both inclusive; `N` is also the sampling depth.
    pub window: (usize, usize),
    pub samples: u64,
    pub seed: u64,
}

impl ExperimentParams {
    /// Defaults: `N = 20`, `m = ceil(N / 2)`, `10^5` samples.
    pub fn new(i0: u64, seed: u64) -> Self {
        let depth = DEFAULT_DEPTH;
        ExperimentParams {
            i0,
            window: (depth.div_ceil(2), depth),
            samples: DEFAULT_SAMPLES,
            seed,
        }
    }

    pub fn depth(&self) -> usize {
        self.window.1
    }

    fn check(&self) -> Result<()> {
        let (m, n) = self.window;
        if self.i0 < 1 {
            return Err(RoeError::domain("i0 must be at least 1"));
        }
        if m < 2 || m >= n {
            return Err(RoeError::domain(format!(
                "window [{m}, {n}] needs 2 <= m < N"
            )));
        }
        if self.samples < 1 {
            return Err(RoeError::domain("at least one sample is required"));
        }
        Ok(())
    }
}

/// Per-measure occurrence counts of `i0` inside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceStats {
    pub counts: Vec<u64>,
    pub hits: u64,
    pub max: u64,
    pub histogram: BTreeMap<u64, u64>,
}

impl OccurrenceStats {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let mut histogram = BTreeMap::new();
        for &c in &counts {
            *histogram.entry(c).or_insert(0) += 1;
        }
        OccurrenceStats {
            hits: counts.iter().filter(|&&c| c > 0).count() as u64,
            max: counts.iter().copied().max().unwrap_or(0),
            histogram,
            counts,
        }
    }

    pub fn samples(&self) -> u64 {
        self.counts.len() as u64
    }

    /// Fraction of samples with at least one occurrence.
    pub fn hit_fraction(&self) -> BigRational {
        if self.counts.is_empty() {
            return BigRational::zero();
        }
        BigRational::new(BigInt::from(self.hits), BigInt::from(self.samples()))
    }

    pub fn mean(&self) -> BigRational {
        if self.counts.is_empty() {
            return BigRational::zero();
        }
        let total: u64 = self.counts.iter().sum();
        BigRational::new(BigInt::from(total), BigInt::from(self.samples()))
    }

    fn to_json(&self, precision: usize) -> Value {
        let histogram: serde_json::Map<String, Value> = self
            .histogram
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        json!({
            "samples": self.samples(),
            "hits": self.hits,
            "hit_fraction": rational_json(&self.hit_fraction(), precision),
            "mean": rational_json(&self.mean(), precision),
            "max": self.max,
            "histogram": histogram,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorelCantelli {
    pub i0: u64,
    pub terms: usize,
    pub partial_sum: BigRational,
    pub verdict: Divergence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub system: String,
    pub params: ExperimentParams,
    pub lebesgue: OccurrenceStats,
    pub xi: Option<OccurrenceStats>,
    pub l_tail: TailSum,
    pub borel_cantelli: Option<BorelCantelli>,
    /// Exact `mu(E)`, present for singularity reports.
    pub mu_lower: Option<BigRational>,
    /// `min(1, sum l_n)`.
    pub lambda_upper: BigRational,
    pub lambda_side_ok: bool,
    pub mu_side_ok: Option<bool>,
    pub point_mass: Option<bool>,
    pub verdict: Verdict,
}

pub fn rational_json(r: &BigRational, precision: usize) -> Value {
    json!({ "exact": to_pq(r), "decimal": to_decimal(r, precision) })
}

impl ExperimentReport {
    pub fn to_json(&self, precision: usize) -> Value {
        let opt = |r: &Option<BigRational>| match r {
            Some(r) => rational_json(r, precision),
            None => Value::Null,
        };
        json!({
            "experiment": self.kind,
            "system": self.system,
            "parameters": {
                "i0": self.params.i0,
                "window": [self.params.window.0, self.params.window.1],
                "depth": self.params.depth(),
                "samples": self.params.samples,
                "seed": self.params.seed,
            },
            "lebesgue": self.lebesgue.to_json(precision),
            "xi": self.xi.as_ref().map(|s| s.to_json(precision)),
            "bounds": {
                "l_tail_sum": rational_json(&self.l_tail.sum, precision),
                "l_tail_range": [self.l_tail.from, self.l_tail.to],
                "l_tail_verdict": self.l_tail.verdict,
                "p_partial_sum": self.borel_cantelli.as_ref()
                    .map(|b| rational_json(&b.partial_sum, precision)),
                "p_verdict": self.borel_cantelli.as_ref().map(|b| b.verdict),
                "mu_lower": opt(&self.mu_lower),
                "lambda_upper": rational_json(&self.lambda_upper, precision),
            },
            "checks": {
                "lambda_side_ok": self.lambda_side_ok,
                "mu_side_ok": self.mu_side_ok,
                "point_mass": self.point_mass,
            },
            "verdict": self.verdict,
        })
    }

    /// Flat CSV of per-sample occurrence counts.
    pub fn counts_csv(&self) -> String {
        let mut out = String::from("measure,sample,count\n");
        let mut push = |name: &str, stats: &OccurrenceStats| {
            for (i, c) in stats.counts.iter().enumerate() {
                out.push_str(&format!("{name},{i},{c}\n"));
            }
        };
        push("lebesgue", &self.lebesgue);
        if let Some(xi) = &self.xi {
            push("xi", xi);
        }
        out
    }
}

/// Histogram of `#{n in [m, N] : alpha_n = i0}` over the sequences.
pub fn digit_occurrences(seqs: &[DiffDigitSeq], i0: u64, window: (usize, usize)) -> Result<OccurrenceStats> {
    let (m, n) = window;
    if m < 1 || m > n {
        return Err(RoeError::domain(format!("bad window [{m}, {n}]")));
    }
    let target = BigInt::from(i0);
    let counts = seqs
        .iter()
        .map(|s| {
            if s.len() < n {
                return Err(RoeError::LengthMismatch {
                    len: s.len(),
                    required: n,
                });
            }
            Ok(s.alphas()[m - 1..n].iter().filter(|a| **a == target).count() as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OccurrenceStats::from_counts(counts))
}

/// Partial sum of `p_{i0 k}` over `k <= n` with a divergence verdict.
///
/// For i.i.d. symbols the sum is `n p_{i0}` and diverges exactly when
/// `p_{i0} > 0`. Otherwise the verdict comes from the second half of the
/// terms: geometric decay means `Convergent`, terms bounded below means
/// `Divergent`.
pub fn borel_cantelli_sums(dist: &SymbolDistribution, i0: u64, n: usize) -> Result<BorelCantelli> {
    if n < 1 {
        return Err(RoeError::domain("need at least one term"));
    }
    if dist.is_iid() {
        let p = dist.prob(i0, 1)?;
        let verdict = if p.is_zero() {
            Divergence::Convergent
        } else {
            Divergence::Divergent
        };
        return Ok(BorelCantelli {
            i0,
            terms: n,
            partial_sum: p * BigInt::from(n),
            verdict,
        });
    }
    let terms = (1..=n).map(|k| dist.prob(i0, k)).collect::<Result<Vec<_>>>()?;
    let verdict = match cylinder::classify_terms(&terms[n / 2..]) {
        Convergence::Summable => Divergence::Convergent,
        Convergence::NonSummable => Divergence::Divergent,
        Convergence::Inconclusive => Divergence::Inconclusive,
    };
    Ok(BorelCantelli {
        i0,
        terms: n,
        partial_sum: rational::sum_exact(&terms),
        verdict,
    })
}

fn lebesgue_counts(system: &RoeSystem, params: &ExperimentParams) -> Result<OccurrenceStats> {
    let (m, n) = params.window;
    let counts = (0..params.samples)
        .into_par_iter()
        .map(|id| {
            let stream = RandomStream::new(params.seed, id);
            sampling::sample_lebesgue_symbols(system, n, params.i0, stream)?
                .count_in_window(params.i0, m, n)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OccurrenceStats::from_counts(counts))
}

fn xi_counts(dist: &SymbolDistribution, params: &ExperimentParams) -> Result<OccurrenceStats> {
    let (m, n) = params.window;
    let counts = (0..params.samples)
        .into_par_iter()
        .map(|id| {
            let stream = RandomStream::new(params.seed, XI_STREAM_BASE + id);
            let symbols = sampling::sample_xi_symbols(dist, n, stream)?;
            Ok(symbols[m - 1..n].iter().filter(|&&a| a == params.i0).count() as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OccurrenceStats::from_counts(counts))
}

fn clamp_unit(r: BigRational) -> BigRational {
    if r > BigRational::one() {
        BigRational::one()
    } else {
        r
    }
}

fn lambda_check(stats: &OccurrenceStats, bound: &BigRational) -> bool {
    stats::below_band(
        rational::to_f64(&stats.hit_fraction()),
        rational::to_f64(bound),
        stats.samples(),
    )
}

/// Lebesgue side on its own: how often `i0` appears in the window against
/// the union bound `sum l_k`.
pub fn finiteness_experiment(system: &RoeSystem, params: &ExperimentParams) -> Result<ExperimentReport> {
    params.check()?;
    let (m, n) = params.window;
    let l_tail = cylinder::tail_sum_l(system, m, n)?;
    let lambda_upper = clamp_unit(l_tail.sum.clone());
    let lebesgue = lebesgue_counts(system, params)?;
    let lambda_side_ok = lambda_check(&lebesgue, &lambda_upper);
    let verdict = match l_tail.verdict {
        Convergence::NonSummable => Verdict::HypothesisFails,
        _ => Verdict::Inconclusive,
    };
    Ok(ExperimentReport {
        kind: ExperimentKind::Finiteness,
        system: system.name().to_string(),
        params: *params,
        lebesgue,
        xi: None,
        l_tail,
        borel_cantelli: None,
        mu_lower: None,
        lambda_upper,
        lambda_side_ok,
        mu_side_ok: None,
        point_mass: None,
        verdict,
    })
}

/// `1 - prod_{n=m}^{N} (1 - p_{i0 n})`.
pub fn exact_mu_window(dist: &SymbolDistribution, i0: u64, window: (usize, usize)) -> Result<BigRational> {
    let mut miss = BigRational::one();
    for k in window.0..=window.1 {
        miss *= BigRational::one() - dist.prob(i0, k)?;
    }
    Ok(BigRational::one() - miss)
}

/// Exact two-sided bounds on the window event plus Monte Carlo estimates
/// under both measures.
pub fn singularity_witness(
    system: &RoeSystem,
    dist: &SymbolDistribution,
    params: &ExperimentParams,
) -> Result<ExperimentReport> {
    params.check()?;
    let (m, n) = params.window;
    let l_tail = cylinder::tail_sum_l(system, m, n)?;
    if l_tail.verdict != Convergence::Summable {
        return Err(RoeError::HypothesisUnverified(format!(
            "sum of l_k over [{m}, {n}] for `{}` is {:?}, not Summable",
            system.name(),
            l_tail.verdict
        )));
    }
    if let Some(defined) = dist.defined_positions() {
        if defined < n {
            return Err(RoeError::domain(format!(
                "distribution defines {defined} positions, window needs {n}"
            )));
        }
    }
    let mu_exact = exact_mu_window(dist, params.i0, params.window)?;
    let lambda_upper = clamp_unit(l_tail.sum.clone());
    let borel_cantelli = borel_cantelli_sums(dist, params.i0, n)?;

    let lebesgue = lebesgue_counts(system, params)?;
    let xi = xi_counts(dist, params)?;

    let lambda_side_ok = lambda_check(&lebesgue, &lambda_upper);
    let mu_side_ok = stats::within_band(
        rational::to_f64(&xi.hit_fraction()),
        rational::to_f64(&mu_exact),
        xi.samples(),
    );
    let separated = mu_exact > lambda_upper;
    let verdict = if !mu_exact.is_zero() && separated && lambda_side_ok && mu_side_ok {
        Verdict::SingularityEvidence
    } else {
        Verdict::Inconclusive
    };
    Ok(ExperimentReport {
        kind: ExperimentKind::Singularity,
        system: system.name().to_string(),
        params: *params,
        lebesgue,
        xi: Some(xi),
        l_tail,
        borel_cantelli: Some(borel_cantelli),
        mu_lower: Some(mu_exact),
        lambda_upper,
        lambda_side_ok,
        mu_side_ok: Some(mu_side_ok),
        point_mass: Some(dist.all_point_masses()),
        verdict,
    })
}

/// Combined result of the three diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosis {
    pub finiteness: ExperimentReport,
    pub singularity: Option<ExperimentReport>,
    pub borel_cantelli: BorelCantelli,
    /// Set when the singularity witness refused to run.
    pub hypothesis_error: Option<String>,
    pub verdict: Verdict,
}

impl Diagnosis {
    pub fn to_json(&self, precision: usize) -> Value {
        json!({
            "system": self.finiteness.system,
            "finiteness": self.finiteness.to_json(precision),
            "singularity": self.singularity.as_ref().map(|r| r.to_json(precision)),
            "borel_cantelli": {
                "i0": self.borel_cantelli.i0,
                "terms": self.borel_cantelli.terms,
                "partial_sum": rational_json(&self.borel_cantelli.partial_sum, precision),
                "verdict": self.borel_cantelli.verdict,
            },
            "hypothesis_error": self.hypothesis_error,
            "verdict": self.verdict,
        })
    }

    pub fn counts_csv(&self) -> String {
        match &self.singularity {
            Some(report) => report.counts_csv(),
            None => self.finiteness.counts_csv(),
        }
    }
}

pub fn diagnose(system: &RoeSystem, dist: &SymbolDistribution, params: &ExperimentParams) -> Result<Diagnosis> {
    let finiteness = finiteness_experiment(system, params)?;
    let borel_cantelli = borel_cantelli_sums(dist, params.i0, params.depth())?;
    let (singularity, hypothesis_error) = match singularity_witness(system, dist, params) {
        Ok(report) => (Some(report), None),
        Err(RoeError::HypothesisUnverified(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    let verdict = match &singularity {
        Some(report) => report.verdict,
        None => Verdict::HypothesisFails,
    };
    Ok(Diagnosis {
        finiteness,
        singularity,
        borel_cantelli,
        hypothesis_error,
        verdict,
    })
}
