//! Command-line front end. `run` parses arguments, writes the rendered
//! result to the given writer and returns the process exit code:
//! 0 on success, 2 on usage or domain errors, 3 when the summability
//! hypothesis of the singularity diagnostic does not hold.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cylinder;
use crate::error::{Result, RoeError};
use crate::expansion::{self, DiffDigitSeq, DigitSeq};
use crate::experiments::{self, rational_json, Diagnosis, ExperimentParams, XI_STREAM_BASE};
use crate::rational::{parse_rational, ratio, to_decimal, to_pq};
use crate::sampling::{self, RandomStream, SymbolDistribution, SymbolLaw};
use crate::system::{RoeSystem, SystemKind, DEFAULT_BIT_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

/// Range over which custom systems are checked before use.
const CUSTOM_CHECK_N: usize = 64;
const CUSTOM_CHECK_J: u64 = 10_000;

#[derive(Debug, Parser)]
#[command(name = "roe", version, about = "Restricted Oppenheim expansions with exact arithmetic")]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Lebesgue,
    Xi,
}

#[derive(Debug, Clone, Args)]
pub struct CliConfig {
    /// engel, sylvester, luroth or custom:<path>
    #[arg(long, global = true, conflicts_with = "custom")]
    pub system: Option<String>,
    /// JSON file describing a custom system
    #[arg(long, global = true)]
    pub custom: Option<PathBuf>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub depth: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// JSON file describing the symbol distribution
    #[arg(long, global = true)]
    pub dist: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub i0: u64,
    /// Window "m,N" of positions, both inclusive
    #[arg(long, global = true)]
    pub window: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Significant digits of decimal renderings
    #[arg(long, global = true, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    pub precision: u64,
    /// Largest integer size in bits
    #[arg(long, global = true, env = "ROE_BIT_BUDGET")]
    pub bit_budget: Option<u64>,
    /// Worker threads for sampling (default: all cores)
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Digits, difference symbols and enclosing cylinder of x
    Expand { x: String },
    /// Partial sum and cylinder interval of a digit sequence
    Eval {
        digits: Vec<String>,
        /// Read the arguments as difference symbols
        #[arg(long)]
        alphas: bool,
    },
    /// Endpoints and length of the cylinder over a base
    Cylinder { digits: Vec<String> },
    /// P(d_n = k | d_{n-1} = j); without k, a table of the first values
    Transition {
        j: String,
        k: Option<String>,
        /// Position n of the child digit
        #[arg(long, default_value_t = 2)]
        position: usize,
        /// Rows of the table when k is omitted
        #[arg(long, default_value_t = 10)]
        rows: u64,
    },
    /// Uniform bounds l_k and their sum over the window
    Bounds,
    /// Draw digit sequences under Lebesgue measure or from a symbol law
    Sample {
        #[arg(long, value_enum, default_value_t = Measure::Lebesgue)]
        measure: Measure,
    },
    /// Occurrence-finiteness and singularity diagnostics
    Diagnose,
    /// Check integrality, positivity and monotonicity of h
    Validate {
        #[arg(long, default_value_t = CUSTOM_CHECK_N)]
        n_max: usize,
        #[arg(long, default_value_t = CUSTOM_CHECK_J)]
        j_max: u64,
    },
}

enum Outcome {
    Done(String),
    /// Rendered output, but the diagnostic hypothesis failed.
    Hypothesis(String),
}

/// Parses `args` (including the program name), runs the command and
/// writes its output to `out`, errors to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let result = match cli.config.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(RoeError::Config(e.to_string())),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(Outcome::Done(text)) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Ok(Outcome::Hypothesis(text)) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_HYPOTHESIS
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                RoeError::HypothesisUnverified(_) => EXIT_HYPOTHESIS,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Validate { n_max, j_max } => cmd_validate(cfg, *n_max, *j_max),
        command => {
            let system = load_system(cfg)?;
            match command {
                Command::Expand { x } => cmd_expand(cfg, &system, x),
                Command::Eval { digits, alphas } => cmd_eval(cfg, &system, digits, *alphas),
                Command::Cylinder { digits } => cmd_cylinder(cfg, &system, digits),
                Command::Transition { j, k, position, rows } => {
                    cmd_transition(cfg, &system, j, k.as_deref(), *position, *rows)
                }
                Command::Bounds => cmd_bounds(cfg, &system),
                Command::Sample { measure } => cmd_sample(cfg, &system, *measure),
                Command::Diagnose => cmd_diagnose(cfg, &system),
                Command::Validate { .. } => unreachable!(),
            }
        }
    }
}

fn bit_budget(cfg: &CliConfig) -> u64 {
    cfg.bit_budget.unwrap_or(DEFAULT_BIT_BUDGET)
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| RoeError::Config(format!("cannot read {}: {e}", path.display())))
}

/// The system as named on the command line, not yet validated.
fn selected_system(cfg: &CliConfig) -> Result<RoeSystem> {
    let custom_path = match (&cfg.system, &cfg.custom) {
        (_, Some(path)) => Some(path.clone()),
        (Some(name), None) => match name.strip_prefix("custom:") {
            Some(path) => Some(PathBuf::from(path)),
            None => {
                let kind = match name.as_str() {
                    "engel" => SystemKind::Engel,
                    "sylvester" => SystemKind::Sylvester,
                    "luroth" => SystemKind::Luroth,
                    other => {
                        return Err(RoeError::Config(format!(
                            "unknown system `{other}` (expected engel, sylvester, luroth or custom:<path>)"
                        )))
                    }
                };
                return Ok(RoeSystem::builtin(kind)?.with_bit_budget(bit_budget(cfg)));
            }
        },
        (None, None) => None,
    };
    let system = match custom_path {
        Some(path) => RoeSystem::from_json(&read_file(&path)?)?,
        None => RoeSystem::sylvester(),
    };
    Ok(system.with_bit_budget(bit_budget(cfg)))
}

fn load_system(cfg: &CliConfig) -> Result<RoeSystem> {
    let system = selected_system(cfg)?;
    if system.kind() != SystemKind::Custom {
        return Ok(system);
    }
    let (system, report) = system.validated(CUSTOM_CHECK_N, CUSTOM_CHECK_J)?;
    if !report.integrality_ok {
        let first = &report.failures[0];
        return Err(RoeError::Config(format!(
            "custom system `{}` fails validation at n = {}, j = {}: {:?}",
            system.name(),
            first.n,
            first.j,
            first.reason
        )));
    }
    Ok(system)
}

fn depth_or(cfg: &CliConfig, default: usize) -> usize {
    cfg.depth.map(|d| d as usize).unwrap_or(default)
}

fn precision(cfg: &CliConfig) -> usize {
    cfg.precision as usize
}

fn parse_int(text: &str) -> Result<BigInt> {
    text.trim()
        .parse::<BigInt>()
        .map_err(|_| RoeError::Parse(format!("`{text}` is not an integer")))
}

fn parse_ints(items: &[String]) -> Result<Vec<BigInt>> {
    // Accept "3 7 43", "3,7,43" and "[3,7,43]" alike.
    let joined = items.join(" ");
    let cleaned = joined.replace(['[', ']', ','], " ");
    let values = cleaned
        .split_whitespace()
        .map(parse_int)
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(RoeError::Parse("no digits given".into()));
    }
    Ok(values)
}

fn parse_window(cfg: &CliConfig, default_depth: usize) -> Result<(usize, usize)> {
    match &cfg.window {
        Some(text) => {
            let parts: Vec<&str> = text.split(',').map(str::trim).collect();
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| RoeError::Parse(format!("bad window `{text}`, expected m,N")))
            };
            match parts.as_slice() {
                [m, n] => Ok((parse(m)?, parse(n)?)),
                _ => Err(RoeError::Parse(format!("bad window `{text}`, expected m,N"))),
            }
        }
        None => {
            let depth = depth_or(cfg, default_depth);
            Ok((depth.div_ceil(2), depth))
        }
    }
}

fn ints_json(values: &[BigInt]) -> Value {
    Value::Array(values.iter().map(|v| Value::String(v.to_string())).collect())
}

fn joined(values: &[BigInt], sep: &str) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

/// Longest `p/q` shown in full in text output; JSON always carries it.
const TEXT_EXACT_MAX: usize = 120;

fn text_rational(r: &BigRational, precision: usize) -> String {
    let exact = to_pq(r);
    let exact = if exact.len() <= TEXT_EXACT_MAX {
        exact
    } else {
        format!(
            "<{}-digit>/<{}-digit>",
            r.numer().to_string().len(),
            r.denom().to_string().len()
        )
    };
    format!("{exact}  ({})", to_decimal(r, precision))
}

fn json_doc(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    text
}

struct Table(Vec<(String, String)>);

impl Table {
    fn new() -> Self {
        Table(Vec::new())
    }

    fn row(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    fn render(&self) -> String {
        let width = self.0.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(out, "{k:width$}  {v}");
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from("field,value\n");
        for (k, v) in &self.0 {
            let _ = writeln!(out, "{k},{}", csv_field(v));
        }
        out
    }
}

fn csv_field(v: &str) -> String {
    if v.contains([',', '"', '\n']) {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

fn digits_report(
    cfg: &CliConfig,
    digits: &DigitSeq,
    mut json_fields: serde_json::Map<String, Value>,
    mut table: Table,
) -> String {
    let p = precision(cfg);
    let (inf, sup) = digits.evaluate_interval();
    let width = &sup - &inf;
    let alphas = digits.to_difference();
    match cfg.format {
        Format::Json => {
            json_fields.insert("system".into(), json!(digits.system().name()));
            json_fields.insert("digits".into(), ints_json(digits.digits()));
            json_fields.insert("alphas".into(), ints_json(alphas.alphas()));
            json_fields.insert("inf".into(), rational_json(&inf, p));
            json_fields.insert("sup".into(), rational_json(&sup, p));
            json_fields.insert("width".into(), rational_json(&width, p));
            json_doc(&Value::Object(json_fields))
        }
        Format::Text | Format::Csv => {
            table
                .row("system", digits.system().name())
                .row("digits", joined(digits.digits(), " "))
                .row("alphas", joined(alphas.alphas(), " "))
                .row("inf", text_rational(&inf, p))
                .row("sup", text_rational(&sup, p))
                .row("width", text_rational(&width, p));
            if cfg.format == Format::Csv {
                table.csv()
            } else {
                table.render()
            }
        }
    }
}

fn cmd_expand(cfg: &CliConfig, system: &RoeSystem, x: &str) -> Result<Outcome> {
    let value = parse_rational(x)?;
    let depth = depth_or(cfg, 10);
    let digits = expansion::expand(system, &value, depth)?;
    let p = precision(cfg);
    let mut fields = serde_json::Map::new();
    fields.insert("x".into(), rational_json(&value, p));
    let mut table = Table::new();
    table.row("x", text_rational(&value, p));
    Ok(Outcome::Done(digits_report(cfg, &digits, fields, table)))
}

fn cmd_eval(cfg: &CliConfig, system: &RoeSystem, items: &[String], alphas: bool) -> Result<Outcome> {
    let values = parse_ints(items)?;
    let digits = if alphas {
        DiffDigitSeq::new(system, values)?.to_digits()?
    } else {
        DigitSeq::new(system, values)?
    };
    let p = precision(cfg);
    let value = digits.evaluate();
    let mut fields = serde_json::Map::new();
    fields.insert("value".into(), rational_json(&value, p));
    let mut table = Table::new();
    table.row("value", text_rational(&value, p));
    Ok(Outcome::Done(digits_report(cfg, &digits, fields, table)))
}

fn cmd_cylinder(cfg: &CliConfig, system: &RoeSystem, items: &[String]) -> Result<Outcome> {
    let base = DigitSeq::new(system, parse_ints(items)?)?;
    let cyl = cylinder::cylinder(&base);
    let p = precision(cfg);
    let text = match cfg.format {
        Format::Json => json_doc(&json!({
            "system": system.name(),
            "base": ints_json(base.digits()),
            "inf": rational_json(&cyl.inf, p),
            "sup": rational_json(&cyl.sup, p),
            "length": rational_json(&cyl.length, p),
        })),
        Format::Text | Format::Csv => {
            let mut table = Table::new();
            table
                .row("system", system.name())
                .row("base", joined(base.digits(), " "))
                .row("inf", text_rational(&cyl.inf, p))
                .row("sup", text_rational(&cyl.sup, p))
                .row("length", text_rational(&cyl.length, p));
            if cfg.format == Format::Csv {
                table.csv()
            } else {
                table.render()
            }
        }
    };
    Ok(Outcome::Done(text))
}

fn cmd_transition(
    cfg: &CliConfig,
    system: &RoeSystem,
    j: &str,
    k: Option<&str>,
    position: usize,
    rows: u64,
) -> Result<Outcome> {
    if position < 2 {
        return Err(RoeError::domain("position must be at least 2"));
    }
    let j = parse_int(j)?;
    let h = system.h(position - 1, &j)?;
    let p = precision(cfg);
    let ks: Vec<BigInt> = match k {
        Some(k) => vec![parse_int(k)?],
        None => (1..=rows).map(|i| &h + i).collect(),
    };
    let mut entries = Vec::with_capacity(ks.len());
    for k in &ks {
        let prob = cylinder::transition_prob(system, position, &j, k)?;
        // P(d_n <= K | d_{n-1} = j) = 1 - h / K above the support minimum.
        let cdf = if k > &h {
            BigRational::one() - crate::rational::reduced(h.clone(), k.clone())
        } else {
            BigRational::zero()
        };
        entries.push((k.clone(), prob, cdf));
    }
    let text = match cfg.format {
        Format::Json => json_doc(&json!({
            "system": system.name(),
            "position": position,
            "j": j.to_string(),
            "h": h.to_string(),
            "transitions": entries.iter().map(|(k, prob, cdf)| json!({
                "k": k.to_string(),
                "prob": rational_json(prob, p),
                "cdf": rational_json(cdf, p),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::from("k,prob,cdf\n");
            for (k, prob, cdf) in &entries {
                let _ = writeln!(out, "{k},{},{}", to_pq(prob), to_pq(cdf));
            }
            out
        }
        Format::Text => {
            let mut out = format!("system {}  position {position}  j {j}  h {h}\n", system.name());
            for (k, prob, cdf) in &entries {
                let _ = writeln!(
                    out,
                    "k {k}  P {}  cdf {}",
                    text_rational(prob, p),
                    text_rational(cdf, p)
                );
            }
            out
        }
    };
    Ok(Outcome::Done(text))
}

fn cmd_bounds(cfg: &CliConfig, system: &RoeSystem) -> Result<Outcome> {
    let (from, to) = match &cfg.window {
        Some(_) => parse_window(cfg, 10)?,
        None => (2, depth_or(cfg, 10)),
    };
    if from < 2 || from > to {
        return Err(RoeError::domain(format!("bad range [{from}, {to}], need 2 <= m <= N")));
    }
    let tail = cylinder::tail_sum_l(system, from, to)?;
    let p = precision(cfg);
    let text = match cfg.format {
        Format::Json => json_doc(&json!({
            "system": system.name(),
            "range": [from, to],
            "l": tail.terms.iter().enumerate().map(|(i, l)| json!({
                "k": from + i,
                "l": rational_json(l, p),
            })).collect::<Vec<_>>(),
            "sum": rational_json(&tail.sum, p),
            "verdict": tail.verdict,
        })),
        Format::Csv => {
            let mut out = String::from("k,l\n");
            for (i, l) in tail.terms.iter().enumerate() {
                let _ = writeln!(out, "{},{}", from + i, to_pq(l));
            }
            out
        }
        Format::Text => {
            let mut out = format!("system {}  k in [{from}, {to}]\n", system.name());
            for (i, l) in tail.terms.iter().enumerate() {
                let _ = writeln!(out, "l_{}  {}", from + i, text_rational(l, p));
            }
            let _ = writeln!(out, "sum  {}", text_rational(&tail.sum, p));
            let _ = writeln!(out, "verdict  {:?}", tail.verdict);
            out
        }
    };
    Ok(Outcome::Done(text))
}

fn load_dist(cfg: &CliConfig) -> Result<Option<SymbolDistribution>> {
    cfg.dist
        .as_ref()
        .map(|path| SymbolDistribution::from_json(&read_file(path)?))
        .transpose()
}

fn samples_or(cfg: &CliConfig, default: u64) -> Result<u64> {
    let samples = cfg.samples.unwrap_or(default);
    if samples == 0 {
        return Err(RoeError::domain("--samples must be at least 1"));
    }
    Ok(samples)
}

fn cmd_sample(cfg: &CliConfig, system: &RoeSystem, measure: Measure) -> Result<Outcome> {
    let samples = samples_or(cfg, 10)?;
    let depth = depth_or(cfg, 10);
    let dist = load_dist(cfg)?;
    let draws: Vec<DigitSeq> = match measure {
        Measure::Lebesgue => (0..samples)
            .into_par_iter()
            .map(|id| sampling::sample_lebesgue_digits(system, depth, RandomStream::new(cfg.seed, id)))
            .collect::<Result<_>>()?,
        Measure::Xi => {
            let dist = dist.ok_or_else(|| RoeError::Config("--measure xi needs --dist".into()))?;
            (0..samples)
                .into_par_iter()
                .map(|id| {
                    let stream = RandomStream::new(cfg.seed, XI_STREAM_BASE + id);
                    Ok(sampling::sample_xi_digits(system, &dist, depth, stream)?.1)
                })
                .collect::<Result<_>>()?
        }
    };
    let pairs: Vec<(&DigitSeq, DiffDigitSeq)> = draws.iter().map(|d| (d, d.to_difference())).collect();
    let text = match cfg.format {
        Format::Json => json_doc(&json!({
            "system": system.name(),
            "measure": match measure { Measure::Lebesgue => "lebesgue", Measure::Xi => "xi" },
            "seed": cfg.seed,
            "depth": depth,
            "samples": pairs.iter().map(|(d, a)| json!({
                "digits": ints_json(d.digits()),
                "alphas": ints_json(a.alphas()),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::from("sample,digits,alphas\n");
            for (i, (d, a)) in pairs.iter().enumerate() {
                let _ = writeln!(out, "{i},{},{}", joined(d.digits(), " "), joined(a.alphas(), " "));
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for (d, a) in &pairs {
                let _ = writeln!(out, "digits {}  alphas {}", joined(d.digits(), " "), joined(a.alphas(), " "));
            }
            out
        }
    };
    Ok(Outcome::Done(text))
}

fn render_diagnosis(cfg: &CliConfig, diagnosis: &Diagnosis) -> String {
    let p = precision(cfg);
    match cfg.format {
        Format::Json => json_doc(&diagnosis.to_json(p)),
        Format::Csv => diagnosis.counts_csv(),
        Format::Text => {
            let f = &diagnosis.finiteness;
            let mut t = Table::new();
            t.row("system", f.system.as_str())
                .row("i0", f.params.i0.to_string())
                .row("window", format!("[{}, {}]", f.params.window.0, f.params.window.1))
                .row("samples", f.params.samples.to_string())
                .row("seed", f.params.seed.to_string())
                .row("l tail sum", text_rational(&f.l_tail.sum, p))
                .row("l tail verdict", format!("{:?}", f.l_tail.verdict))
                .row("lambda upper", text_rational(&f.lambda_upper, p))
                .row("lebesgue hits", text_rational(&f.lebesgue.hit_fraction(), p))
                .row("lebesgue mean count", text_rational(&f.lebesgue.mean(), p))
                .row("lambda side ok", f.lambda_side_ok.to_string())
                .row("p partial sum", text_rational(&diagnosis.borel_cantelli.partial_sum, p))
                .row("p verdict", format!("{:?}", diagnosis.borel_cantelli.verdict));
            if let Some(s) = &diagnosis.singularity {
                let xi = s.xi.as_ref().expect("singularity reports carry xi stats");
                t.row("mu exact", text_rational(s.mu_lower.as_ref().expect("mu present"), p))
                    .row("xi hits", text_rational(&xi.hit_fraction(), p))
                    .row("mu side ok", format!("{}", s.mu_side_ok.unwrap_or(false)))
                    .row("point mass", format!("{}", s.point_mass.unwrap_or(false)));
            }
            if let Some(msg) = &diagnosis.hypothesis_error {
                t.row("hypothesis", msg.as_str());
            }
            t.row("verdict", format!("{:?}", diagnosis.verdict));
            t.render()
        }
    }
}

fn cmd_diagnose(cfg: &CliConfig, system: &RoeSystem) -> Result<Outcome> {
    let samples = samples_or(cfg, experiments::DEFAULT_SAMPLES)?;
    let window = parse_window(cfg, experiments::DEFAULT_DEPTH)?;
    let dist = load_dist(cfg)?.unwrap_or_else(|| {
        SymbolDistribution::iid(SymbolLaw::geometric(ratio(1, 2)).expect("1/2 is a valid parameter"))
    });
    let params = ExperimentParams {
        i0: cfg.i0,
        window,
        samples,
        seed: cfg.seed,
    };
    let diagnosis = experiments::diagnose(system, &dist, &params)?;
    let text = render_diagnosis(cfg, &diagnosis);
    Ok(if diagnosis.hypothesis_error.is_some() {
        Outcome::Hypothesis(text)
    } else {
        Outcome::Done(text)
    })
}

fn cmd_validate(cfg: &CliConfig, n_max: usize, j_max: u64) -> Result<Outcome> {
    let system = selected_system(cfg)?;
    let (system, report) = system.validated(n_max, j_max)?;
    let text = match cfg.format {
        Format::Json => {
            let mut value = serde_json::to_value(&report).expect("report serializes");
            value["system"] = json!(system.name());
            value["monotone_verified"] = json!(system.monotone_verified());
            json_doc(&value)
        }
        Format::Text | Format::Csv => {
            let mut t = Table::new();
            t.row("system", system.name())
                .row("checked n", report.checked_range.0.to_string())
                .row("checked j", report.checked_range.1.to_string())
                .row("integral", report.integrality_ok.to_string())
                .row("monotone", report.h_monotone_in_j.to_string())
                .row("failures", report.failures.len().to_string());
            for f in report.failures.iter().take(10) {
                t.row("failure", format!("n = {}, j = {}: {:?}", f.n, f.j, f.reason));
            }
            if cfg.format == Format::Csv {
                t.csv()
            } else {
                t.render()
            }
        }
    };
    if report.integrality_ok {
        Ok(Outcome::Done(text))
    } else {
        Ok(Outcome::Hypothesis(text))
    }
}
