//! Command-line front end: source documents, weight files, CSV and run
//! records, and the `info`, `region`, `sumrate`, `simulate` and `check`
//! commands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use crate::codec::{self, CodeParams, CodecError, Event};
use crate::measures::{
    attach_channel, cond_entropy, entropy, mutual_info, Alphabet, AuxChannel, JointPmf, MeasureError, Var,
};
use crate::regions::inner_region;
use crate::search::{
    self, check_special_case, closed_form_sum_rate, CheckOptions, ClosedForm, SearchConfig, SearchError,
    SweepResult, Theorem, Weights,
};
use crate::sources::{self, SOURCE_VARS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed source document: {0}")]
    Syntax(String),
    #[error("field `{field}`: {msg}")]
    Field { field: String, msg: String },
    #[error("field `pmf`: expected {expected} entries for the given alphabets, found {actual}")]
    Length { expected: usize, actual: usize },
    #[error("weights file line {line}: {msg}")]
    Weights { line: usize, msg: String },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Search(SearchError::InvalidConfig(_) | SearchError::InvalidWeights(_)) => EXIT_USAGE,
            CliError::Codec(CodecError::Params(_)) => EXIT_USAGE,
            _ => EXIT_INPUT,
        }
    }
}

fn field(field: &str, msg: impl Into<String>) -> CliError {
    CliError::Field { field: field.into(), msg: msg.into() }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    alphabets: Option<BTreeMap<String, usize>>,
    pmf: Option<Vec<f64>>,
    preset: Option<RawPreset>,
    #[serde(default)]
    compdel: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPreset {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// A validated source over `(X, Y, U, V)` and a short description of where it
/// came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub source: JointPmf,
    pub origin: String,
}

impl SourceSpec {
    pub fn sizes(&self) -> Vec<usize> {
        self.source.sizes()
    }

    pub fn pmf(&self) -> &[f64] {
        self.source.probs()
    }
}

pub const PRESETS: [&str; 6] = ["dsbs", "compdel-dsbs", "sgarro", "markov-dsbs", "degraded", "constant"];

fn param(p: &RawPreset, key: &str, default: Option<f64>) -> Result<f64, CliError> {
    let v = match (p.params.get(key), default) {
        (Some(&v), _) => v,
        (None, Some(d)) => d,
        (None, None) => return Err(field(&format!("preset.params.{key}"), "missing")),
    };
    if !(0.0..=1.0).contains(&v) {
        return Err(field(&format!("preset.params.{key}"), format!("{v} is not a probability")));
    }
    Ok(v)
}

/// Expands a named preset to its explicit source.
pub fn expand_preset(p: &RawPreset) -> Result<SourceSpec, CliError> {
    let known: &[&str] = match p.name.as_str() {
        "dsbs" | "compdel-dsbs" | "markov-dsbs" => &["q"],
        "sgarro" => &["qu", "qv"],
        "degraded" => &["q", "qu"],
        "constant" => &[],
        other => {
            return Err(field("preset.name", format!("unknown preset {other:?}; expected one of {}", PRESETS.join(", "))))
        }
    };
    if let Some(k) = p.params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(field(&format!("preset.params.{k}"), format!("not a parameter of {}", p.name)));
    }
    let source = match p.name.as_str() {
        "dsbs" => sources::dsbs(param(p, "q", None)?)?,
        "compdel-dsbs" => sources::compdel_dsbs(param(p, "q", None)?)?,
        "markov-dsbs" => sources::markov_dsbs(param(p, "q", None)?)?,
        "sgarro" => sources::sgarro(param(p, "qu", None)?, param(p, "qv", None)?)?,
        "degraded" => sources::degraded(param(p, "q", None)?, param(p, "qu", None)?)?,
        _ => sources::constant(),
    };
    let args: Vec<String> = p.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    Ok(SourceSpec { source, origin: format!("{}({})", p.name, args.join(", ")) })
}

/// Parses a source document:
///
/// ```text
/// alphabets: {X: 2, Y: 2, U: 1, V: 1}
/// pmf: [0.375, 0.125, 0.125, 0.375]
/// ```
///
/// or `preset: {name: dsbs, params: {q: 0.25}}`. `compdel: true` replaces
/// `U` and `V` with `Y` and `X`.
pub fn parse_source(text: &str) -> Result<SourceSpec, CliError> {
    let raw: RawSource = serde_yaml::from_str(text).map_err(|e| CliError::Syntax(e.to_string()))?;
    let mut spec = match (raw.preset, raw.alphabets, raw.pmf) {
        (Some(p), None, None) => expand_preset(&p)?,
        (Some(_), _, _) => return Err(field("preset", "cannot be combined with `alphabets` or `pmf`")),
        (None, Some(alpha), Some(pmf)) => explicit(&alpha, pmf)?,
        (None, None, _) => return Err(field("alphabets", "missing (or give a `preset`)")),
        (None, Some(_), None) => return Err(field("pmf", "missing")),
    };
    if raw.compdel {
        spec = SourceSpec {
            source: sources::complementary_delivery(&spec.source.marginal(&[Var::X, Var::Y])?)?,
            origin: format!("compdel({})", spec.origin),
        };
    }
    Ok(spec)
}

fn explicit(alpha: &BTreeMap<String, usize>, pmf: Vec<f64>) -> Result<SourceSpec, CliError> {
    let mut sizes = [0usize; 4];
    for (name, &size) in alpha {
        let var: Var = name.parse().map_err(|_| field(&format!("alphabets.{name}"), "expected X, Y, U or V"))?;
        let Some(i) = SOURCE_VARS.iter().position(|&v| v == var) else {
            return Err(field(&format!("alphabets.{name}"), "expected X, Y, U or V"));
        };
        if size == 0 {
            return Err(field(&format!("alphabets.{name}"), "size must be at least 1"));
        }
        sizes[i] = size;
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(field(&format!("alphabets.{}", SOURCE_VARS[i]), "missing"));
    }
    let expected = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
    match expected {
        Some(e) if e == pmf.len() => {}
        Some(e) => return Err(CliError::Length { expected: e, actual: pmf.len() }),
        None => return Err(field("alphabets", "alphabet product overflows")),
    }
    let source = sources::from_table(sizes, pmf).map_err(|e| match e {
        MeasureError::Invalid(v) => field("pmf", v.to_string()),
        other => other.into(),
    })?;
    Ok(SourceSpec { source, origin: "explicit".into() })
}

/// Parses one weight vector per line, `l0 l1 l2` separated by commas or
/// whitespace. Blank lines and `#` comments are skipped.
pub fn parse_weights(text: &str) -> Result<Vec<Weights>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CliError::Weights { line: i + 1, msg };
        let parts: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if parts.len() != 3 {
            return Err(err(format!("expected 3 weights, found {}", parts.len())));
        }
        let mut w = [0.0; 3];
        for (slot, p) in w.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| err(format!("{p:?} is not a number")))?;
        }
        out.push(Weights::new(w[0], w[1], w[2]).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}

/// `%.{sig}g`-style formatting: `sig` significant digits, trailing zeros
/// trimmed, exponent form outside `[1e-5, 10^sig)`.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g12(x: f64) -> String {
    fmt_sig(x, 12)
}

pub const CSV_HEADER: &str = "lambda0,lambda1,lambda2,value_bits,r0,r1,r2,channel_id";

/// Sweep rows as CSV, preceded by `# key: value` lines describing the run.
pub fn sweep_csv(result: &SweepResult, meta: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let w = row.weights.as_array();
        let t = row.optimum.triple;
        let cells = [w[0], w[1], w[2], row.optimum.value, t.r0, t.r1, t.r2].map(g12);
        let _ = writeln!(out, "{},{}", cells.join(","), search::channel_id(&row.optimum.channel));
    }
    out
}

fn pmf_string(p: &[f64]) -> String {
    let cells: Vec<String> = p.iter().map(|&x| g12(x)).collect();
    format!("[{}]", cells.join(", "))
}

fn source_meta(spec: &SourceSpec) -> Vec<(String, String)> {
    let sizes = spec.sizes();
    vec![
        ("tool".into(), format!("gwsi {}", env!("CARGO_PKG_VERSION"))),
        ("source".into(), spec.origin.clone()),
        ("alphabets".into(), format!("{{X: {}, Y: {}, U: {}, V: {}}}", sizes[0], sizes[1], sizes[2], sizes[3])),
        ("pmf".into(), pmf_string(spec.pmf())),
    ]
}

fn search_meta(cfg: &SearchConfig) -> Vec<(String, String)> {
    let cap = |c: Option<usize>| c.map_or("default".to_string(), |c| c.to_string());
    vec![
        ("grid".into(), cfg.grid.to_string()),
        ("w_card".into(), cap(cfg.w_card)),
        ("a_card".into(), cap(cfg.a_card)),
        ("b_card".into(), cap(cfg.b_card)),
        ("refine_iters".into(), cfg.refine_iters.to_string()),
        ("seed".into(), cfg.seed.to_string()),
    ]
}

#[derive(Debug, Parser)]
#[command(name = "gwsi", version, about = "Rate-region bounds and random-binning simulation for the Gray-Wyner network with side information")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print entropies, conditional entropies and mutual informations.
    Info(SourceArgs),
    /// Trace the lower boundary of a region with a weight sweep (CSV).
    Region(RegionArgs),
    /// Minimal sum rate, optionally against a closed form.
    Sumrate(SumrateArgs),
    /// Monte Carlo simulation of the random-binning code.
    Simulate(SimulateArgs),
    /// Special-case agreement checks and invariant suites.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Source document.
    #[arg(long, conflicts_with = "preset")]
    pub source: Option<PathBuf>,
    /// Named preset instead of a document.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub qu: Option<f64>,
    #[arg(long)]
    pub qv: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 8)]
    pub grid: u32,
    #[arg(long)]
    pub wcard: Option<usize>,
    #[arg(long)]
    pub acard: Option<usize>,
    #[arg(long)]
    pub bcard: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Allow caps above the cardinality bounds.
    #[arg(long)]
    pub override_caps: bool,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            w_card: self.wcard,
            a_card: self.acard,
            b_card: self.bcard,
            grid: self.grid,
            refine_iters: self.refine,
            seed: self.seed,
            allow_cap_override: self.override_caps,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gw,
    Inner,
    Outer,
    Star,
    Starstar,
}

impl From<FamilyArg> for search::BoundFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gw => search::BoundFamily::Gw,
            FamilyArg::Inner => search::BoundFamily::Inner,
            FamilyArg::Outer => search::BoundFamily::Outer,
            FamilyArg::Star => search::BoundFamily::Star,
            FamilyArg::Starstar => search::BoundFamily::StarStar,
        }
    }
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, value_enum, default_value_t = FamilyArg::Inner)]
    pub family: FamilyArg,
    /// One `l0 l1 l2` per line; defaults to the sum rate only.
    #[arg(long)]
    pub weights_file: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a matplotlib script that plots the CSV.
    #[arg(long)]
    pub plot_script: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Markov,
    Sgarro,
    Compdel,
}

impl From<CaseArg> for ClosedForm {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Markov => ClosedForm::Markov,
            CaseArg::Sgarro => ClosedForm::Sgarro,
            CaseArg::Compdel => ClosedForm::Compdel,
        }
    }
}

#[derive(Debug, Args)]
pub struct SumrateArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, value_enum, default_value_t = FamilyArg::Inner)]
    pub family: FamilyArg,
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    /// Agreement tolerance against the closed form.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    /// `W = (X, Y)`.
    Xy,
    /// `W = X`.
    X,
    /// `W = Y`.
    Y,
    /// `W` constant.
    Constant,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    #[arg(long, value_enum, default_value_t = ChannelArg::Xy)]
    pub channel: ChannelArg,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bin rates `r0,r1,r2`; default 10% (plus 0.05) above the inner corner.
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
    /// Codebook rates `r0p,r1p,r2p`; default `I(X,Y;W), H(X), H(Y)` plus 0.2.
    #[arg(long, value_delimiter = ',')]
    pub codebook_rates: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    XyEqual,
    Degraded,
    Compdel,
    Star,
    Starstar,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::XyEqual => Theorem::XyEqual,
            TheoremArg::Degraded => Theorem::Degraded,
            TheoremArg::Compdel => Theorem::Compdel,
            TheoremArg::Star => Theorem::Star,
            TheoremArg::Starstar => Theorem::StarStar,
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Theorem to check; by default every one whose hypothesis holds.
    #[arg(long, value_enum)]
    pub theorem: Option<TheoremArg>,
    #[arg(long)]
    pub weights_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut String) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, text),
        None => {
            stdout.push_str(text);
            Ok(())
        }
    }
}

fn load_source(a: &SourceArgs) -> Result<SourceSpec, CliError> {
    match (&a.source, &a.preset) {
        (Some(path), None) => parse_source(&read(path)?),
        (None, Some(name)) => {
            let mut params = BTreeMap::new();
            for (k, v) in [("q", a.q), ("qu", a.qu), ("qv", a.qv)] {
                if let Some(v) = v {
                    params.insert(k.to_string(), v);
                }
            }
            expand_preset(&RawPreset { name: name.clone(), params }).map_err(|e| CliError::Usage(e.to_string()))
        }
        _ => Err(CliError::Usage("give exactly one of --source or --preset".into())),
    }
}

fn load_weights(path: Option<&PathBuf>) -> Result<Vec<Weights>, CliError> {
    match path {
        Some(p) => {
            let w = parse_weights(&read(p)?)?;
            if w.is_empty() {
                return Err(CliError::Weights { line: 0, msg: "no weight vectors".into() });
            }
            Ok(w)
        }
        None => Ok(vec![Weights::SUM]),
    }
}

/// Text output and exit code of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let mut stdout = String::new();
    let code = match cli.command {
        Command::Info(a) => {
            info(&load_source(&a)?, &mut stdout)?;
            EXIT_OK
        }
        Command::Region(a) => region(&a, &mut stdout)?,
        Command::Sumrate(a) => sumrate(&a, &mut stdout)?,
        Command::Simulate(a) => simulate(&a, &mut stdout)?,
        Command::Check(a) => check(&a, &mut stdout)?,
    };
    Ok(Outcome { stdout, code })
}

/// Parses `args` (including the program name) and runs them. Errors are
/// reported on stderr and mapped to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(o) => {
            print!("{}", o.stdout);
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn info(spec: &SourceSpec, out: &mut String) -> Result<(), CliError> {
    let s = &spec.source;
    let sizes = spec.sizes();
    let _ = writeln!(out, "source: {}", spec.origin);
    let _ = writeln!(out, "alphabets: X={} Y={} U={} V={}", sizes[0], sizes[1], sizes[2], sizes[3]);
    for v in SOURCE_VARS {
        let _ = writeln!(out, "H({v}) = {:.6}", entropy(s, &[v])?);
    }
    let _ = writeln!(out, "H(X,Y) = {:.6}", entropy(s, &[Var::X, Var::Y])?);
    for a in SOURCE_VARS {
        for b in SOURCE_VARS {
            if a != b {
                let _ = writeln!(out, "H({a}|{b}) = {:.6}", cond_entropy(s, &[a], &[b])?);
            }
        }
    }
    for (i, a) in SOURCE_VARS.iter().enumerate() {
        for b in &SOURCE_VARS[i + 1..] {
            let _ = writeln!(out, "I({a};{b}) = {:.6}", mutual_info(s, &[*a], &[*b])?);
        }
    }
    Ok(())
}

const PLOT_STUB: &str = r##"# Plots the attaining rate triples of a gwsi region sweep.
import sys

import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv(sys.argv[1] if len(sys.argv) > 1 else "{csv}", comment="#")
fig = plt.figure()
ax = fig.add_subplot(projection="3d")
ax.scatter(df.r0, df.r1, df.r2)
ax.set_xlabel("R0")
ax.set_ylabel("R1")
ax.set_zlabel("R2")
plt.show()
"##;

fn region(a: &RegionArgs, stdout: &mut String) -> Result<i32, CliError> {
    let spec = load_source(&a.src)?;
    let weights = load_weights(a.weights_file.as_ref())?;
    let cfg = a.search.config();
    let result = search::sweep_boundary(&spec.source, a.family.into(), &weights, &cfg)?;
    let mut meta = source_meta(&spec);
    meta.push(("family".into(), search::BoundFamily::from(a.family).to_string()));
    meta.extend(search_meta(&cfg));
    emit(a.out.as_deref(), &sweep_csv(&result, &meta), stdout)?;
    if let Some(p) = &a.plot_script {
        let csv = a.out.as_ref().map_or("sweep.csv".to_string(), |o| o.display().to_string());
        write(p, &PLOT_STUB.replace("{csv}", &csv))?;
    }
    Ok(EXIT_OK)
}

fn sumrate(a: &SumrateArgs, out: &mut String) -> Result<i32, CliError> {
    let spec = load_source(&a.src)?;
    let cfg = a.search.config();
    let family: search::BoundFamily = a.family.into();
    let opt = search::min_weighted(&spec.source, family, &Weights::SUM, &cfg)?;
    let _ = writeln!(out, "family: {family}");
    let _ = writeln!(out, "grid: {}", cfg.grid);
    let _ = writeln!(out, "min_sum_rate: {}", g12(opt.value));
    let _ = writeln!(out, "triple: {}", opt.triple);
    let _ = writeln!(out, "channel: {}", search::describe_channel(&opt.channel));
    let Some(case) = a.case else {
        return Ok(EXIT_OK);
    };
    let closed = closed_form_sum_rate(case.into(), &spec.source)?;
    let gap = opt.value - closed;
    let pass = gap.abs() <= a.tol;
    let _ = writeln!(out, "closed_form ({}): {}", ClosedForm::from(case), g12(closed));
    let _ = writeln!(out, "gap: {}", g12(gap));
    let _ = writeln!(out, "{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// The deterministic channels offered by `simulate`.
pub fn named_channel(source: &JointPmf, which: ChannelArg) -> Result<AuxChannel, CliError> {
    let (nx, ny) = (source.card(Var::X)?, source.card(Var::Y)?);
    let inputs = vec![Alphabet::new(Var::X, nx), Alphabet::new(Var::Y, ny)];
    let ch = match which {
        ChannelArg::Xy => AuxChannel::deterministic(inputs, Alphabet::new(Var::W, nx * ny), |i| i[0] * ny + i[1])?,
        ChannelArg::X => AuxChannel::deterministic(inputs, Alphabet::new(Var::W, nx), |i| i[0])?,
        ChannelArg::Y => AuxChannel::deterministic(inputs, Alphabet::new(Var::W, ny), |i| i[1])?,
        ChannelArg::Constant => AuxChannel::constant(inputs, Var::W),
    };
    Ok(ch)
}

fn triple_arg(v: &Option<Vec<f64>>, flag: &str) -> Result<Option<[f64; 3]>, CliError> {
    match v {
        None => Ok(None),
        Some(v) if v.len() == 3 => Ok(Some([v[0], v[1], v[2]])),
        Some(v) => Err(CliError::Usage(format!("{flag} takes 3 values, got {}", v.len()))),
    }
}

/// Rates used by `simulate` when none are given: codebook rates `0.2` above
/// `I(X,Y;W)`, `H(X)`, `H(Y)`, and bin rates 10% plus `0.05` above the inner
/// corner, never above the codebook rates.
pub fn default_rates(source: &JointPmf, ch: &AuxChannel) -> Result<([f64; 3], [f64; 3]), CliError> {
    use Var::*;
    let joint = attach_channel(source, ch)?;
    let corner = inner_region(&joint).map_err(SearchError::from)?.as_corner().expect("inner region is a corner");
    let codebook = [
        mutual_info(&joint, &[X, Y], &[W])? + 0.2,
        entropy(&joint, &[X])? + 0.2,
        entropy(&joint, &[Y])? + 0.2,
    ];
    let c = corner.as_array();
    let bins = [0, 1, 2].map(|i| (1.1 * c[i] + 0.05).min(codebook[i]));
    Ok((bins, codebook))
}

/// Flat `key: value` record of a simulation, including everything needed to
/// replay it.
pub fn sim_record(
    spec: &SourceSpec,
    channel: ChannelArg,
    params: &CodeParams,
    trials: u64,
    outcome: &codec::SimOutcome,
) -> String {
    let mut out = String::new();
    for (k, v) in source_meta(spec) {
        let _ = writeln!(out, "{k}: {v}");
    }
    let ch = format!("{channel:?}").to_lowercase();
    let fields: Vec<(&str, String)> = vec![
        ("channel", ch),
        ("n", params.n.to_string()),
        ("rate0p", g12(params.rate0p)),
        ("rate1p", g12(params.rate1p)),
        ("rate2p", g12(params.rate2p)),
        ("rate0", g12(params.rate0)),
        ("rate1", g12(params.rate1)),
        ("rate2", g12(params.rate2)),
        ("epsilon", g12(params.epsilon)),
        ("seed", params.seed.to_string()),
        ("trials", trials.to_string()),
        ("err_x", outcome.err_x.to_string()),
        ("err_y", outcome.err_y.to_string()),
        ("pe_x", g12(outcome.pe_x())),
        ("pe_y", g12(outcome.pe_y())),
        ("pe", g12(outcome.pe())),
    ];
    for (k, v) in fields {
        let _ = writeln!(out, "{k}: {v}");
    }
    for e in Event::ALL {
        let _ = writeln!(out, "{}: {}", e, outcome.count(e));
    }
    out
}

fn simulate(a: &SimulateArgs, stdout: &mut String) -> Result<i32, CliError> {
    let spec = load_source(&a.src)?;
    let ch = named_channel(&spec.source, a.channel)?;
    let (bins, books) = default_rates(&spec.source, &ch)?;
    let bins = triple_arg(&a.rates, "--rates")?.unwrap_or(bins);
    let books = triple_arg(&a.codebook_rates, "--codebook-rates")?.unwrap_or(books);
    let params = CodeParams {
        n: a.n,
        rate0p: books[0],
        rate1p: books[1],
        rate2p: books[2],
        rate0: bins[0],
        rate1: bins[1],
        rate2: bins[2],
        epsilon: a.epsilon,
        seed: a.seed,
    };
    let outcome = codec::simulate(&spec.source, &ch, &params, a.trials)?;
    emit(a.out.as_deref(), &sim_record(&spec, a.channel, &params, a.trials, &outcome), stdout)?;
    Ok(EXIT_OK)
}

fn check(a: &CheckArgs, out: &mut String) -> Result<i32, CliError> {
    let spec = load_source(&a.src)?;
    let cfg = a.search.config();
    let mut opts = CheckOptions::new(cfg.clone());
    opts.tol = a.tol;
    if a.weights_file.is_some() {
        opts.sweep = load_weights(a.weights_file.as_ref())?;
    }
    let theorems: Vec<Theorem> = match a.theorem {
        Some(t) => vec![t.into()],
        None => Theorem::ALL.into_iter().filter(|t| hypothesis_holds(*t, &spec.source)).collect(),
    };
    let mut pass = true;
    for t in theorems {
        let report = check_special_case(t, &spec.source, &opts)?;
        pass &= report.pass();
        let _ = writeln!(out, "{report}");
    }
    let mut weights = vec![Weights::SUM];
    weights.extend(opts.sweep.iter().copied());
    for w in weights {
        let outer = search::min_weighted(&spec.source, search::BoundFamily::Outer, &w, &cfg)?.value;
        let inner = search::min_weighted(&spec.source, search::BoundFamily::Inner, &w, &cfg)?.value;
        let ok = outer <= inner + 1e-9;
        pass &= ok;
        let _ = writeln!(
            out,
            "sandwich {w}: outer={outer:.6} inner={inner:.6} {}",
            if ok { "ok" } else { "FAIL" }
        );
    }
    let _ = writeln!(out, "{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn hypothesis_holds(t: Theorem, source: &JointPmf) -> bool {
    let probe = CheckOptions { cfg: SearchConfig::with_grid(1), sweep: Vec::new(), tol: f64::INFINITY };
    // A grid-1 check is cheap and fails fast on the hypothesis.
    !matches!(check_special_case(t, source, &probe), Err(SearchError::Hypothesis(_)))
}

/// Reads `GWSI_THREADS` (0 or unset means one worker per core) and sizes the
/// global thread pool.
pub fn init_threads() -> Result<(), CliError> {
    let n = match std::env::var("GWSI_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("GWSI_THREADS={v:?} is not a count")))?,
        Err(_) => 0,
    };
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
