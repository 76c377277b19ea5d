//! `heavy`: command-line front end for heavy-core.
//!
//! Every output starts with the parsed configuration (a `config` object in
//! JSON, `#` lines in CSV), so a file is enough to reproduce it. Exit codes:
//! 0 success, 2 input error, 3 digit budget exhausted, 1 anything else.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heavy_core::cf_core::rational::{parse_rational, pow2_neg};
use heavy_core::cf_core::{parse_theta, CfError, ContinuedFraction, RatIntervalJson, Rational, RationalJson};
use heavy_core::dimension::{self, DimError};
use heavy_core::heavy_set::{self, Cover, HeavyError};
use heavy_core::oracle::{self, OracleError, Point, VerificationReport};
use heavy_core::renorm;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "heavy", version, about = "Heavy sets of circle rotations")]
struct Cli {
    /// Output format; `dim` defaults to csv, everything else to json.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Digits, convergents and an enclosure of θ.
    Cf(CfArgs),
    /// The renormalization trajectory θ_i = g^i(θ).
    Renorm(DepthArgs),
    /// Certified cover E_depth of the heavy set with its isolated points.
    Heavy(HeavyArgs),
    /// The strictly heavy point h*.
    Strict(StrictArgs),
    /// Truncated dimension ratios with certified bounds.
    Dim(DimArgs),
    /// Monte Carlo estimate of the almost-sure dimension constant c.
    Cconst(CconstArgs),
    /// θ whose heavy set has a prescribed dimension.
    TargetD(TargetArgs),
    /// Brute-force Birkhoff sums and checks against them.
    Oracle(OracleArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cf(_) => "cf",
            Command::Renorm(_) => "renorm",
            Command::Heavy(_) => "heavy",
            Command::Strict(_) => "strict",
            Command::Dim(_) => "dim",
            Command::Cconst(_) => "cconst",
            Command::TargetD(_) => "target-d",
            Command::Oracle(_) => "oracle",
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct CfArgs {
    /// θ descriptor, e.g. "[2;(2)]", "5/7", "e_minus_2", "random(1,256)".
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 20)]
    digits: usize,
    /// Enclosure width 2^-bits.
    #[arg(long, default_value_t = 64)]
    bits: u64,
}

#[derive(Args, Debug, Serialize)]
struct DepthArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 20)]
    depth: usize,
}

#[derive(Args, Debug, Serialize)]
struct HeavyArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Width of isolated point enclosures.
    #[arg(long, default_value = "1e-30")]
    point_tol: String,
    /// Exported endpoints are enclosed to 2^-bits.
    #[arg(long, default_value_t = heavy_set::EXPORT_BITS)]
    export_bits: u64,
}

#[derive(Args, Debug, Serialize)]
struct StrictArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value = "1e-9")]
    tol: String,
}

#[derive(Args, Debug, Serialize)]
struct DimArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 100)]
    depth: usize,
    /// Report a truncated estimate when digits run out instead of failing.
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Args, Debug, Serialize)]
struct CconstArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 50)]
    burnin: usize,
    #[arg(long, default_value_t = 300)]
    length: usize,
    #[arg(long, default_value_t = 4096)]
    bits: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also certify −log f1 > log f2 on this many random θ < 1/2.
    #[arg(long)]
    pointwise: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct TargetArgs {
    /// Target dimension in [0, 1], e.g. "1/2" or "0.9".
    #[arg(long)]
    d: String,
    #[arg(long, default_value_t = 10)]
    digits: usize,
    /// Index i at which the per-index ratio is reported.
    #[arg(long, default_value_t = 50)]
    index: usize,
}

#[derive(Args, Debug, Serialize)]
struct OracleArgs {
    #[command(subcommand)]
    op: OracleOp,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
enum OracleOp {
    /// S_1, ..., S_N at x.
    Birkhoff(PointArgs),
    /// First n <= N with S_n(x) below the threshold, if any.
    HeavyUpTo(HeavyUpToArgs),
    /// First-return structure on [0, δ).
    VerifyRenorm(RenormCheckArgs),
    /// Cover against brute force, built in process or read with --cover.
    VerifyLevels(LevelsCheckArgs),
    /// H_θ = 1/2 − H_g(θ) for a1 = 1.
    VerifyReversal(ReversalArgs),
    /// Heavy translates of h*.
    VerifyAlwaysInfinite(InfiniteArgs),
}

#[derive(Args, Debug, Serialize)]
struct PointArgs {
    #[arg(long)]
    theta: String,
    /// Rational start point in [0, 1).
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 1000)]
    n: u64,
}

#[derive(Args, Debug, Serialize)]
struct HeavyUpToArgs {
    #[command(flatten)]
    point: PointArgs,
    /// 0 for heavy, 1 for strictly heavy.
    #[arg(long, default_value_t = 0)]
    threshold: i64,
}

#[derive(Args, Debug, Serialize)]
struct RenormCheckArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 100)]
    samples: u64,
    #[arg(long, default_value_t = 1000)]
    n: u64,
}

#[derive(Args, Debug, Serialize)]
struct LevelsCheckArgs {
    /// Required unless the cover file names a parseable θ.
    #[arg(long)]
    theta: Option<String>,
    /// Depth of the in-process cover (default 4); a cover file carries its own.
    #[arg(long, conflicts_with = "cover")]
    depth: Option<usize>,
    /// Cover JSON written by `heavy heavy`.
    #[arg(long)]
    cover: Option<PathBuf>,
    /// Horizon; defaults to 10·q_{2·depth}, capped at 10^6.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 10)]
    grid_density: u64,
}

#[derive(Args, Debug, Serialize)]
struct ReversalArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 1000)]
    n: u64,
    #[arg(long, default_value_t = 200)]
    grid: u64,
}

#[derive(Args, Debug, Serialize)]
struct InfiniteArgs {
    #[arg(long)]
    theta: String,
    #[arg(long, default_value_t = 5)]
    count: usize,
    #[arg(long, default_value_t = 10_000)]
    n: u64,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Budget(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Budget(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<CfError> for CliError {
    fn from(e: CfError) -> Self {
        if e.is_budget() {
            CliError::Budget(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<HeavyError> for CliError {
    fn from(e: HeavyError) -> Self {
        match e {
            HeavyError::Cf(c) => c.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<DimError> for CliError {
    fn from(e: DimError) -> Self {
        if e.is_budget() {
            CliError::Budget(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Cf(c) => c.into(),
            OracleError::Precondition(m) => CliError::Input(m),
            a @ OracleError::Ambiguous { .. } => CliError::Runtime(a.to_string()),
        }
    }
}

/// What a subcommand produced. `budget` marks a partial result that is still
/// written out before exiting with code 3.
struct Output {
    json: Value,
    csv: String,
    budget: Option<String>,
}

impl Output {
    fn new(json: Value, csv: String) -> Self {
        Output { json, csv, budget: None }
    }
}

fn theta(s: &str) -> Result<ContinuedFraction, CliError> {
    parse_theta(s).map_err(|e| CliError::Input(e.to_string()))
}

fn rational(what: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).ok_or_else(|| CliError::Input(format!("bad {what}: {s:?}")))
}

fn rat_str(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn cmd_cf(a: &CfArgs) -> Result<Output, CliError> {
    let t = theta(&a.theta)?;
    let digits = t.digits(a.digits)?;
    let mut conv = Vec::new();
    let mut csv = String::from("k,a,p,q\n");
    let (mut p0, mut q0, mut p1, mut q1) = (BigUint::one(), BigUint::zero(), BigUint::zero(), BigUint::one());
    for (k, d) in digits.iter().enumerate() {
        let p = d * &p1 + &p0;
        let q = d * &q1 + &q0;
        (p0, q0) = (p1, q1);
        (p1, q1) = (p, q);
        let _ = writeln!(csv, "{},{d},{p1},{q1}", k + 1);
        conv.push(json!({ "p": p1.to_string(), "q": q1.to_string() }));
    }
    let width = pow2_neg(a.bits);
    let (enc, met) = t.enclose_best(&width)?;
    let periodic = t.periodic_form().map(|(pre, per)| {
        json!({
            "preperiod": pre.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "period": per.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        })
    });
    let exact = t.value_quadratic().ok().map(|q| q.to_string());
    let json = json!({
        "theta": t.descriptor(),
        "digits": digits.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "convergents": conv,
        "enclosure": RatIntervalJson::from(&enc),
        "enclosure_width_met": met,
        "periodic": periodic,
        "exact": exact,
    });
    Ok(Output::new(json, csv))
}

fn cmd_renorm(a: &DepthArgs) -> Result<Output, CliError> {
    let t = theta(&a.theta)?;
    let tr = renorm::trajectory(&t, a.depth);
    let mut csv = Vec::new();
    tr.write_csv(&mut csv).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut out = Output::new(json!({ "theta": t.descriptor(), "trajectory": tr.to_json() }), String::from_utf8(csv).unwrap());
    out.budget = tr.stopped.filter(CfError::is_budget).map(|e| e.to_string());
    Ok(out)
}

fn cmd_heavy(a: &HeavyArgs) -> Result<Output, CliError> {
    let t = theta(&a.theta)?;
    let tol = rational("tolerance", &a.point_tol)?;
    let levels = heavy_set::build_levels(&t, a.depth)?;
    let pts = heavy_set::isolated_points(&levels, &tol)?;
    let cover = levels.to_cover(&pts, a.export_bits);
    let mut csv = String::from("kind,level,index,lo,hi,parent\n");
    for l in &cover.levels {
        for (k, iv) in l.intervals.iter().enumerate() {
            let _ = writeln!(csv, "interval,{},{k},{},{},{}", l.i, rat_str(iv.hull.lo()), rat_str(iv.hull.hi()), iv.parent);
        }
    }
    for (k, p) in cover.isolated.iter().enumerate() {
        let _ = writeln!(csv, "isolated,{},{k},{},{},{}", p.birth, rat_str(p.enclosure.lo()), rat_str(p.enclosure.hi()), p.parent);
    }
    let mut out = Output::new(cover.to_json(), csv);
    out.budget = levels.partial.filter(CfError::is_budget).map(|e| e.to_string());
    Ok(out)
}

fn cmd_strict(a: &StrictArgs) -> Result<Output, CliError> {
    let t = theta(&a.theta)?;
    let tol = rational("tolerance", &a.tol)?;
    let r = heavy_set::strictly_heavy(&t, &tol)?;
    let csv = format!(
        "lo,hi,width,exact\n{},{},{},{}\n",
        rat_str(r.enclosure.lo()),
        rat_str(r.enclosure.hi()),
        rat_str(&r.width),
        r.exact.as_ref().map(|q| q.to_string()).unwrap_or_default()
    );
    let mut json = r.to_json();
    json["theta"] = json!(t.descriptor());
    let mut out = Output::new(json, csv);
    out.budget = r.partial.filter(CfError::is_budget).map(|e| e.to_string());
    Ok(out)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_else(|| "none".into())
}

fn cmd_dim(a: &DimArgs) -> Result<Output, CliError> {
    let t = theta(&a.theta)?;
    let e = dimension::dim_estimate(&t, a.depth, a.allow_partial)?;
    let mut csv = format!(
        "# running_inf={}\n# periodic_limit={}\n# irregular={}\n",
        fmt_opt(e.running_inf),
        fmt_opt(e.periodic_limit),
        e.irregular
    );
    if let Some(p) = &e.partial {
        let _ = writeln!(csv, "# partial={p}");
    }
    let mut body = Vec::new();
    e.write_csv(&mut body).map_err(|err| CliError::Runtime(err.to_string()))?;
    csv.push_str(&String::from_utf8(body).unwrap());
    let mut out = Output::new(serde_json::to_value(&e).unwrap(), csv);
    out.budget = e.partial.clone();
    Ok(out)
}

fn cmd_cconst(a: &CconstArgs) -> Result<Output, CliError> {
    let c = dimension::estimate_c(a.samples, a.burnin, a.length, a.bits, a.seed)?;
    let mut csv = String::from("mean,half_width,ci_low,ci_high,samples,used,dropped,burnin,length,bits,seed\n");
    let _ = writeln!(
        csv,
        "{:e},{:e},{:e},{:e},{},{},{},{},{},{},{}",
        c.mean, c.half_width, c.ci_low, c.ci_high, c.samples, c.used, c.dropped, c.burnin, c.length, c.bits, c.seed
    );
    let mut json = json!({ "estimate": c.to_json() });
    if let Some(n) = a.pointwise {
        let p = dimension::pointwise_inequality_check(n, a.seed);
        let _ = writeln!(csv, "# pointwise checked={} passed={} failed={} undecided={}", p.checked, p.passed, p.failed, p.undecided);
        json["pointwise"] = serde_json::to_value(&p).unwrap();
    }
    Ok(Output::new(json, csv))
}

fn cmd_target(a: &TargetArgs) -> Result<Output, CliError> {
    let d = rational("dimension", &a.d)?;
    let t = dimension::theta_for_dimension(&d)?;
    let digits = t.digits(a.digits)?;
    let ratio = if d > Rational::from_integer(0.into()) { Some(dimension::target_ratio(&d, a.index)?) } else { None };
    let mut csv = String::from("k,a\n");
    for (k, x) in digits.iter().enumerate() {
        let _ = writeln!(csv, "{},{x}", k + 1);
    }
    let _ = write!(csv, "# index_ratio={}\n", fmt_opt(ratio));
    let json = json!({
        "d": RationalJson::from(&d),
        "theta": t.descriptor(),
        "digits": digits.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "index": a.index,
        "index_ratio": ratio,
    });
    Ok(Output::new(json, csv))
}

fn report(r: VerificationReport) -> Output {
    let csv = format!(
        "claim,checked,passed,failed,ambiguous,inconclusive\n\"{}\",{},{},{},{},{}\n",
        r.claim, r.checked, r.passed, r.failed, r.ambiguous, r.inconclusive
    );
    Output::new(r.to_json(), csv)
}

fn cmd_oracle(a: &OracleArgs) -> Result<Output, CliError> {
    match &a.op {
        OracleOp::Birkhoff(p) => {
            let t = theta(&p.theta)?;
            let x = Point::rational(rational("x", &p.x)?);
            let s = oracle::birkhoff(&x, &t, p.n)?;
            let mut csv = String::from("n,S_n\n");
            for (i, v) in s.sums.iter().enumerate() {
                let _ = writeln!(csv, "{},{v}", i + 1);
            }
            Ok(Output::new(serde_json::to_value(&s).unwrap(), csv))
        }
        OracleOp::HeavyUpTo(h) => {
            let t = theta(&h.point.theta)?;
            let x = Point::rational(rational("x", &h.point.x)?);
            let v = oracle::heavy_up_to_threshold(&x, &t, h.point.n, h.threshold)?;
            let csv = match &v {
                oracle::HeavyVerdict::Heavy { horizon, min_prefix } => format!("heavy,horizon,min_prefix\ntrue,{horizon},{min_prefix}\n"),
                oracle::HeavyVerdict::Fails { first_failure_n } => format!("heavy,first_failure_n\nfalse,{first_failure_n}\n"),
            };
            let mut json = serde_json::to_value(&v).unwrap();
            json["heavy"] = json!(v.is_heavy());
            Ok(Output::new(json, csv))
        }
        OracleOp::VerifyRenorm(r) => Ok(report(oracle::verify_renormalization(&theta(&r.theta)?, r.samples, r.n)?)),
        OracleOp::VerifyLevels(l) => {
            let rep = match &l.cover {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    // accept both a bare cover and a `heavy` output document
                    let body = doc.get("result").unwrap_or(&doc);
                    let cover = Cover::from_json(body)?;
                    let t = match &l.theta {
                        Some(s) => theta(s)?,
                        None => theta(&cover.theta)?,
                    };
                    oracle::verify_levels(&t, &cover, l.n, l.grid_density)?
                }
                None => {
                    let s = l.theta.as_deref().ok_or_else(|| CliError::Input("verify-levels needs --theta or --cover".into()))?;
                    oracle::verify_levels_for(&theta(s)?, l.depth.unwrap_or(4), l.n, l.grid_density)?
                }
            };
            Ok(report(rep))
        }
        OracleOp::VerifyReversal(r) => Ok(report(oracle::verify_reversal(&theta(&r.theta)?, r.n, r.grid)?)),
        OracleOp::VerifyAlwaysInfinite(i) => Ok(report(oracle::verify_always_infinite(&theta(&i.theta)?, i.count, i.n)?)),
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Cf(a) => cmd_cf(a),
        Command::Renorm(a) => cmd_renorm(a),
        Command::Heavy(a) => cmd_heavy(a),
        Command::Strict(a) => cmd_strict(a),
        Command::Dim(a) => cmd_dim(a),
        Command::Cconst(a) => cmd_cconst(a),
        Command::TargetD(a) => cmd_target(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

fn config(cli: &Cli, format: Format) -> Value {
    let mut c = serde_json::to_value(&cli.command).unwrap();
    c["format"] = json!(format);
    c["version"] = json!(env!("CARGO_PKG_VERSION"));
    c
}

/// `# key=value` lines for every scalar in the config, nested keys dotted.
fn csv_header(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                csv_header(&key, x, out);
            }
        }
        Value::String(s) => {
            let _ = writeln!(out, "# {prefix}={s}");
        }
        other => {
            let _ = writeln!(out, "# {prefix}={other}");
        }
    }
}

fn render(cli: &Cli, out: &Output) -> String {
    let format = cli.format.unwrap_or(match cli.command {
        Command::Dim(_) => Format::Csv,
        _ => Format::Json,
    });
    let cfg = config(cli, format);
    match format {
        Format::Json => {
            let doc = json!({ "config": cfg, "result": out.json });
            serde_json::to_string_pretty(&doc).unwrap() + "\n"
        }
        Format::Csv => {
            let mut s = String::new();
            csv_header("", &cfg, &mut s);
            s.push_str(&out.csv);
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("heavy {}: {}", cli.command.name(), e.message());
            return ExitCode::from(e.code());
        }
    };
    let text = render(&cli, &out);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return ExitCode::SUCCESS;
        }
        eprintln!("heavy: {e}");
        return ExitCode::from(1);
    }
    if let Some(b) = &out.budget {
        eprintln!("heavy {}: partial result, {b}", cli.command.name());
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
