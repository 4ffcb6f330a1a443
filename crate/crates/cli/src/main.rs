//! `aztec-lshape`: exact counts, asymptotic regimes, Tracy-Widom values and
//! random tilings of L-shaped Aztec diamonds.
//!
//! Every flag can also be read from a JSON object passed with
//! `--config FILE`; its keys are flag names (`max_exact_cells` and
//! `max-exact-cells` both work) and flags given on the command line win.
//! The thread count of the parallel loops is read from
//! `AZTEC_LSHAPE_THREADS`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use aztec_lshape::exact::{count, count_auto, Method};
use aztec_lshape::experiment::{
    fmt_sig, run_figure3, run_sweep, write_csv, Figure3Panel, IndexRule, SweepConfig,
};
use aztec_lshape::painleve::PainleveSolution;
use aztec_lshape::regimes::{identity_checks, regime_dispatch, regime_estimate, Regime};
use aztec_lshape::regions::{build_region, RegionSpec, Variant};
use aztec_lshape::saddles::{kappa2, saddle_data, solve_z0, PhaseParams};
use aztec_lshape::sampler::{estimate_frozen_probability, sample_tiling};
use aztec_lshape::{Error, Exec, Result, Weight};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const THREADS_VAR: &str = "AZTEC_LSHAPE_THREADS";

#[derive(Parser)]
#[command(name = "aztec-lshape", version, about)]
struct Cli {
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact weighted count of a region.
    Exact(ExactArgs),
    /// Asymptotic prediction of log F in one regime or the dispatched one.
    Asym(AsymArgs),
    /// Saddle-point data for (mu, a) and, given kappa, the liquid point z0.
    Saddle(SaddleArgs),
    /// Tracy-Widom log-distribution at a point or on a table.
    Tw(TwArgs),
    /// Residuals of the integral identities linking the regime constants.
    Identities(IdentityArgs),
    /// Residuals of exact against predicted log F along a family of N.
    Figure3(Figure3Args),
    /// Exact against dispatched asymptotics over a parameter grid.
    Sweep(SweepArgs),
    /// One random tiling of the Aztec diamond.
    Sample(SampleArgs),
    /// Monte-Carlo estimate of the frozen-corner probability.
    Mc(McArgs),
    /// Region cells as JSON or its outline as SVG.
    Region(RegionArgs),
}

#[derive(Args)]
struct Shape {
    #[arg(long = "N")]
    n: u32,
    /// Integer or a fraction of N such as `0.7N`.
    #[arg(long, default_value = "0")]
    m: IndexRule,
    #[arg(long, default_value = "0")]
    k: IndexRule,
    #[arg(long, default_value_t = 1)]
    eps: u8,
    /// Defaults to the variant selected by `eps`.
    #[arg(long)]
    variant: Option<Variant>,
}

impl Shape {
    fn indices(&self) -> Result<(u32, u32)> {
        let to_u32 = |v: i64, name: &str| {
            u32::try_from(v).map_err(|_| Error::Parameter(format!("{name} = {v} must be non-negative")))
        };
        Ok((to_u32(self.m.resolve(self.n), "m")?, to_u32(self.k.resolve(self.n), "k")?))
    }

    fn spec(&self) -> Result<RegionSpec> {
        let (m, k) = self.indices()?;
        let (m, k) = (m as i32, k as i32);
        let spec = match self.variant {
            None => RegionSpec::for_epsilon(self.n, m, k, self.eps)?,
            Some(Variant::Full) => RegionSpec::full(self.n),
            Some(Variant::Reduced) => RegionSpec::reduced(self.n, m, k),
            Some(Variant::ReducedTilde) => RegionSpec::tilde(self.n, m, k),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Enumerate,
    Determinant,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    shape: Shape,
    /// Vertical weight as `p/q`, integer or decimal.
    #[arg(long, default_value = "1")]
    a: Weight,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
}

#[derive(Args)]
struct AsymArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long, default_value = "1")]
    a: Weight,
    /// `auto`, a regime number 1-4 or its label.
    #[arg(long, default_value = "auto")]
    regime: String,
}

#[derive(Args)]
struct SaddleArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value = "1")]
    a: Weight,
    #[arg(long, default_value_t = 1)]
    eps: u8,
}

#[derive(Args)]
struct TwArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "table", required_unless_present = "table")]
    s: Option<f64>,
    /// `s0 s1 step`; writes CSV.
    #[arg(long, num_args = 3, allow_hyphen_values = true, value_names = ["S0", "S1", "STEP"])]
    table: Option<Vec<f64>>,
}

#[derive(Args)]
struct IdentityArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value = "1")]
    a: Weight,
    #[arg(long, default_value_t = 1)]
    eps: u8,
    /// Largest residual accepted before exiting with the accuracy code.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct Figure3Args {
    #[arg(long, default_value = "left")]
    which: Figure3Panel,
    /// Orders to evaluate; defaults depend on the panel.
    #[arg(long = "N", num_args = 1.., value_delimiter = ',')]
    orders: Vec<u32>,
    #[arg(long, default_value = "1")]
    a: Weight,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "N", num_args = 1.., value_delimiter = ',', required = true)]
    orders: Vec<u32>,
    /// Every m in 1..=N when absent.
    #[arg(long = "m-rule")]
    m_rule: Option<IndexRule>,
    /// Every k in 1..=m+1 when absent.
    #[arg(long = "k-rule")]
    k_rule: Option<IndexRule>,
    #[arg(long, default_value = "1")]
    a: Weight,
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [1u8])]
    epsilon: Vec<u8>,
    #[arg(long = "max-exact-cells", default_value_t = 2 * 64 * 65)]
    max_exact_cells: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long, default_value = "1")]
    a: Weight,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Full domino list as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long)]
    m: IndexRule,
    #[arg(long)]
    k: IndexRule,
    #[arg(long, default_value_t = 1)]
    eps: u8,
    #[arg(long, default_value = "1")]
    a: Weight,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionFormat {
    Json,
    Svg,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long, value_enum, default_value_t = RegionFormat::Json)]
    format: RegionFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Rounds every float to 15 significant digits.
fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = fmt_sig(x).parse().unwrap_or(x);
            json!(r)
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

fn emit(v: Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &round_floats(v))?;
    writeln!(out)?;
    Ok(())
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_rows<R: aztec_lshape::experiment::CsvRow>(rows: &[R], out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => write_csv(rows, std::fs::File::create(p)?),
        None => write_csv(rows, std::io::stdout().lock()),
    }
}

fn exact(args: ExactArgs, exec: Exec) -> Result<()> {
    let spec = args.shape.spec()?;
    let t = Instant::now();
    let c = match args.method {
        MethodArg::Auto => count_auto(spec, args.a, exec)?,
        MethodArg::Enumerate => count(spec, args.a, Method::Enumerate, exec)?,
        MethodArg::Determinant => count(spec, args.a, Method::Determinant, exec)?,
    };
    let elapsed = t.elapsed().as_millis() as u64;
    emit(json!({
        "N": spec.n,
        "m": spec.m,
        "k": spec.k,
        "epsilon": spec.epsilon,
        "variant": spec.variant,
        "a": args.a.to_string(),
        "value": c.display_value(),
        "value_num": c.value.numer().to_string(),
        "value_den": c.value.denom().to_string(),
        "logF": c.log_value,
        "log10": c.log_value / std::f64::consts::LN_10,
        "method": c.method,
        "elapsed_ms": elapsed,
    }))
}

fn asym(args: AsymArgs) -> Result<()> {
    let (m, k) = args.shape.indices()?;
    let (n, eps, a) = (args.shape.n, args.shape.eps, args.a.to_f64());
    let pl = PainleveSolution::standard();
    let with_probability = |e: &aztec_lshape::regimes::RegimeEstimate| -> Result<Value> {
        let mut v = serde_json::to_value(e)?;
        v["log_probability"] = json!(e.log_probability());
        v["regime_number"] = json!(e.regime.number());
        Ok(v)
    };
    if args.regime == "auto" {
        let d = regime_dispatch(n, m, k, eps, a, pl)?;
        let alternative = d.alternative.as_ref().map(with_probability).transpose()?;
        emit(json!({
            "primary": with_probability(&d.primary)?,
            "alternative": alternative,
            "ambiguous": d.ambiguous,
        }))
    } else {
        let regime: Regime = args.regime.parse()?;
        emit(with_probability(&regime_estimate(regime, n, m, k, eps, a, pl)?)?)
    }
}

fn saddle(args: SaddleArgs) -> Result<()> {
    let a = args.a.to_f64();
    let data = saddle_data(args.mu, a)?;
    let liquid = match args.kappa {
        Some(kappa) => {
            let k2 = kappa2(args.mu, a)?;
            if !(kappa > 0.0 && kappa < k2) {
                return Err(Error::Regime(format!(
                    "kappa = {kappa} outside the liquid range (0, {k2})"
                )));
            }
            Some(solve_z0(PhaseParams::new(args.mu, kappa, a, args.eps))?)
        }
        None => None,
    };
    emit(json!({ "saddle": data, "liquid": liquid }))
}

fn tw(args: TwArgs) -> Result<()> {
    let pl = PainleveSolution::standard();
    if let Some(t) = args.table {
        let (s0, s1, step) = (t[0], t[1], t[2]);
        if !(step > 0.0 && s1 >= s0 && s0.is_finite() && s1.is_finite()) {
            return Err(Error::Parameter("table needs s0 <= s1 and step > 0".into()));
        }
        let count = ((s1 - s0) / step + 1e-9).floor() as usize + 1;
        let mut text = String::from("s,logFTW,FTW,source\n");
        for i in 0..count {
            let s = s0 + i as f64 * step;
            let (l, src) = pl.log_ftw_with_source(s)?;
            text.push_str(&format!("{},{},{},{}\n", fmt_sig(s), fmt_sig(l), fmt_sig(l.exp()), src.label()));
        }
        return write_text(&None, &text);
    }
    let s = args.s.expect("clap requires --s or --table");
    let (l, src) = pl.log_ftw_with_source(s)?;
    emit(json!({ "s": s, "logFTW": l, "FTW": l.exp(), "source": src.label() }))
}

fn identities(args: IdentityArgs) -> Result<()> {
    let r = identity_checks(args.mu, args.a.to_f64(), args.eps)?;
    let worst = r.g_residual.abs().max(r.h_residual.abs()).max(r.f_residual.abs());
    let mut v = serde_json::to_value(r)?;
    v["max_residual"] = json!(worst);
    emit(v)?;
    if worst > args.tol {
        return Err(Error::Accuracy {
            what: "identity residual".into(),
            achieved: worst,
            requested: args.tol,
        });
    }
    Ok(())
}

fn figure3(args: Figure3Args, exec: Exec) -> Result<()> {
    let orders = if args.orders.is_empty() {
        args.which.default_orders()
    } else {
        args.orders
    };
    write_rows(&run_figure3(args.which, &orders, args.a, exec)?, &args.out)
}

fn sweep(args: SweepArgs, exec: Exec) -> Result<()> {
    let cfg = SweepConfig {
        orders: args.orders,
        m_rule: args.m_rule,
        k_rule: args.k_rule,
        a: args.a,
        epsilon: args.epsilon,
        max_exact_cells: args.max_exact_cells,
    };
    let rows = run_sweep(&cfg, exec)?;
    match args.format {
        Format::Csv => write_rows(&rows, &args.out),
        Format::Json => {
            let text = serde_json::to_string_pretty(&round_floats(serde_json::to_value(&rows)?))?;
            write_text(&args.out, &(text + "\n"))
        }
    }
}

fn sample(args: SampleArgs) -> Result<()> {
    let t = sample_tiling(args.n, args.a.to_f64(), args.seed)?;
    if let Some(p) = &args.svg {
        t.write_svg(p)?;
    }
    if let Some(p) = &args.json {
        std::fs::write(p, serde_json::to_string(&t)?)?;
    }
    emit(json!({
        "N": t.n,
        "a": args.a.to_string(),
        "seed": t.seed,
        "dominoes": t.dominoes.len(),
        "vertical": t.vertical_count(),
        "svg": args.svg,
        "json": args.json,
    }))
}

fn mc(args: McArgs, exec: Exec) -> Result<()> {
    let m = args.m.resolve(args.n);
    let k = args.k.resolve(args.n);
    let (m, k) = (
        i32::try_from(m).map_err(|_| Error::Parameter(format!("m = {m} out of range")))?,
        i32::try_from(k).map_err(|_| Error::Parameter(format!("k = {k} out of range")))?,
    );
    let est = estimate_frozen_probability(args.n, m, k, args.eps, args.a.to_f64(), args.samples, args.seed, exec)?;
    let mut v = serde_json::to_value(est)?;
    v["N"] = json!(args.n);
    v["m"] = json!(m);
    v["k"] = json!(k);
    v["epsilon"] = json!(args.eps);
    v["seed"] = json!(args.seed);
    emit(v)
}

fn region(args: RegionArgs) -> Result<()> {
    let grid = build_region(args.shape.spec()?)?;
    match args.format {
        RegionFormat::Json => {
            let text = serde_json::to_string(&grid.to_json())? + "\n";
            write_text(&args.out, &text)
        }
        RegionFormat::Svg => write_text(&args.out, &grid.outline_svg()),
    }
}

/// Splices `--config FILE` into the argument list as ordinary flags placed
/// right after the subcommand. Keys also given explicitly are dropped.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| Error::Parameter("--config needs a file".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path)?;
    let Value::Object(map) = serde_json::from_str::<Value>(&text)? else {
        return Err(Error::Parameter(format!("{path}: config must be a JSON object")));
    };
    let explicit: Vec<&str> = rest
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let mut flags = Vec::new();
    for (key, value) in map {
        let name = key.replace('_', "-");
        if explicit.contains(&name.as_str()) {
            continue;
        }
        let flag = format!("--{name}");
        let scalar = |v: &Value| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(Error::Parameter(format!("{path}: unsupported value {other} for {key}"))),
        };
        match &value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => flags.push(flag),
            Value::Array(xs) => {
                flags.push(flag);
                for x in xs {
                    flags.push(scalar(x)?);
                }
            }
            v => {
                flags.push(flag);
                flags.push(scalar(v)?);
            }
        }
    }
    // Position of the subcommand: the first argument after the program name.
    let at = 2.min(rest.len());
    let mut argv = rest;
    argv.splice(at..at, flags);
    Ok(argv)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Parameter(format!("{THREADS_VAR}={raw:?} is not a positive integer")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Internal(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run() -> Result<()> {
    configure_threads()?;
    let argv = expand_config(std::env::args().collect())?;
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    let exec = Exec::available();
    match cli.command {
        Command::Exact(a) => exact(a, exec),
        Command::Asym(a) => asym(a),
        Command::Saddle(a) => saddle(a),
        Command::Tw(a) => tw(a),
        Command::Identities(a) => identities(a),
        Command::Figure3(a) => figure3(a, exec),
        Command::Sweep(a) => sweep(a, exec),
        Command::Sample(a) => sample(a),
        Command::Mc(a) => mc(a, exec),
        Command::Region(a) => region(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
