mod report;

use clap::{Args, Parser, Subcommand};
use mpoints::enumerate::{count_series, doubling_grid, CountOptions, CountSeries, EnumError};
use mpoints::exactlin::linalg::Q;
use mpoints::fitting::{
    fit_power_log, model_compare, samples, span_doublings, tail, FitError, FitMode,
};
use mpoints::invariants::{predict_default, AdjointReport, InvariantError};
use mpoints::oracle::{brute_count, brute_generators, brute_volume, GoldenFixture, OracleError};
use mpoints::pairspec::{build_pair, ConfigDocument, PairModel};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;

/// Invariants, point counts and fits for pairs with multiplicity conditions.
#[derive(Parser)]
#[command(name = "mpoints", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Enumeration {
    /// Largest height bound B; defaults to the config's enumeration limit.
    #[arg(long)]
    max_height: Option<u64>,
    /// Number of work chunks.
    #[arg(long, default_value_t = 64)]
    chunks: usize,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the invariant block of a pair.
    Invariants { config: String },
    /// Count M-points on a doubling grid of height bounds and print `B,count` CSV.
    Count {
        config: String,
        #[command(flatten)]
        enumeration: Enumeration,
        /// Explicit comma-separated bounds instead of the doubling grid.
        #[arg(long, value_delimiter = ',')]
        bounds: Vec<u64>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<String>,
    },
    /// Fit c·B^a·(log B)^(b−1) to a count series.
    Fit {
        csv: String,
        /// Fix a to a rational p/q.
        #[arg(long)]
        fix_a: Option<String>,
        /// Fix b.
        #[arg(long)]
        fix_b: Option<f64>,
        /// Rank these values of b − 1 (needs --fix-a).
        #[arg(long, value_delimiter = ',')]
        b_candidates: Vec<i64>,
    },
    /// Predict, count and fit, then compare against the prediction.
    Verify {
        config: String,
        #[command(flatten)]
        enumeration: Enumeration,
        /// Allowed |aHat − a|; defaults to the config tolerance or 0.05.
        #[arg(long)]
        tol_a: Option<f64>,
        /// Also write the count series as CSV.
        #[arg(long)]
        series: Option<String>,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Count M-points with max|x_i| ≤ T by a direct loop.
    Count {
        config: String,
        #[arg(long)]
        t: u64,
    },
    /// Generators of the config's multiplicity family by an exhaustive box scan.
    Generators {
        config: String,
        #[arg(long = "box", default_value_t = 6)]
        bound: u64,
    },
    /// Bracket a slice volume by lattice-point counts.
    Volume {
        /// Rays as `1,0;0,1`.
        #[arg(long)]
        rays: String,
        /// Linear form as `1,1` (entries may be p/q).
        #[arg(long)]
        l: String,
        #[arg(long, default_value_t = 100)]
        scale: u64,
    },
    /// Record a brute count as a golden fixture.
    Fixture {
        config: String,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        out: String,
        #[arg(long, default_value = "recorded from the direct loop")]
        note: String,
    },
    /// Regenerate a golden fixture and compare.
    Check { fixture: String, config: String },
}

enum Failure {
    Usage(String),
    Config(String),
    Verify(String),
    Inconsistent(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Config(_) => 2,
            Failure::Verify(_) => 3,
            Failure::Inconsistent(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m)
            | Failure::Config(m)
            | Failure::Verify(m)
            | Failure::Inconsistent(m) => m,
        }
    }
}

impl From<InvariantError> for Failure {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Inconsistent(_) => Failure::Inconsistent(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<EnumError> for Failure {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::Inconsistent(_) => Failure::Inconsistent(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<FitError> for Failure {
    fn from(e: FitError) -> Self {
        Failure::Config(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{path}: {e}")))
}

fn write(path: &str, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{path}: {e}")))
}

fn load(path: &str) -> Result<PairModel, Failure> {
    let doc = ConfigDocument::from_json(&read(path)?)
        .map_err(|e| Failure::Config(format!("{path}: {e}")))?;
    build_pair(&doc).map_err(|e| Failure::Config(format!("{path}: {e}")))
}

fn print_json(v: &Value) {
    let _ = writeln!(
        std::io::stdout(),
        "{}",
        serde_json::to_string_pretty(v).expect("json")
    );
}

fn parse_rational(s: &str) -> Result<Q, Failure> {
    let bad = || Failure::Usage(format!("not a rational: {s}"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: i64 = n.trim().parse().map_err(|_| bad())?;
    let d: i64 = d.trim().parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Q::new(n.into(), d.into()))
}

fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn bounds_for(pair: &PairModel, e: &Enumeration, explicit: &[u64]) -> Result<Vec<u64>, Failure> {
    if !explicit.is_empty() {
        return Ok(explicit.to_vec());
    }
    let max = e
        .max_height
        .or_else(|| pair.config.enumeration.as_ref().and_then(|x| x.max_height))
        .ok_or_else(|| {
            Failure::Usage("no --max-height and no enumeration limit in the config".into())
        })?;
    Ok(doubling_grid(max))
}

fn series_for(pair: &PairModel, e: &Enumeration, explicit: &[u64]) -> Result<CountSeries, Failure> {
    let bounds = bounds_for(pair, e, explicit)?;
    Ok(count_series(
        pair,
        &bounds,
        CountOptions {
            chunks: e.chunks,
            threads: e.threads,
        },
    )?)
}

fn invariants(config: &str) -> Outcome {
    let pair = load(config)?;
    let r = predict_default(&pair)?;
    print_json(&json!({"invariants": report::invariant_block(&pair, &r)}));
    Ok(())
}

fn count(config: &str, e: &Enumeration, explicit: &[u64], out: Option<&str>) -> Outcome {
    let pair = load(config)?;
    let series = series_for(&pair, e, explicit)?;
    eprintln!(
        "# {} config {} S = {:?}; boundary points excluded",
        series.name, series.config_hash, series.s
    );
    match out {
        Some(path) => write(path, &series.to_csv()),
        None => {
            let _ = write!(std::io::stdout(), "{}", series.to_csv());
            Ok(())
        }
    }
}

fn fit(csv: &str, fix_a: Option<&str>, fix_b: Option<f64>, candidates: &[i64]) -> Outcome {
    let rows = CountSeries::rows_from_csv(&read(csv)?)?;
    let data: Vec<(f64, f64)> = rows.iter().map(|&(b, n)| (b as f64, n as f64)).collect();
    let a = fix_a.map(parse_rational).transpose()?;
    let mode = match (&a, fix_b) {
        (Some(_), Some(_)) => return Err(Failure::Usage("fix at most one of a and b".into())),
        (Some(a), None) => FitMode::FixedA(to_f64(a)),
        (None, Some(b)) => FitMode::FixedB(b),
        (None, None) => FitMode::Free,
    };
    let f = fit_power_log(&data, mode)?;
    let mut out = json!({"fit": report::fit_block(&f)});
    if !candidates.is_empty() {
        let a = a.ok_or_else(|| Failure::Usage("--b-candidates needs --fix-a".into()))?;
        out["ranking"] = report::ranking_block(&model_compare(&data, to_f64(&a), candidates)?);
    }
    print_json(&out);
    Ok(())
}

const FIT_DOUBLINGS: u32 = 10;

fn verify(config: &str, e: &Enumeration, tol: Option<f64>, series_path: Option<&str>) -> Outcome {
    let pair = load(config)?;
    let r: AdjointReport = predict_default(&pair)?;
    let tol = tol
        .or_else(|| pair.config.tolerances.as_ref().and_then(|t| t.a))
        .unwrap_or(0.05);
    let series = series_for(&pair, e, &[])?;
    if let Some(p) = series_path {
        write(p, &series.to_csv())?;
    }
    let data = tail(&samples(&series), FIT_DOUBLINGS);
    let a = to_f64(&r.a);
    let fitted = fit_power_log(&data, FitMode::FixedB(r.b as f64))
        .map_err(|e| Failure::Verify(e.to_string()))?;
    let a_ok = (fitted.a_hat - a).abs() <= tol;
    let b1 = r.b as i64 - 1;
    let candidates: Vec<i64> = (b1 - 1..=b1 + 1).filter(|&k| k >= 0).collect();
    let ranking =
        model_compare(&data, a, &candidates).map_err(|e| Failure::Verify(e.to_string()))?;
    let b_ok = ranking.first().is_some_and(|x| x.b_minus1 == b1);
    let span = span_doublings(&data);
    let b_binding = span >= 4.0;
    let mut warnings = Vec::new();
    if !b_ok && !b_binding {
        warnings.push(format!(
            "b − 1 = {b1} not ranked first, but the series spans only {span:.1} doublings"
        ));
    }
    let pass = a_ok && (b_ok || !b_binding);
    print_json(&json!({
        "invariants": report::invariant_block(&pair, &r),
        "count": report::count_block(&series, series_path),
        "fit": report::fit_block(&fitted),
        "ranking": report::ranking_block(&ranking),
        "verdict": {
            "tolA": tol,
            "aPass": a_ok,
            "bPass": b_ok,
            "bBinding": b_binding,
            "warnings": warnings,
            "pass": pass,
        },
    }));
    if pass {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "aHat = {:.4} against a = {}, b ranking {}",
            fitted.a_hat,
            r.a,
            if b_ok { "ok" } else { "failed" }
        )))
    }
}

fn parse_rows<T>(s: &str, f: impl Fn(&str) -> Result<T, Failure>) -> Result<Vec<T>, Failure> {
    s.split(',').map(|x| f(x.trim())).collect()
}

fn oracle(cmd: &OracleCommand) -> Outcome {
    match cmd {
        OracleCommand::Count { config, t } => {
            let pair = load(config)?;
            println!("{}", brute_count(&pair, *t)?);
        }
        OracleCommand::Generators { config, bound } => {
            let pair = load(config)?;
            let gens = brute_generators(&pair.family, &vec![*bound; pair.n()]);
            print_json(&json!(gens));
        }
        OracleCommand::Volume { rays, l, scale } => {
            let int = |x: &str| {
                x.parse::<i64>()
                    .map_err(|_| Failure::Usage(format!("not an integer: {x}")))
            };
            let rays: Vec<Vec<i64>> = rays
                .split(';')
                .map(|r| parse_rows(r, int))
                .collect::<Result<_, _>>()?;
            let l = parse_rows(l, parse_rational)?;
            if rays.iter().any(|r| r.len() != l.len()) {
                return Err(Failure::Usage("rays and L have different lengths".into()));
            }
            let b = brute_volume(&rays, &l, *scale)?;
            print_json(&json!({
                "closed": b.closed.iter().map(report::rational).collect::<Vec<_>>(),
                "open": b.open.iter().map(report::rational).collect::<Vec<_>>(),
                "lower": report::rational(&b.lower),
                "upper": report::rational(&b.upper),
            }));
        }
        OracleCommand::Fixture {
            config,
            t,
            out,
            note,
        } => {
            let pair = load(config)?;
            let f = GoldenFixture {
                config_hash: mpoints::enumerate::config_hash(&pair),
                operation: "brute_count".into(),
                input: format!("T={t}"),
                output: brute_count(&pair, *t)?.to_string(),
                note: note.clone(),
            };
            write(out, &f.to_text())?;
        }
        OracleCommand::Check { fixture, config } => {
            let f = GoldenFixture::parse(&read(fixture)?)?;
            let pair = load(config)?;
            if f.config_hash != mpoints::enumerate::config_hash(&pair) {
                return Err(Failure::Verify(
                    "fixture was recorded for a different config".into(),
                ));
            }
            let t: u64 = f
                .input
                .strip_prefix("T=")
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| Failure::Config("bad fixture input".into()))?;
            let now = brute_count(&pair, t)?.to_string();
            if now != f.output {
                return Err(Failure::Verify(format!(
                    "fixture says {}, oracle gives {now}",
                    f.output
                )));
            }
            println!("ok");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Invariants { config } => invariants(&config),
        Command::Count {
            config,
            enumeration,
            bounds,
            out,
        } => count(&config, &enumeration, &bounds, out.as_deref()),
        Command::Fit {
            csv,
            fix_a,
            fix_b,
            b_candidates,
        } => fit(&csv, fix_a.as_deref(), fix_b, &b_candidates),
        Command::Verify {
            config,
            enumeration,
            tol_a,
            series,
        } => verify(&config, &enumeration, tol_a, series.as_deref()),
        Command::Oracle { command } => oracle(&command),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
