//! Command-line front end: simulate paths, compute intervals, run coverage
//! experiments, reproduce the reference tables.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use garch_ci::harness::{reproduce_table, run_experiment, ReproduceOptions, TableId};
use garch_ci::report;
use garch_ci::{
    asclt_ci, check_stationarity, normal_ci_with_mode, resample_ci, simulate, ConfidenceInterval,
    Error, ExperimentConfig, GarchParams, InnovationSpec, LogAvgConfig, RngStream, SamplePath,
    StableGateConfig, Tau2Mode,
};

#[derive(Parser)]
#[command(name = "garch-ci", version, about = "GARCH(1,1) simulation and coverage studies for confidence intervals on E(X^2)")]
struct Cli {
    /// Bound worker threads (default: one per core)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path, dump it as CSV, and print stationarity diagnostics
    Simulate(SimulateArgs),
    /// Build confidence interval(s) for E(X^2) on one path
    Ci(CiArgs),
    /// Run a coverage experiment described by a TOML config
    Coverage(CoverageArgs),
    /// Reproduce a reference table and compare against embedded values
    Reproduce(ReproduceArgs),
}

#[derive(Args, Clone)]
struct GarchArgs {
    #[arg(long, default_value_t = 0.1)]
    a0: f64,
    #[arg(long, default_value_t = 0.1)]
    a1: f64,
    #[arg(long, default_value_t = 0.1)]
    b1: f64,
    /// normal | t<nu> | pareto:<alpha>[:<xm>]
    #[arg(long, default_value = "normal")]
    innovation: String,
    #[arg(long, default_value_t = 600)]
    n: usize,
    #[arg(long, default_value_t = 500)]
    burn_in: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// RNG stream id (replication index)
    #[arg(long, default_value_t = 0)]
    stream: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    garch: GarchArgs,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LogAvgArgs {
    #[arg(long, default_value_t = 5)]
    k_min: usize,
    #[arg(long, default_value_t = 100)]
    shift_stride: usize,
    #[arg(long, default_value_t = 5)]
    n_shifts: usize,
    /// Use disjoint windows instead of restarted suffixes for the shifts
    #[arg(long, default_value_t = false)]
    windowed: bool,
}

impl LogAvgArgs {
    fn config(&self) -> LogAvgConfig {
        LogAvgConfig {
            k_min: self.k_min,
            shift_stride: self.shift_stride,
            n_shifts: self.n_shifts,
            windowed: self.windowed,
        }
    }
}

#[derive(Args)]
struct CiArgs {
    #[command(flatten)]
    garch: GarchArgs,
    /// normal | asclt | stable | all
    #[arg(long, default_value = "all")]
    method: String,
    /// Stability order for the resampling method
    #[arg(long, default_value_t = 1.5)]
    p: f64,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Read the path from a `k,x2,sigma2` CSV instead of simulating
    #[arg(long)]
    input: Option<PathBuf>,
    /// known | kurtosis | batch-means
    #[arg(long, default_value = "known")]
    tau2: String,
    #[command(flatten)]
    logavg: LogAvgArgs,
    #[arg(long, default_value_t = 0.2)]
    mean_tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_attempts: u32,
    /// Write the log-average CDF as `t,cdf` rows (stable dump gets a
    /// `stable_` filename prefix when both methods run)
    #[arg(long)]
    dump_cdf: Option<PathBuf>,
}

#[derive(Args)]
struct CoverageArgs {
    /// TOML experiment config; defaults apply for missing keys
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// csv | json | both
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct ReproduceArgs {
    /// 1 or 2
    #[arg(long)]
    table: u8,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    /// Compare against embedded reference values; nonzero exit on failure
    #[arg(long, default_value_t = false)]
    check: bool,
    /// Keep only grid cells whose "<innovation> <method> n=<n>" contains this
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// csv | json | both
    #[arg(long, default_value = "both")]
    format: String,
}

fn parse_innovation(s: &str) -> Result<InnovationSpec, Error> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("normal") {
        return Ok(InnovationSpec::Normal);
    }
    if let Some(rest) = s.strip_prefix("t:").or_else(|| s.strip_prefix('t')) {
        let nu: f64 = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad degrees of freedom in {s:?}")))?;
        return InnovationSpec::student_t(nu);
    }
    if let Some(rest) = s.strip_prefix("pareto") {
        let rest = rest.trim_start_matches([':', '(']).trim_end_matches(')');
        let parts: Vec<&str> = rest.split([':', ',']).collect();
        if parts.is_empty() || parts.len() > 2 {
            return Err(Error::Parse(format!("bad pareto spec {s:?}")));
        }
        let alpha: f64 =
            parts[0].parse().map_err(|_| Error::Parse(format!("bad alpha in {s:?}")))?;
        let xm: f64 = if parts.len() == 2 {
            parts[1].parse().map_err(|_| Error::Parse(format!("bad xm in {s:?}")))?
        } else {
            1.0
        };
        return InnovationSpec::pareto(alpha, xm);
    }
    Err(Error::Parse(format!(
        "unknown innovation {s:?}; expected normal, t<nu>, or pareto:<alpha>[:<xm>]"
    )))
}

fn parse_tau2(s: &str) -> Result<Tau2Mode, Error> {
    match s {
        "known" => Ok(Tau2Mode::Known),
        "kurtosis" => Ok(Tau2Mode::EmpiricalKurtosis),
        "batch-means" => Ok(Tau2Mode::BatchMeans),
        other => Err(Error::Parse(format!("unknown tau2 mode {other:?}"))),
    }
}

fn build_path(args: &GarchArgs, input: Option<&PathBuf>) -> Result<SamplePath, Error> {
    let params = GarchParams::new(args.a0, args.a1, args.b1)?;
    let innovation = parse_innovation(&args.innovation)?;
    match input {
        Some(path) => {
            let content = std::fs::read_to_string(path)?;
            SamplePath::from_csv(&content, params, innovation)
        }
        None => {
            let mut rng = RngStream::new(args.seed, args.stream);
            simulate(&params, &innovation, args.n, args.burn_in, &mut rng)
        }
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let params = GarchParams::new(args.garch.a0, args.garch.a1, args.garch.b1)?;
    let innovation = parse_innovation(&args.garch.innovation)?;
    eprintln!(
        "config: {}",
        serde_json::json!({
            "command": "simulate", "params": params, "innovation": innovation,
            "n": args.garch.n, "burn_in": args.garch.burn_in,
            "seed": args.garch.seed, "stream": args.garch.stream,
        })
    );

    let mut diag_rng = RngStream::new(args.garch.seed, args.garch.stream | 1 << 56);
    match check_stationarity(&params, &innovation, 100_000, &mut diag_rng) {
        Ok(check) => eprintln!(
            "log-moment estimate: {:.4} (se {:.4}) -> {}",
            check.log_moment_estimate,
            check.std_error,
            if check.is_stationary { "stationary" } else { "NOT stationary" }
        ),
        Err(Error::DegenerateGarch) => eprintln!("log-moment estimate: undefined (a1 = b1 = 0)"),
        Err(e) => return Err(e),
    }
    eprintln!("stationary mean mu = {:.6}", params.stationary_mean()?);
    match params.tau_squared(&innovation) {
        Ok(t2) => eprintln!("long-run variance tau^2 = {t2:.6}"),
        Err(e) => eprintln!("long-run variance tau^2 unavailable: {e}"),
    }

    let path = build_path(&args.garch, None)?;
    let csv = path.to_csv();
    match &args.out {
        Some(file) => {
            std::fs::write(file, csv)?;
            eprintln!("wrote {} rows to {}", path.len(), file.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct CiOutput {
    method: String,
    lo: f64,
    hi: f64,
    length: f64,
    level: f64,
    center: f64,
    n: usize,
    seed: u64,
    stream: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau2_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shift_stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_shifts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    windowed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gate_attempts: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y_mean: Option<f64>,
}

impl CiOutput {
    fn bare(iv: &ConfidenceInterval, args: &CiArgs) -> Self {
        CiOutput {
            method: iv.method.label(),
            lo: iv.lo,
            hi: iv.hi,
            length: iv.length(),
            level: iv.level,
            center: iv.center_used,
            n: args.garch.n,
            seed: args.garch.seed,
            stream: args.garch.stream,
            tau2_mode: None,
            k_min: None,
            shift_stride: None,
            n_shifts: None,
            windowed: None,
            p: None,
            gate_attempts: None,
            y_mean: None,
        }
    }

    fn with_logavg(mut self, cfg: &LogAvgConfig) -> Self {
        self.k_min = Some(cfg.k_min);
        self.shift_stride = Some(cfg.shift_stride);
        self.n_shifts = Some(cfg.n_shifts);
        self.windowed = Some(cfg.windowed);
        self
    }
}

fn cmd_ci(args: &CiArgs) -> Result<(), Error> {
    let logavg = args.logavg.config();
    let gate = StableGateConfig { mean_tol: args.mean_tol, max_attempts: args.max_attempts };
    let tau2_mode = parse_tau2(&args.tau2)?;
    let alpha = 1.0 - args.level;
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(Error::InvalidParameter(format!("level must be in (0,1), got {}", args.level)));
    }
    eprintln!(
        "config: {}",
        serde_json::json!({
            "command": "ci", "method": args.method, "p": args.p, "level": args.level,
            "tau2": args.tau2, "seed": args.garch.seed, "stream": args.garch.stream,
            "logavg": logavg, "gate": gate, "input": args.input,
        })
    );

    let path = build_path(&args.garch, args.input.as_ref())?;
    let mut outputs = Vec::new();
    let want = |name: &str| args.method == name || args.method == "all";

    if want("normal") {
        let iv =
            normal_ci_with_mode(&path, &path.params, &path.innovation, alpha, tau2_mode)?;
        let mut out = CiOutput::bare(&iv, args);
        out.tau2_mode = Some(args.tau2.clone());
        out.n = path.len();
        outputs.push(out);
    }
    if want("asclt") {
        let iv = asclt_ci(&path, alpha, &logavg)?;
        let mut out = CiOutput::bare(&iv, args).with_logavg(&logavg);
        out.n = path.len();
        outputs.push(out);
        if let Some(file) = &args.dump_cdf {
            let seq = garch_ci::t_sequence(&path, path.mean_x2());
            let cdf = garch_ci::build_logavg_cdf(&seq, &logavg)?;
            std::fs::write(file, cdf.to_csv())?;
            eprintln!("wrote asclt cdf to {}", file.display());
        }
    }
    if want("stable") {
        let mut rng = RngStream::new(args.garch.seed, args.garch.stream | 1 << 57);
        let run = resample_ci(&path, args.p, alpha, &mut rng, &logavg, &gate)?;
        if let Some(file) = &args.dump_cdf {
            let file = if args.method == "all" {
                let name = format!(
                    "stable_{}",
                    file.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
                );
                file.with_file_name(name)
            } else {
                file.clone()
            };
            std::fs::write(&file, run.cdf.to_csv())?;
            eprintln!("wrote stable cdf to {}", file.display());
        }
        let mut out = CiOutput::bare(&run.interval, args).with_logavg(&logavg);
        out.n = path.len();
        out.p = Some(run.p);
        out.gate_attempts = Some(run.attempts);
        out.y_mean = Some(run.y_mean);
        outputs.push(out);
    }
    if outputs.is_empty() {
        return Err(Error::Parse(format!(
            "unknown method {:?}; expected normal, asclt, stable, or all",
            args.method
        )));
    }
    println!("{}", serde_json::to_string_pretty(&outputs).expect("serializable"));
    Ok(())
}

fn cmd_coverage(args: &CoverageArgs) -> Result<(), Error> {
    let mut cfg: ExperimentConfig = match &args.config {
        Some(path) => {
            let content = std::fs::read_to_string(path)?;
            toml::from_str(&content).map_err(|e| Error::Parse(format!("config: {e}")))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = args.reps {
        cfg.n_reps = reps;
    }
    eprintln!("config: {}", serde_json::to_string(&cfg).expect("serializable"));

    let report = run_experiment(&cfg)?;
    match &args.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            if args.format == "csv" || args.format == "both" {
                let p = dir.join("coverage_report.csv");
                std::fs::write(&p, report::coverage_csv(&report))?;
                eprintln!("wrote {}", p.display());
            }
            if args.format == "json" || args.format == "both" {
                let p = dir.join("coverage_report.json");
                std::fs::write(&p, report::coverage_json(&report))?;
                eprintln!("wrote {}", p.display());
            }
        }
        None => match args.format.as_str() {
            "json" => print!("{}", report::coverage_json(&report)),
            _ => print!("{}", report::coverage_csv(&report)),
        },
    }
    Ok(())
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<bool, Error> {
    let table = match args.table {
        1 => TableId::Table1,
        2 => TableId::Table2,
        other => {
            return Err(Error::InvalidParameter(format!("table must be 1 or 2, got {other}")))
        }
    };
    eprintln!(
        "config: {}",
        serde_json::json!({
            "command": "reproduce", "table": args.table, "seed": args.seed,
            "reps": args.reps, "check": args.check, "only": args.only,
        })
    );
    let opts = ReproduceOptions { n_reps: Some(args.reps), only: args.only.clone() };
    let report = reproduce_table(table, args.seed, &opts)?;
    print!("{}", report::table_text(&report));
    if let Some(dir) = &args.out_dir {
        for file in report::write_table_reports(&report, dir, &args.format)? {
            eprintln!("wrote {file}");
        }
    }
    Ok(!args.check || report.all_ok)
}

fn run(cli: &Cli) -> Result<bool, Error> {
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(args).map(|_| true),
        Command::Ci(args) => cmd_ci(args).map(|_| true),
        Command::Coverage(args) => cmd_coverage(args).map(|_| true),
        Command::Reproduce(args) => cmd_reproduce(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.threads {
        Some(k) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            pool.install(|| run(&cli))
        }
        None => run(&cli),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
