//! Command-line front end: `onebit <subcommand>`.
//!
//! Every subcommand reads and writes the text formats of `onebit-core`.
//! Output goes to stdout unless `--output` is given. Exit status is 0 on
//! success, 1 on a failed check or runtime error, and 2 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use onebit_core::designs::{
    find_list_disjunct_violation, find_list_union_free_violation, DEFAULT_PAIR_CAP,
};
use onebit_core::recovery::{decode_l0_report, CSV_HEADER};
use onebit_core::sensing::MeasureMode;
use onebit_core::{
    adversarial_pair, build_gaussian_matrix, build_thm1_matrix, build_thm3_matrix,
    build_thm4_matrix, build_thm5_matrix, construct_list_disjunct, construct_list_union_free,
    decode_approximate, decode_superset, decode_superset_bounded_range, decode_superset_same_sign,
    format_rational, measure_with_threshold, measurement_budget, parse_rational, run_experiment,
    superset_to_approximate, BinaryDesign, BudgetQuery, DesignParams, DesignProperty,
    ExperimentConfig, Goal, MeasurementVector, Rational, RecoveryReport, Regime, RegimeParams,
    SensingMatrix, SignalClass, SparseSignal,
};

#[derive(Debug, Parser)]
#[command(name = "onebit", version, about = "Universal support recovery from one-bit measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a design or sensing-matrix file.
    #[command(subcommand)]
    Construct(ConstructCommand),
    /// Certify a design file against its recorded (or overridden) claim.
    Verify(VerifyArgs),
    /// Measure a signal with a matrix.
    Measure(MeasureArgs),
    /// Decode a measurement vector into a support report.
    Decode(DecodeArgs),
    /// Search for two signals the matrix cannot tell apart.
    Adversary(AdversaryArgs),
    /// Print the default measurement budget for a recovery goal and signal class.
    Budget(BudgetArgs),
    /// Run an experiment config and write the results CSV.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Subcommand)]
enum ConstructCommand {
    /// A list-disjunct or list union-free binary design.
    Design(DesignArgs),
    /// A sensing matrix for one of the recovery regimes.
    Matrix(MatrixArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PropertyArg {
    ListDisjunct,
    ListUnionFree,
}

impl From<PropertyArg> for DesignProperty {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::ListDisjunct => DesignProperty::ListDisjunct,
            PropertyArg::ListUnionFree => DesignProperty::ListUnionFree,
        }
    }
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn regime_arg(s: &str) -> Result<Regime, String> {
    s.parse().map_err(|e: onebit_core::Error| e.to_string())
}

fn mode_arg(s: &str) -> Result<MeasureMode, String> {
    s.parse().map_err(|e: onebit_core::Error| e.to_string())
}

fn goal_arg(s: &str) -> Result<Goal, String> {
    s.parse().map_err(|e: onebit_core::Error| e.to_string())
}

fn class_arg(s: &str) -> Result<SignalClass, String> {
    s.parse().map_err(|e: onebit_core::Error| e.to_string())
}

#[derive(Debug, Args)]
struct OutputArg {
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DesignArgs {
    #[arg(long, value_enum)]
    property: PropertyArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    l: usize,
    /// Overlap fraction for union-free designs, as p/q.
    #[arg(long, value_parser = rational_arg)]
    alpha: Option<Rational>,
    /// Row limit; disjunct designs shrink below it, union-free designs scale their weight to it.
    #[arg(long)]
    target_m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    /// thm1, thm3, thm4, thm5 or gaussian.
    #[arg(long, value_parser = regime_arg)]
    regime: Regime,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, value_parser = rational_arg)]
    eps: Rational,
    /// Dynamic-range bound (thm4; gaussian default row count).
    #[arg(long, value_parser = rational_arg)]
    eta: Option<Rational>,
    /// Minority-sign bound (thm5).
    #[arg(long = "R", alias = "r")]
    r: Option<usize>,
    /// Gaussian row count; defaults to the Gaussian budget.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Design file.
    design: PathBuf,
    /// Check this property instead of the recorded claim (needs --k and --l).
    #[arg(long, value_enum)]
    property: Option<PropertyArg>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, value_parser = rational_arg)]
    alpha: Option<Rational>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    /// ternary (sign) or strict (sign*).
    #[arg(long, value_parser = mode_arg, default_value = "ternary")]
    mode: MeasureMode,
    /// Treat dense-row inner products with magnitude <= tau as 0.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    measurement: PathBuf,
    /// Mode the measurement file was produced with.
    #[arg(long, value_parser = mode_arg, default_value = "ternary")]
    mode: MeasureMode,
    #[arg(long)]
    k: usize,
    #[arg(long, value_parser = rational_arg)]
    eps: Rational,
    /// Dynamic-range bound (gaussian decoding).
    #[arg(long, value_parser = rational_arg)]
    eta: Option<Rational>,
    /// Trim superset output to an approximate support of size <= k.
    #[arg(long)]
    approximate: bool,
    /// True signal, for false-positive and false-negative counts.
    #[arg(long)]
    signal: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Debug, Args)]
struct AdversaryArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, value_parser = rational_arg)]
    eps: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// exact, approximate or superset.
    #[arg(long, value_parser = goal_arg)]
    goal: Goal,
    /// general, bounded-range, binary, same-sign or gaussian.
    #[arg(long, value_parser = class_arg)]
    class: SignalClass,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, value_parser = rational_arg)]
    eps: Rational,
    #[arg(long, value_parser = rational_arg)]
    eta: Option<Rational>,
    #[arg(long = "R", alias = "r")]
    r: Option<usize>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Config file of `key = value` lines.
    config: PathBuf,
    /// Overrides the config's `output` key.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: &OutputArg, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_matrix(path: &Path) -> Result<SensingMatrix> {
    read(path)?
        .parse()
        .with_context(|| format!("parsing matrix {}", path.display()))
}

fn load_signal(path: &Path) -> Result<SparseSignal> {
    read(path)?
        .parse()
        .with_context(|| format!("parsing signal {}", path.display()))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Construct(ConstructCommand::Design(args)) => construct_design(args),
        Command::Construct(ConstructCommand::Matrix(args)) => construct_matrix(args),
        Command::Verify(args) => verify(args),
        Command::Measure(args) => measure_cmd(args),
        Command::Decode(args) => decode(args),
        Command::Adversary(args) => adversary(args),
        Command::Budget(args) => budget(args),
        Command::Experiment(args) => experiment(args),
    }
}

fn construct_design(args: DesignArgs) -> Result<i32> {
    let mut params = DesignParams::new(args.n, args.k, args.l, args.seed);
    if let Some(alpha) = args.alpha {
        params = params.with_alpha(alpha);
    }
    if let Some(m) = args.target_m {
        params = params.with_target_m(m);
    }
    let design = match args.property {
        PropertyArg::ListDisjunct => construct_list_disjunct(&params)?,
        PropertyArg::ListUnionFree => construct_list_union_free(&params)?,
    };
    emit(&args.out, &design.to_string())?;
    Ok(0)
}

fn construct_matrix(args: MatrixArgs) -> Result<i32> {
    let (n, k, eps, seed) = (args.n, args.k, &args.eps, args.seed);
    let need_eta = || args.eta.clone().context("this regime needs --eta");
    let a = match args.regime {
        Regime::Thm1 => build_thm1_matrix(n, k, eps, seed)?,
        Regime::Thm3 => build_thm3_matrix(n, k, eps, seed)?,
        Regime::Thm4 => build_thm4_matrix(n, k, eps, &need_eta()?, seed)?,
        Regime::Thm5 => build_thm5_matrix(n, k, eps, args.r.context("thm5 needs --R")?, seed)?,
        Regime::Gaussian => {
            let m = match args.m {
                Some(m) => m,
                None => measurement_budget(
                    &BudgetQuery::new(Goal::Approximate, SignalClass::Gaussian, n, k, eps.clone())
                        .with_eta(need_eta()?),
                )? as usize,
            };
            build_gaussian_matrix(n, m, seed)?
        }
    };
    emit(&args.out, &a.to_string())?;
    Ok(0)
}

fn verify(args: VerifyArgs) -> Result<i32> {
    let design: BinaryDesign = read(&args.design)?
        .parse()
        .with_context(|| format!("parsing design {}", args.design.display()))?;
    let claim = design.claim();
    let property = args
        .property
        .map(DesignProperty::from)
        .or(claim.map(|c| c.property))
        .context("the design records no property; pass --property, --k and --l")?;
    let k = args.k.or(claim.map(|c| c.k)).context("missing --k")?;
    let l = args.l.or(claim.map(|c| c.l)).context("missing --l")?;
    let alpha = args.alpha.or_else(|| claim.and_then(|c| c.alpha.clone()));
    let violation = match property {
        DesignProperty::ListDisjunct => find_list_disjunct_violation(&design, k, l, DEFAULT_PAIR_CAP)?,
        DesignProperty::ListUnionFree => {
            let alpha = alpha.context("list-union-free checks need --alpha")?;
            find_list_union_free_violation(&design, k, l, &alpha, DEFAULT_PAIR_CAP)?
        }
    };
    let what = format!("{} k={k} l={l}", property.as_str());
    match violation {
        None => {
            println!("certified {what}");
            Ok(0)
        }
        Some(v) => {
            println!("violation of {what}: {v}");
            Ok(1)
        }
    }
}

fn measure_cmd(args: MeasureArgs) -> Result<i32> {
    let a = load_matrix(&args.matrix)?;
    let x = load_signal(&args.signal)?;
    let y = measure_with_threshold(&a, &x, args.mode, args.tau)?;
    emit(&args.out, &y.to_string())?;
    Ok(0)
}

fn decode(args: DecodeArgs) -> Result<i32> {
    let a = load_matrix(&args.matrix)?;
    let y = MeasurementVector::parse(&read(&args.measurement)?, args.mode)
        .with_context(|| format!("parsing measurement {}", args.measurement.display()))?;
    let (k, eps) = (args.k, &args.eps);
    let mut report = match a.params() {
        RegimeParams::Thm1 { .. } => decode_approximate(&a, &y, k, eps)?,
        RegimeParams::Thm3 { .. } => decode_superset(&a, &y, k, eps)?,
        RegimeParams::Thm4 { eta, .. } => decode_superset_bounded_range(&a, &y, k, eps, eta)?,
        RegimeParams::Thm5 { r, .. } => decode_superset_same_sign(&a, &y, k, eps, *r)?,
        RegimeParams::Gaussian => {
            let eta = args.eta.as_ref().context("gaussian decoding needs --eta")?;
            decode_l0_report(&a, &y, k, eps, eta)?
        }
    };
    if args.approximate && matches!(a.regime(), Regime::Thm3 | Regime::Thm4 | Regime::Thm5) {
        report.returned = superset_to_approximate(&report.returned, k, eps)?;
    }
    if let Some(path) = &args.signal {
        report = report.with_reference(load_signal(path)?.support());
    }
    emit(&args.out, &format_report(&report, a.seed()))?;
    Ok(0)
}

fn format_report(report: &RecoveryReport, seed: Option<u64>) -> String {
    let returned = report.returned.iter().map(|j| j + 1).join(" ");
    let mut out = format!("returned {returned}\n");
    if report.reference.is_some() {
        let flag = |b: Option<bool>| b.map_or("-", |b| if b { "1" } else { "0" });
        out.push_str(&format!(
            "approximate_ok {}\n{CSV_HEADER}\n{}\n",
            flag(report.approximate_ok()),
            report.csv_row(seed.unwrap_or(0))
        ));
    }
    out
}

fn adversary(args: AdversaryArgs) -> Result<i32> {
    let a = load_matrix(&args.matrix)?;
    match adversarial_pair(&a, args.k, &args.eps, args.seed)? {
        None => emit(&args.out, "none\n")?,
        Some((x1, x2)) => emit(&args.out, &format!("# x1\n{x1}# x2\n{x2}"))?,
    }
    Ok(0)
}

fn budget(args: BudgetArgs) -> Result<i32> {
    let mut q = BudgetQuery::new(args.goal, args.class, args.n, args.k, args.eps);
    if let Some(eta) = args.eta {
        q = q.with_eta(eta);
    }
    if let Some(r) = args.r {
        q = q.with_r(r);
    }
    println!("{}", measurement_budget(&q)?);
    Ok(0)
}

fn experiment(args: ExperimentArgs) -> Result<i32> {
    let mut cfg: ExperimentConfig = read(&args.config)?
        .parse()
        .with_context(|| format!("parsing config {}", args.config.display()))?;
    if args.output.is_some() {
        cfg.output = args.output;
    }
    let table = run_experiment(&cfg)?;
    if cfg.output.is_none() {
        print!("{}", table.to_csv());
    }
    eprintln!(
        "{} trials, {} violations, {:.2}s (eps = {})",
        table.summary.trials,
        table.summary.violations(),
        table.wall_time.as_secs_f64(),
        format_rational(&cfg.eps)
    );
    Ok(if table.summary.violations() == 0 { 0 } else { 1 })
}
