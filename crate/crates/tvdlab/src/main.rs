//! Command-line driver.
//!
//! Exit codes: 0 ok, 1 a requested limiter predicate failed, 2 usage or
//! input error, 3 the step was refused under `--cfl strict`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tvdlab::experiments::{
    convergence_study, eval_profile, ErrorTable, StudyConfig, FIT_RANGE, K_RANGE,
    STUDY_RECONSTRUCTIONS,
};
use tvdlab::limiter::{
    bound_m, check_convexity, check_extremum_identity, check_monotonicity,
    check_second_order_extremum, check_tvd_region, AdmissibilityReport, Limiter,
};
use tvdlab::solver::{max_stable_sigma, simulate, TrajectoryRow};
use tvdlab::{
    fmt_real, CflPolicy, Error, FluxKind, FluxSpec, GridState, Interval, Monitors, NumericalFlux,
    Reconstruction, SchemeConfig, TimeScheme,
};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CFL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "tvdlab", version, about = "Limiter checks, TVD runs and convergence tables")]
struct Cli {
    /// File of `key=value` lines merged into the flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Limiter admissibility checks.
    Limiter {
        #[command(subcommand)]
        command: LimiterCommand,
    },
    /// Advance one problem to a final time and dump the trajectory.
    Run(RunArgs),
    /// Error tables and fitted orders on meshes N = 2^k.
    Convergence(ConvergenceArgs),
}

#[derive(Subcommand, Debug)]
enum LimiterCommand {
    /// Check a catalog limiter or a piecewise-linear description file.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Catalog name, or `kappa:<k>`.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    name: Option<String>,
    /// Description file with lines `r_break slope intercept`.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// κ for the kappa family.
    #[arg(long)]
    kappa: Option<f64>,
    /// Also check the TVD region with this α.
    #[arg(long)]
    alpha: Option<f64>,
    /// Also check the extremum identity with this δ.
    #[arg(long)]
    delta: Option<f64>,
    /// Also check second order at extrema.
    #[arg(long)]
    second_order: bool,
    /// Report CSV path (default: standard output).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Problem {
    Advection,
    Burgers,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Initial {
    /// The smooth study profile.
    Profile,
    Sine,
    Square,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "advection")]
    problem: Problem,
    /// Advection speed.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    speed: f64,
    /// upwind, godunov, engquist_osher or lax_wendroff. Defaults to upwind
    /// for advection and godunov for Burgers.
    #[arg(long)]
    flux: Option<String>,
    /// μ for the Lax-Wendroff type flux.
    #[arg(long)]
    mu: Option<f64>,
    /// Limiter name, `kappa:<k>` or `uno2`.
    #[arg(long, default_value = "minmod")]
    limiter: String,
    #[arg(long, default_value = "heun")]
    scheme: String,
    #[arg(long, default_value_t = 0.4)]
    sigma: f64,
    #[arg(long, default_value_t = 64)]
    cells: usize,
    #[arg(long, default_value_t = 1.0)]
    tfinal: f64,
    #[arg(long, value_enum, default_value = "profile")]
    initial: Initial,
    /// Trajectory CSV path. Without it the CSV goes to standard output and
    /// the summary to standard error.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Snapshot CSV path (`snapshot,t,x,u`).
    #[arg(long, value_name = "PATH")]
    snapshots: Option<PathBuf>,
    /// Keep every k-th state in the snapshot file.
    #[arg(long, default_value_t = 10)]
    snapshot_every: usize,
    #[arg(long, default_value = "warn")]
    cfl: String,
    /// Also monitor the incremental-coefficient conditions every step.
    #[arg(long)]
    harten: bool,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[arg(long, default_value = "five_point")]
    scheme: String,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Comma-separated reconstructions (default: the full study set).
    #[arg(long, value_delimiter = ',')]
    limiters: Vec<String>,
    #[arg(long, default_value_t = 3)]
    k_min: u32,
    #[arg(long, default_value_t = 9)]
    k_max: u32,
    /// Error table CSV path. Without it the table goes to standard output and
    /// the orders to standard error.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Fitted orders CSV path.
    #[arg(long, value_name = "PATH")]
    orders: Option<PathBuf>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CflRefusal { .. } => EXIT_CFL,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

/// Appends `--key value` for every config entry whose flag is not already on
/// the command line. Booleans become bare flags.
fn merge_config(mut args: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(pos) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        if pos + 1 >= args.len() {
            return Err(usage("--config needs a file"));
        }
        args.remove(pos);
        args.remove(pos)
    };
    let text = fs::read_to_string(&path).map_err(|e| usage(format!("{path}: {e}")))?;
    let mut extra = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{path}:{}: expected key=value", i + 1)))?;
        let flag = format!("--{}", k.trim().replace('_', "-"));
        let given = args
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match v.trim() {
            "true" => extra.push(flag),
            "false" => {}
            v => extra.push(format!("{flag}={v}")),
        }
    }
    args.extend(extra);
    Ok(args)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| usage(e.to_string())),
    }
}

fn resolve_limiter(a: &CheckArgs) -> Result<Limiter, Failure> {
    if let Some(path) = &a.file {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        return Ok(Limiter::parse_description(&name, &text)?);
    }
    let name = a.name.as_deref().unwrap_or_default();
    match a.kappa {
        Some(k) => Ok(Limiter::from_catalog(name, Some(k))?),
        None => Ok(name.parse()?),
    }
}

fn cmd_check(a: &CheckArgs) -> Result<u8, Failure> {
    let l = resolve_limiter(a)?;
    let mut reports: Vec<AdmissibilityReport> = vec![check_monotonicity(&l), check_convexity(&l)];
    if let Some(alpha) = a.alpha {
        reports.push(check_tvd_region(&l, alpha)?);
    }
    if a.second_order {
        reports.push(check_second_order_extremum(&l));
    }
    if let Some(delta) = a.delta {
        reports.push(check_extremum_identity(&l, delta)?);
    }
    let mut csv = format!("{}\n", AdmissibilityReport::CSV_HEADER);
    for r in &reports {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    write_out(a.out.as_deref(), &csv)?;
    let m = bound_m(&l);
    eprintln!(
        "{}: M = {}, max stable sigma = {}",
        l.name(),
        fmt_real(m),
        fmt_real(max_stable_sigma(&l))
    );
    Ok(if reports.iter().all(|r| r.passed) {
        0
    } else {
        EXIT_FAIL
    })
}

fn initial_state(kind: Initial, n: usize) -> Result<GridState, Failure> {
    let f: fn(f64) -> f64 = match kind {
        Initial::Profile => |x| eval_profile(x).unwrap_or(f64::NAN),
        Initial::Sine => |x| (std::f64::consts::TAU * x).sin(),
        Initial::Square => |x| if (0.25..0.75).contains(&x) { 1.0 } else { 0.0 },
    };
    Ok(GridState::sample(n, f)?)
}

fn build_flux(a: &RunArgs, range: Interval) -> Result<NumericalFlux, Failure> {
    let spec = match a.problem {
        Problem::Advection => FluxSpec::advection(a.speed),
        Problem::Burgers => FluxSpec::burgers(),
    };
    let name = a.flux.as_deref().unwrap_or(match a.problem {
        Problem::Advection => "upwind",
        Problem::Burgers => "godunov",
    });
    let kind = match name {
        "lax_wendroff" | "lax_wendroff_type" => {
            let mu = a.mu.ok_or_else(|| usage("the lax_wendroff flux needs --mu"))?;
            FluxKind::LaxWendroffType { mu }
        }
        other => other.parse()?,
    };
    Ok(NumericalFlux::new(spec, kind, Some(range))?)
}

fn cmd_run(a: &RunArgs) -> Result<u8, Failure> {
    let scheme: TimeScheme = a.scheme.parse()?;
    let rec: Reconstruction = a.limiter.parse()?;
    let policy: CflPolicy = a.cfl.parse()?;
    if !(a.tfinal >= 0.0 && a.tfinal.is_finite()) {
        return Err(usage(format!("--tfinal must be a nonnegative number, got {}", a.tfinal)));
    }
    if a.snapshot_every == 0 {
        return Err(usage("--snapshot-every must be positive"));
    }
    let u0 = initial_state(a.initial, a.cells)?;
    let (lo, hi) = (u0.min(), u0.max());
    let pad = 1e-3 * (hi - lo).max(1.0);
    let nf = build_flux(a, Interval::new(lo - pad, hi + pad)?)?;
    let monitors = Monitors {
        tv: true,
        maxprin: true,
        harten: a.harten,
    };
    let cfg = SchemeConfig::new(scheme, rec, nf, a.sigma)?
        .with_monitors(monitors)
        .with_cfl_policy(policy);
    let every = a.snapshots.as_ref().map(|_| a.snapshot_every);
    let out = simulate(u0, &cfg, a.tfinal, every)?;

    let mut csv = format!("{}\n", TrajectoryRow::CSV_HEADER);
    for row in &out.trajectory {
        csv.push_str(&row.csv_row());
        csv.push('\n');
    }
    write_out(a.out.as_deref(), &csv)?;
    if let Some(path) = &a.snapshots {
        let mut s = String::from("snapshot,t,x,u\n");
        for (i, st) in out.snapshots.iter().enumerate() {
            for (j, u) in st.u().iter().enumerate() {
                s.push_str(&format!("{i},{},{},{}\n", fmt_real(st.t()), fmt_real(st.x(j)), fmt_real(*u)));
            }
        }
        write_out(Some(path), &s)?;
    }

    let mut summary = format!(
        "scheme={} limiter={} flux={} sigma={} cells={} steps={} dt={}\n\
         tv_increases={} maxprin_violations={} max_mass_drift={}\n",
        cfg.scheme,
        cfg.reconstruction,
        cfg.nflux.name(),
        a.sigma,
        a.cells,
        out.trajectory.len() - 1,
        fmt_real(out.dt),
        out.tv_increases,
        out.maxprin_violations,
        fmt_real(out.max_mass_drift),
    );
    if a.harten {
        summary.push_str(&format!("harten_failures={}\n", out.harten_failures));
    }
    if a.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(0)
}

fn cmd_convergence(a: &ConvergenceArgs) -> Result<u8, Failure> {
    if !(K_RANGE.start() <= &a.k_min && a.k_min < a.k_max && &a.k_max <= K_RANGE.end()) {
        return Err(usage(format!(
            "need {} <= k-min < k-max <= {}, got {} and {}",
            K_RANGE.start(),
            K_RANGE.end(),
            a.k_min,
            a.k_max
        )));
    }
    let scheme: TimeScheme = a.scheme.parse()?;
    let names: Vec<String> = if a.limiters.is_empty() {
        STUDY_RECONSTRUCTIONS.iter().map(|s| s.to_string()).collect()
    } else {
        a.limiters.iter().map(|s| s.trim().to_string()).collect()
    };
    let mut configs = Vec::with_capacity(names.len());
    for n in &names {
        configs.push(StudyConfig {
            scheme,
            reconstruction: n.parse()?,
            sigma: a.sigma,
        });
    }
    let table: ErrorTable = convergence_study(&configs, a.k_min..=a.k_max)?;
    // fit on the asymptotic window when the requested range covers enough of it
    let lo = a.k_min.max(*FIT_RANGE.start());
    let hi = a.k_max.min(*FIT_RANGE.end());
    let levels = if hi >= lo + 2 { lo..=hi } else { a.k_min..=a.k_max };
    write_out(a.out.as_deref(), &table.to_csv())?;
    let orders = table.orders_csv(levels);
    match (&a.orders, &a.out) {
        (Some(p), _) => write_out(Some(p), &orders)?,
        (None, Some(_)) => print!("{orders}"),
        (None, None) => eprint!("{orders}"),
    }
    Ok(0)
}

fn run(args: Vec<String>) -> Result<u8, Failure> {
    let args = merge_config(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return Ok(code);
        }
    };
    match &cli.command {
        Command::Limiter {
            command: LimiterCommand::Check(a),
        } => cmd_check(a),
        Command::Run(a) => cmd_run(a),
        Command::Convergence(a) => cmd_convergence(a),
    }
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
