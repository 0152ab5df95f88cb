use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sos_harmonic::coords::{cartesian_to_sos, compute_w, metrics_at, trig_at_point};
use sos_harmonic::grid::{evaluate_grid, GridSpec, Quantity};
use sos_harmonic::par::Execution;
use sos_harmonic::series::region_of;
use sos_harmonic::solution::{fit_boundary, HarmonicSolution};
use sos_harmonic::verify::{run_verification, Level, TableFixture};
use sos_harmonic::{CartesianPoint, SosError, SosPoint, SystemConfig};

#[derive(Parser)]
#[command(name = "sos", version, about = "Similar oblate spheroidal coordinates and interior harmonic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate coordinates, metrics and optionally V at one point
    #[command(allow_negative_numbers = true)]
    Eval(EvalArgs),
    /// Sample a quantity on a meridional (x, z) grid as CSV
    #[command(allow_negative_numbers = true)]
    Grid(GridArgs),
    /// Run the self-check suite
    Verify(VerifyArgs),
    /// Fit coefficients to samples on the reference spheroid
    Fit(FitArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// System config JSON: {"mu": .., "R0": ..}
    #[arg(long)]
    config: PathBuf,
    /// Equatorial radius of the point's spheroid
    #[arg(long = "R", requires = "nu", conflicts_with_all = ["x", "z"])]
    r: Option<f64>,
    /// Latitude in radians
    #[arg(long, requires = "r")]
    nu: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Cylindrical distance from the axis (same units as R0)
    #[arg(long, requires = "z")]
    x: Option<f64>,
    /// Height above the equatorial plane (same units as R0)
    #[arg(long, requires = "x")]
    z: Option<f64>,
    /// Coefficient JSON; adds V to the record
    #[arg(long)]
    coeffs: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    config: PathBuf,
    /// Grid bounds are in units of R0
    #[arg(long, default_value_t = 0.0)]
    x_min: f64,
    #[arg(long, default_value_t = 2.0)]
    x_max: f64,
    #[arg(long, default_value_t = 0.0)]
    z_min: f64,
    #[arg(long, default_value_t = 2.0)]
    z_max: f64,
    #[arg(long, default_value_t = 101)]
    nx: usize,
    #[arg(long, default_value_t = 101)]
    nz: usize,
    /// One of s, V, hR, W
    #[arg(long, default_value = "s")]
    quantity: Quantity,
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// Write CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate on the calling thread only
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "quick")]
    level: Level,
    /// Numeric coefficient tables to check instead of the built-in ones
    #[arg(long)]
    table_fixture: Option<PathBuf>,
    /// Print the JSON report instead of the text one
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this file
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV with header `nu,V`
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    degree: usize,
    #[arg(long)]
    second_kind: bool,
    /// Write the coefficient JSON here; otherwise it goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<SosError> for Failure {
    fn from(e: SosError) -> Self {
        let code = match e {
            SosError::InvalidInput(_) => 2,
            _ => 3,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<SystemConfig, Failure> {
    let cfg: SystemConfig =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

fn load_solution(path: &Path, cfg: &SystemConfig) -> Result<HarmonicSolution, Failure> {
    let sol = HarmonicSolution::from_json(&read(path)?)?;
    if sol.config() != cfg {
        return Err(Failure::usage(format!(
            "{}: coefficients are for mu = {}, R0 = {}, config has mu = {}, R0 = {}",
            path.display(),
            sol.config().mu,
            sol.config().r0,
            cfg.mu,
            cfg.r0
        )));
    }
    Ok(sol)
}

fn write_out(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct EvalRecord {
    #[serde(rename = "R")]
    r: f64,
    nu: f64,
    lambda: f64,
    #[serde(rename = "W")]
    w: Option<f64>,
    region: &'static str,
    #[serde(rename = "h_R")]
    h_r: f64,
    h_nu: Option<f64>,
    jacobian: Option<f64>,
    #[serde(rename = "f_S")]
    f_s: f64,
    #[serde(rename = "f_C")]
    f_c: f64,
    s: f64,
    #[serde(rename = "V", skip_serializing_if = "Option::is_none")]
    v: Option<f64>,
}

fn cmd_eval(args: EvalArgs) -> CliResult {
    let cfg = load_config(&args.config)?;
    let p = match (args.r, args.nu, args.x, args.z) {
        (Some(r), Some(nu), None, None) => SosPoint::new(r, nu, args.lambda),
        (None, None, Some(x), Some(z)) => {
            let mut p = cartesian_to_sos(&CartesianPoint::new(x, 0.0, z), &cfg)?;
            p.lambda = args.lambda;
            p
        }
        _ => return Err(Failure::usage("give the point as --R/--nu or as --x/--z")),
    };
    let sol = args.coeffs.as_deref().map(|c| load_solution(c, &cfg)).transpose()?;
    let w = compute_w(p.r, p.nu, &cfg).unwrap_or(f64::INFINITY);
    let t = trig_at_point(p.r, p.nu, &cfg)?;
    let metrics = match metrics_at(p.r, p.nu, &cfg) {
        Ok(m) => Some(m),
        Err(SosError::PoleLimit) => None,
        Err(e) => return Err(e.into()),
    };
    let v = sol.map(|s| s.eval_v(p.r, t.s)).transpose()?;
    let record = EvalRecord {
        r: p.r,
        nu: p.nu,
        lambda: p.lambda,
        w: w.is_finite().then_some(w),
        region: region_of(w, cfg.mu).as_str(),
        h_r: t.h_r,
        h_nu: metrics.map(|m| m.h_nu),
        jacobian: metrics.map(|m| m.jacobian),
        f_s: t.f_s,
        f_c: t.f_c,
        s: t.s,
        v,
    };
    let text = serde_json::to_string(&record).map_err(|e| Failure::usage(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn cmd_grid(args: GridArgs) -> CliResult {
    let cfg = load_config(&args.config)?;
    let spec = GridSpec {
        x_min: args.x_min,
        x_max: args.x_max,
        z_min: args.z_min,
        z_max: args.z_max,
        nx: args.nx,
        nz: args.nz,
    };
    spec.validate()?;
    let sol = args.coeffs.as_deref().map(|c| load_solution(c, &cfg)).transpose()?;
    if args.quantity == Quantity::V && sol.is_none() {
        return Err(Failure::usage("quantity V needs --coeffs"));
    }
    let exec = if args.sequential { Execution::Sequential } else { Execution::default() };
    let points = evaluate_grid(&cfg, &spec, args.quantity, sol.as_ref(), exec)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Failure::usage(e.to_string());
    w.write_record(["x", "z", "value"]).map_err(io_err)?;
    for p in &points {
        let value = p.value.map(|v| format!("{v:.16e}")).unwrap_or_default();
        w.write_record([format!("{:.16e}", p.x), format!("{:.16e}", p.z), value]).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::usage(e.to_string()))?;
    write_out(args.out.as_deref(), &String::from_utf8_lossy(&bytes))
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let cfg = load_config(&args.config)?;
    let fixture: Option<TableFixture> = match &args.table_fixture {
        Some(p) => Some(serde_json::from_str(&read(p)?).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let report = run_verification(&cfg, args.level, fixture.as_ref())?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(path) = &args.report {
        write_out(Some(path), &format!("{json}\n"))?;
    }
    if args.json {
        println!("{json}");
    } else {
        println!("{report}");
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure { code: 1, message: "verification failed".into() })
    }
}

fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, Failure> {
    let bad = |e: csv::Error| Failure::usage(format!("{}: {e}", path.display()));
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(bad)?;
    let headers = r.headers().map_err(bad)?;
    if headers.iter().collect::<Vec<_>>() != ["nu", "V"] {
        return Err(Failure::usage(format!("{}: expected header `nu,V`", path.display())));
    }
    r.deserialize().collect::<Result<Vec<(f64, f64)>, _>>().map_err(bad)
}

fn cmd_fit(args: FitArgs) -> CliResult {
    let cfg = load_config(&args.config)?;
    let samples = read_samples(&args.samples)?;
    let fit = fit_boundary(&samples, args.degree, &cfg, args.second_kind)?;
    let json = format!("{}\n", fit.solution.to_json());
    let diagnostics = format!(
        "residual_norm {:e}\ncondition_number {:e}\nrank {}",
        fit.residual_norm, fit.condition_number, fit.rank
    );
    match &args.out {
        Some(p) => {
            write_out(Some(p), &json)?;
            println!("{diagnostics}");
        }
        None => {
            print!("{json}");
            eprintln!("{diagnostics}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Fit(a) => cmd_fit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sos: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
