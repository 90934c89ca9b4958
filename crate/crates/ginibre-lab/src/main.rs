use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ginibre_core::complex_onepoint::Side;
use ginibre_core::quadrature::QuadOptions;
use ginibre_core::{Complex64, ShiftParams};
use ginibre_lab::commands::{
    besselcheck_table, density_table, mc_tables, onepoint_table, parse_symmetry, upper_edge, CommandError, Grid, Method,
    Report, BESSEL_GRID,
};
use ginibre_lab::io::{companion_path, gnuplot_hints, manifest_path, write_atomic, write_csv, IoError, RunManifest, Table};
use ginibre_lab::sampling::{worker_pool, EnsembleSpec};
use serde::Serialize;

const EXIT_NUMERICAL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ginibre-lab", version, about = "Resolvent traces and smallest singular values of shifted Ginibre matrices")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Common {
    /// Output CSV path; the manifest goes next to it with a .json extension.
    #[arg(long, global = true, default_value = "out.csv")]
    out: PathBuf,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_abs: f64,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_rel: f64,
    /// Also write a gnuplot script header next to the CSV.
    #[arg(long, global = true)]
    gnuplot_hints: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
struct EnergyGrid {
    /// Smallest energy; defaults depend on the subcommand.
    #[arg(long)]
    e_min: Option<f64>,
    /// Largest energy; defaults depend on the subcommand.
    #[arg(long)]
    e_max: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = 200)]
    e_points: usize,
    /// Space the grid logarithmically instead of linearly.
    #[arg(long)]
    log_grid: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MethodArg {
    Contour,
    Saddle,
    Rescaled,
    Real,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SideArg {
    PlusI0,
    NegativeAxis,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Limiting densities of Y and of its Hermitization.
    Density {
        /// δ = 1 − |z|², at most 1.
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[command(flatten)]
        grid: EnergyGrid,
    },
    /// Expected resolvent trace on an energy grid.
    Onepoint {
        /// Matrix size N.
        #[arg(long)]
        n: usize,
        /// Real part of the shift z.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        z_re: f64,
        /// Imaginary part of the shift z.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        z_im: f64,
        #[command(flatten)]
        grid: EnergyGrid,
        /// Exact contour formula, saddle-point term, critical rescaling or
        /// exact real-matrix formula.
        #[arg(long, value_enum, default_value_t = MethodArg::Contour)]
        method: MethodArg,
        /// Evaluate at E + i0 or at −E.
        #[arg(long, value_enum, default_value_t = SideArg::PlusI0)]
        side: SideArg,
    },
    /// Monte Carlo sampling of the smallest eigenvalue.
    Mc {
        /// Matrix size N.
        #[arg(long)]
        n: usize,
        /// Real part of the shift z.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        z_re: f64,
        /// Imaginary part of the shift z.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        z_im: f64,
        /// Symmetry class of the entries: real or complex.
        #[arg(long, default_value = "complex")]
        symmetry: String,
        /// Number of matrices drawn.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Master seed; per-sample seeds are derived from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Smallest rescaled x = λ₁/c(N, z) in the summary table.
        #[arg(long, default_value_t = 1e-3)]
        x_min: f64,
        /// Largest rescaled x in the summary table.
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        /// Number of logarithmically spaced summary points.
        #[arg(long, default_value_t = 41)]
        x_points: usize,
    },
    /// Kernel diagonal against the critical one-point function.
    Besselcheck {
        /// Smallest λ of the logarithmic grid.
        #[arg(long, default_value_t = BESSEL_GRID.min)]
        lambda_min: f64,
        /// Largest λ of the logarithmic grid.
        #[arg(long, default_value_t = BESSEL_GRID.max)]
        lambda_max: f64,
        /// Number of grid points.
        #[arg(long, default_value_t = BESSEL_GRID.points)]
        lambda_points: usize,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<CommandError> for Failure {
    fn from(error: CommandError) -> Self {
        match error {
            CommandError::Usage(message) => Failure::Usage(message),
            CommandError::Mc(e) => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(error: IoError) -> Self {
        Failure::Numerical(error.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match worker_pool(None) {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

fn energy_grid(grid: &EnergyGrid, default_min: f64, default_max: f64) -> Result<Vec<f64>, Failure> {
    Ok(Grid {
        min: grid.e_min.unwrap_or(default_min),
        max: grid.e_max.unwrap_or(default_max),
        points: grid.e_points,
        log: grid.log_grid,
    }
    .values()?)
}

fn shift_params(n: usize, z_re: f64, z_im: f64) -> Result<ShiftParams, Failure> {
    ShiftParams::new(n, Complex64::new(z_re, z_im)).map_err(|e| Failure::Usage(e.to_string()))
}

fn quad_options(common: &Common) -> Result<QuadOptions, Failure> {
    if !(common.tol_abs >= 0.0 && common.tol_rel >= 0.0 && common.tol_abs + common.tol_rel > 0.0) {
        return Err(Failure::Usage("tolerances must be non-negative and not both zero".into()));
    }
    Ok(QuadOptions::new(common.tol_abs, common.tol_rel))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let started = Instant::now();
    let common = &cli.common;
    let quad = quad_options(common)?;
    let mut seed = None;
    let mut outputs: Vec<(PathBuf, Table)> = Vec::new();
    let mut failed_rows = 0;
    let mut warnings = Vec::new();
    let mut absorb = |report: Report, path: PathBuf, outputs: &mut Vec<(PathBuf, Table)>| {
        failed_rows += report.failed_rows;
        warnings.extend(report.warnings);
        outputs.push((path, report.table));
    };
    match &cli.command {
        Command::Density { delta, grid } => {
            let edge = upper_edge(*delta)?;
            let energies = energy_grid(grid, if grid.log_grid { 1e-6 } else { 0.0 }, 1.05 * edge)?;
            absorb(density_table(*delta, &energies)?, common.out.clone(), &mut outputs);
        }
        Command::Onepoint {
            n,
            z_re,
            z_im,
            grid,
            method,
            side,
        } => {
            let params = shift_params(*n, *z_re, *z_im)?;
            let method = match method {
                MethodArg::Contour => Method::Contour,
                MethodArg::Saddle => Method::Saddle,
                MethodArg::Rescaled => Method::Rescaled,
                MethodArg::Real => Method::Real,
            };
            let side = match side {
                SideArg::PlusI0 => Side::PlusI0,
                SideArg::NegativeAxis => Side::NegativeAxis,
            };
            let energies = energy_grid(grid, 1e-2, 1.0)?;
            if energies.iter().any(|&e| !(e > 0.0)) {
                return Err(Failure::Usage("energies must be positive".into()));
            }
            absorb(onepoint_table(&params, &energies, method, side, quad), common.out.clone(), &mut outputs);
        }
        Command::Mc {
            n,
            z_re,
            z_im,
            symmetry,
            samples,
            seed: master_seed,
            x_min,
            x_max,
            x_points,
        } => {
            let spec = EnsembleSpec {
                n: *n,
                symmetry: parse_symmetry(symmetry)?,
                z: Complex64::new(*z_re, *z_im),
                n_samples: *samples,
                master_seed: *master_seed,
            };
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let x_grid = Grid {
                min: *x_min,
                max: *x_max,
                points: *x_points,
                log: true,
            }
            .values()?;
            seed = Some(*master_seed);
            let report = mc_tables(&spec, &x_grid)?;
            if let Some(ks) = report.ks_distance {
                eprintln!("Kolmogorov–Smirnov distance to the Edelman law: {ks:.4}");
            }
            if !report.failures.is_empty() {
                failed_rows += report.failures.len();
                warnings.push(format!("{} samples failed after all retries", report.failures.len()));
            }
            outputs.push((common.out.clone(), report.samples));
            outputs.push((companion_path(&common.out, "summary"), report.summary));
        }
        Command::Besselcheck {
            lambda_min,
            lambda_max,
            lambda_points,
        } => {
            let lambdas = Grid {
                min: *lambda_min,
                max: *lambda_max,
                points: *lambda_points,
                log: true,
            }
            .values()?;
            let check = besselcheck_table(&lambdas, quad)?;
            eprintln!("max rel_diff = {:.3e}", check.max_rel_diff);
            absorb(check.report, common.out.clone(), &mut outputs);
        }
    }

    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    let mut manifest = RunManifest::new(
        subcommand_name(&cli.command),
        serde_json::json!({ "common": common, "command": &cli.command }),
        seed,
    );
    for (path, table) in &outputs {
        write_csv(path, table)?;
        manifest.outputs.push(path.display().to_string());
        if common.gnuplot_hints {
            let script = script_path(path);
            write_atomic(&script, gnuplot_hints(path, table).as_bytes())?;
            manifest.outputs.push(script.display().to_string());
        }
    }
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    manifest.write(&manifest_path(&common.out))?;
    if failed_rows > 0 {
        return Err(Failure::Numerical(format!("{failed_rows} rows or samples failed")));
    }
    Ok(())
}

fn script_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("gp")
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::Density { .. } => "density",
        Command::Onepoint { .. } => "onepoint",
        Command::Mc { .. } => "mc",
        Command::Besselcheck { .. } => "besselcheck",
    }
}
