//! Experiment harness: reproducible runs of the simulation, integration,
//! expectation, and roughness pipelines with CSV/JSON outputs.
//!
//! Every run writes a manifest recording the configuration hash and a
//! checksum per emitted file; equal hashes reproduce byte-identical
//! payloads. Exit codes: 0 success, 1 usage error, 2 numerical failure,
//! 3 acceptance failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grough::io::{config_hash, load_path_csv, write_level2_csv, write_table_csv};
use grough::{
    bang_bang_family, constant_lattice_family, dyadic_roughness, exponential_tail_check,
    gubinelli_integral, ito_integral, ito_lift, ito_vs_rough_equivalence, lower_expectation_pde,
    mc_upper_expectation, midpoint_convergence, norris_scaling_family, pde_expectation,
    quadratic_variation, roughness_tail_experiment, stratonovich_integral, stratonovich_lift,
    uniqueness_check, AlphaParams, ControlKind, ControlledPath, EnsembleConfig, GridPath,
    NorrisCalibration, Partition, Payoff, TimeGrid, VolatilityBand,
};

mod config;

use config::FileConfig;

/// Default output directory comes from `GROUGH_OUT_DIR` when set.
fn default_out_dir() -> PathBuf {
    std::env::var_os("GROUGH_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

#[derive(Parser)]
#[command(
    name = "grough",
    version,
    about = "G-Brownian motion through rough paths: simulation, integration, expectations, roughness"
)]
struct Cli {
    /// Optional TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $GROUGH_OUT_DIR or ./out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
struct BandArgs {
    #[arg(long, default_value_t = 0.5)]
    sigma_low: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_high: f64,
    #[arg(long, default_value_t = 1)]
    dim: usize,
}

impl BandArgs {
    fn band(&self) -> grough::Result<VolatilityBand> {
        if self.dim != 1 {
            return Err(grough::Error::InvalidParameter(
                "the harness drives one-dimensional experiments; use the library for d > 1".into(),
            ));
        }
        VolatilityBand::scalar(self.sigma_low, self.sigma_high)
    }
}

#[derive(Args, Debug, Clone, serde::Serialize)]
struct GridArgs {
    #[arg(long, default_value_t = 1 << 12)]
    n_steps: usize,
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
}

impl GridArgs {
    fn grid(&self) -> grough::Result<TimeGrid> {
        TimeGrid::new(self.horizon, self.n_steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
enum ControlArg {
    Constant,
    Piecewise,
    BangBang,
}

impl ControlArg {
    fn name(self) -> &'static str {
        match self {
            ControlArg::Constant => "constant",
            ControlArg::Piecewise => "piecewise_constant",
            ControlArg::BangBang => "feedback_bang_bang",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum LiftArg {
    Ito,
    Strat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
enum ControlledArg {
    Identity,
    Square,
    CustomCsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Pde,
    Mc,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum IntegrandArg {
    Constant,
    Coordinate,
    Square,
    ItoProcess,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum IntegralKindArg {
    Ito,
    Strat,
    Cross,
    Midpoint,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a path ensemble and write per-path statistics.
    Simulate {
        #[command(flatten)]
        band: BandArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1000)]
        n_paths: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ControlArg::Piecewise)]
        control: ControlArg,
        /// Write the first K sample paths in full.
        #[arg(long, default_value_t = 0)]
        write_paths: usize,
    },
    /// Lift a path file to its second-order data and write the blocks.
    Lift {
        /// Input path CSV (header t,x1,...,xd).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = LiftArg::Ito)]
        lift: LiftArg,
    },
    /// Rough integration of a controlled integrand along partitions.
    Integrate {
        #[command(flatten)]
        band: BandArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ControlledArg::Identity)]
        controlled: ControlledArg,
        /// Path CSV for --controlled custom-csv (columns t,x1 for Y with
        /// x1 doubling as the derivative is not supported; custom uses Y
        /// read from file and Y' from finite differences).
        #[arg(long)]
        custom_csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = LiftArg::Ito)]
        lift: LiftArg,
        #[arg(long, default_value_t = 8)]
        partition_levels: u32,
    },
    /// Discrete stochastic integrals and gap tables.
    Integrals {
        #[command(flatten)]
        band: BandArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = IntegrandArg::Coordinate)]
        integrand: IntegrandArg,
        #[arg(long, value_enum, default_value_t = IntegralKindArg::Ito)]
        kind: IntegralKindArg,
        #[arg(long, default_value_t = 8)]
        partition_levels: u32,
    },
    /// Evaluate the sublinear expectation of a payoff.
    Gexp {
        #[arg(long, value_enum, default_value_t = PhiArg::Square)]
        phi: PhiArg,
        /// CSV with columns x,y for --phi custom (piecewise-linear payoff).
        #[arg(long)]
        phi_csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, default_value_t = 0.5)]
        sigma_low: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma_high: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 801)]
        nx: usize,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long, default_value_t = 256)]
        mc_steps: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Pathwise roughness estimation across seeds.
    Roughness {
        #[command(flatten)]
        band: BandArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 0.55)]
        theta: f64,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Scaling-family calibration and uniqueness diagnostics.
    Norris {
        #[command(flatten)]
        band: BandArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 0.45)]
        alpha: f64,
        #[arg(long, default_value_t = 0.55)]
        theta: f64,
        #[arg(long, default_value_t = 24)]
        seeds: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Small-ball and supremum tail experiments.
    Tails {
        #[command(flatten)]
        band: BandArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 0.55)]
        theta: f64,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Run the full acceptance suite and print one line per criterion.
    Acceptance {
        /// Reduced smoke-test scale.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
enum PhiArg {
    Square,
    NegSquare,
    Abs,
    Identity,
    X4,
    Custom,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error display.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e.downcast_ref::<grough::Error>() {
                Some(grough::Error::InvalidParameter(_))
                | Some(grough::Error::Parse { .. })
                | Some(grough::Error::DimensionMismatch(_))
                | Some(grough::Error::GridMismatch(_))
                | Some(grough::Error::DegenerateGrid(_)) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let file_cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| file_cfg.out_dir.clone().map(PathBuf::from))
        .unwrap_or_else(default_out_dir);
    std::fs::create_dir_all(&out_dir)?;
    match cli.command {
        Command::Simulate {
            band,
            grid,
            n_paths,
            seed,
            control,
            write_paths,
        } => {
            let spec = grough::harness::SimulateSpec {
                sigma_low: file_cfg.sigma_low.unwrap_or(band.sigma_low),
                sigma_high: file_cfg.sigma_high.unwrap_or(band.sigma_high),
                dim: file_cfg.dim.unwrap_or(band.dim),
                n_steps: file_cfg.n_steps.unwrap_or(grid.n_steps),
                horizon: file_cfg.horizon.unwrap_or(grid.horizon),
                n_paths: file_cfg.n_paths.unwrap_or(n_paths),
                seed: file_cfg.seed.unwrap_or(seed),
                control_kind: file_cfg
                    .control_kind
                    .clone()
                    .unwrap_or_else(|| control.name().to_string()),
                write_paths,
            };
            let manifest = grough::harness::run_simulate(&spec, &out_dir)?;
            println!(
                "simulate: {} outputs in {}, config {}",
                manifest.outputs.len(),
                out_dir.display(),
                &manifest.config_hash[..12]
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Lift { input, lift } => cmd_lift(&input, lift, &out_dir),
        Command::Integrate {
            band,
            grid,
            seed,
            controlled,
            custom_csv,
            lift,
            partition_levels,
        } => cmd_integrate(
            &band,
            &grid,
            seed,
            controlled,
            custom_csv.as_deref(),
            lift,
            partition_levels,
            &out_dir,
        ),
        Command::Integrals {
            band,
            grid,
            seed,
            integrand,
            kind,
            partition_levels,
        } => cmd_integrals(&band, &grid, seed, integrand, kind, partition_levels, &out_dir),
        Command::Gexp {
            phi,
            phi_csv,
            method,
            sigma_low,
            sigma_high,
            t,
            nx,
            paths,
            mc_steps,
            seed,
        } => cmd_gexp(
            phi, phi_csv.as_deref(), method, sigma_low, sigma_high, t, nx, paths, mc_steps, seed,
            &out_dir,
        ),
        Command::Roughness {
            band,
            grid,
            theta,
            n_max,
            seeds,
            seed,
        } => cmd_roughness(&band, &grid, theta, n_max, seeds, seed, &out_dir),
        Command::Norris {
            band,
            grid,
            alpha,
            theta,
            seeds,
            seed,
        } => cmd_norris(&band, &grid, alpha, theta, seeds, seed, &out_dir),
        Command::Tails {
            band,
            grid,
            theta,
            seeds,
            seed,
        } => cmd_tails(&band, &grid, theta, seeds, seed, &out_dir),
        Command::Acceptance { quick } => {
            let params = if quick {
                grough::acceptance::AcceptanceParams::quick()
            } else {
                grough::acceptance::AcceptanceParams::default()
            };
            let outcomes = grough::acceptance::run_all(&params);
            let mut rows = Vec::new();
            for o in &outcomes {
                println!("{}", o.line());
                rows.push(vec![
                    o.index as f64,
                    if o.passed { 1.0 } else { 0.0 },
                    o.seconds,
                ]);
            }
            write_table_csv(
                &["criterion", "passed", "seconds"],
                &rows,
                &out_dir.join("acceptance.csv"),
            )?;
            let all_pass = outcomes.iter().all(|o| o.passed);
            if all_pass {
                println!("acceptance: all {} criteria pass", outcomes.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!(
                    "acceptance: {} of {} criteria FAILED",
                    outcomes.iter().filter(|o| !o.passed).count(),
                    outcomes.len()
                );
                Ok(ExitCode::from(3))
            }
        }
    }
}

fn sample_scalar_path(
    band: &BandArgs,
    grid: &GridArgs,
    seed: u64,
) -> anyhow::Result<grough::SamplePath> {
    let band = band.band()?;
    let grid = grid.grid()?;
    let control = grough::sample_control(&band, &ControlKind::PiecewiseConstant, grid, seed)?;
    Ok(grough::sample_gbm_path(&control, seed)?)
}

fn cmd_lift(input: &std::path::Path, lift: LiftArg, out_dir: &std::path::Path) -> anyhow::Result<ExitCode> {
    let path = load_path_csv(input)?;
    let ito = ito_lift(&path);
    let rp = match lift {
        LiftArg::Ito => ito,
        LiftArg::Strat => {
            let qv = quadratic_variation(&path);
            stratonovich_lift(&ito, &qv)?
        }
    };
    let out = out_dir.join("level2.csv");
    write_level2_csv(rp.level2(), &out)?;
    let summary = serde_json::json!({
        "input": input.display().to_string(),
        "lift": rp.lift_kind().to_string(),
        "n_steps": rp.grid().n_steps(),
        "dim": rp.dim(),
        "output": out.display().to_string(),
    });
    let json_path = out_dir.join("lift.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&summary)?)?;
    println!("lift: wrote {} and {}", out.display(), json_path.display());
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_integrate(
    band: &BandArgs,
    grid: &GridArgs,
    seed: u64,
    controlled: ControlledArg,
    custom_csv: Option<&std::path::Path>,
    lift: LiftArg,
    partition_levels: u32,
    out_dir: &std::path::Path,
) -> anyhow::Result<ExitCode> {
    let sp = sample_scalar_path(band, grid, seed)?;
    let ito = ito_lift(&sp.b);
    let rp = match lift {
        LiftArg::Ito => ito,
        LiftArg::Strat => {
            let qv = quadratic_variation(&sp.b);
            stratonovich_lift(&ito, &qv)?
        }
    };
    let cp = match controlled {
        ControlledArg::Identity => ControlledPath::coordinate(&rp)?,
        ControlledArg::Square => grough::controlled_lift_smooth(&grough::SquareFn, &rp)?,
        ControlledArg::CustomCsv => {
            let file = custom_csv.ok_or_else(|| {
                anyhow::anyhow!("--controlled custom-csv requires --custom-csv <file>")
            })?;
            let y = load_path_csv(file)?;
            y.check_same_grid(rp.path())?;
            // Gubinelli derivative from one-sided finite differences of Y
            // against the reference path.
            let n = y.grid().n_points();
            let mut yp = vec![0.0; n];
            #[allow(clippy::needless_range_loop)]
            for k in 0..n - 1 {
                let db = rp.path().value1(k + 1) - rp.path().value1(k);
                yp[k] = if db.abs() > 1e-14 {
                    (y.value1(k + 1) - y.value1(k)) / db
                } else {
                    0.0
                };
            }
            yp[n - 1] = yp[n - 2];
            ControlledPath::new(
                y,
                GridPath::scalar(*rp.grid(), yp)?,
                1,
                &rp,
            )?
        }
    };
    let max_level = partition_levels.min(grid.n_steps.ilog2());
    let levels: Vec<u32> = (0..=max_level).collect();
    let mut rows = Vec::new();
    for &level in &levels {
        let part = Partition::dyadic(rp.grid(), level)?;
        let report = gubinelli_integral(&cp, &rp, &part)?;
        rows.push(vec![
            level as f64,
            part.n_intervals() as f64,
            part.modulus(rp.grid()),
            report.value[0],
            report.max_local_error,
        ]);
    }
    let table = out_dir.join("integrate.csv");
    write_table_csv(
        &["level", "n_intervals", "modulus", "value", "max_local_error"],
        &rows,
        &table,
    )?;
    // Convergence report against the base-grid sum (left-point lift only).
    if rp.lift_kind() == grough::LiftKind::Ito {
        let eq = ito_vs_rough_equivalence(&cp, &rp, &levels)?;
        let eq_json = out_dir.join("equivalence.json");
        std::fs::write(&eq_json, serde_json::to_string_pretty(&eq)?)?;
        println!(
            "integrate: wrote {} and {} (exact: {})",
            table.display(),
            eq_json.display(),
            eq.exact
        );
    } else {
        println!("integrate: wrote {}", table.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_integrals(
    band: &BandArgs,
    grid: &GridArgs,
    seed: u64,
    integrand: IntegrandArg,
    kind: IntegralKindArg,
    partition_levels: u32,
    out_dir: &std::path::Path,
) -> anyhow::Result<ExitCode> {
    let sp = sample_scalar_path(band, grid, seed)?;
    let b = &sp.b;
    let y = match integrand {
        IntegrandArg::Constant => GridPath::constant(*b.grid(), &[1.0])?,
        IntegrandArg::Coordinate => b.clone(),
        IntegrandArg::Square => {
            let values: Vec<f64> = (0..b.grid().n_points())
                .map(|k| b.value1(k) * b.value1(k))
                .collect();
            GridPath::scalar(*b.grid(), values)?
        }
        IntegrandArg::ItoProcess => ito_integral(b, b)?,
    };
    match kind {
        IntegralKindArg::Ito => {
            let i = ito_integral(&y, b)?;
            write_cumulative(out_dir, "ito_integral.csv", b, &i)?;
        }
        IntegralKindArg::Strat => {
            let s = stratonovich_integral(&y, b)?;
            write_cumulative(out_dir, "stratonovich_integral.csv", b, &s)?;
        }
        IntegralKindArg::Cross => {
            let cv = grough::cross_variation(&y, b)?;
            write_cumulative(out_dir, "cross_variation.csv", b, &cv.path)?;
        }
        IntegralKindArg::Midpoint => {
            let levels: Vec<u32> = (0..=partition_levels.min(grid.n_steps.ilog2())).collect();
            let report = midpoint_convergence(&y, b, &levels)?;
            let rows: Vec<Vec<f64>> = report
                .rows
                .iter()
                .map(|r| vec![r.level as f64, r.modulus, r.gap])
                .collect();
            let table = out_dir.join("midpoint_gaps.csv");
            write_table_csv(&["level", "modulus", "gap"], &rows, &table)?;
            println!(
                "integrals: wrote {} (base value {:.6e}, exact: {})",
                table.display(),
                report.base_value,
                report.exact
            );
            return Ok(ExitCode::SUCCESS);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_cumulative(
    out_dir: &std::path::Path,
    name: &str,
    b: &GridPath,
    path: &GridPath,
) -> anyhow::Result<()> {
    let mut rows = Vec::with_capacity(b.grid().n_points());
    for k in 0..b.grid().n_points() {
        let mut row = vec![b.grid().time(k)];
        row.extend_from_slice(path.value(k));
        rows.push(row);
    }
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=path.dim()).map(|c| format!("v{c}")))
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let file = out_dir.join(name);
    write_table_csv(&header_refs, &rows, &file)?;
    println!("integrals: wrote {}", file.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_gexp(
    phi: PhiArg,
    phi_csv: Option<&std::path::Path>,
    method: MethodArg,
    sigma_low: f64,
    sigma_high: f64,
    t: f64,
    nx: usize,
    paths: usize,
    mc_steps: usize,
    seed: u64,
    out_dir: &std::path::Path,
) -> anyhow::Result<ExitCode> {
    let band = VolatilityBand::scalar(sigma_low, sigma_high)?;
    let payoff = match phi {
        PhiArg::Square => Payoff::Square,
        PhiArg::NegSquare => Payoff::NegSquare,
        PhiArg::Abs => Payoff::Abs,
        PhiArg::Identity => Payoff::Identity,
        PhiArg::X4 => Payoff::Quartic,
        PhiArg::Custom => {
            let file =
                phi_csv.ok_or_else(|| anyhow::anyhow!("--phi custom requires --phi-csv <file>"))?;
            load_piecewise_payoff(file)?
        }
    };
    #[derive(serde::Serialize)]
    struct GexpConfig<'a> {
        phi: &'a str,
        method: MethodArg,
        sigma_low: f64,
        sigma_high: f64,
        t: f64,
        nx: usize,
        paths: usize,
        mc_steps: usize,
        seed: u64,
    }
    let hash = config_hash(&GexpConfig {
        phi: payoff.name(),
        method,
        sigma_low,
        sigma_high,
        t,
        nx,
        paths,
        mc_steps,
        seed,
    })?;
    let mut report = serde_json::Map::new();
    report.insert("config_hash".into(), hash.clone().into());
    if matches!(method, MethodArg::Pde | MethodArg::Both) {
        let est = pde_expectation(payoff.clone(), &band, t, nx)?;
        let lower = lower_expectation_pde(payoff.clone(), &band, t, nx)?;
        // The solver is the reference route: it fills the top-level value.
        report.insert("value".into(), est.value.into());
        report.insert("ci".into(), est.ci_halfwidth.into());
        report.insert("method".into(), "pde".into());
        report.insert("pde".into(), serde_json::to_value(&est)?);
        report.insert("pde_lower".into(), serde_json::to_value(&lower)?);
        println!(
            "gexp pde: value = {:.6}, lower = {:.6}",
            est.value, lower.value
        );
    }
    if matches!(method, MethodArg::Mc | MethodArg::Both) {
        let grid = TimeGrid::new(t, mc_steps)?;
        let family = bang_bang_family(&band, &payoff);
        let est = mc_upper_expectation(&payoff, &band, &family, grid, paths, seed)?;
        println!(
            "gexp mc:  value = {:.6} ± {:.6} (lower bound over {} controls)",
            est.value,
            est.ci_halfwidth,
            est.per_control.len()
        );
        if method == MethodArg::Mc {
            report.insert("value".into(), est.value.into());
            report.insert("ci".into(), est.ci_halfwidth.into());
            report.insert("method".into(), "mc_sup".into());
        }
        report.insert("mc".into(), serde_json::to_value(&est)?);
        let lattice = constant_lattice_family(&band);
        let lattice_est = mc_upper_expectation(&payoff, &band, &lattice, grid, paths, seed)?;
        report.insert("mc_constant_lattice".into(), serde_json::to_value(&lattice_est)?);
    }
    let file = out_dir.join("gexp.json");
    std::fs::write(&file, serde_json::to_string_pretty(&report)?)?;
    println!("gexp: wrote {}", file.display());
    Ok(ExitCode::SUCCESS)
}

fn load_piecewise_payoff(file: &std::path::Path) -> anyhow::Result<Payoff> {
    let text = std::fs::read_to_string(file)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line.trim() == "x,y" {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
            anyhow::bail!("{}:{}: expected x,y", file.display(), i + 1);
        };
        xs.push(a.trim().parse::<f64>()?);
        ys.push(b.trim().parse::<f64>()?);
    }
    if xs.len() < 2 {
        anyhow::bail!("payoff table needs at least two points");
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        anyhow::bail!("payoff table x column must be strictly increasing");
    }
    Ok(Payoff::Custom(Arc::new(move |x| {
        if x <= xs[0] {
            return ys[0];
        }
        if x >= *xs.last().unwrap() {
            return *ys.last().unwrap();
        }
        let idx = xs.partition_point(|&v| v <= x) - 1;
        let w = (x - xs[idx]) / (xs[idx + 1] - xs[idx]);
        ys[idx] * (1.0 - w) + ys[idx + 1] * w
    })))
}

fn cmd_roughness(
    band: &BandArgs,
    grid: &GridArgs,
    theta: f64,
    n_max: u32,
    seeds: usize,
    seed: u64,
    out_dir: &std::path::Path,
) -> anyhow::Result<ExitCode> {
    let cfg = EnsembleConfig {
        band: band.band()?,
        control: ControlKind::PiecewiseConstant,
        grid: grid.grid()?,
        n_paths: seeds,
        seed,
    };
    let reports = grough::ensemble_map(&cfg, move |i, sp| {
        dyadic_roughness(&sp.b, theta, n_max, 1).map(|r| (i, r))
    })?;
    let mut rows = Vec::new();
    for r in reports {
        let (i, rep) = r?;
        rows.push(vec![i as f64, rep.d_theta, rep.l_theta_lower]);
    }
    let table = out_dir.join("roughness.csv");
    write_table_csv(&["seed_index", "d_theta", "l_theta_lower"], &rows, &table)?;
    let positive = rows.iter().filter(|r| r[2] > 0.0).count();
    println!(
        "roughness: wrote {} (theta = {theta}, positive lower bound in {positive}/{} seeds)",
        table.display(),
        rows.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_norris(
    band: &BandArgs,
    grid: &GridArgs,
    alpha: f64,
    theta: f64,
    seeds: usize,
    seed: u64,
    out_dir: &std::path::Path,
) -> anyhow::Result<ExitCode> {
    let band = band.band()?;
    let grid = grid.grid()?;
    let params = AlphaParams::new(alpha, theta, grid.horizon())?;
    let n_max = 10u32.min(grid.n_steps().ilog2());
    let report = norris_scaling_family(&grough::ScalingFamilyConfig {
        band: band.clone(),
        grid,
        lambdas: vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4],
        n_seeds: seeds,
        calibration_seeds: seeds.min(12),
        params,
        n_max,
        seed,
    })?;
    let rows: Vec<Vec<f64>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.seed_index as f64,
                r.lambda,
                r.sup_yz,
                r.sup_i,
                r.r_quantity,
            ]
        })
        .collect();
    let table = out_dir.join("norris_scaling.csv");
    write_table_csv(
        &["seed_index", "lambda", "sup_yz", "sup_i", "r_quantity"],
        &rows,
        &table,
    )?;
    // One uniqueness check on a perturbed pair, reported alongside.
    let calibration = report.calibration.unwrap_or(NorrisCalibration {
        log_m: 0.0,
        q: 1.0,
        r: 1.0,
        r2: 0.0,
    });
    let control = grough::sample_control(&band, &ControlKind::PiecewiseConstant, grid, seed)?;
    let sp = grough::sample_gbm_path(&control, seed)?;
    let rp = ito_lift(&sp.b);
    let y1 = ControlledPath::coordinate(&rp)?;
    let z1 = GridPath::constant(grid, &[1.0])?;
    let y2 = y1.axpy(1.0, &y1, 1e-6)?;
    let z2 = z1.scale(1.0 + 1e-6);
    let unique = uniqueness_check(&y1, &z1, &y2, &z2, &rp, &params, n_max, &calibration, 1e-4)?;
    let json = serde_json::json!({
        "slope_r": report.slope_r,
        "intercept": report.intercept,
        "r2": report.r2,
        "calibration": report.calibration,
        "uniqueness_example": unique,
    });
    let json_path = out_dir.join("norris.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&json)?)?;
    println!(
        "norris: slope r = {:.3} (r² = {:.4}); uniqueness flag {:?}; wrote {} and {}",
        report.slope_r,
        report.r2,
        unique.flag,
        table.display(),
        json_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_tails(
    band: &BandArgs,
    grid: &GridArgs,
    theta: f64,
    seeds: usize,
    seed: u64,
    out_dir: &std::path::Path,
) -> anyhow::Result<ExitCode> {
    let band = band.band()?;
    let grid = grid.grid()?;
    let n_max = 10u32.min(grid.n_steps().ilog2());
    // Pilot quantiles place the ε grid where frequencies are informative.
    let pilot = EnsembleConfig {
        band: band.clone(),
        control: ControlKind::ConstantValue(band.sigma_low),
        grid,
        n_paths: seeds,
        seed,
    };
    let mut ls: Vec<f64> = grough::ensemble_map(&pilot, move |_i, sp| {
        dyadic_roughness(&sp.b, theta, n_max, 1).map(|r| r.l_theta_lower)
    })?
    .into_iter()
    .collect::<grough::Result<Vec<_>>>()?;
    ls.sort_by(f64::total_cmp);
    let cap = 1.0 / (2.0 * grid.horizon().powf(theta));
    let mut eps_grid: Vec<f64> = (1..=8)
        .map(|k| ls[(k * ls.len()) / 10])
        .filter(|&e| e > 0.0 && e < cap)
        .collect();
    eps_grid.dedup();
    let small_ball =
        roughness_tail_experiment(&band, grid, theta, n_max, &eps_grid, seeds, seed)?;
    let rows: Vec<Vec<f64>> = small_ball
        .rows
        .iter()
        .map(|r| vec![r.eps, r.frequency])
        .collect();
    let t1 = out_dir.join("roughness_tails.csv");
    write_table_csv(&["eps", "frequency"], &rows, &t1)?;
    let sup_eps = [0.2, 0.25, 1.0 / 3.0, 0.5, 0.7];
    let sup_rows = exponential_tail_check(&band, grid, &sup_eps, seeds, seed)?;
    let rows: Vec<Vec<f64>> = sup_rows
        .iter()
        .map(|r| {
            vec![
                r.eps,
                r.frequency,
                r.bound,
                r.ci_halfwidth,
                if r.pass { 1.0 } else { 0.0 },
            ]
        })
        .collect();
    let t2 = out_dir.join("sup_tails.csv");
    write_table_csv(&["eps", "frequency", "bound", "ci_halfwidth", "pass"], &rows, &t2)?;
    let violations = sup_rows.iter().filter(|r| !r.pass).count();
    println!(
        "tails: small-ball slope = {:.3e} (r² = {:.3}); sup-tail rows = {} ({} above the reference bound); wrote {} and {}",
        small_ball.fitted_slope,
        small_ball.fitted_r2,
        sup_rows.len(),
        violations,
        t1.display(),
        t2.display()
    );
    Ok(ExitCode::SUCCESS)
}
