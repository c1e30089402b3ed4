use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ceo_core::bounds::{
    bound_point, optimize_allocation, region_check, sweep_curves, CurveVariant, OptimizeMode, TestChannelPoint,
};
use ceo_core::codes::{presets, sample_ldgm, sample_ldpc, save_code, CodeMetadata, CodeRole};
use ceo_core::harness::{
    emit_curves, reproduce_table1, run_experiment, write_curves_csv, EmpiricalPoint, ExperimentConfig, RowOverrides,
};

#[derive(Parser)]
#[command(
    name = "ceo",
    version,
    about = "Binary CEO coding under log-loss: bounds, codes and simulation"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed; overrides the seed of a config or template.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for trials and grid searches.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Smaller blocks, coarser grids and doubled tolerances.
    #[arg(long, global = true)]
    quick: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an LDGM or LDPC code and save it as alist plus metadata.
    ConstructCode(ConstructArgs),
    /// Sum-rate and distortion bounds at one test-channel point.
    Bounds(BoundsArgs),
    /// Optimise the crossover allocation on a grid.
    Optimize(OptimizeArgs),
    /// Sum-rate/distortion series for a set of link variants.
    Sweep(SweepArgs),
    /// Run a Monte Carlo campaign from a config file.
    Simulate(SimulateArgs),
    /// Run rows of the published results table and compare.
    ReproduceTable1(ReproduceArgs),
    /// Write the curve bundle for the three figure families.
    EmitCurves(CurvesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Role {
    Ldgm,
    Ldpc,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    role: Role,
    /// Codeword length (LDGM only).
    #[arg(long)]
    n: Option<usize>,
    /// Information bits.
    #[arg(long)]
    m: usize,
    /// Syndrome bits (LDPC only).
    #[arg(long)]
    k: Option<usize>,
    /// Degree distribution preset.
    #[arg(long)]
    dd: String,
    #[arg(long)]
    d_target: Option<f64>,
    /// Output stem; `.alist` and `.meta` are appended.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<f64>,
    /// Per-link rates to test against the rate region.
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    /// Distortion for the region test; defaults to the bound itself.
    #[arg(long)]
    distortion: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptMode {
    Lagrangian,
    FixedDistortion,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, value_enum, default_value = "lagrangian")]
    mode: OptMode,
    #[arg(long)]
    mu: Option<f64>,
    /// Target distortion in fixed-distortion mode.
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    band: Option<f64>,
    #[arg(long)]
    grid: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    /// Variants such as `equal:1+2+3` or `opt:1+3`.
    #[arg(long, value_delimiter = ',', required = true)]
    variants: Vec<String>,
    #[arg(long)]
    grid: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    config: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    trial_csv: Option<PathBuf>,
    #[arg(long)]
    summary_csv: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Rows to run; all four by default.
    #[arg(long, value_delimiter = ',')]
    rows: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct CurvesArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    grid: Option<f64>,
    /// Simulated overlays as `FIGURE=CONFIG`, e.g. `fig6=row1.toml`.
    #[arg(long)]
    overlay: Vec<String>,
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn grid_step(explicit: Option<f64>, quick: bool) -> f64 {
    explicit.unwrap_or(if quick { 0.02 } else { 0.005 })
}

fn point_record(distortion: f64, sum_rate: f64, d: &[f64], variant: &str) -> Vec<String> {
    let mut rec = vec![distortion.to_string(), sum_rate.to_string()];
    rec.extend(d.iter().map(f64::to_string));
    rec.push(variant.to_string());
    rec
}

fn point_header(l: usize) -> Vec<String> {
    let mut h = vec!["distortion".to_string(), "sum_rate".to_string()];
    h.extend((1..=l).map(|i| format!("d_{i}")));
    h.push("variant".into());
    h
}

fn load_config(path: &PathBuf, g: &Global) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(seed) = g.seed {
        cfg.scenario.seed = seed;
    }
    if g.threads.is_some() {
        cfg.run.threads = g.threads;
    }
    Ok(cfg)
}

fn construct(args: &ConstructArgs, g: &Global) -> Result<()> {
    let dd = presets::lookup(&args.dd)?;
    let seed = g.seed.unwrap_or(1);
    let (matrix, meta) = match args.role {
        Role::Ldgm => {
            let n = args.n.context("--n is required for an LDGM code")?;
            let code = sample_ldgm(n, args.m, &dd, seed)?;
            let meta = CodeMetadata {
                role: CodeRole::Ldgm,
                n,
                m: args.m,
                k: None,
                d_target: args.d_target,
                seed,
                dd: args.dd.clone(),
            };
            (code.generator().clone(), meta)
        }
        Role::Ldpc => {
            let k = args.k.context("--k is required for an LDPC code")?;
            let code = sample_ldpc(args.m, k, &dd, seed)?;
            let meta = CodeMetadata {
                role: CodeRole::Ldpc,
                n: args.n.unwrap_or(args.m),
                m: args.m,
                k: Some(k),
                d_target: args.d_target,
                seed,
                dd: args.dd.clone(),
            };
            (code.parity().clone(), meta)
        }
    };
    save_code(&args.out, &matrix, &meta)?;
    println!("wrote {}.alist", args.out.display());
    Ok(())
}

fn bounds(args: &BoundsArgs) -> Result<()> {
    let point = TestChannelPoint::new(args.d.clone(), args.p.clone())?;
    let b = bound_point(&point);
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(point_header(point.l()))?;
    w.write_record(point_record(b.distortion, b.sum_rate, &point.d, "point"))?;
    w.flush()?;
    if let Some(rates) = &args.rates {
        if rates.len() != point.l() {
            bail!("{} rates for {} links", rates.len(), point.l());
        }
        let check = region_check(rates, args.distortion.unwrap_or(b.distortion), &point);
        if check.passed() {
            println!("region: pass");
        } else {
            for v in &check.rate_violations {
                println!(
                    "region: subset {:?} sends {:.5} < required {:.5}",
                    v.subset, v.rate_sum, v.required
                );
            }
            if !check.distortion_ok() {
                println!(
                    "region: distortion {:.5} below the bound {:.5}",
                    check.distortion, check.required_distortion
                );
            }
        }
    }
    Ok(())
}

fn optimize(args: &OptimizeArgs, g: &Global) -> Result<()> {
    let mode = match args.mode {
        OptMode::Lagrangian => OptimizeMode::Lagrangian {
            mu: args.mu.context("--mu is required in lagrangian mode")?,
        },
        OptMode::FixedDistortion => OptimizeMode::FixedDistortion {
            target: args.target.context("--target is required in fixed-distortion mode")?,
            band: args.band,
        },
    };
    let best = optimize_allocation(&args.p, mode, grid_step(args.grid, g.quick))?;
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(point_header(args.p.len()))?;
    w.write_record(point_record(
        best.bound.distortion,
        best.bound.sum_rate,
        &best.point.d,
        "optimum",
    ))?;
    w.flush()?;
    Ok(())
}

fn sweep(args: &SweepArgs, g: &Global) -> Result<()> {
    let variants = args
        .variants
        .iter()
        .map(|v| CurveVariant::parse(v))
        .collect::<ceo_core::Result<Vec<_>>>()?;
    let series = sweep_curves(&args.p, &variants, grid_step(args.grid, g.quick))?;
    let mut w = csv::Writer::from_writer(output(args.out.as_ref())?);
    w.write_record(point_header(args.p.len()))?;
    for s in &series {
        for pt in &s.points {
            w.write_record(point_record(pt.distortion, pt.sum_rate, &pt.d, &s.variant))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn simulate(args: &SimulateArgs, g: &Global) -> Result<()> {
    let mut cfg = load_config(&args.config, g)?;
    if let Some(t) = args.trials {
        cfg.run.trials = t;
    }
    if args.trial_csv.is_some() {
        cfg.run.trial_csv = args.trial_csv.clone();
    }
    if args.summary_csv.is_some() {
        cfg.run.summary_csv = args.summary_csv.clone();
    }
    let report = run_experiment(&cfg)?;
    if cfg.run.summary_csv.is_none() {
        report.write_summary_csv(io::stdout().lock())?;
    }
    let op = &report.operating_point;
    eprintln!(
        "D_em {:.4} (ci95 {:.4})  D_th {:.4}  gap {:.4}  sum rate {:.4}  shortfalls {}",
        op.d_em, report.d_em_ci95, op.d_th, op.gap, op.sum_rate, report.shortfalls
    );
    Ok(())
}

fn reproduce(args: &ReproduceArgs, g: &Global) -> Result<bool> {
    let rows = args.rows.clone().unwrap_or_else(|| vec![1, 2, 3, 4]);
    let overrides = RowOverrides {
        seed: g.seed,
        threads: g.threads,
        trials: args.trials,
    };
    let mut all = true;
    for row in rows {
        let report = reproduce_table1(row, g.quick, &overrides)?;
        print!("{}", report.render());
        all &= report.passed();
    }
    Ok(all)
}

fn curves(args: &CurvesArgs, g: &Global) -> Result<()> {
    let mut overlays = Vec::new();
    for spec in &args.overlay {
        let (figure, path) = spec
            .split_once('=')
            .with_context(|| format!("overlay {spec:?} must look like FIGURE=CONFIG"))?;
        let path = PathBuf::from(path);
        let report = run_experiment(&load_config(&path, g)?)?;
        let label = path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into());
        overlays.push(EmpiricalPoint::from_report(figure, &label, &report));
    }
    let rows = emit_curves(grid_step(args.grid, g.quick), &overlays)?;
    write_curves_csv(&rows, output(args.out.as_ref())?)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(threads) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().ok();
    }
    let g = &cli.global;
    match &cli.command {
        Command::ConstructCode(a) => construct(a, g)?,
        Command::Bounds(a) => bounds(a)?,
        Command::Optimize(a) => optimize(a, g)?,
        Command::Sweep(a) => sweep(a, g)?,
        Command::Simulate(a) => simulate(a, g)?,
        Command::ReproduceTable1(a) => return reproduce(a, g),
        Command::EmitCurves(a) => curves(a, g)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
