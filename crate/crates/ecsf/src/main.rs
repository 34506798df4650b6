//! Thin command-line front end over the library stages.

use clap::{Args, Parser, Subcommand};
use ecsf::config::RunConfig;
use ecsf::seeds::SeedKind;
use ecsf::{flow, io, monitors, pipeline, plot};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ecsf",
    about = "Equivariant curve shortening flow of figure-eight profile curves",
    version
)]
struct Cli {
    /// JSON config file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Treat warnings (missing plot inputs) as errors.
    #[arg(long, global = true)]
    strict: bool,
    /// Validate the configuration and exit without writing anything.
    #[arg(long, global = true)]
    dry_run: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the seed curve and write it as CSV and JSON.
    Seed,
    /// Run the flow and write series, snapshots and summary.
    Run(RunArgs),
    /// Check a run directory against the monotone/conserved quantities.
    Verify {
        /// Run directory (defaults to the output directory).
        dir: Option<PathBuf>,
    },
    /// Capture rescaled frames and classify the singularity.
    Blowup(BlowupArgs),
    /// Emit SVG plots for a run directory.
    Plot {
        dir: Option<PathBuf>,
    },
    /// seed -> run -> verify -> blowup -> plot with a hashed manifest.
    Pipeline {
        /// JSON file with an array of configs to run concurrently.
        #[arg(long)]
        sweep: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Seed kind: whitney, perturbed_whitney or circle.
    #[arg(long)]
    seed: Option<String>,
    /// Ambient complex dimension.
    #[arg(long)]
    m: Option<u32>,
    /// Seed segment count.
    #[arg(long = "n-nodes")]
    n_nodes: Option<usize>,
    /// Parabolic CFL constant.
    #[arg(long)]
    cfl: Option<f64>,
    /// Stop threshold as a multiple of the initial max|A|.
    #[arg(long = "a-stop")]
    a_stop: Option<f64>,
    /// Run output directory.
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct BlowupArgs {
    dir: Option<PathBuf>,
    /// Rescaled window half-width.
    #[arg(long)]
    window: Option<f64>,
    /// Capture-level spacing.
    #[arg(long)]
    rho: Option<f64>,
    /// First capture level as a multiple of the initial max|k|.
    #[arg(long)]
    a0: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli_config: &Option<PathBuf>) -> ecsf::Result<RunConfig> {
    match cli_config {
        Some(path) => RunConfig::parse(path),
        None => Ok(RunConfig::default()),
    }
}

fn out_dir(cli: &Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    cli.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir))
}

fn dispatch(cli: Cli) -> ecsf::Result<ExitCode> {
    let mut cfg = load_config(&cli.config)?;
    match cli.command {
        Command::Seed => {
            cfg.validate()?;
            if cli.dry_run {
                println!("config ok: seed {:?}, m = {}", cfg.seed.kind, cfg.flow.m);
                return Ok(ExitCode::SUCCESS);
            }
            let dir = out_dir(&cli.out, &cfg);
            let seed = cfg.seed_spec().build()?;
            io::write_curve_csv(&dir.join("seed.csv"), &seed)?;
            io::write_curve_json(&dir.join("seed.json"), &seed)?;
            println!(
                "wrote {} and {} ({} nodes)",
                dir.join("seed.csv").display(),
                dir.join("seed.json").display(),
                seed.node_count()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => {
            apply_run_overrides(&mut cfg, &args)?;
            cfg.validate()?;
            if cli.dry_run {
                println!("config ok");
                return Ok(ExitCode::SUCCESS);
            }
            let dir = args
                .out_dir
                .clone()
                .unwrap_or_else(|| out_dir(&cli.out, &cfg));
            let seed = cfg.seed_spec().build()?;
            io::write_curve_csv(&dir.join("seed.csv"), &seed)?;
            io::write_curve_json(&dir.join("seed.json"), &seed)?;
            let history = flow::run(&seed, &cfg.flow_config())?;
            io::write_history(&dir, &history)?;
            println!(
                "run finished: {:?}, {} steps, t = {:.6e}, max|A| growth {:.1}x",
                history.termination,
                history.series.len() - 1,
                history.t_final(),
                history.series.last().map(|s| s.max_a).unwrap_or(f64::NAN)
                    / history.initial_max_a
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { dir } => {
            let dir = dir.unwrap_or_else(|| out_dir(&cli.out, &cfg));
            let history = io::read_history(&dir)?;
            let report = monitors::check_history_with(
                &history,
                monitors::MonitorOptions {
                    growth_horizon: cfg.monitors.growth_horizon,
                },
            );
            io::write_report(&dir, &report)?;
            print!("{}", io::report_txt(&report));
            Ok(if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Blowup(args) => {
            if let Some(w) = args.window {
                cfg.blowup.window = w;
            }
            if let Some(r) = args.rho {
                cfg.blowup.rho = r;
            }
            if let Some(a0) = args.a0 {
                cfg.blowup.a0_factor = a0;
            }
            cfg.validate()?;
            let dir = args.dir.clone().unwrap_or_else(|| out_dir(&cli.out, &cfg));
            let history = io::read_history(&dir)?;
            let (doc, _) = pipeline::blowup_stage(&cfg, &history, &dir)?;
            println!("{}", doc.detail);
            Ok(if doc.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Plot { dir } => {
            let dir = dir.unwrap_or_else(|| out_dir(&cli.out, &cfg));
            let written = plot::emit_plots(&dir, cli.strict)?;
            for w in &written {
                println!("wrote {}", dir.join(w).display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Pipeline { sweep } => {
            if let Some(sweep_path) = sweep {
                let configs = load_sweep(&sweep_path)?;
                let dir = out_dir(&cli.out, &cfg);
                if cli.dry_run {
                    println!("sweep config ok: {} runs", configs.len());
                    return Ok(ExitCode::SUCCESS);
                }
                let outcomes = pipeline::run_sweep(&configs, &dir, cli.strict)?;
                let mut ok = true;
                for (i, o) in outcomes.iter().enumerate() {
                    println!(
                        "sweep {i:04}: {}",
                        if o.ok { "pass" } else { "FAIL" }
                    );
                    ok &= o.ok;
                }
                return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
            }
            let dir = out_dir(&cli.out, &cfg);
            let outcome = pipeline::run_pipeline(&cfg, &dir, cli.strict, cli.dry_run)?;
            for s in &outcome.stages {
                println!(
                    "{:9} {:7} {}",
                    s.name,
                    match s.status {
                        pipeline::StageStatus::Ok => "ok",
                        pipeline::StageStatus::Failed => "FAILED",
                        pipeline::StageStatus::Skipped => "skipped",
                    },
                    s.detail
                );
            }
            Ok(if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn apply_run_overrides(cfg: &mut RunConfig, args: &RunArgs) -> ecsf::Result<()> {
    if let Some(kind) = &args.seed {
        cfg.seed.kind = match kind.as_str() {
            "whitney" => SeedKind::Whitney,
            "perturbed_whitney" => SeedKind::PerturbedWhitney,
            "circle" => SeedKind::Circle,
            other => {
                return Err(ecsf::Error::Config(format!(
                    "unknown seed kind {other:?} (expected whitney, perturbed_whitney or circle)"
                )))
            }
        };
    }
    if let Some(m) = args.m {
        cfg.flow.m = m;
    }
    if let Some(n) = args.n_nodes {
        cfg.seed.n = n;
    }
    if let Some(cfl) = args.cfl {
        cfg.flow.cfl = cfl;
    }
    if let Some(a) = args.a_stop {
        cfg.flow.a_stop_factor = a;
    }
    Ok(())
}

fn load_sweep(path: &Path) -> ecsf::Result<Vec<RunConfig>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ecsf::Error::Config(format!("cannot read sweep {}: {e}", path.display())))?;
    let raw: Vec<serde_json::Value> = serde_json::from_str(&text)
        .map_err(|e| ecsf::Error::Config(format!("malformed sweep: {e}")))?;
    raw.iter()
        .map(|v| RunConfig::parse_str(&v.to_string()))
        .collect()
}
