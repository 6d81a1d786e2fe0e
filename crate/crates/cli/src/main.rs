use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use coupled_cavities::exec::{init_workers_from_env, Exec, WORKERS_ENV};
use coupled_cavities::sweeps::{
    self, run_figure, run_sweep, run_sweep_to, Engine, FixedParams, GridOverrides, SweepAxis, SweepConfig, SweepSpec,
    DEFAULT_MIN_RETAINED_MASS,
};
use coupled_cavities::{validation, AtomicInitialState, TimeGrid};

#[derive(Parser)]
#[command(name = "cavsim", version, about = "Two atoms in two coupled thermal cavities")]
struct Cli {
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a single parameter point and print the time series as CSV.
    Simulate(SimulateArgs),
    /// Run a sweep described by a TOML config file.
    Sweep {
        config: PathBuf,
        /// Overrides the `output` key of the config.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a preset (fig2 .. fig8, panel names such as fig8a, or `all`).
    Figure(FigureArgs),
    /// Check the engines against closed forms and invariants.
    Validate,
}

#[derive(Args)]
struct SimulateArgs {
    /// e1g2, g1e2, e1e2, g1g2 or bell_plus
    #[arg(long, default_value = "e1g2")]
    initial_state: AtomicInitialState,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Photon hopping J/g.
    #[arg(long, short = 'J', default_value_t = 10.0)]
    hopping: f64,
    #[arg(long, default_value_t = 0.1)]
    n_bar: f64,
    #[arg(long, default_value_t = 1.0)]
    g1: f64,
    #[arg(long, default_value_t = 1.0)]
    g2: f64,
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// unitary or lindblad; decay rates select lindblad automatically.
    #[arg(long)]
    engine: Option<Engine>,
    #[arg(long, default_value_t = 50.0)]
    t_max: f64,
    #[arg(long, default_value_t = 500)]
    t_samples: usize,
    #[arg(long)]
    cutoff: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_MIN_RETAINED_MASS)]
    min_retained_mass: f64,
    /// Write CSV here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    name: String,
    #[arg(long, default_value = "figures")]
    out_dir: PathBuf,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_samples: Option<usize>,
    #[arg(long)]
    axis_samples: Option<usize>,
    #[arg(long)]
    cooperativity_samples: Option<usize>,
}

fn simulate(args: SimulateArgs, exec: Exec) -> Result<()> {
    let engine = args.engine.unwrap_or(if args.kappa > 0.0 || args.gamma > 0.0 {
        Engine::Lindblad
    } else {
        Engine::Unitary
    });
    let spec = SweepSpec {
        name: "simulate".into(),
        initial_state: args.initial_state,
        axis: SweepAxis::Hopping,
        axis_values: vec![args.hopping],
        times: TimeGrid::linspace(args.t_max, args.t_samples)?,
        fixed: FixedParams {
            delta: args.delta,
            hopping: args.hopping,
            n_bar: args.n_bar,
            g1: args.g1,
            g2: args.g2,
            kappa: args.kappa,
            gamma: args.gamma,
            gamma_over_kappa: None,
        },
        g1_tracks_hopping: false,
        engine,
        cutoff_override: args.cutoff,
        min_retained_mass: args.min_retained_mass,
        output: args.output.clone(),
        notes: vec![],
    };
    match &args.output {
        Some(path) => {
            run_sweep_to(&spec, path, exec)?;
            log::info!("wrote {}", path.display());
        }
        None => {
            let table = run_sweep(&spec, exec)?;
            std::io::stdout().lock().write_all(table.to_csv().as_bytes())?;
        }
    }
    Ok(())
}

fn sweep(config: PathBuf, output: Option<PathBuf>, exec: Exec) -> Result<()> {
    let cfg = SweepConfig::load(&config).with_context(|| format!("reading {}", config.display()))?;
    let spec = cfg.into_spec()?;
    let Some(path) = output.or_else(|| spec.output.clone()) else {
        let table = run_sweep(&spec, exec)?;
        std::io::stdout().lock().write_all(table.to_csv().as_bytes())?;
        return Ok(());
    };
    let table = run_sweep_to(&spec, &path, exec)?;
    log::info!("wrote {} rows to {}", table.rows.len(), path.display());
    Ok(())
}

fn figure(args: FigureArgs, exec: Exec) -> Result<()> {
    let mut grid = GridOverrides::default();
    if let Some(t) = args.t_max {
        grid.t_max = t;
    }
    if let Some(n) = args.t_samples {
        grid.t_samples = n;
    }
    if let Some(n) = args.axis_samples {
        grid.axis_samples = n;
    }
    if let Some(n) = args.cooperativity_samples {
        grid.cooperativity_samples = n;
    }
    for path in run_figure(&args.name, &args.out_dir, &grid, exec)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn validate(exec: Exec) -> Result<()> {
    let checks = validation::run_all(exec);
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        bail!("{failed} of {} checks failed", checks.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let workers = init_workers_from_env();
    log::debug!("{workers} workers ({WORKERS_ENV})");
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };

    let result = match cli.command {
        Command::Simulate(args) => simulate(args, exec),
        Command::Sweep { config, output } => sweep(config, output, exec),
        Command::Figure(args) => figure(args, exec),
        Command::Validate => validate(exec),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<coupled_cavities::Error>()
                .is_some_and(|e| matches!(e, coupled_cavities::Error::UnknownPreset(_)))
            {
                eprintln!("known presets: {}", sweeps::PRESET_NAMES.join(", "));
            }
            ExitCode::FAILURE
        }
    }
}
