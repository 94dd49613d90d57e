//! `bpcu`: run the built-in experiments and convergence studies.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bpcu_core::experiments::{builtin, ExperimentConfig, ExperimentKind, VORTEX_COMPONENTS};
use bpcu_core::{convergence, run, SchemeVariant, SolverError};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bpcu", version, about = "Bound-preserving central-upwind solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its snapshots and diagnostics.
    Run(RunArgs),
    /// L1 errors and convergence orders of the vortex over several meshes.
    Convergence(ConvergenceArgs),
    /// List the built-in experiments.
    List,
}

#[derive(Args)]
struct Common {
    /// Built-in experiment name.
    #[arg(long)]
    experiment: Option<String>,
    /// Key-value file overriding the built-in settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scheme variant: bpcu, cu, nodiff or glf.
    #[arg(long)]
    scheme: Option<SchemeVariant>,
    /// CFL fraction, at most 0.5.
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Cells in x; `ny` follows the aspect ratio unless given.
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated mesh parameters `n` with `dx = dy = 1/n`.
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    meshes: Vec<usize>,
}

fn load(c: &Common, default_kind: Option<ExperimentKind>) -> Result<ExperimentConfig> {
    let kind = match &c.experiment {
        Some(name) => Some(ExperimentKind::from_name(name)?),
        None => default_kind,
    };
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut cfg = match kind {
                Some(k) => builtin(k),
                None => ExperimentConfig::from_ini(&text, None)?,
            };
            cfg.apply_ini(&text).with_context(|| format!("in {}", path.display()))?;
            cfg
        }
        None => match kind {
            Some(k) => builtin(k),
            None => bail!("either --experiment or --config is required"),
        },
    };
    if let Some(s) = c.scheme {
        cfg.step.variant = s;
    }
    if let Some(nu) = c.cfl {
        cfg.step.cfl = nu;
    }
    if let Some(t) = c.tfinal {
        cfg.set_t_final(t);
    }
    Ok(cfg)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("BPCU_THREADS") {
        let n: usize = v.parse().with_context(|| format!("BPCU_THREADS={v}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let mut cfg = load(&args.common, None)?;
    if let Some(nx) = args.nx {
        cfg.set_nx(nx);
    }
    if let Some(ny) = args.ny {
        cfg.ny = ny;
    }
    let summary = run(&cfg, Some(&args.common.out))?;
    let d = &summary.diagnostics;
    let [a, b] = d.monitored_names;
    let [ma, mb] = d.overall_minima();
    println!(
        "{} ({}, {}x{}): {} steps, t = {}",
        cfg.name(),
        cfg.step.variant,
        cfg.nx,
        cfg.ny,
        d.steps(),
        summary.t
    );
    println!("{a} = {ma:e}, {b} = {mb:e}");
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    if let Some(v) = &d.violation {
        println!("bound violation: {v}");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_convergence(args: ConvergenceArgs) -> Result<ExitCode> {
    let cfg = load(&args.common, Some(ExperimentKind::Vortex))?;
    let table = convergence(&cfg, &args.meshes, Some(&args.common.out))?;
    print!("{:>10}", "dx");
    for c in VORTEX_COMPONENTS {
        print!("{:>12}{:>7}", format!("err_{c}"), "rate");
    }
    println!();
    for (n, r) in args.meshes.iter().zip(&table) {
        print!("{:>10}", format!("1/{n}"));
        for (i, e) in r.errors.iter().enumerate() {
            match &r.orders {
                Some(o) => print!("{e:>12.3e}{:>7.2}", o[i]),
                None => print!("{e:>12.3e}{:>7}", "--"),
            }
        }
        println!();
    }
    println!("wrote {}", args.common.out.join("convergence.csv").display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::List => {
            for k in ExperimentKind::ALL {
                println!("{}", k.name());
            }
            Ok(ExitCode::SUCCESS)
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let violation = e
                .downcast_ref::<SolverError>()
                .is_some_and(|s| matches!(s, SolverError::Violation(_)));
            ExitCode::from(if violation { 2 } else { 1 })
        }
    }
}
