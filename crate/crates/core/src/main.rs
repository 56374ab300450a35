use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use woc_core::environment::{ShockMode, SignalChannel};
use woc_core::harness::{self, emit_edges, emit_summary, emit_trace, ConfigOverrides, RunConfig, SweepGrid};
use woc_core::rng::derive_seed;
use woc_core::stats::mean;
use woc_core::{Condition, Result};

#[derive(Parser)]
#[command(name = "woc", version, about = "Adaptive wisdom-of-crowds simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration (optionally several replications).
    Run {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        lambda: Option<u32>,
        #[arg(long)]
        rho: Option<u32>,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Run the lambda x rho x eta grid and write a summary table.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated lambda values.
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<u32>,
        /// Comma-separated rho values.
        #[arg(long, value_delimiter = ',', required = true)]
        rho: Vec<u32>,
        /// Comma-separated feedback-noise values.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        eta: Vec<f64>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key = value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    condition: Option<String>,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    kappa: Option<u32>,
    /// Gain on relative errors before rewiring.
    #[arg(long)]
    pi_scale: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    /// gaussian or scatter
    #[arg(long)]
    signal_channel: Option<String>,
    /// none, fixed, every or bernoulli
    #[arg(long)]
    shock_mode: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl CommonArgs {
    fn overrides(&self) -> Result<ConfigOverrides> {
        Ok(ConfigOverrides {
            condition: self.condition.as_deref().map(str::parse::<Condition>).transpose()?,
            n: self.agents,
            rounds: self.rounds,
            kappa: self.kappa,
            pi_scale: self.pi_scale,
            seed: self.seed,
            replications: self.replications,
            signal_channel: self.signal_channel.as_deref().map(str::parse::<SignalChannel>).transpose()?,
            shock_mode: self.shock_mode.as_deref().map(str::parse::<ShockMode>).transpose()?,
            ..ConfigOverrides::default()
        })
    }

    fn config(&self, extra: ConfigOverrides) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let flags = self.overrides()?;
        let merged = ConfigOverrides {
            lambda: extra.lambda,
            rho: extra.rho,
            eta: extra.eta,
            ..flags
        };
        merged.apply(&mut config)?;
        Ok(config)
    }
}

fn cmd_run(common: &CommonArgs, lambda: Option<u32>, rho: Option<u32>, eta: Option<f64>) -> Result<()> {
    let config = common.config(ConfigOverrides { lambda, rho, eta, ..Default::default() })?;
    let seeds: Vec<u64> = if config.replications == 1 {
        vec![config.seed]
    } else {
        (0..config.replications as u64).map(|r| derive_seed(config.seed, 0, r)).collect()
    };
    let traces = seeds
        .iter()
        .map(|&seed| harness::run(&RunConfig { seed, ..config.clone() }))
        .collect::<Result<Vec<_>>>()?;
    let files = emit_trace(&traces, &common.out)?;
    if let [only] = traces.as_slice() {
        emit_edges(only, &common.out.join("edges.csv"))?;
    }
    let wdn: Vec<f64> = traces.iter().flat_map(|t| t.wdn_series()).collect();
    let wc: Vec<f64> = traces.iter().flat_map(|t| t.wc_series()).collect();
    println!(
        "{} run(s), condition {}: mean wdn {:.4}, mean wc {:.4}",
        traces.len(),
        config.condition,
        mean(&wdn),
        mean(&wc)
    );
    println!("wrote {} and {}", files.trace.display(), files.metrics.display());
    Ok(())
}

fn cmd_sweep(common: &CommonArgs, lambdas: Vec<u32>, rhos: Vec<u32>, etas: Vec<f64>) -> Result<()> {
    let base = common.config(ConfigOverrides::default())?;
    let grid = SweepGrid { lambdas, rhos, etas };
    let rows = harness::sweep(&base, &grid, base.replications)?;
    let path = common.out.join("summary.csv");
    emit_summary(&rows, &path)?;
    for r in &rows {
        println!(
            "lambda {:>3} rho {:>4} eta {:<5} wdn {:.4} wc {:.4} normalized {:.3}",
            r.lambda, r.rho, r.eta, r.mean_wdn, r.mean_wc, r.normalized_wdn
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run { common, lambda, rho, eta } => cmd_run(&common, lambda, rho, eta),
        Command::Sweep { common, lambda, rho, eta } => cmd_sweep(&common, lambda, rho, eta),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

