use bandnorm::harness::{
    describe_norm_scan, emit, moments, norm_scan, sample_matrix, semicircle, verify,
    ExperimentConfig, MomentMode, NormChoice, OutputFormat, RunOptions, Suite,
};
use bandnorm::par::with_workers;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral norms and moments of GUE, GOE and band random matrices.
#[derive(Parser)]
#[command(name = "bandnorm", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat TOML experiment configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides master_seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "INT")]
    trials: Option<u64>,
    /// Worker threads (0 = available parallelism).
    #[arg(long, global = true, value_name = "INT")]
    workers: Option<usize>,
    #[arg(long, global = true, value_name = "csv|json")]
    format: Option<OutputFormat>,
    /// Output file; standard output when omitted and unset in the config.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-trial spectral norms over the (N, b) grid.
    NormScan {
        #[arg(long, default_value = "auto", value_name = "full|lanczos|auto")]
        method: NormChoice,
        /// Fill the runtime_ms column (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Exact, pairing-oracle or Monte Carlo moment tables.
    Moments {
        #[arg(long, default_value = "exact", value_name = "exact|mc|wick")]
        mode: MomentMode,
    },
    /// Bound sweeps and identity checks; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value = "all", value_name = "bounds|identities|all")]
        suite: Suite,
        /// Doubles the diagonal scale of every sampler (mutation test).
        #[arg(long, hide = true)]
        inject_diagonal_fault: bool,
    },
    /// Eigenvalue histogram against the semicircle density.
    Semicircle,
    /// Dumps one matrix of the first grid point.
    Sample {
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Regenerate from a recorded seed column instead of a trial index.
        #[arg(long, value_name = "U64")]
        trial_seed: Option<u64>,
    },
}

fn load(common: &Common) -> bandnorm::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(w) = common.workers {
        cfg.workers = w;
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    if let Some(o) = &common.out {
        cfg.output_path = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> bandnorm::Result<bool> {
    let cfg = load(&cli.common)?;
    let mut opts = RunOptions::default();
    with_workers(cfg.workers, || match cli.command {
        Command::NormScan { method, timing } => {
            opts.method = method;
            opts.timing = timing;
            let t = norm_scan(&cfg, &opts)?;
            emit(&t, cfg.format, &cfg.output_path)?;
            if !cfg.output_path.is_empty() {
                eprint!("{}", describe_norm_scan(&t));
            }
            Ok(true)
        }
        Command::Moments { mode } => {
            emit(&moments(&cfg, mode, &opts)?, cfg.format, &cfg.output_path)?;
            Ok(true)
        }
        Command::Verify {
            suite,
            inject_diagonal_fault,
        } => {
            if inject_diagonal_fault {
                opts.diagonal_scale = 2.0;
            }
            let out = verify(&cfg, suite, &opts)?;
            emit(&out.table, cfg.format, &cfg.output_path)?;
            eprint!("{}", out.report);
            Ok(out.passed)
        }
        Command::Semicircle => {
            emit(&semicircle(&cfg, &opts)?, cfg.format, &cfg.output_path)?;
            Ok(true)
        }
        Command::Sample { trial, trial_seed } => {
            emit(
                &sample_matrix(&cfg, trial, trial_seed, &opts)?,
                cfg.format,
                &cfg.output_path,
            )?;
            Ok(true)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
