use analog_sqed_cli::config::{ScenarioConfig, ScenarioKind};
use analog_sqed_cli::table::parse_kernel_table;
use analog_sqed_cli::{run, validate, RunError};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "analog-sqed", version, about = "Charged-phonon scenarios for two-component condensates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Scenario config (TOML). Defaults to the built-in configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed; overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check every invariant of the config and report per field.
    Validate,
    /// Bogoliubov spectrum, mode functions and Klein-Gordon deviation on the momentum grid.
    Dispersion,
    /// Field kernels and the interaction kernel for 1D and 2D over the alpha grid.
    Kernels,
    /// Truncated Fock-space charge dynamics and the quadratic-coupling scan.
    Fock,
    /// Rabi and Raman couplings for the configured gauge target, with regime checks.
    Calibrate,
    /// Power-law and exponential fits of the kernel tails, plus F and G.
    Fit {
        /// Also fit a kernel table (dimension,alpha,s,value).
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Every scenario plus the acceptance summary, in one report.
    FullReport,
    /// Run the scenario named in the config.
    Run,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let mut cfg = match &cli.common.config {
        Some(path) => match ScenarioConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => ScenarioConfig::default_config(),
    };
    if let Some(seed) = cli.common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.common.out {
        cfg.output.directory = out.clone();
    }
    let (kind, table) = match cli.command {
        Command::Validate => {
            let report = validate(&cfg);
            print!("{}", report.render());
            return if report.pass { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
        Command::Dispersion => (ScenarioKind::Dispersion, None),
        Command::Kernels => (ScenarioKind::Kernels, None),
        Command::Fock => (ScenarioKind::Fock, None),
        Command::Calibrate => (ScenarioKind::Calibrate, None),
        Command::Fit { table } => (ScenarioKind::Fit, table),
        Command::FullReport => (ScenarioKind::FullReport, None),
        Command::Run => (cfg.scenario, None),
    };
    let rows = match table {
        Some(path) => {
            let parsed = std::fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|text| parse_kernel_table(&text).map_err(|e| e.to_string()));
            match parsed {
                Ok(rows) => Some(rows),
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
        }
        None => None,
    };
    match run(&cfg, kind, &cfg.output.directory, rows.as_deref()) {
        Ok(manifest) => {
            for f in &manifest.files {
                println!("{}  {}", f.sha256, cfg.output.directory.join(&f.path).display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ RunError::Invalid(_)) => {
            eprint!("{e}");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
