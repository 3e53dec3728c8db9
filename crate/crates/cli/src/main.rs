use std::path::PathBuf;
use std::process::ExitCode;

use causal_modes_cli::presets::{self, PRESETS};
use causal_modes_cli::scenario::{CutoffList, OptionsSpec};
use causal_modes_cli::{run_scenario, selftest, CliError, Scenario};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(version, about = "Field commutators and signalling estimators in finite boxes", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (.toml or .json).
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in figure preset.
    Figure {
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in presets.
    ListFigures,
    /// Run quick internal consistency checks.
    Selftest {
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// Output directory [env: CAUSAL_MODES_OUT, default: ./out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// iε regulator, overriding the scenario.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Index cutoff on every compact axis, overriding the scenario.
    #[arg(long)]
    cutoff: Option<u32>,
    /// Include the zero mode where the boundary conditions admit one.
    #[arg(long)]
    include_zero_mode: Option<bool>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn flags(&self) -> OptionsSpec {
        OptionsSpec {
            epsilon: self.epsilon,
            cutoff: self.cutoff.map(CutoffList::Uniform),
            include_zero_mode: self.include_zero_mode,
            ..OptionsSpec::default()
        }
    }

    fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os("CAUSAL_MODES_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn set_threads(n: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Validation("--threads: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Compute(e.to_string()))?;
    }
    Ok(())
}

fn run(scenario: Scenario, common: &Common) -> Result<(), CliError> {
    set_threads(common.threads)?;
    let files = run_scenario(&scenario.with_flags(&common.flags()), &common.out_dir())?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, common } => Scenario::load(&config).and_then(|s| run(s, &common)),
        Command::Figure { id, common } => presets::load(&id).and_then(|s| run(s, &common)),
        Command::ListFigures => {
            for p in PRESETS {
                println!("{:<6} {}", p.id, p.summary);
            }
            Ok(())
        }
        Command::Selftest { threads } => set_threads(threads).and_then(|_| {
            let checks = selftest::run_all();
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {:<28} {}", c.name, c.detail);
            }
            match checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                n => Err(CliError::Compute(format!("{n} self-test check(s) failed"))),
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
