use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flab::{render_table, run, seed_from_env, Command, KernelSource, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "flab", version, about = "Exact f-invariant reports for free-group actions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Largest ball radius n in the truncated tables.
    #[arg(long = "nmax", global = true, default_value_t = 2)]
    n_max: usize,

    /// Extra thickening steps allowed when certifying kernel windows.
    #[arg(long, global = true, default_value_t = 4)]
    window_cap: usize,

    /// Equal consecutive rate increments needed to call a rate stable.
    #[arg(long, global = true, default_value_t = 3)]
    stable_threshold: usize,

    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// The Z/2 difference-map example and its addition triple.
    Ow {
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// The family K^Γ ≅ K × (K^r)^Γ for a finite abelian group K.
    Gen {
        /// Group preset such as Z/3 or Z/2xZ/2.
        #[arg(long)]
        k: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// The kernel of a scalar convolution operator.
    Kernel {
        /// JSON kernel spec.
        #[arg(long, conflicts_with = "preset")]
        spec: Option<PathBuf>,
        /// Named kernel: delta, two-term or three-term.
        #[arg(long)]
        preset: Option<String>,
        /// Prime modulus for presets.
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// Rank for presets; specs carry their own.
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// Verifier suites; `all` runs every suite.
    Verify {
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Vec<String>,
        /// Break the cocycle on purpose so the identity check fails.
        #[arg(long)]
        inject_bug: bool,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// Truncated f and f* for one process.
    ComputeF {
        /// bernoulli:<k>, group:<preset>[:<i,j>] or kernel:<path.json|preset[:p]>
        #[arg(long)]
        process: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
}

fn config(cli: &Cli) -> Result<RunConfig, flab::CliError> {
    let (command, rank) = match &cli.command {
        Cmd::Ow { rank } => (Command::Ow, *rank),
        Cmd::Gen { k, rank } => (Command::Gen { k: k.clone() }, *rank),
        Cmd::Kernel { spec, preset, p, rank } => {
            let source = match (spec, preset) {
                (Some(path), _) => KernelSource::Path(path.clone()),
                (None, Some(name)) => KernelSource::Preset { name: name.clone(), p: *p },
                (None, None) => KernelSource::Preset { name: "two-term".into(), p: *p },
            };
            (Command::Kernel { source }, *rank)
        }
        Cmd::Verify { suites, inject_bug, rank } => (
            Command::Verify {
                suites: suites.clone(),
                inject_bug: *inject_bug,
            },
            *rank,
        ),
        Cmd::ComputeF { process, rank } => (Command::ComputeF { process: process.clone() }, *rank),
    };
    Ok(RunConfig {
        command,
        rank,
        n_max: cli.n_max,
        window_cap: cli.window_cap,
        stable_threshold: cli.stable_threshold,
        seed: seed_from_env()?,
        out: cli.out.clone(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(&cli).and_then(|cfg| run(&cfg).map(|r| (cfg, r)));
    let (cfg, report) = match result {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let json = report.to_json();
    if let Some(path) = &cfg.out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(3);
        }
    }
    match cli.format {
        Format::Json if cfg.out.is_none() => print!("{json}"),
        Format::Json => {}
        Format::Table => {
            let v: serde_json::Value = serde_json::from_str(&json).expect("report is valid JSON");
            print!("{}", render_table(&v));
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
