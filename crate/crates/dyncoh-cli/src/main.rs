use clap::{Parser, Subcommand, ValueEnum};
use dyncoh::channels::{random_channel, random_mio_channel, QuantumChannel};
use dyncoh::density::DensityMatrix;
use dyncoh::io::{load_channel, save_channel};
use dyncoh::monotones::{cnot_entanglement_lower, coherence_power, OptimizerConfig};
use dyncoh_cli::{channel_info, run_suite, ExperimentConfig, Suite};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "dyncoh",
    version,
    about = "Dynamical coherence and entanglement monotones on quantum channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite from a JSON config; exit status reflects
    /// pass/fail. Writes report.json and report.csv.
    Verify {
        /// Path to the experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured suite.
        #[arg(long)]
        suite: Option<Suite>,
        /// Output directory for report.json / report.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Coherence power of a channel file.
    Coherence {
        #[arg(long)]
        channel: PathBuf,
    },
    /// CNOT-generated entanglement lower bound of a channel file.
    Entangle {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Generate a channel file.
    MakeChannel {
        #[arg(long, value_enum)]
        kind: ChannelKind,
        /// System dimension.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Environment dimension for random channels.
        #[arg(long)]
        env: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print dimensions, CPTP residuals, membership, and coherence of a
    /// channel file.
    Info {
        #[arg(long)]
        channel: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ChannelKind {
    Hadamard,
    Dephasing,
    Cnot,
    Random,
    RandomMio,
    /// Replacement channel with maximally mixed output.
    ReplacementMixed,
}

fn configure_thread_pool() {
    if let Ok(value) = std::env::var("DYNCOH_THREADS") {
        match value.parse::<usize>() {
            Ok(n) if n >= 1 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    eprintln!("warning: could not cap worker pool: {e}");
                }
            }
            _ => eprintln!("warning: ignoring invalid DYNCOH_THREADS={value}"),
        }
    }
}

fn make_channel(
    kind: ChannelKind,
    dim: usize,
    env: Option<usize>,
    seed: u64,
) -> anyhow::Result<QuantumChannel> {
    Ok(match kind {
        ChannelKind::Hadamard => QuantumChannel::hadamard(),
        ChannelKind::Dephasing => QuantumChannel::dephasing(&[dim]),
        ChannelKind::Cnot => QuantumChannel::cnot(dim)?,
        ChannelKind::Random => random_channel(dim, dim, env.unwrap_or(dim), seed)?,
        ChannelKind::RandomMio => random_mio_channel(dim, seed),
        ChannelKind::ReplacementMixed => {
            QuantumChannel::replacement(&DensityMatrix::maximally_mixed(vec![dim]), dim)
        }
    })
}

fn run() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    configure_thread_pool();
    match cli.command {
        Command::Verify {
            config,
            seed,
            suite,
            out,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(suite) = suite {
                cfg.suite = suite;
            }
            cfg.validate()?;
            let report = run_suite(&cfg)?;
            for assertion in &report.assertions {
                println!(
                    "{}: {} (max violation {:.3e}, tolerance {:.3e})",
                    assertion.name,
                    if assertion.pass { "PASS" } else { "FAIL" },
                    assertion.max_violation,
                    assertion.tolerance
                );
            }
            println!(
                "suite {}: {} ({} channels, {:.1}s)",
                report.suite,
                if report.pass { "PASS" } else { "FAIL" },
                report.channels.len(),
                report.wall_time_secs
            );
            report.emit(&out)?;
            Ok(report.pass)
        }
        Command::Coherence { channel } => {
            let theta = load_channel(&channel)?;
            let report = coherence_power(&theta, &OptimizerConfig::default());
            println!("{}", report.to_json());
            Ok(true)
        }
        Command::Entangle { channel } => {
            let theta = load_channel(&channel)?;
            // The conversion pipeline acts on in ⊗ B with dim B = dim_out,
            // so its Choi lives on dim_in·dim_out·dim_out² coordinates.
            let working = theta.dim_in() * theta.dim_out() * theta.dim_out() * theta.dim_out();
            if working > dyncoh_cli::DIMENSION_CAP {
                anyhow::bail!(
                    "conversion working space {working} exceeds supported cap {}",
                    dyncoh_cli::DIMENSION_CAP
                );
            }
            let report = cnot_entanglement_lower(&theta, &OptimizerConfig::default())?;
            println!("{}", report.to_json());
            Ok(true)
        }
        Command::MakeChannel {
            kind,
            dim,
            env,
            seed,
            out,
        } => {
            let channel = make_channel(kind, dim, env, seed)?;
            save_channel(&channel, &out)?;
            println!(
                "wrote {} ({} → {})",
                out.display(),
                channel.dim_in(),
                channel.dim_out()
            );
            Ok(true)
        }
        Command::Info { channel } => {
            print!("{}", channel_info(&channel)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
