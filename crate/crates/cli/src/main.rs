use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ibse_bench::{PathKind, DEFAULT_SIZES};
use ibse_cli::{cmd_add, cmd_bench, cmd_get, cmd_init, cmd_ls, AppConfig, BenchOptions, CliError};

/// Identity-based self-encryption with a chunk store and an asset ledger.
#[derive(Parser)]
#[command(name = "ibse", version)]
struct Cli {
    /// Home directory holding the wallet, store and ledger.
    #[arg(long, env = "IBSE_HOME", global = true)]
    home: Option<PathBuf>,
    /// Chunk store root [default: HOME/store].
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    /// Ledger file [default: HOME/ledger.json].
    #[arg(long, global = true)]
    ledger: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create or reload the wallet and print the active identity.
    Init {
        /// Use this string as the encryption identity from now on.
        #[arg(long)]
        identity: Option<String>,
    },
    /// Encrypt a file, store its chunks and register an asset.
    Add {
        file: PathBuf,
        key_output_path: PathBuf,
    },
    /// Restore a file from its asset id and data map.
    Get {
        block: String,
        key: PathBuf,
        destination: PathBuf,
    },
    /// List registered assets.
    Ls,
    /// Time encryption over a generated corpus and write a CSV report.
    Bench {
        /// Comma-separated file sizes in bytes.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
        sizes: Vec<u64>,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also time the sandboxed module.
        #[arg(long)]
        abi: bool,
        /// Directory for the generated corpus [default: a temporary one].
        #[arg(long)]
        corpus_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = AppConfig::new(
        cli.home.unwrap_or_else(AppConfig::default_home),
        cli.store,
        cli.ledger,
    );
    match cli.command {
        Command::Init { identity } => println!("{}", cmd_init(&cfg, identity.as_deref())?),
        Command::Add {
            file,
            key_output_path,
        } => {
            let id = cmd_add(&cfg, &file, &key_output_path)?;
            eprintln!("data map written to {}", key_output_path.display());
            println!("{id}");
        }
        Command::Get {
            block,
            key,
            destination,
        } => {
            cmd_get(&cfg, &block, &key, &destination)?;
            eprintln!("restored {}", destination.display());
        }
        Command::Ls => {
            for line in cmd_ls(&cfg)? {
                println!("{line}");
            }
        }
        Command::Bench {
            sizes,
            runs,
            seed,
            out,
            abi,
            corpus_dir,
        } => {
            let report = cmd_bench(&BenchOptions {
                sizes,
                runs,
                seed,
                out,
                with_abi: abi,
                corpus_dir,
            })?;
            for kind in [PathKind::Native, PathKind::Abi] {
                if let Some(fit) = report.fit(kind) {
                    println!(
                        "{kind}\tslope_s_per_byte={:e}\tr_squared={:.4}",
                        fit.slope, fit.r_squared
                    );
                }
            }
            for (size, pct) in report.overheads() {
                println!("overhead\t{size}\t{pct:.2}%");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ibse: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
