use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use sigforge::dataset::{self, DatasetConfig, Variant, WriteOptions};
use sigforge::export::{write_iq_csv, write_psd_csv, write_spectrogram_pgm};
use sigforge::measure::{spectrogram, welch_psd, DEFAULT_NFFT, DEFAULT_OVERLAP};
use sigforge::server::{Server, ServerConfig};
use sigforge::DEFAULT_FRAME_LEN;

mod constellation;

#[derive(Parser)]
#[command(
    name = "sigforge",
    version,
    about = "Synthetic 53-class RF modulation dataset engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset variant into a directory.
    Generate {
        /// clean-train, clean-val, impaired-train or impaired-val.
        #[arg(long)]
        variant: Variant,
        /// Total number of examples.
        #[arg(long)]
        count: u64,
        #[arg(long)]
        out: PathBuf,
        /// Dataset seed; defaults to a fixed seed per variant.
        #[arg(long)]
        seed: Option<u64>,
        /// Generation threads, 0 for all cores.
        #[arg(long, env = "SIGFORGE_WORKERS", default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_FRAME_LEN)]
        frame_len: usize,
        /// Examples per shard.
        #[arg(long, default_value_t = dataset::DEFAULT_SHARD_SIZE)]
        shard_size: usize,
        /// Replace an existing dataset in the output directory.
        #[arg(long)]
        force: bool,
    },
    /// Print or export one stored example.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        index: u64,
        /// Welch PSD as `frequency,dB` CSV.
        #[arg(long)]
        psd: Option<PathBuf>,
        /// Spectrogram as 8-bit PGM.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Symbol-rate IQ points as `re,im` CSV (linear modulations).
        #[arg(long)]
        constellation: Option<PathBuf>,
        /// Print the stored metadata as JSON.
        #[arg(long)]
        meta: bool,
    },
    /// Check a dataset's digests, balance, replay and signal statistics.
    Validate { dir: PathBuf },
    /// Serve generated batches over TCP.
    Serve {
        #[arg(long)]
        port: u16,
        #[arg(long, default_value_t = Variant::ImpairedTrain)]
        variant: Variant,
        #[arg(long, default_value_t = DEFAULT_FRAME_LEN)]
        frame_len: usize,
        #[arg(long, env = "SIGFORGE_WORKERS", default_value_t = 0)]
        workers: usize,
    },
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            variant,
            count,
            out,
            seed,
            workers,
            frame_len,
            shard_size,
            force,
        } => {
            if count == 0 {
                bail!("--count must be positive");
            }
            let config = DatasetConfig::new(variant, count, seed.unwrap_or_else(|| variant.default_seed()))
                .with_frame_len(frame_len)
                .with_shard_size(shard_size);
            let manifest = dataset::write_shards_with(&config, &out, &WriteOptions { workers, force })?;
            eprintln!(
                "wrote {} {} examples in {} shards to {}",
                manifest.total_examples,
                variant,
                manifest.shards.len(),
                out.display()
            );
            println!("{}", manifest.digest);
        }
        Command::Inspect {
            input,
            index,
            psd,
            spec,
            constellation,
            meta,
        } => {
            let (frame, m) = dataset::read_example(&input, index)?;
            let snr = m.snr_db.map(|s| format!("{s:.2} dB")).unwrap_or_else(|| "clean".into());
            println!("{} {} {} {}", m.index, m.class_name, m.family, snr);
            if meta {
                println!("{}", serde_json::to_string_pretty(&m)?);
            }
            if let Some(path) = psd {
                write_psd_csv(&welch_psd(&frame, DEFAULT_NFFT, DEFAULT_OVERLAP)?, create(&path)?)?;
            }
            if let Some(path) = spec {
                let s = spectrogram(&frame, DEFAULT_NFFT, DEFAULT_NFFT / 2)?;
                write_spectrogram_pgm(&s, create(&path)?)?;
            }
            if let Some(path) = constellation {
                let points = constellation::symbol_points(&frame, &m)?;
                write_iq_csv(&points, create(&path)?)?;
            }
        }
        Command::Validate { dir } => {
            let report = dataset::validate(&dir)?;
            print!("{report}");
            if !report.passed() {
                println!("validation FAILED");
                return Ok(ExitCode::FAILURE);
            }
            println!("validation passed");
        }
        Command::Serve {
            port,
            variant,
            frame_len,
            workers,
        } => {
            let server = Server::bind(
                ("0.0.0.0", port),
                ServerConfig {
                    variant,
                    frame_len,
                    workers,
                },
            )?;
            eprintln!("serving {variant} batches on {}", server.local_addr()?);
            server.run()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
