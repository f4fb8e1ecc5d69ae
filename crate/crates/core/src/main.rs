use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ldpc_streams::bench::{
    run_ber, run_compare, run_throughput, write_csv, write_table, BerArgs, CodeSource, CompareArgs,
    MessageMode, Record, ThroughputArgs, Workload,
};
use ldpc_streams::{
    emit_alist, Backpressure, DecoderConfig, Error, ParityCheckCode, Schedule, StreamConfig,
};

#[derive(Parser)]
#[command(
    name = "ldpc-bench",
    version,
    about = "Multi-stream LDPC decoder benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decoding throughput with a fixed iteration count.
    Throughput(ThroughputCmd),
    /// Bit and frame error rates over an Eb/N0 sweep.
    Ber(BerCmd),
    /// Mean iterations to convergence, flooding versus layered.
    Compare(CompareCmd),
    /// Write a random regular code as an alist file.
    Gencode(GencodeCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackpressureArg {
    Block,
    Reject,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CodeArgs {
    /// Parity-check matrix in alist format.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Generate a regular code: n,m,rowdeg,seed.
    #[arg(long = "gen", value_name = "N,M,ROWDEG,SEED")]
    generate: Option<CodeSource>,
}

impl CodeArgs {
    fn load(&self) -> Result<Arc<ParityCheckCode>, Error> {
        let src = match (&self.code, &self.generate) {
            (Some(p), _) => CodeSource::Alist(p.clone()),
            (None, Some(g)) => g.clone(),
            (None, None) => unreachable!("clap enforces one code source"),
        };
        src.load().map(Arc::new)
    }
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, default_value = "layered")]
    schedule: Schedule,
    #[arg(long, default_value_t = 10)]
    iters: usize,
    #[arg(long, default_value_t = 1.0)]
    normalization: f64,
    /// Worker streams.
    #[arg(long, default_value_t = 1)]
    streams: usize,
    /// Frames per job.
    #[arg(long, default_value_t = 32)]
    batch: usize,
    #[arg(long, default_value_t = 4)]
    queue_depth: usize,
    #[arg(long, value_enum, default_value = "block")]
    backpressure: BackpressureArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write CSV here instead of a table on stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl Common {
    fn decoder(&self, early_termination: bool) -> DecoderConfig {
        DecoderConfig {
            schedule: self.schedule,
            max_iterations: self.iters,
            early_termination,
            normalization: self.normalization,
            ..DecoderConfig::default()
        }
    }

    fn stream(&self) -> StreamConfig {
        StreamConfig {
            w: self.streams,
            f: self.batch,
            queue_depth: self.queue_depth,
            backpressure: match self.backpressure {
                BackpressureArg::Block => Backpressure::Block,
                BackpressureArg::Reject => Backpressure::Reject,
            },
        }
    }

    fn emit<R: Record>(&self, rows: &[R]) -> Result<(), Error> {
        match &self.csv {
            Some(path) => write_csv(rows, BufWriter::new(File::create(path)?)),
            None => write_table(rows, io::stdout().lock()),
        }
    }
}

#[derive(Args)]
struct ThroughputCmd {
    #[command(flatten)]
    common: Common,
    /// Total frames per run.
    #[arg(long, conflicts_with = "seconds")]
    frames: Option<usize>,
    /// Run length in seconds.
    #[arg(long)]
    seconds: Option<f64>,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    ebno: f64,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
}

#[derive(Args)]
struct BerCmd {
    #[command(flatten)]
    common: Common,
    /// Frames per Eb/N0 point.
    #[arg(long, default_value_t = 1000)]
    frames: usize,
    /// Comma-separated Eb/N0 points in dB.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    ebno: Vec<f64>,
    #[arg(long = "early-term", value_enum, default_value = "on")]
    early_term: OnOff,
    /// Transmit the all-zero codeword.
    #[arg(long)]
    all_zero: bool,
    /// Skip the noise and feed ideal LLRs.
    #[arg(long)]
    noiseless: bool,
    /// Stop a point after this many frame errors.
    #[arg(long)]
    max_frame_errors: Option<u64>,
}

#[derive(Args)]
struct CompareCmd {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1000)]
    frames: usize,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    ebno: f64,
}

#[derive(Args)]
struct GencodeCmd {
    /// n,m,rowdeg,seed
    #[arg(long = "gen", value_name = "N,M,ROWDEG,SEED")]
    generate: CodeSource,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Throughput(cmd) => {
            let c = &cmd.common;
            let workload = match (cmd.frames, cmd.seconds) {
                (_, Some(s)) => Workload::Seconds(s),
                (Some(n), None) => Workload::Frames(n),
                (None, None) => Workload::Frames(10 * c.streams * c.batch),
            };
            let report = run_throughput(&ThroughputArgs {
                code: c.code.load()?,
                decoder: c.decoder(false),
                stream: c.stream(),
                workload,
                ebno_db: cmd.ebno,
                seed: c.seed,
                repeats: cmd.repeat,
            })?;
            c.emit(&report.runs)?;
            if c.csv.is_none() && report.runs.len() > 1 {
                println!(
                    "throughput Mbps: mean {:.3}  std {:.3}  median {:.3}",
                    report.mean(),
                    report.std_dev(),
                    report.median()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Ber(cmd) => {
            let c = &cmd.common;
            let rows = run_ber(&BerArgs {
                code: c.code.load()?,
                decoder: c.decoder(matches!(cmd.early_term, OnOff::On)),
                stream: c.stream(),
                ebno_db: cmd.ebno.clone(),
                frames: cmd.frames,
                max_frame_errors: cmd.max_frame_errors,
                mode: if cmd.all_zero {
                    MessageMode::AllZero
                } else {
                    MessageMode::Random
                },
                noiseless: cmd.noiseless,
                seed: c.seed,
            })?;
            c.emit(&rows)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(cmd) => {
            let c = &cmd.common;
            let report = run_compare(&CompareArgs {
                code: c.code.load()?,
                decoder: c.decoder(true),
                stream: c.stream(),
                ebno_db: cmd.ebno,
                frames: cmd.frames,
                seed: c.seed,
            })?;
            c.emit(&report.rows())?;
            if report.layered_not_slower() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!(
                    "layered needed more iterations than flooding ({:.4} > {:.4})",
                    report.layered.mean_iterations, report.flooding.mean_iterations
                );
                Ok(ExitCode::from(1))
            }
        }
        Command::Gencode(cmd) => {
            let text = emit_alist(&cmd.generate.load()?);
            match cmd.out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
