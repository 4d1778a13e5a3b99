use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use plastream::synth::GenerateSpec;
use plastream::{MethodKind, Protocol};
use plastream_cli::{
    channel_base, compress_channel, decompress_channel, ingest_csv, ingest_timestamps, read_streams, run_evaluate,
    table_matrix, write_streams, write_tuples, CliError, Column, RunConfig, Stream, Table, OUT_OF_SCOPE,
};

/// Streaming piecewise linear compression of time series.
#[derive(Parser)]
#[command(name = "plastream", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress CSV columns or a generated series into record streams.
    Compress(CompressArgs),
    /// Rebuild values from record streams and their timestamps.
    Decompress(DecompressArgs),
    /// Compress, decode and report per-point statistics as CSV.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct Source {
    /// CSV input file.
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Synthetic series `KIND:N:PARAMS`, e.g. `random_walk:1000:0.5`.
    #[arg(long)]
    generate: Vec<GenerateSpec>,
    /// Seed for generated series.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Timestamp column, by position or header name.
    #[arg(long, default_value = "0")]
    t_col: Column,
    /// Value column(s), by position or header name.
    #[arg(long, default_value = "1", value_delimiter = ',')]
    y_col: Vec<Column>,
    /// Treat the first CSV line as a header.
    #[arg(long)]
    header: bool,
}

impl Source {
    fn load(&self) -> Result<Vec<(String, Table)>, CliError> {
        if let Some(path) = &self.input {
            let file = open(path)?;
            let label = path
                .file_stem()
                .map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned());
            return Ok(vec![(label, ingest_csv(file, &self.t_col, &self.y_col, self.header)?)]);
        }
        if self.generate.is_empty() {
            return Err(CliError::Usage("give --input or --generate".into()));
        }
        Ok(self
            .generate
            .iter()
            .enumerate()
            .map(|(k, spec)| {
                let tuples = spec.generator.generate(spec.n, self.seed);
                let table = Table {
                    timestamps: tuples.iter().map(|p| p.t).collect(),
                    channels: vec![tuples.iter().map(|p| p.y).collect()],
                };
                (format!("g{k}"), table)
            })
            .collect())
    }
}

#[derive(Args)]
struct Tuning {
    /// Error threshold; every decoded value lies strictly closer than this.
    #[arg(long)]
    epsilon: f64,
    /// Longest segment; defaults to the protocol limit.
    #[arg(long)]
    max_seg: Option<usize>,
    /// Added to timestamps before encoding and removed after decoding.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t_offset: f64,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    method: MethodKind,
    #[arg(long)]
    protocol: Protocol,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    source: Source,
    /// Output file per channel, or one base path that gets `.chK` suffixes.
    #[arg(long, required = true, num_args = 1..)]
    output: Vec<PathBuf>,
    /// Also write the timestamps, one per line.
    #[arg(long)]
    timestamps: Option<PathBuf>,
}

#[derive(Args)]
struct DecompressArgs {
    /// Stream file, both files of a two-stream pair, or their common base.
    #[arg(long, required = true, num_args = 1..=2)]
    input: Vec<PathBuf>,
    /// CSV holding the timestamps.
    #[arg(long)]
    timestamps: PathBuf,
    #[arg(long, default_value = "0")]
    t_col: Column,
    #[arg(long)]
    header: bool,
    /// Offset used when compressing.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t_offset: f64,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Restrict to one method; all legal pairings otherwise.
    #[arg(long, conflicts_with = "matrix")]
    method: Option<MethodKind>,
    #[arg(long, conflicts_with = "matrix")]
    protocol: Option<Protocol>,
    /// Run the keyed associations of the comparison table.
    #[arg(long)]
    matrix: bool,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    source: Source,
    /// Stats CSV; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn open(path: &PathBuf) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn config(method: MethodKind, protocol: Protocol, t: &Tuning) -> Result<RunConfig, CliError> {
    RunConfig::new(method, protocol, t.epsilon)?
        .with_max_length(t.max_seg)?
        .with_offset(t.t_offset)
}

fn run_compress(args: &CompressArgs) -> Result<(), CliError> {
    let cfg = config(args.method, args.protocol, &args.tuning)?;
    if args.source.generate.len() > 1 {
        return Err(CliError::Usage("compress takes a single --generate".into()));
    }
    let (_, table) = args.source.load()?.remove(0);
    let channels = table.channels.len();
    let bases: Vec<PathBuf> = match args.output.as_slice() {
        [one] => (0..channels).map(|k| channel_base(one, k, channels)).collect(),
        many if many.len() == channels => many.to_vec(),
        many => {
            return Err(CliError::Usage(format!(
                "{} outputs for {channels} channels",
                many.len()
            )))
        }
    };
    for (k, base) in bases.iter().enumerate() {
        let tuples = table.channel(k);
        let out = compress_channel(&cfg, &tuples)?;
        let paths = write_streams(base, cfg.protocol, &out.streams)?;
        let bytes = out.streams.total_len();
        let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
        eprintln!(
            "channel {k}: {} tuples, {} records, {bytes} bytes -> {}",
            tuples.len(),
            out.emissions.len(),
            names.join(", ")
        );
    }
    if let Some(path) = &args.timestamps {
        let mut w = sink(Some(path))?;
        for t in &table.timestamps {
            writeln!(w, "{t}").map_err(|e| CliError::Data(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Data(e.to_string()))?;
    }
    Ok(())
}

fn run_decompress(args: &DecompressArgs) -> Result<(), CliError> {
    if !args.t_offset.is_finite() {
        return Err(CliError::Usage("timestamp offset must be finite".into()));
    }
    let streams = read_streams(&args.input)?;
    let timestamps = ingest_timestamps(open(&args.timestamps)?, &args.t_col, args.header)?;
    let (_, tuples) = decompress_channel(&streams, &timestamps, args.t_offset)?;
    write_tuples(sink(args.output.as_ref())?, &tuples)
}

fn run_evaluate_cmd(args: &EvaluateArgs) -> Result<bool, CliError> {
    let configs: Vec<RunConfig> = if args.matrix {
        for (key, name) in OUT_OF_SCOPE {
            eprintln!("{key}: {name} is not implemented; skipped");
        }
        table_matrix(args.tuning.epsilon, args.tuning.max_seg)?
            .into_iter()
            .map(|c| c.with_offset(args.tuning.t_offset))
            .collect::<Result<_, _>>()?
    } else {
        if let (Some(m), Some(p)) = (args.method, args.protocol) {
            if !p.supports(m) {
                return Err(CliError::Usage(format!("{m} cannot be paired with the {p} protocol")));
            }
        }
        Protocol::pairings()
            .filter(|&(m, p)| args.method.is_none_or(|x| x == m) && args.protocol.is_none_or(|x| x == p))
            .map(|(m, p)| config(m, p, &args.tuning))
            .collect::<Result<_, _>>()?
    };
    let streams: Vec<Stream> = args
        .source
        .load()?
        .into_iter()
        .flat_map(|(label, table)| {
            let n = table.channels.len();
            (0..n)
                .map(|k| Stream {
                    label: if n == 1 {
                        label.clone()
                    } else {
                        format!("{label}.ch{k}")
                    },
                    tuples: table.channel(k),
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let report = run_evaluate(&configs, &streams)?;
    report.write_csv(sink(args.output.as_ref())?)?;
    for v in &report.violations {
        eprintln!("round trip exceeds the threshold: {v}");
    }
    Ok(report.violations.is_empty())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Compress(a) => run_compress(a),
        Command::Decompress(a) => run_decompress(a),
        Command::Evaluate(a) => run_evaluate_cmd(a).and_then(|ok| {
            if ok {
                Ok(())
            } else {
                Err(CliError::RoundTrip("see messages above".into()))
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
