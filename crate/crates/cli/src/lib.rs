//! Ingestion, run configuration and the compress, decompress and evaluate
//! commands of the `plastream` tool.

pub mod evaluate;
pub mod ingest;

use std::path::{Path, PathBuf};

use plastream::protocols::{decode_streams, encode_streams, CodecError, DecodeError, EncodedStreams};
use plastream::{
    compress, protocol_decode, CompressionRecord, Emission, ErrorThreshold, InputTuple, MethodKind, PipelineError,
    Protocol, ReconstructedTuple,
};
use thiserror::Error;

pub use evaluate::{run_evaluate, table_matrix, EvaluateReport, Stream, OUT_OF_SCOPE};
pub use ingest::{ingest_csv, ingest_timestamps, Column, IngestError, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("round trip exceeds the threshold: {0}")]
    RoundTrip(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::RoundTrip(_) => 3,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::IllegalPairing { .. } | PipelineError::CapOutOfRange { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<DecodeError> for CliError {
    fn from(e: DecodeError) -> Self {
        CliError::Data(e.to_string())
    }
}

/// One method and protocol with their parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub run_id: String,
    pub method: MethodKind,
    pub protocol: Protocol,
    pub epsilon: ErrorThreshold,
    /// `None` keeps the protocol default.
    pub max_length: Option<usize>,
    /// Added to every timestamp before encoding and removed after
    /// decoding, so that the implicit protocol can carry non-positive times.
    pub t_offset: f64,
}

impl RunConfig {
    pub fn new(method: MethodKind, protocol: Protocol, epsilon: f64) -> Result<Self, CliError> {
        let epsilon = ErrorThreshold::new(epsilon).map_err(|e| CliError::Usage(e.to_string()))?;
        if !protocol.supports(method) {
            return Err(CliError::Usage(format!(
                "{method} cannot be paired with the {protocol} protocol"
            )));
        }
        Ok(Self {
            run_id: format!("{method}/{protocol}"),
            method,
            protocol,
            epsilon,
            max_length: None,
            t_offset: 0.0,
        })
    }

    pub fn with_max_length(mut self, cap: Option<usize>) -> Result<Self, CliError> {
        if let Some(cap) = cap {
            plastream::Pipeline::with_max_length(self.method, self.protocol, self.epsilon, cap)?;
        }
        self.max_length = cap;
        Ok(self)
    }

    pub fn with_offset(mut self, t_offset: f64) -> Result<Self, CliError> {
        if !t_offset.is_finite() {
            return Err(CliError::Usage(format!(
                "timestamp offset must be finite, got {t_offset}"
            )));
        }
        self.t_offset = t_offset;
        Ok(self)
    }

    pub fn with_run_id(mut self, run_id: impl Into<String>) -> Self {
        self.run_id = run_id.into();
        self
    }

    pub fn max_length(&self) -> usize {
        self.max_length.unwrap_or(self.protocol.default_max_length())
    }

    pub fn min_length(&self) -> usize {
        self.protocol.min_length()
    }

    fn shift(&self, t: f64) -> f64 {
        t + self.t_offset
    }
}

/// The output of compressing one channel.
#[derive(Debug, Clone)]
pub struct Compressed {
    pub emissions: Vec<Emission>,
    pub streams: EncodedStreams,
    pub reconstructed: Vec<ReconstructedTuple>,
}

impl Compressed {
    pub fn records(&self) -> Vec<CompressionRecord> {
        self.emissions.iter().map(|e| e.record.clone()).collect()
    }
}

/// Compresses `tuples`, encodes the records and decodes the bytes again.
/// Fails with [`CliError::RoundTrip`] if any decoded value misses its
/// original by the threshold or more.
pub fn compress_channel(cfg: &RunConfig, tuples: &[InputTuple]) -> Result<Compressed, CliError> {
    let shifted: Vec<InputTuple> = tuples.iter().map(|p| InputTuple::new(cfg.shift(p.t), p.y)).collect();
    let emissions = compress(cfg.method, cfg.protocol, cfg.epsilon, cfg.max_length, &shifted)?;
    let records: Vec<CompressionRecord> = emissions.iter().map(|e| e.record.clone()).collect();
    let streams = encode_streams(cfg.protocol, cfg.method, cfg.epsilon.get(), &records)?;
    let timestamps: Vec<f64> = tuples.iter().map(|p| p.t).collect();
    let reconstructed = decompress_channel(&streams, &timestamps, cfg.t_offset)?.1;
    for (orig, rec) in tuples.iter().zip(&reconstructed) {
        if !cfg.epsilon.accepts(rec.y - orig.y) {
            return Err(CliError::RoundTrip(format!(
                "{}: t = {} decoded {} from {}",
                cfg.run_id, orig.t, rec.y, orig.y
            )));
        }
    }
    Ok(Compressed {
        emissions,
        streams,
        reconstructed,
    })
}

/// Decodes one channel against its timestamps. Returns the method read from
/// the stream header with the decoded tuples.
pub fn decompress_channel(
    streams: &EncodedStreams,
    timestamps: &[f64],
    t_offset: f64,
) -> Result<(MethodKind, Vec<ReconstructedTuple>), CliError> {
    let (protocol, method, _, records) = decode_streams(&streams.primary, streams.singletons.as_deref())?;
    let shifted: Vec<f64> = timestamps.iter().map(|t| t + t_offset).collect();
    let mut out = protocol_decode(protocol, &shifted, &records)?;
    for (r, &t) in out.iter_mut().zip(timestamps) {
        r.t = t;
    }
    Ok((method, out))
}

/// Files holding one channel. The two-stream protocol adds `.seg` and
/// `.sgl` to `base`; every other protocol writes `base` itself.
pub fn stream_paths(base: &Path, protocol: Protocol) -> Vec<PathBuf> {
    match protocol {
        Protocol::TwoStreams => vec![with_suffix(base, "seg"), with_suffix(base, "sgl")],
        _ => vec![base.to_path_buf()],
    }
}

/// Output base for channel `k` of `channels` when only one base was given.
pub fn channel_base(base: &Path, k: usize, channels: usize) -> PathBuf {
    if channels == 1 {
        base.to_path_buf()
    } else {
        with_suffix(base, &format!("ch{k}"))
    }
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_streams(base: &Path, protocol: Protocol, streams: &EncodedStreams) -> Result<Vec<PathBuf>, CliError> {
    let paths = stream_paths(base, protocol);
    let bytes = std::iter::once(&streams.primary).chain(streams.singletons.as_ref());
    for (path, data) in paths.iter().zip(bytes) {
        std::fs::write(path, data).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(paths)
}

/// Reads one channel from the given files. A single path that does not
/// exist is taken as the base of a two-stream pair.
pub fn read_streams(paths: &[PathBuf]) -> Result<EncodedStreams, CliError> {
    let read = |p: &Path| std::fs::read(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())));
    match paths {
        [one] if !one.exists() && with_suffix(one, "seg").exists() => Ok(EncodedStreams {
            primary: read(&with_suffix(one, "seg"))?,
            singletons: Some(read(&with_suffix(one, "sgl"))?),
        }),
        [one] => Ok(EncodedStreams {
            primary: read(one)?,
            singletons: None,
        }),
        [a, b] => Ok(EncodedStreams {
            primary: read(a)?,
            singletons: Some(read(b)?),
        }),
        _ => Err(CliError::Usage(
            "expected one stream file, or two for the two-stream protocol".into(),
        )),
    }
}

/// Writes `t,y` lines without a header.
pub fn write_tuples<W: std::io::Write>(out: W, tuples: &[ReconstructedTuple]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Data(e.to_string());
    for r in tuples {
        w.write_record([r.t.to_string(), r.y.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Data(e.to_string()))
}
