//! Shared inputs for the throughput benchmarks.

use plastream::protocols::encode_streams;
use plastream::synth::Generator;
use plastream::{compress, CompressionRecord, ErrorThreshold, InputTuple, MethodKind, Protocol};

pub const SEED: u64 = 17;

/// A Gaussian random walk with unit steps, the usual benchmark input.
pub fn walk(n: usize) -> Vec<InputTuple> {
    Generator::RandomWalk { step: 1.0 }.generate(n, SEED)
}

/// Records of `tuples` under the given pairing.
pub fn records(method: MethodKind, protocol: Protocol, eps: f64, tuples: &[InputTuple]) -> Vec<CompressionRecord> {
    let eps = ErrorThreshold::new(eps).expect("positive threshold");
    compress(method, protocol, eps, None, tuples)
        .expect("legal pairing")
        .into_iter()
        .map(|e| e.record)
        .collect()
}

/// Encoded bytes per input tuple.
pub fn bytes_per_tuple(method: MethodKind, protocol: Protocol, eps: f64, tuples: &[InputTuple]) -> f64 {
    let recs = records(method, protocol, eps, tuples);
    let streams = encode_streams(protocol, method, eps, &recs).expect("encodable");
    streams.total_len() as f64 / tuples.len() as f64
}
