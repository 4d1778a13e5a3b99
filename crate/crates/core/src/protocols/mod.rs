//! Storage protocols: how closed segments become records, how records are
//! laid out in bytes, and how a timestamp stream plus records rebuild the
//! approximated values.

mod codec;
mod decode;
mod pipeline;

pub use codec::{
    decode_streams, encode_streams, read_records, read_stream, write_records, write_stream, CodecError, EncodedStreams,
    StreamHeader, StreamKind, HEADER_LEN, MAGIC,
};
pub use decode::{protocol_decode, DecodeError};
pub use pipeline::{compress, Emission, Pipeline, PipelineError};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::methods::MethodKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    Implicit,
    TwoStreams,
    SingleStream,
    SingleStreamV,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol::Implicit,
        Protocol::TwoStreams,
        Protocol::SingleStream,
        Protocol::SingleStreamV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Implicit => "implicit",
            Protocol::TwoStreams => "two-streams",
            Protocol::SingleStream => "single-stream",
            Protocol::SingleStreamV => "single-stream-v",
        }
    }

    /// Shortest segment worth a segment record; shorter ones are demoted to
    /// singletons.
    pub fn min_length(self) -> usize {
        match self {
            Protocol::Implicit => 1,
            Protocol::TwoStreams => 4,
            Protocol::SingleStream | Protocol::SingleStreamV => 3,
        }
    }

    /// Largest segment length the record format can carry; `None` when
    /// unbounded.
    pub fn length_limit(self) -> Option<usize> {
        match self {
            Protocol::Implicit => None,
            Protocol::TwoStreams | Protocol::SingleStream => Some(256),
            Protocol::SingleStreamV => Some(127),
        }
    }

    /// Default cap; 0 means uncapped.
    pub fn default_max_length(self) -> usize {
        self.length_limit().unwrap_or(0)
    }

    /// Counter-based protocols need every segment to start fresh, which
    /// rules out joint-knot methods.
    pub fn supports(self, method: MethodKind) -> bool {
        self == Protocol::Implicit || !method.joint_knots()
    }

    /// Every legal method/protocol pairing.
    pub fn pairings() -> impl Iterator<Item = (MethodKind, Protocol)> {
        Protocol::ALL
            .into_iter()
            .flat_map(|p| MethodKind::ALL.into_iter().map(move |m| (m, p)))
            .filter(|&(m, p)| p.supports(m))
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown protocol `{0}`")]
pub struct UnknownProtocol(pub String);

impl FromStr for Protocol {
    type Err = UnknownProtocol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownProtocol(s.to_owned()))
    }
}

/// One unit of protocol output.
#[derive(Debug, Clone, PartialEq)]
pub enum CompressionRecord {
    ImplicitJoint {
        t: f64,
        y: f64,
    },
    /// Serialized with `t` negated.
    ImplicitDisjointHead {
        t: f64,
        y_end: f64,
    },
    ImplicitDisjointTail {
        y_start: f64,
    },
    QuadSegment {
        t0: f64,
        n: usize,
        a: f64,
        b: f64,
    },
    RawSingleton {
        y: f64,
    },
    CountedSegment {
        n: usize,
        a: f64,
        b: f64,
    },
    CountedSingleton {
        y: f64,
    },
    SingletonBurst {
        ys: Vec<f64>,
    },
}

impl CompressionRecord {
    pub fn size_bytes(&self) -> usize {
        match self {
            CompressionRecord::ImplicitJoint { .. } | CompressionRecord::ImplicitDisjointHead { .. } => 16,
            CompressionRecord::ImplicitDisjointTail { .. } | CompressionRecord::RawSingleton { .. } => 8,
            CompressionRecord::QuadSegment { .. } => 25,
            CompressionRecord::CountedSegment { .. } => 17,
            CompressionRecord::CountedSingleton { .. } => 9,
            CompressionRecord::SingletonBurst { ys } => 1 + 8 * ys.len(),
        }
    }

    /// Size relative to one 8-byte value.
    pub fn size_yunits(&self) -> f64 {
        self.size_bytes() as f64 / 8.0
    }

    /// Number of tuples the record reconstructs on its own; 0 for knot
    /// records, which only make sense in pairs.
    pub fn reconstructs(&self) -> usize {
        match self {
            CompressionRecord::QuadSegment { n, .. } | CompressionRecord::CountedSegment { n, .. } => *n,
            CompressionRecord::RawSingleton { .. } | CompressionRecord::CountedSingleton { .. } => 1,
            CompressionRecord::SingletonBurst { ys } => ys.len(),
            _ => 0,
        }
    }
}

/// Total payload bytes of `records`, headers excluded.
pub fn payload_bytes<'a>(records: impl IntoIterator<Item = &'a CompressionRecord>) -> usize {
    records.into_iter().map(CompressionRecord::size_bytes).sum()
}
