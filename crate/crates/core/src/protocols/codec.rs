//! Bit-exact byte layout of record streams.
//!
//! Every stream starts with a 16-byte header: the magic `PLA1`, a stream
//! kind byte, a method byte, two zero bytes and the threshold as a
//! little-endian binary64. Values are little-endian binary64, counters are
//! single bytes.

use thiserror::Error;

use super::{CompressionRecord, Protocol};
use crate::methods::MethodKind;

pub const MAGIC: &[u8; 4] = b"PLA1";
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("missing PLA1 magic")]
    BadMagic,
    #[error("unknown stream kind {0}")]
    UnknownKind(u8),
    #[error("unknown method id {0}")]
    UnknownMethod(u8),
    #[error("reserved header bytes are not zero")]
    NonZeroReserved,
    #[error("corrupt stream: {0}")]
    CorruptStream(String),
    #[error("stream ends in the middle of a record")]
    TruncatedStream,
    #[error("{record} cannot be written to a {kind:?} stream")]
    RecordMismatch { kind: StreamKind, record: &'static str },
    #[error("stream headers disagree: {0}")]
    HeaderMismatch(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamKind {
    Implicit = 0,
    TwoStreamsSegments = 1,
    TwoStreamsSingletons = 2,
    SingleStream = 3,
    SingleStreamV = 4,
}

impl StreamKind {
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Some(match id {
            0 => StreamKind::Implicit,
            1 => StreamKind::TwoStreamsSegments,
            2 => StreamKind::TwoStreamsSingletons,
            3 => StreamKind::SingleStream,
            4 => StreamKind::SingleStreamV,
            _ => return None,
        })
    }

    pub fn protocol(self) -> Protocol {
        match self {
            StreamKind::Implicit => Protocol::Implicit,
            StreamKind::TwoStreamsSegments | StreamKind::TwoStreamsSingletons => Protocol::TwoStreams,
            StreamKind::SingleStream => Protocol::SingleStream,
            StreamKind::SingleStreamV => Protocol::SingleStreamV,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamHeader {
    pub kind: StreamKind,
    pub method: MethodKind,
    pub epsilon: f64,
}

impl StreamHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[..4].copy_from_slice(MAGIC);
        h[4] = self.kind.id();
        h[5] = self.method.id();
        h[8..].copy_from_slice(&self.epsilon.to_le_bytes());
        h
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, CodecError> {
        let h = bytes.get(..HEADER_LEN).ok_or(CodecError::TruncatedStream)?;
        if &h[..4] != MAGIC {
            return Err(CodecError::BadMagic);
        }
        let kind = StreamKind::from_id(h[4]).ok_or(CodecError::UnknownKind(h[4]))?;
        let method = MethodKind::from_id(h[5]).ok_or(CodecError::UnknownMethod(h[5]))?;
        if h[6] != 0 || h[7] != 0 {
            return Err(CodecError::NonZeroReserved);
        }
        let epsilon = f64::from_le_bytes(h[8..].try_into().expect("8 bytes"));
        Ok(Self { kind, method, epsilon })
    }
}

fn record_name(r: &CompressionRecord) -> &'static str {
    match r {
        CompressionRecord::ImplicitJoint { .. } => "ImplicitJoint",
        CompressionRecord::ImplicitDisjointHead { .. } => "ImplicitDisjointHead",
        CompressionRecord::ImplicitDisjointTail { .. } => "ImplicitDisjointTail",
        CompressionRecord::QuadSegment { .. } => "QuadSegment",
        CompressionRecord::RawSingleton { .. } => "RawSingleton",
        CompressionRecord::CountedSegment { .. } => "CountedSegment",
        CompressionRecord::CountedSingleton { .. } => "CountedSingleton",
        CompressionRecord::SingletonBurst { .. } => "SingletonBurst",
    }
}

fn put(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Appends the payload bytes of `records` (no header).
pub fn write_records(kind: StreamKind, records: &[CompressionRecord], out: &mut Vec<u8>) -> Result<(), CodecError> {
    for r in records {
        let mismatch = || CodecError::RecordMismatch {
            kind,
            record: record_name(r),
        };
        let bad_len = |n: usize| CodecError::CorruptStream(format!("{} of length {n}", record_name(r)));
        match (kind, r) {
            (StreamKind::Implicit, &CompressionRecord::ImplicitJoint { t, y }) => {
                if t.is_sign_negative() {
                    return Err(CodecError::CorruptStream(format!("joint knot at negative time {t}")));
                }
                put(out, t);
                put(out, y);
            }
            (StreamKind::Implicit, &CompressionRecord::ImplicitDisjointHead { t, y_end }) => {
                if t.is_sign_negative() {
                    return Err(CodecError::CorruptStream(format!("disjoint knot at negative time {t}")));
                }
                put(out, -t);
                put(out, y_end);
            }
            (StreamKind::Implicit, &CompressionRecord::ImplicitDisjointTail { y_start }) => put(out, y_start),
            (StreamKind::TwoStreamsSegments, &CompressionRecord::QuadSegment { t0, n, a, b }) => {
                if !(4..=256).contains(&n) {
                    return Err(bad_len(n));
                }
                put(out, t0);
                out.push((n - 1) as u8);
                put(out, a);
                put(out, b);
            }
            (StreamKind::TwoStreamsSingletons, &CompressionRecord::RawSingleton { y }) => put(out, y),
            (StreamKind::SingleStream, &CompressionRecord::CountedSegment { n, a, b }) => {
                if !(3..=256).contains(&n) {
                    return Err(bad_len(n));
                }
                out.push(if n == 256 { 0 } else { n as u8 });
                put(out, a);
                put(out, b);
            }
            (StreamKind::SingleStream, &CompressionRecord::CountedSingleton { y }) => {
                out.push(1);
                put(out, y);
            }
            (StreamKind::SingleStreamV, &CompressionRecord::CountedSegment { n, a, b }) => {
                if !(3..=127).contains(&n) {
                    return Err(bad_len(n));
                }
                out.push(n as u8);
                put(out, a);
                put(out, b);
            }
            (StreamKind::SingleStreamV, CompressionRecord::SingletonBurst { ys }) => {
                if !(1..=127).contains(&ys.len()) {
                    return Err(bad_len(ys.len()));
                }
                out.push((-(ys.len() as i8)) as u8);
                for &y in ys {
                    put(out, y);
                }
            }
            _ => return Err(mismatch()),
        }
    }
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn done(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn byte(&mut self) -> Result<u8, CodecError> {
        let b = *self.bytes.get(self.pos).ok_or(CodecError::TruncatedStream)?;
        self.pos += 1;
        Ok(b)
    }

    fn f64(&mut self) -> Result<f64, CodecError> {
        let chunk = self
            .bytes
            .get(self.pos..self.pos + 8)
            .ok_or(CodecError::TruncatedStream)?;
        self.pos += 8;
        Ok(f64::from_le_bytes(chunk.try_into().expect("8 bytes")))
    }
}

/// Parses payload bytes (no header) of a `kind` stream.
pub fn read_records(kind: StreamKind, bytes: &[u8]) -> Result<Vec<CompressionRecord>, CodecError> {
    let mut r = Reader { bytes, pos: 0 };
    let mut out = Vec::new();
    while !r.done() {
        match kind {
            StreamKind::Implicit => {
                let t = r.f64()?;
                if t.is_sign_negative() {
                    out.push(CompressionRecord::ImplicitDisjointHead { t: -t, y_end: r.f64()? });
                    out.push(CompressionRecord::ImplicitDisjointTail { y_start: r.f64()? });
                } else {
                    out.push(CompressionRecord::ImplicitJoint { t, y: r.f64()? });
                }
            }
            StreamKind::TwoStreamsSegments => {
                let t0 = r.f64()?;
                let n = r.byte()? as usize + 1;
                if n < 4 {
                    return Err(CodecError::CorruptStream(format!("segment length {n}")));
                }
                out.push(CompressionRecord::QuadSegment {
                    t0,
                    n,
                    a: r.f64()?,
                    b: r.f64()?,
                });
            }
            StreamKind::TwoStreamsSingletons => out.push(CompressionRecord::RawSingleton { y: r.f64()? }),
            StreamKind::SingleStream => match r.byte()? {
                1 => out.push(CompressionRecord::CountedSingleton { y: r.f64()? }),
                2 => return Err(CodecError::CorruptStream("counter 2".into())),
                c => {
                    let n = if c == 0 { 256 } else { c as usize };
                    out.push(CompressionRecord::CountedSegment {
                        n,
                        a: r.f64()?,
                        b: r.f64()?,
                    });
                }
            },
            StreamKind::SingleStreamV => match r.byte()? as i8 {
                c @ 3..=127 => out.push(CompressionRecord::CountedSegment {
                    n: c as usize,
                    a: r.f64()?,
                    b: r.f64()?,
                }),
                c @ -127..=-1 => {
                    let ys = (0..c.unsigned_abs()).map(|_| r.f64()).collect::<Result<_, _>>()?;
                    out.push(CompressionRecord::SingletonBurst { ys });
                }
                c => return Err(CodecError::CorruptStream(format!("counter {c}"))),
            },
        }
    }
    Ok(out)
}

/// Header followed by the payload.
pub fn write_stream(header: &StreamHeader, records: &[CompressionRecord]) -> Result<Vec<u8>, CodecError> {
    let mut out = header.to_bytes().to_vec();
    write_records(header.kind, records, &mut out)?;
    Ok(out)
}

pub fn read_stream(bytes: &[u8]) -> Result<(StreamHeader, Vec<CompressionRecord>), CodecError> {
    let header = StreamHeader::parse(bytes)?;
    let records = read_records(header.kind, &bytes[HEADER_LEN..])?;
    Ok((header, records))
}

/// The byte streams of one encoded channel. Only the two-stream protocol
/// fills `singletons`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedStreams {
    pub primary: Vec<u8>,
    pub singletons: Option<Vec<u8>>,
}

impl EncodedStreams {
    pub fn total_len(&self) -> usize {
        self.primary.len() + self.singletons.as_ref().map_or(0, Vec::len)
    }
}

pub fn encode_streams(
    protocol: Protocol,
    method: MethodKind,
    epsilon: f64,
    records: &[CompressionRecord],
) -> Result<EncodedStreams, CodecError> {
    let header = |kind| StreamHeader { kind, method, epsilon };
    Ok(match protocol {
        Protocol::TwoStreams => {
            let (segs, singles): (Vec<_>, Vec<_>) = records
                .iter()
                .cloned()
                .partition(|r| matches!(r, CompressionRecord::QuadSegment { .. }));
            EncodedStreams {
                primary: write_stream(&header(StreamKind::TwoStreamsSegments), &segs)?,
                singletons: Some(write_stream(&header(StreamKind::TwoStreamsSingletons), &singles)?),
            }
        }
        Protocol::Implicit => EncodedStreams {
            primary: write_stream(&header(StreamKind::Implicit), records)?,
            singletons: None,
        },
        Protocol::SingleStream => EncodedStreams {
            primary: write_stream(&header(StreamKind::SingleStream), records)?,
            singletons: None,
        },
        Protocol::SingleStreamV => EncodedStreams {
            primary: write_stream(&header(StreamKind::SingleStreamV), records)?,
            singletons: None,
        },
    })
}

/// Parses the stream(s) of one channel. The two-stream protocol needs both
/// files, in either order.
pub fn decode_streams(
    primary: &[u8],
    singletons: Option<&[u8]>,
) -> Result<(Protocol, MethodKind, f64, Vec<CompressionRecord>), CodecError> {
    let (h, mut records) = read_stream(primary)?;
    match (h.kind, singletons) {
        (StreamKind::TwoStreamsSegments | StreamKind::TwoStreamsSingletons, Some(other)) => {
            let (h2, more) = read_stream(other)?;
            let kinds = [h.kind, h2.kind];
            if !kinds.contains(&StreamKind::TwoStreamsSegments) || !kinds.contains(&StreamKind::TwoStreamsSingletons) {
                return Err(CodecError::HeaderMismatch(
                    "expected one segment and one singleton stream",
                ));
            }
            if h.method != h2.method || h.epsilon.to_bits() != h2.epsilon.to_bits() {
                return Err(CodecError::HeaderMismatch("method or threshold differ"));
            }
            records.extend(more);
        }
        (StreamKind::TwoStreamsSegments | StreamKind::TwoStreamsSingletons, None) => {
            return Err(CodecError::HeaderMismatch("the two-stream protocol needs both streams"));
        }
        (_, Some(_)) => return Err(CodecError::HeaderMismatch("unexpected second stream")),
        (_, None) => {}
    }
    Ok((h.kind.protocol(), h.method, h.epsilon, records))
}
