use std::collections::VecDeque;

use thiserror::Error;

use super::{CompressionRecord, Protocol};
use crate::knots::{reconstruct, KnotAssembler, KnotError, KnotPart};
use crate::types::ReconstructedTuple;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("corrupt stream: {0}")]
    CorruptStream(String),
    #[error("record stream ended before the timestamp stream")]
    TruncatedStream,
    #[error(transparent)]
    Knot(#[from] KnotError),
}

fn corrupt(msg: impl Into<String>) -> DecodeError {
    DecodeError::CorruptStream(msg.into())
}

/// Rebuilds one value per timestamp from the records of `protocol`.
///
/// For the two-stream protocol `records` may hold the segment and singleton
/// records in any interleaving; only the order within each kind matters.
pub fn protocol_decode(
    protocol: Protocol,
    timestamps: &[f64],
    records: &[CompressionRecord],
) -> Result<Vec<ReconstructedTuple>, DecodeError> {
    match protocol {
        Protocol::Implicit => decode_implicit(timestamps, records),
        Protocol::TwoStreams => decode_two_streams(timestamps, records),
        Protocol::SingleStream | Protocol::SingleStreamV => decode_counted(protocol, timestamps, records),
    }
}

fn decode_implicit(timestamps: &[f64], records: &[CompressionRecord]) -> Result<Vec<ReconstructedTuple>, DecodeError> {
    let mut assembler = KnotAssembler::new();
    let mut knots = Vec::with_capacity(records.len());
    for r in records {
        let part = match *r {
            CompressionRecord::ImplicitJoint { t, y } => KnotPart::Joint { t, y },
            CompressionRecord::ImplicitDisjointHead { t, y_end } => KnotPart::DisjointHead { t, y_end },
            CompressionRecord::ImplicitDisjointTail { y_start } => KnotPart::DisjointTail { y_start },
            _ => return Err(corrupt("non-knot record in an implicit stream")),
        };
        knots.extend(assembler.push(part)?);
    }
    if !assembler.is_idle() {
        return Err(DecodeError::TruncatedStream);
    }
    if timestamps.is_empty() {
        return if knots.is_empty() {
            Ok(Vec::new())
        } else {
            Err(corrupt("knots without timestamps"))
        };
    }
    if knots.is_empty() {
        return Err(DecodeError::TruncatedStream);
    }
    Ok(reconstruct(timestamps, &knots)?)
}

fn take_run(
    out: &mut Vec<ReconstructedTuple>,
    ts: &mut std::iter::Peekable<std::slice::Iter<'_, f64>>,
    n: usize,
    a: f64,
    b: f64,
) -> Result<(), DecodeError> {
    for _ in 0..n {
        let &t = ts.next().ok_or(DecodeError::TruncatedStream)?;
        out.push(ReconstructedTuple { t, y: a * t + b });
    }
    Ok(())
}

fn take_value(
    out: &mut Vec<ReconstructedTuple>,
    ts: &mut std::iter::Peekable<std::slice::Iter<'_, f64>>,
    y: f64,
) -> Result<(), DecodeError> {
    let &t = ts.next().ok_or(DecodeError::TruncatedStream)?;
    out.push(ReconstructedTuple { t, y });
    Ok(())
}

fn decode_two_streams(
    timestamps: &[f64],
    records: &[CompressionRecord],
) -> Result<Vec<ReconstructedTuple>, DecodeError> {
    let mut segments = VecDeque::new();
    let mut singles = VecDeque::new();
    for r in records {
        match *r {
            CompressionRecord::QuadSegment { t0, n, a, b } => {
                if !(4..=256).contains(&n) {
                    return Err(corrupt(format!("segment length {n}")));
                }
                segments.push_back((t0, n, a, b));
            }
            CompressionRecord::RawSingleton { y } => singles.push_back(y),
            _ => return Err(corrupt("foreign record in a two-stream encoding")),
        }
    }
    let mut out = Vec::with_capacity(timestamps.len());
    let mut ts = timestamps.iter().peekable();
    while let Some(&&t) = ts.peek() {
        match segments.front() {
            Some(&(t0, n, a, b)) if t >= t0 => {
                segments.pop_front();
                take_run(&mut out, &mut ts, n, a, b)?;
            }
            _ => {
                let y = singles.pop_front().ok_or(DecodeError::TruncatedStream)?;
                out.push(ReconstructedTuple { t, y });
                ts.next();
            }
        }
    }
    if !segments.is_empty() || !singles.is_empty() {
        return Err(corrupt("records left after the last timestamp"));
    }
    Ok(out)
}

fn decode_counted(
    protocol: Protocol,
    timestamps: &[f64],
    records: &[CompressionRecord],
) -> Result<Vec<ReconstructedTuple>, DecodeError> {
    let limit = protocol.length_limit().unwrap_or(usize::MAX);
    let mut out = Vec::with_capacity(timestamps.len());
    let mut ts = timestamps.iter().peekable();
    for r in records {
        if ts.peek().is_none() {
            return Err(corrupt("records left after the last timestamp"));
        }
        match (protocol, r) {
            (_, &CompressionRecord::CountedSegment { n, a, b }) if (3..=limit).contains(&n) => {
                take_run(&mut out, &mut ts, n, a, b)?;
            }
            (_, CompressionRecord::CountedSegment { n, .. }) => {
                return Err(corrupt(format!("segment length {n}")));
            }
            (Protocol::SingleStream, &CompressionRecord::CountedSingleton { y }) => {
                take_value(&mut out, &mut ts, y)?;
            }
            (Protocol::SingleStreamV, CompressionRecord::SingletonBurst { ys }) if (1..=127).contains(&ys.len()) => {
                for &y in ys {
                    take_value(&mut out, &mut ts, y)?;
                }
            }
            _ => return Err(corrupt(format!("unexpected record for {protocol}"))),
        }
    }
    if ts.peek().is_some() {
        return Err(DecodeError::TruncatedStream);
    }
    Ok(out)
}
