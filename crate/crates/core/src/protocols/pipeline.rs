use std::collections::VecDeque;
use std::ops::Range;

use thiserror::Error;

use super::{CompressionRecord, Protocol};
use crate::knots::{Boundary, KnotBuilder, KnotError, KnotPart};
use crate::methods::{MethodError, MethodKind, PlaMethod};
use crate::types::{ErrorThreshold, InputTuple, SegmentSummary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("{method} cannot be used with the {protocol} protocol")]
    IllegalPairing { method: MethodKind, protocol: Protocol },
    #[error("segment cap {cap} is outside {min}..={max}")]
    CapOutOfRange { cap: usize, min: usize, max: usize },
    #[error("timestamp {0} is negative; the implicit protocol needs t >= 0")]
    NegativeTimestamp(f64),
    #[error(transparent)]
    Method(#[from] MethodError),
    #[error(transparent)]
    Knot(#[from] KnotError),
}

/// A record together with the bookkeeping the metrics need.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub record: CompressionRecord,
    /// Index of the input tuple whose processing produced the record; the
    /// stream length for records produced by [`Pipeline::finish`].
    pub emitted_at: usize,
    /// Input indices the record reconstructs. For implicit knot parts this
    /// is the segment whose closure produced the part.
    pub covers: Range<usize>,
    /// Implicit knot parts that open the segment after `covers`.
    pub opens_next: bool,
}

/// Streaming encoder: one method feeding one protocol.
#[derive(Debug, Clone)]
pub struct Pipeline {
    protocol: Protocol,
    method: PlaMethod,
    min_length: usize,
    index: usize,
    last_t: Option<f64>,
    // Counter protocols: tuples fed to the method but not yet emitted.
    shadow: VecDeque<InputTuple>,
    shadow_start: usize,
    fed: usize,
    burst: Vec<f64>,
    burst_start: usize,
    // Implicit.
    knots: KnotBuilder,
    out: Vec<Emission>,
}

const BURST_CAP: usize = 127;

impl Pipeline {
    /// Pipeline with the protocol's default segment cap.
    pub fn new(method: MethodKind, protocol: Protocol, eps: ErrorThreshold) -> Result<Self, PipelineError> {
        Self::with_max_length(method, protocol, eps, protocol.default_max_length())
    }

    /// `max_length == 0` is only accepted by the implicit protocol and
    /// leaves segments uncapped.
    pub fn with_max_length(
        method: MethodKind,
        protocol: Protocol,
        eps: ErrorThreshold,
        max_length: usize,
    ) -> Result<Self, PipelineError> {
        if !protocol.supports(method) {
            return Err(PipelineError::IllegalPairing { method, protocol });
        }
        let (min, max) = match protocol.length_limit() {
            Some(limit) => (1, limit),
            None => (2, usize::MAX),
        };
        if !(max_length == 0 && protocol == Protocol::Implicit || (min..=max).contains(&max_length)) {
            return Err(PipelineError::CapOutOfRange {
                cap: max_length,
                min,
                max,
            });
        }
        Ok(Self {
            protocol,
            method: PlaMethod::new(method, eps, max_length),
            min_length: protocol.min_length(),
            index: 0,
            last_t: None,
            shadow: VecDeque::new(),
            shadow_start: 0,
            fed: 0,
            burst: Vec::new(),
            burst_start: 0,
            knots: KnotBuilder::new(),
            out: Vec::new(),
        })
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn method(&self) -> MethodKind {
        self.method.kind()
    }

    pub fn epsilon(&self) -> ErrorThreshold {
        self.method.epsilon()
    }

    pub fn max_length(&self) -> usize {
        self.method.max_length()
    }

    /// Number of tuples pushed so far.
    pub fn len(&self) -> usize {
        self.index
    }

    pub fn is_empty(&self) -> bool {
        self.index == 0
    }

    pub fn push(&mut self, p: InputTuple) -> Result<Vec<Emission>, PipelineError> {
        if !p.is_finite() {
            return Err(MethodError::NonFiniteValue { t: p.t, y: p.y }.into());
        }
        if let Some(last) = self.last_t {
            if p.t <= last {
                return Err(MethodError::NonMonotonicTime { t: p.t, last }.into());
            }
        }
        if self.protocol == Protocol::Implicit && p.t.is_sign_negative() {
            return Err(PipelineError::NegativeTimestamp(p.t));
        }
        let at = self.index;
        if self.protocol == Protocol::Implicit {
            if let Some(seg) = self.method.push(p)? {
                let boundary = if self.method.open_is_joined() {
                    Boundary::Joint
                } else {
                    Boundary::Disjoint { next_start: p.t }
                };
                self.emit_knots(&seg, boundary, at)?;
            }
        } else {
            self.shadow.push_back(p);
            self.drive(at)?;
        }
        self.index += 1;
        self.last_t = Some(p.t);
        Ok(std::mem::take(&mut self.out))
    }

    /// Flushes everything still buffered and ends the stream.
    pub fn finish(mut self) -> Result<Vec<Emission>, PipelineError> {
        let at = self.index;
        let seg = self.method.finish();
        if self.protocol == Protocol::Implicit {
            if let Some(seg) = seg {
                self.emit_knots(&seg, Boundary::End, at)?;
            }
        } else {
            match seg {
                Some(seg) if seg.length >= self.min_length => {
                    self.emit_segment(&seg, at);
                }
                _ => {
                    while !self.shadow.is_empty() {
                        self.demote_front(at);
                    }
                }
            }
            self.flush_burst(at);
        }
        Ok(self.out)
    }

    /// Feeds shadow-buffered tuples to the method until all are absorbed.
    fn drive(&mut self, at: usize) -> Result<(), PipelineError> {
        while self.fed < self.shadow.len() {
            let q = self.shadow[self.fed];
            self.fed += 1;
            let Some(seg) = self.method.push(q)? else { continue };
            if seg.length >= self.min_length {
                self.emit_segment(&seg, at);
            } else {
                // Demote the earliest tuple and retry the rest from scratch.
                self.demote_front(at);
                self.method.reset(self.shadow_start);
                self.fed = 0;
            }
        }
        Ok(())
    }

    fn emit(&mut self, record: CompressionRecord, at: usize, covers: Range<usize>) {
        self.out.push(Emission {
            record,
            emitted_at: at,
            covers,
            opens_next: false,
        });
    }

    fn emit_segment(&mut self, seg: &SegmentSummary, at: usize) {
        debug_assert_eq!(seg.start_index, self.shadow_start);
        let (n, a, b) = (seg.length, seg.line.a, seg.line.b);
        let record = match self.protocol {
            Protocol::TwoStreams => CompressionRecord::QuadSegment {
                t0: seg.start_t,
                n,
                a,
                b,
            },
            Protocol::SingleStreamV => {
                self.flush_burst(at);
                CompressionRecord::CountedSegment { n, a, b }
            }
            _ => CompressionRecord::CountedSegment { n, a, b },
        };
        self.emit(record, at, seg.indices());
        self.shadow.drain(..n);
        self.shadow_start += n;
        self.fed -= n.min(self.fed);
    }

    /// Emits the front shadow tuple as a singleton.
    fn demote_front(&mut self, at: usize) {
        let i = self.shadow_start;
        let Some(InputTuple { y, .. }) = self.shadow.pop_front() else {
            return;
        };
        self.shadow_start += 1;
        match self.protocol {
            Protocol::TwoStreams => self.emit(CompressionRecord::RawSingleton { y }, at, i..i + 1),
            Protocol::SingleStreamV => {
                if self.burst.is_empty() {
                    self.burst_start = i;
                }
                self.burst.push(y);
                if self.burst.len() == BURST_CAP {
                    self.flush_burst(at);
                }
            }
            _ => self.emit(CompressionRecord::CountedSingleton { y }, at, i..i + 1),
        }
    }

    fn flush_burst(&mut self, at: usize) {
        if self.burst.is_empty() {
            return;
        }
        let ys = std::mem::take(&mut self.burst);
        let covers = self.burst_start..self.burst_start + ys.len();
        self.emit(CompressionRecord::SingletonBurst { ys }, at, covers);
    }

    fn emit_knots(&mut self, seg: &SegmentSummary, boundary: Boundary, at: usize) -> Result<(), PipelineError> {
        let last_t = self.last_t.unwrap_or(seg.start_t);
        let parts = self.knots.close(seg, last_t, boundary)?;
        let n = parts.len();
        for (k, part) in parts.into_iter().enumerate() {
            let record = match part {
                KnotPart::Joint { t, y } => CompressionRecord::ImplicitJoint { t, y },
                KnotPart::DisjointHead { t, y_end } => CompressionRecord::ImplicitDisjointHead { t, y_end },
                KnotPart::DisjointTail { y_start } => CompressionRecord::ImplicitDisjointTail { y_start },
            };
            let opens_next = boundary != Boundary::End && k + 1 == n;
            self.out.push(Emission {
                record,
                emitted_at: at,
                covers: seg.indices(),
                opens_next,
            });
        }
        Ok(())
    }
}

/// Runs a whole stream through a fresh pipeline.
pub fn compress(
    method: MethodKind,
    protocol: Protocol,
    eps: ErrorThreshold,
    max_length: Option<usize>,
    tuples: &[InputTuple],
) -> Result<Vec<Emission>, PipelineError> {
    let mut pipeline = match max_length {
        Some(cap) => Pipeline::with_max_length(method, protocol, eps, cap)?,
        None => Pipeline::new(method, protocol, eps)?,
    };
    let mut out = Vec::new();
    for &p in tuples {
        out.extend(pipeline.push(p)?);
    }
    out.extend(pipeline.finish()?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(e: f64) -> ErrorThreshold {
        ErrorThreshold::new(e).unwrap()
    }

    fn tuples(v: &[(f64, f64)]) -> Vec<InputTuple> {
        v.iter().map(|&p| p.into()).collect()
    }

    fn records(method: MethodKind, protocol: Protocol, e: f64, v: &[InputTuple]) -> Vec<CompressionRecord> {
        compress(method, protocol, eps(e), None, v)
            .unwrap()
            .into_iter()
            .map(|e| e.record)
            .collect()
    }

    fn alternating(n: usize) -> Vec<InputTuple> {
        (0..n)
            .map(|i| InputTuple::new(i as f64, if i % 2 == 0 { 0.0 } else { 4.0 }))
            .collect()
    }

    #[test]
    fn alternating_two_streams_is_all_singletons() {
        let out = compress(
            MethodKind::Disjoint,
            Protocol::TwoStreams,
            eps(1.0),
            None,
            &alternating(6),
        )
        .unwrap();
        let ys: Vec<_> = out
            .iter()
            .map(|e| match e.record {
                CompressionRecord::RawSingleton { y } => y,
                ref r => panic!("unexpected {r:?}"),
            })
            .collect();
        assert_eq!(ys, [0.0, 4.0, 0.0, 4.0, 0.0, 4.0]);
        for (i, e) in out.iter().enumerate() {
            assert_eq!(e.covers, i..i + 1);
        }
    }

    #[test]
    fn constant_single_stream_is_one_record() {
        let v: Vec<_> = (0..10).map(|i| InputTuple::new(i as f64, 5.0)).collect();
        let out = compress(MethodKind::Disjoint, Protocol::SingleStream, eps(0.1), None, &v).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(
            out[0].record,
            CompressionRecord::CountedSegment { n: 10, a: 0.0, b: 5.0 }
        );
        assert_eq!(out[0].record.size_bytes(), 17);
        assert_eq!((out[0].emitted_at, out[0].covers.clone()), (10, 0..10));
    }

    #[test]
    fn implicit_two_part_disjoint_knot() {
        let v = tuples(&[(0.0, 0.0), (1.0, 1.0), (2.0, 9.0), (3.0, 9.0)]);
        let out = compress(MethodKind::Disjoint, Protocol::Implicit, eps(0.5), None, &v).unwrap();
        let recs: Vec<_> = out.iter().map(|e| e.record.clone()).collect();
        assert_eq!(
            recs,
            [
                CompressionRecord::ImplicitJoint { t: 0.0, y: 0.0 },
                CompressionRecord::ImplicitDisjointHead { t: 2.0, y_end: 2.0 },
                CompressionRecord::ImplicitDisjointTail { y_start: 9.0 },
                CompressionRecord::ImplicitJoint { t: 3.0, y: 9.0 },
            ]
        );
        let at: Vec<_> = out.iter().map(|e| (e.emitted_at, e.opens_next)).collect();
        assert_eq!(at, [(2, false), (2, true), (4, false), (4, false)]);
    }

    #[test]
    fn empty_stream_emits_nothing() {
        for (m, p) in Protocol::pairings() {
            assert!(records(m, p, 1.0, &[]).is_empty());
        }
    }

    #[test]
    fn short_tail_becomes_singletons() {
        let v = tuples(&[(0.0, 0.0), (1.0, 4.0), (2.0, 0.0)]);
        assert_eq!(
            records(MethodKind::Disjoint, Protocol::TwoStreams, 1.0, &v),
            [0.0, 4.0, 0.0].map(|y| CompressionRecord::RawSingleton { y })
        );
        // Compressible, but shorter than a quadruplet is worth.
        let v = tuples(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(records(MethodKind::Linear, Protocol::TwoStreams, 1.0, &v).len(), 3);
    }

    #[test]
    fn pending_burst_is_flushed() {
        let v = tuples(&[(0.0, 0.0), (1.0, 4.0)]);
        assert_eq!(
            records(MethodKind::Disjoint, Protocol::SingleStreamV, 1.0, &v),
            [CompressionRecord::SingletonBurst { ys: vec![0.0, 4.0] }]
        );
    }

    #[test]
    fn burst_precedes_segment() {
        let mut v = tuples(&[(0.0, 0.0), (1.0, 4.0)]);
        v.extend((2..10).map(|i| InputTuple::new(i as f64, 0.0)));
        let recs = records(MethodKind::Angle, Protocol::SingleStreamV, 1.0, &v);
        assert_eq!(
            recs,
            [
                CompressionRecord::SingletonBurst { ys: vec![0.0, 4.0] },
                CompressionRecord::CountedSegment { n: 8, a: 0.0, b: 0.0 },
            ]
        );
    }

    #[test]
    fn bursts_cap_at_127() {
        let out = compress(
            MethodKind::Linear,
            Protocol::SingleStreamV,
            eps(1.0),
            None,
            &alternating(300),
        )
        .unwrap();
        let sizes: Vec<_> = out.iter().map(|e| e.record.reconstructs()).collect();
        assert_eq!(sizes, [127, 127, 46]);
    }

    #[test]
    fn demotion_salvages_later_segment() {
        // 0 4 | then flat: the leading pair is demoted one tuple at a time
        // and the flat run still becomes a segment.
        let mut v = tuples(&[(0.0, 0.0), (1.0, 4.0)]);
        v.extend((2..8).map(|i| InputTuple::new(i as f64, 4.0)));
        let recs = records(MethodKind::Disjoint, Protocol::SingleStream, 1.0, &v);
        assert_eq!(recs[0], CompressionRecord::CountedSingleton { y: 0.0 });
        assert!(matches!(recs[1], CompressionRecord::CountedSegment { n: 7, .. }));
        assert_eq!(recs.len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let v: Vec<_> = (0..1000).map(|i| InputTuple::new(i as f64, 1.0)).collect();
        for (m, p) in Protocol::pairings().filter(|&(_, p)| p != Protocol::Implicit) {
            let limit = p.length_limit().unwrap();
            assert!(compress(m, p, eps(1.0), None, &v)
                .unwrap()
                .iter()
                .all(|e| e.record.reconstructs() <= limit));
        }
    }

    #[test]
    fn configuration_errors() {
        let e = eps(1.0);
        assert_eq!(
            Pipeline::new(MethodKind::Swing, Protocol::SingleStream, e).unwrap_err(),
            PipelineError::IllegalPairing {
                method: MethodKind::Swing,
                protocol: Protocol::SingleStream
            }
        );
        assert!(Pipeline::with_max_length(MethodKind::Angle, Protocol::SingleStreamV, e, 128).is_err());
        assert!(Pipeline::with_max_length(MethodKind::Angle, Protocol::TwoStreams, e, 0).is_err());
        assert!(Pipeline::with_max_length(MethodKind::Angle, Protocol::Implicit, e, 1).is_err());
        assert!(Pipeline::with_max_length(MethodKind::Angle, Protocol::Implicit, e, 0).is_ok());
    }

    #[test]
    fn input_errors() {
        let mut p = Pipeline::new(MethodKind::Swing, Protocol::Implicit, eps(1.0)).unwrap();
        assert_eq!(
            p.push(InputTuple::new(-1.0, 0.0)),
            Err(PipelineError::NegativeTimestamp(-1.0))
        );
        p.push(InputTuple::new(0.0, 0.0)).unwrap();
        assert!(matches!(
            p.push(InputTuple::new(0.0, 1.0)),
            Err(PipelineError::Method(MethodError::NonMonotonicTime { .. }))
        ));
        let mut p = Pipeline::new(MethodKind::Angle, Protocol::TwoStreams, eps(1.0)).unwrap();
        p.push(InputTuple::new(1.0, 0.0)).unwrap();
        assert!(p.push(InputTuple::new(0.5, 0.0)).is_err());
    }
}
