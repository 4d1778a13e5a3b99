//! Knot records, the knot/segment conversions and timestamp-driven
//! reconstruction.
//!
//! A knot sequence starts and ends with a [`Knot::Joint`]. Each adjacent pair
//! of knots defines one line; the line that reconstructs timestamp `t` is the
//! one whose opening knot is the latest knot with `knot.t <= t`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::types::{LineCoefficients, Point, ReconstructedTuple, SegmentSummary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KnotError {
    #[error("knots share timestamp {0}")]
    EqualTimestamps(f64),
    #[error("segments are not contiguous at index {index} (expected {expected})")]
    NonContiguous { index: usize, expected: usize },
    #[error("timestamp {t} precedes the first knot at {first}")]
    TimestampBeforeFirstKnot { t: f64, first: f64 },
    #[error("malformed knot stream: {0}")]
    MalformedKnotStream(&'static str),
}

/// A PLA record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Knot {
    /// Two consecutive lines share the endpoint `(t, y)`.
    Joint { t: f64, y: f64 },
    /// The earlier line ends at `(t, y_end)`, the next one starts at
    /// `(t, y_start)`.
    Disjoint { t: f64, y_end: f64, y_start: f64 },
}

impl Knot {
    pub fn t(&self) -> f64 {
        match *self {
            Knot::Joint { t, .. } | Knot::Disjoint { t, .. } => t,
        }
    }

    pub fn is_joint(&self) -> bool {
        matches!(self, Knot::Joint { .. })
    }

    /// Point where a line leaving this knot starts.
    fn start_point(&self) -> Point {
        match *self {
            Knot::Joint { t, y } => Point::new(t, y),
            Knot::Disjoint { t, y_start, .. } => Point::new(t, y_start),
        }
    }

    /// Point where a line arriving at this knot ends.
    fn end_point(&self) -> Point {
        match *self {
            Knot::Joint { t, y } => Point::new(t, y),
            Knot::Disjoint { t, y_end, .. } => Point::new(t, y_end),
        }
    }
}

/// Coefficients of the line running from `prev` to `cur`.
pub fn segment_from_knots(prev: &Knot, cur: &Knot) -> Result<LineCoefficients, KnotError> {
    if prev.t() == cur.t() {
        return Err(KnotError::EqualTimestamps(cur.t()));
    }
    if prev.t() > cur.t() {
        return Err(KnotError::MalformedKnotStream("knot timestamps must increase"));
    }
    Ok(LineCoefficients::between(prev.start_point(), cur.end_point()))
}

/// A knot, or half of a disjoint knot, as it becomes known during streaming.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KnotPart {
    Joint {
        t: f64,
        y: f64,
    },
    /// `(t, y_end)` of a disjoint knot; known once the earlier line is fixed.
    DisjointHead {
        t: f64,
        y_end: f64,
    },
    /// `y_start` of a disjoint knot; known once the following line is fixed.
    DisjointTail {
        y_start: f64,
    },
}

/// How the segment being closed connects to what follows it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// The next segment starts at this segment's endpoint.
    Joint,
    /// The next segment starts at `next_start` with its own value.
    Disjoint { next_start: f64 },
    /// No segment follows.
    End,
}

/// Incremental segment-to-knot conversion.
///
/// Every call to [`KnotBuilder::close`] yields the knot parts that became
/// known when that segment closed. Joint knots sit at the last covered
/// timestamp of the earlier segment; disjoint knots sit at the first covered
/// timestamp of the later one.
#[derive(Debug, Clone, Default)]
pub struct KnotBuilder {
    /// Timestamp of the knot opening the next segment to close.
    open_t: Option<f64>,
    /// Spacing used when a one-tuple final segment needs a closing knot.
    last_gap: Option<f64>,
    tail_pending: bool,
}

impl KnotBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn close(&mut self, seg: &SegmentSummary, last_t: f64, boundary: Boundary) -> Result<Vec<KnotPart>, KnotError> {
        let line = seg.line;
        let mut parts = Vec::with_capacity(3);
        let open_t = match self.open_t {
            None => {
                parts.push(KnotPart::Joint {
                    t: seg.start_t,
                    y: line.eval(seg.start_t),
                });
                seg.start_t
            }
            Some(t) => t,
        };
        if self.tail_pending {
            parts.push(KnotPart::DisjointTail {
                y_start: line.eval(open_t),
            });
            self.tail_pending = false;
        }
        match boundary {
            Boundary::Joint => {
                if last_t <= open_t {
                    return Err(KnotError::EqualTimestamps(last_t));
                }
                parts.push(KnotPart::Joint {
                    t: last_t,
                    y: line.eval(last_t),
                });
                self.last_gap = Some(last_t - open_t);
                self.open_t = Some(last_t);
            }
            Boundary::Disjoint { next_start } => {
                if next_start <= last_t || last_t < open_t {
                    return Err(KnotError::MalformedKnotStream("segment boundary out of order"));
                }
                parts.push(KnotPart::DisjointHead {
                    t: next_start,
                    y_end: line.eval(next_start),
                });
                self.last_gap = Some(next_start - last_t);
                self.open_t = Some(next_start);
                self.tail_pending = true;
            }
            Boundary::End => {
                let end_t = if last_t > open_t {
                    last_t
                } else {
                    open_t + self.last_gap.unwrap_or(1.0)
                };
                parts.push(KnotPart::Joint {
                    t: end_t,
                    y: line.eval(end_t),
                });
                self.open_t = None;
                self.last_gap = None;
            }
        }
        Ok(parts)
    }
}

/// Joins streamed knot parts back into whole knots.
#[derive(Debug, Clone, Default)]
pub struct KnotAssembler {
    head: Option<(f64, f64)>,
}

impl KnotAssembler {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, part: KnotPart) -> Result<Option<Knot>, KnotError> {
        match (part, self.head) {
            (KnotPart::Joint { t, y }, None) => Ok(Some(Knot::Joint { t, y })),
            (KnotPart::DisjointHead { t, y_end }, None) => {
                self.head = Some((t, y_end));
                Ok(None)
            }
            (KnotPart::DisjointTail { y_start }, Some((t, y_end))) => {
                self.head = None;
                Ok(Some(Knot::Disjoint { t, y_end, y_start }))
            }
            (KnotPart::DisjointTail { .. }, None) => Err(KnotError::MalformedKnotStream("disjoint tail without head")),
            (_, Some(_)) => Err(KnotError::MalformedKnotStream("disjoint head without tail")),
        }
    }

    pub fn is_idle(&self) -> bool {
        self.head.is_none()
    }
}

/// Converts a contiguous run of segments into a knot sequence.
///
/// `tuple_ts` holds the timestamps of exactly the covered tuples; the first
/// segment covers `tuple_ts[0]`.
pub fn segments_to_knots(segments: &[SegmentSummary], tuple_ts: &[f64]) -> Result<Vec<Knot>, KnotError> {
    let Some(first) = segments.first() else {
        return Ok(Vec::new());
    };
    let base = first.start_index;
    let mut expected = base;
    for seg in segments {
        if seg.start_index != expected || seg.length == 0 {
            return Err(KnotError::NonContiguous {
                index: seg.start_index,
                expected,
            });
        }
        expected = seg.end_index();
    }
    if expected - base != tuple_ts.len() {
        return Err(KnotError::NonContiguous {
            index: expected,
            expected: base + tuple_ts.len(),
        });
    }

    let mut builder = KnotBuilder::new();
    let mut assembler = KnotAssembler::new();
    let mut knots = Vec::with_capacity(segments.len() + 1);
    for (k, seg) in segments.iter().enumerate() {
        let end = seg.end_index() - base;
        let boundary = match segments.get(k + 1) {
            None => Boundary::End,
            Some(next) if next.joined_to_previous => Boundary::Joint,
            Some(_) => Boundary::Disjoint {
                next_start: tuple_ts[end],
            },
        };
        for part in builder.close(seg, tuple_ts[end - 1], boundary)? {
            if let Some(knot) = assembler.push(part)? {
                knots.push(knot);
            }
        }
    }
    Ok(knots)
}

/// Streaming reconstruction from a knot stream and a timestamp stream.
///
/// A timestamp is resolved once a knot strictly later than it is known (or
/// at [`Reconstructor::finish`]), so output trails input by one segment.
#[derive(Debug, Clone, Default)]
pub struct Reconstructor {
    knots: VecDeque<Knot>,
    first_t: Option<f64>,
    pending: VecDeque<f64>,
    last_ts: Option<f64>,
    finished: bool,
}

impl Reconstructor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_knot(&mut self, knot: Knot) -> Result<Vec<ReconstructedTuple>, KnotError> {
        if self.finished {
            return Err(KnotError::MalformedKnotStream("knot after end of stream"));
        }
        match self.knots.back() {
            None => {
                if self.first_t.is_some() {
                    return Err(KnotError::MalformedKnotStream("knot stream restarted"));
                }
                if !knot.is_joint() {
                    return Err(KnotError::MalformedKnotStream("first knot must be joint"));
                }
                if let Some(&t) = self.pending.front() {
                    if t < knot.t() {
                        return Err(KnotError::TimestampBeforeFirstKnot { t, first: knot.t() });
                    }
                }
                self.first_t = Some(knot.t());
            }
            Some(last) if knot.t() <= last.t() => {
                return Err(KnotError::MalformedKnotStream("knot timestamps must increase"));
            }
            Some(_) => {}
        }
        self.knots.push_back(knot);
        self.drain(false)
    }

    pub fn push_timestamp(&mut self, t: f64) -> Result<Vec<ReconstructedTuple>, KnotError> {
        if let Some(prev) = self.last_ts {
            if t <= prev {
                return Err(KnotError::MalformedKnotStream("timestamps must increase"));
            }
        }
        if let Some(first) = self.first_t {
            if t < first {
                return Err(KnotError::TimestampBeforeFirstKnot { t, first });
            }
        }
        self.last_ts = Some(t);
        self.pending.push_back(t);
        self.drain(false)
    }

    /// Declares both streams complete and resolves what remains.
    pub fn finish(&mut self) -> Result<Vec<ReconstructedTuple>, KnotError> {
        self.finished = true;
        if let Some(last) = self.knots.back() {
            if !last.is_joint() {
                return Err(KnotError::MalformedKnotStream("last knot must be joint"));
            }
        }
        let out = self.drain(true)?;
        if !self.pending.is_empty() {
            return Err(KnotError::MalformedKnotStream("timestamps left without a segment"));
        }
        Ok(out)
    }

    fn drain(&mut self, at_end: bool) -> Result<Vec<ReconstructedTuple>, KnotError> {
        let mut out = Vec::new();
        while let Some(&t) = self.pending.front() {
            while self.knots.len() > 2 && self.knots[1].t() <= t {
                self.knots.pop_front();
            }
            if self.knots.len() < 2 {
                break;
            }
            if t >= self.knots[1].t() && !at_end {
                break;
            }
            let line = segment_from_knots(&self.knots[0], &self.knots[1])?;
            out.push(ReconstructedTuple { t, y: line.eval(t) });
            self.pending.pop_front();
        }
        Ok(out)
    }
}

/// Batch form of [`Reconstructor`].
pub fn reconstruct(timestamps: &[f64], knots: &[Knot]) -> Result<Vec<ReconstructedTuple>, KnotError> {
    let mut r = Reconstructor::new();
    let mut out = Vec::with_capacity(timestamps.len());
    for &k in knots {
        out.extend(r.push_knot(k)?);
    }
    for &t in timestamps {
        out.extend(r.push_timestamp(t)?);
    }
    out.extend(r.finish()?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(start_index: usize, start_t: f64, length: usize, a: f64, b: f64, joined: bool) -> SegmentSummary {
        SegmentSummary {
            start_index,
            start_t,
            length,
            line: LineCoefficients::new(a, b),
            joined_to_previous: joined,
        }
    }

    #[test]
    fn line_from_joint_pair() {
        let l = segment_from_knots(&Knot::Joint { t: 0.0, y: 0.0 }, &Knot::Joint { t: 2.0, y: 2.0 }).unwrap();
        assert_eq!(l, LineCoefficients::new(1.0, 0.0));
    }

    #[test]
    fn line_from_disjoint_start() {
        let prev = Knot::Disjoint {
            t: 1.0,
            y_end: 5.0,
            y_start: 3.0,
        };
        let l = segment_from_knots(&prev, &Knot::Joint { t: 3.0, y: 7.0 }).unwrap();
        assert_eq!(l, LineCoefficients::new(2.0, 1.0));
    }

    #[test]
    fn equal_knot_timestamps_rejected() {
        let e = segment_from_knots(&Knot::Joint { t: 1.0, y: 4.0 }, &Knot::Joint { t: 1.0, y: 9.0 });
        assert_eq!(e, Err(KnotError::EqualTimestamps(1.0)));
    }

    #[test]
    fn single_segment_knots() {
        let knots = segments_to_knots(&[seg(0, 0.0, 3, 0.0, 5.0, false)], &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(
            knots,
            vec![Knot::Joint { t: 0.0, y: 5.0 }, Knot::Joint { t: 2.0, y: 5.0 }]
        );
    }

    #[test]
    fn disjoint_pair_of_segments() {
        let segs = [seg(0, 0.0, 2, 1.0, 0.0, false), seg(2, 2.0, 2, 0.0, 9.0, false)];
        let knots = segments_to_knots(&segs, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(
            knots,
            vec![
                Knot::Joint { t: 0.0, y: 0.0 },
                Knot::Disjoint {
                    t: 2.0,
                    y_end: 2.0,
                    y_start: 9.0
                },
                Knot::Joint { t: 3.0, y: 9.0 },
            ]
        );
    }

    #[test]
    fn joined_segments_share_a_joint_knot() {
        // y = t up to t = 2, then y = 2 + 3 (t - 2)
        let segs = [seg(0, 0.0, 3, 1.0, 0.0, false), seg(3, 3.0, 2, 3.0, -4.0, true)];
        let knots = segments_to_knots(&segs, &[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(
            knots,
            vec![
                Knot::Joint { t: 0.0, y: 0.0 },
                Knot::Joint { t: 2.0, y: 2.0 },
                Knot::Joint { t: 4.0, y: 8.0 },
            ]
        );
        for (pair, s) in knots.windows(2).zip(&segs) {
            assert_eq!(segment_from_knots(&pair[0], &pair[1]).unwrap(), s.line);
        }
    }

    #[test]
    fn gaps_and_overlaps_are_rejected() {
        let ts = [0.0, 1.0, 2.0, 3.0];
        let gap = [seg(0, 0.0, 1, 0.0, 0.0, false), seg(2, 2.0, 2, 0.0, 0.0, false)];
        assert!(matches!(
            segments_to_knots(&gap, &ts),
            Err(KnotError::NonContiguous { .. })
        ));
        let overlap = [seg(0, 0.0, 3, 0.0, 0.0, false), seg(2, 2.0, 2, 0.0, 0.0, false)];
        assert!(matches!(
            segments_to_knots(&overlap, &ts),
            Err(KnotError::NonContiguous { .. })
        ));
        let short = [seg(0, 0.0, 3, 0.0, 0.0, false)];
        assert!(matches!(
            segments_to_knots(&short, &ts),
            Err(KnotError::NonContiguous { .. })
        ));
    }

    #[test]
    fn one_tuple_final_segment_gets_a_later_closing_knot() {
        let segs = [seg(0, 0.0, 2, 0.0, 1.0, false), seg(2, 2.0, 1, 0.0, 7.0, false)];
        let knots = segments_to_knots(&segs, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(
            knots[1],
            Knot::Disjoint {
                t: 2.0,
                y_end: 1.0,
                y_start: 7.0
            }
        );
        assert_eq!(knots[2], Knot::Joint { t: 3.0, y: 7.0 });
        let rec = reconstruct(&[0.0, 1.0, 2.0], &knots).unwrap();
        assert_eq!(rec[2].y, 7.0);

        let lone = segments_to_knots(&[seg(0, 4.0, 1, 0.0, 2.0, false)], &[4.0]).unwrap();
        assert_eq!(
            lone,
            vec![Knot::Joint { t: 4.0, y: 2.0 }, Knot::Joint { t: 5.0, y: 2.0 }]
        );
    }

    #[test]
    fn reconstruct_linear_interpolation() {
        let knots = [Knot::Joint { t: 0.0, y: 0.0 }, Knot::Joint { t: 2.0, y: 2.0 }];
        let out = reconstruct(&[0.0, 1.0, 2.0], &knots).unwrap();
        let ys: Vec<_> = out.iter().map(|r| (r.t, r.y)).collect();
        assert_eq!(ys, vec![(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
    }

    #[test]
    fn reconstruct_switches_line_at_disjoint_knot() {
        let knots = [
            Knot::Joint { t: 0.0, y: 0.0 },
            Knot::Disjoint {
                t: 2.0,
                y_end: 2.0,
                y_start: 9.0,
            },
            Knot::Joint { t: 3.0, y: 9.0 },
        ];
        let out = reconstruct(&[0.0, 1.0, 2.0, 3.0], &knots).unwrap();
        let ys: Vec<_> = out.iter().map(|r| (r.t, r.y)).collect();
        assert_eq!(ys, vec![(0.0, 0.0), (1.0, 1.0), (2.0, 9.0), (3.0, 9.0)]);
    }

    #[test]
    fn timestamp_before_first_knot() {
        let knots = [Knot::Joint { t: 0.0, y: 0.0 }, Knot::Joint { t: 2.0, y: 2.0 }];
        assert!(matches!(
            reconstruct(&[-1.0, 0.0], &knots),
            Err(KnotError::TimestampBeforeFirstKnot { .. })
        ));
        // Same check when timestamps arrive before any knot.
        let mut r = Reconstructor::new();
        r.push_timestamp(-1.0).unwrap();
        assert!(matches!(
            r.push_knot(knots[0]),
            Err(KnotError::TimestampBeforeFirstKnot { .. })
        ));
    }

    #[test]
    fn malformed_knot_streams() {
        let d = Knot::Disjoint {
            t: 0.0,
            y_end: 0.0,
            y_start: 1.0,
        };
        assert!(reconstruct(&[0.0], &[d]).is_err());
        let back = [Knot::Joint { t: 2.0, y: 0.0 }, Knot::Joint { t: 1.0, y: 0.0 }];
        assert!(reconstruct(&[2.0], &back).is_err());
        let open_end = [
            Knot::Joint { t: 0.0, y: 0.0 },
            Knot::Disjoint {
                t: 1.0,
                y_end: 0.0,
                y_start: 1.0,
            },
        ];
        assert!(reconstruct(&[0.0], &open_end).is_err());
    }

    #[test]
    fn streaming_output_waits_for_the_closing_knot() {
        let mut r = Reconstructor::new();
        assert!(r.push_timestamp(0.0).unwrap().is_empty());
        assert!(r.push_timestamp(1.0).unwrap().is_empty());
        assert!(r.push_knot(Knot::Joint { t: 0.0, y: 0.0 }).unwrap().is_empty());
        let out = r.push_knot(Knot::Joint { t: 1.0, y: 1.0 }).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(r.finish().unwrap().len(), 1);
    }

    #[test]
    fn assembler_pairs_heads_and_tails() {
        let mut a = KnotAssembler::new();
        assert_eq!(a.push(KnotPart::DisjointHead { t: 1.0, y_end: 2.0 }).unwrap(), None);
        assert!(a.push(KnotPart::Joint { t: 2.0, y: 0.0 }).is_err());
        let mut a = KnotAssembler::new();
        assert!(a.push(KnotPart::DisjointTail { y_start: 0.0 }).is_err());
    }
}
