//! The four PLA methods behind one streaming interface.
//!
//! A [`PlaMethod`] consumes tuples one at a time and emits a
//! [`SegmentSummary`] whenever the open segment can no longer be extended.
//! A segment that reaches the length cap is closed when the next tuple
//! arrives, so every segment is emitted while processing the tuple right
//! after it.

mod angle;
mod disjoint;
mod linear;
mod swing;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::types::{ErrorThreshold, InputTuple, SegmentSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    Swing,
    Angle,
    Disjoint,
    Linear,
}

impl MethodKind {
    pub const ALL: [MethodKind; 4] = [
        MethodKind::Swing,
        MethodKind::Angle,
        MethodKind::Disjoint,
        MethodKind::Linear,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Swing => "swing",
            MethodKind::Angle => "angle",
            MethodKind::Disjoint => "disjoint",
            MethodKind::Linear => "linear",
        }
    }

    /// Whether consecutive segments share their endpoint.
    pub fn joint_knots(self) -> bool {
        self == MethodKind::Swing
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown method `{0}`")]
pub struct UnknownMethod(pub String);

impl FromStr for MethodKind {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownMethod(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MethodError {
    #[error("timestamp {t} does not follow {last}")]
    NonMonotonicTime { t: f64, last: f64 },
    #[error("non-finite tuple ({t}, {y})")]
    NonFiniteValue { t: f64, y: f64 },
}

/// The run of tuples not yet covered by an emitted segment.
#[derive(Debug, Clone, Copy)]
struct Open {
    start_index: usize,
    first: InputTuple,
    last: InputTuple,
    len: usize,
}

#[derive(Debug, Clone)]
enum Fitter {
    Swing(swing::Swing),
    Angle(angle::Angle),
    Disjoint(disjoint::Disjoint),
    Linear(linear::Linear),
}

impl Fitter {
    fn new(kind: MethodKind) -> Self {
        match kind {
            MethodKind::Swing => Fitter::Swing(Default::default()),
            MethodKind::Angle => Fitter::Angle(Default::default()),
            MethodKind::Disjoint => Fitter::Disjoint(Default::default()),
            MethodKind::Linear => Fitter::Linear(Default::default()),
        }
    }

    fn start(&mut self, p: InputTuple, eps: ErrorThreshold) {
        match self {
            Fitter::Swing(f) => f.start(p, eps),
            Fitter::Angle(f) => f.start(),
            Fitter::Disjoint(f) => f.start(p, eps),
            Fitter::Linear(f) => f.start(p, eps),
        }
    }

    fn extend(&mut self, p: InputTuple, open: &Open, eps: ErrorThreshold) -> bool {
        match self {
            Fitter::Swing(f) => f.extend(p, open, eps),
            Fitter::Angle(f) => f.extend(p, open, eps),
            Fitter::Disjoint(f) => f.extend(p, eps),
            Fitter::Linear(f) => f.extend(p, eps),
        }
    }

    fn close(&mut self, open: &Open) -> SegmentSummary {
        let (line, joined_to_previous) = match self {
            Fitter::Swing(f) => f.close(open),
            Fitter::Angle(f) => (f.close(open), false),
            Fitter::Disjoint(f) => (f.close(open), false),
            Fitter::Linear(f) => (f.close(), false),
        };
        SegmentSummary {
            start_index: open.start_index,
            start_t: open.first.t,
            length: open.len,
            line,
            joined_to_previous,
        }
    }

    fn joined(&self) -> bool {
        match self {
            Fitter::Swing(f) => f.joined(),
            _ => false,
        }
    }
}

/// Streaming state of one PLA method over one input stream.
#[derive(Debug, Clone)]
pub struct PlaMethod {
    kind: MethodKind,
    eps: ErrorThreshold,
    max_length: usize,
    next_index: usize,
    last_t: Option<f64>,
    open: Option<Open>,
    fitter: Fitter,
}

impl PlaMethod {
    /// `max_length == 0` leaves segments uncapped.
    pub fn new(kind: MethodKind, eps: ErrorThreshold, max_length: usize) -> Self {
        Self {
            kind,
            eps,
            max_length,
            next_index: 0,
            last_t: None,
            open: None,
            fitter: Fitter::new(kind),
        }
    }

    pub fn kind(&self) -> MethodKind {
        self.kind
    }

    pub fn epsilon(&self) -> ErrorThreshold {
        self.eps
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    /// Index the next pushed tuple will receive.
    pub fn next_index(&self) -> usize {
        self.next_index
    }

    /// Number of tuples in the open segment.
    pub fn open_len(&self) -> usize {
        self.open.map_or(0, |o| o.len)
    }

    /// Whether the open segment starts at the previous segment's endpoint.
    pub fn open_is_joined(&self) -> bool {
        self.open.is_some() && self.fitter.joined()
    }

    pub fn push(&mut self, p: InputTuple) -> Result<Option<SegmentSummary>, MethodError> {
        if !p.is_finite() {
            return Err(MethodError::NonFiniteValue { t: p.t, y: p.y });
        }
        if let Some(last) = self.last_t {
            if p.t <= last {
                return Err(MethodError::NonMonotonicTime { t: p.t, last });
            }
        }
        self.last_t = Some(p.t);
        let index = self.next_index;
        self.next_index += 1;

        let mut closed = None;
        if let Some(mut open) = self.open {
            let full = self.max_length > 0 && open.len >= self.max_length;
            if !full && self.fitter.extend(p, &open, self.eps) {
                open.len += 1;
                open.last = p;
                self.open = Some(open);
                return Ok(None);
            }
            closed = Some(self.fitter.close(&open));
        }
        self.fitter.start(p, self.eps);
        self.open = Some(Open {
            start_index: index,
            first: p,
            last: p,
            len: 1,
        });
        Ok(closed)
    }

    /// Closes the open segment, if any, and returns the method to its
    /// initial state. Indices keep counting from where they were.
    pub fn finish(&mut self) -> Option<SegmentSummary> {
        let seg = self.open.take().map(|open| self.fitter.close(&open));
        self.reset(self.next_index);
        seg
    }

    /// Drops all state; the next pushed tuple gets index `next_index` and
    /// starts an unjoined segment.
    pub fn reset(&mut self, next_index: usize) {
        self.next_index = next_index;
        self.last_t = None;
        self.open = None;
        self.fitter = Fitter::new(self.kind);
    }
}

/// Runs `kind` over a whole stream.
pub fn segment_stream(
    kind: MethodKind,
    eps: ErrorThreshold,
    max_length: usize,
    tuples: &[InputTuple],
) -> Result<Vec<SegmentSummary>, MethodError> {
    let mut method = PlaMethod::new(kind, eps, max_length);
    let mut out = Vec::new();
    for &p in tuples {
        out.extend(method.push(p)?);
    }
    out.extend(method.finish());
    Ok(out)
}
