//! Plain value types shared by every stage of the pipeline.

use std::fmt;

use thiserror::Error;

/// One `(timestamp, value)` reading of a source stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputTuple {
    pub t: f64,
    pub y: f64,
}

impl InputTuple {
    pub const fn new(t: f64, y: f64) -> Self {
        Self { t, y }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for InputTuple {
    fn from((t, y): (f64, f64)) -> Self {
        Self { t, y }
    }
}

/// A point in the `(t, y)` plane. Used for cone apexes and hull vertices.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub t: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(t: f64, y: f64) -> Self {
        Self { t, y }
    }
}

impl From<InputTuple> for Point {
    fn from(p: InputTuple) -> Self {
        Self { t: p.t, y: p.y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("error threshold must be a finite positive number, got {0}")]
pub struct InvalidThreshold(pub f64);

/// Maximum tolerated absolute error. Always finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ErrorThreshold(f64);

impl ErrorThreshold {
    pub fn new(epsilon: f64) -> Result<Self, InvalidThreshold> {
        if epsilon.is_finite() && epsilon > 0.0 {
            Ok(Self(epsilon))
        } else {
            Err(InvalidThreshold(epsilon))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Strict acceptance test: `|error| < epsilon`.
    #[inline]
    pub fn accepts(self, error: f64) -> bool {
        error.abs() < self.0
    }
}

impl fmt::Display for ErrorThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Slope and intercept of `y = a * t + b`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LineCoefficients {
    pub a: f64,
    pub b: f64,
}

impl LineCoefficients {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// The horizontal line through `y`.
    pub const fn constant(y: f64) -> Self {
        Self { a: 0.0, b: y }
    }

    /// The line with slope `a` passing through `p`.
    pub fn through(p: Point, a: f64) -> Self {
        Self { a, b: p.y - a * p.t }
    }

    /// The line through two points with distinct timestamps.
    pub fn between(p: Point, q: Point) -> Self {
        let dt = q.t - p.t;
        Self {
            a: (q.y - p.y) / dt,
            b: (q.t * p.y - q.y * p.t) / dt,
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.a * t + self.b
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

/// One closed approximation line and the contiguous run of tuples it covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSummary {
    /// Ordinal of the first covered tuple.
    pub start_index: usize,
    /// Timestamp of the first covered tuple.
    pub start_t: f64,
    /// Number of covered tuples, at least 1.
    pub length: usize,
    pub line: LineCoefficients,
    /// Set by joint-knot methods: this segment starts at the previous
    /// segment's endpoint.
    pub joined_to_previous: bool,
}

impl SegmentSummary {
    /// One past the last covered index.
    pub fn end_index(&self) -> usize {
        self.start_index + self.length
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start_index..self.end_index()
    }
}

/// One tuple of the decoded stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructedTuple {
    pub t: f64,
    pub y: f64,
}
