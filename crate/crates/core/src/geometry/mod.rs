//! Geometric primitives behind the approximation methods.
//!
//! Every validity test here is strict: a line is valid for a tuple only when
//! its error there is below the threshold, so a line that merely touches an
//! error-segment endpoint is rejected.

mod cone;
mod hulls;
mod regression;

pub use cone::{angle_origin, ConeUpdate, SlopeCone};
pub use hulls::{HullInsert, PartialHulls};
pub use regression::RegressionAccumulator;

use thiserror::Error;

use crate::types::{ErrorThreshold, InputTuple, Point};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("tuple at t = {0} does not lie after the cone origin")]
    DegenerateSpan(f64),
    #[error("extreme lines are parallel")]
    ParallelExtremes,
    #[error("timestamp {t} does not follow {last}")]
    NonMonotonicTime { t: f64, last: f64 },
    #[error("at least two points are required")]
    TooFewPoints,
    #[error("timestamps have zero variance")]
    ZeroVariance,
}

/// The vertical segment `[(t, y - eps), (t, y + eps)]` that every valid line
/// must cross.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSegment {
    pub t: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ErrorSegment {
    pub fn around(p: InputTuple, eps: ErrorThreshold) -> Self {
        Self {
            t: p.t,
            lo: p.y - eps.get(),
            hi: p.y + eps.get(),
        }
    }

    pub fn lower(&self) -> Point {
        Point::new(self.t, self.lo)
    }

    pub fn upper(&self) -> Point {
        Point::new(self.t, self.hi)
    }
}

/// Twice the signed area of triangle `(o, a, b)`; positive when `b` lies to
/// the left of the directed line `o -> a`.
#[inline]
pub(crate) fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.t - o.t) * (b.y - o.y) - (a.y - o.y) * (b.t - o.t)
}
