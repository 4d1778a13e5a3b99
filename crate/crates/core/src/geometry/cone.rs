use super::GeometryError;
use crate::types::{ErrorThreshold, InputTuple, LineCoefficients, Point};

/// Range of slopes through a fixed apex that keep every processed tuple
/// inside its error segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeCone {
    pub origin: Point,
    pub a_min: f64,
    pub a_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConeUpdate {
    Updated(SlopeCone),
    Breakup,
}

/// Slopes through `origin` whose line stays within `eps` of `p`.
fn slope_bounds(origin: Point, p: InputTuple, eps: f64) -> (f64, f64) {
    let dt = p.t - origin.t;
    let lo = (p.y - eps - origin.y) / dt;
    let hi = (p.y + eps - origin.y) / dt;
    if dt > 0.0 {
        (lo, hi)
    } else {
        (hi, lo)
    }
}

impl SlopeCone {
    /// Opens a cone at `origin` from the first two tuples of a segment.
    ///
    /// When the origin is not at `p0`'s timestamp the cone is also clipped
    /// to the slopes that cross `p0`'s error segment.
    pub fn new(p0: InputTuple, p1: InputTuple, eps: ErrorThreshold, origin: Point) -> Result<Self, GeometryError> {
        if p1.t == origin.t {
            return Err(GeometryError::DegenerateSpan(p1.t));
        }
        let (mut a_min, mut a_max) = slope_bounds(origin, p1, eps.get());
        if p0.t != origin.t {
            let (lo, hi) = slope_bounds(origin, p0, eps.get());
            a_min = a_min.max(lo);
            a_max = a_max.min(hi);
        }
        Ok(Self { origin, a_min, a_max })
    }

    /// Narrows the cone to also cover `p`. The receiver is left untouched;
    /// a `Breakup` means no slope through the origin reaches `p`'s error
    /// segment.
    pub fn update(&self, p: InputTuple, eps: ErrorThreshold) -> ConeUpdate {
        let (lo, hi) = slope_bounds(self.origin, p, eps.get());
        let a_min = self.a_min.max(lo);
        let a_max = self.a_max.min(hi);
        if a_min <= a_max {
            ConeUpdate::Updated(Self { a_min, a_max, ..*self })
        } else {
            ConeUpdate::Breakup
        }
    }

    /// True while some slope lies strictly inside the cone, i.e. some line
    /// through the origin keeps every error strictly below the threshold.
    pub fn is_open(&self) -> bool {
        self.a_min < self.a_max
    }

    /// Line through the origin with the mean of the extreme slopes.
    pub fn bisector(&self) -> LineCoefficients {
        LineCoefficients::through(self.origin, 0.5 * (self.a_min + self.a_max))
    }
}

/// Intersection of the steepest and the flattest line crossing the error
/// segments of `p0` and `p1`.
///
/// Any line through the returned apex with a slope between those two
/// crosses both error segments.
pub fn angle_origin(p0: InputTuple, p1: InputTuple, eps: ErrorThreshold) -> Result<Point, GeometryError> {
    let dt = p1.t - p0.t;
    if dt <= 0.0 {
        return Err(GeometryError::DegenerateSpan(p1.t));
    }
    let eps = eps.get();
    // Work relative to p0 to keep large timestamps out of the intercepts.
    let steep = (p1.y + eps - (p0.y - eps)) / dt;
    let flat = (p1.y - eps - (p0.y + eps)) / dt;
    if steep == flat {
        return Err(GeometryError::ParallelExtremes);
    }
    let s = 2.0 * eps / (steep - flat);
    Ok(Point::new(p0.t + s, p0.y - eps + steep * s))
}
