use std::collections::VecDeque;

use super::{cross, ErrorSegment, GeometryError};
use crate::types::{LineCoefficients, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullInsert {
    Extended,
    Breakup,
}

/// Incrementally maintained partial convex hulls of error-segment endpoints
/// together with the two extreme-slope lines.
///
/// `lower` is the upper envelope of the lower endpoints and `upper` the
/// lower envelope of the upper endpoints; both only keep vertices that can
/// still constrain a valid line. The minimum-slope line runs from an upper
/// endpoint on the left to a lower endpoint on the right, the maximum-slope
/// line from a lower endpoint to an upper endpoint.
///
/// Pruning only ever drops constraints that the remaining ones imply, so
/// the stored vertices describe exactly the same set of valid lines as the
/// full set of processed segments.
#[derive(Debug, Clone, Default)]
pub struct PartialHulls {
    lower: VecDeque<Point>,
    upper: VecDeque<Point>,
    min_pivots: (Point, Point),
    max_pivots: (Point, Point),
    count: usize,
    last_t: f64,
}

impl PartialHulls {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.lower.clear();
        self.upper.clear();
        self.count = 0;
    }

    /// Number of segments absorbed since the last clear.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn lower_hull(&self) -> impl ExactSizeIterator<Item = &Point> {
        self.lower.iter()
    }

    pub fn upper_hull(&self) -> impl ExactSizeIterator<Item = &Point> {
        self.upper.iter()
    }

    /// Adds `seg` unless no line stabs it together with everything already
    /// absorbed; on `Breakup` the hulls are unchanged.
    pub fn insert(&mut self, seg: ErrorSegment) -> Result<HullInsert, GeometryError> {
        if self.count > 0 && seg.t <= self.last_t {
            return Err(GeometryError::NonMonotonicTime {
                t: seg.t,
                last: self.last_t,
            });
        }
        let (lo, hi) = (seg.lower(), seg.upper());
        match self.count {
            0 => {
                self.lower.push_back(lo);
                self.upper.push_back(hi);
            }
            1 => {
                self.min_pivots = (self.upper[0], lo);
                self.max_pivots = (self.lower[0], hi);
                self.lower.push_back(lo);
                self.upper.push_back(hi);
            }
            _ => {
                let (min_l, min_r) = self.min_pivots;
                let (max_l, max_r) = self.max_pivots;
                // Strict: a segment that only touches the band leaves no
                // line with all errors below the threshold.
                if cross(min_l, min_r, hi) <= 0.0 || cross(max_l, max_r, lo) >= 0.0 {
                    return Ok(HullInsert::Breakup);
                }
                let tighten_max = cross(max_l, max_r, hi) < 0.0;
                let tighten_min = cross(min_l, min_r, lo) > 0.0;

                let max_pivot = tighten_max.then(|| {
                    // Tangent from `hi` to the lower chain: least slope.
                    let mut k = 0;
                    while k + 1 < self.lower.len() && cross(self.lower[k], hi, self.lower[k + 1]) >= 0.0 {
                        k += 1;
                    }
                    k
                });
                let min_pivot = tighten_min.then(|| {
                    // Tangent from `lo` to the upper chain: greatest slope.
                    let mut k = 0;
                    while k + 1 < self.upper.len() && cross(self.upper[k], lo, self.upper[k + 1]) <= 0.0 {
                        k += 1;
                    }
                    k
                });

                if let Some(k) = max_pivot {
                    self.lower.drain(..k);
                    self.max_pivots = (self.lower[0], hi);
                }
                if let Some(k) = min_pivot {
                    self.upper.drain(..k);
                    self.min_pivots = (self.upper[0], lo);
                }
                if tighten_max {
                    while self.upper.len() >= 2 {
                        let n = self.upper.len();
                        if cross(self.upper[n - 2], self.upper[n - 1], hi) <= 0.0 {
                            self.upper.pop_back();
                        } else {
                            break;
                        }
                    }
                    self.upper.push_back(hi);
                }
                if tighten_min {
                    while self.lower.len() >= 2 {
                        let n = self.lower.len();
                        if cross(self.lower[n - 2], self.lower[n - 1], lo) >= 0.0 {
                            self.lower.pop_back();
                        } else {
                            break;
                        }
                    }
                    self.lower.push_back(lo);
                }
            }
        }
        self.count += 1;
        self.last_t = seg.t;
        Ok(HullInsert::Extended)
    }

    /// The valid lines of least and greatest slope, `(min_line, max_line)`.
    ///
    /// Both touch the boundary of the feasible band, so their errors may
    /// reach the threshold exactly.
    pub fn extreme_slope_lines(&self) -> Result<(LineCoefficients, LineCoefficients), GeometryError> {
        if self.count < 2 {
            return Err(GeometryError::TooFewPoints);
        }
        let (a, b) = self.min_pivots;
        let (c, d) = self.max_pivots;
        Ok((LineCoefficients::between(a, b), LineCoefficients::between(c, d)))
    }

    /// True when `line` passes strictly above every stored lower vertex and
    /// strictly below every stored upper vertex.
    pub fn line_valid(&self, line: &LineCoefficients) -> bool {
        self.lower.iter().all(|p| line.eval(p.t) > p.y) && self.upper.iter().all(|p| line.eval(p.t) < p.y)
    }

    /// Open interval of intercepts that make a line of slope `a` valid.
    /// Empty when the first bound is not below the second.
    pub fn intercept_range(&self, a: f64) -> (f64, f64) {
        let lo = self
            .lower
            .iter()
            .map(|p| p.y - a * p.t)
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = self.upper.iter().map(|p| p.y - a * p.t).fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    /// A strictly valid line: the average of the two extreme lines unless
    /// they share a pivot, otherwise the line of the average slope centred
    /// in its intercept range.
    ///
    /// With a single absorbed segment this is the horizontal line through
    /// its midpoint.
    pub fn central_line(&self) -> Option<LineCoefficients> {
        match self.count {
            0 => None,
            1 => {
                let (lo, hi) = (self.lower[0], self.upper[0]);
                Some(LineCoefficients::constant(0.5 * (lo.y + hi.y)))
            }
            _ => {
                let (min, max) = self.extreme_slope_lines().ok()?;
                let avg = LineCoefficients::new(0.5 * (min.a + max.a), 0.5 * (min.b + max.b));
                // With a shared pivot the average runs exactly through it
                // and only rounding decides the strict test.
                let shared = self.min_pivots.0 == self.max_pivots.1 || self.min_pivots.1 == self.max_pivots.0;
                if !shared && self.line_valid(&avg) {
                    return Some(avg);
                }
                let (lo, hi) = self.intercept_range(avg.a);
                let centred = LineCoefficients::new(avg.a, 0.5 * (lo + hi));
                self.line_valid(&centred).then_some(centred)
            }
        }
    }
}
