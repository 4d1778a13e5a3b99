use super::GeometryError;
use crate::types::{InputTuple, LineCoefficients};

/// Running sums for the ordinary least-squares line of the buffered tuples.
///
/// Timestamps are accumulated relative to the first one pushed so that
/// large absolute times do not swamp the variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RegressionAccumulator {
    n: usize,
    origin: f64,
    sum_t: f64,
    sum_y: f64,
    sum_tt: f64,
    sum_ty: f64,
}

impl RegressionAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn clear(&mut self) {
        *self = Self::default();
    }

    pub fn push(&mut self, p: InputTuple) {
        if self.n == 0 {
            self.origin = p.t;
        }
        let t = p.t - self.origin;
        self.n += 1;
        self.sum_t += t;
        self.sum_y += p.y;
        self.sum_tt += t * t;
        self.sum_ty += t * p.y;
    }

    /// Slope `cov(t, y) / var(t)` and intercept `mean(y) - slope * mean(t)`.
    pub fn line(&self) -> Result<LineCoefficients, GeometryError> {
        if self.n < 2 {
            return Err(GeometryError::TooFewPoints);
        }
        let n = self.n as f64;
        let mean_t = self.sum_t / n;
        let mean_y = self.sum_y / n;
        let var = self.sum_tt / n - mean_t * mean_t;
        if var <= 0.0 {
            return Err(GeometryError::ZeroVariance);
        }
        let cov = self.sum_ty / n - mean_t * mean_y;
        let a = cov / var;
        Ok(LineCoefficients::new(a, mean_y - a * (mean_t + self.origin)))
    }
}
