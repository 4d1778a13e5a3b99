//! Brute-force reference computations.
//!
//! These are deliberately naive (cubic and worse) and share no code with the
//! incremental geometry. They exist to cross-check it in tests.

use crate::types::{ErrorThreshold, InputTuple, LineCoefficients, Point};

/// Largest absolute residual of `line` over `points`.
pub fn max_residual(points: &[InputTuple], line: &LineCoefficients) -> f64 {
    points.iter().map(|p| (p.y - line.eval(p.t)).abs()).fold(0.0, f64::max)
}

/// Per-point strict validity scan.
pub fn line_valid_scan(points: &[InputTuple], line: &LineCoefficients, eps: ErrorThreshold) -> bool {
    points.iter().all(|p| eps.accepts(p.y - line.eval(p.t)))
}

/// Smallest achievable maximum residual of any line over `points`
/// (Chebyshev line fit).
///
/// For a fixed slope the best intercept halves the spread of `y - a t`, and
/// that spread is piecewise linear and convex in the slope with breakpoints
/// only at chord slopes, so enumerating every pair of points finds the
/// optimum.
pub fn minimax_residual(points: &[InputTuple]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let spread = |a: f64| {
        let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            let r = p.y - a * p.t;
            (lo.min(r), hi.max(r))
        });
        0.5 * (hi - lo)
    };
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.min(spread((q.y - p.y) / (q.t - p.t)));
        }
    }
    best
}

/// Whether some line keeps every error strictly below `eps`.
///
/// Equivalent to the minimax residual being below the threshold. Any two
/// points are always feasible: their interpolant has zero residual.
pub fn stabbing_feasible(points: &[InputTuple], eps: ErrorThreshold) -> bool {
    minimax_residual(points) < eps.get()
}

/// Extreme-slope lines by enumerating every line through a pair of
/// error-segment endpoints and keeping the closed-valid ones.
///
/// `tol` absorbs rounding on lines that pass exactly through endpoints.
pub fn extreme_lines_by_enumeration(
    points: &[InputTuple],
    eps: ErrorThreshold,
    tol: f64,
) -> Option<(LineCoefficients, LineCoefficients)> {
    let e = eps.get();
    let ends: Vec<Point> = points
        .iter()
        .flat_map(|p| [Point::new(p.t, p.y - e), Point::new(p.t, p.y + e)])
        .collect();
    let mut min: Option<LineCoefficients> = None;
    let mut max: Option<LineCoefficients> = None;
    for (i, &p) in ends.iter().enumerate() {
        for &q in &ends[i + 1..] {
            if p.t == q.t {
                continue;
            }
            let line = LineCoefficients::between(p, q);
            if max_residual(points, &line) > e + tol {
                continue;
            }
            if min.is_none_or(|m| line.a < m.a) {
                min = Some(line);
            }
            if max.is_none_or(|m| line.a > m.a) {
                max = Some(line);
            }
        }
    }
    min.zip(max)
}

/// Whether some line through `origin` keeps every error strictly below
/// `eps`. Points must not share the origin's timestamp.
pub fn fixed_origin_feasible(origin: Point, points: &[InputTuple], eps: ErrorThreshold) -> bool {
    let e = eps.get();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for p in points {
        let dt = p.t - origin.t;
        let (a, b) = ((p.y - e - origin.y) / dt, (p.y + e - origin.y) / dt);
        let (a, b) = if dt > 0.0 { (a, b) } else { (b, a) };
        lo = lo.max(a);
        hi = hi.min(b);
    }
    lo < hi
}

/// Ordinary least-squares line by the two-pass centred formula.
pub fn least_squares(points: &[InputTuple]) -> LineCoefficients {
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.t).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.y).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.t - mean_t) * (p.y - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.t - mean_t) * (p.t - mean_t)).sum();
    let a = sxy / sxx;
    LineCoefficients::new(a, mean_y - a * mean_t)
}

/// Sum of squared residuals.
pub fn sse(points: &[InputTuple], line: &LineCoefficients) -> f64 {
    points.iter().map(|p| (p.y - line.eval(p.t)).powi(2)).sum()
}

/// Fewest contiguous segments, each strictly feasible, that cover
/// `points`. Dynamic program over all breakpoints.
pub fn min_segments(points: &[InputTuple], eps: ErrorThreshold) -> usize {
    let n = points.len();
    // reach[i]: largest j such that points[i..j] is feasible. Feasibility
    // is hereditary, so every shorter run from i is feasible too.
    let reach: Vec<usize> = (0..n)
        .map(|i| {
            let mut j = i + 1;
            while j < n && stabbing_feasible(&points[i..=j], eps) {
                j += 1;
            }
            j
        })
        .collect();
    let mut best = vec![usize::MAX; n + 1];
    best[n] = 0;
    for i in (0..n).rev() {
        best[i] = (i + 1..=reach[i])
            .map(|j| best[j].saturating_add(1))
            .min()
            .unwrap_or(usize::MAX);
    }
    best[0]
}
