use super::Open;
use crate::geometry::{ErrorSegment, HullInsert, PartialHulls};
use crate::types::{ErrorThreshold, InputTuple, LineCoefficients};

/// Optimal disjoint segmentation: extend while some line stabs every error
/// segment of the open run.
#[derive(Debug, Clone, Default)]
pub(super) struct Disjoint {
    hulls: PartialHulls,
}

impl Disjoint {
    pub fn start(&mut self, p: InputTuple, eps: ErrorThreshold) {
        self.hulls.clear();
        let _ = self.hulls.insert(ErrorSegment::around(p, eps));
    }

    pub fn extend(&mut self, p: InputTuple, eps: ErrorThreshold) -> bool {
        matches!(
            self.hulls.insert(ErrorSegment::around(p, eps)),
            Ok(HullInsert::Extended)
        )
    }

    pub fn close(&mut self, open: &Open) -> LineCoefficients {
        if open.len == 1 {
            return LineCoefficients::constant(open.first.y);
        }
        self.hulls.central_line().unwrap_or_else(|| {
            let (min, max) = self.hulls.extreme_slope_lines().unwrap_or_default();
            LineCoefficients::new(0.5 * (min.a + max.a), 0.5 * (min.b + max.b))
        })
    }
}
