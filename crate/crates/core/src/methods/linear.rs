use crate::geometry::{ErrorSegment, HullInsert, PartialHulls, RegressionAccumulator};
use crate::types::{ErrorThreshold, InputTuple, LineCoefficients};

/// Least-squares line of the open run, kept while it stays within the
/// threshold of every covered tuple.
#[derive(Debug, Clone, Default)]
pub(super) struct Linear {
    hulls: PartialHulls,
    acc: RegressionAccumulator,
    line: LineCoefficients,
}

impl Linear {
    pub fn start(&mut self, p: InputTuple, eps: ErrorThreshold) {
        self.hulls.clear();
        self.acc.clear();
        let _ = self.hulls.insert(ErrorSegment::around(p, eps));
        self.acc.push(p);
        self.line = LineCoefficients::constant(p.y);
    }

    pub fn extend(&mut self, p: InputTuple, eps: ErrorThreshold) -> bool {
        if !matches!(
            self.hulls.insert(ErrorSegment::around(p, eps)),
            Ok(HullInsert::Extended)
        ) {
            return false;
        }
        self.acc.push(p);
        match self.acc.line() {
            Ok(line) if self.hulls.line_valid(&line) => {
                self.line = line;
                true
            }
            _ => false,
        }
    }

    pub fn close(&mut self) -> LineCoefficients {
        self.line
    }
}
