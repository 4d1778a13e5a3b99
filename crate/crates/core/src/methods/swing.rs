use super::Open;
use crate::geometry::{ConeUpdate, SlopeCone};
use crate::types::{ErrorThreshold, InputTuple, LineCoefficients, Point};

/// Cone through a fixed apex. After the first segment the apex is the
/// previous segment's endpoint, so consecutive lines share a knot.
#[derive(Debug, Clone, Default)]
pub(super) struct Swing {
    carried: Option<Point>,
    origin: Option<Point>,
    cone: Option<SlopeCone>,
}

impl Swing {
    pub fn start(&mut self, p: InputTuple, eps: ErrorThreshold) {
        self.cone = None;
        self.origin = None;
        if let Some(apex) = self.carried.take() {
            if let Ok(cone) = SlopeCone::new(p, p, eps, apex) {
                if cone.is_open() {
                    self.origin = Some(apex);
                    self.cone = Some(cone);
                }
            }
        }
    }

    pub fn extend(&mut self, p: InputTuple, open: &Open, eps: ErrorThreshold) -> bool {
        let next = match self.cone {
            None => SlopeCone::new(open.first, p, eps, open.first.into()).ok(),
            Some(cone) => match cone.update(p, eps) {
                ConeUpdate::Updated(c) => Some(c),
                ConeUpdate::Breakup => None,
            },
        };
        match next {
            Some(c) if c.is_open() => {
                self.cone = Some(c);
                true
            }
            _ => false,
        }
    }

    pub fn close(&mut self, open: &Open) -> (LineCoefficients, bool) {
        let joined = self.origin.is_some();
        let line = self
            .cone
            .map_or(LineCoefficients::constant(open.first.y), |c| c.bisector());
        self.carried = Some(Point::new(open.last.t, line.eval(open.last.t)));
        self.cone = None;
        self.origin = None;
        (line, joined)
    }
}

impl Swing {
    pub fn joined(&self) -> bool {
        self.origin.is_some()
    }
}
