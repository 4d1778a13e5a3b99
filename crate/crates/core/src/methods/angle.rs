use super::Open;
use crate::geometry::{angle_origin, ConeUpdate, SlopeCone};
use crate::types::{ErrorThreshold, InputTuple, LineCoefficients};

/// Cone whose apex is fixed by the first two tuples of each segment.
#[derive(Debug, Clone, Default)]
pub(super) struct Angle {
    cone: Option<SlopeCone>,
}

impl Angle {
    pub fn start(&mut self) {
        self.cone = None;
    }

    pub fn extend(&mut self, p: InputTuple, open: &Open, eps: ErrorThreshold) -> bool {
        let next = match self.cone {
            None => angle_origin(open.first, p, eps)
                .and_then(|o| SlopeCone::new(open.first, p, eps, o))
                .ok(),
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

    pub fn close(&mut self, open: &Open) -> LineCoefficients {
        self.cone
            .take()
            .map_or(LineCoefficients::constant(open.first.y), |c| c.bisector())
    }
}
