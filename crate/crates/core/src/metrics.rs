//! Per-point compression ratio, reconstruction latency and approximation
//! error, plus box-plot aggregation.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::protocols::{CompressionRecord, Emission};
use crate::types::{InputTuple, ReconstructedTuple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("index {0} is not covered by any record")]
    UncoveredIndex(usize),
    #[error("index {0} is covered by more than one record")]
    DoubleCoverage(usize),
    #[error("{reconstructed} reconstructed tuples for {originals} originals")]
    LengthMismatch { originals: usize, reconstructed: usize },
    #[error("no values to aggregate")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerPointStats {
    pub index: usize,
    pub ratio: f64,
    pub latency: usize,
    pub error: f64,
}

/// Records (or groups of knot parts) that jointly reconstruct a run of
/// tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionUnit {
    pub size_yunits: f64,
    pub covers: Range<usize>,
    /// Index of the input that made the last needed part available.
    pub time: usize,
}

fn is_knot(r: &CompressionRecord) -> bool {
    matches!(
        r,
        CompressionRecord::ImplicitJoint { .. }
            | CompressionRecord::ImplicitDisjointHead { .. }
            | CompressionRecord::ImplicitDisjointTail { .. }
    )
}

/// Groups emissions into attribution units.
///
/// Counter-protocol records stand alone. Implicit knot parts are charged to
/// the segment they open: the first joint knot to the first segment, a
/// boundary joint knot or a head/tail pair to the segment after the
/// boundary, and the closing joint knot to the last segment. A segment's
/// points become reconstructible when the knot ending it is emitted.
pub fn attribution_units(emissions: &[Emission]) -> Vec<AttributionUnit> {
    let mut units = Vec::with_capacity(emissions.len());
    let mut current: Option<AttributionUnit> = None;
    let mut carried = 0.0;
    for em in emissions {
        let size = em.record.size_yunits();
        if !is_knot(&em.record) {
            units.extend(current.take());
            units.push(AttributionUnit {
                size_yunits: size,
                covers: em.covers.clone(),
                time: em.emitted_at,
            });
            continue;
        }
        if current.as_ref().is_none_or(|u| u.covers != em.covers) {
            units.extend(current.take());
            current = Some(AttributionUnit {
                size_yunits: std::mem::take(&mut carried),
                covers: em.covers.clone(),
                time: em.emitted_at,
            });
        }
        let unit = current.as_mut().expect("set above");
        unit.time = unit.time.max(em.emitted_at);
        if em.opens_next {
            carried += size;
        } else {
            unit.size_yunits += size;
        }
    }
    units.extend(current);
    units
}

/// Per-point metrics of one compressed stream.
pub fn attribute(
    emissions: &[Emission],
    originals: &[InputTuple],
    reconstructed: &[ReconstructedTuple],
) -> Result<Vec<PerPointStats>, MetricsError> {
    let n = originals.len();
    if reconstructed.len() != n {
        return Err(MetricsError::LengthMismatch {
            originals: n,
            reconstructed: reconstructed.len(),
        });
    }
    let mut owner: Vec<Option<(f64, usize)>> = vec![None; n];
    for unit in attribution_units(emissions) {
        let ratio = unit.size_yunits / unit.covers.len() as f64;
        for i in unit.covers {
            let slot = owner.get_mut(i).ok_or(MetricsError::UncoveredIndex(i))?;
            if slot.replace((ratio, unit.time)).is_some() {
                return Err(MetricsError::DoubleCoverage(i));
            }
        }
    }
    owner
        .into_iter()
        .enumerate()
        .map(|(i, o)| {
            let (ratio, time) = o.ok_or(MetricsError::UncoveredIndex(i))?;
            Ok(PerPointStats {
                index: i,
                ratio,
                latency: time.saturating_sub(i),
                error: (reconstructed[i].y - originals[i].y).abs(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Ratio,
    Latency,
    Error,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Ratio, Metric::Latency, Metric::Error];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ratio => "ratio",
            Metric::Latency => "latency",
            Metric::Error => "error",
        }
    }

    pub fn value(self, s: &PerPointStats) -> f64 {
        match self {
            Metric::Ratio => s.ratio,
            Metric::Latency => s.latency as f64,
            Metric::Error => s.error,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Box-plot summary: quartiles, whiskers, mean and maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub p25: f64,
    pub p75: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub max: f64,
}

/// Nearest-rank percentile of sorted data: the value at rank
/// `ceil(p / 100 * n)`.
fn nearest_rank(sorted: &[f64], p: usize) -> f64 {
    let rank = (p * sorted.len()).div_ceil(100).max(1);
    sorted[rank - 1]
}

pub fn aggregate(values: &[f64]) -> Result<Aggregate, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let p25 = nearest_rank(&sorted, 25);
    let p75 = nearest_rank(&sorted, 75);
    let reach = 1.5 * (p75 - p25);
    let whisker_lo = *sorted.iter().find(|&&v| v >= p25 - reach).unwrap_or(&p25);
    let whisker_hi = *sorted.iter().rev().find(|&&v| v <= p75 + reach).unwrap_or(&p75);
    Ok(Aggregate {
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        p25,
        p75,
        whisker_lo,
        whisker_hi,
        max: sorted[sorted.len() - 1],
    })
}

/// Aggregates of every metric over `stats`.
pub fn summarize(stats: &[PerPointStats]) -> Result<Vec<(Metric, Aggregate)>, MetricsError> {
    Metric::ALL
        .into_iter()
        .map(|m| {
            let values: Vec<f64> = stats.iter().map(|s| m.value(s)).collect();
            Ok((m, aggregate(&values)?))
        })
        .collect()
}

/// Column names of the stats report.
pub const STATS_COLUMNS: [&str; 11] = [
    "run_id",
    "method",
    "protocol",
    "epsilon",
    "metric",
    "mean",
    "p25",
    "p75",
    "whisker_lo",
    "whisker_hi",
    "max",
];

/// One line of the stats report.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub run_id: String,
    pub method: String,
    pub protocol: String,
    pub epsilon: f64,
    pub metric: Metric,
    pub aggregate: Aggregate,
}

impl StatsRow {
    pub fn fields(&self) -> [String; 11] {
        let a = &self.aggregate;
        [
            self.run_id.clone(),
            self.method.clone(),
            self.protocol.clone(),
            self.epsilon.to_string(),
            self.metric.to_string(),
            a.mean.to_string(),
            a.p25.to_string(),
            a.p75.to_string(),
            a.whisker_lo.to_string(),
            a.whisker_hi.to_string(),
            a.max.to_string(),
        ]
    }
}
