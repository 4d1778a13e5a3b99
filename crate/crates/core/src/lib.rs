//! Streaming piecewise linear approximation: four online methods, four
//! storage protocols with exact binary encodings, timestamp-driven
//! reconstruction and per-point metrics.

pub mod geometry;
pub mod knots;
pub mod methods;
pub mod metrics;
pub mod oracle;
pub mod protocols;
pub mod synth;
pub mod types;

pub use knots::{reconstruct, segment_from_knots, segments_to_knots, Knot, KnotError, Reconstructor};
pub use methods::{segment_stream, MethodError, MethodKind, PlaMethod};
pub use metrics::{aggregate, attribute, Aggregate, Metric, MetricsError, PerPointStats};
pub use protocols::{compress, protocol_decode, CompressionRecord, Emission, Pipeline, PipelineError, Protocol};
pub use types::{
    ErrorThreshold, InputTuple, InvalidThreshold, LineCoefficients, Point, ReconstructedTuple, SegmentSummary,
};
