use std::io::Write;

use plastream::metrics::{summarize, StatsRow, STATS_COLUMNS};
use plastream::{attribute, InputTuple, MethodKind, Protocol};

use crate::{compress_channel, CliError, RunConfig};

/// A named input series.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub label: String,
    pub tuples: Vec<InputTuple>,
}

/// Keys of the comparison table whose methods are not implemented here.
pub const OUT_OF_SCOPE: [(&str, &str); 2] = [("C", "optimal continuous PLA"), ("M", "mixed PLA")];

/// The keyed method and protocol associations of the comparison table that
/// can be run.
pub fn table_matrix(epsilon: f64, max_length: Option<usize>) -> Result<Vec<RunConfig>, CliError> {
    let counted = [Protocol::TwoStreams, Protocol::SingleStream, Protocol::SingleStreamV];
    let mut out = Vec::new();
    for (prefix, method) in [
        ("A", MethodKind::Angle),
        ("C", MethodKind::Disjoint),
        ("L", MethodKind::Linear),
    ] {
        for (k, &protocol) in counted.iter().enumerate() {
            let cfg = RunConfig::new(method, protocol, epsilon)?.with_run_id(format!("{prefix}{}", k + 1));
            out.push(cfg.with_max_length(max_length)?);
        }
    }
    for (key, method) in [("Sw", MethodKind::Swing), ("Sl", MethodKind::Disjoint)] {
        let cfg = RunConfig::new(method, Protocol::Implicit, epsilon)?.with_run_id(key);
        out.push(cfg.with_max_length(max_length)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct EvaluateReport {
    pub rows: Vec<StatsRow>,
    /// Round-trip failures, one message per offending run.
    pub violations: Vec<String>,
}

impl EvaluateReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| CliError::Data(e.to_string());
        w.write_record(STATS_COLUMNS).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.fields()).map_err(err)?;
        }
        w.flush().map_err(|e| CliError::Data(e.to_string()))
    }
}

fn run_cell(cfg: &RunConfig, stream: &Stream, run_id: String) -> Result<Vec<StatsRow>, CliError> {
    let out = compress_channel(cfg, &stream.tuples)?;
    let stats = attribute(&out.emissions, &stream.tuples, &out.reconstructed)
        .map_err(|e| CliError::Data(format!("{run_id}: {e}")))?;
    let summary = summarize(&stats).map_err(|e| CliError::Data(format!("{run_id}: {e}")))?;
    Ok(summary
        .into_iter()
        .map(|(metric, aggregate)| StatsRow {
            run_id: run_id.clone(),
            method: cfg.method.to_string(),
            protocol: cfg.protocol.to_string(),
            epsilon: cfg.epsilon.get(),
            metric,
            aggregate,
        })
        .collect())
}

/// Compresses, decodes, attributes and aggregates every stream under every
/// configuration. Cells run concurrently; rows keep configuration-major
/// order. With more than one stream the run id is prefixed with the stream
/// label.
///
/// Round-trip violations are collected in the report rather than aborting.
pub fn run_evaluate(configs: &[RunConfig], streams: &[Stream]) -> Result<EvaluateReport, CliError> {
    for cfg in configs {
        if !cfg.protocol.supports(cfg.method) {
            return Err(CliError::Usage(format!(
                "{} cannot be paired with the {} protocol",
                cfg.method, cfg.protocol
            )));
        }
    }
    let cells: Vec<(&RunConfig, &Stream)> = configs
        .iter()
        .flat_map(|c| streams.iter().map(move |s| (c, s)))
        .filter(|(_, s)| !s.tuples.is_empty())
        .collect();
    let results: Vec<Result<Vec<StatsRow>, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .map(|&(cfg, stream)| {
                let run_id = if streams.len() > 1 {
                    format!("{}:{}", stream.label, cfg.run_id)
                } else {
                    cfg.run_id.clone()
                };
                scope.spawn(move || run_cell(cfg, stream, run_id))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation thread panicked"))
            .collect()
    });
    let mut report = EvaluateReport::default();
    for r in results {
        match r {
            Ok(rows) => report.rows.extend(rows),
            Err(CliError::RoundTrip(msg)) => report.violations.push(msg),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
