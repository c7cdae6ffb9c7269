//! JSON-lines run history: one header line, then one record per iterate.

use serde::{Deserialize, Serialize};
use shapeopt_core::optimizer::HistoryRecord;

use crate::meta::Stamp;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    #[serde(flatten)]
    pub stamp: Stamp,
    pub problem: String,
    pub k: usize,
    pub dim: usize,
    pub seed: u64,
    /// Timing fields are omitted from the records.
    pub normalized: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub k: usize,
    pub objective: f64,
    pub volume: f64,
    pub perimeter: Option<f64>,
    pub spectrum_head: Vec<f64>,
    pub normalized_eigenvalue: Option<f64>,
    pub cluster_size: usize,
    pub tau: f64,
    pub attempts: usize,
    pub accepted: bool,
    pub refit_rmse: f64,
    pub boundary_residual: f64,
    pub boundary_points: usize,
    pub discarded: usize,
    pub resampled: bool,
    pub eikonal_fraction: f64,
    pub j_reference: Option<f64>,
    pub j_candidate: Option<f64>,
    pub components: usize,
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
    /// Components of the zero contour (2D runs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contour_regions: Option<usize>,
}

impl Line {
    pub fn new(r: &HistoryRecord, normalized: bool, contour_regions: Option<usize>) -> Self {
        Self {
            k: r.k,
            objective: r.objective,
            volume: r.volume,
            perimeter: r.perimeter,
            spectrum_head: r.spectrum_head.clone(),
            normalized_eigenvalue: r.normalized_eigenvalue,
            cluster_size: r.cluster_size,
            tau: r.tau,
            attempts: r.attempts,
            accepted: r.accepted,
            refit_rmse: r.refit_rmse,
            boundary_residual: r.boundary_residual,
            boundary_points: r.boundary_points,
            discarded: r.discarded,
            resampled: r.resampled,
            eikonal_fraction: r.eikonal_fraction,
            j_reference: r.j_reference,
            j_candidate: r.j_candidate,
            components: r.components,
            eps: r.eps,
            elapsed_ms: (!normalized).then_some(r.elapsed_ms),
            contour_regions,
        }
    }
}

/// Accumulates the serialized history.
#[derive(Clone, Debug)]
pub struct History {
    text: String,
    normalized: bool,
}

impl History {
    pub fn new(header: &Header) -> Self {
        let mut text = serde_json::to_string(header).expect("header serializes");
        text.push('\n');
        Self {
            text,
            normalized: header.normalized,
        }
    }

    pub fn push(&mut self, r: &HistoryRecord, contour_regions: Option<usize>) {
        let line = Line::new(r, self.normalized, contour_regions);
        self.text.push_str(&serde_json::to_string(&line).expect("record serializes"));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Header and records of a history file.
pub fn parse(text: &str) -> Result<(Header, Vec<Line>), String> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or("empty history")?;
    let header: Header = serde_json::from_str(first).map_err(|e| format!("row 1: {e}"))?;
    let records = lines
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("row {}: {e}", i + 1)))
        .collect::<Result<_, _>>()?;
    Ok((header, records))
}
