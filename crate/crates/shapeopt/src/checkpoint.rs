//! Network checkpoints as JSON.
//!
//! The record carries the architecture tag, `d`, every layer's shape, `ω`,
//! and the weights row-major. Floats are written with shortest round-trip
//! formatting and read back with exact parsing, so a save/load cycle
//! reproduces the parameters bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use shapeopt_core::levelset::{Layer, LevelSet};
use shapeopt_core::{Architecture, LevelSetNetwork, NetworkParams};

use crate::atomic::write_atomic;
use crate::error::{CliError, CliResult};
use crate::meta::{Stamp, FORMAT_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerRecord {
    pub rows: usize,
    pub cols: usize,
    pub omega: f64,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    #[serde(flatten)]
    pub stamp: Stamp,
    pub architecture: String,
    pub dim: usize,
    /// Iteration that produced the network, when saved by a run.
    pub iteration: Option<usize>,
    pub layers: Vec<LayerRecord>,
}

impl Checkpoint {
    pub fn from_network(net: &LevelSetNetwork, stamp: Stamp, iteration: Option<usize>) -> Self {
        Self {
            stamp,
            architecture: net.architecture().tag().to_string(),
            dim: net.dim(),
            iteration,
            layers: net
                .params()
                .layers
                .iter()
                .map(|l| LayerRecord {
                    rows: l.rows,
                    cols: l.cols,
                    omega: l.omega,
                    weights: l.weights.clone(),
                    bias: l.bias.clone(),
                })
                .collect(),
        }
    }

    /// Rebuilds the network, checking shapes and finiteness.
    pub fn to_network(&self) -> shapeopt_core::Result<LevelSetNetwork> {
        let arch = Architecture::from_tag(&self.architecture).ok_or_else(|| {
            shapeopt_core::Error::CorruptNetwork(format!("unknown architecture `{}`", self.architecture))
        })?;
        let layers = self
            .layers
            .iter()
            .map(|l| Layer {
                rows: l.rows,
                cols: l.cols,
                weights: l.weights.clone(),
                bias: l.bias.clone(),
                omega: l.omega,
            })
            .collect();
        LevelSetNetwork::from_parts(arch, self.dim, NetworkParams { layers })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let c: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if c.stamp.format_version != FORMAT_VERSION {
            return Err(format!(
                "format_version {} is not supported (expected {FORMAT_VERSION})",
                c.stamp.format_version
            ));
        }
        Ok(c)
    }
}

pub fn save(path: &Path, net: &LevelSetNetwork, stamp: Stamp, iteration: Option<usize>) -> CliResult<()> {
    write_atomic(path, Checkpoint::from_network(net, stamp, iteration).to_json().as_bytes())
}

pub fn load(path: &Path) -> CliResult<(LevelSetNetwork, Checkpoint)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let c = Checkpoint::from_json(&text).map_err(|message| CliError::Format {
        path: path.to_path_buf(),
        message,
    })?;
    let net = c.to_network().map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok((net, c))
}
