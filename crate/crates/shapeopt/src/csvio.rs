//! CSV artifacts: point clouds, level-set grids and Hadamard densities.
//!
//! Every file starts with a `# shapeopt …` stamp line (see [`Stamp`]).
//! Row numbers in diagnostics are 1-based file lines, the stamp included.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shapeopt_core::levelset::LevelSet;
use shapeopt_core::problems::ShapeGradient;
use shapeopt_core::sampling::SampleMeta;
use shapeopt_core::{PointCloud, Role};

use crate::atomic::write_atomic;
use crate::error::{CliError, CliResult};
use crate::meta::{parse_comment_line, Stamp};

fn coord_header(dim: usize) -> Vec<String> {
    (0..dim).map(|c| format!("x{c}")).collect()
}

fn csv_bytes(stamp_line: &str, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    if !header.is_empty() {
        w.write_record(header).expect("in-memory write");
    }
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    let body = w.into_inner().expect("in-memory write");
    let mut out = format!("{stamp_line}\n").into_bytes();
    out.extend(body);
    out
}

fn parse_err(path: &Path, row: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        row,
        message: message.into(),
    }
}

fn parse_f64(path: &Path, row: usize, col: usize, s: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(path, row, format!("column {}: `{s}` is not a finite number", col + 1)))
}

/// Sidecar record written next to a point-cloud CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointsMeta {
    #[serde(flatten)]
    pub stamp: Stamp,
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub acceptance_rate: Option<f64>,
    pub trials: usize,
    pub iterations: usize,
    /// Points per role tag.
    pub roles: Vec<(String, usize)>,
}

/// Path of the sidecar metadata of a point-cloud CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn points_csv(cloud: &PointCloud, stamp: &Stamp) -> Vec<u8> {
    let mut header = coord_header(cloud.dim());
    header.push("role".into());
    let rows = cloud.iter().zip(cloud.roles()).map(|(x, r)| {
        let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        row.push(r.tag().to_string());
        row
    });
    csv_bytes(&stamp.comment_line(&[("kind", "points".into())]), &header, rows)
}

/// Writes `path` and its `.meta.json` sidecar.
pub fn write_points(path: &Path, cloud: &PointCloud, stamp: &Stamp) -> CliResult<()> {
    write_atomic(path, &points_csv(cloud, stamp))?;
    let mut roles: Vec<(String, usize)> = Vec::new();
    for r in cloud.roles() {
        match roles.iter_mut().find(|(t, _)| t == r.tag()) {
            Some((_, c)) => *c += 1,
            None => roles.push((r.tag().to_string(), 1)),
        }
    }
    let meta = PointsMeta {
        stamp: stamp.clone(),
        dim: cloud.dim(),
        count: cloud.len(),
        seed: cloud.seed,
        acceptance_rate: cloud.meta.acceptance_rate,
        trials: cloud.meta.trials,
        iterations: cloud.meta.iterations,
        roles,
    };
    let mut json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    json.push('\n');
    write_atomic(&sidecar_path(path), json.as_bytes())
}

/// Reads a point-cloud CSV; the sidecar, when present, restores seed and
/// generation metadata.
pub fn read_points(path: &Path) -> CliResult<PointCloud> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let (hrow, header) = lines.next().ok_or_else(|| parse_err(path, 1, "missing header"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let dim = cols.len().saturating_sub(1);
    if !(2..=3).contains(&dim) || cols[..dim] != coord_header(dim) || cols[dim] != "role" {
        return Err(parse_err(path, hrow + 1, "expected header x0,x1[,x2],role"));
    }
    let mut cloud: Option<PointCloud> = None;
    for (i, line) in lines {
        let row = i + 1;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != dim + 1 {
            return Err(parse_err(path, row, format!("expected {} fields, found {}", dim + 1, f.len())));
        }
        let mut x = [0.0; 3];
        for c in 0..dim {
            x[c] = parse_f64(path, row, c, f[c])?;
        }
        let role = Role::from_tag(f[dim].trim()).ok_or_else(|| parse_err(path, row, format!("unknown role `{}`", f[dim])))?;
        cloud.get_or_insert_with(|| PointCloud::new(dim, role, 0)).push_with(&x[..dim], role, false);
    }
    let mut cloud = cloud.unwrap_or_else(|| PointCloud::new(dim, Role::Domain, 0));
    let side = sidecar_path(path);
    if side.is_file() {
        let t = std::fs::read_to_string(&side).map_err(|e| CliError::io(&side, e))?;
        let m: PointsMeta = serde_json::from_str(&t).map_err(|e| CliError::Format {
            path: side.clone(),
            message: e.to_string(),
        })?;
        cloud.seed = m.seed;
        cloud.meta = SampleMeta {
            acceptance_rate: m.acceptance_rate,
            trials: m.trials,
            iterations: m.iterations,
        };
    }
    Ok(cloud)
}

/// `φ` on the regular `R × R` lattice of `[0,1]²`, or of one `x₂ = level`
/// slice of `[0,1]³`. `values[j·R + i] = φ(i/(R−1), j/(R−1)[, level])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub resolution: usize,
    pub dim: usize,
    pub level: Option<f64>,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn evaluate(ls: &impl LevelSet, resolution: usize, level: Option<f64>) -> Self {
        assert!(resolution >= 2);
        let dim = ls.dim();
        let h = 1.0 / (resolution - 1) as f64;
        let mut values = Vec::with_capacity(resolution * resolution);
        for j in 0..resolution {
            for i in 0..resolution {
                let p = [i as f64 * h, j as f64 * h, level.unwrap_or(0.0)];
                values.push(ls.eval(&p[..dim]));
            }
        }
        Self {
            resolution,
            dim,
            level,
            values,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.resolution + i]
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.resolution - 1) as f64
    }

    pub fn to_csv(&self, stamp: &Stamp) -> Vec<u8> {
        let mut extra = vec![
            ("kind", "grid".to_string()),
            ("R", self.resolution.to_string()),
            ("d", self.dim.to_string()),
        ];
        if let Some(l) = self.level {
            extra.push(("axis", "x2".into()));
            extra.push(("level", l.to_string()));
        }
        let r = self.resolution;
        let rows = self.values.chunks(r).map(|c| c.iter().map(|v| v.to_string()).collect());
        csv_bytes(&stamp.comment_line(&extra), &[], rows)
    }

    pub fn parse(path: &Path, text: &str) -> CliResult<Self> {
        let mut resolution = None;
        let mut dim = None;
        let mut level = None;
        let mut values = Vec::new();
        let mut rows = 0;
        for (i, line) in text.lines().enumerate() {
            let row = i + 1;
            if line.starts_with('#') {
                for (k, v) in parse_comment_line(line).unwrap_or_default() {
                    let bad = || parse_err(path, row, format!("bad header value {k}={v}"));
                    match k.as_str() {
                        "R" => resolution = Some(v.parse::<usize>().map_err(|_| bad())?),
                        "d" => dim = Some(v.parse::<usize>().map_err(|_| bad())?),
                        "level" => level = Some(v.parse::<f64>().map_err(|_| bad())?),
                        _ => {}
                    }
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let r = resolution.ok_or_else(|| parse_err(path, row, "data before the header naming R and d"))?;
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != r {
                return Err(parse_err(path, row, format!("expected {r} values, found {}", f.len())));
            }
            if rows == r {
                return Err(parse_err(path, row, format!("more than R = {r} rows")));
            }
            for (c, s) in f.iter().enumerate() {
                values.push(parse_f64(path, row, c, s)?);
            }
            rows += 1;
        }
        let (resolution, dim) = match (resolution, dim) {
            (Some(r), Some(d)) if r >= 2 && (2..=3).contains(&d) => (r, d),
            _ => return Err(parse_err(path, 1, "missing or invalid header naming R and d")),
        };
        if rows != resolution {
            return Err(parse_err(
                path,
                text.lines().count() + 1,
                format!("expected {resolution} rows, found {rows}"),
            ));
        }
        Ok(Self {
            resolution,
            dim,
            level,
            values,
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(path, &text)
    }
}

/// Diagnostic record accompanying a density CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientRecord {
    #[serde(flatten)]
    pub stamp: Stamp,
    pub problem: String,
    pub objective: f64,
    pub volume: f64,
    pub perimeter: Option<f64>,
    pub spectrum: Vec<f64>,
    pub mu_k: Option<f64>,
    pub normalized_eigenvalue: Option<f64>,
    pub cluster_size: usize,
    pub beta: f64,
    pub eps: f64,
    pub n: usize,
    pub components: usize,
}

impl GradientRecord {
    pub fn new(g: &ShapeGradient, stamp: &Stamp) -> Self {
        Self {
            stamp: stamp.clone(),
            problem: g.kind.tag().to_string(),
            objective: g.objective,
            volume: g.volume,
            perimeter: g.perimeter,
            spectrum: g.spectrum.clone(),
            mu_k: g.mu_k,
            normalized_eigenvalue: g.normalized_eigenvalue,
            cluster_size: g.cluster_size,
            beta: g.beta,
            eps: g.eps,
            n: g.n,
            components: g.components,
        }
    }
}

/// `x0,x1[,x2],f` rows of the boundary density.
pub fn gradient_csv(g: &ShapeGradient, stamp: &Stamp) -> Vec<u8> {
    let mut header = coord_header(g.dim);
    header.push("f".into());
    let rows = (0..g.len()).map(|j| {
        let mut row: Vec<String> = g.point(j).iter().map(|v| v.to_string()).collect();
        row.push(g.f[j].to_string());
        row
    });
    csv_bytes(&stamp.comment_line(&[("kind", "shape_gradient".into())]), &header, rows)
}

/// Writes `stem.csv` and the one-line `stem.jsonl` diagnostic.
pub fn write_gradient(dir: &Path, stem: &str, g: &ShapeGradient, stamp: &Stamp) -> CliResult<()> {
    write_atomic(&dir.join(format!("{stem}.csv")), &gradient_csv(g, stamp))?;
    let mut line = serde_json::to_string(&GradientRecord::new(g, stamp)).expect("record serializes");
    line.push('\n');
    write_atomic(&dir.join(format!("{stem}.jsonl")), line.as_bytes())
}

#[cfg(test)]
mod tests;
