//! Zero contours of a 2D grid by marching squares, and SVG rendering.
//!
//! Segments are oriented with the inside (`φ < 0`) on their left, so outer
//! boundaries come out counter-clockwise and holes clockwise. Ambiguous
//! saddle cells are resolved with the cell-center average.

use std::collections::HashMap;
use std::fmt::Write;

use crate::csvio::Grid;
use crate::meta::Stamp;

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

impl Polyline {
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        let segs = if self.closed { n } else { n.saturating_sub(1) };
        (0..segs)
            .map(|i| {
                let (a, b) = (self.points[i], self.points[(i + 1) % n]);
                ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
            })
            .sum()
    }

    /// Shoelace area; positive for counter-clockwise loops.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (self.points[i], self.points[(i + 1) % n]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
    }
}

/// Summary of a zero contour.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourStats {
    pub loops: usize,
    pub open: usize,
    /// Counter-clockwise loops, one per connected component of `{φ < 0}`
    /// that does not touch the border of the grid.
    pub regions: usize,
    pub length: f64,
    /// Area enclosed by the closed loops, holes subtracted.
    pub area: f64,
}

impl ContourStats {
    /// `Per² / (4π Vol)`; `1` for a disk.
    pub fn isoperimetric_ratio(&self) -> f64 {
        self.length * self.length / (4.0 * std::f64::consts::PI * self.area)
    }
}

pub fn stats(lines: &[Polyline]) -> ContourStats {
    let closed: Vec<&Polyline> = lines.iter().filter(|l| l.closed).collect();
    ContourStats {
        loops: closed.len(),
        open: lines.len() - closed.len(),
        regions: closed.iter().filter(|l| l.signed_area() > 0.0).count(),
        length: lines.iter().map(|l| l.length()).sum(),
        area: closed.iter().map(|l| l.signed_area()).sum(),
    }
}

/// Edge key: `(i, j, 0)` is the horizontal edge from node `(i, j)`, `(i, j, 1)`
/// the vertical one.
type EdgeKey = (usize, usize, u8);

/// Zero-level polylines of `grid`.
pub fn marching_squares(grid: &Grid) -> Vec<Polyline> {
    let r = grid.resolution;
    let h = grid.spacing();
    let inside = |i: usize, j: usize| grid.at(i, j) < 0.0;
    let node = |i: usize, j: usize| [i as f64 * h, j as f64 * h];
    let crossing = |e: EdgeKey| -> [f64; 2] {
        let (i, j, o) = e;
        let (i2, j2) = if o == 0 { (i + 1, j) } else { (i, j + 1) };
        let (v0, v1) = (grid.at(i, j), grid.at(i2, j2));
        let t = if v0 == v1 { 0.5 } else { (v0 / (v0 - v1)).clamp(0.0, 1.0) };
        let (a, b) = (node(i, j), node(i2, j2));
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..r - 1 {
        for i in 0..r - 1 {
            // corners counter-clockwise, edge e joins corner e and e + 1
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let edges: [EdgeKey; 4] = [(i, j, 0), (i + 1, j, 1), (i, j + 1, 0), (i, j, 1)];
            let ins: Vec<bool> = corners.iter().map(|&(a, b)| inside(a, b)).collect();
            let cut: Vec<usize> = (0..4).filter(|&e| ins[e] != ins[(e + 1) % 4]).collect();
            let pairs: Vec<(usize, usize)> = match cut.len() {
                2 => vec![(cut[0], cut[1])],
                4 => {
                    let center = corners.iter().map(|&(a, b)| grid.at(a, b)).sum::<f64>() / 4.0 < 0.0;
                    // cut off the two corners whose sign differs from the center
                    if ins[1] != center {
                        vec![(0, 1), (2, 3)]
                    } else {
                        vec![(3, 0), (1, 2)]
                    }
                }
                _ => continue,
            };
            for (a, b) in pairs {
                // the corner cut off between edges a and b
                let c = (a + 1) % 4;
                let (pa, pb) = (crossing(edges[a]), crossing(edges[b]));
                let pc = node(corners[c].0, corners[c].1);
                let cross = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]);
                let left = cross > 0.0;
                if left == ins[c] {
                    segments.push((edges[a], edges[b]));
                } else {
                    segments.push((edges[b], edges[a]));
                }
            }
        }
    }
    link(&segments, crossing)
}

fn link(segments: &[(EdgeKey, EdgeKey)], point: impl Fn(EdgeKey) -> [f64; 2]) -> Vec<Polyline> {
    let mut by_start: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    let mut has_pred: HashMap<EdgeKey, bool> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        by_start.entry(a).or_default().push(s);
        has_pred.insert(b, true);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let trace = |start: usize, used: &mut Vec<bool>| {
        let mut pts = vec![point(segments[start].0)];
        let mut cur = start;
        loop {
            used[cur] = true;
            let end = segments[cur].1;
            let next = by_start.get(&end).and_then(|v| v.iter().copied().find(|&s| !used[s]));
            match next {
                Some(s) => {
                    pts.push(point(end));
                    cur = s;
                }
                None => {
                    let closed = end == segments[start].0;
                    if !closed {
                        pts.push(point(end));
                    }
                    return Polyline { points: pts, closed };
                }
            }
        }
    };
    // open chains begin where no segment ends; scan in segment order so the
    // output is deterministic
    for s in 0..segments.len() {
        if !used[s] && !has_pred.contains_key(&segments[s].0) {
            out.push(trace(s, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            out.push(trace(s, &mut used));
        }
    }
    out
}

const SVG_SIZE: f64 = 512.0;

/// SVG of the zero contour over `[0,1]²` with optional point overlay.
/// Identical inputs give identical bytes.
pub fn render_svg(lines: &[Polyline], points: &[[f64; 2]], stamp: &Stamp, title: &str) -> String {
    let s = SVG_SIZE;
    let px = |p: [f64; 2]| (p[0] * s, (1.0 - p[1]) * s);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(out, "<!-- {} -->", stamp.comment_line(&[("kind", "contour_svg".into())]).trim_start_matches("# ")).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#
    )
    .unwrap();
    writeln!(out, "<title>{}</title>", escape(title)).unwrap();
    writeln!(out, r##"<rect x="0" y="0" width="{s}" height="{s}" fill="#ffffff" stroke="#999999"/>"##).unwrap();
    for l in lines {
        let mut d = String::new();
        for (k, &p) in l.points.iter().enumerate() {
            let (x, y) = px(p);
            write!(d, "{}{x:.3},{y:.3}", if k == 0 { "M" } else { " L" }).unwrap();
        }
        if l.closed {
            d.push_str(" Z");
        }
        writeln!(out, r##"<path d="{d}" fill="none" stroke="#000000" stroke-width="2"/>"##).unwrap();
    }
    for &p in points {
        let (x, y) = px(p);
        writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="2" fill="#cc2222"/>"##).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
