use std::fmt::Write as _;
use std::io::{Read, Write};

use lamenet::lattice::LatticeField;
use lamenet::orthogonal::circumcircle;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

/// A solved lattice in export order: one row per site, lexicographic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    /// Lattice coordinates of each site; transformation directions carry
    /// the layer index.
    pub xi: Vec<Vec<f64>>,
    pub x: Vec<Vec<f64>>,
}

impl Table {
    /// Rows of `field` with `ξ_i = base_i + k_i ε_i` on the continuous
    /// directions.
    pub fn from_field(field: &LatticeField, base: &[f64]) -> Self {
        let mesh = field.mesh();
        let mut xi = Vec::with_capacity(mesh.num_sites());
        let mut x = Vec::with_capacity(mesh.num_sites());
        for site in mesh.sites() {
            let coords = mesh.coords(&site);
            xi.push(
                (0..mesh.dim())
                    .map(|i| if mesh.is_tail(i) { site[i] as f64 } else { base[i] + coords[i] })
                    .collect(),
            );
            x.push(field.at(&site).to_vec());
        }
        Self { xi, x }
    }

    pub fn columns(&self) -> Vec<String> {
        let m = self.xi.first().map_or(0, Vec::len);
        let n = self.x.first().map_or(0, Vec::len);
        (1..=m).map(|i| format!("xi{i}")).chain((1..=n).map(|i| format!("x{i}"))).collect()
    }
}

/// 17 significant digits: enough to read back every `f64` exactly.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(table: &Table, out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(table.columns())?;
    for (xi, x) in table.xi.iter().zip(&table.x) {
        w.write_record(xi.iter().chain(x).map(|v| fmt17(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`write_csv`].
pub fn read_csv(input: impl Read) -> Result<Table, CliError> {
    let bad = |e: String| CliError::Format(format!("csv: {e}"));
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let m = header.iter().take_while(|h| h.starts_with("xi")).count();
    if m == 0 || header.iter().skip(m).any(|h| !h.starts_with('x')) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut table = Table { xi: Vec::new(), x: Vec::new() };
    for record in r.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let row: Vec<f64> = record
            .iter()
            .map(|v| v.parse::<f64>().map_err(|_| bad(format!("bad value `{v}`"))))
            .collect::<Result<_, _>>()?;
        table.xi.push(row[..m].to_vec());
        table.x.push(row[m..].to_vec());
    }
    Ok(table)
}

/// The JSON form of an exported lattice.
#[derive(Debug, Serialize)]
pub struct LatticeJson<'a> {
    pub version: &'static str,
    pub eps: f64,
    pub r: f64,
    pub steps: Vec<usize>,
    pub config: &'a RunConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl<'a> LatticeJson<'a> {
    pub fn new(table: &Table, field: &LatticeField, config: &'a RunConfig) -> Self {
        let mesh = field.mesh();
        let rows = table.xi.iter().zip(&table.x).map(|(a, b)| a.iter().chain(b).copied().collect()).collect();
        Self {
            version: lamenet::VERSION,
            eps: mesh.eps(0),
            r: config.r,
            steps: mesh.steps_all().to_vec(),
            config,
            columns: table.columns(),
            rows,
        }
    }
}

/// One cell of a planar circular net: the circumcircle of its first three
/// vertices `x`, `τ_1x`, `τ_1τ_2x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleRecord {
    pub center: [f64; 2],
    pub radius: f64,
    pub cell: [usize; 2],
}

impl CircleRecord {
    /// `quad` in cyclic order `x, τ_1x, τ_1τ_2x, τ_2x`.
    ///
    /// ```
    /// use lamenet_cli::CircleRecord;
    /// let q: [&[f64]; 4] = [&[0.0, 0.0], &[0.1, 0.0], &[0.1, 0.1], &[0.0, 0.1]];
    /// let c = CircleRecord::from_cell(q, [0, 0]).unwrap();
    /// assert!((c.radius - 0.1 / 2f64.sqrt()).abs() < 1e-15);
    /// assert!(c.defect(q) < 1e-14);
    /// ```
    pub fn from_cell(quad: [&[f64]; 4], cell: [usize; 2]) -> Result<Self, CliError> {
        let c = circumcircle(quad[0], quad[1], quad[2])
            .map_err(|e| CliError::Check(format!("cell {cell:?}: {e}")))?;
        Ok(Self { center: [c.center[0], c.center[1]], radius: c.radius, cell })
    }

    /// Largest `| |v − center| − radius | / radius` over the four vertices.
    pub fn defect(&self, quad: [&[f64]; 4]) -> f64 {
        quad.iter()
            .map(|v| ((v[0] - self.center[0]).hypot(v[1] - self.center[1]) - self.radius).abs() / self.radius)
            .fold(0.0, f64::max)
    }
}

fn cell_quad(field: &LatticeField, k: usize, l: usize) -> [&[f64]; 4] {
    [field.at(&[k, l]), field.at(&[k + 1, l]), field.at(&[k + 1, l + 1]), field.at(&[k, l + 1])]
}

/// Circle records of every cell of a two-dimensional net in the plane,
/// each checked against `tol`.
pub fn circle_records(field: &LatticeField, tol: f64) -> Result<Vec<CircleRecord>, CliError> {
    if field.width() != 2 {
        return Err(CliError::NonPlanarExport { n: field.width() });
    }
    let mesh = field.mesh();
    if mesh.dim() != 2 {
        return Err(CliError::Config(format!("circle patterns need a 2D lattice, got {}D", mesh.dim())));
    }
    let mut out = Vec::with_capacity(mesh.steps(0) * mesh.steps(1));
    for k in 0..mesh.steps(0) {
        for l in 0..mesh.steps(1) {
            let q = cell_quad(field, k, l);
            let rec = CircleRecord::from_cell(q, [k, l])?;
            let d = rec.defect(q);
            if !(d <= tol) {
                return Err(CliError::Check(format!("cell [{k}, {l}] is not circular: defect {d:e} above {tol:e}")));
            }
            out.push(rec);
        }
    }
    Ok(out)
}

/// An SVG circle pattern: the coordinate lines of the net and one circle
/// per cell, with the y axis pointing up and stroke width `ε/10`.
pub fn svg_document(field: &LatticeField, circles: &[CircleRecord]) -> String {
    let mesh = field.mesh();
    let stroke = mesh.eps(0) / 10.0;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in circles {
        for a in 0..2 {
            lo[a] = lo[a].min(c.center[a] - c.radius);
            hi[a] = hi[a].max(c.center[a] + c.radius);
        }
    }
    let pad = stroke;
    let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#, lo[0] - pad, -hi[1] - pad, w, h);
    let _ = writeln!(s, r#"<g fill="none" stroke="black" stroke-width="{stroke}">"#);
    let point = |p: &[f64]| format!("{},{}", p[0], -p[1]);
    for dir in 0..2 {
        let (len, count) = (mesh.steps(dir), mesh.steps(1 - dir));
        for line in 0..=count {
            let pts: Vec<String> = (0..=len)
                .map(|k| point(field.at(&if dir == 0 { [k, line] } else { [line, k] })))
                .collect();
            let _ = writeln!(s, r#"<polyline class="net" points="{}"/>"#, pts.join(" "));
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g fill="none" stroke="steelblue" stroke-width="{stroke}">"#);
    for c in circles {
        let _ = writeln!(
            s,
            r#"<circle class="cell" data-cell="{},{}" cx="{}" cy="{}" r="{}"/>"#,
            c.cell[0],
            c.cell[1],
            c.center[0],
            -c.center[1],
            c.radius
        );
    }
    let _ = writeln!(s, "</g>\n</svg>");
    s
}
