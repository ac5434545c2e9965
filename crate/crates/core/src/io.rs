//! File formats: PGM masks and f64 field binaries with JSON headers, JSON
//! reports, CSV tables and SVG renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid_domain::{Grid, GridDomain};
use crate::seminorms::{NormReport, SeminormReport};

/// Grid geometry stored next to binary payloads. Arrays list the active
/// axes only; the last axis varies fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub dim: usize,
    pub shape: Vec<usize>,
    pub spacing: f64,
    pub origin: Vec<f64>,
}

impl GridHeader {
    pub fn of(grid: &Grid) -> Self {
        let a0 = grid.a0();
        GridHeader { dim: grid.dim, shape: grid.shape[a0..].to_vec(), spacing: grid.h, origin: grid.origin[a0..].to_vec() }
    }

    pub fn grid(&self) -> Result<Grid> {
        if self.shape.len() != self.dim {
            return Err(Error::invalid("header shape does not match dim"));
        }
        Grid::new(&self.shape, self.spacing, &self.origin)
    }
}

/// Header of a field binary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    #[serde(flatten)]
    pub grid: GridHeader,
    /// Number of interleaved-free component blocks.
    pub components: usize,
    /// Always `"f64-le"`.
    pub dtype: String,
}

/// Binary PGM (`P5`, maxval 255). Width is the last axis, height the product
/// of the others; rows appear in index order. Ω cells are 255.
pub fn mask_to_pgm(grid: &Grid, mask: &[bool]) -> Vec<u8> {
    let w = grid.shape[2];
    let hgt = grid.len() / w;
    let mut out = format!("P5\n{w} {hgt}\n255\n").into_bytes();
    out.extend(mask.iter().map(|&m| if m { 255u8 } else { 0 }));
    out
}

/// Inverse of [`mask_to_pgm`]; any nonzero byte counts as Ω.
pub fn pgm_to_mask(bytes: &[u8], header: &GridHeader) -> Result<(Grid, Vec<bool>)> {
    let grid = header.grid()?;
    let bad = || Error::invalid("malformed PGM");
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad());
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad())?.to_string());
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "255" {
        return Err(bad());
    }
    let w: usize = fields[1].parse().map_err(|_| bad())?;
    let h: usize = fields[2].parse().map_err(|_| bad())?;
    if w != grid.shape[2] || w * h != grid.len() || bytes.len() < pos + grid.len() {
        return Err(Error::invalid("PGM size does not match header"));
    }
    let mask = bytes[pos..pos + grid.len()].iter().map(|&b| b != 0).collect();
    Ok((grid, mask))
}

/// Little-endian f64 payload of one or more component blocks.
pub fn field_to_bytes(blocks: &[&[f64]]) -> Vec<u8> {
    blocks.iter().flat_map(|b| b.iter().flat_map(|x| x.to_le_bytes())).collect()
}

pub fn field_header(grid: &Grid, components: usize) -> FieldHeader {
    FieldHeader { grid: GridHeader::of(grid), components, dtype: "f64-le".into() }
}

/// Decodes a payload into component blocks.
pub fn bytes_to_field(bytes: &[u8], header: &FieldHeader) -> Result<(Grid, Vec<Vec<f64>>)> {
    if header.dtype != "f64-le" {
        return Err(Error::invalid(format!("unsupported dtype {}", header.dtype)));
    }
    let grid = header.grid.grid()?;
    let n = grid.len();
    if bytes.len() != 8 * n * header.components {
        return Err(Error::invalid("field payload size does not match header"));
    }
    let vals: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((grid, vals.chunks(n).map(|c| c.to_vec()).collect()))
}

pub fn read_scalar(bytes: &[u8], header: &FieldHeader) -> Result<ScalarField> {
    if header.components != 1 {
        return Err(Error::invalid("expected a scalar field"));
    }
    let (grid, mut blocks) = bytes_to_field(bytes, header)?;
    ScalarField::new(grid, blocks.pop().unwrap())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Uniform report document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub value: f64,
    pub witness: Option<WitnessJson>,
    pub params: Value,
    pub counts: Value,
}

impl Report {
    pub fn new(kind: impl Into<String>, value: f64, params: Value, counts: Value) -> Self {
        Report { kind: kind.into(), value, witness: None, params, counts }
    }

    pub fn from_seminorm(r: &SeminormReport, params: Value) -> Self {
        Report {
            kind: r.kind.clone(),
            value: r.value,
            witness: r.witness.as_ref().map(|w| WitnessJson { center: w.center.clone(), radius: w.radius }),
            params,
            counts: serde_json::json!({
                "balls_checked": r.balls_checked,
                "exact_evaluations": r.exact_evaluations,
                "empty": r.empty,
            }),
        }
    }

    /// The witness is the one of the largest part.
    pub fn from_norm(r: &NormReport, params: Value) -> Self {
        let top = r.parts.iter().fold(None::<&SeminormReport>, |b, p| match b {
            Some(q) if q.value >= p.value => Some(q),
            _ => Some(p),
        });
        Report {
            kind: r.kind.clone(),
            value: r.value,
            witness: top.and_then(|p| p.witness.as_ref()).map(|w| WitnessJson { center: w.center.clone(), radius: w.radius }),
            params,
            counts: serde_json::json!({
                "parts": r.parts.iter().map(|p| serde_json::json!({
                    "kind": p.kind, "value": p.value,
                    "balls_checked": p.balls_checked, "exact_evaluations": p.exact_evaluations, "empty": p.empty,
                })).collect::<Vec<_>>(),
                "warnings": r.warnings,
            }),
        }
    }
}

/// Pretty JSON with a trailing newline. Key order follows the types, so
/// output is byte-stable.
pub fn to_json<T: Serialize>(x: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(x)?;
    s.push('\n');
    Ok(s)
}

/// In-memory table rendered as CSV with a header row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::invalid("row length does not match header"));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn push_f64(&mut self, row: &[f64]) -> Result<()> {
        self.push(row.iter().map(|x| num(*x)).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        let io = |e: csv::Error| Error::invalid(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|_| Error::invalid("csv is not utf-8"))
    }

    pub fn from_csv(s: &str) -> Result<Table> {
        let mut r = csv::Reader::from_reader(s.as_bytes());
        let io = |e: csv::Error| Error::invalid(format!("csv: {e}"));
        let header = r.headers().map_err(io)?.iter().map(String::from).collect();
        let rows = r.records().map(|rec| rec.map(|x| x.iter().map(String::from).collect())).collect::<std::result::Result<_, _>>().map_err(io)?;
        Ok(Table { header, rows })
    }
}

/// Shortest round-trip decimal form, as serde_json writes it.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).unwrap()
    } else {
        format!("{x}")
    }
}

/// Planar SVG canvas mapping a physical window onto pixels with y up.
pub struct Svg {
    body: String,
    lo: [f64; 2],
    scale: f64,
    height: f64,
    width: f64,
}

impl Svg {
    pub fn new(lo: [f64; 2], hi: [f64; 2], pixels: f64) -> Self {
        let ext = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
        let scale = pixels / ext;
        Svg { body: String::new(), lo, scale, width: (hi[0] - lo[0]) * scale, height: (hi[1] - lo[1]) * scale }
    }

    /// Window of a planar grid.
    pub fn for_grid(grid: &Grid, pixels: f64) -> Self {
        let h = grid.h;
        let lo = [grid.origin[1] - h / 2.0, grid.origin[2] - h / 2.0];
        let hi = [lo[0] + grid.shape[1] as f64 * h, lo[1] + grid.shape[2] as f64 * h];
        Svg::new(lo, hi, pixels)
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.lo[0]) * self.scale, self.height - (y - self.lo[1]) * self.scale)
    }

    /// Axis-aligned square with lower-left corner `(x, y)`.
    pub fn square(&mut self, x: f64, y: f64, side: f64, style: &str) {
        let (px, py) = self.px(x, y + side);
        let s = side * self.scale;
        let _ = writeln!(self.body, r#"<rect x="{px:.3}" y="{py:.3}" width="{s:.3}" height="{s:.3}" {style}/>"#);
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, style: &str) {
        let (px, py) = self.px(x, y);
        let _ = writeln!(self.body, r#"<circle cx="{px:.3}" cy="{py:.3}" r="{:.3}" {style}/>"#, r * self.scale);
    }

    /// Ω cells of a planar domain as one path of unit squares.
    pub fn mask(&mut self, dom: &GridDomain, style: &str) {
        let g = &dom.grid;
        let mut d = String::new();
        let s = g.h * self.scale;
        for k in (0..g.len()).filter(|&k| dom.mask[k]) {
            let c = g.center(k);
            let (px, py) = self.px(c[1] - g.h / 2.0, c[2] + g.h / 2.0);
            let _ = write!(d, "M{px:.3} {py:.3}h{s:.3}v{s:.3}h{:.3}z", -s);
        }
        let _ = writeln!(self.body, r#"<path d="{d}" {style}/>"#);
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">\n{b}</svg>\n",
            w = self.width,
            h = self.height,
            b = self.body
        )
    }
}

const CUBE_STYLE: &str = r##"fill="none" stroke="#1f4e79" stroke-width="0.6""##;
const MASK_STYLE: &str = r##"fill="#dde8f3" stroke="none""##;

/// Whitney squares over the domain mask.
pub fn whitney_svg(dom: Option<&GridDomain>, squares: &[(f64, f64, f64)], window: ([f64; 2], [f64; 2])) -> String {
    let mut svg = match dom {
        Some(d) => Svg::for_grid(&d.grid, 640.0),
        None => Svg::new(window.0, window.1, 640.0),
    };
    if let Some(d) = dom {
        svg.mask(d, MASK_STYLE);
    }
    for &(x, y, s) in squares {
        svg.square(x, y, s, CUBE_STYLE);
    }
    svg.finish()
}

/// Domain mask with witness balls.
pub fn witness_svg(dom: &GridDomain, witnesses: &[WitnessJson]) -> Result<String> {
    if dom.dim() != 2 {
        return Err(Error::invalid("witness rendering is planar"));
    }
    let mut svg = Svg::for_grid(&dom.grid, 640.0);
    svg.mask(dom, MASK_STYLE);
    for w in witnesses {
        svg.circle(w.center[0], w.center[1], w.radius, r##"fill="#c0392b" fill-opacity="0.25" stroke="#c0392b""##);
    }
    Ok(svg.finish())
}
