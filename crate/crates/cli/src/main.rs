//! `vbmo`: command-line driver for the lattice toolkit.
//!
//! Exit status: 0 on success, 1 on invalid input or I/O failure, 2 when a
//! computed property that should hold was violated.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use vbmo_core::extension::{
    even_extend, holder_seminorm, jones_extend, mcshane_extend, odd_extend, weighted_even_extend, zero_extend,
    ExtensionResult,
};
use vbmo_core::field::{random_vector_field, RandomSmooth};
use vbmo_core::grid_domain::parse_spacing;
use vbmo_core::io::{self, field_header, field_to_bytes, FieldHeader, GridHeader, Report, Table, WitnessJson};
use vbmo_core::normal_coords::{inverse_last_row, random_frame, transform_vector_field, ChartSpec, NormalChart};
use vbmo_core::seminorms::{
    self, engine, CenterLattice, CenterStride, Lattice, NormReport, SeminormParams, SeminormReport,
};
use vbmo_core::stats::{relative_range, relative_spread_to_last};
use vbmo_core::suites::{run_suite, trace_family, SuiteOptions, SUITES};
use vbmo_core::trace::{counterexample_report, trace_inequality_experiment, TraceMode};
use vbmo_core::whitney::{
    estimate_uniform_constant, planar_squares, whitney_decompose, MaskRegion, Region, ShapeRegion, UniformOptions,
};
use vbmo_core::{build_domain, DomainSpec, GridDomain, ScalarField, VectorField};

#[derive(Parser)]
#[command(name = "vbmo", version, about = "BMO-type seminorms, Whitney cubes, extensions and normal traces on grids")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a domain; export its mask, header and distance field.
    Domain(DomainArgs),
    /// Evaluate a seminorm or norm of a field.
    Seminorm(SeminormArgs),
    /// Certified Whitney decomposition.
    Whitney(WhitneyArgs),
    /// Extend a field beyond the domain.
    Extend(ExtendArgs),
    /// Normal-coordinate chart checks.
    Chart(ChartArgs),
    /// Normal-trace experiments and the log counterexample.
    Trace(TraceArgs),
    /// Run a named experiment suite.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct DomainIn {
    /// Domain spec JSON `{type, params, resolution}`.
    #[arg(long)]
    domain: PathBuf,
    /// Override the spacing, e.g. `1/128`.
    #[arg(long, value_parser = spacing)]
    h: Option<f64>,
}

#[derive(Args)]
struct FieldIn {
    /// Field binary (f64 little-endian); header defaults to the same path
    /// with a `.json` extension.
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long)]
    field_header: Option<PathBuf>,
    /// Seed of the random smooth field used without `--field`.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    modes: usize,
    #[arg(long, default_value_t = 6.0)]
    max_freq: f64,
}

#[derive(Args)]
struct DomainArgs {
    #[command(flatten)]
    dom: DomainIn,
    /// Mask as binary PGM; the grid header goes next to it.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Signed distance as a field binary.
    #[arg(long)]
    distance: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Bmo,
    B,
    L1Ul,
    LpUl,
    Tube,
    BmoB,
    BmoDelta,
    Miyachi,
    NormalB,
    Vbmo,
    VectorBmoB,
}

#[derive(Args)]
struct SeminormArgs {
    #[command(flatten)]
    dom: DomainIn,
    #[command(flatten)]
    field: FieldIn,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Radius bound of interior balls; `inf` allowed.
    #[arg(long, default_value = "0.25", value_parser = bound)]
    mu: f64,
    /// Radius bound of boundary balls; `inf` allowed.
    #[arg(long, default_value = "0.25", value_parser = bound)]
    nu: f64,
    /// Tube width; `inf` allowed.
    #[arg(long, default_value = "0.25", value_parser = bound)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    r0: f64,
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Restrict boundary centers to one component.
    #[arg(long)]
    component: Option<u32>,
    /// Add half-step ball centers.
    #[arg(long)]
    half_step: bool,
    /// Coarsen centers of large balls to a stride of `sqrt(rho2) / div` cells.
    #[arg(long)]
    stride_div: Option<u32>,
    /// Recompute without bound pruning and compare.
    #[arg(long)]
    oracle: bool,
    /// SVG of the domain with the witness ball.
    #[arg(long)]
    render: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WhitneyArgs {
    #[command(flatten)]
    dom: DomainIn,
    /// Decompose the analytic shape instead of the mask.
    #[arg(long)]
    analytic: bool,
    /// Finest level of the analytic decomposition.
    #[arg(long, default_value_t = 8)]
    max_level: i32,
    /// Estimate the uniform-domain constant K.
    #[arg(long)]
    uniform: bool,
    #[arg(long)]
    render: Option<PathBuf>,
    /// Cube list as CSV.
    #[arg(long)]
    cubes: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Zero,
    Even,
    Odd,
    Weighted,
    Jones,
    Mcshane,
}

#[derive(Args)]
struct ExtendArgs {
    #[command(flatten)]
    dom: DomainIn,
    #[command(flatten)]
    field: FieldIn,
    #[arg(long, value_enum)]
    method: Method,
    /// Support radius of the Jones extension.
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Hölder exponent of the McShane extension.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Padding cells of the zero extension.
    #[arg(long, default_value_t = 8)]
    pad: usize,
    /// Chart spec for the weighted extension.
    #[arg(long)]
    chart: Option<PathBuf>,
    /// Extended field binary; header goes next to it.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    render: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ChartArgs {
    /// Chart spec JSON `{type, params, z0, r, delta}`.
    #[arg(long)]
    chart: PathBuf,
    #[arg(long, default_value = "1/128", value_parser = spacing)]
    h: f64,
    /// Random frames to check.
    #[arg(long, default_value_t = 1000)]
    frames: usize,
    /// Random vector fields pushed through the chart.
    #[arg(long, default_value_t = 20)]
    fields: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Nth,
    Ntg,
    Trbb,
}

#[derive(Args)]
struct TraceArgs {
    /// Run `log|x_1 - x_2|` on the half-plane strip.
    #[arg(long)]
    counterexample: bool,
    /// Domain for the inequality experiment; its spacing is the finest level.
    #[arg(long)]
    domain: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "ntg")]
    mode: Mode,
    /// Refinement levels.
    #[arg(long, default_value_t = 3)]
    levels: u32,
    /// Finest spacing.
    #[arg(long, value_parser = spacing)]
    h: Option<f64>,
    /// Number of stream-function fields.
    #[arg(long, default_value_t = 20)]
    fields: usize,
    #[arg(long, default_value_t = 0.25)]
    mu: f64,
    #[arg(long, default_value_t = 0.25)]
    nu: f64,
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    name: String,
    #[arg(long, value_parser = spacing)]
    h: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    Violated(String),
}

impl From<vbmo_core::Error> for Failure {
    fn from(e: vbmo_core::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Out = Result<(), Failure>;

fn spacing(s: &str) -> Result<f64, String> {
    parse_spacing(s).map_err(|e| e.to_string())
}

fn bound(s: &str) -> Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => spacing(s),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Out {
    std::fs::write(path, bytes).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

/// Writes JSON to `path` or stdout.
fn emit<T: serde::Serialize>(path: Option<&Path>, x: &T) -> Out {
    let s = io::to_json(x)?;
    match path {
        Some(p) => write(p, s.as_bytes()),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn load_domain(d: &DomainIn) -> Result<GridDomain, Failure> {
    let text = String::from_utf8(read(&d.domain)?).map_err(|_| Failure::Invalid("domain spec is not UTF-8".into()))?;
    let mut spec = DomainSpec::from_json(&text)?;
    if let Some(h) = d.h {
        spec.resolution.h = h;
    }
    Ok(build_domain(&spec)?)
}

fn read_header(f: &FieldIn, field: &Path) -> Result<FieldHeader, Failure> {
    let hp = f.field_header.clone().unwrap_or_else(|| sidecar(field));
    Ok(serde_json::from_slice(&read(&hp)?)?)
}

fn load_scalar(f: &FieldIn, dom: &GridDomain) -> Result<ScalarField, Failure> {
    let field = match &f.field {
        Some(p) => {
            let hdr = read_header(f, p)?;
            io::read_scalar(&read(p)?, &hdr)?
        }
        None => RandomSmooth::new(f.seed, dom.dim(), f.modes, f.max_freq).sample(&dom.grid),
    };
    if field.grid != dom.grid {
        return Err(Failure::Invalid("field grid does not match the domain grid".into()));
    }
    Ok(field.masked(&dom.mask))
}

fn load_vector(f: &FieldIn, dom: &GridDomain) -> Result<VectorField, Failure> {
    match &f.field {
        Some(p) => {
            let hdr = read_header(f, p)?;
            if hdr.components != dom.dim() {
                return Err(Failure::Invalid(format!("expected {} components", dom.dim())));
            }
            let (grid, blocks) = io::bytes_to_field(&read(p)?, &hdr)?;
            if grid != dom.grid {
                return Err(Failure::Invalid("field grid does not match the domain grid".into()));
            }
            Ok(VectorField::new(grid, blocks)?)
        }
        None => Ok(random_vector_field(&dom.grid, f.seed, f.modes, f.max_freq)),
    }
}

fn grid_json(dom: &GridDomain) -> Value {
    serde_json::to_value(GridHeader::of(&dom.grid)).unwrap_or(Value::Null)
}

fn cmd_domain(a: &DomainArgs) -> Out {
    let dom = load_domain(&a.dom)?;
    if let Some(p) = &a.mask {
        write(p, &io::mask_to_pgm(&dom.grid, &dom.mask))?;
        emit(Some(&sidecar(p)), &GridHeader::of(&dom.grid))?;
    }
    if let Some(p) = &a.distance {
        let sd: Vec<f64> = (0..dom.grid.len()).map(|k| dom.dist.signed(&dom.mask, k)).collect();
        write(p, &field_to_bytes(&[&sd]))?;
        emit(Some(&sidecar(p)), &field_header(&dom.grid, 1))?;
    }
    let report = Report::new(
        "domain",
        dom.count() as f64,
        json!({ "shape": dom.shape, "grid": grid_json(&dom) }),
        json!({
            "cells": dom.grid.len(),
            "omega_cells": dom.count(),
            "faces": dom.faces.len(),
            "boundary_cells": dom.boundary_cells.len(),
            "components": dom.n_components,
            "reach": finite_or_null(dom.reach()),
        }),
    );
    emit(a.out.as_deref(), &report)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn bound_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("inf")
    }
}

enum Computed {
    Semi(SeminormReport),
    Norm(NormReport),
}

impl Computed {
    fn value(&self) -> f64 {
        match self {
            Computed::Semi(r) => r.value,
            Computed::Norm(r) => r.value,
        }
    }

    fn witnesses(&self) -> Vec<seminorms::Witness> {
        match self {
            Computed::Semi(r) => r.witness.iter().cloned().collect(),
            Computed::Norm(r) => r.parts.iter().filter_map(|p| p.witness.clone()).collect(),
        }
    }
}

fn compute(a: &SeminormArgs, dom: &GridDomain) -> Result<Computed, Failure> {
    let lat = Lattice {
        centers: if a.half_step { CenterLattice::HalfStep } else { CenterLattice::Cells },
        stride: a.stride_div.map_or(CenterStride::Full, |div| CenterStride::Adaptive { div }),
    };
    let params = SeminormParams { mu: a.mu, nu: a.nu, delta: a.delta, r0: a.r0, lattice: lat };
    params.validate()?;
    let c = match a.kind {
        Kind::Bmo => Computed::Semi(seminorms::bmo_seminorm(&load_scalar(&a.field, dom)?, dom, a.mu, lat)),
        Kind::B => Computed::Semi(seminorms::b_seminorm(&load_scalar(&a.field, dom)?, dom, a.nu, a.component)?),
        Kind::L1Ul => Computed::Semi(seminorms::l1_ul(&load_scalar(&a.field, dom)?, &dom.mask, a.r0)),
        Kind::LpUl => Computed::Semi(seminorms::lp_ul(&load_scalar(&a.field, dom)?, &dom.mask, a.r0, a.p)),
        Kind::Tube => Computed::Semi(seminorms::tube_l1(&load_scalar(&a.field, dom)?, dom, a.delta, a.r0)),
        Kind::BmoB => Computed::Norm(seminorms::bmo_b_norm(&load_scalar(&a.field, dom)?, dom, a.mu, a.nu, lat)?),
        Kind::BmoDelta => {
            Computed::Norm(seminorms::bmo_delta_norm(&load_scalar(&a.field, dom)?, dom, a.mu, a.delta, a.r0, lat))
        }
        Kind::Miyachi => Computed::Norm(seminorms::miyachi_norm(&load_scalar(&a.field, dom)?, dom)),
        Kind::NormalB => Computed::Semi(seminorms::normal_b_seminorm(&load_vector(&a.field, dom)?, dom, a.nu, a.component)?),
        Kind::Vbmo => Computed::Norm(seminorms::vbmo_norm(&load_vector(&a.field, dom)?, dom, &params)?),
        Kind::VectorBmoB => Computed::Norm(seminorms::vector_bmo_b_norm(&load_vector(&a.field, dom)?, dom, &params)?),
    };
    Ok(c)
}

fn cmd_seminorm(a: &SeminormArgs) -> Out {
    let dom = load_domain(&a.dom)?;
    let got = compute(a, &dom)?;
    let params = json!({
        "mu": bound_json(a.mu), "nu": bound_json(a.nu), "delta": bound_json(a.delta),
        "r0": a.r0, "p": a.p, "component": a.component, "half_step": a.half_step,
        "stride_div": a.stride_div, "grid": grid_json(&dom),
    });
    let mut report = match &got {
        Computed::Semi(r) => Report::from_seminorm(r, params),
        Computed::Norm(r) => Report::from_norm(r, params),
    };
    let mut violated = None;
    if a.oracle {
        let check = engine::exhaustive(|| compute(a, &dom))?;
        let ok = check.value() == got.value();
        if let Value::Object(m) = &mut report.counts {
            m.insert("oracle".into(), json!({ "value": check.value(), "agrees": ok }));
        }
        if !ok {
            violated = Some(format!("pruned search {} differs from exhaustive {}", got.value(), check.value()));
        }
    }
    if let Some(p) = &a.render {
        let w: Vec<WitnessJson> =
            got.witnesses().into_iter().map(|w| WitnessJson { center: w.center, radius: w.radius }).collect();
        write(p, io::witness_svg(&dom, &w)?.as_bytes())?;
    }
    emit(a.out.as_deref(), &report)?;
    violated.map_or(Ok(()), |m| Err(Failure::Violated(m)))
}

fn cmd_whitney(a: &WhitneyArgs) -> Out {
    let dom = load_domain(&a.dom)?;
    let region: Box<dyn Region> = if a.analytic {
        let shape = dom.shape.clone().ok_or_else(|| Failure::Invalid("no analytic shape".into()))?;
        Box::new(ShapeRegion::new(shape, a.max_level)?)
    } else {
        Box::new(MaskRegion::domain(&dom)?)
    };
    let dec = whitney_decompose(region.as_ref())?;
    let uniform = a.uniform.then(|| estimate_uniform_constant(&dec, &UniformOptions::default()));
    if let Some(p) = &a.render {
        if dec.dim != 2 {
            return Err(Failure::Invalid("rendering is planar".into()));
        }
        let squares = planar_squares(&dec);
        let svg = if a.analytic {
            let (lo, hi) = region_window(&squares);
            io::whitney_svg(None, &squares, (lo, hi))
        } else {
            io::whitney_svg(Some(&dom), &squares, ([0.0; 2], [1.0; 2]))
        };
        write(p, svg.as_bytes())?;
    }
    if let Some(p) = &a.cubes {
        let mut t = Table::new(["level", "i0", "i1", "i2", "side", "distance"]);
        for (q, d) in dec.cubes.iter().zip(&dec.distances) {
            t.push(vec![
                q.level.to_string(),
                q.index[0].to_string(),
                q.index[1].to_string(),
                q.index[2].to_string(),
                io::num(q.side()),
                io::num(*d),
            ])?;
        }
        write(p, t.to_csv()?.as_bytes())?;
    }
    let c = &dec.certificate;
    let report = Report::new(
        "whitney",
        dec.cubes.len() as f64,
        json!({ "analytic": a.analytic, "max_level": dec.max_level, "min_level": dec.min_level }),
        json!({
            "cubes": dec.cubes.len(),
            "levels": dec.level_counts(),
            "truncated": dec.truncated,
            "margin": dec.margin,
            "certificate": c,
            "uniform": uniform,
        }),
    );
    emit(a.out.as_deref(), &report)?;
    if c.all() {
        Ok(())
    } else {
        Err(Failure::Violated(format!("certificate failed: {:?}", c.violations)))
    }
}

fn region_window(squares: &[(f64, f64, f64)]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for &(x, y, s) in squares {
        lo = [lo[0].min(x), lo[1].min(y)];
        hi = [hi[0].max(x + s), hi[1].max(y + s)];
    }
    (lo, hi)
}

fn cmd_extend(a: &ExtendArgs) -> Out {
    let dom = load_domain(&a.dom)?;
    let mut violated = None;
    let mut extra = json!({});
    let result: ExtensionResult = match a.method {
        Method::Zero => zero_extend(&load_scalar(&a.field, &dom)?, &dom, a.pad),
        Method::Even => even_extend(&load_scalar(&a.field, &dom)?, &dom)?,
        Method::Odd => odd_extend(&load_scalar(&a.field, &dom)?, &dom)?,
        Method::Jones => {
            let f = load_scalar(&a.field, &dom)?;
            let ext = jones_extend(&f, &dom, a.eps)?;
            let big = &ext.info.domain;
            let h = dom.h();
            let far = (0..big.grid.len())
                .filter(|&k| !big.mask[k] && ext.result.field.values[k] != 0.0)
                .map(|k| big.dist.values[k])
                .fold(0.0f64, f64::max);
            if far > a.eps + h {
                violated = Some(format!("support reaches distance {far} > eps + h"));
            }
            extra = json!({
                "k_eps": ext.info.k_eps,
                "matched": ext.info.matching.len(),
                "interior_cubes": ext.info.interior_cubes,
                "complement_cubes": ext.info.complement_cubes,
                "support_distance": far,
            });
            ext.result
        }
        Method::Mcshane => {
            let f = load_scalar(&a.field, &dom)?;
            let ext = mcshane_extend(&f, &dom.mask, a.gamma)?;
            let before = holder_seminorm(&f, Some(&dom.mask), a.gamma);
            let after = holder_seminorm(&ext.field, None, a.gamma);
            if after > before * (1.0 + 1e-12) {
                violated = Some(format!("Hölder quotient grew from {before} to {after}"));
            }
            extra = json!({ "holder_before": before, "holder_after": after });
            ext
        }
        Method::Weighted => {
            let path = a.chart.as_ref().ok_or_else(|| Failure::Invalid("--chart is required".into()))?;
            let spec: ChartSpec = serde_json::from_slice(&read(path)?)?;
            let chart = NormalChart::from_spec(&spec)?;
            let yg = chart.grid(dom.h())?;
            let w = RandomSmooth::new(a.field.seed, yg.dim, a.field.modes, a.field.max_freq).sample(&yg);
            let jac = chart.jacobian_field(&yg)?;
            let ext = weighted_even_extend(&w, &jac)?;
            let n = yg.len();
            let corr = &ext.correction.values;
            extra = json!({
                "correction_min": corr.iter().copied().fold(f64::INFINITY, f64::min),
                "correction_max": corr.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
            ExtensionResult {
                support: vec![true; n],
                provenance: vec![vbmo_core::extension::Provenance::Extended; n],
                field: ext.field,
                offset: [0; 3],
            }
        }
    };
    if let Some(p) = &a.output {
        write(p, &field_to_bytes(&[&result.field.values]))?;
        emit(Some(&sidecar(p)), &field_header(&result.field.grid, 1))?;
    }
    if let Some(p) = &a.render {
        let g = &result.field.grid;
        if g.dim != 2 {
            return Err(Failure::Invalid("rendering is planar".into()));
        }
        let mask: Vec<bool> = result.field.values.iter().map(|v| *v != 0.0).collect();
        let sup = GridDomain::from_mask(g.clone(), mask, None)?;
        write(p, io::witness_svg(&sup, &[])?.as_bytes())?;
    }
    let s = result.summary();
    let method = match a.method {
        Method::Zero => "zero",
        Method::Even => "even",
        Method::Odd => "odd",
        Method::Weighted => "weighted",
        Method::Jones => "jones",
        Method::Mcshane => "mcshane",
    };
    let report = Report::new(
        format!("extension_{method}"),
        result.field.max_abs(None),
        json!({ "method": method, "eps": a.eps, "gamma": a.gamma, "pad": a.pad, "grid": GridHeader::of(&result.field.grid) }),
        json!({ "summary": s, "details": extra }),
    );
    emit(a.out.as_deref(), &report)?;
    violated.map_or(Ok(()), |m| Err(Failure::Violated(m)))
}

/// Counts per decade `[1e-k-1, 1e-k)` from `1e-17` up.
fn histogram(xs: &[f64]) -> Vec<(String, usize)> {
    let mut bins = std::collections::BTreeMap::new();
    for &x in xs {
        let e = if x > 0.0 { x.log10().floor().max(-17.0) as i32 } else { -17 };
        *bins.entry(e).or_insert(0usize) += 1;
    }
    bins.into_iter().map(|(e, c)| (format!("1e{e}"), c)).collect()
}

fn cmd_chart(a: &ChartArgs) -> Out {
    let spec: ChartSpec = serde_json::from_slice(&read(&a.chart)?)?;
    let chart = NormalChart::from_spec(&spec)?;
    let yg = chart.grid(a.h)?;
    let a0 = yg.a0();
    let mut frame_res = Vec::new();
    let mut jac_min = f64::INFINITY;
    for k in 0..yg.len() {
        let y = &yg.center(k)[a0..];
        let f = chart.frame(y)?;
        frame_res.push(inverse_last_row(&f.a)?.residual);
        jac_min = jac_min.min(f.a.determinant());
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let random_res: Vec<f64> = (0..a.frames)
        .map(|i| inverse_last_row(&random_frame(&mut rng, 2 + i % 2)).map(|r| r.residual))
        .collect::<Result<_, _>>()?;
    let mut vfg = Vec::new();
    if a.fields > 0 {
        let dom = build_domain(&DomainSpec::new(spec.shape.clone(), a.h))?;
        for s in 0..a.fields {
            let v = random_vector_field(&dom.grid, a.seed * 1000 + s, 8, 6.0);
            vfg.push(transform_vector_field(&v, &dom, &chart, &yg)?.max_diff);
        }
    }
    let fmax = frame_res.iter().copied().fold(0.0, f64::max);
    let rmax = random_res.iter().copied().fold(0.0, f64::max);
    let vmax = vfg.iter().copied().fold(0.0, f64::max);
    let report = Report::new(
        "chart_check",
        fmax,
        json!({ "chart": spec, "h": a.h, "frames": a.frames, "fields": a.fields, "seed": a.seed }),
        json!({
            "chart_frames": { "count": frame_res.len(), "max": fmax, "histogram": histogram(&frame_res) },
            "random_frames": { "count": random_res.len(), "max": rmax, "histogram": histogram(&random_res) },
            "jacobian_min": jac_min,
            "vfg_max_diff": vfg,
            "reach": finite_or_null(chart.reach),
        }),
    );
    emit(a.out.as_deref(), &report)?;
    let mut bad = Vec::new();
    if fmax >= 1e-8 {
        bad.push(format!("chart frame residual {fmax:e}"));
    }
    if rmax >= 1e-10 {
        bad.push(format!("random frame residual {rmax:e}"));
    }
    if vmax > 5.0 * a.h {
        bad.push(format!("normal component error {vmax} > 5h"));
    }
    if !(jac_min > 0.0) {
        bad.push(format!("Jacobian not positive: {jac_min}"));
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violated(bad.join("; ")))
    }
}

fn refinement(finest: f64, levels: u32) -> Vec<f64> {
    (0..levels).rev().map(|i| finest * 2f64.powi(i as i32)).collect()
}

fn cmd_trace(a: &TraceArgs) -> Out {
    if a.levels < 2 {
        return Err(Failure::Invalid("need at least two levels".into()));
    }
    if a.counterexample {
        let finest = a.h.unwrap_or(1.0 / 256.0);
        let levels = refinement(finest, a.levels);
        let rep = counterexample_report(&levels, a.nu, Lattice::default())?;
        let fitted = |f: &Option<vbmo_core::stats::LineFit>, h: f64| {
            f.as_ref().map_or(f64::NAN, |f| f.intercept + f.slope * (1.0 / h).ln())
        };
        let r2 = |f: &Option<vbmo_core::stats::LineFit>| f.as_ref().map_or(f64::NAN, |f| f.r2);
        if let Some(p) = &a.csv {
            let mut t = Table::new([
                "h", "log_inv_h", "sup_trace", "trace_fit", "trace_r2", "bmo", "b_normal", "b_fit", "b_r2",
            ]);
            for r in &rep.rows {
                t.push_f64(&[
                    r.h,
                    (1.0 / r.h).ln(),
                    r.sup_trace,
                    fitted(&rep.trace_fit, r.h),
                    r2(&rep.trace_fit),
                    r.bmo,
                    r.b_normal,
                    fitted(&rep.b_fit, r.h),
                    r2(&rep.b_fit),
                ])?;
            }
            write(p, t.to_csv()?.as_bytes())?;
        }
        let report = Report::new(
            "trace_counterexample",
            r2(&rep.trace_fit).min(r2(&rep.b_fit)),
            json!({ "levels": levels, "nu": a.nu, "field": "log|x1 - x2|" }),
            serde_json::to_value(&rep)?,
        );
        emit(a.out.as_deref(), &report)?;
        let grows = |f: &Option<vbmo_core::stats::LineFit>| f.as_ref().is_some_and(|f| f.r2 > 0.9 && f.slope > 0.0);
        return if grows(&rep.trace_fit) && grows(&rep.b_fit) {
            Ok(())
        } else {
            Err(Failure::Violated("divergence under refinement not detected (R^2 <= 0.9)".into()))
        };
    }
    let path = a.domain.as_ref().ok_or_else(|| Failure::Invalid("--domain or --counterexample is required".into()))?;
    let spec = DomainSpec::from_json(
        &String::from_utf8(read(path)?).map_err(|_| Failure::Invalid("domain spec is not UTF-8".into()))?,
    )?;
    let finest = a.h.unwrap_or(spec.resolution.h);
    let levels = refinement(finest, a.levels);
    let mode = match a.mode {
        Mode::Nth => TraceMode::Nth,
        Mode::Ntg => TraceMode::Ntg,
        Mode::Trbb => TraceMode::Trbb,
    };
    let family: Vec<_> = trace_family().into_iter().chain((20..).map(|s| vbmo_core::trace::TestFieldSpec::StreamFunction {
        seed: s,
        modes: 8,
        max_freq: 4.0,
    })).take(a.fields).collect();
    let params = SeminormParams { mu: a.mu, nu: a.nu, delta: a.delta, ..Default::default() };
    let e = trace_inequality_experiment(&family, &spec.shape, &levels, mode, &params)?;
    if let Some(p) = &a.csv {
        let mut t = Table::new(["h", "field", "sup_trace", "norm", "div_term", "ratio"]);
        for r in &e.rows {
            t.push(vec![io::num(r.h), r.field.to_string(), io::num(r.sup_trace), io::num(r.norm), io::num(r.div_term), io::num(r.ratio)])?;
        }
        write(p, t.to_csv()?.as_bytes())?;
    }
    let spread = relative_spread_to_last(&e.max_ratio);
    let report = Report::new(
        "trace_ratio",
        e.max_ratio.last().copied().unwrap_or(f64::NAN),
        json!({ "mode": mode, "levels": levels, "mu": a.mu, "nu": a.nu, "delta": a.delta, "fields": a.fields }),
        json!({ "max_ratio": e.max_ratio, "spread": spread, "range": relative_range(&e.max_ratio), "excluded": e.excluded }),
    );
    emit(a.out.as_deref(), &report)?;
    if e.max_ratio.iter().all(|r| r.is_finite()) && e.excluded.is_empty() && spread <= 0.3 {
        Ok(())
    } else {
        Err(Failure::Violated(format!("trace ratio not stable: {:?}", e.max_ratio)))
    }
}

fn cmd_suite(a: &SuiteArgs) -> Out {
    if !SUITES.contains(&a.name.as_str()) {
        return Err(Failure::Invalid(format!("unknown suite {}; known: {}", a.name, SUITES.join(", "))));
    }
    let rep = run_suite(&a.name, &SuiteOptions { h: a.h })?;
    emit(a.out.as_deref(), &rep)?;
    if rep.pass {
        Ok(())
    } else {
        Err(Failure::Violated(rep.failures().join("; ")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match &cli.cmd {
        Cmd::Domain(a) => cmd_domain(a),
        Cmd::Seminorm(a) => cmd_seminorm(a),
        Cmd::Whitney(a) => cmd_whitney(a),
        Cmd::Extend(a) => cmd_extend(a),
        Cmd::Chart(a) => cmd_chart(a),
        Cmd::Trace(a) => cmd_trace(a),
        Cmd::Suite(a) => cmd_suite(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Violated(m)) => {
            eprintln!("property violated: {m}");
            ExitCode::from(2)
        }
    }
}
