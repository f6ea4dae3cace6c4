//! Grid sweeps and the classification report.
//!
//! Per-node work runs in parallel; everything that depends on neighbouring
//! nodes (segmentation, frame alignment, finite differences) is a sequential
//! pass. Results are collected in node order, so output does not depend on
//! the number of threads.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::{self, EvolutionVerdict};
use crate::morphogenesis::{self, MorphogenesisFibre, MorphogenesisVerdict, DEFAULT_X_STEP};
use crate::numkernel::DEFAULT_REL_TOL;
use crate::response::{ResponseModel, DEFAULT_DET_FLOOR};
use crate::symmetry::{self, DimensionProfile, SampledJets, SamplingConfig};
use crate::{Error, VERSION};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "t,x1,x2,x3,sym_dim,evo_dim,evo_base_dim,morph_dim,morph_base_dim,flags";
pub const MIN_SAMPLES: usize = 26;

/// Body coordinates swept by the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BodyGrid {
    /// A single particle: the analysis uses the equations at `X`.
    Fixed { x: [f64; 3] },
    /// `steps` values of `x1` in `[lo, hi]` with `x2, x3` fixed: full-body mode.
    X1Range { lo: f64, hi: f64, steps: usize, x2: f64, x3: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub body: BodyGrid,
    pub seed: u64,
    pub samples: usize,
    pub rel_tol: f64,
    pub det_floor: f64,
    /// Step of the body stencil for `∂Λ/∂x` in full-body mode.
    pub x_step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t_min: -1.0,
            t_max: 1.0,
            t_steps: 41,
            body: BodyGrid::Fixed { x: [0.0; 3] },
            seed: 42,
            samples: 40,
            rel_tol: DEFAULT_REL_TOL,
            det_floor: DEFAULT_DET_FLOOR,
            x_step: DEFAULT_X_STEP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("t-min ({0}) must be below t-max ({1})")]
    TimeRange(f64, f64),
    #[error("t-steps must be at least 2, got {0}")]
    TooFewSteps(usize),
    #[error("at least {MIN_SAMPLES} samples are needed, got {0}")]
    TooFewSamples(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("det floor must be in (0, 1], got {0}")]
    BadDetFloor(f64),
    #[error("x1 range needs lo < hi and at least 2 steps (or 1 step)")]
    BadX1Range,
    #[error("body stencil step must be positive, got {0}")]
    BadXStep(f64),
    #[error("grid values must be finite")]
    NonFinite,
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), GridError> {
        let finite = [self.t_min, self.t_max, self.rel_tol, self.det_floor, self.x_step]
            .iter()
            .chain(self.body_values().iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(GridError::NonFinite);
        }
        if self.t_min >= self.t_max {
            return Err(GridError::TimeRange(self.t_min, self.t_max));
        }
        if self.t_steps < 2 {
            return Err(GridError::TooFewSteps(self.t_steps));
        }
        self.validate_sampling()?;
        if let BodyGrid::X1Range { lo, hi, steps, .. } = self.body {
            if steps == 0 || (steps > 1 && lo >= hi) {
                return Err(GridError::BadX1Range);
            }
        }
        Ok(())
    }

    fn validate_sampling(&self) -> Result<(), GridError> {
        if self.samples < MIN_SAMPLES {
            return Err(GridError::TooFewSamples(self.samples));
        }
        if !(self.rel_tol > 0.0) {
            return Err(GridError::BadTolerance(self.rel_tol));
        }
        if !(self.det_floor > 0.0 && self.det_floor <= 1.0) {
            return Err(GridError::BadDetFloor(self.det_floor));
        }
        if !(self.x_step > 0.0) {
            return Err(GridError::BadXStep(self.x_step));
        }
        Ok(())
    }

    fn body_values(&self) -> Vec<f64> {
        match self.body {
            BodyGrid::Fixed { x } => x.to_vec(),
            BodyGrid::X1Range { lo, hi, x2, x3, .. } => vec![lo, hi, x2, x3],
        }
    }

    pub fn sampling(&self) -> SamplingConfig {
        SamplingConfig {
            seed: self.seed,
            samples: self.samples,
            det_floor: self.det_floor,
            rel_tol: self.rel_tol,
        }
    }

    pub fn is_full_body(&self) -> bool {
        matches!(self.body, BodyGrid::X1Range { .. })
    }

    /// `t_min + (t_max - t_min)·i/(n-1)` written as an interpolation, so the
    /// midpoint of a symmetric interval is exactly 0 and the ends are exact.
    pub fn t_values(&self) -> Vec<f64> {
        lerp_grid(self.t_min, self.t_max, self.t_steps)
    }

    pub fn body_points(&self) -> Vec<[f64; 3]> {
        match self.body {
            BodyGrid::Fixed { x } => vec![x],
            BodyGrid::X1Range { lo, hi, steps, x2, x3 } => {
                lerp_grid(lo, hi, steps).into_iter().map(|x1| [x1, x2, x3]).collect()
            }
        }
    }

    /// All nodes, body point outer, time inner.
    pub fn nodes(&self) -> Vec<(f64, [f64; 3])> {
        let ts = self.t_values();
        self.body_points()
            .into_iter()
            .flat_map(|x| ts.iter().map(move |&t| (t, x)))
            .collect()
    }

    pub fn t_spacing(&self) -> f64 {
        (self.t_max - self.t_min) / (self.t_steps.max(2) - 1) as f64
    }
}

fn lerp_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            lo * (1.0 - s) + hi * s
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid grid: {0}")]
    Grid(#[from] GridError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("thread pool: {0}")]
    Threads(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    fn current() -> Self {
        Self {
            name: "morpho".into(),
            version: VERSION.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model_name: String,
    pub model_source: String,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    AtX,
    FullBody,
}

/// One grid node. In full-body mode `evo_*` and `morph_*` refer to the
/// 13-unknown systems and the `x_*` fields carry the systems at the particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub index: usize,
    pub t: f64,
    pub x: [f64; 3],
    pub sym_dim: usize,
    pub evo_dim: usize,
    pub evo_base_dim: usize,
    pub morph_dim: Option<usize>,
    pub morph_base_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_evo_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_evo_base_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_morph_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_morph_base_dim: Option<usize>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    /// Body point (row) the segment belongs to.
    pub row: usize,
    pub start: usize,
    pub end: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub dim: usize,
    pub derivatives: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub evolution: EvolutionVerdict,
    pub morphogenesis: MorphogenesisVerdict,
    pub diagnostics: Vec<String>,
}

/// Raw quantities of the full-body criterion, reported without combining.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullBodyConditions {
    /// Distinct full-body evolution fibre dimensions over the grid.
    pub evo_dims: Vec<usize>,
    pub evo_dim_constant: bool,
    /// Some node has `λ` unreachable at its particle.
    pub some_x_aging: bool,
    /// `λ` reachable in the extended system at every node with a fibre.
    pub x_morph_base_one_everywhere: bool,
    pub nodes_without_x_morph: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub provenance: Provenance,
    pub mode: Mode,
    pub nodes: Vec<NodeRecord>,
    pub segments: Vec<SegmentRecord>,
    pub jump_nodes: Vec<usize>,
    pub verdicts: Verdicts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_body_conditions: Option<FullBodyConditions>,
}

/// Everything computed at one node before neighbours are consulted.
struct NodeWork {
    jets: SampledJets,
    sym: symmetry::SymmetryAlgebra,
    x_evo: evolution::XEvolutionFibre,
    evo: Option<evolution::EvolutionFibre>,
}

fn node_work(
    model: &ResponseModel,
    (t, x): (f64, [f64; 3]),
    samples: &[nalgebra::Matrix3<f64>],
    rel_tol: f64,
    full_body: bool,
) -> Result<NodeWork, Error> {
    let jets = SampledJets::new(model, t, x, samples)?;
    let sym = symmetry::symmetry_from_jets(&jets, rel_tol)?;
    let x_evo = evolution::x_evolution_from_jets(&jets, rel_tol)?;
    let evo = match full_body {
        true => Some(evolution::evolution_from_jets(&jets, rel_tol)?),
        false => None,
    };
    Ok(NodeWork { jets, sym, x_evo, evo })
}

struct RowResult {
    nodes: Vec<NodeRecord>,
    segments: Vec<SegmentRecord>,
    jump_nodes: Vec<usize>,
    evolution: EvolutionVerdict,
    morphogenesis: morphogenesis::MorphogenesisClassification,
}

fn analyze_row(model: &ResponseModel, grid: &GridSpec, row: usize, x: [f64; 3]) -> Result<RowResult, Error> {
    let full_body = grid.is_full_body();
    let cfg = grid.sampling();
    let samples = cfg.deformations();
    let nodes: Vec<_> = grid.t_values().into_iter().map(|t| (t, x)).collect();
    let offset = row * nodes.len();

    let work = nodes
        .par_iter()
        .map(|&n| node_work(model, n, &samples, cfg.rel_tol, full_body))
        .collect::<Result<Vec<_>, _>>()?;
    let algebras: Vec<_> = work.iter().map(|w| w.sym.clone()).collect();
    let profile = DimensionProfile::from_dims(nodes.clone(), algebras.iter().map(|a| a.dim).collect());
    let mut fields = morphogenesis::frame_fields(&algebras, &profile, grid.t_spacing())?;
    if full_body {
        for field in &mut fields {
            let d_x = field
                .nodes
                .par_iter()
                .zip(field.frames.par_iter())
                .map(|(&(t, x), frame)| {
                    morphogenesis::frame_x_derivative(model, t, x, frame, &samples, cfg.rel_tol, grid.x_step)
                })
                .collect::<Result<Vec<_>, _>>()?;
            field.d_x = Some(d_x);
        }
    }

    // (at-X fibre, full-body fibre) per node
    type Pair = (Option<MorphogenesisFibre>, Option<MorphogenesisFibre>);
    let morph: Vec<Pair> = (0..nodes.len())
        .into_par_iter()
        .map(|i| -> Result<Pair, Error> {
            let field = fields.iter().find(|f| f.contains(i)).expect("segments cover the grid");
            let Some(d_t) = field.d_t.as_ref() else {
                return Ok((None, None));
            };
            let li = i - field.start;
            let jets = &work[i].jets;
            let frame = &field.frames[li];
            let at_x = morphogenesis::morphogenesis_from_jets(jets, frame, &d_t[li], None, cfg.rel_tol)?;
            let full = match field.d_x.as_ref().and_then(|d| d[li].as_ref()) {
                Some(dx) => Some(morphogenesis::morphogenesis_from_jets(jets, frame, &d_t[li], Some(dx), cfg.rel_tol)?),
                None => None,
            };
            Ok((Some(at_x), full))
        })
        .collect::<Result<_, _>>()?;

    let mut records = Vec::with_capacity(nodes.len());
    for (i, (&(t, x), w)) in nodes.iter().zip(&work).enumerate() {
        let field = fields.iter().find(|f| f.contains(i)).expect("segments cover the grid");
        let mut flags = Vec::new();
        if profile.jump_nodes.contains(&i) {
            flags.push("jump".to_string());
        }
        if !field.has_derivatives() {
            flags.push("no-frame-derivative".to_string());
        }
        let (at_x, full) = &morph[i];
        if full_body && field.has_derivatives() && full.is_none() {
            flags.push("x-jump".to_string());
        }
        let mut rec = NodeRecord {
            index: offset + i,
            t,
            x,
            sym_dim: w.sym.dim,
            evo_dim: w.x_evo.dim,
            evo_base_dim: w.x_evo.base_dim,
            morph_dim: at_x.as_ref().map(|f| f.dim),
            morph_base_dim: at_x.as_ref().map(|f| f.base_dim),
            x_evo_dim: None,
            x_evo_base_dim: None,
            x_morph_dim: None,
            x_morph_base_dim: None,
            flags,
        };
        if let Some(evo) = &w.evo {
            rec.x_evo_dim = Some(rec.evo_dim);
            rec.x_evo_base_dim = Some(rec.evo_base_dim);
            rec.x_morph_dim = rec.morph_dim;
            rec.x_morph_base_dim = rec.morph_base_dim;
            rec.evo_dim = evo.dim;
            rec.evo_base_dim = evo.base_dim;
            rec.morph_dim = full.as_ref().map(|f| f.dim);
            rec.morph_base_dim = full.as_ref().map(|f| f.base_dim);
        }
        records.push(rec);
    }

    let segments = fields
        .iter()
        .map(|f| SegmentRecord {
            row,
            start: offset + f.start,
            end: offset + f.end(),
            t_start: f.nodes[0].0,
            t_end: f.nodes[f.len() - 1].0,
            dim: f.dim,
            derivatives: f.has_derivatives(),
        })
        .collect();
    let x_fibres: Vec<_> = work.iter().map(|w| w.x_evo.clone()).collect();
    let at_x: Vec<_> = morph.into_iter().map(|(a, _)| a).collect();
    let mut classification = morphogenesis::classify_morphogenesis(&profile, &at_x)?;
    if full_body {
        for d in &mut classification.diagnostics {
            *d = format!("x1={:?}: {d}", x[0]);
        }
    }
    Ok(RowResult {
        nodes: records,
        segments,
        jump_nodes: profile.jump_nodes.iter().map(|j| offset + j).collect(),
        evolution: evolution::classify_evolution(&x_fibres).expect("grid has nodes"),
        morphogenesis: classification,
    })
}

fn combine_evolution(rows: &[RowResult]) -> EvolutionVerdict {
    let first = rows[0].evolution;
    if rows.iter().all(|r| r.evolution == first) {
        first
    } else {
        EvolutionVerdict::Mixed
    }
}

fn combine_morphogenesis(rows: &[RowResult]) -> MorphogenesisVerdict {
    let any = |v| rows.iter().any(|r| r.morphogenesis.verdict == v);
    if any(MorphogenesisVerdict::Morphogenesis) {
        MorphogenesisVerdict::Morphogenesis
    } else if any(MorphogenesisVerdict::Undetermined) {
        MorphogenesisVerdict::Undetermined
    } else {
        MorphogenesisVerdict::NoMorphogenesis
    }
}

fn full_body_conditions(nodes: &[NodeRecord]) -> FullBodyConditions {
    let mut evo_dims: Vec<usize> = nodes.iter().map(|n| n.evo_dim).collect();
    evo_dims.sort_unstable();
    evo_dims.dedup();
    FullBodyConditions {
        evo_dim_constant: evo_dims.len() == 1,
        evo_dims,
        some_x_aging: nodes.iter().any(|n| n.x_evo_base_dim == Some(0)),
        x_morph_base_one_everywhere: nodes.iter().all(|n| n.x_morph_base_dim.is_none_or(|b| b == 1)),
        nodes_without_x_morph: nodes.iter().filter(|n| n.x_morph_base_dim.is_none()).count(),
    }
}

/// Runs the whole pipeline on the current rayon pool.
pub fn analyze(model: &ResponseModel, grid: &GridSpec) -> Result<ClassificationReport, AnalysisError> {
    grid.validate()?;
    let rows = grid
        .body_points()
        .into_iter()
        .enumerate()
        .map(|(row, x)| analyze_row(model, grid, row, x))
        .collect::<Result<Vec<_>, _>>()?;
    let nodes: Vec<NodeRecord> = rows.iter().flat_map(|r| r.nodes.iter().cloned()).collect();
    let full_body = grid.is_full_body();
    Ok(ClassificationReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        provenance: Provenance {
            model_name: model.name.clone(),
            model_source: model.source.clone(),
            grid: *grid,
        },
        mode: if full_body { Mode::FullBody } else { Mode::AtX },
        segments: rows.iter().flat_map(|r| r.segments.iter().cloned()).collect(),
        jump_nodes: rows.iter().flat_map(|r| r.jump_nodes.iter().copied()).collect(),
        verdicts: Verdicts {
            evolution: combine_evolution(&rows),
            morphogenesis: combine_morphogenesis(&rows),
            diagnostics: rows.iter().flat_map(|r| r.morphogenesis.diagnostics.iter().cloned()).collect(),
        },
        full_body_conditions: full_body.then(|| full_body_conditions(&nodes)),
        nodes,
    })
}

/// Runs `f` on a dedicated pool with `threads` workers (`None`: rayon default).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, AnalysisError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| AnalysisError::Threads(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn analyze_with_threads(
    model: &ResponseModel,
    grid: &GridSpec,
    threads: Option<usize>,
) -> Result<ClassificationReport, AnalysisError> {
    with_threads(threads, || analyze(model, grid))?
}

/// Shortest decimal representation that reads back to the same `f64`,
/// identical in JSON and CSV output.
pub fn format_f64(v: f64) -> String {
    serde_json::to_string(&v).expect("finite float")
}

fn opt(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl ClassificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for n in &self.nodes {
            let fields = [
                format_f64(n.t),
                format_f64(n.x[0]),
                format_f64(n.x[1]),
                format_f64(n.x[2]),
                n.sym_dim.to_string(),
                n.evo_dim.to_string(),
                n.evo_base_dim.to_string(),
                opt(n.morph_dim),
                opt(n.morph_base_dim),
                n.flags.join("|"),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Symmetry algebra at one node, basis aligned within its segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryNode {
    pub index: usize,
    pub t: f64,
    pub x: [f64; 3],
    pub sym_dim: usize,
    /// One entry per basis element: `Λ` flattened row-major.
    pub basis: Vec<[f64; 9]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub provenance: Provenance,
    pub nodes: Vec<SymmetryNode>,
    pub segments: Vec<SegmentRecord>,
    pub jump_nodes: Vec<usize>,
}

fn symmetry_nodes(
    model: &ResponseModel,
    grid: &GridSpec,
) -> Result<(Vec<SymmetryNode>, Vec<SegmentRecord>, Vec<usize>), Error> {
    let cfg = grid.sampling();
    let t_count = grid.t_values().len();
    let (mut nodes, mut segments, mut jumps) = (Vec::new(), Vec::new(), Vec::new());
    for (row, x) in grid.body_points().into_iter().enumerate() {
        let offset = row * t_count;
        let row_nodes: Vec<_> = grid.t_values().into_iter().map(|t| (t, x)).collect();
        let algebras = symmetry::symmetry_algebras(model, &row_nodes, &cfg)?;
        let profile = DimensionProfile::from_dims(row_nodes.clone(), algebras.iter().map(|a| a.dim).collect());
        for seg in &profile.segments {
            let raw: Vec<DMatrix<f64>> = algebras[seg.start..=seg.end].iter().map(|a| a.basis.basis.clone()).collect();
            let frames = morphogenesis::align_chain(&raw)?;
            for (k, frame) in frames.iter().enumerate() {
                let i = seg.start + k;
                nodes.push(SymmetryNode {
                    index: offset + i,
                    t: row_nodes[i].0,
                    x,
                    sym_dim: seg.dim,
                    basis: (0..frame.ncols())
                        .map(|b| std::array::from_fn(|e| frame[(e, b)]))
                        .collect(),
                });
            }
            segments.push(SegmentRecord {
                row,
                start: offset + seg.start,
                end: offset + seg.end,
                t_start: row_nodes[seg.start].0,
                t_end: row_nodes[seg.end].0,
                dim: seg.dim,
                derivatives: seg.len() >= 3,
            });
        }
        jumps.extend(profile.jump_nodes.iter().map(|j| offset + j));
    }
    Ok((nodes, segments, jumps))
}

/// Symmetry algebras over a grid. A grid with `t_steps == 1` evaluates the
/// single instant `t_min`.
pub fn symmetry_report(model: &ResponseModel, grid: &GridSpec) -> Result<SymmetryReport, AnalysisError> {
    if grid.t_steps == 1 && grid.t_min == grid.t_max {
        grid.validate_sampling()?;
    } else {
        grid.validate()?;
    }
    let (nodes, segments, jump_nodes) = symmetry_nodes(model, grid)?;
    Ok(SymmetryReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        provenance: Provenance {
            model_name: model.name.clone(),
            model_source: model.source.clone(),
            grid: *grid,
        },
        nodes,
        segments,
        jump_nodes,
    })
}

impl SymmetryReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Columns `t,x1,x2,x3,sym_dim,basis`; the basis column lists the
    /// row-major entries of each element in turn, separated by spaces.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x1,x2,x3,sym_dim,basis\n");
        for n in &self.nodes {
            let basis: Vec<String> = n.basis.iter().flatten().map(|v| format_f64(*v)).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                format_f64(n.t),
                format_f64(n.x[0]),
                format_f64(n.x[1]),
                format_f64(n.x[2]),
                n.sym_dim,
                basis.join(" ")
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::builtin_scenario;

    #[test]
    fn grid_validation() {
        let ok = GridSpec::default();
        assert!(ok.validate().is_ok());
        let bad = |f: fn(&mut GridSpec)| {
            let mut g = GridSpec::default();
            f(&mut g);
            g.validate().unwrap_err()
        };
        assert!(matches!(bad(|g| g.t_max = -2.0), GridError::TimeRange(..)));
        assert!(matches!(bad(|g| g.t_steps = 1), GridError::TooFewSteps(1)));
        assert!(matches!(bad(|g| g.samples = 25), GridError::TooFewSamples(25)));
        assert!(matches!(bad(|g| g.rel_tol = 0.0), GridError::BadTolerance(_)));
        assert!(matches!(bad(|g| g.t_min = f64::NAN), GridError::NonFinite));
    }

    #[test]
    fn t_grid_hits_zero_and_ends() {
        let t = GridSpec::default().t_values();
        assert_eq!(t.len(), 41);
        assert_eq!((t[0], t[20], t[40]), (-1.0, 0.0, 1.0));
    }

    #[test]
    fn scenario_b_small_grid() {
        let grid = GridSpec {
            t_steps: 9,
            ..GridSpec::default()
        };
        let r = analyze(&builtin_scenario("B").unwrap(), &grid).unwrap();
        assert_eq!(r.verdicts.evolution, EvolutionVerdict::SmoothAging);
        assert_eq!(r.verdicts.morphogenesis, MorphogenesisVerdict::NoMorphogenesis);
        assert!(r.nodes.iter().all(|n| n.sym_dim == 3 && n.morph_dim == Some(5)));
        let csv = r.to_csv();
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 10);
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.0, 1e-7, 0.30000000000000004, 12345.678] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
