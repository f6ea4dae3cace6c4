//! Extended material distribution: the morphogenesis equation
//! `F[i][l] (Θ^l_r Λ^r_j + Θ^k ∂Λ^l_j/∂x^k + λ ∂Λ^l_j/∂t − Λ^l_r Θ^r_j) ∂W/∂F[i][j] = 0`
//! imposed for every element `Λ` of a smoothly chosen basis of the
//! symmetry algebra.

use nalgebra::{DMatrix, Matrix3};

use crate::evolution::{DistributionFibre, FULL_UNKNOWNS, X_UNKNOWNS};
use crate::numkernel::{self, ConstraintMatrix, KernelError, RowTag};
use crate::response::ResponseModel;
use crate::symmetry::{self, flatten, unflatten, DimensionProfile, SampledJets, SymmetryAlgebra};
use crate::Error;

/// Fibre of the extended material distribution (13 or 10 unknowns).
pub type MorphogenesisFibre = DistributionFibre;

/// Default step for body-coordinate derivatives of the frame.
pub const DEFAULT_X_STEP: f64 = 1e-2;

/// Aligned symmetry bases over one constant-dimension segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryFrameField {
    /// Index of the first node in the profile.
    pub start: usize,
    pub dim: usize,
    pub nodes: Vec<(f64, [f64; 3])>,
    /// `9 × dim` per node, aligned left to right.
    pub frames: Vec<DMatrix<f64>>,
    /// `∂Λ/∂t`; `None` when the segment has fewer than 3 nodes.
    pub d_t: Option<Vec<DMatrix<f64>>>,
    /// `∂Λ/∂x^k` per node (full-body mode only). A node whose body stencil
    /// crosses a change of symmetry dimension has `None`.
    pub d_x: Option<Vec<Option<[DMatrix<f64>; 3]>>>,
}

impl SymmetryFrameField {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn end(&self) -> usize {
        self.start + self.len() - 1
    }

    pub fn contains(&self, node: usize) -> bool {
        (self.start..=self.end()).contains(&node)
    }

    pub fn has_derivatives(&self) -> bool {
        self.d_t.is_some()
    }

    /// Largest principal angle between consecutive frames.
    pub fn max_step_angle(&self) -> f64 {
        self.frames
            .windows(2)
            .map(|w| numkernel::max_principal_angle(&w[0], &w[1]))
            .fold(0.0, f64::max)
    }

    /// Multiplies every frame (and, consistently, its derivatives) on the
    /// right by `q(i)`; `dq(i)` is the time derivative of `q` at local node `i`.
    pub fn regauged(&self, q: impl Fn(usize) -> DMatrix<f64>, dq: impl Fn(usize) -> DMatrix<f64>) -> Self {
        let frames: Vec<_> = self.frames.iter().enumerate().map(|(i, f)| f * q(i)).collect();
        let d_t = self.d_t.as_ref().map(|d| {
            d.iter()
                .enumerate()
                .map(|(i, d)| d * q(i) + &self.frames[i] * dq(i))
                .collect()
        });
        let d_x = self.d_x.as_ref().map(|d| {
            d.iter()
                .enumerate()
                .map(|(i, d)| d.as_ref().map(|d| [0, 1, 2].map(|k| &d[k] * q(i))))
                .collect()
        });
        Self {
            frames,
            d_t,
            d_x,
            ..self.clone()
        }
    }
}

/// Chains Procrustes alignment along `bases`, starting from the first.
pub fn align_chain(bases: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>, KernelError> {
    let mut out: Vec<DMatrix<f64>> = Vec::with_capacity(bases.len());
    for b in bases {
        let next = match out.last() {
            Some(prev) => numkernel::align_columns(prev, b)?,
            None => b.clone(),
        };
        out.push(next);
    }
    Ok(out)
}

/// One frame field per segment of `profile`, with time derivatives on the
/// uniform spacing `h`. `algebras` are indexed like the profile nodes.
pub fn frame_fields(
    algebras: &[SymmetryAlgebra],
    profile: &DimensionProfile,
    h: f64,
) -> Result<Vec<SymmetryFrameField>, KernelError> {
    assert_eq!(algebras.len(), profile.dims.len());
    profile
        .segments
        .iter()
        .map(|seg| {
            let raw: Vec<_> = algebras[seg.start..=seg.end]
                .iter()
                .map(|a| a.basis.basis.clone())
                .collect();
            let frames = align_chain(&raw)?;
            let d_t = match frames.len() {
                n if n >= 3 => Some(numkernel::fd_derivative(&frames, h)?),
                _ => None,
            };
            Ok(SymmetryFrameField {
                start: seg.start,
                dim: seg.dim,
                nodes: profile.nodes[seg.start..=seg.end].to_vec(),
                frames,
                d_t,
                d_x: None,
            })
        })
        .collect()
}

/// Frame fields of `model` along `nodes`, which must be equally spaced in `t`.
pub fn symmetry_frame_field(
    model: &ResponseModel,
    nodes: &[(f64, [f64; 3])],
    config: &symmetry::SamplingConfig,
) -> Result<Vec<SymmetryFrameField>, Error> {
    let algebras = symmetry::symmetry_algebras(model, nodes, config)?;
    let profile = DimensionProfile::from_dims(nodes.to_vec(), algebras.iter().map(|a| a.dim).collect());
    let h = match nodes.len() {
        0 | 1 => 1.0,
        n => (nodes[n - 1].0 - nodes[0].0) / (n - 1) as f64,
    };
    Ok(frame_fields(&algebras, &profile, h)?)
}

/// `∂Λ/∂x^k` of `frame` at `(t, x)` by central differences over a local
/// symmetric stencil with step `hx`, each neighbour aligned to `frame`.
/// Returns `None` when a neighbour has a different symmetry dimension.
pub fn frame_x_derivative(
    model: &ResponseModel,
    t: f64,
    x: [f64; 3],
    frame: &DMatrix<f64>,
    samples: &[Matrix3<f64>],
    rel_tol: f64,
    hx: f64,
) -> Result<Option<[DMatrix<f64>; 3]>, Error> {
    let d = frame.ncols();
    let mut out: [DMatrix<f64>; 3] = std::array::from_fn(|_| DMatrix::zeros(9, d));
    if d == 0 {
        return Ok(Some(out));
    }
    for (k, slot) in out.iter_mut().enumerate() {
        let side = |sign: f64| -> Result<Option<DMatrix<f64>>, Error> {
            let mut y = x;
            y[k] += sign * hx;
            let alg = symmetry::symmetry_algebra(model, t, y, samples, rel_tol)?;
            if alg.dim != d {
                return Ok(None);
            }
            Ok(Some(numkernel::align_columns(frame, &alg.basis.basis)?))
        };
        let (Some(minus), Some(plus)) = (side(-1.0)?, side(1.0)?) else {
            return Ok(None);
        };
        *slot = (plus - minus) / (2.0 * hx);
    }
    Ok(Some(out))
}

/// Fills `field.d_x` from local body stencils at every node.
pub fn attach_x_derivatives(
    field: &mut SymmetryFrameField,
    model: &ResponseModel,
    samples: &[Matrix3<f64>],
    rel_tol: f64,
    hx: f64,
) -> Result<(), Error> {
    let d_x = field
        .nodes
        .iter()
        .zip(&field.frames)
        .map(|(&(t, x), frame)| frame_x_derivative(model, t, x, frame, samples, rel_tol, hx))
        .collect::<Result<Vec<_>, _>>()?;
    field.d_x = Some(d_x);
    Ok(())
}

fn frobenius(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// Rows of the morphogenesis equation. With `d_x` present the system has 13
/// unknowns `(λ, Θ^k, Θ^l_j)`, otherwise 10 unknowns `(λ, Θ^l_j)`.
pub fn morphogenesis_constraints(
    jets: &SampledJets,
    frame: &DMatrix<f64>,
    d_t: &DMatrix<f64>,
    d_x: Option<&[DMatrix<f64>; 3]>,
) -> ConstraintMatrix {
    let q = if d_x.is_some() { FULL_UNKNOWNS } else { X_UNKNOWNS };
    let d = frame.ncols();
    let lam: Vec<Matrix3<f64>> = (0..d).map(|b| unflatten(frame.column(b).as_slice())).collect();
    let dlam: Vec<Matrix3<f64>> = (0..d).map(|b| unflatten(d_t.column(b).as_slice())).collect();
    let dxlam: Option<Vec<[Matrix3<f64>; 3]>> = d_x.map(|dx| {
        (0..d)
            .map(|b| [0, 1, 2].map(|k| unflatten(dx[k].column(b).as_slice())))
            .collect()
    });
    let m = jets.components();
    let mut rows = Vec::with_capacity(jets.samples.len() * m * d);
    for k in 0..jets.samples.len() {
        for c in 0..m {
            let r = jets.pullback(k, c);
            for b in 0..d {
                let mut row = Vec::with_capacity(q);
                row.push(frobenius(&r, &dlam[b]));
                if let Some(dx) = &dxlam {
                    row.extend(dx[b].iter().map(|dxb| frobenius(&r, dxb)));
                }
                let l = &lam[b];
                row.extend(flatten(&(r * l.transpose() - l.transpose() * r)));
                let tag = RowTag {
                    sample: k,
                    component: c,
                    basis: Some(b),
                };
                rows.push((tag, row));
            }
        }
    }
    if rows.is_empty() {
        return ConstraintMatrix::with_columns(q);
    }
    ConstraintMatrix::from_rows(q, rows)
}

pub fn morphogenesis_from_jets(
    jets: &SampledJets,
    frame: &DMatrix<f64>,
    d_t: &DMatrix<f64>,
    d_x: Option<&[DMatrix<f64>; 3]>,
    rel_tol: f64,
) -> Result<MorphogenesisFibre, KernelError> {
    let m = morphogenesis_constraints(jets, frame, d_t, d_x);
    let base = if d_x.is_some() { 4 } else { 1 };
    DistributionFibre::from_constraints(jets.t, jets.x, &m, base, rel_tol)
}

fn local(field: &SymmetryFrameField, node: usize) -> Result<usize, Error> {
    if !field.contains(node) {
        return Err(Error::NodeOutsideSegment { node });
    }
    Ok(node - field.start)
}

/// Fibre at a particle for profile node `node` of `field`.
pub fn morphogenesis_fibre_at_x(
    model: &ResponseModel,
    field: &SymmetryFrameField,
    node: usize,
    samples: &[Matrix3<f64>],
    rel_tol: f64,
) -> Result<MorphogenesisFibre, Error> {
    let i = local(field, node)?;
    let d_t = field.d_t.as_ref().ok_or(Error::NoFrameDerivative { node })?;
    let (t, x) = field.nodes[i];
    let jets = SampledJets::new(model, t, x, samples)?;
    Ok(morphogenesis_from_jets(&jets, &field.frames[i], &d_t[i], None, rel_tol)?)
}

/// Full-body fibre for profile node `node`; needs `field.d_x`.
pub fn morphogenesis_fibre(
    model: &ResponseModel,
    field: &SymmetryFrameField,
    node: usize,
    samples: &[Matrix3<f64>],
    rel_tol: f64,
) -> Result<MorphogenesisFibre, Error> {
    let i = local(field, node)?;
    let d_t = field.d_t.as_ref().ok_or(Error::NoFrameDerivative { node })?;
    let d_x = field
        .d_x
        .as_ref()
        .and_then(|d| d[i].as_ref())
        .ok_or(Error::NoFrameDerivative { node })?;
    let (t, x) = field.nodes[i];
    let jets = SampledJets::new(model, t, x, samples)?;
    Ok(morphogenesis_from_jets(&jets, &field.frames[i], &d_t[i], Some(d_x), rel_tol)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MorphogenesisVerdict {
    NoMorphogenesis,
    Morphogenesis,
    Undetermined,
}

impl MorphogenesisVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::NoMorphogenesis => "no-morphogenesis",
            Self::Morphogenesis => "morphogenesis",
            Self::Undetermined => "undetermined",
        }
    }
}

impl std::fmt::Display for MorphogenesisVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphogenesisClassification {
    pub verdict: MorphogenesisVerdict,
    pub diagnostics: Vec<String>,
}

/// Decides (no-)morphogenesis from the dimension profile and the fibres at a
/// particle (`None` where no fibre could be computed).
pub fn classify_morphogenesis(
    profile: &DimensionProfile,
    fibres: &[Option<MorphogenesisFibre>],
) -> Result<MorphogenesisClassification, Error> {
    if fibres.len() != profile.dims.len() {
        return Err(Error::GridMismatch {
            expected: profile.dims.len(),
            got: fibres.len(),
        });
    }
    let mut diagnostics = Vec::new();
    for &(a, b) in &profile.boundaries {
        diagnostics.push(format!(
            "symmetry dimension changes {} -> {} between t={:?} and t={:?}",
            profile.dims[a], profile.dims[b], profile.nodes[a].0, profile.nodes[b].0
        ));
    }
    let degenerate: Vec<usize> = fibres
        .iter()
        .enumerate()
        .filter(|(_, f)| f.as_ref().is_some_and(|f| f.base_dim == 0))
        .map(|(i, _)| i)
        .collect();
    for &i in &degenerate {
        diagnostics.push(format!("lambda not reachable at t={:?}", profile.nodes[i].0));
    }
    let missing = fibres.iter().filter(|f| f.is_none()).count();
    if missing > 0 {
        diagnostics.push(format!("{missing} node(s) without a morphogenesis fibre"));
    }
    let verdict = if profile.segments.len() >= 2 || !degenerate.is_empty() {
        MorphogenesisVerdict::Morphogenesis
    } else if missing == 0 {
        MorphogenesisVerdict::NoMorphogenesis
    } else {
        diagnostics.push("constant symmetry dimension without rank evidence at every node".into());
        MorphogenesisVerdict::Undetermined
    };
    Ok(MorphogenesisClassification { verdict, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::builtin_scenario;
    use crate::symmetry::SamplingConfig;

    fn t_nodes(lo: f64, hi: f64, n: usize) -> Vec<(f64, [f64; 3])> {
        (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                (lo * (1.0 - s) + hi * s, [0.0; 3])
            })
            .collect()
    }

    #[test]
    fn scenario_b_frames_are_constant() {
        let fields =
            symmetry_frame_field(&builtin_scenario("B").unwrap(), &t_nodes(-1.0, 1.0, 41), &SamplingConfig::default())
                .unwrap();
        assert_eq!(fields.len(), 1);
        assert_eq!(fields[0].dim, 3);
        for d in fields[0].d_t.as_ref().unwrap() {
            assert!(d.norm() <= 1e-8);
        }
    }

    #[test]
    fn scenario_b_fibre_at_x() {
        let model = builtin_scenario("B").unwrap();
        let cfg = SamplingConfig::default();
        let fields = symmetry_frame_field(&model, &t_nodes(-1.0, 1.0, 9), &cfg).unwrap();
        let f = morphogenesis_fibre_at_x(&model, &fields[0], 4, &cfg.deformations(), cfg.rel_tol).unwrap();
        assert_eq!((f.dim, f.base_dim), (5, 1));
    }

    #[test]
    fn empty_frame_gives_full_space() {
        let model = builtin_scenario("A").unwrap();
        let cfg = SamplingConfig::default();
        let fields = symmetry_frame_field(&model, &t_nodes(0.0, 1.0, 5), &cfg).unwrap();
        assert_eq!(fields[0].dim, 0);
        let f = morphogenesis_fibre_at_x(&model, &fields[0], 2, &cfg.deformations(), cfg.rel_tol).unwrap();
        assert_eq!((f.dim, f.base_dim), (10, 1));
        assert_eq!(f.basis.basis, DMatrix::identity(10, 10));
    }

    #[test]
    fn short_segments_have_no_derivatives() {
        let model = builtin_scenario("B").unwrap();
        let cfg = SamplingConfig::default();
        let fields = symmetry_frame_field(&model, &t_nodes(0.0, 1.0, 2), &cfg).unwrap();
        assert!(!fields[0].has_derivatives());
        assert!(matches!(
            morphogenesis_fibre_at_x(&model, &fields[0], 0, &cfg.deformations(), cfg.rel_tol),
            Err(Error::NoFrameDerivative { node: 0 })
        ));
    }

    #[test]
    fn classification_rules() {
        let nodes = t_nodes(0.0, 1.0, 3);
        let flat = DimensionProfile::from_dims(nodes.clone(), vec![1; 3]);
        let fibre = |base_dim| {
            Some(DistributionFibre::from_basis(
                0.0,
                [0.0; 3],
                numkernel::NullspaceBasis::full(10, 1e-8),
                1,
            ))
            .map(|mut f| {
                f.base_dim = base_dim;
                f
            })
        };
        let v = |p: &DimensionProfile, f: &[Option<MorphogenesisFibre>]| classify_morphogenesis(p, f).unwrap().verdict;
        assert_eq!(v(&flat, &[fibre(1), fibre(1), fibre(1)]), MorphogenesisVerdict::NoMorphogenesis);
        assert_eq!(v(&flat, &[fibre(1), fibre(0), fibre(1)]), MorphogenesisVerdict::Morphogenesis);
        assert_eq!(v(&flat, &[fibre(1), None, fibre(1)]), MorphogenesisVerdict::Undetermined);
        let jump = DimensionProfile::from_dims(nodes, vec![3, 1, 1]);
        assert_eq!(v(&jump, &[None, fibre(1), fibre(1)]), MorphogenesisVerdict::Morphogenesis);
        assert!(classify_morphogenesis(&jump, &[None]).is_err());
    }
}
