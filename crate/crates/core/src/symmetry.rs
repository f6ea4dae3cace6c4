//! Infinitesimal material symmetries.
//!
//! A matrix `Λ` generates symmetries of `W` at `(t, X)` when
//! `Σ_{i,l,j} F[i][l] Λ[l][j] ∂W/∂F[i][j] = 0` for every deformation `F`.
//! The condition is imposed on a finite sample of deformations and solved as
//! a nullspace problem over the nine entries of `Λ`.

use nalgebra::{DMatrix, Matrix3};
use rayon::prelude::*;

use crate::numkernel::{self, ConstraintMatrix, KernelError, NullspaceBasis, RowTag, DEFAULT_REL_TOL};
use crate::response::{sample_deformations, EvalError, EvalPoint, ResponseJet, ResponseModel, DEFAULT_DET_FLOOR};
use crate::Error;

/// How deformations are sampled and how ranks are decided.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SamplingConfig {
    pub seed: u64,
    pub samples: usize,
    pub det_floor: f64,
    pub rel_tol: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 40,
            det_floor: DEFAULT_DET_FLOOR,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

impl SamplingConfig {
    pub fn deformations(&self) -> Vec<Matrix3<f64>> {
        sample_deformations(self.seed, self.samples, self.det_floor)
    }
}

/// Response jets at one `(t, x)` for every sampled deformation.
#[derive(Debug, Clone)]
pub struct SampledJets {
    pub t: f64,
    pub x: [f64; 3],
    pub samples: Vec<(Matrix3<f64>, ResponseJet)>,
}

impl SampledJets {
    pub fn new(model: &ResponseModel, t: f64, x: [f64; 3], deformations: &[Matrix3<f64>]) -> Result<Self, EvalError> {
        let samples = deformations
            .iter()
            .map(|f| Ok((*f, model.eval_with_jet(&EvalPoint { t, x, f: *f })?)))
            .collect::<Result<Vec<_>, EvalError>>()?;
        Ok(Self { t, x, samples })
    }

    pub fn components(&self) -> usize {
        self.samples.first().map_or(0, |(_, j)| j.components())
    }

    /// `Fᵀ·∂W_c/∂F` for sample `k`: the linear functional `M ↦ DW_c(F)[F·M]`
    /// written as a matrix paired with `M` in the Frobenius inner product.
    pub fn pullback(&self, k: usize, c: usize) -> Matrix3<f64> {
        let (f, jet) = &self.samples[k];
        f.transpose() * jet.d_f_matrix(c)
    }
}

/// Row-major flattening of a 3×3 matrix, matching the `Λ[l][j]` unknown order.
pub fn flatten(m: &Matrix3<f64>) -> [f64; 9] {
    std::array::from_fn(|k| m[(k / 3, k % 3)])
}

pub fn unflatten(v: &[f64]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| v[3 * i + j])
}

/// Basis of the symmetry Lie algebra at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryAlgebra {
    pub t: f64,
    pub x: [f64; 3],
    /// Nullspace over the nine entries of `Λ`, row-major.
    pub basis: NullspaceBasis,
    pub dim: usize,
}

impl SymmetryAlgebra {
    pub fn element(&self, k: usize) -> Matrix3<f64> {
        unflatten(&self.basis.column(k))
    }

    /// Largest distance of a basis commutator `[Λa, Λb]` from the span.
    pub fn bracket_residual(&self) -> f64 {
        bracket_residual(&self.basis.basis)
    }
}

/// Largest distance from `span(basis)` of the commutators of pairs of its
/// columns, each read as a row-major 3×3 matrix.
pub fn bracket_residual(basis: &DMatrix<f64>) -> f64 {
    let d = basis.ncols();
    let elems: Vec<Matrix3<f64>> = (0..d)
        .map(|k| unflatten(basis.column(k).as_slice()))
        .collect();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in (a + 1)..d {
            let c = elems[a] * elems[b] - elems[b] * elems[a];
            worst = worst.max(numkernel::projection_residual(&flatten(&c), basis));
        }
    }
    worst
}

/// Constraint rows `Fₖᵀ·∂W_c/∂F(Fₖ)` over the nine entries of `Λ`.
pub fn symmetry_constraints(jets: &SampledJets) -> ConstraintMatrix {
    let m = jets.components();
    let mut rows = Vec::with_capacity(jets.samples.len() * m);
    for k in 0..jets.samples.len() {
        for c in 0..m {
            let tag = RowTag {
                sample: k,
                component: c,
                basis: None,
            };
            rows.push((tag, flatten(&jets.pullback(k, c)).to_vec()));
        }
    }
    ConstraintMatrix::from_rows(9, rows)
}

pub fn symmetry_from_jets(jets: &SampledJets, rel_tol: f64) -> Result<SymmetryAlgebra, KernelError> {
    let basis = numkernel::nullspace(&symmetry_constraints(jets), rel_tol)?;
    Ok(SymmetryAlgebra {
        t: jets.t,
        x: jets.x,
        dim: basis.dim,
        basis,
    })
}

/// Symmetry algebra of `model` at `(t, x)` from the given deformation samples.
pub fn symmetry_algebra(
    model: &ResponseModel,
    t: f64,
    x: [f64; 3],
    samples: &[Matrix3<f64>],
    rel_tol: f64,
) -> Result<SymmetryAlgebra, Error> {
    let jets = SampledJets::new(model, t, x, samples)?;
    Ok(symmetry_from_jets(&jets, rel_tol)?)
}

/// Maximal run `start..=end` of grid nodes with the same symmetry dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub dim: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.start..=self.end).contains(&i)
    }
}

/// Symmetry dimension along a one-dimensional sequence of grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionProfile {
    pub nodes: Vec<(f64, [f64; 3])>,
    pub dims: Vec<usize>,
    pub segments: Vec<Segment>,
    /// Adjacent node pairs `(i, i + 1)` where the dimension changes.
    pub boundaries: Vec<(usize, usize)>,
    /// For each boundary, the endpoint with the larger dimension (deduplicated).
    pub jump_nodes: Vec<usize>,
}

impl DimensionProfile {
    pub fn from_dims(nodes: Vec<(f64, [f64; 3])>, dims: Vec<usize>) -> Self {
        assert_eq!(nodes.len(), dims.len());
        let mut segments: Vec<Segment> = Vec::new();
        let mut boundaries = Vec::new();
        for (i, &d) in dims.iter().enumerate() {
            match segments.last_mut() {
                Some(seg) if seg.dim == d => seg.end = i,
                last => {
                    if last.is_some() {
                        boundaries.push((i - 1, i));
                    }
                    segments.push(Segment { start: i, end: i, dim: d });
                }
            }
        }
        let mut jump_nodes: Vec<usize> = boundaries
            .iter()
            .map(|&(a, b)| if dims[a] > dims[b] { a } else { b })
            .collect();
        jump_nodes.dedup();
        Self {
            nodes,
            dims,
            segments,
            boundaries,
            jump_nodes,
        }
    }

    pub fn segment_of(&self, i: usize) -> Option<&Segment> {
        self.segments.iter().find(|s| s.contains(i))
    }

    pub fn is_constant(&self) -> bool {
        self.segments.len() <= 1
    }
}

/// Symmetry algebras at every node, computed independently (in parallel) with
/// one shared set of deformation samples.
pub fn symmetry_algebras(
    model: &ResponseModel,
    nodes: &[(f64, [f64; 3])],
    config: &SamplingConfig,
) -> Result<Vec<SymmetryAlgebra>, Error> {
    let samples = config.deformations();
    nodes
        .par_iter()
        .map(|&(t, x)| symmetry_algebra(model, t, x, &samples, config.rel_tol))
        .collect()
}

/// Per-node symmetry dimensions with segments and jump nodes.
pub fn dimension_profile(
    model: &ResponseModel,
    nodes: &[(f64, [f64; 3])],
    config: &SamplingConfig,
) -> Result<DimensionProfile, Error> {
    let algebras = symmetry_algebras(model, nodes, config)?;
    Ok(DimensionProfile::from_dims(
        nodes.to_vec(),
        algebras.iter().map(|a| a.dim).collect(),
    ))
}
