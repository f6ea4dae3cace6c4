//! Pointwise fibres of the material distributions.
//!
//! The evolution equation
//! `λ·∂W/∂t + Θ^i·∂W/∂x^i + F[i][l] Θ^l_j ∂W/∂F[i][j] = 0`
//! is sampled over deformations and solved for `(λ, Θ¹, Θ², Θ³, Θ^l_j)`.
//! At a fixed particle the body-coordinate block is dropped.

use nalgebra::{DMatrix, Matrix3};

use crate::numkernel::{self, ConstraintMatrix, KernelError, NullspaceBasis, RowTag};
use crate::symmetry::{flatten, SampledJets};
use crate::Error;

/// Unknowns of the full-body systems: `λ, Θ¹, Θ², Θ³` then `Θ^l_j` row-major.
pub const FULL_UNKNOWNS: usize = 13;
/// Unknowns at a fixed particle: `λ` then `Θ^l_j` row-major.
pub const X_UNKNOWNS: usize = 10;

/// Nullspace of a sampled distribution system at one node, with the rank
/// of its projection onto the base block (`λ` and, in full-body systems,
/// `Θ^i`).
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFibre {
    pub t: f64,
    pub x: [f64; 3],
    pub basis: NullspaceBasis,
    pub dim: usize,
    pub base_dim: usize,
    /// Leading coordinates forming the base block (4 or 1).
    pub base_block: usize,
}

/// Fibre of the material distribution (13 unknowns).
pub type EvolutionFibre = DistributionFibre;
/// Fibre of the material distribution at a particle (10 unknowns).
pub type XEvolutionFibre = DistributionFibre;

impl DistributionFibre {
    pub fn from_constraints(
        t: f64,
        x: [f64; 3],
        m: &ConstraintMatrix,
        base_block: usize,
        rel_tol: f64,
    ) -> Result<Self, KernelError> {
        let basis = numkernel::nullspace(m, rel_tol)?;
        Ok(Self::from_basis(t, x, basis, base_block))
    }

    /// The basis columns are orthonormal, so the base block is ranked against
    /// `rel_tol` directly (`σ_max` of the whole basis is 1).
    pub fn from_basis(t: f64, x: [f64; 3], basis: NullspaceBasis, base_block: usize) -> Self {
        let base_dim = numkernel::rank_above(&basis.basis.rows(0, base_block).into_owned(), basis.rel_tol);
        Self {
            t,
            x,
            dim: basis.dim,
            base_dim,
            base_block,
            basis,
        }
    }

    pub fn unknowns(&self) -> usize {
        self.basis.ambient_dim()
    }

    /// The `Θ^l_j` block of basis vector `k` as a matrix.
    pub fn theta(&self, k: usize) -> Matrix3<f64> {
        let off = self.unknowns() - 9;
        Matrix3::from_fn(|i, j| self.basis.basis[(off + 3 * i + j, k)])
    }

    /// Rows `base_block..` of the basis: the `Θ^l_j` parts.
    pub fn theta_block(&self) -> DMatrix<f64> {
        let off = self.unknowns() - 9;
        self.basis.basis.rows(off, 9).into_owned()
    }
}

fn tag(sample: usize, component: usize) -> RowTag {
    RowTag {
        sample,
        component,
        basis: None,
    }
}

/// Rows `[∂W_c/∂t | ∂W_c/∂x | Fᵀ·∂W_c/∂F]` for every sample and component.
pub fn evolution_constraints(jets: &SampledJets) -> ConstraintMatrix {
    let m = jets.components();
    let mut rows = Vec::with_capacity(jets.samples.len() * m);
    for (k, (_, jet)) in jets.samples.iter().enumerate() {
        for c in 0..m {
            let mut row = Vec::with_capacity(FULL_UNKNOWNS);
            row.push(jet.d_t[c]);
            row.extend((0..3).map(|i| jet.d_x[(c, i)]));
            row.extend(flatten(&jets.pullback(k, c)));
            rows.push((tag(k, c), row));
        }
    }
    ConstraintMatrix::from_rows(FULL_UNKNOWNS, rows)
}

/// Rows `[∂W_c/∂t | Fᵀ·∂W_c/∂F]`.
pub fn x_evolution_constraints(jets: &SampledJets) -> ConstraintMatrix {
    let m = jets.components();
    let mut rows = Vec::with_capacity(jets.samples.len() * m);
    for (k, (_, jet)) in jets.samples.iter().enumerate() {
        for c in 0..m {
            let mut row = Vec::with_capacity(X_UNKNOWNS);
            row.push(jet.d_t[c]);
            row.extend(flatten(&jets.pullback(k, c)));
            rows.push((tag(k, c), row));
        }
    }
    ConstraintMatrix::from_rows(X_UNKNOWNS, rows)
}

pub fn evolution_from_jets(jets: &SampledJets, rel_tol: f64) -> Result<EvolutionFibre, KernelError> {
    DistributionFibre::from_constraints(jets.t, jets.x, &evolution_constraints(jets), 4, rel_tol)
}

pub fn x_evolution_from_jets(jets: &SampledJets, rel_tol: f64) -> Result<XEvolutionFibre, KernelError> {
    DistributionFibre::from_constraints(jets.t, jets.x, &x_evolution_constraints(jets), 1, rel_tol)
}

pub fn evolution_fibre(
    model: &crate::ResponseModel,
    t: f64,
    x: [f64; 3],
    samples: &[Matrix3<f64>],
    rel_tol: f64,
) -> Result<EvolutionFibre, Error> {
    let jets = SampledJets::new(model, t, x, samples)?;
    Ok(evolution_from_jets(&jets, rel_tol)?)
}

pub fn evolution_fibre_at_x(
    model: &crate::ResponseModel,
    t: f64,
    x: [f64; 3],
    samples: &[Matrix3<f64>],
    rel_tol: f64,
) -> Result<XEvolutionFibre, Error> {
    let jets = SampledJets::new(model, t, x, samples)?;
    Ok(x_evolution_from_jets(&jets, rel_tol)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolutionVerdict {
    SmoothRemodeling,
    SmoothAging,
    Mixed,
}

impl EvolutionVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SmoothRemodeling => "smooth-remodeling",
            Self::SmoothAging => "smooth-aging",
            Self::Mixed => "mixed",
        }
    }

    /// `None` for an empty profile.
    pub fn from_base_dims(base_dims: impl IntoIterator<Item = usize>) -> Option<Self> {
        let (mut ones, mut zeros, mut n) = (0, 0, 0);
        for b in base_dims {
            n += 1;
            match b {
                0 => zeros += 1,
                1 => ones += 1,
                _ => {}
            }
        }
        match n {
            0 => None,
            _ if ones == n => Some(Self::SmoothRemodeling),
            _ if zeros == n => Some(Self::SmoothAging),
            _ => Some(Self::Mixed),
        }
    }
}

impl std::fmt::Display for EvolutionVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Remodeling when `λ` is reachable at every node, aging when at none.
pub fn classify_evolution(profile: &[XEvolutionFibre]) -> Option<EvolutionVerdict> {
    EvolutionVerdict::from_base_dims(profile.iter().map(|f| f.base_dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::builtin_scenario;
    use crate::symmetry::SamplingConfig;

    fn x_fibre(name: &str, t: f64) -> XEvolutionFibre {
        let cfg = SamplingConfig::default();
        evolution_fibre_at_x(&builtin_scenario(name).unwrap(), t, [0.0; 3], &cfg.deformations(), cfg.rel_tol).unwrap()
    }

    #[test]
    fn scenario_d_remodels_with_volume_change() {
        let f = x_fibre("D", 0.4);
        assert_eq!((f.dim, f.base_dim), (4, 1));
        // Θ_sym = -λ I for every fibre vector
        for k in 0..f.dim {
            let th = f.theta(k);
            let sym = (th + th.transpose()) / 2.0;
            let lambda = f.basis.basis[(0, k)];
            assert!((sym + Matrix3::identity() * lambda).norm() < 1e-8);
        }
    }

    #[test]
    fn scenario_b_ages() {
        for t in [-1.0, 0.0, 0.35] {
            let f = x_fibre("B", t);
            assert_eq!((f.dim, f.base_dim), (3, 0), "t = {t}");
        }
    }

    #[test]
    fn scenario_a_full_body() {
        let cfg = SamplingConfig::default();
        let f = evolution_fibre(&builtin_scenario("A").unwrap(), 0.0, [0.0; 3], &cfg.deformations(), cfg.rel_tol).unwrap();
        assert_eq!((f.dim, f.base_dim), (4, 4));
        assert_eq!(x_fibre("A", 0.0).base_dim, 1);
    }

    #[test]
    fn scenario_e_full_body() {
        let cfg = SamplingConfig::default();
        let f = evolution_fibre(&builtin_scenario("E").unwrap(), 0.0, [0.3, 0.0, 0.0], &cfg.deformations(), cfg.rel_tol)
            .unwrap();
        assert_eq!((f.dim, f.base_dim), (7, 4));
    }

    #[test]
    fn verdicts() {
        use EvolutionVerdict::*;
        assert_eq!(EvolutionVerdict::from_base_dims([1, 1, 1]), Some(SmoothRemodeling));
        assert_eq!(EvolutionVerdict::from_base_dims([0, 0]), Some(SmoothAging));
        assert_eq!(EvolutionVerdict::from_base_dims([0, 1]), Some(Mixed));
        assert_eq!(EvolutionVerdict::from_base_dims([]), None);
    }
}
