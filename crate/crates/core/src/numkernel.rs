//! Dense small-matrix kernels: rank-revealing nullspaces, Procrustes
//! alignment of subspace bases and finite differences of matrix fields.
//!
//! Matrices here are tiny (at most a few hundred rows, at most 13 columns),
//! so a one-sided Jacobi singular value decomposition is used throughout.

use nalgebra::DMatrix;
use thiserror::Error;

/// Default relative rank threshold.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("matrix has non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("relative tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("basis dimension mismatch: previous {prev}, current {cur}")]
    DimensionMismatch { prev: usize, cur: usize },
    #[error("finite differences need at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("field entries have inconsistent shapes")]
    ShapeMismatch,
}

/// Which sample, response component and (optionally) symmetry basis element
/// produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowTag {
    pub sample: usize,
    pub component: usize,
    pub basis: Option<usize>,
}

/// A sampled linear system `M v = 0` with row provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix {
    pub entries: DMatrix<f64>,
    pub rows: Vec<RowTag>,
}

impl ConstraintMatrix {
    pub fn with_columns(q: usize) -> Self {
        Self {
            entries: DMatrix::zeros(0, q),
            rows: Vec::new(),
        }
    }

    pub fn from_rows(q: usize, rows: Vec<(RowTag, Vec<f64>)>) -> Self {
        let mut entries = DMatrix::zeros(rows.len(), q);
        let mut tags = Vec::with_capacity(rows.len());
        for (r, (tag, values)) in rows.into_iter().enumerate() {
            assert_eq!(values.len(), q, "row width");
            for (c, v) in values.into_iter().enumerate() {
                entries[(r, c)] = v;
            }
            tags.push(tag);
        }
        Self { entries, rows: tags }
    }

    pub fn columns(&self) -> usize {
        self.entries.ncols()
    }
}

/// Orthonormal basis of the numerical kernel of a constraint matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct NullspaceBasis {
    /// `q × dim`, orthonormal columns.
    pub basis: DMatrix<f64>,
    pub dim: usize,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    /// Absolute threshold `rel_tol · σ_max` used for the rank decision.
    pub threshold: f64,
    pub rel_tol: f64,
}

impl NullspaceBasis {
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Full space `R^q` with the canonical basis.
    pub fn full(q: usize, rel_tol: f64) -> Self {
        Self {
            basis: DMatrix::identity(q, q),
            dim: q,
            singular_values: Vec::new(),
            threshold: 0.0,
            rel_tol,
        }
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.basis.column(k).iter().copied().collect()
    }
}

/// Thin singular value decomposition `A = U Σ Vᵀ` from one-sided Jacobi.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `p × q`; columns for zero singular values are zero.
    pub u: DMatrix<f64>,
    /// Descending.
    pub sigma: Vec<f64>,
    /// `q × q` orthogonal.
    pub v: DMatrix<f64>,
}

/// One-sided (Hestenes) Jacobi SVD. Columns of the working copy are rotated
/// pairwise until mutually orthogonal; rotations accumulate into `V`.
pub fn jacobi_svd(m: &DMatrix<f64>) -> Svd {
    let (p, q) = m.shape();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(q, q);
    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..q {
            for j in (i + 1)..q {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for r in 0..p {
                    let (x, y) = (a[(r, i)], a[(r, j)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..p {
                    let (x, y) = (a[(r, i)], a[(r, j)]);
                    a[(r, i)] = c * x - s * y;
                    a[(r, j)] = s * x + c * y;
                }
                for r in 0..q {
                    let (x, y) = (v[(r, i)], v[(r, j)]);
                    v[(r, i)] = c * x - s * y;
                    v[(r, j)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..q).map(|k| a.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let mut u = DMatrix::zeros(p, q);
    let mut v_sorted = DMatrix::zeros(q, q);
    let mut sigma = Vec::with_capacity(q);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        if s > 0.0 {
            u.set_column(dst, &(a.column(src) / s));
        }
        v_sorted.set_column(dst, &v.column(src));
    }
    Svd { u, sigma, v: v_sorted }
}

fn check_finite(m: &DMatrix<f64>) -> Result<(), KernelError> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if !m[(r, c)].is_finite() {
                return Err(KernelError::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Numerical kernel of `m`: right singular vectors whose singular value is
/// at most `rel_tol · σ_max`. A zero (or empty) matrix has the whole space
/// as kernel.
pub fn nullspace(m: &ConstraintMatrix, rel_tol: f64) -> Result<NullspaceBasis, KernelError> {
    nullspace_of(&m.entries, rel_tol)
}

pub fn nullspace_of(m: &DMatrix<f64>, rel_tol: f64) -> Result<NullspaceBasis, KernelError> {
    if !(rel_tol > 0.0) {
        return Err(KernelError::BadTolerance(rel_tol));
    }
    check_finite(m)?;
    let q = m.ncols();
    let svd = jacobi_svd(m);
    let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        let mut full = NullspaceBasis::full(q, rel_tol);
        full.singular_values = svd.sigma;
        return Ok(full);
    }
    let threshold = rel_tol * sigma_max;
    let first_null = svd.sigma.iter().position(|&s| s <= threshold).unwrap_or(q);
    let basis = svd.v.columns(first_null, q - first_null).into_owned();
    Ok(NullspaceBasis {
        dim: q - first_null,
        basis,
        singular_values: svd.sigma,
        threshold,
        rel_tol,
    })
}

/// Numerical rank of `m` with singular values compared against an absolute
/// threshold.
pub fn rank_above(m: &DMatrix<f64>, threshold: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    jacobi_svd(m).sigma.iter().filter(|&&s| s > threshold).count()
}

/// Orthonormal basis of the column span of `m`, dropping directions with
/// singular value at most `rel_tol · σ_max`.
pub fn orthonormal_span(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let svd = jacobi_svd(m);
    let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
    let rank = svd.sigma.iter().filter(|&&s| s > rel_tol * sigma_max && s > 0.0).count();
    svd.u.columns(0, rank).into_owned()
}

/// Rotates `cur` within its span to best match `prev` in Frobenius norm
/// (orthogonal Procrustes): returns `cur·Q` with `Q = U Vᵀ` from the SVD of
/// `curᵀ·prev`.
pub fn align_basis(prev: &NullspaceBasis, cur: &NullspaceBasis) -> Result<NullspaceBasis, KernelError> {
    let basis = align_columns(&prev.basis, &cur.basis)?;
    Ok(NullspaceBasis {
        basis,
        ..cur.clone()
    })
}

pub fn align_columns(prev: &DMatrix<f64>, cur: &DMatrix<f64>) -> Result<DMatrix<f64>, KernelError> {
    if prev.ncols() != cur.ncols() || prev.nrows() != cur.nrows() {
        return Err(KernelError::DimensionMismatch {
            prev: prev.ncols(),
            cur: cur.ncols(),
        });
    }
    if cur.ncols() == 0 {
        return Ok(cur.clone());
    }
    let cross = cur.transpose() * prev;
    let svd = cross.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested Vt"));
    Ok(cur * (u * v_t))
}

/// Derivative of a matrix field sampled on a uniform grid with spacing `h`:
/// central differences inside, second-order one-sided at both ends.
pub fn fd_derivative(field: &[DMatrix<f64>], h: f64) -> Result<Vec<DMatrix<f64>>, KernelError> {
    let n = field.len();
    if n < 3 {
        return Err(KernelError::TooFewNodes(n));
    }
    let shape = field[0].shape();
    if field.iter().any(|f| f.shape() != shape) {
        return Err(KernelError::ShapeMismatch);
    }
    let mut out = Vec::with_capacity(n);
    out.push((&field[1] * 4.0 - &field[0] * 3.0 - &field[2]) / (2.0 * h));
    for i in 1..n - 1 {
        out.push((&field[i + 1] - &field[i - 1]) / (2.0 * h));
    }
    out.push((&field[n - 1] * 3.0 - &field[n - 2] * 4.0 + &field[n - 3]) / (2.0 * h));
    Ok(out)
}

/// Distance of `v` from the span of the orthonormal columns of `basis`.
pub fn projection_residual(v: &[f64], basis: &DMatrix<f64>) -> f64 {
    let v = nalgebra::DVector::from_column_slice(v);
    if basis.ncols() == 0 {
        return v.norm();
    }
    let coeffs = basis.transpose() * &v;
    (v - basis * coeffs).norm()
}

/// Principal angles (ascending) between the spans of two orthonormal bases.
///
/// Cosines come from `aᵀb` and sines from the residual of `a` against
/// `span(b)`, so small angles are resolved to machine precision.
pub fn principal_angles(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let k = a.ncols().min(b.ncols());
    if k == 0 {
        return Vec::new();
    }
    let (small, large) = if a.ncols() <= b.ncols() { (a, b) } else { (b, a) };
    let cos = jacobi_svd(&(small.transpose() * large)).sigma;
    let residual = small - large * (large.transpose() * small);
    let mut sin = jacobi_svd(&residual).sigma;
    sin.reverse();
    (0..k)
        .map(|i| sin[i].min(1.0).atan2(cos[i].min(1.0)))
        .collect()
}

/// Largest principal angle, or 0 for empty bases.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    principal_angles(a, b).into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, p: usize, q: usize) -> DMatrix<f64> {
        DMatrix::from_fn(p, q, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
        random_matrix(rng, d, d).qr().q()
    }

    #[test]
    fn jacobi_matches_reference_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(p, q) in &[(6, 4), (30, 13), (13, 13), (3, 5)] {
            let m = random_matrix(&mut rng, p, q);
            let ours = jacobi_svd(&m);
            let mut reference: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
            reference.sort_by(|a, b| b.total_cmp(a));
            for (i, r) in reference.iter().enumerate() {
                assert_relative_eq!(ours.sigma[i], *r, epsilon = 1e-12, max_relative = 1e-12);
            }
            let vtv = ours.v.transpose() * &ours.v;
            assert_relative_eq!(vtv, DMatrix::identity(q, q), epsilon = 1e-13);
            let recon = &ours.u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(ours.sigma.clone())) * ours.v.transpose();
            assert_relative_eq!(recon, m, epsilon = 1e-12);
        }
    }

    #[test]
    fn kernel_of_projection() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let ns = nullspace_of(&m, DEFAULT_REL_TOL).unwrap();
        assert_eq!(ns.dim, 1);
        assert_relative_eq!(ns.basis[(2, 0)].abs(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let ns = nullspace_of(&DMatrix::zeros(2, 3), DEFAULT_REL_TOL).unwrap();
        assert_eq!(ns.dim, 3);
        let empty = nullspace(&ConstraintMatrix::with_columns(4), DEFAULT_REL_TOL).unwrap();
        assert_eq!(empty.dim, 4);
    }

    #[test]
    fn equal_columns_give_difference_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut m = random_matrix(&mut rng, 6, 4);
        let col = m.column(2).into_owned();
        m.set_column(3, &col);
        let ns = nullspace_of(&m, DEFAULT_REL_TOL).unwrap();
        assert!(ns.dim >= 1);
        let s = 1.0 / 2f64.sqrt();
        assert!(projection_residual(&[0.0, 0.0, s, -s], &ns.basis) < 1e-12);
        assert!((m * &ns.basis).norm() <= DEFAULT_REL_TOL * ns.singular_values[0] * (ns.dim as f64).sqrt());
    }

    #[test]
    fn non_finite_and_bad_tolerance_rejected() {
        let mut m = DMatrix::zeros(2, 2);
        m[(1, 0)] = f64::NAN;
        assert_eq!(nullspace_of(&m, 1e-8), Err(KernelError::NonFinite { row: 1, col: 0 }));
        assert_eq!(nullspace_of(&DMatrix::zeros(1, 1), 0.0), Err(KernelError::BadTolerance(0.0)));
    }

    #[test]
    fn align_recovers_rotated_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let prev = random_matrix(&mut rng, 9, 3).qr().q();
        let q0 = random_orthogonal(&mut rng, 3);
        let cur = &prev * q0;
        let aligned = align_columns(&prev, &cur).unwrap();
        assert_relative_eq!(aligned, prev.clone(), epsilon = 1e-10);
        assert_relative_eq!(align_columns(&prev, &prev).unwrap(), prev, epsilon = 1e-14);
    }

    #[test]
    fn align_is_stable_under_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let prev = random_matrix(&mut rng, 9, 3).qr().q();
        let eps = 1e-4;
        let noise = random_matrix(&mut rng, 9, 3) * eps;
        let cur_span = orthonormal_span(&(&prev + noise), 1e-12);
        let rotated = &cur_span * random_orthogonal(&mut rng, 3);
        let aligned = align_columns(&prev, &rotated).unwrap();
        assert!((aligned - &prev).norm() <= 10.0 * eps * 3.0);
    }

    #[test]
    fn align_preserves_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let prev = random_matrix(&mut rng, 13, 4).qr().q();
        let cur = random_matrix(&mut rng, 13, 4).qr().q();
        let aligned = align_columns(&prev, &cur).unwrap();
        assert!(max_principal_angle(&aligned, &cur) < 1e-10);
    }

    #[test]
    fn align_rejects_dimension_jump() {
        let a = DMatrix::<f64>::identity(9, 2);
        let b = DMatrix::<f64>::identity(9, 3);
        assert!(matches!(align_columns(&a, &b), Err(KernelError::DimensionMismatch { prev: 2, cur: 3 })));
    }

    #[test]
    fn fd_constant_linear_and_smooth() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 3.0]);
        let h = 0.01;
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * h).collect();
        let constant: Vec<_> = grid.iter().map(|_| b.clone()).collect();
        for d in fd_derivative(&constant, h).unwrap() {
            assert!(d.norm() < 1e-12);
        }
        let linear: Vec<_> = grid.iter().map(|&t| &b * t).collect();
        for d in fd_derivative(&linear, h).unwrap() {
            assert_relative_eq!(d, b.clone(), epsilon = 1e-12);
        }
        let sine: Vec<_> = grid.iter().map(|&t| &b * t.sin()).collect();
        let max_err = fd_derivative(&sine, h)
            .unwrap()
            .iter()
            .zip(&grid)
            .map(|(d, &t)| (d - &b * t.cos()).amax())
            .fold(0.0, f64::max);
        assert!(max_err <= 1e-4 * b.norm(), "max error {max_err}");
        assert_eq!(fd_derivative(&constant[..2], h), Err(KernelError::TooFewNodes(2)));
    }

    #[test]
    fn principal_angles_resolve_small_rotations() {
        let a = DMatrix::<f64>::identity(3, 1);
        let theta: f64 = 1e-9;
        let b = DMatrix::from_column_slice(3, 1, &[theta.cos(), theta.sin(), 0.0]);
        assert_relative_eq!(principal_angles(&a, &b)[0], theta, max_relative = 1e-6);
        let c = DMatrix::from_column_slice(3, 1, &[0.0, 0.0, 1.0]);
        assert_relative_eq!(principal_angles(&a, &c)[0], std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn kernel_dim_invariant_under_row_scaling_and_duplication(
            seed in 0u64..1000, scale in 1e-3f64..1e3, rank in 1usize..6,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, 20, rank) * random_matrix(&mut rng, rank, 9);
            let base = nullspace_of(&m, DEFAULT_REL_TOL).unwrap();
            proptest::prop_assert_eq!(base.dim, 9 - rank);
            let scaled = nullspace_of(&(&m * scale), DEFAULT_REL_TOL).unwrap();
            proptest::prop_assert_eq!(scaled.dim, base.dim);
            let doubled = DMatrix::from_fn(40, 9, |r, c| m[(r % 20, c)]);
            proptest::prop_assert_eq!(nullspace_of(&doubled, DEFAULT_REL_TOL).unwrap().dim, base.dim);
        }
    }
}
