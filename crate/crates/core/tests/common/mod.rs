//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use morpho_core::groupoid::{FiniteGroup, FiniteGroupoid, Subgroupoid};
use morpho_core::response::{sample_deformations, EvalPoint, ResponseModel};
use nalgebra::{DMatrix, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_points(seed: u64, n: usize) -> Vec<EvalPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_deformations(seed ^ 0x5eed, n, 0.2)
        .into_iter()
        .map(|f| EvalPoint {
            t: rng.gen_range(-1.0..1.0),
            x: [0; 3].map(|_| rng.gen_range(-1.0..1.0)),
            f,
        })
        .collect()
}

/// All 13 partials of every component by central differences of the value.
pub fn fd_gradient(model: &ResponseModel, p: &EvalPoint, h: f64) -> Vec<[f64; 13]> {
    let shifted = |k: usize, s: f64| {
        let mut q = *p;
        match k {
            0 => q.t += s,
            1..=3 => q.x[k - 1] += s,
            _ => q.f[((k - 4) / 3, (k - 4) % 3)] += s,
        }
        model.eval_with_jet(&q).unwrap().value
    };
    let m = model.component_count();
    let mut out = vec![[0.0; 13]; m];
    for k in 0..13 {
        let d = (shifted(k, h) - shifted(k, -h)) / (2.0 * h);
        for c in 0..m {
            out[c][k] = d[c];
        }
    }
    out
}

/// Largest relative error between forward-mode and finite-difference
/// gradients, per component measured against the gradient's sup norm.
pub fn jet_fd_error(model: &ResponseModel, p: &EvalPoint, h: f64) -> f64 {
    let jet = model.eval_with_jet(p).unwrap();
    let fd = fd_gradient(model, p, h);
    let mut worst: f64 = 0.0;
    for (c, fdc) in fd.iter().enumerate() {
        let mut ad = [0.0; 13];
        ad[0] = jet.d_t[c];
        for k in 0..3 {
            ad[1 + k] = jet.d_x[(c, k)];
        }
        for k in 0..9 {
            ad[4 + k] = jet.d_f[(c, k)];
        }
        let scale = ad.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let diff = ad.iter().zip(fdc).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        worst = worst.max(if scale > 0.0 { diff / scale } else { diff });
    }
    worst
}

fn e(i: usize, j: usize) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    m[(i, j)] = 1.0;
    m
}

fn columns(ms: &[Matrix3<f64>]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(9, ms.len());
    for (b, m) in ms.iter().enumerate() {
        let m = m / m.norm();
        for k in 0..9 {
            out[(k, b)] = m[(k / 3, k % 3)];
        }
    }
    out
}

/// Orthonormal basis of skew-symmetric matrices (row-major flattening).
pub fn skew_span() -> DMatrix<f64> {
    columns(&[e(0, 1) - e(1, 0), e(0, 2) - e(2, 0), e(1, 2) - e(2, 1)])
}

/// Rotations about `e3`.
pub fn e3_rotation_span() -> DMatrix<f64> {
    columns(&[e(0, 1) - e(1, 0)])
}

/// Orthonormal basis of trace-free matrices.
pub fn trace_free_span() -> DMatrix<f64> {
    let mut ms = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                ms.push(e(i, j));
            }
        }
    }
    ms.push(e(0, 0) - e(1, 1));
    ms.push(e(0, 0) + e(1, 1) - e(2, 2) * 2.0);
    columns(&ms)
}

/// `so(3) ⊕ R·I`.
pub fn skew_plus_identity_span() -> DMatrix<f64> {
    columns(&[e(0, 1) - e(1, 0), e(0, 2) - e(2, 0), e(1, 2) - e(2, 1), Matrix3::identity()])
}

/// Sine of the largest principal angle between two spans of equal dimension,
/// from plain SVDs.
pub fn max_angle_sin(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.ncols(), b.ncols(), "dimensions differ");
    if a.ncols() == 0 {
        return 0.0;
    }
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let resid = &qa - &qb * (qb.transpose() * &qa);
    resid.singular_values().max()
}

pub fn t_nodes(lo: f64, hi: f64, n: usize) -> Vec<(f64, [f64; 3])> {
    (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            (lo * (1.0 - s) + hi * s, [0.0; 3])
        })
        .collect()
}

/// Decodes a trivial-groupoid arrow name `y<-x:a` into `(target, source, a)`.
pub fn decode(g: &FiniteGroupoid, arrow: usize) -> (String, String, usize) {
    let name = g.arrow_name(arrow);
    let (ends, a) = name.rsplit_once(':').unwrap();
    let (y, x) = ends.split_once("<-").unwrap();
    (y.to_string(), x.to_string(), a.parse().unwrap())
}

/// Group elements labelling the loops of `sub` at object `x`.
pub fn isotropy_elements(g: &FiniteGroupoid, sub: &Subgroupoid, x: usize) -> BTreeSet<usize> {
    let name = g.object_name(x).to_string();
    sub.arrows
        .iter()
        .map(|&a| decode(g, a))
        .filter(|(y, s, _)| *y == name && *s == name)
        .map(|(_, _, a)| a)
        .collect()
}

/// Group-theoretic normalizer of `s` in `group`, by multiplication tables.
pub fn normalizer(group: &FiniteGroup, s: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..group.order())
        .filter(|&a| {
            let conj: BTreeSet<usize> = s.iter().map(|&h| group.mul(group.mul(a, h), group.inv(a))).collect();
            conj == *s
        })
        .collect()
}

pub fn is_normal_subgroup(group: &FiniteGroup, s: &BTreeSet<usize>) -> bool {
    normalizer(group, s).len() == group.order()
}
