//! Seeded sampling of deformation gradients `F = I + U`.

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default lower bound on `|det F|` for sampled deformations.
pub const DEFAULT_DET_FLOOR: f64 = 0.2;

const MAX_ATTEMPTS: usize = 1000;
const MAX_HALVINGS: usize = 64;

/// `count` deformations `I + U` with entries of `U` uniform in `[-0.5, 0.5]`,
/// rejecting candidates with `|det| < det_floor`. Identical inputs give
/// identical output.
pub fn sample_deformations(seed: u64, count: usize, det_floor: f64) -> Vec<Matrix3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_deformations_with(|| Matrix3::from_fn(|_, _| rng.gen_range(-0.5..=0.5)), count, det_floor)
}

/// Same as [`sample_deformations`] with a caller-supplied perturbation source.
///
/// After `MAX_ATTEMPTS` rejected candidates the last perturbation is halved
/// until the determinant floor is met; the identity is the final fallback.
pub fn sample_deformations_with(
    mut perturbation: impl FnMut() -> Matrix3<f64>,
    count: usize,
    det_floor: f64,
) -> Vec<Matrix3<f64>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut accepted = None;
        let mut last = Matrix3::zeros();
        for _ in 0..MAX_ATTEMPTS {
            last = perturbation();
            let f = Matrix3::identity() + last;
            if f.determinant().abs() >= det_floor {
                accepted = Some(f);
                break;
            }
        }
        let f = accepted.unwrap_or_else(|| {
            let mut u = last;
            for _ in 0..MAX_HALVINGS {
                u *= 0.5;
                let f = Matrix3::identity() + u;
                if f.determinant().abs() >= det_floor {
                    return f;
                }
            }
            Matrix3::identity()
        });
        out.push(f);
    }
    out
}
