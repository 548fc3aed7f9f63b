#![allow(dead_code)]

use manitrans_core::flag_grassmann::{flag_horizontal_project, FlagSignature};
use manitrans_core::stiefel::{project_tangent, StiefelPoint};
use manitrans_core::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
    Mat::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

pub fn skew(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let g = gauss(rng, n, n);
    (&g - g.transpose()) * 0.5
}

/// Orthonormal columns from QR with a positive-diagonal `R`.
pub fn orthonormal(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Mat {
    let qr = gauss(rng, n, d).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q.columns(0, d).into_owned();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn rotation(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let mut q = orthonormal(rng, n, n);
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// `I + 0.3 G`, redrawn until the determinant is positive.
pub fn gl_plus(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    loop {
        let x = Mat::identity(n, n) + gauss(rng, n, n) * 0.3;
        if x.determinant() > 0.1 {
            return x;
        }
    }
}

pub fn stiefel_point(rng: &mut ChaCha8Rng, n: usize, d: usize) -> StiefelPoint {
    StiefelPoint::new(orthonormal(rng, n, d)).unwrap()
}

pub fn stiefel_tangent(rng: &mut ChaCha8Rng, y: &StiefelPoint) -> Mat {
    project_tangent(y, &gauss(rng, y.n(), y.d())).unwrap()
}

pub fn flag_tangent(rng: &mut ChaCha8Rng, sig: &FlagSignature, y: &StiefelPoint) -> Mat {
    flag_horizontal_project(sig, y, &gauss(rng, y.n(), y.d())).unwrap()
}

pub fn rel_err(a: &Mat, b: &Mat) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn grid(t_end: f64, steps: usize) -> Vec<f64> {
    (1..=steps)
        .map(|i| t_end * i as f64 / steps as f64)
        .collect()
}
