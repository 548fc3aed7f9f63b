//! Matrix exponential and the exponential action `exp(t·L)·B` of a linear
//! operator `L` acting on a matrix space, by scaled truncated Taylor series.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{dim_err, invalid, Error, Result};
use crate::mat::{ensure_finite, ensure_square, norm1, Mat};

/// A linear operator on `ℝ^{rows×cols}` given in matrix-free form.
pub trait LinearOperator {
    /// Shape `(rows, cols)` of the matrices the operator acts on.
    fn shape(&self) -> (usize, usize);

    fn apply(&self, x: &Mat) -> Mat;

    /// Adjoint under the Frobenius pairing `⟨x, y⟩ = Tr(x yᵀ)`.
    fn apply_adjoint(&self, y: &Mat) -> Mat;

    /// An upper bound on the operator 1-norm in the vectorized standard basis.
    fn one_norm_bound(&self) -> f64;
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn shape(&self) -> (usize, usize) {
        (**self).shape()
    }
    fn apply(&self, x: &Mat) -> Mat {
        (**self).apply(x)
    }
    fn apply_adjoint(&self, y: &Mat) -> Mat {
        (**self).apply_adjoint(y)
    }
    fn one_norm_bound(&self) -> f64 {
        (**self).one_norm_bound()
    }
}

type MatFn<'a> = Box<dyn Fn(&Mat) -> Mat + Send + Sync + 'a>;

/// Closure-backed operator.
pub struct FnOperator<'a> {
    shape: (usize, usize),
    apply: MatFn<'a>,
    adjoint: MatFn<'a>,
    bound: f64,
}

impl<'a> FnOperator<'a> {
    pub fn new<F, G>(shape: (usize, usize), apply: F, adjoint: G, bound: f64) -> Self
    where
        F: Fn(&Mat) -> Mat + Send + Sync + 'a,
        G: Fn(&Mat) -> Mat + Send + Sync + 'a,
    {
        Self {
            shape,
            apply: Box::new(apply),
            adjoint: Box::new(adjoint),
            bound,
        }
    }

    /// Builds the operator and sets its bound to the exact vectorized 1-norm.
    pub fn with_exact_norm<F, G>(shape: (usize, usize), apply: F, adjoint: G) -> Result<Self>
    where
        F: Fn(&Mat) -> Mat + Send + Sync + 'a,
        G: Fn(&Mat) -> Mat + Send + Sync + 'a,
    {
        let mut op = Self::new(shape, apply, adjoint, f64::INFINITY);
        op.bound = one_norm_exhaustive(&op)?;
        Ok(op)
    }

    pub fn zero(shape: (usize, usize)) -> Self {
        let z = move |_: &Mat| Mat::zeros(shape.0, shape.1);
        Self::new(shape, z, z, 0.0)
    }

    pub fn identity(shape: (usize, usize)) -> Self {
        Self::new(shape, |x: &Mat| x.clone(), |x: &Mat| x.clone(), 1.0)
    }

    pub fn set_bound(&mut self, bound: f64) {
        self.bound = bound;
    }
}

impl LinearOperator for FnOperator<'_> {
    fn shape(&self) -> (usize, usize) {
        self.shape
    }
    fn apply(&self, x: &Mat) -> Mat {
        (self.apply)(x)
    }
    fn apply_adjoint(&self, y: &Mat) -> Mat {
        (self.adjoint)(y)
    }
    fn one_norm_bound(&self) -> f64 {
        self.bound
    }
}

/// Adjoint view of an operator; its bound is the ∞-norm dual of the original,
/// which we do not know, so the exhaustive norm is used when small enough.
pub struct Adjoint<'a, L: LinearOperator + ?Sized> {
    inner: &'a L,
    bound: f64,
}

impl<'a, L: LinearOperator + ?Sized> Adjoint<'a, L> {
    pub fn new(inner: &'a L) -> Result<Self> {
        let mut adj = Self {
            inner,
            bound: f64::INFINITY,
        };
        adj.bound = one_norm_exhaustive(&adj)?;
        Ok(adj)
    }
}

impl<L: LinearOperator + ?Sized> LinearOperator for Adjoint<'_, L> {
    fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }
    fn apply(&self, x: &Mat) -> Mat {
        self.inner.apply_adjoint(x)
    }
    fn apply_adjoint(&self, y: &Mat) -> Mat {
        self.inner.apply(y)
    }
    fn one_norm_bound(&self) -> f64 {
        self.bound
    }
}

// ---------------------------------------------------------------------------
// Dense matrix exponential: Padé scaling and squaring (Higham 2005).

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const PADE_THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152e0;

fn pade_low(a: &Mat, b: &[f64]) -> (Mat, Mat) {
    let n = a.nrows();
    let a2 = a * a;
    let mut u = Mat::identity(n, n) * b[1];
    let mut v = Mat::identity(n, n) * b[0];
    let mut pow = Mat::identity(n, n);
    for j in 1..b.len() / 2 {
        pow = &pow * &a2;
        u += &pow * b[2 * j + 1];
        v += &pow * b[2 * j];
    }
    (a * u, v)
}

fn pade13(a: &Mat) -> (Mat, Mat) {
    let n = a.nrows();
    let b = &PADE13;
    let id = Mat::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    (u, v)
}

fn pade_solve(u: Mat, v: Mat) -> Result<Mat> {
    let p = &v + &u;
    let q = v - u;
    q.lu().solve(&p).ok_or(Error::Singular)
}

/// Dense matrix exponential of a square matrix.
pub fn matrix_exponential(m: &Mat) -> Result<Mat> {
    ensure_square(m, "matrix_exponential input")?;
    ensure_finite(m, "matrix_exponential input")?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    if n == 1 {
        return Ok(Mat::from_element(1, 1, libm::exp(m[(0, 0)])));
    }
    let norm = norm1(m);
    for (order, theta) in PADE_THETA {
        if norm <= theta {
            let coeffs: &[f64] = match order {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_low(m, coeffs);
            return pade_solve(u, v);
        }
    }
    let squarings = if norm > THETA13 {
        libm::ceil(libm::log2(norm / THETA13)) as i32
    } else {
        0
    };
    let scaled = m * libm::pow(2.0, -f64::from(squarings));
    let (u, v) = pade13(&scaled);
    let mut e = pade_solve(u, v)?;
    for _ in 0..squarings {
        e = &e * &e;
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Taylor parameters for the exponential action.

/// Target accuracy of the truncated Taylor series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Single,
    Double,
}

/// Taylor order and scaling count for `(T_m(L/s))^s B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaylorParams {
    pub m_star: usize,
    pub s: usize,
}

// θ_m for unit roundoff 2^-53: m = 1..30 from Higham, "Functions of Matrices"
// table A.3, m = 35..55 from Al-Mohy & Higham (2011) table 3.1, the same
// values scipy's expm_multiply uses.
const THETA_DOUBLE: [(usize, f64); 35] = [
    (1, 2.29e-16),
    (2, 2.58e-8),
    (3, 1.39e-5),
    (4, 3.40e-4),
    (5, 2.40e-3),
    (6, 9.07e-3),
    (7, 2.38e-2),
    (8, 5.00e-2),
    (9, 8.96e-2),
    (10, 1.44e-1),
    (11, 2.14e-1),
    (12, 3.00e-1),
    (13, 4.00e-1),
    (14, 5.14e-1),
    (15, 6.41e-1),
    (16, 7.81e-1),
    (17, 9.31e-1),
    (18, 1.09),
    (19, 1.26),
    (20, 1.44),
    (21, 1.62),
    (22, 1.82),
    (23, 2.01),
    (24, 2.22),
    (25, 2.43),
    (26, 2.64),
    (27, 2.86),
    (28, 3.08),
    (29, 3.31),
    (30, 3.54),
    (35, 4.7),
    (40, 6.0),
    (45, 7.2),
    (50, 8.5),
    (55, 9.9),
];

// θ_m for unit roundoff 2^-24, Al-Mohy & Higham (2011) table 3.1.
const THETA_SINGLE: [(usize, f64); 11] = [
    (5, 1.3e-1),
    (10, 1.0e0),
    (15, 2.2e0),
    (20, 3.6e0),
    (25, 4.9e0),
    (30, 6.3e0),
    (35, 7.7e0),
    (40, 9.1e0),
    (45, 1.1e1),
    (50, 1.2e1),
    (55, 1.3e1),
];

/// The `(m, θ_m)` lookup table for a precision class.
pub fn theta_table(precision: Precision) -> &'static [(usize, f64)] {
    match precision {
        Precision::Single => &THETA_SINGLE,
        Precision::Double => &THETA_DOUBLE,
    }
}

fn unit_roundoff(precision: Precision) -> f64 {
    match precision {
        Precision::Single => libm::pow(2.0, -24.0),
        Precision::Double => libm::pow(2.0, -53.0),
    }
}

/// Picks `m*` minimizing `ceil(m·‖L‖₁/θ_m)` (smallest `m` on ties) and
/// `s = max(1, ceil(‖L‖₁/θ_{m*}))`.
pub fn select_taylor_params(one_norm: f64, precision: Precision) -> Result<TaylorParams> {
    if !(one_norm >= 0.0) || !one_norm.is_finite() {
        return Err(invalid!(
            "operator norm must be finite and nonnegative, got {one_norm}"
        ));
    }
    let table = theta_table(precision);
    let mut best = (f64::INFINITY, table[0].0, table[0].1);
    for &(m, theta) in table {
        let cost = libm::ceil(m as f64 * one_norm / theta);
        if cost < best.0 {
            best = (cost, m, theta);
        }
    }
    let s = libm::ceil(one_norm / best.2).max(1.0) as usize;
    Ok(TaylorParams { m_star: best.1, s })
}

// ---------------------------------------------------------------------------
// Exponential action.

/// Domains at or below this many entries may take the dense route.
pub const DENSE_FALLBACK_ENTRIES: usize = 64;

/// Default cap on the domain size accepted by [`one_norm_exhaustive`].
pub const EXHAUSTIVE_CAP: usize = 400;

fn check_action_inputs<L: LinearOperator + ?Sized>(op: &L, b: &Mat, t: f64) -> Result<()> {
    if op.shape() != b.shape() {
        let (r, c) = op.shape();
        return Err(dim_err!(
            "operator acts on {r}x{c} matrices, argument is {}x{}",
            b.nrows(),
            b.ncols()
        ));
    }
    if !t.is_finite() {
        return Err(invalid!("time must be finite, got {t}"));
    }
    ensure_finite(b, "exponential action argument")
}

/// `exp(t·L)·B`.
///
/// Uses the truncated Taylor scheme with parameters chosen from
/// `|t|·one_norm_bound`. Small domains whose Taylor cost would exceed a dense
/// vectorization fall back to a dense exponential.
pub fn expa<L: LinearOperator + ?Sized>(op: &L, b: &Mat, t: f64) -> Result<Mat> {
    check_action_inputs(op, b, t)?;
    let norm = t.abs() * op.one_norm_bound();
    let params = select_taylor_params(norm, Precision::Double)?;
    let entries = b.len();
    if entries <= DENSE_FALLBACK_ENTRIES && params.m_star * params.s > entries {
        return expa_dense(op, b, t);
    }
    expa_taylor_with(op, b, t, params, Precision::Double)
}

/// Taylor route only, never the dense fallback.
pub fn expa_taylor<L: LinearOperator + ?Sized>(op: &L, b: &Mat, t: f64) -> Result<Mat> {
    check_action_inputs(op, b, t)?;
    let params = select_taylor_params(t.abs() * op.one_norm_bound(), Precision::Double)?;
    expa_taylor_with(op, b, t, params, Precision::Double)
}

/// Runs `(T_m(tL/s))^s B` with explicit parameters.
pub fn expa_taylor_with<L: LinearOperator + ?Sized>(
    op: &L,
    b: &Mat,
    t: f64,
    params: TaylorParams,
    precision: Precision,
) -> Result<Mat> {
    check_action_inputs(op, b, t)?;
    let tol = unit_roundoff(precision);
    let TaylorParams { m_star, s } = params;
    let h = t / s as f64;
    let mut f = b.clone();
    for _ in 0..s {
        let mut term = f.clone();
        let mut prev = term.norm();
        for j in 1..=m_star {
            term = op.apply(&term) * (h / j as f64);
            let cur = term.norm();
            f += &term;
            if !cur.is_finite() {
                return Err(Error::Numerical { m: m_star, s });
            }
            let scale = tol * f.norm();
            if prev <= scale && cur <= scale {
                break;
            }
            prev = cur;
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical { m: m_star, s });
        }
    }
    Ok(f)
}

/// Dense matrix of `L` in the column-major vectorized basis.
pub fn vectorize<L: LinearOperator + ?Sized>(op: &L) -> Mat {
    let (rows, cols) = op.shape();
    let dim = rows * cols;
    let mut dense = Mat::zeros(dim, dim);
    let mut basis = Mat::zeros(rows, cols);
    for j in 0..dim {
        basis[j] = 1.0;
        let image = op.apply(&basis);
        dense.column_mut(j).copy_from_slice(image.as_slice());
        basis[j] = 0.0;
    }
    dense
}

fn expa_dense<L: LinearOperator + ?Sized>(op: &L, b: &Mat, t: f64) -> Result<Mat> {
    let (rows, cols) = op.shape();
    let e = matrix_exponential(&(vectorize(op) * t))?;
    let v = nalgebra::DVector::from_column_slice(b.as_slice());
    let out = e * v;
    Ok(Mat::from_column_slice(rows, cols, out.as_slice()))
}

/// Exact vectorized 1-norm `max_j |vec(L E_j)|₁` over the canonical basis.
pub fn one_norm_exhaustive<L: LinearOperator + ?Sized>(op: &L) -> Result<f64> {
    one_norm_exhaustive_capped(op, EXHAUSTIVE_CAP)
}

pub fn one_norm_exhaustive_capped<L: LinearOperator + ?Sized>(op: &L, cap: usize) -> Result<f64> {
    let (rows, cols) = op.shape();
    let entries = rows * cols;
    if entries > cap {
        return Err(Error::Capacity { entries, cap });
    }
    let mut basis = Mat::zeros(rows, cols);
    let mut best = 0.0f64;
    for j in 0..entries {
        basis[j] = 1.0;
        best = best.max(crate::mat::vec_norm1(&op.apply(&basis)));
        basis[j] = 0.0;
    }
    Ok(best)
}

/// Applies the same action to several right-hand sides.
pub fn expa_many<L: LinearOperator + ?Sized>(op: &L, bs: &[Mat], t: f64) -> Result<Vec<Mat>> {
    bs.iter().map(|b| expa(op, b, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::skew;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
        Mat::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn expm_zero_and_diagonal() {
        let e = matrix_exponential(&Mat::zeros(3, 3)).unwrap();
        assert!((e - Mat::identity(3, 3)).norm() < 1e-15);
        let d = Mat::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![1.0, 2.0]));
        let e = matrix_exponential(&d).unwrap();
        assert!((e[(0, 0)] - core::f64::consts::E).abs() < 1e-14);
        assert!((e[(1, 1)] - libm::exp(2.0)).abs() < 1e-13);
        assert!(e[(0, 1)].abs() < 1e-16);
    }

    #[test]
    fn expm_skew_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for scale in [0.01, 1.0, 10.0] {
            let a = skew(&rand_mat(&mut rng, 5, 5)) * scale;
            let r = matrix_exponential(&a).unwrap();
            let err = (r.transpose() * &r - Mat::identity(5, 5)).norm();
            assert!(err <= 1e-12, "scale {scale}: {err}");
            assert!((r.clone().lu().determinant() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn expm_rejects_bad_input() {
        assert!(matches!(
            matrix_exponential(&Mat::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
        let mut m = Mat::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(matrix_exponential(&m), Err(Error::Validation(_))));
    }

    #[test]
    fn taylor_params_edges() {
        let p = select_taylor_params(0.0, Precision::Double).unwrap();
        assert_eq!(p, TaylorParams { m_star: 1, s: 1 });
        assert!(select_taylor_params(-1.0, Precision::Double).is_err());
        for &(m, theta) in theta_table(Precision::Double) {
            assert_eq!(libm::ceil(theta / theta).max(1.0) as usize, 1, "m = {m}");
        }
        let p = select_taylor_params(100.0 * 9.9, Precision::Double).unwrap();
        assert_eq!(p, TaylorParams { m_star: 55, s: 100 });
    }

    #[test]
    fn exhaustive_norm_small_cases() {
        let id = FnOperator::identity((2, 2));
        assert_eq!(one_norm_exhaustive(&id).unwrap(), 1.0);
        let d = Mat::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![2.0, 3.0]));
        let d2 = d.clone();
        let op = FnOperator::new((2, 1), move |x: &Mat| &d * x, move |x: &Mat| &d2 * x, 3.0);
        assert_eq!(one_norm_exhaustive(&op).unwrap(), 3.0);
        let big = FnOperator::identity((21, 20));
        assert!(matches!(
            one_norm_exhaustive(&big),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn expa_trivial_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = rand_mat(&mut rng, 4, 3);
        let z = FnOperator::zero((4, 3));
        assert_eq!(expa(&z, &b, 3.7).unwrap(), b);
        let id = FnOperator::identity((4, 3));
        let out = expa(&id, &b, 0.8).unwrap();
        assert!((out - &b * libm::exp(0.8)).norm() <= 1e-14 * b.norm() * 3.0);
    }

    #[test]
    fn expa_shape_mismatch() {
        let id = FnOperator::identity((4, 3));
        assert!(matches!(
            expa(&id, &Mat::zeros(3, 3), 1.0),
            Err(Error::Dimension(_))
        ));
    }
}
