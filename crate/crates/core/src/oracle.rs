//! Brute-force verification: ODE integration of the transport and geodesic
//! equations from dense Christoffel functions, finite-difference residuals
//! and Gram-matrix drift.
//!
//! Everything here is written against dense `n × n` formulas on purpose and
//! shares nothing with the fast paths beyond matrix products and `expm`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{dim_err, invalid, Result};
use crate::expaction::matrix_exponential;
use crate::forms::{AlgebraSplit, MetricParams};
use crate::mat::{hcat, Mat};
use crate::ode::{integrate, OdeOptions};

/// `Γ(γ; v, w)` evaluated at a point.
pub type Christoffel = Box<dyn Fn(&Mat, &Mat, &Mat) -> Mat + Send + Sync>;
/// `t ↦ (γ(t), γ̇(t))`.
pub type Curve = Box<dyn Fn(f64) -> (Mat, Mat) + Send + Sync>;

/// `y' = rhs(t, y)` on `t_span` with tolerances.
pub struct OdeProblem<F> {
    pub rhs: F,
    pub y0: Mat,
    pub t_span: (f64, f64),
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl<F: Fn(f64, &Mat) -> Mat> OdeProblem<F> {
    pub fn new(rhs: F, y0: Mat, t_span: (f64, f64), abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(invalid!("tolerances must be positive"));
        }
        Ok(Self {
            rhs,
            y0,
            t_span,
            abs_tol,
            rel_tol,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.y0.len()
    }

    /// Solution at each of `t_out`, which must run from `t_span.0` toward `t_span.1`.
    pub fn solve(&self, t_out: &[f64]) -> Result<Vec<Mat>> {
        let (lo, hi) = (
            self.t_span.0.min(self.t_span.1),
            self.t_span.0.max(self.t_span.1),
        );
        if t_out.iter().any(|&t| t < lo || t > hi) {
            return Err(invalid!("output time outside t_span"));
        }
        integrate(
            &self.rhs,
            self.t_span.0,
            &self.y0,
            t_out,
            &OdeOptions::with_tol(self.abs_tol, self.rel_tol),
        )
    }
}

fn nan_like(m: &Mat) -> Mat {
    Mat::from_element(m.nrows(), m.ncols(), f64::NAN)
}

/// Solves `Δ̇ = −Γ(γ, γ̇, Δ)` with `Δ(t0) = η0`, returning `Δ` on `t_grid`.
pub fn integrate_transport<C, G>(
    christoffel: C,
    geodesic: G,
    eta0: &Mat,
    t0: f64,
    t_grid: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Mat>>
where
    C: Fn(&Mat, &Mat, &Mat) -> Mat,
    G: Fn(f64) -> (Mat, Mat),
{
    let rhs = |t: f64, delta: &Mat| -> Mat {
        let (g, v) = geodesic(t);
        let out = -christoffel(&g, &v, delta);
        if out.shape() != delta.shape() {
            return nan_like(delta);
        }
        out
    };
    integrate(rhs, t0, eta0, t_grid, opts)
}

/// Integrates the geodesic equation `γ̈ = −Γ(γ, γ̇, γ̇)` jointly with the
/// transport of `η`, returning `(γ, γ̇, Δ)` on `t_grid`.
pub fn integrate_geodesic_and_transport<C>(
    christoffel: C,
    x: &Mat,
    xi: &Mat,
    eta: &Mat,
    t_grid: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<(Mat, Mat, Mat)>>
where
    C: Fn(&Mat, &Mat, &Mat) -> Mat,
{
    let c = x.ncols();
    if xi.shape() != x.shape() || eta.shape() != x.shape() {
        return Err(dim_err!("point, velocity and vector must share a shape"));
    }
    let y0 = hcat(&hcat(x, xi), eta);
    let rhs = |_: f64, s: &Mat| -> Mat {
        let g = s.columns(0, c).into_owned();
        let v = s.columns(c, c).into_owned();
        let d = s.columns(2 * c, c).into_owned();
        hcat(
            &hcat(&v, &(-christoffel(&g, &v, &v))),
            &(-christoffel(&g, &v, &d)),
        )
    };
    let states = integrate(rhs, 0.0, &y0, t_grid, opts)?;
    Ok(states
        .into_iter()
        .map(|s| {
            (
                s.columns(0, c).into_owned(),
                s.columns(c, c).into_owned(),
                s.columns(2 * c, c).into_owned(),
            )
        })
        .collect())
}

/// `max_i ‖(Δ_{i+1} − Δ_{i−1})/(2dt) + Γ(γ_i, γ̇_i, Δ_i)‖_F` over interior points.
pub fn transport_residual<C>(
    delta: &[Mat],
    gamma: &[(Mat, Mat)],
    christoffel: C,
    dt: f64,
) -> Result<f64>
where
    C: Fn(&Mat, &Mat, &Mat) -> Mat,
{
    if delta.len() < 3 {
        return Err(invalid!("need at least 3 samples, got {}", delta.len()));
    }
    if gamma.len() != delta.len() {
        return Err(dim_err!(
            "{} curve samples for {} vectors",
            gamma.len(),
            delta.len()
        ));
    }
    if !(dt > 0.0) {
        return Err(invalid!("dt must be positive"));
    }
    let mut worst = 0.0f64;
    for i in 1..delta.len() - 1 {
        let deriv = (&delta[i + 1] - &delta[i - 1]) / (2.0 * dt);
        let (g, v) = &gamma[i];
        worst = worst.max((deriv + christoffel(g, v, &delta[i])).norm());
    }
    Ok(worst)
}

/// Gram matrix `G_ij = metric(v_i, v_j)`.
pub fn gram_matrix<M: Fn(&Mat, &Mat) -> f64>(vs: &[Mat], metric: M) -> Mat {
    let k = vs.len();
    let mut g = Mat::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = metric(&vs[i], &vs[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// For each time slot `s`, `max |G_s − G_0|` where `G_s` uses `metric_at(s, ·, ·)`.
pub fn gram_drift<M0, Mt>(
    initial: &[Mat],
    transported: &[Vec<Mat>],
    metric0: M0,
    metric_at: Mt,
) -> Result<Vec<f64>>
where
    M0: Fn(&Mat, &Mat) -> f64,
    Mt: Fn(usize, &Mat, &Mat) -> f64,
{
    let g0 = gram_matrix(initial, metric0);
    transported
        .iter()
        .enumerate()
        .map(|(s, vs)| {
            if vs.len() != initial.len() {
                return Err(dim_err!(
                    "{} transported vectors for {} initial",
                    vs.len(),
                    initial.len()
                ));
            }
            let gs = gram_matrix(vs, |a, b| metric_at(s, a, b));
            Ok((gs - &g0).amax())
        })
        .collect()
}

/// Centered-difference velocity `(γ(t+h) − γ(t−h)) / 2h`.
pub fn fd_velocity<F: Fn(f64) -> Mat>(curve: F, t: f64, h: f64) -> Mat {
    (curve(t + h) - curve(t - h)) / (2.0 * h)
}

/// Centered second difference `(γ(t+h) − 2γ(t) + γ(t−h)) / h²`.
pub fn fd_acceleration<F: Fn(f64) -> Mat>(curve: F, t: f64, h: f64) -> Mat {
    (curve(t + h) - curve(t) * 2.0 + curve(t - h)) / (h * h)
}

// ---------------------------------------------------------------------------
// Dense Christoffel functions.

/// Group Christoffel `−½(ξX⁻¹η + ηX⁻¹ξ) + ((1+β)/2)X([a_𝔞, b] + [b_𝔞, a])`,
/// minus `½X[a, b]_𝔨` when the split carries `𝔨`.
pub fn group_christoffel(split: AlgebraSplit, params: MetricParams) -> Christoffel {
    let c = 0.5 * (1.0 + params.beta());
    Box::new(move |x: &Mat, xi: &Mat, eta: &Mat| {
        let Some(xinv) = x.clone().try_inverse() else {
            return nan_like(xi);
        };
        let a = &xinv * xi;
        let b = &xinv * eta;
        let br = |p: &Mat, q: &Mat| p * q - q * p;
        let first = (xi * &b + eta * &a) * -0.5;
        let second = x * (br(&split.proj_a(&a), &b) + br(&split.proj_a(&b), &a)) * c;
        let vertical = x * split.proj_k(&br(&a, &b)) * 0.5;
        first + second - vertical
    })
}

/// Stiefel Christoffel with an explicit `n × n` normal projector.
pub fn stiefel_christoffel_dense(alpha: f64) -> Christoffel {
    flag_christoffel_dense(alpha, Vec::new())
}

/// Flag Christoffel `Y(vᵀw)_symf + (1 − α)(I − YYᵀ)(vwᵀ + wvᵀ)Y`; the
/// Stiefel case has no blocks.
pub fn flag_christoffel_dense(alpha: f64, blocks: Vec<(usize, usize)>) -> Christoffel {
    Box::new(move |y: &Mat, v: &Mat, w: &Mat| {
        let n = y.nrows();
        let m = v.transpose() * w;
        let mut symf = (&m + m.transpose()) * 0.5;
        for &(lo, hi) in &blocks {
            let s = hi - lo;
            let sk = (m.view((lo, lo), (s, s)) - m.view((lo, lo), (s, s)).transpose()) * 0.5;
            let mut blk = symf.view_mut((lo, lo), (s, s));
            blk += sk;
        }
        let proj = Mat::identity(n, n) - y * y.transpose();
        y * symf + proj * (v * w.transpose() + w * v.transpose()) * y * (1.0 - alpha)
    })
}

// ---------------------------------------------------------------------------
// Geodesic curves.

/// `γ(t) = X e^{tM₁} e^{tM₂}` with `M₁ = a − (1+β)a_𝔞`, `M₂ = (1+β)a_𝔞`,
/// `a = X⁻¹ξ`, and `γ̇ = X e^{tM₁} a e^{tM₂}`.
pub fn group_geodesic_curve(
    split: &AlgebraSplit,
    params: &MetricParams,
    x: &Mat,
    xi: &Mat,
) -> Result<Curve> {
    let xinv = x
        .clone()
        .try_inverse()
        .ok_or(crate::error::Error::Singular)?;
    let a = &xinv * xi;
    let m2 = split.proj_a(&a) * (1.0 + params.beta());
    let m1 = &a - &m2;
    let x = x.clone();
    Ok(Box::new(move |t: f64| {
        let (Ok(e1), Ok(e2)) = (
            matrix_exponential(&(&m1 * t)),
            matrix_exponential(&(&m2 * t)),
        ) else {
            return (nan_like(&x), nan_like(&x));
        };
        let left = &x * e1;
        (&left * &e2, left * &a * e2)
    }))
}

/// Stiefel geodesic through its SO(n) lift: `X̄ = [Y | Y_⊥]`,
/// `ā = X̄ᵀ[ξ | −YξᵀY_⊥]`, projected by `I_{n,d}`.
pub fn stiefel_geodesic_curve_lifted(y: &Mat, xi: &Mat, alpha: f64) -> Result<Curve> {
    let (n, d) = y.shape();
    if xi.shape() != (n, d) || n <= d {
        return Err(dim_err!("need n > d and matching shapes"));
    }
    let perp = crate::stiefel::orthonormal_complement(y);
    let x = hcat(y, &perp);
    let lift = hcat(xi, &(-(y * (xi.transpose() * &perp))));
    let a = x.transpose() * lift;
    let split = AlgebraSplit::so_top_block(n, d);
    let params = MetricParams::from_alpha(alpha)?;
    let curve = group_geodesic_curve(&split, &params, &x, &(&x * a))?;
    Ok(Box::new(move |t: f64| {
        let (g, v) = curve(t);
        (g.columns(0, d).into_owned(), v.columns(0, d).into_owned())
    }))
}
