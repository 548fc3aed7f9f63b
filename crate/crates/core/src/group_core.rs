//! Metric, Christoffel function, geodesics and parallel transport on a matrix
//! Lie group with a transposable Lie algebra.

use crate::error::{invalid, Result};
use crate::expaction::{
    expa, matrix_exponential, one_norm_exhaustive, LinearOperator, EXHAUSTIVE_CAP,
};
use crate::forms::{
    beta_form_unchecked, classify_metric_signature, AlgebraSplit, MetricParams, SignatureSummary,
};
use crate::mat::{
    bracket, condition_number, ensure_shape, norm1, norm_inf, rel_residual, solve_left, Mat,
};

/// Relative tolerance for `X⁻¹ξ ∈ 𝔤`.
pub const TANGENT_TOL: f64 = 1e-9;

/// Condition numbers above this trigger a warning on every solve with `X`.
pub const CONDITION_WARN: f64 = 1e12;

/// A group together with its metric parameters.
#[derive(Debug, Clone)]
pub struct GroupGeometry {
    split: AlgebraSplit,
    params: MetricParams,
    signature: Option<SignatureSummary>,
}

impl GroupGeometry {
    /// The signature is classified for `n² ≤ 400`; the dense analysis is
    /// quartic in `n` and is skipped above that.
    pub fn new(split: AlgebraSplit, params: MetricParams) -> Self {
        let n = split.n();
        let signature =
            (n * n <= EXHAUSTIVE_CAP).then(|| classify_metric_signature(&split, &params));
        Self {
            split,
            params,
            signature,
        }
    }

    pub fn split(&self) -> &AlgebraSplit {
        &self.split
    }

    pub fn params(&self) -> &MetricParams {
        &self.params
    }

    pub fn signature(&self) -> Option<&SignatureSummary> {
        self.signature.as_ref()
    }

    pub fn n(&self) -> usize {
        self.split.n()
    }

    /// `X⁻¹ξ`, checked to lie in `𝔤`.
    pub fn algebra_velocity(&self, x: &Mat, xi: &Mat) -> Result<Mat> {
        let n = self.n();
        ensure_shape(x, (n, n), "base point")?;
        ensure_shape(xi, (n, n), "tangent vector")?;
        let cond = condition_number(x);
        if cond > CONDITION_WARN {
            log::warn!("base point is ill-conditioned (cond = {cond:.3e})");
        }
        let a = solve_left(x, xi)?;
        check_in(&self.split, &a, "X⁻¹ξ")?;
        Ok(a)
    }

    /// `⟨ξ, η⟩_X = ⟨X⁻¹ξ, X⁻¹η⟩_β`.
    pub fn metric(&self, x: &Mat, xi: &Mat, eta: &Mat) -> Result<f64> {
        let a = self.algebra_velocity(x, xi)?;
        let b = self.algebra_velocity(x, eta)?;
        Ok(self.algebra_metric(&a, &b))
    }

    pub(crate) fn algebra_metric(&self, a: &Mat, b: &Mat) -> f64 {
        beta_form_unchecked(a, b, &self.split, &self.params)
    }

    /// `Γ(ξ, η)` at `X`.
    pub fn christoffel(&self, x: &Mat, xi: &Mat, eta: &Mat) -> Result<Mat> {
        let a = self.algebra_velocity(x, xi)?;
        let b = self.algebra_velocity(x, eta)?;
        Ok(x * self.christoffel_algebra(&a, &b))
    }

    /// `X⁻¹Γ(Xa, Xb)`.
    pub(crate) fn christoffel_algebra(&self, a: &Mat, b: &Mat) -> Mat {
        let c = 0.5 * (1.0 + self.params.beta());
        let sym = (a * b + b * a) * -0.5;
        let split = &self.split;
        sym + (bracket(&split.proj_a(a), b) + bracket(&split.proj_a(b), a)) * c
    }

    /// The two exponent matrices `(a − (1+β)a_𝔞, (1+β)a_𝔞)` of the geodesic.
    pub(crate) fn geodesic_exponents(&self, a: &Mat) -> (Mat, Mat) {
        let aa = self.split.proj_a(a) * (1.0 + self.params.beta());
        (a - &aa, aa)
    }

    pub fn geodesic(&self, x: &Mat, xi: &Mat, t: f64) -> Result<Mat> {
        Ok(self.geodesic_with_velocity(x, xi, t)?.0)
    }

    /// `(γ(t), γ̇(t))` with `γ̇ = X e^{tM₁} a e^{tM₂}`.
    pub fn geodesic_with_velocity(&self, x: &Mat, xi: &Mat, t: f64) -> Result<(Mat, Mat)> {
        let a = self.algebra_velocity(x, xi)?;
        let (m1, m2) = self.geodesic_exponents(&a);
        let e1 = x * matrix_exponential(&(m1 * t))?;
        let e2 = matrix_exponential(&(m2 * t))?;
        Ok((&e1 * &e2, e1 * a * e2))
    }

    /// The operator `P_a`; `a` must lie in `𝔤`.
    pub fn transport_operator(&self, a: &Mat) -> Result<LieTransportOperator> {
        check_in(&self.split, a, "operator argument")?;
        Ok(LieTransportOperator::new(
            &self.split,
            &self.params,
            a,
            false,
        ))
    }

    /// Parallel transport of `η` along the geodesic from `X` with velocity `ξ`.
    pub fn transport(&self, x: &Mat, xi: &Mat, eta: &Mat, t: f64) -> Result<Mat> {
        let a = self.algebra_velocity(x, xi)?;
        let b = self.algebra_velocity(x, eta)?;
        let op = LieTransportOperator::new(&self.split, &self.params, &a, false);
        sandwich(self, x, &a, &op, &b, t)
    }
}

pub(crate) fn check_in(split: &AlgebraSplit, a: &Mat, what: &str) -> Result<()> {
    let r = rel_residual(a, &split.proj_g(a));
    if r > TANGENT_TOL {
        return Err(invalid!(
            "{what} is not in the Lie algebra (residual {r:.3e})"
        ));
    }
    Ok(())
}

/// `X e^{tM₁} expa(tP, b) e^{tM₂}`.
pub(crate) fn sandwich<L: LinearOperator>(
    geom: &GroupGeometry,
    x: &Mat,
    a: &Mat,
    op: &L,
    b: &Mat,
    t: f64,
) -> Result<Mat> {
    let (m1, m2) = geom.geodesic_exponents(a);
    let w = expa(op, b, t)?;
    Ok(x * matrix_exponential(&(m1 * t))? * w * matrix_exponential(&(m2 * t))?)
}

/// `P_a b = ½([b, a] + (1+β)([a_𝔞, b] − [b_𝔞, a]))`, or with `[b, a]`
/// replaced by `[b, a]_𝔪` on a quotient.
#[derive(Debug, Clone)]
pub struct LieTransportOperator {
    split: AlgebraSplit,
    a: Mat,
    a_a: Mat,
    at: Mat,
    a_at: Mat,
    coef: f64,
    horizontal: bool,
    bound: f64,
}

impl LieTransportOperator {
    pub(crate) fn new(
        split: &AlgebraSplit,
        params: &MetricParams,
        a: &Mat,
        horizontal: bool,
    ) -> Self {
        let a_a = split.proj_a(a);
        let mut op = Self {
            split: split.clone(),
            at: a.transpose(),
            a_at: a_a.transpose(),
            a: a.clone(),
            a_a,
            coef: 1.0 + params.beta(),
            horizontal,
            bound: f64::INFINITY,
        };
        let n = split.n();
        op.bound = if n * n <= EXHAUSTIVE_CAP {
            one_norm_exhaustive(&op).unwrap_or_else(|_| op.analytic_bound())
        } else {
            op.analytic_bound()
        };
        op
    }

    /// `½(c_m N(a) + |1+β|(N(a_𝔞) + c_𝔞 N(a)))` with `N(x) = ‖x‖₁ + ‖x‖∞`
    /// bounding `ad_x` and `c` the vectorized 1-norms of the projections.
    pub fn analytic_bound(&self) -> f64 {
        let nn = |x: &Mat| norm1(x) + norm_inf(x);
        let c_m = if self.horizontal {
            self.split.m_norm1()
        } else {
            1.0
        };
        0.5 * (c_m * nn(&self.a)
            + self.coef.abs() * (nn(&self.a_a) + self.split.a_norm1() * nn(&self.a)))
    }
}

impl LinearOperator for LieTransportOperator {
    fn shape(&self) -> (usize, usize) {
        (self.split.n(), self.split.n())
    }

    fn apply(&self, b: &Mat) -> Mat {
        let mut ad = bracket(b, &self.a);
        if self.horizontal {
            ad = self.split.proj_m(&ad);
        }
        let b_a = self.split.proj_a(b);
        (ad + (bracket(&self.a_a, b) - bracket(&b_a, &self.a)) * self.coef) * 0.5
    }

    fn apply_adjoint(&self, y: &Mat) -> Mat {
        let ym = if self.horizontal {
            self.split.proj_m(y)
        } else {
            y.clone()
        };
        let first = bracket(&ym, &self.at);
        let last = self.split.proj_a(&bracket(y, &self.at));
        (first + (bracket(&self.a_at, y) - last) * self.coef) * 0.5
    }

    fn one_norm_bound(&self) -> f64 {
        self.bound
    }
}
