//! GL⁺(n) with `𝔞 = 𝔰𝔬(n)` and SO(n) with `𝔞 = 𝔰𝔬(d)` in the top block.

use crate::error::{invalid, Result};
use crate::expaction::{expa, matrix_exponential};
use crate::forms::{AlgebraSplit, MetricParams};
use crate::group_core::{GroupGeometry, LieTransportOperator, TANGENT_TOL};
use crate::mat::{det_sign, ensure_shape, rel_residual, skew, solve_left, Mat};

/// GL⁺(n) with `⟨g, g⟩ = ‖g‖²_F + (β − 1)‖g_skew‖²_F`.
#[derive(Debug, Clone)]
pub struct GLGeometry {
    n: usize,
    beta: f64,
    group: GroupGeometry,
}

impl GLGeometry {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid!("n must be positive"));
        }
        let params = MetricParams::gl(beta)?;
        Ok(Self {
            n,
            beta,
            group: GroupGeometry::new(AlgebraSplit::gl(n), params),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn group(&self) -> &GroupGeometry {
        &self.group
    }

    fn velocity(&self, x: &Mat, xi: &Mat) -> Result<Mat> {
        ensure_shape(x, (self.n, self.n), "base point")?;
        ensure_shape(xi, (self.n, self.n), "tangent vector")?;
        let a = solve_left(x, xi)?;
        if det_sign(x) <= 0.0 {
            return Err(invalid!("base point must have positive determinant"));
        }
        Ok(a)
    }

    /// `⟨X⁻¹ξ, X⁻¹η⟩_F + (β − 1)⟨(X⁻¹ξ)_skew, (X⁻¹η)_skew⟩_F`.
    pub fn metric(&self, x: &Mat, xi: &Mat, eta: &Mat) -> Result<f64> {
        let a = self.velocity(x, xi)?;
        let b = self.velocity(x, eta)?;
        Ok(a.dot(&b) + (self.beta - 1.0) * skew(&a).dot(&skew(&b)))
    }

    fn factors(&self, a: &Mat, t: f64) -> Result<(Mat, Mat)> {
        let b = self.beta;
        let first = (a * (1.0 - b) + a.transpose() * (1.0 + b)) * (0.5 * t);
        let second = skew(a) * (t * (1.0 + b));
        Ok((matrix_exponential(&first)?, matrix_exponential(&second)?))
    }
}

/// `X exp(t/2((1−β)a + (1+β)aᵀ)) exp(t(1+β)a_skew)` with `a = X⁻¹ξ`.
pub fn gl_geodesic(geom: &GLGeometry, x: &Mat, xi: &Mat, t: f64) -> Result<Mat> {
    let a = geom.velocity(x, xi)?;
    let (e1, e2) = geom.factors(&a, t)?;
    Ok(x * e1 * e2)
}

pub fn gl_transport(geom: &GLGeometry, x: &Mat, xi: &Mat, eta: &Mat, t: f64) -> Result<Mat> {
    let a = geom.velocity(x, xi)?;
    let b = solve_left(x, eta)?;
    let op = LieTransportOperator::new(geom.group.split(), geom.group.params(), &a, false);
    let (e1, e2) = geom.factors(&a, t)?;
    Ok(x * e1 * expa(&op, &b, t)? * e2)
}

/// SO(n) with `⟨ξ, η⟩ = ½Tr ξᵀη + (α − ½)Tr A_ξᵀA_η`.
#[derive(Debug, Clone)]
pub struct SOGeometry {
    n: usize,
    d: usize,
    alpha: f64,
    group: GroupGeometry,
}

/// Tolerance on `‖XᵀX − I‖_F` for SO(n) base points.
pub const ORTHO_TOL: f64 = 1e-10;

impl SOGeometry {
    pub fn new(n: usize, d: usize, alpha: f64) -> Result<Self> {
        if d == 0 || d >= n {
            return Err(invalid!("need 1 <= d < n, got d = {d}, n = {n}"));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(invalid!("alpha must be positive, got {alpha}"));
        }
        Ok(Self {
            n,
            d,
            alpha,
            group: GroupGeometry::new(
                AlgebraSplit::so_top_block(n, d),
                MetricParams::from_alpha(alpha)?,
            ),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn group(&self) -> &GroupGeometry {
        &self.group
    }

    pub fn check_point(&self, x: &Mat) -> Result<()> {
        ensure_shape(x, (self.n, self.n), "base point")?;
        let err = (x.transpose() * x - Mat::identity(self.n, self.n)).norm();
        if err > ORTHO_TOL {
            return Err(invalid!(
                "base point is not orthogonal (‖XᵀX − I‖ = {err:.3e})"
            ));
        }
        if det_sign(x) <= 0.0 {
            return Err(invalid!("base point has negative determinant"));
        }
        Ok(())
    }

    /// `Xᵀξ`, checked antisymmetric.
    pub fn velocity(&self, x: &Mat, xi: &Mat) -> Result<Mat> {
        self.check_point(x)?;
        ensure_shape(xi, (self.n, self.n), "tangent vector")?;
        let a = x.transpose() * xi;
        let r = rel_residual(&a, &skew(&a));
        if r > TANGENT_TOL {
            return Err(invalid!("Xᵀξ is not antisymmetric (residual {r:.3e})"));
        }
        Ok(a)
    }

    pub fn metric(&self, x: &Mat, xi: &Mat, eta: &Mat) -> Result<f64> {
        let a = self.velocity(x, xi)?;
        let b = self.velocity(x, eta)?;
        let d = self.d;
        let top = a.view((0, 0), (d, d)).dot(&b.view((0, 0), (d, d)));
        Ok(0.5 * a.dot(&b) + (self.alpha - 0.5) * top)
    }

    fn factors(&self, a: &Mat, t: f64) -> Result<(Mat, Mat)> {
        let (n, d) = (self.n, self.d);
        let mut first = a.clone();
        let top = a.view((0, 0), (d, d)).into_owned();
        first
            .view_mut((0, 0), (d, d))
            .copy_from(&(&top * (2.0 * self.alpha)));
        let small = matrix_exponential(&(top * (t * (1.0 - 2.0 * self.alpha))))?;
        let mut second = Mat::identity(n, n);
        second.view_mut((0, 0), (d, d)).copy_from(&small);
        Ok((matrix_exponential(&(first * t))?, second))
    }
}

/// `X exp(t[[2αA, −Bᵀ],[B, C]]) exp(t[[(1−2α)A, 0],[0, 0]])` for `Xᵀξ = [[A, −Bᵀ],[B, C]]`.
pub fn so_geodesic(geom: &SOGeometry, x: &Mat, xi: &Mat, t: f64) -> Result<Mat> {
    let a = geom.velocity(x, xi)?;
    let (e1, e2) = geom.factors(&a, t)?;
    Ok(x * e1 * e2)
}

pub fn so_transport(geom: &SOGeometry, x: &Mat, xi: &Mat, eta: &Mat, t: f64) -> Result<Mat> {
    let a = geom.velocity(x, xi)?;
    let b = geom.velocity(x, eta)?;
    let op = LieTransportOperator::new(geom.group.split(), geom.group.params(), &a, false);
    let (e1, e2) = geom.factors(&a, t)?;
    Ok(x * e1 * expa(&op, &b, t)? * e2)
}
