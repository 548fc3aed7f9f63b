//! Stiefel manifold `St(n, d)` under the metric family
//! `Tr ξᵀη + (α − 1) Tr ξᵀYYᵀη`, with transport in `O(nd²)`.

use alloc::vec::Vec;

use crate::error::{dim_err, invalid, Result};
use crate::expaction::{expa, matrix_exponential, LinearOperator};
use crate::mat::{block2, ensure_shape, hcat, norm1, norm_inf, skew, sym, vcat, Mat};

/// Tolerance on `‖YᵀY − I‖_F`.
pub const POINT_TOL: f64 = 1e-10;
/// Relative tolerance on `‖(Yᵀξ)_sym‖_F` for tangent vectors.
pub const TANGENT_TOL: f64 = 1e-9;
/// Default relative rank cut for [`decompose_tangent`].
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint {
    y: Mat,
}

impl StiefelPoint {
    pub fn new(y: Mat) -> Result<Self> {
        let (n, d) = y.shape();
        if d == 0 || n <= d {
            return Err(dim_err!(
                "Stiefel point must be n x d with n > d >= 1, got {n}x{d}"
            ));
        }
        let err = (y.transpose() * &y - Mat::identity(d, d)).norm();
        if !(err <= POINT_TOL) {
            return Err(invalid!(
                "columns are not orthonormal (‖YᵀY − I‖ = {err:.3e})"
            ));
        }
        Ok(Self { y })
    }

    pub fn y(&self) -> &Mat {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn d(&self) -> usize {
        self.y.ncols()
    }

    fn check_tangent(&self, xi: &Mat, what: &str) -> Result<()> {
        ensure_shape(xi, self.y.shape(), what)?;
        let r = sym(&(self.y.transpose() * xi)).norm() / xi.norm().max(1.0);
        if r > TANGENT_TOL {
            return Err(invalid!("{what} is not tangent (‖(Yᵀξ)_sym‖ = {r:.3e})"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiefelMetricParams {
    alpha: f64,
}

impl StiefelMetricParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(invalid!("alpha must be positive, got {alpha}"));
        }
        Ok(Self { alpha })
    }

    pub fn canonical() -> Self {
        Self { alpha: 0.5 }
    }

    pub fn embedded() -> Self {
        Self { alpha: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `W − Y sym(YᵀW)`.
pub fn project_tangent(y: &StiefelPoint, w: &Mat) -> Result<Mat> {
    ensure_shape(w, y.y.shape(), "matrix to project")?;
    Ok(w - &y.y * sym(&(y.y.transpose() * w)))
}

/// `Tr ξᵀη + (α − 1) Tr ξᵀYYᵀη`.
pub fn metric_inner(
    y: &StiefelPoint,
    xi: &Mat,
    eta: &Mat,
    params: &StiefelMetricParams,
) -> Result<f64> {
    y.check_tangent(xi, "xi")?;
    y.check_tangent(eta, "eta")?;
    Ok(metric_unchecked(&y.y, xi, eta, params.alpha))
}

pub(crate) fn metric_unchecked(y: &Mat, xi: &Mat, eta: &Mat, alpha: f64) -> f64 {
    let yt = y.transpose();
    xi.dot(eta) + (alpha - 1.0) * (&yt * xi).dot(&(&yt * eta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Factorization {
    #[default]
    PivotedQr,
    Svd,
}

/// `ξ = YA + QR` with `A = Yᵀξ` antisymmetric, `Q` orthonormal and `YᵀQ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDecomposition {
    pub a: Mat,
    pub q: Mat,
    pub r: Mat,
    pub k: usize,
}

pub fn decompose_tangent(
    y: &StiefelPoint,
    xi: &Mat,
    rank_tol: f64,
) -> Result<TangentDecomposition> {
    decompose_tangent_with(y, xi, rank_tol, Factorization::PivotedQr)
}

pub fn decompose_tangent_with(
    y: &StiefelPoint,
    xi: &Mat,
    rank_tol: f64,
    method: Factorization,
) -> Result<TangentDecomposition> {
    y.check_tangent(xi, "xi")?;
    let (n, d) = y.y.shape();
    let yt = y.y.transpose();
    let a = skew(&(&yt * xi));
    let mut w = xi - &y.y * (&yt * xi);
    w -= &y.y * (&yt * &w);
    let floor = rank_tol * xi.norm();
    let q = match method {
        Factorization::PivotedQr => {
            let qr = w.clone().col_piv_qr();
            let r = qr.r();
            let diag: Vec<f64> = (0..r.nrows().min(r.ncols()))
                .map(|i| r[(i, i)].abs())
                .collect();
            let top = diag.iter().cloned().fold(0.0, f64::max);
            let cut = (rank_tol * top).max(floor);
            let k = diag.iter().take_while(|&&v| v > cut).count();
            qr.q().columns(0, k).into_owned()
        }
        Factorization::Svd => {
            let svd = w.clone().svd(true, false);
            let u = svd.u.expect("requested U");
            let sv = &svd.singular_values;
            let cut = (rank_tol * sv.max()).max(floor);
            let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > cut).collect();
            Mat::from_fn(n, keep.len(), |i, j| u[(i, keep[j])])
        }
    };
    let k = q.ncols();
    let r = if k == 0 {
        Mat::zeros(0, d)
    } else {
        q.transpose() * &w
    };
    Ok(TangentDecomposition { a, q, r, k })
}

/// Flag diagonal blocks `[lo, hi)` zeroed in the top component of `P`.
pub(crate) type BlockList = Vec<(usize, usize)>;

pub(crate) fn zero_blocks(m: &mut Mat, blocks: &BlockList) {
    for &(lo, hi) in blocks {
        m.view_mut((lo, lo), (hi - lo, hi - lo)).fill(0.0);
    }
}

/// `P_AR(w) = (((4α−1)w_aA + Rᵀw_r)_skew, α(w_rA − Rw_a))` on
/// `(d+k) × d` matrices `w = [w_a; w_r]`, optionally balanced as
/// `s_√α ∘ P ∘ s_{1/√α}`.
#[derive(Debug, Clone)]
pub struct PArOperator {
    a: Mat,
    r: Mat,
    alpha: f64,
    balanced: bool,
    blocks: Option<BlockList>,
    bound: f64,
}

impl PArOperator {
    pub fn new(
        decomp: &TangentDecomposition,
        params: &StiefelMetricParams,
        balanced: bool,
    ) -> Self {
        Self::build(decomp, params.alpha, balanced, None)
    }

    pub(crate) fn build(
        decomp: &TangentDecomposition,
        alpha: f64,
        balanced: bool,
        blocks: Option<BlockList>,
    ) -> Self {
        let mut op = Self {
            a: decomp.a.clone(),
            r: decomp.r.clone(),
            alpha,
            balanced,
            blocks,
            bound: 0.0,
        };
        op.bound = if balanced {
            bal_bound_proof(&op.a, &op.r, alpha)
        } else {
            let c = (4.0 * alpha - 1.0).abs();
            let col = max_colsum(&op.r);
            (c * norm1(&op.a) + alpha * col).max(norm_inf(&op.r) + alpha * norm_inf(&op.a))
        };
        op
    }

    fn d(&self) -> usize {
        self.a.nrows()
    }

    fn k(&self) -> usize {
        self.r.nrows()
    }

    // Coefficients of Rᵀw_r in the top block and of R w_a in the bottom block.
    fn coefs(&self) -> (f64, f64) {
        if self.balanced {
            let s = libm::sqrt(self.alpha);
            (s, s)
        } else {
            (1.0, self.alpha)
        }
    }

    fn mask(&self, mut m: Mat) -> Mat {
        if let Some(b) = &self.blocks {
            zero_blocks(&mut m, b);
        }
        m
    }
}

impl LinearOperator for PArOperator {
    fn shape(&self) -> (usize, usize) {
        (self.d() + self.k(), self.d())
    }

    fn apply(&self, w: &Mat) -> Mat {
        let (d, k) = (self.d(), self.k());
        let (st, sb) = self.coefs();
        let c = 4.0 * self.alpha - 1.0;
        let wa = w.rows(0, d);
        let wr = w.rows(d, k);
        let mut top = &wa * &self.a * c;
        if k > 0 {
            top += self.r.transpose() * &wr * st;
        }
        let top = self.mask(skew(&top));
        if k == 0 {
            return top;
        }
        let bottom = &wr * &self.a * self.alpha - &self.r * &wa * sb;
        vcat(&top, &bottom)
    }

    fn apply_adjoint(&self, y: &Mat) -> Mat {
        let (d, k) = (self.d(), self.k());
        let (st, sb) = self.coefs();
        let c = 4.0 * self.alpha - 1.0;
        let z = self.mask(skew(&y.rows(0, d).into_owned()));
        let at = self.a.transpose();
        let mut top = &z * &at * c;
        if k == 0 {
            return top;
        }
        let yr = y.rows(d, k);
        top -= self.r.transpose() * &yr * sb;
        let bottom = &self.r * &z * st + &yr * &at * self.alpha;
        vcat(&top, &bottom)
    }

    fn one_norm_bound(&self) -> f64 {
        self.bound
    }
}

fn max_colsum(m: &Mat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    norm1(m)
}

fn bal_bound_proof(a: &Mat, r: &Mat, alpha: f64) -> f64 {
    let s = libm::sqrt(alpha);
    let n_a = (4.0 * alpha - 1.0).abs() * norm1(a) + s * max_colsum(r);
    let n_r = if r.nrows() == 0 {
        0.0
    } else {
        alpha * norm_inf(a) + s * norm_inf(r)
    };
    n_a.max(n_r)
}

/// `P_AR(w)` for `w = [w_a; w_r]`.
pub fn p_ar_apply(
    decomp: &TangentDecomposition,
    params: &StiefelMetricParams,
    w: &Mat,
) -> Result<Mat> {
    let op = PArOperator::new(decomp, params, false);
    ensure_shape(w, op.shape(), "P_AR argument")?;
    Ok(op.apply(w))
}

/// `max(n_A, n_R)` bounding the 1-norm of the balanced operator:
/// `n_A = |4α−1|‖A‖₁ + √α maxᵢ Σ_q |r_qi|`, `n_R = α‖A‖∞ + √α‖R‖∞`.
pub fn p_bal_norm_bound(decomp: &TangentDecomposition, params: &StiefelMetricParams) -> f64 {
    bal_bound_proof(&decomp.a, &decomp.r, params.alpha)
}

/// The grouping `n_A = √α maxⱼ(Σᵢ|r_ij| + d|4α−1|‖A‖₁)`,
/// `n_R = α maxⱼ(Σᵢ|a_ij| + d√α‖R‖∞)`, kept for comparison.
pub fn p_bal_norm_bound_displayed(
    decomp: &TangentDecomposition,
    params: &StiefelMetricParams,
) -> f64 {
    let alpha = params.alpha;
    let s = libm::sqrt(alpha);
    let d = decomp.a.nrows() as f64;
    let n_r_inf = if decomp.k == 0 {
        0.0
    } else {
        norm_inf(&decomp.r)
    };
    let n_a = s * (max_colsum(&decomp.r) + d * (4.0 * alpha - 1.0).abs() * norm1(&decomp.a));
    let n_r = alpha * (norm1(&decomp.a) + d * s * n_r_inf);
    n_a.max(n_r)
}

/// Geodesic and transport factors for a fixed `(Y, ξ)`, reusable across
/// many `(η, t)`.
#[derive(Debug, Clone)]
pub struct StiefelTransportPlan {
    y: Mat,
    f: Mat,
    decomposition: TangentDecomposition,
    alpha: f64,
    big: Mat,
    small: Mat,
    normal: Mat,
    p_op: PArOperator,
}

impl StiefelTransportPlan {
    pub fn new(y: &StiefelPoint, xi: &Mat, params: &StiefelMetricParams) -> Result<Self> {
        Self::with_factorization(y, xi, params, Factorization::PivotedQr)
    }

    pub fn with_factorization(
        y: &StiefelPoint,
        xi: &Mat,
        params: &StiefelMetricParams,
        method: Factorization,
    ) -> Result<Self> {
        let decomposition = decompose_tangent_with(y, xi, RANK_TOL, method)?;
        Ok(Self::from_parts(y, decomposition, params.alpha, None))
    }

    pub(crate) fn from_parts(
        y: &StiefelPoint,
        decomposition: TangentDecomposition,
        alpha: f64,
        blocks: Option<BlockList>,
    ) -> Self {
        let a = &decomposition.a;
        let r = &decomposition.r;
        let k = decomposition.k;
        let big = block2(
            &(a * (2.0 * alpha)),
            &(-r.transpose()),
            r,
            &Mat::zeros(k, k),
        );
        let f = hcat(&y.y, &decomposition.q);
        let p_op = PArOperator::build(&decomposition, alpha, true, blocks);
        Self {
            y: y.y.clone(),
            f,
            small: a * (1.0 - 2.0 * alpha),
            normal: a * (1.0 - alpha),
            big,
            decomposition,
            alpha,
            p_op,
        }
    }

    pub fn decomposition(&self) -> &TangentDecomposition {
        &self.decomposition
    }

    /// `[[2αA, −Rᵀ], [R, 0]]`.
    pub fn big_exp_arg(&self) -> &Mat {
        &self.big
    }

    /// `(1 − 2α)A`.
    pub fn small_exp_arg(&self) -> &Mat {
        &self.small
    }

    /// `(1 − α)A`.
    pub fn normal_exp_arg(&self) -> &Mat {
        &self.normal
    }

    /// The balanced operator `s_√α ∘ P_AR ∘ s_{1/√α}`.
    pub fn p_op(&self) -> &PArOperator {
        &self.p_op
    }

    fn d(&self) -> usize {
        self.y.ncols()
    }

    pub fn geodesic(&self, t: f64) -> Result<Mat> {
        let eb = matrix_exponential(&(&self.big * t))?;
        let es = matrix_exponential(&(&self.small * t))?;
        Ok(&self.f * (eb.columns(0, self.d()) * es))
    }

    /// `(γ(t), γ̇(t))` with `γ̇ = F e^{tB}(BJ + JC)e^{tC}`.
    pub fn geodesic_with_velocity(&self, t: f64) -> Result<(Mat, Mat)> {
        let d = self.d();
        let eb = matrix_exponential(&(&self.big * t))?;
        let es = matrix_exponential(&(&self.small * t))?;
        let mut inner = self.big.columns(0, d).into_owned();
        let mut top = inner.rows_mut(0, d);
        top += &self.small;
        let gamma = &self.f * (eb.columns(0, d) * &es);
        let vel = &self.f * (&eb * inner * es);
        Ok((gamma, vel))
    }

    pub fn transport(&self, eta: &Mat, t: f64) -> Result<Mat> {
        Ok(self
            .transport_many(core::slice::from_ref(eta), t)?
            .remove(0))
    }

    /// Transports each `η` to time `t`, sharing the exponentials.
    pub fn transport_many(&self, etas: &[Mat], t: f64) -> Result<Vec<Mat>> {
        let d = self.d();
        let eb = matrix_exponential(&(&self.big * t))?;
        let es = matrix_exponential(&(&self.small * t))?;
        let en = matrix_exponential(&(&self.normal * t))?;
        let s = libm::sqrt(self.alpha);
        let yp = StiefelPoint { y: self.y.clone() };
        etas.iter()
            .map(|eta| {
                yp.check_tangent(eta, "eta")?;
                let w = self.f.transpose() * eta;
                let perp = eta - &self.f * &w;
                let mut v = w;
                v.rows_mut(0, d).scale_mut(s);
                let mut v = expa(&self.p_op, &v, t)?;
                v.rows_mut(0, d).scale_mut(1.0 / s);
                Ok(&self.f * (&eb * v * &es) + perp * &en)
            })
            .collect()
    }
}

pub fn stiefel_geodesic(
    y: &StiefelPoint,
    xi: &Mat,
    params: &StiefelMetricParams,
    t: f64,
) -> Result<Mat> {
    StiefelTransportPlan::new(y, xi, params)?.geodesic(t)
}

pub fn stiefel_transport(
    y: &StiefelPoint,
    xi: &Mat,
    eta: &Mat,
    params: &StiefelMetricParams,
    t: f64,
) -> Result<Mat> {
    StiefelTransportPlan::new(y, xi, params)?.transport(eta, t)
}

/// `½Y(ξᵀη + ηᵀξ) + (1 − α)(I − YYᵀ)(ξηᵀ + ηξᵀ)Y`, never forming `n × n`.
pub fn stiefel_christoffel(
    y: &Mat,
    xi: &Mat,
    eta: &Mat,
    params: &StiefelMetricParams,
) -> Result<Mat> {
    ensure_shape(xi, y.shape(), "xi")?;
    ensure_shape(eta, y.shape(), "eta")?;
    let yt = y.transpose();
    let outer = xi * (eta.transpose() * y) + eta * (xi.transpose() * y);
    let normal = &outer - y * (&yt * &outer);
    Ok(y * sym(&(xi.transpose() * eta)) + normal * (1.0 - params.alpha))
}

/// `ξ I_{n,d}ᵀ − YξᵀY_⊥ I_⊥ᵀ = [ξ | −YξᵀY_⊥]`.
pub fn horizontal_lift(y: &Mat, y_perp: &Mat, xi: &Mat) -> Result<Mat> {
    let (n, d) = y.shape();
    ensure_shape(y_perp, (n, n - d), "orthonormal completion")?;
    ensure_shape(xi, (n, d), "xi")?;
    let x = hcat(y, y_perp);
    let err = (x.transpose() * &x - Mat::identity(n, n)).norm();
    if err > POINT_TOL {
        return Err(invalid!(
            "[Y | Y_perp] is not orthogonal (‖XᵀX − I‖ = {err:.3e})"
        ));
    }
    Ok(hcat(xi, &(-(y * (xi.transpose() * y_perp)))))
}

/// An orthonormal `Y_⊥` with `det [Y | Y_⊥] > 0`. Dense in `n`.
pub fn orthonormal_complement(y: &Mat) -> Mat {
    let (n, d) = y.shape();
    let p = Mat::identity(n, n) - y * y.transpose();
    let svd = p.svd(true, false);
    let u = svd.u.expect("requested U");
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut perp = Mat::from_fn(n, n - d, |i, j| u[(i, idx[j])]);
    if n > d && crate::mat::det_sign(&hcat(y, &perp)) < 0.0 {
        let last = n - d - 1;
        perp.column_mut(last).neg_mut();
    }
    perp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expaction::one_norm_exhaustive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
        Mat::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    fn rand_point(rng: &mut ChaCha8Rng, n: usize, d: usize) -> StiefelPoint {
        let q = rand_mat(rng, n, d).qr().q();
        StiefelPoint::new(q).unwrap()
    }

    #[test]
    fn point_and_params_validation() {
        assert!(StiefelPoint::new(Mat::identity(3, 3)).is_err());
        assert!(StiefelPoint::new(Mat::identity(4, 2) * 2.0).is_err());
        assert!(StiefelMetricParams::new(0.0).is_err());
    }

    #[test]
    fn projection_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let y = rand_point(&mut rng, 7, 3);
        let w = rand_mat(&mut rng, 7, 3);
        let p = project_tangent(&y, &w).unwrap();
        assert!(sym(&(y.y().transpose() * &p)).norm() < 1e-12);
        assert!((project_tangent(&y, &p).unwrap() - &p).norm() < 1e-13);
        let s = sym(&rand_mat(&mut rng, 3, 3));
        assert!(project_tangent(&y, &(y.y() * s)).unwrap().norm() < 1e-13);
    }

    #[test]
    fn metric_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let y = rand_point(&mut rng, 6, 2);
        let xi = project_tangent(&y, &rand_mat(&mut rng, 6, 2)).unwrap();
        let eta = project_tangent(&y, &rand_mat(&mut rng, 6, 2)).unwrap();
        let m = metric_inner(&y, &xi, &eta, &StiefelMetricParams::embedded()).unwrap();
        assert!((m - xi.dot(&eta)).abs() < 1e-14);
        let a = skew(&rand_mat(&mut rng, 2, 2));
        let ya = y.y() * &a;
        let m = metric_inner(&y, &ya, &ya, &StiefelMetricParams::new(0.3).unwrap()).unwrap();
        assert!((m - 0.3 * a.norm_squared()).abs() < 1e-13);
        assert!(metric_inner(&y, y.y(), &eta, &StiefelMetricParams::embedded()).is_err());
    }

    #[test]
    fn decomposition_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let y = rand_point(&mut rng, 9, 3);
        let a0 = skew(&rand_mat(&mut rng, 3, 3));
        for method in [Factorization::PivotedQr, Factorization::Svd] {
            let dec = decompose_tangent_with(&y, &(y.y() * &a0), RANK_TOL, method).unwrap();
            assert_eq!(dec.k, 0);
            assert!((&dec.a - &a0).norm() < 1e-14);
        }
        let perp = orthonormal_complement(y.y());
        let q0 = perp.columns(0, 2).into_owned();
        let r0 = rand_mat(&mut rng, 2, 3);
        let xi = &q0 * &r0;
        let dec = decompose_tangent(&y, &xi, RANK_TOL).unwrap();
        assert_eq!(dec.k, 2);
        assert!(dec.a.norm() < 1e-14);
        let proj = &q0 * q0.transpose() * &dec.q;
        assert!((proj - &dec.q).norm() < 1e-12);
    }

    #[test]
    fn d_equals_one_is_a_great_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let y = rand_point(&mut rng, 5, 1);
        let mut v = project_tangent(&y, &rand_mat(&mut rng, 5, 1)).unwrap();
        v /= v.norm();
        for alpha in [0.3, 1.0, 2.0] {
            let p = StiefelMetricParams::new(alpha).unwrap();
            let g = stiefel_geodesic(&y, &v, &p, 0.9).unwrap();
            let expect = y.y() * libm::cos(0.9) + &v * libm::sin(0.9);
            assert!((g - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn p_ar_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let y = rand_point(&mut rng, 8, 3);
        let xi = project_tangent(&y, &rand_mat(&mut rng, 8, 3)).unwrap();
        let dec = decompose_tangent(&y, &xi, RANK_TOL).unwrap();
        let p = StiefelMetricParams::new(0.7).unwrap();
        let zero = Mat::zeros(3 + dec.k, 3);
        assert_eq!(p_ar_apply(&dec, &p, &zero).unwrap(), zero);
        let w = rand_mat(&mut rng, 3 + dec.k, 3);
        let out = p_ar_apply(&dec, &p, &w).unwrap();
        let top = out.rows(0, 3).into_owned();
        assert!((&top + top.transpose()).norm() < 1e-14);

        let no_a = TangentDecomposition {
            a: Mat::zeros(3, 3),
            ..dec.clone()
        };
        let out = p_ar_apply(&no_a, &p, &w).unwrap();
        let wa = w.rows(0, 3).into_owned();
        let wr = w.rows(3, dec.k).into_owned();
        assert!((out.rows(0, 3) - skew(&(dec.r.transpose() * &wr))).norm() < 1e-14);
        assert!((out.rows(3, dec.k) + &dec.r * &wa * 0.7).norm() < 1e-14);
        assert!(p_ar_apply(&dec, &p, &Mat::zeros(2, 3)).is_err());
    }

    #[test]
    fn balanced_bound_and_antisymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let y = rand_point(&mut rng, 7, 3);
        let xi = project_tangent(&y, &rand_mat(&mut rng, 7, 3)).unwrap();
        let dec = decompose_tangent(&y, &xi, RANK_TOL).unwrap();
        for alpha in [0.25, 0.5, 1.0, 2.0] {
            let p = StiefelMetricParams::new(alpha).unwrap();
            let op = PArOperator::new(&dec, &p, true);
            let exact = one_norm_exhaustive(&op).unwrap();
            assert!(exact <= p_bal_norm_bound(&dec, &p) * (1.0 + 1e-12));
            let unbal = PArOperator::new(&dec, &p, false);
            assert!(one_norm_exhaustive(&unbal).unwrap() <= unbal.one_norm_bound() * (1.0 + 1e-12));
            let mut w = rand_mat(&mut rng, 3 + dec.k, 3);
            let mut v = rand_mat(&mut rng, 3 + dec.k, 3);
            for m in [&mut w, &mut v] {
                let top = skew(&m.rows(0, 3).into_owned());
                m.rows_mut(0, 3).copy_from(&top);
            }
            let s = op.apply(&w).dot(&v) + op.apply(&v).dot(&w);
            assert!(s.abs() < 1e-12);
        }
        let zero = TangentDecomposition {
            a: Mat::zeros(3, 3),
            q: Mat::zeros(7, 0),
            r: Mat::zeros(0, 3),
            k: 0,
        };
        assert_eq!(
            p_bal_norm_bound(&zero, &StiefelMetricParams::canonical()),
            0.0
        );
    }

    #[test]
    fn transport_simple_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let y = rand_point(&mut rng, 9, 3);
        let xi = project_tangent(&y, &rand_mat(&mut rng, 9, 3)).unwrap();
        let eta = project_tangent(&y, &rand_mat(&mut rng, 9, 3)).unwrap();
        let p = StiefelMetricParams::new(0.8).unwrap();
        let plan = StiefelTransportPlan::new(&y, &xi, &p).unwrap();
        assert!((plan.transport(&eta, 0.0).unwrap() - &eta).norm() < 1e-14);
        let (g, v) = plan.geodesic_with_velocity(1.3).unwrap();
        let self_t = plan.transport(&xi, 1.3).unwrap();
        assert!((&self_t - &v).norm() < 1e-10 * v.norm());
        assert!((g.transpose() * &g - Mat::identity(3, 3)).norm() < 1e-12);
        let m0 = metric_inner(&y, &eta, &eta, &p).unwrap();
        let out = plan.transport(&eta, 1.3).unwrap();
        let m1 = metric_unchecked(&g, &out, &out, 0.8);
        assert!((m0 - m1).abs() < 1e-11 * m0);

        // η normal to Y and ξ.
        let dec = plan.decomposition();
        let f = hcat(y.y(), &dec.q);
        let raw = rand_mat(&mut rng, 9, 3);
        let normal = &raw - &f * (f.transpose() * &raw);
        let out = plan.transport(&normal, 0.7).unwrap();
        let expect = &normal * matrix_exponential(&(&dec.a * (0.2 * 0.7))).unwrap();
        assert!((out - expect).norm() < 1e-12);
    }

    #[test]
    fn lift_and_christoffel_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let y = rand_point(&mut rng, 6, 2);
        let perp = orthonormal_complement(y.y());
        let xi = project_tangent(&y, &rand_mat(&mut rng, 6, 2)).unwrap();
        let lift = horizontal_lift(y.y(), &perp, &xi).unwrap();
        assert_eq!(lift.columns(0, 2), xi.columns(0, 2));
        let x = hcat(y.y(), &perp);
        let inner = x.transpose() * &lift;
        assert!((&inner + inner.transpose()).norm() < 1e-12);
        assert!(inner.view((2, 2), (4, 4)).norm() < 1e-12);
        assert!(horizontal_lift(y.y(), &(&perp * 2.0), &xi).is_err());

        let p = StiefelMetricParams::embedded();
        let z = Mat::zeros(6, 2);
        assert_eq!(stiefel_christoffel(y.y(), &z, &xi, &p).unwrap().norm(), 0.0);
        let u = &perp.columns(0, 2) * rand_mat(&mut rng, 2, 2);
        let v = &perp.columns(0, 2) * rand_mat(&mut rng, 2, 2);
        let g = stiefel_christoffel(y.y(), &u, &v, &p).unwrap();
        let expect = y.y() * sym(&(u.transpose() * &v));
        assert!((g - expect).norm() < 1e-13);
    }
}
