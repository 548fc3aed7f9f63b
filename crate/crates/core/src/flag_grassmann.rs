//! Flag manifolds in Stiefel coordinates under the canonical metric, and the
//! closed-form Grassmann transport.

use alloc::vec::Vec;

use crate::error::{dim_err, invalid, Result};
use crate::mat::{ensure_shape, skew, sym, Mat};
use crate::stiefel::{
    decompose_tangent, project_tangent, BlockList, StiefelPoint, StiefelTransportPlan, RANK_TOL,
    TANGENT_TOL,
};

/// Block sizes `(d₁, …, d_p)` of a flag in `ℝⁿ`, with `d = Σdᵢ < n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagSignature {
    d_list: Vec<usize>,
    n: usize,
    d: usize,
    blocks: BlockList,
}

impl FlagSignature {
    pub fn new(d_list: &[usize], n: usize) -> Result<Self> {
        if d_list.is_empty() || d_list.contains(&0) {
            return Err(invalid!("block sizes must be positive and nonempty"));
        }
        let d: usize = d_list.iter().sum();
        if d >= n {
            return Err(invalid!("sum of block sizes {d} must be below n = {n}"));
        }
        let mut blocks = Vec::with_capacity(d_list.len());
        let mut lo = 0;
        for &di in d_list {
            blocks.push((lo, lo + di));
            lo += di;
        }
        Ok(Self {
            d_list: d_list.to_vec(),
            n,
            d,
            blocks,
        })
    }

    pub fn d_list(&self) -> &[usize] {
        &self.d_list
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `(lo, hi)` row/column ranges of the flag diagonal blocks.
    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    fn check_point(&self, y: &StiefelPoint) -> Result<()> {
        if (y.n(), y.d()) != (self.n, self.d) {
            return Err(dim_err!(
                "point is {}x{}, signature needs {}x{}",
                y.n(),
                y.d(),
                self.n,
                self.d
            ));
        }
        Ok(())
    }

    fn diag_blocks(&self, m: &Mat) -> Mat {
        let mut out = Mat::zeros(m.nrows(), m.ncols());
        for &(lo, hi) in &self.blocks {
            let w = hi - lo;
            out.view_mut((lo, lo), (w, w))
                .copy_from(&m.view((lo, lo), (w, w)));
        }
        out
    }

    fn check_horizontal(&self, y: &StiefelPoint, v: &Mat, what: &str) -> Result<()> {
        ensure_shape(v, (self.n, self.d), what)?;
        let inner = y.y().transpose() * v;
        let resid = sym(&inner).norm() + self.diag_blocks(&inner).norm();
        let r = resid / v.norm().max(1.0);
        if r > TANGENT_TOL {
            return Err(invalid!("{what} is not horizontal (residual {r:.3e})"));
        }
        Ok(())
    }
}

/// Stiefel tangent projection, then removal of the flag diagonal blocks of `YᵀW`.
pub fn flag_horizontal_project(sig: &FlagSignature, y: &StiefelPoint, w: &Mat) -> Result<Mat> {
    sig.check_point(y)?;
    let t = project_tangent(y, w)?;
    let inner = y.y().transpose() * &t;
    Ok(t - y.y() * sig.diag_blocks(&inner))
}

/// Symmetrize but keep the flag diagonal blocks of `M` unchanged.
pub fn symf(sig: &FlagSignature, m: &Mat) -> Result<Mat> {
    ensure_shape(m, (sig.d, sig.d), "symf argument")?;
    Ok(sym(m) + sig.diag_blocks(&skew(m)))
}

/// `Y(ξᵀη)_symf + (1 − α)(I − YYᵀ)(ξηᵀ + ηξᵀ)Y` for horizontal `ξ, η`.
pub fn flag_christoffel(
    sig: &FlagSignature,
    y: &StiefelPoint,
    xi: &Mat,
    eta: &Mat,
    alpha: f64,
) -> Result<Mat> {
    sig.check_point(y)?;
    sig.check_horizontal(y, xi, "xi")?;
    sig.check_horizontal(y, eta, "eta")?;
    let ym = y.y();
    let outer = xi * (eta.transpose() * ym) + eta * (xi.transpose() * ym);
    let normal = &outer - ym * (ym.transpose() * &outer);
    Ok(ym * symf(sig, &(xi.transpose() * eta))? + normal * (1.0 - alpha))
}

/// Reusable canonical-metric transport plan for horizontal `ξ`.
pub fn flag_transport_plan(
    sig: &FlagSignature,
    y: &StiefelPoint,
    xi: &Mat,
) -> Result<StiefelTransportPlan> {
    sig.check_point(y)?;
    sig.check_horizontal(y, xi, "xi")?;
    let dec = decompose_tangent(y, xi, RANK_TOL)?;
    Ok(StiefelTransportPlan::from_parts(
        y,
        dec,
        0.5,
        Some(sig.blocks.clone()),
    ))
}

/// `[Y|Q] exp(t[[A, −Rᵀ],[R, 0]]) expa(tP_flag, [Y|Q]ᵀη) + η_⊥ exp(tA/2)`.
pub fn flag_transport_canonical(
    sig: &FlagSignature,
    y: &StiefelPoint,
    xi: &Mat,
    eta: &Mat,
    t: f64,
) -> Result<Mat> {
    let plan = flag_transport_plan(sig, y, xi)?;
    sig.check_horizontal(y, eta, "eta")?;
    plan.transport(eta, t)
}

/// `Δ(t) = [YV | Q](−sin tΣ; cos tΣ)Qᵀη + η − QQᵀη` from `ξ = QR`,
/// `R = U Σ Vᵀ` (compact), `Q ← QU`.
pub fn grassmann_transport(y: &StiefelPoint, xi: &Mat, eta: &Mat, t: f64) -> Result<Mat> {
    let ym = y.y();
    for (v, what) in [(xi, "xi"), (eta, "eta")] {
        ensure_shape(v, ym.shape(), what)?;
        let r = (ym.transpose() * v).norm() / v.norm().max(1.0);
        if r > TANGENT_TOL {
            return Err(invalid!(
                "{what} is not horizontal for the Grassmannian (‖Yᵀv‖ = {r:.3e})"
            ));
        }
    }
    let dec = decompose_tangent(y, xi, RANK_TOL)?;
    if dec.k == 0 {
        return Ok(eta.clone());
    }
    let svd = dec.r.clone().svd(true, true);
    let (u, vt) = (svd.u.expect("requested U"), svd.v_t.expect("requested V"));
    let sv = &svd.singular_values;
    let cut = RANK_TOL * sv.max();
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > cut).collect();
    let kk = keep.len();
    let u = Mat::from_fn(u.nrows(), kk, |i, j| u[(i, keep[j])]);
    let v = Mat::from_fn(vt.ncols(), kk, |i, j| vt[(keep[j], i)]);
    let q = &dec.q * u;
    let coef = q.transpose() * eta;
    let mut sin_part = coef.clone();
    let mut cos_part = coef.clone();
    for (row, &i) in keep.iter().enumerate() {
        let (s, c) = (libm::sin(t * sv[i]), libm::cos(t * sv[i]));
        sin_part.row_mut(row).scale_mut(s);
        cos_part.row_mut(row).scale_mut(c);
    }
    Ok(-(ym * v) * sin_part + &q * (cos_part - &coef) + eta)
}
