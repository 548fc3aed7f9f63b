//! Small dense-matrix helpers shared by every module.

use nalgebra::DMatrix;

use crate::error::{dim_err, invalid, Error, Result};

pub type Mat = DMatrix<f64>;

pub fn sym(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

pub fn skew(m: &Mat) -> Mat {
    (m - m.transpose()) * 0.5
}

/// Lie bracket `[a, b] = ab - ba`.
pub fn bracket(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// Frobenius pairing `Tr(a bᵀ)`.
pub fn frob(a: &Mat, b: &Mat) -> f64 {
    a.dot(b)
}

/// Matrix 1-norm (max absolute column sum).
pub fn norm1(m: &Mat) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix ∞-norm (max absolute row sum).
pub fn norm_inf(m: &Mat) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Sum of absolute entries, i.e. the 1-norm of `vec(m)`.
pub fn vec_norm1(m: &Mat) -> f64 {
    m.iter().map(|x| x.abs()).sum()
}

/// `I_{n,d}`: the first `d` columns of the `n × n` identity.
pub fn eye_cols(n: usize, d: usize) -> Mat {
    Mat::identity(n, d)
}

pub fn hcat(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = Mat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn vcat(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.ncols(), b.ncols());
    let mut out = Mat::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

/// Block matrix `[[tl, tr], [bl, br]]`.
pub fn block2(tl: &Mat, tr: &Mat, bl: &Mat, br: &Mat) -> Mat {
    vcat(&hcat(tl, tr), &hcat(bl, br))
}

pub fn ensure_square(m: &Mat, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(dim_err!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        ));
    }
    Ok(())
}

pub fn ensure_shape(m: &Mat, shape: (usize, usize), what: &str) -> Result<()> {
    if m.shape() != shape {
        return Err(dim_err!(
            "{what} has shape {}x{}, expected {}x{}",
            m.nrows(),
            m.ncols(),
            shape.0,
            shape.1
        ));
    }
    Ok(())
}

pub fn ensure_finite(m: &Mat, what: &str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(invalid!("{what} has non-finite entries"))
    }
}

/// Membership residual scaled as `‖w − p(w)‖_F / max(1, ‖w‖_F)`.
pub fn rel_residual(w: &Mat, projected: &Mat) -> f64 {
    (w - projected).norm() / w.norm().max(1.0)
}

/// Solve `x · sol = rhs` by LU, never forming the inverse.
pub fn solve_left(x: &Mat, rhs: &Mat) -> Result<Mat> {
    let lu = x.clone().lu();
    lu.solve(rhs).ok_or(Error::Singular)
}

/// Sign of the determinant from an LU factorization.
pub fn det_sign(x: &Mat) -> f64 {
    let det = x.clone().lu().determinant();
    if det > 0.0 {
        1.0
    } else if det < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// 2-norm condition number from singular values; `inf` for singular input.
pub fn condition_number(x: &Mat) -> f64 {
    let sv = x.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
