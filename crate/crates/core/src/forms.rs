//! Trace and Frobenius forms, the deformed β-form and the subspace
//! decomposition `𝔤 = 𝔞 ⊕ 𝔞_⋈ ⊕ 𝔞_⊤` of a transposable Lie algebra.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{dim_err, invalid, Error, Result};
use crate::expaction::EXHAUSTIVE_CAP;
use crate::mat::{ensure_square, rel_residual, skew, vec_norm1, Mat};

/// Relative tolerance for "w lies in the subspace".
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// The coefficients `(β₀, β₁)` of the deformed metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricParams {
    beta0: f64,
    beta1: f64,
}

impl MetricParams {
    pub fn new(beta0: f64, beta1: f64) -> Result<Self> {
        if !beta0.is_finite() || !beta1.is_finite() || beta0 == 0.0 || beta1 == 0.0 {
            return Err(invalid!(
                "need finite nonzero beta0, beta1; got ({beta0}, {beta1})"
            ));
        }
        Ok(Self { beta0, beta1 })
    }

    /// `(β₀, β₁) = (1, β)`, the family used on GL⁺(n).
    pub fn gl(beta: f64) -> Result<Self> {
        Self::new(1.0, beta)
    }

    /// `(β₀, β₁) = (−½, α)`, the Stiefel-style family on SO(n).
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        Self::new(-0.5, alpha)
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    /// `β = β₁ / β₀`.
    pub fn beta(&self) -> f64 {
        self.beta1 / self.beta0
    }
}

pub type Projection = Arc<dyn Fn(&Mat) -> Mat + Send + Sync>;

/// A transposable matrix Lie algebra `𝔤 ⊂ ℝ^{n×n}` with a subalgebra `𝔞`,
/// and optionally the Lie algebra `𝔨` of a quotient subgroup.
///
/// Projections are Frobenius-orthogonal and commute with transposition.
#[derive(Clone)]
pub struct AlgebraSplit {
    n: usize,
    proj_g: Projection,
    proj_a: Projection,
    proj_k: Option<Projection>,
    // Upper bounds on the vectorized 1-norms of proj_a and proj_g − proj_k.
    a_norm1: f64,
    m_norm1: f64,
}

impl fmt::Debug for AlgebraSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraSplit")
            .field("n", &self.n)
            .field("has_k", &self.proj_k.is_some())
            .finish()
    }
}

fn mask_block(m: &Mat, lo: usize, hi: usize) -> Mat {
    let mut out = Mat::zeros(m.nrows(), m.ncols());
    out.view_mut((lo, lo), (hi - lo, hi - lo))
        .copy_from(&m.view((lo, lo), (hi - lo, hi - lo)));
    out
}

fn projection_norm1(n: usize, p: &dyn Fn(&Mat) -> Mat) -> f64 {
    if n * n > EXHAUSTIVE_CAP {
        // ‖P‖₁ ≤ √N ‖P‖₂ = n for an orthogonal projection on N = n² entries.
        return n as f64;
    }
    let mut e = Mat::zeros(n, n);
    let mut best = 0.0f64;
    for j in 0..n * n {
        e[j] = 1.0;
        best = best.max(vec_norm1(&p(&e)));
        e[j] = 0.0;
    }
    best
}

impl AlgebraSplit {
    /// Custom split from projection closures.
    pub fn new<G, A>(n: usize, proj_g: G, proj_a: A) -> Self
    where
        G: Fn(&Mat) -> Mat + Send + Sync + 'static,
        A: Fn(&Mat) -> Mat + Send + Sync + 'static,
    {
        let a_norm1 = projection_norm1(n, &proj_a);
        let m_norm1 = projection_norm1(n, &proj_g);
        Self {
            n,
            proj_g: Arc::new(proj_g),
            proj_a: Arc::new(proj_a),
            proj_k: None,
            a_norm1,
            m_norm1,
        }
    }

    /// Attaches the quotient subalgebra `𝔨`.
    pub fn with_k<K>(mut self, proj_k: K) -> Self
    where
        K: Fn(&Mat) -> Mat + Send + Sync + 'static,
    {
        let k: Projection = Arc::new(proj_k);
        let g = self.proj_g.clone();
        let k2 = k.clone();
        self.m_norm1 = projection_norm1(self.n, &move |x: &Mat| g(x) - k2(x));
        self.proj_k = Some(k);
        self
    }

    /// `𝔤 = 𝔤𝔩(n)`, `𝔞 = 𝔰𝔬(n)`.
    pub fn gl(n: usize) -> Self {
        Self {
            n,
            proj_g: Arc::new(|x: &Mat| x.clone()),
            proj_a: Arc::new(skew),
            proj_k: None,
            a_norm1: 1.0,
            m_norm1: 1.0,
        }
    }

    /// `𝔤 = 𝔤𝔩(n)`, `𝔞` = matrices supported on the top `k × k` block.
    /// Panics if `k > n`.
    pub fn gl_top_block(n: usize, k: usize) -> Self {
        Self {
            n,
            proj_g: Arc::new(|x: &Mat| x.clone()),
            proj_a: Arc::new(move |x: &Mat| mask_block(x, 0, k)),
            proj_k: None,
            a_norm1: 1.0,
            m_norm1: 1.0,
        }
    }

    /// `𝔤 = 𝔰𝔬(n)`, `𝔞` = `𝔰𝔬(d)` embedded in the top `d × d` block.
    /// Panics if `d > n`.
    pub fn so_top_block(n: usize, d: usize) -> Self {
        Self {
            n,
            proj_g: Arc::new(skew),
            proj_a: Arc::new(move |x: &Mat| mask_block(&skew(x), 0, d)),
            proj_k: None,
            a_norm1: 1.0,
            m_norm1: 1.0,
        }
    }

    /// SO(n) split with `𝔨 = 𝔰𝔬(n − d)` in the bottom block: St(n, d) = SO(n)/K.
    pub fn stiefel_quotient(n: usize, d: usize) -> Self {
        let mut s = Self::so_top_block(n, d);
        s.proj_k = Some(Arc::new(move |x: &Mat| mask_block(&skew(x), d, n)));
        s
    }

    /// SO(n) split whose `𝔨` is `𝔰𝔬(d₁) ⊕ … ⊕ 𝔰𝔬(d_p) ⊕ 𝔰𝔬(n − d)`.
    pub fn flag_quotient(n: usize, d_list: &[usize]) -> Self {
        let d: usize = d_list.iter().sum();
        let mut bounds = Vec::with_capacity(d_list.len() + 1);
        let mut lo = 0;
        for &di in d_list {
            bounds.push((lo, lo + di));
            lo += di;
        }
        bounds.push((d, n));
        let mut s = Self::so_top_block(n, d);
        s.proj_k = Some(Arc::new(move |x: &Mat| {
            let sk = skew(x);
            let mut out = Mat::zeros(n, n);
            for &(lo, hi) in &bounds {
                out += mask_block(&sk, lo, hi);
            }
            out
        }));
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn proj_g(&self, x: &Mat) -> Mat {
        (self.proj_g)(x)
    }

    pub fn proj_a(&self, x: &Mat) -> Mat {
        (self.proj_a)(x)
    }

    /// Projection onto `𝔨`; zero when no quotient subalgebra is attached.
    pub fn proj_k(&self, x: &Mat) -> Mat {
        match &self.proj_k {
            Some(k) => k(x),
            None => Mat::zeros(x.nrows(), x.ncols()),
        }
    }

    /// Projection onto `𝔪 = 𝔤 ⊖ 𝔨`.
    pub fn proj_m(&self, x: &Mat) -> Mat {
        match &self.proj_k {
            Some(k) => (self.proj_g)(x) - k(x),
            None => (self.proj_g)(x),
        }
    }

    pub fn has_k(&self) -> bool {
        self.proj_k.is_some()
    }

    pub(crate) fn a_norm1(&self) -> f64 {
        self.a_norm1
    }

    pub(crate) fn m_norm1(&self) -> f64 {
        self.m_norm1
    }

    /// Is `x ∈ 𝔤` to the membership tolerance `tol`?
    pub fn check_in_g(&self, x: &Mat, tol: f64, what: &str) -> Result<()> {
        if x.shape() != (self.n, self.n) {
            return Err(dim_err!(
                "{what} is {}x{}, algebra lives in {}x{}",
                x.nrows(),
                x.ncols(),
                self.n,
                self.n
            ));
        }
        let r = rel_residual(x, &self.proj_g(x));
        if r > tol {
            return Err(invalid!(
                "{what} is not in the Lie algebra (residual {r:.3e})"
            ));
        }
        Ok(())
    }
}

fn ensure_same_square(a: &Mat, b: &Mat) -> Result<()> {
    ensure_square(a, "first argument")?;
    if a.shape() != b.shape() {
        return Err(dim_err!(
            "arguments are {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        ));
    }
    Ok(())
}

/// `Tr(ab)`.
pub fn trace_form(a: &Mat, b: &Mat) -> Result<f64> {
    ensure_same_square(a, b)?;
    // Tr(ab) = Σ a_ij b_ji without forming the product.
    Ok(a.dot(&b.transpose()))
}

/// `Tr(a bᵀ)`.
pub fn frobenius_form(a: &Mat, b: &Mat) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(dim_err!(
            "arguments are {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        ));
    }
    Ok(a.dot(b))
}

/// `β₀(Tr hg − Tr h_𝔞 g_𝔞) − β₁ Tr h_𝔞 g_𝔞` for `g, h ∈ 𝔤`.
pub fn beta_form(g: &Mat, h: &Mat, split: &AlgebraSplit, params: &MetricParams) -> Result<f64> {
    split.check_in_g(g, MEMBERSHIP_TOL, "g")?;
    split.check_in_g(h, MEMBERSHIP_TOL, "h")?;
    Ok(beta_form_unchecked(g, h, split, params))
}

pub(crate) fn beta_form_unchecked(
    g: &Mat,
    h: &Mat,
    split: &AlgebraSplit,
    params: &MetricParams,
) -> f64 {
    let ga = split.proj_a(g);
    let ha = split.proj_a(h);
    let tr = |x: &Mat, y: &Mat| x.dot(&y.transpose());
    let taa = tr(&ha, &ga);
    params.beta0 * (tr(h, g) - taa) - params.beta1 * taa
}

/// Projection of `w` onto `span(v_basis)` orthogonal under a possibly
/// indefinite symmetric `form`, via the dual basis from the Gram matrix.
pub fn gram_projection<F>(v_basis: &[Mat], w: &Mat, form: F) -> Result<Mat>
where
    F: Fn(&Mat, &Mat) -> f64,
{
    let k = v_basis.len();
    if k == 0 {
        return Ok(Mat::zeros(w.nrows(), w.ncols()));
    }
    for v in v_basis {
        if v.shape() != w.shape() {
            return Err(dim_err!("basis element and w differ in shape"));
        }
    }
    let gram = Mat::from_fn(k, k, |i, j| form(&v_basis[i], &v_basis[j]));
    let rhs = nalgebra::DVector::from_fn(k, |i, _| form(&v_basis[i], w));
    let sv = gram.clone().singular_values();
    let smax = sv.max();
    if smax == 0.0 || sv.min() <= 1e-12 * smax {
        return Err(Error::DegenerateSubspace);
    }
    let coef = gram.lu().solve(&rhs).ok_or(Error::DegenerateSubspace)?;
    let mut out = Mat::zeros(w.nrows(), w.ncols());
    for (c, v) in coef.iter().zip(v_basis) {
        out += v * *c;
    }
    Ok(out)
}

/// Dense `n² × n²` matrix of a linear map on `ℝ^{n×n}`, column-major vec.
pub fn dense_map(n: usize, f: &dyn Fn(&Mat) -> Mat) -> Mat {
    let nn = n * n;
    let mut out = Mat::zeros(nn, nn);
    let mut e = Mat::zeros(n, n);
    for j in 0..nn {
        e[j] = 1.0;
        out.column_mut(j).copy_from_slice(f(&e).as_slice());
        e[j] = 0.0;
    }
    out
}

/// Orthonormal basis (as columns) of the range of a dense matrix.
fn range_basis(m: &Mat, rel_tol: f64) -> Mat {
    if m.ncols() == 0 {
        return Mat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > rel_tol * smax)
        .collect();
    Mat::from_fn(m.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

fn unvec(n: usize, col: nalgebra::DVectorView<'_, f64>) -> Mat {
    Mat::from_column_slice(n, n, col.as_slice())
}

/// Dense projectors onto `𝔞_⊥`, `𝔞_⋈` and `𝔞_⊤`.
#[derive(Debug, Clone)]
pub struct SplitComponents {
    n: usize,
    perp: Mat,
    join: Mat,
    top: Mat,
}

impl SplitComponents {
    fn apply(&self, p: &Mat, x: &Mat) -> Mat {
        let v = p * nalgebra::DVector::from_column_slice(x.as_slice());
        Mat::from_column_slice(self.n, self.n, v.as_slice())
    }

    pub fn proj_a_perp(&self, x: &Mat) -> Mat {
        self.apply(&self.perp, x)
    }

    pub fn proj_a_join(&self, x: &Mat) -> Mat {
        self.apply(&self.join, x)
    }

    pub fn proj_a_top(&self, x: &Mat) -> Mat {
        self.apply(&self.top, x)
    }

    /// Dense projector onto `𝔞_⊤`, e.g. to build the split with `𝔞_⊤` as subalgebra.
    pub fn top_matrix(&self) -> &Mat {
        &self.top
    }

    /// `(dim 𝔞_⊥, dim 𝔞_⋈, dim 𝔞_⊤)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        let rank = |p: &Mat| libm::round(p.trace()) as usize;
        (rank(&self.perp), rank(&self.join), rank(&self.top))
    }
}

/// Builds `𝔞_⊥ = 𝔤 ⊖ 𝔞`, `𝔞_⋈ = span [𝔞, 𝔞_⊥]` and `𝔞_⊤ = 𝔞_⊥ ⊖ 𝔞_⋈`.
///
/// Dense in `n²`, meant for small `n`.
pub fn derive_split_components(split: &AlgebraSplit) -> SplitComponents {
    let n = split.n();
    let pg = dense_map(n, &|x| split.proj_g(x));
    let pa = dense_map(n, &|x| split.proj_a(x));
    let perp = &pg - &pa;
    let basis_a = range_basis(&pa, 1e-10);
    let basis_perp = range_basis(&perp, 1e-10);
    let mut brackets = Mat::zeros(n * n, basis_a.ncols() * basis_perp.ncols());
    let mut col = 0;
    for i in 0..basis_a.ncols() {
        let a = unvec(n, basis_a.column(i));
        for j in 0..basis_perp.ncols() {
            let b = unvec(n, basis_perp.column(j));
            let c = &a * &b - &b * &a;
            brackets.column_mut(col).copy_from_slice(c.as_slice());
            col += 1;
        }
    }
    let join = if brackets.ncols() == 0 {
        Mat::zeros(n * n, n * n)
    } else {
        let q = pivoted_range(&brackets, 1e-10);
        &q * q.transpose()
    };
    let top = &perp - &join;
    SplitComponents { n, perp, join, top }
}

/// Orthonormal range basis by column-pivoted QR with rank cut at
/// `rel_tol · (largest column norm)`.
fn pivoted_range(m: &Mat, rel_tol: f64) -> Mat {
    let max_col = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_col == 0.0 {
        return Mat::zeros(m.nrows(), 0);
    }
    let qr = m.clone().col_piv_qr();
    let r = qr.r();
    let k = (0..r.nrows().min(r.ncols()))
        .take_while(|&i| r[(i, i)].abs() > rel_tol * max_col)
        .count();
    let q = qr.q();
    q.columns(0, k).into_owned()
}

/// Which of the four eigenspaces of `𝓘_β` an eigenvalue belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eigenspace {
    PerpSym,
    PerpSkew,
    ASym,
    ASkew,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenBlock {
    pub space: Eigenspace,
    pub dim: usize,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricSignature {
    Riemannian,
    PseudoRiemannian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignatureSummary {
    pub signature: MetricSignature,
    pub blocks: [EigenBlock; 4],
    /// Extreme eigenvalues of `𝓘_β` on `𝔤` from a dense symmetric eigensolve.
    pub numeric_min: f64,
    pub numeric_max: f64,
}

/// Eigen-analysis of `𝓘_β = (β₀(I − p_𝔞) − β₁ p_𝔞)∘T` restricted to `𝔤`.
///
/// `⟨g, h⟩_β = ⟨g, 𝓘_β h⟩_F`, so the metric is Riemannian iff every
/// eigenvalue present is positive.
pub fn classify_metric_signature(split: &AlgebraSplit, params: &MetricParams) -> SignatureSummary {
    let n = split.n();
    let pg = dense_map(n, &|x| split.proj_g(x));
    let pa = dense_map(n, &|x| split.proj_a(x));
    let psym = dense_map(n, &|x| crate::mat::sym(x));
    let pskew = dense_map(n, &|x| skew(x));
    let perp = &pg - &pa;
    let rank = |p: Mat| libm::round(p.trace()) as usize;
    let b0 = params.beta0();
    let b1 = params.beta1();
    let blocks = [
        EigenBlock {
            space: Eigenspace::PerpSym,
            dim: rank(&perp * &psym),
            eigenvalue: b0,
        },
        EigenBlock {
            space: Eigenspace::PerpSkew,
            dim: rank(&perp * &pskew),
            eigenvalue: -b0,
        },
        EigenBlock {
            space: Eigenspace::ASym,
            dim: rank(&pa * &psym),
            eigenvalue: -b1,
        },
        EigenBlock {
            space: Eigenspace::ASkew,
            dim: rank(&pa * &pskew),
            eigenvalue: b1,
        },
    ];
    let riemannian = blocks.iter().all(|b| b.dim == 0 || b.eigenvalue > 0.0);

    let basis = range_basis(&pg, 1e-10);
    let op = dense_map(n, &|x| {
        let xt = x.transpose();
        (&xt - split.proj_a(&xt)) * b0 - split.proj_a(&xt) * b1
    });
    let restricted = basis.transpose() * op * &basis;
    let (numeric_min, numeric_max) = if restricted.nrows() == 0 {
        (0.0, 0.0)
    } else {
        let ev = crate::mat::sym(&restricted).symmetric_eigenvalues();
        (ev.min(), ev.max())
    };
    SignatureSummary {
        signature: if riemannian {
            MetricSignature::Riemannian
        } else {
            MetricSignature::PseudoRiemannian
        },
        blocks,
        numeric_min,
        numeric_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::bracket;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, n: usize) -> Mat {
        Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn e(n: usize, i: usize, j: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        m[(i, j)] = 1.0;
        m
    }

    #[test]
    fn trace_and_frobenius_examples() {
        let i3 = Mat::identity(3, 3);
        assert_eq!(trace_form(&i3, &i3).unwrap(), 3.0);
        let mut u = Mat::zeros(3, 3);
        u[(0, 1)] = 2.0;
        u[(0, 2)] = -1.0;
        u[(1, 2)] = 5.0;
        assert_eq!(trace_form(&u, &u).unwrap(), 0.0);
        assert_eq!(frobenius_form(&e(2, 0, 1), &e(2, 0, 1)).unwrap(), 1.0);
        assert!(trace_form(&i3, &Mat::identity(2, 2)).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b, c) = (
            rand_mat(&mut rng, 4),
            rand_mat(&mut rng, 4),
            rand_mat(&mut rng, 4),
        );
        let lhs = trace_form(&bracket(&a, &b), &c).unwrap();
        let rhs = trace_form(&b, &bracket(&c, &a)).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        let f = frobenius_form(&a, &b).unwrap();
        assert!((f - trace_form(&a, &b.transpose()).unwrap()).abs() < 1e-13);
        assert!((frobenius_form(&a, &a).unwrap() - a.norm_squared()).abs() < 1e-13);
    }

    #[test]
    fn gram_projection_examples() {
        let frob = |a: &Mat, b: &Mat| a.dot(b);
        let basis = [e(2, 0, 0), e(2, 1, 1)];
        let w = Mat::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let p = gram_projection(&basis, &w, frob).unwrap();
        assert_eq!(p, Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]));

        let tr = |a: &Mat, b: &Mat| (a * b).trace();
        let basis = [e(2, 0, 1), e(2, 1, 0)];
        let w = e(2, 0, 1) + e(2, 0, 0);
        let p = gram_projection(&basis, &w, tr).unwrap();
        assert!((p - e(2, 0, 1)).norm() < 1e-15);

        let inside = e(2, 0, 1) * 2.0 - e(2, 1, 0);
        let p = gram_projection(&basis, &inside, tr).unwrap();
        assert!((p - inside).norm() < 1e-12);

        // Strictly upper triangular span is null under the trace form.
        let basis = [e(3, 0, 1), e(3, 0, 2)];
        assert_eq!(
            gram_projection(&basis, &w3(), tr),
            Err(Error::DegenerateSubspace)
        );
    }

    fn w3() -> Mat {
        Mat::identity(3, 3)
    }

    #[test]
    fn trace_and_frobenius_projections_agree_on_transposable_spaces() {
        // span{E12 + E21, E12 − E21, E33} is closed under transpose.
        let basis = [e(3, 0, 1) + e(3, 1, 0), e(3, 0, 1) - e(3, 1, 0), e(3, 2, 2)];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let w = rand_mat(&mut rng, 3);
            let pf = gram_projection(&basis, &w, |a, b| a.dot(b)).unwrap();
            let pt = gram_projection(&basis, &w, |a, b| (a * b).trace()).unwrap();
            assert!((pf - pt).norm() < 1e-12);
        }
    }

    #[test]
    fn beta_form_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let split = AlgebraSplit::gl(3);
        let p = MetricParams::gl(0.7).unwrap();
        let g = skew(&rand_mat(&mut rng, 3));
        let v = beta_form(&g, &g, &split, &p).unwrap();
        assert!((v - (-0.7 * (&g * &g).trace())).abs() < 1e-13);

        let p = MetricParams::new(2.0, -2.0).unwrap();
        let (g, h) = (rand_mat(&mut rng, 3), rand_mat(&mut rng, 3));
        let v = beta_form(&g, &h, &split, &p).unwrap();
        assert!((v - 2.0 * (&h * &g).trace()).abs() < 1e-12);

        let so = AlgebraSplit::so_top_block(3, 2);
        assert!(matches!(
            beta_form(&h, &h, &so, &p),
            Err(Error::Validation(_))
        ));
        assert!(MetricParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn split_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let splits = [
            AlgebraSplit::gl(4),
            AlgebraSplit::gl_top_block(4, 2),
            AlgebraSplit::so_top_block(5, 2),
            AlgebraSplit::flag_quotient(6, &[1, 2]),
        ];
        for s in &splits {
            for _ in 0..4 {
                let x = rand_mat(&mut rng, s.n());
                let y = rand_mat(&mut rng, s.n());
                let pa = s.proj_a(&x);
                assert!((s.proj_a(&pa) - &pa).norm() < 1e-13);
                assert!((s.proj_a(&x.transpose()) - pa.transpose()).norm() < 1e-13);
                assert!((s.proj_a(&s.proj_g(&x)) - &pa).norm() < 1e-13);
                let gg = bracket(&s.proj_g(&x), &s.proj_g(&y));
                assert!((s.proj_g(&gg) - &gg).norm() < 1e-12);
                let aa = bracket(&pa, &s.proj_a(&y));
                assert!((s.proj_a(&aa) - &aa).norm() < 1e-12);
                let pk = s.proj_k(&x);
                assert!((s.proj_k(&x.transpose()) - pk.transpose()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn block_split_components() {
        let (n, k) = (4, 1);
        let split = AlgebraSplit::gl_top_block(n, k);
        let comps = derive_split_components(&split);
        assert_eq!(comps.dims(), (15, 6, 9));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = rand_mat(&mut rng, n);
        let bottom = mask_block(&x, k, n);
        assert!((comps.proj_a_top(&x) - &bottom).norm() < 1e-12);
        let off = &x - mask_block(&x, 0, k) - &bottom;
        assert!((comps.proj_a_join(&x) - off).norm() < 1e-12);
        let total = split.proj_a(&x) + comps.proj_a_join(&x) + comps.proj_a_top(&x);
        assert!((total - split.proj_g(&x)).norm() < 1e-12);

        // (𝔞_⊤)_⊤ = 𝔞.
        let top = comps.top_matrix().clone();
        let flipped = AlgebraSplit::new(
            n,
            |x: &Mat| x.clone(),
            move |x: &Mat| {
                let v = &top * nalgebra::DVector::from_column_slice(x.as_slice());
                Mat::from_column_slice(n, n, v.as_slice())
            },
        );
        let back = derive_split_components(&flipped);
        assert!((back.proj_a_top(&x) - mask_block(&x, 0, k)).norm() < 1e-10);
    }

    #[test]
    fn so_split_components() {
        let (n, d) = (5, 2);
        let split = AlgebraSplit::so_top_block(n, d);
        let comps = derive_split_components(&split);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = skew(&rand_mat(&mut rng, n));
        assert!((comps.proj_a_top(&x) - mask_block(&x, d, n)).norm() < 1e-12);
        let a = split.proj_a(&skew(&rand_mat(&mut rng, n)));
        let top = comps.proj_a_top(&x);
        assert!(bracket(&a, &top).norm() < 1e-12);
    }

    #[test]
    fn module_and_aperp_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for split in [AlgebraSplit::gl(4), AlgebraSplit::so_top_block(5, 3)] {
            let comps = derive_split_components(&split);
            for _ in 0..5 {
                let x = split.proj_g(&rand_mat(&mut rng, split.n()));
                let y = split.proj_g(&rand_mat(&mut rng, split.n()));
                let a = split.proj_a(&x);
                let b = comps.proj_a_perp(&y);
                assert!(split.proj_a(&bracket(&a, &b)).norm() < 1e-12);
                let c = bracket(&split.proj_a(&x), &y) + bracket(&split.proj_a(&y), &x);
                assert!(split.proj_a(&c).norm() < 1e-12);
                assert!(comps.proj_a_top(&c).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn signature_examples() {
        let so = AlgebraSplit::so_top_block(5, 2);
        let s = classify_metric_signature(&so, &MetricParams::from_alpha(0.8).unwrap());
        assert_eq!(s.signature, MetricSignature::Riemannian);
        assert!(s.numeric_min > 0.0);

        let gl = AlgebraSplit::gl(3);
        let s = classify_metric_signature(&gl, &MetricParams::gl(0.5).unwrap());
        assert_eq!(s.signature, MetricSignature::Riemannian);
        assert!((s.numeric_min - 0.5).abs() < 1e-12 && (s.numeric_max - 1.0).abs() < 1e-12);

        let s = classify_metric_signature(&gl, &MetricParams::gl(-0.5).unwrap());
        assert_eq!(s.signature, MetricSignature::PseudoRiemannian);
        let skew_block = s
            .blocks
            .iter()
            .find(|b| b.space == Eigenspace::ASkew)
            .unwrap();
        assert_eq!(skew_block.dim, 3);
        assert_eq!(skew_block.eigenvalue, -0.5);
        assert!((s.numeric_min + 0.5).abs() < 1e-12);
    }

    #[test]
    fn nondegenerate_trace_gram_on_g() {
        for split in [AlgebraSplit::gl(3), AlgebraSplit::so_top_block(4, 2)] {
            let n = split.n();
            let pg = dense_map(n, &|x| split.proj_g(x));
            let basis = range_basis(&pg, 1e-10);
            let mats: Vec<Mat> = (0..basis.ncols())
                .map(|j| unvec(n, basis.column(j)))
                .collect();
            let gram = Mat::from_fn(mats.len(), mats.len(), |i, j| (&mats[i] * &mats[j]).trace());
            let sv = gram.singular_values();
            assert!(sv.min() > 1e-8 * sv.max());
        }
    }
}
