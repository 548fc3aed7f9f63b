//! Horizontal geometry of a quotient `G/K` by right multiplication.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::expaction::matrix_exponential;
use crate::forms::{AlgebraSplit, MetricParams};
use crate::group_core::{sandwich, GroupGeometry, LieTransportOperator, TANGENT_TOL};
use crate::mat::{bracket, rel_residual, solve_left, Mat};
use crate::ode::{integrate, OdeOptions};

const PROBE_SEED: u64 = 0x005e_ed0f_c0de;
const PROBE_TIMES: [f64; 2] = [0.3, 1.1];
const PROBES: usize = 8;

#[derive(Debug, Clone)]
pub struct QuotientGeometry {
    geom: GroupGeometry,
    simplified_ok: bool,
    ode: OdeOptions,
}

impl QuotientGeometry {
    /// `split` carries `𝔨`; without one the quotient is the group itself.
    pub fn new(split: AlgebraSplit, params: MetricParams) -> Result<Self> {
        check_k_split(&split)?;
        let geom = GroupGeometry::new(split, params);
        let mut q = Self {
            geom,
            simplified_ok: false,
            ode: OdeOptions::default(),
        };
        q.simplified_ok = check_simplified_condition(&q);
        Ok(q)
    }

    /// Tolerances for the variable-coefficient fallback.
    pub fn with_ode_options(mut self, ode: OdeOptions) -> Self {
        self.ode = ode;
        self
    }

    pub fn group(&self) -> &GroupGeometry {
        &self.geom
    }

    pub fn simplified_ok(&self) -> bool {
        self.simplified_ok
    }

    fn split(&self) -> &AlgebraSplit {
        self.geom.split()
    }

    /// `X⁻¹ξ`, checked to lie in `𝔪`.
    pub fn horizontal_velocity(&self, x: &Mat, xi: &Mat) -> Result<Mat> {
        let a = self.geom.algebra_velocity(x, xi)?;
        let r = self.split().proj_k(&a).norm() / a.norm().max(1.0);
        if r > TANGENT_TOL {
            return Err(invalid!("vector is not horizontal (vertical part {r:.3e})"));
        }
        Ok(a)
    }
}

fn probe_mat(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

// 𝔨 must be transposable and split as (𝔨 ∩ 𝔞) ⊕ (𝔨 ∩ 𝔞_⊤); the second part
// is probed through its defining property of commuting with 𝔞.
fn check_k_split(split: &AlgebraSplit) -> Result<()> {
    if !split.has_k() {
        return Ok(());
    }
    let n = split.n();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..4 {
        let x = probe_mat(&mut rng, n);
        let k = split.proj_k(&x);
        let scale = x.norm().max(1.0);
        if (split.proj_k(&x.transpose()) - k.transpose()).norm() > 1e-10 * scale {
            return Err(invalid!("k is not closed under transposition"));
        }
        let k_a = split.proj_a(&k);
        if (split.proj_k(&split.proj_a(&x)) - &k_a).norm() > 1e-10 * scale {
            return Err(invalid!("k does not split along a"));
        }
        let a = split.proj_a(&probe_mat(&mut rng, n));
        if bracket(&a, &(k - k_a)).norm() > 1e-10 * scale * a.norm().max(1.0) {
            return Err(invalid!("k ∩ a-complement does not commute with a"));
        }
    }
    Ok(())
}

/// True when `β = −1` or `𝔨 ⊂ 𝔞_⊤`, confirmed by sampling
/// `(U⁻¹[W, a]U)_𝔨 = U⁻¹[W, a]_𝔨 U` on fixed-seed probes.
pub fn check_simplified_condition(q: &QuotientGeometry) -> bool {
    let split = q.split();
    let n = split.n();
    let one_plus_beta = 1.0 + q.geom.params().beta();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED ^ 1);
    let beta_is_minus_one = one_plus_beta.abs() <= 1e-14;
    let k_in_top = (0..PROBES).all(|_| {
        let x = probe_mat(&mut rng, n);
        split.proj_a(&split.proj_k(&x)).norm() <= 1e-13 * x.norm()
    });
    if !(beta_is_minus_one || k_in_top) {
        return false;
    }
    for _ in 0..PROBES {
        let w = split.proj_m(&probe_mat(&mut rng, n));
        let a = split.proj_m(&probe_mat(&mut rng, n));
        let c = bracket(&w, &a);
        for t in PROBE_TIMES {
            let Ok(u) = matrix_exponential(&(split.proj_a(&a) * (t * one_plus_beta))) else {
                return false;
            };
            let (Ok(uc), Ok(ukc)) = (
                solve_left(&u, &(&c * &u)),
                solve_left(&u, &(split.proj_k(&c) * &u)),
            ) else {
                return false;
            };
            let lhs = split.proj_k(&uc);
            if (lhs - ukc).norm() > 1e-10 * c.norm().max(1.0) {
                return false;
            }
        }
    }
    true
}

/// `Γ(ξ, η) − ½X[X⁻¹ξ, X⁻¹η]_𝔨` for horizontal `ξ, η`.
pub fn horizontal_christoffel(q: &QuotientGeometry, x: &Mat, xi: &Mat, eta: &Mat) -> Result<Mat> {
    let a = q.horizontal_velocity(x, xi)?;
    let b = q.horizontal_velocity(x, eta)?;
    let vertical = q.split().proj_k(&bracket(&a, &b)) * 0.5;
    Ok(x * (q.geom.christoffel_algebra(&a, &b) - vertical))
}

/// Horizontal lift of the parallel transport of `η` along the horizontal
/// geodesic from `X` with velocity `ξ`.
pub fn quotient_transport(
    q: &QuotientGeometry,
    x: &Mat,
    xi: &Mat,
    eta: &Mat,
    t: f64,
) -> Result<Mat> {
    if q.simplified_ok {
        let a = q.horizontal_velocity(x, xi)?;
        let b = q.horizontal_velocity(x, eta)?;
        let op = LieTransportOperator::new(q.split(), q.geom.params(), &a, true);
        sandwich(&q.geom, x, &a, &op, &b, t)
    } else {
        quotient_transport_ode(q, x, xi, eta, t)
    }
}

/// The simplified operator `P_a b = ½([b, a]_𝔪 + (1+β)([a_𝔞, b] − [b_𝔞, a]))`.
pub fn horizontal_transport_operator(
    q: &QuotientGeometry,
    a: &Mat,
) -> Result<LieTransportOperator> {
    let r = rel_residual(a, &q.split().proj_m(a));
    if r > TANGENT_TOL {
        return Err(invalid!("operator argument is not in m (residual {r:.3e})"));
    }
    Ok(LieTransportOperator::new(
        q.split(),
        q.geom.params(),
        a,
        true,
    ))
}

/// Transport through the variable-coefficient equation for `W(t)`, valid
/// whether or not the simplified condition holds.
pub fn quotient_transport_ode(
    q: &QuotientGeometry,
    x: &Mat,
    xi: &Mat,
    eta: &Mat,
    t: f64,
) -> Result<Mat> {
    let a = q.horizontal_velocity(x, xi)?;
    let b = q.horizontal_velocity(x, eta)?;
    let split = q.split();
    let c = 1.0 + q.geom.params().beta();
    let a_a = split.proj_a(&a);
    let rhs = |s: f64, w: &Mat| -> Mat {
        let wa = bracket(w, &a);
        let u = matrix_exponential(&(&a_a * (s * c))).expect("finite exponent");
        let inner = solve_left(&u, &(&wa * &u)).expect("exponential is invertible");
        let vertical = &u * split.proj_k(&inner);
        let vertical = solve_left(&u.transpose(), &vertical.transpose())
            .expect("exponential is invertible")
            .transpose();
        (wa - vertical + (bracket(&a_a, w) - bracket(&split.proj_a(w), &a)) * c) * 0.5
    };
    let w = integrate(rhs, 0.0, &b, &[t], &q.ode)?.remove(0);
    let (m1, m2) = {
        let m2 = &a_a * c;
        (&a - &m2, m2)
    };
    Ok(x * matrix_exponential(&(m1 * t))? * w * matrix_exponential(&(m2 * t))?)
}

/// `(γ(t), γ̇(t))` of the horizontal geodesic.
pub fn horizontal_geodesic(q: &QuotientGeometry, x: &Mat, xi: &Mat, t: f64) -> Result<(Mat, Mat)> {
    q.horizontal_velocity(x, xi)?;
    q.geom.geodesic_with_velocity(x, xi, t)
}
