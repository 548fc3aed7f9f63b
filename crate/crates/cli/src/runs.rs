//! The three experiments: timing grids, isometry drift and oracle verification.

use std::time::Instant;

use manitrans_core::flag_grassmann::{flag_transport_plan, grassmann_transport};
use manitrans_core::forms::{AlgebraSplit, MetricParams};
use manitrans_core::gl_so::{
    gl_geodesic, gl_transport, so_geodesic, so_transport, GLGeometry, SOGeometry,
};
use manitrans_core::mat::sym;
use manitrans_core::ode::OdeOptions;
use manitrans_core::oracle::{
    flag_christoffel_dense, group_christoffel, group_geodesic_curve, integrate_transport,
    stiefel_christoffel_dense, stiefel_geodesic_curve_lifted, transport_residual, Christoffel,
    Curve,
};
use manitrans_core::stiefel::{StiefelMetricParams, StiefelTransportPlan};
use manitrans_core::Mat;
use serde::Serialize;

use crate::config::{BenchConfig, Manifold};
use crate::sample::{rng, Instance};
use crate::BenchError;

/// Largest `n` accepted by [`run_verify`]; the oracle is dense.
pub const ORACLE_MAX_N: usize = 64;
/// Tangency gate on every reported transport.
pub const TANGENCY_TOL: f64 = 1e-9;
pub const ORACLE_TOL: f64 = 1e-6;
pub const RESIDUAL_TOL: f64 = 1e-5;
pub const RESIDUAL_DT: f64 = 1e-3;

/// Closed-form transport along one geodesic.
pub enum Transporter<'a> {
    Stiefel(StiefelTransportPlan),
    Grassmann {
        inst: &'a Instance,
        xi: Mat,
        plan: StiefelTransportPlan,
    },
    So {
        geom: SOGeometry,
        x: &'a Mat,
        xi: Mat,
    },
    Gl {
        geom: GLGeometry,
        x: &'a Mat,
        xi: Mat,
    },
}

impl<'a> Transporter<'a> {
    pub fn new(inst: &'a Instance, xi: &Mat) -> Result<Self, BenchError> {
        let c = &inst.config;
        Ok(match c.manifold {
            Manifold::Stiefel => {
                let p = StiefelMetricParams::new(c.alpha)?;
                Transporter::Stiefel(StiefelTransportPlan::new(
                    inst.stiefel_point().unwrap(),
                    xi,
                    &p,
                )?)
            }
            Manifold::Flag => {
                let sig = inst.flag_signature().unwrap();
                Transporter::Stiefel(flag_transport_plan(sig, inst.stiefel_point().unwrap(), xi)?)
            }
            Manifold::Grassmann => Transporter::Grassmann {
                inst,
                xi: xi.clone(),
                plan: StiefelTransportPlan::new(
                    inst.stiefel_point().unwrap(),
                    xi,
                    &StiefelMetricParams::canonical(),
                )?,
            },
            Manifold::So => Transporter::So {
                geom: SOGeometry::new(c.n, c.d, c.alpha)?,
                x: &inst.point,
                xi: xi.clone(),
            },
            Manifold::Gl => Transporter::Gl {
                geom: GLGeometry::new(c.n, c.beta)?,
                x: &inst.point,
                xi: xi.clone(),
            },
        })
    }

    pub fn geodesic(&self, t: f64) -> Result<Mat, BenchError> {
        Ok(match self {
            Transporter::Stiefel(plan) | Transporter::Grassmann { plan, .. } => plan.geodesic(t)?,
            Transporter::So { geom, x, xi } => so_geodesic(geom, x, xi, t)?,
            Transporter::Gl { geom, x, xi } => gl_geodesic(geom, x, xi, t)?,
        })
    }

    /// Transport of each of `etas` to time `t`; `t = 0` returns the inputs unchanged.
    pub fn transport_many(&self, etas: &[Mat], t: f64) -> Result<Vec<Mat>, BenchError> {
        if t == 0.0 {
            return Ok(etas.to_vec());
        }
        Ok(match self {
            Transporter::Stiefel(plan) => plan.transport_many(etas, t)?,
            Transporter::Grassmann { inst, xi, .. } => etas
                .iter()
                .map(|e| grassmann_transport(inst.stiefel_point().unwrap(), xi, e, t))
                .collect::<Result<_, _>>()?,
            Transporter::So { geom, x, xi } => etas
                .iter()
                .map(|e| so_transport(geom, x, xi, e, t))
                .collect::<Result<_, _>>()?,
            Transporter::Gl { geom, x, xi } => etas
                .iter()
                .map(|e| gl_transport(geom, x, xi, e, t))
                .collect::<Result<_, _>>()?,
        })
    }
}

/// Relative distance of `delta` from the tangent (or horizontal) space at `gamma`.
pub fn tangency_residual(inst: &Instance, gamma: &Mat, delta: &Mat) -> f64 {
    let scale = delta.norm().max(1e-300);
    let m = gamma.transpose() * delta;
    match inst.config.manifold {
        Manifold::Gl => {
            if delta.iter().all(|v| v.is_finite()) {
                0.0
            } else {
                f64::INFINITY
            }
        }
        Manifold::So | Manifold::Stiefel => sym(&m).norm() / scale,
        Manifold::Grassmann => m.norm() / scale,
        Manifold::Flag => {
            let blocks = inst.flag_signature().unwrap().blocks();
            let diag: f64 = blocks
                .iter()
                .map(|&(lo, hi)| m.view((lo, lo), (hi - lo, hi - lo)).norm_squared())
                .sum();
            (sym(&m).norm_squared() + diag).sqrt() / scale
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub manifold: String,
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub t: f64,
    pub median_seconds: f64,
    pub residual_check: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryRow {
    pub manifold: String,
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub t: f64,
    pub max_drift: f64,
    pub log10_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub manifold: String,
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
    pub oracle_error: f64,
    pub transport_residual: f64,
    pub tangency: f64,
    pub pass: bool,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

fn metric_param(c: &BenchConfig) -> f64 {
    match c.manifold {
        Manifold::Gl => c.beta,
        _ => c.alpha,
    }
}

fn d_of(c: &BenchConfig) -> usize {
    match c.manifold {
        Manifold::Gl => c.n,
        _ => c.point_cols(),
    }
}

/// Median wall time of a full transport evaluation (plan construction plus one
/// transport) per `t`, after one warm-up call. Rows whose output fails the
/// tangency gate abort the run.
pub fn run_timing(config: &BenchConfig) -> Result<Vec<TimingRow>, BenchError> {
    config.validate()?;
    let mut r = rng(config.seed);
    let inst = Instance::new(config, &mut r)?;
    let xi = inst.tangent(&mut r, 1.0)?;
    let eta = inst.tangent(&mut r, 1.0)?;
    let mut rows = Vec::with_capacity(config.t_grid.len());
    for &t in &config.t_grid {
        let eval = || -> Result<Mat, BenchError> {
            let tr = Transporter::new(&inst, &xi)?;
            Ok(tr.transport_many(std::slice::from_ref(&eta), t)?.remove(0))
        };
        let out = eval()?;
        let mut times = Vec::with_capacity(config.repeats);
        for _ in 0..config.repeats {
            let start = Instant::now();
            std::hint::black_box(eval()?);
            times.push(start.elapsed().as_secs_f64());
        }
        let gamma = Transporter::new(&inst, &xi)?.geodesic(t)?;
        let check = tangency_residual(&inst, &gamma, &out);
        if !(check <= TANGENCY_TOL) {
            return Err(BenchError::Verification(format!(
                "{} n={} t={t}: transport output off the tangent space ({check:e})",
                config.manifold, config.n
            )));
        }
        rows.push(TimingRow {
            manifold: config.manifold.to_string(),
            n: config.n,
            d: d_of(config),
            alpha: metric_param(config),
            t,
            median_seconds: median(times),
            residual_check: check,
        });
    }
    Ok(rows)
}

/// Gram drift of `num_vectors` tangents with integer lengths in `[1, 60]`
/// transported along a unit-speed geodesic.
pub fn run_isometry(config: &BenchConfig) -> Result<Vec<IsometryRow>, BenchError> {
    config.validate()?;
    let mut r = rng(config.seed);
    let inst = Instance::new(config, &mut r)?;
    let xi = inst.tangent(&mut r, 1.0)?;
    let etas = inst.tangent_set(&mut r, config.num_vectors)?;
    let tr = Transporter::new(&inst, &xi)?;
    let gram0 = inst.gram_at(&inst.point, &etas);
    let mut rows = Vec::with_capacity(config.t_grid.len());
    for &t in &config.t_grid {
        let drift = if t == 0.0 {
            0.0
        } else {
            let gamma = tr.geodesic(t)?;
            let moved = tr.transport_many(&etas, t)?;
            let g = inst.gram_at(&gamma, &moved);
            (g - &gram0).amax()
        };
        rows.push(IsometryRow {
            manifold: config.manifold.to_string(),
            n: config.n,
            d: d_of(config),
            alpha: metric_param(config),
            t,
            max_drift: drift,
            log10_drift: drift.log10(),
        });
    }
    Ok(rows)
}

fn oracle_parts(inst: &Instance, xi: &Mat) -> Result<(Christoffel, Curve), BenchError> {
    let c = &inst.config;
    let x = &inst.point;
    Ok(match c.manifold {
        Manifold::Stiefel => (
            stiefel_christoffel_dense(c.alpha),
            stiefel_geodesic_curve_lifted(x, xi, c.alpha)?,
        ),
        Manifold::Flag | Manifold::Grassmann => {
            let blocks = match inst.flag_signature() {
                Some(sig) => sig.blocks().to_vec(),
                None => vec![(0, c.d)],
            };
            (
                flag_christoffel_dense(0.5, blocks),
                stiefel_geodesic_curve_lifted(x, xi, 0.5)?,
            )
        }
        Manifold::So => {
            let split = AlgebraSplit::so_top_block(c.n, c.d);
            let params = MetricParams::from_alpha(c.alpha)?;
            let curve = group_geodesic_curve(&split, &params, x, xi)?;
            (group_christoffel(split, params), curve)
        }
        Manifold::Gl => {
            let split = AlgebraSplit::gl(c.n);
            let params = MetricParams::gl(c.beta)?;
            let curve = group_geodesic_curve(&split, &params, x, xi)?;
            (group_christoffel(split, params), curve)
        }
    })
}

/// Closed form against the ODE oracle at each `t`: max error over the
/// transported vectors, centered-difference residual at `dt = 1e-3` and tangency.
pub fn run_verify(config: &BenchConfig) -> Result<Vec<VerifyRow>, BenchError> {
    config.validate()?;
    if config.n > ORACLE_MAX_N {
        return Err(BenchError::Config(format!(
            "verify uses a dense oracle; n = {} exceeds {ORACLE_MAX_N}, try a smaller n",
            config.n
        )));
    }
    let mut r = rng(config.seed);
    let inst = Instance::new(config, &mut r)?;
    let xi = inst.tangent(&mut r, 1.0)?;
    let etas: Vec<Mat> = (0..config.num_vectors.max(1))
        .map(|_| inst.tangent(&mut r, 1.0))
        .collect::<Result<_, _>>()?;
    let tr = Transporter::new(&inst, &xi)?;
    let (gamma_fn, curve) = oracle_parts(&inst, &xi)?;
    let ts = &config.t_grid;
    let oracles: Vec<Vec<Mat>> = etas
        .iter()
        .map(|e| integrate_transport(&gamma_fn, &curve, e, 0.0, ts, &OdeOptions::default()))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        let dt = RESIDUAL_DT;
        let samples = [t - dt, t, t + dt];
        let gammas: Vec<(Mat, Mat)> = samples.iter().map(|&s| curve(s)).collect();
        let mut oracle_error = 0.0f64;
        let mut residual = 0.0f64;
        let mut tangency = 0.0f64;
        let here = tr.transport_many(&etas, t)?;
        let lo = tr.transport_many(&etas, t - dt)?;
        let hi = tr.transport_many(&etas, t + dt)?;
        let g = tr.geodesic(t)?;
        for k in 0..etas.len() {
            let scale = oracles[k][i].norm().max(1.0);
            oracle_error = oracle_error.max((&here[k] - &oracles[k][i]).norm() / scale);
            let deltas = [lo[k].clone(), here[k].clone(), hi[k].clone()];
            residual = residual.max(transport_residual(&deltas, &gammas, &gamma_fn, dt)?);
            tangency = tangency.max(tangency_residual(&inst, &g, &here[k]));
        }
        rows.push(VerifyRow {
            manifold: config.manifold.to_string(),
            n: config.n,
            d: d_of(config),
            alpha: config.alpha,
            beta: config.beta,
            t,
            oracle_error,
            transport_residual: residual,
            tangency,
            pass: oracle_error <= ORACLE_TOL
                && residual <= RESIDUAL_TOL
                && tangency <= TANGENCY_TOL,
        });
    }
    Ok(rows)
}
