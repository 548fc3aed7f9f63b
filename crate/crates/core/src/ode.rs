//! Adaptive Dormand–Prince 5(4) integrator on matrix-valued states.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::mat::Mat;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_steps: 1_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(invalid!("tolerances must be positive"));
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combo(y: &Mat, h: f64, coef: &[f64], ks: &[Mat]) -> Mat {
    let mut out = y.clone();
    for (c, k) in coef.iter().zip(ks) {
        if *c != 0.0 {
            out += k * (h * c);
        }
    }
    out
}

fn scaled_norm(err: &Mat, y0: &Mat, y1: &Mat, opt: &OdeOptions) -> f64 {
    let n = err.len().max(1) as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| {
            let sc = opt.abs_tol + opt.rel_tol * a.abs().max(b.abs());
            let r = e / sc;
            r * r
        })
        .sum();
    libm::sqrt(sum / n)
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns `y` at each point of
/// `t_out`, which must be monotone in one direction away from `t0`.
pub fn integrate<F>(f: F, t0: f64, y0: &Mat, t_out: &[f64], opt: &OdeOptions) -> Result<Vec<Mat>>
where
    F: Fn(f64, &Mat) -> Mat,
{
    opt.validate()?;
    let dir = t_out
        .iter()
        .find(|&&t| t != t0)
        .map_or(1.0, |&t| if t > t0 { 1.0 } else { -1.0 });
    let mut prev = t0;
    for &t in t_out {
        if !t.is_finite() || (t - prev) * dir < 0.0 {
            return Err(invalid!(
                "output times must be finite and monotone away from t0"
            ));
        }
        prev = t;
    }

    let mut out = Vec::with_capacity(t_out.len());
    let mut t = t0;
    let mut y = y0.clone();
    let mut k1 = f(t, &y);
    let mut h = initial_step(&y, &k1, t_out.last().map_or(0.0, |&e| (e - t0).abs()), opt);
    let mut steps = 0usize;

    for &target in t_out {
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opt.max_steps {
                return Err(Error::Integration {
                    t,
                    reason: "step budget exhausted",
                });
            }
            let remaining = (target - t).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h } * dir;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::Integration {
                    t,
                    reason: "step size underflow",
                });
            }
            let mut ks: Vec<Mat> = Vec::with_capacity(7);
            ks.push(k1.clone());
            ks.push(f(t + C[1] * hs, &combo(&y, hs, &A2, &ks)));
            ks.push(f(t + C[2] * hs, &combo(&y, hs, &A3, &ks)));
            ks.push(f(t + C[3] * hs, &combo(&y, hs, &A4, &ks)));
            ks.push(f(t + C[4] * hs, &combo(&y, hs, &A5, &ks)));
            ks.push(f(t + C[5] * hs, &combo(&y, hs, &A6, &ks)));
            let y_new = combo(&y, hs, &B, &ks);
            let t_new = if last { target } else { t + hs };
            let k7 = f(t_new, &y_new);
            ks.push(k7);
            let err = combo(&Mat::zeros(y.nrows(), y.ncols()), hs, &E, &ks);
            let en = scaled_norm(&err, &y, &y_new, opt);
            if !en.is_finite() {
                h *= 0.2;
                continue;
            }
            let factor = if en == 0.0 {
                5.0
            } else {
                0.9 * libm::pow(en, -0.2)
            };
            if en <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = ks.pop().expect("seven stages");
                let proposed = hs.abs() * factor.clamp(0.2, 5.0);
                // Steps truncated at an output time never shrink h.
                h = if last { h.max(proposed) } else { proposed };
            } else {
                h = hs.abs() * factor.clamp(0.2, 1.0);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn initial_step(y: &Mat, f0: &Mat, span: f64, opt: &OdeOptions) -> f64 {
    let scale = |m: &Mat| {
        let n = m.len().max(1) as f64;
        let s: f64 = m
            .iter()
            .zip(y.iter())
            .map(|(v, yy)| {
                let r = v / (opt.abs_tol + opt.rel_tol * yy.abs());
                r * r
            })
            .sum();
        libm::sqrt(s / n)
    };
    let d0 = scale(y);
    let d1 = scale(f0);
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    if span > 0.0 {
        h.min(span)
    } else {
        h
    }
}
