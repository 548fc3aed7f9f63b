//! Seeded random instances: base points, unit velocities and tangent sets
//! with prescribed integer lengths.

use manitrans_core::flag_grassmann::{flag_horizontal_project, FlagSignature};
use manitrans_core::mat::skew;
use manitrans_core::stiefel::{project_tangent, StiefelMetricParams, StiefelPoint};
use manitrans_core::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{BenchConfig, Manifold};
use crate::BenchError;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Orthonormal columns, `Q` of a Gaussian matrix with the sign of `R`'s diagonal fixed.
pub fn orthonormal(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Mat {
    let qr = gaussian(rng, n, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn rotation(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let mut q = orthonormal(rng, n, n);
    if q.clone().lu().determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// A sampled manifold point with a metric and a tangent projection.
pub struct Instance {
    pub config: BenchConfig,
    pub point: Mat,
    stiefel: Option<StiefelPoint>,
    flag: Option<FlagSignature>,
}

impl Instance {
    pub fn new(config: &BenchConfig, rng: &mut ChaCha8Rng) -> Result<Self, BenchError> {
        config.validate()?;
        let n = config.n;
        let (point, stiefel, flag) = match config.manifold {
            Manifold::Gl => loop {
                let x = Mat::identity(n, n) + gaussian(rng, n, n) * (0.5 / (n as f64).sqrt());
                if x.clone().lu().determinant() > 0.0 {
                    break (x, None, None);
                }
            },
            Manifold::So => (rotation(rng, n), None, None),
            Manifold::Stiefel | Manifold::Grassmann | Manifold::Flag => {
                let y = orthonormal(rng, n, config.point_cols());
                let sp = StiefelPoint::new(y.clone())?;
                let flag = match config.manifold {
                    Manifold::Flag => Some(FlagSignature::new(&config.blocks(), n)?),
                    _ => None,
                };
                (y, Some(sp), flag)
            }
        };
        Ok(Self {
            config: config.clone(),
            point,
            stiefel,
            flag,
        })
    }

    pub fn stiefel_point(&self) -> Option<&StiefelPoint> {
        self.stiefel.as_ref()
    }

    pub fn flag_signature(&self) -> Option<&FlagSignature> {
        self.flag.as_ref()
    }

    fn stiefel_params(&self) -> StiefelMetricParams {
        let alpha = match self.config.manifold {
            Manifold::Grassmann => 0.5,
            _ => self.config.alpha,
        };
        StiefelMetricParams::new(alpha).expect("validated alpha")
    }

    /// Projection of an ambient matrix to the tangent (or horizontal) space at `point`.
    pub fn project(&self, w: &Mat) -> Result<Mat, BenchError> {
        project_at(&self.config, &self.point, self.flag.as_ref(), w)
    }

    /// The metric at `x`, a point of the same manifold.
    pub fn metric_at(&self, x: &Mat, u: &Mat, v: &Mat) -> f64 {
        let c = &self.config;
        match c.manifold {
            Manifold::Gl => {
                let xinv = x.clone().try_inverse().expect("GL point is invertible");
                let (a, b) = (&xinv * u, &xinv * v);
                a.dot(&b) + (c.beta - 1.0) * skew(&a).dot(&skew(&b))
            }
            Manifold::So => {
                let (a, b) = (x.transpose() * u, x.transpose() * v);
                let d = c.d;
                0.5 * a.dot(&b)
                    + (c.alpha - 0.5) * a.view((0, 0), (d, d)).dot(&b.view((0, 0), (d, d)))
            }
            _ => {
                let alpha = self.stiefel_params().alpha();
                let (yu, yv) = (x.transpose() * u, x.transpose() * v);
                u.dot(v) + (alpha - 1.0) * yu.dot(&yv)
            }
        }
    }

    /// Gram matrix of `vs` under the metric at `x`, reducing each vector once.
    pub fn gram_at(&self, x: &Mat, vs: &[Mat]) -> Mat {
        let c = &self.config;
        let reduced: Vec<Mat> = match c.manifold {
            Manifold::Gl => {
                let lu = x.clone().lu();
                vs.iter()
                    .map(|v| lu.solve(v).expect("GL point is invertible"))
                    .collect()
            }
            _ => vs.iter().map(|v| x.transpose() * v).collect(),
        };
        let k = vs.len();
        let mut g = Mat::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let (a, b) = (&reduced[i], &reduced[j]);
                let val = match c.manifold {
                    Manifold::Gl => a.dot(b) + (c.beta - 1.0) * skew(a).dot(&skew(b)),
                    Manifold::So => {
                        let d = c.d;
                        0.5 * a.dot(b)
                            + (c.alpha - 0.5) * a.view((0, 0), (d, d)).dot(&b.view((0, 0), (d, d)))
                    }
                    _ => vs[i].dot(&vs[j]) + (self.stiefel_params().alpha() - 1.0) * a.dot(b),
                };
                g[(i, j)] = val;
                g[(j, i)] = val;
            }
        }
        g
    }

    pub fn metric(&self, u: &Mat, v: &Mat) -> f64 {
        self.metric_at(&self.point, u, v)
    }

    /// Gaussian direction projected to the tangent space, scaled to `length`.
    pub fn tangent(&self, rng: &mut ChaCha8Rng, length: f64) -> Result<Mat, BenchError> {
        let (r, c) = self.point.shape();
        loop {
            let v = self.project(&gaussian(rng, r, c))?;
            let norm2 = self.metric(&v, &v);
            if norm2 > 1e-8 {
                return Ok(v * (length / norm2.sqrt()));
            }
        }
    }

    /// `count` tangents with integer lengths drawn uniformly from `[1, 60]`.
    pub fn tangent_set(&self, rng: &mut ChaCha8Rng, count: usize) -> Result<Vec<Mat>, BenchError> {
        (0..count)
            .map(|_| {
                let len = rng.random_range(1..=60u32);
                self.tangent(rng, len as f64)
            })
            .collect()
    }
}

fn project_at(
    c: &BenchConfig,
    x: &Mat,
    flag: Option<&FlagSignature>,
    w: &Mat,
) -> Result<Mat, BenchError> {
    Ok(match c.manifold {
        Manifold::Gl => w.clone(),
        Manifold::So => x * skew(&(x.transpose() * w)),
        Manifold::Stiefel => project_tangent(&StiefelPoint::new(x.clone())?, w)?,
        Manifold::Grassmann => w - x * (x.transpose() * w),
        Manifold::Flag => {
            let sig = flag.expect("flag instance carries its signature");
            flag_horizontal_project(sig, &StiefelPoint::new(x.clone())?, w)?
        }
    })
}
