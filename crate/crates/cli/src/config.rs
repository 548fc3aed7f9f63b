use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Manifold {
    Stiefel,
    Flag,
    Grassmann,
    So,
    Gl,
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Manifold::Stiefel => "stiefel",
            Manifold::Flag => "flag",
            Manifold::Grassmann => "grassmann",
            Manifold::So => "so",
            Manifold::Gl => "gl",
        })
    }
}

/// One experiment. `d` is ignored for `gl` and replaced by the sum of `d_list`
/// for `flag`; `alpha` is ignored for `grassmann`, whose metric does not depend on it.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub manifold: Manifold,
    pub n: usize,
    pub d: usize,
    pub d_list: Option<Vec<usize>>,
    pub alpha: f64,
    pub beta: f64,
    pub t_grid: Vec<f64>,
    pub num_vectors: usize,
    pub seed: u64,
    pub repeats: usize,
    pub output_path: Option<PathBuf>,
}

impl BenchConfig {
    pub fn new(manifold: Manifold, n: usize, d: usize) -> Self {
        Self {
            manifold,
            n,
            d,
            d_list: None,
            alpha: 0.5,
            beta: 1.0,
            t_grid: vec![1.0],
            num_vectors: 20,
            seed: 42,
            repeats: 5,
            output_path: None,
        }
    }

    /// Block sizes of the flag; a Stiefel-like manifold has the single block `[d]`.
    pub fn blocks(&self) -> Vec<usize> {
        self.d_list.clone().unwrap_or_else(|| vec![self.d])
    }

    /// The column count of a point: `n` for groups, `d` otherwise.
    pub fn point_cols(&self) -> usize {
        match self.manifold {
            Manifold::So | Manifold::Gl => self.n,
            Manifold::Flag => self.blocks().iter().sum(),
            _ => self.d,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.t_grid.is_empty() {
            return bad("t grid is empty".into());
        }
        if self.t_grid.iter().any(|t| !t.is_finite()) {
            return bad("t grid has non-finite entries".into());
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("t grid must be strictly increasing".into());
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        match self.manifold {
            Manifold::Gl => {
                if !(self.beta.is_finite() && self.beta != 0.0) {
                    return bad(format!("gl needs a finite nonzero beta, got {}", self.beta));
                }
            }
            _ => {
                if !(self.alpha.is_finite() && self.alpha > 0.0) {
                    return bad(format!("alpha must be positive, got {}", self.alpha));
                }
            }
        }
        match self.manifold {
            Manifold::Stiefel | Manifold::Grassmann => {
                if self.d == 0 || self.d >= self.n {
                    return bad(format!(
                        "{} needs 0 < d < n, got n={} d={}",
                        self.manifold, self.n, self.d
                    ));
                }
            }
            Manifold::So => {
                if self.d == 0 || self.d > self.n || self.n < 2 {
                    return bad(format!(
                        "so needs n >= 2 and 0 < d <= n, got n={} d={}",
                        self.n, self.d
                    ));
                }
            }
            Manifold::Flag => {
                let blocks = self.blocks();
                let sum: usize = blocks.iter().sum();
                if blocks.contains(&0) || sum == 0 || sum >= self.n {
                    return bad(format!(
                        "flag needs positive blocks summing below n, got {blocks:?} with n={}",
                        self.n
                    ));
                }
                if self.alpha != 0.5 {
                    return bad("flag transport has a closed form only for alpha = 0.5".into());
                }
            }
            Manifold::Gl => {}
        }
        Ok(())
    }
}
