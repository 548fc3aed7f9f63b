//! Benchmark and verification harness for `manitrans-core`: timing grids,
//! the isometry-drift experiment and oracle sweeps, written as CSV.

pub mod config;
pub mod output;
pub mod runs;
pub mod sample;

pub use config::{BenchConfig, Manifold};
pub use output::write_csv;
pub use runs::{run_isometry, run_timing, run_verify, IsometryRow, TimingRow, VerifyRow};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] manitrans_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl BenchError {
    /// 2 for configuration errors, 3 for failed verification, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Verification(_) => 3,
            BenchError::Core(
                manitrans_core::Error::Dimension(_) | manitrans_core::Error::Validation(_),
            ) => 2,
            _ => 1,
        }
    }
}
