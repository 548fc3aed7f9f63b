//! Geodesics and parallel transport on matrix Lie groups and their quotients,
//! computed through the exponential action of a linear operator.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
extern crate alloc;

pub mod error;
pub mod expaction;
pub mod flag_grassmann;
pub mod forms;
pub mod gl_so;
pub mod group_core;
pub mod mat;
pub mod ode;
pub mod oracle;
pub mod quotient;
pub mod stiefel;

pub use error::{Error, Result};
pub use expaction::{
    expa, expa_taylor, matrix_exponential, one_norm_exhaustive, select_taylor_params, FnOperator,
    LinearOperator, Precision, TaylorParams,
};
pub use mat::Mat;
