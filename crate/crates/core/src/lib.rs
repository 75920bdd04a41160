//! Iterated Kolmogorov loops: Legendre machinery, exact moment analysis,
//! covariance kernels, the Hankel representation and Monte Carlo sampling.

pub mod cli;
pub mod error;
pub mod hankel;
pub mod kernels;
pub mod legendre;
pub mod linalg;
pub mod moments;
pub mod output;
pub mod poly;
pub mod sampler;
pub mod verify;

pub use error::{Error, Result};
