//! Exact finite-n partition functions, cumulant generating functions,
//! large-deviation rate functions and mod-Gaussian predictions for the
//! log-density of β-ensembles.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: log-Gamma (real and complex), polygamma, Binet kernels, Barnes G.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration used by the oracles.
//! * [`ensembles`]: the six classical ensembles, their equilibrium measures,
//!   entropies and the limit constants `E_β`, `σ²_β`, `A_β`.
//! * [`partition`]: Selberg-type closed forms for `log Z_n(β)` and the exact CGF
//!   of the log-density.
//! * [`ldp`]: scaled CGF `Λ(t)` and its Legendre–Fenchel transform.
//! * [`modgauss`]: mod-Gaussian limiting function, tails, Kolmogorov and local limit
//!   predictions, zone-of-control fits.
//! * [`sampler`]: matrix-model samplers (Hermite, Laguerre, circular) and a
//!   Metropolis fallback for every ensemble.
//! * [`stats`]: sample statistics shared by tests and the experiment harness.

// Series coefficients are written with their full published digits, and
// `!(x > 0.0)` is the intended NaN-rejecting form of domain checks.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod ensembles;
pub mod error;
pub mod ldp;
pub mod modgauss;
pub mod partition;
pub mod quadrature;
pub mod sampler;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};

/// Complex scalar used throughout (`re`, `im` components).
pub type ComplexValue = num_complex::Complex64;

pub use ensembles::{BetaParam, EnsembleSpec, SupportDescriptor};
pub use partition::CgfEvaluation;
pub use sampler::{ConfigurationSample, McmcDiagnostics, RngSeed};
