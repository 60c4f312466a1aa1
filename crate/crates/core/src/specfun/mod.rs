//! Special functions: log-Gamma, polygamma, Binet kernels and Barnes G.
//!
//! All functions are pure and allocation free.

mod barnes;
mod binet;
pub(crate) mod gamma;
mod sum;

pub use barnes::{log_barnes_g_asymptotic, log_barnes_g_asymptotic_with, log_barnes_g_exact, ZETA_PRIME_MINUS_ONE};
pub use binet::{binet_kernel, binet_phi, binet_remainder, stirling_reconstruction};
pub use gamma::{
    ln_gamma, ln_gamma_complex, polygamma, sum_log_gamma, PolygammaOrder, EULER_GAMMA, HALF_LN_2PI, LN_2PI,
};
pub use sum::{CompensatedSum, ComplexCompensatedSum};
