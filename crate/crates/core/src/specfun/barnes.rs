//! Barnes G-function: exact values at integers and the large-z expansion
//! ln G(z+1) ≈ (z²/2) ln z − ¾z² + (z/2) ln 2π − (1/12) ln z + ζ′(−1).

use super::gamma::{ln_gamma_pos, LN_2PI};
use super::sum::CompensatedSum;
use crate::error::{domain, Result};

/// ζ′(−1).
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_929_2;

/// Asymptotic expansion of ln G(z+1) for z ≥ 1.
pub fn log_barnes_g_asymptotic(z: f64) -> Result<f64> {
    log_barnes_g_asymptotic_with(z, ZETA_PRIME_MINUS_ONE)
}

/// Same expansion with a caller-supplied constant in place of ζ′(−1).
pub fn log_barnes_g_asymptotic_with(z: f64, constant: f64) -> Result<f64> {
    if !(z >= 1.0) || !z.is_finite() {
        return Err(domain("log_barnes_g_asymptotic", format!("requires z >= 1, got {z}")));
    }
    let lz = z.ln();
    Ok(0.5 * z * z * lz - 0.75 * z * z + 0.5 * z * LN_2PI - lz / 12.0 + constant)
}

/// ln G(n+1) = Σ_{k=1}^{n−1} ln k! for integer n ≥ 1.
pub fn log_barnes_g_exact(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(domain("log_barnes_g_exact", "requires n >= 1"));
    }
    let s: CompensatedSum = (1..n).map(|k| ln_gamma_pos(k as f64 + 1.0)).collect();
    Ok(s.value())
}
