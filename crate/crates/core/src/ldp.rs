//! Scaled CGF Λ_{β,V}(t) = lim (1/n) log E[e^{tℒ_n}] and its Legendre–Fenchel
//! transform, the rate function of ℒ_n/n.
//!
//! Λ_{β,V}(t) = f₀((1+t)β) − (1+t) f₀(β) − tΔ_{H,V}. Root finding for the
//! conjugate works in u = 1 + t, which keeps the steep end near u = 0
//! resolvable down to the smallest normal numbers.

use serde::Serialize;

use crate::ensembles::{f0, f0_prime, f0_second, BetaParam, EnsembleSpec};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFunctionResult {
    pub x: f64,
    /// `f64::INFINITY` outside the effective domain.
    pub value: f64,
    /// Maximiser of t·x − Λ(t); `None` exactly when the value is infinite.
    pub argmax_t: Option<f64>,
}

const MAX_ITER: usize = 80;
const ROOT_TOL: f64 = 1e-11;

fn scaled(beta: BetaParam, u: f64) -> BetaParam {
    BetaParam::new(beta.beta() * u).expect("positive scaled beta")
}

fn check_t(function: &'static str, t: f64) -> Result<()> {
    if t > -1.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(function, format!("requires t > -1, got {t}")))
    }
}

/// Λ_{β,V}(t) for t > −1.
pub fn lambda(spec: &EnsembleSpec, beta: BetaParam, t: f64) -> Result<f64> {
    check_t("lambda", t)?;
    let delta = spec.entropy_shift()?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(f0(scaled(beta, 1.0 + t)) - (1.0 + t) * f0(beta) - t * delta)
}

/// Λ′_{β,V}(t) = β f₀′(β(1+t)) − f₀(β) − Δ_{H,V}.
pub fn lambda_prime(spec: &EnsembleSpec, beta: BetaParam, t: f64) -> Result<f64> {
    check_t("lambda_prime", t)?;
    let delta = spec.entropy_shift()?;
    Ok(lambda_prime_u(beta, delta, 1.0 + t))
}

/// Λ″_{β,V}(t) = β² f₀″(β(1+t)); identical for every ensemble.
pub fn lambda_second(beta: BetaParam, t: f64) -> Result<f64> {
    check_t("lambda_second", t)?;
    Ok(lambda_second_u(beta, 1.0 + t))
}

fn lambda_prime_u(beta: BetaParam, delta: f64, u: f64) -> f64 {
    let b = beta.beta();
    b * f0_prime(b * u) - f0(beta) - delta
}

fn lambda_second_u(beta: BetaParam, u: f64) -> f64 {
    let b = beta.beta();
    b * b * f0_second(b * u)
}

/// lim_{t→∞} Λ′(t) = β/4 − f₀(β) − Δ_{H,V}.
pub fn limiting_slope(spec: &EnsembleSpec, beta: BetaParam) -> Result<f64> {
    Ok(beta.beta() / 4.0 - f0(beta) - spec.entropy_shift()?)
}

/// Λ*(x) = sup_{t > −1} (t x − Λ(t)).
pub fn rate_function(spec: &EnsembleSpec, beta: BetaParam, x: f64) -> Result<RateFunctionResult> {
    if !x.is_finite() {
        return Err(domain("rate_function", format!("x must be finite, got {x}")));
    }
    let delta = spec.entropy_shift()?;
    let slope = beta.beta() / 4.0 - f0(beta) - delta;
    if x >= slope {
        return Ok(RateFunctionResult { x, value: f64::INFINITY, argmax_t: None });
    }
    let g = |u: f64| lambda_prime_u(beta, delta, u) - x;

    let g1 = g(1.0);
    if g1.abs() <= ROOT_TOL {
        // x is the mean value −E_β^V (to solver precision).
        return Ok(RateFunctionResult { x, value: 0.0, argmax_t: Some(0.0) });
    }
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    if g1 > 0.0 {
        while g(lo) > 0.0 {
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(no_bracket(x));
            }
        }
    } else {
        while g(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(no_bracket(x));
            }
        }
    }
    if g1 > 0.0 {
        hi = (2.0 * lo).min(1.0);
    } else {
        lo = (0.5 * hi).max(1.0);
    }

    let mut u = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let gu = g(u);
        if gu.abs() <= ROOT_TOL {
            converged = true;
            break;
        }
        if gu < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let newton = u - gu / lambda_second_u(beta, u);
        u = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "rate_function",
            detail: format!("root of lambda'(t) = {x} not found in {MAX_ITER} iterations"),
        });
    }
    let t = u - 1.0;
    let lam = f0(scaled(beta, u)) - u * f0(beta) - t * delta;
    let value = (t * x - lam).max(0.0);
    Ok(RateFunctionResult { x, value, argmax_t: Some(t) })
}

fn no_bracket(x: f64) -> Error {
    Error::NonConvergence { what: "rate_function", detail: format!("could not bracket the maximiser for x = {x}") }
}

/// |Λ*_C(x) − Λ*_H(x + 1/2)|.
pub fn rate_function_shift_check(beta: BetaParam, x: f64) -> Result<f64> {
    let c = rate_function(&EnsembleSpec::Circular, beta, x)?.value;
    let h = rate_function(&EnsembleSpec::Hermite, beta, x + 0.5)?.value;
    if c.is_infinite() && h.is_infinite() {
        return Ok(0.0);
    }
    Ok((c - h).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::e_beta;
    use crate::specfun::{ln_gamma, LN_2PI};

    fn beta(b: f64) -> BetaParam {
        BetaParam::new(b).unwrap()
    }

    #[test]
    fn lambda_values() {
        let h = EnsembleSpec::Hermite;
        assert_eq!(lambda(&h, beta(2.0), 0.0).unwrap(), 0.0);
        let want = (LN_2PI - ln_gamma(3.0).unwrap() + 2.0 * 2f64.ln() - 1.5) - 2.0 * (LN_2PI - 1.0);
        assert!((lambda(&h, beta(2.0), 1.0).unwrap() - want).abs() < 1e-14);
        let c = lambda(&EnsembleSpec::Circular, beta(2.0), 1.0).unwrap();
        assert!((c - (want - 0.5)).abs() < 1e-14);
        assert!(lambda(&h, beta(2.0), -1.0).is_err());
        assert!(lambda(&EnsembleSpec::circular_jacobi(1.0).unwrap(), beta(2.0), 0.5).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let spec = EnsembleSpec::laguerre(3.0).unwrap();
        for b in [0.5, 2.0, 6.0] {
            for t in [-0.7, 0.0, 0.4, 3.0] {
                let hh = 1e-5;
                let fd =
                    (lambda(&spec, beta(b), t + hh).unwrap() - lambda(&spec, beta(b), t - hh).unwrap()) / (2.0 * hh);
                assert!((fd - lambda_prime(&spec, beta(b), t).unwrap()).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn mean_and_steepness() {
        let b = beta(2.0);
        let h = EnsembleSpec::Hermite;
        let e = e_beta(&h, b).unwrap();
        assert!((lambda_prime(&h, b, 0.0).unwrap() + e).abs() < 1e-14);
        assert!(lambda_prime(&h, b, -1.0 + 1e-6).unwrap() < -10.0);
        let far = lambda_prime(&h, b, 1e6).unwrap();
        let slope = limiting_slope(&h, b).unwrap();
        assert!(far < slope && slope - far < 1e-5);
    }

    #[test]
    fn rate_zero_at_mean() {
        for spec in [EnsembleSpec::Hermite, EnsembleSpec::Circular, EnsembleSpec::jacobi(1.0, 2.0).unwrap()] {
            let b = beta(2.0);
            let x = -e_beta(&spec, b).unwrap();
            let r = rate_function(&spec, b, x).unwrap();
            assert!(r.value.abs() < 1e-9);
            assert!(r.argmax_t.unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn envelope_identity() {
        let b = beta(2.0);
        let h = EnsembleSpec::Hermite;
        let x = lambda_prime(&h, b, 1.0).unwrap();
        let r = rate_function(&h, b, x).unwrap();
        assert!((r.argmax_t.unwrap() - 1.0).abs() < 1e-8);
        assert!((r.value - (x - lambda(&h, b, 1.0).unwrap())).abs() < 1e-10);
    }

    #[test]
    fn infinite_above_slope() {
        let b = beta(2.0);
        let h = EnsembleSpec::Hermite;
        let slope = limiting_slope(&h, b).unwrap();
        for x in [slope, slope + 0.1, 10.0] {
            let r = rate_function(&h, b, x).unwrap();
            assert!(r.value.is_infinite() && r.argmax_t.is_none());
        }
        let r = rate_function(&h, b, slope - 1e-6).unwrap();
        assert!(r.value.is_finite() && r.argmax_t.unwrap() > 1e4);
    }
}
