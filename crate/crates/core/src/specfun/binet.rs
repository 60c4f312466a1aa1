//! Binet's first formula: ln Γ(1+z) = (z+½) ln z − z + ½ ln 2π + ∫₀^∞ φ̃(s) e^{−sz} ds,
//! with kernel φ̃(s) = [½ − 1/s + 1/(e^s − 1)]/s and its complement φ = 1/12 − φ̃.

use super::gamma::HALF_LN_2PI;
use crate::error::{domain, Result};
use crate::quadrature::{integrate, QuadOptions};

/// `B_{2k} / (2k)!` for k = 1..12.
const BERNOULLI_OVER_FACTORIAL: [f64; 12] = [
    0.083_333_333_333_333_333,
    -0.001_388_888_888_888_888_9,
    3.306_878_306_878_306_9e-5,
    -8.267_195_767_195_767_2e-7,
    2.087_675_698_786_809_9e-8,
    -5.284_190_138_687_493_2e-10,
    1.338_253_653_068_467_9e-11,
    -3.389_680_296_322_582_9e-13,
    8.586_062_056_277_844_6e-15,
    -2.174_868_698_558_061_9e-16,
    5.509_002_828_360_229_5e-18,
    -1.395_446_468_581_252_3e-19,
];

/// Below this the Taylor series is used; it converges for |s| < 2π.
const SERIES_BELOW: f64 = 1.0;

/// Upper integration limit is `CUTOFF / z`; the neglected tail is ≤ e^{−CUTOFF}/(12z).
const CUTOFF: f64 = 40.0;

fn series(s: f64, from: usize) -> f64 {
    let s2 = s * s;
    BERNOULLI_OVER_FACTORIAL[from..].iter().rev().fold(0.0, |acc, &c| acc * s2 + c)
}

/// φ̃(s) = [½ − 1/s + 1/(e^s − 1)]/s, with φ̃(0) = 1/12.
///
/// The kernel is even, so negative arguments are accepted as well.
pub fn binet_kernel(s: f64) -> f64 {
    let s = s.abs();
    if s < SERIES_BELOW {
        series(s, 0)
    } else {
        (0.5 - 1.0 / s + 1.0 / s.exp_m1()) / s
    }
}

/// φ(s) = 1/12 − φ̃(s), which behaves like s²/720 near 0.
pub fn binet_phi(s: f64) -> f64 {
    let s = s.abs();
    if s < SERIES_BELOW {
        -(s * s) * series(s, 1)
    } else {
        1.0 / 12.0 - binet_kernel(s)
    }
}

/// ∫₀^∞ φ(s) e^{−sz} ds for z > 0.
pub fn binet_remainder(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain("binet_remainder", format!("requires z > 0, got {z}")));
    }
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_evals: 200_000 };
    let r = integrate(|s| binet_phi(s) * (-s * z).exp(), 0.0, CUTOFF / z, &opts)?;
    Ok(r.value)
}

/// Right-hand side of Binet's formula for ln Γ(1+z).
pub fn stirling_reconstruction(z: f64) -> Result<f64> {
    let rem = binet_remainder(z)?;
    Ok((z + 0.5) * z.ln() - z + HALF_LN_2PI + 1.0 / (12.0 * z) - rem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::ln_gamma;

    #[test]
    fn kernel_values() {
        assert_eq!(binet_kernel(0.0), 1.0 / 12.0);
        let e = std::f64::consts::E;
        assert!((binet_kernel(1.0) - (0.5 - 1.0 + 1.0 / (e - 1.0))).abs() < 1e-15);
        assert!((binet_kernel(100.0) - 0.0049).abs() < 1e-12);
    }

    #[test]
    fn branches_agree_at_switch() {
        let below = series(SERIES_BELOW, 0);
        let above = (0.5 - 1.0 / SERIES_BELOW + 1.0 / SERIES_BELOW.exp_m1()) / SERIES_BELOW;
        assert!((below - above).abs() < 1e-15);
    }

    #[test]
    fn kernel_bounds_on_grid() {
        for i in 0..=5000 {
            let s = i as f64 * 0.01;
            let k = binet_kernel(s);
            assert!(k > 0.0 && k <= 1.0 / 12.0, "s={s} k={k}");
            let p = binet_phi(s);
            assert!((0.0..1.0 / 12.0).contains(&p), "s={s} phi={p}");
        }
    }

    #[test]
    fn phi_quadratic_limit() {
        assert_eq!(binet_phi(0.0), 0.0);
        for k in 1..=40 {
            let s = 1e-2 * 0.8f64.powi(k - 1);
            let ratio = binet_phi(s) / (s * s);
            assert!((ratio - 1.0 / 720.0).abs() < 1e-4);
        }
        let s = 0.01f64;
        assert!((binet_phi(s) - (s * s / 720.0 - s.powi(4) * 3.306_878_306_878_306_9e-5)).abs() < 1e-17);
    }

    #[test]
    fn remainder_at_one() {
        let expected = HALF_LN_2PI + 1.0 / 12.0 - 1.0;
        assert!((binet_remainder(1.0).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn remainder_decays() {
        let mut prev = f64::INFINITY;
        for z in [0.5, 1.0, 2.0, 10.0, 100.0, 1000.0] {
            let r = binet_remainder(z).unwrap();
            assert!(r > 0.0 && r < prev);
            prev = r;
        }
        // Leading Stirling correction beyond 1/(12z) is 1/(360 z³).
        let r10 = binet_remainder(10.0).unwrap();
        assert!((r10 - 1.0 / 360_000.0).abs() < 1e-8);
    }

    #[test]
    fn reconstruction_matches_ln_gamma() {
        let mut z = 0.5;
        while z <= 100.0 {
            let diff = stirling_reconstruction(z).unwrap() - ln_gamma(1.0 + z).unwrap();
            assert!(diff.abs() <= 1e-10, "z={z} diff={diff}");
            z *= 1.07;
        }
    }

    #[test]
    fn remainder_domain() {
        assert!(binet_remainder(0.0).is_err());
        assert!(binet_remainder(-1.0).is_err());
    }
}
