//! Circular β-ensemble via random Verblunsky coefficients.
//!
//! With coefficients α₀, …, α_{n−2} in the unit disc and |α_{n−1}| = 1, the
//! eigenvalues e^{iθ} of the associated CMV matrix are the solutions of
//! b_{n−1}(e^{iθ}) = ᾱ_{n−1}, where b_k(z) = zΦ_k(z)/Φ_k*(z) obeys the Szegő
//! recursion b_{k+1} = z(b_k − ᾱ_k)/(1 − α_k b_k). Writing b_k = e^{iφ_k} gives
//! the lifted phase recursion
//!
//! ```text
//! φ₀ = θ,   φ_{k+1} = θ + φ_k + 2 arg(1 − ᾱ_k e^{−iφ_k}),
//! ```
//!
//! whose endpoint φ_{n−1}(θ) is strictly increasing with total increase 2πn on
//! [0, 2π). Each eigen-angle is one crossing of a level arg(ᾱ_{n−1}) + 2πm.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Verblunsky coefficients with |α_k|² ~ Beta(1, β′(n−k−1)) and uniform phases;
/// the last one is uniform on the unit circle.
pub fn verblunsky_coefficients<R: Rng + ?Sized>(n: usize, beta_half: f64, rng: &mut R) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let phase = rng.random::<f64>() * TAU;
            let modulus = if k + 1 == n {
                1.0
            } else {
                // Beta(1, b) by inversion: 1 − U^{1/b}.
                let b = beta_half * (n - k - 1) as f64;
                let u: f64 = 1.0 - rng.random::<f64>();
                (-(u.ln() / b).exp_m1()).sqrt()
            };
            Complex64::from_polar(modulus, phase)
        })
        .collect()
}

/// φ_{n−1}(θ) and its derivative in θ.
///
/// e^{−iφ_k} is carried along by e^{−iφ_{k+1}} = e^{−iθ} e^{−iφ_k} w̄/w with
/// w = 1 − ᾱ_k e^{−iφ_k}, so each step costs one atan and no sin/cos.
fn lifted_phase(alpha: &[Complex64], theta: f64) -> (f64, f64) {
    let step = Complex64::from_polar(1.0, -theta);
    let mut rot = step;
    let mut phi = theta;
    let mut dphi = 1.0;
    for a in &alpha[..alpha.len() - 1] {
        let u = a.conj() * rot;
        let w = 1.0 - u;
        let wc = w.conj();
        let inv = 1.0 / w.norm_sqr();
        // d arg(w)/dφ = Re(u/w)
        let q = (u * wc).re * inv;
        // Re w > 0 because |α_k| < 1.
        phi = theta + phi + 2.0 * (w.im / w.re).atan();
        dphi = 1.0 + dphi * (1.0 + 2.0 * q);
        rot = step * rot * (wc * wc) * inv;
    }
    (phi, dphi)
}

/// Eigen-angles in [0, 2π), ascending.
pub fn eigen_angles(alpha: &[Complex64]) -> Result<Vec<f64>> {
    let n = alpha.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let target0 = alpha[n - 1].conj().arg();
    let cells = 2 * n;
    let grid: Vec<f64> = (0..=cells).map(|j| lifted_phase(alpha, TAU * j as f64 / cells as f64).0).collect();
    let f0 = grid[0];
    // Levels τ_m = target0 + 2πm in (f0, f0 + 2πn].
    let m0 = ((f0 - target0) / TAU).floor() as i64 + 1;
    let mut roots = Vec::with_capacity(n);
    let mut cell = 0;
    for m in m0..m0 + n as i64 {
        let level = target0 + TAU * m as f64;
        while cell + 1 < cells && grid[cell + 1] < level {
            cell += 1;
        }
        let mut lo = TAU * cell as f64 / cells as f64;
        let hi = TAU * (cell + 1) as f64 / cells as f64;
        let mut f_lo = grid[cell];
        if let Some(&prev) = roots.last() {
            if prev > lo {
                lo = prev;
                f_lo = level - TAU;
            }
        }
        // Secant start inside the bracket.
        let start = lo + (hi - lo) * ((level - f_lo) / (grid[cell + 1] - f_lo)).clamp(0.0, 1.0);
        roots.push(solve_level(alpha, level, lo, hi, start)?);
    }
    for r in roots.iter_mut() {
        *r = r.rem_euclid(TAU);
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Absolute accuracy in θ ∈ [0, 2π].
const NEWTON_TOL: f64 = 1e-14;

/// Solve φ_{n−1}(θ) = level on [lo, hi]: Newton, falling back to bisection
/// whenever the Newton step leaves the bracket or fails to halve the last step.
fn solve_level(alpha: &[Complex64], level: f64, mut lo: f64, mut hi: f64, start: f64) -> Result<f64> {
    let mut x = start;
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    for _ in 0..200 {
        let (f, df) = lifted_phase(alpha, x);
        let g = f - level;
        if g.abs() <= 8.0 * f64::EPSILON * level.abs().max(1.0) {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - g / df;
        if newton <= lo || newton >= hi || (2.0 * g).abs() > (dx_old * df).abs() {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx_old = dx;
            dx = g / df;
            x = newton;
            // φ carries rounding noise amplified by the recursion, so stop on
            // the size of the correction rather than on the residual.
            if dx.abs() <= NEWTON_TOL {
                return Ok(x);
            }
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(1.0) || dx.abs() <= f64::EPSILON * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence { what: "circular eigen-angle", detail: format!("level {level} in [{lo}, {hi}]") })
}
