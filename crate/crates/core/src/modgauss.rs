//! Mod-Gaussian limit of Y_n = ℒ_n + nE_β^V at scale n^{1/3} and the
//! quantitative predictions derived from it.

use num_complex::Complex64;
use serde::Serialize;

use crate::ensembles::{a_beta, e_beta, sigma2_beta, BetaParam, EnsembleSpec};
use crate::error::{domain, Error, Result};
use crate::partition::cgf;
use crate::specfun::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModGaussParams {
    /// t_n = n^{1/3} σ²_β.
    pub t_n: f64,
    pub sigma2: f64,
    /// A_β, coefficient of the cubic in ψ.
    pub a_coeff: f64,
    pub n: u64,
    pub beta: BetaParam,
}

impl ModGaussParams {
    pub fn new(n: u64, beta: BetaParam) -> Self {
        let sigma2 = sigma2_beta(beta);
        ModGaussParams { t_n: (n as f64).cbrt() * sigma2, sigma2, a_coeff: a_beta(beta), n, beta }
    }
}

/// Zone-of-control constants: |ψ_n(iξ) − 1| ≤ K₁|ξ|^v e^{K₂|ξ|^w} for |ξ| ≤ D t_n^γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZoneControl {
    pub gamma: f64,
    pub v: f64,
    pub w: f64,
    pub d: f64,
    pub k1: f64,
    pub k2: f64,
}

impl ZoneControl {
    /// Condition (Z2); with w = 2 it reduces to K₂ < 1/4 and −1/2 < γ.
    pub fn satisfies_z2(&self) -> bool {
        if self.w < 2.0 || self.gamma <= -0.5 {
            return false;
        }
        if self.w == 2.0 {
            return 4.0 * self.k2 < 1.0;
        }
        self.gamma <= 1.0 / (self.w - 2.0) && self.d <= (1.0 / (4.0 * self.k2)).powf(1.0 / (self.w - 2.0))
    }

    /// C(D, v, K₁) / t_n^{γ + 1/2}.
    pub fn kolmogorov_bound(&self, t_n: f64) -> Result<f64> {
        Ok(kolmogorov_bound_constant(self.d, self.v, self.k1)? / t_n.powf(self.gamma + 0.5))
    }
}

/// ψ(z) = exp(−A_β z³/6).
pub fn psi_limit(beta: BetaParam, z: Complex64) -> Complex64 {
    (-a_beta(beta) * z * z * z / 6.0).exp()
}

fn check_mod_gaussian(spec: &EnsembleSpec, n: u64) -> Result<()> {
    match *spec {
        EnsembleSpec::Hermite | EnsembleSpec::Circular => Ok(()),
        EnsembleSpec::Laguerre { theta } => {
            let q = n as f64 * theta;
            if (q - q.round()).abs() <= 1e-9 * q.max(1.0) {
                Ok(())
            } else {
                Err(Error::Unsupported(format!(
                    "Laguerre mod-Gaussian predictions require integer n*theta, got n*theta = {q}"
                )))
            }
        }
        _ => Err(Error::Unsupported(format!(
            "mod-Gaussian predictions are available for hermite, laguerre and circular, not {}",
            spec.name()
        ))),
    }
}

/// ψ_n(z) = E[e^{zX_n}] e^{−t_n z²/2} with X_n = n^{−1/3} Y_n, computed exactly.
pub fn psi_n(spec: &EnsembleSpec, n: u64, beta: BetaParam, z: Complex64) -> Result<Complex64> {
    check_mod_gaussian(spec, n)?;
    let nf = n as f64;
    let s = nf.cbrt();
    let zeta = z / s;
    if !(zeta.re > -1.0) {
        return Err(domain("psi_n", format!("requires Re(z n^(-1/3)) > -1, got {zeta}")));
    }
    let e = e_beta(spec, beta)?;
    let t_n = s * sigma2_beta(beta);
    let k = cgf(spec, n, beta, zeta)?.value;
    Ok((k + z * (s * s) * e - 0.5 * t_n * z * z).exp())
}

/// Leading term of P[Y_n/(n^{2/3}σ²) ≥ x] (x > 0) or P[· ≤ x] (x < 0), |x| < 1.
pub fn mdp_tail(spec: &EnsembleSpec, n: u64, beta: BetaParam, x: f64) -> Result<f64> {
    check_mod_gaussian(spec, n)?;
    if !(x.abs() < 1.0) || x == 0.0 {
        return Err(domain("mdp_tail", format!("requires 0 < |x| < 1, got {x}")));
    }
    let p = ModGaussParams::new(n, beta);
    let sigma = p.sigma2.sqrt();
    let psi = (-p.a_coeff * x * x * x / 6.0).exp();
    Ok((-0.5 * x * x * p.t_n).exp() / (x.abs() * sigma * (2.0 * std::f64::consts::PI * (n as f64).cbrt()).sqrt()) * psi)
}

/// P[N(0,1) ≥ y].
pub fn clt_tail(y: f64) -> f64 {
    0.5 * libm::erfc(y / std::f64::consts::SQRT_2)
}

/// C(D, v, K₁) = (3/2π)(2^{v−1} Γ(v/2) K₁ + (7/D)√(π/2)).
pub fn kolmogorov_bound_constant(d: f64, v: f64, k1: f64) -> Result<f64> {
    if !(d > 0.0) || !(k1 > 0.0) || !(v >= 1.0) {
        return Err(domain(
            "kolmogorov_bound_constant",
            format!("requires D > 0, K1 > 0, v >= 1; got D={d}, v={v}, K1={k1}"),
        ));
    }
    let pi = std::f64::consts::PI;
    let g = ln_gamma(0.5 * v)?.exp();
    Ok(3.0 / (2.0 * pi) * (2f64.powf(v - 1.0) * g * k1 + 7.0 / d * (0.5 * pi).sqrt()))
}

/// (b − a) e^{−x²/2}/√(2π).
pub fn llt_value(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(domain("llt_value", format!("requires a < b, got ({a}, {b})")));
    }
    Ok((b - a) * (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())
}

/// Largest K₂ tried by [`zone_control_fit`]; (Z2) with w = 2 needs K₂ < 1/4.
pub const ZONE_K2_MAX: f64 = 0.24;
const ZONE_K2_STEPS: usize = 24;
/// Safety factor on the fitted K₁.
const ZONE_K1_MARGIN: f64 = 1.02;

/// Fit (K₁, K₂) with v = 1, w = 2 so that K₁|ξ|e^{K₂ξ²} dominates |ψ_n(iξ) − 1|
/// for every listed n and ξ. Among admissible K₂ ∈ [0, 0.24] the one with the
/// smallest K₁ is returned; D is the half-width of the ξ grid and γ = 0.
pub fn zone_control_fit(spec: &EnsembleSpec, beta: BetaParam, n_list: &[u64], xi_grid: &[f64]) -> Result<ZoneControl> {
    match spec {
        EnsembleSpec::Hermite | EnsembleSpec::Circular => {}
        _ => {
            return Err(Error::Unsupported(format!(
                "zone-of-control fits are available for hermite and circular, not {}",
                spec.name()
            )))
        }
    }
    if n_list.is_empty() || xi_grid.is_empty() {
        return Err(Error::InvalidParameter("zone_control_fit needs nonempty n and xi lists".into()));
    }
    let mut samples = Vec::new();
    for &n in n_list {
        for &xi in xi_grid {
            if xi == 0.0 {
                continue;
            }
            let dev = (psi_n(spec, n, beta, Complex64::new(0.0, xi))? - 1.0).norm();
            if !dev.is_finite() {
                return Err(Error::NonConvergence {
                    what: "zone_control_fit",
                    detail: format!("non-finite |psi_n - 1| at n={n}, xi={xi}"),
                });
            }
            samples.push((xi.abs(), dev));
        }
    }
    let d = xi_grid.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if samples.is_empty() || d == 0.0 {
        return Err(Error::InvalidParameter("xi grid must contain nonzero points".into()));
    }
    let mut best: Option<(f64, f64)> = None;
    for i in 0..=ZONE_K2_STEPS {
        let k2 = ZONE_K2_MAX * i as f64 / ZONE_K2_STEPS as f64;
        let k1 = samples.iter().map(|&(a, dev)| dev / (a * (k2 * a * a).exp())).fold(0.0f64, f64::max) * ZONE_K1_MARGIN;
        if best.is_none_or(|(b1, _)| k1 < b1) {
            best = Some((k1, k2));
        }
    }
    let (k1, k2) = best.expect("grid is nonempty");
    // A zero deviation everywhere would make K₁ = 0; keep it strictly positive.
    let k1 = k1.max(f64::MIN_POSITIVE);
    Ok(ZoneControl { gamma: 0.0, v: 1.0, w: 2.0, d, k1, k2 })
}
