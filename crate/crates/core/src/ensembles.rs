//! The six ensembles: potentials, equilibrium measures, entropies and the
//! limiting constants built from f₀.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::specfun::{self, PolygammaOrder, LN_2PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleSpec {
    Hermite,
    Laguerre { theta: f64 },
    Jacobi { kappa1: f64, kappa2: f64 },
    Cauchy { d: f64 },
    Circular,
    CircularJacobi { d: f64 },
}

/// Inverse temperature β together with β′ = β/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaParam {
    beta: f64,
    beta_half: f64,
}

impl BetaParam {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be positive and finite, got {beta}")));
        }
        Ok(BetaParam { beta, beta_half: beta / 2.0 })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// β′ = β/2.
    pub fn beta_half(&self) -> f64 {
        self.beta_half
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SupportDescriptor {
    Interval { lo: f64, hi: f64 },
    Arc { theta_lo: f64, theta_hi: f64 },
    FullCircle,
}

impl SupportDescriptor {
    /// Bounds of the support as a subset of ℝ (angles for the circular kinds).
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            SupportDescriptor::Interval { lo, hi } => (lo, hi),
            SupportDescriptor::Arc { theta_lo, theta_hi } => (theta_lo, theta_hi),
            SupportDescriptor::FullCircle => (0.0, 2.0 * PI),
        }
    }
}

fn h(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl EnsembleSpec {
    pub fn laguerre(theta: f64) -> Result<Self> {
        let s = EnsembleSpec::Laguerre { theta };
        s.validate()?;
        Ok(s)
    }

    pub fn jacobi(kappa1: f64, kappa2: f64) -> Result<Self> {
        let s = EnsembleSpec::Jacobi { kappa1, kappa2 };
        s.validate()?;
        Ok(s)
    }

    pub fn cauchy(d: f64) -> Result<Self> {
        let s = EnsembleSpec::Cauchy { d };
        s.validate()?;
        Ok(s)
    }

    pub fn circular_jacobi(d: f64) -> Result<Self> {
        let s = EnsembleSpec::CircularJacobi { d };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EnsembleSpec::Hermite | EnsembleSpec::Circular => Ok(()),
            EnsembleSpec::Laguerre { theta } => {
                if theta >= 1.0 && theta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("Laguerre theta must be >= 1, got {theta}")))
                }
            }
            EnsembleSpec::Jacobi { kappa1, kappa2 } => {
                positive("kappa1", kappa1)?;
                positive("kappa2", kappa2)
            }
            EnsembleSpec::Cauchy { d } | EnsembleSpec::CircularJacobi { d } => positive("d", d),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EnsembleSpec::Hermite => "hermite",
            EnsembleSpec::Laguerre { .. } => "laguerre",
            EnsembleSpec::Jacobi { .. } => "jacobi",
            EnsembleSpec::Cauchy { .. } => "cauchy",
            EnsembleSpec::Circular => "circular",
            EnsembleSpec::CircularJacobi { .. } => "circular-jacobi",
        }
    }

    /// Points live on the unit circle and are given as angles.
    pub fn is_circular(&self) -> bool {
        matches!(self, EnsembleSpec::Circular | EnsembleSpec::CircularJacobi { .. })
    }

    /// Whether `x` lies in the natural domain of the potential.
    pub fn in_domain(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self {
            EnsembleSpec::Laguerre { .. } => x > 0.0,
            EnsembleSpec::Jacobi { .. } => x > 0.0 && x < 1.0,
            _ => true,
        }
    }

    /// The potential V. Circular kinds take an angle θ standing for z = e^{iθ}.
    pub fn potential(&self, x: f64) -> Result<f64> {
        if !self.in_domain(x) {
            return Err(domain("potential", format!("{x} is outside the domain of the {} potential", self.name())));
        }
        Ok(match *self {
            EnsembleSpec::Hermite => 0.5 * x * x,
            EnsembleSpec::Laguerre { theta } => {
                if theta == 1.0 {
                    x
                } else {
                    theta * x - (theta - 1.0) * x.ln()
                }
            }
            EnsembleSpec::Jacobi { kappa1, kappa2 } => -kappa1 * x.ln() - kappa2 * (-x).ln_1p(),
            EnsembleSpec::Cauchy { d } => (1.0 + d) * (x * x).ln_1p(),
            EnsembleSpec::Circular => 0.0,
            // |1 − e^{iθ}| = 2|sin(θ/2)|
            EnsembleSpec::CircularJacobi { d } => -2.0 * d * (2.0 * (0.5 * x).sin().abs()).ln(),
        })
    }

    pub fn equilibrium_support(&self) -> SupportDescriptor {
        match *self {
            EnsembleSpec::Hermite => SupportDescriptor::Interval { lo: -2.0, hi: 2.0 },
            EnsembleSpec::Laguerre { theta } => {
                let r = theta.sqrt();
                SupportDescriptor::Interval { lo: (1.0 - r).powi(2) / theta, hi: (1.0 + r).powi(2) / theta }
            }
            EnsembleSpec::Jacobi { kappa1, kappa2 } => {
                let c = 2.0 + kappa1 + kappa2;
                let root = 4.0 * ((1.0 + kappa1) * (1.0 + kappa2) * (1.0 + kappa1 + kappa2)).sqrt();
                let base = kappa1 * kappa1 - kappa2 * kappa2;
                SupportDescriptor::Interval {
                    lo: 0.5 + (base - root) / (2.0 * c * c),
                    hi: 0.5 + (base + root) / (2.0 * c * c),
                }
            }
            EnsembleSpec::Cauchy { d } => {
                let m = (1.0 + 2.0 * d).sqrt() / d;
                SupportDescriptor::Interval { lo: -m, hi: m }
            }
            EnsembleSpec::Circular => SupportDescriptor::FullCircle,
            EnsembleSpec::CircularJacobi { d } => {
                let theta_d = 2.0 * (d / (1.0 + d)).asin();
                SupportDescriptor::Arc { theta_lo: theta_d, theta_hi: 2.0 * PI - theta_d }
            }
        }
    }

    /// Equilibrium density; exactly 0 outside the open support.
    pub fn equilibrium_density(&self, x: f64) -> f64 {
        let (lo, hi) = self.equilibrium_support().bounds();
        if !(x > lo && x < hi) {
            if let EnsembleSpec::Circular = self {
                if x == 0.0 {
                    return 1.0 / (2.0 * PI);
                }
            }
            return 0.0;
        }
        match *self {
            EnsembleSpec::Hermite => (4.0 - x * x).sqrt() / (2.0 * PI),
            EnsembleSpec::Laguerre { theta } => theta * ((hi - x) * (x - lo)).sqrt() / (2.0 * PI * x),
            EnsembleSpec::Jacobi { kappa1, kappa2 } => {
                let c = 2.0 + kappa1 + kappa2;
                c * ((hi - x) * (x - lo)).sqrt() / (2.0 * PI * x * (1.0 - x))
            }
            EnsembleSpec::Cauchy { d } => d / PI * ((hi - x) * (x - lo)).sqrt() / (1.0 + x * x),
            EnsembleSpec::Circular => 1.0 / (2.0 * PI),
            EnsembleSpec::CircularJacobi { d } => {
                let s = (0.5 * x).sin();
                let sd = d / (1.0 + d);
                (1.0 + d) * (s * s - sd * sd).max(0.0).sqrt() / (2.0 * PI * s)
            }
        }
    }

    /// ∫ f(x, ρ(x)) dx over the equilibrium support.
    ///
    /// Interval and arc supports are split at the midpoint and each half is
    /// mapped by x = endpoint ± t², which absorbs square-root edge behaviour.
    pub fn integrate_over_equilibrium<F: FnMut(f64, f64) -> f64>(&self, mut f: F, opts: &QuadOptions) -> Result<f64> {
        let support = self.equilibrium_support();
        let (lo, hi) = support.bounds();
        if let SupportDescriptor::FullCircle = support {
            return Ok(integrate(|x| f(x, self.equilibrium_density(x)), lo, hi, opts)?.value);
        }
        let half = (0.5 * (hi - lo)).sqrt();
        let left = integrate(
            |t| {
                let x = lo + t * t;
                2.0 * t * f(x, self.equilibrium_density(x))
            },
            0.0,
            half,
            opts,
        )?;
        let right = integrate(
            |t| {
                let x = hi - t * t;
                2.0 * t * f(x, self.equilibrium_density(x))
            },
            0.0,
            half,
            opts,
        )?;
        Ok(left.value + right.value)
    }

    /// Shannon entropy S(V) = ∫ ρ log ρ from the closed forms.
    pub fn entropy(&self) -> Result<f64> {
        Ok(match *self {
            EnsembleSpec::Hermite => 0.5 - LN_2PI,
            EnsembleSpec::Laguerre { theta } => 1.0 - LN_2PI + 0.5 * h(theta - 1.0) - 0.5 * (theta - 2.0) * theta.ln(),
            EnsembleSpec::Jacobi { kappa1: k1, kappa2: k2 } => {
                -LN_2PI
                    + 0.5 * (h(k1) + h(k2) - h(1.0 + k1) - h(1.0 + k2))
                    + 1.5 * (h(2.0 + k1 + k2) - h(1.0 + k1 + k2))
            }
            EnsembleSpec::Cauchy { d } => -PI.ln() - h(1.0 + d) + 3.0 * h(d + 0.5) - 0.5 * LN_2 - 2.0 * h(d),
            EnsembleSpec::Circular => -LN_2PI,
            EnsembleSpec::CircularJacobi { .. } => {
                return Err(Error::Unsupported(
                    "no closed-form entropy is available for the circular Jacobi ensemble".into(),
                ))
            }
        })
    }

    /// Δ_{H,V} = S(H) − S(V), the offset between E_β^V and E_β^H.
    pub fn entropy_shift(&self) -> Result<f64> {
        if let EnsembleSpec::Circular = self {
            return Ok(0.5);
        }
        Ok(0.5 - LN_2PI - self.entropy()?)
    }

    /// ∫ ρ log ρ by adaptive quadrature (independent of the closed forms).
    pub fn entropy_quadrature(&self) -> Result<f64> {
        let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_evals: 2_000_000 };
        self.integrate_over_equilibrium(|_, rho| if rho > 0.0 { rho * rho.ln() } else { 0.0 }, &opts)
    }
}

/// U^H(y) = −∫ log|y − x| ρ_H(x) dx outside the bulk, |y| ≥ 2.
pub fn log_potential_hermite(y: f64) -> Result<f64> {
    if !(y.abs() >= 2.0) || !y.is_finite() {
        return Err(domain("log_potential_hermite", format!("requires |y| >= 2, got {y}")));
    }
    let a = y.abs();
    let r = ((a - 2.0) * (a + 2.0)).sqrt();
    let minus_u = LN_2 - 0.5 + 0.25 * a * a - 0.25 * a * r - (a - r).ln();
    Ok(-minus_u)
}

/// f₀(β) = log 2π − ℓ(1+β′) + β′ log β′ − (1+β′)/2.
pub fn f0(beta: BetaParam) -> f64 {
    let b = beta.beta_half();
    LN_2PI - specfun::gamma::ln_gamma_pos(1.0 + b) + b * b.ln() - 0.5 * (1.0 + b)
}

/// d f₀/dβ at β = `big_b`: ½(−Ψ(1+B/2) + log(B/2) + ½).
pub fn f0_prime(big_b: f64) -> f64 {
    let b = 0.5 * big_b;
    0.5 * (-specfun::gamma::digamma_pos(1.0 + b) + b.ln() + 0.5)
}

/// d²f₀/dβ² at β = `big_b`: ½(1/B − ½Ψ′(1+B/2)).
pub fn f0_second(big_b: f64) -> f64 {
    0.5 * (1.0 / big_b - 0.5 * specfun::gamma::trigamma_pos(1.0 + 0.5 * big_b))
}

/// E_β^H = log 2π − ½ − β′ + β′Ψ(1+β′) − ℓ(1+β′).
pub fn e_beta_hermite(beta: BetaParam) -> f64 {
    let b = beta.beta_half();
    LN_2PI - 0.5 - b + b * specfun::gamma::digamma_pos(1.0 + b) - specfun::gamma::ln_gamma_pos(1.0 + b)
}

/// E_β^V = E_β^H + Δ_{H,V}: minus the limit of ℒ_n/n.
pub fn e_beta(spec: &EnsembleSpec, beta: BetaParam) -> Result<f64> {
    Ok(e_beta_hermite(beta) + spec.entropy_shift()?)
}

/// σ²_β = β′ − β′² Ψ′(1+β′).
pub fn sigma2_beta(beta: BetaParam) -> f64 {
    let b = beta.beta_half();
    b - b * b * specfun::gamma::trigamma_pos(1.0 + b)
}

/// A_β = β′³ Ψ″(1+β′) + β′.
pub fn a_beta(beta: BetaParam) -> f64 {
    let b = beta.beta_half();
    b * b * b * specfun::polygamma(PolygammaOrder::Tetragamma, 1.0 + b).expect("argument is >= 1") + b
}
