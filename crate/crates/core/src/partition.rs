//! Closed-form log-partition functions and the exact CGF of the log-density.
//!
//! Every closed form has the shape
//!
//! ```text
//! log Z_n(β) = c₀ + c₁β′ + (p₀ + p₁β′)·log(qβ′) + Σ_k m_k·ℓ(o_k + s_k β′)
//! ```
//!
//! with ℓ = log Γ. The CGF log E[e^{zℒ_n}] = log Z_n(β(1+z)) − (1+z) log Z_n(β)
//! is evaluated term by term from this representation, so that the large
//! O(n² log n) pieces cancel analytically rather than numerically.

use num_complex::Complex64;

use crate::ensembles::{f0, BetaParam, EnsembleSpec};
use crate::error::{domain, Error, Result};
use crate::specfun::gamma::{ln_gamma_pos, ln_gamma_right_half_plane, ln_gamma_weighted_difference};
use crate::specfun::{CompensatedSum, ComplexCompensatedSum, LN_2PI};

/// Exact value of log E[exp(zℒ_n)].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgfEvaluation {
    pub z: Complex64,
    pub value: Complex64,
    pub n: u64,
    pub spec: EnsembleSpec,
    pub beta: BetaParam,
}

/// Coefficients of the closed form for one (ensemble, n).
#[derive(Debug, Clone, Copy)]
struct SelbergForm {
    spec: EnsembleSpec,
    n: u64,
    c0: f64,
    c1: f64,
    p0: f64,
    p1: f64,
    q: f64,
}

impl SelbergForm {
    fn new(spec: &EnsembleSpec, n: u64) -> Result<Self> {
        spec.validate()?;
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let nf = n as f64;
        let ln2 = std::f64::consts::LN_2;
        let ln_pi = std::f64::consts::PI.ln();
        let mut f = SelbergForm { spec: *spec, n, c0: 0.0, c1: 0.0, p0: 0.0, p1: 0.0, q: 1.0 };
        match *spec {
            EnsembleSpec::Hermite => {
                f.c0 = 0.5 * nf * LN_2PI;
                f.p0 = -0.5 * nf;
                f.p1 = 0.5 * (nf - nf * nf);
                f.q = nf;
            }
            EnsembleSpec::Laguerre { theta } => {
                f.p0 = -nf;
                f.p1 = nf - theta * nf * nf;
                f.q = nf * theta;
            }
            EnsembleSpec::Jacobi { .. } => {}
            EnsembleSpec::Cauchy { d } => {
                f.c0 = nf * ln_pi + 2.0 * nf * ln2;
                f.c1 = (nf * (nf - 1.0) - 2.0 * (1.0 + d) * nf * nf) * ln2;
            }
            EnsembleSpec::Circular | EnsembleSpec::CircularJacobi { .. } => {
                f.c0 = nf * LN_2PI;
            }
        }
        Ok(f)
    }

    /// Calls `g(multiplicity, offset, slope)` for every ℓ(offset + slope·β′) term.
    fn for_each_term<G: FnMut(f64, f64, f64)>(&self, mut g: G) {
        let n = self.n;
        let nf = n as f64;
        match self.spec {
            EnsembleSpec::Hermite => {
                for j in 1..=n {
                    g(1.0, 1.0, j as f64);
                }
            }
            EnsembleSpec::Laguerre { theta } => {
                let shift = (theta - 1.0) * nf - 1.0;
                for j in 1..=n {
                    let jf = j as f64;
                    g(1.0, 1.0, jf);
                    g(1.0, 1.0, shift + jf);
                }
            }
            EnsembleSpec::Jacobi { kappa1, kappa2 } => {
                let top = (kappa1 + kappa2 + 1.0) * nf - 1.0;
                for j in 0..n {
                    let jf = j as f64;
                    g(1.0, 1.0, kappa1 * nf + jf);
                    g(1.0, 1.0, kappa2 * nf + jf);
                    g(1.0, 1.0, jf + 1.0);
                    g(-1.0, 2.0, top + jf);
                }
            }
            EnsembleSpec::Cauchy { d } => {
                for j in 0..n {
                    let jf = j as f64;
                    g(1.0, -1.0, jf + 2.0 * d * nf + 2.0);
                    g(1.0, 1.0, jf + 1.0);
                    g(-2.0, 0.0, jf + d * nf + 1.0);
                }
            }
            EnsembleSpec::Circular => g(1.0, 1.0, nf),
            EnsembleSpec::CircularJacobi { d } => {
                for j in 0..n {
                    let jf = j as f64;
                    g(1.0, 1.0, jf + 2.0 * d * nf);
                    g(1.0, 1.0, jf + 1.0);
                    g(-2.0, 1.0, jf + d * nf);
                }
            }
        }
        g(-nf, 1.0, 1.0);
    }

    fn gamma_error(&self, arg: String) -> Error {
        Error::GammaArgument { context: format!("log_partition({}, n={})", self.spec.name(), self.n), argument: arg }
    }

    /// First Gamma argument with non-positive real part at β′ = `b`, if any.
    fn check_arguments(&self, b: Complex64) -> Result<()> {
        let mut bad = None;
        self.for_each_term(|_, o, s| {
            let arg = o + s * b;
            if bad.is_none() && !(arg.re > 0.0) {
                bad = Some(arg);
            }
        });
        match bad {
            None => Ok(()),
            Some(arg) if arg.im == 0.0 => Err(self.gamma_error(format!("{}", arg.re))),
            Some(arg) => Err(self.gamma_error(format!("{arg}"))),
        }
    }

    fn value(&self, b: f64) -> Result<f64> {
        self.check_arguments(Complex64::new(b, 0.0))?;
        let mut acc = CompensatedSum::new();
        acc.add(self.c0);
        acc.add(self.c1 * b);
        if self.p0 != 0.0 || self.p1 != 0.0 {
            acc.add((self.p0 + self.p1 * b) * (self.q * b).ln());
        }
        self.for_each_term(|m, o, s| acc.add(m * ln_gamma_pos(o + s * b)));
        Ok(acc.value())
    }

    fn value_complex(&self, b: Complex64) -> Result<Complex64> {
        self.check_arguments(b)?;
        let mut acc = ComplexCompensatedSum::new();
        acc.add(Complex64::new(self.c0, 0.0));
        acc.add(self.c1 * b);
        if self.p0 != 0.0 || self.p1 != 0.0 {
            acc.add((self.p0 + self.p1 * b) * (self.q * b).ln());
        }
        self.for_each_term(|m, o, s| acc.add(m * ln_gamma_right_half_plane(o + s * b)));
        Ok(acc.value())
    }

    /// log Z(β′(1+ζ)) − (1+ζ) log Z(β′) for real ζ > −1.
    fn cgf_real(&self, b: f64, zeta: f64) -> Result<f64> {
        if zeta == 0.0 {
            return Ok(0.0);
        }
        let bz = b * (1.0 + zeta);
        self.check_arguments(Complex64::new(bz, 0.0))?;
        self.check_arguments(Complex64::new(b, 0.0))?;
        let mut acc = CompensatedSum::new();
        acc.add(-zeta * self.c0);
        if self.p0 != 0.0 || self.p1 != 0.0 {
            acc.add(-zeta * self.p0 * (self.q * b).ln());
            acc.add((self.p0 + self.p1 * bz) * zeta.ln_1p());
        }
        self.for_each_term(|m, o, s| acc.add(m * ln_gamma_weighted_difference(o, s * b, zeta)));
        Ok(acc.value())
    }

    fn cgf_complex(&self, b: f64, zeta: Complex64) -> Result<Complex64> {
        if zeta.im == 0.0 {
            return Ok(Complex64::new(self.cgf_real(b, zeta.re)?, 0.0));
        }
        let w = 1.0 + zeta;
        let bz = b * w;
        self.check_arguments(bz)?;
        self.check_arguments(Complex64::new(b, 0.0))?;
        let mut acc = ComplexCompensatedSum::new();
        acc.add(-zeta * self.c0);
        if self.p0 != 0.0 || self.p1 != 0.0 {
            acc.add(-zeta * self.p0 * (self.q * b).ln());
            acc.add((self.p0 + self.p1 * bz) * w.ln());
        }
        self.for_each_term(|m, o, s| {
            let base = ln_gamma_pos(o + s * b);
            acc.add(m * ln_gamma_right_half_plane(o + s * bz));
            acc.add(-m * w * base);
        });
        Ok(acc.value())
    }
}

/// log Z_n^V(β) from the closed form of the ensemble.
pub fn log_partition(spec: &EnsembleSpec, n: u64, beta: BetaParam) -> Result<f64> {
    SelbergForm::new(spec, n)?.value(beta.beta_half())
}

/// The same closed form evaluated at complex β with positive real part.
pub fn log_partition_complex(spec: &EnsembleSpec, n: u64, beta: Complex64) -> Result<Complex64> {
    if !(beta.re > 0.0) || !beta.is_finite() {
        return Err(domain("log_partition_complex", format!("requires Re beta > 0, got {beta}")));
    }
    let form = SelbergForm::new(spec, n)?;
    if beta.im == 0.0 {
        return Ok(Complex64::new(form.value(0.5 * beta.re)?, 0.0));
    }
    form.value_complex(0.5 * beta)
}

/// log E[exp(zℒ_n)] = log Z_n(β(1+z)) − (1+z) log Z_n(β), for Re z > −1.
pub fn cgf(spec: &EnsembleSpec, n: u64, beta: BetaParam, z: Complex64) -> Result<CgfEvaluation> {
    if !(z.re > -1.0) || !z.is_finite() {
        return Err(domain("cgf", format!("requires Re z > -1, got {z}")));
    }
    let form = SelbergForm::new(spec, n)?;
    let value = form.cgf_complex(beta.beta_half(), z)?;
    Ok(CgfEvaluation { z, value, n, spec: *spec, beta })
}

/// Real-argument CGF, the common case.
pub fn cgf_real(spec: &EnsembleSpec, n: u64, beta: BetaParam, t: f64) -> Result<f64> {
    if !(t > -1.0) || !t.is_finite() {
        return Err(domain("cgf", format!("requires t > -1, got {t}")));
    }
    SelbergForm::new(spec, n)?.cgf_real(beta.beta_half(), t)
}

/// log Z_n^H(β) − [−¾β′n² + β′n log n + n f₀(β)].
pub fn hermite_expansion_residual(n: u64, beta: BetaParam) -> Result<f64> {
    if n < 2 {
        return Err(domain("hermite_expansion_residual", "requires n >= 2"));
    }
    let b = beta.beta_half();
    let nf = n as f64;
    let z = log_partition(&EnsembleSpec::Hermite, n, beta)?;
    Ok(z - (-0.75 * b * nf * nf + b * nf * nf.ln() + nf * f0(beta)))
}

/// R(β) = 1/4 + β/24 + 1/(6β), the log n coefficient of the Hermite residual.
pub fn residual_logn_coefficient(beta: BetaParam) -> f64 {
    let b = beta.beta();
    0.25 + b / 24.0 + 1.0 / (6.0 * b)
}

/// B(ζ) = −ζ(1/4 + (2+ζ)/(12β′(1+ζ))), the log n coefficient of the Hermite CGF.
pub fn cgf_logn_coefficient(beta: BetaParam, zeta: f64) -> Result<f64> {
    if !(zeta > -1.0) {
        return Err(domain("cgf_logn_coefficient", format!("requires zeta > -1, got {zeta}")));
    }
    let b = beta.beta_half();
    Ok(-zeta * (0.25 + (2.0 + zeta) / (12.0 * b * (1.0 + zeta))))
}

/// log|x_j − x_k| for real points or chord length for angles.
fn pair_log_distance(spec: &EnsembleSpec, a: f64, b: f64) -> f64 {
    if spec.is_circular() {
        (2.0 * (0.5 * (a - b)).sin().abs()).ln()
    } else {
        (a - b).abs().ln()
    }
}

/// β Σ_{j<k} log|x_j − x_k| − nβ′ Σ V(x_k), without the normalisation.
///
/// Returns −∞ when two points coincide. Points outside the natural domain of
/// the potential are an error.
pub fn log_density_unnormalized(spec: &EnsembleSpec, beta: BetaParam, config: &[f64]) -> Result<f64> {
    for &x in config {
        if !spec.in_domain(x) {
            return Err(domain("log_density", format!("point {x} outside the {} domain", spec.name())));
        }
    }
    let n = config.len() as f64;
    let mut pairs = CompensatedSum::new();
    for (j, &a) in config.iter().enumerate() {
        for &b in &config[j + 1..] {
            pairs.add(pair_log_distance(spec, a, b));
        }
    }
    let mut pot = CompensatedSum::new();
    for &x in config {
        pot.add(spec.potential(x)?);
    }
    let v = beta.beta() * pairs.value() - n * beta.beta_half() * pot.value();
    Ok(if v.is_nan() { f64::NEG_INFINITY } else { v })
}

/// ℒ_n = log of the joint density at the configuration.
pub fn log_density(spec: &EnsembleSpec, n: u64, beta: BetaParam, config: &[f64]) -> Result<f64> {
    if config.len() as u64 != n {
        return Err(Error::InvalidParameter(format!("configuration has {} points, expected {n}", config.len())));
    }
    let u = log_density_unnormalized(spec, beta, config)?;
    Ok(u - log_partition(spec, n, beta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn beta(b: f64) -> BetaParam {
        BetaParam::new(b).unwrap()
    }

    #[test]
    fn small_n_values() {
        for b in [0.5, 1.0, 2.0, 7.0] {
            let lz = log_partition(&EnsembleSpec::Circular, 1, beta(b)).unwrap();
            assert!((lz - LN_2PI).abs() < 1e-15);
            let lz = log_partition(&EnsembleSpec::Hermite, 1, beta(b)).unwrap();
            assert!((lz - 0.5 * (2.0 * PI / (b / 2.0)).ln()).abs() < 1e-14);
        }
        let lz = log_partition(&EnsembleSpec::Circular, 2, beta(2.0)).unwrap();
        assert!((lz - (8.0 * PI * PI).ln()).abs() < 1e-14);
    }

    #[test]
    fn circular_cgf_closed_value() {
        let v = cgf_real(&EnsembleSpec::Circular, 2, beta(2.0), 1.0).unwrap();
        assert!((v - (3.0 / (8.0 * PI * PI)).ln()).abs() < 1e-13);
        assert_eq!(cgf_real(&EnsembleSpec::Hermite, 5, beta(2.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn cgf_matches_direct_difference() {
        let specs = [
            EnsembleSpec::Hermite,
            EnsembleSpec::laguerre(2.0).unwrap(),
            EnsembleSpec::jacobi(1.0, 0.5).unwrap(),
            EnsembleSpec::cauchy(1.0).unwrap(),
            EnsembleSpec::Circular,
            EnsembleSpec::circular_jacobi(0.7).unwrap(),
        ];
        for spec in specs {
            for t in [-0.5, 0.2, 1.5] {
                let b = beta(2.0);
                let direct = log_partition(&spec, 7, beta(2.0 * (1.0 + t))).unwrap()
                    - (1.0 + t) * log_partition(&spec, 7, b).unwrap();
                let v = cgf_real(&spec, 7, b, t).unwrap();
                assert!((v - direct).abs() < 1e-11, "{spec:?} t={t}: {v} vs {direct}");
            }
        }
    }

    #[test]
    fn complex_real_agreement() {
        let spec = EnsembleSpec::jacobi(1.0, 2.0).unwrap();
        let r = log_partition(&spec, 4, beta(3.0)).unwrap();
        let c = log_partition_complex(&spec, 4, Complex64::new(3.0, 0.0)).unwrap();
        assert_eq!(c, Complex64::new(r, 0.0));
        let c = cgf(&spec, 4, beta(3.0), Complex64::new(0.3, 0.0)).unwrap().value;
        assert_eq!(c.im, 0.0);
        assert!((c.re - cgf_real(&spec, 4, beta(3.0), 0.3).unwrap()).abs() == 0.0);
    }

    #[test]
    fn circular_complex_beta() {
        // β′ = 1 + i: log Z = 2 log 2π + ℓ(3 + 2i) − 2ℓ(2 + i)
        let v = log_partition_complex(&EnsembleSpec::Circular, 2, Complex64::new(2.0, 2.0)).unwrap();
        let g = |z: Complex64| crate::specfun::ln_gamma_complex(z).unwrap();
        let want = 2.0 * LN_2PI + g(Complex64::new(3.0, 2.0)) - 2.0 * g(Complex64::new(2.0, 1.0));
        assert!((v - want).norm() < 1e-13);
    }

    #[test]
    fn cgf_complex_against_partition_difference() {
        let spec = EnsembleSpec::Hermite;
        let z = Complex64::new(0.3, -0.8);
        let b = beta(2.0);
        let direct =
            log_partition_complex(&spec, 6, 2.0 * (1.0 + z)).unwrap() - (1.0 + z) * log_partition(&spec, 6, b).unwrap();
        let v = cgf(&spec, 6, b, z).unwrap().value;
        // Both sides are on the principal branch of each ℓ term; compare modulo 2πi.
        let d = v - direct;
        let k = (d.im / (2.0 * PI)).round();
        assert!((d - Complex64::new(0.0, 2.0 * PI * k)).norm() < 1e-11, "{v} vs {direct}");
    }

    #[test]
    fn gamma_argument_errors() {
        // Cauchy: ℓ(β′(2dn + 2) − 1) needs β′(2dn+2) > 1.
        let spec = EnsembleSpec::cauchy(0.1).unwrap();
        let err = log_partition(&spec, 1, beta(0.5)).unwrap_err();
        assert!(matches!(err, Error::GammaArgument { .. }), "{err}");
        assert!(cgf_real(&EnsembleSpec::Hermite, 3, beta(2.0), -1.0).is_err());
        assert!(log_partition(&EnsembleSpec::Hermite, 0, beta(2.0)).is_err());
    }

    #[test]
    fn logn_coefficients() {
        assert_eq!(cgf_logn_coefficient(beta(2.0), 0.0).unwrap(), 0.0);
        assert!((cgf_logn_coefficient(beta(2.0), 1.0).unwrap() + 0.375).abs() < 1e-15);
        assert!((residual_logn_coefficient(beta(2.0)) - 5.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn log_density_examples() {
        let b = beta(2.0);
        let v = log_density(&EnsembleSpec::Circular, 2, b, &[0.0, PI]).unwrap();
        assert!((v - (4f64.ln() - (8.0 * PI * PI).ln())).abs() < 1e-13);
        for bb in [1.0, 2.0, 5.0] {
            let v = log_density(&EnsembleSpec::Hermite, 1, beta(bb), &[0.0]).unwrap();
            assert!((v + log_partition(&EnsembleSpec::Hermite, 1, beta(bb)).unwrap()).abs() < 1e-15);
        }
        let v = log_density(&EnsembleSpec::Hermite, 2, b, &[0.3, 0.3]).unwrap();
        assert_eq!(v, f64::NEG_INFINITY);
        let lag = EnsembleSpec::laguerre(2.0).unwrap();
        assert!(log_density(&lag, 2, b, &[-0.1, 1.0]).is_err());
        assert!(log_density(&lag, 3, b, &[0.1, 1.0]).is_err());
    }
}
