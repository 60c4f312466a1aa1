//! Random configurations of the ensembles.
//!
//! Matrix models (Dumitriu–Edelman for Hermite and Laguerre, Killip–Nenciu for
//! the circular ensemble) are rescaled so that their eigenvalue law is exactly
//! ∝ Π|λ_j − λ_k|^β exp(−nβ′ Σ V(λ_k)):
//!
//! * Hermite: the tridiagonal model with N(0,1) diagonal and χ_{β(n−k)}/√2
//!   off-diagonal has weight e^{−Σλ²/2}; x = λ·√(2/(nβ)) turns it into e^{−nβΣx²/4}.
//! * Laguerre: BBᵀ with B bidiagonal, diagonal χ_{2a−βi}, subdiagonal χ_{β(n−1−i)},
//!   has weight Π λ^{a−1−β′(n−1)} e^{−Σλ/2}. Matching the exponent nβ′(θ−1)
//!   gives a = β′(nθ − 1) + 1, and x = λ/(nβθ) matches e^{−nβ′θΣx}.
//! * Circular: |α_k|² ~ Beta(1, β′(n−k−1)) with uniform phases; see [`circular`].
//!
//! Every sampler is a pure function of its [`RngSeed`].

pub mod circular;
pub mod mcmc;
pub mod tridiagonal;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{BetaParam, EnsembleSpec};
use crate::error::{Error, Result};
use crate::partition::log_density;

pub use mcmc::{sample_mcmc, McmcChain, McmcDiagnostics};

/// Seed of one random stream: ChaCha8 keyed by `master_seed`, stream `stream_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RngSeed {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngSeed {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngSeed { master_seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// One draw of the n points with its log-density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigurationSample {
    /// Ascending; angles in [0, 2π) for the circular kinds.
    pub points: Vec<f64>,
    pub log_density: f64,
    pub spec: EnsembleSpec,
    pub beta: BetaParam,
    pub n: u64,
}

impl ConfigurationSample {
    /// Sort the points and attach ℒ_n.
    pub fn from_points(spec: &EnsembleSpec, beta: BetaParam, mut points: Vec<f64>) -> Result<Self> {
        points.sort_by(f64::total_cmp);
        let n = points.len() as u64;
        let log_density = log_density(spec, n, beta, &points)?;
        Ok(ConfigurationSample { points, log_density, spec: *spec, beta, n })
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn chi<R: rand::Rng + ?Sized>(k: f64, rng: &mut R) -> Result<f64> {
    let d = ChiSquared::new(k).map_err(|e| Error::InvalidParameter(format!("chi degrees {k}: {e}")))?;
    Ok(d.sample(rng).sqrt())
}

/// Hermite ensemble from the tridiagonal model.
pub fn sample_hermite(n: usize, beta: BetaParam, seed: RngSeed) -> Result<ConfigurationSample> {
    check_n(n)?;
    let b = beta.beta();
    let mut rng = seed.rng();
    let diag: Vec<f64> = (0..n).map(|_| rng.sample_normal()).collect();
    let off = (1..n)
        .map(|k| Ok(chi(b * (n - k) as f64, &mut rng)? / std::f64::consts::SQRT_2))
        .collect::<Result<Vec<f64>>>()?;
    let scale = (2.0 / (n as f64 * b)).sqrt();
    let ev = tridiagonal::symmetric_tridiagonal_eigenvalues(&diag, &off)?;
    ConfigurationSample::from_points(&EnsembleSpec::Hermite, beta, ev.into_iter().map(|x| x * scale).collect())
}

/// Laguerre ensemble from the bidiagonal model.
pub fn sample_laguerre(n: usize, beta: BetaParam, theta: f64, seed: RngSeed) -> Result<ConfigurationSample> {
    check_n(n)?;
    let spec = EnsembleSpec::laguerre(theta)?;
    let b = beta.beta();
    let nf = n as f64;
    let a = beta.beta_half() * (nf * theta - 1.0) + 1.0;
    let mut rng = seed.rng();
    let d = (0..n).map(|i| chi(2.0 * a - b * i as f64, &mut rng)).collect::<Result<Vec<f64>>>()?;
    let e = (0..n.saturating_sub(1)).map(|i| chi(b * (n - 1 - i) as f64, &mut rng)).collect::<Result<Vec<f64>>>()?;
    // T = BBᵀ for lower-bidiagonal B: T_ii = d_i² + e_{i−1}², T_{i,i−1} = e_{i−1} d_{i−1}.
    let diag: Vec<f64> = (0..n).map(|i| d[i] * d[i] + if i > 0 { e[i - 1] * e[i - 1] } else { 0.0 }).collect();
    let off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| e[i] * d[i]).collect();
    let ev = tridiagonal::symmetric_tridiagonal_eigenvalues(&diag, &off)?;
    let scale = 1.0 / (nf * b * theta);
    // Rounding can push the smallest eigenvalue of BBᵀ to ≤ 0; keep it in the domain.
    let points = ev.into_iter().map(|x| (x * scale).max(f64::MIN_POSITIVE)).collect();
    ConfigurationSample::from_points(&spec, beta, points)
}

/// Circular ensemble from random Verblunsky coefficients.
pub fn sample_circular(n: usize, beta: BetaParam, seed: RngSeed) -> Result<ConfigurationSample> {
    check_n(n)?;
    let mut rng = seed.rng();
    let alpha = circular::verblunsky_coefficients(n, beta.beta_half(), &mut rng);
    let angles = circular::eigen_angles(&alpha)?;
    ConfigurationSample::from_points(&EnsembleSpec::Circular, beta, angles)
}

/// Exact sampler for the ensembles that have one (Hermite, Laguerre, Circular).
pub fn sample_exact(spec: &EnsembleSpec, n: usize, beta: BetaParam, seed: RngSeed) -> Result<ConfigurationSample> {
    match *spec {
        EnsembleSpec::Hermite => sample_hermite(n, beta, seed),
        EnsembleSpec::Laguerre { theta } => sample_laguerre(n, beta, theta, seed),
        EnsembleSpec::Circular => sample_circular(n, beta, seed),
        _ => Err(Error::Unsupported(format!("no exact sampler for {}; use MCMC", spec.name()))),
    }
}

/// Whether [`sample_exact`] supports the ensemble.
pub fn has_exact_sampler(spec: &EnsembleSpec) -> bool {
    matches!(spec, EnsembleSpec::Hermite | EnsembleSpec::Laguerre { .. } | EnsembleSpec::Circular)
}

/// Run `op` on streams 0..m of `master_seed`, possibly in parallel; results are
/// in stream order regardless of scheduling.
pub fn replicate_map<T, F>(m: u64, master_seed: u64, op: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(RngSeed) -> Result<T> + Sync,
{
    if m == 0 {
        return Err(Error::InvalidParameter("at least one replica is required".into()));
    }
    (0..m)
        .into_par_iter()
        .map(|i| op(RngSeed::new(master_seed, i)).map_err(|e| Error::Replica { index: i, source: Box::new(e) }))
        .collect()
}

/// `m` independent samples.
pub fn replicate<F>(m: u64, master_seed: u64, op: F) -> Result<Vec<ConfigurationSample>>
where
    F: Fn(RngSeed) -> Result<ConfigurationSample> + Sync,
{
    replicate_map(m, master_seed, op)
}

trait NormalExt {
    fn sample_normal(&mut self) -> f64;
}

impl<R: rand::Rng> NormalExt for R {
    fn sample_normal(&mut self) -> f64 {
        self.sample(StandardNormal)
    }
}
