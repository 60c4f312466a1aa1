//! Single-coordinate random-walk Metropolis on the joint density, usable for
//! every ensemble.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{ConfigurationSample, RngSeed};
use crate::ensembles::{BetaParam, EnsembleSpec, SupportDescriptor};
use crate::error::{Error, Result};
use crate::partition::log_density_unnormalized;
use crate::stats::effective_sample_size;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McmcDiagnostics {
    /// Acceptance rate after burn-in.
    pub acceptance_rate: f64,
    /// Burn-in length in sweeps.
    pub burn_in: u64,
    /// Sweeps between kept samples.
    pub thinning: u64,
    /// Effective sample size of the post-burn-in ℒ_n trace.
    pub ess_estimate: f64,
}

pub const TARGET_ACCEPTANCE: f64 = 0.3;

/// Default burn-in: 200 sweeps per particle.
pub fn default_burn_in(n: usize) -> u64 {
    200 * n as u64
}

/// Equally spaced quantiles (i + ½)/n of the equilibrium measure.
pub fn equilibrium_quantiles(spec: &EnsembleSpec, n: usize) -> Vec<f64> {
    let support = spec.equilibrium_support();
    if let SupportDescriptor::FullCircle = support {
        return (0..n).map(|i| (i as f64 + 0.5) * TAU / n as f64).collect();
    }
    let (lo, hi) = support.bounds();
    // Cumulative mass on the grid x(u) = lo + (hi − lo)(1 − cos πu)/2, which
    // flattens the square-root edges.
    const GRID: usize = 4096;
    let xs: Vec<f64> = (0..=GRID).map(|k| lo + (hi - lo) * 0.5 * (1.0 - (PI * k as f64 / GRID as f64).cos())).collect();
    let mut cdf = vec![0.0; GRID + 1];
    for k in 0..GRID {
        let mid = 0.5 * (xs[k] + xs[k + 1]);
        cdf[k + 1] = cdf[k] + spec.equilibrium_density(mid) * (xs[k + 1] - xs[k]);
    }
    let total = cdf[GRID];
    (0..n)
        .map(|i| {
            let p = (i as f64 + 0.5) / n as f64 * total;
            let k = cdf.partition_point(|&c| c < p).clamp(1, GRID);
            let (c0, c1) = (cdf[k - 1], cdf[k]);
            let frac = if c1 > c0 { (p - c0) / (c1 - c0) } else { 0.5 };
            xs[k - 1] + frac * (xs[k] - xs[k - 1])
        })
        .collect()
}

/// A Metropolis chain that can be advanced sweep by sweep.
#[derive(Debug, Clone)]
pub struct McmcChain {
    spec: EnsembleSpec,
    beta: BetaParam,
    points: Vec<f64>,
    log_step: f64,
    rng: ChaCha8Rng,
    unnormalized: f64,
    adapt_sweeps: u64,
    proposals: u64,
    accepted: u64,
}

impl McmcChain {
    /// Chain started from the equilibrium quantiles.
    pub fn new(spec: &EnsembleSpec, n: usize, beta: BetaParam, seed: RngSeed) -> Result<Self> {
        spec.validate()?;
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let start = equilibrium_quantiles(spec, n);
        let (lo, hi) = spec.equilibrium_support().bounds();
        let step = 0.5 * (hi - lo) / n as f64;
        Self::with_start(spec, beta, start, step, seed)
    }

    /// Chain started from a given configuration with a given proposal scale.
    pub fn with_start(spec: &EnsembleSpec, beta: BetaParam, start: Vec<f64>, step: f64, seed: RngSeed) -> Result<Self> {
        let unnormalized = log_density_unnormalized(spec, beta, &start)?;
        if !unnormalized.is_finite() {
            return Err(Error::InvalidParameter("initial configuration has non-finite log-density".into()));
        }
        Ok(McmcChain {
            spec: *spec,
            beta,
            points: start,
            log_step: step.ln(),
            rng: seed.rng(),
            unnormalized,
            adapt_sweeps: 0,
            proposals: 0,
            accepted: 0,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn step(&self) -> f64 {
        self.log_step.exp()
    }

    /// β Σ log|Δ| − nβ′ Σ V at the current state.
    pub fn unnormalized_log_density(&self) -> f64 {
        self.unnormalized
    }

    /// Acceptance rate since the last [`reset_counters`](Self::reset_counters).
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }

    pub fn reset_counters(&mut self) {
        self.proposals = 0;
        self.accepted = 0;
    }

    fn log_ratio(&self, i: usize, proposal: f64) -> f64 {
        let spec = &self.spec;
        if !spec.in_domain(proposal) {
            return f64::NEG_INFINITY;
        }
        let old = self.points[i];
        let dist = |a: f64, b: f64| -> f64 {
            if spec.is_circular() {
                (2.0 * (0.5 * (a - b)).sin().abs()).ln()
            } else {
                (a - b).abs().ln()
            }
        };
        let mut pair = 0.0;
        for (k, &x) in self.points.iter().enumerate() {
            if k != i {
                pair += dist(proposal, x) - dist(old, x);
            }
        }
        let (v_new, v_old) = match (spec.potential(proposal), spec.potential(old)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return f64::NEG_INFINITY,
        };
        let n = self.points.len() as f64;
        let r = self.beta.beta() * pair - n * self.beta.beta_half() * (v_new - v_old);
        if r.is_nan() {
            f64::NEG_INFINITY
        } else {
            r
        }
    }

    /// One sweep: a proposal for every coordinate in turn. Returns the number accepted.
    pub fn sweep(&mut self) -> usize {
        let step = self.log_step.exp();
        let mut acc = 0;
        for i in 0..self.points.len() {
            let z: f64 = self.rng.sample(StandardNormal);
            let mut y = self.points[i] + step * z;
            if self.spec.is_circular() {
                y = y.rem_euclid(TAU);
            }
            let r = self.log_ratio(i, y);
            let u: f64 = self.rng.random();
            if r >= 0.0 || u.ln() < r {
                self.points[i] = y;
                self.unnormalized += r;
                acc += 1;
            }
        }
        self.proposals += self.points.len() as u64;
        self.accepted += acc as u64;
        acc
    }

    /// A sweep followed by a Robbins–Monro update of the log step toward the
    /// target acceptance rate.
    pub fn adaptive_sweep(&mut self) {
        let acc = self.sweep() as f64 / self.points.len() as f64;
        self.adapt_sweeps += 1;
        let gain = 1.0 / (self.adapt_sweeps as f64).powf(0.6);
        self.log_step += gain * (acc - TARGET_ACCEPTANCE);
    }

    /// Recompute the cached log-density exactly (removes accumulated rounding).
    pub fn refresh(&mut self) -> Result<()> {
        self.unnormalized = log_density_unnormalized(&self.spec, self.beta, &self.points)?;
        Ok(())
    }

    /// Current state as a sorted, normalized sample.
    pub fn sample(&self) -> Result<ConfigurationSample> {
        ConfigurationSample::from_points(&self.spec, self.beta, self.points.clone())
    }
}

/// Run `steps` sweeps in total: 200n adaptive burn-in sweeps, then fixed-step
/// sweeps, and return the final configuration.
pub fn sample_mcmc(
    spec: &EnsembleSpec,
    n: usize,
    beta: BetaParam,
    steps: u64,
    seed: RngSeed,
) -> Result<(ConfigurationSample, McmcDiagnostics)> {
    let burn_in = default_burn_in(n);
    if steps < burn_in {
        return Err(Error::InvalidParameter(format!("steps = {steps} is below the burn-in minimum {burn_in}")));
    }
    let mut chain = McmcChain::new(spec, n, beta, seed)?;
    for _ in 0..burn_in {
        chain.adaptive_sweep();
    }
    chain.refresh()?;
    chain.reset_counters();
    let kept = (steps - burn_in).max(1);
    let mut trace = Vec::with_capacity(kept as usize);
    for _ in 0..kept {
        chain.sweep();
        trace.push(chain.unnormalized_log_density());
    }
    chain.refresh()?;
    let diagnostics = McmcDiagnostics {
        acceptance_rate: chain.acceptance_rate(),
        burn_in,
        thinning: n as u64,
        ess_estimate: effective_sample_size(&trace).max(1.0),
    };
    Ok((chain.sample()?, diagnostics))
}
