//! Monte Carlo experiments: sample replicas, reduce them in stream order and
//! compare against the exact finite-n and limiting predictions.
//!
//! Report keys (schema version 1): `schema_version`, `config`, `sampler`,
//! `empirical_cumulants`, `log_density_cumulants`, `ks_distance`, `tail_table`,
//! `exact_predictions`, `cgf_certification`, `mcmc`, `popescu_identity_error`,
//! `pass_flags`, `runtime_seconds`. The CSV has columns
//! `replica,statistic,log_density`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use betaens::ensembles::{a_beta, e_beta, sigma2_beta};
use betaens::modgauss::{clt_tail, mdp_tail, zone_control_fit, ModGaussParams};
use betaens::partition::{cgf_real, log_partition};
use betaens::sampler::mcmc::{default_burn_in, McmcChain};
use betaens::sampler::{has_exact_sampler, replicate_map, sample_exact};
use betaens::stats::{batch_means_se, cumulants, effective_sample_size, ks_normal, log_mean_exp, Cumulants};
use betaens::{BetaParam, ConfigurationSample, EnsembleSpec, McmcDiagnostics, RngSeed};
use serde::Serialize;

use crate::config::{ExperimentConfig, Statistic};
use crate::error::{io_error, HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Points of the exact-CGF certification.
pub const CGF_POINTS: [f64; 3] = [-0.5, 0.2, 0.5];
/// Thresholds on the normalised statistic for the tail table.
pub const TAIL_THRESHOLDS: [f64; 7] = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
/// Universal KS threshold.
pub const KS_THRESHOLD: f64 = 0.1;
/// Agreement with exact values is required within this many standard errors.
pub const SE_MULTIPLIER: f64 = 3.0;
const POPESCU_TOLERANCE: f64 = 1e-9;
const MCMC_BATCHES: usize = 50;
/// Step for the finite-difference cumulants of the exact CGF.
const CGF_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub threshold: f64,
    pub empirical_frequency: f64,
    pub standard_error: f64,
    /// P[N(0,1) ≥ threshold].
    pub predicted_clt: f64,
    /// Moderate-deviation prediction at x = threshold/√t_n, where defined.
    pub predicted_mdp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgfPoint {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactPredictions {
    /// E_β^V; `None` where the entropy is not available.
    pub e_beta: Option<f64>,
    pub sigma2_beta: f64,
    pub a_beta: f64,
    pub log_partition: f64,
    /// Mean, variance and third cumulant of ℒ_n from the exact CGF.
    pub log_density_mean: f64,
    pub log_density_variance: f64,
    pub log_density_third_cumulant: f64,
    pub cgf: Vec<CgfPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgfCheck {
    pub t: f64,
    pub empirical: f64,
    pub standard_error: f64,
    pub exact: f64,
    pub z_score: f64,
    pub jackknife: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub sampler: &'static str,
    pub empirical_cumulants: Cumulants,
    pub log_density_cumulants: Cumulants,
    pub ks_distance: Option<f64>,
    pub tail_table: Vec<TailRow>,
    pub exact_predictions: ExactPredictions,
    pub cgf_certification: Vec<CgfCheck>,
    pub mcmc: Option<McmcDiagnostics>,
    pub popescu_identity_error: Option<f64>,
    pub pass_flags: BTreeMap<String, bool>,
    pub runtime_seconds: f64,
}

impl ExperimentReport {
    pub fn all_passed(&self) -> bool {
        self.pass_flags.values().all(|&p| p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with the timing field zeroed, for reproducibility comparisons.
    pub fn to_json_without_timing(&self) -> Result<String> {
        let mut r = self.clone();
        r.runtime_seconds = 0.0;
        r.to_json()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    /// (statistic, ℒ_n) per replica, in stream order.
    pub rows: Vec<(f64, f64)>,
}

impl ExperimentOutcome {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("replica,statistic,log_density\n");
        for (i, (stat, ld)) in self.rows.iter().enumerate() {
            writeln!(s, "{i},{stat},{ld}").expect("writing to a String cannot fail");
        }
        s
    }

    /// Write the JSON report to `path` and the CSV next to it (`.csv`).
    /// Both files are written to temporaries first and renamed into place.
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        let csv_path = path.with_extension("csv");
        write_atomic(path, &self.report.to_json()?)?;
        write_atomic(&csv_path, &self.to_csv())?;
        Ok(csv_path)
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| io_error(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| io_error(path, e))
}

/// Σ_{j<k} log|x_j − x_k| (chordal distance for circular kinds) and Σ V(x_k).
fn energy_parts(spec: &EnsembleSpec, points: &[f64]) -> betaens::Result<(f64, f64)> {
    let mut pairs = 0.0;
    for (j, &a) in points.iter().enumerate() {
        for &b in &points[j + 1..] {
            pairs += if spec.is_circular() { (2.0 * (0.5 * (a - b)).sin().abs()).ln() } else { (a - b).abs().ln() };
        }
    }
    let mut pot = 0.0;
    for &x in points {
        pot += spec.potential(x)?;
    }
    Ok((pairs, pot))
}

/// E_n = (2/n)[½ΣV − (1/(n−1))Σ_{j<k} log|λ_j − λ_k|].
pub fn popescu_energy(spec: &EnsembleSpec, points: &[f64]) -> betaens::Result<f64> {
    let n = points.len() as f64;
    let (pairs, pot) = energy_parts(spec, points)?;
    Ok(2.0 / n * (0.5 * pot - pairs / (n - 1.0)))
}

/// E_n rebuilt from ℒ_n and log Z: −(ℒ + log Z)/(n²β′) − 2P/(n²(n−1)),
/// P = Σ_{j<k} log|λ_j − λ_k|.
pub fn popescu_from_log_density(sample: &ConfigurationSample, log_z: f64) -> betaens::Result<f64> {
    let n = sample.points.len() as f64;
    let (pairs, _) = energy_parts(&sample.spec, &sample.points)?;
    Ok(-(sample.log_density + log_z) / (n * n * sample.beta.beta_half()) - 2.0 * pairs / (n * n * (n - 1.0)))
}

struct Draws {
    samples_ld: Vec<f64>,
    popescu: Vec<f64>,
    popescu_identity_error: f64,
    mcmc: Option<McmcDiagnostics>,
}

fn draw(config: &ExperimentConfig, beta: BetaParam, log_z: f64) -> Result<Draws> {
    let want_popescu = config.statistic == Statistic::PopescuEnergy;
    let reduce = |s: &ConfigurationSample| -> betaens::Result<(f64, f64, f64)> {
        if !want_popescu {
            return Ok((s.log_density, 0.0, 0.0));
        }
        let p = popescu_energy(&s.spec, &s.points)?;
        let q = popescu_from_log_density(s, log_z)?;
        Ok((s.log_density, p, (p - q).abs() / p.abs().max(1.0)))
    };
    let (rows, mcmc) = if has_exact_sampler(&config.spec) {
        let rows = replicate_map(config.replicas, config.seed, |seed| {
            reduce(&sample_exact(&config.spec, config.n, beta, seed)?)
        })?;
        (rows, None)
    } else {
        // One long chain: adaptive burn-in, then one kept state every n sweeps.
        let mut chain = McmcChain::new(&config.spec, config.n, beta, RngSeed::new(config.seed, 0))?;
        let burn_in = default_burn_in(config.n);
        for _ in 0..burn_in {
            chain.adaptive_sweep();
        }
        chain.reset_counters();
        let thin = config.n as u64;
        let mut rows = Vec::with_capacity(config.replicas as usize);
        for _ in 0..config.replicas {
            for _ in 0..thin {
                chain.sweep();
            }
            chain.refresh()?;
            rows.push(reduce(&chain.sample()?)?);
        }
        let ld: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let diag = McmcDiagnostics {
            acceptance_rate: chain.acceptance_rate(),
            burn_in,
            thinning: thin,
            ess_estimate: effective_sample_size(&ld),
        };
        (rows, Some(diag))
    };
    Ok(Draws {
        samples_ld: rows.iter().map(|r| r.0).collect(),
        popescu: rows.iter().map(|r| r.1).collect(),
        popescu_identity_error: rows.iter().map(|r| r.2).fold(0.0, f64::max),
        mcmc,
    })
}

/// First three cumulants of ℒ_n by central differences of the exact CGF.
fn exact_cumulants(spec: &EnsembleSpec, n: u64, beta: BetaParam) -> Result<(f64, f64, f64)> {
    let h = CGF_STEP;
    let f = |t: f64| cgf_real(spec, n, beta, t);
    let (m2, m1, z, p1, p2) = (f(-2.0 * h)?, f(-h)?, f(0.0)?, f(h)?, f(2.0 * h)?);
    let k1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let k2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
    let k3 = (-m2 + 2.0 * m1 - 2.0 * p1 + p2) / (2.0 * h * h * h);
    Ok((k1, k2, k3))
}

fn mcmc_cgf_se(xs: &[f64], t: f64) -> f64 {
    let shift = xs.iter().map(|&x| t * x).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = xs.iter().map(|&x| (t * x - shift).exp()).collect();
    let wbar = w.iter().sum::<f64>() / w.len() as f64;
    batch_means_se(&w, MCMC_BATCHES) / wbar
}

fn mcmc_cumulants(mut c: Cumulants, xs: &[f64]) -> Cumulants {
    // Inflate the i.i.d. standard errors by the integrated autocorrelation.
    let inflation = (xs.len() as f64 / effective_sample_size(xs).max(1.0)).sqrt();
    c.se_k1 = batch_means_se(xs, MCMC_BATCHES);
    c.se_k2 *= inflation;
    c.se_k3 *= inflation;
    c
}

/// Empirical log E[e^{tℒ}] against the exact CGF. Chains use batch-means errors.
pub fn cgf_check(
    spec: &EnsembleSpec,
    n: u64,
    beta: BetaParam,
    ld: &[f64],
    t: f64,
    correlated: bool,
) -> Result<CgfCheck> {
    let exact = cgf_real(spec, n, beta, t)?;
    let mut est = log_mean_exp(ld, t);
    if correlated {
        est.standard_error = mcmc_cgf_se(ld, t);
        est.jackknife = false;
    }
    let z = (est.estimate - exact) / est.standard_error;
    Ok(CgfCheck {
        t,
        empirical: est.estimate,
        standard_error: est.standard_error,
        exact,
        z_score: z,
        jackknife: est.jackknife,
        pass: z.abs() <= SE_MULTIPLIER,
    })
}

fn applicable_checks(config: &ExperimentConfig, have_e: bool, zone: bool) -> Result<Vec<String>> {
    let mut available = vec!["mean", "variance", "third-cumulant", "cgf"];
    if have_e {
        available.push("ks");
    }
    if have_e && zone {
        available.push("ks-bound");
    }
    if config.statistic == Statistic::PopescuEnergy {
        available.push("popescu");
    }
    if config.checks.is_empty() {
        return Ok(available.into_iter().map(String::from).collect());
    }
    for c in &config.checks {
        if !available.contains(&c.as_str()) {
            return Err(HarnessError::Config(format!(
                "check '{c}' does not apply to {} with statistic {}",
                config.spec.name(),
                config.statistic
            )));
        }
    }
    Ok(config.checks.clone())
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let started = Instant::now();
    let beta = BetaParam::new(config.beta)?;
    let n = config.n as u64;
    let nf = n as f64;
    let spec = &config.spec;
    let e = e_beta(spec, beta).ok();
    let zone_ok = matches!(spec, EnsembleSpec::Hermite | EnsembleSpec::Circular);
    let checks = applicable_checks(config, e.is_some(), zone_ok)?;
    let log_z = log_partition(spec, n, beta)?;
    let (k1_exact, k2_exact, k3_exact) = exact_cumulants(spec, n, beta)?;
    let sigma2 = sigma2_beta(beta);

    let draws = draw(config, beta, log_z)?;
    let ld = &draws.samples_ld;
    let normalized: Option<Vec<f64>> = e.map(|e| ld.iter().map(|&l| (l + nf * e) / (sigma2 * nf).sqrt()).collect());
    let stat: Vec<f64> = match config.statistic {
        Statistic::LogDensity => ld.clone(),
        Statistic::CenteredY => {
            let e = e.ok_or_else(|| {
                HarnessError::Config(format!("centered-y needs E_beta, unavailable for {}", spec.name()))
            })?;
            ld.iter().map(|&l| l + nf * e).collect()
        }
        Statistic::NormalizedY => normalized.clone().ok_or_else(|| {
            HarnessError::Config(format!("normalized-y needs E_beta, unavailable for {}", spec.name()))
        })?,
        Statistic::PopescuEnergy => draws.popescu.clone(),
    };

    let mut ld_cum = cumulants(ld);
    let mut stat_cum = cumulants(&stat);
    if draws.mcmc.is_some() {
        ld_cum = mcmc_cumulants(ld_cum, ld);
        stat_cum = mcmc_cumulants(stat_cum, &stat);
    }

    let mut cgf_points = Vec::new();
    let mut cert = Vec::new();
    for &t in &CGF_POINTS {
        let check = cgf_check(spec, n, beta, ld, t, draws.mcmc.is_some())?;
        cgf_points.push(CgfPoint { t, value: check.exact });
        cert.push(check);
    }

    let ks = normalized.as_deref().map(ks_normal);
    let mut tail_table = Vec::new();
    if let Some(ys) = normalized.as_deref() {
        let m = ys.len() as f64;
        let t_n = ModGaussParams::new(n, beta).t_n;
        for &y in &TAIL_THRESHOLDS {
            let p = ys.iter().filter(|&&v| v >= y).count() as f64 / m;
            let x = y / t_n.sqrt();
            let mdp = if y > 0.0 && x < 1.0 { mdp_tail(spec, n, beta, x).ok() } else { None };
            tail_table.push(TailRow {
                threshold: y,
                empirical_frequency: p,
                standard_error: (p * (1.0 - p) / m).sqrt(),
                predicted_clt: clt_tail(y),
                predicted_mdp: mdp,
            });
        }
    }

    let within = |emp: f64, exact: f64, se: f64| (emp - exact).abs() <= SE_MULTIPLIER * se;
    let mut pass_flags = BTreeMap::new();
    for c in &checks {
        let ok = match c.as_str() {
            "mean" => within(ld_cum.k1, k1_exact, ld_cum.se_k1),
            "variance" => within(ld_cum.k2, k2_exact, ld_cum.se_k2),
            "third-cumulant" => within(ld_cum.k3, k3_exact, ld_cum.se_k3),
            "cgf" => cert.iter().all(|c| c.pass),
            "ks" => ks.is_some_and(|d| d <= KS_THRESHOLD),
            "ks-bound" => {
                let xi: Vec<f64> = (-40..=40).map(|k| 0.05 * k as f64).collect();
                let zone = zone_control_fit(spec, beta, &[n], &xi)?;
                let bound = zone.kolmogorov_bound(ModGaussParams::new(n, beta).t_n)?;
                ks.is_some_and(|d| d <= bound)
            }
            "popescu" => draws.popescu_identity_error <= POPESCU_TOLERANCE,
            other => unreachable!("check '{other}' passed validation"),
        };
        pass_flags.insert(c.clone(), ok);
    }

    let rows = stat.iter().copied().zip(ld.iter().copied()).collect();
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        sampler: if draws.mcmc.is_some() { "mcmc" } else { "exact" },
        empirical_cumulants: stat_cum,
        log_density_cumulants: ld_cum,
        ks_distance: ks,
        tail_table,
        exact_predictions: ExactPredictions {
            e_beta: e,
            sigma2_beta: sigma2,
            a_beta: a_beta(beta),
            log_partition: log_z,
            log_density_mean: k1_exact,
            log_density_variance: k2_exact,
            log_density_third_cumulant: k3_exact,
            cgf: cgf_points,
        },
        cgf_certification: cert,
        mcmc: draws.mcmc,
        popescu_identity_error: (config.statistic == Statistic::PopescuEnergy).then_some(draws.popescu_identity_error),
        pass_flags,
        runtime_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(ExperimentOutcome { report, rows })
}
