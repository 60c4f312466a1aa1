//! Sample statistics used by the sampler diagnostics and the experiment harness.

use serde::Serialize;

use crate::modgauss::clt_tail;

/// First three cumulants with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cumulants {
    pub count: usize,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub se_k1: f64,
    pub se_k2: f64,
    pub se_k3: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// k-statistics k₁, k₂, k₃ and large-sample standard errors from central moments.
pub fn cumulants(xs: &[f64]) -> Cumulants {
    let m = xs.len();
    let mf = m as f64;
    let mu = mean(xs);
    let (mut m2, mut m3, mut m4, mut m6) = (0.0, 0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mu;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        m6 += d2 * d2 * d2;
    }
    m2 /= mf;
    m3 /= mf;
    m4 /= mf;
    m6 /= mf;
    let k2 = m2 * mf / (mf - 1.0);
    let k3 = m3 * mf * mf / ((mf - 1.0) * (mf - 2.0));
    let var_k3 = (m6 - m3 * m3 - 6.0 * m4 * m2 + 9.0 * m2 * m2 * m2).max(0.0);
    Cumulants {
        count: m,
        k1: mu,
        k2,
        k3,
        se_k1: (k2 / mf).sqrt(),
        se_k2: ((m4 - m2 * m2).max(0.0) / mf).sqrt(),
        se_k3: (var_k3 / mf).sqrt(),
    }
}

/// sup |F_m − F| for a continuous reference CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / m).max((i + 1) as f64 / m - f);
    }
    d.clamp(0.0, 1.0)
}

/// KS distance to N(0, 1).
pub fn ks_normal(xs: &[f64]) -> f64 {
    ks_one_sample(xs, |x| 1.0 - clt_tail(x))
}

/// KS distance to the uniform law on [a, b].
pub fn ks_uniform(xs: &[f64], a: f64, b: f64) -> f64 {
    ks_one_sample(xs, |x| ((x - a) / (b - a)).clamp(0.0, 1.0))
}

/// Two-sample KS statistic.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> f64 {
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic KS critical value at level `alpha` for effective sample size `m`
/// (use nm/(n+m) for the two-sample test).
pub fn ks_critical_value(alpha: f64, m: f64) -> f64 {
    (-0.5 * (0.5 * alpha).ln()).sqrt() / m.sqrt()
}

/// Lag-k sample autocorrelation.
pub fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let mu = mean(xs);
    let denom: f64 = xs.iter().map(|x| (x - mu).powi(2)).sum();
    if lag >= xs.len() || denom == 0.0 {
        return 0.0;
    }
    let num: f64 = xs.iter().zip(&xs[lag..]).map(|(a, b)| (a - mu) * (b - mu)).sum();
    num / denom
}

/// Effective sample size from Geyer's initial positive sequence estimator.
pub fn effective_sample_size(xs: &[f64]) -> f64 {
    let m = xs.len();
    if m < 4 {
        return m as f64;
    }
    let mu = mean(xs);
    let c0: f64 = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / m as f64;
    if c0 == 0.0 {
        return m as f64;
    }
    let rho =
        |k: usize| -> f64 { xs.iter().zip(&xs[k..]).map(|(a, b)| (a - mu) * (b - mu)).sum::<f64>() / (m as f64 * c0) };
    let mut tau = -1.0;
    let mut k = 0;
    while 2 * k + 1 < m {
        let pair = rho(2 * k) + rho(2 * k + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 1;
    }
    (m as f64 / tau.max(1.0 / m as f64)).min(m as f64)
}

/// Standard error of the mean of a correlated series from `batches` batch means.
pub fn batch_means_se(xs: &[f64], batches: usize) -> f64 {
    let size = xs.len() / batches;
    let means: Vec<f64> = (0..batches).map(|b| mean(&xs[b * size..(b + 1) * size])).collect();
    (variance(&means) / batches as f64).sqrt()
}

/// Estimate of log E[e^{tX}] from a sample and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogMeanExp {
    pub estimate: f64,
    pub standard_error: f64,
    /// Whether the jackknife was used instead of the delta method.
    pub jackknife: bool,
}

/// Share of the total weight above which a single replica triggers the jackknife.
pub const JACKKNIFE_WEIGHT_SHARE: f64 = 0.01;

/// log of the sample mean of e^{t x} with a delta-method standard error; falls
/// back to the jackknife when one observation carries more than 1% of the weight.
pub fn log_mean_exp(xs: &[f64], t: f64) -> LogMeanExp {
    let m = xs.len() as f64;
    let shift = xs.iter().map(|&x| t * x).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = xs.iter().map(|&x| (t * x - shift).exp()).collect();
    let total: f64 = w.iter().sum();
    let wbar = total / m;
    let estimate = shift + wbar.ln();
    let wmax = w.iter().cloned().fold(0.0, f64::max);
    if wmax > JACKKNIFE_WEIGHT_SHARE * total {
        let loo: Vec<f64> = w.iter().map(|&wi| ((total - wi) / (m - 1.0)).ln()).collect();
        let lbar = mean(&loo);
        let var = (m - 1.0) / m * loo.iter().map(|l| (l - lbar).powi(2)).sum::<f64>();
        return LogMeanExp { estimate, standard_error: var.sqrt(), jackknife: true };
    }
    let sd = (w.iter().map(|wi| (wi - wbar).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    LogMeanExp { estimate, standard_error: sd / (m.sqrt() * wbar), jackknife: false }
}
