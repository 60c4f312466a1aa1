//! Acceptance criteria for the betaens workspace. Each criterion returns a
//! verdict with a one-line detail; `tests/acceptance.rs` runs them all.

use std::f64::consts::PI;

use betaens::ensembles::{a_beta, e_beta, sigma2_beta, BetaParam, EnsembleSpec};
use betaens::ldp::{lambda, lambda_prime, rate_function, rate_function_shift_check};
use betaens::modgauss::{psi_limit, psi_n, zone_control_fit};
use betaens::partition::cgf_real;
use betaens_harness::experiment::cgf_check;
use betaens_harness::verify::{self, CheckRow, Status, VerifyOptions};
use betaens_harness::{run_experiment, ExperimentConfig, Statistic};
use num_complex::Complex64;

/// ζ(3)
const APERY: f64 = 1.202_056_903_159_594;

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn beta(b: f64) -> BetaParam {
    BetaParam::new(b).unwrap()
}

fn config(spec: EnsembleSpec, n: usize, replicas: u64, seed: u64, statistic: Statistic) -> ExperimentConfig {
    ExperimentConfig { spec, beta: 2.0, n, replicas, seed, statistic, checks: Vec::new(), output_path: None }
}

fn rows_verdict(rows: &[CheckRow]) -> Verdict {
    let failed: Vec<&str> = rows.iter().filter(|r| r.status != Status::Pass).map(|r| r.name.as_str()).collect();
    let worst = rows.iter().map(|r| r.value / r.tolerance.max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    if failed.is_empty() {
        verdict(true, format!("{} checks, worst value/tolerance {worst:.2e}", rows.len()))
    } else {
        verdict(false, format!("{} of {} checks failed: {}", failed.len(), rows.len(), failed.join("; ")))
    }
}

pub fn ac1() -> Verdict {
    rows_verdict(&verify::selberg_checks(&VerifyOptions::default()))
}

pub fn ac2() -> Verdict {
    rows_verdict(&verify::special_function_checks())
}

pub fn ac3() -> Verdict {
    rows_verdict(&verify::entropy_checks())
}

pub fn ac4() -> Verdict {
    rows_verdict(&verify::expansion_checks())
}

pub fn ac5() -> Verdict {
    let specs = [
        EnsembleSpec::Hermite,
        EnsembleSpec::laguerre(2.0).unwrap(),
        EnsembleSpec::jacobi(1.0, 1.0).unwrap(),
        EnsembleSpec::cauchy(1.0).unwrap(),
        EnsembleSpec::Circular,
    ];
    let (mut duality, mut zero, mut shift) = (0.0f64, 0.0f64, 0.0f64);
    for spec in &specs {
        for b in [1.0, 2.0, 4.0] {
            let b = beta(b);
            for i in 0..=58 {
                let t = -0.9 + 0.1 * i as f64 + 0.001;
                let x = lambda_prime(spec, b, t).unwrap();
                let r = rate_function(spec, b, x).unwrap().value;
                duality = duality.max((r - (t * x - lambda(spec, b, t).unwrap())).abs());
            }
            zero = zero.max(rate_function(spec, b, -e_beta(spec, b).unwrap()).unwrap().value.abs());
        }
    }
    for b in [1.0, 2.0, 4.0] {
        let b = beta(b);
        let centre = -e_beta(&EnsembleSpec::Circular, b).unwrap();
        for k in -10..=10 {
            shift = shift.max(rate_function_shift_check(b, centre + 0.05 * k as f64).unwrap());
        }
    }
    verdict(
        duality <= 1e-8 && zero <= 1e-9 && shift <= 1e-8,
        format!("duality {duality:.2e} (tol 1e-8), rate at mean {zero:.2e} (tol 1e-9), circular shift {shift:.2e} (tol 1e-8)"),
    )
}

pub fn ac6() -> Verdict {
    let ns = [1_000u64, 10_000, 100_000, 1_000_000];
    let zs = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0)];
    let mut monotone = true;
    let mut worst_final = 0.0f64;
    let mut worst_case = String::new();
    for spec in [EnsembleSpec::Hermite, EnsembleSpec::Circular, EnsembleSpec::laguerre(2.0).unwrap()] {
        for b in [1.0, 2.0, 4.0] {
            let b = beta(b);
            for z in zs {
                let d: Vec<f64> =
                    ns.iter().map(|&n| (psi_n(&spec, n, b, z).unwrap() - psi_limit(b, z)).norm()).collect();
                monotone &= d.windows(2).all(|w| w[1] < w[0]);
                if d[3] > worst_final {
                    worst_final = d[3];
                    worst_case = format!("{} beta={} z={z}", spec.name(), b.beta());
                }
            }
        }
    }
    verdict(
        monotone && worst_final <= 0.02,
        format!("decreasing in n: {monotone}; max distance at n=1e6 {worst_final:.4} ({worst_case}), tol 0.02"),
    )
}

pub fn ac7() -> Verdict {
    let n = 100_000u64;
    let h = 1e-3;
    let mut worst = 0.0f64;
    for spec in [EnsembleSpec::Hermite, EnsembleSpec::Circular, EnsembleSpec::laguerre(2.0).unwrap()] {
        for b in [1.0, 2.0, 4.0] {
            let b = beta(b);
            let f = |t: f64| cgf_real(&spec, n, b, t).unwrap();
            let (m2, m1, z, p1, p2) = (f(-2.0 * h), f(-h), f(0.0), f(h), f(2.0 * h));
            let k2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h) / n as f64;
            let k3 = (-m2 + 2.0 * m1 - 2.0 * p1 + p2) / (2.0 * h * h * h) / n as f64;
            worst = worst.max((k2 / sigma2_beta(b) - 1.0).abs()).max((k3 / -a_beta(b) - 1.0).abs());
        }
    }
    let b2 = beta(2.0);
    let closed = (sigma2_beta(b2) - (2.0 - PI * PI / 6.0)).abs().max((a_beta(b2) - (3.0 - 2.0 * APERY)).abs());
    verdict(
        worst <= 0.01 && closed <= 1e-12,
        format!("max relative error {worst:.2e} (tol 1e-2); beta=2 closed forms {closed:.1e}"),
    )
}

pub fn ac8() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, spec) in
        [EnsembleSpec::Hermite, EnsembleSpec::laguerre(2.0).unwrap(), EnsembleSpec::Circular].into_iter().enumerate()
    {
        let out = run_experiment(&config(spec, 20, 200_000, 800 + i as u64, Statistic::LogDensity)).unwrap();
        let zs: Vec<String> = out.report.cgf_certification.iter().map(|c| format!("{:+.2}", c.z_score)).collect();
        pass &= out.report.cgf_certification.iter().all(|c| c.pass);
        parts.push(format!("{} z=[{}]", spec.name(), zs.join(",")));
    }
    verdict(pass, format!("{} (tol 3 SE)", parts.join("; ")))
}

pub fn ac9() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, spec) in [EnsembleSpec::Hermite, EnsembleSpec::Circular].into_iter().enumerate() {
        let ks: Vec<f64> = [100usize, 200]
            .iter()
            .map(|&n| {
                let out = run_experiment(&config(spec, n, 10_000, 900 + i as u64, Statistic::NormalizedY)).unwrap();
                out.report.ks_distance.unwrap()
            })
            .collect();
        pass &= ks[1] < ks[0] && ks[1] <= 0.1;
        parts.push(format!("{} KS(100)={:.4} KS(200)={:.4}", spec.name(), ks[0], ks[1]));
    }
    verdict(pass, format!("{} (tol 0.1 at n=200)", parts.join("; ")))
}

pub fn ac10() -> Verdict {
    let ns = [1_000u64, 10_000, 100_000];
    let fit_grid: Vec<f64> = (-40..=40).map(|k| 0.05 * k as f64).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for spec in [EnsembleSpec::Hermite, EnsembleSpec::Circular] {
        let b = beta(2.0);
        let zone = zone_control_fit(&spec, b, &ns, &fit_grid).unwrap();
        let mut ratio = 0.0f64;
        for &n in &ns {
            for k in -400..=400 {
                let xi = 0.005 * k as f64;
                if xi == 0.0 {
                    continue;
                }
                let dev = (psi_n(&spec, n, b, Complex64::new(0.0, xi)).unwrap() - 1.0).norm();
                ratio = ratio.max(dev / (zone.k1 * xi.abs() * (zone.k2 * xi * xi).exp()));
            }
        }
        pass &= zone.k1.is_finite() && zone.k2.is_finite() && ratio <= 1.0;
        parts.push(format!("{} K1={:.4} K2={:.3} max dev/envelope {ratio:.3}", spec.name(), zone.k1, zone.k2));
    }
    verdict(pass, parts.join("; "))
}

pub fn ac11() -> Verdict {
    let spec = EnsembleSpec::jacobi(1.0, 1.0).unwrap();
    let out = run_experiment(&config(spec, 2, 100_000, 1100, Statistic::LogDensity)).unwrap();
    let ld: Vec<f64> = out.rows.iter().map(|r| r.1).collect();
    let c = cgf_check(&spec, 2, beta(2.0), &ld, 0.3, true).unwrap();
    let mcmc = out.report.mcmc.unwrap();
    verdict(
        c.z_score.abs() <= 4.0,
        format!(
            "empirical {:.5} exact {:.5} z={:+.2} (tol 4 SE); acceptance {:.3}, ESS {:.0}",
            c.empirical, c.exact, c.z_score, mcmc.acceptance_rate, mcmc.ess_estimate
        ),
    )
}

pub fn ac12() -> Verdict {
    let runs = [
        config(EnsembleSpec::Hermite, 12, 3_000, 1200, Statistic::NormalizedY),
        config(EnsembleSpec::Circular, 12, 3_000, 1201, Statistic::PopescuEnergy),
        config(EnsembleSpec::laguerre(2.0).unwrap(), 6, 2_000, 1202, Statistic::CenteredY),
        config(EnsembleSpec::jacobi(1.0, 2.0).unwrap(), 3, 2_000, 1203, Statistic::LogDensity),
    ];
    let render = |threads: usize, cfg: &ExperimentConfig| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let out = pool.install(|| run_experiment(cfg)).unwrap();
        (out.report.to_json_without_timing().unwrap(), out.to_csv())
    };
    let mut identical = 0;
    for cfg in &runs {
        let reference = render(1, cfg);
        if render(1, cfg) == reference && render(4, cfg) == reference {
            identical += 1;
        }
    }
    verdict(
        identical == runs.len(),
        format!("{identical} of {} runs byte-identical across reruns and 1/4 threads", runs.len()),
    )
}

pub struct Criterion {
    pub id: u32,
    /// Runtime limit in seconds, if the criterion has one.
    pub time_limit: Option<f64>,
    pub run: fn() -> Verdict,
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, time_limit, run| Criterion { id, time_limit, run };
    vec![
        c(1, Some(120.0), ac1),
        c(2, Some(10.0), ac2),
        c(3, Some(60.0), ac3),
        c(4, Some(30.0), ac4),
        c(5, Some(10.0), ac5),
        c(6, Some(120.0), ac6),
        c(7, None, ac7),
        c(8, Some(600.0), ac8),
        c(9, Some(600.0), ac9),
        c(10, Some(60.0), ac10),
        c(11, Some(300.0), ac11),
        c(12, None, ac12),
    ]
}
