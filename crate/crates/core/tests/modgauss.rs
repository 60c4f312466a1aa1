use betaens::ensembles::{a_beta, e_beta, sigma2_beta, BetaParam, EnsembleSpec};
use betaens::modgauss::{clt_tail, mdp_tail, psi_limit, psi_n, zone_control_fit, ModGaussParams};
use betaens::partition::cgf_real;
use num_complex::Complex64;
use std::f64::consts::PI;

fn beta(b: f64) -> BetaParam {
    BetaParam::new(b).unwrap()
}

fn probes() -> [Complex64; 5] {
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(1.0, 1.0),
    ]
}

#[test]
fn psi_n_is_one_at_origin_and_conjugate_symmetric() {
    let zero = Complex64::new(0.0, 0.0);
    for spec in [EnsembleSpec::Hermite, EnsembleSpec::Circular, EnsembleSpec::laguerre(2.0).unwrap()] {
        for b in [1.0, 2.0, 4.0] {
            for n in [10u64, 1000, 100_000] {
                assert_eq!(psi_n(&spec, n, beta(b), zero).unwrap(), Complex64::new(1.0, 0.0));
                for z in probes() {
                    let a = psi_n(&spec, n, beta(b), z).unwrap();
                    let c = psi_n(&spec, n, beta(b), z.conj()).unwrap();
                    assert!((a.conj() - c).norm() <= 1e-12 * a.norm().max(1.0));
                }
            }
        }
    }
}

#[test]
fn psi_n_distance_to_limit_decreases() {
    for spec in [EnsembleSpec::Hermite, EnsembleSpec::Circular] {
        for b in [1.0, 2.0, 4.0] {
            let b = beta(b);
            let dist: Vec<f64> = [1_000u64, 10_000, 100_000, 1_000_000]
                .iter()
                .map(|&n| {
                    probes()
                        .iter()
                        .map(|&z| (psi_n(&spec, n, b, z).unwrap() - psi_limit(b, z)).norm())
                        .fold(0.0, f64::max)
                })
                .collect();
            assert!(dist.windows(2).all(|w| w[1] < w[0]), "{spec:?}: {dist:?}");
        }
    }
}

fn five_point(f: impl Fn(f64) -> f64, h: f64) -> (f64, f64) {
    let (m2, m1, p1, p2) = (f(-2.0 * h), f(-h), f(h), f(2.0 * h));
    let second = (-m2 + 16.0 * m1 - 30.0 * f(0.0) + 16.0 * p1 - p2) / (12.0 * h * h);
    let third = (-m2 + 2.0 * m1 - 2.0 * p1 + p2) / (2.0 * h * h * h);
    (second, third)
}

#[test]
fn scaled_cumulants_at_large_n() {
    let n = 100_000u64;
    for spec in [EnsembleSpec::Hermite, EnsembleSpec::Circular] {
        for b in [1.0, 2.0, 4.0] {
            let b = beta(b);
            let (k2, k3) = five_point(|t| cgf_real(&spec, n, b, t).unwrap(), 1e-3);
            let nf = n as f64;
            assert!((k2 / nf / sigma2_beta(b) - 1.0).abs() < 0.01, "{spec:?} k2");
            assert!((k3 / nf / -a_beta(b) - 1.0).abs() < 0.01, "{spec:?} k3");
        }
    }
    let b2 = beta(2.0);
    assert!((sigma2_beta(b2) - (2.0 - PI * PI / 6.0)).abs() < 1e-14);
}

#[test]
fn first_cumulant_tracks_entropy_constant() {
    let b = beta(2.0);
    let n = 100_000u64;
    let h = 1e-4;
    let k1 = (cgf_real(&EnsembleSpec::Hermite, n, b, h).unwrap() - cgf_real(&EnsembleSpec::Hermite, n, b, -h).unwrap())
        / (2.0 * h);
    let e = e_beta(&EnsembleSpec::Hermite, b).unwrap();
    assert!((k1 / n as f64 + e).abs() < 1e-3);
}

#[test]
fn moderate_deviation_tail_meets_gaussian_tail() {
    // In the overlap y = x√t_n the two approximations agree up to the
    // Mills-ratio factor 1 + O(1/y²) and ψ(x) = 1 + O(x³).
    let b = beta(2.0);
    let n = 1_000_000u64;
    let p = ModGaussParams::new(n, b);
    let mut prev = f64::INFINITY;
    for y in [3.0, 4.0, 5.0] {
        let x = y / p.t_n.sqrt();
        let ratio = mdp_tail(&EnsembleSpec::Hermite, n, b, x).unwrap() / clt_tail(y);
        assert!(ratio > 0.8 && ratio <= 1.2, "y={y}: ratio {ratio}");
        assert!((ratio - 1.0).abs() < prev);
        prev = (ratio - 1.0).abs();
    }
}

#[test]
fn zone_fit_dominates_on_probe_grid() {
    let xi: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.05).collect();
    let ns = [1_000u64, 10_000, 100_000];
    for spec in [EnsembleSpec::Hermite, EnsembleSpec::Circular] {
        let b = beta(2.0);
        let z = zone_control_fit(&spec, b, &ns, &xi).unwrap();
        assert!(z.k1.is_finite() && z.k1 > 0.0 && z.satisfies_z2());
        // A finer grid than the one fitted on.
        for &n in &ns {
            for k in -200..=200 {
                let s = 0.01 * k as f64;
                let dev = (psi_n(&spec, n, b, Complex64::new(0.0, s)).unwrap() - 1.0).norm();
                assert!(dev <= z.k1 * s.abs() * (z.k2 * s * s).exp() * 1.001 + 1e-15, "{spec:?} n={n} xi={s}");
            }
        }
        assert!(z.kolmogorov_bound(ModGaussParams::new(1000, b).t_n).unwrap() > 0.0);
    }
    assert!(zone_control_fit(&EnsembleSpec::cauchy(1.0).unwrap(), beta(2.0), &ns, &xi).is_err());
}
