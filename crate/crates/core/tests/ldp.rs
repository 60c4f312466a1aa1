use betaens::ensembles::{e_beta, BetaParam, EnsembleSpec};
use betaens::ldp::{lambda, lambda_prime, limiting_slope, rate_function, rate_function_shift_check};
use betaens::sampler::{replicate_map, sample_hermite};
use proptest::prelude::*;

fn beta(b: f64) -> BetaParam {
    BetaParam::new(b).unwrap()
}

fn specs() -> Vec<EnsembleSpec> {
    vec![
        EnsembleSpec::Hermite,
        EnsembleSpec::laguerre(2.0).unwrap(),
        EnsembleSpec::jacobi(1.0, 3.0).unwrap(),
        EnsembleSpec::cauchy(0.5).unwrap(),
        EnsembleSpec::Circular,
    ]
}

#[test]
fn legendre_duality_on_grid() {
    for spec in specs() {
        for b in [1.0, 2.0, 4.0] {
            let b = beta(b);
            for i in 0..=58 {
                let t = -0.9 + 0.1 * i as f64 + 0.001;
                let x = lambda_prime(&spec, b, t).unwrap();
                let r = rate_function(&spec, b, x).unwrap();
                let expected = t * x - lambda(&spec, b, t).unwrap();
                assert!((r.value - expected).abs() <= 1e-8, "{spec:?} t={t}: {} vs {expected}", r.value);
                let argmax = r.argmax_t.unwrap();
                assert!((argmax - t).abs() <= 1e-6 * (1.0 + t.abs()));
            }
        }
    }
}

#[test]
fn rate_vanishes_at_the_mean() {
    for spec in specs() {
        for b in [0.5, 2.0, 6.0] {
            let b = beta(b);
            let x = -e_beta(&spec, b).unwrap();
            assert!(rate_function(&spec, b, x).unwrap().value.abs() <= 1e-9);
        }
    }
}

#[test]
fn circular_rate_is_shifted_hermite_rate() {
    for b in [1.0, 2.0, 4.0] {
        let b = beta(b);
        let eh = e_beta(&EnsembleSpec::Hermite, b).unwrap();
        for k in -10..=10 {
            let x = -eh - 0.5 + 0.05 * k as f64;
            assert!(rate_function_shift_check(b, x).unwrap() <= 1e-8);
        }
    }
}

#[test]
fn rate_is_convex_in_x() {
    let b = beta(2.0);
    for spec in specs() {
        let centre = -e_beta(&spec, b).unwrap();
        let slope = limiting_slope(&spec, b).unwrap();
        let lo = centre - 1.5;
        let hi = slope - 1e-3;
        let m = 200;
        let h = (hi - lo) / m as f64;
        let vals: Vec<f64> = (0..=m).map(|i| rate_function(&spec, b, lo + h * i as f64).unwrap().value).collect();
        for w in vals.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-8, "{spec:?}");
        }
        let beyond = rate_function(&spec, b, slope + 1e-6).unwrap();
        assert!(beyond.value.is_infinite() && beyond.argmax_t.is_none());
    }
}

#[test]
fn steep_at_minus_one() {
    let b = beta(2.0);
    let mut prev = f64::INFINITY;
    for k in 2..=8 {
        let v = lambda_prime(&EnsembleSpec::Hermite, b, -1.0 + 10f64.powi(-k)).unwrap();
        assert!(v < prev);
        prev = v;
    }
    assert!(prev < -5.0);
}

#[test]
fn lambda_difference_is_linear() {
    for b in [1.0, 2.0, 4.0] {
        let b = beta(b);
        for spec in specs() {
            let ts: Vec<f64> = (0..30).map(|i| -0.8 + 0.2 * i as f64).collect();
            let d: Vec<f64> = ts
                .iter()
                .map(|&t| lambda(&spec, b, t).unwrap() - lambda(&EnsembleSpec::Hermite, b, t).unwrap())
                .collect();
            // Least-squares line.
            let k = ts.len() as f64;
            let mt = ts.iter().sum::<f64>() / k;
            let md = d.iter().sum::<f64>() / k;
            let sxy: f64 = ts.iter().zip(&d).map(|(t, y)| (t - mt) * (y - md)).sum();
            let sxx: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
            let slope = sxy / sxx;
            let resid = ts.iter().zip(&d).map(|(t, y)| (y - md - slope * (t - mt)).abs()).fold(0.0, f64::max);
            assert!(resid <= 1e-10, "{spec:?}: residual {resid}");
            let shift = spec.entropy_shift().unwrap();
            assert!((slope + shift).abs() <= 1e-10);
        }
    }
}

#[test]
fn monte_carlo_tail_in_exponential_corridor() {
    let b = beta(2.0);
    let n = 50;
    let m = 20_000;
    let ell = replicate_map(m, 8080, |s| Ok(sample_hermite(n, b, s)?.log_density / n as f64)).unwrap();
    let mean = -e_beta(&EnsembleSpec::Hermite, b).unwrap();
    for dx in [0.15, 0.2] {
        let x = mean + dx;
        let freq = ell.iter().filter(|&&v| v >= x).count() as f64 / m as f64;
        assert!(freq > 0.0, "no exceedances at x={x}");
        let empirical = -freq.ln() / n as f64;
        let rate = rate_function(&EnsembleSpec::Hermite, b, x).unwrap().value;
        assert!(empirical >= rate / 10.0 && empirical <= rate * 10.0, "x={x}: {empirical} vs {rate}");
    }
}

proptest! {
    #[test]
    fn rate_is_nonnegative(b in 0.2..10.0f64, x in -10.0..2.0f64) {
        let r = rate_function(&EnsembleSpec::Hermite, beta(b), x).unwrap();
        prop_assert!(r.value >= 0.0);
    }
}
