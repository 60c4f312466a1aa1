use betaens::ensembles::{BetaParam, EnsembleSpec};
use betaens::ldp::lambda;
use betaens::partition::{cgf, cgf_real, log_density, log_density_unnormalized, log_partition};
use betaens::quadrature::{integrate, QuadOptions};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, TAU};

fn beta(b: f64) -> BetaParam {
    BetaParam::new(b).unwrap()
}

fn opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-14, rel_tol: 1e-10, max_evals: 1_000_000 }
}

/// x = map(u) together with dx/du.
type Map = fn(f64) -> (f64, f64);

/// Integration range and change of variables x = map(u) with Jacobian.
fn chart(spec: &EnsembleSpec) -> (f64, f64, Map) {
    match spec {
        EnsembleSpec::Hermite | EnsembleSpec::Cauchy { .. } => {
            (-FRAC_PI_2, FRAC_PI_2, |u| (u.tan(), 1.0 / (u.cos() * u.cos())))
        }
        // x = u/(1−u) on (0, 1)
        EnsembleSpec::Laguerre { .. } => (0.0, 1.0, |u| (u / (1.0 - u), 1.0 / ((1.0 - u) * (1.0 - u)))),
        EnsembleSpec::Jacobi { .. } => (0.0, 1.0, |u| (u, 1.0)),
        _ => (0.0, TAU, |u| (u, 1.0)),
    }
}

/// ∫∫ exp(unnormalised log-density) for two particles, split along the diagonal.
fn two_particle_mass(spec: &EnsembleSpec, b: BetaParam) -> f64 {
    let (lo, hi, map) = chart(spec);
    let log_z = log_partition(spec, 2, b).unwrap();
    let pair = |u: f64, v: f64| {
        let (x, jx) = map(u);
        let (y, jy) = map(v);
        if !(spec.in_domain(x) && spec.in_domain(y)) || jx == 0.0 || jy == 0.0 {
            return 0.0;
        }
        let l = log_density_unnormalized(spec, b, &[x, y]).unwrap();
        (l - log_z).exp() * jx * jy
    };
    let inner = |u: f64| {
        let left = integrate(|v| pair(u, v), lo, u, &opts()).unwrap().value;
        let right = integrate(|v| pair(u, v), u, hi, &opts()).unwrap().value;
        left + right
    };
    integrate(inner, lo, hi, &opts()).unwrap().value
}

#[test]
fn two_particle_normalisation_all_kinds() {
    let cases = [
        (EnsembleSpec::Hermite, 1.0),
        (EnsembleSpec::Hermite, 2.0),
        (EnsembleSpec::laguerre(2.0).unwrap(), 2.0),
        (EnsembleSpec::laguerre(1.5).unwrap(), 1.0),
        (EnsembleSpec::jacobi(1.0, 1.0).unwrap(), 2.0),
        (EnsembleSpec::jacobi(0.5, 2.0).unwrap(), 1.0),
        (EnsembleSpec::cauchy(1.0).unwrap(), 2.0),
        (EnsembleSpec::cauchy(0.5).unwrap(), 1.0),
        (EnsembleSpec::Circular, 1.0),
        (EnsembleSpec::Circular, 4.0),
        (EnsembleSpec::circular_jacobi(1.0).unwrap(), 2.0),
        (EnsembleSpec::circular_jacobi(0.5).unwrap(), 1.0),
    ];
    for (spec, b) in cases {
        let mass = two_particle_mass(&spec, beta(b));
        assert!((mass - 1.0).abs() < 1e-6, "{spec:?} beta={b}: mass {mass}");
    }
}

#[test]
fn frozen_partition_values() {
    // Independent high-precision evaluations of the Selberg products.
    let b2 = beta(2.0);
    let circ = log_partition(&EnsembleSpec::Circular, 2, b2).unwrap();
    assert!((circ - (2.0 * TAU.ln() + 2f64.ln())).abs() < 1e-13);
    // Hermite n=2, β=2: ∫∫(x−y)² e^{−x²−y²} = π.
    let herm = log_partition(&EnsembleSpec::Hermite, 2, b2).unwrap();
    assert!((herm - std::f64::consts::PI.ln()).abs() < 1e-13);
    // Jacobi κ₁=κ₂=1, n=2, β=2: ∫∫(x−y)² x²(1−x)² y²(1−y)² = 1/12600.
    let jac = log_partition(&EnsembleSpec::jacobi(1.0, 1.0).unwrap(), 2, b2).unwrap();
    assert!((jac + 12600f64.ln()).abs() < 1e-12);
}

#[test]
fn scaled_cgf_approaches_lambda() {
    let b = beta(2.0);
    let specs = [
        EnsembleSpec::Hermite,
        EnsembleSpec::laguerre(2.0).unwrap(),
        EnsembleSpec::jacobi(1.0, 2.0).unwrap(),
        EnsembleSpec::cauchy(1.0).unwrap(),
        EnsembleSpec::Circular,
    ];
    for spec in &specs {
        for t in [-0.5, 0.5, 2.0] {
            let lam = lambda(spec, b, t).unwrap();
            let mut fitted = Vec::new();
            for k in 2..=5 {
                let n = 10u64.pow(k);
                let nf = n as f64;
                let gap = (cgf_real(spec, n, b, t).unwrap() / nf - lam).abs();
                fitted.push(gap * nf / nf.ln());
            }
            assert!(fitted.iter().all(|c| *c < 5.0), "{spec:?} t={t}: {fitted:?}");
            // The constant settles: consecutive fits differ by less each decade.
            let d1 = (fitted[1] - fitted[0]).abs();
            let d3 = (fitted[3] - fitted[2]).abs();
            assert!(d3 < d1 || d3 < 1e-3, "{spec:?} t={t}: {fitted:?}");
        }
    }
}

#[test]
fn cgf_is_zero_at_origin_and_errors_left_of_minus_one() {
    let b = beta(1.0);
    for spec in [EnsembleSpec::Hermite, EnsembleSpec::Circular, EnsembleSpec::circular_jacobi(2.0).unwrap()] {
        let c = cgf(&spec, 7, b, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(c.value, Complex64::new(0.0, 0.0));
        assert!(cgf_real(&spec, 7, b, -1.0).is_err());
    }
}

fn any_spec() -> impl Strategy<Value = EnsembleSpec> {
    prop_oneof![
        Just(EnsembleSpec::Hermite),
        (1.0..6.0f64).prop_map(|t| EnsembleSpec::laguerre(t).unwrap()),
        (0.2..4.0f64, 0.2..4.0f64).prop_map(|(a, b)| EnsembleSpec::jacobi(a, b).unwrap()),
        (0.2..4.0f64).prop_map(|d| EnsembleSpec::cauchy(d).unwrap()),
        Just(EnsembleSpec::Circular),
        (0.2..4.0f64).prop_map(|d| EnsembleSpec::circular_jacobi(d).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cgf_is_convex_on_the_real_axis(
        spec in any_spec(), b in 0.2..8.0f64, n in 1u64..400, t in -0.85..4.0f64, h in 1e-3..0.05f64,
    ) {
        let b = beta(b);
        let c = |s: f64| cgf_real(&spec, n, b, s).unwrap();
        let second = c(t - h) + c(t + h) - 2.0 * c(t);
        prop_assert!(second >= -1e-9, "second difference {second}");
    }

    #[test]
    fn cgf_respects_conjugation(
        spec in any_spec(), b in 0.2..8.0f64, n in 1u64..400, re in -0.9..4.0f64, im in -5.0..5.0f64,
    ) {
        let b = beta(b);
        let z = Complex64::new(re, im);
        let v = cgf(&spec, n, b, z).unwrap().value;
        let w = cgf(&spec, n, b, z.conj()).unwrap().value;
        prop_assert!((v.conj() - w).norm() <= 1e-12 * (1.0 + v.norm()));
    }

    #[test]
    fn log_density_is_exchangeable(
        b in 0.3..6.0f64,
        pts in proptest::collection::vec(0.01..0.99f64, 2..12),
        seed in any::<u64>(),
    ) {
        let spec = EnsembleSpec::jacobi(1.0, 2.0).unwrap();
        let n = pts.len() as u64;
        let b = beta(b);
        let base = log_density(&spec, n, b, &pts).unwrap();
        let mut perm = pts.clone();
        // Deterministic Fisher–Yates from the seed.
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let other = log_density(&spec, n, b, &perm).unwrap();
        prop_assert!((base - other).abs() <= 1e-12 * (1.0 + base.abs()));
    }
}
