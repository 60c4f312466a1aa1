use num_complex::Complex64;

use super::sum::CompensatedSum;
use crate::error::{domain, Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
pub const LN_2PI: f64 = 1.837_877_066_409_345_483_6;
pub const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_8;

/// `B_{2k} / (2k (2k-1))`, k = 1..9: Stirling series coefficients of ln Γ.
const STIRLING: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
];

/// Even Bernoulli numbers `B_2 .. B_16`.
const BERNOULLI_EVEN: [f64; 8] =
    [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0];

/// ζ(k) for k = 2..30, coefficients of the Taylor series of ln Γ(1+ε).
const ZETA_INT: [f64; 29] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926_0,
    1.000_000_059_608_189_1,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334_0,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
];

/// Shift threshold for the asymptotic expansions.
const ASYMPTOTIC_FROM: f64 = 10.0;

/// ln Γ(1+ε) for |ε| ≤ 1/4 from its Taylor series around 1.
fn ln_gamma_1p_series(eps: f64) -> f64 {
    let mut acc = 0.0;
    for (i, &z) in ZETA_INT.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let sign = if (i + 2) % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc * eps + sign * z / k;
    }
    eps * (-EULER_GAMMA + eps * acc)
}

fn stirling_series(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    STIRLING.iter().rev().fold(0.0, |acc, &c| acc * r2 + c) * r
}

fn stirling_real(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_series(x)
}

/// ℓ(a + δ) − (1+ζ)ℓ(a) with a = o + u and δ = uζ.
///
/// For large arguments the leading Stirling parts are combined by hand:
/// (a′−½)log a′ − a′ − (1+ζ)[(a−½)log a − a] = ζ(½−o)log a + (a′−½)log1p(δ/a) + ζo,
/// which avoids subtracting two numbers of size a log a.
pub(crate) fn ln_gamma_weighted_difference(o: f64, u: f64, zeta: f64) -> f64 {
    let a = o + u;
    let delta = u * zeta;
    let a2 = a + delta;
    let w = 1.0 + zeta;
    if a < ASYMPTOTIC_FROM || a2 < ASYMPTOTIC_FROM {
        return ln_gamma_pos(a2) - w * ln_gamma_pos(a);
    }
    zeta * (0.5 - o) * a.ln() + (a2 - 0.5) * (delta / a).ln_1p() + zeta * o - zeta * HALF_LN_2PI
        + (stirling_series(a2) - w * stirling_series(a))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 1e-6 {
        return ln_gamma_1p_series(x) - x.ln();
    }
    let e1 = x - 1.0;
    if e1.abs() <= 0.25 {
        return ln_gamma_1p_series(e1);
    }
    let e2 = x - 2.0;
    if e2.abs() <= 0.25 {
        return ln_gamma_1p_series(e2) + e2.ln_1p();
    }
    if x >= ASYMPTOTIC_FROM {
        return stirling_real(x);
    }
    let mut prod = 1.0;
    let mut y = x;
    while y < ASYMPTOTIC_FROM {
        prod *= y;
        y += 1.0;
    }
    stirling_real(y) - prod.ln()
}

/// Natural logarithm of Γ(x) for real `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma", format!("requires x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

fn stirling_complex(w: Complex64) -> Complex64 {
    let r = w.inv();
    let r2 = r * r;
    let series = STIRLING.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * r2 + c) * r;
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series
}

pub(crate) fn ln_gamma_right_half_plane(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(ln_gamma_pos(z.re), 0.0);
    }
    // Each shifted log has argument in (-π/2, π/2), so the sum stays on the
    // branch continuous from the positive real axis.
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm_sqr() < 144.0 {
        shift += w.ln();
        w += 1.0;
    }
    stirling_complex(w) - shift
}

/// ln Γ(z) for `Re z > 0`, on the branch that is continuous in the right
/// half-plane and real on the positive axis.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.is_finite() {
        return Err(domain("ln_gamma_complex", format!("requires Re z > 0, got {z}")));
    }
    Ok(ln_gamma_right_half_plane(z))
}

/// Order of a polygamma function `Ψ^{(k)}`; only k ∈ {0, 1, 2} is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolygammaOrder {
    Digamma,
    Trigamma,
    Tetragamma,
}

impl PolygammaOrder {
    pub fn order(self) -> u32 {
        match self {
            PolygammaOrder::Digamma => 0,
            PolygammaOrder::Trigamma => 1,
            PolygammaOrder::Tetragamma => 2,
        }
    }
}

impl TryFrom<u32> for PolygammaOrder {
    type Error = Error;

    fn try_from(order: u32) -> Result<Self> {
        match order {
            0 => Ok(PolygammaOrder::Digamma),
            1 => Ok(PolygammaOrder::Trigamma),
            2 => Ok(PolygammaOrder::Tetragamma),
            k => Err(domain("polygamma", format!("unsupported order {k}"))),
        }
    }
}

pub(crate) fn digamma_pos(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < ASYMPTOTIC_FROM {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r2 = 1.0 / (x * x);
    let mut p = r2;
    let mut series = 0.0;
    for (k, &b) in BERNOULLI_EVEN.iter().enumerate() {
        series += b / (2.0 * (k + 1) as f64) * p;
        p *= r2;
    }
    acc + x.ln() - 0.5 / x - series
}

pub(crate) fn trigamma_pos(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < ASYMPTOTIC_FROM {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    let mut p = r2 * r;
    let mut series = 0.0;
    for &b in BERNOULLI_EVEN.iter() {
        series += b * p;
        p *= r2;
    }
    acc + r + 0.5 * r2 + series
}

pub(crate) fn tetragamma_pos(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < ASYMPTOTIC_FROM {
        acc -= 2.0 / (x * x * x);
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    let mut p = r2 * r2;
    let mut series = 0.0;
    for (k, &b) in BERNOULLI_EVEN.iter().enumerate() {
        series += (2 * (k + 1) + 1) as f64 * b * p;
        p *= r2;
    }
    acc - r2 - r2 * r - series
}

/// Polygamma functions Ψ, Ψ′, Ψ″ for real `x > 0`.
pub fn polygamma(order: PolygammaOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("polygamma", format!("requires x > 0, got {x}")));
    }
    Ok(match order {
        PolygammaOrder::Digamma => digamma_pos(x),
        PolygammaOrder::Trigamma => trigamma_pos(x),
        PolygammaOrder::Tetragamma => tetragamma_pos(x),
    })
}

/// `Σ_{j=1}^n ln Γ(1 + b j)` with compensated accumulation.
pub fn sum_log_gamma(n: u64, b: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("sum_log_gamma", "requires n >= 1"));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(domain("sum_log_gamma", format!("requires b > 0, got {b}")));
    }
    let total: CompensatedSum = (1..=n).map(|j| ln_gamma_pos(1.0 + b * j as f64)).collect();
    let v = total.value();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("sum_log_gamma"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_difference_agrees_with_direct() {
        for &(o, u, z) in &[(1.0, 30.0, 0.3), (1.0, 5.0, -0.2), (200.0, 1e4, 1e-3), (3.0, -1.5, 0.7), (50.0, 0.0, -0.4)]
        {
            let direct = ln_gamma_pos(o + u * (1.0 + z)) - (1.0 + z) * ln_gamma_pos(o + u);
            let fast = ln_gamma_weighted_difference(o, u, z);
            assert!((direct - fast).abs() <= 1e-12 * (1.0 + direct.abs()) + 1e-9, "{o} {u} {z}: {direct} vs {fast}");
        }
    }
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn known_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-16);
        assert_relative_eq!(ln_gamma(0.5).unwrap(), 0.5 * PI.ln(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(5.0).unwrap(), 24f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(11.0).unwrap(), 3_628_800f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn matches_reference_table() {
        // Reference values evaluated at 30 digits.
        let table = [
            (1e-3, 6.907_178_885_383_853_7),
            (0.1, 2.252_712_651_734_205_9),
            (0.7, 0.260_867_246_531_666_57),
            (1.1, -0.049_872_441_259_839_762),
            (1.9, -0.038_984_275_923_083_362),
            (2.3, 0.154_189_454_959_630_47),
            (7.5, 7.534_364_236_758_733_0),
            (123.4, 469.336_097_442_190_59),
            (1e5, 1_051_287.708_973_656_9),
            (1e8, 1_742_068_066.103_834_7),
        ];
        for (x, want) in table {
            let got = ln_gamma(x).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn complex_reference_values() {
        let table = [
            (c(1.0, 1.0), c(-0.650_923_199_301_856_34, -0.301_640_320_467_533_20)),
            (c(0.5, 100.0), c(-156.160_694_146_284_99, 360.517_435_267_906_44)),
            (c(3.0, -7.0), c(-5.162_523_220_341_813_0, -10.116_252_238_416_789)),
            (c(0.7, 1e4), c(-15_705.202_261_341_436, 82_103.717_881_193_853)),
            (c(50.0, 0.3), c(144.564_834_891_913_76, 1.170_598_738_368_089_4)),
            (c(1e6, 2e4), c(12_815_304.582_378_832, 276_311.534_333_980_63)),
        ];
        for (z, want) in table {
            let got = ln_gamma_complex(z).unwrap();
            assert!((got - want).norm() <= 1e-10 * want.norm().max(1.0), "{z}: {got} vs {want}");
        }
    }

    #[test]
    fn complex_agrees_with_real_on_axis() {
        for x in [0.3, 1.0, 2.5, 17.0, 1234.5] {
            let z = ln_gamma_complex(c(x, 0.0)).unwrap();
            assert_eq!(z.im, 0.0);
            assert_eq!(z.re, ln_gamma(x).unwrap());
        }
    }

    #[test]
    fn complex_conjugation_symmetry() {
        for z in [c(0.6, 3.0), c(4.0, 0.01), c(20.0, -300.0)] {
            let a = ln_gamma_complex(z).unwrap();
            let b = ln_gamma_complex(z.conj()).unwrap();
            assert!((a.conj() - b).norm() < 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn domain_errors() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
        assert!(ln_gamma_complex(c(0.0, 1.0)).is_err());
        assert!(polygamma(PolygammaOrder::Digamma, 0.0).is_err());
        assert!(PolygammaOrder::try_from(3).is_err());
    }

    #[test]
    fn digamma_values() {
        let psi = |x| polygamma(PolygammaOrder::Digamma, x).unwrap();
        assert_relative_eq!(psi(1.0), -EULER_GAMMA, max_relative = 1e-14);
        assert_relative_eq!(psi(0.5), -2.0 * 2f64.ln() - EULER_GAMMA, max_relative = 1e-14);
        assert_relative_eq!(psi(2.0), 1.0 - EULER_GAMMA, max_relative = 1e-14);
    }

    #[test]
    fn polygamma_reference_table() {
        let table = [
            (1e-3, -1_000.575_571_931_810_3, 1_000_001.642_533_195_8, -2_000_000_002.397_632_2),
            (0.7, -1.220_023_553_697_934_7, 2.834_049_156_694_610_9, -6.434_992_874_190_923_7),
            (1.9, 0.356_184_161_164_059_66, 0.687_972_058_242_635_66, -0.458_312_818_829_013_53),
            (7.5, 1.946_757_484_246_086_8, 0.142_615_896_696_703_80, -0.020_305_252_536_644_664),
            (123.4, 4.811_373_775_116_277_4, 0.008_136_651_610_865_263_3, -6.620_473_419_231_093_6e-5),
            (1e5, 11.512_920_464_961_895, 1.000_005_000_016_666_7e-5, -1.000_010_000_05e-10),
        ];
        for (x, d0, d1, d2) in table {
            assert_relative_eq!(polygamma(PolygammaOrder::Digamma, x).unwrap(), d0, max_relative = 1e-11);
            assert_relative_eq!(polygamma(PolygammaOrder::Trigamma, x).unwrap(), d1, max_relative = 1e-11);
            assert_relative_eq!(polygamma(PolygammaOrder::Tetragamma, x).unwrap(), d2, max_relative = 1e-11);
        }
        assert_relative_eq!(polygamma(PolygammaOrder::Trigamma, 1.0).unwrap(), PI * PI / 6.0, max_relative = 1e-13);
        assert_relative_eq!(
            polygamma(PolygammaOrder::Tetragamma, 1.0).unwrap(),
            -2.0 * 1.202_056_903_159_594_3,
            max_relative = 1e-13
        );
    }

    #[test]
    fn sum_log_gamma_small_cases() {
        assert!(sum_log_gamma(1, 1.0).unwrap().abs() < 1e-16);
        assert_relative_eq!(sum_log_gamma(3, 1.0).unwrap(), 12f64.ln(), max_relative = 1e-14);
        assert!(sum_log_gamma(0, 1.0).is_err());
        assert!(sum_log_gamma(3, 0.0).is_err());
    }

    /// Error-free two-sum accumulation, an independent extended-precision oracle.
    fn double_double_sum(values: impl Iterator<Item = f64>) -> f64 {
        let (mut hi, mut lo) = (0.0f64, 0.0f64);
        for v in values {
            let s = hi + v;
            let bb = s - hi;
            let err = (hi - (s - bb)) + (v - bb);
            hi = s;
            lo += err;
        }
        hi + lo
    }

    #[test]
    fn sum_log_gamma_large_n_matches_extended_precision() {
        let n = 100_000u64;
        let b = 0.5;
        let oracle = double_double_sum((1..=n).map(|j| ln_gamma(1.0 + b * j as f64).unwrap()));
        let got = sum_log_gamma(n, b).unwrap();
        assert!((got - oracle).abs() <= 1e-8, "{got} vs {oracle}");
    }

    proptest! {
        #[test]
        fn recurrence_holds(lx in -2.0f64..6.0) {
            let x = 10f64.powf(lx);
            let lhs = ln_gamma(1.0 + x).unwrap() - ln_gamma(x).unwrap() - x.ln();
            let scale = ln_gamma(1.0 + x).unwrap().abs().max(1.0);
            prop_assert!(lhs.abs() <= 1e-12 * scale, "x={} residual={}", x, lhs);
        }

        #[test]
        fn complex_recurrence_holds(re in 0.5f64..40.0, im in -1e4f64..1e4) {
            let z = c(re, im);
            let lhs = ln_gamma_complex(z + 1.0).unwrap() - ln_gamma_complex(z).unwrap() - z.ln();
            let scale = ln_gamma_complex(z).unwrap().norm().max(1.0);
            prop_assert!(lhs.norm() <= 1e-12 * scale, "z={} residual={}", z, lhs);
        }

        #[test]
        fn polygamma_recurrences(x in 0.01f64..200.0) {
            let t0 = polygamma(PolygammaOrder::Digamma, 1.0 + x).unwrap() - polygamma(PolygammaOrder::Digamma, x).unwrap() - 1.0 / x;
            let t1 = polygamma(PolygammaOrder::Trigamma, 1.0 + x).unwrap() - polygamma(PolygammaOrder::Trigamma, x).unwrap() + 1.0 / (x * x);
            let t2 = polygamma(PolygammaOrder::Tetragamma, 1.0 + x).unwrap() - polygamma(PolygammaOrder::Tetragamma, x).unwrap() - 2.0 / (x * x * x);
            let s = |v: f64| v.abs().max(1.0);
            prop_assert!(t0.abs() <= 1e-10 * s(1.0 / x));
            prop_assert!(t1.abs() <= 1e-10 * s(1.0 / (x * x)));
            prop_assert!(t2.abs() <= 1e-10 * s(2.0 / (x * x * x)));
        }
    }
}
