//! Adaptive Gauss–Kronrod (7/15 point) quadrature on finite intervals.
//!
//! Intervals are refined largest-error first. A shared [`EvalBudget`] caps the
//! number of integrand evaluations, which lets nested integrals draw from one
//! pool.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Evaluation counter shared between (possibly nested) integrations.
#[derive(Debug)]
pub struct EvalBudget {
    remaining: Cell<u64>,
    used: Cell<u64>,
}

impl EvalBudget {
    pub fn new(max_evals: u64) -> Self {
        EvalBudget { remaining: Cell::new(max_evals), used: Cell::new(0) }
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }

    pub fn remaining(&self) -> u64 {
        self.remaining.get()
    }

    fn take(&self, k: u64) -> bool {
        let r = self.remaining.get();
        if r < k {
            return false;
        }
        self.remaining.set(r - k);
        self.used.set(self.used.get() + k);
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Evaluation cap used by [`integrate`]; ignored by [`integrate_with_budget`].
    pub max_evals: u64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_evals: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    // QUADPACK-style error scaling.
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    asc *= half.abs();
    let value = kron * half;
    let mut error = ((kron - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    let resabs: f64 = {
        let mut s = WGK[7] * fc.abs();
        for j in 0..7 {
            s += WGK[j] * (fv1[j].abs() + fv2[j].abs());
        }
        s * half.abs()
    };
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, error }
}

/// Integrate `f` over `[a, b]` drawing evaluations from `budget`.
pub fn integrate_with_budget<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
    budget: &EvalBudget,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("integration bounds must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    let start = budget.used();
    if !budget.take(15) {
        return Err(budget_exhausted(start, budget));
    }
    let first = kronrod(&mut f, a, b);
    let mut total = first.value;
    let mut err_total = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        if !total.is_finite() {
            return Err(Error::NonConvergence {
                what: "quadrature",
                detail: format!("non-finite integrand on [{a}, {b}]"),
            });
        }
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err_total <= tol {
            break;
        }
        let worst = heap.pop().expect("segment heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Interval at machine resolution; accept what we have.
            heap.push(worst);
            break;
        }
        if !budget.take(30) {
            return Err(budget_exhausted(start, budget));
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err_total += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            // Refresh the running sums to limit drift.
            total = heap.iter().map(|s| s.value).sum();
            err_total = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error_estimate: f64 = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult { value, error_estimate, evaluations: budget.used() - start })
}

fn budget_exhausted(start: u64, budget: &EvalBudget) -> Error {
    Error::NonConvergence {
        what: "quadrature",
        detail: format!("evaluation budget exhausted after {} evaluations", budget.used() - start),
    }
}

/// Integrate `f` over `[a, b]` with a private budget of `opts.max_evals`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    let budget = EvalBudget::new(opts.max_evals);
    integrate_with_budget(f, a, b, opts, &budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &QuadOptions::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn sqrt_singularity() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn peaked_integrand() {
        let r = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, &QuadOptions::default()).unwrap();
        let exact = 2.0 * 100.0 * (100.0f64).atan();
        assert!((r.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-15, max_evals: 100 };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn shared_budget_counts_nested_calls() {
        let budget = EvalBudget::new(1_000_000);
        let opts = QuadOptions::default();
        let r = integrate_with_budget(
            |x| integrate_with_budget(|y| x * y, 0.0, 1.0, &opts, &budget).unwrap().value,
            0.0,
            1.0,
            &opts,
            &budget,
        )
        .unwrap();
        assert!((r.value - 0.25).abs() < 1e-14);
        assert_eq!(budget.used(), 15 * 16);
    }
}
