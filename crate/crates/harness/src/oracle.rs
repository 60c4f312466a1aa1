//! Brute-force normalisation oracle: nested adaptive quadrature of the
//! unnormalised joint density for two or three particles.
//!
//! The integrand is symmetric, so only the ordered region x₁ < x₂ < x₃ is
//! integrated (and multiplied by n!). On that region |x_j − x_k|^β is smooth,
//! which keeps the nested Gauss–Kronrod rules cheap.

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, TAU};

use betaens::partition::{log_density_unnormalized, log_partition};
use betaens::quadrature::{integrate_with_budget, EvalBudget, QuadOptions};
use betaens::{BetaParam, EnsembleSpec, Error};

/// Hard cap on integrand evaluations for one oracle run.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    /// ∫ exp(unnormalised log-density − log Z); 1 when the closed form is right.
    pub ratio: f64,
    pub evaluations: u64,
}

#[derive(Debug)]
pub enum OracleError {
    /// The evaluation budget ran out before the tolerances were met.
    BudgetExhausted {
        evaluations: u64,
    },
    Core(Error),
}

impl std::fmt::Display for OracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleError::BudgetExhausted { evaluations } => {
                write!(f, "quadrature budget exhausted after {evaluations} evaluations")
            }
            OracleError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for OracleError {}

type Chart = (f64, f64, fn(f64) -> (f64, f64));

/// Integration range in u and the map u ↦ (x, dx/du). All maps are increasing.
fn chart(spec: &EnsembleSpec) -> Chart {
    match spec {
        EnsembleSpec::Hermite | EnsembleSpec::Cauchy { .. } => {
            (-FRAC_PI_2, FRAC_PI_2, |u| (u.tan(), 1.0 / (u.cos() * u.cos())))
        }
        EnsembleSpec::Laguerre { .. } => (0.0, 1.0, |u| (u / (1.0 - u), 1.0 / ((1.0 - u) * (1.0 - u)))),
        EnsembleSpec::Jacobi { .. } => (0.0, 1.0, |u| (u, 1.0)),
        EnsembleSpec::Circular | EnsembleSpec::CircularJacobi { .. } => (0.0, TAU, |u| (u, 1.0)),
    }
}

/// Check exp(log_partition) against quadrature for n ∈ {2, 3}.
pub fn normalization_ratio(
    spec: &EnsembleSpec,
    n: u64,
    beta: BetaParam,
    max_evals: u64,
) -> Result<OracleValue, OracleError> {
    if !(2..=3).contains(&n) {
        return Err(OracleError::Core(Error::InvalidParameter(format!(
            "the quadrature oracle handles n = 2 or 3, got {n}"
        ))));
    }
    let log_z = log_partition(spec, n, beta).map_err(OracleError::Core)?;
    let (lo, hi, map) = chart(spec);
    let budget = EvalBudget::new(max_evals);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let opts = QuadOptions { abs_tol: 1e-11, rel_tol: 1e-9, max_evals };
    let factorial = if n == 2 { 2.0 } else { 6.0 };

    let density = |us: &[f64]| -> f64 {
        let mut xs = [0.0; 3];
        let mut jac = 1.0;
        for (k, &u) in us.iter().enumerate() {
            let (x, j) = map(u);
            if !spec.in_domain(x) || !(j.is_finite()) {
                return 0.0;
            }
            xs[k] = x;
            jac *= j;
        }
        match log_density_unnormalized(spec, beta, &xs[..us.len()]) {
            Ok(l) => {
                let v = (l - log_z).exp() * jac;
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    // Returns 0 on failure and records the error; the outer levels keep going
    // (cheaply, since the budget is shared) and the error is reported at the end.
    let quad = |f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        match integrate_with_budget(f, a, b, &opts, &budget) {
            Ok(r) => r.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };

    let total = if n == 2 {
        quad(&mut |u1| quad(&mut |u2| density(&[u1, u2]), u1, hi), lo, hi)
    } else {
        quad(&mut |u1| quad(&mut |u2| quad(&mut |u3| density(&[u1, u2, u3]), u2, hi), u1, hi), lo, hi)
    };
    if let Some(e) = failure.into_inner() {
        if budget.remaining() < 30 {
            return Err(OracleError::BudgetExhausted { evaluations: budget.used() });
        }
        return Err(OracleError::Core(e));
    }
    Ok(OracleValue { ratio: factorial * total, evaluations: budget.used() })
}
