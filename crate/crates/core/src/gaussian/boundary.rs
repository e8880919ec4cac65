use super::snr_gain;
use crate::error::{domain, Result};
use crate::search::maximize;

/// Smallest gain improvement that counts as "the second sensor helps".
const IMPROVEMENT_EPS: f64 = 1e-13;
/// Upper limit for the doubling search on the budget.
const MAX_BUDGET: f64 = 1024.0;

/// Sign-equivalent form of `gain2'(0) - gain1'(budget)`.
///
/// With `e = 4^R - 1` the difference of marginal gains has the sign of
/// `A + B e + C e^2`, where `A = (1 + g1)(g2 - g1)`,
/// `B = (1 + g1)(2 g2 - g1 (1 + g2))` and `C = g2`. The expanded form keeps
/// the second-order gap of equal SNRs that a direct subtraction rounds away.
fn endpoint_gap(gamma1: f64, gamma2: f64, budget: f64) -> f64 {
    let e = (2.0 * budget * std::f64::consts::LN_2).exp_m1();
    let a = (1.0 + gamma1) * (gamma2 - gamma1);
    let b = (1.0 + gamma1) * (2.0 * gamma2 - gamma1 * (1.0 + gamma2));
    a + e * (b + e * gamma2)
}

/// Whether some split of `budget` with `R_2 > 0` beats `(budget, 0)`.
fn second_sensor_helps(gamma1: f64, gamma2: f64, budget: f64) -> bool {
    // Endpoint check: moving a sliver of rate to sensor 2 already pays off.
    if budget > 0.0 && endpoint_gap(gamma1, gamma2, budget) > 0.0 {
        return true;
    }
    let gain = |r2: f64| snr_gain(gamma1, budget - r2) + snr_gain(gamma2, r2);
    let (_, best) = maximize(gain, 0.0, budget);
    best > gain(0.0) + IMPROVEMENT_EPS
}

/// Largest two-sensor budget for which the optimal split gives everything to
/// the stronger sensor, located by bisection to within `tol` bits.
///
/// Returns `None` (unbounded) when `gamma2 = 0`.
pub fn single_active_boundary(gamma1: f64, gamma2: f64, tol: f64) -> Result<Option<f64>> {
    if !(gamma2 >= 0.0 && gamma1.is_finite()) {
        return domain(format!("SNRs ({gamma1}, {gamma2}) must be finite and nonnegative"));
    }
    if gamma2 > gamma1 {
        return domain(format!("gamma2 = {gamma2} exceeds gamma1 = {gamma1}"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance {tol} must be positive"));
    }
    if gamma2 == 0.0 {
        return Ok(None);
    }

    let mut hi = 1.0;
    while !second_sensor_helps(gamma1, gamma2, hi) {
        hi *= 2.0;
        if hi > MAX_BUDGET {
            return Ok(None);
        }
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if second_sensor_helps(gamma1, gamma2, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
