use super::{binary_mdrf, binary_mdrf_asym, BinaryModel};
use crate::allocation::{Method, RateAllocation};
use crate::error::{domain, Error, Result};

/// Two grid candidates closer than this count as tied.
const TIE_EPS: f64 = 1e-14;

/// Greedy allocation for a uniform source: fill the least noisy sensors to
/// one bit each, in order, so `R_l = clamp(R - (l - 1), 0, 1)`.
pub fn allocate_binary(model: &BinaryModel, budget: f64) -> Result<RateAllocation> {
    if !(budget >= 0.0) {
        return domain(format!("budget {budget} must be nonnegative"));
    }
    if !model.is_symmetric() {
        return Err(Error::Unsupported(format!(
            "greedy allocation assumes a uniform source (alpha = {}); use allocate_binary_asym",
            model.alpha()
        )));
    }
    let rates: Vec<f64> = (0..model.len()).map(|l| (budget - l as f64).clamp(0.0, 1.0)).collect();
    let distortion = binary_mdrf(model, &rates)?;
    Ok(RateAllocation {
        rates,
        budget,
        distortion,
        method: Method::ClosedForm,
        nu_star: None,
        feasibility: None,
    })
}

/// Two-sensor allocation for a biased source by grid search over
/// `R_1 in {0, step, ..., min(R, 1)}` with `R_2 = min(R - R_1, 1)`.
/// Ties go to the larger `R_1`.
pub fn allocate_binary_asym(model: &BinaryModel, budget: f64, step: f64) -> Result<RateAllocation> {
    if model.len() != 2 {
        return Err(Error::Unsupported(format!(
            "biased-source allocation is defined for two sensors, got {}",
            model.len()
        )));
    }
    if !(budget >= 0.0) {
        return domain(format!("budget {budget} must be nonnegative"));
    }
    if !(step > 0.0 && step <= 0.01) {
        return domain(format!("grid step {step} is outside (0, 0.01]"));
    }
    let top = budget.min(1.0);
    let points = (top / step + 1e-9).floor() as usize;

    let mut candidates = vec![top];
    candidates.extend(
        (0..=points)
            .rev()
            .map(|k| k as f64 * step)
            .filter(|&r1| r1 < top - 1e-12),
    );

    let mut best: Option<(f64, f64)> = None;
    for r1 in candidates {
        let r2 = (budget - r1).clamp(0.0, 1.0);
        let d = binary_mdrf_asym(model, &[r1, r2])?;
        if best.is_none_or(|(_, bd)| d < bd - TIE_EPS) {
            best = Some((r1, d));
        }
    }
    let (r1, distortion) = best.expect("grid contains R_1 = min(R, 1)");
    Ok(RateAllocation {
        rates: vec![r1, (budget - r1).clamp(0.0, 1.0)],
        budget,
        distortion,
        method: Method::GridSearch,
        nu_star: None,
        feasibility: None,
    })
}

/// Smallest sum rate at which the greedy allocation reaches `target`
/// distortion, or `+inf` if even `R = L` does not.
pub fn mismatch_sum_rate(model: &BinaryModel, target: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return domain(format!("tolerance {tol} must be positive"));
    }
    let at = |r: f64| allocate_binary(model, r).map(|a| a.distortion);
    let full = model.len() as f64;
    if at(full)? > target {
        return Ok(f64::INFINITY);
    }
    if at(0.0)? <= target {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, full);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if at(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
