//! KKT water-filling for the Gaussian sum-rate allocation.
//!
//! At a common water level `nu`, an active sensor's rate solves the
//! stationarity condition `2 gamma (gamma + 1) 4^R / (4^R + gamma)^2 = nu`.
//! Of the two roots in `4^R` only the larger one (`g_water`) is a minimum of
//! the distortion. The total rate `R_T(nu)` is non-increasing in `nu`, so the
//! level meeting the budget is found by bisection. `R_T` drops by
//! `log2(gamma_l) / 2` at `nu = (gamma_l + 1) / 2` for every `gamma_l > 1`,
//! and budgets falling into such a drop have no exact water level.

use serde::{Deserialize, Serialize};

use super::fallback::{simplex_descent, FallbackOptions};
use super::{gaussian_mdrf, GaussianModel};
use crate::allocation::{Feasibility, Method, RateAllocation};
use crate::error::{domain, Error, Result};

/// Lower end of the water-level bracket.
pub const NU_BRACKET_MIN: f64 = 1e-12;

/// Default tolerance on `|R_T(nu*) - R|`.
pub const DEFAULT_RATE_TOL: f64 = 1e-10;

/// Water level below which a sensor of SNR `gamma` is active:
/// `2 gamma / (gamma + 1)` for `gamma <= 1`, `(gamma + 1) / 2` above.
pub fn activation_threshold(gamma: f64) -> f64 {
    if gamma <= 1.0 {
        2.0 * gamma / (gamma + 1.0)
    } else {
        (gamma + 1.0) / 2.0
    }
}

/// Larger root in `4^R` of the stationarity condition:
/// `(gamma / nu) (gamma + 1 - nu + sqrt((gamma + 1)(gamma + 1 - 2 nu)))`.
pub fn g_water(nu: f64, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return domain(format!("SNR {gamma} must be finite and nonnegative"));
    }
    let top = (gamma + 1.0) / 2.0;
    if !(nu > 0.0 && nu <= top) {
        return domain(format!("water level {nu} is outside (0, {top}]"));
    }
    let radicand = ((gamma + 1.0) * (gamma + 1.0 - 2.0 * nu)).max(0.0);
    Ok(gamma / nu * (gamma + 1.0 - nu + radicand.sqrt()))
}

/// Rate of a sensor of SNR `gamma` at water level `nu`.
pub fn rate_from_level(nu: f64, gamma: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return domain(format!("water level {nu} must be positive"));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return domain(format!("SNR {gamma} must be finite and nonnegative"));
    }
    if gamma == 0.0 || nu > activation_threshold(gamma) {
        return Ok(0.0);
    }
    Ok((0.5 * g_water(nu, gamma)?.log2()).max(0.0))
}

/// `R_T(nu)`, the sum of per-sensor rates at water level `nu`.
pub fn total_rate(model: &GaussianModel, nu: f64) -> Result<f64> {
    model.gammas().iter().map(|&g| rate_from_level(nu, g)).sum()
}

/// Magnitude of the marginal gain `2 gamma (gamma + 1) 4^R / (4^R + gamma)^2`.
/// At an active sensor of an exact solution this equals the water level.
pub fn kkt_derivative(gamma: f64, rate: f64) -> f64 {
    let four_r = (2.0 * rate).exp2();
    2.0 * gamma * (gamma + 1.0) * four_r / ((four_r + gamma) * (four_r + gamma))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterLevelSolution {
    pub nu_star: f64,
    pub rates: Vec<f64>,
    pub total_rate: f64,
    pub active: Vec<bool>,
    /// The budget is met with equality by the closed form.
    pub exact: bool,
    pub feasibility: Feasibility,
}

impl WaterLevelSolution {
    fn at(model: &GaussianModel, nu: f64, feasibility: Feasibility) -> Result<Self> {
        let rates = model
            .gammas()
            .iter()
            .map(|&g| rate_from_level(nu, g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::with_rates(nu, rates, feasibility))
    }

    fn with_rates(nu: f64, rates: Vec<f64>, feasibility: Feasibility) -> Self {
        WaterLevelSolution {
            nu_star: nu,
            total_rate: rates.iter().sum(),
            active: rates.iter().map(|&r| r > 0.0).collect(),
            exact: feasibility.is_exact(),
            rates,
            feasibility,
        }
    }
}

/// Solves `R_T(nu*) = budget` by bisection on `(NU_BRACKET_MIN, top]`, where
/// `top` is the activation threshold of the strongest sensor.
///
/// When no water level meets the budget within `tol` the solution carries
/// `exact = false` and a diagnosis; its rates are then those at the
/// budget-feasible side of the failure point.
pub fn solve_water_level(model: &GaussianModel, budget: f64, tol: f64) -> Result<WaterLevelSolution> {
    if !(budget >= 0.0) {
        return domain(format!("budget {budget} must be nonnegative"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance {tol} must be positive"));
    }
    let top = activation_threshold(model.top());
    let n = model.len();

    if budget == 0.0 {
        let nu = if top > 0.0 { top } else { 1.0 };
        return Ok(WaterLevelSolution::with_rates(nu, vec![0.0; n], Feasibility::Exact));
    }
    if top == 0.0 {
        // Every SNR is zero; no water level assigns any rate.
        return Ok(WaterLevelSolution::with_rates(
            1.0,
            vec![0.0; n],
            Feasibility::Unreachable { max_rate: 0.0 },
        ));
    }

    // (L0 / 2) log+ gamma_1: the rate at the top threshold itself.
    let floor = total_rate(model, top)?;
    if (budget - floor).abs() <= tol {
        return WaterLevelSolution::at(model, top, Feasibility::Exact);
    }
    if budget < floor {
        return Ok(WaterLevelSolution::with_rates(
            top,
            vec![0.0; n],
            Feasibility::InfeasibleBelowThreshold { required: floor },
        ));
    }

    let mut lo = NU_BRACKET_MIN;
    let mut hi = top;
    let at_lo = total_rate(model, lo)?;
    if at_lo < budget - tol {
        return WaterLevelSolution::at(model, lo, Feasibility::Unreachable { max_rate: at_lo });
    }
    // Invariant: R_T(lo) >= budget > R_T(hi).
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total_rate(model, mid)? >= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let above = total_rate(model, lo)?;
    let below = total_rate(model, hi)?;
    if (above - budget).abs() <= tol {
        WaterLevelSolution::at(model, lo, Feasibility::Exact)
    } else if (budget - below).abs() <= tol {
        WaterLevelSolution::at(model, hi, Feasibility::Exact)
    } else {
        WaterLevelSolution::at(model, hi, Feasibility::InsideJump { nu: hi, below, above })
    }
}

/// Options for [`allocate_gaussian_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianOptions {
    pub tol: f64,
    /// Run the numeric simplex optimizer when the closed form is inexact.
    /// When disabled such budgets yield [`Error::Infeasible`].
    pub fallback: bool,
    pub fallback_options: FallbackOptions,
}

impl Default for GaussianOptions {
    fn default() -> Self {
        GaussianOptions {
            tol: DEFAULT_RATE_TOL,
            fallback: true,
            fallback_options: FallbackOptions::default(),
        }
    }
}

/// Distortion-minimizing allocation of `budget` bits across the sensors.
pub fn allocate_gaussian(model: &GaussianModel, budget: f64) -> Result<RateAllocation> {
    allocate_gaussian_with(model, budget, &GaussianOptions::default())
}

pub fn allocate_gaussian_with(model: &GaussianModel, budget: f64, options: &GaussianOptions) -> Result<RateAllocation> {
    if !(budget >= 0.0) {
        return domain(format!("budget {budget} must be nonnegative"));
    }
    if budget == 0.0 {
        return Ok(RateAllocation {
            rates: vec![0.0; model.len()],
            budget,
            distortion: 1.0,
            method: Method::ClosedForm,
            nu_star: None,
            feasibility: Some(Feasibility::Exact),
        });
    }
    let solution = solve_water_level(model, budget, options.tol)?;
    if solution.exact {
        let distortion = gaussian_mdrf(model, &solution.rates)?;
        return Ok(RateAllocation {
            rates: solution.rates,
            budget,
            distortion,
            method: Method::ClosedForm,
            nu_star: Some(solution.nu_star),
            feasibility: Some(solution.feasibility),
        });
    }
    if !options.fallback {
        return Err(Error::Infeasible(format!(
            "no water level meets budget {budget} ({})",
            solution.feasibility.label()
        )));
    }
    let (rates, distortion) = simplex_descent(model, budget, &options.fallback_options)?;
    Ok(RateAllocation {
        rates,
        budget,
        distortion,
        method: Method::FallbackNumeric,
        nu_star: None,
        feasibility: Some(solution.feasibility),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(g: &[f64]) -> GaussianModel {
        GaussianModel::new(g.to_vec()).unwrap()
    }

    #[test]
    fn g_water_boundary_value() {
        assert!((g_water(2.5, 4.0).unwrap() - 4.0).abs() < 1e-12);
        for &g in &[0.2, 1.0, 3.0, 7.5] {
            assert!((g_water((g + 1.0) / 2.0, g).unwrap() - g).abs() < 1e-12);
        }
    }

    #[test]
    fn g_water_satisfies_stationarity() {
        let g = g_water(0.9, 2.0).unwrap();
        assert!((g - 8.883_036_880_224_505).abs() < 1e-12);
        // 2 gamma (gamma + 1) g / (g + gamma)^2 = nu
        let residual = 2.0 * 2.0 * 3.0 * g / ((g + 2.0) * (g + 2.0)) - 0.9;
        assert!(residual.abs() < 1e-12);
    }

    #[test]
    fn g_water_decreasing_and_diverging() {
        let mut prev = f64::INFINITY;
        for i in 1..=1000 {
            let nu = i as f64 / 1000.0;
            let g = g_water(nu, 1.0).unwrap();
            assert!(g < prev);
            prev = g;
        }
        assert!(g_water(1e-9, 1.0).unwrap() > 1e9);
    }

    #[test]
    fn g_water_domain() {
        assert!(g_water(0.0, 1.0).is_err());
        assert!(g_water(-1.0, 1.0).is_err());
        assert!(g_water(1.01, 1.0).is_err());
        assert!(g_water(0.5, -1.0).is_err());
    }

    #[test]
    fn rate_from_level_regions() {
        assert_eq!(rate_from_level(0.8, 0.5).unwrap(), 0.0);
        assert!((rate_from_level(2.5, 4.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((rate_from_level(0.9, 2.0).unwrap() - 1.575_526_490_485_279_3).abs() < 1e-12);
        assert_eq!(rate_from_level(2.6, 4.0).unwrap(), 0.0);
        assert_eq!(rate_from_level(0.3, 0.0).unwrap(), 0.0);
        assert!(rate_from_level(0.0, 1.0).is_err());
    }

    #[test]
    fn total_rate_examples() {
        let m = model(&[3.0, 2.5, 1.5]);
        assert_eq!(total_rate(&m, 2.0 + 1e-9).unwrap(), 0.0);
        // 1.5755264904852793 + 0.47241070788563877
        let t = total_rate(&model(&[2.0, 1.0]), 0.9).unwrap();
        assert!((t - 2.047_937_198_370_918).abs() < 1e-12);
        assert_eq!(total_rate(&model(&[1.0, 1.0]), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn total_rate_has_downward_jumps() {
        let m = model(&[3.0, 2.0]);
        let at = total_rate(&m, 1.5).unwrap();
        let after = total_rate(&m, 1.5 + 1e-12).unwrap();
        assert!((at - after - 0.5 * 2.0f64.log2()).abs() < 1e-6);
    }

    #[test]
    fn solve_two_sensor_example() {
        // Brent root of R_T(nu) = 2, cross-checked by a 1e-4 grid over R_1.
        let s = solve_water_level(&model(&[2.0, 1.0]), 2.0, 1e-10).unwrap();
        assert!(s.exact);
        assert!((s.nu_star - 0.912_401_186_631_819_7).abs() < 1e-9);
        assert!((s.rates[0] - 1.559_836_715_324_628_6).abs() < 1e-8);
        assert!((s.rates[1] - 0.440_163_284_675_371_5).abs() < 1e-8);
        assert!((s.total_rate - 2.0).abs() <= 1e-10);
        assert_eq!(s.active, vec![true, true]);
    }

    #[test]
    fn solve_detects_threshold_infeasibility() {
        let s = solve_water_level(&model(&[4.0, 4.0]), 0.5, 1e-10).unwrap();
        assert!(!s.exact);
        match s.feasibility {
            Feasibility::InfeasibleBelowThreshold { required } => assert!((required - 2.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn solve_detects_jump() {
        // R_T jumps from ~1.585 to ~2.085 at nu = 1.5.
        let s = solve_water_level(&model(&[3.0, 2.0]), 1.8, 1e-10).unwrap();
        assert!(!s.exact);
        assert!(matches!(s.feasibility, Feasibility::InsideJump { .. }));
        assert!(s.total_rate <= 1.8);
    }

    #[test]
    fn solve_single_user_takes_full_budget() {
        let s = solve_water_level(&model(&[0.5]), 1.0, 1e-12).unwrap();
        assert!(s.exact);
        assert!((s.rates[0] - 1.0).abs() < 1e-12);
        assert!((g_water(s.nu_star, 0.5).unwrap() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn solve_budget_at_floor_is_exact() {
        let s = solve_water_level(&model(&[4.0, 4.0, 1.0]), 2.0, 1e-10).unwrap();
        assert!(s.exact);
        assert_eq!(s.nu_star, 2.5);
        assert_eq!(s.active, vec![true, true, false]);
    }

    #[test]
    fn solve_rejects_bad_inputs() {
        let m = model(&[1.0]);
        assert!(solve_water_level(&m, -1.0, 1e-10).is_err());
        assert!(solve_water_level(&m, 1.0, 0.0).is_err());
    }

    #[test]
    fn all_zero_snr_is_unreachable() {
        let s = solve_water_level(&model(&[0.0, 0.0]), 1.0, 1e-10).unwrap();
        assert!(matches!(s.feasibility, Feasibility::Unreachable { .. }));
    }

    #[test]
    fn allocate_zero_budget() {
        let a = allocate_gaussian(&model(&[3.0, 1.0]), 0.0).unwrap();
        assert_eq!(a.rates, vec![0.0, 0.0]);
        assert_eq!(a.distortion, 1.0);
    }

    #[test]
    fn allocate_symmetric_pair_splits_evenly() {
        let a = allocate_gaussian(&model(&[1.0, 1.0]), 2.0).unwrap();
        assert_eq!(a.method, Method::ClosedForm);
        assert!((a.rates[0] - 1.0).abs() < 1e-9);
        assert_eq!(a.rates[0], a.rates[1]);
    }

    #[test]
    fn allocate_leaves_weak_sensor_idle() {
        let a = allocate_gaussian(&model(&[2.0, 0.1]), 0.2).unwrap();
        assert_eq!(a.rates[1], 0.0);
        assert!((a.rates[0] - 0.2).abs() < 1e-9);
    }

    #[test]
    fn allocate_falls_back_below_threshold() {
        let a = allocate_gaussian(&model(&[4.0, 4.0]), 0.5).unwrap();
        assert_eq!(a.method, Method::FallbackNumeric);
        assert!((a.sum_rate() - 0.5).abs() < 1e-9);
        assert!(a.rates[0] >= a.rates[1]);
        let no_fallback = GaussianOptions {
            fallback: false,
            ..GaussianOptions::default()
        };
        assert!(matches!(
            allocate_gaussian_with(&model(&[4.0, 4.0]), 0.5, &no_fallback),
            Err(Error::Infeasible(_))
        ));
    }
}
