use serde::{Deserialize, Serialize};

use super::spec::{ModelSpecFile, Settings};
use crate::allocation::{Method, RateAllocation};
use crate::binary::{allocate_binary, allocate_binary_asym, BinaryModel};
use crate::error::{Error, Result};
use crate::gaussian::{allocate_gaussian_with, kkt_derivative, GaussianModel, GaussianOptions};
use crate::model::Model;
use crate::oracles::{
    grid_search_allocation, simulate_binary, simulate_gaussian, DistortionReport, SimReport, GRID_LIMIT,
};

/// Tolerance of the zero-rate distortion check.
pub const ZERO_RATE_TOL: f64 = 1e-12;
/// Largest amount by which a grid point may beat the allocator.
pub const GRID_TOL: f64 = 1e-4;
/// Largest KKT residual of an active sensor.
pub const KKT_TOL: f64 = 1e-6;
/// Largest accepted |z| between simulation and formula.
pub const Z_LIMIT: f64 = 3.0;
const BUDGET_SLACK: f64 = 1e-9;

fn gaussian_allocation(m: &GaussianModel, budget: f64, s: &Settings, fallback: bool) -> Result<RateAllocation> {
    let options = GaussianOptions {
        tol: s.tol,
        fallback,
        ..GaussianOptions::default()
    };
    allocate_gaussian_with(m, budget, &options)
}

fn binary_allocation(m: &BinaryModel, budget: f64, s: &Settings) -> Result<RateAllocation> {
    if m.is_symmetric() {
        return allocate_binary(m, budget);
    }
    if m.len() == 2 {
        return allocate_binary_asym(m, budget, s.step);
    }
    if m.len() > GRID_LIMIT {
        return Err(Error::Unsupported(format!(
            "biased-source allocation needs at most {GRID_LIMIT} sensors, got {}",
            m.len()
        )));
    }
    let grid = grid_search_allocation(&m.clone().into(), budget, s.step)?;
    Ok(RateAllocation {
        rates: grid.best_rates,
        budget,
        distortion: grid.best_distortion,
        method: Method::GridSearch,
        nu_star: None,
        feasibility: None,
    })
}

/// Best allocation for either model: water-filling (with optional numeric
/// fallback) for Gaussian, the greedy rule for a uniform binary source, and
/// grid search for a biased one.
pub fn allocate_model(model: &Model, budget: f64, s: &Settings, fallback: bool) -> Result<RateAllocation> {
    match model {
        Model::Gaussian(m) => gaussian_allocation(m, budget, s, fallback),
        Model::Binary(m) => binary_allocation(m, budget, s),
    }
}

pub fn simulate_model(model: &Model, rates: &[f64], samples: usize, seed: u64) -> Result<SimReport> {
    match model {
        Model::Gaussian(m) => simulate_gaussian(m, rates, samples, seed),
        Model::Binary(m) => simulate_binary(m, rates, samples, seed),
    }
}

fn required_rates(spec: &ModelSpecFile) -> Result<&[f64]> {
    spec.rates
        .as_deref()
        .ok_or_else(|| Error::Domain("this command needs --rates (or \"rates\" in the spec)".into()))
}

pub fn cmd_allocate(spec: &ModelSpecFile, fallback: bool) -> Result<RateAllocation> {
    allocate_model(&spec.build()?, spec.sum_rate, &spec.settings(), fallback)
}

/// Distortion at the spec's rates. With `verify`, also the best grid
/// allocation of the same total rate and a Monte Carlo estimate.
pub fn cmd_mdrf(spec: &ModelSpecFile, verify: bool) -> Result<DistortionReport> {
    let model = spec.build()?;
    let rates = required_rates(spec)?;
    let analytic = model.distortion(rates)?;
    if !verify {
        return Ok(DistortionReport {
            analytic,
            grid: None,
            monte_carlo: None,
        });
    }
    let s = spec.settings();
    let total: f64 = rates.iter().sum();
    let grid = grid_search_allocation(&model, total, s.step)?;
    let mc = simulate_model(&model, rates, s.samples, s.seed)?;
    Ok(DistortionReport {
        analytic,
        grid: Some(grid),
        monte_carlo: Some(mc),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutcome {
    pub rates: Vec<f64>,
    pub analytic: f64,
    pub report: SimReport,
    pub z_score: f64,
}

/// Monte Carlo distortion at the spec's rates, or at the allocation of
/// `sum_rate` when no rates are given.
pub fn cmd_simulate(spec: &ModelSpecFile, fallback: bool) -> Result<SimulationOutcome> {
    let model = spec.build()?;
    let s = spec.settings();
    let rates = match &spec.rates {
        Some(r) => r.clone(),
        None => allocate_model(&model, spec.sum_rate, &s, fallback)?.rates,
    };
    let analytic = model.distortion(&rates)?;
    let report = simulate_model(&model, &rates, s.samples, s.seed)?;
    Ok(SimulationOutcome {
        z_score: report.z_score(analytic),
        rates,
        analytic,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub observed: f64,
    pub limit: f64,
}

impl Check {
    fn at_most(name: &str, observed: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            pass: observed <= limit,
            observed,
            limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub allocation: RateAllocation,
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks the allocator's output for the spec against the zero-rate
/// distortion, the budget, exhaustive grid search, stationarity (exact
/// Gaussian solutions) and simulation.
pub fn cmd_verify(spec: &ModelSpecFile, fallback: bool) -> Result<Verification> {
    let model = spec.build()?;
    let s = spec.settings();
    let n = model.len();
    if n > GRID_LIMIT {
        return Err(Error::Capacity {
            what: "sensor count",
            got: n,
            limit: GRID_LIMIT,
            hint: "grid verification is exhaustive",
        });
    }
    let alloc = allocate_model(&model, spec.sum_rate, &s, fallback)?;
    let mut checks = Vec::new();

    let zero = model.distortion(&vec![0.0; n])?;
    let expected = model.zero_rate_distortion();
    checks.push(Check {
        name: "zero_rate_distortion".into(),
        pass: (zero - expected).abs() <= ZERO_RATE_TOL,
        observed: zero,
        limit: expected,
    });

    checks.push(Check::at_most("budget", alloc.sum_rate(), spec.sum_rate + BUDGET_SLACK));

    let grid = grid_search_allocation(&model, spec.sum_rate, s.step)?;
    checks.push(Check::at_most(
        "grid_dominance",
        alloc.distortion - grid.best_distortion,
        GRID_TOL,
    ));

    if let (Model::Gaussian(m), Some(nu)) = (&model, alloc.nu_star) {
        let residual = m
            .gammas()
            .iter()
            .zip(&alloc.rates)
            .filter(|(_, &r)| r > 0.0)
            .map(|(&g, &r)| (kkt_derivative(g, r) - nu).abs())
            .fold(0.0, f64::max);
        checks.push(Check::at_most("kkt_stationarity", residual, KKT_TOL));
    }

    let mc = simulate_model(&model, &alloc.rates, s.samples, s.seed)?;
    checks.push(Check::at_most(
        "monte_carlo",
        mc.z_score(alloc.distortion).abs(),
        Z_LIMIT,
    ));

    Ok(Verification {
        allocation: alloc,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binary::TieRule;

    fn spec(text: &str) -> ModelSpecFile {
        ModelSpecFile::from_json(text).unwrap().normalize().unwrap()
    }

    #[test]
    fn zero_budget_allocations() {
        let g = cmd_allocate(&spec(r#"{"model":"gaussian","gammas":[2,1],"sum_rate":0}"#), true).unwrap();
        assert_eq!(g.rates, vec![0.0, 0.0]);
        assert_eq!(g.distortion, 1.0);
        let b = cmd_allocate(
            &spec(r#"{"model":"binary","ps":[0.2,0.3],"alpha":0.3,"sum_rate":0}"#),
            true,
        )
        .unwrap();
        assert_eq!(b.rates, vec![0.0, 0.0]);
        assert!((b.distortion - 0.3).abs() < 1e-12);
    }

    #[test]
    fn biased_three_sensor_allocation_uses_grid() {
        let a = cmd_allocate(
            &spec(r#"{"model":"binary","ps":[0.1,0.2,0.3],"alpha":0.3,"sum_rate":1,"options":{"step":0.05}}"#),
            true,
        )
        .unwrap();
        assert_eq!(a.method, Method::GridSearch);
        assert!(a.sum_rate() <= 1.0 + 1e-9);
    }

    #[test]
    fn mdrf_needs_rates() {
        assert!(cmd_mdrf(&spec(r#"{"model":"gaussian","gammas":[1]}"#), false).is_err());
    }

    #[test]
    fn strict_tie_rule_fails_zero_rate_check() {
        let mut s = spec(r#"{"model":"binary","ps":[0.2,0.3],"sum_rate":1.2,"options":{"samples":10000}}"#);
        s.options.tie_rule = Some(TieRule::Strict);
        let v = cmd_verify(&s, true).unwrap();
        assert!(!v.checks[0].pass);
        assert!(!v.all_pass());
    }

    #[test]
    fn verify_rejects_large_models() {
        let s = spec(r#"{"model":"gaussian","gammas":[1,1,1,1,1],"sum_rate":1}"#);
        assert!(matches!(cmd_verify(&s, true), Err(Error::Capacity { .. })));
    }
}
