use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::Model;

/// Largest sensor count the exhaustive grid accepts.
pub const GRID_LIMIT: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub best_rates: Vec<f64>,
    pub best_distortion: f64,
    pub step: f64,
    pub evaluations: usize,
}

struct Best {
    units: Vec<usize>,
    distortion: f64,
    evaluations: usize,
}

/// Depth-first walk over compositions of `remaining` units into
/// `units[pos..]`, each part at most `cap`.
fn walk(
    model: &Model,
    step: f64,
    cap: usize,
    units: &mut Vec<usize>,
    rates: &mut Vec<f64>,
    remaining: usize,
    best: &mut Best,
) -> Result<()> {
    let pos = units.len();
    let n = model.len();
    if pos == n - 1 {
        if remaining > cap {
            return Ok(());
        }
        units.push(remaining);
        rates.push(remaining as f64 * step);
        let d = model.distortion(rates)?;
        best.evaluations += 1;
        if d < best.distortion {
            best.distortion = d;
            best.units.clone_from(units);
        }
        units.pop();
        rates.pop();
        return Ok(());
    }
    // Later coordinates can absorb at most `cap` units each.
    let tail_capacity = cap.saturating_mul(n - pos - 1);
    let lo = remaining.saturating_sub(tail_capacity);
    for k in lo..=remaining.min(cap) {
        units.push(k);
        rates.push(k as f64 * step);
        walk(model, step, cap, units, rates, remaining - k, best)?;
        units.pop();
        rates.pop();
    }
    Ok(())
}

/// Exhaustive search over rate vectors whose entries are multiples of `step`
/// (at most one bit each for the binary model) and whose sum is the largest
/// such multiple not exceeding `budget`.
///
/// Deterministic: strata of the first coordinate run in parallel and are
/// reduced in index order, keeping the first strict minimum.
pub fn grid_search_allocation(model: &Model, budget: f64, step: f64) -> Result<GridReport> {
    if !(step > 0.0) {
        return domain(format!("grid step {step} must be positive"));
    }
    if !(budget >= 0.0 && budget.is_finite()) {
        return domain(format!("budget {budget} must be finite and nonnegative"));
    }
    let n = model.len();
    if n > GRID_LIMIT {
        return Err(Error::Capacity {
            what: "sensor count",
            got: n,
            limit: GRID_LIMIT,
            hint: "",
        });
    }
    let budget_units = (budget / step + 1e-9).floor() as usize;
    let cap = match model.rate_cap() {
        Some(c) => (c / step + 1e-9).floor() as usize,
        None => budget_units,
    };
    let total = budget_units.min(cap.saturating_mul(n));

    let first_lo = total.saturating_sub(cap.saturating_mul(n - 1));
    let first_hi = total.min(cap);
    let strata: Vec<Best> = (first_lo..=first_hi)
        .into_par_iter()
        .map(|k| {
            let mut best = Best {
                units: Vec::new(),
                distortion: f64::INFINITY,
                evaluations: 0,
            };
            let mut units = vec![k];
            let mut rates = vec![k as f64 * step];
            if n == 1 {
                best.distortion = model.distortion(&rates)?;
                best.units = units;
                best.evaluations = 1;
            } else {
                walk(model, step, cap, &mut units, &mut rates, total - k, &mut best)?;
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;

    let evaluations = strata.iter().map(|b| b.evaluations).sum();
    let winner = strata
        .into_iter()
        .reduce(|acc, b| if b.distortion < acc.distortion { b } else { acc })
        .expect("at least one stratum");
    Ok(GridReport {
        best_rates: winner.units.iter().map(|&k| k as f64 * step).collect(),
        best_distortion: winner.distortion,
        step,
        evaluations,
    })
}
