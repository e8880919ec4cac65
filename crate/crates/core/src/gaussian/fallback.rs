//! Numeric allocation for budgets the water-filling closed form cannot meet.
//!
//! Pairwise coordinate descent on the simplex `{sum R_l = R, R_l >= 0}`: each
//! move shifts rate between two sensors, optimizing the split with a 1-D
//! search. The objective is not convex below `R_l = log2(gamma_l)/2`, so the
//! descent restarts from the uniform split and a batch of random points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::{snr_gain, GaussianModel};
use crate::error::{domain, Result};
use crate::search::maximize;

#[derive(Debug, Clone, PartialEq)]
pub struct FallbackOptions {
    /// Random starting points in addition to the uniform split.
    pub random_starts: usize,
    pub seed: u64,
    /// Stop once a full sweep improves the distortion by less than this.
    pub min_improvement: f64,
    pub max_sweeps: usize,
}

impl Default for FallbackOptions {
    fn default() -> Self {
        FallbackOptions {
            random_starts: 20,
            seed: 0x05ee_df11,
            min_improvement: 1e-12,
            max_sweeps: 500,
        }
    }
}

fn distortion_of(gammas: &[f64], rates: &[f64]) -> f64 {
    let gain: f64 = gammas.iter().zip(rates).map(|(&g, &r)| snr_gain(g, r)).sum();
    1.0 / (1.0 + gain)
}

fn descend(gammas: &[f64], rates: &mut [f64], options: &FallbackOptions) -> f64 {
    let n = rates.len();
    let mut current = distortion_of(gammas, rates);
    for _ in 0..options.max_sweeps {
        let before = current;
        for i in 0..n {
            for j in (i + 1)..n {
                let pair = rates[i] + rates[j];
                if pair <= 0.0 {
                    continue;
                }
                let (gi, gj) = (gammas[i], gammas[j]);
                let (x, _) = maximize(|x| snr_gain(gi, x) + snr_gain(gj, pair - x), 0.0, pair);
                let old = (rates[i], rates[j]);
                rates[i] = x;
                rates[j] = pair - x;
                let candidate = distortion_of(gammas, rates);
                if candidate < current {
                    current = candidate;
                } else {
                    rates[i] = old.0;
                    rates[j] = old.1;
                }
            }
        }
        if before - current < options.min_improvement {
            break;
        }
    }
    current
}

/// Best allocation of `budget` found by multi-start pairwise descent.
///
/// Returns rates in model order, sorted non-increasing: the per-sensor gain
/// is supermodular in `(gamma, R)`, so giving larger rates to larger SNRs
/// never hurts.
pub fn simplex_descent(model: &GaussianModel, budget: f64, options: &FallbackOptions) -> Result<(Vec<f64>, f64)> {
    if !(budget >= 0.0) {
        return domain(format!("budget {budget} must be nonnegative"));
    }
    let gammas = model.gammas();
    let n = gammas.len();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    let mut starts = vec![vec![budget / n as f64; n]];
    for _ in 0..options.random_starts {
        // Uniform on the simplex via normalized exponentials.
        let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = w.iter().sum();
        starts.push(w.iter().map(|v| budget * v / total).collect());
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for mut rates in starts {
        let d = descend(gammas, &mut rates, options);
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some((rates, d));
        }
    }
    let (mut rates, _) = best.expect("at least the uniform start");
    rates.sort_by(|a, b| b.total_cmp(a));
    let d = distortion_of(gammas, &rates);
    Ok((rates, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concentrates_rate_in_the_convex_regime() {
        // Below log2(4)/2 = 1 bit per sensor the gain is convex; a corner wins.
        let m = GaussianModel::new(vec![4.0, 4.0]).unwrap();
        let (rates, d) = simplex_descent(&m, 0.5, &FallbackOptions::default()).unwrap();
        assert!((rates[0] - 0.5).abs() < 1e-9, "{rates:?}");
        assert!(rates[1].abs() < 1e-9);
        assert!((d - distortion_of(m.gammas(), &[0.5, 0.0])).abs() < 1e-15);
    }

    #[test]
    fn matches_closed_form_when_it_exists() {
        let m = GaussianModel::new(vec![2.0, 1.0]).unwrap();
        let (rates, _) = simplex_descent(&m, 2.0, &FallbackOptions::default()).unwrap();
        assert!((rates[0] - 1.559_836_715_324_628_6).abs() < 1e-5, "{rates:?}");
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let m = GaussianModel::new(vec![3.0, 2.5, 2.0]).unwrap();
        let o = FallbackOptions::default();
        assert_eq!(
            simplex_descent(&m, 1.3, &o).unwrap(),
            simplex_descent(&m, 1.3, &o).unwrap()
        );
    }

    #[test]
    fn single_sensor_gets_everything() {
        let m = GaussianModel::new(vec![5.0]).unwrap();
        let (rates, _) = simplex_descent(&m, 0.7, &FallbackOptions::default()).unwrap();
        assert_eq!(rates, vec![0.7]);
    }
}
