//! Monte Carlo simulation of the full source, noise, test channel and
//! estimator chain.
//!
//! Samples are split into fixed-size blocks. Block `b` draws from a ChaCha8
//! stream keyed by `(seed, b)`, and block sums are reduced in index order, so
//! reports are bit-identical for any thread count.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binary::{llr_spec, test_channel_distortion, BinaryModel};
use crate::error::{domain, Result};
use crate::gaussian::{check_rates, GaussianModel};

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 10_000;

const BLOCK: usize = 1 << 14;
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl SimReport {
    /// `(estimate - reference) / stderr`.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.estimate - reference;
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Runs `per_sample` over `samples` draws and reports the mean of its output.
fn run<F>(samples: usize, seed: u64, per_sample: F) -> Result<SimReport>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if samples < MIN_SAMPLES {
        return domain(format!("{samples} samples is below the floor of {MIN_SAMPLES}"));
    }
    let blocks = samples.div_ceil(BLOCK);
    let sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let n = BLOCK.min(samples - b * BLOCK);
            let (mut s, mut ss) = (0.0, 0.0);
            for _ in 0..n {
                let v = per_sample(&mut rng);
                s += v;
                ss += v * v;
            }
            (s, ss)
        })
        .collect();
    let (s, ss) = sums.iter().fold((0.0, 0.0), |(a, b), &(s, ss)| (a + s, b + ss));
    let n = samples as f64;
    let mean = s / n;
    let var = ((ss - s * mean) / (n - 1.0)).max(0.0);
    Ok(SimReport {
        estimate: mean,
        stderr: (var / n).sqrt(),
        samples,
        seed,
    })
}

/// Forward test channel `Yhat = a (Y + W)` achieving the quadratic
/// distortion-rate function of `Y ~ N(0, var)` at `rate` bits:
/// `a = 1 - 2^-2R`, `Var(W) = var 2^-2R / (1 - 2^-2R)`.
#[derive(Debug, Clone, Copy)]
struct GaussianTestChannel {
    gain: f64,
    noise_std: f64,
}

impl GaussianTestChannel {
    fn new(var: f64, rate: f64) -> Option<Self> {
        let x = (-2.0 * rate).exp2();
        let gain = 1.0 - x;
        if gain <= 0.0 {
            return None;
        }
        Some(GaussianTestChannel {
            gain,
            noise_std: (var * x / gain).sqrt(),
        })
    }
}

/// Mean squared error of the linear MMSE estimate of `X` from the
/// compressed observations.
pub fn simulate_gaussian(model: &GaussianModel, rates: &[f64], samples: usize, seed: u64) -> Result<SimReport> {
    check_rates(model.len(), rates)?;
    // (sqrt(gamma), channel) for sensors that send anything.
    let sensors: Vec<(f64, GaussianTestChannel)> = model
        .gammas()
        .iter()
        .zip(rates)
        .filter_map(|(&g, &r)| GaussianTestChannel::new(g + 1.0, r).map(|c| (g.sqrt(), c)))
        .collect();

    // LMMSE weights from second-order statistics: Cov(Yhat) w = Cov(Yhat, X).
    let k = sensors.len();
    let weights: Vec<f64> = if k == 0 {
        Vec::new()
    } else {
        let cov = DMatrix::from_fn(k, k, |i, j| {
            let (si, ci) = sensors[i];
            let (sj, cj) = sensors[j];
            let mut v = ci.gain * cj.gain * si * sj;
            if i == j {
                v += ci.gain * ci.gain * (1.0 + ci.noise_std * ci.noise_std);
            }
            v
        });
        let cross = DVector::from_fn(k, |i, _| sensors[i].1.gain * sensors[i].0);
        let chol = cov
            .cholesky()
            .ok_or_else(|| crate::Error::Domain("observation covariance is singular".into()))?;
        chol.solve(&cross).iter().copied().collect()
    };

    run(samples, seed, |rng| {
        let x: f64 = rng.sample(StandardNormal);
        let mut estimate = 0.0;
        for ((sqrt_gamma, ch), w) in sensors.iter().zip(&weights) {
            let z: f64 = rng.sample(StandardNormal);
            let n: f64 = rng.sample(StandardNormal);
            let y = sqrt_gamma * x + z;
            let y_hat = ch.gain * (y + ch.noise_std * n);
            estimate += w * y_hat;
        }
        let e = x - estimate;
        e * e
    })
}

/// Hamming error rate of the threshold fusion rule. Each sensor's
/// reconstruction is `X xor Bern(p_l) xor Bern(D_l)`; ties on the threshold
/// are broken by a fair coin.
///
/// For a biased source this composes the symmetric test channel BSC(D_l)
/// with the observation, which is the fusion model the analytic formula
/// assumes rather than the exact nonuniform test channel.
pub fn simulate_binary(model: &BinaryModel, rates: &[f64], samples: usize, seed: u64) -> Result<SimReport> {
    let spec = llr_spec(model, rates)?;
    let flips: Vec<(f64, f64, f64)> = model
        .ps()
        .iter()
        .zip(rates)
        .zip(&spec.sensors)
        .enumerate()
        .map(|(l, ((&p, &r), s))| {
            let d = test_channel_distortion(r, model.source_entropy(l))?.get();
            Ok((p, d, s.weight))
        })
        .collect::<Result<Vec<_>>>()?;
    let alpha = model.alpha();
    let t = spec.threshold;

    run(samples, seed, |rng| {
        let x = rng.random::<f64>() < alpha;
        let mut score = 0.0;
        for &(p, d, c) in &flips {
            let noise = rng.random::<f64>() < p;
            let coding = rng.random::<f64>() < d;
            let y_hat = x ^ noise ^ coding;
            if c > 0.0 {
                score += if y_hat { c } else { -c };
            }
        }
        let coin = rng.random::<bool>();
        let decide_one = if (score - t).abs() <= TIE_EPS { coin } else { score > t };
        if decide_one != x {
            1.0
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_sample_floor_is_rejected() {
        let m = GaussianModel::new(vec![1.0]).unwrap();
        assert!(simulate_gaussian(&m, &[1.0], MIN_SAMPLES - 1, 1).is_err());
    }

    #[test]
    fn zero_rate_gaussian_is_prior_variance() {
        let m = GaussianModel::new(vec![2.0, 1.0]).unwrap();
        let r = simulate_gaussian(&m, &[0.0, 0.0], 200_000, 7).unwrap();
        assert!((r.estimate - 1.0).abs() <= 3.0 * r.stderr, "{r:?}");
    }

    #[test]
    fn clean_observation_limit() {
        let m = GaussianModel::new(vec![3.0]).unwrap();
        let r = simulate_gaussian(&m, &[30.0], 200_000, 11).unwrap();
        assert!((r.estimate - 0.25).abs() <= 3.0 * r.stderr, "{r:?}");
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let m = BinaryModel::symmetric(vec![0.2]).unwrap();
        let a = simulate_binary(&m, &[1.0], 50_000, 3).unwrap();
        let b = simulate_binary(&m, &[1.0], 50_000, 3).unwrap();
        assert_eq!(a, b);
        let c = simulate_binary(&m, &[1.0], 50_000, 4).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn biased_zero_rate_is_constant_guess() {
        let m = BinaryModel::new(vec![0.2, 0.3], 0.3).unwrap();
        let r = simulate_binary(&m, &[0.0, 0.0], 200_000, 5).unwrap();
        assert!((r.estimate - 0.3).abs() <= 3.0 * r.stderr, "{r:?}");
    }

    #[test]
    fn z_score_handles_zero_stderr() {
        let r = SimReport {
            estimate: 0.0,
            stderr: 0.0,
            samples: MIN_SAMPLES,
            seed: 0,
        };
        assert_eq!(r.z_score(0.0), 0.0);
        assert_eq!(r.z_score(0.1), f64::NEG_INFINITY);
    }
}
