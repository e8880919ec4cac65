//! Exact evaluation of the fusion-rule error probability.
//!
//! Under `X = 0` the decoder's score is `S(U) = sum_l c_l (2 U_l - 1)` with
//! independent `U_l ~ Bern(q_l)`; under `X = 1` it is `-S(U)`. Sensors with
//! identical `q` are pooled so each pool contributes `c (2k - n)` with a
//! binomial weight, which makes exact ties between equal weights come out as
//! exact zeros and shrinks the outcome count.

use super::{llr_spec, BinaryModel, LlrSpec};
use crate::error::{domain, Error, Result};

/// Largest sensor count evaluated by exact enumeration.
pub const ENUMERATION_LIMIT: usize = 24;

/// Absolute tolerance for a score to count as sitting on the threshold.
const TIE_EPS: f64 = 1e-12;

/// One support point of the score distribution under `X = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreAtom {
    pub score: f64,
    pub mass: f64,
}

struct Pool {
    q: f64,
    weight: f64,
    count: usize,
}

fn pools(spec: &LlrSpec) -> Vec<Pool> {
    let mut pools: Vec<Pool> = Vec::new();
    for s in &spec.sensors {
        match pools.iter_mut().find(|p| p.q == s.q) {
            Some(p) => p.count += 1,
            None => pools.push(Pool {
                q: s.q,
                weight: s.weight,
                count: 1,
            }),
        }
    }
    pools
}

fn binomial_pmf(n: usize, q: f64) -> Vec<f64> {
    let mut coeff = 1.0;
    (0..=n)
        .map(|k| {
            if k > 0 {
                coeff = coeff * (n - k + 1) as f64 / k as f64;
            }
            coeff * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32)
        })
        .collect()
}

/// Distribution of `S(U)` given `X = 0`. Zero-mass outcomes are dropped.
pub fn score_distribution(spec: &LlrSpec) -> Result<Vec<ScoreAtom>> {
    if spec.sensors.len() > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: "sensor count",
            got: spec.sensors.len(),
            limit: ENUMERATION_LIMIT,
            hint: "; use the Monte Carlo simulator instead",
        });
    }
    let pools = pools(spec);
    // A noiseless vote always reports X; no finite sum can outweigh it.
    if pools.iter().any(|p| p.q == 0.0) {
        return Ok(vec![ScoreAtom {
            score: f64::NEG_INFINITY,
            mass: 1.0,
        }]);
    }
    let pmfs: Vec<Vec<f64>> = pools.iter().map(|p| binomial_pmf(p.count, p.q)).collect();

    let mut atoms = Vec::new();
    let mut ones = vec![0usize; pools.len()];
    loop {
        let mut mass = 1.0;
        let mut score = 0.0;
        for (g, pool) in pools.iter().enumerate() {
            mass *= pmfs[g][ones[g]];
            let votes = 2 * ones[g] as i64 - pool.count as i64;
            if votes != 0 {
                score += pool.weight * votes as f64;
            }
        }
        if mass > 0.0 {
            atoms.push(ScoreAtom { score, mass });
        }
        // Odometer increment over pool counts.
        let mut g = 0;
        loop {
            if g == pools.len() {
                return Ok(atoms);
            }
            ones[g] += 1;
            if ones[g] <= pools[g].count {
                break;
            }
            ones[g] = 0;
            g += 1;
        }
    }
}

/// Symmetric-source distortion `Pr(S > 0) + w Pr(S = 0)`, with `w = 1/2`
/// under the half-mass tie rule and `0` under the strict rule.
pub fn binary_mdrf(model: &BinaryModel, rates: &[f64]) -> Result<f64> {
    if !model.is_symmetric() {
        return domain(format!(
            "binary_mdrf needs a uniform source, got alpha = {}; use binary_mdrf_asym",
            model.alpha()
        ));
    }
    let spec = llr_spec(model, rates)?;
    let w = model.tie_rule().weight();
    let atoms = score_distribution(&spec)?;
    let mut wrong = 0.0;
    let mut tied = 0.0;
    for a in &atoms {
        if a.score.abs() <= TIE_EPS {
            tied += a.mass;
        } else if a.score > 0.0 {
            wrong += a.mass;
        }
    }
    Ok(wrong + w * tied)
}

/// Bayes error of the threshold test for a source of bias `alpha`:
/// `(1 - alpha) Pr(S(U) > t) + alpha Pr(-S(U) < t)`, ties at `t` weighted by
/// the model's tie rule in each branch.
pub fn binary_mdrf_asym(model: &BinaryModel, rates: &[f64]) -> Result<f64> {
    let spec = llr_spec(model, rates)?;
    let t = spec.threshold;
    let w = model.tie_rule().weight();
    let atoms = score_distribution(&spec)?;
    let (mut x0_wrong, mut x0_tied) = (0.0, 0.0);
    let (mut x1_wrong, mut x1_tied) = (0.0, 0.0);
    for a in &atoms {
        // X = 0 observes S, X = 1 observes -S.
        if (a.score - t).abs() <= TIE_EPS {
            x0_tied += a.mass;
        } else if a.score > t {
            x0_wrong += a.mass;
        }
        let flipped = -a.score;
        if (flipped - t).abs() <= TIE_EPS {
            x1_tied += a.mass;
        } else if flipped < t {
            x1_wrong += a.mass;
        }
    }
    let alpha = model.alpha();
    Ok((1.0 - alpha) * (x0_wrong + w * x0_tied) + alpha * (x1_wrong + w * x1_tied))
}

#[cfg(test)]
mod tests {
    use super::super::TieRule;
    use super::*;

    fn sym(ps: &[f64]) -> BinaryModel {
        BinaryModel::symmetric(ps.to_vec()).unwrap()
    }

    #[test]
    fn single_sensor_anchor_points() {
        let m = sym(&[0.2]);
        assert!((binary_mdrf(&m, &[1.0]).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(binary_mdrf(&m, &[0.0]).unwrap(), 0.5);
    }

    #[test]
    fn strict_rule_loses_the_blind_guess() {
        let m = sym(&[0.2]).with_tie_rule(TieRule::Strict);
        assert_eq!(binary_mdrf(&m, &[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn dominant_sensor_decides() {
        // c1 = 2 > c2: both outcomes with U1 = 1 err, total q1 = 0.2.
        let m = sym(&[0.2, 0.2]);
        let d = binary_mdrf(&m, &[1.0, 0.5]).unwrap();
        assert!((d - 0.2).abs() < 1e-15, "{d}");
    }

    #[test]
    fn equal_weights_tie_exactly() {
        // S in {-2c, 0, 2c} with masses (0.64, 0.32, 0.04).
        let m = sym(&[0.2, 0.2]);
        let d = binary_mdrf(&m, &[1.0, 1.0]).unwrap();
        assert!((d - (0.04 + 0.16)).abs() < 1e-15);
        let atoms = score_distribution(&llr_spec(&m, &[1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(atoms.len(), 3);
        assert!(atoms.iter().any(|a| a.score == 0.0));
    }

    #[test]
    fn masses_sum_to_one() {
        let m = sym(&[0.05, 0.1, 0.1, 0.3, 0.3, 0.3]);
        let spec = llr_spec(&m, &[0.9, 0.4, 0.4, 0.2, 0.2, 0.1]).unwrap();
        let total: f64 = score_distribution(&spec).unwrap().iter().map(|a| a.mass).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn noiseless_sensor_gives_zero_distortion() {
        let m = sym(&[0.0, 0.3]);
        assert_eq!(binary_mdrf(&m, &[1.0, 0.4]).unwrap(), 0.0);
    }

    #[test]
    fn capacity_limit() {
        let m = sym(&[0.1; ENUMERATION_LIMIT + 1]);
        let rates = vec![0.5; ENUMERATION_LIMIT + 1];
        assert!(matches!(binary_mdrf(&m, &rates), Err(Error::Capacity { .. })));
    }

    #[test]
    fn mdrf_requires_uniform_source() {
        let m = BinaryModel::new(vec![0.2], 0.3).unwrap();
        assert!(binary_mdrf(&m, &[1.0]).is_err());
    }

    #[test]
    fn asym_zero_rate_is_constant_guess() {
        for &alpha in &[0.01, 0.2, 0.3, 0.5] {
            let m = BinaryModel::new(vec![0.2, 0.3], alpha).unwrap();
            let d = binary_mdrf_asym(&m, &[0.0, 0.0]).unwrap();
            assert!((d - alpha).abs() < 1e-12, "alpha={alpha}: {d}");
        }
    }

    #[test]
    fn asym_first_interval_error_is_q1() {
        // p = (0.05, 0.2) at full rate: c1 = log2(19) ~ 4.25, c2 = 2,
        // alpha = 0.3 puts t ~ 1.22 inside (0, c1 - c2).
        let m = BinaryModel::new(vec![0.05, 0.2], 0.3)
            .unwrap()
            .with_entropy_mode(super::super::EntropyMode::Symmetric);
        let d = binary_mdrf_asym(&m, &[1.0, 1.0]).unwrap();
        assert!((d - 0.05).abs() < 1e-15, "{d}");
        // q2 does not matter inside that interval.
        let d2 = binary_mdrf_asym(&m, &[1.0, 0.6]).unwrap();
        assert!((d2 - 0.05).abs() < 1e-15, "{d2}");
    }

    #[test]
    fn asym_second_interval_is_full_two_branch_error() {
        // Same weights with t ~ 3.17 inside (c1 - c2, c1 + c2): the error is
        // (1 - a) q1 q2 + a (q1 + (1 - q1) q2), not just q1 q2.
        let alpha = 0.1;
        let m = BinaryModel::new(vec![0.05, 0.2], alpha)
            .unwrap()
            .with_entropy_mode(super::super::EntropyMode::Symmetric);
        let d = binary_mdrf_asym(&m, &[1.0, 1.0]).unwrap();
        let (q1, q2) = (0.05, 0.2);
        let expected = (1.0 - alpha) * q1 * q2 + alpha * (q1 + (1.0 - q1) * q2);
        assert!((d - expected).abs() < 1e-15, "{d} vs {expected}");
    }
}
