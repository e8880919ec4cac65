//! Binary source observed through binary symmetric channels, reconstructed
//! under Hamming distortion.
//!
//! Sensor `l` sees `Y_l = X xor Z_l` with `Z_l ~ Bern(p_l)` and compresses it
//! at `R_l` bits with a Hamming-optimal encoder, whose test channel is a BSC
//! of crossover `D_l`. The decoder therefore sees `X` through a BSC of
//! crossover `q_l = p_l * D_l` and fuses the votes with a weighted
//! log-likelihood ratio test.

mod alloc;
mod ceo;
mod enumerate;

pub use alloc::{allocate_binary, allocate_binary_asym, mismatch_sum_rate};
pub use ceo::{binary_ceo_bound, ceo_individual_bound};
pub use enumerate::{binary_mdrf, binary_mdrf_asym, score_distribution, ScoreAtom, ENUMERATION_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gaussian::check_rates;
use crate::info::{binary_entropy, inv_binary_entropy, star, Probability};

/// Entropy each encoder compresses against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMode {
    /// Treat every observation as uniform: `D_l = h^-1(1 - R_l)`.
    Symmetric,
    /// Use the entropy of the actual observation marginal,
    /// `D_l = h^-1(max(0, h(alpha * p_l) - R_l))`.
    #[default]
    BiasCorrected,
}

/// How outcomes whose log-likelihood ratio sits exactly on the decision
/// threshold are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// The decoder flips a fair coin; each branch gets half the tie mass.
    #[default]
    HalfMass,
    /// Ties never count as errors (the literal `Pr(log F > 0)` reading).
    Strict,
}

impl TieRule {
    pub(crate) fn weight(self) -> f64 {
        match self {
            TieRule::HalfMass => 0.5,
            TieRule::Strict => 0.0,
        }
    }
}

/// Crossover probabilities (sorted non-decreasing in `[0, 1/2]`) and the
/// source bias `alpha = P(X = 1)` in `(0, 1/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryModel {
    ps: Vec<f64>,
    alpha: f64,
    entropy_mode: EntropyMode,
    tie_rule: TieRule,
}

impl BinaryModel {
    pub fn new(mut ps: Vec<f64>, alpha: f64) -> Result<Self> {
        if ps.is_empty() {
            return domain("a binary model needs at least one sensor");
        }
        if let Some(bad) = ps.iter().find(|p| !(**p >= 0.0 && **p <= 0.5)) {
            return domain(format!("crossover probability {bad} is outside [0, 1/2]"));
        }
        if !(alpha > 0.0 && alpha <= 0.5) {
            return domain(format!("source bias {alpha} is outside (0, 1/2]"));
        }
        ps.sort_by(f64::total_cmp);
        Ok(BinaryModel {
            ps,
            alpha,
            entropy_mode: EntropyMode::default(),
            tie_rule: TieRule::default(),
        })
    }

    /// Uniform source.
    pub fn symmetric(ps: Vec<f64>) -> Result<Self> {
        Self::new(ps, 0.5)
    }

    pub fn with_entropy_mode(mut self, mode: EntropyMode) -> Self {
        self.entropy_mode = mode;
        self
    }

    pub fn with_tie_rule(mut self, rule: TieRule) -> Self {
        self.tie_rule = rule;
        self
    }

    pub fn ps(&self) -> &[f64] {
        &self.ps
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn entropy_mode(&self) -> EntropyMode {
        self.entropy_mode
    }

    pub fn tie_rule(&self) -> TieRule {
        self.tie_rule
    }

    pub fn len(&self) -> usize {
        self.ps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ps.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.alpha == 0.5
    }

    /// Entropy of sensor `l`'s observation as seen by its encoder.
    pub fn source_entropy(&self, l: usize) -> f64 {
        match self.entropy_mode {
            EntropyMode::Symmetric => 1.0,
            EntropyMode::BiasCorrected => binary_entropy(star(
                Probability::new(self.alpha).unwrap(),
                Probability::new(self.ps[l]).unwrap(),
            )),
        }
    }

    /// MAP decision threshold `log2((1 - alpha) / alpha)`.
    pub fn threshold(&self) -> f64 {
        ((1.0 - self.alpha) / self.alpha).log2()
    }

    /// Hamming distortion of the central estimate at `rates`.
    pub fn distortion(&self, rates: &[f64]) -> Result<f64> {
        if self.is_symmetric() {
            binary_mdrf(self, rates)
        } else {
            binary_mdrf_asym(self, rates)
        }
    }
}

/// Crossover of the Hamming test channel at `rate` bits for a source of
/// entropy `source_entropy`: `h^-1(max(0, H - R))`.
pub fn test_channel_distortion(rate: f64, source_entropy: f64) -> Result<Probability> {
    if !(rate >= 0.0) {
        return domain(format!("rate {rate} is negative"));
    }
    if !(source_entropy > 0.0 && source_entropy <= 1.0) {
        return domain(format!("source entropy {source_entropy} is outside (0, 1]"));
    }
    inv_binary_entropy((source_entropy - rate).max(0.0))
}

/// One sensor's effective channel and vote weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorLlr {
    /// End-to-end crossover `p * D`.
    pub q: f64,
    /// `log2((1 - q) / q)`; `+inf` for a noiseless vote.
    pub weight: f64,
}

/// Parameters of the fusion rule: decide `X = 1` iff
/// `sum_l weight_l (2 yhat_l - 1) > threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlrSpec {
    pub sensors: Vec<SensorLlr>,
    pub threshold: f64,
}

pub fn llr_spec(model: &BinaryModel, rates: &[f64]) -> Result<LlrSpec> {
    check_rates(model.len(), rates)?;
    let sensors = model
        .ps
        .iter()
        .zip(rates)
        .enumerate()
        .map(|(l, (&p, &r))| {
            let d = test_channel_distortion(r, model.source_entropy(l))?;
            let q = star(Probability::new(p)?, d).get();
            let weight = if q == 0.0 {
                f64::INFINITY
            } else {
                ((1.0 - q) / q).log2().max(0.0)
            };
            Ok(SensorLlr { q, weight })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LlrSpec {
        sensors,
        threshold: model.threshold(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_sorts_and_validates() {
        let m = BinaryModel::new(vec![0.3, 0.1, 0.2], 0.4).unwrap();
        assert_eq!(m.ps(), &[0.1, 0.2, 0.3]);
        assert!(BinaryModel::new(vec![], 0.5).is_err());
        assert!(BinaryModel::new(vec![0.6], 0.5).is_err());
        assert!(BinaryModel::new(vec![-0.1], 0.5).is_err());
        assert!(BinaryModel::new(vec![0.1], 0.0).is_err());
        assert!(BinaryModel::new(vec![0.1], 0.7).is_err());
        assert!(BinaryModel::new(vec![f64::NAN], 0.5).is_err());
    }

    #[test]
    fn test_channel_values() {
        assert_eq!(test_channel_distortion(1.0, 1.0).unwrap().get(), 0.0);
        assert_eq!(test_channel_distortion(0.0, 1.0).unwrap().get(), 0.5);
        assert_eq!(test_channel_distortion(3.0, 1.0).unwrap().get(), 0.0);
        let d = test_channel_distortion(0.5, 1.0).unwrap().get();
        assert!((d - 0.110_027_864_438_359_55).abs() < 1e-12);
        assert!(test_channel_distortion(-0.1, 1.0).is_err());
        assert!(test_channel_distortion(0.1, 0.0).is_err());
    }

    #[test]
    fn llr_examples() {
        let m = BinaryModel::symmetric(vec![0.2]).unwrap();
        let s = llr_spec(&m, &[1.0]).unwrap();
        assert!((s.sensors[0].q - 0.2).abs() < 1e-15);
        assert!((s.sensors[0].weight - 2.0).abs() < 1e-12);
        assert_eq!(s.threshold, 0.0);

        let s = llr_spec(&m, &[0.5]).unwrap();
        // 0.2 * 0.88997 + 0.8 * 0.11003 with h^-1(1/2) from an independent root finder.
        assert!((s.sensors[0].q - 0.266_016_718_663_015_74).abs() < 1e-12);

        let s = llr_spec(&m, &[0.0]).unwrap();
        assert_eq!(s.sensors[0].q, 0.5);
        assert_eq!(s.sensors[0].weight, 0.0);
    }

    #[test]
    fn noiseless_vote_has_infinite_weight() {
        let m = BinaryModel::symmetric(vec![0.0]).unwrap();
        let s = llr_spec(&m, &[1.0]).unwrap();
        assert_eq!(s.sensors[0].q, 0.0);
        assert_eq!(s.sensors[0].weight, f64::INFINITY);
    }

    #[test]
    fn biased_source_threshold_and_entropy() {
        let m = BinaryModel::new(vec![0.2], 0.2).unwrap();
        assert!((m.threshold() - 2.0).abs() < 1e-15);
        // h(0.2 * 0.2) = h(0.32)
        assert!((m.source_entropy(0) - 0.904_381_457_724_493_7).abs() < 1e-12);
        let sym = m.clone().with_entropy_mode(EntropyMode::Symmetric);
        assert_eq!(sym.source_entropy(0), 1.0);
    }
}
