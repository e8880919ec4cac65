//! Gaussian source observed in additive white Gaussian noise, reconstructed
//! under quadratic distortion.
//!
//! Sensor `l` sees `Y_l = sqrt(gamma_l) X + Z_l` with `X, Z_l ~ N(0, 1)` and
//! compresses `Y_l` at `R_l` bits with an encoder that is optimal for its own
//! quadratic distortion. The central estimate of `X` then has the mismatched
//! distortion computed by [`gaussian_mdrf`].

mod boundary;
mod fallback;
mod water;

pub use boundary::single_active_boundary;
pub use fallback::{simplex_descent, FallbackOptions};
pub use water::{
    activation_threshold, allocate_gaussian, allocate_gaussian_with, g_water, kkt_derivative, rate_from_level,
    solve_water_level, total_rate, GaussianOptions, WaterLevelSolution, NU_BRACKET_MIN,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::info::log2_plus;

/// Per-sensor SNRs, stored sorted non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct GaussianModel {
    gammas: Vec<f64>,
}

impl GaussianModel {
    pub fn new(mut gammas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return domain("a Gaussian model needs at least one sensor");
        }
        if let Some(bad) = gammas.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return domain(format!("SNR {bad} must be finite and nonnegative"));
        }
        gammas.sort_by(|a, b| b.total_cmp(a));
        Ok(GaussianModel { gammas })
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Largest SNR.
    pub fn top(&self) -> f64 {
        self.gammas[0]
    }

    /// Number of sensors whose SNR equals the largest one.
    pub fn top_multiplicity(&self) -> usize {
        self.gammas.iter().take_while(|&&g| g == self.top()).count()
    }

    pub fn distortion(&self, rates: &[f64]) -> Result<f64> {
        gaussian_mdrf(self, rates)
    }
}

impl TryFrom<Vec<f64>> for GaussianModel {
    type Error = Error;

    fn try_from(gammas: Vec<f64>) -> Result<Self> {
        GaussianModel::new(gammas)
    }
}

impl From<GaussianModel> for Vec<f64> {
    fn from(m: GaussianModel) -> Vec<f64> {
        m.gammas
    }
}

/// Contribution of one sensor to the inverse distortion,
/// `gamma (1 - 2^-2R) / (1 + gamma 2^-2R)`.
#[inline]
pub(crate) fn snr_gain(gamma: f64, rate: f64) -> f64 {
    let x = (-2.0 * rate).exp2();
    gamma * (1.0 - x) / (1.0 + gamma * x)
}

pub(crate) fn check_rates(expected: usize, rates: &[f64]) -> Result<()> {
    if rates.len() != expected {
        return Err(Error::Dimension {
            expected,
            got: rates.len(),
        });
    }
    if let Some(bad) = rates.iter().find(|r| !(**r >= 0.0)) {
        return domain(format!("rate {bad} is negative"));
    }
    Ok(())
}

/// Mismatched distortion-rate function of the Gaussian model:
/// `(1 + sum_l gamma_l (1 - 2^-2R_l) / (1 + gamma_l 2^-2R_l))^-1`.
///
/// `rates[l]` belongs to `model.gammas()[l]` (sorted order).
pub fn gaussian_mdrf(model: &GaussianModel, rates: &[f64]) -> Result<f64> {
    check_rates(model.len(), rates)?;
    let gain: f64 = model.gammas.iter().zip(rates).map(|(&g, &r)| snr_gain(g, r)).sum();
    Ok(1.0 / (1.0 + gain))
}

/// Sum rate of the symmetric quadratic Gaussian CEO problem at distortion `d`
/// for `sensors` observers of common SNR `gamma`:
/// `1/2 log+(1/D) - (L/2) log+(1 + 1/gamma^2 - 1/(gamma^2 D))`.
///
/// Returns `+inf` when the second argument is not positive, i.e. when `d`
/// lies below the distortion floor the formula can describe.
pub fn gaussian_ceo_sum_rate(d: f64, gamma: f64, sensors: usize) -> Result<f64> {
    if !(d > 0.0 && d <= 1.0) {
        return domain(format!("distortion {d} is outside (0, 1]"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return domain(format!("SNR {gamma} must be positive"));
    }
    if sensors == 0 {
        return domain("at least one sensor is required");
    }
    let g2 = gamma * gamma;
    let arg = 1.0 + 1.0 / g2 - 1.0 / (g2 * d);
    if arg <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(0.5 * log2_plus(1.0 / d)? - 0.5 * sensors as f64 * log2_plus(arg)?)
}
