use crate::binary::BinaryModel;
use crate::error::Result;
use crate::gaussian::GaussianModel;

/// Either observation model, for code that handles both.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Gaussian(GaussianModel),
    Binary(BinaryModel),
}

impl Model {
    pub fn len(&self) -> usize {
        match self {
            Model::Gaussian(m) => m.len(),
            Model::Binary(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distortion of the central estimate at `rates`.
    pub fn distortion(&self, rates: &[f64]) -> Result<f64> {
        match self {
            Model::Gaussian(m) => m.distortion(rates),
            Model::Binary(m) => m.distortion(rates),
        }
    }

    /// Per-sensor rate beyond which a sensor gains nothing, if any.
    pub fn rate_cap(&self) -> Option<f64> {
        match self {
            Model::Gaussian(_) => None,
            Model::Binary(_) => Some(1.0),
        }
    }

    /// Distortion with every rate at zero.
    pub fn zero_rate_distortion(&self) -> f64 {
        match self {
            Model::Gaussian(_) => 1.0,
            Model::Binary(m) => m.alpha().min(1.0 - m.alpha()),
        }
    }
}

impl From<GaussianModel> for Model {
    fn from(m: GaussianModel) -> Self {
        Model::Gaussian(m)
    }
}

impl From<BinaryModel> for Model {
    fn from(m: BinaryModel) -> Self {
        Model::Binary(m)
    }
}
