use serde::{Deserialize, Serialize};

/// How an allocation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    FallbackNumeric,
    GridSearch,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::FallbackNumeric => "fallback_numeric",
            Method::GridSearch => "grid_search",
        }
    }
}

/// Why the water-filling closed form did or did not meet the budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Feasibility {
    /// A water level meets the budget with equality.
    Exact,
    /// The budget is below `(L0/2) log+ gamma_1`, the smallest positive
    /// total rate the closed form can produce.
    InfeasibleBelowThreshold { required: f64 },
    /// The total rate curve jumps over the budget at `nu`.
    InsideJump { nu: f64, below: f64, above: f64 },
    /// The budget exceeds the total rate at the bottom of the search bracket
    /// (or every SNR is zero, so no rate is ever assigned).
    Unreachable { max_rate: f64 },
}

impl Feasibility {
    pub fn is_exact(&self) -> bool {
        matches!(self, Feasibility::Exact)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Feasibility::Exact => "exact",
            Feasibility::InfeasibleBelowThreshold { .. } => "infeasible_below_threshold",
            Feasibility::InsideJump { .. } => "inside_jump",
            Feasibility::Unreachable { .. } => "unreachable",
        }
    }
}

/// Per-sensor rates in bits together with the budget they were drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateAllocation {
    pub rates: Vec<f64>,
    pub budget: f64,
    pub distortion: f64,
    pub method: Method,
    /// Water level, for Gaussian allocations.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nu_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub feasibility: Option<Feasibility>,
}

impl RateAllocation {
    pub fn sum_rate(&self) -> f64 {
        self.rates.iter().sum()
    }

    pub fn active_count(&self) -> usize {
        self.rates.iter().filter(|&&r| r > 0.0).count()
    }
}
