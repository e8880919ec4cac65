//! Scalar information-theoretic primitives shared by the Gaussian and binary
//! models. All logarithms are base 2, so entropies and rates are in bits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            domain(format!("probability {value} is outside [0, 1]"))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `1 - p`.
    #[inline]
    pub fn complement(self) -> Probability {
        Probability(1.0 - self.0)
    }
}

impl TryFrom<f64> for Probability {
    type Error = crate::Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A nonnegative quantity of information, in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Bits(f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 {
            Ok(Bits(value))
        } else {
            domain(format!("bit count {value} is negative"))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Bits {
    type Error = crate::Error;

    fn try_from(value: f64) -> Result<Self> {
        Bits::new(value)
    }
}

impl From<Bits> for f64 {
    fn from(b: Bits) -> f64 {
        b.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Binary entropy `h(x) = -x log2 x - (1-x) log2 (1-x)` with `0 log 0 = 0`.
pub fn binary_entropy(x: Probability) -> f64 {
    let x = x.get();
    let xbar = 1.0 - x;
    let term = |v: f64| if v > 0.0 { -v * v.log2() } else { 0.0 };
    term(x) + term(xbar)
}

/// Bisection tolerance on the argument of `h`.
const INV_ENTROPY_TOL: f64 = 1e-15;

/// Inverse of the binary entropy restricted to `[0, 1/2]`.
///
/// Bisection on the bracket `[0, 1/2]`, where `h` is increasing. The
/// derivative of `h` blows up at zero, so Newton steps are not used.
pub fn inv_binary_entropy(y: f64) -> Result<Probability> {
    if !(0.0..=1.0).contains(&y) {
        return domain(format!("entropy value {y} is outside [0, 1]"));
    }
    if y == 0.0 {
        return Ok(Probability::ZERO);
    }
    if y == 1.0 {
        return Ok(Probability::HALF);
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > INV_ENTROPY_TOL {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(Probability(mid)) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Probability(0.5 * (lo + hi)))
}

/// Crossover probability of two cascaded binary symmetric channels,
/// `x (1-y) + (1-x) y`.
#[inline]
pub fn star(x: Probability, y: Probability) -> Probability {
    let (x, y) = (x.get(), y.get());
    let v = x * (1.0 - y) + (1.0 - x) * y;
    Probability(v.clamp(0.0, 1.0))
}

/// `max(0, log2 x)`.
pub fn log2_plus(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x.log2().max(0.0))
    } else {
        domain(format!("log+ argument {x} is not positive"))
    }
}
