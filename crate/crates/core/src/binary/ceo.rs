//! Lower bound on the two-sensor binary CEO rate region, used as a reference
//! curve for the mismatched allocation.

use crate::error::{domain, Result};
use crate::info::{binary_entropy, inv_binary_entropy, star, Probability};

fn half_probability(name: &str, v: f64) -> Result<Probability> {
    if !(0.0..=0.5).contains(&v) {
        return domain(format!("{name} = {v} is outside [0, 1/2]"));
    }
    Probability::new(v)
}

/// `max(0, h(rho * h^-1(1 - R_other)) - h(D))`, the individual-rate bound of
/// one sensor given the other sensor's rate.
pub fn ceo_individual_bound(rho: Probability, other_rate: f64, distortion: Probability) -> Result<f64> {
    if !(0.0..=1.0).contains(&other_rate) {
        return domain(format!("rate {other_rate} is outside [0, 1]"));
    }
    let inner = star(rho, inv_binary_entropy(1.0 - other_rate)?);
    Ok((binary_entropy(inner) - binary_entropy(distortion)).max(0.0))
}

/// Rate-free right-hand sides of the two-sensor bound with `rho = p1 * p2`:
/// `(h(rho) - h(D1), h(rho) - h(D2), 1 + h(rho) - h(D1) - h(D2))`, each
/// clamped at zero.
///
/// The individual entries are the loosest values of the rate-dependent
/// bounds [`ceo_individual_bound`], attained when the other sensor sends one
/// full bit.
pub fn binary_ceo_bound(p1: f64, p2: f64, d1: f64, d2: f64) -> Result<(f64, f64, f64)> {
    let p1 = half_probability("p1", p1)?;
    let p2 = half_probability("p2", p2)?;
    let d1 = half_probability("D1", d1)?;
    let d2 = half_probability("D2", d2)?;
    let h_rho = binary_entropy(star(p1, p2));
    let (h1, h2) = (binary_entropy(d1), binary_entropy(d2));
    Ok((
        (h_rho - h1).max(0.0),
        (h_rho - h2).max(0.0),
        (1.0 + h_rho - h1 - h2).max(0.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximal_distortion_needs_no_rate() {
        let (_, _, sum) = binary_ceo_bound(0.2, 0.2, 0.5, 0.5).unwrap();
        assert_eq!(sum, 0.0);
    }

    #[test]
    fn symmetric_sum_bound() {
        // rho = 0.2 * 0.2 = 0.32
        let h032 = 0.904_381_457_724_493_7;
        for &d in &[0.05, 0.1, 0.2, 0.3] {
            let hd = binary_entropy(Probability::new(d).unwrap());
            let (_, _, sum) = binary_ceo_bound(0.2, 0.2, d, d).unwrap();
            assert!((sum - (1.0 + h032 - 2.0 * hd).max(0.0)).abs() < 1e-12);
        }
        let (_, _, sum) = binary_ceo_bound(0.2, 0.2, 0.0, 0.0).unwrap();
        assert!((sum - (1.0 + h032)).abs() < 1e-12);
    }

    #[test]
    fn individual_bound_is_loosest_at_full_other_rate() {
        let rho = star(Probability::new(0.2).unwrap(), Probability::new(0.2).unwrap());
        let d = Probability::new(0.1).unwrap();
        let (r1, _, _) = binary_ceo_bound(0.2, 0.2, 0.1, 0.1).unwrap();
        assert!((ceo_individual_bound(rho, 1.0, d).unwrap() - r1).abs() < 1e-12);
        for i in 0..=20 {
            let r = i as f64 / 20.0;
            assert!(ceo_individual_bound(rho, r, d).unwrap() >= r1 - 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(binary_ceo_bound(0.6, 0.2, 0.1, 0.1).is_err());
        assert!(binary_ceo_bound(0.2, 0.2, -0.1, 0.1).is_err());
    }
}
