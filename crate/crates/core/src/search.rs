//! One-dimensional maximization on a closed interval.
//!
//! The objectives here are smooth but not concave (the Gaussian per-sensor
//! gain is convex below `R = log2(gamma)/2`), so a coarse scan picks the
//! basin and golden-section search refines inside it. Endpoints are always
//! evaluated.

const SCAN_POINTS: usize = 64;
const GOLDEN_TOL: f64 = 1e-13;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Returns `(argmax, max)` of `f` over `[a, b]`.
pub(crate) fn maximize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> (f64, f64) {
    debug_assert!(a <= b);
    if b - a <= 0.0 {
        return (a, f(a));
    }
    let step = (b - a) / SCAN_POINTS as f64;
    let mut best_k = 0;
    let mut best = f(a);
    for k in 1..=SCAN_POINTS {
        let x = if k == SCAN_POINTS { b } else { a + step * k as f64 };
        let v = f(x);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let mut best_x = if best_k == SCAN_POINTS {
        b
    } else {
        a + step * best_k as f64
    };

    let mut lo = (a + step * best_k.saturating_sub(1) as f64).max(a);
    let mut hi = (a + step * (best_k + 1) as f64).min(b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_TOL * (1.0 + lo.abs()) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best {
            best = v;
            best_x = x;
        }
    }
    (best_x, best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let (x, v) = maximize(|x| -(x - 0.3).powi(2), 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn finds_endpoint_maximum() {
        let (x, _) = maximize(|x| x, 0.0, 2.0);
        assert_eq!(x, 2.0);
        let (x, _) = maximize(|x| -x, 0.0, 2.0);
        assert_eq!(x, 0.0);
    }

    #[test]
    fn escapes_local_maximum_near_start() {
        // Small bump at 0.05, global peak at 0.8.
        let f = |x: f64| (-(x - 0.05).powi(2) * 400.0).exp() * 0.5 + (-(x - 0.8).powi(2) * 50.0).exp();
        let (x, _) = maximize(f, 0.0, 1.0);
        assert!((x - 0.8).abs() < 1e-5);
    }

    #[test]
    fn degenerate_interval() {
        assert_eq!(maximize(|x| x * x, 1.5, 1.5), (1.5, 2.25));
    }
}
