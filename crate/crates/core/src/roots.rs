//! Safeguarded root finder for `t (1 + t)^μ = e^L`.
//!
//! Both the closed-form trigonometric inversion (with `t` the scaled squared
//! tangent) and the Cartesian-to-SOS inverse (with `t = tan² ν`) reduce to this
//! monotone equation. Working in `y = ln t` keeps it well conditioned over the
//! whole range of `W`, from the equatorial plane to the rotation axis.

/// `ln(1 + e^y)` without overflow.
pub(crate) fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

/// Logistic function `e^y / (1 + e^y)`.
fn logistic(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

/// Solve `y + μ ln(1 + e^y) = ln_target` for `y = ln t`.
///
/// The left side is increasing and convex in `y`, so Newton iterations kept
/// inside the bracket `[L - μ softplus(L), L]` converge monotonically. A
/// bisection step is taken whenever Newton would leave the bracket.
/// Returns `-inf` for a zero target.
pub fn solve_log_power_product(ln_target: f64, mu: f64) -> f64 {
    if ln_target == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if mu == 0.0 {
        return ln_target;
    }
    let g = |y: f64| y + mu * softplus(y) - ln_target;
    let mut lo = ln_target - mu * softplus(ln_target);
    let mut hi = ln_target;
    // start from the upper end: convexity makes Newton decrease monotonically
    let mut y = hi;
    for _ in 0..200 {
        let gy = g(y);
        if gy == 0.0 {
            return y;
        }
        if gy > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let dg = 1.0 + mu * logistic(y);
        let mut next = y - gy / dg;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= 4.0 * f64::EPSILON * next.abs().max(1.0) {
            return next;
        }
        y = next;
    }
    y
}

/// Solve `t (1 + t)^μ = e^ln_target` for `t ≥ 0`.
pub fn solve_power_product(ln_target: f64, mu: f64) -> f64 {
    solve_log_power_product(ln_target, mu).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spherical_case_is_identity() {
        assert_eq!(solve_power_product(2f64.ln(), 0.0), 2.0);
    }

    #[test]
    fn known_roots() {
        // t = 1, μ = 2: 1 * 4
        let t = solve_power_product(4f64.ln(), 2.0);
        assert!((t - 1.0).abs() < 1e-15);
        // t = 3, μ = 0.5: 3 * 2
        let t = solve_power_product(6f64.ln(), 0.5);
        assert!((t - 3.0).abs() < 1e-14);
        assert_eq!(solve_power_product(f64::NEG_INFINITY, 2.0), 0.0);
    }

    #[test]
    fn extreme_targets() {
        for &l in &[-1400.0, -700.0, 700.0, 1400.0] {
            for &mu in &[0.1, 2.0, 9.0] {
                let y = solve_log_power_product(l, mu);
                let back = y + mu * softplus(y);
                assert!((back - l).abs() <= 1e-12 * l.abs(), "L={l} mu={mu}");
            }
        }
    }

    proptest! {
        #[test]
        fn residual_is_tiny(l in -60.0f64..60.0, mu in 0.0f64..10.0) {
            let t = solve_power_product(l, mu);
            let back = t.ln() + mu * t.ln_1p();
            prop_assert!((back - l).abs() <= 1e-13 * (1.0 + l.abs()));
        }

        #[test]
        fn monotone_in_target(l in -30.0f64..30.0, d in 1e-3f64..5.0, mu in 0.0f64..6.0) {
            prop_assert!(solve_power_product(l, mu) < solve_power_product(l + d, mu));
        }
    }
}
