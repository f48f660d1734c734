//! Composite Gauss–Legendre rules.
//!
//! Every integral in the crate goes through the 5-point rule on equal panels.
//! Non-finite integrand values are not filtered; they propagate into the sum
//! so callers can flag them.

/// Nodes of the 5-point Gauss–Legendre rule on [-1, 1].
const NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];

/// Matching weights, summing to 2.
const WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Default panel count for curve integrals.
pub const DEFAULT_CURVE_PANELS: usize = 64;

/// Default panel count per direction for surface integrals.
pub const DEFAULT_SURFACE_PANELS: usize = 16;

/// Quadrature nodes and weights for `panels` equal panels of [a, b].
pub fn composite_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let half = 0.5 * width;
    let mut out = Vec::with_capacity(5 * panels);
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * width;
        for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
            out.push((mid + half * x, half * w));
        }
    }
    out
}

/// Composite 5-point Gauss–Legendre approximation of the integral of `f` over [a, b].
pub fn integrate<F>(f: F, a: f64, b: f64, panels: usize) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut f = f;
    composite_rule(a, b, panels).into_iter().map(|(x, w)| w * f(x)).sum()
}

/// Tensor-product rule over [a, b] x [c, d].
pub fn integrate_2d<F>(f: F, (a, b): (f64, f64), (c, d): (f64, f64), panels: (usize, usize)) -> f64
where
    F: FnMut(f64, f64) -> f64,
{
    let mut f = f;
    let ru = composite_rule(a, b, panels.0);
    let rv = composite_rule(c, d, panels.1);
    let mut total = 0.0;
    for &(u, wu) in &ru {
        let mut row = 0.0;
        for &(v, wv) in &rv {
            row += wv * f(u, v);
        }
        total += wu * row;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = WEIGHTS.iter().sum();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_degree_nine() {
        // x^9 + x^8 on [0, 1] has integral 1/10 + 1/9.
        let v = integrate(|x| x.powi(9) + x.powi(8), 0.0, 1.0, 1);
        assert!((v - (0.1 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn constant_density() {
        assert!((integrate(|_| 1.0, 0.0, 3.0, 64) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn panel_doubling_is_stable_for_smooth_integrand() {
        let f = |x: f64| (x.sin() * 3.0).exp();
        let a = integrate(f, 0.0, 2.0 * PI, 64);
        let b = integrate(f, 0.0, 2.0 * PI, 128);
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn unit_square() {
        let v = integrate_2d(|_, _| 1.0, (0.0, 1.0), (0.0, 1.0), (4, 4));
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nan_propagates() {
        assert!(integrate(|x| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, 4).is_nan());
    }
}
