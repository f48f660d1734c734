//! Second-order difference stencils that stay inside a parameter interval.
//!
//! Central stencils are used whenever the sample points fit inside the
//! interval (or the interval is periodic); otherwise the one-sided
//! second-order stencils take over.

use std::ops::{Add, Mul, Sub};

/// Parameter interval a stencil must respect.
#[derive(Debug, Clone, Copy)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, periodic: bool) -> Self {
        Self { lo, hi, periodic }
    }

    fn wrap(&self, x: f64) -> f64 {
        if !self.periodic {
            return x;
        }
        let p = self.hi - self.lo;
        self.lo + (x - self.lo).rem_euclid(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Central,
    Forward,
    Backward,
}

fn pick_side(iv: &Interval, x: f64, reach: f64) -> Side {
    if iv.periodic || (x - reach >= iv.lo && x + reach <= iv.hi) {
        Side::Central
    } else if x - reach < iv.lo {
        Side::Forward
    } else {
        Side::Backward
    }
}

/// First derivative with a second-order stencil of step `h`.
pub fn first<T, F>(f: &F, x: f64, h: f64, iv: &Interval) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    match pick_side(iv, x, 2.0 * h) {
        Side::Central => (f(iv.wrap(x + h)) - f(iv.wrap(x - h))) * (0.5 / h),
        Side::Forward => (f(x + h) * 4.0 - f(x) * 3.0 - f(x + 2.0 * h)) * (0.5 / h),
        Side::Backward => (f(x) * 3.0 - f(x - h) * 4.0 + f(x - 2.0 * h)) * (0.5 / h),
    }
}

/// Second derivative with a second-order stencil of step `h`.
pub fn second<T, F>(f: &F, x: f64, h: f64, iv: &Interval) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let inv = 1.0 / (h * h);
    match pick_side(iv, x, 3.0 * h) {
        Side::Central => (f(iv.wrap(x + h)) + f(iv.wrap(x - h)) - f(x) * 2.0) * inv,
        Side::Forward => (f(x) * 2.0 - f(x + h) * 5.0 + f(x + 2.0 * h) * 4.0 - f(x + 3.0 * h)) * inv,
        Side::Backward => (f(x) * 2.0 - f(x - h) * 5.0 + f(x - 2.0 * h) * 4.0 - f(x - 3.0 * h)) * inv,
    }
}

/// One Richardson step on a second-order rule: combines steps `h` and `h/2`.
pub fn richardson<T, R>(rule: R, h: f64) -> T
where
    T: Copy + Sub<Output = T> + Mul<f64, Output = T>,
    R: Fn(f64) -> T,
{
    let coarse = rule(h);
    let fine = rule(0.5 * h);
    (fine * 4.0 - coarse) * (1.0 / 3.0)
}

/// Fourth-order central first derivative; used for consistency checks of
/// caller-supplied derivative callables.
pub fn five_point<T, F>(f: &F, x: f64, h: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    (f(x - 2.0 * h) - f(x + 2.0 * h) + (f(x + h) - f(x - h)) * 8.0) * (1.0 / (12.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_and_one_sided_agree_on_smooth_function() {
        let iv = Interval::new(0.0, 1.0, false);
        let f = |x: f64| (2.0 * x).sin();
        for &x in &[0.0, 0.5, 1.0] {
            let d1 = richardson(|h| first(&f, x, h, &iv), 1e-3);
            let d2 = richardson(|h| second(&f, x, h, &iv), 1e-3);
            assert!((d1 - 2.0 * (2.0 * x).cos()).abs() < 1e-8, "x={x} d1={d1}");
            assert!((d2 + 4.0 * (2.0 * x).sin()).abs() < 1e-5, "x={x} d2={d2}");
        }
    }

    #[test]
    fn periodic_wraps() {
        let iv = Interval::new(0.0, 1.0, true);
        let f = |x: f64| (std::f64::consts::TAU * x).cos();
        let d = first(&f, 0.0, 1e-4, &iv);
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn five_point_is_fourth_order() {
        let f = |x: f64| x.exp();
        let e = (five_point(&f, 0.3, 1e-2) - 0.3f64.exp()).abs();
        assert!(e < 1e-9);
    }
}
