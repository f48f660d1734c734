use std::fmt;
use std::sync::Arc;

use super::Support;
use crate::geometry::{Mat3, Vec3};

/// Smooth scalar function with gradient and Hessian.
pub trait ScalarMap: Send + Sync {
    fn value(&self, p: &Vec3) -> f64;

    fn gradient(&self, p: &Vec3) -> Vec3;

    fn value_and_gradient(&self, p: &Vec3) -> (f64, Vec3) {
        (self.value(p), self.gradient(p))
    }

    fn hessian(&self, p: &Vec3) -> Mat3 {
        let h = 1e-5 * p.norm().max(1.0);
        let mut out = Mat3::zeros();
        for k in 0..3 {
            let e = Vec3::ith(k, h);
            let col = (self.gradient(&(p + e)) - self.gradient(&(p - e))) / (2.0 * h);
            out.set_column(k, &col);
        }
        0.5 * (out + out.transpose())
    }
}

#[derive(Clone)]
pub struct ScalarField {
    label: String,
    support: Support,
    feature_scale: Option<f64>,
    features: Vec<FeatureBall>,
    map: Arc<dyn ScalarMap>,
}

/// Ball in which a field varies sharply (bump, plateau transition).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureBall {
    pub center: Vec3,
    pub radius: f64,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl ScalarField {
    pub fn new<M: ScalarMap + 'static>(label: impl Into<String>, support: Support, map: M) -> Self {
        Self {
            label: label.into(),
            support,
            feature_scale: None,
            features: Vec::new(),
            map: Arc::new(map),
        }
    }

    /// Length over which the function varies sharply (bump radius, plateau
    /// transition width); quadratures are refined to resolve it.
    pub fn feature_scale(&self) -> Option<f64> {
        self.feature_scale
    }

    pub fn with_feature_scale(mut self, scale: f64) -> Self {
        self.feature_scale = Some(scale);
        self
    }

    pub fn features(&self) -> &[FeatureBall] {
        &self.features
    }

    pub fn with_feature(mut self, center: Vec3, radius: f64) -> Self {
        self.features.push(FeatureBall { center, radius });
        self
    }

    /// beta(|p - c| / r), beta(s) = exp(1 - 1/(1 - s²)).
    pub fn bump(center: Vec3, radius: f64) -> Self {
        Self::new("bump", Support::Ball { center, radius }, BumpProfile { center, radius })
            .with_feature_scale(radius)
            .with_feature(center, radius)
    }

    /// 1 on B(c, inner), 0 outside B(c, outer), smooth in between.
    pub fn plateau(center: Vec3, inner: f64, outer: f64) -> Self {
        Self::new(
            "plateau",
            Support::Ball { center, radius: outer },
            Plateau { center, inner, outer },
        )
        .with_feature_scale(outer - inner)
        .with_feature(center, outer)
    }

    pub fn constant(c: f64) -> Self {
        Self::new("const", Support::Unbounded, Affine { g: Vec3::zeros(), c })
    }

    pub fn affine(g: Vec3, c: f64) -> Self {
        Self::new("affine", Support::Unbounded, Affine { g, c })
    }

    /// |p - c|² - r², zero on the sphere (circle) of radius r.
    pub fn sphere_level(center: Vec3, radius: f64) -> Self {
        Self::new("sphere_level", Support::Unbounded, SphereLevel { center, radius })
    }

    /// x² + y² - r², zero on the cylinder of radius r around the z-axis.
    pub fn cylinder_level(radius: f64) -> Self {
        Self::new("cylinder_level", Support::Unbounded, CylinderLevel { radius })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn value(&self, p: &Vec3) -> f64 {
        self.map.value(p)
    }

    pub fn gradient(&self, p: &Vec3) -> Vec3 {
        self.map.gradient(p)
    }

    pub fn value_and_gradient(&self, p: &Vec3) -> (f64, Vec3) {
        self.map.value_and_gradient(p)
    }

    pub fn hessian(&self, p: &Vec3) -> Mat3 {
        self.map.hessian(p)
    }
}

pub struct BumpProfile {
    pub center: Vec3,
    pub radius: f64,
}

impl BumpProfile {
    /// (beta, dbeta/drho, d²beta/drho²) in rho = |p - c|² / r².
    fn profile(&self, p: &Vec3) -> Option<(f64, f64, f64, Vec3)> {
        let d = p - self.center;
        let rho = d.norm_squared() / (self.radius * self.radius);
        if rho >= 1.0 {
            return None;
        }
        let q = 1.0 - rho;
        let beta = (1.0 - 1.0 / q).exp();
        let b1 = -beta / (q * q);
        let b2 = beta * (2.0 * rho - 1.0) / (q * q * q * q);
        Some((beta, b1, b2, d))
    }
}

impl ScalarMap for BumpProfile {
    fn value(&self, p: &Vec3) -> f64 {
        self.profile(p).map_or(0.0, |(b, ..)| b)
    }

    fn gradient(&self, p: &Vec3) -> Vec3 {
        self.value_and_gradient(p).1
    }

    fn value_and_gradient(&self, p: &Vec3) -> (f64, Vec3) {
        match self.profile(p) {
            None => (0.0, Vec3::zeros()),
            Some((b, b1, _, d)) => (b, d * (2.0 * b1 / (self.radius * self.radius))),
        }
    }

    fn hessian(&self, p: &Vec3) -> Mat3 {
        match self.profile(p) {
            None => Mat3::zeros(),
            Some((_, b1, b2, d)) => {
                let r2 = self.radius * self.radius;
                let grad_rho = d * (2.0 / r2);
                grad_rho * grad_rho.transpose() * b2 + Mat3::identity() * (2.0 * b1 / r2)
            }
        }
    }
}

fn psi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn dpsi(x: f64) -> f64 {
    if x > 0.0 {
        psi(x) / (x * x)
    } else {
        0.0
    }
}

/// C-infinity step: 1 for x <= 0, 0 for x >= 1; all derivatives vanish at both ends.
pub(crate) fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        let (a, b) = (psi(1.0 - x), psi(x));
        a / (a + b)
    }
}

pub(crate) fn smooth_step_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        let (a, b) = (psi(1.0 - x), psi(x));
        let (da, db) = (-dpsi(1.0 - x), dpsi(x));
        (da * b - a * db) / ((a + b) * (a + b))
    }
}

pub struct Plateau {
    pub center: Vec3,
    pub inner: f64,
    pub outer: f64,
}

impl ScalarMap for Plateau {
    fn value(&self, p: &Vec3) -> f64 {
        let r = (p - self.center).norm();
        smooth_step((r - self.inner) / (self.outer - self.inner))
    }

    fn gradient(&self, p: &Vec3) -> Vec3 {
        let d = p - self.center;
        let r = d.norm();
        let width = self.outer - self.inner;
        let s = smooth_step_deriv((r - self.inner) / width);
        if s == 0.0 {
            return Vec3::zeros();
        }
        d * (s / (r * width))
    }
}

/// g . p + c.
pub struct Affine {
    pub g: Vec3,
    pub c: f64,
}

impl ScalarMap for Affine {
    fn value(&self, p: &Vec3) -> f64 {
        self.g.dot(p) + self.c
    }

    fn gradient(&self, _p: &Vec3) -> Vec3 {
        self.g
    }

    fn hessian(&self, _p: &Vec3) -> Mat3 {
        Mat3::zeros()
    }
}

pub struct SphereLevel {
    pub center: Vec3,
    pub radius: f64,
}

impl ScalarMap for SphereLevel {
    fn value(&self, p: &Vec3) -> f64 {
        (p - self.center).norm_squared() - self.radius * self.radius
    }

    fn gradient(&self, p: &Vec3) -> Vec3 {
        (p - self.center) * 2.0
    }

    fn hessian(&self, _p: &Vec3) -> Mat3 {
        Mat3::identity() * 2.0
    }
}

pub struct CylinderLevel {
    pub radius: f64,
}

impl ScalarMap for CylinderLevel {
    fn value(&self, p: &Vec3) -> f64 {
        p.x * p.x + p.y * p.y - self.radius * self.radius
    }

    fn gradient(&self, p: &Vec3) -> Vec3 {
        Vec3::new(2.0 * p.x, 2.0 * p.y, 0.0)
    }

    fn hessian(&self, _p: &Vec3) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(2.0, 2.0, 0.0))
    }
}

type ScalarFn = Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>;

pub struct FnScalar {
    value: ScalarFn,
    gradient: GradFn,
}

impl FnScalar {
    pub fn new<V, G>(value: V, gradient: G) -> Self
    where
        V: Fn(&Vec3) -> f64 + Send + Sync + 'static,
        G: Fn(&Vec3) -> Vec3 + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }
}

impl ScalarMap for FnScalar {
    fn value(&self, p: &Vec3) -> f64 {
        (self.value)(p)
    }

    fn gradient(&self, p: &Vec3) -> Vec3 {
        (self.gradient)(p)
    }
}
