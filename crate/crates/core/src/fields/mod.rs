//! Ambient vector fields X: R^d -> R^d with Jacobians, compactly supported
//! bump probes, and the splitting X = X^⊥ + X^t + X^ν along a manifold.

mod kinds;
mod scalar;
mod split;

pub use kinds::{Constant, FnField, Linear, Product, Radial, Rotation, Scaled, Sum};
pub use scalar::{
    Affine, BumpProfile, CylinderLevel, FeatureBall, FnScalar, Plateau, ScalarField, ScalarMap, SphereLevel,
};
pub use split::{
    check_tangency, field_parts, project_normal, split_field, FieldParts, FieldSplit, SplitSample, TangencyReport,
    DEFAULT_EDGE_FRACTION,
};

use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Result, ShapeError};
use crate::geometry::{stencil, Mat3, Region, Vec3};

/// Pointwise evaluation of a vector field and its derivatives.
pub trait FieldMap: Send + Sync {
    fn value(&self, p: &Vec3) -> Vec3;

    fn jacobian(&self, p: &Vec3) -> Mat3;

    fn value_and_jacobian(&self, p: &Vec3) -> (Vec3, Mat3) {
        (self.value(p), self.jacobian(p))
    }

    /// Second derivative d²X(p)[w, w]; defaults to a central difference of
    /// the Jacobian along `w`.
    fn second(&self, p: &Vec3, w: &Vec3) -> Vec3 {
        jacobian_difference(|x| self.jacobian(x), p, w)
    }
}

pub(crate) fn jacobian_difference<J: Fn(&Vec3) -> Mat3>(jac: J, p: &Vec3, w: &Vec3) -> Vec3 {
    let wn = w.norm();
    if wn == 0.0 {
        return Vec3::zeros();
    }
    let h = 1e-5 * p.norm().max(1.0) / wn;
    (jac(&(p + w * h)) - jac(&(p - w * h))) * w / (2.0 * h)
}

/// Closed ball outside of which a field and its Jacobian vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Unbounded,
    Ball { center: Vec3, radius: f64 },
}

impl Support {
    pub fn union(&self, other: &Support) -> Support {
        match (self, other) {
            (Support::Ball { center: c1, radius: r1 }, Support::Ball { center: c2, radius: r2 }) => {
                // ball around the first center covering both
                let r = r1.max((c2 - c1).norm() + r2);
                Support::Ball { center: *c1, radius: r }
            }
            _ => Support::Unbounded,
        }
    }

    pub fn intersect(&self, other: &Support) -> Support {
        match (self, other) {
            (Support::Unbounded, s) | (s, Support::Unbounded) => *s,
            (Support::Ball { radius: r1, .. }, Support::Ball { radius: r2, .. }) => {
                if r1 <= r2 {
                    *self
                } else {
                    *other
                }
            }
        }
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        match self {
            Support::Unbounded => true,
            Support::Ball { center, radius } => (p - center).norm() < *radius,
        }
    }
}

/// A C² vector field on R^d (d = 2 fields have zero z-components).
#[derive(Clone)]
pub struct AmbientField {
    dim: usize,
    label: String,
    support: Support,
    feature_scale: Option<f64>,
    edge_scale: Option<f64>,
    features: Vec<FeatureBall>,
    map: Arc<dyn FieldMap>,
}

impl fmt::Debug for AmbientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmbientField")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl AmbientField {
    pub fn new<M: FieldMap + 'static>(dim: usize, label: impl Into<String>, support: Support, map: M) -> Self {
        Self::from_arc(dim, label, support, Arc::new(map))
    }

    pub fn from_arc(dim: usize, label: impl Into<String>, support: Support, map: Arc<dyn FieldMap>) -> Self {
        Self {
            dim,
            label: label.into(),
            support,
            feature_scale: None,
            edge_scale: None,
            features: Vec::new(),
            map,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, Vec3::zeros())
    }

    pub fn constant(dim: usize, v: Vec3) -> Self {
        Self::new(dim, "constant", Support::Unbounded, Constant(v))
    }

    pub fn linear(dim: usize, a: Mat3) -> Self {
        Self::new(dim, "linear", Support::Unbounded, Linear { a, b: Vec3::zeros() })
    }

    /// X(x) = axis × x.
    pub fn rotation(dim: usize, axis: Vec3) -> Self {
        Self::new(dim, "rotation", Support::Unbounded, Rotation { axis })
    }

    /// Unit field pointing away from the z-axis, (x, y, 0) / |(x, y)|.
    pub fn radial(dim: usize) -> Self {
        Self::new(dim, "radial", Support::Unbounded, Radial)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// Smallest length scale of sharp variation (bump radii), if any.
    pub fn feature_scale(&self) -> Option<f64> {
        self.feature_scale
    }

    pub fn with_feature_scale(mut self, scale: Option<f64>) -> Self {
        self.feature_scale = scale;
        self
    }

    /// Width of sharp variation confined to a collar of the boundary of some
    /// manifold (across the boundary only).
    pub fn edge_scale(&self) -> Option<f64> {
        self.edge_scale
    }

    pub fn with_edge_scale(mut self, scale: Option<f64>) -> Self {
        self.edge_scale = scale;
        self
    }

    /// Balls where the field varies sharply, collected through sums and
    /// products; used to place probes.
    pub fn features(&self) -> &[FeatureBall] {
        &self.features
    }

    pub fn with_features(mut self, features: Vec<FeatureBall>) -> Self {
        self.features = features;
        self
    }

    pub fn map(&self) -> &Arc<dyn FieldMap> {
        &self.map
    }

    pub fn value(&self, p: &Vec3) -> Vec3 {
        self.map.value(p)
    }

    pub fn jacobian(&self, p: &Vec3) -> Mat3 {
        self.map.jacobian(p)
    }

    pub fn value_and_jacobian(&self, p: &Vec3) -> (Vec3, Mat3) {
        self.map.value_and_jacobian(p)
    }

    pub fn second(&self, p: &Vec3, w: &Vec3) -> Vec3 {
        self.map.second(p, w)
    }

    /// self + other.
    pub fn add(&self, other: &AmbientField) -> AmbientField {
        Self::sum(&[self.clone(), other.clone()])
    }

    /// self - other.
    pub fn sub(&self, other: &AmbientField) -> AmbientField {
        Self::sum(&[self.clone(), other.scale(-1.0)])
    }

    pub fn sum(terms: &[AmbientField]) -> AmbientField {
        let dim = terms.iter().map(|t| t.dim).max().unwrap_or(2);
        let support = terms
            .iter()
            .map(|t| t.support)
            .reduce(|a, b| a.union(&b))
            .unwrap_or(Support::Ball {
                center: Vec3::zeros(),
                radius: 0.0,
            });
        let label = terms.iter().map(|t| t.label.as_str()).collect::<Vec<_>>().join("+");
        let scale = min_scale(terms.iter().map(|t| t.feature_scale));
        let features = terms.iter().flat_map(|t| t.features.iter().copied()).collect();
        Self::new(dim, label, support, Sum(terms.to_vec()))
            .with_feature_scale(scale)
            .with_edge_scale(min_scale(terms.iter().map(|t| t.edge_scale)))
            .with_features(features)
    }

    pub fn scale(&self, factor: f64) -> AmbientField {
        Self::new(
            self.dim,
            format!("{factor}*{}", self.label),
            self.support,
            Scaled {
                factor,
                field: self.clone(),
            },
        )
        .with_feature_scale(self.feature_scale)
        .with_edge_scale(self.edge_scale)
        .with_features(self.features.clone())
    }

    /// f(p) X(p).
    pub fn modulate(&self, scalar: &ScalarField) -> AmbientField {
        Self::new(
            self.dim,
            format!("{}*{}", scalar.label(), self.label),
            self.support.intersect(&scalar.support()),
            Product {
                scalar: scalar.clone(),
                field: self.clone(),
            },
        )
        .with_feature_scale(min_scale([self.feature_scale, scalar.feature_scale()]))
        .with_edge_scale(self.edge_scale)
        .with_features(self.features.iter().chain(scalar.features()).copied().collect())
    }

    /// Largest |X| + |dX| over 64 points on shells just outside the support
    /// ball; 0 for unbounded fields.
    pub fn exterior_residual(&self) -> f64 {
        let Support::Ball { center, radius } = self.support else {
            return 0.0;
        };
        let mut worst = 0.0f64;
        for (i, dir) in sphere_directions(64, self.dim).iter().enumerate() {
            let shell = 1.0 + 0.5 * (i % 4) as f64 / 4.0 + 1e-9;
            let p = center + dir * radius * shell;
            worst = worst.max(self.value(&p).norm() + self.jacobian(&p).norm());
        }
        worst
    }

    /// Largest relative disagreement between dX and a five-point difference
    /// of X at `points`.
    pub fn jacobian_error_at(&self, points: &[Vec3]) -> f64 {
        let h = match self.support {
            Support::Ball { radius, .. } => 1e-3 * radius,
            Support::Unbounded => 1e-3,
        };
        let mut worst = 0.0f64;
        for p in points {
            let analytic = self.jacobian(p);
            let mut fd = Mat3::zeros();
            for k in 0..self.dim {
                let e = Vec3::ith(k, 1.0);
                let col: Vec3 = stencil::five_point(&|s| self.value(&(p + e * s)), 0.0, h);
                fd.set_column(k, &col);
            }
            let scale = analytic.norm().max(self.value(p).norm() / h.max(1.0)).max(1e-12);
            worst = worst.max((analytic - fd).norm() / scale);
        }
        worst
    }

    /// Sampled support and Jacobian checks: exterior residual 0 and Jacobian
    /// consistency to relative 1e-6 at 32 random points inside the support
    /// (or the unit box for unbounded fields).
    pub fn verify(&self) -> Result<()> {
        let ext = self.exterior_residual();
        if ext != 0.0 {
            return Err(ShapeError::InvalidField(format!(
                "{} does not vanish outside its support (residual {ext:e})",
                self.label
            )));
        }
        let mut rng = StdRng::seed_from_u64(0xf1e1d);
        let points: Vec<Vec3> = (0..32)
            .map(|_| {
                let mut x = Vec3::zeros();
                for k in 0..self.dim {
                    x[k] = rng.gen_range(-1.0..1.0);
                }
                match self.support {
                    Support::Ball { center, radius } => center + x * (radius / 3f64.sqrt()),
                    Support::Unbounded => x + Vec3::new(0.25, 0.25, 0.0),
                }
            })
            .collect();
        let err = self.jacobian_error_at(&points);
        if !(err <= 1e-6) {
            return Err(ShapeError::InvalidField(format!(
                "{} Jacobian disagrees with finite differences (relative {err:e})",
                self.label
            )));
        }
        Ok(())
    }
}

fn sphere_directions(n: usize, dim: usize) -> Vec<Vec3> {
    // golden-angle spiral; a circle for planar fields
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            if dim == 2 {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                Vec3::new(a.cos(), a.sin(), 0.0)
            } else {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let a = golden * i as f64;
                Vec3::new(r * a.cos(), r * a.sin(), z)
            }
        })
        .collect()
}

pub(crate) fn min_scale<I: IntoIterator<Item = Option<f64>>>(scales: I) -> Option<f64> {
    scales.into_iter().flatten().reduce(f64::min)
}

/// X(p) = beta(|p - c| / r) D(p) with beta(s) = exp(1 - 1/(1 - s²)) for s < 1
/// and 0 otherwise. Fails with `SupportViolation` unless the ball lies in
/// `hold_all`.
pub fn bump_field(center: Vec3, radius: f64, direction: &AmbientField, hold_all: &Region) -> Result<AmbientField> {
    if !(radius > 0.0) {
        return Err(ShapeError::InvalidArgument(format!(
            "bump radius {radius} must be positive"
        )));
    }
    if !hold_all.contains_ball(&center, radius) {
        return Err(ShapeError::SupportViolation {
            center: center.into(),
            radius,
        });
    }
    let profile = ScalarField::bump(center, radius);
    Ok(direction
        .modulate(&profile)
        .with_label(format!("bump({})", direction.label())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> AmbientField {
        AmbientField::constant(2, Vec3::new(1.0, 0.0, 0.0))
    }

    #[test]
    fn bump_values() {
        let b = bump_field(Vec3::zeros(), 1.0, &e1(), &Region::Everywhere).unwrap();
        assert_eq!(b.value(&Vec3::zeros()), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(b.value(&Vec3::new(2.0, 0.0, 0.0)), Vec3::zeros());
        // beta(0.5) = exp(1 - 1/(1 - 0.25)) = exp(-1/3)
        let v = b.value(&Vec3::new(0.5, 0.0, 0.0));
        assert!((v.x - (-1.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!((v.x - 0.716_531_310_573_789_2).abs() < 1e-12);
    }

    #[test]
    fn bump_is_flat_at_its_rim() {
        let b = bump_field(Vec3::zeros(), 1.0, &e1(), &Region::Everywhere).unwrap();
        for p in [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, -1.0, 0.0)] {
            assert!(b.jacobian(&p).norm() < 1e-8);
            let h = 1e-4;
            let fd = (b.value(&(p + Vec3::new(h, 0.0, 0.0))) - b.value(&(p - Vec3::new(h, 0.0, 0.0)))) / (2.0 * h);
            assert!(fd.norm() < 1e-8);
        }
    }

    #[test]
    fn bump_outside_hold_all_is_rejected() {
        let d = Region::Ball {
            center: [0.0; 3],
            radius: 1.0,
        };
        let r = bump_field(Vec3::new(0.8, 0.0, 0.0), 0.5, &e1(), &d);
        assert!(matches!(r, Err(ShapeError::SupportViolation { .. })));
    }

    #[test]
    fn catalog_fields_pass_verification() {
        let rot = AmbientField::rotation(2, Vec3::z());
        let bump = bump_field(Vec3::new(1.0, 0.0, 0.0), 0.4, &rot, &Region::Everywhere).unwrap();
        let lin = AmbientField::linear(3, Mat3::new(1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.5, 0.0, -1.0));
        for f in [rot.clone(), bump.clone(), lin, AmbientField::radial(3), bump.add(&rot)] {
            f.verify().unwrap_or_else(|e| panic!("{}: {e}", f.label()));
        }
        assert_eq!(bump.exterior_residual(), 0.0);
    }

    #[test]
    fn second_derivative_of_bump_matches_differences() {
        let b = bump_field(
            Vec3::new(0.2, 0.1, 0.0),
            0.7,
            &AmbientField::rotation(2, Vec3::z()),
            &Region::Everywhere,
        )
        .unwrap();
        let p = Vec3::new(0.4, -0.1, 0.0);
        let w = Vec3::new(0.3, 0.8, 0.0);
        let h = 1e-4;
        let fd = (b.value(&(p + w * h)) + b.value(&(p - w * h)) - b.value(&p) * 2.0) / (h * h);
        assert!((b.second(&p, &w) - fd).norm() < 1e-5 * fd.norm().max(1.0));
    }
}
