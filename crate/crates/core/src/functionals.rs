//! Shape functionals (length, area, elastic energy, cracked-domain wrappers)
//! and their closed-form Eulerian derivatives.
//!
//! Orientation conventions: planar curves use N = R_{π/2} T with signed
//! curvature, space curves the Frenet normal; κN = dT/ds either way. Surfaces
//! use N = φ_u × φ_v / |φ_u × φ_v| and H = tr of the Weingarten map
//! (so a cylinder parametrized with inward N has H = -1/r). Boundary
//! conormals point out of M.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, ShapeError};
use crate::fields::{AmbientField, Support};
use crate::geometry::quadrature::{composite_rule, DEFAULT_CURVE_PANELS, DEFAULT_SURFACE_PANELS};
use crate::geometry::{curvature_formula, Manifold, Param, ParamCurve, ParamSurface, Region, SurfaceSide, Vec3};

const RESOLVE_CURVE: f64 = 40.0;
// Panels per feature length on surfaces. Collar cutoffs are steeper than
// bumps relative to their width and need more.
const RESOLVE_SURFACE: f64 = 8.0;
const RESOLVE_EDGE: f64 = 14.0;
const MAX_CURVE_PANELS: usize = 4096;
const MAX_SURFACE_PANELS: usize = 128;
const MAX_EDGE_PANELS: usize = 256;

pub type EvaluateFn = Arc<dyn Fn(&Manifold) -> Result<f64> + Send + Sync>;
pub type DerivativeFn = Arc<dyn Fn(&Manifold, &AmbientField) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Length,
    Area,
    Elastic,
    Crack {
        domain: Region,
        inner: Box<ShapeFunctional>,
    },
    Custom {
        evaluate: EvaluateFn,
        derivative: Option<DerivativeFn>,
    },
}

/// A shape functional J together with its derivative dJ(M)(X) when known
/// in closed form.
#[derive(Clone)]
pub struct ShapeFunctional {
    name: String,
    kind: Kind,
    curve_panels: usize,
    surface_panels: (usize, usize),
}

impl fmt::Debug for ShapeFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShapeFunctional")
            .field("name", &self.name)
            .field("curve_panels", &self.curve_panels)
            .field("surface_panels", &self.surface_panels)
            .finish_non_exhaustive()
    }
}

impl ShapeFunctional {
    fn with_kind(name: &str, kind: Kind) -> Self {
        Self {
            name: name.into(),
            kind,
            curve_panels: DEFAULT_CURVE_PANELS,
            surface_panels: (DEFAULT_SURFACE_PANELS, DEFAULT_SURFACE_PANELS),
        }
    }

    /// ∫ |γ'| dt.
    pub fn length() -> Self {
        Self::with_kind("length", Kind::Length)
    }

    /// ∫∫ |φ_u × φ_v| du dv.
    pub fn area() -> Self {
        Self::with_kind("area", Kind::Area)
    }

    /// ∫ κ² ds. Evaluation accepts any regular parametrization (needed for
    /// flowed curves); the closed-form derivative requires arc length.
    pub fn elastic() -> Self {
        Self::with_kind("elastic", Kind::Elastic)
    }

    pub fn custom(name: impl Into<String>, evaluate: EvaluateFn, derivative: Option<DerivativeFn>) -> Self {
        Self {
            name: name.into(),
            kind: Kind::Custom { evaluate, derivative },
            curve_panels: DEFAULT_CURVE_PANELS,
            surface_panels: (DEFAULT_SURFACE_PANELS, DEFAULT_SURFACE_PANELS),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Quadrature panels for curve integrals (5 Gauss points each).
    pub fn with_curve_panels(mut self, panels: usize) -> Self {
        self.curve_panels = panels.max(1);
        if let Kind::Crack { inner, .. } = &mut self.kind {
            **inner = inner.clone().with_curve_panels(panels);
        }
        self
    }

    pub fn with_surface_panels(self, panels: usize) -> Self {
        self.with_surface_panels_uv(panels, panels)
    }

    /// Separate panel counts along u and v.
    pub fn with_surface_panels_uv(mut self, nu: usize, nv: usize) -> Self {
        self.surface_panels = (nu.max(1), nv.max(1));
        if let Kind::Crack { inner, .. } = &mut self.kind {
            **inner = inner.clone().with_surface_panels_uv(nu, nv);
        }
        self
    }

    /// Copy with quadratures refined so that the sharpest feature of `x`
    /// gets about 40 panels per radius along curves (20 on surfaces, capped
    /// per direction). Edge features (collar cutoffs) only refine the
    /// direction across the boundary.
    pub fn resolved_for(&self, m: &Manifold, x: &AmbientField) -> ShapeFunctional {
        let feature = x.feature_scale().filter(|s| *s > 0.0);
        let edge = x.edge_scale().filter(|s| *s > 0.0);
        let need = |per: f64, len: f64, scale: Option<f64>, cap: usize| {
            scale.map_or(0, |sc| (per * len / sc).ceil().min(cap as f64) as usize)
        };
        match m {
            Manifold::Curve(c) => {
                let scale = crate::fields::min_scale([feature, edge]);
                let n = need(RESOLVE_CURVE, c.length(), scale, MAX_CURVE_PANELS);
                self.clone().with_curve_panels(n.max(self.curve_panels))
            }
            Manifold::Surface(s) => {
                let (u0, u1) = s.u_range();
                let (v0, v1) = s.v_range();
                let (um, vm) = (0.5 * (u0 + u1), 0.5 * (v0 + v1));
                let jet = s.first_jet(um, vm);
                let lu = jet.du.norm() * (u1 - u0);
                let lv = jet.dv.norm() * (v1 - v0);
                let v_edge = if s.is_periodic_v() { None } else { edge };
                let nu = need(RESOLVE_SURFACE, lu, feature, MAX_SURFACE_PANELS).max(need(
                    RESOLVE_EDGE,
                    lu,
                    edge,
                    MAX_EDGE_PANELS,
                ));
                let nv = need(RESOLVE_SURFACE, lv, feature, MAX_SURFACE_PANELS).max(need(
                    RESOLVE_EDGE,
                    lv,
                    v_edge,
                    MAX_EDGE_PANELS,
                ));
                let (bu, bv) = self.surface_panels;
                self.clone().with_surface_panels_uv(nu.max(bu), nv.max(bv))
            }
        }
    }

    pub fn curve_panels(&self) -> usize {
        self.curve_panels
    }

    pub fn surface_panels(&self) -> (usize, usize) {
        self.surface_panels
    }

    /// The cracked region Ω̃ for crack functionals.
    pub fn crack_domain(&self) -> Option<&Region> {
        match &self.kind {
            Kind::Crack { domain, .. } => Some(domain),
            _ => None,
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        match &self.kind {
            Kind::Custom { derivative, .. } => derivative.is_some(),
            Kind::Crack { inner, .. } => inner.has_analytic_derivative(),
            _ => true,
        }
    }

    pub fn evaluate(&self, m: &Manifold) -> Result<f64> {
        let value = match &self.kind {
            Kind::Length => length_with(require_curve(m, &self.name)?, self.curve_panels),
            Kind::Area => area_with(require_surface(m, &self.name)?, self.surface_panels),
            Kind::Elastic => {
                let c = require_curve(m, &self.name)?;
                c.integrate(
                    |t| {
                        let j = c.jet(t);
                        let k = curvature_formula(c.dim(), &j);
                        k * k * j.d1.norm()
                    },
                    self.curve_panels,
                )
            }
            Kind::Crack { inner, .. } => inner.evaluate(m)?,
            Kind::Custom { evaluate, .. } => evaluate(m)?,
        };
        if !value.is_finite() {
            return Err(ShapeError::NonFinite(format!("{} evaluated to {value}", self.name)));
        }
        Ok(value)
    }

    /// Checks that `x` is an admissible perturbation (crack functionals only
    /// accept fields supported inside Ω̃).
    pub fn check_field(&self, x: &AmbientField) -> Result<()> {
        if let Kind::Crack { domain, .. } = &self.kind {
            if *domain == Region::Everywhere {
                return Ok(());
            }
            match x.support() {
                Support::Ball { center, radius } if domain.contains_ball(&center, radius) => {}
                Support::Ball { center, radius } => {
                    return Err(ShapeError::SupportViolation {
                        center: center.into(),
                        radius,
                    })
                }
                Support::Unbounded => {
                    return Err(ShapeError::InvalidField(format!(
                        "{} has unbounded support; crack functionals need fields supported inside the domain",
                        x.label()
                    )))
                }
            }
        }
        Ok(())
    }

    /// Closed-form dJ(M)(X).
    pub fn analytic_derivative(&self, m: &Manifold, x: &AmbientField) -> Result<f64> {
        let resolved = self.resolved_for(m, x);
        resolved.analytic_derivative_unrefined(m, x)
    }

    fn analytic_derivative_unrefined(&self, m: &Manifold, x: &AmbientField) -> Result<f64> {
        let value = match &self.kind {
            Kind::Length => dlength_with(require_curve(m, &self.name)?, x, self.curve_panels)?,
            Kind::Area => darea_with(
                require_surface(m, &self.name)?,
                x,
                self.surface_panels,
                self.curve_panels,
            )?,
            Kind::Elastic => delastic_with(require_curve(m, &self.name)?, x, self.curve_panels)?,
            Kind::Crack { inner, .. } => {
                self.check_field(x)?;
                inner.analytic_derivative(m, x)?
            }
            Kind::Custom { derivative, .. } => match derivative {
                Some(d) => d(m, x)?,
                None => {
                    return Err(ShapeError::Unsupported(format!(
                        "{} has no closed-form derivative",
                        self.name
                    )))
                }
            },
        };
        if !value.is_finite() {
            return Err(ShapeError::NonFinite(format!("d{} = {value}", self.name)));
        }
        Ok(value)
    }

    /// Vector density G with h(X^⊥) = ∫_M G · X dμ: -κN for length, H N for
    /// area, (2κ'' + κ³) N for elastic energy.
    pub fn normal_density(&self, m: &Manifold, p: Param) -> Result<Vec3> {
        match (&self.kind, m, p) {
            (Kind::Length, Manifold::Curve(c), Param::Curve(t)) => {
                let f = c.frame(t)?;
                Ok(-f.normal * f.curvature)
            }
            (Kind::Area, Manifold::Surface(s), Param::Surface(u, v)) => {
                Ok(s.normal(u, v)? * s.mean_curvature(u, v, None)?)
            }
            (Kind::Elastic, Manifold::Curve(c), Param::Curve(t)) => {
                if c.dim() != 2 {
                    return Err(ShapeError::Unsupported("elastic density needs a planar curve".into()));
                }
                let f = c.frame(t)?;
                let (k, _, k_ss) = c.curvature_derivs(t, None)?;
                Ok(f.normal * (2.0 * k_ss + k * k * k))
            }
            (Kind::Crack { inner, .. }, ..) => inner.normal_density(m, p),
            (Kind::Custom { .. }, ..) => Err(ShapeError::Unsupported(format!(
                "{} has no known normal density",
                self.name
            ))),
            _ => Err(ShapeError::InvalidArgument(format!(
                "{} is not defined on this manifold",
                self.name
            ))),
        }
    }
}

fn require_curve<'a>(m: &'a Manifold, name: &str) -> Result<&'a ParamCurve> {
    m.as_curve()
        .ok_or_else(|| ShapeError::InvalidArgument(format!("{name} needs a curve")))
}

fn require_surface<'a>(m: &'a Manifold, name: &str) -> Result<&'a ParamSurface> {
    m.as_surface()
        .ok_or_else(|| ShapeError::InvalidArgument(format!("{name} needs a surface")))
}

fn length_with(c: &ParamCurve, panels: usize) -> f64 {
    c.integrate(|t| c.speed(t), panels)
}

fn area_with(s: &ParamSurface, (pu, pv): (usize, usize)) -> f64 {
    s.integrate(|u, v| s.area_element(u, v), pu, pv)
}

pub fn length(curve: &ParamCurve) -> f64 {
    length_with(curve, DEFAULT_CURVE_PANELS)
}

pub fn surface_area(surf: &ParamSurface) -> f64 {
    area_with(surf, (DEFAULT_SURFACE_PANELS, DEFAULT_SURFACE_PANELS))
}

/// ∫ κ² ds for an arc-length parametrized curve.
pub fn elastic_energy(curve: &ParamCurve) -> Result<f64> {
    curve.require_arc_length()?;
    ShapeFunctional::elastic().evaluate(&Manifold::Curve(curve.clone()))
}

fn end_terms<F: Fn(f64) -> f64>(c: &ParamCurve, f: F) -> f64 {
    if c.is_closed() {
        return 0.0;
    }
    let (a, b) = c.domain();
    f(b) - f(a)
}

/// ∫ T · (∂X ∘ γ) γ' dt — always defined for regular curves.
pub fn dlength_jacobian_form(curve: &ParamCurve, x: &AmbientField) -> f64 {
    dlength_jacobian_with(curve, x, DEFAULT_CURVE_PANELS)
}

/// [`dlength_jacobian_form`] with `panels` Gauss panels.
pub fn dlength_jacobian_with(c: &ParamCurve, x: &AmbientField, panels: usize) -> f64 {
    c.integrate(
        |t| {
            let j = c.jet(t);
            let v = j.d1.norm();
            j.d1.dot(&(x.jacobian(&j.point) * j.d1)) / v
        },
        panels,
    )
}

/// -∫ κ (X · N) |γ'| dt + [X · T]_a^b (boundary terms dropped on closed curves).
pub fn dlength_hadamard_form(curve: &ParamCurve, x: &AmbientField) -> Result<f64> {
    dlength_hadamard_with(curve, x, DEFAULT_CURVE_PANELS)
}

/// [`dlength_hadamard_form`] with `panels` Gauss panels.
pub fn dlength_hadamard_with(c: &ParamCurve, x: &AmbientField, panels: usize) -> Result<f64> {
    let (a, b) = c.domain();
    let mut interior = 0.0;
    for (t, w) in composite_rule(a, b, panels) {
        let f = c.frame(t)?;
        let p = c.point(t);
        interior -= w * f.curvature * x.value(&p).dot(&f.normal) * f.speed;
    }
    let bnd = end_terms(c, |t| {
        let j = c.jet(t);
        x.value(&j.point).dot(&j.d1.normalize())
    });
    Ok(interior + bnd)
}

/// Hadamard form, or the Jacobian form where the Frenet frame degenerates.
pub fn analytic_dlength(curve: &ParamCurve, x: &AmbientField) -> f64 {
    dlength_with(curve, x, DEFAULT_CURVE_PANELS).unwrap_or_else(|_| dlength_jacobian_form(curve, x))
}

fn dlength_with(c: &ParamCurve, x: &AmbientField, panels: usize) -> Result<f64> {
    match dlength_hadamard_with(c, x, panels) {
        Err(ShapeError::DegenerateFrame { .. }) => Ok(dlength_jacobian_with(c, x, panels)),
        other => other,
    }
}

/// ∫∫ H (X · N) |φ_u × φ_v| + Σ_edges ∫ (X · ν) dσ.
pub fn analytic_darea(surf: &ParamSurface, x: &AmbientField) -> Result<f64> {
    darea_with(
        surf,
        x,
        (DEFAULT_SURFACE_PANELS, DEFAULT_SURFACE_PANELS),
        DEFAULT_CURVE_PANELS,
    )
}

fn darea_with(s: &ParamSurface, x: &AmbientField, (pu, pv): (usize, usize), edge_panels: usize) -> Result<f64> {
    let (a, b) = s.u_range();
    let (c, d) = s.v_range();
    let mut total = 0.0;
    for (u, wu) in composite_rule(a, b, pu) {
        for (v, wv) in composite_rule(c, d, pv) {
            let j = s.jet(u, v);
            let cross = j.du.cross(&j.dv);
            let n = s.normal(u, v)?;
            let h = s.mean_curvature(u, v, None)?;
            total += wu * wv * h * x.value(&j.point).dot(&n) * cross.norm();
        }
    }
    let mut edge = |side: SurfaceSide, lo: f64, hi: f64| -> Result<()> {
        for (r, w) in composite_rule(lo, hi, edge_panels) {
            let (u, v) = match side {
                SurfaceSide::UMin => (a, r),
                SurfaceSide::UMax => (b, r),
                SurfaceSide::VMin => (r, c),
                SurfaceSide::VMax => (r, d),
            };
            let j = s.jet(u, v);
            let len = match side {
                SurfaceSide::UMin | SurfaceSide::UMax => j.dv.norm(),
                _ => j.du.norm(),
            };
            let nu = s.outward_normal(side, r)?;
            total += w * x.value(&j.point).dot(&nu) * len;
        }
        Ok(())
    };
    edge(SurfaceSide::UMin, c, d)?;
    edge(SurfaceSide::UMax, c, d)?;
    if !s.is_periodic_v() {
        edge(SurfaceSide::VMin, a, b)?;
        edge(SurfaceSide::VMax, a, b)?;
    }
    Ok(total)
}

/// ∫ (2κ'' + κ³)(X · N) ds + [2κ d/ds(X · N) - 2κ'(X · N) + κ²(X · T)]_0^L
/// for planar arc-length curves. The κ²(X · T) endpoint term is what makes
/// translations of open arcs derivative-free.
pub fn analytic_delastic(curve: &ParamCurve, x: &AmbientField) -> Result<f64> {
    delastic_with(curve, x, DEFAULT_CURVE_PANELS)
}

fn delastic_with(c: &ParamCurve, x: &AmbientField, panels: usize) -> Result<f64> {
    c.require_arc_length()?;
    if c.dim() != 2 {
        return Err(ShapeError::Unsupported(
            "closed-form elastic derivative is implemented for planar curves".into(),
        ));
    }
    let (a, b) = c.domain();
    let mut interior = 0.0;
    for (s, w) in composite_rule(a, b, panels) {
        let f = c.frame(s)?;
        let (k, _, k_ss) = c.curvature_derivs(s, None)?;
        interior += w * (2.0 * k_ss + k * k * k) * x.value(&c.point(s)).dot(&f.normal);
    }
    if c.is_closed() {
        return Ok(interior);
    }
    let bracket = |s: f64| -> Result<f64> {
        let f = c.frame(s)?;
        let (k, k_s, _) = c.curvature_derivs(s, None)?;
        let (xv, dx) = x.value_and_jacobian(&c.point(s));
        let xn = xv.dot(&f.normal);
        let xt = xv.dot(&f.tangent);
        // N_s = -κ T for the rotated planar normal
        let dxn = (dx * f.tangent).dot(&f.normal) - k * xt;
        Ok(2.0 * k * dxn - 2.0 * k_s * xn + k * k * xt)
    };
    Ok(interior + bracket(b)? - bracket(a)?)
}

/// Cracked-domain functional J̃(Σ) = J(Ω̃ \ Σ): values and derivatives are
/// those of `inner` on the crack Σ; perturbations must be supported in Ω̃.
pub fn crack_functional(domain: Region, crack: &ParamCurve, inner: ShapeFunctional) -> Result<ShapeFunctional> {
    let clearance = crack_clearance(&domain, crack);
    if clearance <= 0.0 {
        return Err(ShapeError::CrackNotInterior {
            clearance,
            required: 0.0,
        });
    }
    let name = format!("crack[{}]", inner.name());
    let (cp, sp) = (inner.curve_panels, inner.surface_panels);
    Ok(ShapeFunctional {
        name,
        kind: Kind::Crack {
            domain,
            inner: Box::new(inner),
        },
        curve_panels: cp,
        surface_panels: sp,
    })
}

/// dist(Σ, fr(Ω̃)) sampled at 1025 points.
pub fn crack_clearance(domain: &Region, crack: &ParamCurve) -> f64 {
    let (a, b) = crack.domain();
    (0..=1024)
        .map(|i| domain.clearance(&crack.point(a + (b - a) * i as f64 / 1024.0)))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::bump_field;
    use crate::geometry::{FnSurface, Mat3};
    use std::f64::consts::{PI, TAU};

    fn circle(r: f64) -> ParamCurve {
        // arc-length parametrization
        ParamCurve::from_fns(
            2,
            0.0,
            TAU * r,
            true,
            move |s| Vec3::new(r * (s / r).cos(), r * (s / r).sin(), 0.0),
            move |s| Vec3::new(-(s / r).sin(), (s / r).cos(), 0.0),
            move |s| Vec3::new(-(s / r).cos() / r, -(s / r).sin() / r, 0.0),
        )
        .unwrap()
    }

    fn segment() -> ParamCurve {
        ParamCurve::from_fns(
            2,
            0.0,
            1.0,
            false,
            |t| Vec3::new(t, 0.0, 0.0),
            |_| Vec3::x(),
            |_| Vec3::zeros(),
        )
        .unwrap()
    }

    fn arc(r: f64, t0: f64, t1: f64) -> ParamCurve {
        ParamCurve::from_fns(
            2,
            r * t0,
            r * t1,
            false,
            move |s| Vec3::new(r * (s / r).cos(), r * (s / r).sin(), 0.0),
            move |s| Vec3::new(-(s / r).sin(), (s / r).cos(), 0.0),
            move |s| Vec3::new(-(s / r).cos() / r, -(s / r).sin() / r, 0.0),
        )
        .unwrap()
    }

    fn cylinder(r: f64, h: f64) -> ParamSurface {
        ParamSurface::periodic(
            (0.0, h),
            (0.0, TAU),
            FnSurface::new(
                move |u, v| Vec3::new(r * v.cos(), r * v.sin(), u),
                |_, _| Vec3::z(),
                move |_, v| Vec3::new(-r * v.sin(), r * v.cos(), 0.0),
                move |_, v| Vec3::new(-r * v.cos(), -r * v.sin(), 0.0),
            ),
        )
        .unwrap()
    }

    fn helix() -> ParamCurve {
        ParamCurve::from_fns(
            3,
            0.0,
            TAU,
            false,
            |t| Vec3::new(t.cos(), t.sin(), t / TAU),
            |t| Vec3::new(-t.sin(), t.cos(), 1.0 / TAU),
            |t| Vec3::new(-t.cos(), -t.sin(), 0.0),
        )
        .unwrap()
    }

    #[test]
    fn lengths_and_areas() {
        assert!((length(&circle(1.0)) - TAU).abs() < 1e-13);
        assert!((length(&segment()) - 1.0).abs() < 1e-15);
        let expected = TAU * (1.0 + 1.0 / (TAU * TAU)).sqrt();
        assert!((length(&helix()) - expected).abs() < 1e-12);
        assert!((surface_area(&cylinder(1.0, 2.0)) - 4.0 * PI).abs() < 1e-12);
        assert!((surface_area(&cylinder(2.0, 1.0)) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn length_derivative_cases() {
        let radial = AmbientField::radial(2);
        assert!((analytic_dlength(&circle(1.0), &radial) - TAU).abs() < 1e-12);
        let seg = segment();
        let e1 = AmbientField::constant(2, Vec3::x());
        assert!(analytic_dlength(&seg, &e1).abs() < 1e-15);
        let scale = AmbientField::linear(2, Mat3::identity());
        assert!((analytic_dlength(&seg, &scale) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn length_forms_agree() {
        let x = AmbientField::linear(3, Mat3::new(0.2, 1.0, -0.3, 0.4, 0.1, 0.0, 0.5, -0.2, 0.7))
            .add(&AmbientField::radial(3));
        for c in [helix(), arc(1.5, 0.2, 2.0)] {
            let h = dlength_hadamard_form(&c, &x).unwrap();
            let j = dlength_jacobian_form(&c, &x);
            assert!((h - j).abs() < 1e-8, "{h} vs {j}");
        }
    }

    #[test]
    fn straight_space_curve_falls_back() {
        let line = ParamCurve::from_fns(
            3,
            0.0,
            1.0,
            false,
            |t| Vec3::new(t, t, t),
            |_| Vec3::repeat(1.0),
            |_| Vec3::zeros(),
        )
        .unwrap();
        let scale = AmbientField::linear(3, Mat3::identity());
        assert!(matches!(
            dlength_hadamard_form(&line, &scale),
            Err(ShapeError::DegenerateFrame { .. })
        ));
        assert!((analytic_dlength(&line, &scale) - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn area_derivative_cases() {
        let cyl = cylinder(1.0, 2.0);
        let radial = AmbientField::radial(3);
        assert!((analytic_darea(&cyl, &radial).unwrap() - 4.0 * PI).abs() < 1e-8);
        let axial = AmbientField::constant(3, Vec3::z());
        assert!(analytic_darea(&cyl, &axial).unwrap().abs() < 1e-12);
        let mut a = Mat3::zeros();
        a[(2, 2)] = 1.0;
        let stretch = AmbientField::linear(3, a);
        assert!((analytic_darea(&cyl, &stretch).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn plane_patch_scaling() {
        let patch = ParamSurface::patch(
            (0.0, 1.0),
            (0.0, 1.0),
            FnSurface::new(
                |u, v| Vec3::new(u, v, 0.0),
                |_, _| Vec3::x(),
                |_, _| Vec3::y(),
                |_, _| Vec3::zeros(),
            ),
        )
        .unwrap();
        assert!((surface_area(&patch) - 1.0).abs() < 1e-13);
        let scale = AmbientField::linear(3, Mat3::identity());
        assert!((analytic_darea(&patch, &scale).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn elastic_cases() {
        for r in [1.0, 2.0] {
            assert!((elastic_energy(&circle(r)).unwrap() - TAU / r).abs() < 1e-12);
        }
        assert!(elastic_energy(&segment()).unwrap().abs() < 1e-15);
        let ellipse = ParamCurve::from_fns(
            2,
            0.0,
            TAU,
            true,
            |t| Vec3::new(2.0 * t.cos(), t.sin(), 0.0),
            |t| Vec3::new(-2.0 * t.sin(), t.cos(), 0.0),
            |t| Vec3::new(-2.0 * t.cos(), -t.sin(), 0.0),
        )
        .unwrap();
        assert!(matches!(elastic_energy(&ellipse), Err(ShapeError::NotArcLength { .. })));

        let c2 = circle(2.0);
        let d = analytic_delastic(&c2, &AmbientField::radial(2)).unwrap();
        assert!((d + PI / 2.0).abs() < 1e-8, "{d}");
        let rot = AmbientField::rotation(2, Vec3::z());
        assert!(analytic_delastic(&c2, &rot).unwrap().abs() < 1e-10);
        let x = AmbientField::linear(2, Mat3::new(1.0, 2.0, 0.0, -1.0, 0.5, 0.0, 0.0, 0.0, 0.0));
        assert!(analytic_delastic(&segment(), &x).unwrap().abs() < 1e-12);
    }

    #[test]
    fn elastic_on_open_arc_is_translation_invariant() {
        let a = arc(1.5, 0.3, 2.2);
        for v in [Vec3::x(), Vec3::y()] {
            let d = analytic_delastic(&a, &AmbientField::constant(2, v)).unwrap();
            assert!(d.abs() < 1e-8, "{d}");
        }
    }

    #[test]
    fn reparametrization_invariance() {
        let a = arc(1.5, 0.3, 2.2);
        let m = Manifold::Curve(a.clone());
        let r = Manifold::Curve(a.reversed());
        for f in [ShapeFunctional::length(), ShapeFunctional::elastic()] {
            assert!((f.evaluate(&m).unwrap() - f.evaluate(&r).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn normal_densities() {
        let m = Manifold::Curve(circle(2.0));
        let g = ShapeFunctional::length().normal_density(&m, Param::Curve(0.0)).unwrap();
        // -κN with N inward: points outward with magnitude 1/r
        assert!((g - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-14);
        let g = ShapeFunctional::elastic()
            .normal_density(&m, Param::Curve(0.0))
            .unwrap();
        assert!((g - Vec3::new(-0.125, 0.0, 0.0)).norm() < 1e-8);
        let cyl = Manifold::Surface(cylinder(1.0, 2.0));
        let g = ShapeFunctional::area()
            .normal_density(&cyl, Param::Surface(1.0, 0.0))
            .unwrap();
        assert!((g - Vec3::x()).norm() < 1e-8);
    }

    #[test]
    fn crack_wrapping() {
        let disk = Region::Ball {
            center: [0.0; 3],
            radius: 3.0,
        };
        let seg = segment();
        let j = crack_functional(disk.clone(), &seg, ShapeFunctional::length()).unwrap();
        let m = Manifold::Curve(seg.clone());
        assert_eq!(j.name(), "crack[length]");
        assert!((j.evaluate(&m).unwrap() - 1.0).abs() < 1e-15);

        let probe = bump_field(Vec3::x(), 0.1, &AmbientField::constant(2, Vec3::x()), &disk).unwrap();
        assert!((j.analytic_derivative(&m, &probe).unwrap() - 1.0).abs() < 1e-12);
        let global = AmbientField::constant(2, Vec3::x());
        assert!(matches!(
            j.analytic_derivative(&m, &global),
            Err(ShapeError::InvalidField(_))
        ));
        let straddling = bump_field(Vec3::new(2.9, 0.0, 0.0), 0.5, &global, &Region::Everywhere).unwrap();
        assert!(matches!(
            j.analytic_derivative(&m, &straddling),
            Err(ShapeError::SupportViolation { .. })
        ));

        let outside = ParamCurve::from_fns(
            2,
            0.0,
            4.0,
            false,
            |t| Vec3::new(t, 0.0, 0.0),
            |_| Vec3::x(),
            |_| Vec3::zeros(),
        )
        .unwrap();
        assert!(matches!(
            crack_functional(disk, &outside, ShapeFunctional::length()),
            Err(ShapeError::CrackNotInterior { .. })
        ));
    }

    #[test]
    fn custom_functional_without_derivative() {
        let f = ShapeFunctional::custom("diam", Arc::new(|m: &Manifold| Ok(m.diameter())), None);
        assert!(!f.has_analytic_derivative());
        let m = Manifold::Curve(circle(1.0));
        assert!(f.evaluate(&m).unwrap() > 2.0);
        assert!(matches!(
            f.analytic_derivative(&m, &AmbientField::zero(2)),
            Err(ShapeError::Unsupported(_))
        ));
    }
}
