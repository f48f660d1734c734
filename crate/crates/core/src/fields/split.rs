use nalgebra::Matrix2;
use serde::Serialize;

use super::scalar::{smooth_step, smooth_step_deriv};
use super::{AmbientField, FieldMap};
use crate::error::{Result, ShapeError};
use crate::geometry::{Manifold, Mat3, Param, ParamCurve, ParamSurface, Vec3};

/// Width of the collar around the boundary on which the conormal is
/// extended, as a fraction of the (u-)parameter interval.
pub const DEFAULT_EDGE_FRACTION: f64 = 0.1;

/// X_p minus its orthogonal projection onto T_pM.
pub fn project_normal(m: &Manifold, param: Param, x: &Vec3) -> Result<Vec3> {
    Ok(m.tangent_basis(param)?.normal_part(x))
}

/// One sample of X = X^⊥ + X^t + X^ν.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitSample {
    #[serde(skip)]
    pub param: Param,
    pub point: [f64; 3],
    pub x: [f64; 3],
    pub perp: [f64; 3],
    pub tangential: [f64; 3],
    pub nu: [f64; 3],
    pub on_boundary: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct FieldSplit {
    pub samples: Vec<SplitSample>,
}

impl FieldSplit {
    /// Largest |X - X^⊥ - X^t - X^ν|.
    pub fn identity_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| {
                let sum = Vec3::from(s.perp) + Vec3::from(s.tangential) + Vec3::from(s.nu);
                (Vec3::from(s.x) - sum).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Conormal nu extended from the boundary into a collar of M, zero elsewhere.
#[derive(Clone)]
struct EdgeExtension {
    lo: f64,
    hi: f64,
    width: f64,
    active: bool,
}

impl EdgeExtension {
    fn for_manifold(m: &Manifold) -> Result<Self> {
        let (lo, hi, active) = match m {
            Manifold::Curve(c) => {
                let (a, b) = c.domain();
                (a, b, !c.is_closed())
            }
            Manifold::Surface(s) => {
                if !s.is_periodic_v() {
                    return Err(ShapeError::Unsupported(
                        "field splitting needs a v-periodic surface".into(),
                    ));
                }
                let (a, b) = s.u_range();
                (a, b, true)
            }
        };
        Ok(Self {
            lo,
            hi,
            width: DEFAULT_EDGE_FRACTION * (hi - lo),
            active,
        })
    }

    /// Signed weight c(s): +1 at the upper end, -1 at the lower end, 0 in the
    /// middle; and its derivative.
    fn weight(&self, s: f64) -> (f64, f64) {
        if !self.active {
            return (0.0, 0.0);
        }
        let up = (self.hi - s) / self.width;
        let down = (s - self.lo) / self.width;
        (
            smooth_step(up) - smooth_step(down),
            -(smooth_step_deriv(up) + smooth_step_deriv(down)) / self.width,
        )
    }
}

fn curve_conormal_dir(c: &ParamCurve, t: f64) -> Vec3 {
    c.jet(t).d1.normalize()
}

fn surface_conormal_dir(s: &ParamSurface, u: f64, v: f64) -> Result<Vec3> {
    let j = s.jet(u, v);
    let n = crate::geometry::normal_from_jet(&j, u, v)?;
    Ok(j.dv.cross(&n) / j.dv.norm())
}

fn extended_conormal(m: &Manifold, ext: &EdgeExtension, p: Param) -> Result<Vec3> {
    match (m, p) {
        (Manifold::Curve(c), Param::Curve(t)) => Ok(curve_conormal_dir(c, t) * ext.weight(t).0),
        (Manifold::Surface(s), Param::Surface(u, v)) => Ok(surface_conormal_dir(s, u, v)? * ext.weight(u).0),
        _ => Err(ShapeError::InvalidArgument(
            "parameter kind does not match manifold".into(),
        )),
    }
}

/// Samples the splitting X = X^⊥ + X^t + X^ν at `n_samples` parameters per
/// direction. X^ν = (X . nu~) nu~ uses the conormal extended into a collar of
/// width 10% of the parameter interval; it vanishes on closed manifolds.
pub fn split_field(m: &Manifold, x: &AmbientField, n_samples: usize) -> Result<FieldSplit> {
    if n_samples < 2 {
        return Err(ShapeError::InvalidArgument("n_samples must be at least 2".into()));
    }
    let ext = EdgeExtension::for_manifold(m)?;
    let mut samples = Vec::new();
    for param in m.sample_params(n_samples) {
        let point = m.point(param);
        let xv = x.value(&point);
        let perp = project_normal(m, param, &xv)?;
        let nt = extended_conormal(m, &ext, param)?;
        let nu = nt * xv.dot(&nt);
        let tangential = xv - perp - nu;
        samples.push(SplitSample {
            param,
            point: point.into(),
            x: xv.into(),
            perp: perp.into(),
            tangential: tangential.into(),
            nu: nu.into(),
            on_boundary: m.boundary_normal(param)?.is_some(),
        });
    }
    Ok(FieldSplit { samples })
}

/// Residuals of the invariance hypotheses: X tangent to M in the interior
/// and to the boundary on the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangencyReport {
    pub max_normal_residual: f64,
    pub max_boundary_residual: f64,
}

impl TangencyReport {
    pub fn max(&self) -> f64 {
        self.max_normal_residual.max(self.max_boundary_residual)
    }
}

pub fn check_tangency(m: &Manifold, x: &AmbientField, n_samples: usize) -> Result<TangencyReport> {
    let mut report = TangencyReport {
        max_normal_residual: 0.0,
        max_boundary_residual: 0.0,
    };
    for param in m.sample_params(n_samples) {
        let p = m.point(param);
        let xv = x.value(&p);
        let perp = project_normal(m, param, &xv)?;
        report.max_normal_residual = report.max_normal_residual.max(perp.norm());
        if let Some(nu) = m.boundary_normal(param)? {
            report.max_boundary_residual = report.max_boundary_residual.max(xv.dot(&nu).abs());
        }
    }
    Ok(report)
}

/// Ambient fields realizing X^⊥, X^ν and X^t near M.
///
/// Each part is evaluated at the nearest point of M (projection along the
/// normal fibres), so on M it coincides with the sampled split.
#[derive(Debug, Clone)]
pub struct FieldParts {
    pub perp: AmbientField,
    pub nu: AmbientField,
    pub tangential: AmbientField,
}

pub fn field_parts(m: &Manifold, x: &AmbientField) -> Result<FieldParts> {
    let ext = EdgeExtension::for_manifold(m)?;
    let probe = m.point(m.sample_params(2)[0]);
    let has_hint = match m {
        Manifold::Curve(c) => c.map().param_hint(&probe).is_some(),
        Manifold::Surface(s) => s.map().param_hint(&probe).is_some(),
    };
    let coarse = if has_hint { 0 } else { 256 };
    // the collar cutoff is a sharp feature of the ν and tangential parts
    let collar = ext.active.then(|| match m {
        Manifold::Curve(c) => {
            let (a, b) = c.domain();
            ext.width * c.length() / (b - a)
        }
        Manifold::Surface(s) => {
            let (u0, u1) = s.u_range();
            let (v0, _) = s.v_range();
            ext.width * s.first_jet(0.5 * (u0 + u1), v0).du.norm()
        }
    });
    let make = |kind: PartKind, name: &str| {
        AmbientField::new(
            x.dim(),
            format!("{}[{name}]", x.label()),
            x.support(),
            PartMap {
                manifold: m.clone(),
                field: x.clone(),
                ext: ext.clone(),
                kind,
                coarse,
            },
        )
        .with_feature_scale(x.feature_scale())
        .with_edge_scale(super::min_scale([x.edge_scale(), collar]))
        .with_features(x.features().to_vec())
    };
    let nu = if m.has_boundary() {
        make(PartKind::Nu, "nu")
    } else {
        AmbientField::zero(x.dim()).with_label(format!("{}[nu]", x.label()))
    };
    Ok(FieldParts {
        perp: make(PartKind::Perp, "perp"),
        nu,
        tangential: make(PartKind::Tangential, "tan"),
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PartKind {
    Perp,
    Nu,
    Tangential,
}

struct PartMap {
    manifold: Manifold,
    field: AmbientField,
    ext: EdgeExtension,
    kind: PartKind,
    coarse: usize,
}

const PROJECTION_TOL: f64 = 1e-15;

impl PartMap {
    fn curve_part(&self, c: &ParamCurve, p: &Vec3) -> (Vec3, Mat3) {
        let (param, _) = self
            .manifold
            .closest_param_with_tol(p, self.coarse, false, PROJECTION_TOL);
        let Param::Curve(s) = param else { unreachable!() };
        let j = c.jet(s);
        let speed = j.d1.norm();
        let t = j.d1 / speed;
        let t_s = (j.d2 - t * t.dot(&j.d2)) / speed;
        let r = j.point - p;
        let grad_s = j.d1 / (speed * speed + r.dot(&j.d2));

        let (x, dx) = self.field.value_and_jacobian(p);
        let a = t.dot(&x);
        let tan_part = t * a;
        // d(a T) = T (T^T dX + (T_s . X) grad_s^T) + a T_s grad_s^T
        let grad_a = dx.transpose() * t + grad_s * t_s.dot(&x);
        let d_tan = t * grad_a.transpose() + t_s * grad_s.transpose() * a;
        let (w, dw) = self.ext.weight(s);
        match self.kind {
            PartKind::Perp => (x - tan_part, dx - d_tan),
            PartKind::Nu => (
                tan_part * (w * w),
                d_tan * (w * w) + tan_part * grad_s.transpose() * (2.0 * w * dw),
            ),
            PartKind::Tangential => (
                tan_part * (1.0 - w * w),
                d_tan * (1.0 - w * w) - tan_part * grad_s.transpose() * (2.0 * w * dw),
            ),
        }
    }

    /// Surface parts and their Jacobians. ∂(u, v)/∂p follows from the
    /// implicit function theorem on J^T (φ - p) = 0; φ_uu, φ_uv come from
    /// central differences of φ_u.
    fn surface_part(&self, s: &ParamSurface, p: &Vec3) -> (Vec3, Mat3) {
        let (param, _) = self
            .manifold
            .closest_param_with_tol(p, self.coarse, false, PROJECTION_TOL);
        let Param::Surface(u, v) = param else { unreachable!() };
        let j = s.jet(u, v);
        let (fu, fv, fvv) = (j.du, j.dv, j.dvv);
        let h = 1e-5 * s.param_diameter();
        let fuu = (s.first_jet(u + h, v).du - s.first_jet(u - h, v).du) / (2.0 * h);
        let fuv = (s.first_jet(u, v + h).du - s.first_jet(u, v - h).du) / (2.0 * h);

        let r = j.point - p;
        let a = Matrix2::new(
            fu.dot(&fu) + r.dot(&fuu),
            fu.dot(&fv) + r.dot(&fuv),
            fu.dot(&fv) + r.dot(&fuv),
            fv.dot(&fv) + r.dot(&fvv),
        );
        let inv = a.try_inverse().unwrap_or_else(|| Matrix2::repeat(f64::NAN));
        let grad_u = fu * inv[(0, 0)] + fv * inv[(0, 1)];
        let grad_v = fu * inv[(1, 0)] + fv * inv[(1, 1)];
        let chain = |du: Vec3, dv: Vec3| du * grad_u.transpose() + dv * grad_v.transpose();
        let unit_deriv = |vec: Vec3, d: Vec3| {
            let n = vec.norm();
            let e = vec / n;
            (d - e * e.dot(&d)) / n
        };

        let c = fu.cross(&fv);
        let n = c.normalize();
        let n_u = unit_deriv(c, fuu.cross(&fv) + fu.cross(&fuv));
        let n_v = unit_deriv(c, fuv.cross(&fv) + fu.cross(&fvv));
        let dn = chain(n_u, n_v);

        let m = fv.cross(&n);
        let e = m.normalize();
        let e_u = unit_deriv(m, fuv.cross(&n) + fv.cross(&n_u));
        let e_v = unit_deriv(m, fvv.cross(&n) + fv.cross(&n_v));
        let de = chain(e_u, e_v);

        let (x, dx) = self.field.value_and_jacobian(p);
        let xn = x.dot(&n);
        let perp = n * xn;
        let d_perp = n * (dx.transpose() * n + dn.transpose() * x).transpose() + dn * xn;

        let (w, dw) = self.ext.weight(u);
        let xe = x.dot(&e);
        let grad_xe = dx.transpose() * e + de.transpose() * x;
        let nu = e * (w * w * xe);
        let d_nu = (e * grad_xe.transpose() + de * xe) * (w * w) + e * grad_u.transpose() * (2.0 * w * dw * xe);
        match self.kind {
            PartKind::Perp => (perp, d_perp),
            PartKind::Nu => (nu, d_nu),
            PartKind::Tangential => (x - perp - nu, dx - d_perp - d_nu),
        }
    }
}

impl FieldMap for PartMap {
    fn value(&self, p: &Vec3) -> Vec3 {
        match &self.manifold {
            Manifold::Curve(c) => self.curve_part(c, p).0,
            Manifold::Surface(s) => self.surface_part(s, p).0,
        }
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        self.value_and_jacobian(p).1
    }

    fn value_and_jacobian(&self, p: &Vec3) -> (Vec3, Mat3) {
        match &self.manifold {
            Manifold::Curve(c) => self.curve_part(c, p),
            Manifold::Surface(s) => self.surface_part(s, p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FnSurface;
    use std::f64::consts::TAU;

    fn unit_circle() -> Manifold {
        ParamCurve::from_fns(
            2,
            0.0,
            TAU,
            true,
            |t| Vec3::new(t.cos(), t.sin(), 0.0),
            |t| Vec3::new(-t.sin(), t.cos(), 0.0),
            |t| Vec3::new(-t.cos(), -t.sin(), 0.0),
        )
        .unwrap()
        .into()
    }

    fn segment() -> Manifold {
        ParamCurve::from_fns(
            2,
            0.0,
            1.0,
            false,
            |t| Vec3::new(t, 0.0, 0.0),
            |_| Vec3::new(1.0, 0.0, 0.0),
            |_| Vec3::zeros(),
        )
        .unwrap()
        .into()
    }

    fn cylinder() -> Manifold {
        ParamSurface::periodic(
            (0.0, 2.0),
            (0.0, TAU),
            FnSurface::new(
                |u, v| Vec3::new(v.cos(), v.sin(), u),
                |_, _| Vec3::new(0.0, 0.0, 1.0),
                |_, v| Vec3::new(-v.sin(), v.cos(), 0.0),
                |_, v| Vec3::new(-v.cos(), -v.sin(), 0.0),
            ),
        )
        .unwrap()
        .into()
    }

    #[test]
    fn projections() {
        let c = unit_circle();
        let e1 = Vec3::x();
        assert!((project_normal(&c, Param::Curve(0.0), &e1).unwrap() - e1).norm() < 1e-15);
        assert!(project_normal(&c, Param::Curve(TAU / 4.0), &e1).unwrap().norm() < 1e-15);
        let cyl = cylinder();
        let p = project_normal(&cyl, Param::Surface(0.5, 0.0), &Vec3::new(1.0, 1.0, 1.0)).unwrap();
        assert!((p - Vec3::x()).norm() < 1e-15);
    }

    #[test]
    fn split_on_closed_circle_has_no_nu_part() {
        let c = unit_circle();
        let f = AmbientField::constant(2, Vec3::new(0.3, -1.0, 0.0));
        let split = split_field(&c, &f, 32).unwrap();
        assert!(split.samples.iter().all(|s| s.nu == [0.0; 3] && !s.on_boundary));
        assert!(split.identity_residual() < 1e-15);
    }

    #[test]
    fn split_on_segment() {
        let s = segment();
        let e1 = AmbientField::constant(2, Vec3::x());
        let split = split_field(&s, &e1, 21).unwrap();
        let mid = &split.samples[10];
        assert_eq!(mid.tangential, [1.0, 0.0, 0.0]);
        assert_eq!(mid.perp, [0.0; 3]);
        let end = split.samples.last().unwrap();
        assert!(end.on_boundary);
        assert_eq!(end.nu, [1.0, 0.0, 0.0]);
        assert_eq!(end.tangential, [0.0; 3]);

        let e2 = AmbientField::constant(2, Vec3::y());
        for smp in split_field(&s, &e2, 21).unwrap().samples {
            assert_eq!(smp.perp, [0.0, 1.0, 0.0]);
            assert_eq!(smp.tangential, [0.0; 3]);
            assert_eq!(smp.nu, [0.0; 3]);
        }
    }

    #[test]
    fn tangency_reports() {
        let c = unit_circle();
        let rot = AmbientField::rotation(2, Vec3::z());
        let r = check_tangency(&c, &rot, 64).unwrap();
        assert!(r.max() < 1e-12);
        let rad = AmbientField::radial(2);
        let r = check_tangency(&c, &rad, 64).unwrap();
        assert!((r.max_normal_residual - 1.0).abs() < 1e-12);

        let axial = AmbientField::constant(3, Vec3::z());
        let r = check_tangency(&cylinder(), &axial, 16).unwrap();
        assert!(r.max_normal_residual < 1e-15);
        assert!((r.max_boundary_residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn part_fields_agree_with_samples_on_segment() {
        let s = segment();
        let x = AmbientField::linear(2, Mat3::new(0.3, 1.0, 0.0, -0.5, 0.2, 0.0, 0.0, 0.0, 0.0));
        let parts = field_parts(&s, &x).unwrap();
        let split = split_field(&s, &x, 17).unwrap();
        for smp in &split.samples {
            let p = Vec3::from(smp.point);
            assert!((parts.perp.value(&p) - Vec3::from(smp.perp)).norm() < 1e-14);
            assert!((parts.nu.value(&p) - Vec3::from(smp.nu)).norm() < 1e-14);
            assert!((parts.tangential.value(&p) - Vec3::from(smp.tangential)).norm() < 1e-14);
        }
    }

    #[test]
    fn part_field_jacobians_match_differences() {
        let arc: Manifold = ParamCurve::from_fns(
            2,
            0.0,
            2.0,
            false,
            |t| Vec3::new(t.cos(), t.sin(), 0.0),
            |t| Vec3::new(-t.sin(), t.cos(), 0.0),
            |t| Vec3::new(-t.cos(), -t.sin(), 0.0),
        )
        .unwrap()
        .into();
        let x = AmbientField::linear(2, Mat3::new(0.3, 1.0, 0.0, -0.5, 0.2, 0.0, 0.0, 0.0, 0.0))
            .add(&AmbientField::constant(2, Vec3::new(0.1, 0.4, 0.0)));
        let parts = field_parts(&arc, &x).unwrap();
        let pts: Vec<Vec3> = [0.05, 0.15, 1.0, 1.9, 2.0]
            .iter()
            .map(|t: &f64| Vec3::new(1.02 * t.cos(), 1.02 * t.sin(), 0.0))
            .collect();
        // collar cutoffs have large high derivatives: use a small central step
        let h = 1e-6;
        for f in [&parts.perp, &parts.nu, &parts.tangential] {
            for p in &pts {
                let jac = f.jacobian(p);
                for k in 0..2 {
                    let e = Vec3::ith(k, h);
                    let fd = (f.value(&(p + e)) - f.value(&(p - e))) / (2.0 * h);
                    let err = (jac.column(k) - fd).norm();
                    assert!(err < 1e-8 * jac.norm().max(1.0), "{} at {p}: {err:e}", f.label());
                }
            }
        }
    }

    #[test]
    fn surface_part_jacobians_match_differences() {
        // tilted, non-circular tube so that all curvature terms are active
        let tube: Manifold = ParamSurface::periodic(
            (0.0, 1.0),
            (0.0, TAU),
            FnSurface::new(
                |u, v| Vec3::new((1.0 + 0.2 * u) * v.cos(), 0.7 * v.sin(), u + 0.1 * v.sin()),
                |_, v| Vec3::new(0.2 * v.cos(), 0.0, 1.0),
                |u, v| Vec3::new(-(1.0 + 0.2 * u) * v.sin(), 0.7 * v.cos(), 0.1 * v.cos()),
                |u, v| Vec3::new(-(1.0 + 0.2 * u) * v.cos(), -0.7 * v.sin(), -0.1 * v.sin()),
            ),
        )
        .unwrap()
        .into();
        let x = AmbientField::linear(3, Mat3::new(0.3, 1.0, 0.2, -0.5, 0.2, 0.1, 0.4, 0.0, -0.3))
            .add(&AmbientField::constant(3, Vec3::new(0.1, 0.4, -0.2)));
        let parts = field_parts(&tube, &x).unwrap();
        let h = 1e-6;
        for (u, v) in [(0.05, 0.3), (0.5, 2.0), (0.93, 4.0)] {
            let s = tube.as_surface().unwrap();
            let p = s.point(u, v) + s.normal(u, v).unwrap() * 0.01;
            for f in [&parts.perp, &parts.nu, &parts.tangential] {
                let jac = f.jacobian(&p);
                for k in 0..3 {
                    let e = Vec3::ith(k, h);
                    let fd = (f.value(&(p + e)) - f.value(&(p - e))) / (2.0 * h);
                    let err = (jac.column(k) - fd).norm();
                    assert!(err < 1e-7 * jac.norm().max(1.0), "{} at ({u}, {v}): {err:e}", f.label());
                }
            }
        }
    }
}
