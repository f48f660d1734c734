use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::quadrature::{self, DEFAULT_SURFACE_PANELS};
use super::stencil::{self, Interval};
use super::Vec3;
use crate::error::{Result, ShapeError};

/// Position, partials, and second v-partial of a surface at one parameter pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub point: Vec3,
    pub du: Vec3,
    pub dv: Vec3,
    pub dvv: Vec3,
}

pub trait SurfaceMap: Send + Sync {
    fn jet(&self, u: f64, v: f64) -> SurfaceJet;

    fn point(&self, u: f64, v: f64) -> Vec3 {
        self.jet(u, v).point
    }

    /// Point, phi_u and phi_v only; `dvv` may be NaN.
    fn first_jet(&self, u: f64, v: f64) -> SurfaceJet {
        self.jet(u, v)
    }

    fn param_hint(&self, _p: &Vec3) -> Option<(f64, f64)> {
        None
    }
}

type SurfFn = Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>;

/// Surface given by closures for phi, phi_u, phi_v and phi_vv.
#[derive(Clone)]
pub struct FnSurface {
    phi: SurfFn,
    phi_u: SurfFn,
    phi_v: SurfFn,
    phi_vv: SurfFn,
}

impl FnSurface {
    pub fn new<P, U, V, VV>(phi: P, phi_u: U, phi_v: V, phi_vv: VV) -> Self
    where
        P: Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
        U: Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
        V: Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
        VV: Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
    {
        Self {
            phi: Arc::new(phi),
            phi_u: Arc::new(phi_u),
            phi_v: Arc::new(phi_v),
            phi_vv: Arc::new(phi_vv),
        }
    }
}

impl SurfaceMap for FnSurface {
    fn jet(&self, u: f64, v: f64) -> SurfaceJet {
        SurfaceJet {
            point: (self.phi)(u, v),
            du: (self.phi_u)(u, v),
            dv: (self.phi_v)(u, v),
            dvv: (self.phi_vv)(u, v),
        }
    }

    fn point(&self, u: f64, v: f64) -> Vec3 {
        (self.phi)(u, v)
    }
}

/// Edge of the parameter rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurfaceSide {
    UMin,
    UMax,
    VMin,
    VMax,
}

/// Embedded C² surface phi: [a, b] x [c, d] -> R³.
///
/// Cylinder-like surfaces are v-periodic: phi, phi_v and phi_vv agree on
/// v = c and v = d, so the boundary consists of the two u-edges only.
/// Non-periodic patches are supported for pointwise geometry.
#[derive(Clone)]
pub struct ParamSurface {
    u: (f64, f64),
    v: (f64, f64),
    periodic_v: bool,
    map: Arc<dyn SurfaceMap>,
}

impl fmt::Debug for ParamSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamSurface")
            .field("u", &self.u)
            .field("v", &self.v)
            .field("periodic_v", &self.periodic_v)
            .finish_non_exhaustive()
    }
}

const IMMERSION_GRID: usize = 64;
const DEGENERATE: f64 = 1e-12;
const MAX_CONDITION: f64 = 1e10;

impl ParamSurface {
    /// Builds and validates a v-periodic surface.
    pub fn periodic<M: SurfaceMap + 'static>(u: (f64, f64), v: (f64, f64), map: M) -> Result<Self> {
        let s = Self::from_arc(u, v, true, Arc::new(map))?;
        s.validate()?;
        Ok(s)
    }

    /// Builds and validates a non-periodic patch.
    pub fn patch<M: SurfaceMap + 'static>(u: (f64, f64), v: (f64, f64), map: M) -> Result<Self> {
        let s = Self::from_arc(u, v, false, Arc::new(map))?;
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn from_arc(u: (f64, f64), v: (f64, f64), periodic_v: bool, map: Arc<dyn SurfaceMap>) -> Result<Self> {
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1;
        if !ok(u) || !ok(v) {
            return Err(ShapeError::InvalidSurface(format!(
                "bad parameter rectangle {u:?} x {v:?}"
            )));
        }
        Ok(Self { u, v, periodic_v, map })
    }

    /// Immersion, periodicity and derivative-consistency checks.
    pub fn validate(&self) -> Result<()> {
        let n = IMMERSION_GRID;
        for i in 0..=n {
            for k in 0..=n {
                let (u, v) = self.grid_point(i, k, n);
                let j = self.jet(u, v);
                let area = j.du.cross(&j.dv).norm();
                if !area.is_finite() || area <= DEGENERATE {
                    return Err(ShapeError::DegenerateImmersion { u, v, norm: area });
                }
            }
        }

        if self.periodic_v {
            for i in 0..=n {
                let u = self.u.0 + (self.u.1 - self.u.0) * i as f64 / n as f64;
                let (s, e) = (self.jet(u, self.v.0), self.jet(u, self.v.1));
                let pairs = [(s.point, e.point), (s.dv, e.dv), (s.dvv, e.dvv)];
                for (x, y) in pairs {
                    if (x - y).norm() > 1e-12 * 1.0f64.max(x.norm()) {
                        return Err(ShapeError::InvalidSurface(format!("not v-periodic at u = {u}")));
                    }
                }
            }
        }

        let hu = 1e-3 * (self.u.1 - self.u.0);
        let hv = 1e-3 * (self.v.1 - self.v.0);
        let mut rng = StdRng::seed_from_u64(0x5eed_5eed);
        for _ in 0..32 {
            let u = rng.gen_range((self.u.0 + 4.0 * hu)..(self.u.1 - 4.0 * hu));
            let v = rng.gen_range((self.v.0 + 4.0 * hv)..(self.v.1 - 4.0 * hv));
            let j = self.jet(u, v);
            let fu: Vec3 = stencil::five_point(&|x| self.point(x, v), u, hu);
            let fv: Vec3 = stencil::five_point(&|y| self.point(u, y), v, hv);
            let fvv: Vec3 = stencil::five_point(&|y| self.jet(u, y).dv, v, hv);
            let scale = j.du.norm().max(j.dv.norm());
            let checks = [
                ("phi_u", (fu - j.du).norm(), scale),
                ("phi_v", (fv - j.dv).norm(), scale),
                (
                    "phi_vv",
                    (fvv - j.dvv).norm(),
                    j.dvv.norm().max(j.dv.norm() / (self.v.1 - self.v.0)),
                ),
            ];
            for (name, err, s) in checks {
                if err > 1e-6 * s {
                    return Err(ShapeError::InvalidSurface(format!(
                        "{name} disagrees with finite differences at ({u}, {v}) (error {err:e})"
                    )));
                }
            }
        }
        Ok(())
    }

    fn grid_point(&self, i: usize, k: usize, n: usize) -> (f64, f64) {
        (
            self.u.0 + (self.u.1 - self.u.0) * i as f64 / n as f64,
            self.v.0 + (self.v.1 - self.v.0) * k as f64 / n as f64,
        )
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u
    }

    pub fn v_range(&self) -> (f64, f64) {
        self.v
    }

    pub fn is_periodic_v(&self) -> bool {
        self.periodic_v
    }

    pub fn map(&self) -> &Arc<dyn SurfaceMap> {
        &self.map
    }

    pub fn jet(&self, u: f64, v: f64) -> SurfaceJet {
        self.map.jet(u, v)
    }

    pub fn point(&self, u: f64, v: f64) -> Vec3 {
        self.map.point(u, v)
    }

    pub fn wrap_v(&self, v: f64) -> f64 {
        if self.periodic_v {
            self.v.0 + (v - self.v.0).rem_euclid(self.v.1 - self.v.0)
        } else {
            v
        }
    }

    /// Diagonal of the parameter rectangle.
    pub fn param_diameter(&self) -> f64 {
        (self.u.1 - self.u.0).hypot(self.v.1 - self.v.0)
    }

    /// Bounding-box diagonal of a 32 x 32 sample grid.
    pub fn diameter(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for i in 0..=32 {
            for k in 0..=32 {
                let (u, v) = self.grid_point(i, k, 32);
                let p = self.point(u, v);
                lo = lo.inf(&p);
                hi = hi.sup(&p);
            }
        }
        (hi - lo).norm()
    }

    /// |phi_u x phi_v|.
    pub fn first_jet(&self, u: f64, v: f64) -> SurfaceJet {
        self.map.first_jet(u, v)
    }

    pub fn area_element(&self, u: f64, v: f64) -> f64 {
        let j = self.map.first_jet(u, v);
        j.du.cross(&j.dv).norm()
    }

    /// N = phi_u x phi_v / |phi_u x phi_v|.
    pub fn normal(&self, u: f64, v: f64) -> Result<Vec3> {
        normal_from_jet(&self.jet(u, v), u, v)
    }

    fn normal_or_nan(&self, u: f64, v: f64) -> Vec3 {
        self.normal(u, v).unwrap_or_else(|_| Vec3::repeat(f64::NAN))
    }

    /// Trace of the Weingarten map, H = alpha_1 + alpha_4, where
    /// N_u = alpha_1 phi_u + alpha_2 phi_v and N_v = alpha_3 phi_u + alpha_4 phi_v.
    ///
    /// N_u and N_v are central differences with step `h` (default
    /// 1e-5 of the parameter diagonal), projected onto span{phi_u, phi_v}
    /// by least squares.
    pub fn mean_curvature(&self, u: f64, v: f64, h: Option<f64>) -> Result<f64> {
        let h = h.unwrap_or(1e-5 * self.param_diameter());
        let j = self.jet(u, v);
        normal_from_jet(&j, u, v)?;

        let gram = Matrix2::new(j.du.dot(&j.du), j.du.dot(&j.dv), j.du.dot(&j.dv), j.dv.dot(&j.dv));
        let (tr, det) = (gram.trace(), gram.determinant());
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let (lmax, lmin) = (0.5 * tr + disc, 0.5 * tr - disc);
        let cond = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
        if cond > MAX_CONDITION {
            return Err(ShapeError::IllConditioned { cond });
        }

        let iu = Interval::new(self.u.0, self.u.1, false);
        let iv = Interval::new(self.v.0, self.v.1, self.periodic_v);
        let n_u: Vec3 = stencil::first(&|x| self.normal_or_nan(x, v), u, h, &iu);
        let n_v: Vec3 = stencil::first(&|y| self.normal_or_nan(u, y), v, h, &iv);
        if !(n_u.iter().chain(n_v.iter()).all(|x| x.is_finite())) {
            return Err(ShapeError::DegenerateImmersion { u, v, norm: 0.0 });
        }

        let inv = gram
            .try_inverse()
            .ok_or(ShapeError::IllConditioned { cond: f64::INFINITY })?;
        let a12 = inv * Vector2::new(j.du.dot(&n_u), j.dv.dot(&n_u));
        let a34 = inv * Vector2::new(j.du.dot(&n_v), j.dv.dot(&n_v));
        Ok(a12[0] + a34[1])
    }

    /// Tensor-product Gauss–Legendre integral of `density` over the rectangle.
    pub fn integrate<F>(&self, density: F, panels_u: usize, panels_v: usize) -> f64
    where
        F: FnMut(f64, f64) -> f64,
    {
        quadrature::integrate_2d(density, self.u, self.v, (panels_u, panels_v))
    }

    /// Area with the default quadrature.
    pub fn area(&self) -> f64 {
        self.integrate(
            |u, v| self.area_element(u, v),
            DEFAULT_SURFACE_PANELS,
            DEFAULT_SURFACE_PANELS,
        )
    }

    /// Outward unit conormal nu along an edge, tangent to the surface and
    /// orthogonal to the edge. On the u-edges nu = ±phi_v x N / |phi_v|.
    /// `s` is v on u-edges and u on v-edges.
    pub fn outward_normal(&self, side: SurfaceSide, s: f64) -> Result<Vec3> {
        let (u, v) = match side {
            SurfaceSide::UMin => (self.u.0, s),
            SurfaceSide::UMax => (self.u.1, s),
            SurfaceSide::VMin | SurfaceSide::VMax if self.periodic_v => return Err(ShapeError::NoBoundary),
            SurfaceSide::VMin => (s, self.v.0),
            SurfaceSide::VMax => (s, self.v.1),
        };
        let j = self.jet(u, v);
        let n = normal_from_jet(&j, u, v)?;
        Ok(match side {
            SurfaceSide::UMax => j.dv.cross(&n) / j.dv.norm(),
            SurfaceSide::UMin => -j.dv.cross(&n) / j.dv.norm(),
            SurfaceSide::VMax => n.cross(&j.du) / j.du.norm(),
            SurfaceSide::VMin => -n.cross(&j.du) / j.du.norm(),
        })
    }
}

pub(crate) fn normal_from_jet(j: &SurfaceJet, u: f64, v: f64) -> Result<Vec3> {
    let c = j.du.cross(&j.dv);
    let norm = c.norm();
    if !norm.is_finite() || norm < DEGENERATE {
        return Err(ShapeError::DegenerateImmersion { u, v, norm });
    }
    Ok(c / norm)
}
