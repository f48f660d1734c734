use nalgebra::{Matrix2, Vector2};

use super::curve::{CurveEnd, ParamCurve};
use super::surface::{ParamSurface, SurfaceSide};
use super::Vec3;
use crate::error::{Result, ShapeError};

/// A one- or two-dimensional parametric submanifold.
#[derive(Debug, Clone)]
pub enum Manifold {
    Curve(ParamCurve),
    Surface(ParamSurface),
}

/// A parameter value on a [`Manifold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Curve(f64),
    Surface(f64, f64),
}

impl Param {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Param::Curve(t) => vec![t],
            Param::Surface(u, v) => vec![u, v],
        }
    }
}

/// Orthonormal basis of a tangent space (rank 1 or 2).
#[derive(Debug, Clone, Copy)]
pub struct TangentBasis {
    vectors: [Vec3; 2],
    rank: usize,
}

impl TangentBasis {
    pub fn vectors(&self) -> &[Vec3] {
        &self.vectors[..self.rank]
    }

    /// Component of `x` orthogonal to the tangent space.
    pub fn normal_part(&self, x: &Vec3) -> Vec3 {
        self.vectors().iter().fold(*x, |acc, e| acc - e * e.dot(x))
    }
}

impl From<ParamCurve> for Manifold {
    fn from(c: ParamCurve) -> Self {
        Manifold::Curve(c)
    }
}

impl From<ParamSurface> for Manifold {
    fn from(s: ParamSurface) -> Self {
        Manifold::Surface(s)
    }
}

impl Manifold {
    pub fn as_curve(&self) -> Option<&ParamCurve> {
        match self {
            Manifold::Curve(c) => Some(c),
            Manifold::Surface(_) => None,
        }
    }

    pub fn as_surface(&self) -> Option<&ParamSurface> {
        match self {
            Manifold::Surface(s) => Some(s),
            Manifold::Curve(_) => None,
        }
    }

    /// Ambient dimension (2 or 3).
    pub fn ambient_dim(&self) -> usize {
        match self {
            Manifold::Curve(c) => c.dim(),
            Manifold::Surface(_) => 3,
        }
    }

    pub fn point(&self, p: Param) -> Vec3 {
        match (self, p) {
            (Manifold::Curve(c), Param::Curve(t)) => c.point(t),
            (Manifold::Surface(s), Param::Surface(u, v)) => s.point(u, v),
            _ => panic!("parameter kind does not match manifold"),
        }
    }

    pub fn has_boundary(&self) -> bool {
        match self {
            Manifold::Curve(c) => !c.is_closed(),
            Manifold::Surface(_) => true,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Manifold::Curve(c) => c.diameter(),
            Manifold::Surface(s) => s.diameter(),
        }
    }

    /// Orthonormal basis of T_pM (Gram–Schmidt on phi_u, phi_v for surfaces).
    pub fn tangent_basis(&self, p: Param) -> Result<TangentBasis> {
        match (self, p) {
            (Manifold::Curve(c), Param::Curve(t)) => {
                let d1 = c.jet(t).d1;
                let n = d1.norm();
                if !(n > 1e-12) {
                    return Err(ShapeError::DegenerateFrame { t, norm: n });
                }
                Ok(TangentBasis {
                    vectors: [d1 / n, Vec3::zeros()],
                    rank: 1,
                })
            }
            (Manifold::Surface(s), Param::Surface(u, v)) => {
                let j = s.jet(u, v);
                let area = j.du.cross(&j.dv).norm();
                if !(area > 1e-12) {
                    return Err(ShapeError::DegenerateImmersion { u, v, norm: area });
                }
                let e1 = j.du.normalize();
                let e2 = (j.dv - e1 * e1.dot(&j.dv)).normalize();
                Ok(TangentBasis {
                    vectors: [e1, e2],
                    rank: 2,
                })
            }
            _ => Err(ShapeError::InvalidArgument(
                "parameter kind does not match manifold".into(),
            )),
        }
    }

    /// `n` samples per parameter direction. Open directions include both
    /// endpoints; periodic directions skip the duplicated seam.
    pub fn sample_params(&self, n: usize) -> Vec<Param> {
        let n = n.max(2);
        let open = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let periodic = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / n as f64;
        match self {
            Manifold::Curve(c) => {
                let (a, b) = c.domain();
                (0..n)
                    .map(|i| {
                        Param::Curve(if c.is_closed() {
                            periodic(a, b, i)
                        } else {
                            open(a, b, i)
                        })
                    })
                    .collect()
            }
            Manifold::Surface(s) => {
                let (a, b) = s.u_range();
                let (c, d) = s.v_range();
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for k in 0..n {
                        let v = if s.is_periodic_v() {
                            periodic(c, d, k)
                        } else {
                            open(c, d, k)
                        };
                        out.push(Param::Surface(open(a, b, i), v));
                    }
                }
                out
            }
        }
    }

    /// Outward conormal nu if `p` lies on the boundary, `None` in the interior.
    pub fn boundary_normal(&self, p: Param) -> Result<Option<Vec3>> {
        match (self, p) {
            (Manifold::Curve(c), Param::Curve(t)) => {
                if c.is_closed() {
                    return Ok(None);
                }
                let (a, b) = c.domain();
                if t == a {
                    c.outward_normal(CurveEnd::Start).map(Some)
                } else if t == b {
                    c.outward_normal(CurveEnd::End).map(Some)
                } else {
                    Ok(None)
                }
            }
            (Manifold::Surface(s), Param::Surface(u, v)) => {
                let (a, b) = s.u_range();
                let (c, d) = s.v_range();
                let side = if u == a {
                    Some((SurfaceSide::UMin, v))
                } else if u == b {
                    Some((SurfaceSide::UMax, v))
                } else if !s.is_periodic_v() && v == c {
                    Some((SurfaceSide::VMin, u))
                } else if !s.is_periodic_v() && v == d {
                    Some((SurfaceSide::VMax, u))
                } else {
                    None
                };
                side.map(|(side, x)| s.outward_normal(side, x)).transpose()
            }
            _ => Err(ShapeError::InvalidArgument(
                "parameter kind does not match manifold".into(),
            )),
        }
    }

    /// Nearest point of M to `q`: coarse search over `coarse` candidates
    /// (plus the map's hint), then up to 20 Newton (curves) or Gauss–Newton
    /// (surfaces) iterations to tolerance 1e-12.
    ///
    /// With `clamp` the search stays in the parameter domain and measures the
    /// true distance to M; without it the parametrization is extended past
    /// open ends, which keeps the projection smooth near the boundary.
    pub fn closest_param(&self, q: &Vec3, coarse: usize, clamp: bool) -> (Param, f64) {
        self.closest_param_with_tol(q, coarse, clamp, NEWTON_TOL)
    }

    pub(crate) fn closest_param_with_tol(&self, q: &Vec3, coarse: usize, clamp: bool, tol: f64) -> (Param, f64) {
        match self {
            Manifold::Curve(c) => {
                let (t, d) = closest_on_curve(c, q, coarse, clamp, tol);
                (Param::Curve(t), d)
            }
            Manifold::Surface(s) => {
                let (u, v, d) = closest_on_surface(s, q, coarse, clamp, tol);
                (Param::Surface(u, v), d)
            }
        }
    }
}

const NEWTON_ITERS: usize = 20;
const NEWTON_TOL: f64 = 1e-12;

fn closest_on_curve(c: &ParamCurve, q: &Vec3, coarse: usize, clamp: bool, tol: f64) -> (f64, f64) {
    let (a, b) = c.domain();
    let len = b - a;
    let mut best = (f64::NAN, f64::INFINITY);
    let mut consider = |t: f64| {
        let d = (c.point(t) - q).norm_squared();
        if d < best.1 {
            best = (t, d);
        }
    };
    if let Some(t) = c.map().param_hint(q) {
        consider(if clamp { t.clamp(a, b) } else { t });
    }
    if coarse > 0 {
        let n = coarse.max(2);
        for i in 0..n {
            let frac = if c.is_closed() {
                i as f64 / n as f64
            } else {
                i as f64 / (n - 1) as f64
            };
            consider(a + frac * len);
        }
    }
    let mut t = best.0;
    for _ in 0..NEWTON_ITERS {
        let j = c.jet(t);
        let r = j.point - q;
        let g = r.dot(&j.d1);
        let mut h = j.d1.norm_squared() + r.dot(&j.d2);
        if h <= 0.0 {
            h = j.d1.norm_squared();
        }
        let mut next = t - g / h;
        if c.is_closed() {
            next = c.wrap(next);
        } else if clamp {
            next = next.clamp(a, b);
        } else {
            next = next.clamp(a - 0.25 * len, b + 0.25 * len);
        }
        let step = if c.is_closed() {
            // shortest signed distance around the loop
            let d = (next - t).rem_euclid(len);
            d.min(len - d)
        } else {
            (next - t).abs()
        };
        t = next;
        if step <= tol * len.max(1.0) {
            break;
        }
    }
    (t, (c.point(t) - q).norm())
}

fn closest_on_surface(s: &ParamSurface, q: &Vec3, coarse: usize, clamp: bool, tol: f64) -> (f64, f64, f64) {
    let (a, b) = s.u_range();
    let (c, d) = s.v_range();
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    let mut consider = |u: f64, v: f64| {
        let dist = (s.point(u, v) - q).norm_squared();
        if dist < best.2 {
            best = (u, v, dist);
        }
    };
    if let Some((u, v)) = s.map().param_hint(q) {
        consider(if clamp { u.clamp(a, b) } else { u }, s.wrap_v(v));
    }
    if coarse > 0 {
        let n = ((coarse as f64).sqrt().ceil() as usize).max(2);
        for i in 0..n {
            for k in 0..n {
                let u = a + (b - a) * i as f64 / (n - 1) as f64;
                let v = if s.is_periodic_v() {
                    c + (d - c) * k as f64 / n as f64
                } else {
                    c + (d - c) * k as f64 / (n - 1) as f64
                };
                consider(u, v);
            }
        }
    }
    let (mut u, mut v) = (best.0, best.1);
    let span = (b - a).max(d - c).max(1.0);
    for _ in 0..NEWTON_ITERS {
        let j = s.jet(u, v);
        let r = j.point - q;
        let jtj = Matrix2::new(j.du.dot(&j.du), j.du.dot(&j.dv), j.du.dot(&j.dv), j.dv.dot(&j.dv));
        let rhs = -Vector2::new(j.du.dot(&r), j.dv.dot(&r));
        let Some(step) = jtj.try_inverse().map(|m| m * rhs) else {
            break;
        };
        let (mut nu, mut nv) = (u + step[0], v + step[1]);
        if clamp {
            nu = nu.clamp(a, b);
        } else {
            nu = nu.clamp(a - 0.25 * (b - a), b + 0.25 * (b - a));
        }
        if s.is_periodic_v() {
            nv = s.wrap_v(nv);
        } else if clamp {
            nv = nv.clamp(c, d);
        }
        let moved = (nu - u).abs().max(if s.is_periodic_v() {
            let dv = (nv - v).rem_euclid(d - c);
            dv.min(d - c - dv)
        } else {
            (nv - v).abs()
        });
        u = nu;
        v = nv;
        if moved <= tol * span {
            break;
        }
    }
    (u, v, (s.point(u, v) - q).norm())
}
