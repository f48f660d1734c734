use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::quadrature::{self, DEFAULT_CURVE_PANELS};
use super::stencil::{self, Interval};
use super::Vec3;
use crate::error::{Result, ShapeError};

/// Position and first two parameter derivatives of a curve at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub point: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
}

/// A parametrization t -> gamma(t) together with its derivatives.
///
/// Maps may be evaluated slightly outside their nominal interval by
/// nearest-point projections; analytic maps should simply extend.
pub trait CurveMap: Send + Sync {
    fn jet(&self, t: f64) -> CurveJet;

    fn point(&self, t: f64) -> Vec3 {
        self.jet(t).point
    }

    /// Point and first derivative only; `d2` may be NaN. Lets expensive maps
    /// skip second-order work where only lengths are needed.
    fn first_jet(&self, t: f64) -> CurveJet {
        self.jet(t)
    }

    /// Cheap initial guess for the parameter of the point nearest to `p`.
    fn param_hint(&self, _p: &Vec3) -> Option<f64> {
        None
    }
}

type VecFn = Arc<dyn Fn(f64) -> Vec3 + Send + Sync>;

/// Curve given by three closures.
#[derive(Clone)]
pub struct FnCurve {
    gamma: VecFn,
    dgamma: VecFn,
    ddgamma: VecFn,
}

impl FnCurve {
    pub fn new<G, D, DD>(gamma: G, dgamma: D, ddgamma: DD) -> Self
    where
        G: Fn(f64) -> Vec3 + Send + Sync + 'static,
        D: Fn(f64) -> Vec3 + Send + Sync + 'static,
        DD: Fn(f64) -> Vec3 + Send + Sync + 'static,
    {
        Self {
            gamma: Arc::new(gamma),
            dgamma: Arc::new(dgamma),
            ddgamma: Arc::new(ddgamma),
        }
    }
}

impl CurveMap for FnCurve {
    fn jet(&self, t: f64) -> CurveJet {
        CurveJet {
            point: (self.gamma)(t),
            d1: (self.dgamma)(t),
            d2: (self.ddgamma)(t),
        }
    }

    fn point(&self, t: f64) -> Vec3 {
        (self.gamma)(t)
    }
}

struct Reversed {
    inner: Arc<dyn CurveMap>,
    sum: f64,
}

impl CurveMap for Reversed {
    fn jet(&self, t: f64) -> CurveJet {
        let j = self.inner.jet(self.sum - t);
        CurveJet {
            point: j.point,
            d1: -j.d1,
            d2: j.d2,
        }
    }

    fn first_jet(&self, t: f64) -> CurveJet {
        let j = self.inner.first_jet(self.sum - t);
        CurveJet {
            point: j.point,
            d1: -j.d1,
            d2: j.d2,
        }
    }

    fn param_hint(&self, p: &Vec3) -> Option<f64> {
        self.inner.param_hint(p).map(|s| self.sum - s)
    }
}

/// Tangent, normal and (for space curves) binormal at a curve point.
///
/// Planar curves use N = R T with R the counter-clockwise quarter turn and a
/// signed curvature; space curves use the Frenet normal T'/|T'| and kappa >= 0.
/// In both cases T' = v kappa N with v the speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame {
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Option<Vec3>,
    pub speed: f64,
    pub curvature: f64,
}

/// Which end of an open curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveEnd {
    Start,
    End,
}

/// Regular embedded C² curve gamma: [a, b] -> R^d, d in {2, 3}.
///
/// Planar curves live in the z = 0 plane of R³.
#[derive(Clone)]
pub struct ParamCurve {
    dim: usize,
    a: f64,
    b: f64,
    closed: bool,
    map: Arc<dyn CurveMap>,
}

impl fmt::Debug for ParamCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamCurve")
            .field("dim", &self.dim)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("closed", &self.closed)
            .finish_non_exhaustive()
    }
}

const REGULARITY_GRID: usize = 1024;
const EMBEDDING_SAMPLES: usize = 512;
const CONSISTENCY_SAMPLES: usize = 32;
const CONSISTENCY_TOL: f64 = 1e-6;
const CLOSURE_TOL: f64 = 1e-12;
const ARC_LENGTH_TOL: f64 = 1e-8;
const DEGENERATE_FRAME: f64 = 1e-12;

impl ParamCurve {
    /// Builds and validates a curve.
    pub fn new<M>(dim: usize, a: f64, b: f64, closed: bool, map: M) -> Result<Self>
    where
        M: CurveMap + 'static,
    {
        let curve = Self::from_arc(dim, a, b, closed, Arc::new(map))?;
        curve.validate()?;
        Ok(curve)
    }

    /// Convenience constructor from gamma, gamma' and gamma''.
    pub fn from_fns<G, D, DD>(
        dim: usize,
        a: f64,
        b: f64,
        closed: bool,
        gamma: G,
        dgamma: D,
        ddgamma: DD,
    ) -> Result<Self>
    where
        G: Fn(f64) -> Vec3 + Send + Sync + 'static,
        D: Fn(f64) -> Vec3 + Send + Sync + 'static,
        DD: Fn(f64) -> Vec3 + Send + Sync + 'static,
    {
        Self::new(dim, a, b, closed, FnCurve::new(gamma, dgamma, ddgamma))
    }

    /// Skips the sampled validation; for images of valid curves under diffeomorphisms.
    pub(crate) fn from_arc(dim: usize, a: f64, b: f64, closed: bool, map: Arc<dyn CurveMap>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(ShapeError::InvalidCurve(format!("dimension {dim} not in {{2, 3}}")));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(ShapeError::InvalidCurve(format!("bad parameter interval [{a}, {b}]")));
        }
        Ok(Self { dim, a, b, closed, map })
    }

    /// Regularity, embedding, closure and derivative-consistency checks.
    pub fn validate(&self) -> Result<()> {
        let len = self.b - self.a;

        for i in 0..=REGULARITY_GRID {
            let t = self.a + len * i as f64 / REGULARITY_GRID as f64;
            let j = self.jet(t);
            if !(j.point.iter().chain(j.d1.iter()).chain(j.d2.iter())).all(|x| x.is_finite()) {
                return Err(ShapeError::InvalidCurve(format!("non-finite jet at t = {t}")));
            }
            if j.d1.norm() <= DEGENERATE_FRAME {
                return Err(ShapeError::InvalidCurve(format!("not regular at t = {t}")));
            }
            if self.dim == 2 && (j.point.z != 0.0 || j.d1.z != 0.0 || j.d2.z != 0.0) {
                return Err(ShapeError::InvalidCurve("planar curve leaves z = 0".into()));
            }
        }

        if self.closed {
            let (s, e) = (self.jet(self.a), self.jet(self.b));
            let scale = 1.0f64.max(s.point.norm());
            let gaps = [
                (s.point - e.point).norm() / scale,
                (s.d1 - e.d1).norm() / 1.0f64.max(s.d1.norm()),
                (s.d2 - e.d2).norm() / 1.0f64.max(s.d2.norm()),
            ];
            if gaps.iter().any(|g| *g > CLOSURE_TOL) {
                return Err(ShapeError::InvalidCurve(format!(
                    "closed curve endpoints do not match: {gaps:?}"
                )));
            }
        }

        self.check_embedding()?;
        self.check_consistency()
    }

    fn check_embedding(&self) -> Result<()> {
        let n = EMBEDDING_SAMPLES;
        let pts: Vec<Vec3> = (0..n)
            .map(|i| {
                let frac = if self.closed {
                    i as f64 / n as f64
                } else {
                    i as f64 / (n - 1) as f64
                };
                self.point(self.a + frac * (self.b - self.a))
            })
            .collect();
        let tol = 1e-9 * self.diameter().max(1e-300);
        for i in 0..n {
            for j in (i + 2)..n {
                if self.closed && i == 0 && j == n - 1 {
                    continue;
                }
                if (pts[i] - pts[j]).norm() <= tol {
                    return Err(ShapeError::InvalidCurve(format!(
                        "self-intersection between samples {i} and {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_consistency(&self) -> Result<()> {
        let len = self.b - self.a;
        let h = 1e-3 * len;
        let mut rng = StdRng::seed_from_u64(0x5eed_c0de);
        let point = |t: f64| self.point(t);
        let d1 = |t: f64| self.jet(t).d1;
        for _ in 0..CONSISTENCY_SAMPLES {
            let t = rng.gen_range((self.a + 4.0 * h)..(self.b - 4.0 * h));
            let j = self.jet(t);
            let fd1: Vec3 = stencil::five_point(&point, t, h);
            let fd2: Vec3 = stencil::five_point(&d1, t, h);
            let e1 = (fd1 - j.d1).norm();
            if e1 > CONSISTENCY_TOL * j.d1.norm() {
                return Err(ShapeError::InvalidCurve(format!(
                    "gamma' disagrees with finite differences at t = {t} (error {e1:e})"
                )));
            }
            let e2 = (fd2 - j.d2).norm();
            if e2 > CONSISTENCY_TOL * j.d2.norm().max(j.d1.norm() / len) {
                return Err(ShapeError::InvalidCurve(format!(
                    "gamma'' disagrees with finite differences at t = {t} (error {e2:e})"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn map(&self) -> &Arc<dyn CurveMap> {
        &self.map
    }

    pub fn jet(&self, t: f64) -> CurveJet {
        self.map.jet(t)
    }

    pub fn point(&self, t: f64) -> Vec3 {
        self.map.point(t)
    }

    pub fn first_jet(&self, t: f64) -> CurveJet {
        self.map.first_jet(t)
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.map.first_jet(t).d1.norm()
    }

    pub(crate) fn interval(&self) -> Interval {
        Interval::new(self.a, self.b, self.closed)
    }

    /// Maps a parameter into [a, b) for closed curves; identity otherwise.
    pub fn wrap(&self, t: f64) -> f64 {
        if self.closed {
            self.a + (t - self.a).rem_euclid(self.b - self.a)
        } else {
            t
        }
    }

    /// Same point set traversed by t -> a + b - t.
    pub fn reversed(&self) -> ParamCurve {
        Self {
            map: Arc::new(Reversed {
                inner: self.map.clone(),
                sum: self.a + self.b,
            }),
            ..self.clone()
        }
    }

    /// Bounding-box diagonal of 256 samples.
    pub fn diameter(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for i in 0..=256 {
            let p = self.point(self.a + (self.b - self.a) * i as f64 / 256.0);
            lo = lo.inf(&p);
            hi = hi.sup(&p);
        }
        (hi - lo).norm()
    }

    /// Tangent, normal, speed and curvature at `t`.
    pub fn frame(&self, t: f64) -> Result<FrenetFrame> {
        frame_from_jet(self.dim, &self.jet(t), t)
    }

    /// Signed (planar) or unsigned (space) curvature at `t`.
    pub fn curvature(&self, t: f64) -> Result<f64> {
        Ok(self.frame(t)?.curvature)
    }

    /// Curvature and its first two arc-length derivatives at `t`.
    ///
    /// Differences of kappa with step `h` (default 1e-4 (b - a)), one
    /// Richardson step, then the chain rule d/ds = v⁻¹ d/dt.
    pub fn curvature_derivs(&self, t: f64, h: Option<f64>) -> Result<(f64, f64, f64)> {
        let h = h.unwrap_or(1e-4 * (self.b - self.a));
        let frame = self.frame(t)?;
        let iv = self.interval();
        let kappa_of = |s: f64| -> f64 {
            let j = self.jet(s);
            curvature_formula(self.dim, &j)
        };
        let k_t: f64 = stencil::richardson(|h| stencil::first(&kappa_of, t, h, &iv), h);
        let k_tt: f64 = stencil::richardson(|h| stencil::second(&kappa_of, t, h, &iv), h);
        let jet = self.jet(t);
        let v = frame.speed;
        let v_t = jet.d1.dot(&jet.d2) / v;
        let k_s = k_t / v;
        let k_ss = (k_tt - k_s * v_t) / (v * v);
        Ok((frame.curvature, k_s, k_ss))
    }

    /// Largest ||gamma'| - 1| over a 1024-interval grid.
    pub fn arc_length_deviation(&self) -> f64 {
        (0..=REGULARITY_GRID)
            .map(|i| {
                let t = self.a + (self.b - self.a) * i as f64 / REGULARITY_GRID as f64;
                (self.speed(t) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Errors with `NotArcLength` unless |gamma'| = 1 to 1e-8 on the grid.
    pub fn require_arc_length(&self) -> Result<()> {
        let deviation = self.arc_length_deviation();
        if deviation > ARC_LENGTH_TOL {
            return Err(ShapeError::NotArcLength { deviation });
        }
        Ok(())
    }

    /// Composite Gauss–Legendre integral of `density` over [a, b].
    pub fn integrate<F>(&self, density: F, panels: usize) -> f64
    where
        F: FnMut(f64) -> f64,
    {
        quadrature::integrate(density, self.a, self.b, panels)
    }

    /// Length with the default quadrature.
    pub fn length(&self) -> f64 {
        self.integrate(|t| self.speed(t), DEFAULT_CURVE_PANELS)
    }

    /// Outward unit normal of M at a boundary point: -T(a) at the start, +T(b) at the end.
    pub fn outward_normal(&self, end: CurveEnd) -> Result<Vec3> {
        if self.closed {
            return Err(ShapeError::NoBoundary);
        }
        Ok(match end {
            CurveEnd::Start => -self.jet(self.a).d1.normalize(),
            CurveEnd::End => self.jet(self.b).d1.normalize(),
        })
    }
}

/// Curvature from a jet without building the frame.
pub(crate) fn curvature_formula(dim: usize, j: &CurveJet) -> f64 {
    let v = j.d1.norm();
    if dim == 2 {
        (j.d1.x * j.d2.y - j.d1.y * j.d2.x) / (v * v * v)
    } else {
        j.d1.cross(&j.d2).norm() / (v * v * v)
    }
}

pub(crate) fn frame_from_jet(dim: usize, j: &CurveJet, t: f64) -> Result<FrenetFrame> {
    let speed = j.d1.norm();
    if speed <= DEGENERATE_FRAME || !speed.is_finite() {
        return Err(ShapeError::DegenerateFrame { t, norm: speed });
    }
    let tangent = j.d1 / speed;
    if dim == 2 {
        let normal = Vec3::new(-tangent.y, tangent.x, 0.0);
        let curvature = (j.d1.x * j.d2.y - j.d1.y * j.d2.x) / (speed * speed * speed);
        return Ok(FrenetFrame {
            tangent,
            normal,
            binormal: None,
            speed,
            curvature,
        });
    }
    // dT/dt = (gamma'' - T (T . gamma'')) / v
    let dt = (j.d2 - tangent * tangent.dot(&j.d2)) / speed;
    let norm = dt.norm();
    if norm < DEGENERATE_FRAME {
        return Err(ShapeError::DegenerateFrame { t, norm });
    }
    let normal = dt / norm;
    Ok(FrenetFrame {
        tangent,
        normal,
        binormal: Some(tangent.cross(&normal)),
        speed,
        curvature: norm / speed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn circle(r: f64) -> ParamCurve {
        ParamCurve::from_fns(
            2,
            0.0,
            TAU,
            true,
            move |t| Vec3::new(r * t.cos(), r * t.sin(), 0.0),
            move |t| Vec3::new(-r * t.sin(), r * t.cos(), 0.0),
            move |t| Vec3::new(-r * t.cos(), -r * t.sin(), 0.0),
        )
        .unwrap()
    }

    fn ellipse(a: f64, b: f64) -> ParamCurve {
        ParamCurve::from_fns(
            2,
            0.0,
            TAU,
            true,
            move |t| Vec3::new(a * t.cos(), b * t.sin(), 0.0),
            move |t| Vec3::new(-a * t.sin(), b * t.cos(), 0.0),
            move |t| Vec3::new(-a * t.cos(), -b * t.sin(), 0.0),
        )
        .unwrap()
    }

    fn helix() -> ParamCurve {
        ParamCurve::from_fns(
            3,
            0.0,
            TAU,
            false,
            |t| Vec3::new(t.cos(), t.sin(), t),
            |t| Vec3::new(-t.sin(), t.cos(), 1.0),
            |t| Vec3::new(-t.cos(), -t.sin(), 0.0),
        )
        .unwrap()
    }

    fn line2() -> ParamCurve {
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
    }

    #[test]
    fn circle_frame_at_zero() {
        let f = circle(1.0).frame(0.0).unwrap();
        assert!((f.tangent - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((f.normal - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((f.curvature - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_frame() {
        let f = line2().frame(0.3).unwrap();
        assert_eq!(f.tangent, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(f.normal, Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(f.curvature, 0.0);
    }

    #[test]
    fn helix_curvature_is_one_half() {
        // |gamma' x gamma''| / |gamma'|^3 = sqrt(2) / 2^(3/2) = 1/2
        let h = helix();
        for i in 0..16 {
            let t = 0.1 + 0.37 * i as f64;
            let f = h.frame(t).unwrap();
            assert!((f.curvature - 0.5).abs() < 1e-14);
            let b = f.binormal.unwrap();
            assert!((b - f.tangent.cross(&f.normal)).norm() < 1e-14);
            assert!(f.tangent.dot(&f.normal).abs() < 1e-14);
        }
    }

    #[test]
    fn straight_space_line_is_degenerate() {
        let l = ParamCurve::from_fns(
            3,
            0.0,
            1.0,
            false,
            |t| Vec3::new(t, t, t),
            |_| Vec3::new(1.0, 1.0, 1.0),
            |_| Vec3::zeros(),
        )
        .unwrap();
        assert!(matches!(l.frame(0.5), Err(ShapeError::DegenerateFrame { .. })));
    }

    #[test]
    fn curvature_derivs_circle_and_ellipse() {
        let (k, k1, k2) = circle(2.0).curvature_derivs(1.0, None).unwrap();
        assert!((k - 0.5).abs() < 1e-14);
        assert!(k1.abs() < 1e-8 && k2.abs() < 1e-6);

        // kappa = (x'y'' - y'x'')/|gamma'|^3 = ab / (a^2 sin^2 + b^2 cos^2)^(3/2) = 2 / 1 at t = 0
        let e = ellipse(2.0, 1.0);
        let (k, _, _) = e.curvature_derivs(0.0, None).unwrap();
        assert!((k - 2.0).abs() < 1e-14, "{k}");
        // at t = pi/2: ab / a^3 = 2 / 8
        assert!((e.curvature(PI / 2.0).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn curvature_derivs_ellipse_against_closed_form() {
        // kappa(t) = ab / w^(3/2), w = a^2 sin^2 t + b^2 cos^2 t; ds/dt = sqrt(w).
        let (a, b) = (2.0f64, 1.0f64);
        let kappa = |t: f64| {
            let w = a * a * t.sin().powi(2) + b * b * t.cos().powi(2);
            a * b / w.powf(1.5)
        };
        let speed = |t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
        // oracle: nested five-point differences in t, then chain rule
        let h = 1e-3;
        let ks = |t: f64| stencil::five_point(&kappa, t, h) / speed(t);
        let t = 0.7;
        let want1 = ks(t);
        let want2 = stencil::five_point(&ks, t, h) / speed(t);
        let (_, k1, k2) = ellipse(a, b).curvature_derivs(t, None).unwrap();
        assert!((k1 - want1).abs() < 1e-6 * want1.abs().max(1.0), "{k1} vs {want1}");
        assert!((k2 - want2).abs() < 1e-5 * want2.abs().max(1.0), "{k2} vs {want2}");
    }

    #[test]
    fn open_curve_derivs_use_one_sided_stencils_at_ends() {
        // arc of radius 1 in arc length; kappa == 1 everywhere
        let arc = ParamCurve::from_fns(
            2,
            0.0,
            1.0,
            false,
            |t| Vec3::new(t.cos(), t.sin(), 0.0),
            |t| Vec3::new(-t.sin(), t.cos(), 0.0),
            |t| Vec3::new(-t.cos(), -t.sin(), 0.0),
        )
        .unwrap();
        for t in [0.0, 1.0] {
            let (k, k1, k2) = arc.curvature_derivs(t, None).unwrap();
            assert!((k - 1.0).abs() < 1e-14);
            assert!(k1.abs() < 1e-7 && k2.abs() < 1e-3, "{k1} {k2}");
        }
    }

    #[test]
    fn integrals() {
        let c = circle(1.0);
        assert!((c.integrate(|t| c.speed(t), 64) - TAU).abs() < 1e-10);
        // kappa^2 ds on radius 2: (1/4)(4 pi) = pi
        let c2 = circle(2.0);
        let e = c2.integrate(|t| c2.curvature(t).unwrap().powi(2) * c2.speed(t), 64);
        assert!((e - PI).abs() < 1e-10);
    }

    #[test]
    fn reversal_preserves_length() {
        let e = ellipse(2.0, 1.0);
        assert!((e.length() - e.reversed().length()).abs() < 1e-10);
    }

    #[test]
    fn outward_normals_of_segment() {
        let s = line2();
        assert_eq!(s.outward_normal(CurveEnd::End).unwrap(), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(s.outward_normal(CurveEnd::Start).unwrap(), Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(circle(1.0).outward_normal(CurveEnd::End), Err(ShapeError::NoBoundary));
    }

    #[test]
    fn inconsistent_derivative_is_rejected() {
        let bad = ParamCurve::from_fns(
            2,
            0.0,
            1.0,
            false,
            |t| Vec3::new(t, t * t, 0.0),
            |_| Vec3::new(1.0, 0.0, 0.0),
            |_| Vec3::zeros(),
        );
        assert!(matches!(bad, Err(ShapeError::InvalidCurve(_))));
    }

    #[test]
    fn self_intersection_is_rejected() {
        // figure eight crosses itself at the origin
        let eight = ParamCurve::from_fns(
            2,
            0.0,
            TAU,
            true,
            |t| Vec3::new(t.sin(), (2.0 * t).sin() / 2.0, 0.0),
            |t| Vec3::new(t.cos(), (2.0 * t).cos(), 0.0),
            |t| Vec3::new(-t.sin(), -2.0 * (2.0 * t).sin(), 0.0),
        );
        assert!(matches!(eight, Err(ShapeError::InvalidCurve(_))));
    }

    #[test]
    fn open_closed_mismatch_is_rejected() {
        let not_closed = ParamCurve::from_fns(
            2,
            0.0,
            3.0,
            true,
            |t| Vec3::new(t.cos(), t.sin(), 0.0),
            |t| Vec3::new(-t.sin(), t.cos(), 0.0),
            |t| Vec3::new(-t.cos(), -t.sin(), 0.0),
        );
        assert!(matches!(not_closed, Err(ShapeError::InvalidCurve(_))));
    }

    #[test]
    fn arc_length_detection() {
        assert!(circle(1.0).require_arc_length().is_ok());
        assert!(matches!(
            ellipse(2.0, 1.0).require_arc_length(),
            Err(ShapeError::NotArcLength { .. })
        ));
    }
}
