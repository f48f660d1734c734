//! Fixed-step RK4 flow Φ_t of an ambient field, transport of parametrized
//! manifolds (with first and second derivative jets) and invariance residuals.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShapeError};
use crate::fields::AmbientField;
use crate::geometry::{CurveJet, CurveMap, Manifold, ParamCurve, ParamSurface, SurfaceJet, SurfaceMap, Vec3};

/// Largest step used by [`FlowConfig::with_default_steps`].
pub const DEFAULT_MAX_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMethod {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub t_final: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub method: FlowMethod,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self::with_default_steps(0.5)
    }
}

impl FlowConfig {
    pub fn new(t_final: f64, n_steps: usize) -> Result<Self> {
        let cfg = Self {
            t_final,
            n_steps,
            method: FlowMethod::Rk4,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Step count so that |t_final| / n_steps <= 0.01.
    pub fn with_default_steps(t_final: f64) -> Self {
        let n = (t_final.abs() / DEFAULT_MAX_STEP).ceil().max(1.0) as usize;
        Self {
            t_final,
            n_steps: n,
            method: FlowMethod::Rk4,
        }
    }

    pub fn with_t_final(self, t_final: f64) -> Self {
        Self { t_final, ..self }
    }

    pub fn step(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(ShapeError::InvalidArgument("n_steps must be at least 1".into()));
        }
        if !self.t_final.is_finite() {
            return Err(ShapeError::NonFinite(format!("t_final = {}", self.t_final)));
        }
        Ok(())
    }
}

fn rk4<const N: usize, F>(f: F, mut y: [Vec3; N], h: f64, n: usize) -> [Vec3; N]
where
    F: Fn(&[Vec3; N]) -> [Vec3; N],
{
    let axpy = |y: &[Vec3; N], k: &[Vec3; N], a: f64| -> [Vec3; N] { std::array::from_fn(|i| y[i] + k[i] * a) };
    for _ in 0..n {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, &k1, 0.5 * h));
        let k3 = f(&axpy(&y, &k2, 0.5 * h));
        let k4 = f(&axpy(&y, &k3, h));
        for i in 0..N {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    y
}

fn finite(v: &[Vec3]) -> bool {
    v.iter().all(|x| x.iter().all(|c| c.is_finite()))
}

fn integrate<const N: usize, F>(f: F, y0: [Vec3; N], cfg: &FlowConfig) -> [Vec3; N]
where
    F: Fn(&[Vec3; N]) -> [Vec3; N],
{
    if cfg.t_final == 0.0 {
        return y0;
    }
    rk4(f, y0, cfg.step(), cfg.n_steps)
}

/// RK4 approximation of Φ_{t_final}(x0).
pub fn flow_point(x: &AmbientField, x0: &Vec3, cfg: &FlowConfig) -> Result<Vec3> {
    cfg.validate()?;
    if !finite(&[*x0]) {
        return Err(ShapeError::NonFinite(format!("start point {x0:?}")));
    }
    let [y] = integrate(|s: &[Vec3; 1]| [x.value(&s[0])], [*x0], cfg);
    if !finite(&[y]) {
        return Err(ShapeError::NonFinite(format!(
            "trajectory from {x0:?} left numeric range"
        )));
    }
    Ok(y)
}

/// Flows a curve jet: point, tangent via dX and second derivative via
/// dX w2 + d²X[w, w].
pub fn flow_curve_jet(x: &AmbientField, jet: &CurveJet, cfg: &FlowConfig) -> CurveJet {
    let rhs = |s: &[Vec3; 3]| {
        let (v, dx) = x.value_and_jacobian(&s[0]);
        [v, dx * s[1], dx * s[2] + x.second(&s[0], &s[1])]
    };
    let [point, d1, d2] = integrate(rhs, [jet.point, jet.d1, jet.d2], cfg);
    CurveJet { point, d1, d2 }
}

pub fn flow_surface_jet(x: &AmbientField, jet: &SurfaceJet, cfg: &FlowConfig) -> SurfaceJet {
    let rhs = |s: &[Vec3; 4]| {
        let (v, dx) = x.value_and_jacobian(&s[0]);
        [v, dx * s[1], dx * s[2], dx * s[3] + x.second(&s[0], &s[2])]
    };
    let [point, du, dv, dvv] = integrate(rhs, [jet.point, jet.du, jet.dv, jet.dvv], cfg);
    SurfaceJet { point, du, dv, dvv }
}

/// Flows point and tangent only.
pub fn flow_curve_first_jet(x: &AmbientField, jet: &CurveJet, cfg: &FlowConfig) -> CurveJet {
    let rhs = |s: &[Vec3; 2]| {
        let (v, dx) = x.value_and_jacobian(&s[0]);
        [v, dx * s[1]]
    };
    let [point, d1] = integrate(rhs, [jet.point, jet.d1], cfg);
    CurveJet {
        point,
        d1,
        d2: Vec3::repeat(f64::NAN),
    }
}

pub fn flow_surface_first_jet(x: &AmbientField, jet: &SurfaceJet, cfg: &FlowConfig) -> SurfaceJet {
    let rhs = |s: &[Vec3; 3]| {
        let (v, dx) = x.value_and_jacobian(&s[0]);
        [v, dx * s[1], dx * s[2]]
    };
    let [point, du, dv] = integrate(rhs, [jet.point, jet.du, jet.dv], cfg);
    SurfaceJet {
        point,
        du,
        dv,
        dvv: Vec3::repeat(f64::NAN),
    }
}

/// Φ_t ∘ γ. Jets are transported on demand.
struct FlowedCurve {
    base: Arc<dyn CurveMap>,
    field: AmbientField,
    cfg: FlowConfig,
}

impl CurveMap for FlowedCurve {
    fn jet(&self, t: f64) -> CurveJet {
        flow_curve_jet(&self.field, &self.base.jet(t), &self.cfg)
    }

    fn first_jet(&self, t: f64) -> CurveJet {
        flow_curve_first_jet(&self.field, &self.base.first_jet(t), &self.cfg)
    }

    fn point(&self, t: f64) -> Vec3 {
        let p = self.base.point(t);
        let [y] = integrate(|s: &[Vec3; 1]| [self.field.value(&s[0])], [p], &self.cfg);
        y
    }
}

struct FlowedSurface {
    base: Arc<dyn SurfaceMap>,
    field: AmbientField,
    cfg: FlowConfig,
}

impl SurfaceMap for FlowedSurface {
    fn jet(&self, u: f64, v: f64) -> SurfaceJet {
        flow_surface_jet(&self.field, &self.base.jet(u, v), &self.cfg)
    }

    fn first_jet(&self, u: f64, v: f64) -> SurfaceJet {
        flow_surface_first_jet(&self.field, &self.base.first_jet(u, v), &self.cfg)
    }

    fn point(&self, u: f64, v: f64) -> Vec3 {
        let p = self.base.point(u, v);
        let [y] = integrate(|s: &[Vec3; 1]| [self.field.value(&s[0])], [p], &self.cfg);
        y
    }
}

/// The transported manifold Φ_t(M), parametrized by Φ_t ∘ γ (resp. Φ_t ∘ φ).
///
/// A coarse sample of trajectories is checked for finiteness up front;
/// evaluation is lazy afterwards.
pub fn flow_manifold(x: &AmbientField, m: &Manifold, cfg: &FlowConfig) -> Result<Manifold> {
    cfg.validate()?;
    for p in m.sample_params(8) {
        flow_point(x, &m.point(p), cfg)?;
    }
    Ok(match m {
        Manifold::Curve(c) => {
            let (a, b) = c.domain();
            let map = FlowedCurve {
                base: c.map().clone(),
                field: x.clone(),
                cfg: *cfg,
            };
            Manifold::Curve(ParamCurve::from_arc(c.dim(), a, b, c.is_closed(), Arc::new(map))?)
        }
        Manifold::Surface(s) => {
            let map = FlowedSurface {
                base: s.map().clone(),
                field: x.clone(),
                cfg: *cfg,
            };
            Manifold::Surface(ParamSurface::from_arc(
                s.u_range(),
                s.v_range(),
                s.is_periodic_v(),
                Arc::new(map),
            )?)
        }
    })
}

/// Candidates used for the coarse stage of the nearest-point search.
pub const INVARIANCE_CANDIDATES: usize = 1024;

/// max over sample points p of dist(Φ_t(p), M).
pub fn invariance_residual(x: &AmbientField, m: &Manifold, cfg: &FlowConfig, n_samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in m.sample_params(n_samples) {
        let q = flow_point(x, &m.point(p), cfg)?;
        let (_, d) = m.closest_param(&q, INVARIANCE_CANDIDATES, true);
        if !d.is_finite() {
            return Err(ShapeError::NonFinite(format!("distance from {q:?} to manifold")));
        }
        worst = worst.max(d);
    }
    Ok(worst)
}
