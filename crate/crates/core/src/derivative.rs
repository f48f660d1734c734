//! Finite-difference oracle for the Eulerian semi-derivative
//! dJ(M)(X) = lim_{t↘0} (J(Φ_t M) - J(M)) / t, and comparison reports.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShapeError};
use crate::fields::AmbientField;
use crate::flow::{flow_manifold, FlowConfig};
use crate::functionals::ShapeFunctional;
use crate::geometry::Manifold;

fn default_t0() -> f64 {
    1e-2
}

fn default_levels() -> usize {
    5
}

fn default_true() -> bool {
    true
}

fn default_fd_flow() -> FlowConfig {
    FlowConfig {
        t_final: default_t0(),
        n_steps: 4,
        method: Default::default(),
    }
}

/// One-sided difference schedule t_i = t0 / 2^i, i < levels. Each flow
/// Φ_{t_i} uses `flow.n_steps` RK4 steps (its `t_final` is replaced by t_i),
/// so the integrator error is a smooth function of t that extrapolation
/// removes together with the truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdConfig {
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_true")]
    pub richardson: bool,
    #[serde(default = "default_fd_flow")]
    pub flow: FlowConfig,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            t0: default_t0(),
            levels: default_levels(),
            richardson: true,
            flow: default_fd_flow(),
        }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(ShapeError::InvalidArgument(format!(
                "t0 must be positive, got {}",
                self.t0
            )));
        }
        if self.levels < 2 {
            return Err(ShapeError::InvalidArgument("levels must be at least 2".into()));
        }
        if self.flow.n_steps == 0 {
            return Err(ShapeError::InvalidArgument("flow.n_steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> Vec<f64> {
        (0..self.levels).map(|i| self.t0 / 2f64.powi(i as i32)).collect()
    }
}

/// q(t) and the diagonal extrapolant available after that level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdSample {
    pub t: f64,
    pub quotient: f64,
    pub extrapolant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub base_value: f64,
    pub series: Vec<FdSample>,
}

/// Richardson tableau for q(t) = q0 + c1 t + c2 t² + ... on a halving schedule.
/// Returns the diagonal R[i][i].
pub fn richardson_diagonal(quotients: &[f64]) -> Vec<f64> {
    let n = quotients.len();
    let mut prev: Vec<f64> = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for (i, &q) in quotients.iter().enumerate() {
        let mut row = Vec::with_capacity(i + 1);
        row.push(q);
        for k in 1..=i {
            let factor = (1u64 << k) as f64 - 1.0;
            let r = row[k - 1] + (row[k - 1] - prev[k - 1]) / factor;
            row.push(r);
        }
        diag.push(row[i]);
        prev = row;
    }
    diag
}

/// Estimate of roundoff in the quotients: relative evaluation error of J
/// amplified by 1/t and by the extrapolation weights.
fn roundoff_floor(base: f64, t_min: f64) -> f64 {
    64.0 * f64::EPSILON * (1.0 + base.abs()) / t_min
}

pub fn eulerian_fd(j: &ShapeFunctional, m: &Manifold, x: &AmbientField, cfg: &FdConfig) -> Result<FdEstimate> {
    cfg.validate()?;
    j.check_field(x)?;
    let j = &j.resolved_for(m, x);
    let base = j.evaluate(m)?;
    let steps = cfg.steps();
    let mut quotients = Vec::with_capacity(steps.len());
    for &t in &steps {
        let moved = flow_manifold(x, m, &cfg.flow.with_t_final(t))?;
        let q = (j.evaluate(&moved)? - base) / t;
        if !q.is_finite() {
            return Err(ShapeError::NonFinite(format!("difference quotient at t = {t}")));
        }
        quotients.push(q);
    }
    let extrapolants = if cfg.richardson {
        richardson_diagonal(&quotients)
    } else {
        quotients.clone()
    };
    let n = extrapolants.len();
    let value = extrapolants[n - 1];
    let floor = roundoff_floor(base, steps[n - 1]);
    let last = (extrapolants[n - 1] - extrapolants[n - 2]).abs();
    if n >= 3 {
        let before = (extrapolants[n - 2] - extrapolants[n - 3]).abs();
        let noise = 1e3 * floor + 1e-8 * value.abs();
        if last > 2.0 * before && last > noise {
            return Err(ShapeError::NoConvergence(format!(
                "extrapolants diverge: successive differences {before:e} then {last:e}"
            )));
        }
    }
    let series = steps
        .iter()
        .zip(&quotients)
        .zip(&extrapolants)
        .map(|((&t, &q), &e)| FdSample {
            t,
            quotient: q,
            extrapolant: e,
        })
        .collect();
    Ok(FdEstimate {
        value,
        error_estimate: last + floor,
        base_value: base,
        series,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rel: 1e-5, abs: 1e-8 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel > 0.0 && self.abs > 0.0) || !(self.rel.is_finite() && self.abs.is_finite()) {
            return Err(ShapeError::InvalidArgument(format!(
                "tolerances must be positive, got rel {} abs {}",
                self.rel, self.abs
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub functional: String,
    pub manifold: String,
    pub field: String,
    #[serde(deserialize_with = "crate::report::nan_if_null")]
    pub fd_value: f64,
    #[serde(deserialize_with = "crate::report::nan_if_null")]
    pub fd_error_estimate: f64,
    pub analytic_value: Option<f64>,
    #[serde(deserialize_with = "crate::report::nan_if_null")]
    pub abs_diff: f64,
    #[serde(deserialize_with = "crate::report::nan_if_null")]
    pub rel_diff: f64,
    pub verdict: Verdict,
}

impl DerivativeReport {
    /// Fills differences and the verdict: pass iff rel_diff <= rel or
    /// abs_diff <= abs. Without an analytic value the report fails.
    pub fn new(
        functional: impl Into<String>,
        manifold: impl Into<String>,
        field: impl Into<String>,
        fd: &FdEstimate,
        analytic: Option<f64>,
        tol: &Tolerances,
    ) -> Self {
        let (abs_diff, rel_diff) = match analytic {
            Some(a) => {
                let d = (fd.value - a).abs();
                let rel = if d == 0.0 { 0.0 } else { d / a.abs() };
                (d, rel)
            }
            None => (f64::NAN, f64::NAN),
        };
        let pass = analytic.is_some() && (rel_diff <= tol.rel || abs_diff <= tol.abs);
        Self {
            functional: functional.into(),
            manifold: manifold.into(),
            field: field.into(),
            fd_value: fd.value,
            fd_error_estimate: fd.error_estimate,
            analytic_value: analytic,
            abs_diff,
            rel_diff,
            verdict: Verdict::from_bool(pass),
        }
    }
}

/// A report together with the difference-quotient series behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub report: DerivativeReport,
    pub series: Vec<FdSample>,
}

pub fn compare(
    j: &ShapeFunctional,
    m: &Manifold,
    x: &AmbientField,
    cfg: &FdConfig,
    tol: &Tolerances,
) -> Result<Comparison> {
    tol.validate()?;
    let analytic = j.analytic_derivative(m, x)?;
    let fd = eulerian_fd(j, m, x, cfg)?;
    Ok(Comparison {
        report: DerivativeReport::new(j.name(), describe(m), x.label(), &fd, Some(analytic), tol),
        series: fd.series,
    })
}

/// Short structural description used when no catalog id is available.
pub fn describe(m: &Manifold) -> String {
    match m {
        Manifold::Curve(c) => {
            let (a, b) = c.domain();
            let kind = if c.is_closed() { "closed" } else { "open" };
            format!("curve{}d[{kind}, {a}..{b}]", c.dim())
        }
        Manifold::Surface(s) => {
            let (a, b) = s.u_range();
            let (c, d) = s.v_range();
            let kind = if s.is_periodic_v() { "periodic" } else { "patch" };
            format!("surface[{kind}, {a}..{b} x {c}..{d}]")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FnSurface, ParamCurve, ParamSurface, Vec3};
    use std::f64::consts::{PI, TAU};

    fn circle(r: f64) -> Manifold {
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
        .into()
    }

    fn cylinder() -> Manifold {
        ParamSurface::periodic(
            (0.0, 2.0),
            (0.0, TAU),
            FnSurface::new(
                |u, v| Vec3::new(v.cos(), v.sin(), u),
                |_, _| Vec3::z(),
                |_, v| Vec3::new(-v.sin(), v.cos(), 0.0),
                |_, v| Vec3::new(-v.cos(), -v.sin(), 0.0),
            ),
        )
        .unwrap()
        .into()
    }

    #[test]
    fn richardson_is_exact_on_polynomials() {
        let f = |t: f64| 3.0 + 2.0 * t - 5.0 * t * t + 0.5 * t * t * t;
        let qs: Vec<f64> = (0..4).map(|i| f(0.1 / 2f64.powi(i))).collect();
        let d = richardson_diagonal(&qs);
        assert!((d[3] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn circle_radial_length() {
        let fd = eulerian_fd(
            &ShapeFunctional::length(),
            &circle(1.0),
            &AmbientField::radial(2),
            &FdConfig::default(),
        )
        .unwrap();
        assert!((fd.value - TAU).abs() < 1e-6);
        assert!((fd.value - TAU).abs() <= 10.0 * fd.error_estimate);
        assert_eq!(fd.series.len(), 5);
        assert!((fd.series[0].quotient - TAU).abs() < 1e-8);
    }

    #[test]
    fn rotation_is_free() {
        let fd = eulerian_fd(
            &ShapeFunctional::length(),
            &circle(1.0),
            &AmbientField::rotation(2, Vec3::z()),
            &FdConfig::default(),
        )
        .unwrap();
        assert!(fd.value.abs() < 1e-8);
    }

    #[test]
    fn elastic_circle() {
        let fd = eulerian_fd(
            &ShapeFunctional::elastic(),
            &circle(2.0),
            &AmbientField::radial(2),
            &FdConfig::default(),
        )
        .unwrap();
        assert!((fd.value + PI / 2.0).abs() < 1e-5 * PI / 2.0, "{}", fd.value);
    }

    #[test]
    fn comparison_verdicts() {
        let cmp = compare(
            &ShapeFunctional::area(),
            &cylinder(),
            &AmbientField::constant(3, Vec3::z()),
            &FdConfig::default(),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(cmp.report.verdict.is_pass());
        assert!(cmp.report.fd_value.abs() < 1e-8);

        let fd = FdEstimate {
            value: TAU,
            error_estimate: 0.0,
            base_value: TAU,
            series: vec![],
        };
        let ok = DerivativeReport::new("l", "m", "x", &fd, Some(TAU), &Tolerances::default());
        assert!(ok.verdict.is_pass());
        let bad = DerivativeReport::new("l", "m", "x", &fd, Some(TAU + 1e-3), &Tolerances::default());
        assert_eq!(bad.verdict, Verdict::Fail);
    }

    #[test]
    fn config_validation() {
        assert!(FdConfig {
            levels: 1,
            ..FdConfig::default()
        }
        .validate()
        .is_err());
        assert!(FdConfig {
            t0: -1.0,
            ..FdConfig::default()
        }
        .validate()
        .is_err());
        assert!(Tolerances { rel: -1.0, abs: 1e-8 }.validate().is_err());
    }

    #[test]
    fn step_doubling_invariance() {
        let m = circle(1.0);
        let x = AmbientField::radial(2).add(&AmbientField::rotation(2, Vec3::z()).scale(0.3));
        let j = ShapeFunctional::length();
        let a = eulerian_fd(&j, &m, &x, &FdConfig::default()).unwrap();
        let mut cfg = FdConfig::default();
        cfg.flow.n_steps *= 2;
        let b = eulerian_fd(&j, &m, &x, &cfg).unwrap();
        assert!((a.value - b.value).abs() < 1e-8);
    }
}
