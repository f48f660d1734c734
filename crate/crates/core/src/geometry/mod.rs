//! Parametric curves and surfaces with boundary, their frames, curvatures,
//! outward conormals, and quadrature.
//!
//! Everything is expressed in R³; planar curves live in the z = 0 plane and
//! carry `dim == 2`, which switches the curve frame to the signed convention
//! N = R T.

mod curve;
mod manifold;
pub mod quadrature;
mod region;
pub(crate) mod stencil;
mod surface;

pub use curve::{CurveEnd, CurveJet, CurveMap, FnCurve, FrenetFrame, ParamCurve};
pub use manifold::{Manifold, Param, TangentBasis};
pub use region::Region;
pub use surface::{FnSurface, ParamSurface, SurfaceJet, SurfaceMap, SurfaceSide};

pub(crate) use curve::curvature_formula;
pub(crate) use surface::normal_from_jet;

use crate::error::Result;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

pub fn curve_frame(curve: &ParamCurve, t: f64) -> Result<FrenetFrame> {
    curve.frame(t)
}

pub fn curve_curvature_derivs(curve: &ParamCurve, t: f64, h: Option<f64>) -> Result<(f64, f64, f64)> {
    curve.curvature_derivs(t, h)
}

pub fn surface_normal(surf: &ParamSurface, u: f64, v: f64) -> Result<Vec3> {
    surf.normal(u, v)
}

pub fn surface_mean_curvature(surf: &ParamSurface, u: f64, v: f64, h: Option<f64>) -> Result<f64> {
    surf.mean_curvature(u, v, h)
}

pub fn integrate_curve<F: FnMut(f64) -> f64>(curve: &ParamCurve, density: F, panels: usize) -> f64 {
    curve.integrate(density, panels)
}

pub fn integrate_surface<F: FnMut(f64, f64) -> f64>(
    surf: &ParamSurface,
    density: F,
    panels_u: usize,
    panels_v: usize,
) -> f64 {
    surf.integrate(density, panels_u, panels_v)
}
