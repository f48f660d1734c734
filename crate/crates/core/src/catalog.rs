//! Named, serializable descriptors for shapes, fields and functionals.
//!
//! Curves are built in arc-length form where that is cheap (circle, arc,
//! segment, helix) so the elastic energy applies to them directly.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShapeError};
use crate::fields::{bump_field, AmbientField, ScalarField};
use crate::functionals::{crack_functional, ShapeFunctional};
use crate::geometry::{
    CurveJet, CurveMap, Manifold, Mat3, ParamCurve, ParamSurface, Region, SurfaceJet, SurfaceMap, Vec3,
};

fn origin2() -> Vec<f64> {
    vec![0.0, 0.0]
}

fn e3() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeDesc {
    /// Arc-length circle, counter-clockwise, in the plane.
    Circle {
        radius: f64,
        #[serde(default = "origin2")]
        center: Vec<f64>,
    },
    /// Straight segment from p0 to p1; planar if both points have two coordinates.
    Segment { p0: Vec<f64>, p1: Vec<f64> },
    /// Arc-length circular arc between two polar angles (radians).
    Arc {
        radius: f64,
        angle0: f64,
        angle1: f64,
        #[serde(default = "origin2")]
        center: Vec<f64>,
    },
    /// (a cos t, b sin t); not arc-length.
    Ellipse { a: f64, b: f64 },
    /// Arc-length helix around the z-axis starting at (r, 0, 0).
    Helix { radius: f64, pitch: f64, turns: f64 },
    /// Lateral surface (r cos v, r sin v, u), u in [0, h].
    Cylinder { radius: f64, height: f64 },
}

fn point(v: &[f64], what: &str) -> Result<(Vec3, usize)> {
    match v {
        [x, y] => Ok((Vec3::new(*x, *y, 0.0), 2)),
        [x, y, z] => Ok((Vec3::new(*x, *y, *z), 3)),
        _ => Err(ShapeError::InvalidArgument(format!(
            "{what} needs 2 or 3 coordinates, got {}",
            v.len()
        ))),
    }
}

fn planar(v: &[f64], what: &str) -> Result<Vec3> {
    match point(v, what)? {
        (p, 2) => Ok(p),
        _ => Err(ShapeError::InvalidArgument(format!("{what} must be planar"))),
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ShapeError::InvalidArgument(format!("{what} must be positive, got {v}")))
    }
}

/// Arc-length circle map s -> c + r (cos(s/r), sin(s/r)).
struct CircleMap {
    center: Vec3,
    radius: f64,
}

impl CurveMap for CircleMap {
    fn jet(&self, s: f64) -> CurveJet {
        let (r, th) = (self.radius, s / self.radius);
        let (sn, cs) = th.sin_cos();
        CurveJet {
            point: self.center + Vec3::new(r * cs, r * sn, 0.0),
            d1: Vec3::new(-sn, cs, 0.0),
            d2: Vec3::new(-cs / r, -sn / r, 0.0),
        }
    }

    fn param_hint(&self, p: &Vec3) -> Option<f64> {
        let q = p - self.center;
        (q.x != 0.0 || q.y != 0.0).then(|| q.y.atan2(q.x).rem_euclid(TAU) * self.radius)
    }
}

struct SegmentMap {
    p0: Vec3,
    dir: Vec3,
}

impl CurveMap for SegmentMap {
    fn jet(&self, s: f64) -> CurveJet {
        CurveJet {
            point: self.p0 + self.dir * s,
            d1: self.dir,
            d2: Vec3::zeros(),
        }
    }

    fn param_hint(&self, p: &Vec3) -> Option<f64> {
        Some((p - self.p0).dot(&self.dir))
    }
}

struct EllipseMap {
    a: f64,
    b: f64,
}

impl CurveMap for EllipseMap {
    fn jet(&self, t: f64) -> CurveJet {
        let (sn, cs) = t.sin_cos();
        CurveJet {
            point: Vec3::new(self.a * cs, self.b * sn, 0.0),
            d1: Vec3::new(-self.a * sn, self.b * cs, 0.0),
            d2: Vec3::new(-self.a * cs, -self.b * sn, 0.0),
        }
    }

    fn param_hint(&self, p: &Vec3) -> Option<f64> {
        Some((p.y / self.b).atan2(p.x / self.a).rem_euclid(TAU))
    }
}

/// Arc-length helix; `c` is the speed of the angular parametrization.
struct HelixMap {
    radius: f64,
    rise: f64,
    c: f64,
}

impl CurveMap for HelixMap {
    fn jet(&self, s: f64) -> CurveJet {
        let (r, c, th) = (self.radius, self.c, s / self.c);
        let (sn, cs) = th.sin_cos();
        CurveJet {
            point: Vec3::new(r * cs, r * sn, self.rise * th),
            d1: Vec3::new(-r * sn / c, r * cs / c, self.rise / c),
            d2: Vec3::new(-r * cs / (c * c), -r * sn / (c * c), 0.0),
        }
    }

    fn param_hint(&self, p: &Vec3) -> Option<f64> {
        // the turn is fixed by the height, the angle by (x, y)
        let th0 = if self.rise != 0.0 { p.z / self.rise } else { 0.0 };
        let phase = p.y.atan2(p.x);
        let k = ((th0 - phase) / TAU).round();
        Some((phase + k * TAU) * self.c)
    }
}

struct CylinderMap {
    radius: f64,
}

impl SurfaceMap for CylinderMap {
    fn jet(&self, u: f64, v: f64) -> SurfaceJet {
        let r = self.radius;
        let (sn, cs) = v.sin_cos();
        SurfaceJet {
            point: Vec3::new(r * cs, r * sn, u),
            du: Vec3::z(),
            dv: Vec3::new(-r * sn, r * cs, 0.0),
            dvv: Vec3::new(-r * cs, -r * sn, 0.0),
        }
    }

    fn param_hint(&self, p: &Vec3) -> Option<(f64, f64)> {
        Some((p.z, p.y.atan2(p.x).rem_euclid(TAU)))
    }
}

impl ShapeDesc {
    pub fn build(&self) -> Result<Manifold> {
        let m: Manifold = match self {
            ShapeDesc::Circle { radius, center } => {
                positive(*radius, "circle radius")?;
                let center = planar(center, "circle center")?;
                ParamCurve::new(
                    2,
                    0.0,
                    TAU * radius,
                    true,
                    CircleMap {
                        center,
                        radius: *radius,
                    },
                )?
                .into()
            }
            ShapeDesc::Segment { p0, p1 } => {
                let (a, da) = point(p0, "segment p0")?;
                let (b, db) = point(p1, "segment p1")?;
                let len = (b - a).norm();
                positive(len, "segment length")?;
                let dim = da.max(db);
                ParamCurve::new(
                    dim,
                    0.0,
                    len,
                    false,
                    SegmentMap {
                        p0: a,
                        dir: (b - a) / len,
                    },
                )?
                .into()
            }
            ShapeDesc::Arc {
                radius,
                angle0,
                angle1,
                center,
            } => {
                positive(*radius, "arc radius")?;
                positive(angle1 - angle0, "arc angle1 - angle0")?;
                if angle1 - angle0 >= TAU {
                    return Err(ShapeError::InvalidArgument(
                        "an arc must span less than a full turn".into(),
                    ));
                }
                let center = planar(center, "arc center")?;
                ParamCurve::new(
                    2,
                    radius * angle0,
                    radius * angle1,
                    false,
                    CircleMap {
                        center,
                        radius: *radius,
                    },
                )?
                .into()
            }
            ShapeDesc::Ellipse { a, b } => {
                positive(*a, "ellipse a")?;
                positive(*b, "ellipse b")?;
                ParamCurve::new(2, 0.0, TAU, true, EllipseMap { a: *a, b: *b })?.into()
            }
            ShapeDesc::Helix { radius, pitch, turns } => {
                positive(*radius, "helix radius")?;
                positive(*turns, "helix turns")?;
                if !pitch.is_finite() {
                    return Err(ShapeError::InvalidArgument("helix pitch must be finite".into()));
                }
                let rise = pitch / TAU;
                let c = (radius * radius + rise * rise).sqrt();
                ParamCurve::new(
                    3,
                    0.0,
                    TAU * turns * c,
                    false,
                    HelixMap {
                        radius: *radius,
                        rise,
                        c,
                    },
                )?
                .into()
            }
            ShapeDesc::Cylinder { radius, height } => {
                positive(*radius, "cylinder radius")?;
                positive(*height, "cylinder height")?;
                ParamSurface::periodic((0.0, *height), (0.0, TAU), CylinderMap { radius: *radius })?.into()
            }
        };
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarDesc {
    Constant {
        c: f64,
    },
    /// g · p + c
    Affine {
        g: [f64; 3],
        c: f64,
    },
    /// |p - center|² - radius²
    SphereLevel {
        center: [f64; 3],
        radius: f64,
    },
    /// x² + y² - radius²
    CylinderLevel {
        radius: f64,
    },
    Bump {
        center: [f64; 3],
        radius: f64,
    },
    /// 1 inside `inner`, 0 outside `outer`, smooth in between.
    Plateau {
        center: [f64; 3],
        inner: f64,
        outer: f64,
    },
}

impl ScalarDesc {
    pub fn build(&self) -> Result<ScalarField> {
        Ok(match self {
            ScalarDesc::Constant { c } => ScalarField::constant(*c),
            ScalarDesc::Affine { g, c } => ScalarField::affine((*g).into(), *c),
            ScalarDesc::SphereLevel { center, radius } => ScalarField::sphere_level((*center).into(), *radius),
            ScalarDesc::CylinderLevel { radius } => ScalarField::cylinder_level(*radius),
            ScalarDesc::Bump { center, radius } => {
                positive(*radius, "bump radius")?;
                ScalarField::bump((*center).into(), *radius)
            }
            ScalarDesc::Plateau { center, inner, outer } => {
                positive(*inner, "plateau inner radius")?;
                positive(outer - inner, "plateau outer - inner")?;
                ScalarField::plateau((*center).into(), *inner, *outer)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldDesc {
    Constant {
        v: [f64; 3],
    },
    /// Unit field pointing away from the z-axis.
    Radial {},
    /// X(x) = x.
    Scaling {},
    /// X(x) = axis × x.
    Rotation {
        #[serde(default = "e3")]
        axis: [f64; 3],
    },
    /// X(x) = A x + b, A given row by row.
    Linear {
        a: [[f64; 3]; 3],
        #[serde(default)]
        b: [f64; 3],
    },
    /// beta(|p - center| / radius) dir(p); the ball must lie in the hold-all.
    Bump {
        center: [f64; 3],
        radius: f64,
        dir: Box<FieldDesc>,
    },
    Sum {
        terms: Vec<FieldDesc>,
    },
    Scale {
        factor: f64,
        field: Box<FieldDesc>,
    },
    /// Pointwise product s(p) X(p).
    Modulated {
        field: Box<FieldDesc>,
        scalar: ScalarDesc,
    },
}

impl FieldDesc {
    /// Builds the field in ambient dimension `dim`; bumps are checked
    /// against `hold_all`.
    pub fn build(&self, dim: usize, hold_all: &Region) -> Result<AmbientField> {
        Ok(match self {
            FieldDesc::Constant { v } => AmbientField::constant(dim, (*v).into()),
            FieldDesc::Radial {} => AmbientField::radial(dim),
            FieldDesc::Scaling {} => AmbientField::linear(dim, Mat3::identity()).with_label("scaling"),
            FieldDesc::Rotation { axis } => AmbientField::rotation(dim, (*axis).into()),
            FieldDesc::Linear { a, b } => {
                let m = Mat3::from_fn(|r, c| a[r][c]);
                let lin = AmbientField::linear(dim, m);
                if *b == [0.0; 3] {
                    lin
                } else {
                    lin.add(&AmbientField::constant(dim, (*b).into())).with_label("linear")
                }
            }
            FieldDesc::Bump { center, radius, dir } => {
                bump_field((*center).into(), *radius, &dir.build(dim, hold_all)?, hold_all)?
            }
            FieldDesc::Sum { terms } => {
                if terms.is_empty() {
                    return Err(ShapeError::InvalidArgument("sum needs at least one term".into()));
                }
                let built = terms
                    .iter()
                    .map(|t| t.build(dim, hold_all))
                    .collect::<Result<Vec<_>>>()?;
                AmbientField::sum(&built)
            }
            FieldDesc::Scale { factor, field } => field.build(dim, hold_all)?.scale(*factor),
            FieldDesc::Modulated { field, scalar } => field.build(dim, hold_all)?.modulate(&scalar.build()?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionalDesc {
    Length {},
    Area {},
    Elastic {},
    /// Cracked-set functional: `inner` evaluated on the crack curve inside
    /// the domain Ω̃.
    Crack {
        inner: Box<FunctionalDesc>,
        domain: Region,
    },
}

impl FunctionalDesc {
    /// Crack functionals are bound to the curve they are applied to.
    pub fn build(&self, shape: &Manifold) -> Result<ShapeFunctional> {
        Ok(match self {
            FunctionalDesc::Length {} => ShapeFunctional::length(),
            FunctionalDesc::Area {} => ShapeFunctional::area(),
            FunctionalDesc::Elastic {} => ShapeFunctional::elastic(),
            FunctionalDesc::Crack { inner, domain } => {
                let curve = shape
                    .as_curve()
                    .ok_or_else(|| ShapeError::Unsupported("a crack must be a curve".into()))?;
                crack_functional(domain.clone(), curve, inner.build(shape)?)?
            }
        })
    }

    pub fn is_crack(&self) -> bool {
        matches!(self, FunctionalDesc::Crack { .. })
    }
}
