use std::sync::Arc;

use super::{AmbientField, FieldMap, ScalarField};
use crate::geometry::{Mat3, Vec3};

pub struct Constant(pub Vec3);

impl FieldMap for Constant {
    fn value(&self, _p: &Vec3) -> Vec3 {
        self.0
    }

    fn jacobian(&self, _p: &Vec3) -> Mat3 {
        Mat3::zeros()
    }

    fn second(&self, _p: &Vec3, _w: &Vec3) -> Vec3 {
        Vec3::zeros()
    }
}

/// X(x) = A x + b.
pub struct Linear {
    pub a: Mat3,
    pub b: Vec3,
}

impl FieldMap for Linear {
    fn value(&self, p: &Vec3) -> Vec3 {
        self.a * p + self.b
    }

    fn jacobian(&self, _p: &Vec3) -> Mat3 {
        self.a
    }

    fn second(&self, _p: &Vec3, _w: &Vec3) -> Vec3 {
        Vec3::zeros()
    }
}

/// X(x) = axis × x.
pub struct Rotation {
    pub axis: Vec3,
}

impl FieldMap for Rotation {
    fn value(&self, p: &Vec3) -> Vec3 {
        self.axis.cross(p)
    }

    fn jacobian(&self, _p: &Vec3) -> Mat3 {
        self.axis.cross_matrix()
    }

    fn second(&self, _p: &Vec3, _w: &Vec3) -> Vec3 {
        Vec3::zeros()
    }
}

/// Unit field directed away from the z-axis. Zero on the axis itself.
pub struct Radial;

impl FieldMap for Radial {
    fn value(&self, p: &Vec3) -> Vec3 {
        let q = Vec3::new(p.x, p.y, 0.0);
        let r = q.norm();
        if r == 0.0 {
            Vec3::zeros()
        } else {
            q / r
        }
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        let q = Vec3::new(p.x, p.y, 0.0);
        let r = q.norm();
        if r == 0.0 {
            return Mat3::zeros();
        }
        let u = q / r;
        let mut proj = Mat3::zeros();
        proj[(0, 0)] = 1.0;
        proj[(1, 1)] = 1.0;
        (proj - u * u.transpose()) / r
    }

    fn second(&self, p: &Vec3, w: &Vec3) -> Vec3 {
        // d²(q/|q|)[w, w] with q the planar projection
        let q = Vec3::new(p.x, p.y, 0.0);
        let r = q.norm();
        if r == 0.0 {
            return Vec3::zeros();
        }
        let u = q / r;
        let wq = Vec3::new(w.x, w.y, 0.0);
        let a = u.dot(&wq);
        (u * (3.0 * a * a - wq.norm_squared()) - wq * (2.0 * a)) / (r * r)
    }
}

pub struct Sum(pub Vec<AmbientField>);

impl FieldMap for Sum {
    fn value(&self, p: &Vec3) -> Vec3 {
        self.0.iter().map(|f| f.value(p)).sum()
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        self.0.iter().map(|f| f.jacobian(p)).sum()
    }

    fn value_and_jacobian(&self, p: &Vec3) -> (Vec3, Mat3) {
        self.0.iter().fold((Vec3::zeros(), Mat3::zeros()), |(v, j), f| {
            let (fv, fj) = f.value_and_jacobian(p);
            (v + fv, j + fj)
        })
    }

    fn second(&self, p: &Vec3, w: &Vec3) -> Vec3 {
        self.0.iter().map(|f| f.second(p, w)).sum()
    }
}

pub struct Scaled {
    pub factor: f64,
    pub field: AmbientField,
}

impl FieldMap for Scaled {
    fn value(&self, p: &Vec3) -> Vec3 {
        self.field.value(p) * self.factor
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        self.field.jacobian(p) * self.factor
    }

    fn value_and_jacobian(&self, p: &Vec3) -> (Vec3, Mat3) {
        let (v, j) = self.field.value_and_jacobian(p);
        (v * self.factor, j * self.factor)
    }

    fn second(&self, p: &Vec3, w: &Vec3) -> Vec3 {
        self.field.second(p, w) * self.factor
    }
}

/// f(p) X(p).
pub struct Product {
    pub scalar: ScalarField,
    pub field: AmbientField,
}

impl FieldMap for Product {
    fn value(&self, p: &Vec3) -> Vec3 {
        let f = self.scalar.value(p);
        if f == 0.0 {
            return Vec3::zeros();
        }
        self.field.value(p) * f
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        self.value_and_jacobian(p).1
    }

    fn value_and_jacobian(&self, p: &Vec3) -> (Vec3, Mat3) {
        let (f, g) = self.scalar.value_and_gradient(p);
        if f == 0.0 && g == Vec3::zeros() {
            return (Vec3::zeros(), Mat3::zeros());
        }
        let (x, dx) = self.field.value_and_jacobian(p);
        (x * f, x * g.transpose() + dx * f)
    }

    fn second(&self, p: &Vec3, w: &Vec3) -> Vec3 {
        let (f, g) = self.scalar.value_and_gradient(p);
        if f == 0.0 && g == Vec3::zeros() {
            return Vec3::zeros();
        }
        let hw = self.scalar.hessian(p) * w;
        let (x, dx) = self.field.value_and_jacobian(p);
        x * w.dot(&hw) + dx * w * (2.0 * g.dot(w)) + self.field.second(p, w) * f
    }
}

type ValueFn = Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>;
type JacobianFn = Arc<dyn Fn(&Vec3) -> Mat3 + Send + Sync>;

/// Field given by closures for X and dX.
#[derive(Clone)]
pub struct FnField {
    value: ValueFn,
    jacobian: JacobianFn,
}

impl FnField {
    pub fn new<V, J>(value: V, jacobian: J) -> Self
    where
        V: Fn(&Vec3) -> Vec3 + Send + Sync + 'static,
        J: Fn(&Vec3) -> Mat3 + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            jacobian: Arc::new(jacobian),
        }
    }
}

impl FieldMap for FnField {
    fn value(&self, p: &Vec3) -> Vec3 {
        (self.value)(p)
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        (self.jacobian)(p)
    }
}
