use serde::{Deserialize, Serialize};

use super::Vec3;

/// Open hold-all or cracked-domain region in R³.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Everywhere,
    Ball { center: [f64; 3], radius: f64 },
    Box { min: [f64; 3], max: [f64; 3] },
}

impl Region {
    /// Signed distance from `p` to the frontier; positive inside.
    pub fn clearance(&self, p: &Vec3) -> f64 {
        match self {
            Region::Everywhere => f64::INFINITY,
            Region::Ball { center, radius } => radius - (p - Vec3::from(*center)).norm(),
            Region::Box { min, max } => (0..3)
                .map(|i| (p[i] - min[i]).min(max[i] - p[i]))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Whether the closed ball B(center, radius) lies inside the region.
    pub fn contains_ball(&self, center: &Vec3, radius: f64) -> bool {
        self.clearance(center) > radius
    }
}
