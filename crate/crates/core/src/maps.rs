//! Explicit plane maps used as test homeomorphisms.

use crate::error::{Error, Result};
use crate::geometry::C64;
use serde::{Deserialize, Serialize};

/// A map evaluable at points of the plane.
pub trait PlaneMap: Sync {
    fn eval(&self, z: C64) -> Result<C64>;
}

impl<F: Fn(C64) -> C64 + Sync> PlaneMap for F {
    fn eval(&self, z: C64) -> Result<C64> {
        Ok(self(z))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum MapSpec {
    Identity,
    /// Disk automorphism `(z - a) / (1 - conj(a) z)`.
    Mobius { a: C64 },
    /// `c + (z - c) |z - c|^(K - 1)`, the solution for `radial_stretch(K)`.
    RadialStretch { stretch: f64, center: C64 },
    /// `z + k conj(z)`, the solution for constant `mu = k`.
    Affine { k: C64 },
}

impl MapSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            MapSpec::Mobius { a } if !(a.norm() < 1.0) => Err(Error::validation("Mobius parameter must satisfy |a| < 1")),
            MapSpec::RadialStretch { stretch, .. } if !(*stretch > 0.0 && stretch.is_finite()) => {
                Err(Error::validation("stretch must be positive"))
            }
            MapSpec::Affine { k } if !(k.norm() < 1.0) => Err(Error::validation("affine k must satisfy |k| < 1")),
            _ => Ok(()),
        }
    }
}

impl PlaneMap for MapSpec {
    fn eval(&self, z: C64) -> Result<C64> {
        Ok(match self {
            MapSpec::Identity => z,
            MapSpec::Mobius { a } => mobius(*a, z),
            MapSpec::RadialStretch { stretch, center } => {
                let d = z - center;
                let r = d.norm();
                if r == 0.0 {
                    *center
                } else {
                    center + d * r.powf(stretch - 1.0)
                }
            }
            MapSpec::Affine { k } => z + k * z.conj(),
        })
    }
}

pub fn mobius(a: C64, z: C64) -> C64 {
    (z - a) / (1.0 - a.conj() * z)
}

/// Image of the circle `S(center, radius)` under `mobius(a, .)`, as `(centre, radius)`.
///
/// The circle must not pass through the pole `1 / conj(a)`.
pub fn mobius_circle(a: C64, center: C64, radius: f64) -> (C64, f64) {
    // Three image points determine the circle.
    let p: Vec<C64> = [0.0, 2.0, 4.0]
        .iter()
        .map(|t: &f64| mobius(a, center + C64::from_polar(radius, *t)))
        .collect();
    circumcircle(p[0], p[1], p[2])
}

fn circumcircle(a: C64, b: C64, c: C64) -> (C64, f64) {
    let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    let (a2, b2, c2) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    let ux = (a2 * (b.im - c.im) + b2 * (c.im - a.im) + c2 * (a.im - b.im)) / d;
    let uy = (a2 * (c.re - b.re) + b2 * (a.re - c.re) + c2 * (b.re - a.re)) / d;
    let center = C64::new(ux, uy);
    (center, (a - center).norm())
}
