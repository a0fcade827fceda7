//! Beltrami coefficients and pointwise dilatation quotients.

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::{c, C64};
use crate::grid::{ComplexField, DomainMask};
use crate::interp::MonotoneCubic;
use serde::{Deserialize, Serialize};

/// Largest modulus an analytic family may return.
pub const MAX_MODULUS: f64 = 1.0 - 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Analytic coefficient families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CoefficientFamily {
    /// `mu = k`.
    Constant { k: C64 },
    /// Coefficient of `z |z|^(K-1)` about `center`.
    RadialStretch {
        stretch: f64,
        #[serde(default)]
        center: C64,
    },
    /// Coefficient of the radial map `rho(|z|) (z - c)/|z - c|`, with `rho`
    /// given as an increasing `(r, rho)` table.
    RadialProfile {
        table: Vec<(f64, f64)>,
        #[serde(default)]
        center: C64,
    },
    /// `mu = sign * k (z - z0) / conj(z - z0)`.
    Angular { k: f64, center: C64, sign: Sign },
    /// `K_mu = 1 + log(1/|z - z0|)` inside the unit disk about `z0` (and 1
    /// outside), with phase `-(z - z0)/conj(z - z0)` so that the tangent
    /// dilatation about `z0` equals `K_mu`.
    DegenerateLog { center: C64 },
}

impl CoefficientFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CoefficientFamily::Constant { .. } => "constant",
            CoefficientFamily::RadialStretch { .. } => "radial_stretch",
            CoefficientFamily::RadialProfile { .. } => "radial_profile",
            CoefficientFamily::Angular { .. } => "angular",
            CoefficientFamily::DegenerateLog { .. } => "degenerate_log",
        }
    }
}

/// Grid-sampled coefficient, bilinearly interpolated.
#[derive(Debug, Clone)]
pub struct SampledMu {
    pub field: ComplexField,
}

#[derive(Debug, Clone)]
enum Repr {
    Family(CoefficientFamily),
    Profile {
        family: CoefficientFamily,
        spline: MonotoneCubic,
        center: C64,
    },
    Sampled(SampledMu),
}

/// A complex dilatation `mu` with `|mu| < 1`.
#[derive(Debug, Clone)]
pub struct BeltramiCoefficient {
    repr: Repr,
}

impl BeltramiCoefficient {
    pub fn new(family: CoefficientFamily) -> Result<Self> {
        match &family {
            CoefficientFamily::Constant { k } => {
                if !(k.norm() < 1.0) {
                    return Err(Error::validation(format!("constant |k| = {} must be < 1", k.norm())));
                }
            }
            CoefficientFamily::RadialStretch { stretch, .. } => {
                if !(stretch.is_finite() && *stretch > 0.0) {
                    return Err(Error::validation("radial stretch K must be positive"));
                }
            }
            CoefficientFamily::Angular { k, .. } => {
                if !(0.0..1.0).contains(k) {
                    return Err(Error::validation(format!("angular k = {k} must lie in [0, 1)")));
                }
            }
            CoefficientFamily::DegenerateLog { .. } => {}
            CoefficientFamily::RadialProfile { table, center } => {
                let (xs, ys): (Vec<f64>, Vec<f64>) = table.iter().copied().unzip();
                if xs.first().copied() != Some(0.0) || ys.first().copied() != Some(0.0) {
                    return Err(Error::validation("radial profile must start at (0, 0)"));
                }
                let spline = MonotoneCubic::new(xs, ys)?;
                let center = *center;
                return Ok(BeltramiCoefficient {
                    repr: Repr::Profile {
                        family,
                        spline,
                        center,
                    },
                });
            }
        }
        Ok(BeltramiCoefficient {
            repr: Repr::Family(family),
        })
    }

    pub fn constant(k: C64) -> Result<Self> {
        Self::new(CoefficientFamily::Constant { k })
    }

    pub fn radial_stretch(stretch: f64) -> Result<Self> {
        Self::new(CoefficientFamily::RadialStretch {
            stretch,
            center: c(0.0, 0.0),
        })
    }

    pub fn angular(k: f64, center: C64, sign: Sign) -> Result<Self> {
        Self::new(CoefficientFamily::Angular { k, center, sign })
    }

    pub fn degenerate_log(center: C64) -> Self {
        BeltramiCoefficient {
            repr: Repr::Family(CoefficientFamily::DegenerateLog { center }),
        }
    }

    pub fn zero() -> Self {
        BeltramiCoefficient {
            repr: Repr::Family(CoefficientFamily::Constant { k: c(0.0, 0.0) }),
        }
    }

    /// Wraps a sampled field; every masked value must satisfy `|mu| < 1`.
    pub fn sampled(field: ComplexField) -> Result<Self> {
        for (k, v) in field.values.iter().enumerate() {
            if field.inside[k] {
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::validation(format!("non-finite mu at cell {k}")));
                }
                if v.norm() >= 1.0 {
                    return Err(Error::Degeneracy {
                        z: field.grid.point(k),
                        modulus: v.norm(),
                    });
                }
            }
        }
        Ok(BeltramiCoefficient {
            repr: Repr::Sampled(SampledMu { field }),
        })
    }

    pub fn family(&self) -> Option<&CoefficientFamily> {
        match &self.repr {
            Repr::Family(f) | Repr::Profile { family: f, .. } => Some(f),
            Repr::Sampled(_) => None,
        }
    }

    /// True when `mu` is the same at every point (periodisation is seamless).
    pub fn is_constant(&self) -> bool {
        matches!(
            self.repr,
            Repr::Family(CoefficientFamily::Constant { .. })
        )
    }

    /// `mu(z)` and whether the modulus had to be clamped below one.
    pub fn eval_flagged(&self, z: C64) -> Result<(C64, bool)> {
        let raw = match &self.repr {
            Repr::Family(f) => eval_family(f, z)?,
            Repr::Profile { spline, center, .. } => {
                let d = z - center;
                let r = d.norm();
                if r == 0.0 {
                    return Err(Error::Domain {
                        what: "radial profile (centre)",
                        z,
                    });
                }
                let (rho, drho) = spline.eval(r).ok_or(Error::Domain {
                    what: "radial profile table",
                    z,
                })?;
                let ratio = rho / r;
                d / d.conj() * ((drho - ratio) / (drho + ratio))
            }
            Repr::Sampled(s) => return eval_sampled(s, z).map(|v| (v, false)),
        };
        let m = raw.norm();
        if !m.is_finite() {
            return Err(Error::Domain {
                what: "coefficient family",
                z,
            });
        }
        if m > MAX_MODULUS {
            Ok((raw * (MAX_MODULUS / m), true))
        } else {
            Ok((raw, false))
        }
    }
}

fn unit_phase(d: C64) -> C64 {
    // (z - z0) / conj(z - z0) = e^{2 i theta}
    let u = d / d.norm();
    u * u
}

fn eval_family(f: &CoefficientFamily, z: C64) -> Result<C64> {
    Ok(match f {
        CoefficientFamily::Constant { k } => *k,
        CoefficientFamily::RadialStretch { stretch, center } => {
            let d = z - center;
            if d.norm() == 0.0 {
                return Err(Error::Domain {
                    what: "radial stretch (centre)",
                    z,
                });
            }
            unit_phase(d) * ((stretch - 1.0) / (stretch + 1.0))
        }
        CoefficientFamily::Angular { k, center, sign } => {
            let d = z - center;
            if d.norm() == 0.0 {
                return Err(Error::Domain {
                    what: "angular family (centre)",
                    z,
                });
            }
            unit_phase(d) * (sign.factor() * k)
        }
        CoefficientFamily::DegenerateLog { center } => {
            let d = z - center;
            let r = d.norm();
            if r == 0.0 {
                return Err(Error::Domain {
                    what: "degenerate log family (centre)",
                    z,
                });
            }
            let big_k = 1.0 + (-r.ln()).max(0.0);
            -unit_phase(d) * ((big_k - 1.0) / (big_k + 1.0))
        }
        CoefficientFamily::RadialProfile { .. } => unreachable!("profiles carry a spline"),
    })
}

fn eval_sampled(s: &SampledMu, z: C64) -> Result<C64> {
    let g = &s.field.grid;
    if !g.contains_point(z) {
        return Err(Error::Domain {
            what: "sampled coefficient grid",
            z,
        });
    }
    let n = g.n;
    let (x, y) = g.coords(z);
    let x = x.clamp(0.0, (n - 1) as f64);
    let y = y.clamp(0.0, (n - 1) as f64);
    let i = (x.floor() as usize).min(n - 2);
    let j = (y.floor() as usize).min(n - 2);
    let (fx, fy) = (x - i as f64, y - j as f64);
    let v = |a: usize, b: usize| s.field.values[b * n + a];
    let out = (v(i, j) * (1.0 - fx) + v(i + 1, j) * fx) * (1.0 - fy)
        + (v(i, j + 1) * (1.0 - fx) + v(i + 1, j + 1) * fx) * fy;
    if out.norm() >= 1.0 {
        return Err(Error::Degeneracy {
            z,
            modulus: out.norm(),
        });
    }
    Ok(out)
}

/// `mu(z)`.
pub fn eval_mu(coef: &BeltramiCoefficient, z: C64) -> Result<C64> {
    coef.eval_flagged(z).map(|(v, _)| v)
}

/// `(1 + |mu|) / (1 - |mu|)` for a given value of `mu`.
pub fn dilatation_of(mu: C64) -> Result<f64> {
    let m = mu.norm();
    if !(m < 1.0) {
        return Err(Error::Degeneracy {
            z: c(f64::NAN, f64::NAN),
            modulus: m,
        });
    }
    Ok((1.0 + m) / (1.0 - m))
}

/// Dilatation quotient `K_mu(z)`.
pub fn dilatation(coef: &BeltramiCoefficient, z: C64) -> Result<f64> {
    let mu = eval_mu(coef, z)?;
    dilatation_of(mu).map_err(|_| Error::Degeneracy {
        z,
        modulus: mu.norm(),
    })
}

/// Tangent dilatation for a given value `mu` at `z` relative to `z0`.
pub fn tangent_dilatation_of(mu: C64, z: C64, z0: C64) -> Result<f64> {
    let d = z - z0;
    if d.norm() == 0.0 {
        return Err(Error::arg("tangent dilatation needs z != z0"));
    }
    let m2 = mu.norm_sqr();
    if !(m2 < 1.0) {
        return Err(Error::Degeneracy {
            z,
            modulus: m2.sqrt(),
        });
    }
    let phase = d.conj() / d;
    Ok((C64::new(1.0, 0.0) - phase * mu).norm_sqr() / (1.0 - m2))
}

/// Tangent dilatation quotient `K^T_mu(z, z0)`.
pub fn tangent_dilatation(coef: &BeltramiCoefficient, z: C64, z0: C64) -> Result<f64> {
    if (z - z0).norm() == 0.0 {
        return Err(Error::arg("tangent dilatation needs z != z0"));
    }
    tangent_dilatation_of(eval_mu(coef, z)?, z, z0)
}

/// Samples `mu` at the centres of the masked cells (zero elsewhere).
pub fn sample_field(
    coef: &BeltramiCoefficient,
    mask: &DomainMask,
    exec: Execution,
) -> Result<ComplexField> {
    let grid = mask.grid;
    let samples = exec::map_collect(exec, grid.len(), |k| {
        if mask.inside[k] {
            coef.eval_flagged(grid.point(k))
        } else {
            Ok((c(0.0, 0.0), false))
        }
    });
    let mut values = Vec::with_capacity(samples.len());
    let mut clamped = 0;
    for s in samples {
        let (v, flag) = s?;
        clamped += flag as usize;
        values.push(v);
    }
    Ok(ComplexField {
        grid,
        values,
        inside: mask.inside.clone(),
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Domain, GridSpec};
    use approx::assert_relative_eq;

    #[test]
    fn eval_examples() {
        let k = BeltramiCoefficient::constant(c(0.5, 0.0)).unwrap();
        assert_eq!(eval_mu(&k, c(0.3, 0.1)).unwrap(), c(0.5, 0.0));

        let rs = BeltramiCoefficient::radial_stretch(3.0).unwrap();
        let v = eval_mu(&rs, c(0.5, 0.0)).unwrap();
        assert_relative_eq!(v.re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-15);

        let ang = BeltramiCoefficient::angular(0.5, c(0.0, 0.0), Sign::Plus).unwrap();
        let v = eval_mu(&ang, c(0.0, 1.0)).unwrap();
        assert_relative_eq!(v.re, -0.5, epsilon = 1e-15);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dilatation_examples() {
        assert_eq!(dilatation(&BeltramiCoefficient::zero(), c(0.2, 0.2)).unwrap(), 1.0);
        let half = BeltramiCoefficient::constant(c(0.0, 0.5)).unwrap();
        assert_relative_eq!(dilatation(&half, c(0.0, 0.0)).unwrap(), 3.0, epsilon = 1e-14);
        let deg = BeltramiCoefficient::degenerate_log(c(0.0, 0.0));
        let z = C64::from_polar((-2.0f64).exp(), 0.7);
        assert_relative_eq!(dilatation(&deg, z).unwrap(), 3.0, epsilon = 1e-13);
    }

    #[test]
    fn tangent_dilatation_hits_both_bounds() {
        let z0 = c(0.1, -0.2);
        let z = c(0.4, 0.3);
        let plus = BeltramiCoefficient::angular(0.5, z0, Sign::Plus).unwrap();
        let minus = BeltramiCoefficient::angular(0.5, z0, Sign::Minus).unwrap();
        assert_relative_eq!(tangent_dilatation(&plus, z, z0).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(tangent_dilatation(&minus, z, z0).unwrap(), 3.0, epsilon = 1e-14);
        assert_eq!(
            tangent_dilatation(&BeltramiCoefficient::zero(), z, z0).unwrap(),
            1.0
        );
        assert!(matches!(
            tangent_dilatation(&plus, z0, z0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn rejects_bad_constants_and_sampled_degeneracy() {
        assert!(BeltramiCoefficient::constant(c(1.0, 0.0)).is_err());
        let grid = GridSpec::new(c(0.0, 0.0), 1.0, 16).unwrap();
        let mut values = vec![c(0.0, 0.0); grid.len()];
        values[17] = c(1.0, 0.0);
        let field = ComplexField {
            grid,
            values,
            inside: vec![true; grid.len()],
            clamped: 0,
        };
        assert!(matches!(
            BeltramiCoefficient::sampled(field),
            Err(Error::Degeneracy { .. })
        ));
    }

    #[test]
    fn degenerate_log_clamps_near_centre() {
        let deg = BeltramiCoefficient::degenerate_log(c(0.0, 0.0));
        let (v, flagged) = deg.eval_flagged(c(1e-300, 0.0)).unwrap();
        assert!(v.norm() < 1.0);
        let (_, ok) = deg.eval_flagged(c(0.5, 0.0)).unwrap();
        assert!(!ok);
        // log(1e300) ~ 690 gives |mu| = 690/692, well below the clamp.
        assert!(!flagged);
        assert!(matches!(
            eval_mu(&deg, c(0.0, 0.0)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn radial_profile_matches_stretch() {
        // rho(r) = r^2 sampled densely reproduces the K = 2 stretch.
        let table: Vec<(f64, f64)> = (0..=400).map(|k| {
            let r = k as f64 / 200.0;
            (r, r * r)
        }).collect();
        let prof = BeltramiCoefficient::new(CoefficientFamily::RadialProfile {
            table,
            center: c(0.0, 0.0),
        })
        .unwrap();
        let z = C64::from_polar(0.7, 1.1);
        let want = eval_mu(&BeltramiCoefficient::radial_stretch(2.0).unwrap(), z).unwrap();
        assert!((eval_mu(&prof, z).unwrap() - want).norm() < 1e-4);
        assert!(eval_mu(&prof, c(3.0, 0.0)).is_err());
    }

    #[test]
    fn sample_field_examples() {
        let mask = DomainMask::fitted(Domain::unit_disk(), 16).unwrap();
        let f = sample_field(
            &BeltramiCoefficient::constant(c(0.3, 0.0)).unwrap(),
            &mask,
            Execution::Parallel,
        )
        .unwrap();
        assert!(f.inside_values().all(|v| v == c(0.3, 0.0)));
        let zero = sample_field(&BeltramiCoefficient::zero(), &mask, Execution::Sequential).unwrap();
        assert!(zero.values.iter().all(|v| *v == c(0.0, 0.0)));

        let ann = DomainMask::fitted(
            Domain::Annulus {
                center: c(0.0, 0.0),
                inner: 0.25,
                outer: 1.0,
            },
            64,
        )
        .unwrap();
        let f = sample_field(&BeltramiCoefficient::radial_stretch(2.0).unwrap(), &ann, Execution::Parallel)
            .unwrap();
        assert!(f.inside_values().all(|v| (v.norm() - 1.0 / 3.0).abs() < 1e-14));
        assert!(f.inside_values().count() > 0);
    }
}
