//! Prime ends of catalog domains, measured through explicit reference maps
//! onto circular domains.
//!
//! The metric is `rho0(p, q) = |g0(p) - g0(q)|` where `g0` is the reference
//! map extended to prime ends. For the slit disk `D = B(0,1) \ [x0, 1)` the
//! reference map is `w = (t - i)/(t + i)`, `t = ((1 + s)/(1 - s))^2`,
//! `s = sqrt(m)` with `arg m` in `(0, 2 pi)` and `m = (z - x0)/(1 - x0 z)`.

mod chain;

pub use chain::{cross_cut_chain, extension_continuity_check, ContinuityOptions, ContinuityReport, CrossCut, CrossCutChain, EndContinuity};

use crate::error::{Error, Result};
use crate::geometry::{c, C64};
use crate::grid::Domain;
use crate::maps::PlaneMap;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    None,
    Upper,
    Lower,
    Tip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimeEnd {
    pub id: usize,
    pub support: C64,
    pub side: Side,
    /// Image on the boundary of the circular domain.
    pub reference: C64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrimeEndSpace {
    pub domain: Domain,
    pub ends: Vec<PrimeEnd>,
}

/// `m -> s -> t -> w` for the slit disk; `m` already Möbius-normalised.
fn slit_chain(m: C64, upper_cut: bool) -> C64 {
    // arg m in (0, 2 pi); on the cut itself the side decides the branch
    let r = m.norm();
    let mut a = m.arg();
    if a < 0.0 || (a == 0.0 && !upper_cut) {
        a += 2.0 * PI;
    }
    let s = C64::from_polar(r.sqrt(), 0.5 * a);
    // w = (t - i)/(t + i) with t = u^2, u = (1 + s)/(1 - s); use 1/u near s = 1
    if (1.0 + s).norm() >= (1.0 - s).norm() {
        let v2 = ((1.0 - s) / (1.0 + s)).powi(2);
        (1.0 - C64::i() * v2) / (1.0 + C64::i() * v2)
    } else {
        let t = ((1.0 + s) / (1.0 - s)).powi(2);
        (t - C64::i()) / (t + C64::i())
    }
}

fn slit_mobius(x0: f64, z: C64) -> C64 {
    (z - x0) / (1.0 - x0 * z)
}

impl PrimeEndSpace {
    /// Dense lattice of ends: `m` per boundary circle, plus `m` per slit side.
    pub fn build(domain: &Domain, m: usize) -> Result<Self> {
        domain.validate()?;
        let m = m.max(4);
        let mut ends = Vec::new();
        let mut push = |support: C64, side: Side, reference: C64| {
            let id = ends.len();
            ends.push(PrimeEnd { id, support, side, reference });
        };
        match domain {
            Domain::Disk { center, radius } => {
                for k in 0..m {
                    let u = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
                    push(center + radius * u, Side::None, u);
                }
            }
            Domain::Annulus { center, inner, outer } => {
                for k in 0..m {
                    let u = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
                    push(center + outer * u, Side::None, u);
                }
                for k in 0..m {
                    let u = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
                    push(center + inner * u, Side::None, u * (inner / outer));
                }
            }
            Domain::SlitDisk { x0, x1 } => {
                if *x1 < 1.0 {
                    return Err(Error::Unsupported(
                        "slit disks with an interior slit (x1 < 1) have no explicit reference map".into(),
                    ));
                }
                let x0 = *x0;
                // circle ends, with two ends over the junction z = 1
                push(c(1.0, 0.0), Side::Upper, slit_chain(c(1.0, 0.0), true));
                for k in 1..m {
                    let u = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
                    push(u, Side::None, slit_chain(slit_mobius(x0, u), true));
                }
                push(c(1.0, 0.0), Side::Lower, slit_chain(c(1.0, 0.0), false));
                // slit sides, traversed from the junction back to the tip
                for k in (1..m).rev() {
                    let x = x0 + (1.0 - x0) * k as f64 / m as f64;
                    push(c(x, 0.0), Side::Lower, slit_chain(slit_mobius(x0, c(x, 0.0)), false));
                }
                push(c(x0, 0.0), Side::Tip, slit_chain(c(0.0, 0.0), true));
                for k in 1..m {
                    let x = x0 + (1.0 - x0) * k as f64 / m as f64;
                    push(c(x, 0.0), Side::Upper, slit_chain(slit_mobius(x0, c(x, 0.0)), true));
                }
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "no prime-end reference map for {}",
                    other.name()
                )))
            }
        }
        let space = PrimeEndSpace { domain: domain.clone(), ends };
        space.check_distinct()?;
        Ok(space)
    }

    fn check_distinct(&self) -> Result<()> {
        let mut refs: Vec<(f64, f64)> = self.ends.iter().map(|e| (e.reference.re, e.reference.im)).collect();
        refs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if refs.windows(2).any(|w| (w[0].0 - w[1].0).hypot(w[0].1 - w[1].1) < 1e-14) {
            return Err(Error::Validation("two prime ends share a reference coordinate".into()));
        }
        Ok(())
    }

    /// The end on `side` whose support is nearest to `z`.
    pub fn nearest(&self, z: C64, side: Side) -> Option<&PrimeEnd> {
        self.ends
            .iter()
            .filter(|e| e.side == side)
            .min_by(|a, b| (a.support - z).norm().total_cmp(&(b.support - z).norm()))
    }

    pub fn end(&self, id: usize) -> Result<&PrimeEnd> {
        self.ends
            .get(id)
            .ok_or_else(|| Error::arg(format!("no prime end with id {id}")))
    }

    /// The reference map on the interior of the domain.
    pub fn reference_map(&self, z: C64) -> Result<C64> {
        if !self.domain.contains(z) {
            return Err(Error::Domain { what: "prime-end reference map", z });
        }
        Ok(match &self.domain {
            Domain::Disk { center, radius } => (z - center) / radius,
            Domain::Annulus { center, outer, .. } => (z - center) / outer,
            Domain::SlitDisk { x0, .. } => slit_chain(slit_mobius(*x0, z), true),
            _ => unreachable!("space is built only for supported domains"),
        })
    }

    /// Reference coordinate of a point approaching the boundary from the
    /// side selected by `side` (only relevant on a slit).
    pub fn reference_of_support(&self, z: C64, side: Side) -> C64 {
        match &self.domain {
            Domain::SlitDisk { x0, .. } => slit_chain(slit_mobius(*x0, z), side != Side::Lower),
            Domain::Disk { center, radius } => (z - center) / radius,
            Domain::Annulus { center, outer, .. } => (z - center) / outer,
            _ => z,
        }
    }

    /// Angle of the end on its reference circle, the parameter of boundary data.
    pub fn angle(&self, end: &PrimeEnd) -> f64 {
        end.reference.arg()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["id", "support_x", "support_y", "side", "ref_angle"])?;
        for e in &self.ends {
            let side = serde_json::to_value(e.side)?;
            out.serialize((e.id, e.support.re, e.support.im, side.as_str().unwrap_or(""), e.reference.arg()))?;
        }
        out.flush()?;
        Ok(())
    }
}

impl PlaneMap for PrimeEndSpace {
    fn eval(&self, z: C64) -> Result<C64> {
        self.reference_map(z)
    }
}

pub fn build_prime_end_space(domain: &Domain, m: usize) -> Result<PrimeEndSpace> {
    PrimeEndSpace::build(domain, m)
}

pub fn prime_end_metric(space: &PrimeEndSpace, p: usize, q: usize) -> Result<f64> {
    Ok((space.end(p)?.reference - space.end(q)?.reference).norm())
}

/// Compares the convergence classes of the lattice metric with those of an
/// alternative reference map on a battery of end sequences.
///
/// Sequences are `p_j -> p` (neighbours at lattice offsets `2^-j`) and
/// alternating sequences that jump to the antipodal end.
pub fn metrics_equivalent(space: &PrimeEndSpace, alt: &dyn Fn(&PrimeEnd) -> C64) -> bool {
    let n = space.ends.len();
    // convergent: the last two distances are below a tenth of the first
    let classify = |d: &[f64]| d[d.len() - 2..].iter().all(|&x| x <= 0.1 * d[0].max(1e-300));
    let step = (n / 16).max(1);
    for p in (0..n).step_by(step) {
        let base = &space.ends[p];
        let offsets: Vec<usize> = (0..20).map(|j| n >> (j + 2)).filter(|&o| o >= 1).collect();
        let seqs: [Vec<usize>; 2] = [
            offsets.iter().map(|o| (p + o) % n).collect(),
            offsets.iter().enumerate().map(|(j, o)| if j % 2 == 0 { (p + o) % n } else { (p + n / 2) % n }).collect(),
        ];
        for s in &seqs {
            if s.len() < 2 {
                continue;
            }
            let d0: Vec<f64> = s.iter().map(|&k| (space.ends[k].reference - base.reference).norm()).collect();
            let d1: Vec<f64> = s.iter().map(|&k| (alt(&space.ends[k]) - alt(base)).norm()).collect();
            if classify(&d0) != classify(&d1) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests;
