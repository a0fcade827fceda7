use super::{Density, Thresholds};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::C64;
use crate::grid::Domain;
use crate::quad::graded_radial_nodes;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Polar rule for disk means: graded Gauss panels in `r` (so an integrable
/// singularity at the centre is resolved) and midpoint nodes in angle.
#[derive(Debug, Clone, Copy)]
struct DiskRule {
    levels: usize,
    angular: usize,
}

const FINE: DiskRule = DiskRule {
    levels: 16,
    angular: 96,
};
const COARSE: DiskRule = DiskRule {
    levels: 8,
    angular: 32,
};

fn disk_samples(
    phi: &dyn Density,
    domain: &Domain,
    center: C64,
    radius: f64,
    rule: DiskRule,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let dtheta = 2.0 * PI / rule.angular as f64;
    let mut values = Vec::new();
    let mut weights = Vec::new();
    for (r, w) in graded_radial_nodes(radius, rule.levels) {
        for j in 0..rule.angular {
            let theta = (j as f64 + 0.5) * dtheta;
            let z = center + C64::from_polar(r, theta);
            if !domain.contains(z) {
                continue;
            }
            let v = phi.value(z);
            if !v.is_finite() {
                return Err(Error::Quadrature { radius: r, angle: theta });
            }
            values.push(v);
            weights.push(w * r * dtheta);
        }
    }
    Ok((values, weights))
}

fn mean_and_oscillation(values: &[f64], weights: &[f64]) -> Option<(f64, f64)> {
    let area: f64 = weights.iter().sum();
    if area <= 0.0 {
        return None;
    }
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / area;
    let osc = values
        .iter()
        .zip(weights)
        .map(|(v, w)| (v - mean).abs() * w)
        .sum::<f64>()
        / area;
    Some((mean, osc))
}

/// Mean of `phi` over `D ∩ B(center, radius)` and the mean oscillation about it.
pub fn disk_mean(phi: &dyn Density, domain: &Domain, center: C64, radius: f64) -> Result<(f64, f64)> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::arg("disk radius must be positive"));
    }
    let (v, w) = disk_samples(phi, domain, center, radius, FINE)?;
    mean_and_oscillation(&v, &w)
        .ok_or_else(|| Error::arg(format!("disk B({center}, {radius}) misses the domain")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FmoStatus {
    Finite,
    Infinite,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmoReport {
    pub z0: C64,
    pub epsilons: Vec<f64>,
    pub means: Vec<f64>,
    pub oscillations: Vec<f64>,
    /// Largest oscillation in each full decade, largest radii first.
    pub decade_max: Vec<f64>,
    pub status: FmoStatus,
}

/// Mean oscillation of `phi` on shrinking disks about `z0`.
pub fn fmo_estimate(
    phi: &dyn Density,
    domain: &Domain,
    z0: C64,
    epsilons: &[f64],
    exec: Execution,
    th: &Thresholds,
) -> Result<FmoReport> {
    if epsilons.is_empty() || epsilons.windows(2).any(|w| w[1] >= w[0]) || epsilons[0] <= 0.0 {
        return Err(Error::arg("epsilons must be positive and strictly decreasing"));
    }
    let rows = exec::map_collect(exec, epsilons.len(), |k| disk_mean(phi, domain, z0, epsilons[k]));
    let mut means = Vec::with_capacity(rows.len());
    let mut oscillations = Vec::with_capacity(rows.len());
    for row in rows {
        let (m, o) = row?;
        means.push(m);
        oscillations.push(o);
    }

    // Group into decades counted from the largest epsilon.
    let top = epsilons[0];
    let decades = (top / epsilons[epsilons.len() - 1]).log10();
    let full = (decades + 1e-9).floor() as usize;
    let mut decade_max = vec![0.0f64; full];
    for (e, o) in epsilons.iter().zip(&oscillations) {
        let d = ((top / e).log10() - 1e-9).max(0.0).floor() as usize;
        if d < full {
            decade_max[d] = decade_max[d].max(*o);
        }
    }
    // Oscillations at round-off level of the means count as zero.
    let floor = 1e-12 * means.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let status = if full < 3 {
        FmoStatus::Inconclusive
    } else {
        let last = decade_max[full - 1];
        let prev = decade_max[full - 2];
        let growing = decade_max[full - 3..]
            .windows(2)
            .all(|w| w[1] >= th.fmo_growth_ratio * w[0] && w[1] > 0.0);
        if last <= th.fmo_bounded_ratio * prev + floor {
            FmoStatus::Finite
        } else if growing {
            FmoStatus::Infinite
        } else {
            FmoStatus::Inconclusive
        }
    };
    Ok(FmoReport {
        z0,
        epsilons: epsilons.to_vec(),
        means,
        oscillations,
        decade_max,
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmoEstimate {
    /// Supremum over all levels; a lower bound for the BMO seminorm.
    pub value: f64,
    /// Supremum at each dyadic level `k = 0..=depth`.
    pub per_level: Vec<f64>,
}

/// Supremum of mean oscillation over dyadic disk families inside `domain`.
///
/// Level `k` uses disks of radius `R 2^-k` centred on a lattice of the same
/// spacing that contains the bounding-box centre, where `R` is half the
/// bounding-box extent.
pub fn bmo_norm(phi: &dyn Density, domain: &Domain, depth: usize, exec: Execution) -> Result<BmoEstimate> {
    let (lo, hi) = domain
        .bounding_box()
        .ok_or_else(|| Error::Unsupported("BMO on an unbounded region".into()))?;
    let mid = 0.5 * (lo + hi);
    let big = 0.5 * (hi.re - lo.re).max(hi.im - lo.im);
    let mut per_level = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let rho = big / f64::from(1u32 << k);
        let m = 1i64 << k;
        let centers: Vec<C64> = (-m..=m)
            .flat_map(|j| (-m..=m).map(move |i| mid + C64::new(i as f64 * rho, j as f64 * rho)))
            .filter(|z| domain.contains(*z))
            .collect();
        let oscs = exec::map_collect(exec, centers.len(), |n| -> Result<f64> {
            let (v, w) = disk_samples(phi, domain, centers[n], rho, COARSE)?;
            Ok(mean_and_oscillation(&v, &w).map_or(0.0, |p| p.1))
        });
        let mut best = 0.0f64;
        for o in oscs {
            best = best.max(o?);
        }
        per_level.push(best);
    }
    let value = per_level.iter().copied().fold(0.0, f64::max);
    Ok(BmoEstimate { value, per_level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{log_radii, ScalarFn};
    use crate::geometry::c;

    fn z() -> C64 {
        c(0.0, 0.0)
    }

    #[test]
    fn log_oscillation_is_scale_free() {
        // For log(1/|z|) on B(0, r): mean log(1/r) + 1/2, oscillation 1/e.
        let (m, o) = disk_mean(&ScalarFn::LogInverse(z()), &Domain::unit_disk(), z(), 1e-3).unwrap();
        assert!((m - (1e3f64.ln() + 0.5)).abs() < 1e-6);
        assert!((o - 1.0 / std::f64::consts::E).abs() < 1e-3, "{o}");
    }

    #[test]
    fn fmo_examples() {
        let eps = log_radii(0.5, 4.0, 3);
        let th = Thresholds::default();
        let d = Domain::unit_disk();
        let r = fmo_estimate(&ScalarFn::Constant(3.0), &d, z(), &eps, Execution::default(), &th).unwrap();
        assert_eq!(r.status, FmoStatus::Finite);
        assert!(r.oscillations.iter().all(|o| *o < 1e-12));
        let r = fmo_estimate(&ScalarFn::LogInverse(z()), &d, z(), &eps, Execution::default(), &th).unwrap();
        assert_eq!(r.status, FmoStatus::Finite);
        assert!(r.means.last().unwrap() > &9.0);
        let r = fmo_estimate(&ScalarFn::InverseRadius(z()), &d, z(), &eps, Execution::default(), &th).unwrap();
        assert_eq!(r.status, FmoStatus::Infinite);
        let short = log_radii(0.5, 2.0, 3);
        let r = fmo_estimate(&ScalarFn::Constant(1.0), &d, z(), &short, Execution::default(), &th).unwrap();
        assert_eq!(r.status, FmoStatus::Inconclusive);
    }

    #[test]
    fn bmo_examples() {
        let d = Domain::unit_disk();
        let b = bmo_norm(&ScalarFn::Constant(2.0), &d, 3, Execution::default()).unwrap();
        assert!(b.value < 1e-12);
        let b = bmo_norm(&ScalarFn::LogInverse(z()), &d, 6, Execution::default()).unwrap();
        let (a, last) = (b.per_level[2], b.per_level[6]);
        assert!((last - a).abs() < 0.1 * a, "{:?}", b.per_level);
        let b = bmo_norm(&ScalarFn::InverseRadius(z()), &d, 5, Execution::default()).unwrap();
        assert!(b.per_level.windows(2).all(|w| w[1] > 1.5 * w[0]), "{:?}", b.per_level);
    }
}
