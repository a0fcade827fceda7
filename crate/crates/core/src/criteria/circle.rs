use super::Density;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::C64;
use crate::grid::Domain;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureOptions {
    /// Target arc length between angular nodes.
    pub spacing: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            spacing: 1.0 / 256.0,
            min_nodes: 64,
            max_nodes: 1 << 16,
            exec: Execution::default(),
        }
    }
}

impl QuadratureOptions {
    pub(crate) fn nodes_for(&self, r: f64) -> usize {
        let want = (2.0 * PI * r / self.spacing).ceil() as usize;
        let n = want.max(self.min_nodes).min(self.max_nodes);
        n.div_ceil(4) * 4
    }
}

/// `||Q||(z0, r)`: the line integral of `Q` over `D ∩ S(z0, r)` for each radius,
/// with `Q` extended by zero outside `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleNorm {
    pub center: C64,
    /// Strictly decreasing.
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Length of `D ∩ S(z0, r)`.
    pub arc_lengths: Vec<f64>,
}

impl CircleNorm {
    /// Zero-extension circle average `||Q|| / (2 pi r)`.
    pub fn averages(&self) -> Vec<f64> {
        self.radii
            .iter()
            .zip(&self.values)
            .map(|(r, v)| v / (2.0 * PI * r))
            .collect()
    }

    /// Average over the arc `D ∩ S(z0, r)` only (zero where the arc is empty).
    pub fn arc_averages(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.arc_lengths)
            .map(|(v, l)| if *l > 0.0 { v / l } else { 0.0 })
            .collect()
    }

    pub fn decades(&self) -> f64 {
        (self.radii[0] / self.radii[self.radii.len() - 1]).log10()
    }
}

/// `per_decade` log-spaced radii from `eps0` down over `decades` decades.
pub fn log_radii(eps0: f64, decades: f64, per_decade: usize) -> Vec<f64> {
    let count = (decades * per_decade as f64).round() as usize;
    (0..=count)
        .map(|k| eps0 * 10f64.powf(-(k as f64) / per_decade as f64))
        .collect()
}

pub(crate) fn check_radii(radii: &[f64], domain: &Domain, z0: C64) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::arg("no radii supplied"));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::arg("radii must be positive and finite"));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::arg("radii must be strictly decreasing"));
    }
    let d0 = domain.sup_distance(z0);
    if radii[0] >= d0 {
        return Err(Error::arg(format!(
            "largest radius {} exceeds sup distance {d0} from z0",
            radii[0]
        )));
    }
    Ok(())
}

/// One circle: `(integral over D ∩ S, arc length)` by the midpoint rule.
pub(crate) fn circle_integral(
    q: &dyn Density,
    domain: &Domain,
    z0: C64,
    r: f64,
    nodes: usize,
) -> Result<(f64, f64)> {
    let dtheta = 2.0 * PI / nodes as f64;
    let mut sum = 0.0;
    let mut inside = 0usize;
    for j in 0..nodes {
        let theta = (j as f64 + 0.5) * dtheta;
        let z = z0 + C64::from_polar(r, theta);
        if !domain.contains(z) {
            continue;
        }
        let v = q.value(z);
        if !v.is_finite() {
            return Err(Error::Quadrature {
                radius: r,
                angle: theta,
            });
        }
        if v < 0.0 {
            return Err(Error::arg(format!(
                "density must be non-negative, got {v} at radius {r}, angle {theta}"
            )));
        }
        sum += v;
        inside += 1;
    }
    Ok((sum * r * dtheta, inside as f64 * r * dtheta))
}

/// Circle norms of `q` about `z0` at each radius.
pub fn circle_norm(
    q: &dyn Density,
    domain: &Domain,
    z0: C64,
    radii: &[f64],
    opts: &QuadratureOptions,
) -> Result<CircleNorm> {
    check_radii(radii, domain, z0)?;
    let rows = exec::map_collect(opts.exec, radii.len(), |k| {
        circle_integral(q, domain, z0, radii[k], opts.nodes_for(radii[k]))
    });
    let mut values = Vec::with_capacity(radii.len());
    let mut arc_lengths = Vec::with_capacity(radii.len());
    for row in rows {
        let (v, l) = row?;
        values.push(v);
        arc_lengths.push(l);
    }
    Ok(CircleNorm {
        center: z0,
        radii: radii.to_vec(),
        values,
        arc_lengths,
    })
}
