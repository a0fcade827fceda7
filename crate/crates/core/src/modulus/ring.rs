use super::capacity::{condenser_capacity, CondenserSpec, SolveOptions};
use super::plates::Plate;
use crate::criteria::{circle_norm, Density, QuadratureOptions};
use crate::error::{Error, Result};
use crate::geometry::{polygon_area, C64};
use crate::grid::Domain;
use crate::maps::PlaneMap;
use crate::quad::gauss_legendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinorantReport {
    pub capacity: f64,
    /// `(2/pi) log(R/r)`.
    pub bound: f64,
    /// `capacity - bound`.
    pub margin: f64,
    /// Allowance for discretisation error subtracted from the bound.
    pub allowance: f64,
    pub holds: bool,
}

/// Lower bound `cap(E, F) >= (2/pi) log(R/r)` for plates meeting every
/// circle `S(z0, rho)`, `r < rho < R`.
///
/// The plane is replaced by the disk `B(z0, 8R)` with a reflecting boundary,
/// which can only lower the capacity.
pub fn plane_minorant_check(e: &Plate, f: &Plate, z0: C64, r: f64, big_r: f64, n: usize, opts: &SolveOptions) -> Result<MinorantReport> {
    if !(r > 0.0 && big_r > r) {
        return Err(Error::arg(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    let step = (big_r - r) / 1000.0;
    for (name, plate) in [("E", e), ("F", f)] {
        let dists: Vec<f64> = plate.samples(step).iter().map(|z| (z - z0).norm()).collect();
        let lo = dists.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = dists.iter().copied().fold(0.0, f64::max);
        let decades = (big_r / r).log10();
        let count = (decades * 12.0).ceil() as usize;
        for k in 1..count {
            let rho = r * (big_r / r).powf(k as f64 / count as f64);
            if rho < lo || rho > hi {
                return Err(Error::Precondition(format!("plate {name} misses the circle of radius {rho:.4}")));
            }
        }
    }
    let spec = CondenserSpec {
        domain: Domain::Disk {
            center: z0,
            radius: 8.0 * big_r,
        },
        e: e.clone(),
        f: f.clone(),
        n,
    };
    let cap = condenser_capacity(&spec, opts)?.value;
    let bound = 2.0 / PI * (big_r / r).ln();
    let allowance = 0.03 * bound;
    Ok(MinorantReport {
        capacity: cap,
        bound,
        margin: cap - bound,
        allowance,
        holds: cap >= bound - allowance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingOptions {
    /// Grid size for the image capacity.
    pub n: usize,
    /// Relative allowance for stacked discretisation errors.
    pub tol_geom: f64,
    /// Points on each sampled circle or boundary component.
    pub boundary_points: usize,
    pub solve: SolveOptions,
}

impl Default for RingOptions {
    fn default() -> Self {
        RingOptions {
            n: 256,
            tol_geom: 0.05,
            boundary_points: 2048,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingReport {
    /// Capacity of the image condenser `(f(S1), f(S2); f(D))`.
    pub lhs: f64,
    /// `(int_{r1}^{r2} dr / ||Q||(r))^-1`.
    pub rhs: f64,
    /// `rhs / lhs - 1`.
    pub slack: f64,
    pub holds: bool,
}

/// Pieces of the circle `S(z0, r)` inside the closed domain, as polylines.
fn circle_in_domain(domain: &Domain, z0: C64, r: f64, m: usize) -> Vec<Vec<C64>> {
    let pts: Vec<(C64, bool)> = (0..m)
        .map(|k| {
            let z = z0 + C64::from_polar(r, 2.0 * PI * k as f64 / m as f64);
            (z, domain.contains(z))
        })
        .collect();
    if pts.iter().all(|p| p.1) {
        let mut all: Vec<C64> = pts.iter().map(|p| p.0).collect();
        all.push(all[0]);
        return vec![all];
    }
    // Rotate so that the walk starts outside, then collect inside runs.
    let start = pts.iter().position(|p| !p.1).unwrap_or(0);
    let mut pieces = Vec::new();
    let mut cur: Vec<C64> = Vec::new();
    for s in 0..=m {
        let (z, inside) = pts[(start + s) % m];
        if inside {
            cur.push(z);
        } else if cur.len() >= 2 {
            pieces.push(std::mem::take(&mut cur));
        } else {
            cur.clear();
        }
    }
    pieces
}

fn image_plate(f: &dyn PlaneMap, pieces: Vec<Vec<C64>>) -> Result<Plate> {
    let mut parts = Vec::with_capacity(pieces.len());
    for piece in pieces {
        let img = piece.iter().map(|z| f.eval(*z)).collect::<Result<Vec<_>>>()?;
        if img.iter().any(|w| !(w.re.is_finite() && w.im.is_finite())) {
            return Err(Error::Geometry("image of a ring circle is not finite".into()));
        }
        parts.push(Plate::Polyline {
            points: img,
            closed: false,
        });
    }
    match parts.len() {
        0 => Err(Error::Geometry("ring circle misses the domain".into())),
        1 => Ok(parts.pop().unwrap()),
        _ => Ok(Plate::Union { parts }),
    }
}

/// `(int_{r1}^{r2} dr / ||Q||(z0, r))^-1` by Gauss panels in `log r`.
pub fn ring_rhs(q: &dyn Density, domain: &Domain, z0: C64, r1: f64, r2: f64, quad: &QuadratureOptions) -> Result<f64> {
    let panels = ((r2 / r1).log10() * 12.0).ceil().max(1.0) as usize;
    let mut nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|k| {
            let a = r1.ln() + (r2 / r1).ln() * k as f64 / panels as f64;
            let b = r1.ln() + (r2 / r1).ln() * (k + 1) as f64 / panels as f64;
            gauss_legendre(a, b).map(|(s, w)| (s.exp(), w))
        })
        .collect();
    nodes.sort_by(|a, b| b.0.total_cmp(&a.0));
    let radii: Vec<f64> = nodes.iter().map(|p| p.0).collect();
    let norm = circle_norm(q, domain, z0, &radii, quad)?;
    let mut integral = 0.0;
    for (k, &(r, w)) in nodes.iter().enumerate() {
        let v = norm.values[k];
        if v == 0.0 {
            return Ok(0.0);
        }
        integral += w * r / v;
    }
    Ok(1.0 / integral)
}

/// Ring `Q`-homeomorphism inequality `M(f(S1), f(S2); f(D)) <= rhs` at `z0`.
///
/// `domain` must be simply connected; its image is approximated by the image
/// of a boundary polyline.
#[allow(clippy::too_many_arguments)]
pub fn ring_inequality_check(
    f: &dyn PlaneMap,
    domain: &Domain,
    z0: C64,
    r1: f64,
    r2: f64,
    q: &dyn Density,
    quad: &QuadratureOptions,
    opts: &RingOptions,
) -> Result<RingReport> {
    if !(r1 > 0.0 && r2 > r1 && r2 < domain.sup_distance(z0)) {
        return Err(Error::arg(format!("need 0 < r1 < r2 < d(z0), got {r1}, {r2}")));
    }
    let boundary = domain.boundary(opts.boundary_points)?;
    if boundary.len() != 1 {
        return Err(Error::Unsupported("ring check needs a simply connected domain".into()));
    }
    let outer = boundary[0].iter().map(|z| f.eval(*z)).collect::<Result<Vec<_>>>()?;
    let area = polygon_area(&outer);
    if !area.is_finite() || area.abs() < 1e-12 {
        return Err(Error::Geometry("image domain is degenerate".into()));
    }
    let src_area = polygon_area(&boundary[0]);
    if area.signum() != src_area.signum() {
        return Err(Error::Geometry("map reverses orientation".into()));
    }
    let m = opts.boundary_points;
    let e = image_plate(f, circle_in_domain(domain, z0, r1, m))?;
    let g = image_plate(f, circle_in_domain(domain, z0, r2, m))?;
    let spec = CondenserSpec {
        domain: Domain::Polygon { vertices: outer },
        e,
        f: g,
        n: opts.n,
    };
    let lhs = condenser_capacity(&spec, &opts.solve)?.value;
    let rhs = ring_rhs(q, domain, z0, r1, r2, quad)?;
    Ok(RingReport {
        lhs,
        rhs,
        slack: rhs / lhs - 1.0,
        holds: lhs <= rhs * (1.0 + opts.tol_geom),
    })
}

/// Convenience: the two boundary circles of a round annulus as plates.
pub fn annulus_plates(center: C64, inner: f64, outer: f64) -> (Plate, Plate) {
    (
        Plate::Circle { center, radius: inner },
        Plate::Circle { center, radius: outer },
    )
}

