//! Uniform cell grids, catalog domains and sampled fields.

use crate::error::{Error, Result};
use crate::geometry::{c, circle_points, point_in_polygon, segment_hit, C64};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::PI;

/// Square grid of `n x n` cells centred at `center`, sampled at cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: C64,
    pub half_width: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(center: C64, half_width: f64, n: usize) -> Result<Self> {
        let g = GridSpec {
            center,
            half_width,
            n,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::validation(format!(
                "grid half_width must be positive, got {}",
                self.half_width
            )));
        }
        if self.n < 16 || !self.n.is_power_of_two() {
            return Err(Error::validation(format!(
                "grid n must be a power of two >= 16, got {}",
                self.n
            )));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(Error::validation("grid center must be finite"));
        }
        Ok(())
    }

    /// Smallest square grid holding the box `[lo, hi]` enlarged by `margin` cells.
    pub fn fitted(lo: C64, hi: C64, n: usize, margin_cells: f64) -> Result<Self> {
        let center = (lo + hi) * 0.5;
        let half = 0.5 * (hi.re - lo.re).max(hi.im - lo.im);
        // half_width h with h = half + margin * (2h / n)
        let denom = 1.0 - 2.0 * margin_cells / n as f64;
        if denom <= 0.0 {
            return Err(Error::arg("margin too large for grid size"));
        }
        GridSpec::new(center, half / denom, n)
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Centre of cell `(i, j)`: column `i` along x, row `j` along y.
    #[inline]
    pub fn cell_center(&self, i: usize, j: usize) -> C64 {
        let h = self.spacing();
        self.center
            + c(
                -self.half_width + (i as f64 + 0.5) * h,
                -self.half_width + (j as f64 + 0.5) * h,
            )
    }

    #[inline]
    pub fn point(&self, idx: usize) -> C64 {
        self.cell_center(idx % self.n, idx / self.n)
    }

    /// Continuous cell coordinates of `z` (cell centres sit at integers).
    #[inline]
    pub fn coords(&self, z: C64) -> (f64, f64) {
        let h = self.spacing();
        let d = z - self.center;
        (
            (d.re + self.half_width) / h - 0.5,
            (d.im + self.half_width) / h - 0.5,
        )
    }

    pub fn contains_point(&self, z: C64) -> bool {
        let d = z - self.center;
        d.re.abs() <= self.half_width && d.im.abs() <= self.half_width
    }
}

/// Catalog domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Disk {
        center: C64,
        radius: f64,
    },
    /// `{ |z - center| < radius, Im(z - center) > 0 }`.
    UpperHalfDisk {
        center: C64,
        radius: f64,
    },
    Annulus {
        center: C64,
        inner: f64,
        outer: f64,
    },
    /// Unit disk minus the real segment `[x0, x1]`.
    SlitDisk {
        x0: f64,
        x1: f64,
    },
    Rectangle {
        min: C64,
        max: C64,
    },
    Ellipse {
        center: C64,
        semi_x: f64,
        semi_y: f64,
    },
    /// Open square minus a concentric closed square.
    SquareFrame {
        center: C64,
        outer_half: f64,
        inner_half: f64,
    },
    /// Interior of a simple closed polygon.
    Polygon {
        vertices: Vec<C64>,
    },
    Plane,
}

impl Domain {
    pub fn unit_disk() -> Self {
        Domain::Disk {
            center: c(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domain::Disk { .. } => "disk",
            Domain::UpperHalfDisk { .. } => "upper_half_disk",
            Domain::Annulus { .. } => "annulus",
            Domain::SlitDisk { .. } => "slit_disk",
            Domain::Rectangle { .. } => "rectangle",
            Domain::Ellipse { .. } => "ellipse",
            Domain::SquareFrame { .. } => "square_frame",
            Domain::Polygon { .. } => "polygon",
            Domain::Plane => "plane",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::validation(format!("{what} must be positive, got {v}")))
            }
        };
        match self {
            Domain::Disk { radius, .. } | Domain::UpperHalfDisk { radius, .. } => {
                pos(*radius, "radius")
            }
            Domain::Annulus { inner, outer, .. } => {
                pos(*inner, "inner radius")?;
                if outer <= inner {
                    return Err(Error::validation("annulus needs inner < outer"));
                }
                Ok(())
            }
            Domain::SlitDisk { x0, x1 } => {
                if !(-1.0 < *x0 && x0 < x1 && *x1 <= 1.0) {
                    return Err(Error::validation(format!(
                        "slit [{x0}, {x1}] must satisfy -1 < x0 < x1 <= 1"
                    )));
                }
                Ok(())
            }
            Domain::Rectangle { min, max } => {
                if !(max.re > min.re && max.im > min.im) {
                    return Err(Error::validation("rectangle needs min < max"));
                }
                Ok(())
            }
            Domain::Ellipse { semi_x, semi_y, .. } => {
                pos(*semi_x, "semi_x")?;
                pos(*semi_y, "semi_y")
            }
            Domain::SquareFrame {
                outer_half,
                inner_half,
                ..
            } => {
                pos(*inner_half, "inner_half")?;
                if outer_half <= inner_half {
                    return Err(Error::validation("square frame needs inner_half < outer_half"));
                }
                Ok(())
            }
            Domain::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::validation("polygon needs at least 3 vertices"));
                }
                Ok(())
            }
            Domain::Plane => Ok(()),
        }
    }

    /// Membership in the open domain.
    pub fn contains(&self, z: C64) -> bool {
        match self {
            Domain::Disk { center, radius } => (z - center).norm() < *radius,
            Domain::UpperHalfDisk { center, radius } => {
                (z - center).norm() < *radius && z.im > center.im
            }
            Domain::Annulus {
                center,
                inner,
                outer,
            } => {
                let r = (z - center).norm();
                r > *inner && r < *outer
            }
            Domain::SlitDisk { x0, x1 } => {
                z.norm() < 1.0 && !(z.im == 0.0 && z.re >= *x0 && z.re <= *x1)
            }
            Domain::Rectangle { min, max } => {
                z.re > min.re && z.re < max.re && z.im > min.im && z.im < max.im
            }
            Domain::Ellipse {
                center,
                semi_x,
                semi_y,
            } => {
                let d = z - center;
                (d.re / semi_x).powi(2) + (d.im / semi_y).powi(2) < 1.0
            }
            Domain::SquareFrame {
                center,
                outer_half,
                inner_half,
            } => {
                let d = z - center;
                let m = d.re.abs().max(d.im.abs());
                m < *outer_half && m > *inner_half
            }
            Domain::Polygon { vertices } => point_in_polygon(z, vertices),
            Domain::Plane => true,
        }
    }

    /// Whether the straight segment between two inside points stays in the
    /// domain, up to features narrower than the segment (only slits matter
    /// at grid scale).
    pub fn segment_clear(&self, p: C64, q: C64) -> bool {
        match self {
            Domain::SlitDisk { x0, x1 } => segment_hit(p, q, c(*x0, 0.0), c(x1.min(1.0), 0.0)).is_none(),
            _ => true,
        }
    }

    /// Number of boundary components of a bounded domain (`None` for the plane).
    pub fn connectivity(&self) -> Option<usize> {
        match self {
            Domain::Annulus { .. } | Domain::SquareFrame { .. } => Some(2),
            Domain::SlitDisk { x1, .. } if *x1 < 1.0 => Some(2),
            Domain::Plane => None,
            _ => Some(1),
        }
    }

    pub fn bounding_box(&self) -> Option<(C64, C64)> {
        let sq = |center: C64, h: f64| (center - c(h, h), center + c(h, h));
        Some(match self {
            Domain::Disk { center, radius } | Domain::Annulus { center, outer: radius, .. } => {
                sq(*center, *radius)
            }
            Domain::UpperHalfDisk { center, radius } => {
                (center - c(*radius, 0.0), center + c(*radius, *radius))
            }
            Domain::SlitDisk { .. } => sq(c(0.0, 0.0), 1.0),
            Domain::Rectangle { min, max } => (*min, *max),
            Domain::Ellipse {
                center,
                semi_x,
                semi_y,
            } => (center - c(*semi_x, *semi_y), center + c(*semi_x, *semi_y)),
            Domain::SquareFrame {
                center, outer_half, ..
            } => sq(*center, *outer_half),
            Domain::Polygon { vertices } => {
                let mut lo = vertices[0];
                let mut hi = vertices[0];
                for v in vertices {
                    lo = c(lo.re.min(v.re), lo.im.min(v.im));
                    hi = c(hi.re.max(v.re), hi.im.max(v.im));
                }
                (lo, hi)
            }
            Domain::Plane => return None,
        })
    }

    /// `sup_{z in D} |z - z0|` (bounding-box estimate for polygons).
    pub fn sup_distance(&self, z0: C64) -> f64 {
        match self {
            Domain::Disk { center, radius }
            | Domain::UpperHalfDisk { center, radius }
            | Domain::Annulus {
                center,
                outer: radius,
                ..
            } => (z0 - center).norm() + radius,
            Domain::SlitDisk { .. } => z0.norm() + 1.0,
            Domain::Plane => f64::INFINITY,
            _ => {
                let (lo, hi) = self.bounding_box().expect("bounded");
                [lo, hi, c(lo.re, hi.im), c(hi.re, lo.im)]
                    .iter()
                    .map(|p| (p - z0).norm())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// A point well inside the domain (the conformal centre used for normalisation).
    pub fn interior_point(&self) -> C64 {
        match self {
            Domain::Disk { center, .. } | Domain::Ellipse { center, .. } => *center,
            Domain::UpperHalfDisk { center, radius } => center + c(0.0, 0.5 * radius),
            Domain::Annulus {
                center,
                inner,
                outer,
            } => center + 0.5 * (inner + outer),
            Domain::SlitDisk { .. } => c(0.0, 0.5),
            Domain::Rectangle { min, max } => (min + max) * 0.5,
            Domain::SquareFrame {
                center,
                outer_half,
                inner_half,
            } => center + 0.5 * (outer_half + inner_half),
            Domain::Polygon { vertices } => {
                let n = vertices.len() as f64;
                vertices.iter().sum::<C64>() / n
            }
            Domain::Plane => c(0.0, 0.0),
        }
    }

    /// A point inside the bounded hole of a doubly connected domain.
    pub fn hole_point(&self) -> Option<C64> {
        match self {
            Domain::Annulus { center, .. } | Domain::SquareFrame { center, .. } => Some(*center),
            Domain::SlitDisk { x0, x1 } if *x1 < 1.0 => Some(c(0.5 * (x0 + x1), 0.0)),
            _ => None,
        }
    }

    /// Boundary components as closed polylines with `m` points on each smooth
    /// piece. The outer component comes first and is counter-clockwise.
    pub fn boundary(&self, m: usize) -> Result<Vec<Vec<C64>>> {
        let m = m.max(8);
        Ok(match self {
            Domain::Disk { center, radius } => vec![circle_points(*center, *radius, m)],
            Domain::Annulus {
                center,
                inner,
                outer,
            } => vec![
                circle_points(*center, *outer, m),
                circle_points(*center, *inner, m),
            ],
            Domain::Ellipse {
                center,
                semi_x,
                semi_y,
            } => vec![(0..m)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / m as f64;
                    center + c(semi_x * t.cos(), semi_y * t.sin())
                })
                .collect()],
            Domain::Rectangle { min, max } => {
                vec![rect_polyline(*min, *max, m)]
            }
            Domain::SquareFrame {
                center,
                outer_half,
                inner_half,
            } => vec![
                rect_polyline(
                    center - c(*outer_half, *outer_half),
                    center + c(*outer_half, *outer_half),
                    m,
                ),
                rect_polyline(
                    center - c(*inner_half, *inner_half),
                    center + c(*inner_half, *inner_half),
                    m,
                ),
            ],
            Domain::UpperHalfDisk { center, radius } => {
                let mut pts: Vec<C64> = (0..m)
                    .map(|k| center + C64::from_polar(*radius, PI * k as f64 / m as f64))
                    .collect();
                pts.extend((0..m).map(|k| {
                    center + c(-radius + 2.0 * radius * k as f64 / m as f64, 0.0)
                }));
                vec![pts]
            }
            Domain::Polygon { vertices } => vec![vertices.clone()],
            Domain::SlitDisk { .. } => {
                return Err(Error::Unsupported(
                    "slit disk boundary is not a Jordan curve; use the prime-end space".into(),
                ))
            }
            Domain::Plane => return Err(Error::Unsupported("plane has no boundary".into())),
        })
    }
}

fn rect_polyline(min: C64, max: C64, m: usize) -> Vec<C64> {
    let per = (m / 4).max(2);
    let corners = [min, c(max.re, min.im), max, c(min.re, max.im)];
    let mut pts = Vec::with_capacity(4 * per);
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        for s in 0..per {
            pts.push(a + (b - a) * (s as f64 / per as f64));
        }
    }
    pts
}

/// Cells of a grid whose centres lie in a domain.
#[derive(Debug, Clone)]
pub struct DomainMask {
    pub grid: GridSpec,
    pub inside: Vec<bool>,
    pub domain: Domain,
}

impl DomainMask {
    pub fn new(grid: GridSpec, domain: Domain) -> Result<Self> {
        grid.validate()?;
        domain.validate()?;
        let inside: Vec<bool> = (0..grid.len()).map(|k| domain.contains(grid.point(k))).collect();
        let mask = DomainMask {
            grid,
            inside,
            domain,
        };
        let count = mask.count();
        if count == 0 {
            return Err(Error::validation("domain mask has no inside cells"));
        }
        if mask.components() != 1 {
            return Err(Error::Topology("inside cells are not connected".into()));
        }
        Ok(mask)
    }

    /// Grid of `n` cells per side fitted to the domain's bounding box.
    pub fn fitted(domain: Domain, n: usize) -> Result<Self> {
        let (lo, hi) = domain
            .bounding_box()
            .ok_or_else(|| Error::arg("cannot fit a grid to an unbounded domain"))?;
        let grid = GridSpec::fitted(lo, hi, n, 2.0)?;
        DomainMask::new(grid, domain)
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    fn neighbours(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.grid.n;
        let (i, j) = (k % n, k / n);
        let mut out = [usize::MAX; 4];
        if i > 0 {
            out[0] = k - 1;
        }
        if i + 1 < n {
            out[1] = k + 1;
        }
        if j > 0 {
            out[2] = k - n;
        }
        if j + 1 < n {
            out[3] = k + n;
        }
        out.into_iter().filter(|&x| x != usize::MAX)
    }

    fn flood(&self, want: bool, seen: &mut [bool], start: usize) -> bool {
        let n = self.grid.n;
        let mut touches_border = false;
        let mut q = VecDeque::from([start]);
        seen[start] = true;
        while let Some(k) = q.pop_front() {
            let (i, j) = (k % n, k / n);
            if i == 0 || j == 0 || i + 1 == n || j + 1 == n {
                touches_border = true;
            }
            for nb in self.neighbours(k) {
                if !seen[nb] && self.inside[nb] == want {
                    seen[nb] = true;
                    q.push_back(nb);
                }
            }
        }
        touches_border
    }

    /// Number of 4-connected components of the inside cells.
    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.inside.len()];
        let mut count = 0;
        for k in 0..self.inside.len() {
            if self.inside[k] && !seen[k] {
                self.flood(true, &mut seen, k);
                count += 1;
            }
        }
        count
    }

    /// Number of bounded complementary components (holes) seen by the mask.
    pub fn holes(&self) -> usize {
        let mut seen = vec![false; self.inside.len()];
        let mut holes = 0;
        for k in 0..self.inside.len() {
            if !self.inside[k] && !seen[k] && !self.flood(false, &mut seen, k) {
                holes += 1;
            }
        }
        holes
    }

    pub fn inside_points(&self) -> impl Iterator<Item = (usize, C64)> + '_ {
        (0..self.grid.len())
            .filter(|&k| self.inside[k])
            .map(|k| (k, self.grid.point(k)))
    }
}

/// Complex values on the cells of a grid, with a mask of meaningful cells.
#[derive(Debug, Clone)]
pub struct ComplexField {
    pub grid: GridSpec,
    pub values: Vec<C64>,
    pub inside: Vec<bool>,
    /// Number of cells whose modulus was clamped below one.
    pub clamped: usize,
}

impl ComplexField {
    pub fn inside_values(&self) -> impl Iterator<Item = C64> + '_ {
        self.values
            .iter()
            .zip(&self.inside)
            .filter(|(_, &b)| b)
            .map(|(v, _)| *v)
    }
}

/// Real values on grid cells, bilinearly interpolated between centres.
#[derive(Debug, Clone)]
pub struct ScalarGrid {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn sample(&self, z: C64) -> f64 {
        let n = self.grid.n;
        let (x, y) = self.grid.coords(z);
        let x = x.clamp(0.0, (n - 1) as f64);
        let y = y.clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        let j = (y.floor() as usize).min(n - 2);
        let (fx, fy) = (x - i as f64, y - j as f64);
        let v = |a: usize, b: usize| self.values[b * n + a];
        (1.0 - fy) * ((1.0 - fx) * v(i, j) + fx * v(i + 1, j))
            + fy * ((1.0 - fx) * v(i, j + 1) + fx * v(i + 1, j + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(GridSpec::new(c(0.0, 0.0), 1.0, 8).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), 1.0, 48).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), -1.0, 16).is_err());
        let g = GridSpec::new(c(0.0, 0.0), 1.0, 16).unwrap();
        assert_eq!(g.spacing(), 0.125);
        assert_eq!(g.cell_center(0, 0), c(-0.9375, -0.9375));
    }

    #[test]
    fn annulus_mask_has_one_hole() {
        let dom = Domain::Annulus {
            center: c(0.0, 0.0),
            inner: 0.4,
            outer: 1.0,
        };
        let m = DomainMask::fitted(dom, 64).unwrap();
        assert_eq!(m.holes(), 1);
        let disk = DomainMask::fitted(Domain::unit_disk(), 64).unwrap();
        assert_eq!(disk.holes(), 0);
    }

    #[test]
    fn slit_disk_membership() {
        let d = Domain::SlitDisk { x0: 0.0, x1: 1.0 };
        assert!(!d.contains(c(0.5, 0.0)));
        assert!(d.contains(c(0.5, 1e-12)));
        assert!(d.contains(c(-0.5, 0.0)));
    }

    #[test]
    fn bilinear_reproduces_linear_functions() {
        let g = GridSpec::new(c(0.0, 0.0), 1.0, 16).unwrap();
        let values = (0..g.len()).map(|k| 2.0 * g.point(k).re - g.point(k).im).collect();
        let s = ScalarGrid { grid: g, values };
        let z = c(0.123, -0.321);
        assert!((s.sample(z) - (2.0 * z.re - z.im)).abs() < 1e-12);
    }
}
