//! Conformal maps onto the disk and round annuli.
//!
//! `log|w|` is fitted on the boundary by least squares in Vandermonde-with-
//! Arnoldi bases: `w = e^{i theta} (z - a) exp(G(z))` with `G` a polynomial
//! (plus a polynomial in `1/(z - b)` for doubly connected domains).

use super::arnoldi::ArnoldiBasis;
use super::solve::QcSolution;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::{point_in_polygon, point_segment_distance, polygon_area, C64};
use crate::grid::{ComplexField, DomainMask};
use crate::maps::PlaneMap;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Boundary samples per component (half for fitting, half for testing).
const BOUNDARY_SAMPLES: usize = 2048;
const DEGREES: [usize; 6] = [8, 16, 32, 64, 128, 200];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum MapTarget {
    Disk,
    Annulus { inner_radius: f64 },
}

/// Boundary points of one component with their images.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryTable {
    pub points: Vec<C64>,
    pub images: Vec<C64>,
    /// Unwrapped image arguments, strictly monotone along `points`.
    pub angles: Vec<f64>,
}

impl BoundaryTable {
    fn new(points: Vec<C64>, images: Vec<C64>) -> Result<Self> {
        let mut angles = Vec::with_capacity(images.len());
        let mut prev = 0.0;
        for (k, w) in images.iter().enumerate() {
            let a = w.arg();
            let t = if k == 0 {
                a
            } else {
                prev + principal(a - prev)
            };
            angles.push(t);
            prev = t;
        }
        let table = BoundaryTable {
            points,
            images,
            angles,
        };
        table.check()?;
        Ok(table)
    }

    /// Total signed turn of the image, including the closing step.
    fn turn(&self) -> f64 {
        let m = self.angles.len();
        self.angles[m - 1] - self.angles[0] + principal(self.angles[0] - self.angles[m - 1])
    }

    fn check(&self) -> Result<()> {
        let m = self.angles.len();
        let total = self.turn();
        let closing = principal(self.angles[0] - self.angles[m - 1]);
        let monotone = self.angles.windows(2).all(|w| (w[1] - w[0]) * total > 0.0) && closing * total > 0.0;
        if !monotone || (total.abs() - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::Geometry(
                "boundary correspondence is not injective and monotone".into(),
            ));
        }
        Ok(())
    }

    /// Boundary point whose image has argument `theta` (mod 2 pi), by linear
    /// interpolation in the table.
    pub fn preimage(&self, theta: f64) -> C64 {
        let m = self.angles.len();
        let a0 = self.angles[0];
        let sign = self.turn().signum();
        // position along the table, measured in the traversal direction
        let s = (sign * (theta - a0)).rem_euclid(2.0 * PI);
        let rel = |k: usize| if k == m { 2.0 * PI } else { sign * (self.angles[k] - a0) };
        let mut lo = 0;
        let mut hi = m;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if rel(mid) <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (p, q) = (self.points[lo], self.points[hi % m]);
        let t = (s - rel(lo)) / (rel(hi) - rel(lo));
        p + (q - p) * t
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["theta", "re_w", "im_w"])?;
        for (t, v) in self.angles.iter().zip(&self.images) {
            out.serialize((t.rem_euclid(2.0 * PI), v.re, v.im))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// A conformal map onto the unit disk or a round annulus `r* < |w| < 1`.
#[derive(Debug, Clone)]
pub struct DiskMap {
    pub target: MapTarget,
    /// `w(center) = 0` (disk) or the hole point `center` (annulus).
    pub center: C64,
    pub boundary: Vec<BoundaryTable>,
    pub degree: usize,
    /// Max deviation of `log|w|` from its target on the test points.
    pub boundary_error: f64,
    /// Relative RMS Cauchy–Riemann defect at interior sample points.
    pub cr_defect: f64,
    poly: ArnoldiBasis,
    poly_c: Vec<C64>,
    laurent: Option<(ArnoldiBasis, Vec<C64>)>,
    rotation: C64,
    outline: Vec<Vec<C64>>,
}

impl DiskMap {
    fn g(&self, z: C64) -> C64 {
        let mut g: C64 = self.poly.eval(z).iter().zip(&self.poly_c).map(|(a, b)| a * b).sum();
        if let Some((b, c)) = &self.laurent {
            g += b.eval(z).iter().skip(1).zip(c).map(|(a, b)| a * b).sum::<C64>();
        }
        g
    }

    pub fn eval_at(&self, z: C64) -> C64 {
        self.rotation * (z - self.center) * self.g(z).exp()
    }

    /// Conformal modulus `log(1/r*) / 2 pi` for annulus targets.
    pub fn modulus(&self) -> Option<f64> {
        match self.target {
            MapTarget::Annulus { inner_radius } => Some((1.0 / inner_radius).ln() / (2.0 * PI)),
            MapTarget::Disk => None,
        }
    }

    /// Whether `z` is in the mapped domain or within `slack` of its boundary.
    pub fn covers(&self, z: C64, slack: f64) -> bool {
        let inside = point_in_polygon(z, &self.outline[0])
            && self.outline[1..].iter().all(|h| !point_in_polygon(z, h));
        inside || self.distance_to_boundary(z) <= slack
    }

    fn distance_to_boundary(&self, z: C64) -> f64 {
        self.outline
            .iter()
            .flat_map(|c| (0..c.len()).map(move |k| point_segment_distance(z, c[k], c[(k + 1) % c.len()])))
            .fold(f64::INFINITY, f64::min)
    }
}

impl PlaneMap for DiskMap {
    fn eval(&self, z: C64) -> Result<C64> {
        Ok(self.eval_at(z))
    }
}

struct Fit {
    poly: (ArnoldiBasis, Vec<C64>),
    laurent: Option<(ArnoldiBasis, Vec<C64>)>,
    log_r: f64,
    error: f64,
}

/// Least-squares fit of `Re G = -log|z - a|` (outer) and `log r* - log|z - a|` (inner).
fn fit(outer: &[C64], inner: Option<&[C64]>, a: C64, deg: usize) -> Option<Fit> {
    let fit_pts: Vec<C64> = outer
        .iter()
        .step_by(2)
        .chain(inner.into_iter().flat_map(|c| c.iter().step_by(2)))
        .copied()
        .collect();
    let n_outer = outer.len().div_ceil(2);
    let scale = outer.iter().map(|z| (z - a).norm()).fold(0.0, f64::max);
    let (poly, pq) = ArnoldiBasis::fit(&fit_pts, a, scale, false, deg);
    let lau = inner.map(|c| {
        let s = c.iter().map(|z| (z - a).norm()).fold(f64::INFINITY, f64::min);
        ArnoldiBasis::fit(&fit_pts, a, s, true, deg)
    });
    let rows = fit_pts.len();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    cols.push(pq[0].iter().map(|v| v.re).collect());
    for q in &pq[1..] {
        cols.push(q.iter().map(|v| v.re).collect());
        cols.push(q.iter().map(|v| -v.im).collect());
    }
    if let Some((_, lq)) = &lau {
        for q in &lq[1..] {
            cols.push(q.iter().map(|v| v.re).collect());
            cols.push(q.iter().map(|v| -v.im).collect());
        }
        cols.push((0..rows).map(|k| if k >= n_outer { -1.0 } else { 0.0 }).collect());
    }
    if 2 * cols.len() > rows {
        return None;
    }
    let mat = DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]);
    let rhs = DVector::from_iterator(rows, fit_pts.iter().map(|z| -(z - a).norm().ln()));
    let svd = mat.svd(true, true);
    let x = svd.solve(&rhs, 1e-13).ok()?;
    let take = |idx: &mut usize, basis: usize| -> Vec<C64> {
        let c: Vec<C64> = (0..basis).map(|k| C64::new(x[*idx + 2 * k], x[*idx + 2 * k + 1])).collect();
        *idx += 2 * basis;
        c
    };
    let mut idx = 1;
    let mut poly_c = vec![C64::new(x[0], 0.0)];
    poly_c.extend(take(&mut idx, pq.len() - 1));
    let laurent = lau.map(|(b, lq)| (b, take(&mut idx, lq.len() - 1)));
    let log_r = if laurent.is_some() { x[idx] } else { 0.0 };
    let mut out = Fit {
        poly: (poly, poly_c),
        laurent,
        log_r,
        error: 0.0,
    };
    let g = |z: C64| {
        let mut g: C64 = out.poly.0.eval(z).iter().zip(&out.poly.1).map(|(a, b)| a * b).sum();
        if let Some((b, c)) = &out.laurent {
            g += b.eval(z).iter().skip(1).zip(c).map(|(a, b)| a * b).sum::<C64>();
        }
        g
    };
    let mut err: f64 = 0.0;
    for z in outer.iter().skip(1).step_by(2) {
        err = err.max(((z - a).norm().ln() + g(*z).re).abs());
    }
    if let Some(c) = inner {
        for z in c.iter().skip(1).step_by(2) {
            err = err.max(((z - a).norm().ln() + g(*z).re - log_r).abs());
        }
    }
    out.error = if err.is_finite() { err } else { f64::INFINITY };
    Some(out)
}

fn best_fit(outer: &[C64], inner: Option<&[C64]>, a: C64) -> Result<Fit> {
    let mut best: Option<Fit> = None;
    let mut worse = 0;
    for &deg in &DEGREES {
        let Some(f) = fit(outer, inner, a, deg) else { break };
        let improved = best.as_ref().is_none_or(|b| f.error < b.error);
        if improved {
            worse = 0;
            let done = f.error < 1e-13;
            best = Some(f);
            if done {
                break;
            }
        } else {
            worse += 1;
            if worse >= 2 {
                break;
            }
        }
    }
    best.ok_or_else(|| Error::Geometry("too few boundary samples for a conformal fit".into()))
}

fn ccw(mut c: Vec<C64>, want_ccw: bool) -> Vec<C64> {
    if (polygon_area(&c) > 0.0) != want_ccw {
        c.reverse();
    }
    c
}

fn interior_samples(outline: &[Vec<C64>], count: usize) -> Vec<C64> {
    let outer = &outline[0];
    let (mut lo, mut hi) = (outer[0], outer[0]);
    for z in outer {
        lo = C64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = C64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let k = (count as f64).sqrt().ceil() as usize + 2;
    let diam = (hi - lo).norm();
    let mut out = Vec::new();
    for j in 1..k {
        for i in 1..k {
            let z = lo + C64::new((hi.re - lo.re) * i as f64 / k as f64, (hi.im - lo.im) * j as f64 / k as f64);
            let inside = point_in_polygon(z, outer) && outline[1..].iter().all(|h| !point_in_polygon(z, h));
            let clear = outline
                .iter()
                .flat_map(|c| (0..c.len()).map(move |m| point_segment_distance(z, c[m], c[(m + 1) % c.len()])))
                .fold(f64::INFINITY, f64::min)
                > 0.02 * diam;
            if inside && clear {
                out.push(z);
            }
        }
    }
    out
}

fn cr_defect(map: &DiskMap, pts: &[C64], exec: Execution) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    let scale = map.outline[0].iter().map(|z| (z - map.center).norm()).fold(0.0, f64::max);
    let eta = 1e-5 * scale;
    let parts = exec::map_collect(exec, pts.len(), |k| {
        let z = pts[k];
        let wx = (map.eval_at(z + eta) - map.eval_at(z - eta)) / (2.0 * eta);
        let wy = (map.eval_at(z + C64::new(0.0, eta)) - map.eval_at(z - C64::new(0.0, eta))) / (2.0 * eta);
        let dzbar = (wx + C64::i() * wy) * 0.5;
        let dz = (wx - C64::i() * wy) * 0.5;
        (dzbar.norm_sqr(), dz.norm_sqr())
    });
    let (num, den) = parts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    (num / den).sqrt()
}

fn assemble(
    fitted: Fit,
    outline: Vec<Vec<C64>>,
    a: C64,
    anchor: C64,
    target: MapTarget,
    exec: Execution,
) -> Result<DiskMap> {
    let mut map = DiskMap {
        target,
        center: a,
        boundary: Vec::new(),
        degree: fitted.poly.0.degree(),
        boundary_error: fitted.error,
        cr_defect: 0.0,
        poly: fitted.poly.0,
        poly_c: fitted.poly.1,
        laurent: fitted.laurent,
        rotation: C64::new(1.0, 0.0),
        outline,
    };
    let w = map.eval_at(anchor);
    map.rotation = w.conj() / w.norm();
    let mut tables = Vec::new();
    for c in &map.outline {
        let images = exec::map_collect(exec, c.len(), |k| map.eval_at(c[k]));
        tables.push(BoundaryTable::new(c.clone(), images)?);
    }
    map.boundary = tables;
    let samples = interior_samples(&map.outline, 400);
    map.cr_defect = cr_defect(&map, &samples, exec);
    Ok(map)
}

/// Riemann map of the Jordan domain bounded by `boundary` (closed, densely
/// sampled), normalised by `w(a) = 0` and `w(anchor) > 0`.
pub fn riemann_map_curve(boundary: &[C64], a: C64, anchor: C64, exec: Execution) -> Result<DiskMap> {
    let outer = ccw(boundary.to_vec(), true);
    if !point_in_polygon(a, &outer) {
        return Err(Error::Geometry("normalisation point lies outside the curve".into()));
    }
    let fitted = best_fit(&outer, None, a)?;
    assemble(fitted, vec![outer], a, anchor, MapTarget::Disk, exec)
}

/// Map of the ring between `outer` and `inner` onto `r* < |w| < 1`, with
/// `b` a point of the hole and `w(anchor) > 0`.
pub fn annulus_map_curves(outer: &[C64], inner: &[C64], b: C64, anchor: C64, exec: Execution) -> Result<DiskMap> {
    let outer = ccw(outer.to_vec(), true);
    let inner = ccw(inner.to_vec(), true);
    if !point_in_polygon(b, &inner) {
        return Err(Error::Geometry("hole point lies outside the inner curve".into()));
    }
    let fitted = best_fit(&outer, Some(&inner), b)?;
    let r = fitted.log_r.exp();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Geometry(format!("fitted inner radius {r} is not in (0, 1)")));
    }
    assemble(fitted, vec![outer, inner], b, anchor, MapTarget::Annulus { inner_radius: r }, exec)
}

/// Riemann map of a simply connected catalog domain, normalised at its
/// interior point and the first boundary sample.
pub fn riemann_map(mask: &DomainMask, exec: Execution) -> Result<DiskMap> {
    let d = &mask.domain;
    if d.connectivity() != Some(1) || mask.holes() > 0 {
        return Err(Error::Topology(format!("{} is not simply connected", d.name())));
    }
    let b = d.boundary(BOUNDARY_SAMPLES)?;
    riemann_map_curve(&b[0], d.interior_point(), b[0][0], exec)
}

/// Conformal map of a doubly connected catalog domain onto a round annulus.
pub fn annulus_map(mask: &DomainMask, exec: Execution) -> Result<DiskMap> {
    let d = &mask.domain;
    let hole = d.hole_point();
    if d.connectivity() != Some(2) || hole.is_none() {
        return Err(Error::Topology(format!("{} is not doubly connected", d.name())));
    }
    let b = d.boundary(BOUNDARY_SAMPLES)?;
    annulus_map_curves(&b[0], &b[1], hole.unwrap(), b[0][0], exec)
}

/// `g = R o f` on the source grid.
#[derive(Debug, Clone)]
pub struct ComposedMap {
    pub sol: QcSolution,
    pub mapper: DiskMap,
    /// `g` at masked cells of the source grid.
    pub values: ComplexField,
    /// Source boundary points with their images under `g`.
    pub boundary: Vec<BoundaryTable>,
}

impl PlaneMap for ComposedMap {
    fn eval(&self, z: C64) -> Result<C64> {
        Ok(self.mapper.eval_at(self.sol.eval(z)?))
    }
}

pub fn compose_normalized(sol: &QcSolution, mapper: &DiskMap, exec: Execution) -> Result<ComposedMap> {
    let grid = sol.f.grid;
    let slack = 2.0 * grid.spacing();
    let n = grid.len();
    let values = exec::map_collect(exec, n, |k| {
        if !sol.f.inside[k] {
            return Ok(C64::new(0.0, 0.0));
        }
        let fz = sol.f.values[k];
        if !mapper.covers(fz, slack) {
            return Err(Error::Composition(format!(
                "image point {fz} of cell {} lies outside the mapped domain",
                grid.point(k)
            )));
        }
        Ok(mapper.eval_at(fz))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let src = sol.domain().boundary(BOUNDARY_SAMPLES)?;
    let mut boundary = Vec::new();
    for c in src {
        let images = exec::map_collect(exec, c.len(), |k| mapper.eval_at(sol.eval_at(c[k])));
        boundary.push(BoundaryTable::new(c, images)?);
    }
    Ok(ComposedMap {
        sol: sol.clone(),
        mapper: mapper.clone(),
        values: ComplexField {
            grid,
            values,
            inside: sol.f.inside.clone(),
            clamped: 0,
        },
        boundary,
    })
}

/// Conformal map of `f(D)` normalised so that `g = R o f` sends the domain's
/// interior point to 0 and its first boundary sample to 1 (disk case), or the
/// first outer sample onto the positive axis (annulus case).
pub fn image_mapper(sol: &QcSolution, exec: Execution) -> Result<DiskMap> {
    let d = sol.domain();
    let b = d.boundary(BOUNDARY_SAMPLES)?;
    let img: Vec<Vec<C64>> = b.iter().map(|c| sol.eval_many(c, exec)).collect();
    match d.connectivity() {
        Some(1) => riemann_map_curve(&img[0], sol.eval_at(d.interior_point()), img[0][0], exec),
        Some(2) => {
            let hole = d.hole_point().ok_or_else(|| Error::Topology("no hole point".into()))?;
            annulus_map_curves(&img[0], &img[1], sol.eval_at(hole), img[0][0], exec)
        }
        _ => Err(Error::Topology(format!("{} has unsupported connectivity", d.name()))),
    }
}

/// Solution composed with the conformal map of its image.
pub fn normalize(sol: &QcSolution, exec: Execution) -> Result<ComposedMap> {
    let mapper = image_mapper(sol, exec)?;
    compose_normalized(sol, &mapper, exec)
}

/// Angle difference reduced to `(-pi, pi]`.
fn principal(t: f64) -> f64 {
    let r = (t + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}
