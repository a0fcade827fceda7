use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, segment_hit, C64};
use crate::grid::GridSpec;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// A condenser plate: a closed set given geometrically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "plate", rename_all = "snake_case")]
pub enum Plate {
    Circle { center: C64, radius: f64 },
    /// Closed disk.
    Disk { center: C64, radius: f64 },
    Segment { a: C64, b: C64 },
    Polyline { points: Vec<C64>, closed: bool },
    Union { parts: Vec<Plate> },
}

#[derive(Debug, Clone, Copy)]
enum Primitive {
    Circle { center: C64, radius: f64, filled: bool },
    Segment(C64, C64),
}

impl Plate {
    pub fn validate(&self) -> Result<()> {
        match self {
            Plate::Circle { radius, .. } | Plate::Disk { radius, .. } if !(*radius > 0.0 && radius.is_finite()) => {
                Err(Error::validation("plate radius must be positive"))
            }
            Plate::Segment { a, b } if a == b => Err(Error::validation("degenerate plate segment")),
            Plate::Polyline { points, .. } if points.len() < 2 => Err(Error::validation("plate polyline needs two points")),
            Plate::Polyline { points, .. } if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) => {
                Err(Error::Geometry("non-finite plate vertex".into()))
            }
            Plate::Union { parts } if parts.is_empty() => Err(Error::validation("empty plate union")),
            Plate::Union { parts } => parts.iter().try_for_each(Plate::validate),
            _ => Ok(()),
        }
    }

    fn primitives(&self, out: &mut Vec<Primitive>) {
        match self {
            Plate::Circle { center, radius } => out.push(Primitive::Circle {
                center: *center,
                radius: *radius,
                filled: false,
            }),
            Plate::Disk { center, radius } => out.push(Primitive::Circle {
                center: *center,
                radius: *radius,
                filled: true,
            }),
            Plate::Segment { a, b } => out.push(Primitive::Segment(*a, *b)),
            Plate::Polyline { points, closed } => {
                for w in points.windows(2) {
                    out.push(Primitive::Segment(w[0], w[1]));
                }
                if *closed && points.len() > 2 {
                    out.push(Primitive::Segment(points[points.len() - 1], points[0]));
                }
            }
            Plate::Union { parts } => parts.iter().for_each(|p| p.primitives(out)),
        }
    }

    /// Points along the plate with spacing at most `step`.
    pub fn samples(&self, step: f64) -> Vec<C64> {
        let mut prims = Vec::new();
        self.primitives(&mut prims);
        let mut out = Vec::new();
        for p in prims {
            match p {
                Primitive::Circle { center, radius, .. } => {
                    let m = ((2.0 * PI * radius / step).ceil() as usize).max(16);
                    out.extend((0..m).map(|k| center + C64::from_polar(radius, 2.0 * PI * k as f64 / m as f64)));
                }
                Primitive::Segment(a, b) => {
                    let m = (((b - a).norm() / step).ceil() as usize).max(1);
                    out.extend((0..=m).map(|k| a + (b - a) * (k as f64 / m as f64)));
                }
            }
        }
        out
    }

    /// Whether `z` lies in a filled part of the plate.
    pub fn covers(&self, z: C64) -> bool {
        let mut prims = Vec::new();
        self.primitives(&mut prims);
        prims.iter().any(|p| matches!(p, Primitive::Circle { center, radius, filled: true } if (z - center).norm() <= *radius))
    }
}

/// Plate primitives bucketed by grid cell for fast edge-crossing queries.
pub(crate) struct PreparedPlate {
    circles: Vec<(C64, f64, bool)>,
    buckets: HashMap<usize, Vec<(C64, C64)>>,
    grid: GridSpec,
}

impl PreparedPlate {
    pub(crate) fn new(plate: &Plate, grid: GridSpec) -> Self {
        let mut prims = Vec::new();
        plate.primitives(&mut prims);
        let h = grid.spacing();
        let n = grid.n as i64;
        let mut circles = Vec::new();
        let mut buckets: HashMap<usize, Vec<(C64, C64)>> = HashMap::new();
        for p in prims {
            match p {
                Primitive::Circle { center, radius, filled } => circles.push((center, radius, filled)),
                Primitive::Segment(a, b) => {
                    let (xa, ya) = grid.coords(a);
                    let (xb, yb) = grid.coords(b);
                    let lo_i = (xa.min(xb) - 1.5).floor().max(0.0) as i64;
                    let hi_i = ((xa.max(xb) + 1.5).ceil() as i64).min(n - 1);
                    let lo_j = (ya.min(yb) - 1.5).floor().max(0.0) as i64;
                    let hi_j = ((ya.max(yb) + 1.5).ceil() as i64).min(n - 1);
                    for j in lo_j..=hi_j {
                        for i in lo_i..=hi_i {
                            // Skip cells farther than 1.5 h from the segment.
                            let z = grid.cell_center(i as usize, j as usize);
                            if point_segment_distance(z, a, b) <= 1.5 * h {
                                buckets.entry(j as usize * grid.n + i as usize).or_default().push((a, b));
                            }
                        }
                    }
                }
            }
        }
        PreparedPlate { circles, buckets, grid }
    }

    /// Smallest fraction `t in [0, 1]` at which the edge from the centre of
    /// cell `k` to `q` (one cell away) meets the plate.
    pub(crate) fn hit(&self, k: usize, q: C64) -> Option<f64> {
        let p = self.grid.point(k);
        let d = q - p;
        let mut best: Option<f64> = None;
        let mut take = |t: f64| {
            if best.is_none_or(|b| t < b) {
                best = Some(t);
            }
        };
        for &(center, radius, _) in &self.circles {
            // |p + t d - c|^2 = R^2
            let w = p - center;
            let a = d.norm_sqr();
            let b = 2.0 * (w.re * d.re + w.im * d.im);
            let c0 = w.norm_sqr() - radius * radius;
            let disc = b * b - 4.0 * a * c0;
            if disc < 0.0 {
                continue;
            }
            let s = disc.sqrt();
            for t in [(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)] {
                if (0.0..=1.0).contains(&t) {
                    take(t);
                    break;
                }
            }
        }
        if let Some(segs) = self.buckets.get(&k) {
            for &(a, b) in segs {
                if let Some(t) = segment_hit(p, q, a, b) {
                    take(t);
                }
            }
        }
        best
    }

    pub(crate) fn covers(&self, z: C64) -> bool {
        self.circles
            .iter()
            .any(|&(center, radius, filled)| filled && (z - center).norm() <= radius)
    }
}

/// Minimum distance between two plates (0 if one covers a point of the other).
pub(crate) fn plate_distance(e: &Plate, f: &Plate, step: f64) -> f64 {
    let se = e.samples(step);
    let sf = f.samples(step);
    if se.iter().any(|z| f.covers(*z)) || sf.iter().any(|z| e.covers(*z)) {
        return 0.0;
    }
    // Bucket one sample set by coarse cells of size `cell` to prune pairs.
    let cell = 16.0 * step;
    let key = |z: C64| ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64);
    let mut map: HashMap<(i64, i64), Vec<C64>> = HashMap::new();
    for z in &sf {
        map.entry(key(*z)).or_default().push(*z);
    }
    let mut best = f64::INFINITY;
    for z in &se {
        let (i, j) = key(*z);
        for dj in -1..=1 {
            for di in -1..=1 {
                if let Some(v) = map.get(&(i + di, j + dj)) {
                    for w in v {
                        best = best.min((z - w).norm());
                    }
                }
            }
        }
    }
    if best.is_finite() {
        best
    } else {
        // Nothing within one coarse cell: distance is at least `cell`.
        se.iter()
            .flat_map(|z| sf.iter().map(move |w| (z - w).norm()))
            .fold(f64::INFINITY, f64::min)
    }
}
