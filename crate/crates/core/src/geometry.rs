//! Planar geometry on `Complex64` points.

use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Smallest `t in [0, 1]` where the segment `a + t (b - a)` meets segment `p q`.
pub fn segment_hit(a: C64, b: C64, p: C64, q: C64) -> Option<f64> {
    let r = b - a;
    let s = q - p;
    let denom = cross(r, s);
    let ap = p - a;
    if denom.abs() < 1e-300 {
        if cross(ap, r).abs() > 1e-14 * (r.norm() * ap.norm()).max(1e-300) {
            return None;
        }
        // Collinear overlap: first point of [p, q] reached from a along r.
        let rr = r.norm_sqr();
        if rr == 0.0 {
            return None;
        }
        let t0 = dot(p - a, r) / rr;
        let t1 = dot(q - a, r) / rr;
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        if hi < 0.0 || lo > 1.0 {
            return None;
        }
        return Some(lo.max(0.0));
    }
    let t = cross(ap, s) / denom;
    let u = cross(ap, r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some(t)
    } else {
        None
    }
}

#[inline]
pub fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

#[inline]
pub fn dot(a: C64, b: C64) -> f64 {
    a.re * b.re + a.im * b.im
}

pub fn point_segment_distance(z: C64, p: C64, q: C64) -> f64 {
    let d = q - p;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (z - p).norm();
    }
    let t = (dot(z - p, d) / l2).clamp(0.0, 1.0);
    (z - (p + d * t)).norm()
}

/// Even-odd point-in-polygon test for a closed polygon (last vertex joins the first).
pub fn point_in_polygon(z: C64, poly: &[C64]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if z.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Signed area (positive for counter-clockwise orientation).
pub fn polygon_area(poly: &[C64]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| cross(poly[i], poly[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

/// Counter-clockwise circle of `m` points starting at angle 0.
pub fn circle_points(center: C64, radius: f64, m: usize) -> Vec<C64> {
    (0..m)
        .map(|k| center + C64::from_polar(radius, 2.0 * PI * k as f64 / m as f64))
        .collect()
}

/// Wraps an angle into `[0, 2 pi)`.
pub fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Angle of `z - center` in `[0, 2 pi)`.
pub fn angle_about(z: C64, center: C64) -> f64 {
    wrap_angle((z - center).arg())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_segments() {
        let t = segment_hit(c(0.0, 0.0), c(2.0, 0.0), c(1.0, -1.0), c(1.0, 1.0)).unwrap();
        assert!((t - 0.5).abs() < 1e-15);
        assert!(segment_hit(c(0.0, 0.0), c(0.5, 0.0), c(1.0, -1.0), c(1.0, 1.0)).is_none());
    }

    #[test]
    fn square_polygon() {
        let sq = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)];
        assert!(point_in_polygon(c(0.5, 0.5), &sq));
        assert!(!point_in_polygon(c(1.5, 0.5), &sq));
        assert!((polygon_area(&sq) - 1.0).abs() < 1e-15);
    }
}
