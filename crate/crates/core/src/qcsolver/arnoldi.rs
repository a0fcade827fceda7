//! Vandermonde with Arnoldi: well-conditioned polynomial bases on point sets.

use crate::geometry::C64;

/// Polynomial basis in `x = (z - center) / scale` (or its reciprocal),
/// orthonormalised on the fitting points.
#[derive(Debug, Clone)]
pub struct ArnoldiBasis {
    center: C64,
    scale: f64,
    reciprocal: bool,
    /// Upper Hessenberg recurrence, column `k` has `k + 2` entries.
    h: Vec<Vec<C64>>,
}

impl ArnoldiBasis {
    fn var(&self, z: C64) -> C64 {
        let x = (z - self.center) / self.scale;
        if self.reciprocal {
            1.0 / x
        } else {
            x
        }
    }

    /// Builds a degree-`deg` basis on `pts`; returns it with the basis
    /// matrix (column-major, `deg + 1` columns of `pts.len()` values).
    pub fn fit(pts: &[C64], center: C64, scale: f64, reciprocal: bool, deg: usize) -> (Self, Vec<Vec<C64>>) {
        let mut b = ArnoldiBasis {
            center,
            scale,
            reciprocal,
            h: Vec::with_capacity(deg),
        };
        let m = pts.len() as f64;
        let xs: Vec<C64> = pts.iter().map(|&z| b.var(z)).collect();
        let mut q = vec![vec![C64::new(1.0, 0.0); pts.len()]];
        for k in 0..deg {
            let mut v: Vec<C64> = xs.iter().zip(&q[k]).map(|(x, qk)| x * qk).collect();
            let mut col = Vec::with_capacity(k + 2);
            // two passes of Gram-Schmidt for stability
            let mut coef = vec![C64::new(0.0, 0.0); k + 1];
            for _ in 0..2 {
                for (j, qj) in q.iter().enumerate() {
                    let d: C64 = qj.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C64>() / m;
                    coef[j] += d;
                    v.iter_mut().zip(qj).for_each(|(x, y)| *x -= d * y);
                }
            }
            col.extend_from_slice(&coef);
            let norm = (v.iter().map(|x| x.norm_sqr()).sum::<f64>() / m).sqrt();
            col.push(C64::new(norm, 0.0));
            v.iter_mut().for_each(|x| *x /= norm);
            b.h.push(col);
            q.push(v);
        }
        (b, q)
    }

    pub fn degree(&self) -> usize {
        self.h.len()
    }

    /// Basis values at `z`.
    pub fn eval(&self, z: C64) -> Vec<C64> {
        let x = self.var(z);
        let mut w = Vec::with_capacity(self.h.len() + 1);
        w.push(C64::new(1.0, 0.0));
        for (k, col) in self.h.iter().enumerate() {
            let mut v = x * w[k];
            for j in 0..=k {
                v -= col[j] * w[j];
            }
            w.push(v / col[k + 1]);
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::circle_points;

    #[test]
    fn basis_is_orthonormal_and_reproducible() {
        let pts = circle_points(C64::new(0.3, 0.0), 0.7, 200);
        let (b, q) = ArnoldiBasis::fit(&pts, C64::new(0.3, 0.0), 0.7, false, 20);
        for i in 0..q.len() {
            for j in 0..q.len() {
                let d: C64 = q[i].iter().zip(&q[j]).map(|(a, c)| a.conj() * c).sum::<C64>() / 200.0;
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).norm() < 1e-10);
            }
        }
        let w = b.eval(pts[17]);
        for k in 0..q.len() {
            assert!((w[k] - q[k][17]).norm() < 1e-9);
        }
    }
}
