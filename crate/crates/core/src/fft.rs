//! Two-dimensional FFTs on square complex grids (row-major, `j * n + i`).

use crate::exec::{self, Execution};
use crate::geometry::C64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    fn pass(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [C64], exec: Execution) {
        let n = self.n;
        exec::for_each_chunk_mut(exec, data, n, |_, row| plan.process(row));
        transpose(data, n);
        exec::for_each_chunk_mut(exec, data, n, |_, row| plan.process(row));
        transpose(data, n);
    }

    /// Unnormalised forward transform.
    pub fn forward(&self, data: &mut [C64], exec: Execution) {
        self.pass(&self.fwd, data, exec);
    }

    /// Inverse transform including the `1/n^2` factor.
    pub fn inverse(&self, data: &mut [C64], exec: Execution) {
        self.pass(&self.inv, data, exec);
        let s = 1.0 / (self.n * self.n) as f64;
        exec::for_each_mut(exec, data, |_, v| *v *= s);
    }
}

fn transpose(data: &mut [C64], n: usize) {
    for j in 0..n {
        for i in (j + 1)..n {
            data.swap(j * n + i, i * n + j);
        }
    }
}

/// Signed frequency of FFT index `p` on `n` points; `None` at Nyquist.
#[inline]
pub fn signed_freq(p: usize, n: usize) -> Option<i64> {
    let h = n / 2;
    if p == h {
        None
    } else if p < h {
        Some(p as i64)
    } else {
        Some(p as i64 - n as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_single_mode() {
        let n = 16;
        let f = Fft2::new(n);
        let mut d: Vec<C64> = (0..n * n).map(|k| C64::new(k as f64, -(k as f64) * 0.5)).collect();
        let orig = d.clone();
        f.forward(&mut d, Execution::Sequential);
        f.inverse(&mut d, Execution::Parallel);
        assert!(d.iter().zip(&orig).all(|(a, b)| (a - b).norm() < 1e-10));
        // e^{2 pi i (2 x + 3 y) / n} lands in bin (2, 3).
        let mut m: Vec<C64> = (0..n * n)
            .map(|k| {
                let (x, y) = ((k % n) as f64, (k / n) as f64);
                C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (2.0 * x + 3.0 * y) / n as f64)
            })
            .collect();
        f.forward(&mut m, Execution::Sequential);
        assert!((m[3 * n + 2] - C64::new((n * n) as f64, 0.0)).norm() < 1e-9);
        assert_eq!(signed_freq(15, 16), Some(-1));
        assert_eq!(signed_freq(8, 16), None);
    }
}
