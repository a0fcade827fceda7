//! Dirichlet problems through the factorisation `f = h o g`: `g` normalises
//! the Beltrami solution onto the disk (or a round annulus), and `h` solves
//! the harmonic problem there.

mod annulus;
mod sc;

pub use annulus::{harmonic_annulus, multivalent_solution, HarmonicAnnulus, MultivalentSolution, PeriodReport, WindingReport};
pub use sc::{
    boundary_residual, solve_dirichlet_sc, write_residual_csv, DirichletOptions, DirichletSolution, ResidualRow,
    SolutionMap,
};

use crate::error::{Error, Result};
use crate::geometry::C64;
use crate::grid::Domain;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Real boundary values as a function of the boundary angle: the angle
/// about the domain's centre (or hole), or the reference angle of a prime end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "datum", rename_all = "snake_case")]
pub enum BoundaryDatum {
    Constant { value: f64 },
    /// `a0 + sum_k cos[k-1] cos(k t) + sin[k-1] sin(k t)`.
    Fourier {
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    /// Values at equally spaced angles `2 pi j / m`, periodic linear interpolation.
    Samples { values: Vec<f64> },
}

impl BoundaryDatum {
    pub fn cos(k: usize) -> Self {
        let mut cos = vec![0.0; k];
        cos[k - 1] = 1.0;
        BoundaryDatum::Fourier { a0: 0.0, cos, sin: vec![] }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            BoundaryDatum::Constant { value } => value.is_finite(),
            BoundaryDatum::Fourier { a0, cos, sin } => {
                a0.is_finite() && cos.iter().chain(sin).all(|v| v.is_finite())
            }
            BoundaryDatum::Samples { values } => {
                if values.len() < 2 {
                    return Err(Error::validation("sampled datum needs at least two values"));
                }
                values.iter().all(|v| v.is_finite())
            }
        };
        if !finite {
            return Err(Error::validation("boundary datum must be finite (continuous on the ends)"));
        }
        Ok(())
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            BoundaryDatum::Constant { value } => Some(*value),
            BoundaryDatum::Fourier { a0, cos, sin } if cos.iter().chain(sin).all(|&v| v == 0.0) => Some(*a0),
            BoundaryDatum::Samples { values } if values.iter().all(|&v| v == values[0]) => Some(values[0]),
            _ => None,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            BoundaryDatum::Constant { value } => *value,
            BoundaryDatum::Fourier { a0, cos, sin } => {
                let mut v = *a0;
                for (k, a) in cos.iter().enumerate() {
                    v += a * ((k + 1) as f64 * t).cos();
                }
                for (k, b) in sin.iter().enumerate() {
                    v += b * ((k + 1) as f64 * t).sin();
                }
                v
            }
            BoundaryDatum::Samples { values } => {
                let m = values.len();
                let x = t.rem_euclid(2.0 * PI) / (2.0 * PI) * m as f64;
                let j = (x.floor() as usize).min(m - 1);
                let f = x - j as f64;
                values[j] * (1.0 - f) + values[(j + 1) % m] * f
            }
        }
    }

    /// Largest jump between neighbouring points of an `m`-point lattice.
    pub fn continuity_modulus(&self, m: usize) -> f64 {
        let v: Vec<f64> = (0..m).map(|j| self.value(2.0 * PI * j as f64 / m as f64)).collect();
        (0..m).map(|j| (v[(j + 1) % m] - v[j]).abs()).fold(0.0, f64::max)
    }

    pub fn range(&self) -> (f64, f64) {
        (0..4096)
            .map(|j| self.value(2.0 * PI * j as f64 / 4096.0))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

/// Parameter of a boundary point of a catalog domain for its datum.
pub fn datum_angle(domain: &Domain, z: C64) -> f64 {
    let c = domain.hole_point().unwrap_or_else(|| domain.interior_point());
    (z - c).arg()
}

/// `h(z) = c0 + 2 sum_{k=1..N} c_k z^k`, holomorphic in the disk with
/// `Re h = phi` (truncated) on the circle and `Im h(0) = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchwarzResult {
    /// `c_0` (real) through `c_N`.
    pub coeffs: Vec<C64>,
}

impl SchwarzResult {
    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs[1..].iter().rev() {
            acc = (acc + 2.0 * c) * z;
        }
        acc + self.coeffs[0]
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Complex Fourier coefficients `c_0..=c_n` of samples on an equispaced circle lattice.
fn fourier(samples: &[C64], n: usize) -> Vec<C64> {
    let m = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    buf.iter().take(n + 1).map(|v| v / m as f64).collect()
}

/// Schwarz operator on samples `phi(2 pi j / m)` of a real datum.
pub fn schwarz_operator(samples: &[C64], n: usize) -> Result<SchwarzResult> {
    if n < 1 {
        return Err(Error::arg("truncation N must be at least 1"));
    }
    if samples.len() < 2 * n + 1 {
        return Err(Error::arg(format!("{} samples cannot resolve N = {n}", samples.len())));
    }
    let scale = samples.iter().map(|v| v.re.abs()).fold(1.0, f64::max);
    if samples.iter().any(|v| !(v.im.abs() <= 1e-12 * scale) || !v.re.is_finite()) {
        return Err(Error::validation("Schwarz datum must be real and finite"));
    }
    let real: Vec<C64> = samples.iter().map(|v| C64::new(v.re, 0.0)).collect();
    let mut coeffs = fourier(&real, n);
    coeffs[0] = C64::new(coeffs[0].re, 0.0);
    Ok(SchwarzResult { coeffs })
}

/// Lattice size used to sample data for `n` Fourier terms.
pub fn lattice_for(n: usize) -> usize {
    (4 * n).max(256).next_power_of_two()
}

pub fn schwarz_from_datum(datum: &BoundaryDatum, n: usize) -> Result<SchwarzResult> {
    datum.validate()?;
    let m = lattice_for(n);
    let s: Vec<C64> = (0..m)
        .map(|j| C64::new(datum.value(2.0 * PI * j as f64 / m as f64), 0.0))
        .collect();
    schwarz_operator(&s, n)
}

#[cfg(test)]
mod tests;
