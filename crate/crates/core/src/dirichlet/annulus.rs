//! Harmonic functions in round annuli and multivalent completions.

use super::{datum_angle, lattice_for, BoundaryDatum};
use crate::beltrami::BeltramiCoefficient;
use crate::error::{Error, Result};
use crate::geometry::C64;
use crate::grid::{Domain, DomainMask};
use crate::maps::PlaneMap;
use crate::qcsolver::{normalize, solve_beltrami, BoundaryTable, ComposedMap, MapTarget};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::sc::DirichletOptions;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodReport {
    /// Conjugate period around the hole, `2 pi B`.
    pub omega: Vec<f64>,
    /// The same period as the flux of `du` through two separated circles.
    pub contour_omegas: Vec<f64>,
    pub tol: f64,
    pub single_valued: bool,
}

/// `u = A + B log|w| + 2 Re sum_k (alpha_k |w|^k + beta_k r^k |w|^-k) e^{ik theta}`
/// in `r < |w| < 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicAnnulus {
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: Vec<C64>,
    /// Scaled inner coefficients: the `w^-k` term is `beta_k (r/w)^k`.
    pub beta: Vec<C64>,
    pub period: PeriodReport,
}

impl HarmonicAnnulus {
    pub fn u(&self, w: C64) -> f64 {
        self.analytic_w(w, 0).re
    }

    /// `H(w) = A + B log w + sum 2 alpha_k w^k + 2 conj(beta_k) (r/w)^k` on
    /// sheet `k` of the logarithm (principal argument plus `2 pi k`).
    pub fn analytic_w(&self, w: C64, k: i64) -> C64 {
        let log = C64::new(w.norm().ln(), w.arg() + 2.0 * PI * k as f64);
        let mut h = self.a + self.b * log;
        let (mut p, mut q) = (w, self.r / w);
        for (al, be) in self.alpha.iter().zip(&self.beta) {
            h += 2.0 * al * p + 2.0 * be.conj() * q;
            p *= w;
            q *= self.r / w;
        }
        h
    }
}

fn coefficients(d: &BoundaryDatum, n: usize) -> Vec<C64> {
    let m = lattice_for(n);
    let mut buf: Vec<C64> = (0..m)
        .map(|j| C64::new(d.value(2.0 * PI * j as f64 / m as f64), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    buf.iter().take(n + 1).map(|v| v / m as f64).collect()
}

/// Harmonic function in `r < |w| < 1` with data `inner(theta)` on `|w| = r`
/// and `outer(theta)` on `|w| = 1`.
pub fn harmonic_annulus(inner: &BoundaryDatum, outer: &BoundaryDatum, r: f64, n: usize) -> Result<HarmonicAnnulus> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::validation(format!("inner radius {r} must lie in (0, 1)")));
    }
    inner.validate()?;
    outer.validate()?;
    let phi = coefficients(outer, n);
    let psi = coefficients(inner, n);
    let a = phi[0].re;
    let b = (psi[0].re - a) / r.ln();
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for k in 1..=n {
        // alpha + beta r^k = phi_k, alpha r^k + beta = psi_k
        let rk = r.powi(k as i32);
        let det = 1.0 - rk * rk;
        alpha.push((phi[k] - psi[k] * rk) / det);
        beta.push((psi[k] - phi[k] * rk) / det);
    }
    let mut h = HarmonicAnnulus {
        r,
        a,
        b,
        alpha,
        beta,
        period: PeriodReport { omega: vec![], contour_omegas: vec![], tol: 0.0, single_valued: true },
    };
    let omega = 2.0 * PI * b;
    let contour_omegas = [r.powf(2.0 / 3.0), r.powf(1.0 / 3.0)]
        .iter()
        .map(|&rho| flux(&h, rho))
        .collect();
    let (lo_o, hi_o) = outer.range();
    let (lo_i, hi_i) = inner.range();
    let scale = [lo_o, hi_o, lo_i, hi_i].iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-8 * scale;
    h.period = PeriodReport {
        omega: vec![omega],
        contour_omegas,
        tol,
        single_valued: omega.abs() < tol,
    };
    Ok(h)
}

/// `oint rho du/drho dtheta` over `|w| = rho`, by central differences.
fn flux(h: &HarmonicAnnulus, rho: f64) -> f64 {
    let m = 256;
    let eta = 1e-5;
    (0..m)
        .map(|j| {
            let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            (h.u(e * rho * (1.0 + eta)) - h.u(e * rho * (1.0 - eta))) / (2.0 * eta)
        })
        .sum::<f64>()
        * (2.0 * PI / m as f64)
}

/// Result of continuing a multivalent solution once around the hole.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WindingReport {
    pub winding: i64,
    /// Value after the loop minus the starting value.
    pub increment: C64,
    /// `F(z, 1) - F(z, 0)`.
    pub branch_jump: C64,
    /// `i omega`.
    pub expected: C64,
}

/// `F = H o g` with its branches of the conjugate function.
#[derive(Debug, Clone)]
pub struct MultivalentSolution {
    pub domain: Domain,
    pub harmonic: HarmonicAnnulus,
    /// `None` when the data are one constant.
    pub map: Option<Box<ComposedMap>>,
}

impl MultivalentSolution {
    fn g(&self, z: C64) -> Result<C64> {
        match &self.map {
            Some(g) => g.eval(z),
            None => Ok(z),
        }
    }

    pub fn period(&self) -> f64 {
        self.harmonic.period.omega[0]
    }

    /// `u + i (v0 + k omega)` at `z` on branch `k`.
    pub fn eval(&self, z: C64, k: i64) -> Result<C64> {
        if self.map.is_none() {
            return Ok(C64::new(self.harmonic.a, 0.0));
        }
        if !self.domain.contains(z) {
            return Err(Error::Continuation(format!("{z} is outside the domain")));
        }
        Ok(self.harmonic.analytic_w(self.g(z)?, k))
    }

    /// Continues the principal branch at `path[0]` along `path`; returns the
    /// value at the last point and the winding number accumulated.
    pub fn continue_along(&self, path: &[C64]) -> Result<(C64, i64)> {
        let first = *path.first().ok_or_else(|| Error::arg("empty path"))?;
        if self.map.is_none() {
            return Ok((C64::new(self.harmonic.a, 0.0), 0));
        }
        let mut prev = self.eval_checked(first)?;
        let mut turn = 0.0;
        for &z in &path[1..] {
            let w = self.eval_checked(z)?;
            let step = (w / prev).arg();
            if step.abs() > 0.5 * PI {
                return Err(Error::Continuation("path step too coarse to track the branch".into()));
            }
            turn += step;
            prev = w;
        }
        let w0 = self.g(first)?;
        let winding = ((w0.arg() + turn - prev.arg()) / (2.0 * PI)).round() as i64;
        Ok((self.harmonic.analytic_w(prev, winding), winding))
    }

    /// Continues once around the hole along a circle of `m` points and
    /// compares the accumulated increment with `i omega`.
    pub fn winding_check(&self, m: usize) -> Result<WindingReport> {
        let (center, radius) = match self.domain {
            Domain::Annulus { center, inner, outer } => (center, (inner * outer).sqrt()),
            _ => return Err(Error::Unsupported("winding check needs a round annulus".into())),
        };
        let path: Vec<C64> = (0..=m)
            .map(|j| center + C64::from_polar(radius, 0.1 + 2.0 * PI * j as f64 / m as f64))
            .collect();
        let start = self.eval(path[0], 0)?;
        let (end, winding) = self.continue_along(&path)?;
        let branch_jump = self.eval(path[0], 1)? - start;
        Ok(WindingReport {
            winding,
            increment: end - start,
            branch_jump,
            expected: C64::new(0.0, self.period()),
        })
    }

    fn eval_checked(&self, z: C64) -> Result<C64> {
        if !self.domain.contains(z) {
            return Err(Error::Continuation(format!("path leaves the domain at {z}")));
        }
        self.g(z)
    }
}

fn pull(table: &BoundaryTable, datum: &BoundaryDatum, domain: &Domain, m: usize) -> BoundaryDatum {
    BoundaryDatum::Samples {
        values: (0..m)
            .map(|j| datum.value(datum_angle(domain, table.preimage(2.0 * PI * j as f64 / m as f64))))
            .collect(),
    }
}

/// Multivalent solution in a doubly connected catalog domain: `g` maps the
/// domain onto `r* < |w| < 1` and `H` solves the harmonic problem there.
pub fn multivalent_solution(
    coef: &BeltramiCoefficient,
    domain: &Domain,
    inner: &BoundaryDatum,
    outer: &BoundaryDatum,
    opts: &DirichletOptions,
) -> Result<MultivalentSolution> {
    inner.validate()?;
    outer.validate()?;
    if domain.connectivity() != Some(2) || domain.hole_point().is_none() {
        return Err(Error::Topology(format!("{} is not doubly connected", domain.name())));
    }
    if let (Some(a), Some(b)) = (inner.is_constant(), outer.is_constant()) {
        if a == b {
            let c = BoundaryDatum::Constant { value: a };
            return Ok(MultivalentSolution {
                domain: domain.clone(),
                harmonic: harmonic_annulus(&c, &c, 0.5, 1)?,
                map: None,
            });
        }
    }
    let mask = DomainMask::fitted(domain.clone(), opts.n)?;
    let sol = solve_beltrami(coef, &mask, &opts.solver)?;
    let g = normalize(&sol, opts.exec)?;
    let MapTarget::Annulus { inner_radius } = g.mapper.target else {
        return Err(Error::Topology("image map is not onto an annulus".into()));
    };
    let m = lattice_for(opts.terms);
    let outer_w = pull(&g.boundary[0], outer, domain, m);
    let inner_w = pull(&g.boundary[1], inner, domain, m);
    let harmonic = harmonic_annulus(&inner_w, &outer_w, inner_radius, opts.terms)?;
    Ok(MultivalentSolution {
        domain: domain.clone(),
        harmonic,
        map: Some(Box::new(g)),
    })
}
