//! Beltrami solver: Beurling fixed point on a padded periodic box.

use crate::beltrami::BeltramiCoefficient;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fft::{signed_freq, Fft2};
use crate::geometry::C64;
use crate::grid::{ComplexField, Domain, DomainMask, GridSpec, ScalarGrid};
use crate::maps::PlaneMap;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Truncation: `|mu|` is clamped to `1 - delta`.
    pub delta: f64,
    pub max_iter: usize,
    /// Stop when the residual drops below `tol * ||mu||`.
    pub tol: f64,
    pub exec: Execution,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            delta: 1e-3,
            max_iter: 2000,
            tol: 1e-8,
            exec: Execution::Parallel,
        }
    }
}

/// How `mu` was continued beyond the mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Constant `mu` on the whole periodic box; `f = z + k conj(z)` exactly.
    Periodic,
    /// `mu` tapered smoothly to zero in the padding.
    Tapered,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualStats {
    /// Discrete L² norm of `f_zbar - mu f_z` over the mask.
    pub l2: f64,
    pub linf: f64,
    /// `l2 / ||mu||_2` on the mask (0 when `mu = 0`).
    pub relative: f64,
    pub iterations: usize,
    /// Fixed-point increments, one per iteration.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct QcSolution {
    pub f: ComplexField,
    pub residual: ResidualStats,
    /// Finite-difference Jacobian of the grid map on the mask grid (0 off mask).
    pub jacobian: ScalarGrid,
    pub normalization: Normalization,
    /// Cells where `|mu|` hit the truncation.
    pub truncated: usize,
    domain: Domain,
    padded: GridSpec,
    /// Spectrum of the periodic part `P` in `f = z + m conj(z) + P`.
    coeffs: Vec<C64>,
    affine: C64,
}

impl QcSolution {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn grid(&self) -> &GridSpec {
        &self.f.grid
    }

    /// Evaluates `f` anywhere in the padded box by summing its trigonometric series.
    pub fn eval_at(&self, z: C64) -> C64 {
        let n = self.padded.n;
        let (sx, sy) = self.padded.coords(z);
        let phase = |s: f64| -> Vec<C64> {
            let base = C64::from_polar(1.0, 2.0 * PI * s / n as f64);
            let mut out = vec![C64::new(0.0, 0.0); n];
            let mut pos = C64::new(1.0, 0.0);
            let mut neg = C64::new(1.0, 0.0);
            let inv = base.conj();
            out[0] = pos;
            for k in 1..n / 2 {
                pos *= base;
                neg *= inv;
                out[k] = pos;
                out[n - k] = neg;
            }
            out
        };
        let ex = phase(sx);
        let ey = phase(sy);
        let mut acc = C64::new(0.0, 0.0);
        for q in 0..n {
            if ey[q] == C64::new(0.0, 0.0) {
                continue;
            }
            let row = &self.coeffs[q * n..(q + 1) * n];
            let s: C64 = row.iter().zip(&ex).map(|(a, b)| a * b).sum();
            acc += ey[q] * s;
        }
        z + self.affine * z.conj() + acc / (n * n) as f64
    }

    pub fn eval_many(&self, zs: &[C64], exec: Execution) -> Vec<C64> {
        exec::map_collect(exec, zs.len(), |k| self.eval_at(zs[k]))
    }

    /// Rows `(x, y, re f, im f, J_f)` for masked cells.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "re_f", "im_f", "jacobian"])?;
        for (k, v) in self.f.values.iter().enumerate() {
            if !self.f.inside[k] {
                continue;
            }
            let z = self.f.grid.point(k);
            out.serialize((z.re, z.im, v.re, v.im, self.jacobian.values[k]))?;
        }
        out.flush()?;
        Ok(())
    }
}

impl PlaneMap for QcSolution {
    fn eval(&self, z: C64) -> Result<C64> {
        if !self.padded.contains_point(z) {
            return Err(Error::Domain {
                what: "quasiconformal solution",
                z,
            });
        }
        Ok(self.eval_at(z))
    }
}

fn smooth_taper(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// `mu` on the padded box, clamped to `1 - delta`; returns the count of clamped cells.
fn padded_mu(
    coef: &BeltramiCoefficient,
    mask: &DomainMask,
    padded: &GridSpec,
    delta: f64,
    exec: Execution,
) -> Result<(Vec<C64>, usize, Normalization)> {
    let n = mask.grid.n;
    let np = padded.n;
    let off = n / 2;
    let cap = 1.0 - delta;
    let clamp = |mu: C64| -> (C64, bool) {
        let r = mu.norm();
        if r > cap {
            (mu * (cap / r), true)
        } else {
            (mu, false)
        }
    };
    if coef.is_constant() {
        let (mu, _) = coef.eval_flagged(mask.grid.center)?;
        let (mu, hit) = clamp(mu);
        let count = if hit { mask.count() } else { 0 };
        return Ok((vec![mu; np * np], count, Normalization::Periodic));
    }
    // mu on the mask; cells at a singular point take a neighbour's value
    let inside_mu: Vec<Option<C64>> = exec::map_collect(exec, n * n, |k| {
        if !mask.inside[k] {
            return None;
        }
        coef.eval_flagged(mask.grid.point(k)).ok().map(|(m, _)| m)
    });
    let mut inner = inside_mu.clone();
    for k in 0..n * n {
        if mask.inside[k] && inner[k].is_none() {
            let (i, j) = (k % n, k / n);
            let mut found = C64::new(0.0, 0.0);
            'nb: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n {
                        if let Some(v) = inside_mu[b as usize * n + a as usize] {
                            found = v;
                            break 'nb;
                        }
                    }
                }
            }
            inner[k] = Some(found);
        }
    }
    // boundary cells of the mask, for the distance-based taper
    let edge: Vec<(usize, usize)> = (0..n * n)
        .filter(|&k| {
            if !mask.inside[k] {
                return false;
            }
            let (i, j) = (k % n, k / n);
            i == 0
                || j == 0
                || i + 1 == n
                || j + 1 == n
                || !mask.inside[k - 1]
                || !mask.inside[k + 1]
                || !mask.inside[k - n]
                || !mask.inside[k + n]
        })
        .map(|k| (k % n, k / n))
        .collect();
    if edge.is_empty() {
        return Err(Error::Geometry("empty mask".into()));
    }
    let width = (n / 4).max(4) as f64;
    let values: Vec<(C64, bool)> = exec::map_collect(exec, np * np, |k| {
        let (ip, jp) = (k % np, k / np);
        let inside_grid = ip >= off && jp >= off && ip < off + n && jp < off + n;
        if inside_grid {
            let km = (jp - off) * n + (ip - off);
            if mask.inside[km] {
                return clamp(inner[km].unwrap_or_default());
            }
        }
        let (mut best, mut at) = (f64::INFINITY, edge[0]);
        for &(i, j) in &edge {
            let dx = (ip as f64) - (i + off) as f64;
            let dy = (jp as f64) - (j + off) as f64;
            let d = dx * dx + dy * dy;
            if d < best {
                best = d;
                at = (i, j);
            }
        }
        let tau = smooth_taper((best.sqrt() - 1.0) / width);
        if tau == 0.0 {
            return (C64::new(0.0, 0.0), false);
        }
        let mu = match coef.eval_flagged(padded.point(k)) {
            Ok((m, _)) => m,
            Err(_) => inner[at.1 * n + at.0].unwrap_or_default(),
        };
        (clamp(mu).0 * tau, false)
    });
    let count = values.iter().filter(|v| v.1).count();
    Ok((values.into_iter().map(|v| v.0).collect(), count, Normalization::Tapered))
}

struct Spectral {
    fft: Fft2,
    /// `conj(kappa) / kappa` (zero at the mean and Nyquist modes).
    beurling: Vec<C64>,
    /// `1 / (i kappa / 2)`, the inverse of d/dzbar.
    cauchy: Vec<C64>,
}

impl Spectral {
    fn new(grid: &GridSpec) -> Self {
        let n = grid.n;
        let l = 2.0 * grid.half_width;
        let mut beurling = vec![C64::new(0.0, 0.0); n * n];
        let mut cauchy = vec![C64::new(0.0, 0.0); n * n];
        for q in 0..n {
            for p in 0..n {
                let (Some(a), Some(b)) = (signed_freq(p, n), signed_freq(q, n)) else {
                    continue;
                };
                if a == 0 && b == 0 {
                    continue;
                }
                let kappa = C64::new(a as f64, b as f64) * (2.0 * PI / l);
                beurling[q * n + p] = kappa.conj() / kappa;
                cauchy[q * n + p] = 1.0 / (C64::new(0.0, 0.5) * kappa);
            }
        }
        Spectral {
            fft: Fft2::new(n),
            beurling,
            cauchy,
        }
    }

    fn beurling(&self, h: &[C64], exec: Execution) -> Vec<C64> {
        let mut buf = h.to_vec();
        self.fft.forward(&mut buf, exec);
        let mult = &self.beurling;
        exec::for_each_mut(exec, &mut buf, |k, v| *v *= mult[k]);
        self.fft.inverse(&mut buf, exec);
        buf
    }
}

fn l2(exec: Execution, v: &[C64], area: f64) -> f64 {
    (exec::sum(exec, v.len(), |k| v[k].norm_sqr()) * area).sqrt()
}

/// Solves `f_zbar = mu f_z` on the mask by iterating `h = mu (1 + S h)`.
pub fn solve_beltrami(
    coef: &BeltramiCoefficient,
    mask: &DomainMask,
    opts: &SolverOptions,
) -> Result<QcSolution> {
    if !(opts.delta > 0.0 && opts.delta <= 0.5) {
        return Err(Error::arg(format!("truncation delta = {} must lie in (0, 0.5]", opts.delta)));
    }
    let exec = opts.exec;
    let n = mask.grid.n;
    if n % 2 != 0 {
        return Err(Error::arg("grid size must be even"));
    }
    let padded = GridSpec::new(mask.grid.center, 2.0 * mask.grid.half_width, 2 * n)?;
    let np = padded.n;
    let area = padded.spacing().powi(2);
    let (mu, truncated, normalization) = padded_mu(coef, mask, &padded, opts.delta, exec)?;
    let spec = Spectral::new(&padded);
    let mu_norm = l2(exec, &mu, area);

    let mut h = mu.clone();
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut rising = 0;
    while mu_norm > 0.0 && iterations < opts.max_iter {
        let sh = spec.beurling(&h, exec);
        let next: Vec<C64> = exec::map_collect(exec, np * np, |k| mu[k] * (1.0 + sh[k]));
        let step = (exec::sum(exec, np * np, |k| (next[k] - h[k]).norm_sqr()) * area).sqrt();
        h = next;
        iterations += 1;
        if let Some(&prev) = history.last() {
            rising = if step > prev { rising + 1 } else { 0 };
        }
        history.push(step);
        if step < opts.tol * mu_norm {
            break;
        }
        if rising >= 10 {
            return Err(Error::Solver {
                reason: "fixed-point residual rose for 10 consecutive steps; try a larger delta or grid".into(),
                residual: step,
            });
        }
        if !step.is_finite() {
            return Err(Error::Solver {
                reason: "fixed-point iteration produced non-finite values".into(),
                residual: step,
            });
        }
    }
    if mu_norm > 0.0 && history.last().is_some_and(|&s| s >= opts.tol * mu_norm) {
        return Err(Error::Solver {
            reason: format!("no convergence in {} iterations; try a larger delta or grid", opts.max_iter),
            residual: *history.last().unwrap(),
        });
    }

    // f = z + m conj(z) + P with P_zbar = h - m
    let sh = spec.beurling(&h, exec);
    let mut coeffs = h.clone();
    spec.fft.forward(&mut coeffs, exec);
    let affine = coeffs[0] / (np * np) as f64;
    let cauchy = &spec.cauchy;
    exec::for_each_mut(exec, &mut coeffs, |k, v| *v *= cauchy[k]);
    let mut periodic = coeffs.clone();
    spec.fft.inverse(&mut periodic, exec);

    let off = n / 2;
    let values: Vec<C64> = exec::map_collect(exec, n * n, |k| {
        let (i, j) = (k % n, k / n);
        let z = mask.grid.point(k);
        z + affine * z.conj() + periodic[(j + off) * np + i + off]
    });
    let resid: Vec<C64> = (0..n * n)
        .map(|k| {
            if !mask.inside[k] {
                return C64::new(0.0, 0.0);
            }
            let (i, j) = (k % n, k / n);
            let kp = (j + off) * np + i + off;
            h[kp] - mu[kp] * (1.0 + sh[kp])
        })
        .collect();
    let cell = mask.grid.spacing().powi(2);
    let res_l2 = l2(exec, &resid, cell);
    let res_inf = exec::max(exec, resid.len(), |k| resid[k].norm());
    let mu_mask = (exec::sum(exec, n * n, |k| {
        let (i, j) = (k % n, k / n);
        if mask.inside[k] {
            mu[(j + off) * np + i + off].norm_sqr()
        } else {
            0.0
        }
    }) * cell)
        .sqrt();
    let f = ComplexField {
        grid: mask.grid,
        values,
        inside: mask.inside.clone(),
        clamped: truncated,
    };
    let jacobian = fd_jacobian(&f, exec);
    Ok(QcSolution {
        f,
        residual: ResidualStats {
            l2: res_l2,
            linf: res_inf.max(0.0),
            relative: if mu_mask > 0.0 { res_l2 / mu_mask } else { 0.0 },
            iterations,
            history,
        },
        jacobian,
        normalization,
        truncated,
        domain: mask.domain.clone(),
        padded,
        coeffs,
        affine,
    })
}

/// `J = Im(conj(f_x) f_y)` by central differences (one-sided at the mask edge).
fn fd_jacobian(f: &ComplexField, exec: Execution) -> ScalarGrid {
    let g = f.grid;
    let n = g.n;
    let h = g.spacing();
    let ok = |i: i64, j: i64| i >= 0 && j >= 0 && (i as usize) < n && (j as usize) < n && f.inside[j as usize * n + i as usize];
    let at = |i: i64, j: i64| f.values[j as usize * n + i as usize];
    let diff = |i: i64, j: i64, di: i64, dj: i64| -> C64 {
        let (fw, bw) = (ok(i + di, j + dj), ok(i - di, j - dj));
        match (fw, bw) {
            (true, true) => (at(i + di, j + dj) - at(i - di, j - dj)) / (2.0 * h),
            (true, false) => (at(i + di, j + dj) - at(i, j)) / h,
            (false, true) => (at(i, j) - at(i - di, j - dj)) / h,
            (false, false) => C64::new(0.0, 0.0),
        }
    };
    let values = exec::map_collect(exec, n * n, |k| {
        if !f.inside[k] {
            return 0.0;
        }
        let (i, j) = ((k % n) as i64, (k / n) as i64);
        let fx = diff(i, j, 1, 0);
        let fy = diff(i, j, 0, 1);
        (fx.conj() * fy).im
    });
    ScalarGrid { grid: g, values }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JacobianReport {
    pub cells: usize,
    pub violations: usize,
    pub fraction: f64,
    /// Up to 64 offending cell centres with their Jacobian values.
    pub locations: Vec<(C64, f64)>,
}

pub fn jacobian_check(sol: &QcSolution) -> JacobianReport {
    let f = &sol.f;
    let mut cells = 0;
    let mut bad = Vec::new();
    for (k, &inside) in f.inside.iter().enumerate() {
        if !inside {
            continue;
        }
        cells += 1;
        let j = sol.jacobian.values[k];
        if !(j > 0.0) {
            bad.push((f.grid.point(k), j));
        }
    }
    let violations = bad.len();
    bad.truncate(64);
    JacobianReport {
        cells,
        violations,
        fraction: if cells > 0 { violations as f64 / cells as f64 } else { 0.0 },
        locations: bad,
    }
}

/// Sup-norm differences between solutions for `delta_k` and `delta_k / 2`
/// on masked cells farther than `exclude` from `z0`.
pub fn delta_study(
    coef: &BeltramiCoefficient,
    mask: &DomainMask,
    deltas: &[f64],
    z0: C64,
    exclude: f64,
    opts: &SolverOptions,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let a = solve_beltrami(coef, mask, &SolverOptions { delta: d, ..*opts })?;
        let b = solve_beltrami(coef, mask, &SolverOptions { delta: d / 2.0, ..*opts })?;
        let diff = (0..a.f.values.len())
            .filter(|&k| mask.inside[k] && (mask.grid.point(k) - z0).norm() > exclude)
            .map(|k| {
                let na = a.f.values[k] - a.f.values[0];
                let nb = b.f.values[k] - b.f.values[0];
                (na - nb).norm()
            })
            .fold(0.0, f64::max);
        out.push((d, diff));
    }
    Ok(out)
}

/// `max |field - reference|` over masked cells, skipping a disk `(center, radius)`.
pub fn sup_error(field: &ComplexField, reference: &dyn PlaneMap, exclude: Option<(C64, f64)>) -> Result<f64> {
    let mut err: f64 = 0.0;
    for (k, v) in field.values.iter().enumerate() {
        if !field.inside[k] {
            continue;
        }
        let z = field.grid.point(k);
        if exclude.is_some_and(|(c, r)| (z - c).norm() <= r) {
            continue;
        }
        err = err.max((v - reference.eval(z)?).norm());
    }
    Ok(err)
}
