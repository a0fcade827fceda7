use super::plates::{plate_distance, Plate, PreparedPlate};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::grid::{Domain, DomainMask, ScalarGrid};
use serde::{Deserialize, Serialize};

/// Edge fractions below this are treated as this (the plate passes through
/// a cell centre).
const MIN_FRACTION: f64 = 1e-2;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondenserSpec {
    pub domain: Domain,
    pub e: Plate,
    pub f: Plate,
    /// Cells per side of the grid fitted to the domain.
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relative residual target of the linear solve.
    pub tol: f64,
    pub max_iter: usize,
    #[serde(default)]
    pub exec: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_iter: 50_000,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityResult {
    /// Modulus of the family of curves joining the plates in the domain.
    pub value: f64,
    /// Final relative residual of the linear solve.
    pub residual: f64,
    pub iterations: usize,
    pub n: usize,
    /// `|value(n) - value(n/2)|` when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
    /// Equilibrium potential (0 on `e`, 1 on `f`), NaN off the unknowns.
    #[serde(skip)]
    pub potential: Option<ScalarGrid>,
}

/// Discrete graph Laplacian with cut-cell Dirichlet edges.
struct System {
    cells: Vec<usize>,
    nb: Vec<[u32; 4]>,
    diag: Vec<f64>,
    rhs: Vec<f64>,
    /// `sum c`, `sum c g`, `sum c g^2` over Dirichlet edges of each unknown.
    dir: Vec<[f64; 3]>,
}

impl System {
    fn apply(&self, x: &[f64], y: &mut [f64], exec: Execution) {
        exec::for_each_mut(exec, y, |p, out| {
            let mut v = self.diag[p] * x[p];
            for &q in &self.nb[p] {
                if q != NONE {
                    v -= x[q as usize];
                }
            }
            *out = v;
        });
    }

    fn energy(&self, u: &[f64], exec: Execution) -> f64 {
        exec::sum(exec, u.len(), |p| {
            let mut e = 0.0;
            for &q in &self.nb[p] {
                if q != NONE {
                    let d = u[p] - u[q as usize];
                    e += 0.5 * d * d;
                }
            }
            let [c, cg, cg2] = self.dir[p];
            e + u[p] * u[p] * c - 2.0 * u[p] * cg + cg2
        })
    }
}

fn build(mask: &DomainMask, plates: [&PreparedPlate; 2]) -> Result<System> {
    let g = mask.grid;
    let n = g.n;
    let h = g.spacing();
    let unknown: Vec<bool> = (0..g.len())
        .map(|k| mask.inside[k] && !plates.iter().any(|p| p.covers(g.point(k))))
        .collect();
    let mut index = vec![NONE; g.len()];
    let cells: Vec<usize> = (0..g.len()).filter(|&k| unknown[k]).collect();
    for (i, &k) in cells.iter().enumerate() {
        index[k] = i as u32;
    }
    let dirs: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
    let rows: Vec<([u32; 4], f64, [f64; 3], [bool; 2])> = cells
        .iter()
        .map(|&k| {
            let (i, j) = ((k % n) as i64, (k / n) as i64);
            let p = g.point(k);
            let mut nb = [NONE; 4];
            let mut diag = 0.0;
            let mut dir = [0.0; 3];
            let mut touched = [false; 2];
            for (s, (di, dj)) in dirs.iter().enumerate() {
                let q = p + crate::geometry::c(*di as f64 * h, *dj as f64 * h);
                let mut hit: Option<(f64, f64, usize)> = None;
                for (v, plate) in plates.iter().enumerate() {
                    if let Some(t) = plate.hit(k, q) {
                        if hit.is_none_or(|(b, _, _)| t < b) {
                            hit = Some((t, v as f64, v));
                        }
                    }
                }
                if let Some((t, value, v)) = hit {
                    let cond = 1.0 / t.max(MIN_FRACTION);
                    diag += cond;
                    dir[0] += cond;
                    dir[1] += cond * value;
                    dir[2] += cond * value * value;
                    touched[v] = true;
                    continue;
                }
                let (qi, qj) = (i + di, j + dj);
                if qi < 0 || qj < 0 || qi >= n as i64 || qj >= n as i64 {
                    continue;
                }
                let qk = qj as usize * n + qi as usize;
                if unknown[qk] && mask.domain.segment_clear(p, q) {
                    nb[s] = index[qk];
                    diag += 1.0;
                }
            }
            (nb, diag, dir, touched)
        })
        .collect();
    let mut touched = [false; 2];
    for r in &rows {
        touched[0] |= r.3[0];
        touched[1] |= r.3[1];
    }
    if !touched[0] || !touched[1] {
        return Err(Error::Geometry("a plate does not meet the domain on this grid".into()));
    }
    Ok(System {
        cells,
        nb: rows.iter().map(|r| r.0).collect(),
        diag: rows.iter().map(|r| r.1).collect(),
        rhs: rows.iter().map(|r| r.2[1]).collect(),
        dir: rows.iter().map(|r| r.2).collect(),
    })
}

/// Jacobi-preconditioned conjugate gradients; returns `(x, residual, iterations)`.
fn pcg(sys: &System, opts: &SolveOptions) -> Result<(Vec<f64>, f64, usize)> {
    let m = sys.rhs.len();
    let ex = opts.exec;
    let dot = |a: &[f64], b: &[f64]| exec::sum(ex, m, |i| a[i] * b[i]);
    let bnorm = dot(&sys.rhs, &sys.rhs).sqrt();
    let mut x = vec![0.0; m];
    if bnorm == 0.0 {
        return Ok((x, 0.0, 0));
    }
    let mut r = sys.rhs.clone();
    let mut z: Vec<f64> = (0..m).map(|i| r[i] / sys.diag[i].max(1e-300)).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; m];
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    for it in 1..=opts.max_iter {
        sys.apply(&p, &mut ap, ex);
        let alpha = rz / dot(&p, &ap);
        exec::for_each_mut(ex, &mut x, |i, v| *v += alpha * p[i]);
        exec::for_each_mut(ex, &mut r, |i, v| *v -= alpha * ap[i]);
        res = dot(&r, &r).sqrt() / bnorm;
        if !res.is_finite() {
            break;
        }
        if res <= opts.tol {
            return Ok((x, res, it));
        }
        exec::for_each_mut(ex, &mut z, |i, v| *v = r[i] / sys.diag[i].max(1e-300));
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        exec::for_each_mut(ex, &mut p, |i, v| *v = z[i] + beta * *v);
    }
    Err(Error::Solver {
        reason: format!("conjugate gradients did not reach tol {} in {} iterations", opts.tol, opts.max_iter),
        residual: res,
    })
}

/// Modulus of the curves joining `e` and `f` in the domain, as the minimal
/// discrete Dirichlet energy of a potential equal to 0 on `e` and 1 on `f`
/// with a reflecting condition on the rest of the boundary.
pub fn condenser_capacity(spec: &CondenserSpec, opts: &SolveOptions) -> Result<CapacityResult> {
    spec.e.validate()?;
    spec.f.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::arg("tolerance must be positive"));
    }
    let mask = DomainMask::fitted(spec.domain.clone(), spec.n)?;
    let h = mask.grid.spacing();
    let gap = plate_distance(&spec.e, &spec.f, 0.5 * h);
    if gap < 2.0 * h {
        return Err(Error::validation(format!(
            "plates are {gap:.3e} apart, less than two cells ({:.3e})",
            2.0 * h
        )));
    }
    // Canonical plate order makes capacity(E, F) and capacity(F, E) identical.
    let key = |p: &Plate| serde_json::to_string(p).unwrap_or_default();
    let swapped = key(&spec.e) > key(&spec.f);
    let (lo, hi) = if swapped { (&spec.f, &spec.e) } else { (&spec.e, &spec.f) };
    let pl = PreparedPlate::new(lo, mask.grid);
    let ph = PreparedPlate::new(hi, mask.grid);
    let sys = build(&mask, [&pl, &ph])?;
    let (u, residual, iterations) = pcg(&sys, opts)?;
    let value = sys.energy(&u, opts.exec);

    let mut values = vec![f64::NAN; mask.grid.len()];
    for (i, &k) in sys.cells.iter().enumerate() {
        values[k] = if swapped { 1.0 - u[i] } else { u[i] };
    }
    Ok(CapacityResult {
        value,
        residual,
        iterations,
        n: spec.n,
        error_estimate: None,
        potential: Some(ScalarGrid {
            grid: mask.grid,
            values,
        }),
    })
}

/// [`condenser_capacity`] plus the change from the half-resolution grid.
pub fn condenser_capacity_with_estimate(spec: &CondenserSpec, opts: &SolveOptions) -> Result<CapacityResult> {
    let mut fine = condenser_capacity(spec, opts)?;
    let coarse = condenser_capacity(
        &CondenserSpec {
            n: spec.n / 2,
            ..spec.clone()
        },
        opts,
    )?;
    fine.error_estimate = Some((fine.value - coarse.value).abs());
    Ok(fine)
}
