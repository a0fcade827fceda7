//! Simply connected pipeline and boundary residuals along prime-end approaches.

use super::{datum_angle, lattice_for, schwarz_operator, BoundaryDatum, SchwarzResult};
use crate::beltrami::BeltramiCoefficient;
use crate::criteria::{circle_norm, divergence_test, log_radii, QuadratureOptions, ScalarFn, Status, Thresholds};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::C64;
use crate::grid::{ComplexField, Domain, DomainMask};
use crate::maps::PlaneMap;
use crate::primeends::{cross_cut_chain, PrimeEndSpace};
use crate::qcsolver::{normalize, solve_beltrami, BoundaryTable, ComposedMap, SolverOptions};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct DirichletOptions {
    /// Grid cells per side for the Beltrami solve.
    pub n: usize,
    /// Fourier terms in the Schwarz operator.
    pub terms: usize,
    pub solver: SolverOptions,
    pub exec: Execution,
}

impl Default for DirichletOptions {
    fn default() -> Self {
        DirichletOptions {
            n: 256,
            terms: 128,
            solver: SolverOptions::default(),
            exec: Execution::Parallel,
        }
    }
}

/// The normalising map `g` of a solution.
#[derive(Debug, Clone)]
pub enum SolutionMap {
    /// Constant data need no map.
    Constant,
    Composed(Box<ComposedMap>),
    /// Explicit conformal reference map of a prime-end space (`mu = 0`).
    Explicit(Box<PrimeEndSpace>),
}

#[derive(Debug, Clone)]
pub struct DirichletSolution {
    pub domain: Domain,
    pub h: SchwarzResult,
    pub map: SolutionMap,
    /// `f` at masked cells, when a grid was used.
    pub values: Option<ComplexField>,
    /// Relative Beltrami residual inherited from the solve.
    pub beltrami_residual: f64,
    pub warnings: Vec<String>,
}

impl DirichletSolution {
    /// Range of `Re f` over the grid cells, when a grid was used.
    pub fn value_range(&self) -> Option<(f64, f64)> {
        let v = self.values.as_ref()?;
        let range = v
            .inside_values()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| (lo.min(w.re), hi.max(w.re)));
        Some(range)
    }

    pub fn g(&self, z: C64) -> Result<C64> {
        match &self.map {
            SolutionMap::Constant => Ok(C64::new(0.0, 0.0)),
            SolutionMap::Composed(g) => g.eval(z),
            SolutionMap::Explicit(s) => s.reference_map(z),
        }
    }
}

impl PlaneMap for DirichletSolution {
    fn eval(&self, z: C64) -> Result<C64> {
        Ok(self.h.eval(self.g(z)?))
    }
}

fn pull_back(table: &BoundaryTable, datum: &BoundaryDatum, domain: &Domain, m: usize) -> Vec<C64> {
    (0..m)
        .map(|j| {
            let z = table.preimage(2.0 * PI * j as f64 / m as f64);
            C64::new(datum.value(datum_angle(domain, z)), 0.0)
        })
        .collect()
}

/// Divergence test for `K^T(., z0)` at a boundary probe point; returns a
/// warning when it is not satisfied.
fn divergence_precheck(coef: &BeltramiCoefficient, domain: &Domain, z0: C64) -> Option<String> {
    let q = ScalarFn::TangentDilatation(coef.clone(), z0);
    let radii = log_radii(0.25, 4.0, 12);
    let verdict = circle_norm(&q, domain, z0, &radii, &QuadratureOptions::default())
        .and_then(|norm| divergence_test(&norm, &Thresholds::default()));
    match verdict {
        Ok(v) if v.status == Status::Satisfied => None,
        Ok(v) => Some(format!("divergence test at boundary point {z0} is {:?}: {}", v.status, v.reason.unwrap_or_default())),
        Err(e) => Some(format!("divergence test at boundary point {z0} unavailable: {e}")),
    }
}

/// Solves the Dirichlet problem for the Beltrami equation in a simply
/// connected catalog domain as `f = h o g`.
pub fn solve_dirichlet_sc(
    coef: &BeltramiCoefficient,
    domain: &Domain,
    datum: &BoundaryDatum,
    opts: &DirichletOptions,
) -> Result<DirichletSolution> {
    datum.validate()?;
    domain.validate()?;
    if let Some(c) = datum.is_constant() {
        return Ok(DirichletSolution {
            domain: domain.clone(),
            h: SchwarzResult { coeffs: vec![C64::new(c, 0.0)] },
            map: SolutionMap::Constant,
            values: None,
            beltrami_residual: 0.0,
            warnings: vec![],
        });
    }
    let m = lattice_for(opts.terms);
    if let Domain::SlitDisk { .. } = domain {
        let conformal = coef.is_constant() && coef.eval_flagged(C64::new(0.0, 0.0))?.0 == C64::new(0.0, 0.0);
        if !conformal {
            return Err(Error::Unsupported(
                "slit domains are solved only in the conformal case (mu = 0)".into(),
            ));
        }
        let space = PrimeEndSpace::build(domain, 256)?;
        // data on prime ends are functions of the reference angle
        let samples: Vec<C64> = (0..m)
            .map(|j| C64::new(datum.value(2.0 * PI * j as f64 / m as f64), 0.0))
            .collect();
        let h = schwarz_operator(&samples, opts.terms)?;
        let mask = DomainMask::fitted(domain.clone(), opts.n)?;
        let values = exec::map_collect(opts.exec, mask.grid.len(), |k| {
            if mask.inside[k] {
                space.reference_map(mask.grid.point(k)).map(|w| h.eval(w)).unwrap_or_default()
            } else {
                C64::new(0.0, 0.0)
            }
        });
        return Ok(DirichletSolution {
            domain: domain.clone(),
            h,
            map: SolutionMap::Explicit(Box::new(space)),
            values: Some(ComplexField { grid: mask.grid, values, inside: mask.inside, clamped: 0 }),
            beltrami_residual: 0.0,
            warnings: vec![],
        });
    }
    if domain.connectivity() != Some(1) {
        return Err(Error::Topology(format!("{} is not simply connected", domain.name())));
    }
    let mask = DomainMask::fitted(domain.clone(), opts.n)?;
    let probe = domain.boundary(8)?[0][0];
    let warnings: Vec<String> = divergence_precheck(coef, domain, probe).into_iter().collect();
    let sol = solve_beltrami(coef, &mask, &opts.solver)?;
    let g = normalize(&sol, opts.exec)?;
    let samples = pull_back(&g.boundary[0], datum, domain, m);
    let h = schwarz_operator(&samples, opts.terms)?;
    let values = exec::map_collect(opts.exec, mask.grid.len(), |k| {
        if mask.inside[k] {
            h.eval(g.values.values[k])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(DirichletSolution {
        domain: domain.clone(),
        h,
        beltrami_residual: sol.residual.relative,
        map: SolutionMap::Composed(Box::new(g)),
        values: Some(ComplexField { grid: mask.grid, values, inside: mask.inside, clamped: 0 }),
        warnings,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualRow {
    pub end: usize,
    pub depth: usize,
    pub radius: f64,
    /// `Re f` at the midpoint of the cross-cut.
    pub value: f64,
    pub residual: f64,
    /// Residual of the Richardson extrapolation over this and the previous
    /// cuts: `(8 v(r) - 6 v(2r) + v(4r)) / 3` with three cuts, `2 v(r) - v(2r)`
    /// with two. Removes the smooth `O(r)` and `O(r^2)` approach error.
    pub extrapolated: Option<f64>,
    /// The chain stopped before the requested depth.
    pub truncated: bool,
}

/// `|Re f(z_m) - phi(P)|` along cross-cut chains of the given ends, down
/// to cuts of radius `min_radius`.
pub fn boundary_residual(
    sol: &DirichletSolution,
    datum: &BoundaryDatum,
    space: &PrimeEndSpace,
    ends: &[usize],
    eps0: f64,
    depth: usize,
    min_radius: f64,
) -> Result<Vec<ResidualRow>> {
    let mut rows = Vec::new();
    for &id in ends {
        let end = *space.end(id)?;
        let target = datum.value(space.angle(&end));
        let chain = cross_cut_chain(space, id, eps0, depth)?;
        let mut prev: Vec<f64> = Vec::new();
        let mut truncated = chain.truncated;
        for (m, cut) in chain.cuts.iter().enumerate() {
            if cut.radius < min_radius {
                truncated = true;
                break;
            }
            let v = sol.eval(cut.midpoint)?.re;
            rows.push(ResidualRow {
                end: id,
                depth: m + 1,
                radius: cut.radius,
                value: v,
                residual: (v - target).abs(),
                extrapolated: match prev.as_slice() {
                    [.., p2, p1] => Some(((8.0 * v - 6.0 * p1 + p2) / 3.0 - target).abs()),
                    [p1] => Some((2.0 * v - p1 - target).abs()),
                    [] => None,
                },
                truncated: false,
            });
            prev.push(v);
        }
        if truncated {
            if let Some(last) = rows.last_mut().filter(|r| r.end == id) {
                last.truncated = true;
            }
        }
    }
    Ok(rows)
}

pub fn write_residual_csv<W: std::io::Write>(rows: &[ResidualRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["prime_end_id", "depth", "radius", "residual", "extrapolated"])?;
    for r in rows {
        out.serialize((r.end, r.depth, r.radius, r.residual, r.extrapolated))?;
    }
    out.flush()?;
    Ok(())
}
