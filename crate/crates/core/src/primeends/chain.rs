//! Circular cross-cut chains and boundary-extension checks.

use super::{PrimeEnd, PrimeEndSpace};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::C64;
use crate::maps::PlaneMap;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::PI;

const CIRCLE_SAMPLES: usize = 2048;
const ARC_POINTS: usize = 65;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCut {
    pub radius: f64,
    /// Angular range `[start, end]` of the arc about the support point.
    pub angles: (f64, f64),
    pub points: Vec<C64>,
    pub midpoint: C64,
    /// Whether the arc cuts the chain tail off from the basepoint.
    pub separates: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCutChain {
    pub end: usize,
    pub basepoint: C64,
    pub cuts: Vec<CrossCut>,
    /// The chain stopped early because an arc could not be resolved.
    pub truncated: bool,
}

impl CrossCutChain {
    pub fn radii(&self) -> Vec<f64> {
        self.cuts.iter().map(|c| c.radius).collect()
    }
}

/// Inside-the-domain runs of `S(z0, r)`, as angular intervals.
fn arcs(space: &PrimeEndSpace, z0: C64, r: f64) -> Vec<(f64, f64)> {
    let d = &space.domain;
    let k = CIRCLE_SAMPLES;
    let dphi = 2.0 * PI / k as f64;
    let at = |phi: f64| z0 + C64::from_polar(r, phi);
    let inside: Vec<bool> = (0..k).map(|j| d.contains(at(j as f64 * dphi))).collect();
    let link = |j: usize| {
        let a = j as f64 * dphi;
        inside[j] && inside[(j + 1) % k] && d.segment_clear(at(a), at(a + dphi))
    };
    let links: Vec<bool> = (0..k).map(link).collect();
    if links.iter().all(|&l| l) {
        return vec![(0.0, 2.0 * PI)];
    }
    // start scanning after a break so runs do not wrap
    let start = (0..k).find(|&j| !links[j]).unwrap() + 1;
    let mut runs = Vec::new();
    let mut j = 0;
    while j < k {
        let idx = (start + j) % k;
        if !inside[idx] {
            j += 1;
            continue;
        }
        let first = start + j;
        let mut last = first;
        while last - start + 1 < k && links[last % k] {
            last += 1;
        }
        runs.push((first, last));
        j = last - start + 1;
    }
    let bisect = |good: f64, bad: f64, from: f64| {
        let (mut g, mut b) = (good, bad);
        for _ in 0..40 {
            let m = 0.5 * (g + b);
            if d.contains(at(m)) && d.segment_clear(at(from), at(m)) {
                g = m;
            } else {
                b = m;
            }
        }
        g
    };
    runs.into_iter()
        .map(|(a, b)| {
            let (pa, pb) = (a as f64 * dphi, b as f64 * dphi);
            (bisect(pa, pa - dphi, pa), bisect(pb, pb + dphi, pb))
        })
        .collect()
}

fn arc_points(z0: C64, r: f64, (a, b): (f64, f64)) -> Vec<C64> {
    // endpoints pulled in slightly so that rounding keeps them inside
    let (a, b) = (a + 1e-9 * (b - a), b - 1e-9 * (b - a));
    (0..ARC_POINTS)
        .map(|k| z0 + C64::from_polar(r, a + (b - a) * k as f64 / (ARC_POINTS - 1) as f64))
        .collect()
}

/// The arc on the end's side: its midpoint has the reference image closest
/// to the end's reference coordinate.
fn select(space: &PrimeEnd, sp: &PrimeEndSpace, r: f64) -> Option<(f64, f64)> {
    let z0 = space.support;
    arcs(sp, z0, r)
        .into_iter()
        .filter_map(|arc| {
            let mid = z0 + C64::from_polar(r, 0.5 * (arc.0 + arc.1));
            sp.reference_map(mid).ok().map(|w| ((w - space.reference).norm(), arc))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|x| x.1)
}

/// Flood fill of `D ∩ B(z0, r)` on a polar lattice from `tail`; the cut
/// separates when the region reaches the circle only through the arc.
fn separates(sp: &PrimeEndSpace, z0: C64, r: f64, arc: (f64, f64), tail: C64, base: C64) -> bool {
    if (base - z0).norm() <= r {
        return false;
    }
    const NR: usize = 48;
    const NA: usize = 256;
    let d = &sp.domain;
    let at = |i: usize, a: usize| z0 + C64::from_polar(r * (i as f64 + 0.5) / NR as f64, 2.0 * PI * a as f64 / NA as f64);
    let inside: Vec<bool> = (0..NR * NA).map(|k| d.contains(at(k / NA, k % NA))).collect();
    let rel = tail - z0;
    let i0 = ((rel.norm() / r * NR as f64 - 0.5).round().max(0.0) as usize).min(NR - 1);
    let a0 = ((rel.arg().rem_euclid(2.0 * PI) / (2.0 * PI) * NA as f64).round() as usize) % NA;
    if !inside[i0 * NA + a0] {
        return false;
    }
    let mut seen = vec![false; NR * NA];
    let mut queue = VecDeque::from([(i0, a0)]);
    seen[i0 * NA + a0] = true;
    let mut touched = Vec::new();
    while let Some((i, a)) = queue.pop_front() {
        if i == NR - 1 {
            touched.push(a);
        }
        let mut nb = vec![(i, (a + 1) % NA), (i, (a + NA - 1) % NA)];
        if i > 0 {
            nb.push((i - 1, a));
        }
        if i + 1 < NR {
            nb.push((i + 1, a));
        }
        for (p, q) in nb {
            let k = p * NA + q;
            if !seen[k] && inside[k] && d.segment_clear(at(i, a), at(p, q)) {
                seen[k] = true;
                queue.push_back((p, q));
            }
        }
    }
    let cell = 2.0 * PI / NA as f64;
    let (lo, hi) = arc;
    touched.iter().all(|&a| {
        let phi = a as f64 * cell;
        // compare modulo 2 pi with one cell of slack
        let t = (phi - lo).rem_euclid(2.0 * PI);
        t <= (hi - lo) + cell || t >= 2.0 * PI - cell
    })
}

/// Chain of circular cross-cuts `S(z0, eps0 2^-m)`, `m = 1..=depth`.
pub fn cross_cut_chain(space: &PrimeEndSpace, end: usize, eps0: f64, depth: usize) -> Result<CrossCutChain> {
    chain_to(space, end, eps0, depth, 0.0)
}

fn chain_to(space: &PrimeEndSpace, end: usize, eps0: f64, depth: usize, min_radius: f64) -> Result<CrossCutChain> {
    if !(eps0 > 0.0) {
        return Err(Error::arg("eps0 must be positive"));
    }
    let p = *space.end(end)?;
    let base = space.domain.interior_point();
    let mut found = Vec::new();
    let mut truncated = false;
    for m in 1..=depth {
        let r = eps0 * 0.5f64.powi(m as i32);
        if r < min_radius {
            truncated = true;
            break;
        }
        match select(&p, space, r) {
            Some(arc) => found.push((r, arc)),
            None => {
                truncated = true;
                break;
            }
        }
    }
    let z0 = p.support;
    let mids: Vec<C64> = found
        .iter()
        .map(|(r, (a, b))| z0 + C64::from_polar(*r, 0.5 * (a + b)))
        .collect();
    let cuts = found
        .iter()
        .enumerate()
        .map(|(k, &(r, arc))| {
            let tail = mids.get(k + 1).copied().unwrap_or(z0 + (mids[k] - z0) * 0.5);
            CrossCut {
                radius: r,
                angles: arc,
                points: arc_points(z0, r, arc),
                midpoint: mids[k],
                separates: separates(space, z0, r, arc, tail, base),
            }
        })
        .collect();
    Ok(CrossCutChain {
        end,
        basepoint: base,
        cuts,
        truncated,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuityOptions {
    pub eps0: f64,
    pub depth: usize,
    /// Chains stop before radii below this (e.g. four grid cells).
    pub min_radius: f64,
    /// Required oscillation at the deepest cut.
    pub tol: f64,
    /// Number of ends sampled from the space.
    pub samples: usize,
    /// Target boundary circles `(center, radius)`.
    pub target: Vec<(C64, f64)>,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for ContinuityOptions {
    fn default() -> Self {
        ContinuityOptions {
            eps0: 0.25,
            depth: 8,
            min_radius: 1e-3,
            tol: 1e-2,
            samples: 32,
            target: vec![(C64::new(0.0, 0.0), 1.0)],
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndContinuity {
    pub id: usize,
    pub radii: Vec<f64>,
    pub oscillations: Vec<f64>,
    pub limit: C64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub ends: Vec<EndContinuity>,
    /// Boundary values are strictly monotone around each target circle.
    pub injective: bool,
    /// Largest distance from a limit to the target boundary.
    pub off_target: f64,
    /// Largest angular gap between consecutive limits over the mean gap
    /// (lattice resolution, informational).
    pub gap_ratio: f64,
    /// Limits lie on the target and wind once around it: a monotone
    /// degree-one boundary map is onto.
    pub surjective: bool,
    pub passed: bool,
}

fn diameter(ws: &[C64]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..ws.len() {
        for j in i + 1..ws.len() {
            d = d.max((ws[i] - ws[j]).norm());
        }
    }
    d
}

/// Evaluates `g` along cross-cut chains of sampled ends and checks that the
/// induced boundary map is well defined, injective and onto the target.
pub fn extension_continuity_check(g: &dyn PlaneMap, space: &PrimeEndSpace, opts: &ContinuityOptions) -> Result<ContinuityReport> {
    if opts.target.is_empty() {
        return Err(Error::arg("at least one target circle is required"));
    }
    let n = space.ends.len();
    let step = (n / opts.samples.max(1)).max(1);
    let ids: Vec<usize> = (0..n).step_by(step).collect();
    let rows = exec::map_collect(opts.exec, ids.len(), |k| -> Result<EndContinuity> {
        let chain = chain_to(space, ids[k], opts.eps0, opts.depth, opts.min_radius)?;
        let mut osc = Vec::new();
        let mut limit = C64::new(f64::NAN, f64::NAN);
        for cut in &chain.cuts {
            let ws = cut.points.iter().map(|&z| g.eval(z)).collect::<Result<Vec<_>>>()?;
            osc.push(diameter(&ws));
            limit = g.eval(cut.midpoint)?;
        }
        let converged = osc.last().is_some_and(|&o| o <= opts.tol);
        Ok(EndContinuity {
            id: ids[k],
            radii: chain.radii(),
            oscillations: osc,
            limit,
            converged,
        })
    });
    let ends = rows.into_iter().collect::<Result<Vec<_>>>()?;

    // group limits by nearest target circle, keeping lattice order
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); opts.target.len()];
    let mut off_target: f64 = 0.0;
    for e in &ends {
        let (k, dist) = opts
            .target
            .iter()
            .enumerate()
            .map(|(k, (c, r))| (k, ((e.limit - c).norm() - r).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        off_target = off_target.max(dist);
        groups[k].push((e.limit - opts.target[k].0).arg());
    }
    let mut injective = true;
    let mut degree_one = true;
    let mut gap_ratio: f64 = 0.0;
    for angles in groups.iter().filter(|a| a.len() >= 3) {
        let steps: Vec<f64> = (0..angles.len())
            .map(|k| (angles[(k + 1) % angles.len()] - angles[k] + PI).rem_euclid(2.0 * PI) - PI)
            .collect();
        let total: f64 = steps.iter().sum();
        let sign = total.signum();
        injective &= steps.iter().all(|s| s * sign > 0.0);
        degree_one &= (total.abs() - 2.0 * PI).abs() < 1e-6;
        let mean = 2.0 * PI / angles.len() as f64;
        gap_ratio = gap_ratio.max(steps.iter().map(|s| s.abs()).fold(0.0, f64::max) / mean);
    }
    if !off_target.is_finite() {
        off_target = f64::INFINITY;
    }
    let surjective = off_target <= opts.tol && degree_one && groups.iter().all(|g| g.len() >= 3);
    let passed = injective && surjective && ends.iter().all(|e| e.converged);
    Ok(ContinuityReport {
        ends,
        injective,
        off_target,
        gap_ratio,
        surjective,
        passed,
    })
}
