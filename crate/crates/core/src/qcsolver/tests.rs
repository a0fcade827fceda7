use super::*;
use crate::beltrami::{BeltramiCoefficient, Sign};
use crate::exec::Execution;
use crate::geometry::{c, C64};
use crate::grid::{Domain, DomainMask};
use crate::modulus::{condenser_capacity, CondenserSpec, Plate, SolveOptions};
use std::f64::consts::PI;

const EX: Execution = Execution::Parallel;

fn disk(n: usize) -> DomainMask {
    DomainMask::fitted(Domain::unit_disk(), n).unwrap()
}

/// Independent oracle: the ellipse map `theta1(s, q) / theta4(s, q)` with
/// `s = asin(z / c)`, `q = ((a - b)/(a + b))^2`.
fn ellipse_oracle(a: f64, b: f64, z: C64) -> C64 {
    let foc = (a * a - b * b).sqrt();
    let q: f64 = ((a - b) / (a + b)).powi(2);
    let s = (z / foc).asin();
    let mut t1 = C64::new(0.0, 0.0);
    let mut t4 = C64::new(1.0, 0.0);
    for n in 0..30 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let e = (n as f64 + 0.5).powi(2);
        t1 += 2.0 * sign * q.powf(e) * ((2 * n + 1) as f64 * s).sin();
        if n >= 1 {
            t4 += 2.0 * sign * q.powi((n * n) as i32) * ((2 * n) as f64 * s).cos();
        }
    }
    t1 / t4
}

#[test]
fn ellipse_oracle_is_a_disk_map() {
    // the oracle itself: boundary onto the circle, w(0) = 0, w(a) = 1
    for k in 0..64 {
        let t = 2.0 * PI * k as f64 / 64.0;
        let w = ellipse_oracle(1.0, 0.6, c(t.cos(), 0.6 * t.sin()));
        assert!((w.norm() - 1.0).abs() < 1e-12, "{}", w.norm());
    }
    assert!(ellipse_oracle(1.0, 0.6, c(0.0, 0.0)).norm() < 1e-15);
    assert!((ellipse_oracle(1.0, 0.6, c(1.0, 0.0)) - 1.0).norm() < 1e-12);
}

#[test]
fn zero_coefficient_gives_identity() {
    let mask = disk(64);
    let sol = solve_beltrami(&BeltramiCoefficient::zero(), &mask, &SolverOptions::default()).unwrap();
    for (k, v) in sol.f.values.iter().enumerate() {
        assert!((v - mask.grid.point(k)).norm() < 1e-14);
    }
    assert_eq!(sol.residual.l2, 0.0);
    assert_eq!(jacobian_check(&sol).violations, 0);
}

#[test]
fn affine_solution_is_exact() {
    let mask = disk(256);
    let coef = BeltramiCoefficient::constant(c(0.3, 0.0)).unwrap();
    let sol = solve_beltrami(&coef, &mask, &SolverOptions::default()).unwrap();
    assert_eq!(sol.normalization, Normalization::Periodic);
    let err = mask
        .inside_points()
        .map(|(k, z)| (sol.f.values[k] - (z + 0.3 * z.conj())).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "affine sup error {err}");
    let off = sol.eval_at(c(0.37, -0.81)) - c(0.37 + 0.3 * 0.37, -0.81 + 0.3 * 0.81);
    assert!(off.norm() < 1e-9);
    let jac = jacobian_check(&sol);
    assert_eq!(jac.violations, 0);
    let (k, _) = mask.inside_points().nth(100).unwrap();
    assert!((sol.jacobian.values[k] - 0.91).abs() < 1e-9);
}

#[test]
fn radial_stretch_normalises_to_z_abs_z() {
    let mask = disk(256);
    let coef = BeltramiCoefficient::radial_stretch(2.0).unwrap();
    let sol = solve_beltrami(&coef, &mask, &SolverOptions::default()).unwrap();
    assert_eq!(sol.normalization, Normalization::Tapered);
    let g = normalize(&sol, EX).unwrap();
    let h = mask.grid.spacing();
    let err = mask
        .inside_points()
        .filter(|(_, z)| z.norm() > 2.0 * h)
        .map(|(k, z)| (g.values.values[k] - z * z.norm()).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-3, "radial stretch sup error {err}");
    assert_eq!(jacobian_check(&sol).violations, 0);
}

#[test]
fn residual_decreases_monotonically() {
    let mask = disk(64);
    for coef in [
        BeltramiCoefficient::radial_stretch(2.0).unwrap(),
        BeltramiCoefficient::angular(0.8, c(0.1, 0.0), Sign::Plus).unwrap(),
    ] {
        let sol = solve_beltrami(&coef, &mask, &SolverOptions::default()).unwrap();
        let hist = &sol.residual.history;
        assert!(hist.len() > 3);
        assert!(hist[3..].windows(2).all(|w| w[1] <= w[0]), "{hist:?}");
        assert!(sol.residual.relative < 1e-6, "{}", sol.residual.relative);
    }
}

#[test]
fn truncated_degenerate_log_has_few_jacobian_violations() {
    let mask = disk(256);
    let coef = BeltramiCoefficient::degenerate_log(c(0.0, 0.0));
    let sol = solve_beltrami(&coef, &mask, &SolverOptions { delta: 1e-3, ..Default::default() }).unwrap();
    let rep = jacobian_check(&sol);
    assert!(rep.fraction <= 1e-3, "{rep:?}");
    assert!(rep.locations.iter().all(|(z, _)| z.norm() < 0.1));
}

#[test]
fn bad_delta_is_rejected() {
    let mask = disk(32);
    for d in [0.0, 0.6] {
        let r = solve_beltrami(&BeltramiCoefficient::zero(), &mask, &SolverOptions { delta: d, ..Default::default() });
        assert!(r.is_err());
    }
}

#[test]
fn riemann_map_of_disks() {
    let unit = riemann_map(&disk(32), EX).unwrap();
    assert!(unit.boundary_error < 1e-6);
    for z in [c(0.2, 0.3), c(-0.5, 0.1)] {
        assert!((unit.eval_at(z) - z).norm() < 1e-10);
    }
    let two = DomainMask::fitted(Domain::Disk { center: c(0.0, 0.0), radius: 2.0 }, 32).unwrap();
    let m = riemann_map(&two, EX).unwrap();
    for z in [c(0.4, 1.1), c(-1.5, -0.2)] {
        assert!((m.eval_at(z) - z / 2.0).norm() < 1e-10);
    }
    assert!(m.cr_defect < 1e-4);
}

#[test]
fn ellipse_map_matches_theta_oracle() {
    let d = Domain::Ellipse { center: c(0.0, 0.0), semi_x: 1.0, semi_y: 0.6 };
    let m = riemann_map(&DomainMask::fitted(d, 64).unwrap(), EX).unwrap();
    assert!(m.cr_defect < 1e-4, "{}", m.cr_defect);
    let tab = &m.boundary[0];
    let err = tab
        .points
        .iter()
        .zip(&tab.images)
        .map(|(z, w)| (ellipse_oracle(1.0, 0.6, *z) - w).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-3, "boundary correspondence error {err}");
    let z = c(0.3, -0.2);
    assert!((m.eval_at(z) - ellipse_oracle(1.0, 0.6, z)).norm() < 1e-6);
    // the inverse table lands back on the ellipse
    let p = tab.preimage(1.0);
    assert!((p.re * p.re + p.im * p.im / 0.36 - 1.0).abs() < 1e-5);
    assert!((ellipse_oracle(1.0, 0.6, p).arg() - 1.0).abs() < 1e-3);
}

#[test]
fn wrong_connectivity_is_a_topology_error() {
    let ann = DomainMask::fitted(Domain::Annulus { center: c(0.0, 0.0), inner: 0.5, outer: 1.0 }, 32).unwrap();
    assert!(matches!(riemann_map(&ann, EX), Err(crate::Error::Topology(_))));
    assert!(matches!(annulus_map(&disk(32), EX), Err(crate::Error::Topology(_))));
}

#[test]
fn round_and_shifted_annuli() {
    for center in [c(0.0, 0.0), c(0.7, -0.4)] {
        let d = Domain::Annulus { center, inner: 0.5, outer: 1.0 };
        let m = annulus_map(&DomainMask::fitted(d, 32).unwrap(), EX).unwrap();
        let MapTarget::Annulus { inner_radius } = m.target else { panic!() };
        assert!((inner_radius - 0.5).abs() < 0.005, "{inner_radius}");
        assert!(m.cr_defect < 1e-4);
        let z = center + c(0.3, 0.6);
        assert!((m.eval_at(z) - (z - center)).norm() < 1e-8);
    }
}

#[test]
fn square_frame_modulus_matches_capacity() {
    let d = Domain::SquareFrame { center: c(0.0, 0.0), outer_half: 1.0, inner_half: 0.5 };
    let m = annulus_map(&DomainMask::fitted(d.clone(), 32).unwrap(), EX).unwrap();
    assert!(m.cr_defect < 1e-4, "{}", m.cr_defect);
    let square = |s: f64| Plate::Polyline {
        points: vec![c(-s, -s), c(s, -s), c(s, s), c(-s, s)],
        closed: true,
    };
    let cap = condenser_capacity(
        &CondenserSpec { domain: d, e: square(0.5), f: square(1.0), n: 256 },
        &SolveOptions::default(),
    )
    .unwrap();
    let modulus = m.modulus().unwrap();
    let rel = (modulus * cap.value - 1.0).abs();
    assert!(rel < 0.02, "modulus {modulus}, capacity {}, mismatch {rel}", cap.value);
}

#[test]
fn composition_with_identities() {
    let mask = disk(64);
    let sol = solve_beltrami(&BeltramiCoefficient::zero(), &mask, &SolverOptions::default()).unwrap();
    let r = riemann_map(&mask, EX).unwrap();
    let g = compose_normalized(&sol, &r, EX).unwrap();
    for (k, z) in mask.inside_points() {
        assert!((g.values.values[k] - z).norm() < 1e-9);
    }
}

#[test]
fn affine_composition_is_ellipse_map() {
    let mask = disk(128);
    let k = 0.3;
    let coef = BeltramiCoefficient::constant(c(k, 0.0)).unwrap();
    let sol = solve_beltrami(&coef, &mask, &SolverOptions::default()).unwrap();
    let g = normalize(&sol, EX).unwrap();
    let tab = &g.boundary[0];
    let dev = tab.images.iter().map(|w| (w.norm() - 1.0).abs()).fold(0.0, f64::max);
    assert!(dev < 1e-2, "{dev}");
    // f(D) is the ellipse with semi-axes 1.3, 0.7; compare with the oracle
    let z = c(0.2, 0.4);
    let w = ellipse_oracle(1.3, 0.7, z + k * z.conj());
    assert!((g.mapper.eval_at(sol.eval_at(z)) - w).norm() < 1e-6);
}

#[test]
fn composition_outside_mapper_fails() {
    let mask = disk(64);
    let sol = solve_beltrami(&BeltramiCoefficient::zero(), &mask, &SolverOptions::default()).unwrap();
    let small = DomainMask::fitted(Domain::Disk { center: c(0.0, 0.0), radius: 0.5 }, 32).unwrap();
    let r = riemann_map(&small, EX).unwrap();
    assert!(matches!(compose_normalized(&sol, &r, EX), Err(crate::Error::Composition(_))));
}

#[test]
fn sequential_and_parallel_solutions_agree_bitwise() {
    let mask = disk(64);
    let coef = BeltramiCoefficient::radial_stretch(1.5).unwrap();
    let a = solve_beltrami(&coef, &mask, &SolverOptions { exec: Execution::Sequential, ..Default::default() }).unwrap();
    let b = solve_beltrami(&coef, &mask, &SolverOptions::default()).unwrap();
    assert_eq!(a.f.values, b.f.values);
}

#[test]
fn csv_dumps() {
    let mask = disk(16);
    let sol = solve_beltrami(&BeltramiCoefficient::zero(), &mask, &SolverOptions::default()).unwrap();
    let mut buf = Vec::new();
    sol.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("x,y,re_f,im_f,jacobian"));
    assert_eq!(text.lines().count(), mask.count() + 1);
    let r = riemann_map(&mask, EX).unwrap();
    let mut buf = Vec::new();
    r.boundary[0].write_csv(&mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("theta,re_w,im_w"));
}
