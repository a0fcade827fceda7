use super::*;
use crate::beltrami::BeltramiCoefficient;
use crate::geometry::c;
use crate::grid::Domain;
use crate::maps::PlaneMap;
use crate::primeends::{build_prime_end_space, Side};

fn lattice(f: impl Fn(f64) -> f64, m: usize) -> Vec<C64> {
    (0..m).map(|j| C64::new(f(2.0 * PI * j as f64 / m as f64), 0.0)).collect()
}

#[test]
fn schwarz_examples() {
    let one = schwarz_operator(&lattice(|_| 1.0, 64), 8).unwrap();
    assert!((one.eval(c(0.3, 0.4)) - 1.0).norm() < 1e-14);
    let cos = schwarz_operator(&lattice(f64::cos, 64), 2).unwrap();
    let mut err: f64 = 0.0;
    for j in 0..200 {
        let z = C64::from_polar(1.0, j as f64 * 0.0314);
        err = err.max((cos.eval(z) - z).norm());
    }
    assert!(err < 1e-8);
    let mix = schwarz_operator(&lattice(|t| (2.0 * t).cos() + 0.5 * t.sin(), 64), 8).unwrap();
    for z in [c(0.2, 0.1), c(-0.5, 0.7)] {
        assert!((mix.eval(z) - (z * z - C64::new(0.0, 0.5) * z)).norm() < 1e-12);
    }
    assert_eq!(mix.eval(c(0.0, 0.0)).im, 0.0);
}

#[test]
fn schwarz_reproduces_truncated_datum() {
    let d = BoundaryDatum::Samples { values: vec![0.0, 1.0, 3.0, 2.0, -1.0, 0.5, 0.25, 0.0] };
    let h = schwarz_from_datum(&d, 3).unwrap();
    // Re h on the circle equals the degree-3 Fourier truncation of the lattice samples
    let m = lattice_for(3);
    let v: Vec<f64> = (0..m).map(|j| d.value(2.0 * PI * j as f64 / m as f64)).collect();
    let coef = |k: usize| -> C64 {
        v.iter()
            .enumerate()
            .map(|(j, x)| x * C64::from_polar(1.0, -2.0 * PI * (k * j) as f64 / m as f64))
            .sum::<C64>()
            / m as f64
    };
    for j in 0..16 {
        let t = 2.0 * PI * j as f64 / 16.0;
        let mut trunc = coef(0).re;
        for k in 1..=3 {
            trunc += 2.0 * (coef(k) * C64::from_polar(1.0, k as f64 * t)).re;
        }
        assert!((h.eval(C64::from_polar(1.0, t)).re - trunc).abs() < 1e-12);
    }
    let mean = v.iter().sum::<f64>() / m as f64;
    assert!((h.eval(c(0.0, 0.0)) - mean).norm() < 1e-12);
}

#[test]
fn complex_datum_rejected() {
    let mut s = lattice(f64::cos, 32);
    s[3].im = 0.1;
    assert!(matches!(schwarz_operator(&s, 4), Err(Error::Validation(_))));
}

fn quick() -> DirichletOptions {
    DirichletOptions { n: 128, terms: 32, ..Default::default() }
}

#[test]
fn conformal_disk_case() {
    let d = Domain::unit_disk();
    let datum = BoundaryDatum::cos(1);
    let sol = solve_dirichlet_sc(&BeltramiCoefficient::zero(), &d, &datum, &quick()).unwrap();
    for z in [c(0.3, -0.2), c(-0.6, 0.5)] {
        let f = sol.eval(z).unwrap();
        assert!((f.re - z.re).abs() < 1e-4 && (f - z).norm() < 1e-4, "{f} vs {z}");
    }
    let space = build_prime_end_space(&d, 64).unwrap();
    let spacing = sol.values.as_ref().unwrap().grid.spacing();
    let rows = boundary_residual(&sol, &datum, &space, &[0, 16], 0.5, 12, 4.0 * spacing).unwrap();
    let last = rows.iter().filter(|r| r.end == 0).last().unwrap();
    assert!(last.truncated);
    assert!(last.extrapolated.unwrap() < 1e-4, "{last:?}");
    assert!(sol.warnings.is_empty(), "{:?}", sol.warnings);
}

#[test]
fn constant_datum_gives_constant() {
    let datum = BoundaryDatum::Constant { value: 2.5 };
    let coef = BeltramiCoefficient::radial_stretch(3.0).unwrap();
    let sol = solve_dirichlet_sc(&coef, &Domain::unit_disk(), &datum, &quick()).unwrap();
    assert_eq!(sol.eval(c(0.1, 0.2)).unwrap(), c(2.5, 0.0));
    let space = build_prime_end_space(&Domain::unit_disk(), 16).unwrap();
    let rows = boundary_residual(&sol, &datum, &space, &[3], 0.5, 4, 0.0).unwrap();
    assert!(rows.iter().all(|r| r.residual == 0.0));
}

#[test]
fn radial_stretch_dirichlet() {
    let d = Domain::unit_disk();
    let datum = BoundaryDatum::cos(1);
    let coef = BeltramiCoefficient::radial_stretch(2.0).unwrap();
    let sol = solve_dirichlet_sc(&coef, &d, &datum, &DirichletOptions::default()).unwrap();
    let vals = sol.values.as_ref().unwrap();
    let h = vals.grid.spacing();
    let err = (0..vals.values.len())
        .filter(|&k| vals.inside[k] && vals.grid.point(k).norm() > 2.0 * h)
        .map(|k| {
            let z = vals.grid.point(k);
            (vals.values[k] - z * z.norm()).norm()
        })
        .fold(0.0, f64::max);
    assert!(err < 1e-3, "{err}");
    let space = build_prime_end_space(&d, 64).unwrap();
    let rows = boundary_residual(&sol, &datum, &space, &[0, 8, 40], 0.5, 12, 4.0 * h).unwrap();
    for id in [0, 8, 40] {
        let last = rows.iter().filter(|r| r.end == id).last().unwrap();
        assert!(last.extrapolated.unwrap() < 1e-3, "{last:?}");
    }
}

#[test]
fn maximum_principle_and_linearity() {
    let d = Domain::Ellipse { center: c(0.0, 0.0), semi_x: 1.0, semi_y: 0.7 };
    let coef = BeltramiCoefficient::constant(c(0.2, 0.1)).unwrap();
    let a = BoundaryDatum::Fourier { a0: 0.1, cos: vec![0.5, 0.0, 0.2], sin: vec![0.0, 0.3] };
    let b = BoundaryDatum::Fourier { a0: -0.2, cos: vec![0.0, 0.1], sin: vec![0.4] };
    let ab = BoundaryDatum::Fourier { a0: -0.1, cos: vec![0.5, 0.1, 0.2], sin: vec![0.4, 0.3] };
    // the boundary correspondence crowds near the ends of the image ellipse,
    // so the pulled-back data need the full default number of terms
    let o = DirichletOptions { n: 128, ..Default::default() };
    let sa = solve_dirichlet_sc(&coef, &d, &a, &o).unwrap();
    let sb = solve_dirichlet_sc(&coef, &d, &b, &o).unwrap();
    let sab = solve_dirichlet_sc(&coef, &d, &ab, &o).unwrap();
    let (va, vb, vab) = (sa.values.unwrap(), sb.values.unwrap(), sab.values.unwrap());
    let (lo, hi) = a.range();
    for k in 0..va.values.len() {
        if !va.inside[k] {
            continue;
        }
        assert!((vab.values[k] - va.values[k] - vb.values[k]).norm() < 1e-10);
        assert!(va.values[k].re >= lo - 1e-3 && va.values[k].re <= hi + 1e-3, "{} not in [{lo}, {hi}] at {}", va.values[k].re, va.grid.point(k));
    }
}

#[test]
fn slit_disk_sides_converge_separately() {
    let d = Domain::SlitDisk { x0: 0.0, x1: 1.0 };
    let datum = BoundaryDatum::cos(1);
    let sol = solve_dirichlet_sc(&BeltramiCoefficient::zero(), &d, &datum, &quick()).unwrap();
    let space = build_prime_end_space(&d, 128).unwrap();
    let up = space.ends.iter().find(|e| e.side == Side::Upper && (e.support.re - 0.5).abs() < 1e-12).unwrap();
    let lo = space.ends.iter().find(|e| e.side == Side::Lower && (e.support.re - 0.5).abs() < 1e-12).unwrap();
    let rows = boundary_residual(&sol, &datum, &space, &[up.id, lo.id], 0.25, 10, 1e-3).unwrap();
    for (id, want) in [(up.id, datum.value(up.reference.arg())), (lo.id, datum.value(lo.reference.arg()))] {
        let r: Vec<&ResidualRow> = rows.iter().filter(|r| r.end == id).collect();
        assert!(r.windows(2).all(|w| w[1].residual < w[0].residual));
        let last = r.last().unwrap();
        assert!(last.residual < 1e-2 && last.extrapolated.unwrap() < 1e-4, "{last:?}");
        assert!((last.value - want).abs() < 1e-2);
    }
    assert!((datum.value(up.reference.arg()) - datum.value(lo.reference.arg())).abs() > 1.9);
    assert!(matches!(
        solve_dirichlet_sc(&BeltramiCoefficient::radial_stretch(2.0).unwrap(), &d, &datum, &quick()),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn harmonic_annulus_examples() {
    let zero = BoundaryDatum::Constant { value: 0.0 };
    let one = BoundaryDatum::Constant { value: 1.0 };
    let r = (-1.0f64).exp();
    let h = harmonic_annulus(&zero, &one, r, 16).unwrap();
    for w in [c(0.5, 0.2), c(-0.1, 0.8)] {
        assert!((h.u(w) - (1.0 + w.norm().ln())).abs() < 1e-12);
    }
    assert!((h.period.omega[0] - 2.0 * PI).abs() < 1e-12);
    assert!(!h.period.single_valued);
    for om in &h.period.contour_omegas {
        assert!((om / h.period.omega[0] - 1.0).abs() < 0.01);
    }
    let cos = BoundaryDatum::cos(1);
    let hc = harmonic_annulus(&cos, &cos, 0.4, 16).unwrap();
    assert!(hc.period.omega[0].abs() < 1e-8 && hc.period.single_valued);
    for t in [0.3, 2.0] {
        assert!((hc.u(C64::from_polar(0.4, t)) - t.cos()).abs() < 1e-10);
        assert!((hc.u(C64::from_polar(1.0, t)) - t.cos()).abs() < 1e-10);
    }
    let cst = BoundaryDatum::Constant { value: 3.0 };
    let hk = harmonic_annulus(&cst, &cst, 0.3, 8).unwrap();
    assert!((hk.u(c(0.5, 0.0)) - 3.0).abs() < 1e-12 && hk.period.omega[0] == 0.0);
    assert!(matches!(harmonic_annulus(&cst, &cst, 1.2, 8), Err(Error::Validation(_))));
}

#[test]
fn multivalent_log_example() {
    let r = (-1.0f64).exp();
    let d = Domain::Annulus { center: c(0.0, 0.0), inner: r, outer: 1.0 };
    let zero = BoundaryDatum::Constant { value: 0.0 };
    let one = BoundaryDatum::Constant { value: 1.0 };
    let sol = multivalent_solution(&BeltramiCoefficient::zero(), &d, &zero, &one, &quick()).unwrap();
    assert!((sol.harmonic.r - r).abs() < 1e-6);
    let jump = sol.harmonic.analytic_w(c(r, 0.0), 1) - sol.harmonic.analytic_w(c(r, 0.0), 0);
    assert!((jump - C64::new(0.0, 2.0 * PI)).norm() < 1e-6);
    let z = c(0.6, 0.1);
    assert!(((sol.eval(z, 1).unwrap() - sol.eval(z, 0).unwrap()) - C64::new(0.0, sol.period())).norm() < 1e-12);
    assert!((sol.eval(z, 0).unwrap().re - (1.0 + z.norm().ln())).abs() < 1e-5);
    // one loop around the hole adds one period
    let path: Vec<C64> = (0..=64).map(|j| C64::from_polar(0.7, 0.1 + 2.0 * PI * j as f64 / 64.0)).collect();
    let (v, k) = sol.continue_along(&path).unwrap();
    assert_eq!(k, 1);
    assert!((v - sol.eval(path[0], 0).unwrap() - C64::new(0.0, 2.0 * PI)).norm() < 1e-5);
    let bad = [c(0.7, 0.0), c(0.2, 0.0)];
    assert!(matches!(sol.continue_along(&bad), Err(Error::Continuation(_))));
}

#[test]
fn multivalent_single_valued_and_constant_cases() {
    let d = Domain::Annulus { center: c(0.0, 0.0), inner: 0.5, outer: 1.0 };
    let cos = BoundaryDatum::cos(1);
    let sol = multivalent_solution(&BeltramiCoefficient::zero(), &d, &cos, &cos, &quick()).unwrap();
    assert!(sol.harmonic.period.single_valued, "{:?}", sol.harmonic.period);
    let z = c(0.1, 0.7);
    assert!((sol.eval(z, 3).unwrap() - sol.eval(z, 0).unwrap()).norm() < 1e-8);
    let cst = BoundaryDatum::Constant { value: -1.0 };
    let rs = BeltramiCoefficient::radial_stretch(2.0).unwrap();
    let k = multivalent_solution(&rs, &d, &cst, &cst, &quick()).unwrap();
    assert_eq!(k.eval(z, 0).unwrap(), k.eval(z, 5).unwrap());
    assert_eq!(k.eval(z, 0).unwrap(), c(-1.0, 0.0));
}

#[test]
fn radial_stretch_annulus_pipeline() {
    // f = z|z| maps the annulus (0.5, 1) onto (0.25, 1)
    let d = Domain::Annulus { center: c(0.0, 0.0), inner: 0.5, outer: 1.0 };
    let rs = BeltramiCoefficient::radial_stretch(2.0).unwrap();
    let zero = BoundaryDatum::Constant { value: 0.0 };
    let one = BoundaryDatum::Constant { value: 1.0 };
    let sol = multivalent_solution(&rs, &d, &zero, &one, &DirichletOptions { n: 256, terms: 16, ..Default::default() }).unwrap();
    assert!((sol.harmonic.r - 0.25).abs() < 0.0025, "{}", sol.harmonic.r);
    let z = c(0.0, 0.75);
    let want = 1.0 + (0.75f64 * 0.75).ln() / 4.0f64.ln();
    assert!((sol.eval(z, 0).unwrap().re - want).abs() < 1e-2);
}

#[test]
fn residual_csv() {
    let rows = vec![ResidualRow { end: 1, depth: 2, radius: 0.1, value: 0.0, residual: 0.5, extrapolated: None, truncated: false }];
    let mut buf = Vec::new();
    write_residual_csv(&rows, &mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("prime_end_id,depth,radius,residual,extrapolated\n1,2,0.1,0.5,"));
}

