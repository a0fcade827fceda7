use super::*;
use crate::maps::mobius;

fn slit() -> PrimeEndSpace {
    build_prime_end_space(&Domain::SlitDisk { x0: 0.0, x1: 1.0 }, 128).unwrap()
}

fn find(space: &PrimeEndSpace, x: f64, side: Side) -> usize {
    space
        .ends
        .iter()
        .find(|e| e.side == side && (e.support - c(x, 0.0)).norm() < 1e-12)
        .unwrap()
        .id
}

#[test]
fn disk_metric_is_chordal() {
    let s = build_prime_end_space(&Domain::unit_disk(), 64).unwrap();
    assert_eq!(s.ends.len(), 64);
    assert_eq!(prime_end_metric(&s, 5, 5).unwrap(), 0.0);
    assert!((prime_end_metric(&s, 0, 32).unwrap() - 2.0).abs() < 1e-14);
}

#[test]
fn slit_sides_are_distinct_ends() {
    let s = slit();
    let (u, l) = (find(&s, 0.5, Side::Upper), find(&s, 0.5, Side::Lower));
    assert_eq!(s.ends[u].support, s.ends[l].support);
    let rho = prime_end_metric(&s, u, l).unwrap();
    // explicit evaluation: s = ±1/sqrt 2
    let w = |sv: f64| {
        let t = ((1.0 + sv) / (1.0 - sv)).powi(2);
        (c(t, -1.0)) / c(t, 1.0)
    };
    let oracle = (w(0.5f64.sqrt()) - w(-(0.5f64.sqrt()))).norm();
    assert!((rho - oracle).abs() < 1e-12);
    assert!((rho - 1.9965).abs() < 1e-3, "{rho}");
    // every reference coordinate is on the unit circle
    assert!(s.ends.iter().all(|e| (e.reference.norm() - 1.0).abs() < 1e-12));
}

#[test]
fn tip_is_limit_of_both_sides() {
    let s = slit();
    let tip = s.ends.iter().find(|e| e.side == Side::Tip).unwrap();
    assert!((tip.reference - c(0.0, -1.0)).norm() < 1e-14);
    for side in [Side::Upper, Side::Lower] {
        let d: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&x| (s.reference_of_support(c(x, 0.0), side) - tip.reference).norm())
            .collect();
        assert!(d[2] < 1e-2 && d[1] < d[0] && d[2] < d[1], "{d:?}");
    }
}

#[test]
fn metric_axioms_on_lattice() {
    let s = slit();
    let n = s.ends.len();
    for a in (0..n).step_by(17) {
        for b in (0..n).step_by(13) {
            let ab = prime_end_metric(&s, a, b).unwrap();
            assert_eq!(ab, prime_end_metric(&s, b, a).unwrap());
            for cc in (0..n).step_by(29) {
                let t = prime_end_metric(&s, a, cc).unwrap() + prime_end_metric(&s, cc, b).unwrap();
                assert!(ab <= t + 1e-15);
            }
        }
    }
}

#[test]
fn second_reference_map_gives_same_topology() {
    let s = slit();
    assert!(metrics_equivalent(&s, &|e: &PrimeEnd| mobius(c(0.3, -0.2), e.reference)));
    // a map collapsing the two slit sides is not equivalent
    assert!(!metrics_equivalent(&s, &|e: &PrimeEnd| e.support));
}

#[test]
fn unsupported_domains() {
    assert!(matches!(
        build_prime_end_space(&Domain::Rectangle { min: c(0.0, 0.0), max: c(1.0, 1.0) }, 16),
        Err(Error::Unsupported(_))
    ));
    assert!(matches!(
        build_prime_end_space(&Domain::SlitDisk { x0: 0.0, x1: 0.5 }, 16),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn disk_chain_is_separating_half_circles() {
    let s = build_prime_end_space(&Domain::unit_disk(), 64).unwrap();
    let ch = cross_cut_chain(&s, 0, 0.5, 5).unwrap();
    assert_eq!(ch.cuts.len(), 5);
    assert!(!ch.truncated);
    let r = ch.radii();
    assert!(r.windows(2).all(|w| w[1] < w[0]));
    for cut in &ch.cuts {
        assert!(cut.separates);
        // S(1, r) meets the disk in an arc of angle 2 acos(r/2), nearly a half circle
        let span = cut.angles.1 - cut.angles.0;
        let exact = 2.0 * (cut.radius / 2.0).acos();
        assert!((span - exact).abs() < 1e-9, "{span} vs {exact}");
        assert!(cut.points.iter().all(|z| z.norm() <= 1.0 + 1e-12));
    }
    assert!(cross_cut_chain(&s, 0, 0.5, 0).unwrap().cuts.is_empty());
}

#[test]
fn slit_chain_picks_the_right_side() {
    let s = slit();
    for (side, sign) in [(Side::Upper, 1.0), (Side::Lower, -1.0)] {
        let id = find(&s, 0.5, side);
        let ch = cross_cut_chain(&s, id, 0.25, 4).unwrap();
        assert_eq!(ch.cuts.len(), 4);
        for cut in &ch.cuts {
            assert!(cut.separates);
            assert!(cut.points[1..ARC - 1].iter().all(|z| z.im * sign > 0.0));
            assert!((cut.midpoint - c(0.5, sign * cut.radius)).norm() < 1e-9);
        }
    }
}

const ARC: usize = 65;

#[test]
fn identity_extends_continuously() {
    let s = build_prime_end_space(&Domain::unit_disk(), 64).unwrap();
    let id = |z: C64| z;
    let rep = extension_continuity_check(&id, &s, &ContinuityOptions::default()).unwrap();
    assert!(rep.passed, "{rep:?}");
    for e in &rep.ends {
        for (o, r) in e.oscillations.iter().zip(&e.radii) {
            assert!(*o <= 2.0 * r + 1e-12);
        }
    }
}

#[test]
fn slit_map_extends_to_distinct_arcs() {
    let s = slit();
    let rep = extension_continuity_check(&s, &s, &ContinuityOptions { min_radius: 1e-4, depth: 12, ..Default::default() })
        .unwrap();
    assert!(rep.passed, "{:?}", (rep.injective, rep.off_target, rep.gap_ratio));
    let u = find(&s, 0.5, Side::Upper);
    let l = find(&s, 0.5, Side::Lower);
    let opts = ContinuityOptions { samples: s.ends.len(), min_radius: 1e-4, depth: 12, ..Default::default() };
    let full = extension_continuity_check(&s, &s, &opts).map_err(|e| e.to_string()).unwrap();
    let lu = full.ends.iter().find(|e| e.id == u).unwrap().limit;
    let ll = full.ends.iter().find(|e| e.id == l).unwrap().limit;
    assert!((lu - ll).norm() > 1.9);
}

#[test]
fn non_extending_map_fails() {
    // z -> z / 2 does not reach the unit circle
    let s = build_prime_end_space(&Domain::unit_disk(), 64).unwrap();
    let half = |z: C64| z * 0.5;
    let rep = extension_continuity_check(&half, &s, &ContinuityOptions::default()).unwrap();
    assert!(!rep.surjective && !rep.passed);
}

#[test]
fn end_table_csv() {
    let s = slit();
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("id,support_x,support_y,side,ref_angle"));
    assert!(text.contains(",upper,") && text.contains(",tip,"));
}
