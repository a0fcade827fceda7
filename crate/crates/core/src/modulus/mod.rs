//! Conformal modulus of joining curve families, computed as discrete
//! condenser capacity, and the ring inequality checks built on it.
//!
//! The potential lives on cell centres of a grid fitted to the domain. Edges
//! between neighbouring inside cells carry unit conductance; an edge cut by
//! a plate at fraction `t` becomes a Dirichlet edge of conductance `1/t`;
//! edges leaving the domain are dropped, which is the reflecting condition.

mod capacity;
mod plates;
mod ring;

pub use capacity::{condenser_capacity, condenser_capacity_with_estimate, CapacityResult, CondenserSpec, SolveOptions};
pub use plates::Plate;
pub use ring::{annulus_plates, plane_minorant_check, ring_inequality_check, ring_rhs, MinorantReport, RingOptions, RingReport};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{QuadratureOptions, ScalarFn};
    use crate::error::Error;
    use crate::geometry::{c, C64};
    use crate::grid::Domain;
    use crate::maps::{mobius_circle, MapSpec};
    use std::f64::consts::{E, PI};

    fn o() -> C64 {
        c(0.0, 0.0)
    }

    fn square(n: usize) -> CondenserSpec {
        CondenserSpec {
            domain: Domain::Rectangle { min: o(), max: c(1.0, 1.0) },
            e: Plate::Segment { a: o(), b: c(0.0, 1.0) },
            f: Plate::Segment { a: c(1.0, 0.0), b: c(1.0, 1.0) },
            n,
        }
    }

    #[test]
    fn unit_square_has_modulus_one() {
        let r = condenser_capacity(&square(64), &SolveOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
        assert!(r.residual <= 1e-8);
    }

    #[test]
    fn annulus_modulus_and_symmetry() {
        let (e, f) = annulus_plates(o(), 1.0, E);
        let spec = CondenserSpec {
            domain: Domain::Annulus { center: o(), inner: 1.0, outer: E },
            e: e.clone(),
            f: f.clone(),
            n: 128,
        };
        let a = condenser_capacity(&spec, &SolveOptions::default()).unwrap();
        assert!((a.value / (2.0 * PI) - 1.0).abs() < 0.03, "{}", a.value);
        let swapped = CondenserSpec { e: f, f: e, ..spec };
        let b = condenser_capacity(&swapped, &SolveOptions::default()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn rejects_touching_plates() {
        let mut spec = square(32);
        spec.f = spec.e.clone();
        assert!(matches!(condenser_capacity(&spec, &SolveOptions::default()), Err(Error::Validation(_))));
    }

    #[test]
    fn capacity_is_monotone_in_plates() {
        let disk = Domain::unit_disk();
        let spec = |r: f64| CondenserSpec {
            domain: disk.clone(),
            e: Plate::Disk { center: o(), radius: r },
            f: Plate::Circle { center: o(), radius: 1.0 },
            n: 64,
        };
        let small = condenser_capacity(&spec(0.2), &SolveOptions::default()).unwrap().value;
        let big = condenser_capacity(&spec(0.3), &SolveOptions::default()).unwrap().value;
        assert!(small < big);
        let want = 2.0 * PI / (1.0f64 / 0.3).ln();
        assert!((big / want - 1.0).abs() < 0.03, "{big} vs {want}");
    }

    #[test]
    fn mobius_invariance() {
        let a = c(0.3, 0.2);
        let (cc, rr) = mobius_circle(a, o(), 0.3);
        let moved = CondenserSpec {
            domain: Domain::unit_disk(),
            e: Plate::Disk { center: cc, radius: rr },
            f: Plate::Circle { center: o(), radius: 1.0 },
            n: 128,
        };
        let v = condenser_capacity(&moved, &SolveOptions::default()).unwrap().value;
        let want = 2.0 * PI / (1.0f64 / 0.3).ln();
        assert!((v / want - 1.0).abs() < 0.03, "{v} vs {want}");
    }

    #[test]
    fn plane_minorant_examples() {
        let e = Plate::Segment { a: c(0.1, 0.0), b: c(1.0, 0.0) };
        let f = Plate::Segment { a: c(-1.0, 0.0), b: c(-0.1, 0.0) };
        let r = plane_minorant_check(&e, &f, o(), 0.1, 1.0, 256, &SolveOptions::default()).unwrap();
        assert!(r.holds && r.margin > 0.0, "{r:?}");
        // Concentric circles meet no intermediate circle, so the check refuses
        // them; the closed forms still compare: 2 pi >= (2/pi) log e.
        let (ci, co) = annulus_plates(o(), 1.0 / E, 1.0);
        assert!(matches!(
            plane_minorant_check(&ci, &co, o(), 1.0 / E, 1.0, 64, &SolveOptions::default()),
            Err(Error::Precondition(_))
        ));
        let spec = CondenserSpec { domain: Domain::Disk { center: o(), radius: 8.0 }, e: ci, f: co, n: 256 };
        let cap = condenser_capacity(&spec, &SolveOptions::default()).unwrap().value;
        assert!((cap / (2.0 * PI) - 1.0).abs() < 0.03 && cap >= 2.0 / PI, "{cap}");
        assert!(matches!(
            plane_minorant_check(&e, &f, o(), 0.5, 0.5, 64, &SolveOptions::default()),
            Err(Error::Argument(_))
        ));
        let short = Plate::Segment { a: c(0.5, 0.0), b: c(1.0, 0.0) };
        assert!(matches!(
            plane_minorant_check(&short, &f, o(), 0.1, 1.0, 64, &SolveOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn ring_inequality_cases() {
        let d = Domain::unit_disk();
        let quad = QuadratureOptions::default();
        let opts = RingOptions { n: 128, ..RingOptions::default() };
        let (r1, r2): (f64, f64) = (0.2, 0.6);
        let exact = 2.0 * PI / (r2 / r1 as f64).ln();

        let id = ring_inequality_check(&MapSpec::Identity, &d, o(), r1, r2, &ScalarFn::Constant(1.0), &quad, &opts).unwrap();
        assert!(id.holds && (id.lhs / exact - 1.0).abs() < 0.03 && (id.rhs / exact - 1.0).abs() < 1e-6, "{id:?}");

        let mob = MapSpec::Mobius { a: c(0.2, -0.1) };
        let m = ring_inequality_check(&mob, &d, o(), r1, r2, &ScalarFn::Constant(1.0), &quad, &opts).unwrap();
        assert!(m.holds && (m.lhs / exact - 1.0).abs() < 0.03, "{m:?}");

        // The tangent dilatation of c + (z-c)|z-c|^(K-1) about c is 1/K and
        // radial stretches are extremal: both sides agree.
        for k in [2.0, 0.5] {
            let stretch = MapSpec::RadialStretch { stretch: k, center: o() };
            let s = ring_inequality_check(&stretch, &d, o(), r1, r2, &ScalarFn::Constant(1.0 / k), &quad, &opts).unwrap();
            assert!(s.holds && s.slack.abs() < 0.03, "{s:?}");
        }
    }
}
