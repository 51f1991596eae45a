use approx::assert_relative_eq;
use proptest::prelude::*;

use dualpath_core::kernel::RotationWeight;
use dualpath_core::paths::reflect;
use dualpath_core::solver::{evolve, time_reverse};
use dualpath_core::stats::BinSpec;
use dualpath_core::{Grid1D, PhysicalConstants, PotentialSpec, SchroedingerVectorField};

fn field(values: &[(f64, f64)]) -> SchroedingerVectorField {
    let g = Grid1D::new(-1.0, 1.0, values.len()).unwrap();
    let (r, c) = values.iter().copied().unzip();
    SchroedingerVectorField::new(g, r, c, 0.0).unwrap()
}

fn nodes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 8..40)
}

proptest! {
    #[test]
    fn j_squared_is_minus_identity(v in nodes()) {
        let f = field(&v);
        let jj = f.apply_j().apply_j();
        for i in 0..v.len() {
            prop_assert_eq!(jj.phi_r()[i], -f.phi_r()[i]);
            prop_assert_eq!(jj.phi_c()[i], -f.phi_c()[i]);
        }
    }

    #[test]
    fn j_preserves_density(v in nodes()) {
        let f = field(&v);
        prop_assert_eq!(f.apply_j().density(), f.density());
        prop_assert!(f.density().iter().all(|&r| r >= 0.0));
    }

    #[test]
    fn normalize_is_idempotent(v in nodes()) {
        let f = field(&v);
        prop_assume!(f.norm() > 1e-6);
        let once = f.normalize().unwrap();
        assert_relative_eq!(once.norm(), 1.0, epsilon = 1e-12);
        prop_assert!(once.normalize().unwrap().l2_distance(&once) < 1e-12);
    }

    #[test]
    fn rotation_is_orthogonal_with_unit_determinant(a in -20.0..20.0f64) {
        let m = RotationWeight { angle: a }.matrix();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert_relative_eq!(det, 1.0, epsilon = 1e-12);
        for i in 0..2 {
            for j in 0..2 {
                let dot = m[0][i] * m[0][j] + m[1][i] * m[1][j];
                assert_relative_eq!(dot, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rotations_compose_by_adding_angles(a in -10.0..10.0f64, b in -10.0..10.0f64, x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let (ra, rb) = (RotationWeight { angle: a }, RotationWeight { angle: b });
        let two = ra.apply(rb.apply([x, y]));
        let one = ra.compose(&rb).apply([x, y]);
        assert_relative_eq!(two[0], one[0], epsilon = 1e-12);
        assert_relative_eq!(two[1], one[1], epsilon = 1e-12);
    }

    #[test]
    fn field_rotation_matches_weight(v in nodes(), a in -10.0..10.0f64) {
        let f = field(&v);
        let turned = f.rotated(a);
        let w = RotationWeight { angle: a };
        for i in 0..v.len() {
            let want = w.apply([f.phi_r()[i], f.phi_c()[i]]);
            assert_relative_eq!(turned.phi_r()[i], want[0], epsilon = 1e-12);
            assert_relative_eq!(turned.phi_c()[i], want[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn reflection_lands_inside(x in -100.0..100.0f64) {
        let (y, bounces) = reflect(x, -3.0, 5.0);
        prop_assert!((-3.0..=5.0).contains(&y));
        prop_assert_eq!(bounces == 0, (-3.0..=5.0).contains(&x));
    }

    #[test]
    fn bins_cover_their_range(x in -4.0..4.0f64) {
        let b = BinSpec::new(-4.0, 4.0, 16).unwrap();
        let i = b.index(x).unwrap();
        prop_assert!((x - b.center(i)).abs() <= 0.5 * b.width() + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn solver_conserves_norm_and_reverses(center in -2.0..2.0f64, width in 0.5..1.5f64, k in -2.0..2.0f64) {
        let c = PhysicalConstants::new(1.0, 1.0).unwrap();
        let g = Grid1D::new(-15.0, 15.0, 512).unwrap();
        let f0 = dualpath_core::gaussian_packet(&g, center, width, k, &c).unwrap();
        let v = PotentialSpec::harmonic(0.3, 1.0, 0.0);
        let f1 = evolve(&f0, &v, 1e-2, 100, &c).unwrap();
        assert_relative_eq!(f1.norm(), f0.norm(), epsilon = 1e-11);
        let back = time_reverse(&evolve(&time_reverse(&f1), &v, 1e-2, 100, &c).unwrap());
        prop_assert!(back.l2_distance(&f0) < 1e-9);
    }
}
