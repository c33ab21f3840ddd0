use geobeam::beam::{beam_rhs, energies, BeamParams, BeamState, BoundaryCondition};
use geobeam::connection::{geodesic_residual, koszul};
use geobeam::liegroup::{ad, ad_star, adjoint, coadjoint_transport, exp, hat, log, vee};
use geobeam::rigidbody::{casimirs, euler_poincare_rhs};
use geobeam::{CoTwist, Metric6, Pose, Twist, Vec3};
use nalgebra::Matrix6;
use proptest::prelude::*;

fn twist(scale: f64) -> impl Strategy<Value = Twist> {
    prop::array::uniform6(-scale..scale).prop_map(Twist::from_array)
}

fn cotwist(scale: f64) -> impl Strategy<Value = CoTwist> {
    prop::array::uniform6(-scale..scale).prop_map(CoTwist::from_array)
}

fn pose() -> impl Strategy<Value = Pose> {
    twist(1.5).prop_map(|xi| exp(&xi, 1.0))
}

fn metric() -> impl Strategy<Value = Metric6> {
    prop::collection::vec(-1.0..1.0f64, 36).prop_map(|v| {
        let a = Matrix6::from_column_slice(&v);
        Metric6::new(a * a.transpose() + Matrix6::identity() * 0.5).unwrap()
    })
}

proptest! {
    #[test]
    fn hat_vee_round_trip(xi in twist(10.0)) {
        prop_assert_eq!(vee(&hat(&xi)).unwrap(), xi);
    }

    #[test]
    fn log_inverts_exp(xi in twist(1.0)) {
        let back = log(&exp(&xi, 1.0)).unwrap();
        prop_assert!((back - xi).amax() < 1e-12);
    }

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(a in twist(2.0), b in twist(2.0), c in twist(2.0)) {
        prop_assert!((ad(&a, &b) + ad(&b, &a)).amax() < 1e-12);
        let jacobi = ad(&a, &ad(&b, &c)) + ad(&b, &ad(&c, &a)) + ad(&c, &ad(&a, &b));
        prop_assert!(jacobi.amax() < 1e-12);
    }

    #[test]
    fn coadjoint_is_dual_to_adjoint(a in twist(2.0), b in twist(2.0), mu in cotwist(2.0), h in pose()) {
        prop_assert!((ad_star(&a, &mu).pair(&b) - mu.pair(&ad(&a, &b))).abs() < 1e-12);
        // ⟨Ad*_{H⁻¹} μ, Ad_H ξ⟩ = ⟨μ, ξ⟩
        let lhs = coadjoint_transport(&h, &mu).pair(&adjoint(&h, &a));
        prop_assert!((lhs - mu.pair(&a)).abs() < 1e-11);
    }

    #[test]
    fn adjoint_is_a_homomorphism(g in pose(), h in pose(), xi in twist(1.0)) {
        let lhs = adjoint(&g.compose(&h), &xi);
        let rhs = adjoint(&g, &adjoint(&h, &xi));
        prop_assert!((lhs - rhs).amax() < 1e-11);
    }

    #[test]
    fn free_motion_is_geodesic(j in metric(), chi in twist(1.0)) {
        let r = geodesic_residual(&chi, &euler_poincare_rhs(&chi, &j), &j);
        prop_assert!(r.amax() < 1e-12);
    }

    #[test]
    fn connection_is_torsion_free(j in metric(), a in twist(1.0), b in twist(1.0)) {
        let t = koszul(&a, &b, &j) - koszul(&b, &a, &j) - ad(&a, &b);
        prop_assert!(t.amax() < 1e-12);
    }

    #[test]
    fn casimirs_are_invariant_under_coadjoint_flow(pi in cotwist(2.0), xi in twist(1.0)) {
        // d/dt of (n·n, m·n) along π̇ = ad*_ξ π vanishes
        let rate = ad_star(&xi, &pi);
        let d_nn = 2.0 * pi.lin.dot(&rate.lin);
        let d_mn = rate.ang.dot(&pi.lin) + pi.ang.dot(&rate.lin);
        prop_assert!(d_nn.abs() < 1e-12 && d_mn.abs() < 1e-12);
        let (a, b) = casimirs(&pi);
        prop_assert!((a - pi.lin.norm_squared()).abs() < 1e-12 && (b - pi.ang.dot(&pi.lin)).abs() < 1e-12);
    }

    #[test]
    fn beam_energies_are_nonnegative_and_rhs_ignores_poses(
        eps in prop::collection::vec(twist(0.3), 9),
        chi in prop::collection::vec(twist(1.0), 9),
        g in pose(),
    ) {
        let j = Metric6::diagonal([0.02, 0.01, 0.01, 1.0, 1.0, 1.0]).unwrap();
        let c = Metric6::diagonal([0.015, 0.02, 0.02, 2.0, 0.8, 0.8]).unwrap();
        let p = BeamParams::new(1.0, 9, j, c, BoundaryCondition::FreeFree).unwrap();
        let eps: Vec<Twist> = eps.iter().zip(&p.eps0).map(|(e, e0)| *e + *e0).collect();
        let s = BeamState::from_fields(&p, eps.clone(), chi.clone(), Pose::identity()).unwrap();
        let moved = BeamState::from_fields(&p, eps, chi, g).unwrap();
        let (k, u) = energies(&s, &p);
        prop_assert!(k >= 0.0 && u >= 0.0);
        prop_assert_eq!(beam_rhs(&s, &p).unwrap(), beam_rhs(&moved, &p).unwrap());
        prop_assert_eq!(energies(&moved, &p), (k, u));
    }
}

#[test]
fn pure_translations_commute() {
    let a = Twist::new(Vec3::zeros(), Vec3::new(1.0, 2.0, 3.0));
    let b = Twist::new(Vec3::zeros(), Vec3::new(-4.0, 0.5, 1.0));
    assert_eq!(ad(&a, &b), Twist::zero());
}
