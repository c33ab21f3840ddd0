//! Free rigid body on SE(3) (the beam with no spatial dependence): a body in
//! an ideal fluid with coincident centres of buoyancy and gravity.
//!
//! With body momentum `π = (m, n) = Jχ` the motion obeys
//! `ṁ = m×ω + n×v`, `ṅ = n×ω`.

use crate::connection::Metric6;
use crate::error::Result;
use crate::integrators::{munthe_kaas_velocity, reconstruct, rk4_step_with_stages};
use crate::liegroup::{ad_star, coadjoint_transport, CoTwist, Pose, Twist};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidState {
    pub pose: Pose,
    /// Body-frame velocity.
    pub chi: Twist,
}

impl RigidState {
    pub fn new(pose: Pose, chi: Twist) -> Self {
        Self { pose, chi }
    }

    pub fn energy(&self, inertia: &Metric6) -> f64 {
        inertia.quadratic(&self.chi)
    }
}

/// `χ̇ = J⁻¹ ad*_χ (Jχ)`.
pub fn euler_poincare_rhs(chi: &Twist, inertia: &Metric6) -> Twist {
    inertia.solve(&ad_star(chi, &inertia.apply(chi)))
}

/// One RK4 step of the velocity with a fourth-order group update of the pose.
pub fn step_rk4(state: &RigidState, inertia: &Metric6, dt: f64) -> Result<RigidState> {
    let y = state.chi.to_array();
    let (next, stages) = rk4_step_with_stages(
        &y,
        |y, dy| {
            let chi = Twist::from_array([y[0], y[1], y[2], y[3], y[4], y[5]]);
            dy.copy_from_slice(&euler_poincare_rhs(&chi, inertia).to_array());
        },
        dt,
    )?;
    let to_twist = |v: &[f64]| Twist::from_array([v[0], v[1], v[2], v[3], v[4], v[5]]);
    let velocities = [to_twist(&stages[0]), to_twist(&stages[1]), to_twist(&stages[2]), to_twist(&stages[3])];
    let pose = reconstruct(&state.pose, &munthe_kaas_velocity(&velocities, dt), dt);
    Ok(RigidState { pose, chi: to_twist(&next) })
}

/// The two se(3)* Casimirs `(n·n, m·n)`.
pub fn casimirs(pi: &CoTwist) -> (f64, f64) {
    (pi.lin.dot(&pi.lin), pi.ang.dot(&pi.lin))
}

/// Spatial momentum `Ad*_{H⁻¹}(Jχ)`, a constant of the free motion.
pub fn spatial_momentum(state: &RigidState, inertia: &Metric6) -> CoTwist {
    coadjoint_transport(&state.pose, &inertia.apply(&state.chi))
}

/// Runs `steps` steps and returns every state including the initial one.
pub fn simulate(initial: RigidState, inertia: &Metric6, dt: f64, steps: usize) -> Result<Vec<RigidState>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(initial);
    let mut s = initial;
    for _ in 0..steps {
        s = step_rk4(&s, inertia, dt)?;
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::geodesic_residual;
    use crate::liegroup::{exp, log, Vec3};
    use crate::testing::{random_metric, random_pose, random_twist, rng};

    #[test]
    fn rhs_examples() {
        let spin = Twist::new(Vec3::new(0., 0., 1.), Vec3::zeros());
        assert_eq!(euler_poincare_rhs(&spin, &Metric6::identity()), Twist::zero());
        let j = Metric6::diagonal([1., 2., 3., 1., 1., 1.]).unwrap();
        let out = euler_poincare_rhs(&Twist::new(Vec3::new(1., 1., 0.), Vec3::zeros()), &j);
        let expected = Twist::new(Vec3::new(0., 0., -1.0 / 3.0), Vec3::zeros());
        assert!((out - expected).amax() < 1e-15);
        let mut rng = rng(30);
        assert_eq!(euler_poincare_rhs(&Twist::zero(), &random_metric(&mut rng)), Twist::zero());
    }

    #[test]
    fn rhs_matches_component_form() {
        let mut rng = rng(31);
        for _ in 0..200 {
            let j = random_metric(&mut rng);
            let chi = random_twist(&mut rng, 1.0);
            let pi = j.apply(&chi);
            let (m, n, w, v) = (pi.ang, pi.lin, chi.ang, chi.lin);
            let pi_dot = CoTwist::new(m.cross(&w) + n.cross(&v), n.cross(&w));
            let diff = j.apply(&euler_poincare_rhs(&chi, &j)) - pi_dot;
            assert!(diff.amax() < 1e-12);
        }
    }

    #[test]
    fn energy_is_an_algebraic_invariant() {
        let mut rng = rng(32);
        for _ in 0..1000 {
            let j = random_metric(&mut rng);
            let chi = random_twist(&mut rng, 1.0);
            assert!(ad_star(&chi, &j.apply(&chi)).pair(&chi).abs() < 1e-13);
        }
    }

    #[test]
    fn geodesic_correspondence() {
        let mut rng = rng(33);
        for _ in 0..1000 {
            let j = random_metric(&mut rng);
            let chi = random_twist(&mut rng, 1.0);
            let r = geodesic_residual(&chi, &euler_poincare_rhs(&chi, &j), &j);
            assert!(r.amax() < 1e-12);
        }
    }

    #[test]
    fn equilibrium_spin_is_a_fixed_point() {
        let j = Metric6::diagonal([1., 2., 3., 5., 5., 5.]).unwrap();
        let chi = Twist::new(Vec3::new(0., 0.7, 0.), Vec3::new(0., 0.3, 0.));
        let s = step_rk4(&RigidState::new(Pose::identity(), chi), &j, 1e-2).unwrap();
        assert!((s.chi - chi).amax() < 1e-14);
        let expected = exp(&chi, 1e-2);
        assert!((s.pose.to_matrix() - expected.to_matrix()).amax() < 1e-14);
    }

    #[test]
    fn casimir_examples() {
        assert_eq!(casimirs(&CoTwist::zero()), (0.0, 0.0));
        assert_eq!(casimirs(&CoTwist::new(Vec3::new(1., 0., 0.), Vec3::new(0., 2., 0.))), (4.0, 0.0));
    }

    #[test]
    fn spatial_momentum_examples() {
        let mut rng = rng(34);
        let j = random_metric(&mut rng);
        let chi = random_twist(&mut rng, 1.0);
        assert_eq!(spatial_momentum(&RigidState::new(Pose::identity(), chi), &j), j.apply(&chi));
        let rest = RigidState::new(random_pose(&mut rng), Twist::zero());
        assert_eq!(spatial_momentum(&rest, &j), CoTwist::zero());
    }

    #[test]
    fn one_step_error_drops_sixteenfold() {
        let mut rng = rng(35);
        let j = random_metric(&mut rng);
        let start = RigidState::new(Pose::identity(), random_twist(&mut rng, 1.0));
        let t = 0.2;
        let reference = *simulate(start, &j, t / 100.0, 100).unwrap().last().unwrap();
        let err = |dt: f64| {
            let s = *simulate(start, &j, dt, (t / dt).round() as usize).unwrap().last().unwrap();
            (s.chi - reference.chi).amax().max(log(&reference.pose.inverse().compose(&s.pose)).unwrap().amax())
        };
        let ratio = err(t / 4.0) / err(t / 8.0);
        assert!(ratio > 13.0 && ratio < 19.0, "ratio {ratio}");
    }
}
