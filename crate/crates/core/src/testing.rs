//! Seeded random samples shared by the unit tests.

use nalgebra::Matrix6;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connection::Metric6;
use crate::liegroup::{exp, Pose, Twist, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec3(rng: &mut impl Rng, scale: f64) -> Vec3 {
    Vec3::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_twist(rng: &mut impl Rng, scale: f64) -> Twist {
    Twist::new(random_vec3(rng, scale), random_vec3(rng, scale))
}

pub fn random_pose(rng: &mut impl Rng) -> Pose {
    let mut xi = random_twist(rng, 2.0);
    if xi.ang.norm() > 3.0 {
        xi.ang *= 3.0 / xi.ang.norm();
    }
    exp(&xi, 1.0)
}

/// Random SPD matrix `A Aᵀ + δI` with a moderate condition number.
pub fn random_metric(rng: &mut impl Rng) -> Metric6 {
    let a = Matrix6::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let m = a * a.transpose() + Matrix6::identity() * 0.5;
    Metric6::new(m).expect("SPD by construction")
}
