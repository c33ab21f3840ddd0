//! Explicit time stepping shared by the rigid-body and beam drivers.
//!
//! Algebra-valued fields are advanced with classical RK4 on a flat vector.
//! Poses are advanced on the group with `H ← H·exp(χ̄ dt)`, where the averaged
//! velocity `χ̄` is assembled from the RK4 stage velocities with the
//! Munthe-Kaas correction so the reconstructed pose is fourth-order accurate.

use crate::error::{Error, Result};
use crate::liegroup::{ad, exp, Pose, Twist};

/// Step-size settings for a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    pub dt: f64,
    pub cfl_safety: f64,
    pub max_steps: usize,
}

impl StepControl {
    pub fn new(dt: f64, cfl_safety: f64, max_steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if !(cfl_safety > 0.0 && cfl_safety <= 1.0) {
            return Err(Error::InvalidParameter(format!("cfl_safety must lie in (0, 1], got {cfl_safety}")));
        }
        Ok(Self { dt, cfl_safety, max_steps })
    }

    /// Rejects `dt` above `cfl_safety · bound`.
    pub fn check_cfl(&self, bound: f64) -> Result<()> {
        let limit = self.cfl_safety * bound;
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolated { dt: self.dt, bound: limit });
        }
        Ok(())
    }
}

/// Stage values `Y₁..Y₄` of one RK4 step, in evaluation order.
pub type Rk4Stages = [Vec<f64>; 4];

fn check_finite(y: &[f64]) -> Result<()> {
    match y.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFiniteState { index }),
        None => Ok(()),
    }
}

/// One classical RK4 step for `y' = f(y)`; `f` writes the derivative into its
/// second argument.
pub fn rk4_step<F>(y: &[f64], f: F, dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], &mut [f64]),
{
    rk4_step_with_stages(y, f, dt).map(|(y, _)| y)
}

/// Like [`rk4_step`], also returning the stage values so that a group
/// component driven by the state can be advanced consistently.
pub fn rk4_step_with_stages<F>(y: &[f64], mut f: F, dt: f64) -> Result<(Vec<f64>, Rk4Stages)>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let n = y.len();
    let stage = |base: &[f64], k: &[f64], h: f64| -> Vec<f64> {
        base.iter().zip(k).map(|(b, k)| b + h * k).collect()
    };

    let y1 = y.to_vec();
    let mut k1 = vec![0.0; n];
    f(&y1, &mut k1);
    let y2 = stage(y, &k1, 0.5 * dt);
    let mut k2 = vec![0.0; n];
    f(&y2, &mut k2);
    let y3 = stage(y, &k2, 0.5 * dt);
    let mut k3 = vec![0.0; n];
    f(&y3, &mut k3);
    let y4 = stage(y, &k3, dt);
    let mut k4 = vec![0.0; n];
    f(&y4, &mut k4);

    let out: Vec<f64> = (0..n)
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    check_finite(&out)?;
    Ok((out, [y1, y2, y3, y4]))
}

/// Truncated inverse of the right-trivialized differential of the exponential,
/// `u + ½[θ, u] + (1/12)[θ, [θ, u]]`, for the body-frame update `H exp(θ)`.
fn dexp_inv(theta: &Twist, u: &Twist) -> Twist {
    let b1 = ad(theta, u);
    let b2 = ad(theta, &b1);
    *u + b1 * 0.5 + b2 * (1.0 / 12.0)
}

/// Averaged body velocity over one RK4 step from the four stage velocities,
/// such that `H·exp(χ̄ dt)` is the fourth-order Munthe-Kaas update.
pub fn munthe_kaas_velocity(stage_velocities: &[Twist; 4], dt: f64) -> Twist {
    let [u1, u2, u3, u4] = stage_velocities;
    let k1 = *u1 * dt;
    let k2 = dexp_inv(&(k1 * 0.5), u2) * dt;
    let k3 = dexp_inv(&(k2 * 0.5), u3) * dt;
    let k4 = dexp_inv(&k3, u4) * dt;
    (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (1.0 / (6.0 * dt))
}

/// `H·exp(χ̄, dt)`: left-invariant (material) group update.
pub fn reconstruct(h: &Pose, chi_avg: &Twist, dt: f64) -> Pose {
    h.compose(&exp(chi_avg, dt))
}
