//! Field-theoretic view of the beam on the base `[0, L] × ℝ`.
//!
//! A trajectory is read as the algebra-valued one-form `ε ds + χ dt` (the
//! reduced section). Its curvature
//!
//! ```text
//! ∂ₛχ − ∂ₜε − ad_χ ε
//! ```
//!
//! vanishes exactly when the section comes from a pose field `H(s, t)`, and
//! the divergence form of the equation of motion
//!
//! ```text
//! ∂ₜ(Jχ) − ∂ₛ(C(ε − ε₀)) − ad*_χ Jχ + ad*_ε C(ε − ε₀)
//! ```
//!
//! is the material momentum balance. Both are evaluated with the same
//! stencils as [`crate::beam`]: the summation-by-parts operator in `s`,
//! centred differences in `t` (one-sided on the first and last slice).
//!
//! The sign convention is fixed so that zero curvature is precisely the
//! compatibility equation `∂ₛχ − ∂ₜε = ad_χ ε`.

use crate::beam::{ds_derivative, spatial_momenta, BeamParams, BeamState};
use crate::connection::Metric6;
use crate::error::{Error, Result};
use crate::liegroup::{ad, ad_star, log, CoTwist, Pose, Twist};

/// `ε ds + χ dt` sampled on a uniform grid at a sequence of times.
/// `eps[n][i]` is the strain at slice `n`, node `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSection {
    pub eps: Vec<Vec<Twist>>,
    pub chi: Vec<Vec<Twist>>,
    pub times: Vec<f64>,
    pub ds: f64,
}

impl ReducedSection {
    pub fn new(eps: Vec<Vec<Twist>>, chi: Vec<Vec<Twist>>, times: Vec<f64>, ds: f64) -> Result<Self> {
        if !(ds > 0.0 && ds.is_finite()) {
            return Err(Error::InvalidParameter(format!("ds must be positive, got {ds}")));
        }
        if eps.len() != chi.len() || eps.len() != times.len() {
            return Err(Error::InvalidParameter(format!(
                "{} strain slices, {} velocity slices, {} times",
                eps.len(),
                chi.len(),
                times.len()
            )));
        }
        let n_s = eps.first().map_or(0, Vec::len);
        if eps.iter().chain(&chi).any(|row| row.len() != n_s) {
            return Err(Error::InvalidParameter("slices have differing lengths".into()));
        }
        if n_s < 2 {
            return Err(Error::GridTooCoarse { n: n_s, min: 2 });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        Ok(Self { eps, chi, times, ds })
    }

    /// The fields `(ε, χ)` of a stored beam trajectory.
    pub fn from_trajectory(trajectory: &[BeamState], p: &BeamParams) -> Result<Self> {
        for s in trajectory {
            s.validate(p)?;
        }
        Self::new(
            trajectory.iter().map(|s| s.eps.clone()).collect(),
            trajectory.iter().map(|s| s.chi.clone()).collect(),
            trajectory.iter().map(|s| s.t).collect(),
            p.ds(),
        )
    }

    /// Section of a sampled pose field `poses[n][i] = H(sᵢ, tₙ)` (uniform in
    /// time). Both components are left-trivialized logarithmic differences,
    /// centred inside and second-order one-sided at the edges, so the result
    /// is `O(ds² + dt²)` accurate.
    pub fn from_poses(poses: &[Vec<Pose>], times: &[f64], ds: f64) -> Result<Self> {
        if poses.len() < 3 {
            return Err(Error::InsufficientHistory { have: poses.len(), need: 3 });
        }
        if times.len() != poses.len() {
            return Err(Error::InvalidParameter("one time per slice required".into()));
        }
        let eps = poses
            .iter()
            .map(|row| crate::beam::strain_from_poses_centered(row, ds))
            .collect::<Result<Vec<_>>>()?;
        let n_t = poses.len();
        let n_s = poses[0].len();
        let dt = times[1] - times[0];
        let rel = |i: usize, a: usize, b: usize| log(&poses[a][i].inverse().compose(&poses[b][i]));
        let mut chi = vec![vec![Twist::zero(); n_s]; n_t];
        for i in 0..n_s {
            chi[0][i] = (rel(i, 0, 1)? * 4.0 - rel(i, 0, 2)?) * (0.5 / dt);
            for n in 1..n_t - 1 {
                chi[n][i] = rel(i, n - 1, n + 1)? * (0.5 / dt);
            }
            let l = n_t - 1;
            chi[l][i] = (rel(i, l, l - 1)? * 4.0 - rel(i, l, l - 2)?) * (-0.5 / dt);
        }
        Self::new(eps, chi, times.to_vec(), ds)
    }

    pub fn n_slices(&self) -> usize {
        self.times.len()
    }

    pub fn n_s(&self) -> usize {
        self.eps[0].len()
    }

    fn check_history(&self) -> Result<()> {
        if self.n_slices() < 2 {
            return Err(Error::InsufficientHistory { have: self.n_slices(), need: 2 });
        }
        Ok(())
    }

    /// Centred time difference of `f` at slice `n`, one-sided at the ends.
    fn time_derivative<T, F>(&self, n: usize, i: usize, f: F) -> T
    where
        T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
        F: Fn(usize, usize) -> T,
    {
        let last = self.n_slices() - 1;
        let (a, b) = (n.saturating_sub(1), (n + 1).min(last));
        (f(b, i) - f(a, i)) * (1.0 / (self.times[b] - self.times[a]))
    }
}

/// `Dₛχ − Dₜε − ad_χ ε` at every slice and node.
pub fn curvature(section: &ReducedSection) -> Result<Vec<Vec<Twist>>> {
    section.check_history()?;
    Ok((0..section.n_slices())
        .map(|n| {
            let dchi = ds_derivative(&section.chi[n], section.ds);
            (0..section.n_s())
                .map(|i| {
                    let deps = section.time_derivative(n, i, |m, j| section.eps[m][j]);
                    dchi[i] - deps - ad(&section.chi[n][i], &section.eps[n][i])
                })
                .collect()
        })
        .collect())
}

/// `Dₜ(Jχ) − Dₛσ − ad*_χ Jχ + ad*_ε σ` with `σ = C(ε − ε₀)`, at every slice
/// and node. `ε₀` is taken constant along the beam.
pub fn covariant_motion_residual(
    section: &ReducedSection,
    inertia: &Metric6,
    stiffness: &Metric6,
    eps0: &Twist,
) -> Result<Vec<Vec<CoTwist>>> {
    section.check_history()?;
    let momentum = |m: usize, j: usize| inertia.apply(&section.chi[m][j]);
    Ok((0..section.n_slices())
        .map(|n| {
            let sigma: Vec<CoTwist> = section.eps[n].iter().map(|e| stiffness.apply(&(*e - *eps0))).collect();
            let dsigma = ds_derivative(&sigma, section.ds);
            (0..section.n_s())
                .map(|i| {
                    let chi = &section.chi[n][i];
                    section.time_derivative(n, i, momentum) - dsigma[i] - ad_star(chi, &inertia.apply(chi))
                        + ad_star(&section.eps[n][i], &sigma[i])
                })
                .collect()
        })
        .collect())
}

/// Per-slice balance `d/dt ∫π_s ds − [σ_s]₀ᴸ` of total spatial momentum,
/// for the interior slices of a trajectory. The integral is the
/// trapezoidal rule and `d/dt` a centred difference.
pub fn noether_flux_defects(trajectory: &[BeamState], p: &BeamParams) -> Result<Vec<CoTwist>> {
    Ok(flux_terms(trajectory, p)?.into_iter().map(|(rate, flux, _)| rate - flux).collect())
}

/// Largest component of the spatial-momentum balance defect over the
/// trajectory.
pub fn noether_flux_balance(trajectory: &[BeamState], p: &BeamParams) -> Result<f64> {
    Ok(noether_flux_defects(trajectory, p)?.iter().map(CoTwist::amax).fold(0.0, f64::max))
}

/// [`noether_flux_balance`] divided by the size of the terms being balanced,
/// `max ∫|Dₜπ_s| ds + |σ_s(0)| + |σ_s(L)|` (component-wise maxima). Zero for
/// a trajectory at rest.
pub fn noether_relative_defect(trajectory: &[BeamState], p: &BeamParams) -> Result<f64> {
    let terms = flux_terms(trajectory, p)?;
    let defect = terms.iter().map(|(r, f, _)| (*r - *f).amax()).fold(0.0, f64::max);
    let scale = terms.iter().map(|(_, _, s)| *s).fold(0.0, f64::max);
    Ok(if scale > 0.0 { defect / scale } else { defect })
}

/// `(d/dt ∫π_s, [σ_s]₀ᴸ, scale)` at each interior slice.
fn flux_terms(trajectory: &[BeamState], p: &BeamParams) -> Result<Vec<(CoTwist, CoTwist, f64)>> {
    if trajectory.len() < 3 {
        return Err(Error::InsufficientHistory { have: trajectory.len(), need: 3 });
    }
    for s in trajectory {
        s.validate(p)?;
    }
    if trajectory.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::InvalidParameter("slice times must be strictly increasing".into()));
    }
    let w = p.weights();
    let last = p.n_s - 1;
    let spatial: Vec<_> = trajectory.iter().map(|s| spatial_momenta(s, p)).collect();
    Ok((1..trajectory.len() - 1)
        .map(|n| {
            let h = trajectory[n + 1].t - trajectory[n - 1].t;
            let mut rate = CoTwist::zero();
            let mut size = 0.0;
            for i in 0..p.n_s {
                let d = (spatial[n + 1].0[i] - spatial[n - 1].0[i]) * (1.0 / h);
                rate += d * w[i];
                size += w[i] * d.amax();
            }
            let sigma = &spatial[n].1;
            let flux = sigma[last] - sigma[0];
            (rate, flux, size + sigma[last].amax() + sigma[0].amax())
        })
        .collect())
}
