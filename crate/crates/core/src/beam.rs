//! Geometrically exact Reissner beam in reduced (material) form.
//!
//! The state is the pair of se(3)-valued fields `ε(s)` (strain) and `χ(s)`
//! (velocity) on a uniform grid, evolved by
//!
//! ```text
//! J ∂ₜχ = ad*_χ Jχ + ∂ₛσ − ad*_ε σ,     σ = C(ε − ε₀)
//!   ∂ₜε = ∂ₛχ − ad_χ ε
//! ```
//!
//! while the pose field `H(s)` is carried along on the group for output and
//! diagnostics. The spatial difference operator is centred in the interior
//! and one-sided at the two ends with trapezoidal weights, so that the
//! discrete energy `E_c + E_p` is exactly conserved by the semi-discrete
//! system (the nonlinear terms cancel pointwise, the linear ones telescope to
//! boundary terms that the boundary conditions annihilate).

use crate::connection::Metric6;
use crate::error::{Error, Result};
use crate::integrators::{munthe_kaas_velocity, reconstruct};
use crate::liegroup::{ad, ad_star, adjoint, coadjoint_transport, exp, log, CoTwist, Pose, Twist, Vec3};

/// Minimum number of grid points.
pub const MIN_GRID: usize = 3;
/// Default Courant number: `dt ≤ CFL · ds / c_max`.
pub const CFL: f64 = 0.5;

/// Conditions at the two ends `s = 0` and `s = L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoundaryCondition {
    #[default]
    ClampedFree,
    FreeFree,
    ClampedClamped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndCondition {
    /// `χ = 0`, pose held fixed.
    Clamped,
    /// Stress free: `ε = ε₀`.
    Free,
}

impl BoundaryCondition {
    pub fn ends(self) -> (EndCondition, EndCondition) {
        match self {
            Self::ClampedFree => (EndCondition::Clamped, EndCondition::Free),
            Self::FreeFree => (EndCondition::Free, EndCondition::Free),
            Self::ClampedClamped => (EndCondition::Clamped, EndCondition::Clamped),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::ClampedFree => "clamped-free",
            Self::FreeFree => "free-free",
            Self::ClampedClamped => "clamped-clamped",
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clamped-free" => Ok(Self::ClampedFree),
            "free-free" => Ok(Self::FreeFree),
            "clamped-clamped" => Ok(Self::ClampedClamped),
            other => Err(Error::InvalidParameter(format!(
                "unknown boundary condition `{other}` (expected clamped-free, free-free or clamped-clamped)"
            ))),
        }
    }
}

/// Isotropic linear elastic material.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    pub young: f64,
    pub poisson: f64,
    pub density: f64,
}

impl Material {
    pub fn shear_modulus(&self) -> f64 {
        self.young / (2.0 * (1.0 + self.poisson))
    }
}

/// Cross-section constants. Axis 1 is the beam axis, 2 and 3 the section axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Section {
    pub area: f64,
    pub i2: f64,
    pub i3: f64,
    /// Torsion constant.
    pub torsion: f64,
    /// Timoshenko shear correction factor.
    pub shear_factor: f64,
}

impl Section {
    /// Solid circular section; shear factor `6(1+ν)/(7+6ν)`.
    pub fn circular(radius: f64, poisson: f64) -> Self {
        let area = std::f64::consts::PI * radius * radius;
        let i = area * radius * radius / 4.0;
        Self { area, i2: i, i3: i, torsion: 2.0 * i, shear_factor: 6.0 * (1.0 + poisson) / (7.0 + 6.0 * poisson) }
    }

    /// Inertia density `ρ·diag(I₂+I₃, I₂, I₃, A, A, A)`.
    pub fn inertia(&self, m: &Material) -> Result<Metric6> {
        let rho = m.density;
        let a = rho * self.area;
        Metric6::diagonal([rho * (self.i2 + self.i3), rho * self.i2, rho * self.i3, a, a, a])
    }

    /// Hooke operator `diag(G·J_t, E·I₂, E·I₃, E·A, κ·G·A, κ·G·A)`: torsion and
    /// bending in the angular block, axial stiffness paired with the axial
    /// strain component and shear with the two transverse ones.
    pub fn stiffness(&self, m: &Material) -> Result<Metric6> {
        let (e, g) = (m.young, m.shear_modulus());
        let shear = self.shear_factor * g * self.area;
        Metric6::diagonal([g * self.torsion, e * self.i2, e * self.i3, e * self.area, shear, shear])
    }
}

/// Straight reference strain: unit axial stretch along `E₁`, no curvature.
pub fn straight_reference_strain() -> Twist {
    Twist::new(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeamParams {
    pub length: f64,
    pub n_s: usize,
    /// Inertia per unit length.
    pub inertia: Metric6,
    /// Hooke operator.
    pub stiffness: Metric6,
    /// Reference strain at each grid point.
    pub eps0: Vec<Twist>,
    pub bc: BoundaryCondition,
}

impl BeamParams {
    /// Straight beam (`ε₀ = (0, E₁)` everywhere).
    pub fn new(length: f64, n_s: usize, inertia: Metric6, stiffness: Metric6, bc: BoundaryCondition) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter(format!("length must be positive, got {length}")));
        }
        if n_s < MIN_GRID {
            return Err(Error::GridTooCoarse { n: n_s, min: MIN_GRID });
        }
        Ok(Self { length, n_s, inertia, stiffness, eps0: vec![straight_reference_strain(); n_s], bc })
    }

    pub fn from_section(
        length: f64,
        n_s: usize,
        material: &Material,
        section: &Section,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        Self::new(length, n_s, section.inertia(material)?, section.stiffness(material)?, bc)
    }

    /// Replaces the reference strain, e.g. for a pre-curved beam. With an
    /// `s`-dependent `ε₀` the stress `C(ε − ε₀)` enters both the derivative
    /// and the `ad*` term exactly as written above.
    pub fn with_reference_strain(mut self, eps0: Vec<Twist>) -> Result<Self> {
        if eps0.len() != self.n_s {
            return Err(Error::InvalidParameter(format!(
                "reference strain has {} entries, grid has {}",
                eps0.len(),
                self.n_s
            )));
        }
        self.eps0 = eps0;
        Ok(self)
    }

    pub fn ds(&self) -> f64 {
        self.length / (self.n_s - 1) as f64
    }

    /// Fastest linear wave speed `sqrt(λ_max(J⁻¹C))`.
    pub fn wave_speed(&self) -> f64 {
        self.inertia.max_generalized_eigenvalue(&self.stiffness).sqrt()
    }

    /// Largest admissible step `CFL · ds / c_max`.
    pub fn max_dt(&self) -> f64 {
        CFL * self.ds() / self.wave_speed()
    }

    /// Grid coordinate of node `i`.
    pub fn s(&self, i: usize) -> f64 {
        i as f64 * self.ds()
    }

    /// Trapezoidal quadrature weights.
    pub fn weights(&self) -> Vec<f64> {
        let ds = self.ds();
        let mut w = vec![ds; self.n_s];
        w[0] = 0.5 * ds;
        w[self.n_s - 1] = 0.5 * ds;
        w
    }
}

/// Fields at one time instant.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamState {
    pub eps: Vec<Twist>,
    pub chi: Vec<Twist>,
    pub poses: Vec<Pose>,
    pub t: f64,
}

impl BeamState {
    /// Reference configuration at rest, `H(0) = I`.
    pub fn at_rest(p: &BeamParams) -> Self {
        let poses = integrate_strain(&p.eps0, p.ds(), Pose::identity());
        Self { eps: p.eps0.clone(), chi: vec![Twist::zero(); p.n_s], poses, t: 0.0 }
    }

    /// Reference configuration with a prescribed initial velocity field;
    /// velocities at clamped ends are zeroed.
    pub fn with_velocity(p: &BeamParams, chi: Vec<Twist>) -> Result<Self> {
        let mut s = Self::at_rest(p);
        if chi.len() != p.n_s {
            return Err(Error::InvalidParameter(format!("velocity has {} entries, grid has {}", chi.len(), p.n_s)));
        }
        s.chi = chi;
        s.apply_boundary(p);
        Ok(s)
    }

    /// State with given strain and velocity fields; poses are obtained by
    /// integrating the strain from `base` at `s = 0`. Strains at free ends
    /// are reset to `ε₀`.
    pub fn from_fields(p: &BeamParams, eps: Vec<Twist>, chi: Vec<Twist>, base: Pose) -> Result<Self> {
        if eps.len() != p.n_s || chi.len() != p.n_s {
            return Err(Error::InvalidParameter("field lengths must equal the grid size".into()));
        }
        let mut s = Self { poses: Vec::new(), eps, chi, t: 0.0 };
        s.apply_boundary(p);
        s.poses = integrate_strain(&s.eps, p.ds(), base);
        Ok(s)
    }

    /// Imposes `χ = 0` at clamped ends and `ε = ε₀` at free ends.
    pub fn apply_boundary(&mut self, p: &BeamParams) {
        let last = p.n_s - 1;
        let (left, right) = p.bc.ends();
        for (end, i) in [(left, 0), (right, last)] {
            match end {
                EndCondition::Clamped => self.chi[i] = Twist::zero(),
                EndCondition::Free => self.eps[i] = p.eps0[i],
            }
        }
    }

    /// Recomputes the poses from the strain field, keeping the pose at
    /// `s = 0`.
    pub fn rebuild_poses(&mut self, p: &BeamParams) {
        let base = self.poses.first().copied().unwrap_or_else(Pose::identity);
        self.poses = integrate_strain(&self.eps, p.ds(), base);
    }

    pub fn validate(&self, p: &BeamParams) -> Result<()> {
        if self.eps.len() != p.n_s || self.chi.len() != p.n_s || self.poses.len() != p.n_s {
            return Err(Error::InvalidParameter(format!(
                "state arrays ({}, {}, {}) do not match grid size {}",
                self.eps.len(),
                self.chi.len(),
                self.poses.len(),
                p.n_s
            )));
        }
        Ok(())
    }

    /// Position of the centre line at the free end `s = L`.
    pub fn tip(&self) -> Vec3 {
        self.poses.last().map(|h| h.trans).unwrap_or_else(Vec3::zeros)
    }

    /// Stress `C(ε − ε₀)` at every node.
    pub fn stress(&self, p: &BeamParams) -> StressState {
        StressState {
            sigma: self.eps.iter().zip(&p.eps0).map(|(e, e0)| p.stiffness.apply(&(*e - *e0))).collect(),
        }
    }
}

/// Stress `σ_c − σ₀` at grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct StressState {
    pub sigma: Vec<CoTwist>,
}

/// Poses along the grid from a strain field: `Hᵢ₊₁ = Hᵢ exp(ds·(εᵢ + εᵢ₊₁)/2)`.
pub fn integrate_strain(eps: &[Twist], ds: f64, base: Pose) -> Vec<Pose> {
    let mut poses = Vec::with_capacity(eps.len());
    let mut h = base;
    poses.push(h);
    for w in eps.windows(2) {
        h = h.compose(&exp(&((w[0] + w[1]) * 0.5), ds));
        poses.push(h);
    }
    poses
}

/// Forward left-invariant difference `εᵢ = log(Hᵢ⁻¹Hᵢ₊₁)/ds`, backward at the
/// last node. First-order accurate.
pub fn strain_from_poses(poses: &[Pose], ds: f64) -> Result<Vec<Twist>> {
    check_ds_and_len(poses.len(), ds, 2)?;
    let n = poses.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n - 1 {
        out.push(log(&poses[i].inverse().compose(&poses[i + 1]))? * (1.0 / ds));
    }
    out.push(out[n - 2]);
    Ok(out)
}

/// Second-order variant: `log(Hᵢ₋₁⁻¹Hᵢ₊₁)/(2ds)` inside and
/// `(4 log(H₀⁻¹H₁) − log(H₀⁻¹H₂))/(2ds)` (mirrored) at the ends.
pub fn strain_from_poses_centered(poses: &[Pose], ds: f64) -> Result<Vec<Twist>> {
    check_ds_and_len(poses.len(), ds, 3)?;
    let n = poses.len();
    let rel = |a: usize, b: usize| log(&poses[a].inverse().compose(&poses[b]));
    let mut out = Vec::with_capacity(n);
    out.push((rel(0, 1)? * 4.0 - rel(0, 2)?) * (0.5 / ds));
    for i in 1..n - 1 {
        out.push(rel(i - 1, i + 1)? * (0.5 / ds));
    }
    let l = n - 1;
    out.push((rel(l, l - 1)? * 4.0 - rel(l, l - 2)?) * (-0.5 / ds));
    Ok(out)
}

fn check_ds_and_len(n: usize, ds: f64, min: usize) -> Result<()> {
    if !(ds > 0.0) {
        return Err(Error::InvalidParameter(format!("ds must be positive, got {ds}")));
    }
    if n < min {
        return Err(Error::GridTooCoarse { n, min });
    }
    Ok(())
}

/// Spatial derivative used throughout: centred differences inside,
/// first-order one-sided at the ends. Together with the trapezoidal weights
/// `w` it satisfies `Σ wᵢ (aᵢ (Db)ᵢ + bᵢ (Da)ᵢ) = a_N b_N − a_0 b_0`.
pub fn ds_derivative<T>(u: &[T], ds: f64) -> Vec<T>
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = u.len();
    let mut out = Vec::with_capacity(n);
    out.push((u[1] - u[0]) * (1.0 / ds));
    for i in 1..n - 1 {
        out.push((u[i + 1] - u[i - 1]) * (0.5 / ds));
    }
    out.push((u[n - 1] - u[n - 2]) * (1.0 / ds));
    out
}

fn rhs_into(
    eps: &[Twist],
    chi: &[Twist],
    p: &BeamParams,
    sigma: &mut [CoTwist],
    vel: &mut [Twist],
    deps: &mut [Twist],
    dchi: &mut [Twist],
) {
    let n = p.n_s;
    let (left, right) = p.bc.ends();
    let ends = [(left, 0), (right, n - 1)];

    for i in 0..n {
        sigma[i] = p.stiffness.apply(&(eps[i] - p.eps0[i]));
        vel[i] = chi[i];
    }
    for (end, i) in ends {
        match end {
            EndCondition::Free => sigma[i] = CoTwist::zero(),
            EndCondition::Clamped => vel[i] = Twist::zero(),
        }
    }

    let inv_ds = 1.0 / p.ds();
    let half = 0.5 * inv_ds;
    for i in 0..n {
        let (dsigma, dvel) = if i == 0 {
            ((sigma[1] - sigma[0]) * inv_ds, (vel[1] - vel[0]) * inv_ds)
        } else if i == n - 1 {
            ((sigma[i] - sigma[i - 1]) * inv_ds, (vel[i] - vel[i - 1]) * inv_ds)
        } else {
            ((sigma[i + 1] - sigma[i - 1]) * half, (vel[i + 1] - vel[i - 1]) * half)
        };
        let momentum = p.inertia.apply(&vel[i]);
        let force = ad_star(&vel[i], &momentum) + dsigma - ad_star(&eps[i], &sigma[i]);
        dchi[i] = p.inertia.solve(&force);
        deps[i] = dvel - ad(&vel[i], &eps[i]);
    }
    for (end, i) in ends {
        match end {
            EndCondition::Free => deps[i] = Twist::zero(),
            EndCondition::Clamped => dchi[i] = Twist::zero(),
        }
    }
}

/// Time derivatives `(∂ₜε, ∂ₜχ)` of the semi-discrete system, with boundary
/// conditions applied.
pub fn beam_rhs(state: &BeamState, p: &BeamParams) -> Result<(Vec<Twist>, Vec<Twist>)> {
    if p.n_s < MIN_GRID {
        return Err(Error::GridTooCoarse { n: p.n_s, min: MIN_GRID });
    }
    if state.eps.len() != p.n_s || state.chi.len() != p.n_s {
        return Err(Error::InvalidParameter("state does not match grid".into()));
    }
    let n = p.n_s;
    let mut sigma = vec![CoTwist::zero(); n];
    let mut vel = vec![Twist::zero(); n];
    let mut deps = vec![Twist::zero(); n];
    let mut dchi = vec![Twist::zero(); n];
    rhs_into(&state.eps, &state.chi, p, &mut sigma, &mut vel, &mut deps, &mut dchi);
    Ok((deps, dchi))
}

/// Fixed-step RK4 driver holding its work buffers, for long runs.
#[derive(Clone, Debug)]
pub struct Stepper<'a> {
    p: &'a BeamParams,
    dt: f64,
    sigma: Vec<CoTwist>,
    vel: Vec<Twist>,
    eps: Vec<Twist>,
    chi: Vec<Twist>,
    k_eps: [Vec<Twist>; 4],
    k_chi: [Vec<Twist>; 4],
    stage_chi: [Vec<Twist>; 4],
}

impl<'a> Stepper<'a> {
    /// Fails with `CflViolated` when `dt` exceeds [`BeamParams::max_dt`].
    pub fn new(p: &'a BeamParams, dt: f64) -> Result<Self> {
        let bound = p.max_dt();
        if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
            return Err(Error::CflViolated { dt, bound });
        }
        let z = vec![Twist::zero(); p.n_s];
        let four = || [z.clone(), z.clone(), z.clone(), z.clone()];
        Ok(Self {
            p,
            dt,
            sigma: vec![CoTwist::zero(); p.n_s],
            vel: z.clone(),
            eps: z.clone(),
            chi: z.clone(),
            k_eps: four(),
            k_chi: four(),
            stage_chi: four(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances strain, velocity and poses by one step.
    pub fn advance(&mut self, state: &mut BeamState) -> Result<()> {
        self.advance_fields(state)?;
        let dt = self.dt;
        for (i, h) in state.poses.iter_mut().enumerate() {
            let u = [self.stage_chi[0][i], self.stage_chi[1][i], self.stage_chi[2][i], self.stage_chi[3][i]];
            *h = reconstruct(h, &munthe_kaas_velocity(&u, dt), dt);
        }
        Ok(())
    }

    /// Advances `ε` and `χ` only; the poses are left as they were (see
    /// [`BeamState::rebuild_poses`]).
    pub fn advance_fields(&mut self, state: &mut BeamState) -> Result<()> {
        state.validate(self.p)?;
        let (n, dt) = (self.p.n_s, self.dt);
        let weights = [0.0, 0.5 * dt, 0.5 * dt, dt];
        for k in 0..4 {
            for i in 0..n {
                let (e, c) = if k == 0 {
                    (state.eps[i], state.chi[i])
                } else {
                    (
                        state.eps[i] + self.k_eps[k - 1][i] * weights[k],
                        state.chi[i] + self.k_chi[k - 1][i] * weights[k],
                    )
                };
                self.eps[i] = e;
                self.chi[i] = c;
            }
            self.stage_chi[k].copy_from_slice(&self.chi);
            rhs_into(
                &self.eps,
                &self.chi,
                self.p,
                &mut self.sigma,
                &mut self.vel,
                &mut self.k_eps[k],
                &mut self.k_chi[k],
            );
        }
        let c = dt / 6.0;
        for i in 0..n {
            let de = self.k_eps[0][i] + (self.k_eps[1][i] + self.k_eps[2][i]) * 2.0 + self.k_eps[3][i];
            let dc = self.k_chi[0][i] + (self.k_chi[1][i] + self.k_chi[2][i]) * 2.0 + self.k_chi[3][i];
            state.eps[i] += de * c;
            state.chi[i] += dc * c;
        }
        if let Some(index) = state
            .eps
            .iter()
            .chain(&state.chi)
            .flat_map(|t| t.to_array())
            .position(|x| !x.is_finite())
        {
            return Err(Error::NonFiniteState { index });
        }
        state.t += dt;
        Ok(())
    }
}

/// One RK4 step of `(ε, χ)` with a fourth-order group update of every pose.
pub fn step(state: &BeamState, p: &BeamParams, dt: f64) -> Result<BeamState> {
    let mut next = state.clone();
    Stepper::new(p, dt)?.advance(&mut next)?;
    Ok(next)
}

/// Runs `steps` steps, keeping every `stride`-th state (the initial state is
/// always kept).
pub fn simulate(initial: BeamState, p: &BeamParams, dt: f64, steps: usize, stride: usize) -> Result<Vec<BeamState>> {
    let stride = stride.max(1);
    let mut stepper = Stepper::new(p, dt)?;
    let mut out = vec![initial.clone()];
    let mut s = initial;
    for k in 1..=steps {
        stepper.advance(&mut s)?;
        if k % stride == 0 {
            out.push(s.clone());
        }
    }
    Ok(out)
}

/// Kinetic and potential energy by trapezoidal quadrature.
pub fn energies(state: &BeamState, p: &BeamParams) -> (f64, f64) {
    let w = p.weights();
    let mut kinetic = 0.0;
    let mut potential = 0.0;
    for i in 0..p.n_s {
        kinetic += w[i] * p.inertia.quadratic(&state.chi[i]);
        potential += w[i] * p.stiffness.quadratic(&(state.eps[i] - p.eps0[i]));
    }
    (kinetic, potential)
}

/// Spatial (right-invariant) strain and velocity `Ad_H ε`, `Ad_H χ`.
pub fn to_spatial(state: &BeamState) -> (Vec<Twist>, Vec<Twist>) {
    let eps = state.poses.iter().zip(&state.eps).map(|(h, e)| adjoint(h, e)).collect();
    let chi = state.poses.iter().zip(&state.chi).map(|(h, c)| adjoint(h, c)).collect();
    (eps, chi)
}

/// Spatial momentum density and spatial stress `(π_s, σ_s)` at every node.
pub fn spatial_momenta(state: &BeamState, p: &BeamParams) -> (Vec<CoTwist>, Vec<CoTwist>) {
    let stress = state.stress(p);
    let pi = state.poses.iter().zip(&state.chi).map(|(h, c)| coadjoint_transport(h, &p.inertia.apply(c))).collect();
    let sigma = state.poses.iter().zip(&stress.sigma).map(|(h, s)| coadjoint_transport(h, s)).collect();
    (pi, sigma)
}

/// Centred time difference between slices `n − 1` and `n + 1`.
pub(crate) fn time_spacing(traj: &[BeamState], n: usize) -> f64 {
    traj[n + 1].t - traj[n - 1].t
}

/// Largest pointwise defect of `∂ₜπ_s = ∂ₛσ_s` over interior grid points and
/// interior time slices, with centred differences in both directions.
pub fn conservation_residual(trajectory: &[BeamState], p: &BeamParams) -> Result<f64> {
    if trajectory.len() < 3 {
        return Err(Error::InsufficientHistory { have: trajectory.len(), need: 3 });
    }
    for s in trajectory {
        s.validate(p)?;
    }
    let ds = p.ds();
    let spatial: Vec<_> = trajectory.iter().map(|s| spatial_momenta(s, p)).collect();
    let mut worst: f64 = 0.0;
    for n in 1..trajectory.len() - 1 {
        let dt2 = time_spacing(trajectory, n);
        let (pi_prev, pi_next) = (&spatial[n - 1].0, &spatial[n + 1].0);
        let sigma = &spatial[n].1;
        for i in 1..p.n_s - 1 {
            let r = (pi_next[i] - pi_prev[i]) * (1.0 / dt2) - (sigma[i + 1] - sigma[i - 1]) * (0.5 / ds);
            worst = worst.max(r.amax());
        }
    }
    Ok(worst)
}

/// Material compatibility defect `(∂ₜε)_rhs − Dₜε` at slice `n` (centred in
/// time), i.e. `Dₛχ − Dₜε − ad_χ ε` away from constrained rows.
pub fn compatibility_residual(trajectory: &[BeamState], n: usize, p: &BeamParams) -> Result<Vec<Twist>> {
    check_slice(trajectory, n)?;
    let (deps, _) = beam_rhs(&trajectory[n], p)?;
    let dt2 = time_spacing(trajectory, n);
    Ok((0..p.n_s).map(|i| deps[i] - (trajectory[n + 1].eps[i] - trajectory[n - 1].eps[i]) * (1.0 / dt2)).collect())
}

/// Material momentum-balance defect `J(Dₜχ − (∂ₜχ)_rhs)` at slice `n`, i.e.
/// `Dₜ(Jχ) − ad*_χ Jχ − Dₛσ + ad*_ε σ` away from constrained rows.
pub fn motion_residual(trajectory: &[BeamState], n: usize, p: &BeamParams) -> Result<Vec<CoTwist>> {
    check_slice(trajectory, n)?;
    let (_, dchi) = beam_rhs(&trajectory[n], p)?;
    let dt2 = time_spacing(trajectory, n);
    Ok((0..p.n_s)
        .map(|i| {
            let rate = (trajectory[n + 1].chi[i] - trajectory[n - 1].chi[i]) * (1.0 / dt2);
            p.inertia.apply(&(rate - dchi[i]))
        })
        .collect())
}

/// Spatial compatibility defect `Dₛχ_s − Dₜε_s − ad(ε_s, χ_s)` at slice `n`.
pub fn spatial_compatibility_residual(trajectory: &[BeamState], n: usize, p: &BeamParams) -> Result<Vec<Twist>> {
    check_slice(trajectory, n)?;
    let (eps_prev, _) = to_spatial(&trajectory[n - 1]);
    let (eps_next, _) = to_spatial(&trajectory[n + 1]);
    let (eps, chi) = to_spatial(&trajectory[n]);
    let dchi = ds_derivative(&chi, p.ds());
    let dt2 = time_spacing(trajectory, n);
    Ok((0..p.n_s).map(|i| dchi[i] - (eps_next[i] - eps_prev[i]) * (1.0 / dt2) - ad(&eps[i], &chi[i])).collect())
}

fn check_slice(trajectory: &[BeamState], n: usize) -> Result<()> {
    if trajectory.len() < 3 {
        return Err(Error::InsufficientHistory { have: trajectory.len(), need: 3 });
    }
    if n == 0 || n + 1 >= trajectory.len() {
        return Err(Error::InvalidParameter(format!("slice {n} has no centred neighbours")));
    }
    Ok(())
}
