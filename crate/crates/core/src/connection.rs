//! Left-invariant metrics on SE(3) and their Levi-Civita connection, written
//! at the Lie algebra level.
//!
//! For left-invariant vector fields the connection reduces to the bilinear map
//!
//! ```text
//! ∇(ξ, η) = ½ ad_ξ η − ½ J⁻¹ (ad*_ξ Jη + ad*_η Jξ)
//! ```
//!
//! and a curve with body velocity χ is a geodesic when `χ̇ + ∇(χ, χ) = 0`,
//! which is exactly the free rigid-body Euler–Poincaré equation.

use nalgebra::{Cholesky, Matrix6, SymmetricEigen};

use crate::error::{Error, Result};
use crate::liegroup::{ad, ad_star, CoTwist, Twist};

/// Smallest admissible eigenvalue relative to the largest.
pub const SPD_RATIO: f64 = 1e-12;
/// Relative asymmetry tolerated by [`Metric6::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetric positive-definite operator `se(3) → se(3)*` (inertia or stiffness),
/// angular-first layout. The inverse is factored once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric6 {
    mat: Matrix6<f64>,
    inv: Matrix6<f64>,
    /// Set when the operator is exactly diagonal.
    diag: Option<([f64; 6], [f64; 6])>,
}

impl Metric6 {
    pub fn new(mat: Matrix6<f64>) -> Result<Self> {
        let scale = mat.amax();
        if !mat.iter().all(|x| x.is_finite()) || scale == 0.0 {
            return Err(Error::SingularMetric("zero or non-finite entries".into()));
        }
        let asym = (mat - mat.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::SingularMetric(format!("asymmetry {asym:e}")));
        }
        let sym = (mat + mat.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let lo = eig.eigenvalues.min();
        let hi = eig.eigenvalues.max();
        if !(lo > SPD_RATIO * hi) {
            return Err(Error::SingularMetric(format!("eigenvalues span [{lo:e}, {hi:e}]")));
        }
        let inv = Cholesky::new(sym)
            .ok_or_else(|| Error::SingularMetric("Cholesky factorization failed".into()))?
            .inverse();
        let off_diagonal = (0..6).any(|r| (0..6).any(|c| r != c && sym[(r, c)] != 0.0));
        let diag = (!off_diagonal).then(|| {
            let d: [f64; 6] = std::array::from_fn(|k| sym[(k, k)]);
            (d, d.map(|x| 1.0 / x))
        });
        Ok(Self { mat: sym, inv, diag })
    }

    pub fn diagonal(d: [f64; 6]) -> Result<Self> {
        Self::new(Matrix6::from_diagonal(&d.into()))
    }

    pub fn identity() -> Self {
        Self { mat: Matrix6::identity(), inv: Matrix6::identity(), diag: Some(([1.0; 6], [1.0; 6])) }
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.mat
    }

    pub fn inverse_matrix(&self) -> &Matrix6<f64> {
        &self.inv
    }

    /// `J ξ`.
    #[inline]
    pub fn apply(&self, xi: &Twist) -> CoTwist {
        if let Some((d, _)) = &self.diag {
            return CoTwist::from_vector(&xi.to_vector().component_mul(&nalgebra::Vector6::from(*d)));
        }
        CoTwist::from_vector(&(self.mat * xi.to_vector()))
    }

    /// `J⁻¹ μ`.
    #[inline]
    pub fn solve(&self, mu: &CoTwist) -> Twist {
        if let Some((_, d)) = &self.diag {
            return Twist::from_vector(&mu.to_vector().component_mul(&nalgebra::Vector6::from(*d)));
        }
        Twist::from_vector(&(self.inv * mu.to_vector()))
    }

    /// `½ ⟨J ξ, ξ⟩`.
    pub fn quadratic(&self, xi: &Twist) -> f64 {
        0.5 * self.apply(xi).pair(xi)
    }

    /// Largest eigenvalue of `self⁻¹ · stiffness`, i.e. the squared fastest
    /// wave speed when `self` is an inertia density and `stiffness` a Hooke
    /// operator.
    pub fn max_generalized_eigenvalue(&self, stiffness: &Metric6) -> f64 {
        // self = L Lᵀ, eigenvalues of L⁻¹ K L⁻ᵀ
        let chol = Cholesky::new(self.mat).expect("validated SPD");
        let l = chol.l();
        let l_inv = l.try_inverse().expect("validated SPD");
        let sym = l_inv * stiffness.mat * l_inv.transpose();
        SymmetricEigen::new((sym + sym.transpose()) * 0.5).eigenvalues.max()
    }
}

/// Algebra-level Levi-Civita connection of the left-invariant metric `J`.
pub fn koszul(xi: &Twist, eta: &Twist, metric: &Metric6) -> Twist {
    let skew = ad(xi, eta) * 0.5;
    let sym = ad_star(xi, &metric.apply(eta)) + ad_star(eta, &metric.apply(xi));
    skew - metric.solve(&sym) * 0.5
}

/// Covariant acceleration `χ̇ + ∇(χ, χ)` of a curve with body velocity `χ`;
/// zero exactly on geodesics.
pub fn geodesic_residual(chi: &Twist, chi_dot: &Twist, metric: &Metric6) -> Twist {
    *chi_dot + koszul(chi, chi, metric)
}
