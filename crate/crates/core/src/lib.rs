//! Geometrically exact (Reissner) beams and rigid bodies on the Lie group SE(3).
//!
//! The beam is evolved in its reduced, left-invariant form: strain `ε` and
//! velocity `χ` fields obey the Euler–Poincaré equation together with the
//! compatibility condition, and the pose field `H(s, t)` is reconstructed on
//! the group. Diagnostics check energy, Casimirs, spatial momentum, the
//! geodesic interpretation and the covariant (field-theoretic) residuals.

pub mod analysis;
pub mod beam;
pub mod connection;
pub mod covariant;
pub mod error;
pub mod integrators;
pub mod liegroup;
pub mod rigidbody;

#[cfg(test)]
pub(crate) mod testing;

pub use connection::Metric6;
pub use error::{Error, Result};
pub use liegroup::{CoTwist, Pose, Twist, Vec3};
