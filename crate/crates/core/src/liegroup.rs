//! SE(3), its Lie algebra se(3) and the dual se(3)*.
//!
//! Every 6-vector in this crate uses the angular-first layout `(ω, v)` for
//! twists and `(m, n)` for co-twists; see [`LAYOUT`]. Poses are stored as a
//! rotation matrix plus a translation, acting on points as `x = R w + r`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector6};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type Mat4 = Matrix4<f64>;
pub type Vec6 = Vector6<f64>;

/// Component ordering shared by [`Twist`], [`CoTwist`] and every 6×6 operator:
/// indices 0..3 hold the angular part, 3..6 the linear part.
pub const LAYOUT: [&str; 6] = ["ang_x", "ang_y", "ang_z", "lin_x", "lin_y", "lin_z"];

/// Below this value of `‖ω‖·dt` the exponential switches to Taylor branches.
pub const EXP_TAYLOR_THRESHOLD: f64 = 1e-6;
/// The logarithm refuses rotation angles within this margin of π.
pub const LOG_BRANCH_MARGIN: f64 = 1e-6;
/// Structural tolerance accepted by [`vee`].
pub const ALGEBRA_TOL: f64 = 1e-9;
/// Orthonormality drift that triggers re-projection of a composed rotation.
pub const DRIFT_TOL: f64 = 1e-12;
/// Orthonormality tolerance of a valid [`Pose`].
pub const GROUP_TOL: f64 = 1e-10;

/// Skew-symmetric matrix with `skew(w) * u == w.cross(u)`.
#[inline]
pub fn skew(w: &Vec3) -> Mat3 {
    Mat3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

macro_rules! six_vector {
    ($name:ident) => {
        impl $name {
            pub const fn new(ang: Vec3, lin: Vec3) -> Self {
                Self { ang, lin }
            }

            pub fn zero() -> Self {
                Self::new(Vec3::zeros(), Vec3::zeros())
            }

            pub fn from_vector(v: &Vec6) -> Self {
                Self::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]))
            }

            pub fn from_array(a: [f64; 6]) -> Self {
                Self::from_vector(&Vec6::from(a))
            }

            pub fn to_vector(&self) -> Vec6 {
                Vec6::new(
                    self.ang.x, self.ang.y, self.ang.z, self.lin.x, self.lin.y, self.lin.z,
                )
            }

            pub fn to_array(&self) -> [f64; 6] {
                self.to_vector().into()
            }

            /// Largest absolute component.
            pub fn amax(&self) -> f64 {
                self.ang.amax().max(self.lin.amax())
            }

            pub fn norm(&self) -> f64 {
                (self.ang.norm_squared() + self.lin.norm_squared()).sqrt()
            }

            pub fn is_finite(&self) -> bool {
                self.ang.iter().chain(self.lin.iter()).all(|x| x.is_finite())
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                Self::new(self.ang + o.ang, self.lin + o.lin)
            }
        }

        impl AddAssign for $name {
            fn add_assign(&mut self, o: Self) {
                self.ang += o.ang;
                self.lin += o.lin;
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                Self::new(self.ang - o.ang, self.lin - o.lin)
            }
        }

        impl SubAssign for $name {
            fn sub_assign(&mut self, o: Self) {
                self.ang -= o.ang;
                self.lin -= o.lin;
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self::new(-self.ang, -self.lin)
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            fn mul(self, s: f64) -> Self {
                Self::new(self.ang * s, self.lin * s)
            }
        }

        impl Mul<$name> for f64 {
            type Output = $name;
            fn mul(self, x: $name) -> $name {
                x * self
            }
        }

        impl Default for $name {
            fn default() -> Self {
                Self::zero()
            }
        }
    };
}

/// Element of se(3): angular rate or curvature `ang` (ω) and linear velocity or
/// strain `lin` (v).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Twist {
    pub ang: Vec3,
    pub lin: Vec3,
}

/// Element of se(3)*: moment or angular momentum `ang` (m) and force or linear
/// momentum `lin` (n).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoTwist {
    pub ang: Vec3,
    pub lin: Vec3,
}

six_vector!(Twist);
six_vector!(CoTwist);

impl CoTwist {
    /// Natural pairing `⟨(m, n), (ω, v)⟩ = m·ω + n·v`.
    #[inline]
    pub fn pair(&self, xi: &Twist) -> f64 {
        self.ang.dot(&xi.ang) + self.lin.dot(&xi.lin)
    }
}

/// Rigid motion `x ↦ R x + r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rot: Mat3,
    pub trans: Vec3,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Self { rot: Mat3::identity(), trans: Vec3::zeros() }
    }

    pub fn from_translation(r: Vec3) -> Self {
        Self { rot: Mat3::identity(), trans: r }
    }

    pub fn from_rotation(rot: Mat3) -> Self {
        Self { rot, trans: Vec3::zeros() }
    }

    /// Builds a pose, checking `RᵀR = I` and `det R = 1` within [`GROUP_TOL`].
    pub fn try_new(rot: Mat3, trans: Vec3) -> Result<Self> {
        let drift = orthonormality_drift(&rot);
        if !(drift <= GROUP_TOL) {
            return Err(Error::NotInGroup(format!("|RᵀR - I| = {drift:e}")));
        }
        let det = rot.determinant();
        if (det - 1.0).abs() > GROUP_TOL {
            return Err(Error::NotInGroup(format!("det R = {det}")));
        }
        if !trans.iter().all(|x| x.is_finite()) {
            return Err(Error::NotInGroup("non-finite translation".into()));
        }
        Ok(Self { rot, trans })
    }

    /// Homogeneous 4×4 representation.
    pub fn to_matrix(&self) -> Mat4 {
        let mut m = Mat4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rot);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.trans);
        m
    }

    pub fn from_matrix(m: &Mat4) -> Result<Self> {
        let last = m.row(3);
        if last[0].abs() > GROUP_TOL
            || last[1].abs() > GROUP_TOL
            || last[2].abs() > GROUP_TOL
            || (last[3] - 1.0).abs() > GROUP_TOL
        {
            return Err(Error::NotInGroup("last row must be (0, 0, 0, 1)".into()));
        }
        Self::try_new(m.fixed_view::<3, 3>(0, 0).into_owned(), m.fixed_view::<3, 1>(0, 3).into_owned())
    }

    /// `self ∘ other`, re-orthonormalized when drift exceeds [`DRIFT_TOL`].
    pub fn compose(&self, other: &Pose) -> Pose {
        let rot = self.rot * other.rot;
        Pose { rot: reorthonormalize(rot), trans: self.rot * other.trans + self.trans }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rot.transpose();
        Pose { rot: rt, trans: -(rt * self.trans) }
    }

    /// Image of a point: `R w + r`.
    #[inline]
    pub fn act(&self, w: &Vec3) -> Vec3 {
        self.rot * w + self.trans
    }

    /// `max |RᵀR - I|` plus `|det R - 1|`.
    pub fn group_defect(&self) -> f64 {
        orthonormality_drift(&self.rot) + (self.rot.determinant() - 1.0).abs()
    }
}

/// `‖RᵀR − I‖∞` (largest absolute entry).
pub fn orthonormality_drift(rot: &Mat3) -> f64 {
    (rot.transpose() * rot - Mat3::identity()).amax()
}

/// Polar projection onto SO(3) when the drift exceeds [`DRIFT_TOL`].
pub fn reorthonormalize(rot: Mat3) -> Mat3 {
    if orthonormality_drift(&rot) <= DRIFT_TOL {
        return rot;
    }
    let svd = rot.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => {
            let mut q = u * v_t;
            if q.determinant() < 0.0 {
                let mut u = u;
                u.column_mut(2).neg_mut();
                q = u * v_t;
            }
            q
        }
        _ => rot,
    }
}

/// `[[skew(ω), v], [0, 0, 0, 0]]`.
pub fn hat(xi: &Twist) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(&xi.ang));
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&xi.lin);
    m
}

/// Inverse of [`hat`]; rejects matrices outside se(3) beyond [`ALGEBRA_TOL`].
pub fn vee(m: &Mat4) -> Result<Twist> {
    for j in 0..4 {
        if m[(3, j)].abs() > ALGEBRA_TOL {
            return Err(Error::NotInAlgebra(format!("last row entry ({}, {}) = {}", 3, j, m[(3, j)])));
        }
    }
    for i in 0..3 {
        for j in i..3 {
            let sym = m[(i, j)] + m[(j, i)];
            if sym.abs() > ALGEBRA_TOL {
                return Err(Error::NotInAlgebra(format!(
                    "rotation block not skew-symmetric at ({i}, {j}): {sym}"
                )));
            }
        }
    }
    let ang = Vec3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) * 0.5;
    Ok(Twist::new(ang, Vec3::new(m[(0, 3)], m[(1, 3)], m[(2, 3)])))
}

/// Coefficients `(sin θ/θ, (1 − cos θ)/θ², (θ − sin θ)/θ³)`.
fn exp_coefficients(theta: f64) -> (f64, f64, f64) {
    if theta < EXP_TAYLOR_THRESHOLD {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        (
            1.0 - t2 / 6.0 + t4 / 120.0,
            0.5 - t2 / 24.0 + t4 / 720.0,
            1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0,
        )
    } else {
        let s = theta.sin();
        let half = (0.5 * theta).sin();
        let t2 = theta * theta;
        (s / theta, 2.0 * half * half / t2, (theta - s) / (t2 * theta))
    }
}

/// Group exponential of `dt·ξ` (Rodrigues form).
pub fn exp(xi: &Twist, dt: f64) -> Pose {
    let w = xi.ang * dt;
    let u = xi.lin * dt;
    let theta = w.norm();
    let (a, b, c) = exp_coefficients(theta);
    let k = skew(&w);
    let k2 = k * k;
    let rot = Mat3::identity() + k * a + k2 * b;
    let v = Mat3::identity() + k * b + k2 * c;
    Pose { rot, trans: v * u }
}

/// Group logarithm, defined for rotation angles below `π −` [`LOG_BRANCH_MARGIN`].
pub fn log(h: &Pose) -> Result<Twist> {
    let r = &h.rot;
    let axis = Vec3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]) * 0.5;
    let cos = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let sin = axis.norm();
    let theta = sin.atan2(cos);
    if theta >= std::f64::consts::PI - LOG_BRANCH_MARGIN {
        return Err(Error::NearSingular { angle: theta, margin: LOG_BRANCH_MARGIN });
    }
    let scale = if theta < 1e-4 {
        let t2 = theta * theta;
        1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    } else {
        theta / sin
    };
    let w = axis * scale;
    // V⁻¹ = I − K/2 + d K², d = (1 − θ sin θ / (2(1 − cos θ))) / θ²
    let d = if theta < 1e-2 {
        let t2 = theta * theta;
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    } else {
        let half = 0.5 * theta;
        (1.0 - half / half.tan()) / (theta * theta)
    };
    let k = skew(&w);
    let v_inv = Mat3::identity() - k * 0.5 + k * k * d;
    Ok(Twist::new(w, v_inv * h.trans))
}

/// Lie bracket `ad_ξ η = (ω₁×ω₂, ω₁×v₂ − ω₂×v₁)`.
#[inline]
pub fn ad(xi: &Twist, eta: &Twist) -> Twist {
    Twist::new(xi.ang.cross(&eta.ang), xi.ang.cross(&eta.lin) - eta.ang.cross(&xi.lin))
}

/// Dual of [`ad`]: `ad*_ξ(m, n) = (m×ω + n×v, n×ω)`, so that
/// `⟨ad*_ξ μ, η⟩ = ⟨μ, ad_ξ η⟩`.
#[inline]
pub fn ad_star(xi: &Twist, mu: &CoTwist) -> CoTwist {
    CoTwist::new(mu.ang.cross(&xi.ang) + mu.lin.cross(&xi.lin), mu.lin.cross(&xi.ang))
}

/// Coadjoint transport `(R m + r × R n, R n)`: material momenta to spatial momenta.
#[inline]
pub fn coadjoint_transport(h: &Pose, mu: &CoTwist) -> CoTwist {
    let rn = h.rot * mu.lin;
    CoTwist::new(h.rot * mu.ang + h.trans.cross(&rn), rn)
}

/// Adjoint action `Ad_H ξ = vee(H ξ̂ H⁻¹) = (R ω, R v + r × R ω)`.
#[inline]
pub fn adjoint(h: &Pose, xi: &Twist) -> Twist {
    let rw = h.rot * xi.ang;
    Twist::new(rw, h.rot * xi.lin + h.trans.cross(&rw))
}
