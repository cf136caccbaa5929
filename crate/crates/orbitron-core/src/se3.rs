//! Exact linear-algebra kernel for SO(3)/SE(3).
//!
//! Rotations are stored as full 3×3 matrices: every formula downstream
//! (Hessians, stability bases, projected linearizations) is written directly
//! in matrix terms, and keeping the same representation avoids conversion
//! error in the cross-checks.
//!
//! All types are immutable values and all operations are pure functions.

use crate::tol;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Hat map: `hat(v) w = v × w`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`]. The symmetric part of `m` is discarded after checking
/// that it is below [`tol::VEE_ANTISYM`].
pub fn vee(m: &Mat3) -> Result<Vec3> {
    let defect = (m + m.transpose()).norm();
    if defect > tol::VEE_ANTISYM {
        return Err(Error::NotAntisymmetric { defect });
    }
    Ok(Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    ))
}

/// Rotation by `theta` around the third axis.
pub fn rot_z(theta: f64) -> Mat3 {
    let (s, c) = theta.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rodrigues rotation exponential. `exp_so3(theta * e3) = rot_z(theta)`.
pub fn exp_so3(v: &Vec3) -> Mat3 {
    let theta2 = v.norm_squared();
    let k = hat(v);
    // Series coefficients sin θ/θ and (1 - cos θ)/θ² are evaluated by series
    // below the switch point to avoid cancellation.
    let (a, b) = if theta2 < 1e-16 {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Mat3::identity() + a * k + b * (k * k)
}

/// Nearest rotation to `m` (polar factor), via the Newton iteration
/// `X ← (X + X⁻ᵀ)/2`. Converges quadratically for any `m` near SO(3).
pub fn polar_project(m: &Mat3) -> Mat3 {
    let mut x = *m;
    for _ in 0..32 {
        let inv_t = match x.try_inverse() {
            Some(inv) => inv.transpose(),
            None => break,
        };
        let next = 0.5 * (x + inv_t);
        let step = (next - x).norm();
        x = next;
        if step < 1e-16 {
            break;
        }
    }
    x
}

fn ortho_defect(a: &Mat3) -> f64 {
    (a.transpose() * a - Mat3::identity()).norm()
}

/// Configuration `(A, x)` of the body: orientation matrix and position of the
/// center of mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Se3 {
    pub a: Mat3,
    pub x: Vec3,
}

impl Se3 {
    pub fn new(a: Mat3, x: Vec3) -> Self {
        Se3 { a, x }
    }

    pub fn identity() -> Self {
        Se3 {
            a: Mat3::identity(),
            x: Vec3::zeros(),
        }
    }

    /// Check the rotation invariants: `AᵀA = I` and `det A = +1` within
    /// [`tol::ROTATION_ORTHO`].
    pub fn validate(&self) -> Result<()> {
        let defect = ortho_defect(&self.a);
        let det = self.a.determinant();
        if defect > tol::ROTATION_ORTHO || (det - 1.0).abs() > tol::ROTATION_ORTHO {
            return Err(Error::NotRotation {
                ortho_defect: defect,
                det,
            });
        }
        Ok(())
    }

    /// Re-project the rotation onto SO(3) when drift exceeds
    /// [`tol::DRIFT_REPAIR`].
    pub fn repaired(&self) -> Self {
        if ortho_defect(&self.a) > tol::DRIFT_REPAIR {
            Se3 {
                a: polar_project(&self.a),
                x: self.x,
            }
        } else {
            *self
        }
    }

    /// Group product `(A₁, x₁)(A₂, x₂) = (A₁A₂, A₁x₂ + x₁)`.
    pub fn compose(&self, other: &Se3) -> Se3 {
        Se3 {
            a: self.a * other.a,
            x: self.a * other.x + self.x,
        }
    }

    /// Group inverse `(A, x)⁻¹ = (Aᵀ, -Aᵀx)`.
    pub fn inverse(&self) -> Se3 {
        let at = self.a.transpose();
        Se3 {
            a: at,
            x: -(at * self.x),
        }
    }
}

/// Body-coordinate momenta `(Π, p)`: angular momentum and linear momentum in
/// the body frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyMomentum {
    pub pi: Vec3,
    pub p: Vec3,
}

impl BodyMomentum {
    pub fn new(pi: Vec3, p: Vec3) -> Self {
        BodyMomentum { pi, p }
    }

    pub fn zero() -> Self {
        BodyMomentum {
            pi: Vec3::zeros(),
            p: Vec3::zeros(),
        }
    }
}

/// A point `((A, x), (Π, p))` of `T*SE(3)` in body coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub g: Se3,
    pub m: BodyMomentum,
}

impl PhasePoint {
    pub fn new(g: Se3, m: BodyMomentum) -> Self {
        PhasePoint { g, m }
    }
}

/// Space-to-body conversion of momenta at configuration `g`:
/// `Π_B = A⁻¹(Π_S − x × p_S)`, `p_B = A⁻¹ p_S`.
pub fn body_from_space(g: &Se3, pi_s: &Vec3, p_s: &Vec3) -> BodyMomentum {
    let at = g.a.transpose();
    BodyMomentum {
        pi: at * (pi_s - g.x.cross(p_s)),
        p: at * p_s,
    }
}

/// Inverse of [`body_from_space`]:
/// `Π_S = A Π_B + x × A p_B`, `p_S = A p_B`.
pub fn space_from_body(g: &Se3, m: &BodyMomentum) -> (Vec3, Vec3) {
    let p_s = g.a * m.p;
    (g.a * m.pi + g.x.cross(&p_s), p_s)
}

/// Coadjoint action of se(3) on its dual:
/// `ad*_{(ρ,τ)}(μ, α) = (μ×ρ + α×τ, α×ρ)`.
pub fn coad_se3(rho: &Vec3, tau: &Vec3, mu: &Vec3, alpha: &Vec3) -> (Vec3, Vec3) {
    (mu.cross(rho) + alpha.cross(tau), alpha.cross(rho))
}
