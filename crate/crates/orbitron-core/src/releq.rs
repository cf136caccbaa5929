//! Construction and verification of relative-equilibrium branches.
//!
//! A relative equilibrium is a phase point whose trajectory is a one-parameter
//! group orbit `F_t(z) = exp(t ξ) · z`. Equivalently, `z` is a critical point
//! of the augmented Hamiltonian `h − J^ξ`, which amounts to four vector
//! identities; [`releq_residual`] evaluates their left-hand sides.
//!
//! Two equatorial branches are constructed in canonical placement
//! `x₀ = (r, 0, 0)`, `A₀ = rot_z(θ₀)` (the toral action regenerates the full
//! circle):
//!
//! * regular (`r > 0`): `Π₀ = I₃(ξ₁−ξ₂) e₃`, `p₀ = M ξ₁ A₀ᵀ(0, r, 0)`, with
//!   `ξ₁` pinned by the field up to sign;
//! * singular (`r = 0`): same `Π₀`, `p₀ = 0`, `ξ₁` arbitrary.

use serde::{Deserialize, Serialize};

use crate::dynamics::{BodyParams, VelocityPair};
use crate::field::{EquatorialProfile, Field, StandardField};
use crate::se3::{rot_z, BodyMomentum, Mat3, PhasePoint, Se3, Vec3};
use crate::{Error, Result};

/// Regular (orbiting, trivial isotropy) or singular (axis-sitting, circle
/// isotropy) branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    Regular,
    Singular,
}

/// Which field model the branch was built against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Standard,
    Generalized,
}

/// Sign of the spatial velocity branch `ξ₁ = ±√(…)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(&self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A constructed relative equilibrium.
///
/// Serializes as `{kind, field_kind, r, theta0, sign, xi1, xi2, z0}` with
/// `z0 = {a, x, pi, p}` and the rotation flattened row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelEqBranch {
    pub kind: BranchKind,
    pub field_kind: FieldKind,
    /// Orbit radius, m (0 on the singular branch).
    pub r: f64,
    /// Phase of the canonical placement, rad.
    pub theta0: f64,
    pub sign: Sign,
    pub xi1: f64,
    pub xi2: f64,
    #[serde(with = "z0_repr")]
    pub z0: PhasePoint,
}

mod z0_repr {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Z0 {
        a: [f64; 9],
        x: [f64; 3],
        pi: [f64; 3],
        p: [f64; 3],
    }

    pub fn serialize<S: Serializer>(z: &PhasePoint, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut a = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                a[3 * i + j] = z.g.a[(i, j)];
            }
        }
        Z0 {
            a,
            x: z.g.x.into(),
            pi: z.m.pi.into(),
            p: z.m.p.into(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<PhasePoint, D::Error> {
        let z0 = Z0::deserialize(d)?;
        Ok(PhasePoint::new(
            Se3::new(Mat3::from_row_slice(&z0.a), Vec3::from_row_slice(&z0.x)),
            BodyMomentum::new(Vec3::from_row_slice(&z0.pi), Vec3::from_row_slice(&z0.p)),
        ))
    }
}

impl RelEqBranch {
    pub fn xi(&self) -> VelocityPair {
        VelocityPair::new(self.xi1, self.xi2)
    }

    /// Body angular momentum magnitude along e₃, `Π₀ = I₃(ξ₁ − ξ₂)`.
    pub fn pi0(&self, body: &BodyParams) -> f64 {
        body.i3 * (self.xi1 - self.xi2)
    }
}

/// The four left-hand sides of the relative-equilibrium equations at `(z, ξ)`:
///
/// ```text
/// R_A = μ (B × A e₃) + ξ₁ (Ap × (x × e₃) − AΠ × e₃)
/// R_x = −μ DBᵀ(A e₃) − ξ₁ (Ap × e₃)
/// R_Π = I⁻¹Π + ξ₂ e₃ − ξ₁ Aᵀ e₃
/// R_p = p/M − ξ₁ Aᵀ (e₃ × x)
/// ```
pub fn releq_residual(
    body: &BodyParams,
    field: &Field,
    z: &PhasePoint,
    xi: &VelocityPair,
) -> Result<[Vec3; 4]> {
    let e3 = Vec3::new(0.0, 0.0, 1.0);
    let a = &z.g.a;
    let x = &z.g.x;
    let b = field.b(x)?;
    let db = field.db(x)?;
    let a_e3 = a * e3;
    let a_p = a * z.m.p;
    let a_pi = a * z.m.pi;
    let r_a = body.mu * b.cross(&a_e3) + xi.xi1 * (a_p.cross(&x.cross(&e3)) - a_pi.cross(&e3));
    let r_x = -body.mu * (db.transpose() * a_e3) - xi.xi1 * a_p.cross(&e3);
    let r_pi = body.omega(&z.m.pi) + xi.xi2 * e3 - xi.xi1 * (a.transpose() * e3);
    let r_p = z.m.p / body.mass - xi.xi1 * (a.transpose() * e3.cross(x));
    Ok([r_a, r_x, r_pi, r_p])
}

/// Natural magnitudes for the four residuals, used to make residual norms
/// dimensionless: force-like components scale with `μ|B|/L`, velocity-like
/// with `|ξ|`.
pub fn residual_scales(body: &BodyParams, field: &Field, z: &PhasePoint, xi: &VelocityPair) -> [f64; 4] {
    let b_mag = field.b(&z.g.x).map(|b| b.norm()).unwrap_or(0.0);
    let scale_l = field.length_scale();
    let torque = (body.mu.abs() * b_mag).max(1e-300);
    let force = (body.mu.abs() * b_mag / scale_l).max(1e-300);
    let rate = xi.xi1.abs().max(xi.xi2.abs()).max(1e-300);
    [torque, force, rate, rate * scale_l.max(z.g.x.norm())]
}

/// Largest residual component over the four equations, each scaled by its
/// natural magnitude.
pub fn scaled_residual_norm(
    body: &BodyParams,
    field: &Field,
    z: &PhasePoint,
    xi: &VelocityPair,
) -> Result<f64> {
    let res = releq_residual(body, field, z, xi)?;
    let scales = residual_scales(body, field, z, xi);
    Ok(res
        .iter()
        .zip(scales.iter())
        .map(|(r, s)| r.amax() / s)
        .fold(0.0, f64::max))
}

/// Spatial velocity of the regular branch of the standard field,
/// `ξ₁ = ±√(−3hμqμ₀ / (2πM D^{5/2}))`, `D = r² + h²`. Requires `μq < 0`.
pub fn xi1_standard(body: &BodyParams, field: &StandardField, r: f64) -> Result<(f64, f64)> {
    let muq = body.mu * field.q;
    if muq >= 0.0 {
        return Err(Error::SignConstraint {
            context: "mu*q",
            value: muq,
        });
    }
    let d = r * r + field.h * field.h;
    let xi1 = (-3.0 * field.h * muq * field.mu0
        / (2.0 * std::f64::consts::PI * body.mass * d.powf(2.5)))
    .sqrt();
    Ok((xi1, -xi1))
}

/// Spatial velocity of the regular branch for a generalized field,
/// `ξ₁ = ±√(−2μf′₁/M)`. Requires `μ f′₁ < 0`.
pub fn xi1_generalized(body: &BodyParams, profile: &EquatorialProfile) -> Result<(f64, f64)> {
    let muf = body.mu * profile.f1p;
    if muf >= 0.0 {
        return Err(Error::SignConstraint {
            context: "mu*f1'",
            value: muf,
        });
    }
    let xi1 = (-2.0 * muf / body.mass).sqrt();
    Ok((xi1, -xi1))
}

fn field_kind(field: &Field) -> FieldKind {
    if field.is_standard() {
        FieldKind::Standard
    } else {
        FieldKind::Generalized
    }
}

/// Construct the regular branch point at radius `r > 0` and phase `theta0`.
pub fn make_regular(
    body: &BodyParams,
    field: &Field,
    r: f64,
    theta0: f64,
    sign: Sign,
    xi2: f64,
) -> Result<RelEqBranch> {
    if !(r > 0.0) {
        return Err(Error::Validation(format!(
            "regular branch needs r > 0, got {r}"
        )));
    }
    let xi1_mag = match field {
        Field::Standard(sf) => xi1_standard(body, sf, r)?.0,
        _ => xi1_generalized(body, &field.profile(r)?)?.0,
    };
    let xi1 = sign.value() * xi1_mag;
    let a0 = rot_z(theta0);
    let x0 = Vec3::new(r, 0.0, 0.0);
    let pi0 = Vec3::new(0.0, 0.0, body.i3 * (xi1 - xi2));
    let p0 = body.mass * xi1 * (a0.transpose() * Vec3::new(0.0, r, 0.0));
    Ok(RelEqBranch {
        kind: BranchKind::Regular,
        field_kind: field_kind(field),
        r,
        theta0,
        sign,
        xi1,
        xi2,
        z0: PhasePoint::new(Se3::new(a0, x0), BodyMomentum::new(pi0, p0)),
    })
}

/// Construct the singular (axis-sitting) branch point; `ξ₁` is free here.
pub fn make_singular(
    body: &BodyParams,
    field: &Field,
    xi1: f64,
    xi2: f64,
) -> Result<RelEqBranch> {
    // The constructor only needs the field to be regular at the origin.
    field.b(&Vec3::zeros())?;
    let pi0 = Vec3::new(0.0, 0.0, body.i3 * (xi1 - xi2));
    Ok(RelEqBranch {
        kind: BranchKind::Singular,
        field_kind: field_kind(field),
        r: 0.0,
        theta0: 0.0,
        sign: if xi1 >= 0.0 { Sign::Plus } else { Sign::Minus },
        xi1,
        xi2,
        z0: PhasePoint::new(
            Se3::identity(),
            BodyMomentum::new(pi0, Vec3::zeros()),
        ),
    })
}
