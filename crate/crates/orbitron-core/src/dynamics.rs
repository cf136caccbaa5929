//! Hamiltonian, equations of motion, toral momentum map, and a numerical flow
//! with conservation diagnostics.
//!
//! Everything is written in body coordinates on `T*SE(3)`:
//!
//! ```text
//! h = ½ Πᵀ I⁻¹ Π + |p|²/2M − μ ⟨B(x), A e₃⟩
//! Ȧ = A hat(I⁻¹Π)            ẋ = A p / M
//! Π̇ = Π × I⁻¹Π + μ e₃ × (AᵀB(x))      ṗ = p × I⁻¹Π + μ Aᵀ DB(x)ᵀ A e₃
//! ```
//!
//! The torque term is the body-frame `m × B` with `m = μ e₃`; the
//! finite-difference energy oracle in the test suite pins its sign.

use serde::{Deserialize, Serialize};

use crate::field::Field;
use crate::se3::{hat, rot_z, BodyMomentum, Mat3, PhasePoint, Vec3};
use crate::{Error, Result};

/// Mass, principal inertia moments (I₂ = I₁ by axisymmetry) and magnetic
/// moment of the rigid body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyParams {
    /// Mass, kg.
    pub mass: f64,
    /// Transverse moment of inertia, kg·m².
    pub i1: f64,
    /// Axial moment of inertia, kg·m².
    pub i3: f64,
    /// Magnetic moment along the symmetry axis, A·m².
    pub mu: f64,
}

impl BodyParams {
    pub fn new(mass: f64, i1: f64, i3: f64, mu: f64) -> Self {
        BodyParams { mass, i1, i3, mu }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mass", self.mass), ("i1", self.i1), ("i3", self.i3)] {
            if !(v > 0.0) {
                return Err(Error::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.mu.is_finite() {
            return Err(Error::Validation("mu must be finite".into()));
        }
        Ok(())
    }

    /// Reference inertia tensor `diag(I₁, I₁, I₃)`.
    pub fn inertia(&self) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(self.i1, self.i1, self.i3))
    }

    /// `I⁻¹ Π`, the body angular velocity.
    pub fn omega(&self, pi: &Vec3) -> Vec3 {
        Vec3::new(pi.x / self.i1, pi.y / self.i1, pi.z / self.i3)
    }
}

/// Relative-equilibrium velocity `(ξ₁, ξ₂)`: spatial and body rotation rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityPair {
    pub xi1: f64,
    pub xi2: f64,
}

impl VelocityPair {
    pub fn new(xi1: f64, xi2: f64) -> Self {
        VelocityPair { xi1, xi2 }
    }
}

/// Value of the toral momentum map: `J₁ = ⟨AΠ + x × Ap, e₃⟩`, `J₂ = −⟨Π, e₃⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumValue {
    pub j1: f64,
    pub j2: f64,
}

/// Tangent vector to `T*SE(3)` in the ambient coordinates used by the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTangent {
    pub a_dot: Mat3,
    pub x_dot: Vec3,
    pub pi_dot: Vec3,
    pub p_dot: Vec3,
}

impl PhaseTangent {
    pub fn zero() -> Self {
        PhaseTangent {
            a_dot: Mat3::zeros(),
            x_dot: Vec3::zeros(),
            pi_dot: Vec3::zeros(),
            p_dot: Vec3::zeros(),
        }
    }

    fn scaled(&self, s: f64) -> Self {
        PhaseTangent {
            a_dot: s * self.a_dot,
            x_dot: s * self.x_dot,
            pi_dot: s * self.pi_dot,
            p_dot: s * self.p_dot,
        }
    }

    fn add(&self, other: &Self) -> Self {
        PhaseTangent {
            a_dot: self.a_dot + other.a_dot,
            x_dot: self.x_dot + other.x_dot,
            pi_dot: self.pi_dot + other.pi_dot,
            p_dot: self.p_dot + other.p_dot,
        }
    }
}

fn advance(z: &PhasePoint, v: &PhaseTangent, dt: f64) -> PhasePoint {
    PhasePoint {
        g: crate::se3::Se3 {
            a: z.g.a + dt * v.a_dot,
            x: z.g.x + dt * v.x_dot,
        },
        m: BodyMomentum {
            pi: z.m.pi + dt * v.pi_dot,
            p: z.m.p + dt * v.p_dot,
        },
    }
}

/// Total energy `½ Πᵀ I⁻¹ Π + |p|²/2M − μ ⟨B(x), A e₃⟩`.
pub fn hamiltonian(body: &BodyParams, field: &Field, z: &PhasePoint) -> Result<f64> {
    let b = field.b(&z.g.x)?;
    let kinetic =
        0.5 * z.m.pi.dot(&body.omega(&z.m.pi)) + z.m.p.norm_squared() / (2.0 * body.mass);
    let e3 = Vec3::new(0.0, 0.0, 1.0);
    Ok(kinetic - body.mu * b.dot(&(z.g.a * e3)))
}

/// Augmented Hamiltonian `h − ξ₁ J₁ − ξ₂ J₂`.
pub fn augmented_hamiltonian(
    body: &BodyParams,
    field: &Field,
    z: &PhasePoint,
    xi: &VelocityPair,
) -> Result<f64> {
    let j = momentum_map(z);
    Ok(hamiltonian(body, field, z)? - xi.xi1 * j.j1 - xi.xi2 * j.j2)
}

/// Right-hand side of the equations of motion in body coordinates.
pub fn eom_rhs(body: &BodyParams, field: &Field, z: &PhasePoint) -> Result<PhaseTangent> {
    let e3 = Vec3::new(0.0, 0.0, 1.0);
    let a = &z.g.a;
    let at = a.transpose();
    let b = field.b(&z.g.x)?;
    let db = field.db(&z.g.x)?;
    let omega = body.omega(&z.m.pi);
    Ok(PhaseTangent {
        a_dot: a * hat(&omega),
        x_dot: (a * z.m.p) / body.mass,
        pi_dot: z.m.pi.cross(&omega) + body.mu * e3.cross(&(at * b)),
        p_dot: z.m.p.cross(&omega) + body.mu * (at * (db.transpose() * (a * e3))),
    })
}

/// Toral momentum map in body coordinates.
pub fn momentum_map(z: &PhasePoint) -> MomentumValue {
    let e3 = Vec3::new(0.0, 0.0, 1.0);
    let a_pi = z.g.a * z.m.pi;
    let a_p = z.g.a * z.m.p;
    MomentumValue {
        j1: (a_pi + z.g.x.cross(&a_p)).dot(&e3),
        j2: -z.m.pi.dot(&e3),
    }
}

/// Lifted toral action `Φ_(θ_S, θ_B)` on a phase point.
pub fn toral_apply(theta_s: f64, theta_b: f64, z: &PhasePoint) -> PhasePoint {
    let rs = rot_z(theta_s);
    let rb = rot_z(theta_b);
    PhasePoint {
        g: crate::se3::Se3 {
            a: rs * z.g.a * rb.transpose(),
            x: rs * z.g.x,
        },
        m: BodyMomentum {
            pi: rb * z.m.pi,
            p: rb * z.m.p,
        },
    }
}

/// Tangent lift of the toral action, for equivariance checks.
pub fn toral_apply_tangent(theta_s: f64, theta_b: f64, v: &PhaseTangent) -> PhaseTangent {
    let rs = rot_z(theta_s);
    let rb = rot_z(theta_b);
    PhaseTangent {
        a_dot: rs * v.a_dot * rb.transpose(),
        x_dot: rs * v.x_dot,
        pi_dot: rb * v.pi_dot,
        p_dot: rb * v.p_dot,
    }
}

/// One-parameter group orbit `exp(t ξ) · z`.
pub fn group_flow(xi: &VelocityPair, t: f64, z: &PhasePoint) -> PhasePoint {
    toral_apply(t * xi.xi1, t * xi.xi2, z)
}

/// Infinitesimal generator of the lifted toral action at `z`.
pub fn infinitesimal_generator(xi: &VelocityPair, z: &PhasePoint) -> PhaseTangent {
    let e3 = Vec3::new(0.0, 0.0, 1.0);
    let a = &z.g.a;
    let w = xi.xi1 * (a.transpose() * e3) - xi.xi2 * e3;
    PhaseTangent {
        a_dot: a * hat(&w),
        x_dot: xi.xi1 * e3.cross(&z.g.x),
        pi_dot: xi.xi2 * e3.cross(&z.m.pi),
        p_dot: xi.xi2 * e3.cross(&z.m.p),
    }
}

/// Per-step conservation diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiagnosticRow {
    pub t: f64,
    pub h: f64,
    pub j1: f64,
    pub j2: f64,
}

/// Result of a numerical integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `(t, state)` samples at the requested stride; first and last steps are
    /// always included.
    pub samples: Vec<(f64, PhasePoint)>,
    /// Diagnostics at full step resolution, whatever the stride.
    pub diagnostics: Vec<DiagnosticRow>,
    /// Set when the flow hit a field singularity; the trajectory holds the
    /// partial data up to the failing step.
    pub aborted: Option<String>,
}

impl Trajectory {
    /// Maximum absolute drift of `(h, J₁, J₂)` from their initial values.
    pub fn max_drift(&self) -> (f64, f64, f64) {
        let first = match self.diagnostics.first() {
            Some(d) => *d,
            None => return (0.0, 0.0, 0.0),
        };
        let mut d = (0.0f64, 0.0f64, 0.0f64);
        for row in &self.diagnostics {
            d.0 = d.0.max((row.h - first.h).abs());
            d.1 = d.1.max((row.j1 - first.j1).abs());
            d.2 = d.2.max((row.j2 - first.j2).abs());
        }
        d
    }

    /// CSV export: `t, a11..a33 (row-major), x, Pi, p, h, J1, J2`, floats at
    /// 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "t,a11,a12,a13,a21,a22,a23,a31,a32,a33,x1,x2,x3,pi1,pi2,pi3,p1,p2,p3,h,j1,j2\n",
        );
        let mut diag = self.diagnostics.iter().peekable();
        for (t, z) in &self.samples {
            // Diagnostics are at full resolution; find the row for this time.
            while let Some(d) = diag.peek() {
                if d.t + 1e-300 < *t {
                    diag.next();
                } else {
                    break;
                }
            }
            let d = diag.peek().copied();
            let mut cols: Vec<String> = Vec::with_capacity(22);
            cols.push(fmt17(*t));
            for i in 0..3 {
                for j in 0..3 {
                    cols.push(fmt17(z.g.a[(i, j)]));
                }
            }
            for v in [&z.g.x, &z.m.pi, &z.m.p] {
                for i in 0..3 {
                    cols.push(fmt17(v[i]));
                }
            }
            match d {
                Some(d) => {
                    cols.push(fmt17(d.h));
                    cols.push(fmt17(d.j1));
                    cols.push(fmt17(d.j2));
                }
                None => {
                    cols.extend(["".into(), "".into(), "".into()]);
                }
            }
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }
}

/// Format a float with 17 significant digits (shortest round-trippable form
/// is not used so that output is byte-stable across platforms).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Classical RK4 flow of the equations of motion with post-step polar
/// re-projection of the rotation. Conservation drift is recorded, never
/// corrected.
pub fn integrate(
    body: &BodyParams,
    field: &Field,
    z0: &PhasePoint,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(Error::Validation(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0) {
        return Err(Error::Validation(format!(
            "t_end must be nonnegative, got {t_end}"
        )));
    }
    let stride = stride.max(1);
    let steps = (t_end / dt).round() as usize;

    let mut z = *z0;
    let mut traj = Trajectory {
        samples: Vec::with_capacity(steps / stride + 2),
        diagnostics: Vec::with_capacity(steps + 1),
        aborted: None,
    };

    let record_diag = |traj: &mut Trajectory, t: f64, z: &PhasePoint| -> Result<()> {
        let h = hamiltonian(body, field, z)?;
        let j = momentum_map(z);
        traj.diagnostics.push(DiagnosticRow {
            t,
            h,
            j1: j.j1,
            j2: j.j2,
        });
        Ok(())
    };

    record_diag(&mut traj, 0.0, &z)?;
    traj.samples.push((0.0, z));

    for k in 0..steps {
        let t = k as f64 * dt;
        let step = || -> Result<PhasePoint> {
            let k1 = eom_rhs(body, field, &z)?;
            let k2 = eom_rhs(body, field, &advance(&z, &k1, dt / 2.0))?;
            let k3 = eom_rhs(body, field, &advance(&z, &k2, dt / 2.0))?;
            let k4 = eom_rhs(body, field, &advance(&z, &k3, dt))?;
            let incr = k1
                .add(&k2.scaled(2.0))
                .add(&k3.scaled(2.0))
                .add(&k4)
                .scaled(1.0 / 6.0);
            let mut next = advance(&z, &incr, dt);
            next.g = next.g.repaired();
            Ok(next)
        };
        match step() {
            Ok(next) => z = next,
            Err(e) => {
                traj.aborted = Some(e.to_string());
                return Ok(traj);
            }
        }
        let t_next = t + dt;
        if record_diag(&mut traj, t_next, &z).is_err() {
            traj.aborted = Some("diagnostics failed at field singularity".into());
            return Ok(traj);
        }
        if (k + 1) % stride == 0 || k + 1 == steps {
            traj.samples.push((t_next, z));
        }
    }
    Ok(traj)
}
