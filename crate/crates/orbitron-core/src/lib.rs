//! Geometric-mechanics toolkit for the *orbitron*: a small axisymmetric magnetic
//! rigid body moving in an axisymmetric, mirror-symmetric external magnetic field.
//!
//! The crate covers the full analysis pipeline on the phase space `T*SE(3)` in
//! body coordinates:
//!
//! * [`se3`] — exact linear-algebra kernel for SO(3)/SE(3) (hat/vee maps,
//!   rotation exponential, body/space trivializations, coadjoint action);
//! * [`field`] — the standard two-pole field with analytic derivatives, plus a
//!   generalized-field interface defined by an equatorial profile `f(v, z)`;
//! * [`dynamics`] — Hamiltonian, equations of motion, toral momentum map and a
//!   conservative RK4 flow with drift diagnostics;
//! * [`releq`] — construction and verification of the regular (`r > 0`) and
//!   singular (`r = 0`) relative-equilibrium branches;
//! * [`stability`] — the 12×12 augmented Hessian, stability-space restriction,
//!   signature via symmetric pivots, and the closed-form stability conditions;
//! * [`linearization`] — the linearized Hamiltonian vector field, its projection
//!   onto the stability space, closed-form projected matrices, eigenvalues and
//!   the spectral-instability classifier;
//! * [`scenario`] — JSON scenario files in, deterministic CSV/plot-scripts out.

pub mod dynamics;
pub mod error;
pub mod field;
pub mod linearization;
pub mod releq;
pub mod scenario;
pub mod se3;
pub mod stability;
pub mod tol;

pub use error::Error;
pub use se3::{Mat3, Vec3};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
