//! Centralized numerical tolerances.
//!
//! Every threshold used by the library lives here so that no operation carries
//! its own magic number.

/// Orthonormality defect allowed for a stored rotation matrix.
pub const ROTATION_ORTHO: f64 = 1e-12;

/// Antisymmetry defect allowed by `vee` before rejecting the input.
pub const VEE_ANTISYM: f64 = 1e-10;

/// Orthonormality drift beyond which a rotation is repaired by polar projection.
pub const DRIFT_REPAIR: f64 = 1e-10;

/// Pole guard: field evaluation rejected within `POLE_GUARD * h` of a pole.
pub const POLE_GUARD: f64 = 1e-9;

/// Relative step used by finite-difference fallbacks inside field models.
pub const FIELD_FD_STEP: f64 = 1e-5;

/// Scaled residual below which a phase point counts as a relative equilibrium.
pub const RELEQ_RESIDUAL: f64 = 1e-9;

/// Scaled criticality residual above which linearization refuses to proceed.
pub const CRITICALITY: f64 = 1e-6;

/// Zero-pivot threshold for signature computations, relative to max|Q|.
pub const ZERO_PIVOT_REL: f64 = 1e-12;

/// Spectral classification: an eigenvalue real part is "nontrivial" above
/// `SPECTRAL_RE_REL * spectral_radius`, with an absolute floor.
pub const SPECTRAL_RE_REL: f64 = 1e-8;

/// Absolute floor for the spectral classification threshold (1/s).
pub const SPECTRAL_RE_FLOOR: f64 = 1e-12;

/// Relative tolerance for treating an eigenvalue as zero when flagging a
/// marginal spectrum.
pub const SPECTRAL_MARGINAL_REL: f64 = 1e-8;

/// Deviation of `A e3` from `e3` below which the closed-form `Hess(B_z)` path
/// is valid for the Hessian's (dx, dx) block.
pub const AXIS_ALIGNED: f64 = 1e-10;

/// Iteration cap for the dense nonsymmetric eigensolver.
pub const EIGEN_MAX_ITER: usize = 10_000;
