//! Magnetic field models.
//!
//! Both models satisfy the two structural properties the analysis relies on:
//! equivariance under rotations about OZ, `B(R_θ x) = R_θ B(x)`, and mirror
//! behavior `B_{x,y}(x,y,-z) = -B_{x,y}(x,y,z)`, `B_z(x,y,-z) = B_z(x,y,z)`.
//! Under these, `B_z(x,y,z) = f(x²+y², z)` for a smooth profile `f`, and on
//! the equatorial plane `B = f(v,0) e₃` with `DB` and `Hess(B_z)` expressible
//! through `f` and its derivatives alone. The stability pipeline only ever
//! evaluates there; dynamics needs the full `B`.
//!
//! * [`StandardField`] — two opposite magnetic poles at `(0,0,±h)`, analytic
//!   everywhere.
//! * [`GeneralizedField`] — profile evaluators (finite-difference fallback for
//!   missing derivatives), optionally a full `B` for dynamics.
//! * [`ProfileField`] — profile constants frozen at one radius.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::se3::{rot_z, Mat3, Vec3};
use crate::tol;
use crate::{Error, Result};

/// Vacuum permeability, N·A⁻².
pub const VACUUM_PERMEABILITY: f64 = 4.0e-7 * std::f64::consts::PI;

/// Equatorial profile data of `B_z(x,y,z) = f(x²+y², z)` at one radius:
/// `f0 = f(r², 0)`, `f1p = ∂f/∂v`, `f1pp = ∂²f/∂v²`, `f2pp = ∂²f/∂z²`,
/// all evaluated at `(r², 0)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EquatorialProfile {
    pub f0: f64,
    pub f1p: f64,
    pub f1pp: f64,
    pub f2pp: f64,
}

/// `B` at an equatorial point from the profile: `f0 e₃`.
pub fn equatorial_b(p: &EquatorialProfile) -> Vec3 {
    Vec3::new(0.0, 0.0, p.f0)
}

/// `DB` at the equatorial point `(x, y, 0)` with `x² + y²` matching the
/// profile radius. Mirror symmetry kills every entry except the z-row/column,
/// which carry `∂B_z/∂x = 2x f′₁` and the curl-free transposed pair.
pub fn equatorial_db(p: &EquatorialProfile, x: &Vec3) -> Mat3 {
    let g = 2.0 * p.f1p;
    Mat3::new(
        0.0,
        0.0,
        g * x.x,
        0.0,
        0.0,
        g * x.y,
        g * x.x,
        g * x.y,
        0.0,
    )
}

/// `Hess(B_z)` at the equatorial point `(x, y, 0)` matching the profile radius.
pub fn equatorial_hess_bz(p: &EquatorialProfile, x: &Vec3) -> Mat3 {
    Mat3::new(
        2.0 * p.f1p + 4.0 * x.x * x.x * p.f1pp,
        4.0 * x.x * x.y * p.f1pp,
        0.0,
        4.0 * x.x * x.y * p.f1pp,
        2.0 * p.f1p + 4.0 * x.y * x.y * p.f1pp,
        0.0,
        0.0,
        0.0,
        p.f2pp,
    )
}

/// Field created by two opposite magnetic poles `±q` at `(0, 0, ±h)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StandardField {
    /// Pole strength, A·m.
    pub q: f64,
    /// Half pole separation, m. Must be positive.
    pub h: f64,
    /// Vacuum permeability, N·A⁻².
    pub mu0: f64,
}

impl StandardField {
    pub fn new(q: f64, h: f64, mu0: f64) -> Self {
        StandardField { q, h, mu0 }
    }

    /// `k = μ₀ q / 4π`.
    pub fn k(&self) -> f64 {
        self.mu0 * self.q / (4.0 * std::f64::consts::PI)
    }

    fn guard(&self, x: &Vec3) -> Result<(Vec3, Vec3, f64, f64)> {
        let dp = Vec3::new(x.x, x.y, x.z - self.h);
        let dm = Vec3::new(x.x, x.y, x.z + self.h);
        let guard = tol::POLE_GUARD * self.h;
        let (np, nm) = (dp.norm(), dm.norm());
        if np <= guard || nm <= guard {
            return Err(Error::PoleSingularity {
                distance: np.min(nm),
                guard,
            });
        }
        Ok((dp, dm, np * np, nm * nm))
    }

    /// Field strength `B(x)`.
    pub fn b(&self, x: &Vec3) -> Result<Vec3> {
        let (dp, dm, d2p, d2m) = self.guard(x)?;
        let k = self.k();
        Ok(k * (dp / d2p.powf(1.5) - dm / d2m.powf(1.5)))
    }

    /// Analytic Jacobian `DB(x)`; symmetric and trace-free away from the poles.
    pub fn db(&self, x: &Vec3) -> Result<Mat3> {
        let (dp, dm, d2p, d2m) = self.guard(x)?;
        let k = self.k();
        let term = |d: &Vec3, d2: f64| -> Mat3 {
            (d2 * Mat3::identity() - 3.0 * d * d.transpose()) / d2.powf(2.5)
        };
        Ok(k * (term(&dp, d2p) - term(&dm, d2m)))
    }

    /// Analytic Hessian of the axial component `B_z`.
    pub fn hess_bz(&self, x: &Vec3) -> Result<Mat3> {
        let (dp, dm, d2p, d2m) = self.guard(x)?;
        let k = self.k();
        let e3 = Vec3::new(0.0, 0.0, 1.0);
        let term = |d: &Vec3, d2: f64| -> Mat3 {
            let sym = e3 * d.transpose() + d * e3.transpose() + d.z * Mat3::identity();
            -3.0 * sym / d2.powf(2.5) + 15.0 * d.z * (d * d.transpose()) / d2.powf(3.5)
        };
        Ok(k * (term(&dp, d2p) - term(&dm, d2m)))
    }

    /// Equatorial profile value `f(v, z)` with `v = x² + y²`.
    pub fn f(&self, v: f64, z: f64) -> f64 {
        let k = self.k();
        let up = v + (z - self.h) * (z - self.h);
        let um = v + (z + self.h) * (z + self.h);
        k * ((z - self.h) / up.powf(1.5) - (z + self.h) / um.powf(1.5))
    }

    /// Analytic equatorial profile and derivatives at radius `r ≥ 0`.
    pub fn profile(&self, r: f64) -> EquatorialProfile {
        let (k, h) = (self.k(), self.h);
        let d = r * r + h * h;
        EquatorialProfile {
            f0: -2.0 * k * h / d.powf(1.5),
            f1p: 3.0 * k * h / d.powf(2.5),
            f1pp: -7.5 * k * h / d.powf(3.5),
            f2pp: 6.0 * k * h * (3.0 * d - 5.0 * h * h) / d.powf(3.5),
        }
    }
}

type Profile1 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type FullB = Arc<dyn Fn(&Vec3) -> Option<Vec3> + Send + Sync>;

/// A generalized field described by its equatorial profile `f(v, z)`, with an
/// optional full `B` evaluator for dynamics.
///
/// Missing profile derivatives fall back to Richardson-extrapolated central
/// differences of `f`; the stability formulas are only as accurate as `f''`
/// here, so analytic derivative closures are preferred when available.
#[derive(Clone)]
pub struct GeneralizedField {
    f: Profile1,
    df_dv: Option<Profile1>,
    d2f_dv2: Option<Profile1>,
    d2f_dz2: Option<Profile1>,
    full_b: Option<FullB>,
    length_scale: f64,
}

impl std::fmt::Debug for GeneralizedField {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("GeneralizedField")
            .field("length_scale", &self.length_scale)
            .field("has_full_b", &self.full_b.is_some())
            .finish()
    }
}

impl GeneralizedField {
    /// Build from the profile alone. `length_scale` (m) sets finite-difference
    /// steps and must reflect the scale on which `f` varies.
    pub fn from_profile_fn<F>(f: F, length_scale: f64) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        GeneralizedField {
            f: Arc::new(f),
            df_dv: None,
            d2f_dv2: None,
            d2f_dz2: None,
            full_b: None,
            length_scale,
        }
    }

    pub fn with_dv<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.df_dv = Some(Arc::new(f));
        self
    }

    pub fn with_dv2<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.d2f_dv2 = Some(Arc::new(f));
        self
    }

    pub fn with_dz2<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.d2f_dz2 = Some(Arc::new(f));
        self
    }

    /// Attach a full `B(x)` evaluator; return `None` where the field is
    /// undefined (e.g. at a source).
    pub fn with_full_b<F: Fn(&Vec3) -> Option<Vec3> + Send + Sync + 'static>(
        mut self,
        b: F,
    ) -> Self {
        self.full_b = Some(Arc::new(b));
        self
    }

    pub fn has_full_b(&self) -> bool {
        self.full_b.is_some()
    }

    fn equatorial(&self, x: &Vec3) -> bool {
        x.z.abs() <= 1e-12 * self.length_scale
    }

    pub fn b(&self, x: &Vec3) -> Result<Vec3> {
        if let Some(b) = &self.full_b {
            return b(x).ok_or_else(|| Error::FieldUnavailable("B undefined at point".into()));
        }
        if self.equatorial(x) {
            return Ok(equatorial_b(&self.profile(x.xy().norm())));
        }
        Err(Error::FieldUnavailable(
            "generalized field has no full B evaluator; only equatorial points available".into(),
        ))
    }

    /// Jacobian: exact profile formula on the equatorial plane, Richardson
    /// differences of the full `B` elsewhere.
    pub fn db(&self, x: &Vec3) -> Result<Mat3> {
        if self.equatorial(x) {
            return Ok(equatorial_db(&self.profile(x.xy().norm()), x));
        }
        let b = self
            .full_b
            .as_ref()
            .ok_or_else(|| Error::FieldUnavailable("generalized field has no full B".into()))?;
        let s = tol::FIELD_FD_STEP * self.length_scale;
        let mut m = Mat3::zeros();
        for j in 0..3 {
            let mut ej = Vec3::zeros();
            ej[j] = 1.0;
            let col = richardson_vec(
                |t| b(&(x + t * ej)).unwrap_or_else(|| Vec3::from_element(f64::NAN)),
                s,
            );
            m.set_column(j, &col);
        }
        Ok(m)
    }

    /// `Hess(B_z)`: exact profile formula on the equatorial plane, nested
    /// differences of the full `B` elsewhere.
    pub fn hess_bz(&self, x: &Vec3) -> Result<Mat3> {
        if self.equatorial(x) {
            return Ok(equatorial_hess_bz(&self.profile(x.xy().norm()), x));
        }
        let b = self
            .full_b
            .as_ref()
            .ok_or_else(|| Error::FieldUnavailable("generalized field has no full B".into()))?;
        let s = 32.0 * tol::FIELD_FD_STEP * self.length_scale;
        let bz = |p: &Vec3| b(p).map(|v| v.z).unwrap_or(f64::NAN);
        let mut m = Mat3::zeros();
        for i in 0..3 {
            for j in 0..=i {
                let (mut ei, mut ej) = (Vec3::zeros(), Vec3::zeros());
                ei[i] = s;
                ej[j] = s;
                m[(i, j)] = if i == j {
                    (bz(&(x + ei)) - 2.0 * bz(x) + bz(&(x - ei))) / (s * s)
                } else {
                    (bz(&(x + ei + ej)) - bz(&(x + ei - ej)) - bz(&(x - ei + ej))
                        + bz(&(x - ei - ej)))
                        / (4.0 * s * s)
                };
                m[(j, i)] = m[(i, j)];
            }
        }
        Ok(m)
    }

    pub fn profile(&self, r: f64) -> EquatorialProfile {
        let v = r * r;
        let vstep = tol::FIELD_FD_STEP * (self.length_scale * self.length_scale + v);
        let zstep = tol::FIELD_FD_STEP * self.length_scale;
        let f = &self.f;
        let f1p = match &self.df_dv {
            Some(d) => d(v, 0.0),
            None => richardson(|t| f(v + t, 0.0), vstep),
        };
        let f1pp = match &self.d2f_dv2 {
            Some(d) => d(v, 0.0),
            None => match &self.df_dv {
                Some(d1) => richardson(|t| d1(v + t, 0.0), vstep),
                None => richardson2(|t| f(v + t, 0.0), 16.0 * vstep),
            },
        };
        let f2pp = match &self.d2f_dz2 {
            Some(d) => d(v, 0.0),
            None => richardson2(|t| f(v, t), 16.0 * zstep),
        };
        EquatorialProfile {
            f0: f(v, 0.0),
            f1p,
            f1pp,
            f2pp,
        }
    }
}

/// Profile constants frozen at one radius. Serves `B`, `DB`, `Hess(B_z)` on
/// the equatorial circle it was defined at (any phase, by equivariance),
/// which is exactly what the stability pipeline evaluates.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProfileField {
    pub r0: f64,
    pub profile: EquatorialProfile,
}

impl ProfileField {
    pub fn new(r0: f64, profile: EquatorialProfile) -> Self {
        ProfileField { r0, profile }
    }

    fn scale(&self) -> f64 {
        if self.r0 > 0.0 {
            self.r0
        } else {
            1.0
        }
    }

    fn check_on_circle(&self, x: &Vec3) -> Result<()> {
        let tol = 1e-9 * self.scale();
        let r = x.xy().norm();
        if x.z.abs() > tol || (r - self.r0).abs() > tol {
            return Err(Error::FieldUnavailable(format!(
                "profile field is only defined on the equatorial circle r = {} (asked at r = {r}, z = {})",
                self.r0, x.z
            )));
        }
        Ok(())
    }

    pub fn b(&self, x: &Vec3) -> Result<Vec3> {
        self.check_on_circle(x)?;
        Ok(equatorial_b(&self.profile))
    }

    pub fn db(&self, x: &Vec3) -> Result<Mat3> {
        self.check_on_circle(x)?;
        Ok(equatorial_db(&self.profile, x))
    }

    pub fn hess_bz(&self, x: &Vec3) -> Result<Mat3> {
        self.check_on_circle(x)?;
        Ok(equatorial_hess_bz(&self.profile, x))
    }

    pub fn profile_at(&self, r: f64) -> Result<EquatorialProfile> {
        if (r - self.r0).abs() > 1e-9 * self.scale() {
            return Err(Error::FieldUnavailable(format!(
                "profile field holds data at r = {}, asked at r = {r}",
                self.r0
            )));
        }
        Ok(self.profile)
    }
}

/// Any field model the pipeline can consume.
#[derive(Debug, Clone)]
pub enum Field {
    Standard(StandardField),
    Generalized(GeneralizedField),
    Profile(ProfileField),
}

impl Field {
    pub fn b(&self, x: &Vec3) -> Result<Vec3> {
        match self {
            Field::Standard(f) => f.b(x),
            Field::Generalized(f) => f.b(x),
            Field::Profile(f) => f.b(x),
        }
    }

    pub fn db(&self, x: &Vec3) -> Result<Mat3> {
        match self {
            Field::Standard(f) => f.db(x),
            Field::Generalized(f) => f.db(x),
            Field::Profile(f) => f.db(x),
        }
    }

    pub fn hess_bz(&self, x: &Vec3) -> Result<Mat3> {
        match self {
            Field::Standard(f) => f.hess_bz(x),
            Field::Generalized(f) => f.hess_bz(x),
            Field::Profile(f) => f.hess_bz(x),
        }
    }

    pub fn profile(&self, r: f64) -> Result<EquatorialProfile> {
        match self {
            Field::Standard(f) => Ok(f.profile(r)),
            Field::Generalized(f) => Ok(f.profile(r)),
            Field::Profile(f) => f.profile_at(r),
        }
    }

    /// Characteristic length used by finite-difference probes.
    pub fn length_scale(&self) -> f64 {
        match self {
            Field::Standard(f) => f.h,
            Field::Generalized(f) => f.length_scale,
            Field::Profile(f) => f.scale(),
        }
    }

    pub fn is_standard(&self) -> bool {
        matches!(self, Field::Standard(_))
    }
}

/// Superposition of two standard two-pole fields: a genuinely non-standard
/// field that still has the required symmetries and closed-form derivatives.
pub fn superposed_poles(a: StandardField, b: StandardField) -> GeneralizedField {
    let scale = a.h.max(b.h);
    GeneralizedField::from_profile_fn(move |v, z| a.f(v, z) + b.f(v, z), scale)
        .with_dv(move |v, _| {
            let d = |f: &StandardField| 3.0 * f.k() * f.h / (v + f.h * f.h).powf(2.5);
            d(&a) + d(&b)
        })
        .with_dv2(move |v, _| {
            let d = |f: &StandardField| -7.5 * f.k() * f.h / (v + f.h * f.h).powf(3.5);
            d(&a) + d(&b)
        })
        .with_dz2(move |v, _| {
            let d = |f: &StandardField| {
                let u = v + f.h * f.h;
                6.0 * f.k() * f.h * (3.0 * u - 5.0 * f.h * f.h) / u.powf(3.5)
            };
            d(&a) + d(&b)
        })
        .with_full_b(move |x| match (a.b(x), b.b(x)) {
            (Ok(ba), Ok(bb)) => Some(ba + bb),
            _ => None,
        })
}

/// Result of sampling the symmetry properties of a field.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SymmetryReport {
    /// max over samples of |B(R_θ x) - R_θ B(x)|
    pub equivariance: f64,
    /// max violation of the mirror relations
    pub mirror: f64,
    /// max |DB - DBᵀ| (curl B) over samples
    pub curl: f64,
    pub samples: usize,
}

/// Sample the rotation-equivariance, mirror, and curl-free properties of a
/// field with a full `B` evaluator. Sampling is deterministic in `seed`.
pub fn check_symmetries(field: &Field, samples: usize, seed: u64) -> Result<SymmetryReport> {
    let scale = field.length_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SymmetryReport {
        equivariance: 0.0,
        mirror: 0.0,
        curl: 0.0,
        samples,
    };
    let mut taken = 0;
    let mut attempts = 0;
    while taken < samples {
        attempts += 1;
        if attempts > 100 * samples {
            break;
        }
        let x = Vec3::new(
            rng.random_range(-3.0..3.0) * scale,
            rng.random_range(-3.0..3.0) * scale,
            rng.random_range(-3.0..3.0) * scale,
        );
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let (bx, bmx) = match (field.b(&x), field.b(&Vec3::new(x.x, x.y, -x.z))) {
            (Ok(v), Ok(w)) => (v, w),
            _ => continue, // undefined sample (pole proximity); redraw
        };
        let r = rot_z(theta);
        if let Ok(brx) = field.b(&(r * x)) {
            report.equivariance = report.equivariance.max((brx - r * bx).norm());
        }
        let mirror = Vec3::new(bmx.x + bx.x, bmx.y + bx.y, bmx.z - bx.z);
        report.mirror = report.mirror.max(mirror.amax());
        if let Ok(db) = field.db(&x) {
            report.curl = report.curl.max((db - db.transpose()).norm());
        }
        taken += 1;
    }
    report.samples = taken;
    Ok(report)
}

/// Richardson-extrapolated central first derivative of a scalar function.
fn richardson(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |s: f64| (f(s) - f(-s)) / (2.0 * s);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Richardson-extrapolated central second derivative.
fn richardson2(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let f0 = f(0.0);
    let d = |s: f64| (f(s) - 2.0 * f0 + f(-s)) / (s * s);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Richardson-extrapolated central first derivative of a vector function.
fn richardson_vec(f: impl Fn(f64) -> Vec3, h: f64) -> Vec3 {
    let d = |s: f64| (f(s) - f(-s)) / (2.0 * s);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig3_field() -> StandardField {
        StandardField::new(17.58, 0.05, VACUUM_PERMEABILITY)
    }

    #[test]
    fn b_at_origin() {
        let f = fig3_field();
        let b = f.b(&Vec3::zeros()).unwrap();
        let expected = -f.mu0 * f.q / (2.0 * std::f64::consts::PI * f.h * f.h);
        assert_relative_eq!(b.z, expected, max_relative = 1e-14);
        assert_eq!(b.x, 0.0);
        assert_eq!(b.y, 0.0);
    }

    #[test]
    fn b_equatorial_closed_form() {
        let f = fig3_field();
        let r = 0.07;
        let b = f.b(&Vec3::new(r, 0.0, 0.0)).unwrap();
        let d = r * r + f.h * f.h;
        let expected = -f.mu0 * f.q * f.h / (2.0 * std::f64::consts::PI * d.powf(1.5));
        assert_relative_eq!(b.z, expected, max_relative = 1e-14);
        assert!(b.x.abs() < 1e-18 && b.y.abs() < 1e-18);
    }

    #[test]
    fn b_is_equivariant() {
        let f = fig3_field();
        let x = Vec3::new(0.03, -0.02, 0.04);
        let r = rot_z(1.234);
        let lhs = f.b(&(r * x)).unwrap();
        let rhs = r * f.b(&x).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
    }

    #[test]
    fn pole_singularity_guard() {
        let f = fig3_field();
        let near_pole = Vec3::new(0.0, 0.0, f.h + 1e-12 * f.h);
        assert!(matches!(
            f.b(&near_pole),
            Err(Error::PoleSingularity { .. })
        ));
    }

    #[test]
    fn db_divergence_and_curl_free() {
        let f = fig3_field();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 100 {
            let x = Vec3::new(
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
            );
            let db = match f.db(&x) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let scale = db.norm().max(1e-30);
            assert!(db.trace().abs() / scale < 1e-12, "div B != 0 at {x:?}");
            assert!((db - db.transpose()).norm() / scale < 1e-12);
            checked += 1;
        }
    }

    #[test]
    fn db_equatorial_structure() {
        let f = fig3_field();
        let (x, y) = (0.04, -0.03);
        let db = f.db(&Vec3::new(x, y, 0.0)).unwrap();
        let d = x * x + y * y + f.h * f.h;
        let g = 6.0 * f.k() * f.h / d.powf(2.5);
        assert_relative_eq!(db[(0, 2)], g * x, max_relative = 1e-13);
        assert_relative_eq!(db[(1, 2)], g * y, max_relative = 1e-13);
        assert_relative_eq!(db[(2, 0)], g * x, max_relative = 1e-13);
        assert_relative_eq!(db[(2, 1)], g * y, max_relative = 1e-13);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)] {
            assert!(db[(i, j)].abs() < 1e-16);
        }
    }

    #[test]
    fn hess_bz_equatorial_closed_form() {
        let f = fig3_field();
        let r = 0.06;
        let hess = f.hess_bz(&Vec3::new(r, 0.0, 0.0)).unwrap();
        let d = r * r + f.h * f.h;
        let g = 6.0 * f.k() * f.h / d.powf(3.5);
        let expected = Mat3::from_diagonal(&Vec3::new(
            g * (d - 5.0 * r * r),
            g * d,
            g * (3.0 * d - 5.0 * f.h * f.h),
        ));
        assert_relative_eq!(hess, expected, max_relative = 1e-12);
    }

    #[test]
    fn hess_bz_at_origin_diagonal() {
        // Field-only Hessian at the origin: (3 mu0 q / 2 pi h^4) diag(1, 1, -2).
        let f = fig3_field();
        let hess = f.hess_bz(&Vec3::zeros()).unwrap();
        let c = 3.0 * f.mu0 * f.q / (2.0 * std::f64::consts::PI * f.h.powi(4));
        assert_relative_eq!(
            hess,
            Mat3::from_diagonal(&Vec3::new(c, c, -2.0 * c)),
            max_relative = 1e-13
        );
    }

    #[test]
    fn profile_matches_field_values() {
        let f = fig3_field();
        let r = 0.08;
        let p = f.profile(r);
        assert_relative_eq!(
            p.f0,
            f.b(&Vec3::new(r, 0.0, 0.0)).unwrap().z,
            max_relative = 1e-14
        );
        let p0 = f.profile(0.0);
        assert_relative_eq!(
            p0.f0,
            -f.mu0 * f.q / (2.0 * std::f64::consts::PI * f.h * f.h),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            p.f1p,
            3.0 * f.mu0 * f.q * f.h
                / (4.0 * std::f64::consts::PI * (r * r + f.h * f.h).powf(2.5)),
            max_relative = 1e-14
        );
    }

    #[test]
    fn profile_derivatives_match_finite_differences() {
        let f = fig3_field();
        for r in [0.0, 0.03, 0.06, 0.11] {
            let p = f.profile(r);
            let v = r * r;
            let vstep = 1e-5 * (f.h * f.h + v);
            let fd_f1p = richardson(|t| f.f(v + t, 0.0), vstep);
            let fd_f1pp = richardson2(|t| f.f(v + t, 0.0), 30.0 * vstep);
            let fd_f2pp = richardson2(|t| f.f(v, t), 30.0 * 1e-5 * f.h);
            assert_relative_eq!(p.f1p, fd_f1p, max_relative = 1e-8);
            assert_relative_eq!(p.f1pp, fd_f1pp, max_relative = 1e-6);
            assert_relative_eq!(p.f2pp, fd_f2pp, max_relative = 1e-6);
        }
    }

    #[test]
    fn hess_bz_matches_second_differences_of_bz() {
        let f = fig3_field();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 20 {
            let x = Vec3::new(
                rng.random_range(-0.15..0.15),
                rng.random_range(-0.15..0.15),
                rng.random_range(-0.15..0.15),
            );
            if x.norm() < 0.02 || f.b(&x).is_err() {
                continue;
            }
            let hess = f.hess_bz(&x).unwrap();
            let s = 1e-5 * f.h * 30.0;
            let bz = |p: Vec3| f.b(&p).map(|b| b.z).unwrap_or(f64::NAN);
            let mut fd = Mat3::zeros();
            for i in 0..3 {
                for j in 0..3 {
                    let (mut ei, mut ej) = (Vec3::zeros(), Vec3::zeros());
                    ei[i] = s;
                    ej[j] = s;
                    fd[(i, j)] = if i == j {
                        (bz(x + ei) - 2.0 * bz(x) + bz(x - ei)) / (s * s)
                    } else {
                        (bz(x + ei + ej) - bz(x + ei - ej) - bz(x - ei + ej) + bz(x - ei - ej))
                            / (4.0 * s * s)
                    };
                }
            }
            let scale = hess.norm();
            assert!(
                (hess - fd).norm() / scale < 1e-5,
                "hess mismatch at {x:?}: {:.3e}",
                (hess - fd).norm() / scale
            );
            checked += 1;
        }
    }

    #[test]
    fn db_matches_finite_differences_of_b() {
        let f = fig3_field();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut checked = 0;
        while checked < 100 {
            let x = Vec3::new(
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
            );
            if x.norm() < 0.01 || f.b(&x).is_err() {
                continue;
            }
            let db = f.db(&x).unwrap();
            let s = 1e-6 * f.h;
            let mut fd = Mat3::zeros();
            for j in 0..3 {
                let mut ej = Vec3::zeros();
                ej[j] = s;
                let col = (f.b(&(x + ej)).unwrap() - f.b(&(x - ej)).unwrap()) / (2.0 * s);
                fd.set_column(j, &col);
            }
            assert!((db - fd).norm() / db.norm() < 1e-6);
            checked += 1;
        }
    }

    #[test]
    fn equatorial_b_has_no_transverse_component() {
        let f = fig3_field();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let x = Vec3::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2), 0.0);
            let b = f.b(&x).unwrap();
            assert!(b.x.abs() < 1e-14 && b.y.abs() < 1e-14);
        }
    }

    #[test]
    fn symmetry_check_standard_field() {
        let field = Field::Standard(fig3_field());
        let rep = check_symmetries(&field, 1000, 42).unwrap();
        assert!(rep.equivariance < 1e-10, "{rep:?}");
        assert!(rep.mirror < 1e-10, "{rep:?}");
        assert!(rep.curl < 1e-10, "{rep:?}");
    }

    #[test]
    fn symmetry_check_flags_broken_field() {
        let base = fig3_field();
        let broken = GeneralizedField::from_profile_fn(move |v, z| base.f(v, z), base.h)
            .with_full_b(move |x| base.b(x).ok().map(|b| b + Vec3::new(1e-3, 0.0, 0.0)));
        let rep = check_symmetries(&Field::Generalized(broken), 200, 1).unwrap();
        assert!(rep.mirror > 1e-4, "{rep:?}");
    }

    #[test]
    fn symmetry_check_zero_field() {
        let zero =
            GeneralizedField::from_profile_fn(|_, _| 0.0, 1.0).with_full_b(|_| Some(Vec3::zeros()));
        let rep = check_symmetries(&Field::Generalized(zero), 100, 3).unwrap();
        assert_eq!(rep.equivariance, 0.0);
        assert_eq!(rep.mirror, 0.0);
        assert_eq!(rep.curl, 0.0);
    }

    #[test]
    fn generalized_fd_profile_matches_standard() {
        let f = fig3_field();
        let gen = GeneralizedField::from_profile_fn(move |v, z| f.f(v, z), f.h);
        for r in [0.0, 0.04, 0.09] {
            let pa = f.profile(r);
            let pg = gen.profile(r);
            assert_relative_eq!(pa.f0, pg.f0, max_relative = 1e-13);
            assert_relative_eq!(pa.f1p, pg.f1p, max_relative = 1e-8);
            assert_relative_eq!(pa.f1pp, pg.f1pp, max_relative = 1e-5);
            assert_relative_eq!(pa.f2pp, pg.f2pp, max_relative = 1e-5);
        }
    }

    #[test]
    fn profile_field_serves_equatorial_data() {
        let f = fig3_field();
        let r = 0.06;
        let pf = ProfileField::new(r, f.profile(r));
        let x = Vec3::new(r, 0.0, 0.0);
        assert_relative_eq!(pf.b(&x).unwrap(), f.b(&x).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(pf.db(&x).unwrap(), f.db(&x).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(
            pf.hess_bz(&x).unwrap(),
            f.hess_bz(&x).unwrap(),
            max_relative = 1e-12
        );
        // A rotated point on the same circle works too (equivariance).
        let rx = rot_z(0.7) * x;
        assert_relative_eq!(pf.db(&rx).unwrap(), f.db(&rx).unwrap(), max_relative = 1e-12);
        assert!(pf.b(&Vec3::new(0.01, 0.0, 0.0)).is_err());
    }

    #[test]
    fn generalized_equatorial_matches_standard_analytics() {
        let f = fig3_field();
        let gen = Field::Generalized(superposed_poles(
            f,
            StandardField::new(0.0, 0.08, VACUUM_PERMEABILITY),
        ));
        let x = Vec3::new(0.05, -0.03, 0.0);
        assert_relative_eq!(gen.b(&x).unwrap(), f.b(&x).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(gen.db(&x).unwrap(), f.db(&x).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(
            gen.hess_bz(&x).unwrap(),
            f.hess_bz(&x).unwrap(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn superposed_field_keeps_symmetries() {
        let g = superposed_poles(
            StandardField::new(17.58, 0.05, VACUUM_PERMEABILITY),
            StandardField::new(-6.0, 0.11, VACUUM_PERMEABILITY),
        );
        let rep = check_symmetries(&Field::Generalized(g), 300, 5).unwrap();
        assert!(rep.equivariance < 1e-12);
        assert!(rep.mirror < 1e-12);
    }
}
