//! Linearized Hamiltonian vector fields at the relative equilibria and the
//! spectral-instability classifier.
//!
//! At an equilibrium of the augmented Hamiltonian the linearization on
//! `se(3) × se(3)*` is assembled from the 12×12 Hessian `G` by
//!
//! ```text
//! X' = [  G_Π ; G_p ; −G_A + hat(Π₀) G_Π + hat(p₀) G_p ; −G_x + hat(p₀) G_Π ]
//! ```
//!
//! (row blocks of `G` indexed by the `(δA, δx, δΠ, δp)` splitting). The
//! projected field on a stability space `W` is `X_Q = P_W X' i_W`, with `P_W`
//! the projection along the symplectic orthogonal `W^ω`; both are built from
//! the body-coordinates symplectic form, never transcribed. Eigenvalues of
//! `X_Q` with a nontrivial real part certify nonlinear instability.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::dynamics::{BodyParams, VelocityPair};
use crate::field::{EquatorialProfile, Field, StandardField};
use crate::releq::{scaled_residual_norm, BranchKind, FieldKind, RelEqBranch};
use crate::se3::{hat, BodyMomentum, Mat3, PhasePoint, Vec3};
use crate::stability::{augmented_hessian, restrict, stability_space_for, StabilitySpace};
use crate::tol;
use crate::{Error, Result};

/// Matrix of the body-coordinates symplectic form at momentum `(Π₀, p₀)`,
/// acting on `(δA, δx, δΠ, δp)` vectors: `ω(v, w) = vᵀ Ω w`.
pub fn symplectic_matrix(m0: &BodyMomentum) -> DMatrix<f64> {
    let mut omega = DMatrix::<f64>::zeros(12, 12);
    let set = |m: &mut DMatrix<f64>, bi: usize, bj: usize, v: &Mat3| {
        for i in 0..3 {
            for j in 0..3 {
                m[(3 * bi + i, 3 * bj + j)] = v[(i, j)];
            }
        }
    };
    let id = Mat3::identity();
    set(&mut omega, 0, 0, &(-hat(&m0.pi)));
    set(&mut omega, 0, 1, &(-hat(&m0.p)));
    set(&mut omega, 0, 2, &id);
    set(&mut omega, 1, 0, &(-hat(&m0.p)));
    set(&mut omega, 1, 3, &id);
    set(&mut omega, 2, 0, &(-id));
    set(&mut omega, 3, 1, &(-id));
    omega
}

fn hat_times_rows(h: &Mat3, rows: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::<f64>::zeros(3, rows.ncols());
    for j in 0..rows.ncols() {
        let col = Vec3::new(rows[(0, j)], rows[(1, j)], rows[(2, j)]);
        let v = h * col;
        for i in 0..3 {
            out[(i, j)] = v[i];
        }
    }
    out
}

/// Full 12×12 linearization of the augmented-Hamiltonian vector field at a
/// relative equilibrium, in the left-translated frame at the identity.
///
/// Fails with [`Error::NotCritical`] when `(z0, ξ)` does not satisfy the
/// relative-equilibrium equations to within [`tol::CRITICALITY`].
pub fn full_linearization(
    body: &BodyParams,
    field: &Field,
    z0: &PhasePoint,
    xi: &VelocityPair,
) -> Result<DMatrix<f64>> {
    let residual = scaled_residual_norm(body, field, z0, xi)?;
    if residual > tol::CRITICALITY {
        return Err(Error::NotCritical { residual });
    }
    let g = augmented_hessian(body, field, z0, xi)?;
    Ok(linearization_from_hessian(&g, &z0.m))
}

/// Assemble the linearization from an augmented Hessian and the equilibrium
/// momenta; exposed separately so oracles can feed alternative Hessians.
pub fn linearization_from_hessian(g: &DMatrix<f64>, m0: &BodyMomentum) -> DMatrix<f64> {
    let g_a = g.rows(0, 3).into_owned();
    let g_x = g.rows(3, 3).into_owned();
    let g_pi = g.rows(6, 3).into_owned();
    let g_p = g.rows(9, 3).into_owned();

    let mut x = DMatrix::<f64>::zeros(12, 12);
    x.rows_mut(0, 3).copy_from(&g_pi);
    x.rows_mut(3, 3).copy_from(&g_p);
    let row3 = -&g_a + hat_times_rows(&hat(&m0.pi), &g_pi) + hat_times_rows(&hat(&m0.p), &g_p);
    let row4 = -&g_x + hat_times_rows(&hat(&m0.p), &g_pi);
    x.rows_mut(6, 3).copy_from(&row3);
    x.rows_mut(9, 3).copy_from(&row4);
    x
}

/// Project the full linearization onto a stability space along its symplectic
/// orthogonal: `X_Q = P_W X' i_W` with `P_W = U (UᵀΩU)⁻¹ UᵀΩ`.
pub fn project_xq(
    x_full: &DMatrix<f64>,
    w: &StabilitySpace,
    m0: &BodyMomentum,
) -> Result<DMatrix<f64>> {
    let u = w.as_matrix();
    let omega = symplectic_matrix(m0);
    let omega_w = u.transpose() * &omega * u;
    let det = omega_w.determinant();
    let inv = omega_w
        .try_inverse()
        .ok_or(Error::ComplementDegenerate { det })?;
    Ok(inv * u.transpose() * omega * x_full * u)
}

/// Closed-form 8×8 projected linearization, regular branch, standard field.
pub fn xq_regular_standard(
    body: &BodyParams,
    field: &StandardField,
    r: f64,
    xi: &VelocityPair,
) -> DMatrix<f64> {
    let x1 = xi.xi1;
    let m = body.mass;
    let i1 = body.i1;
    let pi0 = body.i3 * (xi.xi1 - xi.xi2);
    let (r2, h2) = (r * r, field.h * field.h);
    let d = r2 + h2;
    #[rustfmt::skip]
    let rows: [f64; 64] = [
        0.0, -x1 * r, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        x1 * (4.0 * h2 - r2) / (r * d), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, x1 - pi0 / i1, 0.0, 0.0, 0.0, -m * x1 * x1 * d / 3.0,
        0.0, 0.0, -x1 + pi0 / i1, 0.0, 0.0, -m * x1 * x1 * r, -m * x1 * x1 * d / 3.0, 0.0,
        0.0, 0.0, -m * x1 * r / i1, 0.0, 0.0, m * x1 * x1 * (2.0 * h2 - 3.0 * r2) / d, -2.0 * m * x1 * x1 * r, 0.0,
        0.0, 0.0, 0.0, 0.0, 1.0 / m, 0.0, 0.0, x1 * r,
        0.0, 0.0, 0.0, 1.0 / i1, 0.0, 0.0, 0.0, -x1,
        0.0, 0.0, 1.0 / i1, 0.0, 0.0, 0.0, x1, 0.0,
    ];
    DMatrix::from_row_slice(8, 8, &rows)
}

/// Closed-form 8×8 projected linearization, regular branch, generalized field.
pub fn xq_regular_generalized(
    body: &BodyParams,
    profile: &EquatorialProfile,
    r: f64,
    xi: &VelocityPair,
) -> DMatrix<f64> {
    let x1 = xi.xi1;
    let m = body.mass;
    let i1 = body.i1;
    let mu = body.mu;
    let pi0 = body.i3 * (xi.xi1 - xi.xi2);
    let (f0, f1p, f1pp, f2pp) = (profile.f0, profile.f1p, profile.f1pp, profile.f2pp);
    #[rustfmt::skip]
    let rows: [f64; 64] = [
        0.0, -x1 * r, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        -4.0 * mu * (2.0 * f1p + r * r * f1pp) / (m * r * x1), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, x1 - pi0 / i1, 0.0, 0.0, 0.0, -mu * f0,
        0.0, 0.0, -x1 + pi0 / i1, 0.0, 0.0, 2.0 * mu * r * f1p, -mu * f0, 0.0,
        0.0, 0.0, -m * x1 * r / i1, 0.0, 0.0, mu * f2pp, 4.0 * mu * r * f1p, 0.0,
        0.0, 0.0, 0.0, 0.0, 1.0 / m, 0.0, 0.0, x1 * r,
        0.0, 0.0, 0.0, 1.0 / i1, 0.0, 0.0, 0.0, -x1,
        0.0, 0.0, 1.0 / i1, 0.0, 0.0, 0.0, x1, 0.0,
    ];
    DMatrix::from_row_slice(8, 8, &rows)
}

/// Closed-form 10×10 projected linearization, singular branch, standard field.
pub fn xq_singular_standard(
    body: &BodyParams,
    field: &StandardField,
    xi: &VelocityPair,
) -> DMatrix<f64> {
    let pi = std::f64::consts::PI;
    let c4 = field.mu0 * body.mu * field.q / (pi * field.h.powi(4));
    let c2 = field.mu0 * body.mu * field.q / (pi * field.h * field.h);
    singular_xq_from_couplings(body, xi, -3.0 * c4, 1.5 * c4, 0.5 * c2)
}

/// Closed-form 10×10 projected linearization, singular branch, generalized
/// field (profile at `r = 0`).
pub fn xq_singular_generalized(
    body: &BodyParams,
    profile_at_0: &EquatorialProfile,
    xi: &VelocityPair,
) -> DMatrix<f64> {
    let mu = body.mu;
    singular_xq_from_couplings(
        body,
        xi,
        mu * profile_at_0.f2pp,
        2.0 * mu * profile_at_0.f1p,
        -mu * profile_at_0.f0,
    )
}

fn singular_xq_from_couplings(
    body: &BodyParams,
    xi: &VelocityPair,
    c_12: f64,
    c_trans: f64,
    c_tilt: f64,
) -> DMatrix<f64> {
    let x1 = xi.xi1;
    let m = body.mass;
    let i1 = body.i1;
    let w = x1 - body.i3 * (xi.xi1 - xi.xi2) / i1;
    #[rustfmt::skip]
    let rows: [f64; 100] = [
        0.0, c_12, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        1.0 / m, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, -x1, 0.0, 0.0, c_trans, 0.0, 0.0, 0.0,
        0.0, 0.0, x1, 0.0, 0.0, 0.0, 0.0, c_trans, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, -w, 0.0, 0.0, c_tilt, 0.0,
        0.0, 0.0, 0.0, 0.0, w, 0.0, 0.0, 0.0, 0.0, c_tilt,
        0.0, 0.0, 1.0 / m, 0.0, 0.0, 0.0, 0.0, -x1, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0 / m, 0.0, 0.0, x1, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 1.0 / i1, 0.0, 0.0, 0.0, 0.0, -x1,
        0.0, 0.0, 0.0, 0.0, 0.0, 1.0 / i1, 0.0, 0.0, x1, 0.0,
    ];
    DMatrix::from_row_slice(10, 10, &rows)
}

/// The literal closed-form projected linearization for a constructed branch.
pub fn xq_closed_form(body: &BodyParams, field: &Field, branch: &RelEqBranch) -> Result<DMatrix<f64>> {
    let xi = branch.xi();
    Ok(match (branch.kind, branch.field_kind) {
        (BranchKind::Regular, FieldKind::Standard) => match field {
            Field::Standard(sf) => xq_regular_standard(body, sf, branch.r, &xi),
            _ => return Err(Error::Validation("standard branch needs a standard field".into())),
        },
        (BranchKind::Regular, FieldKind::Generalized) => {
            xq_regular_generalized(body, &field.profile(branch.r)?, branch.r, &xi)
        }
        (BranchKind::Singular, FieldKind::Standard) => match field {
            Field::Standard(sf) => xq_singular_standard(body, sf, &xi),
            _ => return Err(Error::Validation("standard branch needs a standard field".into())),
        },
        (BranchKind::Singular, FieldKind::Generalized) => {
            xq_singular_generalized(body, &field.profile(0.0)?, &xi)
        }
    })
}

/// Spectral classification of a projected linearization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralClass {
    SpectrallyStable,
    SpectrallyUnstable,
    Marginal,
}

impl std::fmt::Display for SpectralClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SpectralClass::SpectrallyStable => "spectrally_stable",
            SpectralClass::SpectrallyUnstable => "spectrally_unstable",
            SpectralClass::Marginal => "marginal",
        };
        f.write_str(s)
    }
}

/// Eigenvalues of a projected linearization with the instability verdict.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// `(re, im)` pairs sorted by `(re, im)`.
    pub eigenvalues: Vec<(f64, f64)>,
    pub max_re: f64,
    pub classification: SpectralClass,
    /// Threshold applied to `max_re`.
    pub threshold: f64,
}

/// Parlett–Reinsch balancing: a diagonal similarity with powers of two that
/// equalizes row and column norms. Eigenvalues are untouched while their
/// numerical conditioning improves by orders of magnitude — the projected
/// linearizations mix entries like `1/I₁ ~ 1e8` with sub-unit couplings.
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix: f64 = 2.0;
    let sqrdx = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let (mut c, mut r) = (0.0f64, 0.0f64);
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0f64;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    m[(i, j)] *= ginv;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Eigenvalues of a small dense real matrix: balance, Householder Hessenberg
/// reduction, then Francis double-shift QR with exceptional shifts.
///
/// The projected linearizations have spectra symmetric under `λ ↦ -λ` and
/// conjugation, a family on which plain double-shift iterations are known to
/// cycle; the exceptional shifts break the cycle deterministically.
pub fn dense_eigenvalues(x: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let n = x.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![Complex::new(x[(0, 0)], 0.0)]);
    }
    let mut balanced = x.clone();
    balance(&mut balanced);
    let mut h = nalgebra::linalg::Hessenberg::new(balanced).unpack_h();
    hqr_eigenvalues(&mut h)
}

/// Double-shift QR on an upper Hessenberg matrix, eigenvalues only
/// (EISPACK `hqr`): exceptional shifts after 10 and 20 stalled sweeps.
fn hqr_eigenvalues(a: &mut DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let n = a.nrows();
    let mut out = vec![Complex::new(0.0, 0.0); n];
    let eps = f64::EPSILON;
    let mut anorm = 0.0f64;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    if anorm == 0.0 {
        return Ok(out);
    }

    let mut total_sweeps = 0usize;
    let mut t = 0.0f64; // accumulated exceptional shift
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0usize;
        'eigen: loop {
            // Look for a negligible subdiagonal element.
            let mut l = nn;
            while l >= 1 {
                let s = {
                    let v = a[(l as usize - 1, l as usize - 1)].abs()
                        + a[(l as usize, l as usize)].abs();
                    if v == 0.0 {
                        anorm
                    } else {
                        v
                    }
                };
                if a[(l as usize, l as usize - 1)].abs() <= eps * s {
                    a[(l as usize, l as usize - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nn as usize, nn as usize)];
            if l == nn {
                // One real root found.
                out[nn as usize] = Complex::new(x + t, 0.0);
                nn -= 1;
                break 'eigen;
            }
            let mut y = a[(nn as usize - 1, nn as usize - 1)];
            let mut w = a[(nn as usize, nn as usize - 1)] * a[(nn as usize - 1, nn as usize)];
            if l == nn - 1 {
                // A 2x2 block: real pair or complex-conjugate pair.
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let xt = x + t;
                if q >= 0.0 {
                    let z = p + z.abs().copysign(if p >= 0.0 { 1.0 } else { -1.0 });
                    let l1 = xt + z;
                    let l2 = if z != 0.0 { xt - w / z } else { xt };
                    out[nn as usize - 1] = Complex::new(l1, 0.0);
                    out[nn as usize] = Complex::new(l2, 0.0);
                } else {
                    out[nn as usize - 1] = Complex::new(xt + p, z);
                    out[nn as usize] = Complex::new(xt + p, -z);
                }
                nn -= 2;
                break 'eigen;
            }

            if its == 30 || total_sweeps >= tol::EIGEN_MAX_ITER {
                return Err(Error::EigenFailure {
                    max_iter: tol::EIGEN_MAX_ITER,
                });
            }
            if its == 10 || its == 20 {
                // Exceptional shift.
                t += x;
                for i in 0..=nn as usize {
                    a[(i, i)] -= x;
                }
                let s = a[(nn as usize, nn as usize - 1)].abs()
                    + a[(nn as usize - 1, nn as usize - 2)].abs();
                y = 0.75 * s;
                x = y;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_sweeps += 1;

            // Form the first column of (H - l1)(H - l2) and look for two
            // consecutive small subdiagonals.
            let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
            let mut m = nn - 2;
            while m >= l {
                let z = a[(m as usize, m as usize)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m as usize + 1, m as usize)] + a[(m as usize, m as usize + 1)];
                q = a[(m as usize + 1, m as usize + 1)] - z - rr - ss;
                r = a[(m as usize + 2, m as usize + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m as usize, m as usize - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (a[(m as usize - 1, m as usize - 1)].abs()
                        + z.abs()
                        + a[(m as usize + 1, m as usize + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[(i as usize, i as usize - 2)] = 0.0;
                if i != m + 2 {
                    a[(i as usize, i as usize - 3)] = 0.0;
                }
            }

            // Double QR sweep on rows/columns l..nn.
            for k in m..=(nn - 1) {
                if k != m {
                    p = a[(k as usize, k as usize - 1)];
                    q = a[(k as usize + 1, k as usize - 1)];
                    r = if k != nn - 1 {
                        a[(k as usize + 2, k as usize - 1)]
                    } else {
                        0.0
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r)
                    .sqrt()
                    .copysign(if p >= 0.0 { 1.0 } else { -1.0 });
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[(k as usize, k as usize - 1)] = -a[(k as usize, k as usize - 1)];
                    }
                } else {
                    a[(k as usize, k as usize - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                // Row modification.
                for j in (k as usize)..=(nn as usize) {
                    let mut pp = a[(k as usize, j)] + q * a[(k as usize + 1, j)];
                    if k != nn - 1 {
                        pp += r * a[(k as usize + 2, j)];
                        a[(k as usize + 2, j)] -= pp * z;
                    }
                    a[(k as usize + 1, j)] -= pp * y;
                    a[(k as usize, j)] -= pp * x;
                }
                // Column modification.
                let mmin = if nn < k + 3 { nn } else { k + 3 };
                for i in (l as usize)..=(mmin as usize) {
                    let mut pp = x * a[(i, k as usize)] + y * a[(i, k as usize + 1)];
                    if k != nn - 1 {
                        pp += z * a[(i, k as usize + 2)];
                        a[(i, k as usize + 2)] -= pp * r;
                    }
                    a[(i, k as usize + 1)] -= pp * q;
                    a[(i, k as usize)] -= pp;
                }
            }
        }
    }
    Ok(out)
}

/// Dense eigenvalues of a projected linearization with the instability
/// classification.
pub fn eigenvalues(x: &DMatrix<f64>) -> Result<SpectrumReport> {
    let eig = dense_eigenvalues(x)?;
    let radius = eig.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let threshold = (tol::SPECTRAL_RE_REL * radius).max(tol::SPECTRAL_RE_FLOOR);
    let max_re = eig.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let min_mod = eig.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min);
    let classification = if max_re > threshold {
        SpectralClass::SpectrallyUnstable
    } else if radius == 0.0 || min_mod <= tol::SPECTRAL_MARGINAL_REL * radius {
        SpectralClass::Marginal
    } else {
        SpectralClass::SpectrallyStable
    };
    let mut pairs: Vec<(f64, f64)> = eig.iter().map(|l| (l.re, l.im)).collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(SpectrumReport {
        eigenvalues: pairs,
        max_re,
        classification,
        threshold,
    })
}

/// The real pair `±ξ₁⁰ √((r² − 4h²)/(r² + h²))` carried by the top block of
/// the regular standard `X_Q` (real exactly when the radius window's upper
/// bound fails, which makes that bound sharp).
pub fn regular_standard_edge_eigenvalue(xi1: f64, r: f64, h: f64) -> Complex<f64> {
    let ratio = Complex::new((r * r - 4.0 * h * h) / (r * r + h * h), 0.0);
    Complex::new(xi1, 0.0) * ratio.sqrt()
}

/// The ten closed-form eigenvalues of the singular generalized `X_Q`.
pub fn singular_generalized_eigenvalues(
    body: &BodyParams,
    profile_at_0: &EquatorialProfile,
    xi: &VelocityPair,
) -> Vec<Complex<f64>> {
    let mu = body.mu;
    let (m, i1) = (body.mass, body.i1);
    let x1 = xi.xi1;
    let pi0 = body.i3 * (xi.xi1 - xi.xi2);
    let mut out = Vec::with_capacity(10);

    let l1 = Complex::new(mu * profile_at_0.f2pp / m, 0.0).sqrt();
    out.push(l1);
    out.push(-l1);

    let s = Complex::new(-2.0 * mu * profile_at_0.f1p, 0.0).sqrt();
    for upper in [1.0, -1.0] {
        let inner = Complex::new(x1 * m.sqrt(), 0.0) + upper * s;
        let l = (-inner * inner / m).sqrt();
        out.push(l);
        out.push(-l);
    }

    // The tilt block: ±(2ξ₁I₁ − Π₀ ± √(4μf₀I₁ + Π₀²)) / (2I₁) as the
    // imaginary parts when the inner root is real. The matrix block fixes the
    // overall 1/I₁ scale (the inner square is divided by I₁², not I₁).
    let t = Complex::new(4.0 * mu * profile_at_0.f0 * i1 + pi0 * pi0, 0.0).sqrt();
    for upper in [1.0, -1.0] {
        let inner = Complex::new(2.0 * x1 * i1 - pi0, 0.0) + upper * t;
        let l = 0.5 * (-inner * inner).sqrt() / i1;
        out.push(l);
        out.push(-l);
    }
    out
}

/// Combined nonlinear + spectral verdict for one branch.
#[derive(Debug, Clone, Serialize)]
pub struct BranchVerdict {
    pub stability: crate::stability::StabilityReport,
    pub spectrum: SpectrumReport,
    /// Energy–momentum certificate: stability form definite.
    pub em_stable: bool,
    /// Spectral instability implies nonlinear instability.
    pub nonlinearly_unstable: bool,
    pub notes: Vec<String>,
}

/// Run the whole pipeline on one branch: stability form, signature, flags,
/// projected linearization and spectrum.
pub fn classify_branch(body: &BodyParams, field: &Field, branch: &RelEqBranch) -> Result<BranchVerdict> {
    let stability = crate::stability::stability_report(body, field, branch)?;
    let x_full = full_linearization(body, field, &branch.z0, &branch.xi())?;
    let w = stability_space_for(branch, body);
    let xq = project_xq(&x_full, &w, &branch.z0.m)?;
    let spectrum = eigenvalues(&xq)?;

    let em_stable = stability.signature.definite;
    let nonlinearly_unstable = spectrum.classification == SpectralClass::SpectrallyUnstable;
    let mut notes = Vec::new();
    if em_stable {
        notes.push("definite stability form: nonlinearly stable modulo the torus".to_string());
    } else if nonlinearly_unstable {
        notes.push("spectrally unstable, hence nonlinearly unstable".to_string());
    } else {
        notes.push(
            "indefinite stability form with purely imaginary spectrum: stability gap, no verdict"
                .to_string(),
        );
    }
    if branch.kind == BranchKind::Singular && branch.field_kind == FieldKind::Standard {
        notes.push("singular standard branch: stability form is always indefinite".to_string());
    }
    Ok(BranchVerdict {
        stability,
        spectrum,
        em_stable,
        nonlinearly_unstable,
        notes,
    })
}

/// Restriction of the stability form used by `X_Q = −(ω|_W)⁻¹ Q_W`; exposed
/// for consistency tests between the two constructions.
pub fn xq_from_restricted_form(
    h: &DMatrix<f64>,
    w: &StabilitySpace,
    m0: &BodyMomentum,
) -> Result<DMatrix<f64>> {
    let u = w.as_matrix();
    let omega = symplectic_matrix(m0);
    let omega_w = u.transpose() * &omega * u;
    let det = omega_w.determinant();
    let inv = omega_w
        .try_inverse()
        .ok_or(Error::ComplementDegenerate { det })?;
    Ok(-inv * restrict(h, w))
}
