//! Nonlinear (energy–momentum) stability of the relative equilibria.
//!
//! The certificate is definiteness of the *stability form*: the Hessian of the
//! augmented Hamiltonian `h − J^ξ` restricted to a stability space `W` with
//! `ker TJ = W ⊕ (orbit tangent)`. Definiteness is decided by the signature,
//! which by Sylvester's law of inertia can be read off the pivots of a
//! symmetric (congruence-preserving) elimination — no eigensolve needed.
//!
//! Coordinates: 12-vectors ordered `(δA, δx, δΠ, δp)` in the left-trivialized
//! frame at the group-translated identity (the frame in which the stability
//! bases and the projected linearization are written). At the canonical branch
//! placement with `θ₀ = 0` this coincides with the spatial frame.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dynamics::{BodyParams, VelocityPair};
use crate::field::{equatorial_hess_bz, EquatorialProfile, Field, StandardField};
use crate::releq::{xi1_generalized, xi1_standard, BranchKind, FieldKind, RelEqBranch, Sign};
use crate::se3::{hat, Mat3, PhasePoint, Vec3};
use crate::tol;
use crate::{Error, Result};

fn e3() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

fn set_block(m: &mut DMatrix<f64>, bi: usize, bj: usize, v: &Mat3) {
    for i in 0..3 {
        for j in 0..3 {
            m[(3 * bi + i, 3 * bj + j)] = v[(i, j)];
        }
    }
}

/// The `(δx, δx)` sub-block `T_x F(·)(u)` with `F = DBᵀ`; equals `Hess(B_z)`
/// when `u = e₃` and falls back to central differences of `DBᵀ u` otherwise.
fn txf_block(field: &Field, x: &Vec3, u: &Vec3) -> Result<Mat3> {
    if (u - e3()).norm() <= tol::AXIS_ALIGNED {
        return field.hess_bz(x);
    }
    let s = tol::FIELD_FD_STEP * field.length_scale();
    let mut m = Mat3::zeros();
    for j in 0..3 {
        let mut ej = Vec3::zeros();
        ej[j] = s;
        let fp = field.db(&(x + ej))?.transpose() * u;
        let fm = field.db(&(x - ej))?.transpose() * u;
        m.set_column(j, &((fp - fm) / (2.0 * s)));
    }
    // T_x F(·)(u) is the Hessian of <B(x), u>, hence symmetric.
    Ok(0.5 * (m + m.transpose()))
}

/// 12×12 Hessian of the augmented Hamiltonian `h − J^ξ` at `z`, expressed in
/// the left-trivialized frame at the identity.
///
/// The matrix is exactly symmetric only where `d(h − J^ξ) = 0`; callers that
/// need a quadratic form should evaluate at (approximate) relative equilibria.
pub fn augmented_hessian(
    body: &BodyParams,
    field: &Field,
    z: &PhasePoint,
    xi: &VelocityPair,
) -> Result<DMatrix<f64>> {
    let a = &z.g.a;
    let x = &z.g.x;
    let mu = body.mu;
    let xi1 = xi.xi1;

    let b = field.b(x)?;
    let f = field.db(x)?.transpose();
    let a_e3 = a * e3();
    let a_p = a * z.m.p;
    let a_pi = a * z.m.pi;
    let xe3 = x.cross(&e3());

    let h_aa = -mu * (hat(&b) * hat(&a_e3)) + xi1 * (hat(&xe3) * hat(&a_p) - hat(&e3()) * hat(&a_pi));
    let h_ax = -mu * (hat(&a_e3) * f.transpose()) - xi1 * (hat(&a_p) * hat(&e3()));
    let h_xa = mu * (f * hat(&a_e3)) - xi1 * (hat(&e3()) * hat(&a_p));
    let h_api = xi1 * (hat(&e3()) * a);
    let h_ap = -xi1 * (hat(&xe3) * a);
    let h_xx = -mu * txf_block(field, x, &a_e3)?;
    let h_xp = xi1 * (hat(&e3()) * a);
    let i_inv = Mat3::from_diagonal(&Vec3::new(1.0 / body.i1, 1.0 / body.i1, 1.0 / body.i3));
    let m_inv = Mat3::identity() / body.mass;

    let mut h = DMatrix::<f64>::zeros(12, 12);
    set_block(&mut h, 0, 0, &h_aa);
    set_block(&mut h, 0, 1, &h_ax);
    set_block(&mut h, 0, 2, &h_api);
    set_block(&mut h, 0, 3, &h_ap);
    set_block(&mut h, 1, 0, &h_xa);
    set_block(&mut h, 1, 1, &h_xx);
    set_block(&mut h, 1, 3, &h_xp);
    set_block(&mut h, 2, 0, &h_api.transpose());
    set_block(&mut h, 2, 2, &i_inv);
    set_block(&mut h, 3, 0, &h_ap.transpose());
    set_block(&mut h, 3, 1, &h_xp.transpose());
    set_block(&mut h, 3, 3, &m_inv);

    // Translate to the identity frame: congruence by blockdiag(A, A, I, I).
    let mut c = DMatrix::<f64>::identity(12, 12);
    set_block(&mut c, 0, 0, a);
    set_block(&mut c, 1, 1, a);
    Ok(c.transpose() * h * c)
}

/// Differential of the momentum map at `z`, as a 2×12 matrix acting on
/// identity-frame tangent vectors.
pub fn momentum_differential(z: &PhasePoint) -> DMatrix<f64> {
    let a = &z.g.a;
    let a_pi = a * z.m.pi;
    let a_p = a * z.m.p;
    let row_a = a_pi.cross(&e3()) + a_p.cross(&e3().cross(&z.g.x));
    let row_x = a_p.cross(&e3());
    let row_dpi = a.transpose() * e3();
    let row_dp = a.transpose() * e3().cross(&z.g.x);

    let mut m = DMatrix::<f64>::zeros(2, 12);
    // J1 row: the dA and dx coefficient vectors pick up the frame change A.
    let ra = a.transpose() * row_a;
    let rx = a.transpose() * row_x;
    for i in 0..3 {
        m[(0, i)] = ra[i];
        m[(0, 3 + i)] = rx[i];
        m[(0, 6 + i)] = row_dpi[i];
        m[(0, 9 + i)] = row_dp[i];
        // J2 row: -<dPi, e3>.
        m[(1, 6 + i)] = -e3()[i];
    }
    m
}

/// A basis of a stability space, stored as the 12×dim matrix of column
/// vectors in the `(δA, δx, δΠ, δp)` identity-frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySpace {
    basis: DMatrix<f64>,
}

impl StabilitySpace {
    pub fn from_columns(cols: &[[f64; 12]]) -> Self {
        let mut basis = DMatrix::<f64>::zeros(12, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..12 {
                basis[(i, j)] = c[i];
            }
        }
        StabilitySpace { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn column(&self, j: usize) -> DVector<f64> {
        self.basis.column(j).into_owned()
    }
}

fn unit(slot: usize, axis: usize) -> [f64; 12] {
    let mut v = [0.0; 12];
    v[3 * slot + axis] = 1.0;
    v
}

/// Stability space of the regular branch: eight vectors
/// `u₁ = (0, e₁, 0, −Mξ₁⁰e₂)`, `u₂ = (e₃,0,0,0)`, `u₃ = (0,0,e₁,0)`,
/// `u₄ = (0,0,e₂,0)`, `u₅ = (0,0,0,e₃)`, `u₆ = (0,e₃,0,0)`,
/// `u₇ = (e₂,0,0,0)`, `u₈ = (e₁,0,0,0)`.
pub fn stability_space_regular(mass: f64, xi1: f64) -> StabilitySpace {
    let mut u1 = [0.0; 12];
    u1[3] = 1.0; // δx = e1
    u1[10] = -mass * xi1; // δp = -M ξ1 e2
    StabilitySpace::from_columns(&[
        u1,
        unit(0, 2),
        unit(2, 0),
        unit(2, 1),
        unit(3, 2),
        unit(1, 2),
        unit(0, 1),
        unit(0, 0),
    ])
}

/// Stability space of the singular branch: ten coordinate vectors.
pub fn stability_space_singular() -> StabilitySpace {
    StabilitySpace::from_columns(&[
        unit(3, 2),
        unit(1, 2),
        unit(3, 1),
        unit(3, 0),
        unit(2, 1),
        unit(2, 0),
        unit(1, 1),
        unit(1, 0),
        unit(0, 1),
        unit(0, 0),
    ])
}

/// Stability space matching a constructed branch.
pub fn stability_space_for(branch: &RelEqBranch, body: &BodyParams) -> StabilitySpace {
    match branch.kind {
        BranchKind::Regular => stability_space_regular(body.mass, branch.xi1),
        BranchKind::Singular => stability_space_singular(),
    }
}

/// Tangent directions of the toral orbit through `z`, identity frame.
pub fn orbit_tangent(z: &PhasePoint) -> DMatrix<f64> {
    let a = &z.g.a;
    let mut m = DMatrix::<f64>::zeros(12, 2);
    // ξ1 generator: (Aᵀe3, Aᵀ(e3 × x), 0, 0) in identity-frame coordinates.
    let g1a = a.transpose() * e3();
    let g1x = a.transpose() * e3().cross(&z.g.x);
    // ξ2 generator: (-e3, 0, e3 × Π, e3 × p).
    let g2pi = e3().cross(&z.m.pi);
    let g2p = e3().cross(&z.m.p);
    for i in 0..3 {
        m[(i, 0)] = g1a[i];
        m[(3 + i, 0)] = g1x[i];
        m[(i, 1)] = -e3()[i];
        m[(6 + i, 1)] = g2pi[i];
        m[(9 + i, 1)] = g2p[i];
    }
    m
}

/// Restriction `Q[i][j] = uᵢᵀ H uⱼ` of a quadratic form to a subspace.
pub fn restrict(h: &DMatrix<f64>, w: &StabilitySpace) -> DMatrix<f64> {
    w.as_matrix().transpose() * h * w.as_matrix()
}

/// Signature of a symmetric form obtained from the pivots of a symmetric
/// elimination (LDLᵀ with Bunch–Kaufman pivoting).
#[derive(Debug, Clone, Serialize)]
pub struct PivotSignature {
    /// Pivot values in elimination order, in the scale of the input form; a
    /// 2×2 pivot contributes the two eigenvalues of its block.
    pub pivots: Vec<f64>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
    /// Strictly definite (no zero pivots, one sign only).
    pub definite: bool,
    /// Zero pivots present: the form sits on a condition boundary.
    pub marginal: bool,
    /// Zero threshold applied to the pivots of the equilibrated form.
    pub zero_threshold: f64,
}

/// Compute the signature of `q` via congruence-preserving elimination.
///
/// The form is first equilibrated by the diagonal congruence
/// `Q̃ = D Q D`, `D = diag(1/√(row scale))` — the stability forms mix entries
/// like `1/I₁ ~ 1e6` with momentum-scale pivots `~ 1e-5`, and a zero test
/// against the raw `max|Q|` would misreport genuinely signed pivots.
/// Congruence leaves the signature untouched, zero tests run on the
/// equilibrated pivots, and the reported pivot values are rescaled back so
/// that natural-order eliminations match hand computations exactly.
///
/// Natural pivot order is kept whenever it is numerically safe; when a
/// diagonal pivot underflows, a 2×2 Bunch–Kaufman pivot is used instead,
/// contributing one positive and one negative inertia count.
pub fn signature_via_pivots(q: &DMatrix<f64>) -> PivotSignature {
    let n = q.nrows();
    assert_eq!(n, q.ncols(), "signature needs a square matrix");
    let sym = 0.5 * (q + q.transpose());
    let row_scale: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| sym[(i, j)].abs()).fold(0.0, f64::max))
        .collect();
    let d: Vec<f64> = row_scale
        .iter()
        .map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 })
        .collect();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = sym[(i, j)] * d[i] * d[j];
        }
    }
    let tau = tol::ZERO_PIVOT_REL * s.amax().max(f64::MIN_POSITIVE);
    let alpha = (1.0 + 17.0_f64.sqrt()) / 8.0;

    // Track the original index of each active row to rescale reported pivots.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);
    let (mut n_plus, mut n_minus, mut n_zero) = (0usize, 0usize, 0usize);
    let mut k = 0usize;

    let swap = |s: &mut DMatrix<f64>, perm: &mut Vec<usize>, a: usize, b: usize| {
        if a != b {
            s.swap_rows(a, b);
            s.swap_columns(a, b);
            perm.swap(a, b);
        }
    };
    let mut count = |p: f64| {
        if p > tau {
            n_plus += 1;
        } else if p < -tau {
            n_minus += 1;
        } else {
            n_zero += 1;
        }
    };

    while k < n {
        // Largest off-diagonal magnitude in column k of the active block.
        let (mut lambda, mut r) = (0.0f64, k);
        for i in (k + 1)..n {
            if s[(i, k)].abs() > lambda {
                lambda = s[(i, k)].abs();
                r = i;
            }
        }
        let akk = s[(k, k)].abs();

        let mut one_by_one = akk >= alpha * lambda || lambda <= tau;
        if !one_by_one {
            // Bunch–Kaufman secondary tests on column r.
            let mut sigma = 0.0f64;
            for i in k..n {
                if i != r {
                    sigma = sigma.max(s[(i, r)].abs());
                }
            }
            if akk * sigma >= alpha * lambda * lambda {
                one_by_one = true;
            } else if s[(r, r)].abs() >= alpha * sigma {
                swap(&mut s, &mut perm, k, r);
                one_by_one = true;
            } else {
                swap(&mut s, &mut perm, k + 1, r);
            }
        }

        if one_by_one {
            let p = s[(k, k)];
            count(p);
            pivots.push(p * row_scale[perm[k]]);
            if p.abs() > tau {
                for i in (k + 1)..n {
                    let m = s[(i, k)] / p;
                    if m == 0.0 {
                        continue;
                    }
                    for j in (k + 1)..n {
                        s[(i, j)] -= m * s[(k, j)];
                    }
                }
                // Restore exact symmetry of the trailing block.
                for i in (k + 1)..n {
                    for j in (k + 1)..i {
                        let v = 0.5 * (s[(i, j)] + s[(j, i)]);
                        s[(i, j)] = v;
                        s[(j, i)] = v;
                    }
                }
            }
            k += 1;
        } else {
            let (a, b, c) = (s[(k, k)], s[(k + 1, k)], s[(k + 1, k + 1)]);
            let det = a * c - b * b;
            // Inertia contribution from the scaled block.
            let mean = 0.5 * (a + c);
            let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            count(mean + disc);
            count(mean - disc);
            // Reported values come from the unscaled block.
            let (ra, rb) = (row_scale[perm[k]], row_scale[perm[k + 1]]);
            let (ua, ub, uc) = (a * ra, b * (ra * rb).sqrt(), c * rb);
            let umean = 0.5 * (ua + uc);
            let udisc = (0.25 * (ua - uc) * (ua - uc) + ub * ub).sqrt();
            pivots.push(umean + udisc);
            pivots.push(umean - udisc);
            if det.abs() > tau * tau {
                for i in (k + 2)..n {
                    let (v1, v2) = (s[(i, k)], s[(i, k + 1)]);
                    let w1 = (c * v1 - b * v2) / det;
                    let w2 = (a * v2 - b * v1) / det;
                    for j in (k + 2)..n {
                        s[(i, j)] -= w1 * s[(k, j)] + w2 * s[(k + 1, j)];
                    }
                }
                for i in (k + 2)..n {
                    for j in (k + 2)..i {
                        let v = 0.5 * (s[(i, j)] + s[(j, i)]);
                        s[(i, j)] = v;
                        s[(j, i)] = v;
                    }
                }
            }
            k += 2;
        }
    }

    PivotSignature {
        pivots,
        n_plus,
        n_minus,
        n_zero,
        definite: n_zero == 0 && (n_plus == 0 || n_minus == 0) && n > 0,
        marginal: n_zero > 0,
        zero_threshold: tau,
    }
}

/// One closed-form stability inequality with its signed margin
/// (positive ⇔ satisfied, units of the underlying quantity).
#[derive(Debug, Clone, Serialize)]
pub struct ConditionFlag {
    pub name: &'static str,
    pub satisfied: bool,
    pub margin: f64,
    /// Natural magnitude of the compared quantities; `|margin| / scale` is the
    /// relative distance to the condition boundary.
    pub scale: f64,
}

impl ConditionFlag {
    fn from_margin(name: &'static str, margin: f64, scale: f64) -> Self {
        ConditionFlag {
            name,
            satisfied: margin > 0.0,
            margin,
            scale: scale.max(1e-300),
        }
    }

    /// Relative distance to the boundary (signed).
    pub fn relative_margin(&self) -> f64 {
        self.margin / self.scale
    }
}

/// A family of closed-form conditions; their conjunction certifies stability.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionSet {
    pub flags: Vec<ConditionFlag>,
}

impl ConditionSet {
    pub fn all_satisfied(&self) -> bool {
        self.flags.iter().all(|f| f.satisfied)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionFlag> {
        self.flags.iter().find(|f| f.name == name)
    }
}

/// Closed-form conditions for the regular branch of the standard field:
/// `2/3 < r²/h² < 4` (the radius window; the upper bound is the sharp one)
/// and the ξ₂ bound
/// `sign(ξ₁⁰) I₃ ξ₂ < −|ξ₁⁰| (I₁ − I₃ + (2/3) M (r²+h²)h²/(3r²−2h²))`.
pub fn conditions_standard_regular(
    body: &BodyParams,
    field: &StandardField,
    r: f64,
    xi2: f64,
    sign: Sign,
) -> Result<ConditionSet> {
    let xi1 = sign.value() * xi1_standard(body, field, r)?.0;
    let ratio = r * r / (field.h * field.h);
    let lower = ConditionFlag::from_margin("radius_lower", ratio - 2.0 / 3.0, ratio + 2.0 / 3.0);
    let upper = ConditionFlag::from_margin("radius_upper", 4.0 - ratio, 4.0 + ratio);
    let denom = 3.0 * r * r - 2.0 * field.h * field.h;
    let (margin, scale) = if denom > 0.0 {
        let bound = -xi1.abs()
            * (body.i1 - body.i3
                + (2.0 / 3.0) * body.mass * (r * r + field.h * field.h) * field.h * field.h
                    / denom);
        (
            bound - xi1.signum() * body.i3 * xi2,
            bound.abs() + (body.i3 * xi2).abs(),
        )
    } else {
        (f64::NEG_INFINITY, 1.0)
    };
    let xi2_bound = ConditionFlag::from_margin("xi2_bound", margin, scale);
    Ok(ConditionSet {
        flags: vec![lower, upper, xi2_bound],
    })
}

/// Closed-form conditions for the regular branch of a generalized field:
/// `μf′₁ < 0`, `μ(2f′₁ + r²f″₁) < 0` (generalized radius window),
/// `μf″₂ < 0`, and the ξ₂ bound
/// `sign(ξ₁⁰) I₃ ξ₂ < −|ξ₁⁰| (I₁ − I₃ + ½M(f₀/f′₁ + 4r²f′₁/f″₂))`.
pub fn conditions_generalized_regular(
    body: &BodyParams,
    profile: &EquatorialProfile,
    r: f64,
    xi2: f64,
    sign: Sign,
) -> ConditionSet {
    let mu = body.mu;
    let f1 = ConditionFlag::from_margin("mu_f1p", -mu * profile.f1p, (mu * profile.f1p).abs());
    let kozorez = ConditionFlag::from_margin(
        "radius_window",
        -mu * (2.0 * profile.f1p + r * r * profile.f1pp),
        mu.abs() * (2.0 * profile.f1p.abs() + r * r * profile.f1pp.abs()),
    );
    let f2 = ConditionFlag::from_margin("mu_f2pp", -mu * profile.f2pp, (mu * profile.f2pp).abs());
    let (margin, scale) = match xi1_generalized(body, profile) {
        Ok((xi1_mag, _)) if profile.f2pp != 0.0 && profile.f1p != 0.0 => {
            let xi1 = sign.value() * xi1_mag;
            let bound = -xi1.abs()
                * (body.i1 - body.i3
                    + 0.5
                        * body.mass
                        * (profile.f0 / profile.f1p
                            + 4.0 * r * r * profile.f1p / profile.f2pp));
            (
                bound - xi1.signum() * body.i3 * xi2,
                bound.abs() + (body.i3 * xi2).abs(),
            )
        }
        _ => (f64::NEG_INFINITY, 1.0),
    };
    let xi2_bound = ConditionFlag::from_margin("xi2_bound", margin, scale);
    ConditionSet {
        flags: vec![f1, kozorez, f2, xi2_bound],
    }
}

/// Singular-branch conditions plus the ξ₁-independent optimal condition.
#[derive(Debug, Clone, Serialize)]
pub struct SingularConditions {
    pub flags: ConditionSet,
    /// The optimal condition replaces the ξ₁-window and Π₀ bound only when
    /// `μf₀ < 0` and `f₀/f′₁ < 2I₁/M`.
    pub optimal_applicable: bool,
    /// `|Π₀| > 2√(−μf₀ I₁)`, margin in momentum units (−∞ when inapplicable).
    pub optimal: ConditionFlag,
}

/// Closed-form conditions for the singular branch of a generalized field
/// (profile taken at `r = 0`): `μf′₁ < 0`, `μf″₂ < 0`,
/// `ξ₁² < −2μf′₁/M`, and `sign(ξ₁) Π₀ > (I₁ξ₁² − μf₀)/|ξ₁|`.
pub fn conditions_generalized_singular(
    body: &BodyParams,
    profile_at_0: &EquatorialProfile,
    xi1: f64,
    xi2: f64,
) -> Result<SingularConditions> {
    if xi1 == 0.0 {
        return Err(Error::DegenerateVelocity);
    }
    let mu = body.mu;
    let pi0 = body.i3 * (xi1 - xi2);
    let f1 = ConditionFlag::from_margin(
        "mu_f1p",
        -mu * profile_at_0.f1p,
        (mu * profile_at_0.f1p).abs(),
    );
    let f2 = ConditionFlag::from_margin(
        "mu_f2pp",
        -mu * profile_at_0.f2pp,
        (mu * profile_at_0.f2pp).abs(),
    );
    let window = -2.0 * mu * profile_at_0.f1p / body.mass;
    let xi1_window = ConditionFlag::from_margin(
        "xi1_window",
        window - xi1 * xi1,
        window.abs() + xi1 * xi1,
    );
    let rhs_bound = (body.i1 * xi1 * xi1 - mu * profile_at_0.f0) / xi1.abs();
    let pi0_bound = ConditionFlag::from_margin(
        "pi0_bound",
        xi1.signum() * pi0 - rhs_bound,
        pi0.abs() + rhs_bound.abs(),
    );

    let mu_f0 = mu * profile_at_0.f0;
    let applicable = mu_f0 < 0.0
        && profile_at_0.f1p != 0.0
        && profile_at_0.f0 / profile_at_0.f1p < 2.0 * body.i1 / body.mass;
    let (optimal_margin, optimal_scale) = if mu_f0 < 0.0 {
        let bound = 2.0 * (-mu_f0 * body.i1).sqrt();
        (pi0.abs() - bound, pi0.abs() + bound)
    } else if mu_f0 == 0.0 {
        (pi0.abs(), pi0.abs())
    } else {
        (f64::NEG_INFINITY, 1.0)
    };
    Ok(SingularConditions {
        flags: ConditionSet {
            flags: vec![f1, f2, xi1_window, pi0_bound],
        },
        optimal_applicable: applicable,
        optimal: ConditionFlag::from_margin("pi0_optimal", optimal_margin, optimal_scale),
    })
}

/// Full nonlinear stability report for a constructed branch: pivots and
/// signature of the stability form plus the matching closed-form flags.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub signature: PivotSignature,
    pub flags: ConditionSet,
    /// Present on singular branches only.
    pub singular_optimal: Option<ConditionFlag>,
}

/// Assemble the stability report of a branch: restrict the augmented Hessian
/// to the branch's stability space and evaluate the closed-form conditions.
pub fn stability_report(
    body: &BodyParams,
    field: &Field,
    branch: &RelEqBranch,
) -> Result<StabilityReport> {
    let h = augmented_hessian(body, field, &branch.z0, &branch.xi())?;
    let w = stability_space_for(branch, body);
    let q = restrict(&h, &w);
    let signature = signature_via_pivots(&q);
    let (flags, singular_optimal) = match (branch.kind, branch.field_kind) {
        (BranchKind::Regular, FieldKind::Standard) => {
            let sf = match field {
                Field::Standard(sf) => sf,
                _ => unreachable!("standard branch over non-standard field"),
            };
            (
                conditions_standard_regular(body, sf, branch.r, branch.xi2, branch.sign)?,
                None,
            )
        }
        (BranchKind::Regular, FieldKind::Generalized) => (
            conditions_generalized_regular(
                body,
                &field.profile(branch.r)?,
                branch.r,
                branch.xi2,
                branch.sign,
            ),
            None,
        ),
        (BranchKind::Singular, _) => {
            let sc =
                conditions_generalized_singular(body, &field.profile(0.0)?, branch.xi1, branch.xi2)?;
            (sc.flags, Some(sc.optimal))
        }
    };
    Ok(StabilityReport {
        signature,
        flags,
        singular_optimal,
    })
}

/// `Hess(B_z)` evaluated through a profile at an equatorial point; exposed so
/// that callers cross-checking the standard analytic Hessian against the
/// profile route do not rebuild the formula.
pub fn profile_hess_bz(profile: &EquatorialProfile, x: &Vec3) -> Mat3 {
    equatorial_hess_bz(profile, x)
}
