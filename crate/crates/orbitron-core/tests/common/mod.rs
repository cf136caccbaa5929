//! Shared oracle machinery for the integration suites: finite-difference
//! gradients/Hessians of the augmented Hamiltonian along left-trivialized
//! probes, a dense matrix exponential, and random parameter draws.
//!
//! Everything here is independent of the library's analytic Hessian and
//! linearization paths; it only evaluates the scalar `h − J^ξ` and the flow.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use orbitron_core::dynamics::{augmented_hamiltonian, BodyParams, VelocityPair};
use orbitron_core::field::{
    superposed_poles, EquatorialProfile, Field, ProfileField, StandardField, VACUUM_PERMEABILITY,
};
use orbitron_core::releq::{make_regular, make_singular, RelEqBranch, Sign};
use orbitron_core::scenario::displace;
use orbitron_core::se3::PhasePoint;

/// Per-slot probe magnitudes `(δA, δx, δΠ, δp)`; finite-difference steps are
/// small fractions of these.
#[derive(Debug, Clone, Copy)]
pub struct ProbeScales {
    pub a: f64,
    pub x: f64,
    pub pi: f64,
    pub p: f64,
}

impl ProbeScales {
    pub fn for_point(body: &BodyParams, field: &Field, z: &PhasePoint, xi: &VelocityPair) -> Self {
        let l = field.length_scale().max(z.g.x.norm());
        let rate = xi.xi1.abs().max(xi.xi2.abs()).max(1.0);
        let pi_scale = z
            .m
            .pi
            .norm()
            .max(body.i1 * rate)
            .max(body.i3 * rate)
            .max(1e-300);
        let p_scale = z.m.p.norm().max(body.mass * l * rate).max(1e-300);
        ProbeScales {
            a: 1.0,
            x: l,
            pi: pi_scale,
            p: p_scale,
        }
    }

    pub fn slot(&self, i: usize) -> f64 {
        match i / 3 {
            0 => self.a,
            1 => self.x,
            2 => self.pi,
            _ => self.p,
        }
    }

    /// Finite-difference step for coordinate `i`. The momentum slots enter the
    /// augmented Hamiltonian quadratically at most, so they take larger steps
    /// (no truncation error) to keep rounding noise down.
    pub fn step(&self, i: usize) -> f64 {
        match i / 3 {
            0 => 1e-4 * self.a,
            1 => 1e-4 * self.x,
            2 => 1e-2 * self.pi,
            _ => 1e-2 * self.p,
        }
    }
}

fn displaced(z: &PhasePoint, coords: &[(usize, f64)]) -> PhasePoint {
    let mut delta = [0.0f64; 12];
    for (i, v) in coords {
        delta[*i] += *v;
    }
    displace(z, &delta)
}

/// Central-difference gradient of `h − J^ξ` along the 12 left-trivialized
/// probe directions.
pub fn fd_gradient(
    body: &BodyParams,
    field: &Field,
    z: &PhasePoint,
    xi: &VelocityPair,
    scales: &ProbeScales,
) -> [f64; 12] {
    let f = |p: &PhasePoint| augmented_hamiltonian(body, field, p, xi).expect("field evaluable");
    let mut g = [0.0f64; 12];
    for (i, gi) in g.iter_mut().enumerate() {
        let s = scales.step(i);
        let fp = f(&displaced(z, &[(i, s)]));
        let fm = f(&displaced(z, &[(i, -s)]));
        *gi = (fp - fm) / (2.0 * s);
    }
    g
}

/// Central-difference Hessian of `h − J^ξ` along left-trivialized probes.
pub fn fd_hessian(
    body: &BodyParams,
    field: &Field,
    z: &PhasePoint,
    xi: &VelocityPair,
    scales: &ProbeScales,
) -> DMatrix<f64> {
    let f = |p: &PhasePoint| augmented_hamiltonian(body, field, p, xi).expect("field evaluable");
    let f0 = f(z);
    let mut h = DMatrix::<f64>::zeros(12, 12);
    for i in 0..12 {
        let si = scales.step(i);
        let d2 = (f(&displaced(z, &[(i, si)])) - 2.0 * f0 + f(&displaced(z, &[(i, -si)])))
            / (si * si);
        h[(i, i)] = d2;
        for j in (i + 1)..12 {
            let sj = scales.step(j);
            let v = (f(&displaced(z, &[(i, si), (j, sj)]))
                - f(&displaced(z, &[(i, si), (j, -sj)]))
                - f(&displaced(z, &[(i, -si), (j, sj)]))
                + f(&displaced(z, &[(i, -si), (j, -sj)])))
                / (4.0 * si * sj);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Compare two 12×12 Hessians block by block: each 3×3 block must agree to
/// `rel` relative to its own magnitude (zero blocks measured against the
/// geometric mean of their row- and column-block scales).
pub fn assert_hessian_close(analytic: &DMatrix<f64>, fd: &DMatrix<f64>, rel: f64, what: &str) {
    let block_max = |m: &DMatrix<f64>, bi: usize, bj: usize| -> f64 {
        let mut v: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                v = v.max(m[(3 * bi + i, 3 * bj + j)].abs());
            }
        }
        v
    };
    for bi in 0..4 {
        for bj in 0..4 {
            let scale_here = block_max(analytic, bi, bj);
            let row_scale = (0..4).map(|k| block_max(analytic, bi, k)).fold(0.0, f64::max);
            let col_scale = (0..4).map(|k| block_max(analytic, k, bj)).fold(0.0, f64::max);
            let denom = scale_here.max((row_scale * col_scale).sqrt()).max(1e-300);
            let mut err: f64 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    err = err
                        .max((analytic[(3 * bi + i, 3 * bj + j)] - fd[(3 * bi + i, 3 * bj + j)]).abs());
                }
            }
            assert!(
                err / denom <= rel,
                "{what}: block ({bi},{bj}) differs by {:.3e} (scale {:.3e}, rel {:.3e})",
                err,
                denom,
                err / denom
            );
        }
    }
}

/// Entrywise relative comparison of two matrices; zero entries are measured
/// against the larger of the corresponding row/column maxima.
pub fn assert_matrix_entries_close(a: &DMatrix<f64>, b: &DMatrix<f64>, rel: f64, what: &str) {
    assert_eq!(a.shape(), b.shape());
    let (n, m) = a.shape();
    let row_max: Vec<f64> = (0..n)
        .map(|i| (0..m).map(|j| b[(i, j)].abs()).fold(0.0, f64::max))
        .collect();
    let col_max: Vec<f64> = (0..m)
        .map(|j| (0..n).map(|i| b[(i, j)].abs()).fold(0.0, f64::max))
        .collect();
    for i in 0..n {
        for j in 0..m {
            let denom = b[(i, j)]
                .abs()
                .max(1e-6 * row_max[i].max(col_max[j]))
                .max(1e-300);
            let err = (a[(i, j)] - b[(i, j)]).abs();
            assert!(
                err / denom <= rel,
                "{what}: entry ({i},{j}) = {:.6e} vs {:.6e} (rel {:.3e})",
                a[(i, j)],
                b[(i, j)],
                err / denom
            );
        }
    }
}

/// Dense matrix exponential by scaling-and-squaring with a Taylor series.
pub fn matrix_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.amax() * n as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings as i32);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = DMatrix::<f64>::identity(n, n);
    for k in 1..=30 {
        term = (&term * &scaled) / k as f64;
        sum += &term;
        if term.amax() < 1e-18 * sum.amax() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn fig3_body() -> BodyParams {
    BodyParams::new(0.0068, 0.17e-6, 0.1e-6, -0.18375)
}

pub fn fig3_standard() -> StandardField {
    StandardField::new(17.58, 0.05, VACUUM_PERMEABILITY)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo.log10()..hi.log10()))
}

pub fn rand_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_range(0..2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Random body with physically sensible magnitudes.
pub fn random_body(rng: &mut ChaCha8Rng) -> BodyParams {
    let i1 = log_uniform(rng, 1e-8, 1e-5);
    BodyParams::new(
        log_uniform(rng, 5e-4, 5e-2),
        i1,
        i1 * rng.random_range(0.3..1.9),
        rand_sign(rng) * log_uniform(rng, 1e-2, 1.0),
    )
}

/// Random two-pole field; when `confining` is set, the pole sign is chosen so
/// that `μq < 0` and regular branches exist.
pub fn random_standard(rng: &mut ChaCha8Rng, body: &BodyParams, confining: bool) -> StandardField {
    let magnitude = log_uniform(rng, 1.0, 50.0);
    let q = if confining {
        -body.mu.signum() * magnitude
    } else {
        rand_sign(rng) * magnitude
    };
    StandardField::new(q, rng.random_range(0.02..0.15), VACUUM_PERMEABILITY)
}

/// Random generalized field with a full `B`: two superposed two-pole fields.
pub fn random_superposed(rng: &mut ChaCha8Rng, body: &BodyParams, confining: bool) -> Field {
    let main = random_standard(rng, body, confining);
    // Secondary field kept weak enough not to flip the confining sign of f1'.
    let aux = StandardField::new(
        0.3 * main.q * rng.random_range(-1.0..1.0),
        main.h * rng.random_range(1.5..3.0),
        VACUUM_PERMEABILITY,
    );
    Field::Generalized(superposed_poles(main, aux))
}

/// Random profile constants with plausible tesla-per-meter magnitudes.
pub fn random_profile(rng: &mut ChaCha8Rng) -> EquatorialProfile {
    EquatorialProfile {
        f0: rand_sign(rng) * log_uniform(rng, 1e-4, 1e-1),
        f1p: rand_sign(rng) * log_uniform(rng, 1e-2, 1.0),
        f1pp: rand_sign(rng) * log_uniform(rng, 1e-1, 1e2),
        f2pp: rand_sign(rng) * log_uniform(rng, 1e-2, 1.0),
    }
}

/// Random admissible regular branch over a random standard field, with a
/// random phase θ₀ (displayed closed forms assume canonical θ₀ = 0; see
/// [`random_regular_standard_canonical`]).
pub fn random_regular_standard(rng: &mut ChaCha8Rng) -> (BodyParams, Field, RelEqBranch) {
    draw_regular_standard(rng, None)
}

/// Same draw with the canonical placement θ₀ = 0 assumed by the closed-form
/// stability-form and X_Q displays.
pub fn random_regular_standard_canonical(
    rng: &mut ChaCha8Rng,
) -> (BodyParams, Field, RelEqBranch) {
    draw_regular_standard(rng, Some(0.0))
}

fn draw_regular_standard(
    rng: &mut ChaCha8Rng,
    theta0: Option<f64>,
) -> (BodyParams, Field, RelEqBranch) {
    let body = random_body(rng);
    let sf = random_standard(rng, &body, true);
    let field = Field::Standard(sf);
    let r = sf.h * rng.random_range(0.5..4.0);
    let sign = if rng.random_range(0..2) == 0 { Sign::Plus } else { Sign::Minus };
    let xi2 = rng.random_range(-500.0..500.0);
    let theta0 = theta0.unwrap_or_else(|| rng.random_range(0.0..6.28));
    let branch =
        make_regular(&body, &field, r, theta0, sign, xi2).expect("mu q < 0 by construction");
    (body, field, branch)
}

/// Random admissible regular branch over a random generalized (superposed)
/// field with full `B`, random phase.
pub fn random_regular_generalized(rng: &mut ChaCha8Rng) -> (BodyParams, Field, RelEqBranch) {
    draw_regular_generalized(rng, None)
}

/// Canonical-placement variant for closed-form comparisons.
pub fn random_regular_generalized_canonical(
    rng: &mut ChaCha8Rng,
) -> (BodyParams, Field, RelEqBranch) {
    draw_regular_generalized(rng, Some(0.0))
}

fn draw_regular_generalized(
    rng: &mut ChaCha8Rng,
    theta0: Option<f64>,
) -> (BodyParams, Field, RelEqBranch) {
    loop {
        let body = random_body(rng);
        let field = random_superposed(rng, &body, true);
        let h_scale = field.length_scale();
        let r = h_scale * rng.random_range(0.4..2.5);
        let sign = if rng.random_range(0..2) == 0 { Sign::Plus } else { Sign::Minus };
        let xi2 = rng.random_range(-500.0..500.0);
        let t0 = theta0.unwrap_or_else(|| rng.random_range(0.0..6.28));
        match make_regular(&body, &field, r, t0, sign, xi2) {
            Ok(branch) => return (body, field, branch),
            Err(_) => continue, // aux field flipped the profile sign here; redraw
        }
    }
}

/// Random singular branch over a random standard field (μq of either sign).
pub fn random_singular_standard(rng: &mut ChaCha8Rng, confining: bool) -> (BodyParams, Field, RelEqBranch) {
    let body = random_body(rng);
    let sf = random_standard(rng, &body, confining);
    let field = Field::Standard(sf);
    let xi1 = rand_sign(rng) * rng.random_range(1.0..300.0);
    let xi2 = rng.random_range(-300.0..300.0);
    let branch = make_singular(&body, &field, xi1, xi2).unwrap();
    (body, field, branch)
}

/// Random singular branch over a random superposed generalized field.
pub fn random_singular_generalized(rng: &mut ChaCha8Rng) -> (BodyParams, Field, RelEqBranch) {
    let body = random_body(rng);
    let field = random_superposed(rng, &body, false);
    let xi1 = rand_sign(rng) * rng.random_range(1.0..300.0);
    let xi2 = rng.random_range(-300.0..300.0);
    let branch = make_singular(&body, &field, xi1, xi2).unwrap();
    (body, field, branch)
}

/// Random singular branch over a pure profile field (stability data only).
pub fn random_singular_profile(rng: &mut ChaCha8Rng) -> (BodyParams, Field, RelEqBranch) {
    let body = random_body(rng);
    let field = Field::Profile(ProfileField::new(0.0, random_profile(rng)));
    let xi1 = rand_sign(rng) * rng.random_range(1.0..300.0);
    let xi2 = rng.random_range(-300.0..300.0);
    let branch = make_singular(&body, &field, xi1, xi2).unwrap();
    (body, field, branch)
}
