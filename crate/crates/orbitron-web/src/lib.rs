//! Browser demo bindings: three interactive operations exported through
//! wasm-bindgen, each returning flat `Float64Array`-compatible row data that
//! the page renders on a canvas.
//!
//! The compute layer is plain Rust over `orbitron-core` so it builds and tests
//! on the host; `wasm-bindgen` only wraps the boundary.

use wasm_bindgen::prelude::*;

use orbitron_core::dynamics::{hamiltonian, integrate, momentum_map, BodyParams};
use orbitron_core::field::{Field, StandardField};
use orbitron_core::linearization::{eigenvalues, full_linearization, project_xq};
use orbitron_core::releq::{make_regular, Sign};
use orbitron_core::scenario::displace;
use orbitron_core::stability::{stability_report, stability_space_for};
use orbitron_core::Error;

fn body(mass: f64, i1: f64, i3: f64, mu: f64) -> BodyParams {
    BodyParams::new(mass, i1, i3, mu)
}

fn standard(q: f64, h: f64) -> Field {
    Field::Standard(StandardField::new(
        q,
        h,
        orbitron_core::field::VACUUM_PERMEABILITY,
    ))
}

fn sign_of(plus: bool) -> Sign {
    if plus {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Row layout shared by the two sweep exports:
/// `[swept, xi1, max_re, definite, margin_lower, margin_upper, margin_xi2]`.
pub const SWEEP_STRIDE: usize = 7;

fn evaluate_point(
    body: &BodyParams,
    field: &Field,
    r: f64,
    xi2: f64,
    sign: Sign,
    swept: f64,
) -> Result<[f64; SWEEP_STRIDE], Error> {
    let branch = make_regular(body, field, r, 0.0, sign, xi2)?;
    let report = stability_report(body, field, &branch)?;
    let x = full_linearization(body, field, &branch.z0, &branch.xi())?;
    let w = stability_space_for(&branch, body);
    let xq = project_xq(&x, &w, &branch.z0.m)?;
    let spectrum = eigenvalues(&xq)?;
    let margin = |name: &str| report.flags.get(name).map(|f| f.margin).unwrap_or(f64::NAN);
    Ok([
        swept,
        branch.xi1,
        spectrum.max_re,
        if report.signature.definite { 1.0 } else { 0.0 },
        margin("radius_lower"),
        margin("radius_upper"),
        margin("xi2_bound"),
    ])
}

/// Sweep the orbit radius at fixed ξ₂; flat rows of [`SWEEP_STRIDE`].
pub fn radius_sweep_rows(
    mass: f64,
    i1: f64,
    i3: f64,
    mu: f64,
    q: f64,
    h: f64,
    xi2: f64,
    sign_plus: bool,
    r_min: f64,
    r_max: f64,
    samples: usize,
) -> Result<Vec<f64>, Error> {
    if !(r_min > 0.0 && r_min < r_max && samples >= 2) {
        return Err(Error::Validation("need 0 < r_min < r_max and >= 2 samples".into()));
    }
    let body = body(mass, i1, i3, mu);
    body.validate()?;
    let field = standard(q, h);
    let mut out = Vec::with_capacity(samples * SWEEP_STRIDE);
    for k in 0..samples {
        let r = r_min + (r_max - r_min) * k as f64 / (samples - 1) as f64;
        out.extend(evaluate_point(&body, &field, r, xi2, sign_of(sign_plus), r)?);
    }
    Ok(out)
}

/// Sweep ξ₂ at fixed radius; flat rows of [`SWEEP_STRIDE`].
pub fn xi2_sweep_rows(
    mass: f64,
    i1: f64,
    i3: f64,
    mu: f64,
    q: f64,
    h: f64,
    r: f64,
    sign_plus: bool,
    xi2_min: f64,
    xi2_max: f64,
    samples: usize,
) -> Result<Vec<f64>, Error> {
    if !(r > 0.0 && xi2_min < xi2_max && samples >= 2) {
        return Err(Error::Validation("need r > 0, xi2_min < xi2_max, >= 2 samples".into()));
    }
    let body = body(mass, i1, i3, mu);
    body.validate()?;
    let field = standard(q, h);
    let mut out = Vec::with_capacity(samples * SWEEP_STRIDE);
    for k in 0..samples {
        let xi2 = xi2_min + (xi2_max - xi2_min) * k as f64 / (samples - 1) as f64;
        out.extend(evaluate_point(&body, &field, r, xi2, sign_of(sign_plus), xi2)?);
    }
    Ok(out)
}

/// Integrate from a (optionally nudged) circular relative equilibrium and
/// trace the orbit: flat rows `[t, x, y, z, h_drift, j1_drift]` (drifts
/// relative to their initial values).
pub const ORBIT_STRIDE: usize = 6;

pub fn orbit_trace_rows(
    mass: f64,
    i1: f64,
    i3: f64,
    mu: f64,
    q: f64,
    h: f64,
    r: f64,
    xi2: f64,
    nudge: f64,
    periods: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<f64>, Error> {
    let body = body(mass, i1, i3, mu);
    body.validate()?;
    let field = standard(q, h);
    let branch = make_regular(&body, &field, r, 0.0, Sign::Plus, xi2)?;
    // Nudge scaled to the orbit: radial offset plus a vertical kick.
    let delta = [
        0.0,
        0.0,
        0.0,
        nudge * r,
        0.0,
        0.5 * nudge * r,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.3 * nudge * body.mass * r * branch.xi1.abs(),
    ];
    let z0 = displace(&branch.z0, &delta);
    let t_end = periods * std::f64::consts::TAU / branch.xi1.abs();
    let traj = integrate(&body, &field, &z0, t_end, dt, stride.max(1))?;
    let h0 = hamiltonian(&body, &field, &z0)?;
    let j0 = momentum_map(&z0);
    let mut out = Vec::with_capacity(traj.samples.len() * ORBIT_STRIDE);
    let mut diag = traj.diagnostics.iter().peekable();
    for (t, z) in &traj.samples {
        while let Some(d) = diag.peek() {
            if d.t + 1e-300 < *t {
                diag.next();
            } else {
                break;
            }
        }
        let (dh, dj1) = match diag.peek() {
            Some(d) => (
                (d.h - h0) / h0.abs().max(1e-300),
                (d.j1 - j0.j1) / j0.j1.abs().max(1e-300),
            ),
            None => (f64::NAN, f64::NAN),
        };
        out.extend([*t, z.g.x.x, z.g.x.y, z.g.x.z, dh, dj1]);
    }
    if traj.aborted.is_some() {
        return Err(Error::Numerical("trajectory hit a field singularity".into()));
    }
    Ok(out)
}

fn to_js<T>(r: Result<T, Error>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Radius sweep for the page; see [`radius_sweep_rows`] for the row layout.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn radius_sweep(
    mass: f64,
    i1: f64,
    i3: f64,
    mu: f64,
    q: f64,
    h: f64,
    xi2: f64,
    sign_plus: bool,
    r_min: f64,
    r_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    to_js(radius_sweep_rows(
        mass, i1, i3, mu, q, h, xi2, sign_plus, r_min, r_max, samples,
    ))
}

/// ξ₂ sweep for the page; see [`xi2_sweep_rows`].
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn xi2_sweep(
    mass: f64,
    i1: f64,
    i3: f64,
    mu: f64,
    q: f64,
    h: f64,
    r: f64,
    sign_plus: bool,
    xi2_min: f64,
    xi2_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    to_js(xi2_sweep_rows(
        mass, i1, i3, mu, q, h, r, sign_plus, xi2_min, xi2_max, samples,
    ))
}

/// Orbit trace for the page; see [`orbit_trace_rows`].
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn orbit_trace(
    mass: f64,
    i1: f64,
    i3: f64,
    mu: f64,
    q: f64,
    h: f64,
    r: f64,
    xi2: f64,
    nudge: f64,
    periods: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<f64>, JsValue> {
    to_js(orbit_trace_rows(
        mass, i1, i3, mu, q, h, r, xi2, nudge, periods, dt, stride,
    ))
}
