//! Scenario files in, CSV / plot scripts out.
//!
//! A scenario is a JSON document with a schema version, body parameters, a
//! field description, and one task. Outputs are deterministic: fixed column
//! order, floats at 17 significant digits, grid points evaluated concurrently
//! but gathered by index.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{fmt17, integrate, BodyParams};
use crate::field::{superposed_poles, EquatorialProfile, Field, ProfileField, StandardField};
use crate::linearization::{
    classify_branch, eigenvalues, full_linearization, project_xq, SpectralClass,
};
use crate::releq::{make_regular, make_singular, RelEqBranch, Sign};
use crate::se3::{exp_so3, BodyMomentum, Mat3, PhasePoint, Se3, Vec3};
use crate::stability::{stability_report, stability_space_for, StabilityReport};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Field description in a scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FieldSpec {
    /// Two opposite poles at `(0, 0, ±h)`.
    Standard { q: f64, h: f64, mu0: f64 },
    /// Built-in generalized field: superposition of two two-pole fields.
    SuperposedPoles {
        q1: f64,
        h1: f64,
        q2: f64,
        h2: f64,
        mu0: f64,
    },
    /// Profile constants at a fixed radius (stability studies only).
    Profile {
        r: f64,
        f0: f64,
        f1p: f64,
        f1pp: f64,
        f2pp: f64,
    },
}

impl FieldSpec {
    pub fn build(&self) -> Result<Field> {
        match *self {
            FieldSpec::Standard { q, h, mu0 } => {
                if !(h > 0.0) {
                    return Err(Error::Validation(format!("field.h must be positive, got {h}")));
                }
                if !(mu0 > 0.0) {
                    return Err(Error::Validation(format!(
                        "field.mu0 must be positive, got {mu0}"
                    )));
                }
                Ok(Field::Standard(StandardField::new(q, h, mu0)))
            }
            FieldSpec::SuperposedPoles { q1, h1, q2, h2, mu0 } => {
                if !(h1 > 0.0 && h2 > 0.0) {
                    return Err(Error::Validation(
                        "field.h1 and field.h2 must be positive".into(),
                    ));
                }
                Ok(Field::Generalized(superposed_poles(
                    StandardField::new(q1, h1, mu0),
                    StandardField::new(q2, h2, mu0),
                )))
            }
            FieldSpec::Profile { r, f0, f1p, f1pp, f2pp } => {
                if r < 0.0 {
                    return Err(Error::Validation(format!("field.r must be >= 0, got {r}")));
                }
                Ok(Field::Profile(ProfileField::new(
                    r,
                    EquatorialProfile { f0, f1p, f1pp, f2pp },
                )))
            }
        }
    }
}

/// Branch selector inside a task.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchSpec {
    Regular {
        r: f64,
        #[serde(default)]
        theta0: f64,
        sign: Sign,
        xi2: f64,
    },
    Singular { xi1: f64, xi2: f64 },
}

impl BranchSpec {
    fn build(&self, body: &BodyParams, field: &Field) -> Result<RelEqBranch> {
        match *self {
            BranchSpec::Regular { r, theta0, sign, xi2 } => {
                make_regular(body, field, r, theta0, sign, xi2)
            }
            BranchSpec::Singular { xi1, xi2 } => make_singular(body, field, xi1, xi2),
        }
    }
}

/// Explicit phase-space state (rotation entries row-major).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpec {
    pub a: [f64; 9],
    pub x: [f64; 3],
    pub pi: [f64; 3],
    pub p: [f64; 3],
}

impl StateSpec {
    fn build(&self) -> Result<PhasePoint> {
        let a = Mat3::from_row_slice(&self.a);
        let g = Se3::new(a, Vec3::from_row_slice(&self.x));
        g.validate()?;
        Ok(PhasePoint::new(
            g,
            BodyMomentum::new(Vec3::from_row_slice(&self.pi), Vec3::from_row_slice(&self.p)),
        ))
    }
}

/// Initial data for a simulation: either an explicit state or a constructed
/// branch with an optional 12-component displacement `(δA, δx, δΠ, δp)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Branch {
        branch: BranchSpec,
        #[serde(default)]
        perturbation: Option<[f64; 12]>,
    },
    State { state: StateSpec },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskSpec {
    /// Integrate the flow and export the trajectory.
    Simulate {
        initial: InitialSpec,
        t_end: f64,
        dt: f64,
        #[serde(default = "default_stride")]
        stride: usize,
    },
    /// Construct a branch and serialize it with its residual.
    Releq { branch: BranchSpec },
    /// Energy–momentum stability report of a branch.
    Stability { branch: BranchSpec },
    /// Spectrum of the projected linearization of a branch.
    Linearize { branch: BranchSpec },
    /// Sweep the orbit radius of the regular branch at fixed ξ₂.
    SweepR {
        r_min: f64,
        r_max: f64,
        samples: usize,
        xi2: f64,
        sign: Sign,
        #[serde(default)]
        theta0: f64,
    },
    /// Sweep ξ₂ for a regular branch at fixed radius, or for the singular
    /// branch at fixed ξ₁.
    SweepXi2 {
        branch: SweepBranch,
        xi2_min: f64,
        xi2_max: f64,
        samples: usize,
    },
    /// Grid over (r, ξ₂) for the regular branch, or (ξ₁, ξ₂) for the singular.
    Grid {
        branch: GridBranch,
        xi2_min: f64,
        xi2_max: f64,
        n_xi2: usize,
    },
}

fn default_stride() -> usize {
    1
}

/// Fixed part of a ξ₂ sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepBranch {
    Regular { r: f64, sign: Sign },
    Singular { xi1: f64 },
}

/// First grid axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridBranch {
    Regular {
        r_min: f64,
        r_max: f64,
        n_r: usize,
        sign: Sign,
    },
    Singular {
        xi1_min: f64,
        xi1_max: f64,
        n_xi1: usize,
    },
}

/// One scenario document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub body: BodyParams,
    pub field: FieldSpec,
    pub task: TaskSpec,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| Error::Validation(format!("json: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.body.validate()?;
        self.field.build()?;
        match &self.task {
            TaskSpec::Simulate { t_end, dt, stride, .. } => {
                if !(*dt > 0.0) {
                    return Err(Error::Validation(format!("dt must be positive, got {dt}")));
                }
                if !(*t_end >= 0.0) {
                    return Err(Error::Validation(format!(
                        "t_end must be nonnegative, got {t_end}"
                    )));
                }
                if *stride == 0 {
                    return Err(Error::Validation("stride must be >= 1".into()));
                }
            }
            TaskSpec::SweepR { r_min, r_max, samples, .. } => {
                validate_range("r", *r_min, *r_max, *samples)?;
                if !(*r_min > 0.0) {
                    return Err(Error::Validation(format!(
                        "r_min must be positive, got {r_min}"
                    )));
                }
            }
            TaskSpec::SweepXi2 { xi2_min, xi2_max, samples, branch } => {
                validate_range("xi2", *xi2_min, *xi2_max, *samples)?;
                if let SweepBranch::Regular { r, .. } = branch {
                    if !(*r > 0.0) {
                        return Err(Error::Validation(format!("r must be positive, got {r}")));
                    }
                }
            }
            TaskSpec::Grid { branch, xi2_min, xi2_max, n_xi2 } => {
                validate_range("xi2", *xi2_min, *xi2_max, *n_xi2)?;
                match branch {
                    GridBranch::Regular { r_min, r_max, n_r, .. } => {
                        validate_range("r", *r_min, *r_max, *n_r)?;
                        if !(*r_min > 0.0) {
                            return Err(Error::Validation(format!(
                                "r_min must be positive, got {r_min}"
                            )));
                        }
                    }
                    GridBranch::Singular { xi1_min, xi1_max, n_xi1 } => {
                        validate_range("xi1", *xi1_min, *xi1_max, *n_xi1)?;
                    }
                }
            }
            TaskSpec::Releq { branch }
            | TaskSpec::Stability { branch }
            | TaskSpec::Linearize { branch } => {
                if let BranchSpec::Regular { r, .. } = branch {
                    if !(*r > 0.0) {
                        return Err(Error::Validation(format!("r must be positive, got {r}")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn validate_range(name: &str, lo: f64, hi: f64, n: usize) -> Result<()> {
    if !(lo < hi) {
        return Err(Error::Validation(format!(
            "{name} range is empty: [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(Error::Validation(format!(
            "{name} sweep needs at least 2 samples, got {n}"
        )));
    }
    Ok(())
}

/// Files written by a run, plus a numerical-failure flag when a task finished
/// only partially (the files then contain the partial data).
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub numerical_failure: Option<String>,
}

/// One evaluated point of a sweep.
struct SweepRow {
    swept: Vec<(&'static str, f64)>,
    xi1: f64,
    report: StabilityReport,
    max_re: f64,
    classification: SpectralClass,
}

fn evaluate_branch_row(
    body: &BodyParams,
    field: &Field,
    branch: &RelEqBranch,
    swept: Vec<(&'static str, f64)>,
) -> Result<SweepRow> {
    let report = stability_report(body, field, branch)?;
    let x_full = full_linearization(body, field, &branch.z0, &branch.xi())?;
    let w = stability_space_for(branch, body);
    let xq = project_xq(&x_full, &w, &branch.z0.m)?;
    let spectrum = eigenvalues(&xq)?;
    Ok(SweepRow {
        swept,
        xi1: branch.xi1,
        report,
        max_re: spectrum.max_re,
        classification: spectrum.classification,
    })
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    if rows.is_empty() {
        return out;
    }
    let first = &rows[0];
    let mut header: Vec<String> = first
        .swept
        .iter()
        .map(|(name, _)| (*name).to_string())
        .collect();
    header.push("xi1_0".into());
    for i in 0..first.report.signature.pivots.len() {
        header.push(format!("pivot_{}", i + 1));
    }
    header.extend(["n_plus".into(), "n_minus".into(), "n_zero".into()]);
    for f in &first.report.flags.flags {
        header.push(format!("flag_{}", f.name));
        header.push(format!("margin_{}", f.name));
    }
    if let Some(opt) = &first.report.singular_optimal {
        header.push(format!("flag_{}", opt.name));
        header.push(format!("margin_{}", opt.name));
    }
    header.extend([
        "definite".into(),
        "marginal".into(),
        "max_re".into(),
        "classification".into(),
    ]);
    out.push_str(&header.join(","));
    out.push('\n');

    for row in rows {
        let mut cols: Vec<String> = row.swept.iter().map(|(_, v)| fmt17(*v)).collect();
        cols.push(fmt17(row.xi1));
        for p in &row.report.signature.pivots {
            cols.push(fmt17(*p));
        }
        cols.push(row.report.signature.n_plus.to_string());
        cols.push(row.report.signature.n_minus.to_string());
        cols.push(row.report.signature.n_zero.to_string());
        for f in &row.report.flags.flags {
            cols.push(if f.satisfied { "1".into() } else { "0".into() });
            cols.push(fmt17(f.margin));
        }
        if let Some(opt) = &row.report.singular_optimal {
            cols.push(if opt.satisfied { "1".into() } else { "0".into() });
            cols.push(fmt17(opt.margin));
        }
        cols.push(if row.report.signature.definite { "1".into() } else { "0".into() });
        cols.push(if row.report.signature.marginal { "1".into() } else { "0".into() });
        cols.push(fmt17(row.max_re));
        cols.push(row.classification.to_string());
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(feature = "parallel")]
fn map_indexed<T: Send, F: Fn(usize) -> Result<T> + Send + Sync>(n: usize, f: F) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_indexed<T, F: Fn(usize) -> Result<T>>(n: usize, f: F) -> Result<Vec<T>> {
    (0..n).map(f).collect()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

/// Execute a scenario, writing outputs under `out_dir`.
///
/// `threads` caps the worker count for grid evaluations (0 = library default).
pub fn run(scenario: &Scenario, out_dir: &Path, threads: usize) -> Result<RunOutput> {
    scenario.validate()?;
    std::fs::create_dir_all(out_dir)?;

    #[cfg(feature = "parallel")]
    if threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Numerical(e.to_string()))?;
        let scenario = scenario.clone();
        let out_dir = out_dir.to_path_buf();
        return pool.install(move || run_inner(&scenario, &out_dir));
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    run_inner(scenario, out_dir)
}

fn run_inner(scenario: &Scenario, out_dir: &Path) -> Result<RunOutput> {
    let body = scenario.body;
    let field = scenario.field.build()?;
    let mut files = Vec::new();
    let mut numerical_failure = None;

    match &scenario.task {
        TaskSpec::Simulate { initial, t_end, dt, stride } => {
            let z0 = match initial {
                InitialSpec::State { state } => state.build()?,
                InitialSpec::Branch { branch, perturbation } => {
                    let b = branch.build(&body, &field)?;
                    match perturbation {
                        Some(d) => displace(&b.z0, d),
                        None => b.z0,
                    }
                }
            };
            let traj = integrate(&body, &field, &z0, *t_end, *dt, *stride)?;
            if let Some(flag) = &traj.aborted {
                numerical_failure = Some(flag.clone());
            }
            let path = out_dir.join("trajectory.csv");
            write_file(&path, &traj.to_csv())?;
            files.push(path);
        }
        TaskSpec::Releq { branch } => {
            let b = branch.build(&body, &field)?;
            let residual = crate::releq::scaled_residual_norm(&body, &field, &b.z0, &b.xi())?;
            #[derive(Serialize)]
            struct ReleqOut<'a> {
                branch: &'a RelEqBranch,
                scaled_residual: f64,
            }
            let path = out_dir.join("releq.json");
            write_file(
                &path,
                &serde_json::to_string_pretty(&ReleqOut {
                    branch: &b,
                    scaled_residual: residual,
                })
                .map_err(|e| Error::Numerical(e.to_string()))?,
            )?;
            files.push(path);
        }
        TaskSpec::Stability { branch } => {
            let b = branch.build(&body, &field)?;
            let report = stability_report(&body, &field, &b)?;
            let path = out_dir.join("stability.json");
            write_file(
                &path,
                &serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::Numerical(e.to_string()))?,
            )?;
            files.push(path);
        }
        TaskSpec::Linearize { branch } => {
            let b = branch.build(&body, &field)?;
            let verdict = classify_branch(&body, &field, &b)?;
            let json_path = out_dir.join("verdict.json");
            write_file(
                &json_path,
                &serde_json::to_string_pretty(&verdict)
                    .map_err(|e| Error::Numerical(e.to_string()))?,
            )?;
            files.push(json_path);

            let mut header = vec![
                "r".to_string(),
                "theta0".into(),
                "xi1".into(),
                "xi2".into(),
            ];
            let n = verdict.spectrum.eigenvalues.len();
            for i in 1..=n {
                header.push(format!("re_{i}"));
                header.push(format!("im_{i}"));
            }
            header.push("max_re".into());
            header.push("classification".into());
            let mut cols = vec![fmt17(b.r), fmt17(b.theta0), fmt17(b.xi1), fmt17(b.xi2)];
            for (re, im) in &verdict.spectrum.eigenvalues {
                cols.push(fmt17(*re));
                cols.push(fmt17(*im));
            }
            cols.push(fmt17(verdict.spectrum.max_re));
            cols.push(verdict.spectrum.classification.to_string());
            let csv = format!("{}\n{}\n", header.join(","), cols.join(","));
            let path = out_dir.join("spectrum.csv");
            write_file(&path, &csv)?;
            files.push(path);
        }
        TaskSpec::SweepR { r_min, r_max, samples, xi2, sign, theta0 } => {
            // Fail early (validation) if the sign constraint kills the sweep.
            probe_regular(&body, &field, 0.5 * (r_min + r_max), *theta0, *sign, *xi2)?;
            let rs = linspace(*r_min, *r_max, *samples);
            let rows = map_indexed(rs.len(), |i| {
                let r = rs[i];
                let b = make_regular(&body, &field, r, *theta0, *sign, *xi2)?;
                evaluate_branch_row(&body, &field, &b, vec![("r", r), ("xi2", *xi2)])
            })?;
            let path = out_dir.join("sweep.csv");
            write_file(&path, &sweep_csv(&rows))?;
            files.push(path);
        }
        TaskSpec::SweepXi2 { branch, xi2_min, xi2_max, samples } => {
            let xs = linspace(*xi2_min, *xi2_max, *samples);
            let rows = match branch {
                SweepBranch::Regular { r, sign } => {
                    probe_regular(&body, &field, *r, 0.0, *sign, 0.5 * (xi2_min + xi2_max))?;
                    map_indexed(xs.len(), |i| {
                        let b = make_regular(&body, &field, *r, 0.0, *sign, xs[i])?;
                        evaluate_branch_row(&body, &field, &b, vec![("r", *r), ("xi2", xs[i])])
                    })?
                }
                SweepBranch::Singular { xi1 } => map_indexed(xs.len(), |i| {
                    let b = make_singular(&body, &field, *xi1, xs[i])?;
                    evaluate_branch_row(&body, &field, &b, vec![("xi1", *xi1), ("xi2", xs[i])])
                })?,
            };
            let path = out_dir.join("sweep.csv");
            write_file(&path, &sweep_csv(&rows))?;
            files.push(path);
        }
        TaskSpec::Grid { branch, xi2_min, xi2_max, n_xi2 } => {
            let xi2s = linspace(*xi2_min, *xi2_max, *n_xi2);
            let rows = match branch {
                GridBranch::Regular { r_min, r_max, n_r, sign } => {
                    probe_regular(
                        &body,
                        &field,
                        0.5 * (r_min + r_max),
                        0.0,
                        *sign,
                        0.5 * (xi2_min + xi2_max),
                    )?;
                    let rs = linspace(*r_min, *r_max, *n_r);
                    map_indexed(rs.len() * xi2s.len(), |k| {
                        let (i, j) = (k / xi2s.len(), k % xi2s.len());
                        let b = make_regular(&body, &field, rs[i], 0.0, *sign, xi2s[j])?;
                        evaluate_branch_row(
                            &body,
                            &field,
                            &b,
                            vec![("r", rs[i]), ("xi2", xi2s[j])],
                        )
                    })?
                }
                GridBranch::Singular { xi1_min, xi1_max, n_xi1 } => {
                    let xi1s = linspace(*xi1_min, *xi1_max, *n_xi1);
                    map_indexed(xi1s.len() * xi2s.len(), |k| {
                        let (i, j) = (k / xi2s.len(), k % xi2s.len());
                        let b = make_singular(&body, &field, xi1s[i], xi2s[j])?;
                        evaluate_branch_row(
                            &body,
                            &field,
                            &b,
                            vec![("xi1", xi1s[i]), ("xi2", xi2s[j])],
                        )
                    })?
                }
            };
            let path = out_dir.join("grid.csv");
            write_file(&path, &sweep_csv(&rows))?;
            files.push(path);
        }
    }
    Ok(RunOutput {
        files,
        numerical_failure,
    })
}

fn probe_regular(
    body: &BodyParams,
    field: &Field,
    r: f64,
    theta0: f64,
    sign: Sign,
    xi2: f64,
) -> Result<()> {
    match make_regular(body, field, r, theta0, sign, xi2) {
        Ok(_) => Ok(()),
        Err(Error::SignConstraint { context, value }) => Err(Error::Validation(format!(
            "regular sweep impossible: sign constraint {context} = {value:.3e} must be negative"
        ))),
        Err(e) => Err(e),
    }
}

/// Apply a 12-component left-trivialized displacement `(δA, δx, δΠ, δp)`.
pub fn displace(z: &PhasePoint, delta: &[f64; 12]) -> PhasePoint {
    let da = Vec3::new(delta[0], delta[1], delta[2]);
    let dx = Vec3::new(delta[3], delta[4], delta[5]);
    let dpi = Vec3::new(delta[6], delta[7], delta[8]);
    let dp = Vec3::new(delta[9], delta[10], delta[11]);
    PhasePoint {
        g: Se3 {
            a: z.g.a * exp_so3(&da),
            x: z.g.x + z.g.a * dx,
        },
        m: BodyMomentum {
            pi: z.m.pi + dpi,
            p: z.m.p + dp,
        },
    }
}

/// Plot flavor for [`emit_plot_script`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Line,
    Heatmap,
}

/// Generate a standalone Python/matplotlib script that renders a sweep CSV.
///
/// Condition-boundary markers are placed at sign changes of the `margin_*`
/// columns, so the script stays valid for any parameter set. The tool never
/// executes the script.
pub fn emit_plot_script(csv_path: &Path, kind: PlotKind) -> Result<String> {
    let text = std::fs::read_to_string(csv_path)?;
    let mut lines = text.lines();
    let header: Vec<&str> = match lines.next() {
        Some(h) if !h.trim().is_empty() => h.split(',').collect(),
        _ => return Err(Error::MissingColumns("csv has no header row".into())),
    };
    if lines.next().is_none() {
        return Err(Error::MissingColumns("csv has no data rows".into()));
    }
    if !header.contains(&"max_re") {
        return Err(Error::MissingColumns("max_re".into()));
    }
    let csv_name = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| csv_path.display().to_string());
    match kind {
        PlotKind::Line => {
            let sweep_col = header[0];
            Ok(format!(
                r#"#!/usr/bin/env python3
"""Line plot of max Re(lambda) over a parameter sweep, with markers at the
sign changes of every margin_* column (the closed-form condition boundaries).
Reads {csv} from the working directory."""
import csv
import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

PATH = {csv:?}
SWEEP = {sweep:?}

with open(PATH, newline="") as fh:
    rows = list(csv.DictReader(fh))
if not rows:
    raise SystemExit("no data rows in " + PATH)

x = [float(r[SWEEP]) for r in rows]
y = [float(r["max_re"]) for r in rows]

fig, ax = plt.subplots(figsize=(7.5, 4.0))
ax.plot(x, y, lw=1.2, color="k")
ax.axhline(0.0, color="0.7", lw=0.6)

for col in rows[0]:
    if not col.startswith("margin_"):
        continue
    m = [float(r[col]) for r in rows]
    for i in range(1, len(m)):
        if not (math.isfinite(m[i - 1]) and math.isfinite(m[i])):
            continue
        if (m[i - 1] > 0.0) == (m[i] > 0.0):
            continue
        t = m[i - 1] / (m[i - 1] - m[i])
        xc = x[i - 1] + t * (x[i] - x[i - 1])
        ax.axvline(xc, color="red", ls=":", lw=0.9)
        ax.plot([xc], [0.0], "o", color="red", ms=5)

ax.set_xlabel(SWEEP)
ax.set_ylabel("max Re(lambda) [1/s]")
ax.set_title("spectral instability vs " + SWEEP)
fig.tight_layout()
out = PATH.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=160)
print("wrote", out)
"#,
                csv = csv_name,
                sweep = sweep_col,
            ))
        }
        PlotKind::Heatmap => {
            if header.len() < 2 {
                return Err(Error::MissingColumns(
                    "heatmap needs two leading axis columns".into(),
                ));
            }
            let (ax0, ax1) = (header[0], header[1]);
            Ok(format!(
                r#"#!/usr/bin/env python3
"""Heatmap of the spectral classification over a 2-d parameter grid.
Reads {csv} from the working directory."""
import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

PATH = {csv:?}
AX0 = {ax0:?}
AX1 = {ax1:?}

with open(PATH, newline="") as fh:
    rows = list(csv.DictReader(fh))
if not rows:
    raise SystemExit("no data rows in " + PATH)

xs = sorted(set(float(r[AX0]) for r in rows))
ys = sorted(set(float(r[AX1]) for r in rows))
ix = {{v: i for i, v in enumerate(xs)}}
iy = {{v: i for i, v in enumerate(ys)}}
z = [[float("nan")] * len(xs) for _ in ys]
s = [[float("nan")] * len(xs) for _ in ys]
for r in rows:
    i = ix[float(r[AX0])]
    j = iy[float(r[AX1])]
    z[j][i] = float(r["max_re"])
    s[j][i] = {{"spectrally_stable": 0.0, "marginal": 0.5, "spectrally_unstable": 1.0}}[
        r["classification"]
    ]

fig, (a1, a2) = plt.subplots(1, 2, figsize=(11, 4.2))
m1 = a1.pcolormesh(xs, ys, z, shading="nearest", cmap="magma")
fig.colorbar(m1, ax=a1, label="max Re(lambda) [1/s]")
a1.set_xlabel(AX0)
a1.set_ylabel(AX1)
a1.set_title("max Re(lambda)")
m2 = a2.pcolormesh(xs, ys, s, shading="nearest", cmap="RdYlGn_r", vmin=0.0, vmax=1.0)
fig.colorbar(m2, ax=a2, label="0 stable / 0.5 marginal / 1 unstable")
a2.set_xlabel(AX0)
a2.set_ylabel(AX1)
a2.set_title("classification")
fig.tight_layout()
out = PATH.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=160)
print("wrote", out)
"#,
                csv = csv_name,
                ax0 = ax0,
                ax1 = ax1,
            ))
        }
    }
}
