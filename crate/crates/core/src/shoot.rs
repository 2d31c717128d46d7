//! Outer solves over the shooting constant `C`.
//!
//! The zero-extended end value `u(γ_end; C)` is non-increasing in `C` and
//! strictly decreasing on the set where the solution exists, so both the
//! boundary-value solve and the existence threshold reduce to bisection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{coeffs_from_c, constants_ln, CoeffSet, SurfaceSpec};
use crate::error::{Error, Result};
use crate::ivp::{integrate, rhs, IvpTrajectory, Status, DEFAULT_DENSE};

/// Relative shooting tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-9;

const MAX_BISECTIONS: usize = 200;
/// Doubling stops at `2 + 2^60`.
const MAX_DOUBLINGS: i32 = 60;

/// Knobs shared by the outer solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relative tolerance on the end value.
    pub tol: f64,
    /// Number of points on the dense output grid.
    pub grid: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, grid: DEFAULT_DENSE }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    /// Tolerance handed to the integrator.
    pub fn ivp_tol(&self) -> f64 {
        (self.tol * 1e-3).clamp(1e-13, 1e-6)
    }

    fn check(&self) -> Result<()> {
        if !(1e-12..=1e-6).contains(&self.tol) {
            return Err(Error::InvalidInput(format!("tolerance {} outside [1e-12, 1e-6]", self.tol)));
        }
        if self.grid < 16 {
            return Err(Error::InvalidInput(format!("grid must have at least 16 points, got {}", self.grid)));
        }
        Ok(())
    }
}

/// Residual magnitudes of a converged shooting solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShootResiduals {
    /// `|v(γ_end) - target|`.
    pub endpoint: f64,
    /// `endpoint / target`.
    pub endpoint_rel: f64,
    /// `|v'(1) - 2(g-1)(2(g-1) + |d|)|` from the right-hand side.
    pub start_slope: f64,
    /// `|v'(γ_end) - 2(g-1)γ_end(2(g-1) - |d|)|`, not imposed by the solve.
    pub end_slope: f64,
    /// `min (v(γ) - 2(g-1)²γ²)` over interior grid points.
    pub interior_margin: f64,
}

/// A converged solution of the boundary-value problem.
#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub spec: SurfaceSpec,
    pub c_star: f64,
    pub coeffs: CoeffSet,
    pub trajectory: IvpTrajectory,
    pub residuals: ShootResiduals,
    pub iterations: usize,
    /// Final bisection bracket `[lo, hi]`.
    pub bracket: (f64, f64),
    pub options: SolveOptions,
}

/// The existence threshold `M` and the bracket it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Threshold {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

fn run(spec: &SurfaceSpec, c: f64, opts: &SolveOptions) -> Result<IvpTrajectory> {
    integrate(&coeffs_from_c(spec, c), opts.ivp_tol(), opts.grid)
}

/// First `2 + 2^k` at which `keep_going` fails, with the number of integrations.
fn double_until(
    spec: &SurfaceSpec,
    opts: &SolveOptions,
    mut keep_going: impl FnMut(&IvpTrajectory) -> bool,
) -> Result<(f64, usize)> {
    for k in 0..=MAX_DOUBLINGS {
        let c = 2.0 + 2f64.powi(k);
        let t = run(spec, c, opts)?;
        if !keep_going(&t) {
            return Ok((c, k as usize + 1));
        }
    }
    Err(Error::NoBracket { c: 2.0 + 2f64.powi(MAX_DOUBLINGS) })
}

/// Finds the unique `C*` with `v(γ_end; C*) = 2(g-1)² γ_end²`.
pub fn solve_bvp(spec: &SurfaceSpec, tol: f64) -> Result<BvpSolution> {
    solve_bvp_with(spec, &SolveOptions::with_tol(tol))
}

pub fn solve_bvp_with(spec: &SurfaceSpec, opts: &SolveOptions) -> Result<BvpSolution> {
    opts.check()?;
    let target = spec.target();
    let mut iterations = 1;

    // C* > 2 and the objective decreases, so C = 2 sits below the root.
    // Step further down should a surface ever violate that.
    let mut lo = 2.0;
    let mut down = 0;
    while run(spec, lo, opts)?.end_value() <= target {
        down += 1;
        if down > MAX_DOUBLINGS {
            return Err(Error::NoBracket { c: lo });
        }
        lo = 2.0 - 2f64.powi(down);
        iterations += 1;
    }
    let (hi, n) = double_until(spec, opts, |t| t.end_value() >= target)?;
    let mut sol = bisect_target(spec, opts, lo, hi)?;
    sol.iterations += iterations + n;
    Ok(sol)
}

/// Solves from a caller-supplied bracket with `u(lo) > target > u(hi)`.
pub fn solve_bvp_in(spec: &SurfaceSpec, opts: &SolveOptions, lo: f64, hi: f64) -> Result<BvpSolution> {
    opts.check()?;
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("bracket [{lo}, {hi}] is empty")));
    }
    let target = spec.target();
    if run(spec, lo, opts)?.end_value() <= target {
        return Err(Error::NoBracket { c: lo });
    }
    if run(spec, hi, opts)?.end_value() >= target {
        return Err(Error::NoBracket { c: hi });
    }
    let mut sol = bisect_target(spec, opts, lo, hi)?;
    sol.iterations += 2;
    Ok(sol)
}

fn bisect_target(spec: &SurfaceSpec, opts: &SolveOptions, mut lo: f64, mut hi: f64) -> Result<BvpSolution> {
    let target = spec.target();
    let stop = 1e-3 * opts.tol * target;
    let mut iterations = 0;
    let mut best: Option<(f64, IvpTrajectory)> = None;
    let mut best_res = f64::INFINITY;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let t = run(spec, mid, opts)?;
        let u = t.end_value();
        let res = (u - target).abs();
        if t.is_complete() && res < best_res {
            best_res = res;
            best = Some((mid, t));
        }
        if u > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if best_res <= stop {
            break;
        }
    }

    match best {
        Some((c_star, trajectory)) if best_res <= opts.tol * target => {
            let coeffs = trajectory.coeffs;
            let residuals = shoot_residuals(&trajectory);
            Ok(BvpSolution {
                spec: *spec,
                c_star,
                coeffs,
                trajectory,
                residuals,
                iterations,
                bracket: (lo, hi),
                options: *opts,
            })
        }
        _ => Err(Error::NonConvergence { iterations, residual: best_res / target }),
    }
}

/// Residuals of a complete trajectory against the boundary data.
pub fn shoot_residuals(t: &IvpTrajectory) -> ShootResiduals {
    let spec = &t.coeffs.spec;
    let target = spec.target();
    let v_end = t.end_value();
    let endpoint = (v_end - target).abs();
    let start_slope = (rhs(&t.coeffs, 1.0, spec.initial_value()) - spec.start_slope()).abs();
    let end_slope = (rhs(&t.coeffs, spec.gamma_end, v_end) - spec.end_slope()).abs();
    let v0 = spec.initial_value();
    let n = t.gamma_grid.len();
    let interior_margin = t.gamma_grid[1..n - 1]
        .iter()
        .zip(&t.v_values[1..n - 1])
        .map(|(g, v)| v - v0 * g * g)
        .fold(f64::INFINITY, f64::min);
    ShootResiduals { endpoint, endpoint_rel: endpoint / target, start_slope, end_slope, interior_margin }
}

/// Bisects the complete/breakdown indicator for the threshold `M`.
pub fn find_m(spec: &SurfaceSpec, tol: f64) -> Result<Threshold> {
    find_m_with(spec, &SolveOptions::with_tol(tol))
}

pub fn find_m_with(spec: &SurfaceSpec, opts: &SolveOptions) -> Result<Threshold> {
    opts.check()?;
    // Every C <= 2 lies in the existence set.
    let mut lo = 2.0;
    let (mut hi, mut iterations) = double_until(spec, opts, |t| t.is_complete())?;
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= opts.tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if run(spec, mid, opts)?.is_complete() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo > opts.tol {
        return Err(Error::NonConvergence { iterations, residual: hi - lo });
    }
    Ok(Threshold { value: 0.5 * (lo + hi), lower: lo, upper: hi, iterations })
}

/// Outcome of one row of a scan over `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case", rename_all_fields = "camelCase")]
pub enum ScanOutcome {
    Complete { v_end: f64 },
    Breakdown { gamma_star: f64 },
    Failed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanRow {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(flatten)]
    pub outcome: ScanOutcome,
}

/// Integrates on a uniform grid of `steps` values of `C` in `[c_min, c_max]`.
pub fn scan_c(spec: &SurfaceSpec, c_min: f64, c_max: f64, steps: usize, opts: &SolveOptions) -> Result<Vec<ScanRow>> {
    if !(c_min < c_max) || !c_min.is_finite() || !c_max.is_finite() {
        return Err(Error::InvalidInput(format!("scan needs c_min < c_max, got [{c_min}, {c_max}]")));
    }
    if steps < 2 {
        return Err(Error::InvalidInput(format!("scan needs at least 2 steps, got {steps}")));
    }
    opts.check()?;
    let width = c_max - c_min;
    let rows = (0..steps)
        .into_par_iter()
        .map(|i| {
            let c = if i + 1 == steps { c_max } else { c_min + width * i as f64 / (steps - 1) as f64 };
            let outcome = match run(spec, c, opts) {
                Ok(t) => match t.status {
                    Status::Complete => ScanOutcome::Complete { v_end: t.end_value() },
                    Status::Breakdown { gamma_star } => ScanOutcome::Breakdown { gamma_star },
                },
                Err(e) => ScanOutcome::Failed { message: e.to_string() },
            };
            ScanRow { c, outcome }
        })
        .collect();
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhaseRow {
    pub m: f64,
    #[serde(rename = "Cstar")]
    pub c_star: Option<f64>,
    #[serde(rename = "M")]
    pub threshold: Option<f64>,
    /// `-N/L`, the lower bound for `C*`.
    pub c_lower_bound: f64,
    pub error: Option<String>,
}

/// Tabulates `C*(m)` and `M(m)` for surfaces sharing genus and degree.
pub fn phase_curve(specs: &[SurfaceSpec], opts: &SolveOptions) -> Result<Vec<PhaseRow>> {
    if let Some(first) = specs.first() {
        if specs.iter().any(|s| s.genus != first.genus || s.degree != first.degree) {
            return Err(Error::InvalidInput("phase curve surfaces must share genus and degree".into()));
        }
    }
    opts.check()?;
    let mut rows: Vec<PhaseRow> = specs
        .par_iter()
        .map(|spec| {
            let (l, n) = constants_ln(spec);
            let mut errors = Vec::new();
            let c_star = solve_bvp_with(spec, opts).map_err(|e| errors.push(e.to_string())).ok().map(|s| s.c_star);
            let threshold = find_m_with(spec, opts).map_err(|e| errors.push(e.to_string())).ok().map(|t| t.value);
            PhaseRow {
                m: spec.m,
                c_star,
                threshold,
                c_lower_bound: -n / l,
                error: if errors.is_empty() { None } else { Some(errors.join("; ")) },
            }
        })
        .collect();
    rows.sort_by(|a, b| a.m.total_cmp(&b.m));
    Ok(rows)
}
