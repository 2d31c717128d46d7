//! Adaptive integration of the transformed initial-value problem
//!
//! ```text
//! v' = 2(g-1)√2 √v + p(γ) γ,    v(1) = 2(g-1)²
//! ```
//!
//! with Dormand–Prince 5(4) steps. The solution either reaches `γ_end` or
//! runs into `v = 0` with a strictly negative slope at some `γ⋆`, past which
//! it cannot be continued. Because `√v` is only Hölder-continuous at the
//! origin, a crossing of the breakdown floor is located by bisecting the
//! length of a single step rather than by interpolation.

use serde::{Deserialize, Serialize};

use crate::coeffs::CoeffSet;
use crate::error::{Error, Result};

/// Breakdown floor relative to `v(1) = 2(g-1)²`.
pub const BREAKDOWN_FLOOR_REL: f64 = 1e-12;

/// Below this value (relative to `v(1)`) and with negative slope, the
/// integrator stops trusting its error estimate and steps straight at the
/// predicted zero.
const NEAR_BREAKDOWN_REL: f64 = 1e-6;

/// Width in `γ` at which breakdown localisation stops.
const EVENT_TOL: f64 = 1e-12;

const MAX_STEPS: usize = 2_000_000;

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", rename_all_fields = "camelCase")]
pub enum Status {
    Complete,
    Breakdown { gamma_star: f64 },
}

/// An accepted step endpoint, used for Hermite dense output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub gamma: f64,
    pub v: f64,
    pub slope: f64,
}

/// Numerical solution of the transformed IVP.
#[derive(Debug, Clone)]
pub struct IvpTrajectory {
    pub coeffs: CoeffSet,
    pub tol: f64,
    /// Uniform grid over `[1, γ_end]`; truncated at `γ⋆` on breakdown,
    /// with `γ⋆` itself appended as the last entry.
    pub gamma_grid: Vec<f64>,
    pub v_values: Vec<f64>,
    pub status: Status,
    pub knots: Vec<Knot>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Absolute breakdown floor used for this run.
    pub floor: f64,
}

/// Right-hand side of the transformed equation.
pub fn rhs(coeffs: &CoeffSet, gamma: f64, v: f64) -> f64 {
    let k = coeffs.spec.genus_factor();
    2.0 * k * std::f64::consts::SQRT_2 * v.max(0.0).sqrt() + coeffs.p_raw(gamma) * gamma
}

struct Step {
    v: f64,
    err: f64,
}

fn dopri_step(coeffs: &CoeffSet, x: f64, v: f64, k1: f64, h: f64) -> Step {
    let f = |x: f64, y: f64| rhs(coeffs, x, y);
    let k2 = f(x + C2 * h, v + h * A21 * k1);
    let k3 = f(x + C3 * h, v + h * (A31 * k1 + A32 * k2));
    let k4 = f(x + C4 * h, v + h * (A41 * k1 + A42 * k2 + A43 * k3));
    let k5 = f(x + C5 * h, v + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    let k6 = f(x + h, v + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    let v_new = v + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = f(x + h, v_new);
    let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    Step { v: v_new, err }
}

fn check_options(tol: f64, dense_count: usize) -> Result<()> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::InvalidInput(format!("integration tolerance {tol} outside [1e-14, 1e-6]")));
    }
    if dense_count < 16 {
        return Err(Error::InvalidInput(format!("dense grid needs at least 16 points, got {dense_count}")));
    }
    Ok(())
}

/// Uniform grid of `n` points over `[1, γ_end]` with exact endpoints.
pub fn uniform_grid(gamma_end: f64, n: usize) -> Vec<f64> {
    let h = (gamma_end - 1.0) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * h).collect();
    g[n - 1] = gamma_end;
    g
}

/// Integrates from `γ = 1` towards `γ_end`, stepping exactly onto every
/// point of a uniform output grid of `dense_count` points.
pub fn integrate(coeffs: &CoeffSet, tol: f64, dense_count: usize) -> Result<IvpTrajectory> {
    check_options(tol, dense_count)?;
    let spec = &coeffs.spec;
    let v0 = spec.initial_value();
    let floor = BREAKDOWN_FLOOR_REL * v0;
    let near = NEAR_BREAKDOWN_REL * v0;
    let grid = uniform_grid(spec.gamma_end, dense_count);
    let span = spec.gamma_end - 1.0;
    let h_min = 1e-14 * spec.gamma_end;

    let mut x = 1.0;
    let mut v = v0;
    let mut fx = rhs(coeffs, x, v);
    let mut knots = vec![Knot { gamma: x, v, slope: fx }];
    let mut out_g = vec![grid[0]];
    let mut out_v = vec![v];
    let mut next = 1;
    let mut h_ctrl = (grid[1] - grid[0]).min(1e-3 * span).max(h_min * 16.0);
    let (mut accepted, mut rejected) = (0usize, 0usize);

    while next < grid.len() {
        if accepted + rejected > MAX_STEPS {
            return Err(Error::StepCollapse { gamma: x, v });
        }
        let stop = grid[next];
        let to_stop = stop - x;

        if v < near && fx < 0.0 {
            // Step directly at the linearly predicted zero; the √v term only
            // makes v fall faster, so twice the prediction brackets it.
            let h = (2.0 * v / -fx).min(to_stop);
            let step = dopri_step(coeffs, x, v, fx, h);
            if !(step.v > floor) {
                return finish_breakdown(coeffs, tol, x, v, fx, h, floor, knots, out_g, out_v, accepted, rejected);
            }
            accepted += 1;
            x = if h == to_stop { stop } else { x + h };
            v = step.v;
            fx = rhs(coeffs, x, v);
            knots.push(Knot { gamma: x, v, slope: fx });
            if x == stop {
                out_g.push(x);
                out_v.push(v);
                next += 1;
            }
            continue;
        }

        let hits_stop = h_ctrl >= to_stop;
        let h = if hits_stop { to_stop } else { h_ctrl };
        let step = dopri_step(coeffs, x, v, fx, h);
        let scale = tol + tol * v.abs().max(step.v.abs());
        let err = (step.err / scale).abs();
        if !err.is_finite() || err > 1.0 {
            rejected += 1;
            let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.1) } else { 0.1 };
            h_ctrl = h * factor;
            if h_ctrl < h_min {
                return Err(Error::StepCollapse { gamma: x, v });
            }
            continue;
        }
        if !(step.v > floor) {
            return finish_breakdown(coeffs, tol, x, v, fx, h, floor, knots, out_g, out_v, accepted, rejected);
        }
        accepted += 1;
        x = if hits_stop { stop } else { x + h };
        v = step.v;
        fx = rhs(coeffs, x, v);
        knots.push(Knot { gamma: x, v, slope: fx });
        if hits_stop {
            out_g.push(x);
            out_v.push(v);
            next += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        // Keep the controller's proposal when the step was only shortened
        // to land on an output point.
        h_ctrl = if hits_stop { h_ctrl.max(h * factor) } else { h * factor };
    }

    Ok(IvpTrajectory {
        coeffs: *coeffs,
        tol,
        gamma_grid: out_g,
        v_values: out_v,
        status: Status::Complete,
        knots,
        accepted_steps: accepted,
        rejected_steps: rejected,
        floor,
    })
}

/// Locates the floor crossing inside `(x, x + h]` by bisecting the length
/// of a single step from the last accepted state.
#[allow(clippy::too_many_arguments)]
fn finish_breakdown(
    coeffs: &CoeffSet,
    tol: f64,
    x: f64,
    v: f64,
    fx: f64,
    h: f64,
    floor: f64,
    mut knots: Vec<Knot>,
    mut out_g: Vec<f64>,
    mut out_v: Vec<f64>,
    accepted: usize,
    rejected: usize,
) -> Result<IvpTrajectory> {
    let (mut lo, mut hi) = (0.0_f64, h);
    let mut v_lo = v;
    let mut v_hi = dopri_step(coeffs, x, v, fx, h).v;
    while hi - lo > EVENT_TOL {
        let mid = 0.5 * (lo + hi);
        let vm = dopri_step(coeffs, x, v, fx, mid).v;
        if vm > floor {
            lo = mid;
            v_lo = vm;
        } else {
            hi = mid;
            v_hi = vm;
        }
    }
    let gamma_star = x + 0.5 * (lo + hi);
    // A genuine breakdown needs a strictly negative limiting slope.
    if rhs(coeffs, gamma_star, floor) >= 0.0 {
        return Err(Error::StepCollapse { gamma: gamma_star, v: floor });
    }
    if lo > 0.0 {
        let g = x + lo;
        knots.push(Knot { gamma: g, v: v_lo, slope: rhs(coeffs, g, v_lo) });
    }
    let v_star = if v_hi.is_finite() { v_hi.max(0.0) } else { 0.0 };
    out_g.push(gamma_star);
    out_v.push(v_star.min(floor));
    Ok(IvpTrajectory {
        coeffs: *coeffs,
        tol,
        gamma_grid: out_g,
        v_values: out_v,
        status: Status::Breakdown { gamma_star },
        knots,
        accepted_steps: accepted,
        rejected_steps: rejected,
        floor,
    })
}

impl IvpTrajectory {
    pub fn is_complete(&self) -> bool {
        matches!(self.status, Status::Complete)
    }

    pub fn gamma_star(&self) -> Option<f64> {
        match self.status {
            Status::Complete => None,
            Status::Breakdown { gamma_star } => Some(gamma_star),
        }
    }

    /// `u(γ_end)`: the end value, or 0 after a breakdown.
    pub fn end_value(&self) -> f64 {
        match self.status {
            Status::Complete => *self.v_values.last().expect("non-empty trajectory"),
            Status::Breakdown { .. } => 0.0,
        }
    }

    /// Cubic Hermite interpolation on accepted steps; `None` outside the
    /// existence interval.
    pub fn eval(&self, gamma: f64) -> Option<f64> {
        let first = self.knots.first()?;
        let last = self.knots.last()?;
        if gamma < first.gamma || gamma > last.gamma || gamma.is_nan() {
            return None;
        }
        let idx = match self.knots.binary_search_by(|k| k.gamma.total_cmp(&gamma)) {
            Ok(i) => return Some(self.knots[i].v),
            Err(i) => i,
        };
        let (k0, k1) = (&self.knots[idx - 1], &self.knots[idx]);
        let h = k1.gamma - k0.gamma;
        let t = (gamma - k0.gamma) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Some(h00 * k0.v + h10 * h * k0.slope + h01 * k1.v + h11 * h * k1.slope)
    }
}

/// The solution extended by zero past its breakdown point.
#[derive(Debug, Clone)]
pub struct ExtendedSolution {
    pub trajectory: IvpTrajectory,
}

impl ExtendedSolution {
    /// `u(γ)` on `[1, γ_end]`.
    pub fn at(&self, gamma: f64) -> Result<f64> {
        self.trajectory.coeffs.spec.check_domain(gamma)?;
        let gamma = gamma.clamp(1.0, self.trajectory.coeffs.spec.gamma_end);
        if let Some(gs) = self.trajectory.gamma_star() {
            if gamma >= gs {
                return Ok(0.0);
            }
        }
        // Inside the existence interval the interpolant is always defined.
        Ok(self.trajectory.eval(gamma).unwrap_or(0.0).max(0.0))
    }

    /// `u` on the uniform grid of `n` points over `[1, γ_end]`.
    pub fn sample(&self, n: usize) -> Result<Vec<(f64, f64)>> {
        uniform_grid(self.trajectory.coeffs.spec.gamma_end, n.max(2))
            .into_iter()
            .map(|g| self.at(g).map(|u| (g, u)))
            .collect()
    }
}

/// Integrates and wraps the result as the zero-extended solution `u`.
pub fn u_extended(coeffs: &CoeffSet, tol: f64) -> Result<ExtendedSolution> {
    Ok(ExtendedSolution { trajectory: integrate(coeffs, tol, DEFAULT_DENSE)? })
}

/// Dense grid size used when none is requested.
pub const DEFAULT_DENSE: usize = 512;
