//! Momentum profile `φ`, Chern density `λ` and the fibre coordinate `s`
//! recovered from a converged shooting solution.

use serde::{Deserialize, Serialize};

use crate::coeffs::CoeffSet;
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::shoot::BvpSolution;

/// Samples with `φ` below this fraction of `max φ` are dropped from `s`.
pub const DEFAULT_GUARD: f64 = 1e-4;

const MIN_S_SAMPLES: usize = 8;
const CELL_ORDER: usize = 8;

/// One point of the reconstructed fibre coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SSample {
    pub s: f64,
    pub tau: f64,
    pub gamma: f64,
    pub phi: f64,
}

#[derive(Debug, Clone)]
pub struct ProfileSolution {
    pub bvp: BvpSolution,
    pub gamma: Vec<f64>,
    pub v: Vec<f64>,
    pub phi: Vec<f64>,
    pub lambda: Vec<f64>,
    pub phi_prime_left: f64,
    pub phi_prime_right: f64,
    pub s_samples: Vec<SSample>,
}

impl ProfileSolution {
    pub fn coeffs(&self) -> &CoeffSet {
        &self.bvp.coeffs
    }

    /// Grid spacing of the uniform dense grid.
    pub fn step(&self) -> f64 {
        (self.gamma[self.gamma.len() - 1] - self.gamma[0]) / (self.gamma.len() - 1) as f64
    }

    /// `φ(γ)` from the interpolated trajectory, off the grid.
    pub fn phi_at(&self, gamma: f64) -> Option<f64> {
        let v = self.bvp.trajectory.eval(gamma)?;
        Some(phi_from_v(&self.bvp.coeffs, gamma, v))
    }

    pub fn max_phi(&self) -> f64 {
        self.phi.iter().copied().fold(0.0, f64::max)
    }

    /// `(τ(1), τ(γ_end))`.
    pub fn tau_endpoints(&self) -> (f64, f64) {
        let spec = &self.bvp.spec;
        (tau_of(spec.degree, 1.0), tau_of(spec.degree, spec.gamma_end))
    }
}

fn phi_from_v(coeffs: &CoeffSet, gamma: f64, v: f64) -> f64 {
    let spec = &coeffs.spec;
    ((2.0 * v).sqrt() - 2.0 * spec.genus_factor() * gamma) / spec.degree_sq()
}

/// `τ = (γ - 1)/(-d)`: `[0, m]` for negative degree, `[-m, 0]` for positive.
pub fn tau_of(degree: i32, gamma: f64) -> f64 {
    (gamma - 1.0) / -(degree as f64)
}

/// Derivative at the first point of a uniform grid, fourth order.
pub fn one_sided_derivative(f: &[f64], h: f64) -> f64 {
    (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
}

/// Centered fourth-order first and second derivatives at interior index `i`.
pub fn centered_derivatives(f: &[f64], i: usize, h: f64) -> (f64, f64) {
    let (a, b, c, d, e) = (f[i - 2], f[i - 1], f[i], f[i + 1], f[i + 2]);
    let d1 = (a - 8.0 * b + 8.0 * d - e) / (12.0 * h);
    let d2 = (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h);
    (d1, d2)
}

/// Recovers `φ`, `λ` and the endpoint slopes from a converged solve.
pub fn recover_phi(bvp: &BvpSolution) -> Result<ProfileSolution> {
    if !bvp.trajectory.is_complete() {
        return Err(Error::InvalidInput("profile recovery needs a complete trajectory".into()));
    }
    let t = &bvp.trajectory;
    let n = t.gamma_grid.len();
    if n < 5 {
        return Err(Error::InvalidInput(format!("grid of {n} points is too coarse for the endpoint stencils")));
    }
    let mut phi = Vec::with_capacity(n);
    for (&g, &v) in t.gamma_grid.iter().zip(&t.v_values) {
        if 2.0 * v < 0.0 {
            return Err(Error::NegativeDiscriminant { gamma: g, value: 2.0 * v });
        }
        phi.push(phi_from_v(&bvp.coeffs, g, v));
    }
    let lambda = t.gamma_grid.iter().map(|&g| bvp.coeffs.lambda_raw(g)).collect();
    let h = (t.gamma_grid[n - 1] - t.gamma_grid[0]) / (n - 1) as f64;
    let phi_prime_left = one_sided_derivative(&phi[..5], h);
    let tail: Vec<f64> = phi[n - 5..].iter().rev().copied().collect();
    let phi_prime_right = -one_sided_derivative(&tail, h);

    let mut prof = ProfileSolution {
        bvp: bvp.clone(),
        gamma: t.gamma_grid.clone(),
        v: t.v_values.clone(),
        phi,
        lambda,
        phi_prime_left,
        phi_prime_right,
        s_samples: Vec::new(),
    };
    let base = 0.5 * (1.0 + bvp.spec.gamma_end);
    prof.s_samples = reconstruct_s_guarded(&prof, base, DEFAULT_GUARD)?;
    Ok(prof)
}

/// `λ(γ) = Aγ + B` with a domain check.
pub fn lambda_of(coeffs: &CoeffSet, gamma: f64) -> Result<f64> {
    coeffs.lambda(gamma)
}

/// Fibre coordinate normalised by `s(γ_base) = 0`, with the default guard.
pub fn reconstruct_s(prof: &ProfileSolution, gamma_base: f64) -> Result<Vec<SSample>> {
    reconstruct_s_guarded(prof, gamma_base, DEFAULT_GUARD)
}

/// As [`reconstruct_s`], keeping grid samples with `φ ≥ guard · max φ`.
///
/// `ds/dγ = 1/(|d| φ)`, so `s` increases with `γ` for either sign of the
/// degree; only `τ` records the orientation.
pub fn reconstruct_s_guarded(prof: &ProfileSolution, gamma_base: f64, guard: f64) -> Result<Vec<SSample>> {
    let spec = &prof.bvp.spec;
    if !(gamma_base > 1.0 && gamma_base < spec.gamma_end) {
        return Err(Error::Domain { gamma: gamma_base, gamma_end: spec.gamma_end });
    }
    if !(guard > 0.0 && guard < 1.0) {
        return Err(Error::InvalidInput(format!("guard fraction {guard} outside (0, 1)")));
    }
    let cut = guard * prof.max_phi();
    let n = prof.gamma.len();
    let first = (0..n).find(|&i| prof.phi[i] >= cut);
    let last = (0..n).rev().find(|&i| prof.phi[i] >= cut);
    let (first, last) = match (first, last) {
        (Some(a), Some(b)) if b + 1 >= a + MIN_S_SAMPLES => (a, b),
        (Some(a), Some(b)) if b >= a => return Err(Error::GuardBandTooWide { remaining: b - a + 1 }),
        _ => return Err(Error::GuardBandTooWide { remaining: 0 }),
    };
    if prof.phi[first..=last].iter().any(|&p| p <= 0.0) {
        return Err(Error::GuardBandTooWide { remaining: 0 });
    }

    let rule = GaussLegendre::new(CELL_ORDER);
    let inv_d = 1.0 / spec.abs_degree();
    let density = |y: f64| inv_d / prof.phi_at(y).unwrap_or(f64::NAN);
    let mut out = Vec::with_capacity(last - first + 1);
    let mut s = 0.0;
    for i in first..=last {
        if i > first {
            s += rule.integrate(prof.gamma[i - 1], prof.gamma[i], density);
        }
        out.push(SSample { s, tau: tau_of(spec.degree, prof.gamma[i]), gamma: prof.gamma[i], phi: prof.phi[i] });
    }

    // Shift so that s(γ_base) = 0, integrating from the nearest sample.
    let j = match out.binary_search_by(|p| p.gamma.total_cmp(&gamma_base)) {
        Ok(j) => j,
        Err(j) => j.min(out.len() - 1),
    };
    let s_base = out[j].s + rule.integrate(out[j].gamma, gamma_base, density);
    if !s_base.is_finite() {
        return Err(Error::Domain { gamma: gamma_base, gamma_end: spec.gamma_end });
    }
    for p in &mut out {
        p.s -= s_base;
    }
    Ok(out)
}

/// Max residual of `(2(g-1)γ + d²φ)φ' = Aγ⁴/3 + Bγ³/2 + Cγ` on the grid.
pub fn ode_residual(prof: &ProfileSolution) -> f64 {
    ode_residual_of(prof.coeffs(), &prof.gamma, &prof.phi)
}

/// [`ode_residual`] for arbitrary samples on a uniform grid.
pub fn ode_residual_of(coeffs: &CoeffSet, gamma: &[f64], phi: &[f64]) -> f64 {
    let n = gamma.len();
    if n < 5 {
        return f64::NAN;
    }
    let h = (gamma[n - 1] - gamma[0]) / (n - 1) as f64;
    let k = coeffs.spec.genus_factor();
    let d2 = coeffs.spec.degree_sq();
    (2..n - 2)
        .map(|i| {
            let (d1, _) = centered_derivatives(phi, i, h);
            ((2.0 * k * gamma[i] + d2 * phi[i]) * d1 - coeffs.profile_rhs(gamma[i])).abs()
        })
        .fold(0.0, f64::max)
}

/// Indices `2..n-2` whose `φ` clears the guard band.
pub fn guarded_interior(phi: &[f64], guard: f64) -> Vec<usize> {
    let n = phi.len();
    let cut = guard * phi.iter().copied().fold(0.0, f64::max);
    (2..n.saturating_sub(2)).filter(|&i| phi[i] >= cut).collect()
}
