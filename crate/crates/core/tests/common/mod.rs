//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use hextremal::profile::{reconstruct_s, ProfileSolution};
use hextremal::shoot::{solve_bvp_with, BvpSolution, SolveOptions};
use hextremal::{recover_phi, SurfaceSpec};

pub const M_SET: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 5.0, 10.0];
pub const SURFACES: [(u32, i32); 4] = [(2, -1), (3, -2), (2, 1), (4, -1)];

pub struct Case {
    pub spec: SurfaceSpec,
    pub bvp: BvpSolution,
    pub prof: ProfileSolution,
}

impl Case {
    pub fn label(&self) -> String {
        format!("(g={}, d={}, m={})", self.spec.genus, self.spec.degree, self.spec.m)
    }
}

pub fn solve_case(genus: u32, degree: i32, m: f64) -> Case {
    let spec = SurfaceSpec::normalized(genus, degree, m).expect("valid surface");
    let bvp = solve_bvp_with(&spec, &SolveOptions::default()).expect("solve converges");
    let prof = recover_phi(&bvp).expect("profile recovers");
    Case { spec, bvp, prof }
}

pub fn matrix() -> Vec<Case> {
    SURFACES.iter().flat_map(|&(g, d)| M_SET.iter().map(move |&m| solve_case(g, d, m))).collect()
}

fn phi_clamped(prof: &ProfileSolution, gamma: f64) -> f64 {
    let g_end = prof.bvp.spec.gamma_end;
    prof.phi_at(gamma.clamp(1.0, g_end)).unwrap_or(0.0).max(0.0)
}

/// The curve `s ↦ γ(s)` solving `dγ/ds = |d| φ(γ)` with `γ(0) = gamma_base`,
/// by classical RK4 on a uniform `s` step, run outwards until `φ` falls below
/// `1e-10 · max φ`. Returned as `(s, γ)` pairs in increasing `s`.
pub fn s_space_path(prof: &ProfileSolution, gamma_base: f64) -> Vec<(f64, f64)> {
    let ad = prof.bvp.spec.abs_degree();
    let cutoff = 1e-10 * prof.max_phi();
    let f = |g: f64| ad * phi_clamped(prof, g);
    let mut halves = Vec::new();
    for dir in [-1.0, 1.0] {
        let step = dir * S_STEP;
        let mut g = gamma_base;
        let mut s = 0.0;
        let mut pts = Vec::new();
        for _ in 0..2_000_000 {
            let k1 = f(g);
            let k2 = f(g + 0.5 * step * k1);
            let k3 = f(g + 0.5 * step * k2);
            let k4 = f(g + step * k3);
            g += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            s += step;
            pts.push((s, g));
            if phi_clamped(prof, g) < cutoff {
                break;
            }
        }
        halves.push(pts);
    }
    let mut path: Vec<(f64, f64)> = halves[0].iter().rev().copied().collect();
    path.push((0.0, gamma_base));
    path.extend_from_slice(&halves[1]);
    path
}

pub const S_STEP: f64 = 2e-3;

/// `∫_X h ω²` computed in the fibre coordinate `s`: the trapezoid rule on
/// `2 (1 - d f') f'' h · (2π)²` with `1 - d f'(s) = γ(s)`, `f''(s) = φ(γ(s))`.
pub fn s_space_integral(prof: &ProfileSolution, h: impl Fn(f64) -> f64) -> f64 {
    let base = prof.gamma[prof.gamma.len() / 2];
    let path = s_space_path(prof, base);
    let val = |g: f64| 2.0 * g * phi_clamped(prof, g) * h(g) * (2.0 * PI).powi(2);
    let n = path.len();
    let inner: f64 = path[1..n - 1].iter().map(|&(_, g)| val(g)).sum();
    (inner + 0.5 * (val(path[0].1) + val(path[n - 1].1))) * S_STEP
}

/// `s` at which the path reaches `gamma`, by bisection on the cubic Hermite
/// interpolant of the path (slopes `|d| φ`).
pub fn s_at(prof: &ProfileSolution, path: &[(f64, f64)], gamma: f64) -> Option<f64> {
    let ad = prof.bvp.spec.abs_degree();
    let k = path.windows(2).position(|w| w[0].1 <= gamma && gamma <= w[1].1)?;
    let ((s0, g0), (s1, g1)) = (path[k], path[k + 1]);
    let h = s1 - s0;
    let (m0, m1) = (ad * phi_clamped(prof, g0), ad * phi_clamped(prof, g1));
    let interp = |t: f64| {
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * g0 + (t3 - 2.0 * t2 + t) * h * m0 + (-2.0 * t3 + 3.0 * t2) * g1 + (t3 - t2) * h * m1
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if interp(mid) < gamma {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(s0 + 0.5 * (lo + hi) * h)
}

/// Largest gap between `reconstruct_s` and the RK4 path over the default
/// guarded samples, both based at the middle grid point.
pub fn s_coordinate_gap(prof: &ProfileSolution) -> f64 {
    let base = prof.gamma[prof.gamma.len() / 2];
    let path = s_space_path(prof, base);
    let samples = reconstruct_s(prof, base).expect("reconstruction");
    samples
        .iter()
        .map(|p| s_at(prof, &path, p.gamma).map_or(f64::INFINITY, |s| (s - p.s).abs()))
        .fold(0.0, f64::max)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
