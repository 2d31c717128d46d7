//! Kähler cone membership, class integrals, the pointwise Chern identity,
//! rescaling and the reduced Bando–Futaki obstruction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coeffs::{CoeffSet, SectionClass, SurfaceSpec};
use crate::error::{Error, Result};
use crate::profile::{centered_derivatives, guarded_interior, ProfileSolution, DEFAULT_GUARD};
use crate::quad::GaussLegendre;

/// Deviations at or below this count as a constant `λ`.
pub const HCSCK_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NotHcscK,
    Hcsck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConeVerdict {
    pub genus: u32,
    pub degree: i32,
    pub a: f64,
    pub b: f64,
    /// The five intersection expressions in their printed order.
    pub inequality_values: [f64; 5],
    pub is_kahler: bool,
    /// `a > 0 && b > 0`.
    pub simplified: bool,
}

impl ConeVerdict {
    pub fn agrees(&self) -> bool {
        self.is_kahler == self.simplified
    }
}

/// Evaluates the Kähler cone inequalities for the class `a·C + b·S`.
pub fn cone_check(genus: u32, degree: i32, a: f64, b: f64) -> Result<ConeVerdict> {
    if genus < 2 || degree == 0 {
        return Err(Error::InvalidInput(format!("need genus >= 2 and degree != 0, got ({genus}, {degree})")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput("class coefficients must be finite".into()));
    }
    let d = degree as f64;
    let inequality_values = if degree < 0 {
        [2.0 * a * b - d * b * b, b, a - d * b, a, a]
    } else {
        [2.0 * a * b + d * b * b, b, a + d * b, a, a + d * b]
    };
    Ok(ConeVerdict {
        genus,
        degree,
        a,
        b,
        inequality_values,
        is_kahler: inequality_values.iter().all(|&x| x > 0.0),
        simplified: a > 0.0 && b > 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassIntegrals {
    /// `[ω]·C`, the area of a fibre.
    pub fibre_area: f64,
    /// `[ω]·S∞` for negative degree, `[ω]·S₀` for positive.
    pub section_area: f64,
    pub section: SectionClass,
}

/// Areas of a fibre and of the distinguished section from the `τ` range.
pub fn class_integrals(prof: &ProfileSolution) -> ClassIntegrals {
    let spec = &prof.bvp.spec;
    let (t0, t1) = prof.tau_endpoints();
    let (tau_min, tau_max) = (t0.min(t1), t0.max(t1));
    let d = spec.degree as f64;
    let limit = if spec.degree < 0 { tau_max } else { tau_min };
    ClassIntegrals {
        fibre_area: 2.0 * PI * (tau_max - tau_min),
        section_area: 2.0 * PI * (1.0 - d * limit),
        section: spec.section_class(),
    }
}

/// Max residual of `γ(d²φ + 2(g-1)γ)φ'' + d²φ'(φ'γ - φ) = (Aγ + B)γ³` on the
/// guarded interior.
pub fn chern_identity_residual(prof: &ProfileSolution) -> f64 {
    chern_identity_residual_shifted(prof, 0.0)
}

/// As [`chern_identity_residual`] with `λ` replaced by `λ + shift`.
pub fn chern_identity_residual_shifted(prof: &ProfileSolution, shift: f64) -> f64 {
    let spec = &prof.bvp.spec;
    let k = spec.genus_factor();
    let d2 = spec.degree_sq();
    let h = prof.step();
    let (phi, gamma) = (&prof.phi, &prof.gamma);
    guarded_interior(phi, DEFAULT_GUARD)
        .into_iter()
        .map(|i| {
            let g = gamma[i];
            let (d1, d2phi) = centered_derivatives(phi, i, h);
            let lhs = g * (d2 * phi[i] + 2.0 * k * g) * d2phi + d2 * d1 * (d1 * g - phi[i]);
            let lam = prof.coeffs().lambda_raw(g) + shift;
            (lhs - lam * g * g * g).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Rescaled {
    pub a: f64,
    pub b: f64,
    /// Factor `d²/(2a²)` in `c₂(η) = factor·λ·η²`.
    pub chern_factor: f64,
}

/// Class coefficients and Chern factor of the metric rescaled to `a·C + a·m·S`.
pub fn rescale(prof: &ProfileSolution, a: f64) -> Result<Rescaled> {
    rescale_spec(&prof.bvp.spec, a)
}

pub fn rescale_spec(spec: &SurfaceSpec, a: f64) -> Result<Rescaled> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidInput(format!("scale a = {a} must be positive")));
    }
    Ok(Rescaled { a, b: a * spec.m, chern_factor: spec.degree_sq() / (2.0 * a * a) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FutakiReport {
    pub lambda0: f64,
    /// `∫(λ - λ₀)² γ dγ / ∫γ dγ` over `[1, γ_end]`.
    pub deviation: f64,
    /// `κ = |d|³(γ_end² - 1)/(4a²)`.
    pub kappa: f64,
    /// `-κ · deviation`.
    pub futaki_value: f64,
    pub verdict: Verdict,
}

/// The reduced top Bando–Futaki obstruction along `∇λ`.
pub fn bando_futaki(prof: &ProfileSolution) -> FutakiReport {
    bando_futaki_for(prof.coeffs())
}

pub fn bando_futaki_for(coeffs: &CoeffSet) -> FutakiReport {
    bando_futaki_affine(&coeffs.spec, coeffs.slope, coeffs.intercept)
}

/// Report for `λ = slope·γ + intercept` on the interval of `spec`.
pub fn bando_futaki_affine(spec: &SurfaceSpec, slope: f64, intercept: f64) -> FutakiReport {
    let rule = GaussLegendre::default();
    let g_end = spec.gamma_end;
    let mass = rule.integrate(1.0, g_end, |g| g);
    // λ - λ₀ = slope·(γ - γ̄), so a constant λ gives exactly zero.
    let centre = rule.integrate(1.0, g_end, |g| g * g) / mass;
    let lambda0 = slope * centre + intercept;
    let spread = rule.integrate(1.0, g_end, |g| (g - centre).powi(2) * g) / mass;
    let deviation = slope * slope * spread;
    let kappa = futaki_prefactor(spec);
    FutakiReport {
        lambda0,
        deviation,
        kappa,
        futaki_value: -kappa * deviation,
        verdict: if deviation > HCSCK_THRESHOLD { Verdict::NotHcscK } else { Verdict::Hcsck },
    }
}

/// `κ` such that the invariant equals `-κ · deviation` in the class `a·C + b·S`.
pub fn futaki_prefactor(spec: &SurfaceSpec) -> f64 {
    let d = spec.abs_degree();
    d.powi(3) * (spec.gamma_end * spec.gamma_end - 1.0) / (4.0 * spec.a * spec.a)
}

/// `∫_X h ω²` through the fibre reduction `(2(2π)²/|d|) ∫ h γ dγ`.
pub fn fibre_reduced_integral(spec: &SurfaceSpec, h: impl Fn(f64) -> f64) -> f64 {
    let rule = GaussLegendre::default();
    2.0 * (2.0 * PI).powi(2) / spec.abs_degree() * rule.integrate(1.0, spec.gamma_end, |g| h(g) * g)
}
