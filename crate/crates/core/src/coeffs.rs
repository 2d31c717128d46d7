//! Coefficient algebra for the reduced momentum-profile equation.
//!
//! A surface is a ruled surface `P(L ⊕ O)` over a curve of genus `g` with
//! `deg L = d`, carrying the Kähler class `a·C + b·S` (`S` is the infinity
//! section when `d < 0` and the zero section when `d > 0`). Everything is
//! normalised to the ratio `m = b / a`; the profile lives on
//! `γ ∈ [1, |d|·m + 1]`.
//!
//! For a shooting constant `C` the cubic
//!
//! ```text
//! p(γ) = d² (A γ³/3 + B γ²/2 + C)
//! ```
//!
//! has its coefficients `A`, `B` fixed by the endpoint values
//! `p(1) = 2(g-1)|d|` and `p(γ_end) = -2(g-1)|d|`, which are exactly the
//! values that make the slope of the transformed solution match the smooth
//! extension conditions at both sections.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when checking that an abscissa lies in `[1, γ_end]`.
const DOMAIN_SLACK: f64 = 1e-12;

/// Width at which the bisection for the root of `p` stops.
const ROOT_TOL: f64 = 1e-12;

/// Which section class pairs with the fibre class in `a·C + b·S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionClass {
    /// `S_∞`, used for negative degree.
    Infinity,
    /// `S_0`, used for positive degree.
    Zero,
}

/// Genus, degree and Kähler class of a pseudo-Hirzebruch surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurfaceSpec {
    pub genus: u32,
    pub degree: i32,
    /// Coefficient of the fibre class `C`.
    pub a: f64,
    /// Coefficient of the section class.
    pub b: f64,
    /// Normalised ratio `b / a`.
    pub m: f64,
    /// Right end of the profile interval, `|d|·m + 1`.
    pub gamma_end: f64,
}

impl SurfaceSpec {
    pub fn new(genus: u32, degree: i32, a: f64, b: f64) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidInput(format!("genus must be >= 2, got {genus}")));
        }
        if degree == 0 {
            return Err(Error::InvalidInput("degree must be non-zero".into()));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidInput(format!("class coefficient a must be positive, got {a}")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidInput(format!("class coefficient b must be positive, got {b}")));
        }
        let m = b / a;
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidInput(format!("ratio b/a must be positive and finite, got {m}")));
        }
        let gamma_end = f64::from(degree.unsigned_abs()) * m + 1.0;
        Ok(Self { genus, degree, a, b, m, gamma_end })
    }

    /// The class `2π(C + m S)`.
    pub fn normalized(genus: u32, degree: i32, m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidInput(format!("m must be positive, got {m}")));
        }
        let mut spec = Self::new(genus, degree, 2.0 * PI, 2.0 * PI * m)?;
        // Keep m exact rather than the rounded quotient b / a.
        spec.m = m;
        spec.gamma_end = spec.abs_degree() * m + 1.0;
        Ok(spec)
    }

    /// `g - 1`.
    pub fn genus_factor(&self) -> f64 {
        f64::from(self.genus - 1)
    }

    /// `|d|`.
    pub fn abs_degree(&self) -> f64 {
        f64::from(self.degree.unsigned_abs())
    }

    /// `d²`.
    pub fn degree_sq(&self) -> f64 {
        let d = f64::from(self.degree);
        d * d
    }

    pub fn section_class(&self) -> SectionClass {
        if self.degree < 0 {
            SectionClass::Infinity
        } else {
            SectionClass::Zero
        }
    }

    /// Initial value `v(1) = 2(g-1)²`.
    pub fn initial_value(&self) -> f64 {
        let k = self.genus_factor();
        2.0 * k * k
    }

    /// Right boundary target `v(γ_end) = 2(g-1)² γ_end²`.
    pub fn target(&self) -> f64 {
        self.initial_value() * self.gamma_end * self.gamma_end
    }

    /// Required slope `v'(1) = 2(g-1)(2(g-1) + |d|)`.
    pub fn start_slope(&self) -> f64 {
        let k = self.genus_factor();
        2.0 * k * (2.0 * k + self.abs_degree())
    }

    /// Required slope `v'(γ_end) = 2(g-1) γ_end (2(g-1) - |d|)`.
    pub fn end_slope(&self) -> f64 {
        let k = self.genus_factor();
        2.0 * k * self.gamma_end * (2.0 * k - self.abs_degree())
    }

    /// Value of `p` at `γ = 1`; its negative is the value at `γ_end`.
    pub fn p_start(&self) -> f64 {
        2.0 * self.genus_factor() * self.abs_degree()
    }

    /// The same surface with the sign of the degree flipped.
    pub fn with_flipped_degree(&self) -> Self {
        Self { degree: -self.degree, ..*self }
    }

    pub(crate) fn check_domain(&self, gamma: f64) -> Result<()> {
        if gamma.is_nan() || gamma < 1.0 - DOMAIN_SLACK || gamma > self.gamma_end + DOMAIN_SLACK {
            Err(Error::Domain { gamma, gamma_end: self.gamma_end })
        } else {
            Ok(())
        }
    }
}

/// `A`, `B` and the root `γ₀` of `p` for one shooting constant `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoeffSet {
    pub spec: SurfaceSpec,
    /// The shooting constant `C`.
    pub shooting: f64,
    /// `A`, the slope of `λ(γ) = Aγ + B`.
    pub slope: f64,
    /// `B`, the intercept of `λ`.
    pub intercept: f64,
    /// Unique root of `p` in `[1, γ_end]`.
    pub gamma0: f64,
}

/// `A` and `B` as affine functions of `C`: `A = a0 + a1 C`, `B = b0 + b1 C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineCoefficients {
    pub slope0: f64,
    pub slope1: f64,
    pub intercept0: f64,
    pub intercept1: f64,
}

/// Solves `A/3 + B/2 = r1`, `G³A/3 + G²B/2 = r2` by Cramer's rule.
fn solve_endpoint_system(gamma_end: f64, r1: f64, r2: f64) -> (f64, f64) {
    let g2 = gamma_end * gamma_end;
    let g3 = g2 * gamma_end;
    let det = g2 / 6.0 - g3 / 6.0;
    let a = (r1 * g2 / 2.0 - r2 / 2.0) / det;
    let b = (r2 / 3.0 - r1 * g3 / 3.0) / det;
    (a, b)
}

/// `(A, B)` for shooting constant `c`.
pub fn slope_intercept(spec: &SurfaceSpec, c: f64) -> (f64, f64) {
    // p(1)/d² and p(γ_end)/d² pin the two cubic coefficients.
    let c0 = spec.p_start() / spec.degree_sq();
    solve_endpoint_system(spec.gamma_end, c0 - c, -c0 - c)
}

/// Affine decomposition of `A(C)` and `B(C)`.
pub fn affine_coefficients(spec: &SurfaceSpec) -> AffineCoefficients {
    let (slope0, intercept0) = slope_intercept(spec, 0.0);
    // dA/dC and dB/dC: the system with zero endpoint data and C = 1.
    let (slope1, intercept1) = solve_endpoint_system(spec.gamma_end, -1.0, -1.0);
    AffineCoefficients { slope0, slope1, intercept0, intercept1 }
}

/// Builds the coefficient set for shooting constant `c`.
pub fn coeffs_from_c(spec: &SurfaceSpec, c: f64) -> CoeffSet {
    let (slope, intercept) = slope_intercept(spec, c);
    let mut set = CoeffSet { spec: *spec, shooting: c, slope, intercept, gamma0: f64::NAN };
    set.gamma0 = set.locate_root();
    set
}

impl CoeffSet {
    /// `p` without the domain check.
    pub(crate) fn p_raw(&self, gamma: f64) -> f64 {
        let inner = self.shooting + gamma * gamma * (self.intercept / 2.0 + gamma * self.slope / 3.0);
        self.spec.degree_sq() * inner
    }

    /// `P(γ) = ∫₁^γ p(y) y dy` without the domain check.
    pub(crate) fn big_p_raw(&self, gamma: f64) -> f64 {
        let (a, b, c) = (self.slope, self.intercept, self.shooting);
        let g2 = gamma * gamma;
        let at = |x2: f64, x: f64| x2 * (c / 2.0 + x2 * (b / 8.0 + x * a / 15.0));
        self.spec.degree_sq() * (at(g2, gamma) - at(1.0, 1.0))
    }

    pub fn p(&self, gamma: f64) -> Result<f64> {
        self.spec.check_domain(gamma)?;
        Ok(self.p_raw(gamma))
    }

    pub fn big_p(&self, gamma: f64) -> Result<f64> {
        self.spec.check_domain(gamma)?;
        Ok(self.big_p_raw(gamma))
    }

    /// Right-hand side `A γ⁴/3 + B γ³/2 + C γ` of the first-order profile equation.
    pub fn profile_rhs(&self, gamma: f64) -> f64 {
        gamma * self.p_raw(gamma) / self.spec.degree_sq()
    }

    /// `λ(γ) = Aγ + B`.
    pub fn lambda(&self, gamma: f64) -> Result<f64> {
        self.spec.check_domain(gamma)?;
        Ok(self.lambda_raw(gamma))
    }

    pub(crate) fn lambda_raw(&self, gamma: f64) -> f64 {
        self.slope * gamma + self.intercept
    }

    fn locate_root(&self) -> f64 {
        let (mut lo, mut hi) = (1.0, self.spec.gamma_end);
        // p(1) > 0 > p(γ_end) by construction.
        while hi - lo > ROOT_TOL {
            let mid = 0.5 * (lo + hi);
            if self.p_raw(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `L` and `N` with `P_C(γ_end) = L·C + N`.
pub fn constants_ln(spec: &SurfaceSpec) -> (f64, f64) {
    let aff = affine_coefficients(spec);
    let g = spec.gamma_end;
    let g2 = g * g;
    let w5 = (g2 * g2 * g - 1.0) / 15.0;
    let w4 = (g2 * g2 - 1.0) / 8.0;
    let w2 = (g2 - 1.0) / 2.0;
    let d2 = spec.degree_sq();
    let l = d2 * (aff.slope1 * w5 + aff.intercept1 * w4 + w2);
    let n = d2 * (aff.slope0 * w5 + aff.intercept0 * w4);
    (l, n)
}

/// `q(γ) = ∂(p_C(γ)γ)/∂C`, evaluated in factored form.
pub fn poly_q(spec: &SurfaceSpec, gamma: f64) -> Result<f64> {
    spec.check_domain(gamma)?;
    Ok(q_factored(spec, gamma))
}

pub(crate) fn q_factored(spec: &SurfaceSpec, gamma: f64) -> f64 {
    let g = spec.gamma_end;
    let lead = spec.degree_sq() * (1.0 + g) / (g * g);
    lead * (gamma + g / (1.0 + g)) * gamma * (gamma - 1.0) * (gamma - g)
}

/// `q` from its expanded quartic `d²(A'γ⁴/3 + B'γ³/2 + γ)`.
pub fn q_expanded(spec: &SurfaceSpec, gamma: f64) -> f64 {
    let aff = affine_coefficients(spec);
    spec.degree_sq() * gamma * (1.0 + gamma * gamma * (aff.intercept1 / 2.0 + gamma * aff.slope1 / 3.0))
}

/// `Q(γ) = ∫₁^γ q(y) dy` in closed form.
pub fn poly_big_q(spec: &SurfaceSpec, gamma: f64) -> Result<f64> {
    spec.check_domain(gamma)?;
    Ok(big_q_raw(spec, gamma))
}

pub(crate) fn big_q_raw(spec: &SurfaceSpec, gamma: f64) -> f64 {
    let aff = affine_coefficients(spec);
    let at = |x: f64| {
        let x2 = x * x;
        x2 * (0.5 + x2 * (aff.intercept1 / 8.0 + x * aff.slope1 / 15.0))
    };
    spec.degree_sq() * (at(gamma) - at(1.0))
}
