//! The γ-family of measurement-dependent hidden-variable models.
//!
//! The hidden variable is a unit vector λ on the sphere. The detector
//! settings x and y lie in the equatorial plane, x along azimuth 0 and y at
//! the relative angle φ. Outcomes are A = sgn(x·λ) and B = −sgn(y·λ).
//!
//! For settings (x, y) the hidden variable is distributed as
//!
//! ```text
//! ρ_xy(λ) = f(x·λ, y·λ) |x·λ| |y·λ|,
//! f(u, v) = c (u² + v²)^γ / |uv|,   c = c1 if sgn u = sgn v, else c2.
//! ```
//!
//! The auxiliary vectors that pin the density to the chosen settings are
//! integrated out before anything is computed here, so only λ has a runtime
//! representation. `f` is homogeneous of degree 2(γ−1), which lets the polar
//! angle θ be integrated analytically: every density factorizes into
//! `sin^(2γ+1) θ` times an azimuthal density `g(φ′)`, and the θ-integral
//! contributes [`theta_prefactor`]. After cancelling `|uv|` against the
//! `1/|uv|` in `f`,
//!
//! ```text
//! g(φ′) = c (cos² φ′ + cos²(φ′ − φ))^γ.
//! ```
//!
//! Writing I₊ and I₋ for the integrals of `(cos² φ′ + cos²(φ′ − φ))^γ` over
//! the sign-agreement and sign-disagreement sets, the normalization and the
//! requirement E = −cos φ decouple into
//! `S (c1 I₊ + c2 I₋) = 1` and `S (c1 I₊ − c2 I₋) = cos φ`.

use crate::error::{Error, Result};
use crate::numerics::{integrate, theta_prefactor, QuadratureSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

/// Family parameter γ, restricted to γ > −1/2.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct GammaParam(f64);

impl GammaParam {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > -0.5 && gamma.is_finite() {
            Ok(Self(gamma))
        } else {
            Err(Error::domain(format!("gamma must be greater than -0.5, got {gamma}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for GammaParam {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<GammaParam> for f64 {
    fn from(g: GammaParam) -> f64 {
        g.0
    }
}

impl fmt::Display for GammaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Relative angle between two detector settings, strictly inside (0, π).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SettingAngle(f64);

impl SettingAngle {
    pub fn new(phi: f64) -> Result<Self> {
        if phi > 0.0 && phi < PI {
            Ok(Self(phi))
        } else {
            Err(Error::domain(format!("phi must be in (0, pi), got {phi}")))
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// The angle π − φ.
    pub fn supplement(self) -> Self {
        Self(PI - self.0)
    }
}

impl TryFrom<f64> for SettingAngle {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SettingAngle> for f64 {
    fn from(a: SettingAngle) -> f64 {
        a.0
    }
}

/// The pair (c1, c2) for one member of the family at one setting angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub c1: f64,
    pub c2: f64,
    pub phi: SettingAngle,
    pub gamma: GammaParam,
}

impl Coefficients {
    pub fn new(c1: f64, c2: f64, phi: SettingAngle, gamma: GammaParam) -> Result<Self> {
        if !(c1 > 0.0 && c1.is_finite() && c2 > 0.0 && c2.is_finite()) {
            return Err(Error::domain(format!(
                "coefficients must be positive and finite, got c1 = {c1}, c2 = {c2}"
            )));
        }
        Ok(Self { c1, c2, phi, gamma })
    }

    /// Both coefficients multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.c1 * k, self.c2 * k, self.phi, self.gamma)
    }

    fn for_region(&self, agreement: bool) -> f64 {
        if agreement {
            self.c1
        } else {
            self.c2
        }
    }
}

/// Hidden variable λ in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenVariable {
    theta: f64,
    phi: f64,
}

impl HiddenVariable {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&phi) {
            return Err(Error::domain(format!(
                "hidden variable needs theta in [0, pi] and phi in [0, 2pi), got ({theta}, {phi})"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// λ on the equator at azimuth `phi` (any real; reduced modulo 2π).
    pub fn equatorial(phi: f64) -> Self {
        let mut p = phi.rem_euclid(TAU);
        if p >= TAU {
            p = 0.0;
        }
        Self { theta: FRAC_PI_2, phi: p }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// A measurement outcome, ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Up,
    Down,
}

impl Outcome {
    pub fn value(self) -> i32 {
        match self {
            Outcome::Up => 1,
            Outcome::Down => -1,
        }
    }

    fn flip(self) -> Self {
        match self {
            Outcome::Up => Outcome::Down,
            Outcome::Down => Outcome::Up,
        }
    }
}

/// sgn(a·λ) for the equatorial unit vector `a` at azimuth `angle`.
/// The measure-zero case a·λ = 0 counts as +1.
fn sign_of_projection(angle: f64, lambda: &HiddenVariable) -> Outcome {
    let proj = lambda.theta.sin() * (lambda.phi - angle).cos();
    if proj >= 0.0 {
        Outcome::Up
    } else {
        Outcome::Down
    }
}

/// Alice's outcome A = sgn(x·λ); x·λ = 0 resolves to +1.
pub fn outcome_a(x_angle: f64, lambda: &HiddenVariable) -> Outcome {
    sign_of_projection(x_angle, lambda)
}

/// Bob's outcome B = −sgn(y·λ); y·λ = 0 resolves to −1 (the negated A convention).
pub fn outcome_b(y_angle: f64, lambda: &HiddenVariable) -> Outcome {
    sign_of_projection(y_angle, lambda).flip()
}

/// The weight function f(u, v). Undefined on the sign boundary u = 0 or v = 0.
pub fn weight_f(u: f64, v: f64, coeffs: &Coefficients) -> Result<f64> {
    if u == 0.0 || v == 0.0 {
        return Err(Error::domain(format!(
            "weight function is undefined on the sign boundary (u = {u}, v = {v})"
        )));
    }
    let c = coeffs.for_region((u > 0.0) == (v > 0.0));
    Ok(c * (u * u + v * v).powf(coeffs.gamma.value()) / (u * v).abs())
}

/// Whether cos φ′ and cos(φ′ − φ) agree in sign. Zeros count as agreement.
pub fn in_agreement(phi_prime: f64, phi: f64) -> bool {
    phi_prime.cos() * (phi_prime - phi).cos() >= 0.0
}

fn base(phi_prime: f64, phi: f64) -> f64 {
    let u = phi_prime.cos();
    let v = (phi_prime - phi).cos();
    u * u + v * v
}

/// Azimuthal density g(φ′) = |cos φ′ cos(φ′ − φ)| f(cos φ′, cos(φ′ − φ)) in
/// its cancelled form `c (cos² φ′ + cos²(φ′ − φ))^γ`. Setting and γ come
/// from `coeffs`.
pub fn reduced_density_g(phi_prime: f64, coeffs: &Coefficients) -> f64 {
    let phi = coeffs.phi.radians();
    coeffs.for_region(in_agreement(phi_prime, phi)) * base(phi_prime, phi).powf(coeffs.gamma.value())
}

/// cos φ′ cos(φ′ − φ) f(cos φ′, cos(φ′ − φ)): +g on the agreement set, −g off it.
pub fn signed_density(phi_prime: f64, coeffs: &Coefficients) -> f64 {
    let phi = coeffs.phi.radians();
    let agree = in_agreement(phi_prime, phi);
    let g = coeffs.for_region(agree) * base(phi_prime, phi).powf(coeffs.gamma.value());
    if agree {
        g
    } else {
        -g
    }
}

/// Zeros of cos φ′ and cos(φ′ − φ) strictly inside (0, 2π), sorted.
pub fn sign_boundaries(phi: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = [FRAC_PI_2, 1.5 * PI, phi + FRAC_PI_2, phi + 1.5 * PI]
        .iter()
        .map(|p| p.rem_euclid(TAU))
        .filter(|&p| p > 1e-12 && p < TAU - 1e-12)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    pts
}

/// Integrals of (cos² φ′ + cos²(φ′ − φ))^γ over the sign-agreement (`i_plus`)
/// and sign-disagreement (`i_minus`) subsets of [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionIntegrals {
    pub i_plus: f64,
    pub i_minus: f64,
}

pub fn region_integrals(phi: SettingAngle, gamma: GammaParam, quad: &QuadratureSpec) -> Result<RegionIntegrals> {
    let p = phi.radians();
    let g = gamma.value();
    let spec = quad.clone().with_breakpoints(sign_boundaries(p));
    let restricted = |agree: bool| {
        move |t: f64| {
            if in_agreement(t, p) == agree {
                base(t, p).powf(g)
            } else {
                0.0
            }
        }
    };
    let i_plus = integrate(restricted(true), 0.0, TAU, &spec)?;
    let i_minus = integrate(restricted(false), 0.0, TAU, &spec)?;
    Ok(RegionIntegrals { i_plus, i_minus })
}

/// Solves the normalization and E = −cos φ constraints for (c1, c2).
pub fn solve_coefficients(phi: SettingAngle, gamma: GammaParam, quad: &QuadratureSpec) -> Result<Coefficients> {
    let s = theta_prefactor(gamma.value())?;
    let RegionIntegrals { i_plus, i_minus } = region_integrals(phi, gamma, quad)?;
    let cos = phi.radians().cos();
    let c1 = (1.0 + cos) / (2.0 * s * i_plus);
    let c2 = (1.0 - cos) / (2.0 * s * i_minus);
    Coefficients::new(c1, c2, phi, gamma).map_err(|e| Error::NonConvergence {
        method: "solve_coefficients",
        detail: e.to_string(),
    })
}

/// Closed-form coefficients of the γ = 0 member.
pub fn coefficients_gamma0_closed(phi: SettingAngle) -> Coefficients {
    let p = phi.radians();
    Coefficients {
        c1: (1.0 + p.cos()) / (8.0 * (PI - p)),
        c2: (1.0 - p.cos()) / (8.0 * p),
        phi,
        gamma: GammaParam(0.0),
    }
}

/// Residuals of the two defining constraints, evaluated from `f` itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintResiduals {
    /// |S ∫ g dφ′ − 1|
    pub norm: f64,
    /// |S ∫ cos φ′ cos(φ′ − φ) f dφ′ − cos φ|, the deviation of E from −cos φ.
    pub corr: f64,
}

pub fn verify_constraints(coeffs: &Coefficients, quad: &QuadratureSpec) -> Result<ConstraintResiduals> {
    let p = coeffs.phi.radians();
    let s = theta_prefactor(coeffs.gamma.value())?;
    let spec = quad.clone().with_breakpoints(sign_boundaries(p));

    let norm_integral = integrate(|t| reduced_density_g(t, coeffs), 0.0, TAU, &spec)?;
    // Uncancelled integrand u·v·f(u, v); u and v vanish only on breakpoints,
    // which the quadrature nodes never touch.
    let corr_integral = integrate(
        |t| {
            let (u, v) = (t.cos(), (t - p).cos());
            weight_f(u, v, coeffs).map_or(0.0, |f| u * v * f)
        },
        0.0,
        TAU,
        &spec,
    )?;
    Ok(ConstraintResiduals {
        norm: (s * norm_integral - 1.0).abs(),
        corr: (s * corr_integral - p.cos()).abs(),
    })
}
