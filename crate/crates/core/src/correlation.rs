//! The model's correlation E(x, y), by quadrature and by sampling the hidden
//! variable, plus the original Bell and CHSH combinations.
//!
//! The spherical density factorizes into `sin^(2γ+1) θ dθ · S g(φ′) dφ′` and
//! both outcomes depend only on the azimuth of λ (sin θ ≥ 0), so the sampler
//! draws φ′ from the azimuthal marginal and pins θ = π/2.

use crate::error::{Error, Result};
use crate::model::{
    outcome_a, outcome_b, reduced_density_g, sign_boundaries, signed_density, solve_coefficients,
    Coefficients, GammaParam, HiddenVariable, SettingAngle,
};
use crate::numerics::{integrate, theta_prefactor, QuadratureSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Smallest sample count accepted by [`estimate_correlation_mc`].
pub const MIN_MC_SAMPLES: usize = 100;

/// The singlet prediction E = −cos φ.
pub fn quantum_correlation(phi: f64) -> f64 {
    -phi.cos()
}

/// E(φ) = −S ∫ cos φ′ cos(φ′ − φ) f dφ′ with freshly solved coefficients.
pub fn expectation_quadrature(phi: SettingAngle, gamma: GammaParam, quad: &QuadratureSpec) -> Result<f64> {
    let coeffs = solve_coefficients(phi, gamma, quad)?;
    expectation_with(&coeffs, quad)
}

/// E for an explicit set of coefficients.
pub fn expectation_with(coeffs: &Coefficients, quad: &QuadratureSpec) -> Result<f64> {
    let s = theta_prefactor(coeffs.gamma.value())?;
    let spec = quad.clone().with_breakpoints(sign_boundaries(coeffs.phi.radians()));
    let integral = integrate(|t| signed_density(t, coeffs), 0.0, TAU, &spec)?;
    Ok(-s * integral)
}

/// Rejection sampler for the normalized azimuthal density `S g(φ′)`.
///
/// Proposals are uniform on [0, 2π). The envelope uses that
/// cos² φ′ + cos²(φ′ − φ) = 1 + cos φ cos(2φ′ − φ) ranges over
/// [1 − |cos φ|, 1 + |cos φ|], so `g ≤ max(c1, c2) · max((1 ± |cos φ|)^γ)`.
#[derive(Debug, Clone)]
pub struct AzimuthSampler {
    coeffs: Coefficients,
    envelope: f64,
}

impl AzimuthSampler {
    pub fn new(coeffs: Coefficients) -> Self {
        let g = coeffs.gamma.value();
        let c = coeffs.phi.radians().cos().abs();
        let envelope = coeffs.c1.max(coeffs.c2) * (1.0 + c).powf(g).max((1.0 - c).powf(g));
        Self { coeffs, envelope }
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    /// Acceptance probability per proposal, ∫g / (2π M) = 1 / (S · 2π M).
    pub fn expected_acceptance(&self) -> Result<f64> {
        let s = theta_prefactor(self.coeffs.gamma.value())?;
        Ok(1.0 / (s * TAU * self.envelope))
    }

    /// Draws one azimuth and reports how many proposals it took.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, u64) {
        let mut proposals = 0;
        loop {
            proposals += 1;
            let t = rng.gen::<f64>() * TAU;
            let u = rng.gen::<f64>() * self.envelope;
            if u < reduced_density_g(t, &self.coeffs) {
                return (t, proposals);
            }
        }
    }
}

/// The seeded generator used for every Monte Carlo path: ChaCha8 keyed by the
/// 64-bit seed, with `stream` selecting an independent substream.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` i.i.d. azimuths from the normalized marginal of the hidden-variable density.
pub fn sample_phi_marginal(phi: SettingAngle, gamma: GammaParam, n: usize, seed: u64, quad: &QuadratureSpec) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let sampler = AzimuthSampler::new(solve_coefficients(phi, gamma, quad)?);
    let mut rng = seeded_rng(seed, 0);
    Ok((0..n).map(|_| sampler.sample(&mut rng).0).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub mean: f64,
    /// Sample standard deviation over √n_accepted.
    pub std_err: f64,
    pub n_accepted: u64,
    pub n_proposed: u64,
    pub seed: u64,
}

/// Monte Carlo estimate of ⟨AB⟩ from `n` accepted draws of λ, with x at
/// azimuth 0 and y at azimuth φ.
pub fn estimate_correlation_mc(phi: SettingAngle, gamma: GammaParam, n: usize, seed: u64, quad: &QuadratureSpec) -> Result<CorrelationEstimate> {
    estimate_correlation_mc_stream(phi, gamma, n, seed, 0, quad)
}

/// As [`estimate_correlation_mc`], drawing from substream `stream` of `seed`.
pub fn estimate_correlation_mc_stream(
    phi: SettingAngle,
    gamma: GammaParam,
    n: usize,
    seed: u64,
    stream: u64,
    quad: &QuadratureSpec,
) -> Result<CorrelationEstimate> {
    if n < MIN_MC_SAMPLES {
        return Err(Error::domain(format!(
            "Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {n}"
        )));
    }
    let sampler = AzimuthSampler::new(solve_coefficients(phi, gamma, quad)?);
    let mut rng = seeded_rng(seed, stream);
    let y_angle = phi.radians();

    let mut proposed = 0;
    let mut sum = 0i64;
    for _ in 0..n {
        let (t, tries) = sampler.sample(&mut rng);
        proposed += tries;
        let lambda = HiddenVariable::equatorial(t);
        sum += (outcome_a(0.0, &lambda).value() * outcome_b(y_angle, &lambda).value()) as i64;
    }
    // Products are ±1, so the sample variance follows from the mean alone.
    let nf = n as f64;
    let mean = sum as f64 / nf;
    let var = (1.0 - mean * mean) * nf / (nf - 1.0);
    Ok(CorrelationEstimate {
        mean,
        std_err: (var.max(0.0) / nf).sqrt(),
        n_accepted: n as u64,
        n_proposed: proposed,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellCheckResult {
    /// |E(x, y) − E(x, z)|
    pub lhs: f64,
    /// 1 + E(y, z)
    pub rhs: f64,
    pub violated: bool,
}

fn check_angle(phi: f64) -> Result<()> {
    SettingAngle::new(phi).map(|_| ())
}

/// Bell's original inequality |E(x, y) − E(x, z)| ≤ 1 + E(y, z).
pub fn bell_original_check<E>(phi_xy: f64, phi_xz: f64, phi_yz: f64, mut corr: E) -> Result<BellCheckResult>
where
    E: FnMut(f64) -> Result<f64>,
{
    for p in [phi_xy, phi_xz, phi_yz] {
        check_angle(p)?;
    }
    let lhs = (corr(phi_xy)? - corr(phi_xz)?).abs();
    let rhs = 1.0 + corr(phi_yz)?;
    Ok(BellCheckResult { lhs, rhs, violated: lhs > rhs })
}

/// |E(a, b) − E(a, b′)| + |E(a′, b) + E(a′, b′)|.
pub fn chsh_value<E>(phi_ab: f64, phi_ab2: f64, phi_a2b: f64, phi_a2b2: f64, mut corr: E) -> Result<f64>
where
    E: FnMut(f64) -> Result<f64>,
{
    for p in [phi_ab, phi_ab2, phi_a2b, phi_a2b2] {
        check_angle(p)?;
    }
    Ok((corr(phi_ab)? - corr(phi_ab2)?).abs() + (corr(phi_a2b)? + corr(phi_a2b2)?).abs())
}

/// Relative angles (ab, ab′, a′b, a′b′) that give the maximal quantum CHSH value.
pub const TSIRELSON_ANGLES: [f64; 4] = [
    std::f64::consts::FRAC_PI_4,
    3.0 * std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_4,
];
