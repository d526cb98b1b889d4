//! Log-gamma and the polar-angle prefactor built from it.

// Coefficient tables keep their published digits.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_8;

/// ζ(2) … ζ(26), coefficients of the Taylor series of ln Γ(1+z).
const ZETA: [f64; 25] = [
    1.644_934_066_848_226_436_5,
    1.202_056_903_159_594_285_4,
    1.082_323_233_711_138_191_5,
    1.036_927_755_143_369_926_3,
    1.017_343_061_984_449_139_7,
    1.008_349_277_381_922_826_8,
    1.004_077_356_197_944_339_4,
    1.002_008_392_826_082_214_4,
    1.000_994_575_127_818_085_3,
    1.000_494_188_604_119_464_6,
    1.000_246_086_553_308_048_3,
    1.000_122_713_347_578_489_1,
    1.000_061_248_135_058_704_8,
    1.000_030_588_236_307_020_5,
    1.000_015_282_259_408_651_9,
    1.000_007_637_197_637_899_8,
    1.000_003_817_293_264_999_8,
    1.000_001_908_212_716_553_9,
    1.000_000_953_962_033_872_8,
    1.000_000_476_932_986_787_8,
    1.000_000_238_450_502_727_7,
    1.000_000_119_219_925_965_3,
    1.000_000_059_608_189_051_3,
    1.000_000_029_803_503_514_7,
    1.000_000_014_901_554_828_4,
];

/// Stirling-series coefficients B_2k / (2k (2k-1)).
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// ln Γ(1+z) for small |z| by its Taylor series. Accurate in relative terms
/// near the zero of ln Γ at 1.
fn ln_gamma_1p_series(z: f64) -> f64 {
    let mut sum = -EULER_GAMMA * z;
    // (-z)^k, starting from k = 1.
    let mut zk = -z;
    for (i, zeta) in ZETA.iter().enumerate() {
        let k = (i + 2) as f64;
        zk *= -z;
        sum += zeta * zk / k;
    }
    sum
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr
}

/// Natural log of the gamma function for `x > 0`.
///
/// Uses the Taylor series around 1 and 2 (where ln Γ vanishes and relative
/// accuracy matters most), otherwise shifts the argument up to 10 and applies
/// the Stirling series.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if (x - 1.0).abs() <= 0.2 {
        return Ok(ln_gamma_1p_series(x - 1.0));
    }
    if (x - 2.0).abs() <= 0.2 {
        let z = x - 2.0;
        return Ok(z.ln_1p() + ln_gamma_1p_series(z));
    }
    if x >= 10.0 {
        return Ok(ln_gamma_stirling(x));
    }
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < 10.0 {
        prod *= shifted;
        shifted += 1.0;
    }
    Ok(ln_gamma_stirling(shifted) - prod.ln())
}

/// √π · Γ(γ+1) / Γ(γ+3/2), the value of ∫₀^π sin^(2γ+1) θ dθ.
///
/// This is the factor left over after integrating the polar angle of the
/// hidden variable out of every density in the family.
pub fn theta_prefactor(gamma: f64) -> Result<f64> {
    if !(gamma > -0.5) || !gamma.is_finite() {
        return Err(Error::domain(format!(
            "gamma must be greater than -1/2, got {gamma}"
        )));
    }
    let ln_ratio = ln_gamma(gamma + 1.0)? - ln_gamma(gamma + 1.5)?;
    Ok(PI.sqrt() * ln_ratio.exp())
}
