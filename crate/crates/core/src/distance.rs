//! Measurement-dependence distance between the hidden-variable densities of
//! two setting pairs, and its maximum over setting angles.
//!
//! For relative angles φ_a and φ_b the L1 distance reduces to
//! `S ∫₀^{2π} |g(φ′; φ_a) − g(φ′; φ_b)| dφ′` once the polar angle is
//! integrated out. The integrand jumps at the sign boundaries of both
//! settings and has kinks where the two densities cross; both kinds of
//! points become quadrature breakpoints.

use crate::error::{Error, Result};
use crate::model::{reduced_density_g, sign_boundaries, solve_coefficients, Coefficients, GammaParam, SettingAngle};
use crate::numerics::{find_root, integrate, maximize_region, theta_prefactor, QuadratureSpec, SearchRegion};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

pub const DEFAULT_GRID_N: usize = 181;
pub const DEFAULT_REFINE_TOL: f64 = 1e-6;
pub const MIN_GRID_N: usize = 32;

/// Lower edge of the searched φ_a range; the open end at 0 is excluded.
pub const REGION_PHI_MIN: f64 = 1e-3;

/// Samples per smooth panel when scanning g_a − g_b for sign changes.
const CROSSING_SCAN: usize = 48;

/// d on the antidiagonal at φ = π/4, (2/3)(√2 − 1). Close to but below the maximum.
pub const QUARTER_ANGLE_D: f64 = 0.276_142;
/// γ = 0 maximum, rounded to six places.
pub const GAMMA0_DMAX: f64 = 0.276_434;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistancePair {
    pub phi_a: SettingAngle,
    pub phi_b: SettingAngle,
}

impl DistancePair {
    pub fn new(phi_a: f64, phi_b: f64) -> Result<Self> {
        Ok(Self {
            phi_a: SettingAngle::new(phi_a)?,
            phi_b: SettingAngle::new(phi_b)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmaxResult {
    pub gamma: GammaParam,
    pub argmax: DistancePair,
    pub d_max: f64,
    pub grid_n: usize,
    pub refine_tol: f64,
}

/// Distance between the densities at `pair`, each with its own solved coefficients.
pub fn distance_d(pair: DistancePair, gamma: GammaParam, quad: &QuadratureSpec) -> Result<f64> {
    let a = solve_coefficients(pair.phi_a, gamma, quad)?;
    let b = if pair.phi_b == pair.phi_a {
        a
    } else {
        solve_coefficients(pair.phi_b, gamma, quad)?
    };
    distance_between(&a, &b, quad)
}

/// Distance between two already-solved densities of the same family member.
pub fn distance_between(a: &Coefficients, b: &Coefficients, quad: &QuadratureSpec) -> Result<f64> {
    if a.gamma != b.gamma {
        return Err(Error::domain(format!(
            "cannot compare densities of different family members (gamma {} vs {})",
            a.gamma, b.gamma
        )));
    }
    let s = theta_prefactor(a.gamma.value())?;
    let diff = |t: f64| reduced_density_g(t, a) - reduced_density_g(t, b);

    let mut cuts = sign_boundaries(a.phi.radians());
    cuts.extend(sign_boundaries(b.phi.radians()));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);

    let crossings = density_crossings(&diff, &cuts)?;
    cuts.extend(crossings);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);

    let spec = quad.clone().with_breakpoints(cuts);
    Ok(s * integrate(|t| diff(t).abs(), 0.0, TAU, &spec)?)
}

/// Zeros of `diff` inside the smooth panels delimited by `cuts` on [0, 2π].
fn density_crossings<F: Fn(f64) -> f64>(diff: &F, cuts: &[f64]) -> Result<Vec<f64>> {
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(0.0);
    edges.extend_from_slice(cuts);
    edges.push(TAU);

    let mut roots = Vec::new();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = (hi - lo) / CROSSING_SCAN as f64;
        // Stay off the panel edges, where diff jumps.
        let mut prev_x = lo + 1e-9 * h;
        let mut prev_f = diff(prev_x);
        for i in 1..=CROSSING_SCAN {
            let x = if i == CROSSING_SCAN { hi - 1e-9 * h } else { lo + i as f64 * h };
            let fx = diff(x);
            if prev_f * fx < 0.0 {
                roots.push(find_root(diff, prev_x, x, 1e-14)?);
            }
            prev_x = x;
            prev_f = fx;
        }
    }
    Ok(roots)
}

/// Closed-form γ = 0 distance along the anti-diagonal φ_b = π − φ_a.
pub fn distance_gamma0_antidiagonal(phi: f64) -> Result<f64> {
    if !(phi > 0.0 && phi <= FRAC_PI_2) {
        return Err(Error::domain(format!("phi must be in (0, pi/2], got {phi}")));
    }
    Ok((2.0 * phi + PI * phi.cos() - PI) / (PI - phi))
}

/// Derivative condition for the maximum of [`distance_gamma0_antidiagonal`],
/// up to a positive factor.
pub fn stationarity_residual(phi: f64) -> f64 {
    1.0 + (phi - PI) * phi.sin() + phi.cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gamma0Maximum {
    pub phi_star: f64,
    pub d_max: f64,
    pub residual: f64,
}

/// Root of the stationarity equation on [0.5, 1.2] and the distance there.
pub fn solve_gamma0_maximum() -> Result<Gamma0Maximum> {
    let phi_star = find_root(stationarity_residual, 0.5, 1.2, 1e-15)?;
    Ok(Gamma0Maximum {
        phi_star,
        d_max: distance_gamma0_antidiagonal(phi_star)?,
        residual: stationarity_residual(phi_star),
    })
}

/// Maximizes the distance over `0 < φ_a ≤ π/2`, `φ_a ≤ φ_b ≤ π − φ_a`.
pub fn find_dmax(gamma: GammaParam, grid_n: usize, refine_tol: f64, quad: &QuadratureSpec) -> Result<DmaxResult> {
    if grid_n < MIN_GRID_N {
        return Err(Error::domain(format!("grid_n must be at least {MIN_GRID_N}, got {grid_n}")));
    }
    let region = SearchRegion::restricted(REGION_PHI_MIN)?;
    let objective = |a: f64, b: f64| distance_d(DistancePair::new(a, b)?, gamma, quad);
    let best = maximize_region(objective, &region, grid_n, refine_tol)?;
    Ok(DmaxResult {
        gamma,
        argmax: DistancePair::new(best.point.0, best.point.1)?,
        d_max: best.value,
        grid_n,
        refine_tol,
    })
}

/// [`find_dmax`] for every γ, in input order. Failures name the γ they hit.
pub fn dmax_scan(gammas: &[GammaParam], grid_n: usize, refine_tol: f64, quad: &QuadratureSpec) -> Result<Vec<DmaxResult>> {
    if gammas.is_empty() {
        return Err(Error::domain("gamma list is empty"));
    }
    gammas
        .par_iter()
        .map(|&g| {
            find_dmax(g, grid_n, refine_tol, quad).map_err(|e| Error::AtGamma {
                gamma: g.value(),
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::coefficients_gamma0_closed;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn gamma(g: f64) -> GammaParam {
        GammaParam::new(g).unwrap()
    }

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn d(a: f64, b: f64, g: f64) -> f64 {
        distance_d(DistancePair::new(a, b).unwrap(), gamma(g), &quad()).unwrap()
    }

    /// Oracle: midpoint rule on a fine grid with closed-form γ = 0 coefficients.
    fn dense_gamma0_distance(a: f64, b: f64) -> f64 {
        let ca = coefficients_gamma0_closed(SettingAngle::new(a).unwrap());
        let cb = coefficients_gamma0_closed(SettingAngle::new(b).unwrap());
        let n = 2_000_000;
        let h = TAU / n as f64;
        let sum: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                (reduced_density_g(t, &ca) - reduced_density_g(t, &cb)).abs()
            })
            .sum();
        2.0 * sum * h
    }

    #[test]
    fn identical_settings_have_zero_distance() {
        for g in [-0.4, 0.0, 0.3] {
            assert_eq!(d(1.0, 1.0, g), 0.0);
        }
    }

    #[test]
    fn quarter_angle_and_maximum_values() {
        assert_abs_diff_eq!(d(FRAC_PI_4, 3.0 * FRAC_PI_4, 0.0), 2.0 / 3.0 * (2f64.sqrt() - 1.0), epsilon = 1e-10);
        assert_abs_diff_eq!(d(FRAC_PI_4, 3.0 * FRAC_PI_4, 0.0), QUARTER_ANGLE_D, epsilon = 1e-5);
        assert_abs_diff_eq!(d(0.81047, PI - 0.81047, 0.0), GAMMA0_DMAX, epsilon = 1e-5);
    }

    #[test]
    fn matches_dense_oracle_off_diagonal() {
        for (a, b) in [(0.4, 1.9), (1.2, 1.3), (0.2, 2.9)] {
            assert_abs_diff_eq!(d(a, b, 0.0), dense_gamma0_distance(a, b), epsilon = 1e-6);
        }
    }

    #[test]
    fn antidiagonal_closed_form() {
        assert_abs_diff_eq!(distance_gamma0_antidiagonal(FRAC_PI_4).unwrap(), 0.276_142, epsilon = 1e-6);
        assert_abs_diff_eq!(distance_gamma0_antidiagonal(FRAC_PI_2).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(distance_gamma0_antidiagonal(0.81047).unwrap(), 0.276_434, epsilon = 1e-6);
        assert!(distance_gamma0_antidiagonal(0.0).is_err());
        assert!(distance_gamma0_antidiagonal(1.6).is_err());
        for p in [0.3, 0.6, FRAC_PI_4, 0.81047, 1.2, FRAC_PI_2] {
            let closed = distance_gamma0_antidiagonal(p).unwrap();
            assert_abs_diff_eq!(d(p, PI - p, 0.0), closed, epsilon = 1e-6);
        }
    }

    #[test]
    fn stationarity_examples() {
        assert!(stationarity_residual(0.81047).abs() < 1e-4);
        assert_abs_diff_eq!(stationarity_residual(FRAC_PI_4), 0.041_025_679_377_160_18, epsilon = 1e-12);
        assert_abs_diff_eq!(stationarity_residual(1e-12), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn gamma0_maximum() {
        let m = solve_gamma0_maximum().unwrap();
        assert_abs_diff_eq!(m.phi_star, 0.81047, epsilon = 1e-4);
        assert_abs_diff_eq!(m.d_max, 0.276_434, epsilon = 1e-5);
        assert!(m.residual.abs() < 1e-10);
        for delta in [-1e-3, 1e-3] {
            assert!(distance_gamma0_antidiagonal(m.phi_star + delta).unwrap() < m.d_max);
        }
    }

    #[test]
    fn symmetric_under_swap_and_reflection() {
        for g in [-0.4, 0.0, 0.4] {
            for i in 1..=10 {
                for j in 1..=10 {
                    let a = PI * i as f64 / 11.0;
                    let b = PI * j as f64 / 11.0 + 0.013;
                    let v = d(a, b, g);
                    assert!((0.0..=2.0).contains(&v));
                    assert_abs_diff_eq!(v, d(b, a, g), epsilon = 1e-9);
                    assert_abs_diff_eq!(v, d(PI - b, PI - a, g), epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn gamma0_unrestricted_argmax_on_antidiagonal() {
        let n = 64;
        let h = PI / n as f64;
        let mut best = (0.0, 0.0, f64::NEG_INFINITY);
        for i in 1..n {
            for j in 1..n {
                let (a, b) = (i as f64 * h, j as f64 * h);
                let v = d(a, b, 0.0);
                if v > best.2 {
                    best = (a, b, v);
                }
            }
        }
        assert!((best.0 + best.1 - PI).abs() <= h + 1e-12, "{best:?}");
    }

    #[test]
    fn rejects_mixed_family_members() {
        let a = solve_coefficients(SettingAngle::new(1.0).unwrap(), gamma(0.0), &quad()).unwrap();
        let b = solve_coefficients(SettingAngle::new(1.0).unwrap(), gamma(0.1), &quad()).unwrap();
        assert!(distance_between(&a, &b, &quad()).is_err());
    }

    #[test]
    fn find_dmax_validates_grid() {
        assert!(matches!(find_dmax(gamma(0.0), 31, 1e-6, &quad()), Err(Error::Domain(_))));
        assert!(matches!(dmax_scan(&[], 64, 1e-6, &quad()), Err(Error::Domain(_))));
    }

    #[test]
    fn find_dmax_gamma0_coarse() {
        let r = find_dmax(gamma(0.0), 48, 1e-7, &quad()).unwrap();
        assert_abs_diff_eq!(r.d_max, 0.276_434, epsilon = 1e-5);
        assert_abs_diff_eq!(r.argmax.phi_a.radians(), 0.81047, epsilon = 1e-3);
        assert_abs_diff_eq!(r.argmax.phi_b.radians(), PI - 0.81047, epsilon = 1e-3);
    }
}
