//! Bounded 2-D maximization: coarse grid scan followed by pattern search.

use crate::error::{Error, Result};
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

type Bound = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A region `phi1 ∈ [phi1_lo, phi1_hi]`, `phi2 ∈ [phi2_lo(phi1), phi2_hi(phi1)]`.
#[derive(Clone)]
pub struct SearchRegion {
    phi1_lo: f64,
    phi1_hi: f64,
    phi2_lo: Bound,
    phi2_hi: Bound,
}

impl fmt::Debug for SearchRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SearchRegion")
            .field("phi1_lo", &self.phi1_lo)
            .field("phi1_hi", &self.phi1_hi)
            .finish_non_exhaustive()
    }
}

impl SearchRegion {
    pub fn new<L, H>(phi1_lo: f64, phi1_hi: f64, phi2_lo: L, phi2_hi: H) -> Result<Self>
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(phi1_lo > 0.0 && phi1_lo < phi1_hi && phi1_hi <= FRAC_PI_2) {
            return Err(Error::domain(format!(
                "search region needs 0 < phi1_lo < phi1_hi <= pi/2, got [{phi1_lo}, {phi1_hi}]"
            )));
        }
        let region = Self {
            phi1_lo,
            phi1_hi,
            phi2_lo: Arc::new(phi2_lo),
            phi2_hi: Arc::new(phi2_hi),
        };
        for i in 0..=64 {
            let p1 = phi1_lo + (phi1_hi - phi1_lo) * i as f64 / 64.0;
            let (lo, hi) = region.phi2_bounds(p1);
            if !(lo <= hi) {
                return Err(Error::domain(format!(
                    "empty phi2 range [{lo}, {hi}] at phi1 = {p1}"
                )));
            }
        }
        Ok(region)
    }

    /// The triangle `lo <= phi1 <= pi/2`, `phi1 <= phi2 <= pi - phi1`.
    pub fn restricted(phi1_lo: f64) -> Result<Self> {
        Self::new(phi1_lo, FRAC_PI_2, |p| p, |p| PI - p)
    }

    pub fn phi1_range(&self) -> (f64, f64) {
        (self.phi1_lo, self.phi1_hi)
    }

    pub fn phi2_bounds(&self, phi1: f64) -> (f64, f64) {
        ((self.phi2_lo)(phi1), (self.phi2_hi)(phi1))
    }

    pub fn contains(&self, phi1: f64, phi2: f64) -> bool {
        let (lo, hi) = self.phi2_bounds(phi1);
        phi1 >= self.phi1_lo && phi1 <= self.phi1_hi && phi2 >= lo && phi2 <= hi
    }

    fn project(&self, phi1: f64, phi2: f64) -> (f64, f64) {
        let p1 = phi1.clamp(self.phi1_lo, self.phi1_hi);
        let (lo, hi) = self.phi2_bounds(p1);
        (p1, phi2.clamp(lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub point: (f64, f64),
    pub value: f64,
}

const DIRECTIONS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (-1.0, 0.0),
    (0.0, 1.0),
    (0.0, -1.0),
    (1.0, 1.0),
    (1.0, -1.0),
    (-1.0, 1.0),
    (-1.0, -1.0),
];

/// Ties go to the lexicographically smallest point so the result does not
/// depend on evaluation order.
fn better(cand: &Maximum, best: &Maximum) -> bool {
    cand.value > best.value
        || (cand.value == best.value
            && (cand.point.0, cand.point.1) < (best.point.0, best.point.1))
}

/// Maximizes `f` over `region`.
///
/// A `coarse_n x coarse_n` grid (rows in `phi1`, each row spanning its own
/// `phi2` bounds) is scanned in parallel; the best grid point seeds a compass
/// search over eight directions with projection back onto the region. The
/// step starts at the grid spacing and halves on every unsuccessful sweep
/// until it is at most `refine_tol`.
pub fn maximize_region<F>(f: F, region: &SearchRegion, coarse_n: usize, refine_tol: f64) -> Result<Maximum>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    if coarse_n < 16 {
        return Err(Error::domain(format!("coarse grid needs at least 16 points per axis, got {coarse_n}")));
    }
    if !(refine_tol > 0.0) {
        return Err(Error::domain(format!("refine_tol must be positive, got {refine_tol}")));
    }

    let (lo1, hi1) = region.phi1_range();
    let denom = (coarse_n - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..coarse_n)
        .flat_map(|i| {
            let p1 = lo1 + (hi1 - lo1) * i as f64 / denom;
            let (lo2, hi2) = region.phi2_bounds(p1);
            (0..coarse_n).map(move |j| (p1, lo2 + (hi2 - lo2) * j as f64 / denom))
        })
        .collect();

    let values: Vec<f64> = grid
        .par_iter()
        .map(|&(a, b)| f(a, b))
        .collect::<Result<_>>()?;

    let mut best = Maximum { point: grid[0], value: values[0] };
    for (&point, &value) in grid.iter().zip(&values).skip(1) {
        let cand = Maximum { point, value };
        if better(&cand, &best) {
            best = cand;
        }
    }

    let mut step = ((hi1 - lo1) / denom).max({
        let (lo2, hi2) = region.phi2_bounds(best.point.0);
        (hi2 - lo2) / denom
    });
    while step > refine_tol {
        let trials: Vec<(f64, f64)> = DIRECTIONS
            .iter()
            .map(|&(dx, dy)| region.project(best.point.0 + dx * step, best.point.1 + dy * step))
            .filter(|&p| p != best.point)
            .collect();
        let trial_values: Vec<f64> = trials
            .par_iter()
            .map(|&(a, b)| f(a, b))
            .collect::<Result<_>>()?;

        let mut moved = false;
        for (&point, &value) in trials.iter().zip(&trial_values) {
            if value > best.value {
                let cand = Maximum { point, value };
                if !moved || better(&cand, &best) {
                    best = cand;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn finds_interior_quadratic_peak() {
        let region = SearchRegion::restricted(1e-3).unwrap();
        let f = |x: f64, y: f64| Ok(-(x - 0.8).powi(2) - (y - 2.3).powi(2));
        let m = maximize_region(f, &region, 32, 1e-9).unwrap();
        assert_abs_diff_eq!(m.point.0, 0.8, epsilon = 1e-7);
        assert_abs_diff_eq!(m.point.1, 2.3, epsilon = 1e-7);
        assert_abs_diff_eq!(m.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn slides_along_slanted_edge() {
        // Unconstrained peak lies outside the triangle; the constrained one is
        // on the edge phi2 = pi - phi1 at phi1 = 0.7.
        let region = SearchRegion::restricted(1e-3).unwrap();
        let f = |x: f64, y: f64| Ok(-(x - 0.7).powi(2) + y);
        let m = maximize_region(f, &region, 40, 1e-10).unwrap();
        // On the edge: maximize -(x-0.7)^2 + pi - x  =>  x = 0.2.
        assert_abs_diff_eq!(m.point.0, 0.2, epsilon = 1e-6);
        assert_abs_diff_eq!(m.point.1, PI - 0.2, epsilon = 1e-6);
        assert!(region.contains(m.point.0, m.point.1));
    }

    #[test]
    fn constant_objective() {
        let region = SearchRegion::restricted(1e-3).unwrap();
        let m = maximize_region(|_, _| Ok(1.0), &region, 16, 1e-6).unwrap();
        assert_eq!(m.value, 1.0);
        assert!(region.contains(m.point.0, m.point.1));
        // Tie-break picks the first grid point.
        assert_eq!(m.point, (1e-3, 1e-3));
    }

    #[test]
    fn propagates_objective_errors() {
        let region = SearchRegion::restricted(1e-3).unwrap();
        let err = maximize_region(
            |x, _| if x > 1.0 { Err(Error::domain("boom")) } else { Ok(x) },
            &region,
            16,
            1e-6,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn validates_inputs() {
        assert!(SearchRegion::new(0.0, 1.0, |p| p, |p| p + 1.0).is_err());
        assert!(SearchRegion::new(0.1, 2.0, |p| p, |p| p + 1.0).is_err());
        assert!(SearchRegion::new(0.1, 1.0, |p| p + 1.0, |p| p).is_err());
        let region = SearchRegion::restricted(1e-3).unwrap();
        assert!(maximize_region(|_, _| Ok(0.0), &region, 15, 1e-6).is_err());
        assert!(maximize_region(|_, _| Ok(0.0), &region, 16, 0.0).is_err());
    }
}
