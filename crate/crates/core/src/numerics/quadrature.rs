//! Globally adaptive Gauss–Kronrod (7/15) quadrature with user breakpoints.

// Coefficient tables keep their published digits.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and interior breakpoints for [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    breakpoints: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 1000,
            breakpoints: Vec::new(),
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) {
            return Err(Error::domain(format!(
                "quadrature tolerances must be positive (rel_tol = {rel_tol}, abs_tol = {abs_tol})"
            )));
        }
        if max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            breakpoints: Vec::new(),
        })
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n.max(1);
        self
    }

    /// Replaces the breakpoints; they are sorted and exact duplicates dropped.
    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.retain(|p| p.is_finite());
        points.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        points.dedup();
        self.breakpoints = points;
        self
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn tolerance(&self, result: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * result.abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_k = WGK[7] * f_center;
    let mut res_g = WG[3] * f_center;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let abs_half = half.abs();
    Panel {
        a,
        b,
        value: res_k * half,
        error: rescale_error((res_k - res_g) * half, res_abs * abs_half, res_asc * abs_half),
    }
}

/// Integrates `f` over `[a, b]`.
///
/// Panels start at the breakpoints of `spec`, so jumps or kinks located there
/// never fall inside a panel. The panel with the largest error estimate is
/// bisected until the summed estimate drops below
/// `max(abs_tol, rel_tol * |result|)`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!(
            "integration requires finite a < b, got [{a}, {b}]"
        )));
    }
    if let Some(&p) = spec.breakpoints.iter().find(|&&p| !(p > a && p < b)) {
        return Err(Error::domain(format!(
            "breakpoint {p} is not strictly inside [{a}, {b}]"
        )));
    }

    let mut edges = Vec::with_capacity(spec.breakpoints.len() + 2);
    edges.push(a);
    edges.extend_from_slice(&spec.breakpoints);
    edges.push(b);

    let mut heap = BinaryHeap::with_capacity(2 * spec.max_subdivisions + edges.len());
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        let p = gauss_kronrod(&mut f, w[0], w[1]);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }

    let mut subdivisions = 0;
    while total_err > spec.tolerance(total) {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::NonConvergence {
                method: "integrate",
                detail: format!("non-finite integrand on [{a}, {b}]"),
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                method: "integrate",
                detail: format!(
                    "{subdivisions} subdivisions on [{a}, {b}], estimated error {total_err:e}, result {total}"
                ),
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel no longer splittable in floating point; keep its estimate.
            return Err(Error::NonConvergence {
                method: "integrate",
                detail: format!("panel [{}, {}] reached machine resolution", worst.a, worst.b),
            });
        }
        let left = gauss_kronrod(&mut f, worst.a, mid);
        let right = gauss_kronrod(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;

        // Running sums drift; resum occasionally so the stopping test stays honest.
        if subdivisions % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }

    Ok(heap.iter().map(|p| p.value).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn integrates_reference_examples() {
        let spec = QuadratureSpec::default();
        let v = integrate(|x: f64| x.cos().powi(2), 0.0, 2.0 * PI, &spec).unwrap();
        assert_abs_diff_eq!(v, PI, epsilon = 1e-12);

        let kinked = spec.clone().with_breakpoints(vec![PI / 2.0, 1.5 * PI]);
        let v = integrate(|x: f64| x.cos().abs(), 0.0, 2.0 * PI, &kinked).unwrap();
        assert_abs_diff_eq!(v, 4.0, epsilon = 1e-12);

        let v = integrate(|x: f64| x.sin().powi(3), 0.0, PI, &spec).unwrap();
        assert_abs_diff_eq!(v, 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn handles_jump_at_breakpoint() {
        let spec = QuadratureSpec::default().with_breakpoints(vec![0.3]);
        let v = integrate(|x| if x < 0.3 { 1.0 } else { 5.0 }, 0.0, 1.0, &spec).unwrap();
        assert_abs_diff_eq!(v, 0.3 + 5.0 * 0.7, epsilon = 1e-13);
    }

    #[test]
    fn unflagged_kink_still_converges() {
        let spec = QuadratureSpec::default();
        let v = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &spec).unwrap();
        assert_abs_diff_eq!(v, 0.045 + 0.245, epsilon = 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let spec = QuadratureSpec::default().with_max_subdivisions(3);
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &spec).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn rejects_bad_intervals_and_breakpoints() {
        let spec = QuadratureSpec::default();
        assert!(integrate(|x| x, 1.0, 1.0, &spec).is_err());
        assert!(integrate(|x| x, 2.0, 1.0, &spec).is_err());
        let outside = spec.clone().with_breakpoints(vec![3.0]);
        assert!(integrate(|x| x, 0.0, 1.0, &outside).is_err());
        let on_edge = spec.with_breakpoints(vec![1.0]);
        assert!(integrate(|x| x, 0.0, 1.0, &on_edge).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e-12, 10).is_err());
        assert!(QuadratureSpec::new(1e-10, -1.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-10, 1e-12, 0).is_err());
        let s = QuadratureSpec::default().with_breakpoints(vec![0.5, 0.2, 0.5, f64::NAN]);
        assert_eq!(s.breakpoints(), &[0.2, 0.5]);
    }

    fn poly_antiderivative(c: &[f64; 6], x: f64) -> f64 {
        c.iter()
            .enumerate()
            .map(|(k, ck)| ck * x.powi(k as i32 + 1) / (k as f64 + 1.0))
            .sum()
    }

    proptest! {
        #[test]
        fn exact_on_quintics(
            c in prop::array::uniform6(-3.0f64..3.0),
            a in -4.0f64..4.0,
            w in 0.01f64..6.0,
        ) {
            let b = a + w;
            let f = |x: f64| c.iter().rev().fold(0.0, |acc, ck| acc * x + ck);
            let got = integrate(f, a, b, &QuadratureSpec::default()).unwrap();
            let want = poly_antiderivative(&c, b) - poly_antiderivative(&c, a);
            prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0));
        }

        #[test]
        fn breakpoints_split_additively(
            mut cuts in prop::collection::vec(0.05f64..0.95, 1..4),
            freq in 0.5f64..4.0,
        ) {
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            // Jumps by one at every cut.
            let steps = cuts.clone();
            let f = |x: f64| (freq * x).sin() + x * x + steps.iter().filter(|&&c| x > c).count() as f64;
            let spec = QuadratureSpec::default().with_breakpoints(cuts.clone());
            let whole = integrate(f, 0.0, 1.0, &spec).unwrap();

            let mut edges = vec![0.0];
            edges.extend(cuts.iter().copied());
            edges.push(1.0);
            let pieces: f64 = edges
                .windows(2)
                .map(|w| integrate(f, w[0], w[1], &QuadratureSpec::default()).unwrap())
                .sum();
            prop_assert!((whole - pieces).abs() <= 1e-12);
        }
    }
}
