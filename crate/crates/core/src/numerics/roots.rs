//! Bracketing root finder (Brent's method).

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// A converged root together with the final bracket around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    /// Final bracket, as (point, value) pairs. One end is `x` itself.
    pub bracket: [(f64, f64); 2],
}

/// Finds a zero of `f` in `[lo, hi]`; returns once the bracket is narrower than `tol`.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    find_root_bracketed(f, lo, hi, tol).map(|r| r.x)
}

/// Brent's method: inverse quadratic / secant steps, falling back to
/// bisection whenever the interpolated step is not trustworthy.
pub fn find_root_bracketed<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::domain(format!("root tolerance must be positive, got {tol}")));
    }
    if !(lo < hi) {
        return Err(Error::domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let mut xpre = lo;
    let mut xcur = hi;
    let mut fpre = f(xpre);
    let mut fcur = f(xcur);
    if !fpre.is_finite() || !fcur.is_finite() || fpre * fcur > 0.0 {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: fpre,
            f_hi: fcur,
        });
    }
    if fpre == 0.0 {
        return Ok(Root { x: xpre, fx: 0.0, bracket: [(xpre, 0.0), (xcur, fcur)] });
    }
    if fcur == 0.0 {
        return Ok(Root { x: xcur, fx: 0.0, bracket: [(xpre, fpre), (xcur, 0.0)] });
    }

    let mut xblk = 0.0;
    let mut fblk = 0.0;
    let mut spre = 0.0;
    let mut scur = 0.0;

    for _ in 0..MAX_ITER {
        if fpre * fcur < 0.0 {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }

        let delta = 0.5 * (tol + 4.0 * f64::EPSILON * xcur.abs());
        let sbis = 0.5 * (xblk - xcur);
        if fcur == 0.0 || sbis.abs() < delta {
            return Ok(Root {
                x: xcur,
                fx: fcur,
                bracket: [(xcur, fcur), (xblk, fblk)],
            });
        }

        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }

        xpre = xcur;
        fpre = fcur;
        if scur.abs() > delta {
            xcur += scur;
        } else {
            xcur += if sbis > 0.0 { delta } else { -delta };
        }
        fcur = f(xcur);
    }

    Err(Error::NonConvergence {
        method: "find_root",
        detail: format!("{MAX_ITER} iterations on [{lo}, {hi}]"),
    })
}
