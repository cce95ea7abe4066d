//! Bracketed scalar root finding.

use crate::error::{Result, ScatterError};

/// Root of `g` on [lo, hi] by bisection, run until the bracket collapses to
/// adjacent floating-point values. `g(lo)` and `g(hi)` must differ in sign.
pub fn bisect_root<G>(mut g: G, mut lo: f64, mut hi: f64) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() || !g_lo.is_finite() || !g_hi.is_finite() {
        return Err(ScatterError::invalid(
            "bracket",
            format!("no sign change on [{lo:e}, {hi:e}]"),
        ));
    }
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Pick whichever end is closer to zero.
            return Ok(if g_lo.abs() <= g(hi).abs() { lo } else { hi });
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Err(ScatterError::OptimizerFailed { iterations: 2200 })
}
