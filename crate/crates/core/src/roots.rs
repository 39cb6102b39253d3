//! Bracketed scalar root refinement: bisection with secant acceleration.

/// Refines a root of `f` inside `[lo, hi]`, given `f(lo)` and `f(hi)` of
/// opposite sign. Runs to floating-point bracket collapse.
pub(crate) fn refine<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    mut fhi: f64,
) -> f64 {
    debug_assert!(flo == 0.0 || fhi == 0.0 || (flo < 0.0) != (fhi < 0.0));
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
            break;
        }
        // secant candidate, falling back to the midpoint when it leaves the
        // bracket or stalls at an endpoint
        let mut mid = lo - flo * width / (fhi - flo);
        let margin = 0.01 * width;
        if !mid.is_finite() || mid <= lo + margin || mid >= hi - margin {
            mid = 0.5 * (lo + hi);
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if (fmid < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    // midpoint weighted toward the smaller residual
    if flo.abs() < fhi.abs() {
        lo
    } else {
        hi
    }
}

/// Scans `[lo, hi]` at `n+1` equally spaced points and returns every
/// subinterval over which `f` changes sign, as `(lo, hi, f_lo, f_hi)`.
pub(crate) fn sign_change_brackets<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    n: usize,
) -> Vec<(f64, f64, f64, f64)> {
    let mut out = Vec::new();
    if !(hi > lo) || n == 0 {
        return out;
    }
    let h = (hi - lo) / n as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    if f0 == 0.0 {
        out.push((x0, x0, 0.0, 0.0));
    }
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + i as f64 * h };
        let f1 = f(x1);
        if f1 == 0.0 {
            // exact hit at a node; report a degenerate bracket once
            out.push((x1, x1, 0.0, 0.0));
        } else if f0 != 0.0 && f0.is_finite() && f1.is_finite() && (f0 < 0.0) != (f1 < 0.0) {
            out.push((x0, x1, f0, f1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}
