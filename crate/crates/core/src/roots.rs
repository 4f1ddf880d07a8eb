//! Bracketing root finder shared by every implicit equation in the crate.

/// Finds the zero of a strictly increasing function on `[lo, hi]` by bisection.
///
/// The bracket is assumed valid (`f(lo) <= 0 <= f(hi)`); callers check the
/// endpoint signs themselves because they know which domain error to raise.
/// Iterates until the bracket collapses to adjacent floats, so the returned
/// abscissa is as accurate as the evaluation of `f` allows.
pub(crate) fn bisect_increasing<F>(f: F, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Same as [`bisect_increasing`] for a strictly decreasing function.
pub(crate) fn bisect_decreasing<F>(f: F, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    bisect_increasing(|x| -f(x), lo, hi)
}
