//! One-dimensional search primitives used by the threshold optimizer.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `width`. Returns `(x, f(x))`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, width: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > width {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Fixed-iteration bisection for a sign change of `g` on `[lo, hi]`.
pub fn bisect<G>(mut g: G, lo: f64, hi: f64, iterations: usize) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    let (g_lo, g_hi) = (g(lo)?, g(hi)?);
    if g_lo.signum() == g_hi.signum() || g_lo.is_nan() || g_hi.is_nan() {
        return Err(Error::BracketFailure { lo, hi, g_lo, g_hi });
    }
    let rising = g_lo < 0.0;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..iterations {
        let mid = 0.5 * (a + b);
        let gm = g(mid)?;
        if (gm < 0.0) == rising {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-10);
        // a flat peak is only resolvable to about sqrt(machine epsilon)
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_handles_boundary_peak() {
        let (x, _) = golden_section_max(|x| x, 0.0, 1.0, 1e-10);
        assert!((x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_both_orientations() {
        let up = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 60).unwrap();
        assert!((up - 2f64.sqrt()).abs() < 1e-15);
        let down = bisect(|x| Ok(2.0 - x * x), 0.0, 2.0, 60).unwrap();
        assert!((down - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bisect_reports_missing_bracket() {
        let err = bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 10).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }
}
