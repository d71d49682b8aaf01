//! Numerical complementary function `G*(b) = sup { b*t - G(t) : t > 0 }`.
//!
//! The objective `h(t) = b*t - G(t)` is concave because `G` is convex, so the
//! supremum is located by doubling an upper bound until `h` starts to fall and
//! then shrinking the bracket with golden-section steps. No derivative is
//! needed, which keeps the routine usable for finite-difference customs.

use serde::{Deserialize, Serialize};

use crate::error::{OrliczError, Result};
use crate::function::OrliczFunction;

/// Inverse golden ratio, the bracket shrink factor per iteration.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Cap on bracket expansion; an objective still rising past this point is
/// reported as an unbounded conjugate. Kept well below the range where
/// squared intermediates overflow inside user formulas.
const EXPANSION_CAP: f64 = 1e100;

const MAX_ITER: usize = 400;

/// Outcome of one conjugate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateResult {
    /// `G*(b)`, clamped at 0 from below.
    pub value: f64,
    /// Location of the maximizer of `b*t - G(t)`.
    pub argmax: f64,
    /// Width of the final bracket around the maximizer.
    pub bracket_width: f64,
    /// Function evaluations spent (expansion plus golden-section).
    pub iterations: usize,
}

/// Evaluate `G*(b)` to a bracket width of `tol`.
///
/// `b = 0` returns 0 exactly: `-G(t) <= 0` with supremum approached at the
/// origin. For `b > 0` the bracket `[0, T]` is grown by doubling until the
/// objective decreases across `[T, 2T]`, then shrunk by golden section. The
/// shrink stops at `tol` or at the floating-point resolution of the bracket
/// endpoints, whichever is coarser.
pub fn conjugate(g_fn: &OrliczFunction, b: f64, tol: f64) -> Result<ConjugateResult> {
    if !b.is_finite() || b < 0.0 {
        return Err(OrliczError::Domain(format!(
            "conjugate needs finite b >= 0, got {b}"
        )));
    }
    if !(tol > 0.0) {
        return Err(OrliczError::Domain(format!(
            "conjugate tolerance must be positive, got {tol}"
        )));
    }
    if b == 0.0 {
        return Ok(ConjugateResult {
            value: 0.0,
            argmax: 0.0,
            bracket_width: 0.0,
            iterations: 0,
        });
    }

    let h = |t: f64| b * t - g_fn.eval_raw(t);
    let mut evals = 0usize;

    // Expansion: find T with h falling on [T, 2T]; concavity then bounds the
    // maximizer by 2T.
    let mut t_hi = 1.0f64;
    let mut h_hi = h(t_hi);
    evals += 1;
    loop {
        let t_next = 2.0 * t_hi;
        let h_next = h(t_next);
        evals += 1;
        if h_next < h_hi || (h_next == h_hi && h_next.is_finite()) {
            t_hi = t_next;
            break;
        }
        if t_next > EXPANSION_CAP {
            return Err(OrliczError::UnboundedConjugate { b, reached: t_next });
        }
        t_hi = t_next;
        h_hi = h_next;
    }

    // Golden-section shrink on [0, t_hi].
    let mut lo = 0.0f64;
    let mut hi = t_hi;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = h(x1);
    let mut f2 = h(x2);
    evals += 2;

    while hi - lo > tol {
        // Stop once the bracket is at the resolution of the endpoints.
        if hi - lo <= f64::EPSILON * 8.0 * hi.abs() {
            break;
        }
        if evals >= MAX_ITER {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = h(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = h(x2);
        }
        evals += 1;
    }

    let (argmax, best) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Ok(ConjugateResult {
        value: best.max(0.0),
        argmax,
        bracket_width: hi - lo,
        iterations: evals,
    })
}

/// Young gap `G(a) + G*(b) - a*b`; nonnegative up to the conjugation
/// tolerance, zero exactly at `b = g(a)`.
pub fn young_gap(g_fn: &OrliczFunction, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !a.is_finite() || a < 0.0 {
        return Err(OrliczError::Domain(format!(
            "young_gap needs finite a >= 0, got {a}"
        )));
    }
    let conj = conjugate(g_fn, b, tol)?;
    Ok(g_fn.eval_raw(a) + conj.value - a * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::OrliczFunction;

    const TOL: f64 = 1e-10;

    #[test]
    fn quadratic_conjugate_is_quadratic() {
        // oracle: G(t) = t^2/2 is self-conjugate, so G*(3) = 4.5 at t = 3
        let g = OrliczFunction::power(2.0).unwrap();
        let r = conjugate(&g, 3.0, TOL).unwrap();
        assert!((r.value - 4.5).abs() < 1e-9, "value {}", r.value);
        assert!((r.argmax - 3.0).abs() < 1e-6, "argmax {}", r.argmax);
    }

    #[test]
    fn cubic_conjugate_matches_closed_form() {
        // oracle: G(t) = t^3/3 has G*(s) = s^(3/2)/(3/2); at s = 8 that is
        // 2 * 8^(3/2) / 3 = 15.0849...
        let g = OrliczFunction::power(3.0).unwrap();
        let expected = 2.0 * 8f64.powf(1.5) / 3.0;
        let r = conjugate(&g, 8.0, TOL).unwrap();
        assert!((r.value - expected).abs() < 1e-8 * expected);
        assert!((expected - 15.0849).abs() < 1e-4);
    }

    #[test]
    fn zero_argument_gives_zero() {
        for g in [
            OrliczFunction::power(1.5).unwrap(),
            OrliczFunction::power_log(2.0).unwrap(),
            OrliczFunction::exp_minus(),
        ] {
            let r = conjugate(&g, 0.0, TOL).unwrap();
            assert_eq!(r.value, 0.0);
            assert_eq!(r.argmax, 0.0);
        }
    }

    #[test]
    fn exp_minus_conjugate_matches_closed_form() {
        // oracle: (1+s) ln(1+s) - s at s = 2 is 3 ln 3 - 2
        let g = OrliczFunction::exp_minus();
        let expected = 3.0 * 3f64.ln() - 2.0;
        let r = conjugate(&g, 2.0, TOL).unwrap();
        assert!((r.value - expected).abs() < 1e-9);
    }

    #[test]
    fn result_dominates_its_own_argmax() {
        let g = OrliczFunction::power(2.5).unwrap();
        for &b in &[1e-3, 0.1, 1.0, 7.0, 250.0] {
            let r = conjugate(&g, b, TOL).unwrap();
            assert!(r.value >= b * r.argmax - g.eval_raw(r.argmax) - TOL);
            assert!(r.value >= 0.0);
        }
    }

    #[test]
    fn bad_tolerance_is_a_domain_error() {
        let g = OrliczFunction::power(2.0).unwrap();
        assert!(matches!(
            conjugate(&g, 1.0, 0.0),
            Err(OrliczError::Domain(_))
        ));
        assert!(matches!(
            conjugate(&g, -1.0, TOL),
            Err(OrliczError::Domain(_))
        ));
    }

    #[test]
    fn bounded_slope_function_reports_unbounded_conjugate() {
        // sqrt(1+t^2) - 1 has slope < 1 everywhere, so G*(2) = +inf.
        let g = OrliczFunction::custom(
            "hyperbolic",
            |t: f64| (1.0 + t * t).sqrt() - 1.0,
            |t: f64| t / (1.0 + t * t).sqrt(),
        )
        .unwrap();
        assert!(matches!(
            conjugate(&g, 2.0, TOL),
            Err(OrliczError::UnboundedConjugate { .. })
        ));
    }

    #[test]
    fn young_gap_nonnegative_and_tight_at_derivative() {
        let g = OrliczFunction::power(2.0).unwrap();
        // equality case b = g(a) = a
        let gap = young_gap(&g, 2.0, 2.0, TOL).unwrap();
        assert!(gap.abs() <= 1e-6 * (1.0 + g.eval_raw(2.0)));
        // t^2/2 at a=1, b=3: 1/2 + 9/2 - 3 = 2
        let gap = young_gap(&g, 1.0, 3.0, TOL).unwrap();
        assert!((gap - 2.0).abs() < 1e-9);
        // a = b = 0
        let gap = young_gap(&g, 0.0, 0.0, TOL).unwrap();
        assert_eq!(gap, 0.0);
    }
}
