//! Pointwise inequality audits: each check evaluates both sides of one
//! inequality at concrete inputs and records the margin `rhs - lhs` together
//! with a witness, so a failure is immediately reproducible.

use serde::{Deserialize, Serialize};

use crate::conjugate::conjugate;
use crate::error::{OrliczError, Result};
use crate::function::OrliczFunction;

/// One checked inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityAudit {
    /// Which inequality was checked.
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; negative means the inequality failed at the witness.
    pub margin: f64,
    /// Named inputs the sides were evaluated at.
    pub witness: Vec<(String, f64)>,
    /// `|G*(g(t)) - (t g(t) - G(t))|` for the conjugate-of-derivative audit.
    pub identity_residual: Option<f64>,
    /// Margin of the side condition `G*(eps s) <= eps G*(s)` where audited.
    pub scaling_margin: Option<f64>,
}

impl InequalityAudit {
    pub fn passes(&self, tol: f64) -> bool {
        self.margin >= -tol && self.scaling_margin.is_none_or(|m| m >= -tol)
    }
}

fn witness(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Check `G*(g(t)) <= (p - 1) G(t)` and record the residual of the identity
/// `G*(g(t)) = t g(t) - G(t)` that yields it.
pub fn audit_conjugate_derivative(
    g_fn: &OrliczFunction,
    t: f64,
    p_est: f64,
    conj_tol: f64,
) -> Result<InequalityAudit> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(OrliczError::Domain(format!(
            "conjugate-derivative audit needs t > 0, got {t}"
        )));
    }
    let gt = g_fn.eval_raw(t);
    let slope = g_fn.deriv_raw(t);
    let lhs = conjugate(g_fn, slope, conj_tol)?.value;
    let rhs = (p_est - 1.0) * gt;
    let identity = (lhs - (slope * t - gt)).abs();
    Ok(InequalityAudit {
        check: "conjugate_derivative_bound".into(),
        lhs,
        rhs,
        margin: rhs - lhs,
        witness: witness(&[("t", t), ("g_t", slope), ("p_est", p_est)]),
        identity_residual: Some(identity),
        scaling_margin: None,
    })
}

/// Check the doubling consequence `G(a + b) <= (K/2) (G(a) + G(b))`.
pub fn audit_sum_bound(g_fn: &OrliczFunction, a: f64, b: f64, k: f64) -> Result<InequalityAudit> {
    for (name, v) in [("a", a), ("b", b)] {
        if !v.is_finite() || v < 0.0 {
            return Err(OrliczError::Domain(format!(
                "sum bound audit needs {name} >= 0, got {v}"
            )));
        }
    }
    let lhs = g_fn.eval_raw(a + b);
    let rhs = 0.5 * k * (g_fn.eval_raw(a) + g_fn.eval_raw(b));
    Ok(InequalityAudit {
        check: "sum_doubling_bound".into(),
        lhs,
        rhs,
        margin: rhs - lhs,
        witness: witness(&[("a", a), ("b", b), ("k", k)]),
        identity_residual: None,
        scaling_margin: None,
    })
}

/// Check the product bound `g(a) b <= C (eps G(a) + G(b/eps))` with
/// `C = max(p - 1, 1)`, plus the convexity step `G*(eps s) <= eps G*(s)`
/// at `s = g(a)` that its derivation uses.
pub fn audit_product_bound(
    g_fn: &OrliczFunction,
    a: f64,
    b: f64,
    eps: f64,
    p_est: f64,
    conj_tol: f64,
) -> Result<InequalityAudit> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(OrliczError::Domain(format!(
            "product bound audit needs eps in (0,1), got {eps}"
        )));
    }
    for (name, v) in [("a", a), ("b", b)] {
        if !v.is_finite() || v < 0.0 {
            return Err(OrliczError::Domain(format!(
                "product bound audit needs {name} >= 0, got {v}"
            )));
        }
    }
    let c = (p_est - 1.0).max(1.0);
    let lhs = g_fn.deriv_raw(a) * b;
    let rhs = c * (eps * g_fn.eval_raw(a) + g_fn.eval_raw(b / eps));

    // Convexity step: G* is convex with G*(0) = 0, hence sublinear in scaling.
    let s = g_fn.deriv_raw(a);
    let scaled = conjugate(g_fn, eps * s, conj_tol)?.value;
    let unscaled = conjugate(g_fn, s, conj_tol)?.value;
    let scaling_margin = eps * unscaled - scaled;

    Ok(InequalityAudit {
        check: "derivative_product_bound".into(),
        lhs,
        rhs,
        margin: rhs - lhs,
        witness: witness(&[("a", a), ("b", b), ("eps", eps), ("c", c)]),
        identity_residual: None,
        scaling_margin: Some(scaling_margin),
    })
}
