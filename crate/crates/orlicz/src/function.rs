//! Orlicz functions: convex, increasing `G` with `G(0) = 0` and `G(t)/t -> 0`
//! at the origin, together with the derivative `g = G'`.
//!
//! Built-in families:
//! * [`OrliczFunction::power`] — `G(t) = t^p / p` (and [`OrliczFunction::monomial`]
//!   for the unnormalized `t^p`),
//! * [`OrliczFunction::power_log`] — `G(t) = t^p ln(1 + t)`,
//! * [`OrliczFunction::exp_minus`] — `G(t) = e^t - t - 1`, which violates the
//!   doubling condition and serves as a negative control,
//! * [`OrliczFunction::custom`] — user-supplied closures, validated on a probe
//!   grid at construction.

use std::fmt;
use std::sync::Arc;

use crate::error::{OrliczError, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Family tag carried by an [`OrliczFunction`] for reporting.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `coeff * t^p`, `p > 1`, `coeff > 0`.
    Power {
        p: f64,
        coeff: f64,
    },
    /// `t^p * ln(1 + t)`, `p >= 1`.
    PowerLog {
        p: f64,
    },
    /// `e^t - t - 1`.
    ExpMinus,
    Custom {
        label: String,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Power { p, coeff } => write!(f, "power(p={p}, coeff={coeff})"),
            Family::PowerLog { p } => write!(f, "power_log(p={p})"),
            Family::ExpMinus => write!(f, "exp_minus"),
            Family::Custom { label } => write!(f, "custom({label})"),
        }
    }
}

/// An Orlicz function `G` with its derivative `g = G'` and optional analytic
/// references used as test oracles.
#[derive(Clone)]
pub struct OrliczFunction {
    family: Family,
    eval: ScalarFn,
    deriv: ScalarFn,
    analytic_conjugate: Option<ScalarFn>,
    analytic_k: Option<f64>,
    analytic_p: Option<f64>,
}

impl fmt::Debug for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrliczFunction")
            .field("family", &self.family)
            .finish_non_exhaustive()
    }
}

impl OrliczFunction {
    /// `G(t) = t^p / p`. Requires `p > 1` so that `G(t)/t -> 0` at the origin.
    pub fn power(p: f64) -> Result<Self> {
        Self::power_scaled(p, 1.0 / p)
    }

    /// `G(t) = t^p`. Luxemburg norms of this family coincide with the usual
    /// `L^p` norms, which makes it the natural cross-check family.
    pub fn monomial(p: f64) -> Result<Self> {
        Self::power_scaled(p, 1.0)
    }

    /// `G(t) = coeff * t^p` with an explicit leading coefficient.
    pub fn power_scaled(p: f64, coeff: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(OrliczError::Degenerate(format!(
                "power family needs p > 1, got p = {p}"
            )));
        }
        if !(coeff > 0.0) || !coeff.is_finite() {
            return Err(OrliczError::Degenerate(format!(
                "power family needs coeff > 0, got coeff = {coeff}"
            )));
        }
        // G*(s) = s^p' / p' * (coeff * p)^(1 - p') with 1/p + 1/p' = 1.
        let pc = p / (p - 1.0);
        let scale = (coeff * p).powf(1.0 - pc);
        Ok(Self {
            family: Family::Power { p, coeff },
            eval: Arc::new(move |t| coeff * t.powf(p)),
            deriv: Arc::new(move |t| coeff * p * t.powf(p - 1.0)),
            analytic_conjugate: Some(Arc::new(move |s| scale * s.powf(pc) / pc)),
            analytic_k: Some(2f64.powf(p)),
            analytic_p: Some(p),
        })
    }

    /// `G(t) = t^p ln(1 + t)`. Its Simonenko index is `p + 1`, approached as
    /// `t -> 0`, and its doubling constant is `2^(p+1)`.
    pub fn power_log(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(OrliczError::Degenerate(format!(
                "power_log family needs p >= 1, got p = {p}"
            )));
        }
        Ok(Self {
            family: Family::PowerLog { p },
            eval: Arc::new(move |t| t.powf(p) * t.ln_1p()),
            deriv: Arc::new(move |t| {
                if t == 0.0 {
                    0.0
                } else {
                    p * t.powf(p - 1.0) * t.ln_1p() + t.powf(p) / (1.0 + t)
                }
            }),
            analytic_conjugate: None,
            analytic_k: Some(2f64.powf(p + 1.0)),
            analytic_p: Some(p + 1.0),
        })
    }

    /// `G(t) = e^t - t - 1`. Grows too fast for the doubling condition; the
    /// estimators are expected to flag it.
    pub fn exp_minus() -> Self {
        Self {
            family: Family::ExpMinus,
            // exp_m1 keeps precision near 0 where e^t - t - 1 ~ t^2/2.
            eval: Arc::new(|t| t.exp_m1() - t),
            deriv: Arc::new(|t| t.exp_m1()),
            analytic_conjugate: Some(Arc::new(|s| (1.0 + s) * s.ln_1p() - s)),
            analytic_k: None,
            analytic_p: None,
        }
    }

    /// Wrap user closures. The pair is probed on a coarse grid for H1-H3:
    /// `G(0) = 0`, positivity and monotonicity on `(0, inf)`, midpoint
    /// convexity, and `G(t)/t -> 0`.
    pub fn custom<F, D>(label: impl Into<String>, eval: F, deriv: D) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f = Self {
            family: Family::Custom {
                label: label.into(),
            },
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            analytic_conjugate: None,
            analytic_k: None,
            analytic_p: None,
        };
        f.validate_probe()?;
        Ok(f)
    }

    /// Attach a closed-form complementary function, used by oracle tests.
    pub fn with_analytic_conjugate<F>(mut self, conj: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.analytic_conjugate = Some(Arc::new(conj));
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> String {
        self.family.to_string()
    }

    /// `G(t)`. Rejects negative or non-finite arguments.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(OrliczError::Domain(format!(
                "G is defined on t >= 0, got t = {t}"
            )));
        }
        Ok(self.eval_raw(t))
    }

    /// `g(t) = G'(t)`. Rejects negative or non-finite arguments.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(OrliczError::Domain(format!(
                "g is defined on t >= 0, got t = {t}"
            )));
        }
        Ok(self.deriv_raw(t))
    }

    /// Unchecked evaluation for hot loops; `G(0)` is pinned to exactly 0.
    #[inline]
    pub fn eval_raw(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            (self.eval)(t)
        }
    }

    /// Unchecked derivative; `g(0)` is pinned to exactly 0 (forced by H3).
    #[inline]
    pub fn deriv_raw(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            (self.deriv)(t)
        }
    }

    pub fn analytic_conjugate(&self, s: f64) -> Option<f64> {
        self.analytic_conjugate.as_ref().map(|f| f(s))
    }

    pub fn has_analytic_conjugate(&self) -> bool {
        self.analytic_conjugate.is_some()
    }

    /// Closed-form doubling constant, when the family has one.
    pub fn analytic_k(&self) -> Option<f64> {
        self.analytic_k
    }

    /// Closed-form growth index, when the family has one.
    pub fn analytic_p(&self) -> Option<f64> {
        self.analytic_p
    }

    fn validate_probe(&self) -> Result<()> {
        if self.eval_raw(0.0) != 0.0 {
            return Err(OrliczError::Degenerate("G(0) != 0".into()));
        }
        // Probe range chosen so that well-formed formulas stay clear of f64
        // cancellation at the bottom and overflow at the top.
        let probes: Vec<f64> = (-6..=6).map(|k| 10f64.powi(k) / 2.0).collect();
        let mut prev = 0.0f64;
        for (i, &t) in probes.iter().enumerate() {
            let v = self.eval_raw(t);
            if !v.is_finite() && t < 1e2 {
                return Err(OrliczError::Degenerate(format!(
                    "G({t}) is not finite on the probe grid"
                )));
            }
            if v <= 0.0 && v.is_finite() {
                return Err(OrliczError::Degenerate(format!(
                    "G({t}) = {v} <= 0 for t > 0 (not increasing from G(0) = 0)"
                )));
            }
            if v < prev {
                return Err(OrliczError::Degenerate(format!("G decreases near t = {t}")));
            }
            if v.is_finite() {
                prev = v;
            }
            // midpoint convexity against the previous probe
            if i > 0 {
                let a = probes[i - 1];
                let mid = 0.5 * (a + t);
                let lhs = self.eval_raw(mid);
                let rhs = 0.5 * (self.eval_raw(a) + v);
                if lhs.is_finite() && rhs.is_finite() && lhs > rhs * (1.0 + 1e-12) + 1e-300 {
                    return Err(OrliczError::Degenerate(format!(
                        "midpoint convexity fails between {a} and {t}"
                    )));
                }
            }
        }
        // H3: G(t)/t must head to 0 at the origin.
        let r2 = self.eval_raw(1e-2) / 1e-2;
        let r4 = self.eval_raw(1e-4) / 1e-4;
        let r6 = self.eval_raw(1e-6) / 1e-6;
        if !(r2 > r4 && r4 > r6) {
            return Err(OrliczError::Degenerate(
                "G(t)/t is not decreasing toward 0 near the origin (H3)".into(),
            ));
        }
        Ok(())
    }
}
