//! The `audit` subcommand: run every inequality sweep the configured Orlicz
//! function supports, count failures, and write a JSON summary with the worst
//! margin and its witness per audit.

use anyhow::{anyhow, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use orlicz::{
    audit_conjugate_derivative, audit_product_bound, audit_sum_bound, conjugate,
    estimate_constants, young_gap, LogGrid, StructuralConstants,
};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Serialize)]
pub struct AuditLine {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    /// Smallest margin seen; the audit passed iff this is >= -margin_tol,
    /// so failures == 0 exactly when every margin cleared the tolerance.
    pub worst_margin: f64,
    pub worst_witness: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsSummary {
    /// None encodes a blow-up (the scan overflowed).
    pub k_est: Option<f64>,
    pub k_extended: Option<f64>,
    pub p_est: Option<f64>,
    pub delta2_holds: bool,
    /// `K <= 2^p (1 + 1e-3)`; only meaningful under the doubling condition.
    pub cross_consistent: Option<bool>,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points_per_decade: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditSummary {
    pub g_name: String,
    pub seed: u64,
    pub margin_tol: f64,
    pub constants: ConstantsSummary,
    pub audits: Vec<AuditLine>,
    /// Audits not run because they need finite doubling constants.
    pub skipped: Vec<String>,
    pub failures_total: usize,
    pub delta2_expected: bool,
    pub delta2_as_expected: bool,
}

struct Tracker {
    name: String,
    samples: usize,
    failures: usize,
    worst_margin: f64,
    worst_witness: Vec<(String, f64)>,
}

impl Tracker {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            samples: 0,
            failures: 0,
            worst_margin: f64::INFINITY,
            worst_witness: Vec::new(),
        }
    }

    fn record(&mut self, margin: f64, tol: f64, witness: &[(&str, f64)]) {
        self.samples += 1;
        if margin < -tol || !margin.is_finite() {
            self.failures += 1;
        }
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_witness = witness.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        }
    }

    fn line(self) -> AuditLine {
        AuditLine {
            name: self.name,
            samples: self.samples,
            failures: self.failures,
            worst_margin: self.worst_margin,
            worst_witness: self.worst_witness,
        }
    }
}

fn opt_finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn run_audit(cfg: &ExperimentConfig, seed: u64) -> Result<AuditSummary> {
    let g = cfg.orlicz.build()?;
    let sweep = cfg
        .sweep
        .ok_or_else(|| anyhow!("audit needs a 'sweep' section"))?;
    let grid: LogGrid = cfg.constants_grid()?;
    let tol = &cfg.tolerances;
    let margin_tol = tol.margin_tol;

    let constants: StructuralConstants = estimate_constants(&g, &grid)?;
    let doubling = orlicz::estimate_delta2_k(&g, &grid)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut audits = Vec::new();
    let mut skipped = Vec::new();

    // Young sweep: gap >= -tol on random pairs.
    let mut young = Tracker::new("young_sweep");
    for _ in 0..sweep.samples {
        let a = rng.random_range(0.0..=sweep.range_max);
        let b = rng.random_range(0.0..=sweep.range_max);
        let gap = young_gap(&g, a, b, tol.conjugate_tol)?;
        young.record(gap, margin_tol, &[("a", a), ("b", b)]);
    }
    audits.push(young.line());

    // Young equality case b = g(a): |gap| <= 1e-6 (1 + G(a)).
    let mut equality = Tracker::new("young_equality_sweep");
    for _ in 0..sweep.samples {
        let a = rng.random_range(0.0..=sweep.range_max);
        let b = g.derivative(a)?;
        let gap = young_gap(&g, a, b, tol.conjugate_tol)?;
        let allowance = 1e-6 * (1.0 + g.evaluate(a)?);
        equality.record(allowance - gap.abs(), margin_tol, &[("a", a), ("b", b)]);
    }
    audits.push(equality.line());

    // Conjugate closed-form oracle where the family has one.
    if g.has_analytic_conjugate() {
        let mut oracle = Tracker::new("conjugate_oracle_grid");
        let n = 100;
        for i in 0..n {
            let b = 10f64.powf(-3.0 + 6.0 * i as f64 / (n - 1) as f64);
            let num = conjugate(&g, b, tol.conjugate_tol)?.value;
            let exact = g.analytic_conjugate(b).expect("checked");
            let rel_err = (num - exact).abs() / exact.max(1e-300);
            oracle.record(
                1e-6 - rel_err,
                0.0,
                &[("b", b), ("num", num), ("exact", exact)],
            );
        }
        audits.push(oracle.line());
    }

    if constants.delta2_holds {
        // K <= 2^p within 1e-3.
        let mut cross = Tracker::new("constants_cross_consistency");
        let bound = 2f64.powf(constants.p_est) * (1.0 + 1e-3);
        cross.record(
            bound - constants.k_est,
            0.0,
            &[("k_est", constants.k_est), ("p_est", constants.p_est)],
        );
        audits.push(cross.line());

        // G(a+b) <= (K/2)(G(a)+G(b)).
        let mut sum_bound = Tracker::new("sum_doubling_sweep");
        for _ in 0..sweep.samples {
            let a = rng.random_range(0.0..=sweep.range_max);
            let b = rng.random_range(0.0..=sweep.range_max);
            let audit = audit_sum_bound(&g, a, b, constants.k_est)?;
            sum_bound.record(audit.margin, margin_tol, &[("a", a), ("b", b)]);
        }
        audits.push(sum_bound.line());

        // g(a) b <= C (eps G(a) + G(b/eps)) per ladder eps, plus the
        // conjugate scaling step.
        for &eps in &cfg.eps_ladder {
            let mut product = Tracker::new(format!("derivative_product_sweep_eps_{eps}"));
            for _ in 0..sweep.samples {
                let a = rng.random_range(0.0..=sweep.range_max);
                let b = rng.random_range(0.0..=sweep.range_max);
                let audit = audit_product_bound(&g, a, b, eps, constants.p_est, tol.conjugate_tol)?;
                let margin = audit
                    .margin
                    .min(audit.scaling_margin.unwrap_or(f64::INFINITY));
                product.record(margin, margin_tol, &[("a", a), ("b", b), ("eps", eps)]);
            }
            audits.push(product.line());
        }

        // G*(g(t)) <= (p-1) G(t) plus the identity G*(g(t)) = t g(t) - G(t),
        // both scaled so that "margin >= -1e-6" is the pass rule.
        let mut conj_deriv = Tracker::new("conjugate_derivative_grid");
        for k in -12..=8 {
            let t = 10f64.powf(k as f64 / 2.0);
            let audit = audit_conjugate_derivative(&g, t, constants.p_est, tol.conjugate_tol)?;
            let bound_margin = audit.margin / (1.0 + g.evaluate(t)?);
            let identity = t * g.derivative(t)? - g.evaluate(t)?;
            let residual_rel = audit.identity_residual.unwrap() / (1.0 + identity.abs());
            conj_deriv.record(bound_margin.min(-residual_rel), 1e-6, &[("t", t)]);
        }
        audits.push(conj_deriv.line());
    } else {
        skipped.extend(
            [
                "constants_cross_consistency",
                "sum_doubling_sweep",
                "derivative_product_sweep",
                "conjugate_derivative_grid",
            ]
            .map(String::from),
        );
    }

    let failures_total = audits.iter().map(|a| a.failures).sum();
    let delta2_expected = cfg.expect_delta2.unwrap_or(true);
    Ok(AuditSummary {
        g_name: g.name(),
        seed,
        margin_tol,
        constants: ConstantsSummary {
            k_est: opt_finite(constants.k_est),
            k_extended: opt_finite(doubling.k_extended),
            p_est: opt_finite(constants.p_est),
            delta2_holds: constants.delta2_holds,
            cross_consistent: constants
                .delta2_holds
                .then(|| constants.cross_consistent(1e-3)),
            grid_min: grid.min,
            grid_max: grid.max,
            grid_points_per_decade: grid.points_per_decade,
        },
        audits,
        skipped,
        failures_total,
        delta2_expected,
        delta2_as_expected: constants.delta2_holds == delta2_expected,
    })
}
