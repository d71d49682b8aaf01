//! Measure the Brezis-Lieb defect `|int G(|u_n|) - int G(|u_n - u|) - int G(|u|)|`
//! along a synthetic sequence and audit, per `n` and per `eps`, every cell-wise
//! inequality used to dominate it:
//!
//! * the mean-value bound `|G(|u_n|) - G(|u_n - u|)| <= g(|u| + 2|u_n - u|) |u|`,
//! * the doubled chain `... <= (C K^2 / 2)(eps G(|u_n - u|) + 2 G(|u|/eps))`,
//! * the truncation `W_eps_n = [ |G(|u_n|) - G(|u_n - u|) - G(|u|)| - eps (C K^2/2) G(|u_n - u|) ]_+`
//!   together with its integrable dominator `(C K^2 + 1) G(|u|/eps)`.
//!
//! The verdict separates hypothesis failures (unbounded norms, no a.e.
//! convergence off the declared exceptional set) from defects that simply have
//! not converged yet.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::InequalityAudit;
use crate::constants::{estimate_constants, LogGrid, StructuralConstants};
use crate::error::{OrliczError, Result};
use crate::function::OrliczFunction;
use crate::grid::{luxemburg_norm, GridFunction};
use crate::sequence::{aeconv_sup, generate, GeneratedPair, SequenceSpec};

/// Per-`n` measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlRow {
    pub n: u32,
    /// `int G(|u_n|)`.
    pub modular_un: f64,
    /// `int G(|u_n - u|)`.
    pub modular_diff: f64,
    /// `int G(|u|)`.
    pub modular_u: f64,
    /// `|modular_un - modular_diff - modular_u|`.
    pub defect: f64,
    /// `int |G(|u_n|) - G(|u_n - u|) - G(|u|)|`, the integrand in absolute value.
    pub abs_integral: f64,
    pub lux_norm_un: f64,
    /// `sup |u_n - u|` off the exceptional set.
    pub aeconv_sup: f64,
    /// `(eps, int W_eps_n)` per ladder entry, in ladder order.
    pub w_integrals: Vec<(f64, f64)>,
}

/// The bound recorded at the last schedule entry for one `eps`:
/// `int |Delta| <= int W + eps (C K^2 / 2) int G(|u_n - u|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalBound {
    pub eps: f64,
    pub w_integral: f64,
    /// `eps (C K^2 / 2) * modular_diff`.
    pub eps_term: f64,
    /// `w_integral + eps_term`.
    pub bound: f64,
    /// `int |Delta|` it must dominate.
    pub abs_integral: f64,
    /// `abs_integral / (eps K)`: the measured stand-in for the undetermined
    /// closing constant.
    pub cprime_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConvergenceObserved,
    HypothesisViolated,
    Inconclusive,
}

/// Thresholds pinned into the report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunTolerances {
    /// Luxemburg norm bisection tolerance.
    pub lux_tol: f64,
    /// Absolute defect required at the last schedule entry.
    pub defect_tol: f64,
    /// Required ratio defect(first)/defect(last).
    pub defect_decrease: f64,
    /// Defects at or below this count as quadrature-exact zero and are exempt
    /// from the decrease requirement (disjoint-support sequences cancel
    /// cell-for-cell; the three quadrature sums still differ by rounding).
    pub defect_floor: f64,
    /// Allowed relative growth of the norms beyond the first half of rows.
    pub norm_growth_tol: f64,
    /// Bound on `aeconv_sup` at the last entry.
    pub ae_tol: f64,
}

impl Default for RunTolerances {
    fn default() -> Self {
        Self {
            lux_tol: 1e-9,
            defect_tol: 1e-3,
            defect_decrease: 10.0,
            defect_floor: 1e-12,
            norm_growth_tol: 0.01,
            ae_tol: 1e-3,
        }
    }
}

/// Everything one harness run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlReport {
    pub sequence: SequenceSpec,
    pub g_name: String,
    pub k_est: f64,
    pub p_est: f64,
    /// `C = max(p_est - 1, 1)`.
    pub c_const: f64,
    pub eps_ladder: Vec<f64>,
    pub tolerances: RunTolerances,
    pub rows: Vec<BlRow>,
    /// Bounds at the last schedule entry, one per ladder eps.
    pub final_bounds: Vec<FinalBound>,
    pub verdict: Verdict,
}

fn modular_checked(g_fn: &OrliczFunction, u: &GridFunction) -> Result<f64> {
    Ok(crate::grid::modular(g_fn, u, crate::grid::QuadRule::Midpoint)?.value)
}

/// Cell-wise `W_eps_n` over the pair's grid.
fn w_eps_cells(
    g_fn: &OrliczFunction,
    u_n: &GridFunction,
    u: &GridFunction,
    eps: f64,
    ck2_half: f64,
) -> Vec<f64> {
    u_n.values()
        .iter()
        .zip(u.values())
        .map(|(&vn, &v)| {
            let d = vn - v;
            let delta = g_fn.eval_raw(vn.abs()) - g_fn.eval_raw(d.abs()) - g_fn.eval_raw(v.abs());
            (delta.abs() - eps * ck2_half * g_fn.eval_raw(d.abs())).max(0.0)
        })
        .collect()
}

/// `int W_eps_n dx >= 0`, the truncated part of the defect integrand.
pub fn w_epsilon_integral(
    g_fn: &OrliczFunction,
    u_n: &GridFunction,
    u: &GridFunction,
    eps: f64,
    k: f64,
    c: f64,
) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(OrliczError::Domain(format!(
            "eps must lie in (0,1), got {eps}"
        )));
    }
    if u_n.domain() != u.domain() {
        return Err(OrliczError::GridMismatch("w_epsilon_integral".into()));
    }
    let ck2_half = 0.5 * c * k * k;
    let cells = w_eps_cells(g_fn, u_n, u, eps, ck2_half);
    Ok(cells.iter().sum::<f64>() * u.domain().h())
}

/// Check `|G(|u_n|) - G(|u_n - u|)| <= g(|u| + 2|u_n - u|) |u|` at every cell;
/// returns the audit at the cell with the smallest margin. The mean-value
/// point between `|u_n|` and `|u_n - u|` is never materialized; monotonicity
/// of `g` replaces it.
pub fn pointwise_taylor_bound_audit(
    g_fn: &OrliczFunction,
    u_n: &GridFunction,
    u: &GridFunction,
) -> Result<InequalityAudit> {
    if u_n.domain() != u.domain() {
        return Err(OrliczError::GridMismatch("taylor bound audit".into()));
    }
    let mut worst: Option<(usize, f64, f64, f64)> = None;
    for (i, (&vn, &v)) in u_n.values().iter().zip(u.values()).enumerate() {
        let d = (vn - v).abs();
        let lhs = (g_fn.eval_raw(vn.abs()) - g_fn.eval_raw(d)).abs();
        let rhs = g_fn.deriv_raw(v.abs() + 2.0 * d) * v.abs();
        let margin = rhs - lhs;
        if worst.is_none_or(|(_, _, _, m)| margin < m) {
            worst = Some((i, lhs, rhs, margin));
        }
    }
    let (i, lhs, rhs, margin) = worst.ok_or_else(|| OrliczError::Domain("empty grid".into()))?;
    Ok(InequalityAudit {
        check: "pointwise_taylor_bound".into(),
        lhs,
        rhs,
        margin,
        witness: vec![
            ("cell".into(), i as f64),
            ("x".into(), u.domain().midpoint(i)),
            ("u".into(), u.values()[i]),
            ("u_n".into(), u_n.values()[i]),
        ],
        identity_residual: None,
        scaling_margin: None,
    })
}

/// Worst-cell audits of the two domination steps:
/// (a) `|G(|u_n|) - G(|u_n - u|)| <= (C K^2/2)(eps G(|u_n - u|) + 2 G(|u|/eps))`,
/// (b) `W_eps_n <= (C K^2 + 1) G(|u|/eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominatedBoundAudit {
    pub chain: InequalityAudit,
    pub domination: InequalityAudit,
}

pub fn dominated_bound_audit(
    g_fn: &OrliczFunction,
    u_n: &GridFunction,
    u: &GridFunction,
    eps: f64,
    k: f64,
    c: f64,
) -> Result<DominatedBoundAudit> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(OrliczError::Domain(format!(
            "eps must lie in (0,1), got {eps}"
        )));
    }
    if u_n.domain() != u.domain() {
        return Err(OrliczError::GridMismatch("dominated bound audit".into()));
    }
    let ck2_half = 0.5 * c * k * k;
    let mut worst_a: Option<(usize, f64, f64, f64)> = None;
    let mut worst_b: Option<(usize, f64, f64, f64)> = None;
    for (i, (&vn, &v)) in u_n.values().iter().zip(u.values()).enumerate() {
        let d = (vn - v).abs();
        let g_un = g_fn.eval_raw(vn.abs());
        let g_d = g_fn.eval_raw(d);
        let g_u = g_fn.eval_raw(v.abs());
        let g_u_over_eps = g_fn.eval_raw(v.abs() / eps);

        let lhs_a = (g_un - g_d).abs();
        let rhs_a = ck2_half * (eps * g_d + 2.0 * g_u_over_eps);
        let margin_a = rhs_a - lhs_a;
        if worst_a.is_none_or(|(_, _, _, m)| margin_a < m) {
            worst_a = Some((i, lhs_a, rhs_a, margin_a));
        }

        let w = ((g_un - g_d - g_u).abs() - eps * ck2_half * g_d).max(0.0);
        let rhs_b = (c * k * k + 1.0) * g_u_over_eps;
        let margin_b = rhs_b - w;
        if worst_b.is_none_or(|(_, _, _, m)| margin_b < m) {
            worst_b = Some((i, w, rhs_b, margin_b));
        }
    }
    let make = |tag: &str, cell: (usize, f64, f64, f64)| InequalityAudit {
        check: tag.into(),
        lhs: cell.1,
        rhs: cell.2,
        margin: cell.3,
        witness: vec![
            ("cell".into(), cell.0 as f64),
            ("x".into(), u.domain().midpoint(cell.0)),
            ("eps".into(), eps),
            ("k".into(), k),
            ("c".into(), c),
        ],
        identity_residual: None,
        scaling_margin: None,
    };
    let a = worst_a.ok_or_else(|| OrliczError::Domain("empty grid".into()))?;
    let b = worst_b.ok_or_else(|| OrliczError::Domain("empty grid".into()))?;
    Ok(DominatedBoundAudit {
        chain: make("doubled_chain_bound", a),
        domination: make("w_domination_bound", b),
    })
}

fn build_row(
    spec: &SequenceSpec,
    g_fn: &OrliczFunction,
    eps_ladder: &[f64],
    tol: &RunTolerances,
    ck2_half: f64,
    n: u32,
) -> Result<BlRow> {
    let pair: GeneratedPair = generate(spec, g_fn, n)?;
    let diff = pair.u_n.difference(&pair.limit)?;

    let modular_un = modular_checked(g_fn, &pair.u_n)?;
    let modular_diff = modular_checked(g_fn, &diff)?;
    let modular_u = modular_checked(g_fn, &pair.limit)?;
    let defect = (modular_un - modular_diff - modular_u).abs();

    let h = pair.u_n.domain().h();
    let abs_integral = pair
        .u_n
        .values()
        .iter()
        .zip(pair.limit.values())
        .map(|(&vn, &v)| {
            let d = (vn - v).abs();
            (g_fn.eval_raw(vn.abs()) - g_fn.eval_raw(d) - g_fn.eval_raw(v.abs())).abs()
        })
        .sum::<f64>()
        * h;

    let lux_norm_un = luxemburg_norm(g_fn, &pair.u_n, tol.lux_tol)?;
    let ae_sup = aeconv_sup(&pair);

    let mut w_integrals = Vec::with_capacity(eps_ladder.len());
    for &eps in eps_ladder {
        let cells = w_eps_cells(g_fn, &pair.u_n, &pair.limit, eps, ck2_half);
        w_integrals.push((eps, cells.iter().sum::<f64>() * h));
    }

    Ok(BlRow {
        n,
        modular_un,
        modular_diff,
        modular_u,
        defect,
        abs_integral,
        lux_norm_un,
        aeconv_sup: ae_sup,
        w_integrals,
    })
}

/// Run the harness: estimate the constants, fill one [`BlRow`] per schedule
/// entry (rows are independent and computed in parallel), record the final
/// bounds, and pass verdict.
pub fn run(
    spec: &SequenceSpec,
    g_fn: &OrliczFunction,
    eps_ladder: &[f64],
    tolerances: &RunTolerances,
) -> Result<BlReport> {
    spec.validate()?;
    for &eps in eps_ladder {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(OrliczError::Domain(format!(
                "eps ladder entry {eps} outside (0,1)"
            )));
        }
    }

    let constants: StructuralConstants = estimate_constants(g_fn, &LogGrid::default())?;
    if !constants.delta2_holds {
        return Err(OrliczError::Domain(format!(
            "{} does not satisfy the doubling condition on the scan grid; the \
             harness constants K and C would be meaningless",
            g_fn.name()
        )));
    }
    let c_const = constants.product_constant();
    let ck2_half = 0.5 * c_const * constants.k_est * constants.k_est;

    let rows: Vec<BlRow> = spec
        .schedule
        .par_iter()
        .map(|&n| build_row(spec, g_fn, eps_ladder, tolerances, ck2_half, n))
        .collect::<Result<Vec<_>>>()?;

    let last = rows.last().expect("schedule validated non-empty");
    let first = &rows[0];

    let final_bounds: Vec<FinalBound> = last
        .w_integrals
        .iter()
        .map(|&(eps, w_integral)| {
            let eps_term = eps * ck2_half * last.modular_diff;
            FinalBound {
                eps,
                w_integral,
                eps_term,
                bound: w_integral + eps_term,
                abs_integral: last.abs_integral,
                cprime_ratio: last.abs_integral / (eps * constants.k_est),
            }
        })
        .collect();

    // Hypothesis certificates. Boundedness is judged as "no growth beyond the
    // first half of the schedule": decreasing or stable norms pass, divergent
    // ones fail.
    let half = rows.len().div_ceil(2);
    let early_max = rows[..half]
        .iter()
        .map(|r| r.lux_norm_un)
        .fold(0.0f64, f64::max);
    let overall_max = rows.iter().map(|r| r.lux_norm_un).fold(0.0f64, f64::max);
    let norms_bounded = overall_max <= early_max * (1.0 + tolerances.norm_growth_tol);
    let ae_converges = last.aeconv_sup <= tolerances.ae_tol;

    let decreased = last.defect <= first.defect / tolerances.defect_decrease
        || last.defect <= tolerances.defect_floor;
    let verdict = if !norms_bounded || !ae_converges {
        Verdict::HypothesisViolated
    } else if last.defect <= tolerances.defect_tol && decreased {
        Verdict::ConvergenceObserved
    } else {
        Verdict::Inconclusive
    };

    Ok(BlReport {
        sequence: spec.clone(),
        g_name: g_fn.name(),
        k_est: constants.k_est,
        p_est: constants.p_est,
        c_const,
        eps_ladder: eps_ladder.to_vec(),
        tolerances: *tolerances,
        rows,
        final_bounds,
        verdict,
    })
}

impl BlReport {
    /// CSV table, one row per schedule entry. Columns:
    /// `n,modular_un,modular_diff,modular_u,defect,lux_norm_un,aeconv_sup,w_int_eps_<eps>...`
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        out.push_str("n,modular_un,modular_diff,modular_u,defect,lux_norm_un,aeconv_sup");
        for eps in &self.eps_ladder {
            let _ = write!(out, ",w_int_eps_{eps}");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.n,
                r.modular_un,
                r.modular_diff,
                r.modular_u,
                r.defect,
                r.lux_norm_un,
                r.aeconv_sup
            );
            for &(_, w) in &r.w_integrals {
                let _ = write!(out, ",{w:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| OrliczError::Csv(format!("report json: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{BumpProfile, Normalization, SequenceFamily};

    fn translation_spec() -> SequenceSpec {
        SequenceSpec {
            family: SequenceFamily::Translation {
                bump_halfwidth: 0.5,
                bump_height: 1.0,
                spacing: 2.0,
            },
            limit: BumpProfile::SmoothBump {
                center: 0.0,
                halfwidth: 1.0,
                height: 1.0,
            },
            schedule: vec![1, 2, 3, 4],
            normalization: Normalization::None,
            exceptional_radius: 0.0,
            left: -2.0,
            right: 2.0,
            resolution: 64,
        }
    }

    fn violator_spec() -> SequenceSpec {
        SequenceSpec {
            family: SequenceFamily::UnboundedViolator {
                bump: BumpProfile::SmoothBump {
                    center: 0.5,
                    halfwidth: 0.25,
                    height: 1.0,
                },
            },
            limit: BumpProfile::Zero,
            schedule: vec![1, 2, 4, 8, 16],
            normalization: Normalization::None,
            exceptional_radius: 0.0,
            left: 0.0,
            right: 1.0,
            resolution: 128,
        }
    }

    #[test]
    fn translation_defect_is_exactly_zero() {
        let g = OrliczFunction::power(2.0).unwrap();
        let report = run(
            &translation_spec(),
            &g,
            &[0.5, 0.1],
            &RunTolerances::default(),
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::ConvergenceObserved);
        for row in &report.rows {
            // cell-for-cell cancellation; the three quadrature sums round
            // independently, so "exact" means the 1e-12 floor
            assert!(row.defect <= 1e-12, "n={}: {}", row.n, row.defect);
            // the W integrand and |Delta| cancel per cell, with no summation
            // residue at all
            assert_eq!(row.abs_integral, 0.0);
            for &(_, w) in &row.w_integrals {
                assert_eq!(w, 0.0);
            }
        }
    }

    #[test]
    fn violator_is_flagged_not_convergent() {
        let g = OrliczFunction::power(2.0).unwrap();
        let report = run(&violator_spec(), &g, &[0.5], &RunTolerances::default()).unwrap();
        assert_eq!(report.verdict, Verdict::HypothesisViolated);
        // norms strictly increase along the schedule
        for w in report.rows.windows(2) {
            assert!(w[0].lux_norm_un < w[1].lux_norm_un);
        }
    }

    #[test]
    fn taylor_bound_edge_cases() {
        let g = OrliczFunction::power(2.0).unwrap();
        let d = crate::grid::Domain1D::new(0.0, 1.0, 256).unwrap();
        let u = GridFunction::sample(d, |x| (6.3 * x).sin()).unwrap();
        let zero = GridFunction::zero(d);

        // u = 0: LHS vanishes cell-wise
        let audit = pointwise_taylor_bound_audit(&g, &u, &zero).unwrap();
        assert_eq!(audit.lhs, 0.0);

        // u_n = u: classical convexity inequality G(|u|) <= g(|u|) |u|
        let audit = pointwise_taylor_bound_audit(&g, &u, &u).unwrap();
        assert!(audit.margin >= -1e-12);

        // generic smooth pair
        let v = GridFunction::sample(d, |x| 0.7 * (9.1 * x).cos()).unwrap();
        let audit = pointwise_taylor_bound_audit(&g, &u, &v).unwrap();
        assert!(audit.margin >= -1e-9, "margin {}", audit.margin);
    }

    #[test]
    fn dominated_bound_edge_cases() {
        let g = OrliczFunction::power(2.0).unwrap();
        let d = crate::grid::Domain1D::new(0.0, 1.0, 128).unwrap();
        let u = GridFunction::sample(d, |x| (3.0 * x).sin()).unwrap();
        let zero = GridFunction::zero(d);
        // K = 4, p = 2 for t^2/2
        let (k, c) = (4.0, 1.0);

        let audit = dominated_bound_audit(&g, &u, &zero, 0.5, k, c).unwrap();
        assert_eq!(audit.chain.lhs, 0.0);

        let audit = dominated_bound_audit(&g, &u, &u, 0.5, k, c).unwrap();
        assert!(audit.chain.margin >= -1e-12);
        assert!(audit.domination.margin >= -1e-12);

        assert!(matches!(
            dominated_bound_audit(&g, &u, &u, 1.5, k, c),
            Err(OrliczError::Domain(_))
        ));
    }

    #[test]
    fn w_integral_vanishes_when_sequence_equals_limit() {
        let g = OrliczFunction::power(2.0).unwrap();
        let d = crate::grid::Domain1D::new(0.0, 1.0, 64).unwrap();
        let u = GridFunction::sample(d, |x| x).unwrap();
        let w = w_epsilon_integral(&g, &u, &u, 0.5, 4.0, 1.0).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn audits_hold_on_a_concentration_pair() {
        use crate::sequence::generate;
        let spec = SequenceSpec {
            family: SequenceFamily::Concentration { center: 0.5 },
            limit: BumpProfile::SmoothBump {
                center: 0.5,
                halfwidth: 0.3,
                height: 0.01,
            },
            schedule: vec![64],
            normalization: Normalization::UnitModular,
            exceptional_radius: 0.015625,
            left: 0.0,
            right: 1.0,
            resolution: 48,
        };
        let g = OrliczFunction::power(2.0).unwrap();
        let constants = estimate_constants(&g, &LogGrid::default()).unwrap();
        let (k, c) = (constants.k_est, constants.product_constant());
        let pair = generate(&spec, &g, 64).unwrap();

        let taylor = pointwise_taylor_bound_audit(&g, &pair.u_n, &pair.limit).unwrap();
        assert!(taylor.margin >= -1e-9, "{taylor:?}");

        let dom = dominated_bound_audit(&g, &pair.u_n, &pair.limit, 0.1, k, c).unwrap();
        assert!(dom.chain.margin >= -1e-9, "{:?}", dom.chain);
        assert!(dom.domination.margin >= -1e-9, "{:?}", dom.domination);
    }

    #[test]
    fn row_defect_respects_triangle_bound() {
        let g = OrliczFunction::power(2.0).unwrap();
        let report = run(&violator_spec(), &g, &[0.5], &RunTolerances::default()).unwrap();
        for row in &report.rows {
            assert!(row.defect <= row.modular_un + row.modular_diff + row.modular_u);
            assert!(row.defect <= row.abs_integral + 1e-12 * row.modular_un.max(1.0));
        }
    }

    #[test]
    fn non_doubling_function_is_rejected_by_run() {
        let g = OrliczFunction::exp_minus();
        let err = run(&translation_spec(), &g, &[0.5], &RunTolerances::default());
        assert!(matches!(err, Err(OrliczError::Domain(_))));
    }

    #[test]
    fn report_json_round_trips() {
        let g = OrliczFunction::power(2.0).unwrap();
        let report = run(
            &translation_spec(),
            &g,
            &[0.5, 0.1, 0.01],
            &RunTolerances::default(),
        )
        .unwrap();
        let parsed = BlReport::from_json(&report.to_json()).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn decomposition_identity_holds_at_final_row() {
        let g = OrliczFunction::power(2.0).unwrap();
        let report = run(
            &translation_spec(),
            &g,
            &[0.5, 0.1],
            &RunTolerances::default(),
        )
        .unwrap();
        for fb in &report.final_bounds {
            assert!(fb.abs_integral <= fb.bound + 1e-9);
        }
    }
}
