//! Estimation of the doubling constant `K` (`G(2x) <= K G(x)`) and the
//! Simonenko-type growth index `p` (`sup x g(x)/G(x)`) on a finite log grid.
//!
//! Both constants are global statements in the `forall x` sense; numerically
//! they are only falsifiable on a range. The estimators therefore scan a log
//! grid spanning several decades, and the doubling verdict additionally
//! requires the estimate to stay put (within 1%) when the grid is extended by
//! one decade. Families that blow up, like `e^t - t - 1`, either exceed the
//! blow-up threshold or fail the stability check.

use serde::{Deserialize, Serialize};

use crate::error::{OrliczError, Result};
use crate::function::OrliczFunction;

/// Log-spaced scan grid, `points_per_decade` geometric samples per decade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub min: f64,
    pub max: f64,
    pub points_per_decade: u32,
}

impl Default for LogGrid {
    fn default() -> Self {
        // 12 decades; the doubling/growth suprema of the built-in families
        // are approached at one of the ends, so the span matters more than
        // the density.
        Self {
            min: 1e-6,
            max: 1e6,
            points_per_decade: 16,
        }
    }
}

/// Minimum span accepted by the estimators.
pub const MIN_DECADES: f64 = 8.0;

/// Above this the doubling estimate is treated as a blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Relative drift allowed when the grid gains a decade.
pub const STABILITY_TOL: f64 = 0.01;

impl LogGrid {
    pub fn new(min: f64, max: f64, points_per_decade: u32) -> Result<Self> {
        let grid = Self {
            min,
            max,
            points_per_decade,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn decades(&self) -> f64 {
        (self.max / self.min).log10()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min > 0.0) || !self.max.is_finite() || self.max <= self.min {
            return Err(OrliczError::Domain(format!(
                "log grid needs 0 < min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points_per_decade == 0 {
            return Err(OrliczError::Domain("points_per_decade must be > 0".into()));
        }
        if self.decades() < MIN_DECADES {
            return Err(OrliczError::Domain(format!(
                "log grid spans {:.2} decades, need at least {MIN_DECADES}",
                self.decades()
            )));
        }
        Ok(())
    }

    /// One decade more at the top, same density.
    pub fn extended_one_decade(&self) -> Self {
        Self {
            min: self.min,
            max: self.max * 10.0,
            points_per_decade: self.points_per_decade,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let decades = self.decades();
        let n = (decades * self.points_per_decade as f64).ceil() as usize;
        let log_min = self.min.log10();
        let step = decades / n as f64;
        (0..=n)
            .map(|i| 10f64.powf(log_min + step * i as f64))
            .collect()
    }
}

/// Result of the doubling-constant scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingEstimate {
    /// `max G(2x)/G(x)` over the grid; `+inf` when the ratio overflows.
    pub k_est: f64,
    /// Same scan with one extra decade, used for the stability verdict.
    pub k_extended: f64,
    pub grid: LogGrid,
    /// Finite, below the blow-up threshold, and stable under extension.
    pub delta2_holds: bool,
}

/// Result of the growth-index scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    /// `max x g(x)/G(x)` over the grid; `+inf` when the ratio overflows.
    pub p_est: f64,
    pub grid: LogGrid,
}

/// Combined doubling constant and growth index on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralConstants {
    pub k_est: f64,
    pub p_est: f64,
    pub grid: LogGrid,
    pub delta2_holds: bool,
}

impl StructuralConstants {
    /// Integrating `g/G <= p/x` between `x` and `2x` gives `G(2x) <= 2^p G(x)`,
    /// so a consistent pair satisfies `K <= 2^p` up to tolerance.
    pub fn cross_consistent(&self, tol: f64) -> bool {
        self.delta2_holds && self.k_est <= 2f64.powf(self.p_est) * (1.0 + tol)
    }

    /// `C = max(p - 1, 1)`, the constant used by the product-bound audit.
    pub fn product_constant(&self) -> f64 {
        (self.p_est - 1.0).max(1.0)
    }
}

fn doubling_sup(g_fn: &OrliczFunction, grid: &LogGrid) -> Result<f64> {
    let mut sup = 0.0f64;
    for x in grid.points() {
        let gx = g_fn.eval_raw(x);
        if gx == 0.0 {
            return Err(OrliczError::Degenerate(format!(
                "G({x}) = 0 at a positive grid point"
            )));
        }
        let g2x = g_fn.eval_raw(2.0 * x);
        let ratio = if g2x.is_finite() && gx.is_finite() {
            g2x / gx
        } else {
            // Overflow means the ratio left the representable range; that is
            // a blow-up, not a data error.
            f64::INFINITY
        };
        if ratio > sup {
            sup = ratio;
        }
    }
    Ok(sup)
}

fn growth_sup(g_fn: &OrliczFunction, grid: &LogGrid) -> Result<f64> {
    let mut sup = 0.0f64;
    for x in grid.points() {
        let gx = g_fn.eval_raw(x);
        if gx == 0.0 {
            return Err(OrliczError::Degenerate(format!(
                "G({x}) = 0 at a positive grid point"
            )));
        }
        let dx = g_fn.deriv_raw(x);
        let ratio = if gx.is_finite() && dx.is_finite() {
            x * dx / gx
        } else {
            f64::INFINITY
        };
        if ratio > sup {
            sup = ratio;
        }
    }
    Ok(sup)
}

/// Scan `G(2x)/G(x)`, then re-scan with one extra decade to judge stability.
/// The verdict is the conjunction of finiteness, the blow-up threshold, and
/// stability under the extension.
pub fn estimate_delta2_k(g_fn: &OrliczFunction, grid: &LogGrid) -> Result<DoublingEstimate> {
    grid.validate()?;
    let k_base = doubling_sup(g_fn, grid)?;
    let k_ext = doubling_sup(g_fn, &grid.extended_one_decade())?;
    let stable =
        k_base.is_finite() && k_ext.is_finite() && (k_ext - k_base).abs() <= STABILITY_TOL * k_base;
    Ok(DoublingEstimate {
        k_est: k_base,
        k_extended: k_ext,
        grid: *grid,
        delta2_holds: stable && k_base <= BLOWUP_THRESHOLD,
    })
}

/// Scan `x g(x)/G(x)` for the supremal growth index.
pub fn estimate_p_index(g_fn: &OrliczFunction, grid: &LogGrid) -> Result<GrowthEstimate> {
    grid.validate()?;
    Ok(GrowthEstimate {
        p_est: growth_sup(g_fn, grid)?,
        grid: *grid,
    })
}

/// Both constants on one grid; this is what the audits and the harness use.
pub fn estimate_constants(g_fn: &OrliczFunction, grid: &LogGrid) -> Result<StructuralConstants> {
    let k_part = estimate_delta2_k(g_fn, grid)?;
    let p_part = estimate_p_index(g_fn, grid)?;
    Ok(StructuralConstants {
        k_est: k_part.k_est,
        p_est: p_part.p_est,
        grid: *grid,
        delta2_holds: k_part.delta2_holds && p_part.p_est.is_finite(),
    })
}
