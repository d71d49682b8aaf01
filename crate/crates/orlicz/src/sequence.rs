//! Synthetic sequences `(u_n)` for the Brezis-Lieb harness.
//!
//! Four families, all converging cell-wise to a fixed limit `u` except the
//! deliberate violator:
//! * `Translation` — a bump marches to the right; the domain is truncated to
//!   an interval containing both supports, so for disjoint supports the
//!   defect cancels cell-for-cell.
//! * `Concentration` — a bump of width `1/n` at a fixed point, optionally
//!   renormalized so its modular is exactly 1: converges a.e. but not in
//!   modular, which is the regime where the modular splitting is non-trivial.
//! * `ShrinkingPlateau` — `c` on `[0, 1/n]`, grid-aligned so the modular of
//!   the difference is exact.
//! * `UnboundedViolator` — `n` times a fixed bump; Luxemburg norms diverge.
//!
//! Grids refine proportionally to `n` for the concentrating families so that
//! quadrature error does not swamp the shrinking feature; the refinement is
//! realized as a uniform grid with `resolution * n` cells per unit length,
//! which is the substitution `y = n x` in disguise.

use serde::{Deserialize, Serialize};

use crate::error::{OrliczError, Result};
use crate::function::OrliczFunction;
use crate::grid::{Domain1D, GridFunction};

/// Recipe for the fixed limit function `u` (and for traveling bumps).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BumpProfile {
    Zero,
    /// `height * exp(1 - 1/(1 - y^2))` with `y = (x - center)/halfwidth`,
    /// supported on `|y| < 1` and equal to `height` at the center.
    SmoothBump {
        center: f64,
        halfwidth: f64,
        height: f64,
    },
}

impl BumpProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            BumpProfile::Zero => 0.0,
            BumpProfile::SmoothBump {
                center,
                halfwidth,
                height,
            } => {
                let y = (x - center) / halfwidth;
                bump_shape(y) * height
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let BumpProfile::SmoothBump {
            center,
            halfwidth,
            height,
        } = *self
        {
            if !center.is_finite() || !(halfwidth > 0.0) || !height.is_finite() {
                return Err(OrliczError::InvalidSpec(format!(
                    "bump needs finite center/height and halfwidth > 0, got {self:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Reference bump shape: `exp(1 - 1/(1 - y^2))` on `|y| < 1`, max 1 at 0.
pub fn bump_shape(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}

/// Which mechanism drives `u_n` away from `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SequenceFamily {
    /// `u_n = u + bump(. - n * spacing)`.
    Translation {
        bump_halfwidth: f64,
        bump_height: f64,
        spacing: f64,
    },
    /// `u_n = u + a_n * shape(n (x - center))`.
    Concentration { center: f64 },
    /// `u_n = u + height * 1[0, 1/n]`.
    ShrinkingPlateau { height: f64 },
    /// `u_n = u + n * bump`; norms diverge, hypotheses fail.
    UnboundedViolator { bump: BumpProfile },
}

/// Whether the concentrating bump is rescaled to unit modular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    None,
    /// Root-find `a_n` so that `int G(|w_n|) = 1` on the row grid.
    UnitModular,
}

/// Full recipe for one harness run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub family: SequenceFamily,
    /// The limit function `u`.
    pub limit: BumpProfile,
    /// Strictly increasing sequence indices.
    pub schedule: Vec<u32>,
    pub normalization: Normalization,
    /// Radius around the family's focal point excluded from the a.e.
    /// convergence audit; grids cannot represent null sets, so the
    /// exceptional set is declared rather than discovered.
    pub exceptional_radius: f64,
    /// Base domain. Translation extends `right` to cover the moving bump.
    pub left: f64,
    pub right: f64,
    /// Cells per unit length; concentrating families scale this by `n`.
    pub resolution: u32,
}

impl SequenceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            return Err(OrliczError::InvalidSpec("empty schedule".into()));
        }
        if self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(OrliczError::InvalidSpec(
                "schedule must be strictly increasing".into(),
            ));
        }
        if self.schedule[0] == 0 {
            return Err(OrliczError::InvalidSpec("schedule starts at 0".into()));
        }
        if !self.left.is_finite() || !self.right.is_finite() || self.left >= self.right {
            return Err(OrliczError::InvalidSpec(format!(
                "base domain [{}, {}] is empty",
                self.left, self.right
            )));
        }
        if self.resolution == 0 {
            return Err(OrliczError::InvalidSpec("resolution must be > 0".into()));
        }
        if !(self.exceptional_radius >= 0.0) {
            return Err(OrliczError::InvalidSpec(
                "exceptional radius must be >= 0".into(),
            ));
        }
        self.limit.validate()?;
        match self.family {
            SequenceFamily::Translation {
                bump_halfwidth,
                spacing,
                ..
            } => {
                if !(bump_halfwidth > 0.0) || !(spacing > 0.0) {
                    return Err(OrliczError::InvalidSpec(
                        "translation needs positive bump halfwidth and spacing".into(),
                    ));
                }
            }
            SequenceFamily::Concentration { center } => {
                if !(center > self.left && center < self.right) {
                    return Err(OrliczError::InvalidSpec(format!(
                        "concentration center {center} outside ({}, {})",
                        self.left, self.right
                    )));
                }
            }
            SequenceFamily::ShrinkingPlateau { height } => {
                if !height.is_finite() {
                    return Err(OrliczError::InvalidSpec("plateau height not finite".into()));
                }
                if self.left != 0.0 || self.right < 1.0 {
                    return Err(OrliczError::InvalidSpec(
                        "plateau family expects a base domain [0, R] with R >= 1".into(),
                    ));
                }
            }
            SequenceFamily::UnboundedViolator { bump } => bump.validate()?,
        }
        Ok(())
    }

    /// Where the sequence concentrates, if anywhere; the exceptional set is
    /// centered here.
    fn focal_point(&self) -> Option<f64> {
        match self.family {
            SequenceFamily::Concentration { center } => Some(center),
            SequenceFamily::ShrinkingPlateau { .. } => Some(0.0),
            _ => None,
        }
    }
}

/// `u_n`, the limit `u` on the same grid, and the cells excluded from the
/// a.e.-convergence audit.
#[derive(Debug, Clone)]
pub struct GeneratedPair {
    pub u_n: GridFunction,
    pub limit: GridFunction,
    pub exceptional_cells: Vec<usize>,
}

/// Realize `u_n` for one schedule entry. The Orlicz function is needed when
/// the spec asks for unit-modular normalization.
pub fn generate(spec: &SequenceSpec, g_fn: &OrliczFunction, n: u32) -> Result<GeneratedPair> {
    spec.validate()?;
    if !spec.schedule.contains(&n) {
        return Err(OrliczError::InvalidSpec(format!(
            "n = {n} is not in the schedule"
        )));
    }

    let domain = row_domain(spec, n)?;
    let limit = GridFunction::sample(domain, |x| spec.limit.eval(x))?;

    let deviation: Vec<f64> = match spec.family {
        SequenceFamily::Translation {
            bump_halfwidth,
            bump_height,
            spacing,
        } => {
            let center = spec.right + n as f64 * spacing;
            domain
                .midpoints()
                .map(|x| bump_height * bump_shape((x - center) / bump_halfwidth))
                .collect()
        }
        SequenceFamily::Concentration { center } => {
            let nf = n as f64;
            let shape: Vec<f64> = domain
                .midpoints()
                .map(|x| bump_shape(nf * (x - center)))
                .collect();
            let amplitude = match spec.normalization {
                Normalization::None => 1.0,
                Normalization::UnitModular => unit_modular_amplitude(g_fn, &shape, domain.h())?,
            };
            shape.iter().map(|s| amplitude * s).collect()
        }
        SequenceFamily::ShrinkingPlateau { height } => {
            let cut = 1.0 / n as f64;
            domain
                .midpoints()
                .map(|x| if x < cut { height } else { 0.0 })
                .collect()
        }
        SequenceFamily::UnboundedViolator { bump } => domain
            .midpoints()
            .map(|x| n as f64 * bump.eval(x))
            .collect(),
    };

    let u_n = GridFunction::new(
        domain,
        limit
            .values()
            .iter()
            .zip(&deviation)
            .map(|(u, w)| u + w)
            .collect(),
    )?;

    let exceptional_cells = match spec.family {
        // The expanding truncation region is the declared exceptional set:
        // any fixed point lands outside the traveling bump eventually, which
        // on the fixed base domain is true at every n already.
        SequenceFamily::Translation { .. } => (0..domain.cells)
            .filter(|&i| domain.midpoint(i) > spec.right)
            .collect(),
        _ => match spec.focal_point() {
            Some(x0) if spec.exceptional_radius > 0.0 => (0..domain.cells)
                .filter(|&i| (domain.midpoint(i) - x0).abs() <= spec.exceptional_radius)
                .collect(),
            _ => Vec::new(),
        },
    };

    Ok(GeneratedPair {
        u_n,
        limit,
        exceptional_cells,
    })
}

fn row_domain(spec: &SequenceSpec, n: u32) -> Result<Domain1D> {
    match spec.family {
        SequenceFamily::Translation {
            bump_halfwidth,
            spacing,
            ..
        } => {
            // truncate to an interval containing the limit's support and the
            // traveling bump at step n
            let right = spec.right + n as f64 * spacing + bump_halfwidth;
            let span = right - spec.left;
            let cells = (span * spec.resolution as f64).ceil() as usize;
            Domain1D::new(
                spec.left,
                spec.left + cells as f64 / spec.resolution as f64,
                cells,
            )
        }
        SequenceFamily::Concentration { .. } | SequenceFamily::ShrinkingPlateau { .. } => {
            // refine with n so the width-1/n feature keeps a fixed number of
            // cells; keeps 1/n a cell boundary for the plateau
            let per_unit = spec.resolution as u64 * n as u64;
            let span = spec.right - spec.left;
            let cells = (span * per_unit as f64).round() as usize;
            Domain1D::new(spec.left, spec.right, cells.max(1))
        }
        SequenceFamily::UnboundedViolator { .. } => {
            let span = spec.right - spec.left;
            let cells = (span * spec.resolution as f64).ceil() as usize;
            Domain1D::new(spec.left, spec.right, cells.max(1))
        }
    }
}

/// Find `a > 0` with `h * sum G(a * shape_i) = 1` by doubling then bisection.
/// The map is continuous and strictly increasing in `a` wherever the shape is
/// not identically zero.
fn unit_modular_amplitude(g_fn: &OrliczFunction, shape: &[f64], h: f64) -> Result<f64> {
    let q = |a: f64| -> f64 {
        let mut acc = 0.0;
        for &s in shape {
            if s != 0.0 {
                acc += g_fn.eval_raw((a * s).abs());
            }
        }
        acc * h
    };
    if shape.iter().all(|&s| s == 0.0) {
        return Err(OrliczError::RootFinding(
            "unit-modular normalization of an identically zero shape".into(),
        ));
    }

    let mut hi = 1.0f64;
    let mut steps = 0;
    while q(hi) < 1.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 1060 {
            return Err(OrliczError::RootFinding(format!(
                "modular never reached 1, amplitude bracket at {hi:e}"
            )));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let m = q(mid);
        if (m - 1.0).abs() <= 1e-10 {
            return Ok(mid);
        }
        if m < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    let res = (q(a) - 1.0).abs();
    if res <= 1e-8 {
        Ok(a)
    } else {
        Err(OrliczError::RootFinding(format!(
            "amplitude bisection stalled, |modular - 1| = {res:e}"
        )))
    }
}

/// Largest `|u_n - u|` over cells outside the exceptional set; the grid
/// version of a.e. convergence off a declared null neighbourhood.
pub fn aeconv_sup(pair: &GeneratedPair) -> f64 {
    let diff = pair
        .u_n
        .values()
        .iter()
        .zip(pair.limit.values())
        .map(|(a, b)| (a - b).abs());
    let mut sup = 0.0f64;
    let mut skip = pair.exceptional_cells.iter().peekable();
    for (i, d) in diff.enumerate() {
        if skip.peek() == Some(&&i) {
            skip.next();
            continue;
        }
        if d > sup {
            sup = d;
        }
    }
    sup
}
