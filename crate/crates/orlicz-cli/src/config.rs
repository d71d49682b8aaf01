//! Experiment configuration: flat JSON with explicit tolerances and an
//! explicit seed, unknown keys rejected everywhere so committed experiment
//! files stay self-describing.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use orlicz::{
    BumpProfile, LogGrid, Normalization, OrliczFunction, RunTolerances, SequenceFamily,
    SequenceSpec, Verdict,
};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub orlicz: OrliczSection,
    pub tolerances: ToleranceSection,
    /// Seed for randomized sweeps; pinned so reports reproduce byte-for-byte.
    pub seed: u64,
    pub eps_ladder: Vec<f64>,
    #[serde(default)]
    pub constants_grid: Option<GridSection>,
    /// Required by `audit`.
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    /// Required by `bl`.
    #[serde(default)]
    pub sequence: Option<SequenceSection>,
    /// Verdict the `bl` run must produce for exit code 0.
    #[serde(default)]
    pub expect: Option<ExpectedVerdict>,
    /// Whether the scanned function is expected to satisfy the doubling
    /// condition (default true); mismatch is reported with its own exit code.
    #[serde(default)]
    pub expect_delta2: Option<bool>,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OrliczSection {
    /// `power`, `power_log`, or `exp_minus`.
    pub family: String,
    #[serde(default)]
    pub p: Option<f64>,
    /// Leading coefficient for `power`; defaults to `1/p`.
    #[serde(default)]
    pub coeff: Option<f64>,
}

impl OrliczSection {
    pub fn build(&self) -> Result<OrliczFunction> {
        let need_p = || {
            self.p
                .ok_or_else(|| anyhow!("orlicz.family '{}' needs a 'p' value", self.family))
        };
        let f = match self.family.as_str() {
            "power" => match self.coeff {
                Some(c) => OrliczFunction::power_scaled(need_p()?, c)?,
                None => OrliczFunction::power(need_p()?)?,
            },
            "power_log" => {
                if self.coeff.is_some() {
                    bail!("orlicz.coeff only applies to the power family");
                }
                OrliczFunction::power_log(need_p()?)?
            }
            "exp_minus" => {
                if self.p.is_some() || self.coeff.is_some() {
                    bail!("orlicz.family 'exp_minus' takes no parameters");
                }
                OrliczFunction::exp_minus()
            }
            other => bail!("unknown orlicz.family '{other}' (power, power_log, exp_minus)"),
        };
        Ok(f)
    }
}

/// Every tolerance spelled out; committed experiment files carry no implicit
/// defaults.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    /// Conjugate bracket width.
    pub conjugate_tol: f64,
    /// Luxemburg norm bisection tolerance.
    pub lux_tol: f64,
    /// Allowed negative margin in inequality sweeps.
    pub margin_tol: f64,
    pub defect_tol: f64,
    pub defect_decrease: f64,
    pub defect_floor: f64,
    pub norm_growth_tol: f64,
    pub ae_tol: f64,
}

impl ToleranceSection {
    pub fn run_tolerances(&self) -> RunTolerances {
        RunTolerances {
            lux_tol: self.lux_tol,
            defect_tol: self.defect_tol,
            defect_decrease: self.defect_decrease,
            defect_floor: self.defect_floor,
            norm_growth_tol: self.norm_growth_tol,
            ae_tol: self.ae_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub min: f64,
    pub max: f64,
    pub points_per_decade: u32,
}

impl GridSection {
    pub fn build(&self) -> Result<LogGrid> {
        Ok(LogGrid::new(self.min, self.max, self.points_per_decade)?)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Random samples per inequality sweep.
    pub samples: usize,
    /// Arguments are drawn uniformly from `[0, range_max]`.
    pub range_max: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSection {
    /// `zero` or `bump`.
    pub kind: String,
    #[serde(default)]
    pub center: Option<f64>,
    #[serde(default)]
    pub halfwidth: Option<f64>,
    #[serde(default)]
    pub height: Option<f64>,
}

impl BumpSection {
    pub fn build(&self, what: &str) -> Result<BumpProfile> {
        match self.kind.as_str() {
            "zero" => {
                if self.center.is_some() || self.halfwidth.is_some() || self.height.is_some() {
                    bail!("{what}: kind 'zero' takes no parameters");
                }
                Ok(BumpProfile::Zero)
            }
            "bump" => Ok(BumpProfile::SmoothBump {
                center: self
                    .center
                    .ok_or_else(|| anyhow!("{what}: bump needs 'center'"))?,
                halfwidth: self
                    .halfwidth
                    .ok_or_else(|| anyhow!("{what}: bump needs 'halfwidth'"))?,
                height: self
                    .height
                    .ok_or_else(|| anyhow!("{what}: bump needs 'height'"))?,
            }),
            other => bail!("{what}: unknown bump kind '{other}' (zero, bump)"),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSection {
    /// `translation`, `concentration`, `shrinking_plateau`, `unbounded_violator`.
    pub family: String,
    /// Concentration point (concentration family).
    #[serde(default)]
    pub center: Option<f64>,
    /// Plateau height (shrinking_plateau family).
    #[serde(default)]
    pub plateau_height: Option<f64>,
    /// Traveling bump shape (translation family).
    #[serde(default)]
    pub bump_halfwidth: Option<f64>,
    #[serde(default)]
    pub bump_height: Option<f64>,
    #[serde(default)]
    pub spacing: Option<f64>,
    /// Fixed bump scaled by n (unbounded_violator family).
    #[serde(default)]
    pub violator_bump: Option<BumpSection>,
    pub limit: BumpSection,
    pub schedule: Vec<u32>,
    /// `none` or `unit_modular`.
    pub normalization: String,
    pub exceptional_radius: f64,
    pub left: f64,
    pub right: f64,
    pub resolution: u32,
}

impl SequenceSection {
    pub fn build(&self) -> Result<SequenceSpec> {
        let family = match self.family.as_str() {
            "translation" => SequenceFamily::Translation {
                bump_halfwidth: self
                    .bump_halfwidth
                    .ok_or_else(|| anyhow!("translation needs 'bump_halfwidth'"))?,
                bump_height: self
                    .bump_height
                    .ok_or_else(|| anyhow!("translation needs 'bump_height'"))?,
                spacing: self
                    .spacing
                    .ok_or_else(|| anyhow!("translation needs 'spacing'"))?,
            },
            "concentration" => SequenceFamily::Concentration {
                center: self
                    .center
                    .ok_or_else(|| anyhow!("concentration needs 'center'"))?,
            },
            "shrinking_plateau" => SequenceFamily::ShrinkingPlateau {
                height: self
                    .plateau_height
                    .ok_or_else(|| anyhow!("shrinking_plateau needs 'plateau_height'"))?,
            },
            "unbounded_violator" => SequenceFamily::UnboundedViolator {
                bump: self
                    .violator_bump
                    .as_ref()
                    .ok_or_else(|| anyhow!("unbounded_violator needs 'violator_bump'"))?
                    .build("sequence.violator_bump")?,
            },
            other => bail!("unknown sequence.family '{other}'"),
        };
        let normalization = match self.normalization.as_str() {
            "none" => Normalization::None,
            "unit_modular" => Normalization::UnitModular,
            other => bail!("unknown normalization '{other}' (none, unit_modular)"),
        };
        let spec = SequenceSpec {
            family,
            limit: self.limit.build("sequence.limit")?,
            schedule: self.schedule.clone(),
            normalization,
            exceptional_radius: self.exceptional_radius,
            left: self.left,
            right: self.right,
            resolution: self.resolution,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedVerdict {
    ConvergenceObserved,
    HypothesisViolated,
    Inconclusive,
}

impl ExpectedVerdict {
    pub fn matches(&self, v: Verdict) -> bool {
        matches!(
            (self, v),
            (
                ExpectedVerdict::ConvergenceObserved,
                Verdict::ConvergenceObserved
            ) | (
                ExpectedVerdict::HypothesisViolated,
                Verdict::HypothesisViolated
            ) | (ExpectedVerdict::Inconclusive, Verdict::Inconclusive)
        )
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Base name for report files; defaults to the config file stem.
    pub stem: String,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for &eps in &self.eps_ladder {
            if !(eps > 0.0 && eps < 1.0) {
                bail!("eps_ladder entry {eps} outside (0,1)");
            }
        }
        Ok(())
    }

    pub fn constants_grid(&self) -> Result<LogGrid> {
        match &self.constants_grid {
            Some(s) => s.build(),
            None => Ok(LogGrid::default()),
        }
    }
}
