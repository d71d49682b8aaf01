//! The `bl` subcommand: run the defect harness from a config and write the
//! per-n table as CSV and/or JSON.

use anyhow::{anyhow, Result};

use orlicz::{run, BlReport};

use crate::config::{ExpectedVerdict, ExperimentConfig};

pub fn run_bl(cfg: &ExperimentConfig) -> Result<BlReport> {
    let g = cfg.orlicz.build()?;
    let spec = cfg
        .sequence
        .as_ref()
        .ok_or_else(|| anyhow!("bl needs a 'sequence' section"))?
        .build()?;
    let tolerances = cfg.tolerances.run_tolerances();
    Ok(run(&spec, &g, &cfg.eps_ladder, &tolerances)?)
}

pub fn expected_verdict(cfg: &ExperimentConfig) -> ExpectedVerdict {
    cfg.expect.unwrap_or(ExpectedVerdict::ConvergenceObserved)
}
