use qwalk_core::spectral::{
    asymptotic_cdf, asymptotic_h, asymptotic_moment, detect_constant_h, walker_phase_measure, PhiGrid,
};

use super::{single_harmonic, Mode, Report};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Table;

const CDF_POINTS: usize = 201;

pub struct Asymptotic;

impl Mode for Asymptotic {
    fn name(&self) -> &'static str {
        "asymptotic"
    }

    fn run(&self, config: &ExperimentConfig) -> Result<Report, CliError> {
        let spec = config.walk_spec()?;
        let grid = PhiGrid::new(config.grid)?;
        let (samples, poly) = asymptotic_h(&spec, &grid)?;
        let measure = walker_phase_measure(&spec.initial, &grid)?;

        let mut h = Table::new("h", &["phi", "h"]);
        for (phi, v) in grid.points().zip(&samples.values) {
            h.push(vec![phi.into(), (*v).into()]);
        }

        let mut cdf = Table::new("cdf", &["y", "cdf"]);
        if detect_constant_h(&poly) {
            cdf.push(vec![poly.mean.into(), 1.0.into()]);
        } else {
            for (y, f) in asymptotic_cdf(&poly, &measure)?.table(CDF_POINTS) {
                cdf.push(vec![y.into(), f.into()]);
            }
        }

        let mut summary = Table::new("polynomial", &["quantity", "value"]);
        summary.push(vec!["mu".into(), poly.mean.into()]);
        for harm in &poly.harmonics {
            summary.push(vec![format!("A_{}", harm.order).into(), harm.amplitude.into()]);
            summary.push(vec![format!("alpha_{}", harm.order).into(), harm.phase.into()]);
        }

        let mean = asymptotic_moment(&samples, &measure, 1)?;
        let second = asymptotic_moment(&samples, &measure, 2)?;
        let mut constants = Table::new("constants", &["quantity", "value"]);
        constants.push(vec!["mu".into(), mean.into()]);
        constants.push(vec!["sigma2".into(), (second - mean * mean).max(0.0).into()]);
        if let Some((c, lambda)) = single_harmonic(&poly) {
            constants.push(vec!["C".into(), c.into()]);
            constants.push(vec!["Lambda".into(), lambda.into()]);
        }
        Ok(Report::ok(vec![h, cdf, summary, constants]))
    }
}
