use qwalk_core::walk::evolve;

use super::{Mode, Report};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Table;

pub struct Simulate;

impl Mode for Simulate {
    fn name(&self) -> &'static str {
        "simulate"
    }

    fn run(&self, config: &ExperimentConfig) -> Result<Report, CliError> {
        let evo = evolve(&config.walk_spec()?)?;
        let mut pdf = Table::new("pdf", &["step", "site", "probability"]);
        let mut moments = Table::new("moments", &["step", "mean", "variance"]);
        for (n, dist) in evo.trajectory.iter().enumerate() {
            for (site, p) in dist.iter().filter(|&(_, p)| p > 0.0) {
                pdf.push(vec![n.into(), site.into(), p.into()]);
            }
            moments.push(vec![n.into(), dist.mean().into(), dist.variance().into()]);
        }
        Ok(Report::ok(vec![pdf, moments]))
    }
}
