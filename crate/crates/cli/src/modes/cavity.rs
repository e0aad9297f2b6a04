use qwalk_core::cavity::{amplitude_c, driven_ab, phase_lambda, prepare_coin, resonance_times};
use qwalk_core::Error;

use super::{coin_table, Mode, Report};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Table;

const RESONANCES: usize = 5;

pub struct Cavity;

impl Mode for Cavity {
    fn name(&self) -> &'static str {
        "cavity"
    }

    fn run(&self, config: &ExperimentConfig) -> Result<Report, CliError> {
        let (chi, r, tau) = (config.chi, config.r, config.tau);
        let coin = prepare_coin(chi, r, tau)?;
        let (a, b) = driven_ab(chi, r, tau);

        let mut constants = Table::new("constants", &["quantity", "value"]);
        constants.push(vec!["A".into(), a.into()]);
        constants.push(vec!["B".into(), b.into()]);
        constants.push(vec!["C".into(), amplitude_c(chi, r, tau).into()]);
        match phase_lambda(chi, r, tau) {
            Ok(lambda) => constants.push(vec!["Lambda".into(), lambda.into()]),
            Err(Error::PhaseUndefined { .. }) => {}
            Err(e) => return Err(e.into()),
        }

        let mut resonances = Table::new("resonance", &["j", "tau"]);
        match resonance_times(chi, r, RESONANCES) {
            Ok(times) => {
                for (j, t) in times.into_iter().enumerate() {
                    resonances.push(vec![j.into(), t.into()]);
                }
            }
            Err(Error::InvalidChi(_)) => {}
            Err(e) => return Err(e.into()),
        }
        Ok(Report::ok(vec![coin_table(&coin), constants, resonances]))
    }
}
