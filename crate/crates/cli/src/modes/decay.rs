use qwalk_core::cavity::{decay_ab, decay_amplitude_c, decay_sigma2, decayed_coin};

use super::{coin_table, Mode, Report};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Table;

const SCAN_POINTS: usize = 101;

pub struct Decay;

impl Mode for Decay {
    fn name(&self) -> &'static str {
        "decay"
    }

    fn run(&self, config: &ExperimentConfig) -> Result<Report, CliError> {
        let (chi, gamma) = (config.chi, config.gamma);
        let coin = decayed_coin(chi, gamma)?;
        let (a, b) = decay_ab(chi, gamma)?;

        let mut constants = Table::new("constants", &["quantity", "value"]);
        constants.push(vec!["A".into(), a.into()]);
        constants.push(vec!["B".into(), b.into()]);
        constants.push(vec!["C".into(), decay_amplitude_c(chi, gamma)?.into()]);
        constants.push(vec!["sigma2".into(), decay_sigma2(chi, gamma)?.into()]);

        let mut scan = Table::new("scan", &["gamma", "sigma2"]);
        for i in 0..SCAN_POINTS {
            let g = i as f64 / (SCAN_POINTS - 1) as f64;
            scan.push(vec![g.into(), decay_sigma2(chi, g)?.into()]);
        }
        Ok(Report::ok(vec![coin_table(&coin), constants, scan]))
    }
}
