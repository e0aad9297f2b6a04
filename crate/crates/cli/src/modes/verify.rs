use qwalk_core::verification::suite::{self, Bound};

use super::{Mode, Report};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{format_real, Table};

pub struct Verify;

fn describe(bound: &Bound) -> String {
    match *bound {
        Bound::AtMost(v) => format!("<= {}", format_real(v)),
        Bound::AtLeast(v) => format!(">= {}", format_real(v)),
        Bound::Near { target, tol } => format!("{} +- {}", format_real(target), format_real(tol)),
        Bound::Holds => "holds".into(),
    }
}

impl Mode for Verify {
    fn name(&self) -> &'static str {
        "verify"
    }

    fn run(&self, config: &ExperimentConfig) -> Result<Report, CliError> {
        let registry = suite::Registry::default();
        let checks: Vec<_> = if config.suite == "all" {
            registry.iter().collect()
        } else {
            let mut picked = Vec::new();
            for name in config.suite.split(',').map(str::trim) {
                let check = registry.get(name).ok_or_else(|| {
                    CliError::Config(format!("unknown suite `{name}`; known: all, {}", registry.names().join(", ")))
                })?;
                picked.push(check);
            }
            picked
        };

        let mut table = Table::new("verify", &["check", "quantity", "value", "bound", "status"]);
        let mut passed = true;
        for check in checks {
            let report = check.run()?;
            passed &= report.passed();
            println!("{} {}", if report.passed() { "PASS" } else { "FAIL" }, report.name);
            for m in &report.measurements {
                let status = if m.passed() { "pass" } else { "fail" };
                table.push(vec![report.name.into(), m.label.clone().into(), m.value.into(), describe(&m.bound).into(), status.into()]);
            }
        }
        Ok(Report { tables: vec![table], passed })
    }
}
