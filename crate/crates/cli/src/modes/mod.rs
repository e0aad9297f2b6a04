//! Run modes, registered by name.

mod asymptotic;
mod cavity;
mod decay;
mod simulate;
mod verify;

use std::collections::BTreeMap;

use qwalk_core::coin::CoinDensity;
use qwalk_core::spectral::TrigPolynomial;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Table;

/// Tables produced by a mode, and whether every check it ran passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
    pub passed: bool,
}

impl Report {
    pub fn ok(tables: Vec<Table>) -> Self {
        Report { tables, passed: true }
    }
}

pub trait Mode {
    fn name(&self) -> &'static str;
    fn run(&self, config: &ExperimentConfig) -> Result<Report, CliError>;
}

pub struct Registry {
    modes: BTreeMap<&'static str, Box<dyn Mode>>,
}

impl Registry {
    pub fn register(&mut self, mode: Box<dyn Mode>) {
        self.modes.insert(mode.name(), mode);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Mode> {
        self.modes.get(name).map(|m| m.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.modes.keys().copied().collect()
    }
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry { modes: BTreeMap::new() };
        r.register(Box::new(simulate::Simulate));
        r.register(Box::new(asymptotic::Asymptotic));
        r.register(Box::new(cavity::Cavity));
        r.register(Box::new(decay::Decay));
        r.register(Box::new(verify::Verify));
        r
    }
}

/// `(row, col, re, im)` entries of a coin density.
fn coin_table(rho: &CoinDensity) -> Table {
    let mut t = Table::new("coin", &["row", "col", "re", "im"]);
    for r in 0..2 {
        for c in 0..2 {
            let z = rho.matrix().get(r, c);
            t.push(vec![r.into(), c.into(), z.re.into(), z.im.into()]);
        }
    }
    t
}

/// `C` and `Λ` of `h = C cos(2φ - Λ) + μ` when `h` is a single second harmonic.
fn single_harmonic(poly: &TrigPolynomial) -> Option<(f64, f64)> {
    match poly.harmonics.as_slice() {
        [h] if h.order == 1 && h.amplitude > 1e-12 => {
            // -A cos(2φ + 2α) = A cos(2φ - Λ) with Λ = -(2α + π), folded into (-π, π].
            let mut lambda = -(2.0 * h.phase + std::f64::consts::PI);
            while lambda <= -std::f64::consts::PI {
                lambda += std::f64::consts::TAU;
            }
            while lambda > std::f64::consts::PI {
                lambda -= std::f64::consts::TAU;
            }
            Some((h.amplitude, lambda))
        }
        _ => None,
    }
}
