//! Named verification checks, selectable at runtime.
//!
//! Each [`Check`] reproduces one acceptance criterion and returns every
//! measured quantity next to the bound it must satisfy, so callers can print
//! or serialize the numbers rather than a bare verdict. Randomized checks use
//! fixed ChaCha seeds and nothing is timed, so reports are reproducible.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    classical_walk_pdf, fit_trajectory, pdf_distance, resonance_gaussian_check, simulated_classical_pdf,
    universality_check, ConvergenceReport, Universality,
};
use crate::cavity::{decay_ab, decay_amplitude_c, decay_sigma2, decayed_coin, driven_spec, jcm_kraus, prepare_coin, spontaneous_kraus};
use crate::coin::{pauli_rotation, CMat2, CoinDensity, CoinUnitary, PauliAxis};
use crate::spectral::{
    arcsine_cdf, asymptotic_h, asymptotic_moment, exact_moment_spectral, PhiGrid, WalkerPhaseMeasure,
};
use crate::walk::{build_step_kraus, evolve, pdf_moment, step, InitialWalker, PositionPdf, WalkSpec, WalkerDensity};
use crate::{Error, Result};

/// What a measured value must satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Near { target: f64, tol: f64 },
    /// A yes/no property; the value is 1 when it holds.
    Holds,
}

impl Bound {
    pub fn admits(&self, value: f64) -> bool {
        match *self {
            Bound::AtMost(limit) => value <= limit,
            Bound::AtLeast(limit) => value >= limit,
            Bound::Near { target, tol } => (value - target).abs() <= tol,
            Bound::Holds => value == 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub bound: Bound,
}

impl Measurement {
    pub fn new(label: impl Into<String>, value: f64, bound: Bound) -> Self {
        Measurement { label: label.into(), value, bound }
    }

    pub fn flag(label: impl Into<String>, holds: bool) -> Self {
        Measurement::new(label, if holds { 1.0 } else { 0.0 }, Bound::Holds)
    }

    pub fn passed(&self) -> bool {
        self.bound.admits(self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub measurements: Vec<Measurement>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.measurements.iter().all(Measurement::passed)
    }

    pub fn get(&self, label: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.label == label)
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self) -> Result<CheckReport>;
}

/// Checks in registration order, looked up by name.
pub struct Registry {
    checks: Vec<Box<dyn Check>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { checks: Vec::new() }
    }

    /// Registers a check, replacing any earlier one of the same name.
    pub fn register(&mut self, check: Box<dyn Check>) {
        match self.checks.iter().position(|c| c.name() == check.name()) {
            Some(i) => self.checks[i] = check,
            None => self.checks.push(check),
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Check> {
        self.checks.iter().map(|c| c.as_ref())
    }
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry::empty();
        r.register(Box::new(WorkedH));
        r.register(Box::new(ArcsineLimit));
        r.register(Box::new(Cutoff));
        r.register(Box::new(MomentScaling));
        r.register(Box::new(ClassicalOracle));
        r.register(Box::new(Cptp));
        r.register(Box::new(JcmResonance));
        r.register(Box::new(DecaySpread));
        r.register(Box::new(Universal));
        r.register(Box::new(CrossMoments));
        r
    }
}

/// Random unitary `e^{iθ} exp(i t n·σ)`.
pub fn random_unitary(rng: &mut impl Rng) -> CoinUnitary {
    let t = rng.random_range(0.0..PI);
    let n = random_direction(rng);
    let gen = CMat2::sigma1() * n[0] + CMat2::sigma2() * n[1] + CMat2::sigma3() * n[2];
    let m = (CMat2::IDENTITY * t.cos() + gen.scale(Complex64::new(0.0, t.sin())))
        .scale(Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)));
    CoinUnitary::new(m).expect("SU(2) times a phase is unitary")
}

fn random_direction(rng: &mut impl Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let a = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    [s * a.cos(), s * a.sin(), z]
}

fn bloch_density(b: [f64; 3]) -> CoinDensity {
    let m = (CMat2::IDENTITY + CMat2::sigma1() * b[0] + CMat2::sigma2() * b[1] + CMat2::sigma3() * b[2]) * 0.5;
    CoinDensity::new(m).expect("Bloch vector inside the unit ball")
}

/// Coin density with a Bloch vector uniform in the unit ball.
pub fn random_coin(rng: &mut impl Rng) -> CoinDensity {
    let r = rng.random::<f64>().cbrt() * (1.0 - 1e-12);
    bloch_density(random_direction(rng).map(|c| c * r))
}

pub fn random_pure_coin(rng: &mut impl Rng) -> CoinDensity {
    bloch_density(random_direction(rng))
}

/// Normalized superposition or mixture on up to three sites near the origin.
pub fn random_initial(rng: &mut impl Rng) -> InitialWalker {
    let count = rng.random_range(1..=3);
    let mut sites: Vec<i64> = (0..count).map(|_| rng.random_range(-3..=3)).collect();
    sites.sort_unstable();
    sites.dedup();
    if rng.random_bool(0.5) {
        let amps: Vec<Complex64> = sites
            .iter()
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt().max(1e-3);
        InitialWalker::Pure(sites.into_iter().zip(amps).map(|(s, a)| (s, a / norm)).collect())
    } else {
        let weights: Vec<f64> = sites.iter().map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        InitialWalker::Mixed(sites.into_iter().zip(weights).map(|(s, w)| (s, w / total)).collect())
    }
}

fn worked_spec() -> WalkSpec {
    WalkSpec::new(2, pauli_rotation(PauliAxis::Y, FRAC_PI_4), CoinDensity::plus())
}

/// Distributions of the worked example up to 400 steps, shared between checks.
fn worked_trajectory() -> Result<&'static [PositionPdf]> {
    static CACHE: OnceLock<Result<Vec<PositionPdf>>> = OnceLock::new();
    CACHE
        .get_or_init(|| evolve(&worked_spec().with_steps(400)).map(|e| e.trajectory))
        .as_ref()
        .map(|v| v.as_slice())
        .map_err(Clone::clone)
}

fn unit_arcsine(y: f64) -> f64 {
    arcsine_cdf(y, 0.0, 1.0)
}

struct WorkedH;

impl Check for WorkedH {
    fn name(&self) -> &'static str {
        "worked-h"
    }
    fn description(&self) -> &'static str {
        "h(φ) = -cos 2φ for k = 2, U = exp(iπ/4 σ₂), coin |+⟩"
    }
    fn run(&self) -> Result<CheckReport> {
        let grid = PhiGrid::default();
        let (h, _) = asymptotic_h(&worked_spec(), &grid)?;
        let err = grid.points().zip(&h.values).map(|(phi, v)| (v + (2.0 * phi).cos()).abs()).fold(0.0, f64::max);
        Ok(CheckReport {
            name: self.name(),
            measurements: vec![
                Measurement::new("max_grid_error", err, Bound::AtMost(1e-12)),
            ],
        })
    }
}

struct ArcsineLimit;

impl Check for ArcsineLimit {
    fn name(&self) -> &'static str {
        "arcsine-limit"
    }
    fn description(&self) -> &'static str {
        "Kolmogorov distance of L/n from the arcsine law at n = 100, 200, 400"
    }
    fn run(&self) -> Result<CheckReport> {
        let traj = worked_trajectory()?;
        let report = ConvergenceReport::from_trajectory(traj, &[100, 200, 400], "arcsine[-1,1]", unit_arcsine)?;
        let mut measurements: Vec<Measurement> = report
            .distances
            .iter()
            .map(|&(n, d)| Measurement::new(format!("ks_n{n}"), d, Bound::AtMost(if n == 400 { 0.05 } else { 1.0 })))
            .collect();
        measurements.push(Measurement::flag("decreasing", report.is_decreasing()));
        Ok(CheckReport { name: self.name(), measurements })
    }
}

struct Cutoff;

impl Check for Cutoff {
    fn name(&self) -> &'static str {
        "cutoff"
    }
    fn description(&self) -> &'static str {
        "probability of |L/n| > 1.05 at n = 400"
    }
    fn run(&self) -> Result<CheckReport> {
        let pdf = &worked_trajectory()?[400];
        let outside: f64 = pdf.iter().filter(|&(m, _)| (m as f64 / 400.0).abs() > 1.05).map(|(_, p)| p).sum();
        let reach = pdf.iter().filter(|&(_, p)| p > 0.0).map(|(m, _)| m.abs()).max().unwrap_or(0);
        Ok(CheckReport {
            name: self.name(),
            measurements: vec![
                Measurement::new("mass_outside", outside, Bound::AtMost(1e-3)),
                Measurement::new("max_occupied_site", reach as f64, Bound::AtLeast(420.0)),
            ],
        })
    }
}

struct MomentScaling;

impl Check for MomentScaling {
    fn name(&self) -> &'static str {
        "moment-scaling"
    }
    fn description(&self) -> &'static str {
        "linear mean and quadratic variance of the worked example over n = 20..200"
    }
    fn run(&self) -> Result<CheckReport> {
        let traj = worked_trajectory()?;
        let steps: Vec<usize> = (1..=10).map(|i| 20 * i).collect();
        let fit = fit_trajectory(traj, &steps)?;
        let grid = PhiGrid::default();
        let (h, _) = asymptotic_h(&worked_spec(), &grid)?;
        let var_y = asymptotic_moment(&h, &WalkerPhaseMeasure::uniform(&grid), 2)?
            - asymptotic_moment(&h, &WalkerPhaseMeasure::uniform(&grid), 1)?.powi(2);
        Ok(CheckReport {
            name: self.name(),
            measurements: vec![
                Measurement::new("residual_mean", fit.residual_mean, Bound::AtMost(1e-6)),
                Measurement::new("residual_var", fit.residual_var, Bound::AtMost(1e-6)),
                Measurement::new("K1", fit.k1, Bound::Near { target: 0.0, tol: 1e-8 }),
                Measurement::new("K2", fit.k2, Bound::Near { target: 0.5, tol: 1e-3 }),
                Measurement::new("K2_minus_var_Y", fit.k2 - var_y, Bound::Near { target: 0.0, tol: 1e-3 }),
            ],
        })
    }
}

struct ClassicalOracle;

impl Check for ClassicalOracle {
    fn name(&self) -> &'static str {
        "classical-oracle"
    }
    fn description(&self) -> &'static str {
        "U = I walks against the binomial law at n = 30"
    }
    fn run(&self) -> Result<CheckReport> {
        let mut worst: f64 = 0.0;
        for k in 1..=3 {
            for p in [0.3, 0.5, 0.9] {
                let sim = simulated_classical_pdf(p, k, 30)?;
                worst = worst.max(pdf_distance(&sim, &classical_walk_pdf(p, k, 30)?));
            }
        }
        Ok(CheckReport {
            name: self.name(),
            measurements: vec![
                Measurement::new("max_entry_error", worst, Bound::AtMost(1e-12)),
            ],
        })
    }
}

struct Cptp;

impl Check for Cptp {
    fn name(&self) -> &'static str {
        "cptp"
    }
    fn description(&self) -> &'static str {
        "completeness, trace, Hermiticity and positivity over 1000 random draws"
    }
    fn run(&self) -> Result<CheckReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
        let (mut completeness, mut trace, mut herm, mut min_eig): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, f64::INFINITY);
        for _ in 0..1000 {
            let k = rng.random_range(1..=4);
            let steps = rng.random_range(1..=6);
            let spec = WalkSpec::new(k, random_unitary(&mut rng), random_coin(&mut rng))
                .with_initial(random_initial(&mut rng))
                .with_steps(steps);
            let ks = build_step_kraus(&spec)?;
            completeness = completeness.max(ks.completeness_error());
            completeness = completeness.max(jcm_kraus(rng.random_range(0..20), rng.random_range(0.0..10.0))?.completeness_error());
            completeness = completeness.max(spontaneous_kraus(rng.random())?.completeness_error());

            let mut rho = WalkerDensity::from_initial(&spec.initial, spec.window()?)?;
            for _ in 0..steps {
                let next = step(&rho, &ks)?;
                trace = trace.max((next.trace() - rho.trace()).norm());
                herm = herm.max(next.hermiticity_error());
                rho = next;
            }
            min_eig = min_eig.min(rho.min_eigenvalue());
        }
        Ok(CheckReport {
            name: self.name(),
            measurements: vec![
                Measurement::new("completeness_error", completeness, Bound::AtMost(1e-10)),
                Measurement::new("trace_drift", trace, Bound::AtMost(1e-12)),
                Measurement::new("hermiticity_error", herm, Bound::AtMost(1e-12)),
                Measurement::new("min_eigenvalue", min_eig, Bound::AtLeast(-1e-8)),
            ],
        })
    }
}

struct JcmResonance;

impl Check for JcmResonance {
    fn name(&self) -> &'static str {
        "jcm-resonance"
    }
    fn description(&self) -> &'static str {
        "maximally mixed cavity-prepared coin and the resulting Gaussian walk"
    }
    fn run(&self) -> Result<CheckReport> {
        let mut mixed_error: f64 = 0.0;
        for r in 0..=3u32 {
            let tau = PI / (4.0 * (r as f64 + 1.0).sqrt());
            let rho = prepare_coin(0.0, r, tau)?;
            mixed_error = mixed_error.max(rho.matrix().max_abs_diff(CoinDensity::maximally_mixed().matrix()));
        }
        let initial = InitialWalker::Pure(vec![
            (-1, Complex64::new(0.6, 0.0)),
            (0, Complex64::new(0.0, 0.48)),
            (2, Complex64::new(0.64, 0.0)),
        ]);
        let spread = driven_spec(prepare_coin(0.0, 0, FRAC_PI_4)?).with_initial(initial);
        let mixture = resonance_gaussian_check(&spread, 0)?.mixture_deviation;
        let report = resonance_gaussian_check(&driven_spec(prepare_coin(0.0, 0, FRAC_PI_4)?), 400)?;
        let fit = report.fit.ok_or_else(|| Error::Domain("resonance fit missing".into()))?;
        Ok(CheckReport {
            name: self.name(),
            measurements: vec![
                Measurement::new("prepared_minus_half_identity", mixed_error, Bound::AtMost(1e-12)),
                Measurement::new("mixture_deviation", mixture.max(report.mixture_deviation), Bound::AtMost(1e-12)),
                Measurement::new("K2", fit.k2, Bound::Near { target: 0.0, tol: 1e-8 }),
                Measurement::new("K3", fit.k3, Bound::Near { target: 2.0, tol: 1e-6 }),
                Measurement::new("ks_normal_n400", report.normal_distance.unwrap_or(1.0), Bound::AtMost(0.05)),
            ],
        })
    }
}

struct DecaySpread;

impl Check for DecaySpread {
    fn name(&self) -> &'static str {
        "decay-spread"
    }
    fn description(&self) -> &'static str {
        "σ²(χ, γ) against C²/2 and quadrature of h² on a 21 × 21 grid"
    }
    fn run(&self) -> Result<CheckReport> {
        let grid = PhiGrid::new(256)?;
        let uniform = WalkerPhaseMeasure::uniform(&grid);
        let (mut vs_c, mut vs_quad, mut argmin_off): (f64, f64, f64) = (0.0, 0.0, 0.0);
        let mut closed_form: f64 = 0.0;
        for i in 0..=20 {
            let chi = FRAC_PI_2 * i as f64 / 20.0;
            let mut scan = Vec::with_capacity(21);
            for j in 0..=20 {
                let gamma = j as f64 / 20.0;
                let s2 = decay_sigma2(chi, gamma)?;
                let c = decay_amplitude_c(chi, gamma)?;
                vs_c = vs_c.max((s2 - c * c / 2.0).abs());
                let coin = decayed_coin(chi, gamma)?;
                let (h, _) = asymptotic_h(&driven_spec(coin), &grid)?;
                vs_quad = vs_quad.max((s2 - asymptotic_moment(&h, &uniform, 2)?).abs());
                let (a, b) = decay_ab(chi, gamma)?;
                closed_form = closed_form.max((a.hypot(b) - c).abs());
                scan.push(s2);
            }
            // The scan is flat in γ once cos⁴χ vanishes.
            if chi.cos().powi(4) > 1e-12 {
                let argmin = scan.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(j, _)| j).unwrap_or(0);
                argmin_off = argmin_off.max((argmin as f64 / 20.0 - 0.5).abs());
            } else {
                let spread = scan.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - scan.iter().cloned().fold(f64::INFINITY, f64::min);
                argmin_off = argmin_off.max(if spread < 1e-12 { 0.0 } else { 1.0 });
            }
        }
        Ok(CheckReport {
            name: self.name(),
            measurements: vec![
                Measurement::new("sigma2_minus_half_c2", vs_c, Bound::AtMost(1e-10)),
                Measurement::new("sigma2_minus_quadrature", vs_quad, Bound::AtMost(1e-10)),
                Measurement::new("c_closed_forms", closed_form, Bound::AtMost(1e-10)),
                Measurement::new("argmin_gamma_offset", argmin_off, Bound::AtMost(0.05)),
                Measurement::new("sigma2_chi0_gamma0", decay_sigma2(0.0, 0.0)?, Bound::Near { target: 0.5, tol: 0.0 }),
                Measurement::new("sigma2_chi0_gamma1", decay_sigma2(0.0, 1.0)?, Bound::Near { target: 0.5, tol: 0.0 }),
            ],
        })
    }
}

struct Universal;

impl Check for Universal {
    fn name(&self) -> &'static str {
        "universality"
    }
    fn description(&self) -> &'static str {
        "normalized limit law of 20 random k = 2 walks against the unit arcsine law"
    }
    fn run(&self) -> Result<CheckReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
        let (mut worst, mut arcsine, mut constant): (f64, usize, usize) = (0.0, 0, 0);
        while arcsine < 20 {
            let report = universality_check(&random_unitary(&mut rng), &random_pure_coin(&mut rng))?;
            match report.outcome {
                Universality::Arcsine { max_error, .. } => {
                    worst = worst.max(max_error);
                    arcsine += 1;
                }
                Universality::Constant { .. } => constant += 1,
            }
            if constant > 100 {
                return Err(Error::Domain("random draws keep producing constant h".into()));
            }
        }
        Ok(CheckReport {
            name: self.name(),
            measurements: vec![
                Measurement::new("draws_with_varying_h", arcsine as f64, Bound::AtLeast(20.0)),
                Measurement::new("max_cdf_error", worst, Bound::AtMost(1e-8)),
            ],
        })
    }
}

struct CrossMoments;

impl Check for CrossMoments {
    fn name(&self) -> &'static str {
        "cross-moments"
    }
    fn description(&self) -> &'static str {
        "phase-space moments against position-space moments for 5 random walks"
    }
    fn run(&self) -> Result<CheckReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let spec = WalkSpec::new(rng.random_range(1..=3), random_unitary(&mut rng), random_coin(&mut rng))
                .with_initial(random_initial(&mut rng))
                .with_steps(50);
            let evo = evolve(&spec)?;
            for n in [2, 10, 50] {
                for s in 1..=2 {
                    let reference = pdf_moment(&evo.trajectory[n], s);
                    let spectral = exact_moment_spectral(&spec, n, s)?;
                    worst = worst.max((spectral - reference).abs() / reference.abs().max(1.0));
                }
            }
        }
        Ok(CheckReport {
            name: self.name(),
            measurements: vec![Measurement::new("max_relative_error", worst, Bound::AtMost(1e-5))],
        })
    }
}
