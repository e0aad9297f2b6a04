//! Cross-oracles and statistical checks for the walk.
//!
//! Everything here is deterministic: distances and fits are computed on
//! exact simulated distributions, so no hypothesis-testing machinery is
//! involved.

pub mod suite;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::coin::{CoinDensity, CoinUnitary};
use crate::spectral::{
    arcsine_cdf, asymptotic_cdf, asymptotic_h, detect_constant_h, normalize_y, Normalization, PhiGrid,
    TrigPolynomial, WalkerPhaseMeasure,
};
use crate::walk::{build_step_kraus, evolve, position_pdf, step, PositionPdf, WalkSpec, WalkerDensity};
use crate::{Error, Result};

/// Binomial law of a `U = I` walk: `P(k(2j - n)) = C(n, j) p^j (1-p)^(n-j)`.
/// Sites of zero probability are omitted.
pub fn classical_walk_pdf(p: f64, k: u32, n: usize) -> Result<BTreeMap<i64, f64>> {
    if !(0.0..=1.0).contains(&p) || k == 0 {
        return Err(Error::Domain(format!("classical walk needs p in [0, 1] and k >= 1, got p = {p}, k = {k}")));
    }
    let mut out = BTreeMap::new();
    let mut binom = 1.0;
    for j in 0..=n {
        if j > 0 {
            binom *= (n - j + 1) as f64 / j as f64;
        }
        let prob = binom * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32);
        if prob > 0.0 {
            out.insert(k as i64 * (2 * j as i64 - n as i64), prob);
        }
    }
    Ok(out)
}

/// Least-squares fit of `μ_n = K₁n + μ₀` and `σ_n² = K₂n² + K₃n + σ₀²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentFit {
    pub k1: f64,
    pub mu0: f64,
    pub k2: f64,
    pub k3: f64,
    pub sigma0_sq: f64,
    /// Largest absolute residual of the mean fit.
    pub residual_mean: f64,
    /// Largest absolute residual of the variance fit.
    pub residual_var: f64,
}

fn distinct_count(points: &[(usize, f64)]) -> usize {
    let mut ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.len()
}

/// Polynomial least squares on `x = n / n_max`, returned in powers of `n`.
fn polyfit(points: &[(usize, f64)], degree: usize) -> Result<Vec<f64>> {
    let need = 4.max(degree + 1);
    let got = distinct_count(points);
    if got < need || got != points.len() {
        return Err(Error::InsufficientPoints { got, need });
    }
    let scale = points.iter().map(|p| p.0).max().unwrap_or(1).max(1) as f64;
    let design = DMatrix::from_fn(points.len(), degree + 1, |r, c| (points[r].0 as f64 / scale).powi(c as i32));
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let coeffs = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Domain(format!("least-squares solve failed: {e}")))?;
    Ok(coeffs.iter().enumerate().map(|(c, v)| v / scale.powi(c as i32)).collect())
}

fn max_residual(points: &[(usize, f64)], coeffs: &[f64]) -> f64 {
    points
        .iter()
        .map(|&(n, y)| {
            let x = n as f64;
            let fit: f64 = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
            (y - fit).abs()
        })
        .fold(0.0, f64::max)
}

pub fn fit_moment_polynomials(means: &[(usize, f64)], variances: &[(usize, f64)]) -> Result<MomentFit> {
    let mean = polyfit(means, 1)?;
    let var = polyfit(variances, 2)?;
    Ok(MomentFit {
        k1: mean[1],
        mu0: mean[0],
        k2: var[2],
        k3: var[1],
        sigma0_sq: var[0],
        residual_mean: max_residual(means, &mean),
        residual_var: max_residual(variances, &var),
    })
}

/// Fit the moments of a trajectory at the given steps.
pub fn fit_trajectory(trajectory: &[PositionPdf], steps: &[usize]) -> Result<MomentFit> {
    let pick = |f: fn(&PositionPdf) -> f64| -> Result<Vec<(usize, f64)>> {
        steps
            .iter()
            .map(|&n| {
                trajectory
                    .get(n)
                    .map(|pdf| (n, f(pdf)))
                    .ok_or_else(|| Error::Domain(format!("step {n} is beyond the trajectory")))
            })
            .collect()
    };
    fit_moment_polynomials(&pick(PositionPdf::mean)?, &pick(PositionPdf::variance)?)
}

/// `sup |F_n - F|` between the distribution of `scale · L` and a continuous
/// target, evaluated just below and at every atom.
pub fn kolmogorov_distance(pdf: &PositionPdf, scale: f64, target: impl Fn(f64) -> f64) -> f64 {
    let mut cumulative = 0.0;
    let mut sup: f64 = 0.0;
    for (site, p) in pdf.iter() {
        if p <= 0.0 {
            continue;
        }
        let t = target(site as f64 * scale);
        sup = sup.max((cumulative - t).abs());
        cumulative += p;
        sup = sup.max((cumulative - t).abs());
    }
    sup.clamp(0.0, 1.0)
}

/// Kolmogorov distances of `L/n` from a named limit law along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub target: String,
    pub distances: Vec<(usize, f64)>,
}

impl ConvergenceReport {
    pub fn from_trajectory(
        trajectory: &[PositionPdf],
        steps: &[usize],
        target: &str,
        cdf: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let distances = steps
            .iter()
            .map(|&n| {
                if n == 0 {
                    return Err(Error::Domain("L/n is undefined at n = 0".into()));
                }
                let pdf = trajectory.get(n).ok_or_else(|| Error::Domain(format!("step {n} is beyond the trajectory")))?;
                Ok((n, kolmogorov_distance(pdf, 1.0 / n as f64, &cdf)))
            })
            .collect::<Result<_>>()?;
        Ok(ConvergenceReport { target: target.to_owned(), distances })
    }

    pub fn is_decreasing(&self) -> bool {
        self.distances.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn last_distance(&self) -> Option<f64> {
        self.distances.last().map(|d| d.1)
    }
}

/// Outcome of [`resonance_gaussian_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub steps: usize,
    /// `max |ρ' - (½ρ + ¼S₂ρS₂† + ¼S₋₂ρS₋₂†)|` after one step.
    pub mixture_deviation: f64,
    pub fit: Option<MomentFit>,
    /// Kolmogorov distance of `L/√(K₃n)` from the standard normal.
    pub normal_distance: Option<f64>,
}

impl ResonanceReport {
    pub fn passed(&self) -> bool {
        self.mixture_deviation < 1e-12 && self.normal_distance.is_none_or(|d| d < 0.05)
    }
}

fn standard_normal_cdf(x: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().cdf(x)
}

/// Step indices used for moment fits: every step when few, else 16 evenly spaced.
fn fit_steps(n: usize) -> Vec<usize> {
    if n < 16 {
        return (0..=n).collect();
    }
    let mut steps: Vec<usize> = (0..16).map(|i| i * n / 15).collect();
    steps.dedup();
    steps
}

/// Classical behaviour of a `k = 2` walk whose coin is maximally mixed.
pub fn resonance_gaussian_check(spec: &WalkSpec, n: usize) -> Result<ResonanceReport> {
    spec.validate()?;
    let deviation = spec.coin.matrix().max_abs_diff(CoinDensity::maximally_mixed().matrix());
    if deviation > 1e-10 {
        return Err(Error::NotAtResonance { deviation });
    }
    if spec.k != 2 {
        return Err(Error::InvalidSpec(format!("the resonance mixture is stated for k = 2, got k = {}", spec.k)));
    }
    let window = spec.clone().with_steps(n.max(1)).window()?;
    let rho = WalkerDensity::from_initial(&spec.initial, window)?;
    let out = step(&rho, &build_step_kraus(spec)?)?;
    let mut mixture_deviation: f64 = 0.0;
    for m in window.lo()..=window.hi() {
        for mp in window.lo()..=window.hi() {
            let want = rho.get(m, mp) * 0.5 + (rho.get(m - 2, mp - 2) + rho.get(m + 2, mp + 2)) * 0.25;
            mixture_deviation = mixture_deviation.max((out.get(m, mp) - want).norm());
        }
    }
    if n == 0 {
        return Ok(ResonanceReport { steps: 0, mixture_deviation, fit: None, normal_distance: None });
    }
    let evo = evolve(&spec.clone().with_steps(n))?;
    let fit = fit_trajectory(&evo.trajectory, &fit_steps(n))?;
    let scale = 1.0 / (fit.k3 * n as f64).sqrt();
    let normal_distance = kolmogorov_distance(&evo.trajectory[n], scale, standard_normal_cdf);
    Ok(ResonanceReport { steps: n, mixture_deviation, fit: Some(fit), normal_distance: Some(normal_distance) })
}

/// Outcome of [`universality_check`].
#[derive(Debug, Clone, PartialEq)]
pub enum Universality {
    /// `h` is constant; the walk spreads classically.
    Constant { value: f64 },
    /// Largest deviation of the normalized limit law from the unit arcsine law.
    Arcsine { normalization: Normalization, max_error: f64, points: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniversalityReport {
    pub h: TrigPolynomial,
    pub outcome: Universality,
}

impl UniversalityReport {
    pub fn passed(&self) -> bool {
        match self.outcome {
            Universality::Constant { .. } => true,
            Universality::Arcsine { max_error, .. } => max_error < 1e-8,
        }
    }
}

/// Compare the normalized limit law of a `k = 2` walk started at the origin with
/// the arcsine law on `[-1, 1]` at 101 interior points.
pub fn universality_check(unitary: &CoinUnitary, coin: &CoinDensity) -> Result<UniversalityReport> {
    const POINTS: usize = 101;
    let spec = WalkSpec::new(2, *unitary, *coin);
    let grid = PhiGrid::default();
    let (_, h) = asymptotic_h(&spec, &grid)?;
    if detect_constant_h(&h) {
        return Ok(UniversalityReport { outcome: Universality::Constant { value: h.mean }, h });
    }
    let measure = WalkerPhaseMeasure::uniform(&grid);
    let normalization = normalize_y(&h, &measure)?;
    let cdf = asymptotic_cdf(&h, &measure)?;
    let max_error = (1..=POINTS)
        .map(|i| {
            let z = -1.0 + 2.0 * i as f64 / (POINTS + 1) as f64;
            (cdf.eval(normalization.inverse(z)) - arcsine_cdf(z, 0.0, 1.0)).abs()
        })
        .fold(0.0, f64::max);
    Ok(UniversalityReport { outcome: Universality::Arcsine { normalization, max_error, points: POINTS }, h })
}

/// Largest entrywise difference between two site distributions.
pub fn pdf_distance(a: &BTreeMap<i64, f64>, b: &BTreeMap<i64, f64>) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|s| (a.get(s).copied().unwrap_or(0.0) - b.get(s).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Distribution of a `U = I` walk computed by the engine, for oracle comparison.
pub fn simulated_classical_pdf(p: f64, k: u32, n: usize) -> Result<BTreeMap<i64, f64>> {
    let spec = WalkSpec::new(k, CoinUnitary::identity(), CoinDensity::classical(p)?).with_steps(n);
    Ok(position_pdf(&evolve(&spec)?.state)?.to_map())
}
