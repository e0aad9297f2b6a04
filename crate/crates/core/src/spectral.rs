//! Analysis in the eigenbasis `|φ⟩` of the shift operators.
//!
//! With `|φ⟩ = (1/2π) Σ_n e^{-inφ}|n⟩` one walk step multiplies the kernel
//! `ρ(φ, φ')` of the walker state by the characteristic function
//! `A(φ, φ') = Tr[V^{†k}(φ') V^k(φ) ρ_c]`, where `V(φ) = e^{iφσ₃}U`.
//!
//! The position over the number of steps, `L/n`, converges weakly to
//! `Y = h(φ)` with `φ` distributed on the circle by `ρ(φ,φ)dφ/2π`, and
//!
//! ```text
//! h(φ) = Tr[(σ + V†σV + … + V^{†(k-1)}σV^{k-1}) ρ_c],   σ = U†σ₃U.
//! ```
//!
//! `h` is a real trigonometric polynomial in `2φ` of degree at most `k-1`,
//! so uniform-grid quadrature is exact once the grid resolves the integrand.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::coin::{conjugate_sigma3, CMat2, CoinUnitary};
use crate::walk::{InitialWalker, WalkSpec};
use crate::{Error, Result, Tolerances};

pub const DEFAULT_GRID: usize = 4096;

/// `M` uniform points `φ_j = 2πj/M` on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhiGrid {
    m: usize,
}

impl PhiGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 64 || !m.is_power_of_two() {
            return Err(Error::InvalidGrid(m));
        }
        Ok(PhiGrid { m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn phi(&self, j: usize) -> f64 {
        TAU * j as f64 / self.m as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(|j| self.phi(j))
    }
}

impl Default for PhiGrid {
    fn default() -> Self {
        PhiGrid { m: DEFAULT_GRID }
    }
}

/// `V(φ) = e^{iφσ₃} U`.
pub fn v_phi(u: &CoinUnitary, phi: f64) -> CMat2 {
    let phase = CMat2::diag(Complex64::from_polar(1.0, phi), Complex64::from_polar(1.0, -phi));
    phase * *u.matrix()
}

/// `A(φ, φ') = Tr[V^{†k}(φ') V^k(φ) ρ_c]`.
pub fn characteristic_a(spec: &WalkSpec, phi: f64, phi_prime: f64) -> Complex64 {
    let vk = v_phi(&spec.unitary, phi).powi(spec.k);
    let vk_prime = v_phi(&spec.unitary, phi_prime).powi(spec.k);
    (vk_prime.dagger() * vk * *spec.coin.matrix()).trace()
}

/// One harmonic `-A cos 2m(φ + α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub order: u32,
    pub amplitude: f64,
    pub phase: f64,
}

/// `h(φ) = μ - Σ_m A_m cos 2m(φ + α_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub mean: f64,
    pub harmonics: Vec<Harmonic>,
}

impl TrigPolynomial {
    pub fn constant(mean: f64) -> Self {
        TrigPolynomial { mean, harmonics: Vec::new() }
    }

    /// `μ - Σ A_m cos 2m(φ+α_m)` built directly from harmonics.
    pub fn new(mean: f64, harmonics: Vec<Harmonic>) -> Self {
        TrigPolynomial { mean, harmonics }
    }

    /// `a cos 2φ + b sin 2φ` as a single harmonic.
    pub fn from_cos_sin(a: f64, b: f64) -> Self {
        // a cos 2φ + b sin 2φ = -A cos(2φ + 2α) with A = √(a²+b²), 2α = π - atan2(b, a).
        let amplitude = a.hypot(b);
        let phase = wrap_phase((PI - b.atan2(a)) / 2.0, 1);
        TrigPolynomial::new(0.0, vec![Harmonic { order: 1, amplitude, phase }])
    }

    /// Extract harmonics `m = 1..=max_order` from uniform samples.
    pub fn from_samples(samples: &[f64], max_order: u32) -> Self {
        let coeffs = fourier_coefficients(samples);
        let mean = coeffs[0].re;
        let harmonics = (1..=max_order)
            .map(|order| {
                let c = coeffs[2 * order as usize];
                let amplitude = 2.0 * c.norm();
                // 2|c| cos(2mφ + arg c) = -A cos(2m(φ + α)).
                let phase = if amplitude > 0.0 { wrap_phase((c.arg() - PI) / (2.0 * order as f64), order) } else { 0.0 };
                Harmonic { order, amplitude, phase }
            })
            .collect();
        TrigPolynomial { mean, harmonics }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.mean
            - self
                .harmonics
                .iter()
                .map(|h| h.amplitude * (2.0 * h.order as f64 * (phi + h.phase)).cos())
                .sum::<f64>()
    }

    pub fn derivative(&self, phi: f64) -> f64 {
        self.harmonics
            .iter()
            .map(|h| {
                let w = 2.0 * h.order as f64;
                h.amplitude * w * (w * (phi + h.phase)).sin()
            })
            .sum()
    }

    /// Upper bound on `|h''|`.
    fn curvature_bound(&self) -> f64 {
        self.harmonics.iter().map(|h| h.amplitude * (2.0 * h.order as f64).powi(2)).sum()
    }

    pub fn amplitude_sum(&self) -> f64 {
        self.harmonics.iter().map(|h| h.amplitude).sum()
    }

    /// Highest frequency in `φ` (twice the highest harmonic order).
    pub fn degree(&self) -> usize {
        self.harmonics.iter().filter(|h| h.amplitude > 0.0).map(|h| 2 * h.order as usize).max().unwrap_or(0)
    }

    pub fn sample(&self, grid: &PhiGrid) -> HSamples {
        HSamples { grid: *grid, values: grid.points().map(|p| self.eval(p)).collect(), degree: self.degree() }
    }
}

/// Reduce the phase of an order-`m` harmonic into `(-π/2m, π/2m]`.
fn wrap_phase(alpha: f64, order: u32) -> f64 {
    let period = PI / order as f64;
    let mut a = alpha.rem_euclid(period);
    if a > period / 2.0 {
        a -= period;
    }
    a
}

/// Normalized DFT `c_q = (1/M) Σ_j f(φ_j) e^{-iqφ_j}`, `q = 0..M` (negative
/// frequencies wrap to the top half).
pub fn fourier_coefficients(samples: &[f64]) -> Vec<Complex64> {
    let m = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::from(x)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    buf
}

/// Samples of `h` on a grid, tagged with the frequency bandwidth of `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct HSamples {
    pub grid: PhiGrid,
    pub values: Vec<f64>,
    /// Highest frequency in `φ` present in `h`.
    pub degree: usize,
}

/// Sample `h(φ)` from the closed sum and extract its harmonics.
pub fn asymptotic_h(spec: &WalkSpec, grid: &PhiGrid) -> Result<(HSamples, TrigPolynomial)> {
    spec.validate()?;
    if grid.len() <= 4 * spec.k as usize {
        return Err(Error::GridTooCoarse { m: grid.len(), required: 4 * spec.k as usize });
    }
    let sigma = conjugate_sigma3(&spec.unitary);
    let rho = *spec.coin.matrix();
    let tol = Tolerances::DEFAULT.h_imag;
    let mut values = Vec::with_capacity(grid.len());
    for phi in grid.points() {
        let v = v_phi(&spec.unitary, phi);
        let mut vj = CMat2::IDENTITY;
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in 0..spec.k {
            acc += (vj.dagger() * sigma * vj * rho).trace();
            vj = v * vj;
        }
        if acc.im.abs() > tol {
            return Err(Error::NonRealH { imag: acc.im });
        }
        values.push(acc.re);
    }
    let poly = TrigPolynomial::from_samples(&values, spec.k - 1);
    let degree = 2 * (spec.k as usize - 1);
    Ok((HSamples { grid: *grid, values, degree }, poly))
}

/// The circle measure `ρ(φ,φ) dφ/2π` induced by the initial walker state.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerPhaseMeasure {
    pub grid: PhiGrid,
    pub samples: Vec<f64>,
    /// Fourier coefficients `(d, r_d)` of `ρ(φ,φ) = Σ_d r_d e^{idφ}`.
    coeffs: Vec<(i64, Complex64)>,
}

impl WalkerPhaseMeasure {
    /// `ρ(φ,φ) = 1`: walker initially at a single site.
    pub fn uniform(grid: &PhiGrid) -> Self {
        Self::from_coefficients(grid, vec![(0, Complex64::new(1.0, 0.0))])
    }

    fn from_coefficients(grid: &PhiGrid, coeffs: Vec<(i64, Complex64)>) -> Self {
        let samples = grid
            .points()
            .map(|phi| coeffs.iter().map(|&(d, r)| (r * Complex64::from_polar(1.0, d as f64 * phi)).re).sum())
            .collect();
        WalkerPhaseMeasure { grid: *grid, samples, coeffs }
    }

    /// Highest frequency in `ρ(φ,φ)`.
    pub fn bandwidth(&self) -> usize {
        self.coeffs.iter().map(|(d, _)| d.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// `(1/2π) ∫ ρ(φ,φ) dφ` by quadrature.
    pub fn total(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// `(1/2π) ∫_a^b ρ(φ,φ) dφ` from the exact antiderivative.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        let antiderivative = |phi: f64| -> f64 {
            self.coeffs
                .iter()
                .map(|&(d, r)| {
                    if d == 0 {
                        r.re * phi
                    } else {
                        (r * Complex64::from_polar(1.0, d as f64 * phi) / Complex64::new(0.0, d as f64)).re
                    }
                })
                .sum()
        };
        (antiderivative(b) - antiderivative(a)) / TAU
    }
}

/// `ρ(φ,φ) = |Σ_n c_n e^{inφ}|²` for a pure state, `Σ_n p_n` for a mixture.
pub fn walker_phase_measure(initial: &InitialWalker, grid: &PhiGrid) -> Result<WalkerPhaseMeasure> {
    initial.validate(Tolerances::DEFAULT.normalization)?;
    let mut by_offset = std::collections::BTreeMap::<i64, Complex64>::new();
    for (m, mp, v) in initial.entries() {
        *by_offset.entry(m - mp).or_default() += v;
    }
    Ok(WalkerPhaseMeasure::from_coefficients(grid, by_offset.into_iter().collect()))
}

/// `(1/2π) ∫ ρ(φ,φ) h(φ)^s dφ` by uniform quadrature.
pub fn asymptotic_moment(h: &HSamples, measure: &WalkerPhaseMeasure, s: u32) -> Result<f64> {
    if h.grid != measure.grid {
        return Err(Error::Domain("h samples and phase measure use different grids".into()));
    }
    let required = 2 * (s as usize * h.degree + measure.bandwidth());
    if h.grid.len() <= required {
        return Err(Error::GridTooCoarse { m: h.grid.len(), required });
    }
    let sum: f64 = h.values.iter().zip(&measure.samples).map(|(hv, r)| r * hv.powi(s as i32)).sum();
    Ok(sum / h.grid.len() as f64)
}

/// True when `h` has no oscillating part, so the walk spreads diffusively.
pub fn detect_constant_h(poly: &TrigPolynomial) -> bool {
    poly.amplitude_sum() < Tolerances::DEFAULT.constant_h
}

/// Arcsine density `1/(π√(C² - (y-μ)²))` on `(μ-C, μ+C)`.
pub fn arcsine_pdf(y: f64, center: f64, amplitude: f64) -> Result<f64> {
    if amplitude <= 0.0 {
        return Err(Error::Domain(format!("arcsine amplitude must be positive, got {amplitude}")));
    }
    let x = y - center;
    if x.abs() >= amplitude {
        return Err(Error::Domain(format!("|y - μ| = {} is outside the open support (C = {amplitude})", x.abs())));
    }
    Ok(1.0 / (PI * (amplitude * amplitude - x * x).sqrt()))
}

/// Arcsine distribution function `½ + arcsin((y-μ)/C)/π`, clamped outside
/// the support.
pub fn arcsine_cdf(y: f64, center: f64, amplitude: f64) -> f64 {
    let z = (y - center) / amplitude;
    if z <= -1.0 {
        0.0
    } else if z >= 1.0 {
        1.0
    } else {
        0.5 + z.asin() / PI
    }
}

#[derive(Debug, Clone, Copy)]
struct Branch {
    start: f64,
    end: f64,
    h_start: f64,
    h_end: f64,
}

/// Distribution function of `Y = h(φ)` as the measure of sublevel sets
/// `{φ : h(φ) <= y}`.
#[derive(Debug, Clone)]
pub struct AsymptoticCdf {
    poly: TrigPolynomial,
    measure: WalkerPhaseMeasure,
    branches: Vec<Branch>,
    h_min: f64,
    h_max: f64,
}

/// Build the sublevel-set CDF of `Y = h(φ)`.
pub fn asymptotic_cdf(poly: &TrigPolynomial, measure: &WalkerPhaseMeasure) -> Result<AsymptoticCdf> {
    if detect_constant_h(poly) {
        return Err(Error::ConstantH);
    }
    let critical = critical_points(poly, &measure.grid);
    if critical.len() < 2 {
        return Err(Error::Domain("failed to bracket the extrema of h".into()));
    }
    let mut branches = Vec::with_capacity(critical.len());
    for (i, &start) in critical.iter().enumerate() {
        let end = if i + 1 < critical.len() { critical[i + 1] } else { critical[0] + TAU };
        branches.push(Branch { start, end, h_start: poly.eval(start), h_end: poly.eval(end) });
    }
    let h_min = branches.iter().map(|b| b.h_start).fold(f64::INFINITY, f64::min);
    let h_max = branches.iter().map(|b| b.h_start).fold(f64::NEG_INFINITY, f64::max);
    Ok(AsymptoticCdf { poly: poly.clone(), measure: measure.clone(), branches, h_min, h_max })
}

impl AsymptoticCdf {
    pub fn range(&self) -> (f64, f64) {
        (self.h_min, self.h_max)
    }

    /// `P(Y <= y)`.
    pub fn eval(&self, y: f64) -> f64 {
        let tol = Tolerances::DEFAULT.bisection;
        let mut total = 0.0;
        for b in &self.branches {
            let (lo, hi) = (b.h_start.min(b.h_end), b.h_start.max(b.h_end));
            if y >= hi {
                total += self.measure.mass(b.start, b.end);
            } else if y >= lo {
                let increasing = b.h_end > b.h_start;
                let x = bisect(|phi| self.poly.eval(phi) - y, b.start, b.end, increasing, tol);
                total += if increasing { self.measure.mass(b.start, x) } else { self.measure.mass(x, b.end) };
            }
        }
        total.clamp(0.0, 1.0)
    }

    /// `points` equally spaced values of `y` from `min h` to `max h`.
    pub fn table(&self, points: usize) -> Vec<(f64, f64)> {
        let points = points.max(2);
        (0..points)
            .map(|i| {
                let y = if i + 1 == points {
                    self.h_max
                } else {
                    self.h_min + (self.h_max - self.h_min) * i as f64 / (points - 1) as f64
                };
                (y, self.eval(y))
            })
            .collect()
    }
}

/// Root of a monotone function on `[a, b]` whose sign pattern is known.
fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, increasing: bool, tol: f64) -> f64 {
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let below = f(mid) < 0.0;
        if below == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Sorted extrema of `h` in `[0, 2π)`: sign changes of `h'`, bracketed on the
/// grid and refined by bisection. Cells where `|h'|` could reach zero without
/// a visible sign change are subdivided using the curvature bound.
fn critical_points(poly: &TrigPolynomial, grid: &PhiGrid) -> Vec<f64> {
    let lipschitz = poly.curvature_bound();
    let tol = Tolerances::DEFAULT.bisection;
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for j in 0..grid.len() {
        let a = grid.phi(j);
        let b = if j + 1 < grid.len() { grid.phi(j + 1) } else { TAU };
        stack.push((a, b));
        while let Some((a, b)) = stack.pop() {
            let (da, db) = (poly.derivative(a), poly.derivative(b));
            if da == 0.0 && a < TAU {
                // An exact zero at a grid node counts once, as the left end of its cell.
                if poly.derivative(a - tol) * poly.derivative(a + tol) < 0.0 {
                    out.push(a);
                }
                continue;
            }
            if da * db < 0.0 {
                out.push(bisect(|x| poly.derivative(x), a, b, da < 0.0, tol));
                continue;
            }
            if db == 0.0 {
                continue;
            }
            // Same sign: a root pair inside needs |h'(a)| + |h'(b)| <= L(b - a).
            if da.abs() + db.abs() <= lipschitz * (b - a) && b - a > 1e-10 {
                let mid = 0.5 * (a + b);
                stack.push((mid, b));
                stack.push((a, mid));
            }
        }
    }
    out.sort_by(|x, y| x.total_cmp(y));
    out.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    if out.len() > 1 && out[0] + TAU - out[out.len() - 1] < 1e-9 {
        out.pop();
    }
    out
}

/// Centering and scaling of `Y` into the universal arcsine form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub mu: f64,
    pub sigma: f64,
}

impl Normalization {
    /// `y ↦ (y - μ)/(√2 σ)`.
    pub fn transform(&self, y: f64) -> f64 {
        (y - self.mu) / (std::f64::consts::SQRT_2 * self.sigma)
    }

    pub fn inverse(&self, z: f64) -> f64 {
        self.mu + std::f64::consts::SQRT_2 * self.sigma * z
    }
}

pub fn normalize_y(poly: &TrigPolynomial, measure: &WalkerPhaseMeasure) -> Result<Normalization> {
    if detect_constant_h(poly) {
        return Err(Error::ConstantH);
    }
    let h = poly.sample(&measure.grid);
    let mu = asymptotic_moment(&h, measure, 1)?;
    let second = asymptotic_moment(&h, measure, 2)?;
    Ok(Normalization { mu, sigma: (second - mu * mu).max(0.0).sqrt() })
}

/// `⟨L^s⟩_n` from the phase-space representation: the `s`-th derivative of
/// `ρ(φ,φ')A^n(φ,φ')` in the first argument at `φ' = φ` (fourth-order central
/// differences, step `1e-4`), integrated over the circle.
pub fn exact_moment_spectral(spec: &WalkSpec, n: usize, s: u32) -> Result<f64> {
    spec.validate()?;
    if !(1..=2).contains(&s) {
        return Err(Error::Domain(format!("spectral moments are implemented for s = 1, 2; got {s}")));
    }
    let entries = spec.initial.entries();
    let (lo, hi) = spec.initial.extent();
    let bandwidth = 2 * spec.k as usize * n + (hi - lo) as usize;
    let m = (4 * (bandwidth + 1)).next_power_of_two().max(DEFAULT_GRID);
    let grid = PhiGrid::new(m)?;

    let kernel = |x: f64, vk_prime_dag: &CMat2, phi_prime: f64| -> Complex64 {
        let rho: Complex64 = entries
            .iter()
            .map(|&(a, b, v)| v * Complex64::from_polar(1.0, a as f64 * x - b as f64 * phi_prime))
            .sum();
        let vk = v_phi(&spec.unitary, x).powi(spec.k);
        let a = (*vk_prime_dag * vk * *spec.coin.matrix()).trace();
        rho * a.powu(n as u32)
    };

    const DELTA: f64 = 1e-4;
    let mut acc = Complex64::new(0.0, 0.0);
    for phi in grid.points() {
        let vk_prime_dag = v_phi(&spec.unitary, phi).powi(spec.k).dagger();
        let f = |j: f64| kernel(phi + j * DELTA, &vk_prime_dag, phi);
        let d = match s {
            1 => (-f(2.0) + f(1.0) * 8.0 - f(-1.0) * 8.0 + f(-2.0)) / (12.0 * DELTA),
            _ => (-f(2.0) + f(1.0) * 16.0 - f(0.0) * 30.0 + f(-1.0) * 16.0 - f(-2.0)) / (12.0 * DELTA * DELTA),
        };
        acc += d;
    }
    let i_pow = Complex64::new(0.0, 1.0).powu(s);
    Ok((acc / (m as f64 * i_pow)).re)
}
