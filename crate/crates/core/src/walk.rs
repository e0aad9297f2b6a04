//! Finite-step evolution of the walker density matrix.
//!
//! One step of the walk feeds a fresh coin `ρ_c` through `V^k` and traces it
//! out. Expanding `V^k` over its `2^k` sign paths groups the coin factors by
//! net shift `j ∈ {-k, -k+2, …, k}` into matrices `C_j`; with
//! `ρ_c = Σ_a λ_a |a⟩⟨a|` the walker Kraus operators are
//! `K_{b,a} = √λ_a Σ_j ⟨b|C_j|a⟩ Shift_j`.
//!
//! The walker state lives on a finite window sized up front from `k`, the
//! number of steps and the initial support, so no amplitude can reach the
//! boundary.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::coin::{eigendecompose_density, CMat2, CoinDensity, CoinUnitary};
use crate::{Error, Result, Tolerances};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Inclusive range of integer sites `[lo, hi]` with `lo <= 0 <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeWindow {
    lo: i64,
    hi: i64,
}

impl LatticeWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > 0 || hi < 0 {
            return Err(Error::InvalidSpec(format!("window [{lo}, {hi}] must contain the origin")));
        }
        Ok(LatticeWindow { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn size(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn contains(&self, site: i64) -> bool {
        (self.lo..=self.hi).contains(&site)
    }

    fn index(&self, site: i64) -> usize {
        (site - self.lo) as usize
    }

    fn site(&self, index: usize) -> i64 {
        self.lo + index as i64
    }
}

/// Initial walker state: a pure superposition of sites or a classical
/// mixture of sites.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialWalker {
    Pure(Vec<(i64, Complex64)>),
    Mixed(Vec<(i64, f64)>),
}

impl InitialWalker {
    /// The walker localized at the origin, `|0⟩⟨0|`.
    pub fn origin() -> Self {
        InitialWalker::Pure(vec![(0, Complex64::new(1.0, 0.0))])
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let norm = match self {
            InitialWalker::Pure(amps) => amps.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>(),
            InitialWalker::Mixed(probs) => {
                if let Some((site, p)) = probs.iter().find(|(_, p)| *p < 0.0 || !p.is_finite()) {
                    return Err(Error::NegativeProbability { site: *site, value: *p });
                }
                probs.iter().map(|(_, p)| p).sum::<f64>()
            }
        };
        if self.sites().is_empty() {
            return Err(Error::InvalidSpec("initial walker state has no sites".into()));
        }
        if !norm.is_finite() || (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        let mut sites = self.sites();
        sites.sort_unstable();
        sites.dedup();
        if sites.len() != self.sites().len() {
            return Err(Error::InvalidSpec("initial walker state lists a site twice".into()));
        }
        Ok(())
    }

    fn sites(&self) -> Vec<i64> {
        match self {
            InitialWalker::Pure(a) => a.iter().map(|(s, _)| *s).collect(),
            InitialWalker::Mixed(p) => p.iter().map(|(s, _)| *s).collect(),
        }
    }

    /// `(min site, max site)` of the initial support.
    pub fn extent(&self) -> (i64, i64) {
        let sites = self.sites();
        let lo = sites.iter().copied().min().unwrap_or(0);
        let hi = sites.iter().copied().max().unwrap_or(0);
        (lo, hi)
    }

    /// Nonzero matrix elements `(m, m', ⟨m|ρ|m'⟩)`.
    pub fn entries(&self) -> Vec<(i64, i64, Complex64)> {
        match self {
            InitialWalker::Pure(amps) => amps
                .iter()
                .flat_map(|&(m, a)| amps.iter().map(move |&(mp, b)| (m, mp, a * b.conj())))
                .collect(),
            InitialWalker::Mixed(probs) => probs.iter().map(|&(m, p)| (m, m, Complex64::from(p))).collect(),
        }
    }
}

/// Everything needed to run one walk.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSpec {
    pub k: u32,
    pub unitary: CoinUnitary,
    pub coin: CoinDensity,
    pub initial: InitialWalker,
    pub steps: usize,
    pub margin: usize,
}

impl WalkSpec {
    /// A spec with the walker at the origin, zero steps and no margin.
    pub fn new(k: u32, unitary: CoinUnitary, coin: CoinDensity) -> Self {
        WalkSpec { k, unitary, coin, initial: InitialWalker::origin(), steps: 0, margin: 0 }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_initial(mut self, initial: InitialWalker) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_margin(mut self, margin: usize) -> Self {
        self.margin = margin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidSpec("k must be at least 1".into()));
        }
        if self.k > 30 {
            return Err(Error::InvalidSpec(format!("k = {} is too large", self.k)));
        }
        self.initial.validate(Tolerances::DEFAULT.normalization)
    }

    /// The window `evolve` allocates: the initial support padded by
    /// `k·steps + margin` on both sides (and always containing the origin).
    pub fn window(&self) -> Result<LatticeWindow> {
        let (lo, hi) = self.initial.extent();
        let pad = self.k as i64 * self.steps as i64 + self.margin as i64;
        LatticeWindow::new((lo - pad).min(0), (hi + pad).max(0))
    }
}

/// A banded walker operator `Σ_j c_j Shift_j` over shifts
/// `j = -k, -k+2, …, k`. `coeffs[i]` multiplies `Shift_{2i-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    pub coeffs: Vec<Complex64>,
}

impl ShiftOperator {
    pub fn k(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn shift(&self, index: usize) -> i64 {
        2 * index as i64 - self.k() as i64
    }

    /// Coefficient of `Shift_j`, zero when `j` is not in the band.
    pub fn coefficient(&self, shift: i64) -> Complex64 {
        let k = self.k() as i64;
        if shift.abs() > k || (shift + k) % 2 != 0 {
            return ZERO;
        }
        self.coeffs[((shift + k) / 2) as usize]
    }
}

/// Kraus operators of one walk step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKraus {
    k: u32,
    operators: Vec<ShiftOperator>,
}

impl StepKraus {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn operators(&self) -> &[ShiftOperator] {
        &self.operators
    }

    /// Deviation of `Σ K†K` from the identity on the window interior.
    ///
    /// `K†K = Σ_{j,j'} c̄_j c_{j'} Shift_{j'-j}`, so completeness means the
    /// summed coefficient of every nonzero net shift vanishes and the
    /// shift-zero coefficient is one.
    pub fn completeness_error(&self) -> f64 {
        let width = self.k as usize + 1;
        let mut by_offset = vec![ZERO; 2 * width - 1];
        for op in &self.operators {
            for (i, ci) in op.coeffs.iter().enumerate() {
                for (ip, cip) in op.coeffs.iter().enumerate() {
                    by_offset[ip + width - 1 - i] += ci.conj() * cip;
                }
            }
        }
        by_offset
            .iter()
            .enumerate()
            .map(|(d, v)| if d == width - 1 { (v - 1.0).norm() } else { v.norm() })
            .fold(0.0, f64::max)
    }

    /// `T[i][i'] = Σ_K c_i c̄_{i'}`: one step maps
    /// `ρ(m, m') ↦ Σ T[i][i'] ρ(m - j_i, m' - j_{i'})`.
    fn pair_kernel(&self) -> PairKernel {
        let width = self.k as usize + 1;
        let mut t = vec![ZERO; width * width];
        for op in &self.operators {
            for i in 0..width {
                for ip in 0..width {
                    t[i * width + ip] += op.coeffs[i] * op.coeffs[ip].conj();
                }
            }
        }
        let mut terms = Vec::new();
        for i in 0..width {
            for ip in 0..width {
                let v = t[i * width + ip];
                if v != ZERO {
                    let shift = |x: usize| 2 * x as i64 - self.k as i64;
                    terms.push((shift(i), shift(ip), v));
                }
            }
        }
        PairKernel { terms }
    }
}

#[derive(Debug, Clone)]
struct PairKernel {
    /// `(row shift, column shift, weight)`.
    terms: Vec<(i64, i64, Complex64)>,
}

impl PairKernel {
    fn shift_range(&self) -> (i64, i64) {
        let lo = self.terms.iter().map(|t| t.0.min(t.1)).min().unwrap_or(0);
        let hi = self.terms.iter().map(|t| t.0.max(t.1)).max().unwrap_or(0);
        (lo, hi)
    }
}

/// Coin factors `C_j` of `V^k`, indexed by the number of `+` moves: the sum
/// over all sign paths with `j` plus moves, later moves multiplying on the left.
pub fn path_coefficients(k: u32, unitary: &CoinUnitary) -> Vec<CMat2> {
    let u = *unitary.matrix();
    let plus = CMat2::proj_plus() * u;
    let minus = CMat2::proj_minus() * u;
    let mut out = vec![CMat2::IDENTITY];
    for _ in 0..k {
        let mut next = vec![CMat2::ZERO; out.len() + 1];
        for (j, c) in out.iter().enumerate() {
            next[j] = next[j] + minus * *c;
            next[j + 1] = next[j + 1] + plus * *c;
        }
        out = next;
    }
    out
}

/// Kraus operators of one step of the walk described by `spec`.
pub fn build_step_kraus(spec: &WalkSpec) -> Result<StepKraus> {
    spec.validate()?;
    let cj = path_coefficients(spec.k, &spec.unitary);
    let drop = Tolerances::DEFAULT.kraus_drop;
    let mut operators = Vec::new();
    for pair in eigendecompose_density(&spec.coin) {
        if pair.value < drop {
            continue;
        }
        let weight = pair.value.sqrt();
        for b in 0..2 {
            let coeffs: Vec<Complex64> = cj.iter().map(|c| c.apply(pair.vector)[b] * weight).collect();
            if coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-30 {
                operators.push(ShiftOperator { coeffs });
            }
        }
    }
    Ok(StepKraus { k: spec.k, operators })
}

/// Dense walker density matrix over a lattice window.
///
/// Entries outside the square `support` block are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerDensity {
    window: LatticeWindow,
    data: Vec<Complex64>,
    /// Inclusive index range holding every nonzero entry.
    support: (usize, usize),
}

impl WalkerDensity {
    pub fn from_initial(initial: &InitialWalker, window: LatticeWindow) -> Result<Self> {
        let n = window.size();
        let mut data = vec![ZERO; n * n];
        let (lo, hi) = initial.extent();
        for (m, mp, v) in initial.entries() {
            if !window.contains(m) || !window.contains(mp) {
                return Err(Error::InvalidSpec(format!("initial site outside window [{}, {}]", window.lo, window.hi)));
            }
            data[window.index(m) * n + window.index(mp)] = v;
        }
        Ok(WalkerDensity { window, data, support: (window.index(lo), window.index(hi)) })
    }

    pub fn window(&self) -> LatticeWindow {
        self.window
    }

    /// `⟨m|ρ|m'⟩`, zero outside the window.
    pub fn get(&self, m: i64, mp: i64) -> Complex64 {
        if !self.window.contains(m) || !self.window.contains(mp) {
            return ZERO;
        }
        self.data[self.window.index(m) * self.window.size() + self.window.index(mp)]
    }

    /// Sites `[lo, hi]` outside of which every entry is zero.
    pub fn support(&self) -> (i64, i64) {
        (self.window.site(self.support.0), self.window.site(self.support.1))
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.window.size();
        (self.support.0..=self.support.1).map(|i| self.data[i * n + i]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.window.size();
        let (lo, hi) = self.support;
        let mut worst = 0.0f64;
        for r in lo..=hi {
            for c in r..=hi {
                worst = worst.max((self.data[r * n + c] - self.data[c * n + r].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the supported block. Dense Hermitian
    /// eigensolve, meant for checks rather than hot paths.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.window.size();
        let (lo, hi) = self.support;
        let size = hi - lo + 1;
        let block = DMatrix::from_fn(size, size, |r, c| {
            let a = self.data[(lo + r) * n + lo + c];
            let b = self.data[(lo + c) * n + lo + r].conj();
            (a + b) * 0.5
        });
        nalgebra::SymmetricEigen::new(block).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Probability distribution over a contiguous range of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionPdf {
    lo: i64,
    probs: Vec<f64>,
}

impl PositionPdf {
    pub fn new(lo: i64, probs: Vec<f64>) -> Self {
        PositionPdf { lo, probs }
    }

    pub fn from_map(map: &BTreeMap<i64, f64>) -> Self {
        let (Some(&lo), Some(&hi)) = (map.keys().next(), map.keys().next_back()) else {
            return PositionPdf { lo: 0, probs: Vec::new() };
        };
        let mut probs = vec![0.0; (hi - lo + 1) as usize];
        for (&s, &p) in map {
            probs[(s - lo) as usize] = p;
        }
        PositionPdf { lo, probs }
    }

    pub fn get(&self, site: i64) -> f64 {
        let i = site - self.lo;
        if i < 0 {
            return 0.0;
        }
        self.probs.get(i as usize).copied().unwrap_or(0.0)
    }

    /// `(site, probability)` over the stored range, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.lo + i as i64, p))
    }

    /// Sites with strictly positive probability.
    pub fn to_map(&self) -> BTreeMap<i64, f64> {
        self.iter().filter(|&(_, p)| p > 0.0).collect()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        pdf_moment(self, 1)
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.iter().map(|(m, p)| (m as f64 - mu).powi(2) * p).sum()
    }
}

/// `Σ m^s P(m)`.
pub fn pdf_moment(pdf: &PositionPdf, s: u32) -> f64 {
    pdf.iter().map(|(m, p)| (m as f64).powi(s as i32) * p).sum()
}

/// Diagonal of the walker state as a position distribution.
pub fn position_pdf(rho: &WalkerDensity) -> Result<PositionPdf> {
    let clip = Tolerances::DEFAULT.pdf_clip;
    let n = rho.window.size();
    let probs = (0..n)
        .map(|i| {
            let p = rho.data[i * n + i].re;
            if p >= 0.0 {
                Ok(p)
            } else if p >= -clip {
                Ok(0.0)
            } else {
                Err(Error::NegativeProbability { site: rho.window.site(i), value: p })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PositionPdf { lo: rho.window.lo, probs })
}

fn apply_kernel(rho: &WalkerDensity, kernel: &PairKernel, out: &mut WalkerDensity) -> Result<()> {
    let window = rho.window;
    let n = window.size();
    let (lo, hi) = rho.support;
    let (smin, smax) = kernel.shift_range();
    let new_lo = lo as i64 + smin;
    let new_hi = hi as i64 + smax;
    if new_lo < 0 {
        return Err(Error::WindowOverflow { shift: smin, lo: window.lo, hi: window.hi });
    }
    if new_hi >= n as i64 {
        return Err(Error::WindowOverflow { shift: smax, lo: window.lo, hi: window.hi });
    }
    let (new_lo, new_hi) = (new_lo as usize, new_hi as usize);

    // Clear whatever the scratch buffer held before writing the new block.
    let (clear_lo, clear_hi) = (out.support.0.min(new_lo), out.support.1.max(new_hi));
    for r in clear_lo..=clear_hi {
        out.data[r * n + clear_lo..=r * n + clear_hi].fill(ZERO);
    }
    out.window = window;
    out.support = (new_lo, new_hi);

    let width = hi - lo + 1;
    for &(row_shift, col_shift, weight) in &kernel.terms {
        for src_r in lo..=hi {
            let dst_r = (src_r as i64 + row_shift) as usize;
            let dst_c = (lo as i64 + col_shift) as usize;
            let src = &rho.data[src_r * n + lo..src_r * n + lo + width];
            let dst = &mut out.data[dst_r * n + dst_c..dst_r * n + dst_c + width];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += weight * s;
            }
        }
    }
    Ok(())
}

/// One application of `ρ ↦ Σ K ρ K†`.
pub fn step(rho: &WalkerDensity, ks: &StepKraus) -> Result<WalkerDensity> {
    let mut out = WalkerDensity {
        window: rho.window,
        data: vec![ZERO; rho.data.len()],
        support: rho.support,
    };
    apply_kernel(rho, &ks.pair_kernel(), &mut out)?;
    Ok(out)
}

/// Final state and the position distribution after every step
/// (`trajectory[t]` is the distribution after `t` steps, `t = 0..=steps`).
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: WalkerDensity,
    pub trajectory: Vec<PositionPdf>,
}

pub fn evolve(spec: &WalkSpec) -> Result<Evolution> {
    evolve_with_cap(spec, Tolerances::DEFAULT.window_cap)
}

pub fn evolve_with_cap(spec: &WalkSpec, window_cap: usize) -> Result<Evolution> {
    let window = spec.window()?;
    if window.size() > window_cap {
        return Err(Error::WindowTooLarge { size: window.size(), cap: window_cap });
    }
    let ks = build_step_kraus(spec)?;
    let kernel = ks.pair_kernel();
    let mut state = WalkerDensity::from_initial(&spec.initial, window)?;
    let mut scratch = WalkerDensity {
        window,
        data: vec![ZERO; state.data.len()],
        support: state.support,
    };
    let mut trajectory = Vec::with_capacity(spec.steps + 1);
    trajectory.push(position_pdf(&state)?);
    for _ in 0..spec.steps {
        apply_kernel(&state, &kernel, &mut scratch)?;
        std::mem::swap(&mut state, &mut scratch);
        trajectory.push(position_pdf(&state)?);
    }
    Ok(Evolution { state, trajectory })
}
