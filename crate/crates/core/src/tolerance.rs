//! Numerical tolerances shared by every contract check in the crate.

/// Tolerance record. Every invariant check reads its threshold from here so
/// a caller can tighten or loosen them uniformly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `U†U = I`, entrywise max norm.
    pub unitary: f64,
    /// Hermiticity, unit trace and eigenvalue floor of coin states.
    pub coin_density: f64,
    /// `Σ G†G = I` for coin channels and walk Kraus sets.
    pub completeness: f64,
    /// Normalization of initial walker amplitudes.
    pub normalization: f64,
    /// Negative diagonal entries above `-pdf_clip` are clipped to zero.
    pub pdf_clip: f64,
    /// Coin eigenvalues below this are dropped from the walk Kraus set.
    pub kraus_drop: f64,
    /// Largest tolerated imaginary part of sampled `h(φ)`.
    pub h_imag: f64,
    /// `Σ A_m` below this means `h` is constant.
    pub constant_h: f64,
    /// Bisection target width in φ when locating extrema and inverses.
    pub bisection: f64,
    /// Amplitude below which the phase Λ is undefined.
    pub phase_amplitude: f64,
    /// Largest window (in sites) `evolve` will allocate.
    pub window_cap: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        unitary: 1e-12,
        coin_density: 1e-12,
        completeness: 1e-10,
        normalization: 1e-12,
        pdf_clip: 1e-14,
        kraus_drop: 1e-15,
        h_imag: 1e-10,
        constant_h: 1e-10,
        bisection: 1e-12,
        phase_amplitude: 1e-12,
        window_cap: 20001,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
