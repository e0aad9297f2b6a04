//! Coin preparation by quantum-optical channels.
//!
//! The coin is a two-level atom. Before driving the walk it either crosses a
//! single-mode cavity holding `r` photons (Jaynes–Cummings coupling), or it
//! spontaneously decays `|+⟩ → |−⟩` with probability `γ`. Only the reduced
//! coin channel is modelled; the field mode is never simulated.
//!
//! Time enters only through the dimensionless product `τ = λt` of coupling
//! and crossing time. Prepared coins start from
//! `|c⟩ = cos χ|+⟩ + i sin χ|−⟩` and drive a `k = 2` walk with
//! `U = exp(iπ/4 σ₂)`, for which `h(φ) = A cos 2φ + B sin 2φ`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use crate::coin::{apply_coin_channel, pauli_rotation, CMat2, CoinDensity, CoinUnitary, KrausChannel, PauliAxis};
use crate::walk::WalkSpec;
use crate::{Error, Result, Tolerances};

/// Cavity photon number, dimensionless interaction time and preparation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcmParams {
    pub r: u32,
    pub tau: f64,
    pub chi: f64,
}

impl JcmParams {
    pub fn new(r: u32, tau: f64, chi: f64) -> Result<Self> {
        if !tau.is_finite() || tau < 0.0 || !chi.is_finite() {
            return Err(Error::Domain(format!("invalid cavity parameters tau = {tau}, chi = {chi}")));
        }
        Ok(JcmParams { r, tau, chi })
    }
}

/// Decay probability and preparation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayParams {
    pub gamma: f64,
    pub chi: f64,
}

impl DecayParams {
    pub fn new(gamma: f64, chi: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !chi.is_finite() {
            return Err(Error::Domain(format!("invalid preparation angle {chi}")));
        }
        Ok(DecayParams { gamma, chi })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    Ok(())
}

/// Rabi angles `(τ√(r+1), τ√r)`.
fn rabi_angles(r: u32, tau: f64) -> (f64, f64) {
    (tau * (r as f64 + 1.0).sqrt(), tau * (r as f64).sqrt())
}

/// Reduced coin channel of a cavity holding `r` photons:
/// `A₁ = diag(cos τ√(r+1), cos τ√r)`, `A₂` with `sin τ√(r+1)` in the lower
/// left, `A₃` with `sin τ√r` in the upper right.
pub fn jcm_kraus(r: u32, tau: f64) -> Result<KrausChannel> {
    let (a, b) = rabi_angles(r, tau);
    KrausChannel::with_tolerance(
        vec![
            CMat2::real(a.cos(), 0.0, 0.0, b.cos()),
            CMat2::real(0.0, 0.0, a.sin(), 0.0),
            CMat2::real(0.0, b.sin(), 0.0, 0.0),
        ],
        1e-12,
    )
}

fn pauli_state(s2: f64, s3: f64) -> Result<CoinDensity> {
    let m = (CMat2::IDENTITY + CMat2::sigma2() * s2 + CMat2::sigma3() * s3) * 0.5;
    CoinDensity::new(m)
}

/// `½I + ½ sin 2χ cos τ√(r+1) cos τ√r σ₂ + ½[cos 2τ√(r+1) cos²χ − cos 2τ√r sin²χ] σ₃`.
pub fn prepare_coin(chi: f64, r: u32, tau: f64) -> Result<CoinDensity> {
    let (a, b) = driven_ab(chi, r, tau);
    pauli_state(b, -a)
}

/// Coefficients of `h(φ; χ, τ) = A cos 2φ + B sin 2φ` for a cavity-prepared coin.
pub fn driven_ab(chi: f64, r: u32, tau: f64) -> (f64, f64) {
    let (a, b) = rabi_angles(r, tau);
    let (s, c) = chi.sin_cos();
    let big_a = -(2.0 * a).cos() * c * c + (2.0 * b).cos() * s * s;
    let big_b = (2.0 * chi).sin() * a.cos() * b.cos();
    (big_a, big_b)
}

/// `C = √(A² + B²)`.
pub fn amplitude_c(chi: f64, r: u32, tau: f64) -> f64 {
    let (a, b) = driven_ab(chi, r, tau);
    a.hypot(b)
}

/// `Λ = atan2(B, A) ∈ (−π, π]`, undefined when `C` vanishes.
pub fn phase_lambda(chi: f64, r: u32, tau: f64) -> Result<f64> {
    let (a, b) = driven_ab(chi, r, tau);
    phase_of(a, b)
}

fn phase_of(a: f64, b: f64) -> Result<f64> {
    let c = a.hypot(b);
    if c <= Tolerances::DEFAULT.phase_amplitude {
        return Err(Error::PhaseUndefined { c });
    }
    let lambda = b.atan2(a);
    // atan2 returns -π for (negative, -0.0); fold it onto π.
    Ok(if lambda <= -PI { PI } else { lambda })
}

/// First `count` interaction times at which a coin prepared at
/// `χ ∈ {0, π/2, π, 3π/2}` leaves the cavity maximally mixed.
pub fn resonance_times(chi: f64, r: u32, count: usize) -> Result<Vec<f64>> {
    let reduced = chi.rem_euclid(TAU);
    let family = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2, TAU]
        .iter()
        .position(|v| (reduced - v).abs() < 1e-9)
        .ok_or(Error::InvalidChi(chi))?;
    let root = match family {
        0 | 2 | 4 => (r as f64 + 1.0).sqrt(),
        _ if r == 0 => return Ok(Vec::new()),
        _ => (r as f64).sqrt(),
    };
    Ok((0..count).map(|j| (2 * j + 1) as f64 * PI / (4.0 * root)).collect())
}

/// Spontaneous emission: `T₀ = diag(√(1−γ), 1)`, `T₁|+⟩ = √γ|−⟩`.
pub fn spontaneous_kraus(gamma: f64) -> Result<KrausChannel> {
    check_gamma(gamma)?;
    KrausChannel::with_tolerance(
        vec![
            CMat2::real((1.0 - gamma).sqrt(), 0.0, 0.0, 1.0),
            CMat2::real(0.0, 0.0, gamma.sqrt(), 0.0),
        ],
        1e-12,
    )
}

/// `½I + ½√(1−γ) sin 2χ σ₂ + ½[(1−2γ)cos²χ − sin²χ] σ₃`.
pub fn decayed_coin(chi: f64, gamma: f64) -> Result<CoinDensity> {
    let (a, b) = decay_ab(chi, gamma)?;
    pauli_state(b, -a)
}

/// `(A, B)` of `h(φ; χ, γ) = A cos 2φ + B sin 2φ` for a decayed coin.
pub fn decay_ab(chi: f64, gamma: f64) -> Result<(f64, f64)> {
    check_gamma(gamma)?;
    let (s, c) = chi.sin_cos();
    Ok((-((1.0 - 2.0 * gamma) * c * c - s * s), (1.0 - gamma).sqrt() * (2.0 * chi).sin()))
}

/// `C(χ, γ) = √([(1−γ)cos 2χ − γ]² + (1−γ) sin² 2χ)`.
pub fn decay_amplitude_c(chi: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let first = (1.0 - gamma) * (2.0 * chi).cos() - gamma;
    Ok((first * first + (1.0 - gamma) * (2.0 * chi).sin().powi(2)).sqrt())
}

/// Limiting variance of `L/n` under decay: `½[1 − 4γ(1−γ)cos⁴χ]`.
pub fn decay_sigma2(chi: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(0.5 * (1.0 - 4.0 * gamma * (1.0 - gamma) * chi.cos().powi(4)))
}

/// The reshuffling unitary `exp(iπ/4 σ₂)` of the driven walks.
pub fn driven_unitary() -> CoinUnitary {
    pauli_rotation(PauliAxis::Y, FRAC_PI_4)
}

/// `k = 2` walk with the driven unitary and a prepared coin.
pub fn driven_spec(coin: CoinDensity) -> WalkSpec {
    WalkSpec::new(2, driven_unitary(), coin)
}

/// A way of preparing the coin from `|c⟩ = cos χ|+⟩ + i sin χ|−⟩`.
pub trait CoinPreparation {
    fn name(&self) -> &'static str;

    fn channel(&self) -> Result<KrausChannel>;

    /// Closed-form prepared state.
    fn prepare(&self, chi: f64) -> Result<CoinDensity>;

    /// `(A, B)` of the driven asymptotic function.
    fn driven_ab(&self, chi: f64) -> Result<(f64, f64)>;

    /// Prepared state obtained by running the channel on `|c⟩⟨c|`.
    fn prepare_via_channel(&self, chi: f64) -> Result<CoinDensity> {
        apply_coin_channel(&self.channel()?, &CoinDensity::chi_state(chi))
    }
}

/// Crossing a cavity in photon-number state `|r⟩` for time `τ/λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cavity {
    pub r: u32,
    pub tau: f64,
}

impl CoinPreparation for Cavity {
    fn name(&self) -> &'static str {
        "cavity"
    }

    fn channel(&self) -> Result<KrausChannel> {
        jcm_kraus(self.r, self.tau)
    }

    fn prepare(&self, chi: f64) -> Result<CoinDensity> {
        prepare_coin(chi, self.r, self.tau)
    }

    fn driven_ab(&self, chi: f64) -> Result<(f64, f64)> {
        Ok(driven_ab(chi, self.r, self.tau))
    }
}

/// Spontaneous decay with probability `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpontaneousEmission {
    pub gamma: f64,
}

impl CoinPreparation for SpontaneousEmission {
    fn name(&self) -> &'static str {
        "decay"
    }

    fn channel(&self) -> Result<KrausChannel> {
        spontaneous_kraus(self.gamma)
    }

    fn prepare(&self, chi: f64) -> Result<CoinDensity> {
        decayed_coin(chi, self.gamma)
    }

    fn driven_ab(&self, chi: f64) -> Result<(f64, f64)> {
        decay_ab(chi, self.gamma)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{asymptotic_h, asymptotic_moment, detect_constant_h, PhiGrid, WalkerPhaseMeasure};
    use proptest::prelude::*;

    #[test]
    fn empty_cavity_matches_decay_generators() {
        let ch = jcm_kraus(0, 0.3).unwrap();
        let g = ch.generators();
        assert_eq!(g[2], CMat2::ZERO);
        let s0 = CMat2::real(0.3f64.cos(), 0.0, 0.0, 1.0);
        let s1 = CMat2::real(0.0, 0.0, 0.3f64.sin(), 0.0);
        assert!(g[0].max_abs_diff(&s0) < 1e-16 && g[1].max_abs_diff(&s1) < 1e-16);

        let t = spontaneous_kraus(0.3f64.sin().powi(2)).unwrap();
        assert!(t.generators()[0].max_abs_diff(&s0) < 1e-15);
        assert!(t.generators()[1].max_abs_diff(&s1) < 1e-15);
    }

    #[test]
    fn zero_time_is_identity_channel() {
        let ch = jcm_kraus(4, 0.0).unwrap();
        assert_eq!(ch.generators(), &[CMat2::IDENTITY, CMat2::ZERO, CMat2::ZERO]);
        let rho = CoinDensity::chi_state(0.8);
        assert!(prepare_coin(0.8, 4, 0.0).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn jcm_completeness() {
        assert!(jcm_kraus(3, 0.7).unwrap().completeness_error() < 1e-12);
    }

    #[test]
    fn resonant_preparation_is_maximally_mixed() {
        for r in 0..4 {
            let tau = PI / (4.0 * (r as f64 + 1.0).sqrt());
            let rho = prepare_coin(0.0, r, tau).unwrap();
            assert!(rho.matrix().max_abs_diff(CoinDensity::maximally_mixed().matrix()) < 1e-12);
        }
    }

    #[test]
    fn ground_photon_plus_coin_stays_diagonal() {
        let tau = 0.45;
        let rho = prepare_coin(0.0, 0, tau).unwrap();
        let want = CMat2::real(0.5 * (1.0 + (2.0 * tau).cos()), 0.0, 0.0, 0.5 * (1.0 - (2.0 * tau).cos()));
        assert!(rho.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn driven_coefficients_at_zero_time() {
        for chi in [0.0, 0.3, 1.0] {
            let (a, b) = driven_ab(chi, 2, 0.0);
            assert!((a + (2.0 * chi).cos()).abs() < 1e-15);
            assert!((b - (2.0 * chi).sin()).abs() < 1e-15);
        }
        assert_eq!(driven_ab(0.0, 0, 0.0), (-1.0, 0.0));
        let (a, b) = driven_ab(FRAC_PI_4, 0, FRAC_PI_2);
        assert!((a.hypot(b) - amplitude_c(FRAC_PI_4, 0, FRAC_PI_2)).abs() < 1e-16);
    }

    #[test]
    fn amplitude_and_phase() {
        assert_eq!(amplitude_c(0.0, 0, 0.0), 1.0);
        assert_eq!(phase_lambda(0.0, 0, 0.0).unwrap(), PI);
        let r = 2;
        let tau = PI / (4.0 * 3f64.sqrt());
        assert!(amplitude_c(0.0, r, tau) < 1e-12);
        assert!(matches!(phase_lambda(0.0, r, tau), Err(Error::PhaseUndefined { .. })));
    }

    #[test]
    fn limiting_variance_is_half_amplitude_squared() {
        let grid = PhiGrid::default();
        let uniform = WalkerPhaseMeasure::uniform(&grid);
        for (chi, r, tau) in [(0.3, 0, 0.2), (1.1, 2, 0.9), (2.0, 5, 1.7)] {
            let spec = driven_spec(prepare_coin(chi, r, tau).unwrap());
            let (h, _) = asymptotic_h(&spec, &grid).unwrap();
            let c = amplitude_c(chi, r, tau);
            assert!((asymptotic_moment(&h, &uniform, 2).unwrap() - c * c / 2.0).abs() < 1e-12);
            assert!(asymptotic_moment(&h, &uniform, 1).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn resonance_time_families() {
        let t = resonance_times(0.0, 0, 2).unwrap();
        assert!((t[0] - PI / 4.0).abs() < 1e-16 && (t[1] - 3.0 * PI / 4.0).abs() < 1e-15);
        assert!((resonance_times(0.0, 3, 1).unwrap()[0] - PI / 8.0).abs() < 1e-16);
        assert!(resonance_times(FRAC_PI_2, 0, 3).unwrap().is_empty());
        assert!(resonance_times(3.0 * FRAC_PI_2, 0, 3).unwrap().is_empty());
        assert_eq!(resonance_times(0.4, 1, 2).unwrap_err(), Error::InvalidChi(0.4));
        let grid = PhiGrid::new(256).unwrap();
        for chi in [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2] {
            for r in 0..5 {
                for tau in resonance_times(chi, r, 4).unwrap() {
                    assert!(amplitude_c(chi, r, tau) < 1e-12, "chi {chi} r {r} tau {tau}");
                    let (_, poly) = asymptotic_h(&driven_spec(prepare_coin(chi, r, tau).unwrap()), &grid).unwrap();
                    assert!(detect_constant_h(&poly));
                }
            }
        }
    }

    #[test]
    fn decay_channel_edge_cases() {
        let id = spontaneous_kraus(0.0).unwrap();
        let rho = CoinDensity::chi_state(0.6);
        assert!(apply_coin_channel(&id, &rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-16);
        let full = spontaneous_kraus(1.0).unwrap();
        assert_eq!(apply_coin_channel(&full, &rho).unwrap().plus_population(), 0.0);
        assert!(matches!(spontaneous_kraus(1.5), Err(Error::GammaOutOfRange(_))));
        assert!(matches!(decay_sigma2(0.0, -0.1), Err(Error::GammaOutOfRange(_))));
    }

    #[test]
    fn decayed_coin_cases() {
        let rho = CoinDensity::chi_state(0.9);
        assert!(decayed_coin(0.9, 0.0).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        for chi in [0.0, 0.4, 2.2] {
            let out = decayed_coin(chi, 1.0).unwrap();
            assert!(out.matrix().max_abs_diff(CoinDensity::minus().matrix()) < 1e-15);
        }
        let half = decayed_coin(0.0, 0.5).unwrap();
        assert!(half.matrix().max_abs_diff(CoinDensity::maximally_mixed().matrix()) < 1e-15);
    }

    #[test]
    fn decay_spread_values() {
        assert_eq!(decay_sigma2(0.0, 0.0).unwrap(), 0.5);
        assert_eq!(decay_sigma2(0.0, 1.0).unwrap(), 0.5);
        assert_eq!(decay_sigma2(0.0, 0.5).unwrap(), 0.0);
        for chi in [0.0, 0.3, 0.7, 1.2] {
            let scan: Vec<f64> = (0..=100).map(|i| decay_sigma2(chi, i as f64 / 100.0).unwrap()).collect();
            let argmin = scan.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            assert_eq!(argmin, 50);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn closed_forms_match_channels(chi in -7.0..7.0f64, r in 0u32..12, tau in 0.0..10.0f64, gamma in 0.0..=1.0f64) {
            let cavity = Cavity { r, tau };
            let decay = SpontaneousEmission { gamma };
            for prep in [&cavity as &dyn CoinPreparation, &decay] {
                prop_assert!(prep.channel().unwrap().completeness_error() < 1e-12);
                let closed = prep.prepare(chi).unwrap();
                let via = prep.prepare_via_channel(chi).unwrap();
                prop_assert!(closed.matrix().max_abs_diff(via.matrix()) < 1e-12, "{}", prep.name());
            }
            let c = decay_amplitude_c(chi, gamma).unwrap();
            prop_assert!((decay_sigma2(chi, gamma).unwrap() - c * c / 2.0).abs() < 1e-12);
            let (a, b) = decay_ab(chi, gamma).unwrap();
            prop_assert!((a.hypot(b) - c).abs() < 1e-12);
        }

        #[test]
        fn driven_h_matches_closed_form(chi in 0.0..6.3f64, r in 0u32..8, tau in 0.0..6.0f64, gamma in 0.0..=1.0f64) {
            let grid = PhiGrid::new(128).unwrap();
            let cavity = Cavity { r, tau };
            let decay = SpontaneousEmission { gamma };
            for prep in [&cavity as &dyn CoinPreparation, &decay] {
                let (h, _) = asymptotic_h(&driven_spec(prep.prepare(chi).unwrap()), &grid).unwrap();
                let (a, b) = prep.driven_ab(chi).unwrap();
                for (phi, v) in grid.points().zip(&h.values) {
                    prop_assert!((v - (a * (2.0 * phi).cos() + b * (2.0 * phi).sin())).abs() < 1e-12);
                }
                let mean = asymptotic_moment(&h, &WalkerPhaseMeasure::uniform(&grid), 1).unwrap();
                prop_assert!(mean.abs() < 1e-12);
            }
        }
    }
}
