//! Exact 2×2 complex algebra on the coin space.
//!
//! Basis convention: index 0 is `|+⟩`, index 1 is `|−⟩`. The projector `P₊`
//! selects index 0 and pairs with the right shift `E₊`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::{Error, Result, Tolerances};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major complex 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2(pub [[Complex64; 2]; 2]);

impl CMat2 {
    pub const ZERO: CMat2 = CMat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: CMat2 = CMat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        CMat2([[a, b], [c, d]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn sigma1() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma2() -> Self {
        Self::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma3() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    /// Projector onto `|+⟩` (index 0).
    pub fn proj_plus() -> Self {
        Self::diag(ONE, ZERO)
    }

    /// Projector onto `|−⟩` (index 1).
    pub fn proj_minus() -> Self {
        Self::diag(ZERO, ONE)
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: [Complex64; 2], v: [Complex64; 2]) -> Self {
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = u[r] * v[c].conj();
            }
        }
        CMat2(m)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[r][c]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `max |self - other|` entrywise.
    pub fn max_abs_diff(&self, other: &CMat2) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = CMat2::IDENTITY;
        let mut base = *self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Add for CMat2 {
    type Output = CMat2;
    fn add(self, o: CMat2) -> CMat2 {
        let (a, b) = (&self.0, &o.0);
        CMat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for CMat2 {
    type Output = CMat2;
    fn sub(self, o: CMat2) -> CMat2 {
        self + (-o)
    }
}

impl Neg for CMat2 {
    type Output = CMat2;
    fn neg(self) -> CMat2 {
        self.scale(-ONE)
    }
}

impl Mul for CMat2 {
    type Output = CMat2;
    fn mul(self, o: CMat2) -> CMat2 {
        let (a, b) = (&self.0, &o.0);
        CMat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<f64> for CMat2 {
    type Output = CMat2;
    fn mul(self, s: f64) -> CMat2 {
        self.scale(s.into())
    }
}

/// Pauli axis of a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X = 1,
    Y = 2,
    Z = 3,
}

impl PauliAxis {
    pub fn matrix(self) -> CMat2 {
        match self {
            PauliAxis::X => CMat2::sigma1(),
            PauliAxis::Y => CMat2::sigma2(),
            PauliAxis::Z => CMat2::sigma3(),
        }
    }
}

/// A unitary coin reshuffling operator `U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinUnitary(CMat2);

impl CoinUnitary {
    pub fn new(m: CMat2) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::DEFAULT.unitary)
    }

    pub fn with_tolerance(m: CMat2, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let deviation = (m.dagger() * m).max_abs_diff(&CMat2::IDENTITY);
        if deviation > tol {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(CoinUnitary(m))
    }

    pub fn identity() -> Self {
        CoinUnitary(CMat2::IDENTITY)
    }

    pub fn matrix(&self) -> &CMat2 {
        &self.0
    }
}

/// `exp(i·angle·σ_axis) = cos(angle)·I + i·sin(angle)·σ_axis`.
pub fn pauli_rotation(axis: PauliAxis, angle: f64) -> CoinUnitary {
    let (s, c) = angle.sin_cos();
    CoinUnitary(CMat2::IDENTITY * c + axis.matrix().scale(Complex64::new(0.0, s)))
}

/// The rotated Pauli matrix `σ = U†σ₃U`.
pub fn conjugate_sigma3(u: &CoinUnitary) -> CMat2 {
    let m = u.matrix();
    m.dagger() * CMat2::sigma3() * *m
}

/// A coin density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinDensity(CMat2);

impl CoinDensity {
    pub fn new(m: CMat2) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::DEFAULT.coin_density)
    }

    pub fn with_tolerance(m: CMat2, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let herm = m.hermiticity_error();
        if herm > tol {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let (lo, _) = hermitian_eigenvalues(&m);
        if lo < -tol {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lo:e}")));
        }
        Ok(CoinDensity(m))
    }

    /// `|ψ⟩⟨ψ|` for a normalized (or normalizable) ket.
    pub fn pure(psi: [Complex64; 2]) -> Result<Self> {
        let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidDensity("zero or non-finite ket".into()));
        }
        let v = [psi[0] / norm, psi[1] / norm];
        Self::new(CMat2::outer(v, v))
    }

    pub fn plus() -> Self {
        CoinDensity(CMat2::proj_plus())
    }

    pub fn minus() -> Self {
        CoinDensity(CMat2::proj_minus())
    }

    pub fn maximally_mixed() -> Self {
        CoinDensity(CMat2::IDENTITY * 0.5)
    }

    /// Classical coin `diag(p, 1-p)`.
    pub fn classical(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDensity(format!("probability {p} outside [0, 1]")));
        }
        Ok(CoinDensity(CMat2::real(p, 0.0, 0.0, 1.0 - p)))
    }

    /// `|c⟩⟨c|` with `|c⟩ = cos χ|+⟩ + i sin χ|−⟩`.
    pub fn chi_state(chi: f64) -> Self {
        CoinDensity(CMat2::outer(chi_ket(chi), chi_ket(chi)))
    }

    pub fn matrix(&self) -> &CMat2 {
        &self.0
    }

    /// Population of `|+⟩`.
    pub fn plus_population(&self) -> f64 {
        self.0.get(0, 0).re
    }
}

/// `cos χ|+⟩ + i sin χ|−⟩`.
pub fn chi_ket(chi: f64) -> [Complex64; 2] {
    let (s, c) = chi.sin_cos();
    [Complex64::new(c, 0.0), Complex64::new(0.0, s)]
}

/// Ordered list of 2×2 Kraus generators satisfying `Σ G†G = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    generators: Vec<CMat2>,
}

impl KrausChannel {
    pub fn new(generators: Vec<CMat2>) -> Result<Self> {
        Self::with_tolerance(generators, Tolerances::DEFAULT.completeness)
    }

    pub fn with_tolerance(generators: Vec<CMat2>, tol: f64) -> Result<Self> {
        if generators.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite);
        }
        let channel = KrausChannel { generators };
        let deviation = channel.completeness_error();
        if deviation > tol {
            return Err(Error::IncompleteChannel { deviation });
        }
        Ok(channel)
    }

    pub fn identity() -> Self {
        KrausChannel { generators: vec![CMat2::IDENTITY] }
    }

    pub fn generators(&self) -> &[CMat2] {
        &self.generators
    }

    /// `max |Σ G†G - I|`.
    pub fn completeness_error(&self) -> f64 {
        self.generators
            .iter()
            .fold(CMat2::ZERO, |acc, g| acc + g.dagger() * *g)
            .max_abs_diff(&CMat2::IDENTITY)
    }
}

/// `Σ G ρ G†`.
pub fn apply_coin_channel(ch: &KrausChannel, rho: &CoinDensity) -> Result<CoinDensity> {
    let deviation = ch.completeness_error();
    if deviation > Tolerances::DEFAULT.completeness {
        return Err(Error::IncompleteChannel { deviation });
    }
    let out = ch
        .generators()
        .iter()
        .fold(CMat2::ZERO, |acc, g| acc + *g * *rho.matrix() * g.dagger());
    // Symmetrize away rounding in the off-diagonal pair.
    let out = (out + out.dagger()) * 0.5;
    CoinDensity::new(out)
}

/// Eigenvalues `(low, high)` of a Hermitian 2×2 matrix.
fn hermitian_eigenvalues(m: &CMat2) -> (f64, f64) {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = m.get(0, 1);
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let disc = half.hypot(b.norm());
    (mean - disc, mean + disc)
}

/// An eigenpair of a coin density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: [Complex64; 2],
}

/// Closed-form spectral decomposition of a coin density.
///
/// When the matrix is diagonal in the distinguished basis (this includes the
/// degenerate `I/2` case) the pairs are `(ρ₊₊, |+⟩), (ρ₋₋, |−⟩)` in basis
/// order. Otherwise they come in descending eigenvalue order.
pub fn eigendecompose_density(rho: &CoinDensity) -> [EigenPair; 2] {
    let m = rho.matrix();
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = m.get(0, 1);
    if b.norm() <= 1e-15 * (a.abs() + d.abs()).max(f64::MIN_POSITIVE) {
        return [
            EigenPair { value: a, vector: [ONE, ZERO] },
            EigenPair { value: d, vector: [ZERO, ONE] },
        ];
    }
    let (lo, hi) = hermitian_eigenvalues(m);
    // (λ - d, b̄) and (b, λ - a) both solve (ρ - λ)v = 0; take the larger one.
    let v1 = [Complex64::from(hi - d), b.conj()];
    let v2 = [b, Complex64::from(hi - a)];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    let n = n.sqrt();
    let top = [v[0] / n, v[1] / n];
    let bottom = [-top[1].conj(), top[0].conj()];
    [
        EigenPair { value: hi, vector: top },
        EigenPair { value: lo, vector: bottom },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_unitary(theta: f64, polar: f64, azim: f64, phase: f64) -> CMat2 {
        let n = [polar.sin() * azim.cos(), polar.sin() * azim.sin(), polar.cos()];
        let gen = CMat2::sigma1() * n[0] + CMat2::sigma2() * n[1] + CMat2::sigma3() * n[2];
        (CMat2::IDENTITY * theta.cos() + gen.scale(c(0.0, theta.sin()))).scale(Complex64::from_polar(1.0, phase))
    }

    fn random_density(p: f64, polar: f64, azim: f64) -> CoinDensity {
        let ket = [c((polar / 2.0).cos(), 0.0), Complex64::from_polar((polar / 2.0).sin(), azim)];
        let proj = CMat2::outer(ket, ket);
        CoinDensity::new(proj * p + CMat2::outer([ket[1].conj() * -1.0, ket[0].conj()], [ket[1].conj() * -1.0, ket[0].conj()]) * (1.0 - p)).unwrap()
    }

    #[test]
    fn rotation_by_zero_is_identity() {
        assert_eq!(pauli_rotation(PauliAxis::Y, 0.0).matrix().max_abs_diff(&CMat2::IDENTITY), 0.0);
    }

    #[test]
    fn quarter_turn_about_y() {
        let u = pauli_rotation(PauliAxis::Y, FRAC_PI_4);
        let want = CMat2::real(1.0, 1.0, -1.0, 1.0) * FRAC_1_SQRT_2;
        assert!(u.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn z_rotation_is_diagonal_phase() {
        let phi = 0.37;
        let u = pauli_rotation(PauliAxis::Z, phi);
        let want = CMat2::diag(Complex64::from_polar(1.0, phi), Complex64::from_polar(1.0, -phi));
        assert!(u.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn conjugated_sigma3_cases() {
        assert_eq!(conjugate_sigma3(&CoinUnitary::identity()), CMat2::sigma3());
        let s = conjugate_sigma3(&pauli_rotation(PauliAxis::Y, FRAC_PI_4));
        assert!(s.max_abs_diff(&CMat2::sigma1()) < 1e-15);
        for theta in [0.1, 1.3, -2.0] {
            let s = conjugate_sigma3(&pauli_rotation(PauliAxis::Z, theta));
            assert!(s.max_abs_diff(&CMat2::sigma3()) < 1e-15);
        }
    }

    #[test]
    fn rejects_non_unitary() {
        let err = CoinUnitary::new(CMat2::real(1.0, 0.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NonUnitary { .. }));
        assert_eq!(CoinUnitary::new(CMat2::real(f64::NAN, 0.0, 0.0, 1.0)).unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn rejects_invalid_densities() {
        assert!(CoinDensity::new(CMat2::real(0.5, 0.0, 0.0, 0.6)).is_err());
        assert!(CoinDensity::new(CMat2::real(1.5, 0.0, 0.0, -0.5)).is_err());
        assert!(CoinDensity::new(CMat2::new(c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0))).is_err());
    }

    #[test]
    fn identity_channel_is_noop() {
        let rho = CoinDensity::chi_state(0.3);
        let out = apply_coin_channel(&KrausChannel::identity(), &rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-16);
    }

    #[test]
    fn incomplete_channel_rejected() {
        let err = KrausChannel::new(vec![CMat2::IDENTITY * 0.9]).unwrap_err();
        assert!(matches!(err, Error::IncompleteChannel { .. }));
    }

    #[test]
    fn total_decay_sends_plus_to_minus() {
        let t0 = CMat2::real(0.0, 0.0, 0.0, 1.0);
        let t1 = CMat2::real(0.0, 0.0, 1.0, 0.0);
        let ch = KrausChannel::new(vec![t0, t1]).unwrap();
        let out = apply_coin_channel(&ch, &CoinDensity::plus()).unwrap();
        assert!(out.matrix().max_abs_diff(CoinDensity::minus().matrix()) < 1e-16);
    }

    #[test]
    fn partial_decay_of_classical_coin() {
        let (gamma, p1) = (0.3_f64, 0.8_f64);
        let ch = KrausChannel::new(vec![
            CMat2::real((1.0 - gamma).sqrt(), 0.0, 0.0, 1.0),
            CMat2::real(0.0, 0.0, gamma.sqrt(), 0.0),
        ])
        .unwrap();
        let out = apply_coin_channel(&ch, &CoinDensity::classical(p1).unwrap()).unwrap();
        let p0 = 1.0 - p1;
        let want = CMat2::real((1.0 - gamma) * p1, 0.0, 0.0, p0 + gamma * p1);
        assert!(out.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn eigen_of_basis_states_and_mixture() {
        let [a, b] = eigendecompose_density(&CoinDensity::plus());
        assert_eq!((a.value, a.vector), (1.0, [ONE, ZERO]));
        assert_eq!((b.value, b.vector), (0.0, [ZERO, ONE]));
        let [a, b] = eigendecompose_density(&CoinDensity::maximally_mixed());
        assert_eq!((a.value, a.vector), (0.5, [ONE, ZERO]));
        assert_eq!((b.value, b.vector), (0.5, [ZERO, ONE]));
    }

    #[test]
    fn eigen_of_chi_projector() {
        for chi in [0.2, 0.7, 1.1, 2.5] {
            let [a, b] = eigendecompose_density(&CoinDensity::chi_state(chi));
            let ket = chi_ket(chi);
            let overlap = a.vector[0].conj() * ket[0] + a.vector[1].conj() * ket[1];
            assert!((a.value - 1.0).abs() < 1e-15);
            assert!(b.value.abs() < 1e-15);
            assert!((overlap.norm() - 1.0).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn rotations_compose(axis in 1u8..=3, a in -10.0..10.0f64, b in -10.0..10.0f64) {
            let axis = match axis { 1 => PauliAxis::X, 2 => PauliAxis::Y, _ => PauliAxis::Z };
            let lhs = *pauli_rotation(axis, a).matrix() * *pauli_rotation(axis, b).matrix();
            prop_assert!(lhs.max_abs_diff(pauli_rotation(axis, a + b).matrix()) < 1e-12);
        }

        #[test]
        fn rotated_sigma3_is_reflection(t in -4.0..4.0f64, p in 0.0..3.2f64, az in 0.0..6.3f64, ph in 0.0..6.3f64) {
            let u = CoinUnitary::new(random_unitary(t, p, az, ph)).unwrap();
            let s = conjugate_sigma3(&u);
            prop_assert!(s.hermiticity_error() < 1e-12);
            prop_assert!(s.trace().norm() < 1e-12);
            prop_assert!((s * s).max_abs_diff(&CMat2::IDENTITY) < 1e-12);
        }

        #[test]
        fn eigendecomposition_reconstructs(p in 0.0..1.0f64, polar in 0.0..3.2f64, azim in 0.0..6.3f64) {
            let rho = random_density(p, polar, azim);
            let pairs = eigendecompose_density(&rho);
            let recon = pairs.iter().fold(CMat2::ZERO, |acc, e| acc + CMat2::outer(e.vector, e.vector) * e.value);
            prop_assert!(recon.max_abs_diff(rho.matrix()) < 1e-12);
            prop_assert!((pairs[0].value + pairs[1].value - 1.0).abs() < 1e-12);
            let ip = pairs[0].vector[0].conj() * pairs[1].vector[0] + pairs[0].vector[1].conj() * pairs[1].vector[1];
            prop_assert!(ip.norm() < 1e-12);
            for e in pairs {
                prop_assert!(e.value >= -1e-12 && e.value <= 1.0 + 1e-12);
            }
        }
    }
}
