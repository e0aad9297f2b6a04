//! Coined quantum random walks on the integers.
//!
//! A walker on `Z` is driven by a two-level coin. Each time step feeds a
//! fresh coin in state `ρ_c` through `k` applications of the coined shift
//! `V = (P₊⊗E₊ + P₋⊗E₋)(U⊗1)` and then traces the coin out, giving a
//! completely positive trace-preserving map on walker states.
//!
//! The crate is split by concern:
//!
//! - [`coin`]: exact 2×2 complex algebra, coin unitaries, coin density
//!   matrices and Kraus channels on the coin.
//! - [`walk`]: finite-step evolution of the walker density matrix on a
//!   truncated lattice window.
//! - [`spectral`]: the characteristic function, the asymptotic
//!   characteristic function `h(φ)` and the limiting law of `L/n`.
//! - [`cavity`]: coin preparation by a Jaynes–Cummings cavity and by
//!   spontaneous emission.
//! - [`verification`]: independent oracles and statistical checks, plus a
//!   registry of named verification checks.

pub mod cavity;
pub mod coin;
mod error;
pub mod spectral;
pub mod tolerance;
pub mod verification;
pub mod walk;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
