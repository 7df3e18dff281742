//! Moment bootstrap for the Dirac comb (Kronig-Penney) potential
//! `H = p² + A Σ_m δ(x − m a)` in units `ħ = 1`, `2m = 1`.
//!
//! Positivity of the matrices `⟨t_{-m} p^s t_n⟩`, `t_n = e^{2πinx/a}`, rules
//! energies in or out; the allowed set converges to the band structure as the
//! mode cutoff grows. The infinite square well is included as the
//! strong-barrier limit.

pub mod cli;
pub mod dispersion;
pub mod error;
pub mod exact;
pub mod isw;
pub mod lattice;
pub mod moments;
pub mod psd;
pub mod scan;

pub use error::{Error, Result};
pub use lattice::{BandInterval, LatticeParams};
pub use moments::{MomentTable, Regularization, Rho0Source};
pub use psd::{build_matrix, is_psd, ConstraintMatrix, PsdVerdict};
pub use scan::{BandSpectrum, MinEnergy, ScanConfig};
