//! Bootstrap constraint matrices `M_{nm} = ⟨t_{-m} p^{σ+τ} t_n⟩` at fixed
//! `σ + τ ≤ 4`, and the positive-semidefiniteness test that rules energies
//! in or out.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::LatticeParams;
use crate::moments::{MomentTable, Regularization, Rho0Source};

/// Default PSD tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Highest supported momentum power.
pub const MAX_POWER: u32 = 4;

/// Symmetric `(K+1) × (K+1)` constraint matrix at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix {
    /// `σ + τ`.
    pub power: u32,
    pub entries: DMatrix<f64>,
    pub energy: f64,
    pub params: LatticeParams,
    pub cutoff: usize,
    pub reg: Regularization,
    pub rho0: f64,
}

impl ConstraintMatrix {
    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |M - Mᵀ| / max(1, max |M|)`.
    pub fn symmetry_residual(&self) -> f64 {
        let m = &self.entries;
        let scale = m.amax().max(1.0);
        (m - m.transpose()).amax() / scale
    }

    /// Largest deviation from Toeplitz structure, `max |M_{nm} - M_{n+1,m+1}|`.
    pub fn toeplitz_deviation(&self) -> f64 {
        let m = &self.entries;
        let k = m.nrows();
        let mut dev: f64 = 0.0;
        for i in 0..k.saturating_sub(1) {
            for j in 0..k - 1 {
                dev = dev.max((m[(i, j)] - m[(i + 1, j + 1)]).abs());
            }
        }
        dev
    }

    /// Leading principal submatrix of order `order`.
    pub fn leading(&self, order: usize) -> DMatrix<f64> {
        self.entries.view((0, 0), (order, order)).into_owned()
    }
}

/// Assembles `M_{nm}`, `n, m ∈ {0, …, K}`, from a moment table.
pub fn build_from_table(power: u32, table: &MomentTable) -> Result<ConstraintMatrix> {
    if power > MAX_POWER {
        return Err(Error::InvalidPower(power));
    }
    let k = table.cutoff;
    if table.max_mode() < k {
        return Err(Error::MissingMoment {
            mode: k as i64,
            power: 0,
            available: table.max_mode(),
        });
    }
    let params = table.params;
    let c = params.mode_unit();
    let c2 = c * c;
    let e = table.energy;
    let arho = params.strength * table.rho0();
    let reg_term = params.strength / params.period * table.divergent_sum();

    let mut entries = DMatrix::zeros(k + 1, k + 1);
    for i in 0..=k {
        let n = i as f64;
        for j in 0..=k {
            let m = j as f64;
            let t = table.t(i as i64 - j as i64)?;
            entries[(i, j)] = match power {
                0 => t,
                1 => c * (n + m) * t,
                2 => (4.0 * c2 * n * m + e) * t - arho,
                3 => {
                    c * (n + m)
                        * ((3.0 * e - 2.0 * (m * m - 4.0 * m * n + n * n) * c2) * t - 3.0 * arho)
                }
                _ => {
                    e * e * t + 8.0 * e * n * c2 * (n + 2.0 * m) * t
                        - 8.0
                            * n
                            * (m * m * m - 3.0 * m * m * n - m * n * n + n * n * n)
                            * c2
                            * c2
                            * t
                        - arho * (2.0 * e + 4.0 * (m + n) * (m + 2.0 * n) * c2 - reg_term)
                }
            };
        }
    }
    Ok(ConstraintMatrix {
        power,
        entries,
        energy: e,
        params,
        cutoff: k,
        reg: table.reg,
        rho0: table.rho0(),
    })
}

/// Builds the order-`K+1` constraint matrix of the given power at `energy`.
pub fn build_matrix(
    power: u32,
    cutoff: usize,
    energy: f64,
    params: &LatticeParams,
    reg: Regularization,
    source: Rho0Source,
) -> Result<ConstraintMatrix> {
    if power > MAX_POWER {
        return Err(Error::InvalidPower(power));
    }
    let table = MomentTable::new(energy, *params, cutoff, reg, source)?;
    build_from_table(power, &table)
}

/// Outcome of a PSD test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdVerdict {
    pub psd: bool,
    /// Smallest eigenvalue of the unit-diagonal rescaled matrix.
    pub min_eig: f64,
}

/// Tests a dense symmetric matrix for positive semidefiniteness.
///
/// The matrix is symmetrized and rescaled by the congruence `D M D`,
/// `D = diag(|M_ii|^{-1/2})`, which preserves inertia and brings the
/// diagonal to ±1 (zero diagonals are left at the largest scale). The
/// verdict is `λ_min(D M D) ≥ -tol`. Entry magnitudes in the power-4
/// matrices span ~K⁴, so an unscaled eigenvalue threshold would accept
/// almost anything at large K.
pub fn is_psd_dense(m: &DMatrix<f64>, tol: f64) -> Result<PsdVerdict> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Numeric(format!(
            "matrix is {}x{}, not square",
            n,
            m.ncols()
        )));
    }
    if n == 0 {
        return Ok(PsdVerdict {
            psd: true,
            min_eig: 0.0,
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let sym = (m + m.transpose()) * 0.5;
    let max_diag = sym.diagonal().amax();
    let floor = max_diag.max(f64::MIN_POSITIVE) * 1e-30;
    let scale: Vec<f64> = sym
        .diagonal()
        .iter()
        .map(|d| 1.0 / d.abs().max(floor).sqrt())
        .collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| sym[(i, j)] * scale[i] * scale[j]);
    let eig = scaled.symmetric_eigenvalues();
    let min_eig = eig.min();
    if !min_eig.is_finite() {
        return Err(Error::Numeric(
            "eigen-solver returned a non-finite eigenvalue".into(),
        ));
    }
    Ok(PsdVerdict {
        psd: min_eig >= -tol,
        min_eig,
    })
}

pub fn is_psd(matrix: &ConstraintMatrix, tol: f64) -> Result<PsdVerdict> {
    is_psd_dense(&matrix.entries, tol)
}
