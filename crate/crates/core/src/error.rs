use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// Evaluation hit a pole of ρ(0) or of a mode moment.
    #[error("pole at E = {energy}: {what}")]
    Pole { energy: f64, what: &'static str },

    /// The finite-K bracket `a - A Σ 1/(E - m²π²/a²)` vanished.
    #[error("ρ(0) diverges at E = {energy}")]
    Divergence { energy: f64 },

    #[error("constraint power {0} is not supported (max 4)")]
    InvalidPower(u32),

    #[error("moment ⟨t_{mode} p^{power}⟩ missing from table (built up to |n| = {available})")]
    MissingMoment {
        mode: i64,
        power: u32,
        available: usize,
    },

    #[error("series did not converge: {0}")]
    NonConvergent(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("no allowed energy on the grid")]
    NoAllowedEnergy,
}

pub type Result<T> = std::result::Result<T, Error>;
