//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Two partitions were compared in dominance order but carry different
    /// weights; dominance is only defined on equal-weight partitions, so this
    /// signals a caller bug.
    #[error("dominance comparison requires equal weights (got {left} vs {right})")]
    WeightMismatch { left: u64, right: u64 },

    /// A sequence of parts did not form a valid partition.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// Parameters outside the supported domain (odd gamma, zero particles, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A configured size limit (admissible-set members, brute-force degree,
    /// exact-sum particle count) was exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// A recursion denominator e_top - e_rho vanished.  This never happens for
    /// the Jack parameters used here; it indicates a convention bug, so the
    /// expansion aborts with full diagnostics instead of poisoning the table.
    #[error("degenerate eigenvalue: e({kappa}) = e({rho}) at alpha = {alpha}")]
    DegenerateEigenvalue {
        kappa: String,
        rho: String,
        alpha: String,
    },

    /// A final expansion coefficient failed to reduce to an integer.
    #[error("non-integral coefficient at partition {partition}")]
    NonIntegralCoefficient { partition: String },

    /// An infinite series failed to reach the requested tolerance.
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    /// The Ornstein-Zernike denominator 1 - N c_l / (2l+1) vanished.
    #[error("Ornstein-Zernike pole at N={n_particles}, gamma={gamma}, l={degree}")]
    OzPole {
        n_particles: u32,
        gamma: u32,
        degree: u32,
    },

    /// A linear system that should be regular turned out singular.
    #[error("singular linear system in fit")]
    SingularSystem,

    /// Malformed cache file: bad header, bad version, bad checksum, or a line
    /// that does not parse.
    #[error("cache format error: {0}")]
    Format(String),

    /// Underlying I/O failure.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
