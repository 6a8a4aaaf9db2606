use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes surfaced by this crate.
///
/// `InvalidInput`, `Csv`, `Dataset`, and `Io` indicate bad caller-supplied
/// data; the remaining variants indicate numerical failure of an otherwise
/// well-formed computation. Binaries map the two groups to distinct exit
/// codes via [`Error::is_validation`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("evanescent cavity mode: sin({theta_deg} deg) >= n_eff = {n_eff}")]
    Evanescent { theta_deg: f64, n_eff: f64 },

    #[error("polariton branches degenerate (splitting {splitting_ev:.3e} eV); branch labeling is undefined at zero coupling")]
    DegenerateBranches { splitting_ev: f64 },

    #[error("asymptotic gap undefined: rabi = {rabi_ev} eV >= e_x = {e_x_ev} eV")]
    GapUndefined { rabi_ev: f64, e_x_ev: f64 },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("singular transfer matrix at E = {energy_ev} eV, theta = {theta_deg} deg")]
    SingularTransfer { energy_ev: f64, theta_deg: f64 },

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("csv error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("fit failure: {0}")]
    Fit(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error reflects invalid caller input rather than a
    /// numerical failure of a valid computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Csv { .. } | Error::Dataset(_) | Error::Io(_)
        )
    }
}
