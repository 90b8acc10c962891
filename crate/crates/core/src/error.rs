use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::engine::MAX_QUBITS)]
    QubitCount(usize),
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },
    #[error("gate matrix is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),
    #[error("graph is not bipartite: odd cycle through edge ({0}, {1})")]
    NotBipartite(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("spectral decomposition failed: {0}")]
    Spectrum(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("expectation value saturated at |{0}| >= 1 - 1e-6; point carries no phase information")]
    Saturated(f64),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("assignment matrix is singular (f_gg + f_ee = {0})")]
    SingularAssignment(f64),
    #[error("reference signal {0} below normalization guard")]
    ReferenceBelowGuard(f64),
    #[error("resonance divergence: |omega_{qubit} - omega_c| = {detuning:.3e}")]
    Resonance { qubit: usize, detuning: f64 },
    #[error("fit did not converge: {0}")]
    NonConvergence(String),
    #[error("no dominant spectral peak: {0}")]
    NoPeak(String),
    #[error("value {0} outside calibrated range [{1}, {2}]")]
    OutOfRange(f64, f64, f64),
    #[error("calibration curve is not monotone between knots {0} and {1}")]
    NonMonotone(usize, usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("sweep point {index} failed: {source}")]
    Point {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::InvalidGraph(_)
            | Error::NotBipartite(..)
            | Error::Disconnected
            | Error::QubitCount(_)
            | Error::QubitIndex { .. }
            | Error::Io(_) => 2,
            Error::Point { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}
