use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |A - A^H| = {violation:e})")]
    NonHermitian { violation: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("trace is {trace}, expected 1")]
    BadTrace { trace: f64 },
    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("operation needs a computational-basis state; map Dicke-basis states through symspace")]
    DickeBasisUnsupported,
    #[error("invalid subsystem subset {subset:?} for {factors} tensor factors")]
    BadSubset { subset: Vec<usize>, factors: usize },
    #[error("state is not bipartite (dims {0:?})")]
    NotBipartite(Vec<usize>),
    #[error("local dimensions differ ({0} vs {1})")]
    UnequalDims(usize, usize),
    #[error("invalid split ({a}, {b}) for {qubits} qubits")]
    BadSplit { qubits: usize, a: usize, b: usize },
    #[error("cannot keep {keep} of {qubits} qubits")]
    BadKeepCount { qubits: usize, keep: usize },
    #[error("criterion requires a permutationally invariant or symmetric state")]
    NotInvariant,
    #[error("dimension {0} must be even and at least 4")]
    OddDimension(usize),
    #[error("mixing parameter {0} outside [0, 1]")]
    BadLambda(f64),
    #[error("PPT margin is not monotone nonincreasing on the sampled range (at lambda = {at})")]
    NotMonotone { at: f64 },
    #[error("PPT margin does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
