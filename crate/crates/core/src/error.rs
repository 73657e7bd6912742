use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    #[error("group `{0}` has no matrix representation")]
    NotMatrixGroup(String),

    #[error("generator {0} has a singular matrix")]
    SingularGenerator(usize),

    #[error("operands belong to different groups (`{0}` vs `{1}`)")]
    SpecMismatch(String, String),

    /// Support growth of an algebra product passed the configured term budget.
    #[error("term budget exceeded: {terms} terms > budget {budget}")]
    BudgetExceeded { terms: usize, budget: usize },

    #[error("need {needed} coefficients, got {got}")]
    InsufficientCoefficients { needed: usize, got: usize },

    #[error("quadrature did not converge (last two refinements differ by {0:e})")]
    QuadratureNonConvergence(f64),

    #[error("root finder did not converge")]
    RootFinding,

    #[error("polynomial vanishes on every sampled torus node")]
    AllNodesSingular,

    #[error("relator {index} of `{name}` is not the identity (distance {distance:e})")]
    RelatorCheck { name: String, index: usize, distance: f64 },

    #[error("malformed representation file: {0}")]
    RepFormat(String),

    #[error("cannot parse polynomial: {0}")]
    PolyParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the representation validity gate.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::RelatorCheck { .. } | Error::RepFormat(_) | Error::SingularGenerator(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
