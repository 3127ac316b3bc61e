use thiserror::Error;

/// Errors raised by lattice, period-domain, orbit and disk operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("field mismatch: Q(sqrt {left}) and Q(sqrt {right})")]
    FieldMismatch { left: u64, right: u64 },

    #[error("field tag {0} is not a squarefree positive integer")]
    NotSquarefree(u64),

    #[error("rational coordinate has zero denominator")]
    ZeroDenominator,

    #[error("gram matrix must be square of rank >= 2 (got {0})")]
    InvalidRank(usize),

    #[error("gram matrix is not symmetric")]
    NotSymmetric,

    #[error("gram matrix is degenerate (null space of dimension {0})")]
    Degenerate(usize),

    #[error("vector is isotropic; q(v, v) = 0")]
    Isotropic,

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("vector is not rational")]
    NotRational,

    #[error("vector is not integral")]
    NotIntegral,

    #[error("spanning vectors are linearly dependent")]
    DependentSpan,

    #[error("plane is not positive definite")]
    NotPositive,

    #[error("period point violates the quadric conditions")]
    NotPeriod,

    #[error("signature ({pos}, {neg}) outside the classification hypotheses (3, b) with b >= 2")]
    SignatureHypothesis { pos: usize, neg: usize },

    #[error("involution axis must have positive norm")]
    NonPositiveAxis,

    #[error("matrix is not an isometry of the lattice")]
    NotIsometry,

    #[error("matrix determinant is {0}, expected +1")]
    WrongDeterminant(i64),

    #[error("no generators found within the given bounds")]
    EmptyGeneratorSet,

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("planes belong to different lattices")]
    LatticeMismatch,

    #[error("subspace has signature ({pos}, {neg}, {nul}); expected (1, 2, 0)")]
    SubspaceSignature { pos: usize, neg: usize, nul: usize },

    #[error("frame of the subspace cannot be normalized to diag(1, -1, -1) over a single quadratic field")]
    FrameNotNormalizable,

    #[error("vector does not lie in the subspace")]
    NotInSubspace,

    #[error("vector lies outside the open positive cone")]
    OutsideCone,

    #[error("wall class must have negative norm")]
    NonNegativeWall,

    #[error("vector is not isotropic")]
    NotIsotropic,

    #[error("point lies on or outside the boundary circle")]
    OnBoundary,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
