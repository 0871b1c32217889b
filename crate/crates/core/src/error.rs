use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("vector {0:?} is not in the lattice")]
    NotInLattice(Vec<i64>),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid semilattice: {0}")]
    InvalidSemilattice(String),
    #[error("semilattices live in different ambient lattices")]
    AmbientMismatch,
    #[error("invalid finite type {family}{rank}")]
    InvalidFiniteType { family: char, rank: usize },
    #[error("zero vector where a root is required")]
    ZeroRoot,
    #[error("invalid extended affine root system data: {0}")]
    InvalidSpec(String),
    #[error("compatibility S+L=S / kS+L=L fails: {0}")]
    Compatibility(String),
    #[error("not a root: {0}")]
    NotARoot(String),
    #[error("root is isotropic where a non-isotropic root is required")]
    IsotropicRoot,
    #[error("target not reachable inside the window: {0}")]
    Unreachable(String),
    #[error("condition (*) fails for indices {0:?}")]
    StarViolation(Vec<usize>),
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("character check failed: {0}")]
    CharacterCheck(String),
    #[error("root outside the table window: {0}")]
    OutsideTable(String),
    #[error("set is not a basis of the root lattice: {0}")]
    NotABasis(String),
    #[error("set is not reflectable on the window: {0}")]
    NotReflectable(String),
    #[error("extension disagrees with the character: {0}")]
    Agreement(String),
    #[error("invalid Lie torus parameters: {0}")]
    TorusParams(String),
    #[error("automorphism is not a Cartan automorphism: {0}")]
    NotCartan(String),
    #[error("automorphism is not diagonal: {0}")]
    NotDiagonal(String),
    #[error("eta values disagree for an isotropic root: {0}")]
    EtaDisagreement(String),
    #[error("integer overflow in exact arithmetic")]
    Overflow,
}
