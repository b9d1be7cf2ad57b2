use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("leading minor D_{0} vanishes at working precision")]
    SingularMinor(usize),
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    #[error("series did not converge: {0}")]
    NonConvergence(String),
    #[error("pole of the Barnes G-function at {0}")]
    PoleError(String),
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("theta = {0} is a jump point of the symbol")]
    JumpPointError(f64),
    #[error("W is not symmetric with real coefficients")]
    SymmetryViolation,
    #[error("point lies outside the support of the equilibrium measure")]
    OutsideSupport,
    #[error("density is singular at the arc endpoint")]
    EndpointSingular,
    #[error("point does not lie in a gap component")]
    OutsideGap,
    #[error("point is too close to the jump contour: {0}")]
    OnContour(String),
    #[error("point lies outside the parametrix disk")]
    OutsideDisk,
    #[error("integration path crosses the branch cut")]
    PathCrossesCut,
    #[error("did not converge: {0}")]
    NotConverged(String),
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
}

pub type Result<T> = std::result::Result<T, Error>;
