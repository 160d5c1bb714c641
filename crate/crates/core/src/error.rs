use pencil_forge_symcore::SymError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("degenerate metric: determinant {det} {reason}")]
    DegenerateMetric { det: String, reason: String },
    #[error("degenerate pencil: det(g + {lambda}*g~) vanishes identically")]
    DegeneratePencil { lambda: String },
    #[error("operator is not in Liouville form: {0}")]
    NotLiouville(String),
    #[error("nonlocal term cannot be resolved: {0}")]
    NonlocalUnresolved(String),
    #[error("component {component} is not a total x-derivative: {reason}")]
    NotExact { component: usize, reason: String },
    #[error("jet variables are not allowed here: {0}")]
    JetNotAllowed(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("case `{name}`: {message}")]
    Case { name: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
