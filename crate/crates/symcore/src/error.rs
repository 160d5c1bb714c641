use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Error)]
pub enum SymError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown symbol `{name}` at column {column}")]
    UnknownSymbol { name: String, column: usize },
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("two distinct radicands in one expression: sqrt({0}) and sqrt({1})")]
    TwoRadicands(String, String),
    #[error("nested radical: {0}")]
    NestedRadical(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("expression is not defined: {0}")]
    Undefined(String),
    #[error("jet order too high in total derivative: {0}")]
    JetOrder(String),
    #[error("not integrable with respect to {var}: {reason}")]
    NotIntegrable { var: String, reason: String },
    #[error("one-form is not closed: d/d{a} of component {b} differs from d/d{b} of component {a}")]
    NotClosed { a: String, b: String },
    #[error("nonvanishing of `{0}` does not follow from the declared assumptions")]
    Uncertified(String),
}
