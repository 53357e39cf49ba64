//! Independent validators: a completion-rule classifier for normalized
//! binary EL+ and exhaustive search for small countermodels. Only the
//! syntax module is shared with the main pipeline.

mod completion;
pub mod gen;
mod models;
pub mod sat;

pub use completion::{completion_classify, SubsumptionSet};
pub use models::{bounded_model_search, CounterModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("CBox is not in normal form")]
    NotNormalized,
    #[error("unsupported construct: {0}")]
    Unsupported(String),
}
