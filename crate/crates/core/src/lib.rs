//! Checks for preprocessing-based query tractability: factorizations of
//! decision problems into data and query parts, preprocessing witnesses,
//! reductions between factored problems and the BDS separation argument.

pub mod bound;
pub mod encoding;
pub mod error;
pub mod factorization;
pub mod harness;
pub mod language;
pub mod preprocessing;
pub mod problems;
pub mod reductions;
pub mod report;
pub mod separation;

pub use bound::PolylogBound;
pub use encoding::{DataQueryPair, Instance};
pub use error::{Error, Result};
pub use factorization::{CrFactorization, FactoredLanguage};
pub use language::{DecisionProblem, InstanceMap, LanguageOfPairs, RestoreMap};
pub use preprocessing::PreprocessingWitness;
pub use report::{Report, Verdict};
