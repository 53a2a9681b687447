//! Edge-disjoint matching pairs in trees: exact parameters, the four
//! building operations, constructive certificates and their verification.

pub mod cert;
pub mod decompose;
pub mod fixtures;
pub mod gen;
pub mod graph;
pub mod matching;
pub mod ops;
pub mod oracle;
pub mod sweep;
pub mod treedp;

pub use cert::{AGadget, BuildStep, CertParseError, Certificate, Extension};
pub use decompose::{decompose, verify, Decomposition, Witness};
pub use graph::{Edge, Graph, GraphError, Vertex};
pub use matching::{Matching, MatchingPair, ParamSet};
pub use ops::Mode;
pub use oracle::{Oracle, OracleError};
