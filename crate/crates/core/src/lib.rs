//! Multi-level Steiner trees: heuristics, approximation ratios, exact
//! oracles, ILP model emission and random instance generation.
//!
//! Everything numeric is generic over [`Scalar`]; the aliases below fix
//! the two weight types used in practice, `f64` for experiments and
//! `Rational64` where exact arithmetic matters.

pub mod error;
pub mod format;
pub mod graph;
pub mod heuristics;
pub mod ilp;
pub mod lp;
pub mod netgen;
pub mod oracle;
pub mod ratio;
pub mod scalar;
pub mod steiner;

pub use error::{MlstError, Result};
pub use format::{parse_instance, write_instance};
pub use graph::{solution_cost, EdgeId, EdgeSet, MlstInstance, MlstSolution, VertexId, WeightedGraph};
pub use heuristics::{
    bottom_up, composite_full, composite_on_q, guaranteed_composite, top_down, HeuristicRun, LevelSubset,
};
pub use ratio::{compute_ratio, RatioMethod};
pub use scalar::Scalar;
pub use steiner::SteinerMode;

/// Exact rational weight.
pub type Exact = num_rational::Rational64;

pub type Graph = WeightedGraph<f64>;
pub type Instance = MlstInstance<f64>;
pub type Run = HeuristicRun<f64>;

pub type ExactGraph = WeightedGraph<Exact>;
pub type ExactInstance = MlstInstance<Exact>;
pub type ExactRun = HeuristicRun<Exact>;
