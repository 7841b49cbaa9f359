//! Multiplicative degree-based topological indices on random networks.
//!
//! * [`graph`]: immutable simple graphs and the edge-list format.
//! * [`models`]: seeded ER, RG and bipartite generators.
//! * [`index`]: additive and log-space multiplicative indices.
//! * [`dense_limit`]: closed-form `<ln X_Π>/n` in the dense regime.
//! * [`ensemble`]: replica ensembles, parameter sweeps and scaling collapse.
//! * [`inequality`]: numeric checks of sum-versus-product inequalities.
//! * [`cli`]: the `mti` command-line front end.

pub mod cli;
pub mod dense_limit;
pub mod ensemble;
pub mod graph;
pub mod index;
pub mod inequality;
pub mod models;

pub use graph::{DegreeSummary, Graph, GraphError};
pub use index::{IndexKind, IsolatedPolicy, LogIndexValue};
pub use models::{ModelKind, ModelSpec, SeedTriple};
