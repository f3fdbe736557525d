//! Eccentricities, radius, diameter and center of Helly graphs.
//!
//! [`graph`] holds the graph type and distance primitives, [`oracles`] the
//! brute-force ground truth, [`algorithms`] the fast routines and
//! [`generators`] seeded test instances.

pub mod algorithms;
pub mod generators;
pub mod graph;
pub mod oracles;

pub use algorithms::{all_ecc_hyperbolic, all_ecc_sqrt, AlgoError, Options};
pub use graph::{load_graph, Dist, DistanceVector, Graph, GraphError, Vertex, VertexSet};
pub use oracles::{all_ecc_bruteforce, Delta, EccentricityTable};
