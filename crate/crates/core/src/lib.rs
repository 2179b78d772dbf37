//! One-shot quantum non-signalling assisted zero-error capacities of quantum
//! channels, computed by semidefinite programming and cross-checked against
//! closed forms for Pauli channels, nonunital qubit channels and
//! noncommutative graphs.

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod linalg;
pub mod ncgraph;
pub mod sdp;
pub mod suite;
