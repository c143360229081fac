//! Exact Ising criticality on doubly periodic planar weighted graphs.
//!
//! The critical inverse temperature of the Ising model on a non-degenerate
//! toric weighted graph is the unique `beta` at which the null-homologous
//! even subgraphs carry exactly half of the high-temperature weight,
//! equivalently the unique zero of the Kac-Ward determinant `P^{1,1}(G,
//! x_beta)` with `x_e = tanh(beta * J_e)`. This crate builds the toric
//! geometry, evaluates the determinants, verifies the supporting identities
//! (the even-subgraph oracle, the dimer correspondence, Kramers-Wannier
//! duality, the cover product formula) at desk scale, and computes the free
//! energy per fundamental domain by toroidal quadrature.

pub mod builtins;
pub mod critical;
pub mod error;
pub mod fan_wu;
pub mod free_energy;
pub mod homology;
pub mod kac_ward;
pub mod toric_graph;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
