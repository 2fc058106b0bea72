//! Statevector simulation of adiabatic preparation of symmetry-protected
//! topological phases in a spin-1/2 chain with next-nearest-neighbor hopping.
//!
//! Site 0 is the least significant bit of every basis index and a bit value `b`
//! has Pauli-Z eigenvalue `1 - 2b`.

pub mod circuits;
pub mod config;
pub mod error;
pub mod experiment;
pub mod model;
pub mod noise;
pub mod observables;
pub mod recompile;
pub mod statevector;

pub use error::{Result, SimError};
