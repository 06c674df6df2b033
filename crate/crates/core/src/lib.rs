//! Entanglement Hamiltonians and lattice Virasoro generators for critical
//! free-fermion chains.

pub mod analysis;
pub mod cft;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod quad;
pub mod quadratic;

pub use error::{Error, Result};
