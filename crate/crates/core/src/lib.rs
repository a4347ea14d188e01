//! Stabilizer-free virtual element method for the Poisson problem on triangular meshes.

pub mod assembly;
pub mod classic;
pub mod dofs;
pub mod error;
pub mod experiment;
pub mod hct;
pub mod linalg;
pub mod mesh;
pub mod poly;
pub mod problem;
pub mod quadrature;
pub mod sfvem;
pub mod verify;

pub use error::{Error, Result};
