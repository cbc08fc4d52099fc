pub mod angular;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod krylov;
pub mod model;
pub mod operator;
pub mod presets;
pub mod selection;
pub mod simulation;
pub mod spectra;
pub mod transition;

pub use error::{Error, Result};
