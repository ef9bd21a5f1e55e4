//! Fidelity decay of the quantum kicked top and kicked rotor.

pub mod error;
pub mod kicked;
pub mod spin;
pub mod state;

pub use error::{CoreError, Result};
pub use state::QuantumState;
pub mod fidelity;
pub mod fitting;
pub mod io;
pub mod spectral;
pub mod sweep;
