//! Classical maps and quantum Floquet operators of the kicked top and rotor.

pub mod classical;
pub mod floquet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use classical::{
    classical_rotor_step, classical_rotor_step_inverse, classical_top_step, generate_portrait, ClassicalMap, ClassicalOrbit,
    RotorMap, RotorPoint, TopMap, TopPoint,
};
pub use floquet::{qkr_floquet, qkt_floquet, torus_coherent_state, FloquetOperator, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Top,
    Rotor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickParameters {
    pub system: SystemKind,
    pub k: f64,
    pub delta: f64,
}

impl KickParameters {
    pub fn new(system: SystemKind, k: f64, delta: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid(format!("kick strength must be positive, got {k}")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(invalid(format!("delta must be non-negative, got {delta}")));
        }
        Ok(Self { system, k, delta })
    }
}
