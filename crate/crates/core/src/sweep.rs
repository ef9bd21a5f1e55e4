//! Classification of many coherent states under one echo experiment.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fidelity::{EchoEngine, InitialState, Location, SystemSpec};
use crate::fitting::{classify_decay, DecayFit, DecayLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub state: InitialState,
    pub location: Location,
    pub label: Option<DecayLabel>,
    pub stages: Vec<DecayFit>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Runs and classifies every state in parallel. Records keep input order and
/// a failing state is recorded with its error instead of aborting the sweep.
pub fn sweep(system: SystemSpec, delta: f64, horizon: usize, states: &[InitialState]) -> crate::Result<SweepResult> {
    if states.is_empty() {
        return Ok(SweepResult { records: Vec::new() });
    }
    let engine = EchoEngine::new(system, delta)?;
    let records = states
        .par_iter()
        .map(|s| {
            let outcome = engine.run(s, horizon).and_then(|series| classify_decay(&series.values));
            match outcome {
                Ok(c) => SweepRecord { state: *s, location: s.location(), label: Some(c.label), stages: c.stages, error: None },
                Err(e) => {
                    SweepRecord { state: *s, location: s.location(), label: None, stages: Vec::new(), error: Some(e.to_string()) }
                }
            }
        })
        .collect();
    Ok(SweepResult { records })
}
