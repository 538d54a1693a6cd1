use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::{resolve, serialize, AdaptiveCircuit, FixedSequence};

use super::ProverError;

/// SHA-256 of the canonical circuit text, lower-case hex.
pub fn circuit_id(c: &AdaptiveCircuit) -> String {
    Sha256::digest(serialize(c).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Record of the computational run: which gadget branch was taken and what it output.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub circuit_id: String,
    pub seed: u64,
    pub gadget_outcomes: Vec<bool>,
    pub final_output: bool,
    /// `resolve(circuit, gadget_outcomes)`.
    pub resolved: FixedSequence,
}

/// Wire form of a [`Transcript`]; bits are written as 0/1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub circuit_id: String,
    pub seed: u64,
    pub gadget_outcomes: Vec<u8>,
    pub final_output: u8,
}

impl Transcript {
    pub fn new(
        circuit: &AdaptiveCircuit,
        seed: u64,
        gadget_outcomes: Vec<bool>,
        final_output: bool,
    ) -> Result<Self, ProverError> {
        let resolved = resolve(circuit, &gadget_outcomes)?;
        Ok(Transcript {
            circuit_id: circuit_id(circuit),
            seed,
            gadget_outcomes,
            final_output,
            resolved,
        })
    }

    pub fn record(&self) -> TranscriptRecord {
        TranscriptRecord {
            circuit_id: self.circuit_id.clone(),
            seed: self.seed,
            gadget_outcomes: self.gadget_outcomes.iter().map(|&b| u8::from(b)).collect(),
            final_output: u8::from(self.final_output),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.record()).expect("transcript record serializes")
    }

    /// Rebuild a transcript from its JSON record and the circuit it was recorded on.
    pub fn from_json(json: &str, circuit: &AdaptiveCircuit) -> Result<Self, ProverError> {
        let rec: TranscriptRecord =
            serde_json::from_str(json).map_err(|e| ProverError::Transcript(e.to_string()))?;
        let id = circuit_id(circuit);
        if rec.circuit_id != id {
            return Err(ProverError::Transcript(format!(
                "transcript is for circuit {}, not {id}",
                rec.circuit_id
            )));
        }
        let bit = |v: u8| match v {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(ProverError::Transcript(format!("{other} is not a bit"))),
        };
        let outcomes = rec
            .gadget_outcomes
            .iter()
            .map(|&v| bit(v))
            .collect::<Result<Vec<_>, _>>()?;
        Transcript::new(circuit, rec.seed, outcomes, bit(rec.final_output)?)
    }
}
