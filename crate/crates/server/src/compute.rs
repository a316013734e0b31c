//! Result documents shared by the server and the command line.

use serde_json::Value;
use workbench_core::flowltl::{check, parse_formula, validate, CheckError, CheckOptions, RunFormula};
use workbench_core::game::{solve, GameError, GameOptions, PetriGame};
use workbench_core::transit::TransitNet;
use workbench_core::Control;

/// How a computation ended without a result.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComputeError {
    #[error("canceled")]
    Canceled,
    #[error("{0}")]
    Failed(String),
}

/// Serialized form of a result document: pretty JSON with a trailing newline.
pub fn result_document(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Parses a formula and checks it against the net's names and the supported shape.
pub fn prepare_formula(tn: &TransitNet, formula: &str) -> Result<RunFormula, String> {
    let phi = parse_formula(formula).map_err(|e| e.to_string())?;
    validate(tn.net(), &phi).map_err(|e| e.to_string())?;
    Ok(phi)
}

pub fn check_document(
    tn: &TransitNet,
    phi: &RunFormula,
    state_cap: usize,
    control: &Control,
) -> Result<(Value, bool), ComputeError> {
    match check(tn, phi, &CheckOptions { state_cap }, control) {
        Ok(r) => {
            let satisfied = r.verdict == workbench_core::flowltl::Verdict::Satisfied;
            Ok((r.to_json(tn), satisfied))
        }
        Err(CheckError::Canceled) => Err(ComputeError::Canceled),
        Err(e) => Err(ComputeError::Failed(e.to_string())),
    }
}

/// Solves a game. Returns the document, whether it is realizable and, if
/// so, the strategy net as `.apn` text.
pub fn synthesis_document(
    pg: &PetriGame,
    state_cap: usize,
    control: &Control,
) -> Result<(Value, Option<String>), ComputeError> {
    let options = GameOptions {
        state_cap,
        ..GameOptions::default()
    };
    match solve(pg, &options, control) {
        Ok(r) => {
            let strategy = r.strategy_net.as_ref().map(|sn| {
                workbench_core::net::render(&sn.net, &vec![Vec::new(); sn.net.transition_count()])
            });
            Ok((r.to_json(pg), strategy))
        }
        Err(GameError::Canceled) => Err(ComputeError::Canceled),
        Err(e) => Err(ComputeError::Failed(e.to_string())),
    }
}
