//! Independent re-validation of counterexamples.

use serde::Serialize;
use thiserror::Error;

use super::check::product_successors;
use super::eval::{eval_flow_formula, LassoRun};
use super::formula::RunFormula;
use super::{add_assumptions, resolve, Lasso, ProductState};
use crate::transit::TransitNet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("initial state is not the initial product state")]
    BadInitial,
    #[error("step {0} is not a move of the product")]
    NotAMove(usize),
    #[error("loop is empty")]
    EmptyLoop,
    #[error("loop does not return to the state after the prefix")]
    LoopNotClosed,
    #[error("formula cannot be evaluated: {0}")]
    Formula(String),
    #[error("the run satisfies the formula under the assumptions")]
    NotACounterexample,
}

/// One replayed position: the global marking and each tracker's view.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReplayStep {
    pub position: usize,
    /// Transition fired to get here; `None` at the start and on stutter steps.
    pub fire: Option<String>,
    pub marking: Vec<String>,
    pub trackers: Vec<String>,
    pub in_loop: bool,
}

/// Replays `lasso` on the net and trackers and confirms with the direct
/// semantics that it violates `phi` while meeting the assumptions.
pub fn replay(
    tn: &TransitNet,
    phi: &RunFormula,
    lasso: &Lasso,
) -> Result<Vec<ReplayStep>, ReplayError> {
    let net = tn.net();
    let resolved = resolve(net, &add_assumptions(net, phi))
        .map_err(|e| ReplayError::Formula(e.to_string()))?;
    if lasso.initial != ProductState::initial(net, resolved.flows.len()) {
        return Err(ReplayError::BadInitial);
    }
    if lasso.cycle.is_empty() {
        return Err(ReplayError::EmptyLoop);
    }
    let mut cur = lasso.initial.clone();
    for (i, step) in lasso.prefix.iter().chain(&lasso.cycle).enumerate() {
        let ok = product_successors(tn, &cur)
            .map_err(|_| ReplayError::NotAMove(i))?
            .into_iter()
            .any(|(t, s)| t == step.fire && s == step.state);
        if !ok {
            return Err(ReplayError::NotAMove(i));
        }
        cur = step.state.clone();
    }
    let entry = lasso
        .prefix
        .last()
        .map_or(&lasso.initial, |s| &s.state);
    if cur != *entry {
        return Err(ReplayError::LoopNotClosed);
    }
    let (states, fired, loop_start) = lasso.positions();
    let run = LassoRun {
        states: &states,
        fired: &fired,
        loop_start,
    };
    if eval_flow_formula(tn, &resolved, &run) {
        return Err(ReplayError::NotACounterexample);
    }
    let annotate = |position: usize, fire: Option<usize>, s: &ProductState| ReplayStep {
        position,
        fire: fire.map(|t| net.transition(t).id.clone()),
        marking: net.marking_names(&s.marking),
        trackers: s.trackers.iter().map(|t| t.display(tn).to_string()).collect(),
        in_loop: position >= lasso.prefix.len(),
    };
    let mut out = vec![annotate(0, None, &lasso.initial)];
    for (i, step) in lasso.prefix.iter().chain(&lasso.cycle).enumerate() {
        out.push(annotate(i + 1, step.fire, &step.state));
    }
    Ok(out)
}
