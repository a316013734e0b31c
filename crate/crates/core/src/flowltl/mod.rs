//! Flow-LTL: formulas, the direct semantics, and the automata-based checker.

mod assumptions;
mod buchi;
mod check;
mod eval;
mod formula;
mod parser;
mod relativize;
mod replay;

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::net::{Marking, Net, NetError, Node};
use crate::transit::{TrackerState, TransitNet};

pub use assumptions::{add_assumptions, enabledness, maximality, weak_fairness};
pub use buchi::{ltl_to_buchi, Buchi, BuchiEdge, BuchiError};
pub use check::{
    check, check_text, product_successors, validate, CheckOptions, DEFAULT_STATE_CAP,
};
pub use eval::{eval_chain, eval_flow_formula, eval_lasso, tracked_chain, ChainLetter, LassoRun};
pub use formula::{FlowSubformula, Ltl, RunAtom, RunFormula};
pub use parser::{parse_formula, FormulaError};
pub use relativize::{relativize, relativize_body, ProductAtom};
pub use replay::{replay, ReplayError, ReplayStep};

/// Net marking together with one tracker per flow subformula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductState {
    pub marking: Marking,
    pub trackers: Vec<TrackerState>,
}

impl ProductState {
    pub fn initial(net: &Net, trackers: usize) -> Self {
        Self {
            marking: net.initial_marking(),
            trackers: vec![TrackerState::Idle; trackers],
        }
    }
}

/// Leaf of a resolved run formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlowLeaf {
    Node(Node),
    /// Index into [`ResolvedFormula::flows`].
    Flow(usize),
}

/// A run formula with names resolved against a net. Identical flow
/// subformulas share one entry in `flows`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedFormula {
    pub run: Ltl<FlowLeaf>,
    pub flows: Vec<Ltl<Node>>,
}

pub fn resolve(net: &Net, f: &RunFormula) -> Result<ResolvedFormula, CheckError> {
    let lookup = |n: &String| net.lookup(n).ok_or_else(|| CheckError::UnknownAtom(n.clone()));
    let mut flows: Vec<Ltl<Node>> = Vec::new();
    let mut seen: BTreeMap<Ltl<Node>, usize> = BTreeMap::new();
    let run = f.try_substitute(&mut |a| match a {
        RunAtom::Name(n) => Ok::<_, CheckError>(Ltl::Atom(FlowLeaf::Node(lookup(n)?))),
        RunAtom::Flow(fl) => {
            let body = fl.body.try_substitute(&mut |n| Ok::<_, CheckError>(Ltl::Atom(lookup(n)?)))?;
            let k = *seen.entry(body.clone()).or_insert_with(|| {
                flows.push(body);
                flows.len() - 1
            });
            Ok(Ltl::Atom(FlowLeaf::Flow(k)))
        }
    })?;
    Ok(ResolvedFormula { run, flows })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("unknown place or transition {0}")]
    UnknownAtom(String),
    #[error("unsupported formula shape: {0}")]
    UnsupportedShape(String),
    #[error("state space limit of {limit} states reached")]
    StateSpaceLimit { limit: usize, explored: usize },
    #[error("canceled")]
    Canceled,
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Automaton(#[from] BuchiError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Satisfied,
    Unsatisfied,
}

/// One step of a counterexample: fire `fire` (or stutter at a deadlock when
/// `None`) and arrive in `state`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub fire: Option<usize>,
    pub state: ProductState,
}

/// An ultimately periodic product run. The last step of `cycle` returns to
/// the state reached after `prefix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub initial: ProductState,
    pub prefix: Vec<Step>,
    pub cycle: Vec<Step>,
}

impl Lasso {
    /// Positions and fired transitions for the direct evaluator.
    pub fn positions(&self) -> (Vec<ProductState>, Vec<Option<usize>>, usize) {
        let mut states = vec![self.initial.clone()];
        states.extend(self.prefix.iter().map(|s| s.state.clone()));
        states.extend(
            self.cycle[..self.cycle.len().saturating_sub(1)]
                .iter()
                .map(|s| s.state.clone()),
        );
        let fired = self
            .prefix
            .iter()
            .chain(&self.cycle)
            .map(|s| s.fire)
            .collect();
        (states, fired, self.prefix.len())
    }

    /// The fired transitions of the prefix followed by `loops` copies of the
    /// cycle, without stutter steps.
    pub fn unrolled_firings(&self, loops: usize) -> Vec<usize> {
        let cyc = self.cycle.iter().filter_map(|s| s.fire);
        self.prefix
            .iter()
            .filter_map(|s| s.fire)
            .chain(std::iter::repeat_n(cyc, loops).flatten())
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckStats {
    pub product_states: usize,
    pub search_states: usize,
    pub automaton_states: usize,
    pub acceptance_sets: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub verdict: Verdict,
    pub counterexample: Option<Lasso>,
    pub constructed_formula: String,
    pub stats: CheckStats,
}

#[derive(Serialize)]
struct StateJson<'a> {
    marking: Vec<String>,
    trackers: Vec<crate::transit::TrackerDisplay<'a>>,
}

#[derive(Serialize)]
struct StepJson<'a> {
    fire: Option<&'a str>,
    marking: Vec<String>,
    trackers: Vec<crate::transit::TrackerDisplay<'a>>,
}

#[derive(Serialize)]
struct LassoJson<'a> {
    initial: StateJson<'a>,
    prefix: Vec<StepJson<'a>>,
    #[serde(rename = "loop")]
    cycle: Vec<StepJson<'a>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ResultJson<'a> {
    verdict: Verdict,
    counterexample: Option<LassoJson<'a>>,
    constructed_formula: &'a str,
    stats: &'a CheckStats,
}

impl CheckResult {
    /// The result document shared by the command line and the server.
    pub fn to_json(&self, tn: &TransitNet) -> serde_json::Value {
        let net = tn.net();
        let state = |s: &ProductState| StateJson {
            marking: net.marking_names(&s.marking),
            trackers: s.trackers.iter().map(|t| t.display(tn)).collect(),
        };
        let step = |s: &Step| StepJson {
            fire: s.fire.map(|t| net.transition(t).id.as_str()),
            marking: net.marking_names(&s.state.marking),
            trackers: s.state.trackers.iter().map(|t| t.display(tn)).collect(),
        };
        let doc = ResultJson {
            verdict: self.verdict,
            counterexample: self.counterexample.as_ref().map(|l| LassoJson {
                initial: state(&l.initial),
                prefix: l.prefix.iter().map(step).collect(),
                cycle: l.cycle.iter().map(step).collect(),
            }),
            constructed_formula: &self.constructed_formula,
            stats: &self.stats,
        };
        serde_json::to_value(doc).expect("result document serializes")
    }
}
