//! Maximality and weak fairness as run formulas.

use super::formula::{Ltl, RunAtom, RunFormula};
use crate::net::Net;

fn name(id: &str) -> RunFormula {
    Ltl::Atom(RunAtom::Name(id.to_string()))
}

/// `t` is enabled: every place of its preset is marked.
pub fn enabledness(net: &Net, t: usize) -> RunFormula {
    Ltl::all(net.pre(t).iter().map(|&p| name(&net.place(p).id)))
}

/// `G (some transition enabled -> F some transition fires)`.
pub fn maximality(net: &Net) -> RunFormula {
    let ts = 0..net.transition_count();
    let enabled = Ltl::any(ts.clone().map(|t| enabledness(net, t)));
    let fires = Ltl::any(ts.map(|t| name(&net.transition(t).id)));
    Ltl::globally(Ltl::implies(enabled, Ltl::finally(fires)))
}

/// `F G enabled(t) -> G F t`.
pub fn weak_fairness(net: &Net, t: usize) -> RunFormula {
    Ltl::implies(
        Ltl::finally(Ltl::globally(enabledness(net, t))),
        Ltl::globally(Ltl::finally(name(&net.transition(t).id))),
    )
}

/// `(MAX && FAIR) -> phi`, or `MAX -> phi` without weakly fair transitions.
pub fn add_assumptions(net: &Net, phi: &RunFormula) -> RunFormula {
    let fair: Vec<usize> = (0..net.transition_count())
        .filter(|&t| net.transition(t).weakfair)
        .collect();
    let max = maximality(net);
    let lhs = if fair.is_empty() {
        max
    } else {
        Ltl::and(max, Ltl::all(fair.into_iter().map(|t| weak_fairness(net, t))))
    };
    Ltl::implies(lhs, phi.clone())
}
