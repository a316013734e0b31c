//! Flow subformulas as LTL over the product of net and trackers.

use std::fmt;

use super::formula::Ltl;
use super::ProductState;
use crate::net::{Net, Node};
use crate::transit::{TrackerState, TransitNet};

/// Atomic proposition of the product. Indices `k` name trackers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProductAtom {
    Place(usize),
    Fired(usize),
    Idle(usize),
    /// Tracker `k` observes place `p` (whether or not its chain ended).
    At(usize, usize),
    /// Tracker `k` advances along transition `t` in this step.
    Moves(usize, usize),
    Moving(usize),
}

impl ProductAtom {
    pub fn holds(self, tn: &TransitNet, state: &ProductState, fired: Option<usize>) -> bool {
        let moving = |k: usize| fired.is_some_and(|t| state.trackers[k].moves_with(tn, t));
        match self {
            ProductAtom::Place(p) => state.marking.contains(p),
            ProductAtom::Fired(t) => fired == Some(t),
            ProductAtom::Idle(k) => state.trackers[k] == TrackerState::Idle,
            ProductAtom::At(k, p) => state.trackers[k].place() == Some(p),
            ProductAtom::Moves(k, t) => fired == Some(t) && moving(k),
            ProductAtom::Moving(k) => moving(k),
        }
    }

    pub fn display(self, net: &Net) -> ProductAtomDisplay<'_> {
        ProductAtomDisplay { atom: self, net }
    }
}

pub struct ProductAtomDisplay<'a> {
    atom: ProductAtom,
    net: &'a Net,
}

impl fmt::Display for ProductAtomDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let place = |p: usize| &self.net.place(p).id;
        let tr = |t: usize| &self.net.transition(t).id;
        match self.atom {
            ProductAtom::Place(p) => f.write_str(place(p)),
            ProductAtom::Fired(t) => f.write_str(tr(t)),
            ProductAtom::Idle(k) => write!(f, "idle{}", k + 1),
            ProductAtom::At(k, p) => write!(f, "at{}_{}", k + 1, place(p)),
            ProductAtom::Moves(k, t) => write!(f, "moves{}_{}", k + 1, tr(t)),
            ProductAtom::Moving(k) => write!(f, "moving{}", k + 1),
        }
    }
}

/// Translation of a flow body for tracker `k`, read from the first position
/// where the tracker is active. Each step of the chain spans a block of run
/// positions ending where the tracker moves.
pub fn relativize_body(k: usize, body: &Ltl<Node>) -> Ltl<ProductAtom> {
    use Ltl::*;
    let moving = || Ltl::Atom(ProductAtom::Moving(k));
    let t = |x: &Ltl<Node>| relativize_body(k, x);
    match body {
        True => True,
        False => False,
        Atom(Node::Place(p)) => Ltl::Atom(ProductAtom::At(k, *p)),
        Atom(Node::Transition(tr)) => {
            Ltl::until(Ltl::not(moving()), Ltl::Atom(ProductAtom::Moves(k, *tr)))
        }
        Not(x) => Ltl::not(t(x)),
        And(a, b) => Ltl::and(t(a), t(b)),
        Or(a, b) => Ltl::or(t(a), t(b)),
        Implies(a, b) => Ltl::implies(t(a), t(b)),
        Next(x) => {
            let tx = t(x);
            Ltl::or(
                Ltl::until(Ltl::not(moving()), Ltl::and(moving(), Ltl::next(tx.clone()))),
                Ltl::and(Ltl::globally(Ltl::not(moving())), tx),
            )
        }
        Finally(x) => Ltl::finally(t(x)),
        Globally(x) => Ltl::globally(t(x)),
        Until(a, b) => Ltl::until(t(a), t(b)),
        Release(a, b) => Ltl::release(t(a), t(b)),
    }
}

/// `G idle || (idle U (!idle && T(body)))`: either tracker `k` never picks a
/// chain, or the chain it picks satisfies `body`.
pub fn relativize(k: usize, body: &Ltl<Node>) -> Ltl<ProductAtom> {
    let idle = || Ltl::Atom(ProductAtom::Idle(k));
    Ltl::or(
        Ltl::globally(idle()),
        Ltl::until(idle(), Ltl::and(Ltl::not(idle()), relativize_body(k, body))),
    )
}
