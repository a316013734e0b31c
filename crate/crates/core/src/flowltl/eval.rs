//! Direct LTL and Flow-LTL semantics on ultimately periodic words.
//!
//! Nothing here goes through automata; it is the reference the checker's
//! counterexamples are replayed against.

use super::formula::Ltl;
use super::{FlowLeaf, ProductState, ResolvedFormula};
use crate::net::Node;
use crate::transit::{TrackerState, TransitNet};

fn values<A>(
    f: &Ltl<A>,
    len: usize,
    loop_start: usize,
    atom: &impl Fn(&A, usize) -> bool,
) -> Vec<bool> {
    use Ltl::*;
    let succ = |i: usize| if i + 1 < len { i + 1 } else { loop_start };
    let fix = |a: &[bool], b: &[bool], least: bool| {
        let mut v = vec![!least; len];
        loop {
            let mut changed = false;
            for i in (0..len).rev() {
                let nv = if least {
                    b[i] || (a[i] && v[succ(i)])
                } else {
                    b[i] && (a[i] || v[succ(i)])
                };
                if nv != v[i] {
                    v[i] = nv;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    };
    match f {
        True => vec![true; len],
        False => vec![false; len],
        Atom(a) => (0..len).map(|i| atom(a, i)).collect(),
        Not(x) => values(x, len, loop_start, atom).into_iter().map(|v| !v).collect(),
        And(a, b) | Or(a, b) | Implies(a, b) => {
            let va = values(a, len, loop_start, atom);
            let vb = values(b, len, loop_start, atom);
            va.iter()
                .zip(&vb)
                .map(|(&x, &y)| match f {
                    And(..) => x && y,
                    Or(..) => x || y,
                    _ => !x || y,
                })
                .collect()
        }
        Next(x) => {
            let v = values(x, len, loop_start, atom);
            (0..len).map(|i| v[succ(i)]).collect()
        }
        Finally(x) => fix(&vec![true; len], &values(x, len, loop_start, atom), true),
        Globally(x) => fix(&vec![false; len], &values(x, len, loop_start, atom), false),
        Until(a, b) => fix(
            &values(a, len, loop_start, atom),
            &values(b, len, loop_start, atom),
            true,
        ),
        Release(a, b) => fix(
            &values(a, len, loop_start, atom),
            &values(b, len, loop_start, atom),
            false,
        ),
    }
}

/// Truth of `f` at position 0 of the lasso word with positions `0..len`,
/// where position `len - 1` is followed by `loop_start`.
pub fn eval_lasso<A>(
    f: &Ltl<A>,
    len: usize,
    loop_start: usize,
    atom: &impl Fn(&A, usize) -> bool,
) -> bool {
    assert!(loop_start < len, "lasso loop must be non-empty");
    values(f, len, loop_start, atom)[0]
}

/// A run of the product as a lasso: `fired[i]` leads from `states[i]` to
/// `states[i + 1]`, or back to `states[loop_start]` for the last position.
/// `None` is a stutter step.
#[derive(Debug, Clone, Copy)]
pub struct LassoRun<'a> {
    pub states: &'a [ProductState],
    pub fired: &'a [Option<usize>],
    pub loop_start: usize,
}

impl LassoRun<'_> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn succ(&self, i: usize) -> usize {
        if i + 1 < self.states.len() {
            i + 1
        } else {
            self.loop_start
        }
    }
}

/// One observation of a flow chain: the place it sits on and the transition
/// it leaves by (`None` once it stops moving for good).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainLetter {
    pub place: usize,
    pub moved_by: Option<usize>,
}

/// The chain followed by tracker `k` along `run`, as a lasso word.
/// `None` if the tracker never leaves `Idle`.
pub fn tracked_chain(
    tn: &TransitNet,
    run: &LassoRun<'_>,
    k: usize,
) -> Option<(Vec<ChainLetter>, usize)> {
    let n = run.len();
    let tracker = |i: usize| run.states[i].trackers[k];
    let first = (0..n).find(|&i| tracker(i) != TrackerState::Idle)?;
    let moves_at = |i: usize| match (tracker(i), run.fired[i]) {
        (s, Some(t)) if s.moves_with(tn, t) => Some(t),
        _ => None,
    };

    let mut letters = Vec::new();
    let mut starts: Vec<usize> = Vec::new();
    let mut block = first;
    loop {
        if let Some(j) = starts.iter().position(|&b| b == block) {
            return Some((letters, j));
        }
        starts.push(block);
        let place = tracker(block).place().expect("non-idle tracker observes a place");
        let mut seen = vec![false; n];
        let mut i = block;
        let exit = loop {
            if let Some(t) = moves_at(i) {
                break Some((t, run.succ(i)));
            }
            seen[i] = true;
            i = run.succ(i);
            if seen[i] {
                break None;
            }
        };
        match exit {
            Some((t, next)) => {
                letters.push(ChainLetter {
                    place,
                    moved_by: Some(t),
                });
                block = next;
            }
            None => {
                letters.push(ChainLetter {
                    place,
                    moved_by: None,
                });
                let j = letters.len() - 1;
                return Some((letters, j));
            }
        }
    }
}

/// Evaluates a flow body on a chain word.
pub fn eval_chain(body: &Ltl<Node>, chain: &[ChainLetter], loop_start: usize) -> bool {
    eval_lasso(body, chain.len(), loop_start, &|a, i| match *a {
        Node::Place(p) => chain[i].place == p,
        Node::Transition(t) => chain[i].moved_by == Some(t),
    })
}

/// Flow-LTL on a product lasso. Each flow subformula `i` is judged on the
/// chain picked by tracker `i`; a tracker that never picks a chain makes it
/// vacuously true. Under positive occurrences this witnesses the universal
/// chain quantifier from below: a false result refutes the formula on the run.
pub fn eval_flow_formula(tn: &TransitNet, f: &ResolvedFormula, run: &LassoRun<'_>) -> bool {
    let flow_values: Vec<bool> = f
        .flows
        .iter()
        .enumerate()
        .map(|(k, body)| match tracked_chain(tn, run, k) {
            None => true,
            Some((chain, l)) => eval_chain(body, &chain, l),
        })
        .collect();
    eval_lasso(&f.run, run.len(), run.loop_start, &|a, i| match *a {
        FlowLeaf::Node(Node::Place(p)) => run.states[i].marking.contains(p),
        FlowLeaf::Node(Node::Transition(t)) => run.fired[i] == Some(t),
        FlowLeaf::Flow(k) => flow_values[k],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(bits: &[u8]) -> impl Fn(&char, usize) -> bool + '_ {
        move |a, i| {
            let mask = match a {
                'p' => 1,
                'q' => 2,
                _ => 4,
            };
            bits[i] & mask != 0
        }
    }

    fn p() -> Ltl<char> {
        Ltl::Atom('p')
    }

    fn q() -> Ltl<char> {
        Ltl::Atom('q')
    }

    #[test]
    fn basics() {
        // p, q, (p)^w
        let w = [1u8, 2, 1];
        assert!(eval_lasso(&p(), 3, 2, &word(&w)));
        assert!(eval_lasso(&Ltl::next(q()), 3, 2, &word(&w)));
        assert!(eval_lasso(&Ltl::globally(Ltl::finally(p())), 3, 2, &word(&w)));
        assert!(!eval_lasso(&Ltl::globally(Ltl::finally(q())), 3, 2, &word(&w)));
        assert!(eval_lasso(&Ltl::finally(Ltl::globally(p())), 3, 2, &word(&w)));
        assert!(eval_lasso(&Ltl::until(p(), q()), 3, 2, &word(&w)));
        assert!(!eval_lasso(&Ltl::until(q(), p()), 3, 1, &word(&[2, 2, 2])));
        assert!(eval_lasso(&Ltl::release(p(), q()), 3, 0, &word(&[2, 2, 2])));
    }
}
