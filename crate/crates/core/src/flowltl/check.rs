//! Model checking of Flow-LTL on transit nets.
//!
//! Each flow subformula gets a tracker that nondeterministically follows
//! one flow chain. The checker explores the product of the net, the
//! trackers and an automaton for the negated property, and looks for a
//! reachable strongly connected component that is accepting and respects
//! weak fairness.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use super::buchi::{ltl_to_buchi, Buchi};
use super::formula::{Ltl, RunFormula};
use super::relativize::{relativize, ProductAtom};
use super::{
    add_assumptions, maximality, parse_formula, resolve, CheckError, CheckResult, CheckStats,
    FlowLeaf, Lasso, ProductState, Step, Verdict,
};
use crate::control::Control;
use crate::net::{Node, NetError};
use crate::transit::{tracker_step, TransitNet};

pub const DEFAULT_STATE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Upper bound on explored product-times-automaton states.
    pub state_cap: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

/// Successors of a product state in a fixed order: transitions in
/// declaration order, then tracker choices in the order of
/// [`tracker_step`]. A deadlocked state stutters.
pub fn product_successors(
    tn: &TransitNet,
    s: &ProductState,
) -> Result<Vec<(Option<usize>, ProductState)>, NetError> {
    let net = tn.net();
    let enabled = net.enabled(&s.marking);
    if enabled.is_empty() {
        return Ok(vec![(None, s.clone())]);
    }
    let mut out = Vec::new();
    for t in enabled {
        let marking = net.fire(&s.marking, t)?;
        let mut combos: Vec<Vec<crate::transit::TrackerState>> = vec![Vec::new()];
        for &tr in &s.trackers {
            let options = tracker_step(tn, tr, t);
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    options.iter().map(move |&o| {
                        let mut c = c.clone();
                        c.push(o);
                        c
                    })
                })
                .collect();
        }
        for trackers in combos {
            out.push((
                Some(t),
                ProductState {
                    marking: marking.clone(),
                    trackers,
                },
            ));
        }
    }
    Ok(out)
}

fn leaf_atom(l: &FlowLeaf) -> ProductAtom {
    match *l {
        FlowLeaf::Node(Node::Place(p)) => ProductAtom::Place(p),
        FlowLeaf::Node(Node::Transition(t)) => ProductAtom::Fired(t),
        FlowLeaf::Flow(_) => unreachable!("flow leaves are substituted"),
    }
}

/// Flow atoms may only occur positively and outside temporal operators.
fn check_shape(f: &Ltl<FlowLeaf>, positive: bool, temporal: bool) -> Result<(), CheckError> {
    use Ltl::*;
    match f {
        True | False | Atom(FlowLeaf::Node(_)) => Ok(()),
        Atom(FlowLeaf::Flow(_)) => {
            if temporal {
                Err(CheckError::UnsupportedShape(
                    "flow subformula under a temporal operator".into(),
                ))
            } else if !positive {
                Err(CheckError::UnsupportedShape(
                    "flow subformula under negation".into(),
                ))
            } else {
                Ok(())
            }
        }
        Not(x) => check_shape(x, !positive, temporal),
        And(a, b) | Or(a, b) => {
            check_shape(a, positive, temporal)?;
            check_shape(b, positive, temporal)
        }
        Implies(a, b) => {
            check_shape(a, !positive, temporal)?;
            check_shape(b, positive, temporal)
        }
        Next(x) | Finally(x) | Globally(x) => check_shape(x, positive, true),
        Until(a, b) | Release(a, b) => {
            check_shape(a, positive, true)?;
            check_shape(b, positive, true)
        }
    }
}

/// Successors of an interned state: the fired transition and target id.
type Edges = Vec<(Option<usize>, u32)>;

struct Space<'a> {
    tn: &'a TransitNet,
    states: Vec<ProductState>,
    index: HashMap<ProductState, u32>,
    succ: Vec<Option<Edges>>,
}

impl<'a> Space<'a> {
    fn intern(&mut self, s: ProductState) -> u32 {
        if let Some(&id) = self.index.get(&s) {
            return id;
        }
        let id = self.states.len() as u32;
        self.index.insert(s.clone(), id);
        self.states.push(s);
        self.succ.push(None);
        id
    }

    fn successors(&mut self, id: u32) -> Result<Vec<(Option<usize>, u32)>, CheckError> {
        if let Some(s) = &self.succ[id as usize] {
            return Ok(s.clone());
        }
        let next = product_successors(self.tn, &self.states[id as usize])?;
        let out: Vec<_> = next.into_iter().map(|(t, s)| (t, self.intern(s))).collect();
        self.succ[id as usize] = Some(out.clone());
        Ok(out)
    }
}

#[derive(Clone, Copy)]
struct Edge {
    to: usize,
    fired: Option<usize>,
    acc: u64,
}

/// Checks `phi` on `tn` under maximality and weak fairness.
/// Resolves the atoms of `phi` and checks that its flow subformulas have
/// a supported shape, without exploring anything.
pub fn validate(net: &crate::net::Net, phi: &RunFormula) -> Result<(), CheckError> {
    check_shape(&resolve(net, phi)?.run, true, false)
}

pub fn check(
    tn: &TransitNet,
    phi: &RunFormula,
    options: &CheckOptions,
    control: &Control,
) -> Result<CheckResult, CheckError> {
    let started = Instant::now();
    let net = tn.net();
    let resolved = resolve(net, phi)?;
    check_shape(&resolved.run, true, false)?;

    let trackers = resolved.flows.len();
    let phi_prod: Ltl<ProductAtom> = resolved.run.substitute(&mut |l| match *l {
        FlowLeaf::Flow(k) => relativize(k, &resolved.flows[k]),
        _ => Ltl::Atom(leaf_atom(l)),
    });
    let max_prod: Ltl<ProductAtom> = resolve(net, &maximality(net))?
        .run
        .map_atoms(&mut |l| leaf_atom(l));
    let constructed = {
        let Ltl::Implies(lhs, _) = add_assumptions(net, &Ltl::True) else {
            unreachable!("assumptions form an implication")
        };
        let lhs: Ltl<String> = lhs.map_atoms(&mut |a| a.to_string());
        let rhs: Ltl<String> = phi_prod.map_atoms(&mut |a| a.display(net).to_string());
        Ltl::implies(lhs, rhs).to_string()
    };

    let automaton: Buchi<ProductAtom> = ltl_to_buchi(&Ltl::and(max_prod, Ltl::not(phi_prod)))?;
    let fair: Vec<usize> = (0..net.transition_count())
        .filter(|&t| net.transition(t).weakfair)
        .collect();

    let mut space = Space {
        tn,
        states: Vec::new(),
        index: HashMap::new(),
        succ: Vec::new(),
    };
    let init = space.intern(ProductState::initial(net, trackers));

    // Explicit product with the automaton, breadth first.
    let mut nodes: Vec<(u32, usize)> = vec![(init, automaton.initial)];
    let mut node_ids: HashMap<(u32, usize), usize> = HashMap::from([((init, automaton.initial), 0)]);
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        if control.tick(i as u64) {
            return Err(CheckError::Canceled);
        }
        let (ps, q) = nodes[i];
        let mut out = Vec::new();
        for (fired, ps2) in space.successors(ps)? {
            let state = &space.states[ps as usize];
            let preds = automaton.predicate_values(&|a| a.holds(tn, state, fired));
            for e in &automaton.edges[q] {
                if !e.enabled(&preds) {
                    continue;
                }
                let key = (ps2, e.target);
                let to = match node_ids.get(&key) {
                    Some(&n) => n,
                    None => {
                        if nodes.len() >= options.state_cap {
                            control.set_progress(nodes.len() as u64);
                            return Err(CheckError::StateSpaceLimit {
                                limit: options.state_cap,
                                explored: nodes.len(),
                            });
                        }
                        nodes.push(key);
                        node_ids.insert(key, nodes.len() - 1);
                        nodes.len() - 1
                    }
                };
                out.push(Edge {
                    to,
                    fired,
                    acc: e.acc,
                });
            }
        }
        edges.push(out);
        i += 1;
    }
    control.set_progress(nodes.len() as u64);

    let succ: Vec<Vec<usize>> = edges.iter().map(|es| es.iter().map(|e| e.to).collect()).collect();
    let (comp, comps) = crate::graph::tarjan(&succ);
    let full = automaton.full_acceptance();
    let enabled_at = |n: usize, t: usize| net.is_enabled(&space.states[nodes[n].0 as usize].marking, t);

    let mut chosen: Option<usize> = None;
    for (c, members) in comps.iter().enumerate() {
        let mut acc = 0u64;
        let mut has_edge = false;
        let mut fired_inside = vec![false; net.transition_count()];
        for &u in members {
            for e in &edges[u] {
                if comp[e.to] == c {
                    has_edge = true;
                    acc |= e.acc;
                    if let Some(t) = e.fired {
                        fired_inside[t] = true;
                    }
                }
            }
        }
        if !has_edge || acc != full {
            continue;
        }
        let fair_ok = fair
            .iter()
            .all(|&t| fired_inside[t] || members.iter().any(|&u| !enabled_at(u, t)));
        if fair_ok && chosen.is_none_or(|best| members[0] < comps[best][0]) {
            chosen = Some(c);
        }
    }

    let stats = CheckStats {
        product_states: space.states.len(),
        search_states: nodes.len(),
        automaton_states: automaton.state_count(),
        acceptance_sets: automaton.acceptance_sets,
        elapsed: started.elapsed(),
    };
    let Some(c) = chosen else {
        return Ok(CheckResult {
            verdict: Verdict::Satisfied,
            counterexample: None,
            constructed_formula: constructed,
            stats,
        });
    };

    let in_scc = |n: usize| comp[n] == c;
    let entry = comps[c][0];
    let prefix = bfs_path(&edges, 0, |n| n == entry, |_| true).expect("scc is reachable");

    // Obligations: acceptance sets, then fairness of each weakly fair transition.
    let mut pending_acc = full;
    let mut pending_fair: Vec<usize> = fair.clone();
    let mut cycle: Vec<(usize, Edge)> = Vec::new();
    let mut cur = entry;
    let discharge_node = |n: usize, pf: &mut Vec<usize>| pf.retain(|&t| enabled_at(n, t));
    discharge_node(cur, &mut pending_fair);
    while pending_acc != 0 || !pending_fair.is_empty() {
        let pa = pending_acc;
        let pf = pending_fair.clone();
        let path = bfs_edge_path(&edges, cur, &in_scc, |e: &Edge| {
            e.acc & pa != 0
                || e.fired.is_some_and(|t| pf.contains(&t))
                || pf.iter().any(|&t| !enabled_at(e.to, t))
        })
        .expect("obligation reachable inside the component");
        for &(_, e) in &path {
            pending_acc &= !e.acc;
            if let Some(t) = e.fired {
                pending_fair.retain(|&x| x != t);
            }
            discharge_node(e.to, &mut pending_fair);
        }
        cur = path.last().expect("non-empty path").1.to;
        cycle.extend(path);
    }
    if cur != entry || cycle.is_empty() {
        let back = bfs_edge_path(&edges, cur, &in_scc, |e: &Edge| e.to == entry)
            .expect("component is strongly connected");
        cycle.extend(back);
    }

    let step = |e: &Edge| Step {
        fire: e.fired,
        state: space.states[nodes[e.to].0 as usize].clone(),
    };
    let lasso = Lasso {
        initial: space.states[init as usize].clone(),
        prefix: prefix.iter().map(|(_, e)| step(e)).collect(),
        cycle: cycle.iter().map(|(_, e)| step(e)).collect(),
    };
    let mut stats = stats;
    stats.elapsed = started.elapsed();
    Ok(CheckResult {
        verdict: Verdict::Unsatisfied,
        counterexample: Some(lasso),
        constructed_formula: constructed,
        stats,
    })
}

/// Shortest path of edges from `from` to a node satisfying `goal`, moving
/// only through nodes accepted by `allowed`. Empty when `from` is a goal.
fn bfs_path(
    edges: &[Vec<Edge>],
    from: usize,
    goal: impl Fn(usize) -> bool,
    allowed: impl Fn(usize) -> bool,
) -> Option<Vec<(usize, Edge)>> {
    if goal(from) {
        return Some(Vec::new());
    }
    bfs_edge_path(edges, from, &allowed, |e: &Edge| goal(e.to))
}

/// Shortest non-empty edge path from `from` whose last edge satisfies `goal`.
fn bfs_edge_path(
    edges: &[Vec<Edge>],
    from: usize,
    allowed: &impl Fn(usize) -> bool,
    goal: impl Fn(&Edge) -> bool,
) -> Option<Vec<(usize, Edge)>> {
    let mut parent: HashMap<usize, (usize, Edge)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = HashMap::from([(from, ())]);
    while let Some(u) = queue.pop_front() {
        for e in &edges[u] {
            if !allowed(e.to) {
                continue;
            }
            if goal(e) {
                let mut path = vec![(u, *e)];
                let mut v = u;
                while v != from {
                    let (p, pe) = parent[&v];
                    path.push((p, pe));
                    v = p;
                }
                path.reverse();
                return Some(path);
            }
            if seen.insert(e.to, ()).is_none() {
                parent.insert(e.to, (u, *e));
                queue.push_back(e.to);
            }
        }
    }
    None
}

/// Parses `formula` and checks it.
pub fn check_text(
    tn: &TransitNet,
    formula: &str,
    options: &CheckOptions,
    control: &Control,
) -> Result<CheckResult, CheckError> {
    let phi = parse_formula(formula)?;
    check(tn, &phi, options, control)
}
