//! LTL to transition-based generalized Büchi automata.
//!
//! Maximal propositional subformulas are first replaced by predicate
//! indices, so edge guards stay small even for wide disjunctions. The
//! construction is a tableau expansion over negation normal form; an edge
//! is in the acceptance set of an until formula unless the until was
//! postponed on that edge.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use super::formula::Ltl;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuchiError {
    #[error("formula has {0} until subformulas; at most 64 are supported")]
    TooManyUntils(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Nnf {
    True,
    False,
    Lit(usize, bool),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Next(Box<Nnf>),
    Until(Box<Nnf>, Box<Nnf>),
    Release(Box<Nnf>, Box<Nnf>),
}

fn nnf(f: &Ltl<usize>, neg: bool) -> Nnf {
    use Ltl::*;
    let b = Box::new;
    match f {
        True if neg => Nnf::False,
        True => Nnf::True,
        False if neg => Nnf::True,
        False => Nnf::False,
        Atom(i) => Nnf::Lit(*i, !neg),
        Not(x) => nnf(x, !neg),
        And(x, y) if neg => Nnf::Or(b(nnf(x, true)), b(nnf(y, true))),
        And(x, y) => Nnf::And(b(nnf(x, false)), b(nnf(y, false))),
        Or(x, y) if neg => Nnf::And(b(nnf(x, true)), b(nnf(y, true))),
        Or(x, y) => Nnf::Or(b(nnf(x, false)), b(nnf(y, false))),
        Implies(x, y) if neg => Nnf::And(b(nnf(x, false)), b(nnf(y, true))),
        Implies(x, y) => Nnf::Or(b(nnf(x, true)), b(nnf(y, false))),
        Next(x) => Nnf::Next(b(nnf(x, neg))),
        Finally(x) if neg => Nnf::Release(b(Nnf::False), b(nnf(x, true))),
        Finally(x) => Nnf::Until(b(Nnf::True), b(nnf(x, false))),
        Globally(x) if neg => Nnf::Until(b(Nnf::True), b(nnf(x, true))),
        Globally(x) => Nnf::Release(b(Nnf::False), b(nnf(x, false))),
        Until(x, y) if neg => Nnf::Release(b(nnf(x, true)), b(nnf(y, true))),
        Until(x, y) => Nnf::Until(b(nnf(x, false)), b(nnf(y, false))),
        Release(x, y) if neg => Nnf::Until(b(nnf(x, true)), b(nnf(y, true))),
        Release(x, y) => Nnf::Release(b(nnf(x, false)), b(nnf(y, false))),
    }
}

fn collect_untils(f: &Nnf, out: &mut Vec<Nnf>) {
    match f {
        Nnf::True | Nnf::False | Nnf::Lit(..) => {}
        Nnf::Next(x) => collect_untils(x, out),
        Nnf::And(x, y) | Nnf::Or(x, y) | Nnf::Release(x, y) => {
            collect_untils(x, out);
            collect_untils(y, out);
        }
        Nnf::Until(x, y) => {
            if !out.contains(f) {
                out.push(f.clone());
            }
            collect_untils(x, out);
            collect_untils(y, out);
        }
    }
}

/// Edge of the automaton: readable when every literal in `guard` agrees
/// with the predicate values of the letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BuchiEdge {
    pub guard: Vec<(usize, bool)>,
    pub target: usize,
    /// Bit `i` set: the edge is in acceptance set `i`.
    pub acc: u64,
}

impl BuchiEdge {
    pub fn enabled(&self, preds: &[bool]) -> bool {
        self.guard.iter().all(|&(i, v)| preds[i] == v)
    }
}

/// A run is accepting when it uses edges of every acceptance set infinitely
/// often.
#[derive(Debug, Clone)]
pub struct Buchi<A> {
    pub predicates: Vec<Ltl<A>>,
    pub edges: Vec<Vec<BuchiEdge>>,
    pub initial: usize,
    pub acceptance_sets: usize,
}

struct Cover {
    lits: BTreeMap<usize, bool>,
    next: BTreeSet<Nnf>,
    postponed: u64,
}

struct Expander<'a> {
    untils: &'a [Nnf],
    out: Vec<Cover>,
}

impl Expander<'_> {
    fn expand(&mut self, mut todo: Vec<Nnf>, mut done: BTreeSet<Nnf>, mut cover: Cover) {
        while let Some(f) = todo.pop() {
            if !done.insert(f.clone()) {
                continue;
            }
            match f {
                Nnf::True => {}
                Nnf::False => return,
                Nnf::Lit(i, v) => {
                    if cover.lits.insert(i, v) == Some(!v) {
                        return;
                    }
                }
                Nnf::And(x, y) => {
                    todo.push(*x);
                    todo.push(*y);
                }
                Nnf::Next(x) => {
                    if *x != Nnf::True {
                        cover.next.insert(*x);
                    }
                }
                Nnf::Or(x, y) => {
                    self.branch(&todo, &done, &cover, vec![*x], None, 0);
                    todo.push(*y);
                }
                Nnf::Until(ref x, ref y) => {
                    let bit = 1u64
                        << self
                            .untils
                            .iter()
                            .position(|u| *u == f)
                            .expect("until collected");
                    self.branch(&todo, &done, &cover, vec![(**y).clone()], None, 0);
                    todo.push((**x).clone());
                    cover.next.insert(f.clone());
                    cover.postponed |= bit;
                }
                Nnf::Release(ref x, ref y) => {
                    self.branch(&todo, &done, &cover, vec![(**x).clone(), (**y).clone()], None, 0);
                    todo.push((**y).clone());
                    cover.next.insert(f.clone());
                }
            }
        }
        self.out.push(cover);
    }

    fn branch(
        &mut self,
        todo: &[Nnf],
        done: &BTreeSet<Nnf>,
        cover: &Cover,
        extra: Vec<Nnf>,
        next: Option<Nnf>,
        postpone: u64,
    ) {
        let mut todo = todo.to_vec();
        todo.extend(extra);
        let mut c = Cover {
            lits: cover.lits.clone(),
            next: cover.next.clone(),
            postponed: cover.postponed | postpone,
        };
        if let Some(n) = next {
            c.next.insert(n);
        }
        self.expand(todo, done.clone(), c);
    }
}

fn abstract_predicates<A: Clone + Ord>(
    f: &Ltl<A>,
    preds: &mut Vec<Ltl<A>>,
    index: &mut BTreeMap<Ltl<A>, usize>,
) -> Ltl<usize> {
    use Ltl::*;
    match f {
        True => True,
        False => False,
        _ if f.is_propositional() => {
            let i = *index.entry(f.clone()).or_insert_with(|| {
                preds.push(f.clone());
                preds.len() - 1
            });
            Atom(i)
        }
        Atom(_) => unreachable!("atoms are propositional"),
        Not(x) => Ltl::not(abstract_predicates(x, preds, index)),
        And(a, b) => Ltl::and(
            abstract_predicates(a, preds, index),
            abstract_predicates(b, preds, index),
        ),
        Or(a, b) => Ltl::or(
            abstract_predicates(a, preds, index),
            abstract_predicates(b, preds, index),
        ),
        Implies(a, b) => Ltl::implies(
            abstract_predicates(a, preds, index),
            abstract_predicates(b, preds, index),
        ),
        Next(x) => Ltl::next(abstract_predicates(x, preds, index)),
        Finally(x) => Ltl::finally(abstract_predicates(x, preds, index)),
        Globally(x) => Ltl::globally(abstract_predicates(x, preds, index)),
        Until(a, b) => Ltl::until(
            abstract_predicates(a, preds, index),
            abstract_predicates(b, preds, index),
        ),
        Release(a, b) => Ltl::release(
            abstract_predicates(a, preds, index),
            abstract_predicates(b, preds, index),
        ),
    }
}

/// Builds an automaton accepting exactly the words satisfying `f`.
pub fn ltl_to_buchi<A: Clone + Ord>(f: &Ltl<A>) -> Result<Buchi<A>, BuchiError> {
    let mut predicates = Vec::new();
    let abs = abstract_predicates(f, &mut predicates, &mut BTreeMap::new());
    let root = nnf(&abs, false);
    let mut untils = Vec::new();
    collect_untils(&root, &mut untils);
    if untils.len() > 64 {
        return Err(BuchiError::TooManyUntils(untils.len()));
    }
    let full = if untils.len() == 64 {
        u64::MAX
    } else {
        (1u64 << untils.len()) - 1
    };

    let mut ids: HashMap<BTreeSet<Nnf>, usize> = HashMap::new();
    let mut sets: Vec<BTreeSet<Nnf>> = Vec::new();
    let mut edges: Vec<Vec<BuchiEdge>> = Vec::new();
    let init: BTreeSet<Nnf> = std::iter::once(root).filter(|r| *r != Nnf::True).collect();
    ids.insert(init.clone(), 0);
    sets.push(init);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let mut ex = Expander {
            untils: &untils,
            out: Vec::new(),
        };
        let todo: Vec<Nnf> = sets[s].iter().rev().cloned().collect();
        ex.expand(
            todo,
            BTreeSet::new(),
            Cover {
                lits: BTreeMap::new(),
                next: BTreeSet::new(),
                postponed: 0,
            },
        );
        let mut out: BTreeSet<BuchiEdge> = BTreeSet::new();
        for c in ex.out {
            let target = match ids.get(&c.next) {
                Some(&t) => t,
                None => {
                    let t = sets.len();
                    ids.insert(c.next.clone(), t);
                    sets.push(c.next);
                    queue.push_back(t);
                    t
                }
            };
            out.insert(BuchiEdge {
                guard: c.lits.into_iter().collect(),
                target,
                acc: full & !c.postponed,
            });
        }
        if edges.len() <= s {
            edges.resize(s + 1, Vec::new());
        }
        edges[s] = out.into_iter().collect();
    }
    edges.resize(sets.len(), Vec::new());
    Ok(Buchi {
        predicates,
        edges,
        initial: 0,
        acceptance_sets: untils.len(),
    })
}

impl<A> Buchi<A> {
    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    pub fn full_acceptance(&self) -> u64 {
        if self.acceptance_sets == 64 {
            u64::MAX
        } else {
            (1u64 << self.acceptance_sets) - 1
        }
    }

    pub fn predicate_values(&self, val: &impl Fn(&A) -> bool) -> Vec<bool> {
        self.predicates.iter().map(|p| p.eval_prop(val)).collect()
    }

    /// Whether the automaton accepts the lasso word with positions `0..len`
    /// looping back to `loop_start`.
    pub fn accepts_lasso(
        &self,
        len: usize,
        loop_start: usize,
        atom: &impl Fn(&A, usize) -> bool,
    ) -> bool {
        assert!(loop_start < len, "lasso loop must be non-empty");
        let succ_pos = |i: usize| if i + 1 < len { i + 1 } else { loop_start };
        let preds: Vec<Vec<bool>> = (0..len)
            .map(|i| self.predicate_values(&|a| atom(a, i)))
            .collect();
        let q = self.state_count();
        let node = |pos: usize, s: usize| pos * q + s;
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); len * q];
        let mut labelled: Vec<(usize, usize, u64)> = Vec::new();
        for pos in 0..len {
            for s in 0..q {
                for e in &self.edges[s] {
                    if e.enabled(&preds[pos]) {
                        let to = node(succ_pos(pos), e.target);
                        succ[node(pos, s)].push(to);
                        labelled.push((node(pos, s), to, e.acc));
                    }
                }
            }
        }
        let mut reach = vec![false; len * q];
        let mut stack = vec![node(0, self.initial)];
        reach[stack[0]] = true;
        while let Some(v) = stack.pop() {
            for &w in &succ[v] {
                if !reach[w] {
                    reach[w] = true;
                    stack.push(w);
                }
            }
        }
        let (comp, comps) = crate::graph::tarjan(&succ);
        let mut acc = vec![0u64; comps.len()];
        let mut has_edge = vec![false; comps.len()];
        for &(u, v, a) in &labelled {
            if comp[u] == comp[v] && reach[u] {
                acc[comp[u]] |= a;
                has_edge[comp[u]] = true;
            }
        }
        let full = self.full_acceptance();
        (0..comps.len()).any(|c| has_edge[c] && acc[c] == full)
    }
}
