//! Strategies as Petri nets.
//!
//! The compact form has one place per (place, commitment) pair that occurs
//! under the strategy and one transition per distinct firing. When that
//! folding merges situations the strategy treats differently, the net falls
//! back to one place per (place, commitment, game state), where every copy
//! of a transition moves the whole marking from one game state to the next.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use thiserror::Error;

use super::solve::{GameStrategy, TwoPlayerGame};
use super::{Commitment, GameState, PetriGame, Player};
use crate::layout::{layout_net, transfer_coords, LayoutParams};
use crate::net::{Coord, Marking, Net, NetBuilder, NetError, Node, Place, ReachGraph, Transition};

/// Original place, commitment (`None` for environment places) and, in the
/// per-state form, the game state holding the token.
type PlaceKey = (usize, Option<Vec<usize>>, Option<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyNet {
    pub net: Net,
    /// Original place of each strategy place.
    pub place_origin: Vec<usize>,
    /// Original transition of each strategy transition.
    pub transition_origin: Vec<usize>,
    /// Original ids of every node, keyed by strategy net id.
    pub labels: BTreeMap<String, String>,
    /// Built in the per-state form.
    pub per_state: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyNetError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("reachability exceeds {0} markings")]
    TooLarge(usize),
    #[error("marking {{{marking}}} reaches bad place {place}", marking = .marking.join(","))]
    ReachesBad { marking: Vec<String>, place: String },
    #[error("marking {{{}}} blocks the net", .0.join(","))]
    SystemDeadlock(Vec<String>),
    #[error("firing {0} has no counterpart in the game net")]
    NotAnOriginalRun(String),
}

/// Facts established by [`StrategyNet::verify`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verified {
    pub markings: usize,
    pub edges: usize,
}

fn resolve(game: &TwoPlayerGame, sigma: &GameStrategy, s: usize) -> usize {
    match (game.states[s].turn(), sigma.choice.get(&s)) {
        (Player::System, Some(&m)) => game.moves[s][m].1,
        _ => s,
    }
}

fn key(pg: &PetriGame, s: &GameState, p: usize, state: Option<usize>) -> PlaceKey {
    if pg.is_env(p) {
        return (p, None, state);
    }
    match s.entries.get(&p) {
        Some(Commitment::Committed(ts)) => (p, Some(ts.clone()), state),
        _ => (p, Some(Vec::new()), state),
    }
}

/// Largest strategy net reachability graph explored when checking the
/// compact form.
const FOLD_CHECK_LIMIT: usize = 200_000;

/// Builds the strategy net of `sigma` from the states it reaches, in the
/// compact form when it is faithful and in the per-state form otherwise.
pub fn strategy_net(pg: &PetriGame, game: &TwoPlayerGame, sigma: &GameStrategy) -> StrategyNet {
    let folded = build(pg, game, sigma, false);
    if folded.verify(pg, FOLD_CHECK_LIMIT).is_ok() {
        return folded;
    }
    build(pg, game, sigma, true)
}

fn build(pg: &PetriGame, game: &TwoPlayerGame, sigma: &GameStrategy, per_state: bool) -> StrategyNet {
    let net = pg.net();
    let tag = |s: usize| per_state.then_some(s);
    let mut places: Vec<PlaceKey> = Vec::new();
    let mut place_ids: HashMap<PlaceKey, usize> = HashMap::new();
    let mut intern = |k: PlaceKey, places: &mut Vec<PlaceKey>| {
        *place_ids.entry(k.clone()).or_insert_with(|| {
            places.push(k);
            places.len() - 1
        })
    };
    type TransKey = (usize, Vec<usize>, Vec<usize>);
    let mut transitions: Vec<TransKey> = Vec::new();
    let mut seen_t: HashSet<TransKey> = HashSet::new();

    let r0 = resolve(game, sigma, game.initial);
    let m0 = game.states[r0].marking(net);
    let initial: Vec<usize> = m0
        .iter()
        .map(|p| intern(key(pg, &game.states[r0], p, tag(r0)), &mut places))
        .collect();

    let mut seen = vec![false; game.len()];
    seen[r0] = true;
    let mut queue = VecDeque::from([r0]);
    while let Some(s) = queue.pop_front() {
        if game.states[s].turn() != Player::Environment {
            continue;
        }
        for (label, target) in &game.moves[s] {
            let super::MoveLabel::Fire(t) = *label else { continue };
            let r = resolve(game, sigma, *target);
            let (pre, post): (Vec<usize>, Vec<usize>) = if per_state {
                (
                    game.states[s].marking(net).iter().collect(),
                    game.states[r].marking(net).iter().collect(),
                )
            } else {
                (net.pre(t).to_vec(), net.post(t).to_vec())
            };
            let ins: Vec<usize> = pre
                .iter()
                .map(|&p| intern(key(pg, &game.states[s], p, tag(s)), &mut places))
                .collect();
            let outs: Vec<usize> = post
                .iter()
                .map(|&p| intern(key(pg, &game.states[r], p, tag(r)), &mut places))
                .collect();
            let tk = (t, ins, outs);
            if seen_t.insert(tk.clone()) {
                transitions.push(tk);
            }
            if !seen[r] {
                seen[r] = true;
                queue.push_back(r);
            }
        }
    }

    // Names: the first copy keeps the original id.
    let mut used: HashSet<String> = net.nodes().map(|n| net.node_id(n).to_string()).collect();
    let mut copies: HashMap<String, usize> = HashMap::new();
    let mut name_for = |orig: &str| -> String {
        let c = copies.entry(orig.to_string()).or_insert(0);
        *c += 1;
        if *c == 1 {
            return orig.to_string();
        }
        loop {
            let candidate = format!("{orig}_{}", *c - 1);
            if used.insert(candidate.clone()) {
                return candidate;
            }
            *c += 1;
        }
    };
    let place_names: Vec<String> = places.iter().map(|(p, _, _)| name_for(&net.place(*p).id)).collect();
    let trans_names: Vec<String> = transitions
        .iter()
        .map(|(t, _, _)| name_for(&net.transition(*t).id))
        .collect();

    let mut b = NetBuilder::new(format!("{}_strategy", net.name()));
    let initial: HashSet<usize> = initial.into_iter().collect();
    let mut labels = BTreeMap::new();
    for (i, (p, _, _)) in places.iter().enumerate() {
        let orig = net.place(*p);
        let mut place = Place::new(place_names[i].clone());
        place.initial = initial.contains(&i);
        place.kind = orig.kind;
        place.bad = orig.bad;
        b.add_place(place).expect("fresh place name");
        labels.insert(place_names[i].clone(), orig.id.clone());
    }
    for (i, (t, ins, outs)) in transitions.iter().enumerate() {
        let orig = net.transition(*t);
        let mut tr = Transition::new(trans_names[i].clone());
        tr.weakfair = orig.weakfair;
        b.add_transition(tr).expect("fresh transition name");
        labels.insert(trans_names[i].clone(), orig.id.clone());
        for &p in ins {
            b.add_arc_in(&place_names[p], &trans_names[i]).expect("known nodes");
        }
        for &p in outs {
            b.add_arc_out(&trans_names[i], &place_names[p]).expect("known nodes");
        }
    }
    let mut sn = b.build().expect("strategy net transitions have arcs");

    // Positions follow the game net.
    let source = layout_net(net, &LayoutParams::default());
    let correspondence: Vec<(Node, Node)> = sn
        .nodes()
        .map(|n| {
            let orig = match n {
                Node::Place(i) => Node::Place(places[i].0),
                Node::Transition(i) => Node::Transition(transitions[i].0),
            };
            (n, orig)
        })
        .collect();
    let transferred = transfer_coords(&source, &correspondence);
    for (n, c) in transferred {
        sn.set_coord(n, Some(c));
    }

    StrategyNet {
        net: sn,
        place_origin: places.iter().map(|(p, _, _)| *p).collect(),
        transition_origin: transitions.iter().map(|(t, _, _)| *t).collect(),
        labels,
        per_state,
    }
}

impl StrategyNet {
    fn project(&self, original: &Net, m: &Marking) -> Marking {
        Marking::from_places(original.place_count(), m.iter().map(|p| self.place_origin[p]))
    }

    /// Exhaustively explores the strategy net: no reachable marking covers
    /// a bad place, no marking is dead while the game net could move, and
    /// every firing is a firing of the game net under the labels.
    pub fn verify(&self, pg: &PetriGame, limit: usize) -> Result<Verified, StrategyNetError> {
        let original = pg.net();
        let g = ReachGraph::full(&self.net, limit)?;
        if !g.is_complete() {
            return Err(StrategyNetError::TooLarge(limit));
        }
        for m in g.nodes() {
            let proj = self.project(original, m);
            if let Some(&b) = pg.bad_places().iter().find(|&&b| proj.contains(b)) {
                return Err(StrategyNetError::ReachesBad {
                    marking: self.net.marking_names(m),
                    place: original.place(b).id.clone(),
                });
            }
            if self.net.enabled(m).is_empty() && !original.enabled(&proj).is_empty() {
                return Err(StrategyNetError::SystemDeadlock(self.net.marking_names(m)));
            }
        }
        for (src, t, dst) in g.edges() {
            let from = self.project(original, &g.nodes()[src]);
            let to = self.project(original, &g.nodes()[dst]);
            let ot = self.transition_origin[t];
            if original.fire(&from, ot).ok().as_ref() != Some(&to) {
                return Err(StrategyNetError::NotAnOriginalRun(
                    self.net.transition(t).id.clone(),
                ));
            }
        }
        Ok(Verified {
            markings: g.nodes().len(),
            edges: g.edge_count(),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let net = &self.net;
        let coord = |n: Node| net.coord(n).map(|c: Coord| serde_json::json!({"x": c.x, "y": c.y}));
        let mut flows = Vec::new();
        for t in 0..net.transition_count() {
            for &p in net.pre(t) {
                flows.push(serde_json::json!({"from": net.place(p).id, "to": net.transition(t).id}));
            }
            for &p in net.post(t) {
                flows.push(serde_json::json!({"from": net.transition(t).id, "to": net.place(p).id}));
            }
        }
        let coords: serde_json::Map<String, serde_json::Value> = net
            .nodes()
            .filter_map(|n| coord(n).map(|c| (net.node_id(n).to_string(), c)))
            .collect();
        serde_json::json!({
            "places": net.places().iter().map(|p| serde_json::json!({
                "id": p.id,
                "initial": p.initial,
                "kind": p.kind,
            })).collect::<Vec<_>>(),
            "transitions": net.transitions().iter().map(|t| t.id.clone()).collect::<Vec<_>>(),
            "flows": flows,
            "labels": self.labels,
            "coords": coords,
        })
    }
}
