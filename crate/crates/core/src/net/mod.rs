//! Safe place/transition nets.
//!
//! A [`Net`] is immutable once built. Places and transitions share one
//! namespace so that formula atoms resolve without ambiguity. Markings are
//! sets of places: a firing that would put a second token on a place is an
//! error ([`NetError::SafetyViolation`]) rather than being capped.

mod apn;
mod marking;
mod pnml;
mod reach;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use apn::{parse_document, parse_net, render, Document, ParseError};
pub use marking::Marking;
pub use pnml::export_pnml;
pub use reach::ReachGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coord {
    pub x: f64,
    pub y: f64,
}

impl Coord {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    #[default]
    System,
    Environment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Place {
    pub id: String,
    pub initial: bool,
    pub kind: PlaceKind,
    pub bad: bool,
    pub coord: Option<Coord>,
}

impl Place {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            initial: false,
            kind: PlaceKind::System,
            bad: false,
            coord: None,
        }
    }

    pub fn marked(mut self) -> Self {
        self.initial = true;
        self
    }

    pub fn env(mut self) -> Self {
        self.kind = PlaceKind::Environment;
        self
    }

    pub fn bad(mut self) -> Self {
        self.bad = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub id: String,
    pub weakfair: bool,
    pub coord: Option<Coord>,
}

impl Transition {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            weakfair: false,
            coord: None,
        }
    }

    pub fn weakfair(mut self) -> Self {
        self.weakfair = true;
        self
    }
}

/// Index of a node in the shared place/transition namespace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Place(usize),
    Transition(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("invalid identifier `{0}`")]
    InvalidIdent(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("{0} is not a place")]
    NotAPlace(String),
    #[error("{0} is not a transition")]
    NotATransition(String),
    #[error("transition {0} has neither preset nor postset")]
    IsolatedTransition(String),
    #[error("transition {0} is not enabled")]
    NotEnabled(String),
    #[error("firing {transition} puts a second token on {place}")]
    SafetyViolation { transition: String, place: String },
    #[error("marking is not a node of the reachability graph")]
    UnknownMarking,
}

pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    name: String,
    places: Vec<Place>,
    transitions: Vec<Transition>,
    pre: Vec<Vec<usize>>,
    post: Vec<Vec<usize>>,
    index: HashMap<String, Node>,
}

impl Net {
    /// Builds a net from its parts. `flows` lists `(transition, preset, postset)`
    /// by id; transitions without an entry get empty pre- and postsets and are
    /// rejected.
    pub fn new(
        name: impl Into<String>,
        places: Vec<Place>,
        transitions: Vec<Transition>,
        flows: &[(&str, &[&str], &[&str])],
    ) -> Result<Self, NetError> {
        let mut b = NetBuilder::new(name);
        for p in places {
            b.add_place(p)?;
        }
        for t in transitions {
            b.add_transition(t)?;
        }
        for (t, pre, post) in flows {
            for p in pre.iter() {
                b.add_arc_in(p, t)?;
            }
            for p in post.iter() {
                b.add_arc_out(t, p)?;
            }
        }
        b.build()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn place(&self, p: usize) -> &Place {
        &self.places[p]
    }

    pub fn transition(&self, t: usize) -> &Transition {
        &self.transitions[t]
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    /// Preset of `t`, sorted by place index.
    pub fn pre(&self, t: usize) -> &[usize] {
        &self.pre[t]
    }

    /// Postset of `t`, sorted by place index.
    pub fn post(&self, t: usize) -> &[usize] {
        &self.post[t]
    }

    pub fn lookup(&self, id: &str) -> Option<Node> {
        self.index.get(id).copied()
    }

    pub fn place_index(&self, id: &str) -> Result<usize, NetError> {
        match self.lookup(id) {
            Some(Node::Place(p)) => Ok(p),
            Some(Node::Transition(_)) => Err(NetError::NotAPlace(id.to_string())),
            None => Err(NetError::UnknownNode(id.to_string())),
        }
    }

    pub fn transition_index(&self, id: &str) -> Result<usize, NetError> {
        match self.lookup(id) {
            Some(Node::Transition(t)) => Ok(t),
            Some(Node::Place(_)) => Err(NetError::NotATransition(id.to_string())),
            None => Err(NetError::UnknownNode(id.to_string())),
        }
    }

    pub fn node_id(&self, node: Node) -> &str {
        match node {
            Node::Place(p) => &self.places[p].id,
            Node::Transition(t) => &self.transitions[t].id,
        }
    }

    /// Transitions having `p` in their preset, in declaration order.
    pub fn post_transitions(&self, p: usize) -> Vec<usize> {
        (0..self.transitions.len())
            .filter(|&t| self.pre[t].binary_search(&p).is_ok())
            .collect()
    }

    pub fn initial_marking(&self) -> Marking {
        let mut m = Marking::empty(self.places.len());
        for (i, p) in self.places.iter().enumerate() {
            if p.initial {
                m.insert(i);
            }
        }
        m
    }

    pub fn marking_of(&self, ids: &[&str]) -> Result<Marking, NetError> {
        let mut m = Marking::empty(self.places.len());
        for id in ids {
            m.insert(self.place_index(id)?);
        }
        Ok(m)
    }

    pub fn is_enabled(&self, m: &Marking, t: usize) -> bool {
        self.pre[t].iter().all(|&p| m.contains(p))
    }

    /// Enabled transitions in declaration order.
    pub fn enabled(&self, m: &Marking) -> Vec<usize> {
        (0..self.transitions.len())
            .filter(|&t| self.is_enabled(m, t))
            .collect()
    }

    pub fn fire(&self, m: &Marking, t: usize) -> Result<Marking, NetError> {
        if !self.is_enabled(m, t) {
            return Err(NetError::NotEnabled(self.transitions[t].id.clone()));
        }
        let mut next = m.clone();
        for &p in &self.pre[t] {
            next.remove(p);
        }
        for &p in &self.post[t] {
            if next.contains(p) {
                return Err(NetError::SafetyViolation {
                    transition: self.transitions[t].id.clone(),
                    place: self.places[p].id.clone(),
                });
            }
            next.insert(p);
        }
        Ok(next)
    }

    pub fn marking_names(&self, m: &Marking) -> Vec<String> {
        m.iter().map(|p| self.places[p].id.clone()).collect()
    }

    pub fn set_coord(&mut self, node: Node, coord: Option<Coord>) {
        match node {
            Node::Place(p) => self.places[p].coord = coord,
            Node::Transition(t) => self.transitions[t].coord = coord,
        }
    }

    pub fn coord(&self, node: Node) -> Option<Coord> {
        match node {
            Node::Place(p) => self.places[p].coord,
            Node::Transition(t) => self.transitions[t].coord,
        }
    }

    /// All nodes, places first, in declaration order.
    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.places.len())
            .map(Node::Place)
            .chain((0..self.transitions.len()).map(Node::Transition))
    }
}

/// Incremental construction of a [`Net`] with validation at every step.
#[derive(Debug, Clone)]
pub struct NetBuilder {
    name: String,
    places: Vec<Place>,
    transitions: Vec<Transition>,
    pre: Vec<Vec<usize>>,
    post: Vec<Vec<usize>>,
    index: HashMap<String, Node>,
}

impl NetBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            places: Vec::new(),
            transitions: Vec::new(),
            pre: Vec::new(),
            post: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn claim(&mut self, id: &str, node: Node) -> Result<(), NetError> {
        if !is_ident(id) {
            return Err(NetError::InvalidIdent(id.to_string()));
        }
        if self.index.insert(id.to_string(), node).is_some() {
            return Err(NetError::DuplicateId(id.to_string()));
        }
        Ok(())
    }

    pub fn add_place(&mut self, place: Place) -> Result<usize, NetError> {
        let idx = self.places.len();
        self.claim(&place.id, Node::Place(idx))?;
        self.places.push(place);
        Ok(idx)
    }

    pub fn add_transition(&mut self, transition: Transition) -> Result<usize, NetError> {
        let idx = self.transitions.len();
        self.claim(&transition.id, Node::Transition(idx))?;
        self.transitions.push(transition);
        self.pre.push(Vec::new());
        self.post.push(Vec::new());
        Ok(idx)
    }

    pub fn lookup(&self, id: &str) -> Option<Node> {
        self.index.get(id).copied()
    }

    fn place(&self, id: &str) -> Result<usize, NetError> {
        match self.lookup(id) {
            Some(Node::Place(p)) => Ok(p),
            Some(Node::Transition(_)) => Err(NetError::NotAPlace(id.to_string())),
            None => Err(NetError::UnknownNode(id.to_string())),
        }
    }

    fn transition(&self, id: &str) -> Result<usize, NetError> {
        match self.lookup(id) {
            Some(Node::Transition(t)) => Ok(t),
            Some(Node::Place(_)) => Err(NetError::NotATransition(id.to_string())),
            None => Err(NetError::UnknownNode(id.to_string())),
        }
    }

    /// Arc from place `p` into transition `t`. Repeated arcs are merged.
    pub fn add_arc_in(&mut self, p: &str, t: &str) -> Result<(), NetError> {
        let (p, t) = (self.place(p)?, self.transition(t)?);
        insert_sorted(&mut self.pre[t], p);
        Ok(())
    }

    /// Arc from transition `t` to place `p`.
    pub fn add_arc_out(&mut self, t: &str, p: &str) -> Result<(), NetError> {
        let (p, t) = (self.place(p)?, self.transition(t)?);
        insert_sorted(&mut self.post[t], p);
        Ok(())
    }

    pub fn set_coord(&mut self, id: &str, coord: Coord) -> Result<(), NetError> {
        match self.lookup(id) {
            Some(Node::Place(p)) => self.places[p].coord = Some(coord),
            Some(Node::Transition(t)) => self.transitions[t].coord = Some(coord),
            None => return Err(NetError::UnknownNode(id.to_string())),
        }
        Ok(())
    }

    pub fn build(self) -> Result<Net, NetError> {
        if !is_ident(&self.name) {
            return Err(NetError::InvalidIdent(self.name));
        }
        for (t, tr) in self.transitions.iter().enumerate() {
            if self.pre[t].is_empty() && self.post[t].is_empty() {
                return Err(NetError::IsolatedTransition(tr.id.clone()));
            }
        }
        Ok(Net {
            name: self.name,
            places: self.places,
            transitions: self.transitions,
            pre: self.pre,
            post: self.post,
            index: self.index,
        })
    }
}

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Net {
        Net::new(
            "chain",
            vec![Place::new("p").marked(), Place::new("q")],
            vec![Transition::new("t")],
            &[("t", &["p"], &["q"])],
        )
        .unwrap()
    }

    #[test]
    fn fire_moves_token() {
        let net = chain();
        let m = net.initial_marking();
        assert_eq!(net.enabled(&m), vec![0]);
        let next = net.fire(&m, 0).unwrap();
        assert_eq!(net.marking_names(&next), vec!["q"]);
    }

    #[test]
    fn fire_disabled_is_error() {
        let net = chain();
        let m = net.marking_of(&["q"]).unwrap();
        assert_eq!(net.fire(&m, 0), Err(NetError::NotEnabled("t".into())));
    }

    #[test]
    fn unsafe_firing_is_reported() {
        let net = chain();
        let m = net.marking_of(&["p", "q"]).unwrap();
        assert!(matches!(
            net.fire(&m, 0),
            Err(NetError::SafetyViolation { ref place, .. }) if place == "q"
        ));
    }

    #[test]
    fn empty_marking_enables_only_source_transitions() {
        let net = Net::new(
            "src",
            vec![Place::new("p")],
            vec![Transition::new("gen"), Transition::new("eat")],
            &[("gen", &[], &["p"]), ("eat", &["p"], &[])],
        )
        .unwrap();
        assert_eq!(net.enabled(&Marking::empty(1)), vec![0]);
        assert!(chain().enabled(&Marking::empty(2)).is_empty());
    }

    #[test]
    fn shared_namespace() {
        let err = Net::new(
            "n",
            vec![Place::new("x")],
            vec![Transition::new("x")],
            &[("x", &["x"], &[])],
        )
        .unwrap_err();
        assert_eq!(err, NetError::DuplicateId("x".into()));
    }

    #[test]
    fn isolated_transition_rejected() {
        let err = Net::new("n", vec![], vec![Transition::new("t")], &[]).unwrap_err();
        assert_eq!(err, NetError::IsolatedTransition("t".into()));
    }

    #[test]
    fn idents() {
        assert!(is_ident("s5"));
        assert!(is_ident("_x1"));
        assert!(!is_ident("5s"));
        assert!(!is_ident(""));
        assert!(!is_ident("a-b"));
    }
}
