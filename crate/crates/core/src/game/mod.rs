//! Petri games with safety objectives.
//!
//! System places commit to the transitions they allow; the environment
//! schedules every firing. A state is bad when a bad place is marked or the
//! system blocks a net that could still move.

mod arena;
mod explore;
mod solve;
mod strategy_net;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::net::{parse_net, Marking, Net, NetError, ParseError, PlaceKind, ReachGraph};

pub use arena::{attractor, naive_attractor, Attractor};
pub use explore::{ExploreView, Explorer, MoveView, PathStep};
pub use solve::{
    build_game, solve, strategy_of, GameOptions, GameStats, GameStrategy, SynthesisResult,
    SynthesisVerdict, TwoPlayerGame,
};
pub use strategy_net::{strategy_net, StrategyNet, StrategyNetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("no environment place")]
    NoEnvironmentPlayer,
    #[error("marking {{{}}} holds more than one environment token", .0.join(","))]
    MultipleEnvironmentTokens(Vec<String>),
    #[error("game state limit of {limit} states reached")]
    StateSpaceLimit { limit: usize },
    #[error("canceled")]
    Canceled,
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("invalid move: {0}")]
    InvalidMove(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Player {
    System,
    Environment,
}

/// A Petri game: a safe net whose place kinds split system and environment.
#[derive(Debug, Clone, PartialEq)]
pub struct PetriGame {
    net: Net,
    bad: Vec<usize>,
    /// Transitions that can never fire; commitments ignore them when pruning.
    live: Vec<bool>,
}

impl PetriGame {
    pub fn new(net: Net) -> Result<Self, GameError> {
        if !net.places().iter().any(|p| p.kind == PlaceKind::Environment) {
            return Err(GameError::NoEnvironmentPlayer);
        }
        let bad = (0..net.place_count()).filter(|&p| net.place(p).bad).collect();
        let mut live = vec![true; net.transition_count()];
        if let Ok(g) = ReachGraph::full(&net, 100_000) {
            if g.is_complete() {
                live = vec![false; net.transition_count()];
                for (_, t, _) in g.edges() {
                    live[t] = true;
                }
            }
        }
        Ok(Self { net, bad, live })
    }

    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn bad_places(&self) -> &[usize] {
        &self.bad
    }

    pub fn is_env(&self, p: usize) -> bool {
        self.net.place(p).kind == PlaceKind::Environment
    }

    /// Whether `t` fires in some reachable marking of the net.
    pub fn is_live(&self, t: usize) -> bool {
        self.live[t]
    }

    pub fn environment_places(&self) -> Vec<usize> {
        (0..self.net.place_count()).filter(|&p| self.is_env(p)).collect()
    }

    pub fn system_places(&self) -> Vec<usize> {
        (0..self.net.place_count()).filter(|&p| !self.is_env(p)).collect()
    }

    /// Game state for a marking with every system token undecided.
    pub fn state_of(&self, m: &Marking) -> Result<GameState, GameError> {
        let mut env = None;
        let mut entries = BTreeMap::new();
        for p in m.iter() {
            if self.is_env(p) {
                if env.is_some() {
                    return Err(GameError::MultipleEnvironmentTokens(self.net.marking_names(m)));
                }
                env = Some(p);
            } else {
                entries.insert(p, Commitment::Pending);
            }
        }
        Ok(self.finish(entries, env))
    }

    pub fn initial_state(&self) -> Result<GameState, GameError> {
        self.state_of(&self.net.initial_marking())
    }

    fn finish(&self, entries: BTreeMap<usize, Commitment>, env: Option<usize>) -> GameState {
        let mut s = GameState {
            entries,
            env,
            bad: false,
        };
        let m = s.marking(&self.net);
        s.bad = self.bad.iter().any(|&p| m.contains(p))
            || (s.turn() == Player::Environment
                && self.fire_moves(&s).is_empty()
                && !self.net.enabled(&m).is_empty());
        s
    }

    /// Transitions the environment may fire in `s`.
    pub fn fire_moves(&self, s: &GameState) -> Vec<usize> {
        let m = s.marking(&self.net);
        self.net
            .enabled(&m)
            .into_iter()
            .filter(|&t| {
                self.net.pre(t).iter().all(|&p| match s.entries.get(&p) {
                    None => true,
                    Some(Commitment::Committed(ts)) => ts.binary_search(&t).is_ok(),
                    Some(Commitment::Pending) => false,
                })
            })
            .collect()
    }

    /// Candidate commitments of a system place: all subsets of its live
    /// post-transitions (or of all of them with `prune` off), smallest first.
    pub fn commitment_options(&self, p: usize, prune: bool) -> Vec<Vec<usize>> {
        let post: Vec<usize> = self
            .net
            .post_transitions(p)
            .into_iter()
            .filter(|&t| !prune || self.live[t])
            .collect();
        let mut out: Vec<Vec<usize>> = (0u64..1 << post.len())
            .map(|mask| {
                post.iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &t)| t)
                    .collect()
            })
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    /// All moves from `s` with their targets; empty for bad states.
    pub fn successors(
        &self,
        s: &GameState,
        prune: bool,
    ) -> Result<Vec<(MoveLabel, GameState)>, GameError> {
        if s.bad {
            return Ok(Vec::new());
        }
        match s.turn() {
            Player::System => {
                let pending: Vec<usize> = s
                    .entries
                    .iter()
                    .filter(|(_, c)| **c == Commitment::Pending)
                    .map(|(&p, _)| p)
                    .collect();
                let options: Vec<Vec<Vec<usize>>> = pending
                    .iter()
                    .map(|&p| self.commitment_options(p, prune))
                    .collect();
                let mut out = Vec::new();
                let mut choice = vec![0usize; pending.len()];
                loop {
                    let assignment: Vec<(usize, Vec<usize>)> = pending
                        .iter()
                        .zip(&choice)
                        .enumerate()
                        .map(|(i, (&p, &c))| (p, options[i][c].clone()))
                        .collect();
                    let mut entries = s.entries.clone();
                    for (p, ts) in &assignment {
                        entries.insert(*p, Commitment::Committed(ts.clone()));
                    }
                    out.push((MoveLabel::Commit(assignment), self.finish(entries, s.env)));
                    // odometer over the choices, last place fastest
                    let mut i = pending.len();
                    loop {
                        if i == 0 {
                            return Ok(out);
                        }
                        i -= 1;
                        choice[i] += 1;
                        if choice[i] < options[i].len() {
                            break;
                        }
                        choice[i] = 0;
                    }
                }
            }
            Player::Environment => {
                let m = s.marking(&self.net);
                let mut out = Vec::new();
                for t in self.fire_moves(s) {
                    let next = self.net.fire(&m, t)?;
                    let pre = self.net.pre(t);
                    let post = self.net.post(t);
                    let mut env = None;
                    let mut entries = BTreeMap::new();
                    for p in next.iter() {
                        if self.is_env(p) {
                            if env.is_some() {
                                return Err(GameError::MultipleEnvironmentTokens(
                                    self.net.marking_names(&next),
                                ));
                            }
                            env = Some(p);
                            continue;
                        }
                        let fresh = post.binary_search(&p).is_ok() && pre.binary_search(&p).is_err();
                        let c = if fresh {
                            Commitment::Pending
                        } else {
                            s.entries[&p].clone()
                        };
                        entries.insert(p, c);
                    }
                    out.push((MoveLabel::Fire(t), self.finish(entries, env)));
                }
                Ok(out)
            }
        }
    }
}

pub fn parse_game(text: &str) -> Result<PetriGame, GameError> {
    PetriGame::new(parse_net(text)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Commitment {
    Pending,
    /// Allowed transitions, sorted by index.
    Committed(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameState {
    /// One entry per marked system place.
    pub entries: BTreeMap<usize, Commitment>,
    pub env: Option<usize>,
    pub bad: bool,
}

impl GameState {
    pub fn turn(&self) -> Player {
        if self.entries.values().any(|c| *c == Commitment::Pending) {
            Player::System
        } else {
            Player::Environment
        }
    }

    pub fn marking(&self, net: &Net) -> Marking {
        Marking::from_places(net.place_count(), self.entries.keys().copied().chain(self.env))
    }

    pub fn display<'a>(&'a self, net: &'a Net) -> StateDisplay<'a> {
        StateDisplay { state: self, net }
    }

    pub fn to_json(&self, net: &Net) -> serde_json::Value {
        let tr = |t: &usize| net.transition(*t).id.clone();
        serde_json::json!({
            "entries": self.entries.iter().map(|(&p, c)| serde_json::json!({
                "place": net.place(p).id,
                "commitment": match c {
                    Commitment::Pending => serde_json::json!("PENDING"),
                    Commitment::Committed(ts) => serde_json::json!(ts.iter().map(tr).collect::<Vec<_>>()),
                },
            })).collect::<Vec<_>>(),
            "env": self.env.map(|p| net.place(p).id.clone()),
            "turn": self.turn(),
            "bad": self.bad,
        })
    }
}

pub struct StateDisplay<'a> {
    state: &'a GameState,
    net: &'a Net,
}

impl fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(e) = self.state.env {
            parts.push(self.net.place(e).id.clone());
        }
        for (&p, c) in &self.state.entries {
            let id = &self.net.place(p).id;
            parts.push(match c {
                Commitment::Pending => format!("{id}:?"),
                Commitment::Committed(ts) => format!(
                    "{id}:{{{}}}",
                    ts.iter()
                        .map(|&t| self.net.transition(t).id.as_str())
                        .collect::<Vec<_>>()
                        .join(",")
                ),
            });
        }
        write!(f, "[{}]", parts.join(" "))?;
        if self.state.bad {
            f.write_str(" bad")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveLabel {
    /// Commitments for every pending place, by place index.
    Commit(Vec<(usize, Vec<usize>)>),
    Fire(usize),
}

impl MoveLabel {
    pub fn display<'a>(&'a self, net: &'a Net) -> MoveDisplay<'a> {
        MoveDisplay { label: self, net }
    }
}

pub struct MoveDisplay<'a> {
    label: &'a MoveLabel,
    net: &'a Net,
}

impl fmt::Display for MoveDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            MoveLabel::Fire(t) => write!(f, "FIRE({})", self.net.transition(*t).id),
            MoveLabel::Commit(a) => {
                let parts: Vec<String> = a
                    .iter()
                    .map(|(p, ts)| {
                        let ts: Vec<&str> =
                            ts.iter().map(|&t| self.net.transition(t).id.as_str()).collect();
                        format!("{}:{{{}}}", self.net.place(*p).id, ts.join(","))
                    })
                    .collect();
                write!(f, "COMMIT({})", parts.join(" "))
            }
        }
    }
}
