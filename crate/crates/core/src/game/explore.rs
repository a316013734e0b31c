//! Interactive stepping through a game, one move at a time.

use std::collections::BTreeMap;

use serde::Serialize;

use super::arena::{attractor, Attractor};
use super::solve::{build_game, GameOptions, TwoPlayerGame};
use super::{GameError, PetriGame, Player};
use crate::control::Control;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStep {
    #[serde(rename = "move")]
    pub label: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoveView {
    pub index: usize,
    #[serde(rename = "move")]
    pub label: String,
    pub target: String,
    /// The environment can force a bad state after this move.
    pub losing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExploreView {
    pub state: serde_json::Value,
    pub turn: Player,
    pub moves: Vec<MoveView>,
    /// The current state lies in the environment attractor.
    pub flagged: bool,
    /// Moves the environment uses to force a bad state, when flagged.
    pub violating_path: Option<Vec<PathStep>>,
    pub depth: usize,
    /// System choices made so far, keyed by state description.
    pub picks: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct Explorer {
    game: TwoPlayerGame,
    succ: Vec<Vec<usize>>,
    attr: Attractor,
    cursor: usize,
    picks: BTreeMap<usize, usize>,
    history: Vec<(usize, BTreeMap<usize, usize>)>,
}

impl Explorer {
    pub fn new(pg: &PetriGame, options: &GameOptions, control: &Control) -> Result<Self, GameError> {
        let game = build_game(pg, options, control)?;
        let succ = game.successor_lists();
        let attr = attractor(&game.owners(), &succ, &game.bad_states());
        Ok(Self {
            cursor: game.initial,
            game,
            succ,
            attr,
            picks: BTreeMap::new(),
            history: Vec::new(),
        })
    }

    pub fn game(&self) -> &TwoPlayerGame {
        &self.game
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn is_flagged(&self) -> bool {
        self.attr.contains(self.cursor)
    }

    /// Path from `from` into a bad state following the attractor ranks.
    pub fn violating_path(&self, pg: &PetriGame, from: usize) -> Option<Vec<PathStep>> {
        if !self.attr.contains(from) {
            return None;
        }
        let net = pg.net();
        let mut path = Vec::new();
        let mut s = from;
        while let Some(t) = self.attr.step(&self.succ, s) {
            let (label, _) = self.game.moves[s]
                .iter()
                .find(|(_, x)| *x == t)
                .expect("step follows a move");
            path.push(PathStep {
                label: label.display(net).to_string(),
                state: self.game.states[t].display(net).to_string(),
            });
            s = t;
        }
        Some(path)
    }

    /// Takes move `index` from the current state. At system states this
    /// records the choice as part of the user's strategy.
    pub fn pick(&mut self, pg: &PetriGame, index: usize) -> Result<ExploreView, GameError> {
        let Some(&(_, target)) = self.game.moves[self.cursor].get(index) else {
            return Err(GameError::InvalidMove(format!(
                "state has {} moves, got index {index}",
                self.game.moves[self.cursor].len()
            )));
        };
        self.history.push((self.cursor, self.picks.clone()));
        if self.game.states[self.cursor].turn() == Player::System {
            self.picks.insert(self.cursor, index);
        }
        self.cursor = target;
        Ok(self.view(pg))
    }

    /// Returns to the state before the last pick; `false` at the start.
    pub fn undo(&mut self) -> bool {
        match self.history.pop() {
            Some((cursor, picks)) => {
                self.cursor = cursor;
                self.picks = picks;
                true
            }
            None => false,
        }
    }

    pub fn view(&self, pg: &PetriGame) -> ExploreView {
        let net = pg.net();
        let s = &self.game.states[self.cursor];
        ExploreView {
            state: s.to_json(net),
            turn: s.turn(),
            moves: self.game.moves[self.cursor]
                .iter()
                .enumerate()
                .map(|(index, (label, t))| MoveView {
                    index,
                    label: label.display(net).to_string(),
                    target: self.game.states[*t].display(net).to_string(),
                    losing: self.attr.contains(*t),
                })
                .collect(),
            flagged: self.is_flagged(),
            violating_path: self.violating_path(pg, self.cursor),
            depth: self.history.len(),
            picks: self
                .picks
                .iter()
                .map(|(&st, &m)| {
                    (
                        self.game.states[st].display(net).to_string(),
                        self.game.moves[st][m].0.display(net).to_string(),
                    )
                })
                .collect(),
        }
    }
}
