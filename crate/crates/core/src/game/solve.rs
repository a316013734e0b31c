use std::collections::{BTreeMap, HashMap, VecDeque};
use std::time::{Duration, Instant};

use serde::Serialize;

use super::arena::{attractor, Attractor};
use super::strategy_net::{strategy_net, StrategyNet};
use super::{GameError, GameState, MoveLabel, PetriGame, Player};
use crate::control::Control;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameOptions {
    pub state_cap: usize,
    /// Leave never-firing transitions out of commitments.
    pub prune: bool,
}

impl Default for GameOptions {
    fn default() -> Self {
        Self {
            state_cap: 1_000_000,
            prune: true,
        }
    }
}

/// The explicit game graph reachable from the initial state.
#[derive(Debug, Clone)]
pub struct TwoPlayerGame {
    pub states: Vec<GameState>,
    pub index: HashMap<GameState, usize>,
    pub moves: Vec<Vec<(MoveLabel, usize)>>,
    pub initial: usize,
}

impl TwoPlayerGame {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn owners(&self) -> Vec<Player> {
        self.states.iter().map(|s| s.turn()).collect()
    }

    pub fn successor_lists(&self) -> Vec<Vec<usize>> {
        self.moves
            .iter()
            .map(|ms| ms.iter().map(|(_, t)| *t).collect())
            .collect()
    }

    pub fn bad_states(&self) -> Vec<bool> {
        self.states.iter().map(|s| s.bad).collect()
    }

    pub fn move_count(&self) -> usize {
        self.moves.iter().map(Vec::len).sum()
    }
}

/// Breadth-first closure of the move relation from the initial state.
pub fn build_game(
    pg: &PetriGame,
    options: &GameOptions,
    control: &Control,
) -> Result<TwoPlayerGame, GameError> {
    let init = pg.initial_state()?;
    let mut game = TwoPlayerGame {
        index: HashMap::from([(init.clone(), 0)]),
        states: vec![init],
        moves: Vec::new(),
        initial: 0,
    };
    let mut i = 0;
    while i < game.states.len() {
        if control.tick(i as u64) {
            return Err(GameError::Canceled);
        }
        let succ = pg.successors(&game.states[i], options.prune)?;
        let mut out = Vec::with_capacity(succ.len());
        for (label, target) in succ {
            let id = match game.index.get(&target) {
                Some(&id) => id,
                None => {
                    if game.states.len() >= options.state_cap {
                        return Err(GameError::StateSpaceLimit {
                            limit: options.state_cap,
                        });
                    }
                    let id = game.states.len();
                    game.index.insert(target.clone(), id);
                    game.states.push(target);
                    id
                }
            };
            out.push((label, id));
        }
        game.moves.push(out);
        i += 1;
    }
    control.set_progress(game.states.len() as u64);
    Ok(game)
}

/// Commitment choice per system state reachable under the strategy, as an
/// index into that state's move list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GameStrategy {
    pub choice: BTreeMap<usize, usize>,
}

fn move_key(pg: &PetriGame, label: &MoveLabel) -> Vec<Vec<String>> {
    let net = pg.net();
    match label {
        MoveLabel::Commit(a) => a
            .iter()
            .map(|(_, ts)| {
                let mut ids: Vec<String> = ts.iter().map(|&t| net.transition(t).id.clone()).collect();
                ids.sort();
                ids
            })
            .collect(),
        MoveLabel::Fire(t) => vec![vec![net.transition(*t).id.clone()]],
    }
}

/// Winning strategy for the system, choosing at every system state the
/// winning commitment with the lexicographically smallest transition ids.
/// Requires the initial state outside the attractor.
pub fn strategy_of(pg: &PetriGame, game: &TwoPlayerGame, attr: &Attractor) -> GameStrategy {
    let mut choice = BTreeMap::new();
    let mut seen = vec![false; game.len()];
    let mut queue = VecDeque::from([game.initial]);
    seen[game.initial] = true;
    while let Some(s) = queue.pop_front() {
        let next: Vec<usize> = match game.states[s].turn() {
            Player::System => {
                let best = game.moves[s]
                    .iter()
                    .enumerate()
                    .filter(|(_, (_, t))| !attr.contains(*t))
                    .min_by_key(|(_, (label, _))| move_key(pg, label))
                    .map(|(i, _)| i);
                match best {
                    Some(i) => {
                        choice.insert(s, i);
                        vec![game.moves[s][i].1]
                    }
                    None => Vec::new(),
                }
            }
            Player::Environment => game.moves[s].iter().map(|(_, t)| *t).collect(),
        };
        for t in next {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    GameStrategy { choice }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SynthesisVerdict {
    Realizable,
    Unrealizable,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GameStats {
    pub states: usize,
    pub moves: usize,
    pub system_states: usize,
    pub bad_states: usize,
    pub attractor_states: usize,
    pub strategy_states: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub verdict: SynthesisVerdict,
    pub stats: GameStats,
    pub game: TwoPlayerGame,
    pub strategy: Option<GameStrategy>,
    pub strategy_net: Option<StrategyNet>,
}

impl SynthesisResult {
    /// The result document shared by the command line and the server.
    pub fn to_json(&self, pg: &PetriGame) -> serde_json::Value {
        let net = pg.net();
        let choices: Vec<serde_json::Value> = self
            .strategy
            .iter()
            .flat_map(|st| st.choice.iter())
            .map(|(&s, &m)| {
                serde_json::json!({
                    "state": self.game.states[s].display(net).to_string(),
                    "move": self.game.moves[s][m].0.display(net).to_string(),
                })
            })
            .collect();
        serde_json::json!({
            "verdict": self.verdict,
            "strategyNet": self.strategy_net.as_ref().map(|sn| sn.to_json()),
            "gameStats": self.stats,
            "strategyChoices": choices,
        })
    }
}

/// Solves the safety game and, when realizable, extracts a strategy and its
/// strategy net.
pub fn solve(
    pg: &PetriGame,
    options: &GameOptions,
    control: &Control,
) -> Result<SynthesisResult, GameError> {
    let started = Instant::now();
    let game = build_game(pg, options, control)?;
    let owners = game.owners();
    let attr = attractor(&owners, &game.successor_lists(), &game.bad_states());
    let mut stats = GameStats {
        states: game.len(),
        moves: game.move_count(),
        system_states: owners.iter().filter(|&&o| o == Player::System).count(),
        bad_states: game.states.iter().filter(|s| s.bad).count(),
        attractor_states: attr.member.iter().filter(|&&b| b).count(),
        strategy_states: 0,
        elapsed: Duration::ZERO,
    };
    if attr.contains(game.initial) {
        stats.elapsed = started.elapsed();
        return Ok(SynthesisResult {
            verdict: SynthesisVerdict::Unrealizable,
            stats,
            game,
            strategy: None,
            strategy_net: None,
        });
    }
    let strategy = strategy_of(pg, &game, &attr);
    let sn = strategy_net(pg, &game, &strategy);
    stats.strategy_states = strategy.choice.len();
    stats.elapsed = started.elapsed();
    Ok(SynthesisResult {
        verdict: SynthesisVerdict::Realizable,
        stats,
        game,
        strategy: Some(strategy),
        strategy_net: Some(sn),
    })
}
