//! Random instance generators and independent reference implementations
//! shared by the integration tests.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use workbench_core::flowltl::{
    add_assumptions, eval_flow_formula, resolve, FlowSubformula, LassoRun, Ltl, ProductState,
    RunAtom, RunFormula,
};
use workbench_core::game::Player;
use workbench_core::net::{Marking, Net, Place, Transition};
use workbench_core::transit::{TrackerState, Transit, TransitNet, TransitSource};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Nets

/// Plain description of a net, independent of the library's index layout.
#[derive(Debug, Clone)]
pub struct RawNet {
    pub places: usize,
    pub initial: u64,
    /// (preset mask, postset mask)
    pub transitions: Vec<(u64, u64)>,
    pub weakfair: Vec<bool>,
    pub env: u64,
    pub bad: u64,
    /// (transition, source or None for start, target)
    pub transits: Vec<(usize, Option<usize>, usize)>,
}

impl RawNet {
    pub fn enabled(&self, m: u64, t: usize) -> bool {
        self.transitions[t].0 & !m == 0
    }

    /// `None` when the firing puts a second token on a place.
    pub fn fire(&self, m: u64, t: usize) -> Option<u64> {
        let (pre, post) = self.transitions[t];
        let rest = m & !pre;
        if rest & post != 0 {
            return None;
        }
        Some(rest | post)
    }

    /// Reachable markings, or `None` if the net is not safe.
    pub fn reachable(&self) -> Option<Vec<u64>> {
        let mut seen = HashSet::from([self.initial]);
        let mut order = vec![self.initial];
        let mut i = 0;
        while i < order.len() {
            let m = order[i];
            for t in 0..self.transitions.len() {
                if self.enabled(m, t) {
                    let n = self.fire(m, t)?;
                    if seen.insert(n) {
                        order.push(n);
                    }
                }
            }
            i += 1;
        }
        Some(order)
    }

    pub fn place_id(p: usize) -> String {
        format!("p{p}")
    }

    pub fn transition_id(t: usize) -> String {
        format!("t{t}")
    }

    pub fn to_net(&self) -> Net {
        let places: Vec<Place> = (0..self.places)
            .map(|p| {
                let mut pl = Place::new(Self::place_id(p));
                pl.initial = self.initial & (1 << p) != 0;
                if self.env & (1 << p) != 0 {
                    pl = pl.env();
                }
                if self.bad & (1 << p) != 0 {
                    pl = pl.bad();
                }
                pl
            })
            .collect();
        let transitions: Vec<Transition> = (0..self.transitions.len())
            .map(|t| {
                let tr = Transition::new(Self::transition_id(t));
                if self.weakfair[t] {
                    tr.weakfair()
                } else {
                    tr
                }
            })
            .collect();
        let ids = |mask: u64| -> Vec<String> {
            (0..self.places)
                .filter(|p| mask & (1 << p) != 0)
                .map(Self::place_id)
                .collect()
        };
        let flows_owned: Vec<(String, Vec<String>, Vec<String>)> = self
            .transitions
            .iter()
            .enumerate()
            .map(|(t, &(pre, post))| (Self::transition_id(t), ids(pre), ids(post)))
            .collect();
        let pre_refs: Vec<Vec<&str>> = flows_owned
            .iter()
            .map(|(_, pre, _)| pre.iter().map(String::as_str).collect())
            .collect();
        let post_refs: Vec<Vec<&str>> = flows_owned
            .iter()
            .map(|(_, _, post)| post.iter().map(String::as_str).collect())
            .collect();
        let flows: Vec<(&str, &[&str], &[&str])> = flows_owned
            .iter()
            .enumerate()
            .map(|(i, (t, _, _))| (t.as_str(), pre_refs[i].as_slice(), post_refs[i].as_slice()))
            .collect();
        Net::new("random", places, transitions, &flows).expect("generated net is valid")
    }

    pub fn to_transit_net(&self) -> TransitNet {
        let net = self.to_net();
        let mut table = vec![Vec::new(); self.transitions.len()];
        for &(t, src, dst) in &self.transits {
            table[t].push(Transit {
                source: src.map_or(TransitSource::Start, TransitSource::Place),
                target: dst,
            });
        }
        TransitNet::new(net, table).expect("generated transits are valid")
    }
}

fn random_mask(rng: &mut TestRng, n: usize, p: f64) -> u64 {
    (0..n).filter(|_| rng.gen_bool(p)).fold(0, |m, i| m | (1 << i))
}

/// Random safe net with transits. Every transition has a non-empty preset.
pub fn random_transit_net(rng: &mut TestRng, max_places: usize, max_transitions: usize) -> RawNet {
    loop {
        let places = rng.gen_range(2..=max_places);
        let nt = rng.gen_range(1..=max_transitions);
        let mut transitions = Vec::new();
        for _ in 0..nt {
            let mut pre = random_mask(rng, places, 0.4);
            if pre == 0 {
                pre = 1 << rng.gen_range(0..places);
            }
            let post = random_mask(rng, places, 0.4);
            transitions.push((pre, post));
        }
        let mut transits = Vec::new();
        for (t, &(pre, post)) in transitions.iter().enumerate() {
            for dst in (0..places).filter(|d| post & (1 << d) != 0) {
                if rng.gen_bool(0.3) {
                    transits.push((t, None, dst));
                }
                for src in (0..places).filter(|s| pre & (1 << s) != 0) {
                    if rng.gen_bool(0.4) {
                        transits.push((t, Some(src), dst));
                    }
                }
            }
        }
        let raw = RawNet {
            places,
            initial: random_mask(rng, places, 0.5),
            weakfair: (0..nt).map(|_| rng.gen_bool(0.35)).collect(),
            transitions,
            env: 0,
            bad: 0,
            transits,
        };
        if raw.reachable().is_some() {
            return raw;
        }
    }
}

// ---------------------------------------------------------------------------
// Formulas

pub fn random_ltl<A: Clone>(rng: &mut TestRng, atoms: &[A], depth: usize) -> Ltl<A> {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..12) {
            0 => Ltl::True,
            1 => Ltl::False,
            _ => Ltl::Atom(atoms.choose(rng).expect("atoms").clone()),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..10) {
        0 => Ltl::not(random_ltl(rng, atoms, d)),
        1 => Ltl::and(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d)),
        2 => Ltl::or(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d)),
        3 => Ltl::implies(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d)),
        4 => Ltl::next(random_ltl(rng, atoms, d)),
        5 => Ltl::finally(random_ltl(rng, atoms, d)),
        6 => Ltl::globally(random_ltl(rng, atoms, d)),
        7 => Ltl::until(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d)),
        8 => Ltl::release(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d)),
        _ => Ltl::not(Ltl::until(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d))),
    }
}

/// Random run formula of depth at most 3 over the nodes of `raw`, with at
/// most one flow subformula, placed positively outside temporal operators.
pub fn random_run_formula(rng: &mut TestRng, raw: &RawNet) -> RunFormula {
    let mut names: Vec<String> = (0..raw.places).map(RawNet::place_id).collect();
    names.extend((0..raw.transitions.len()).map(RawNet::transition_id));
    let run = |rng: &mut TestRng, d: usize| -> RunFormula {
        random_ltl(rng, &names, d).map_atoms(&mut |n| RunAtom::Name(n.clone()))
    };
    let flow = |rng: &mut TestRng, d: usize| -> RunFormula {
        Ltl::Atom(RunAtom::Flow(FlowSubformula {
            body: random_ltl(rng, &names, d),
        }))
    };
    match rng.gen_range(0..6) {
        0 | 1 => flow(rng, 2),
        2 => Ltl::implies(run(rng, 2), flow(rng, 2)),
        3 => Ltl::or(run(rng, 2), flow(rng, 2)),
        4 => Ltl::and(run(rng, 1), flow(rng, 2)),
        _ => run(rng, 3),
    }
}

// ---------------------------------------------------------------------------
// Flow-LTL oracle: enumerate lassos of the marking-and-tracker graph and
// evaluate the direct semantics on each.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum OTracker {
    Idle,
    At(usize),
    Ended(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct OState {
    marking: u64,
    trackers: Vec<OTracker>,
}

fn oracle_successors(raw: &RawNet, s: &OState) -> Vec<(Option<usize>, OState)> {
    let enabled: Vec<usize> = (0..raw.transitions.len())
        .filter(|&t| raw.enabled(s.marking, t))
        .collect();
    if enabled.is_empty() {
        return vec![(None, s.clone())];
    }
    let mut out = Vec::new();
    for t in enabled {
        let m = raw.fire(s.marking, t).expect("safe net");
        let (pre, _) = raw.transitions[t];
        let mut combos: Vec<Vec<OTracker>> = vec![vec![]];
        for &tr in &s.trackers {
            let options: Vec<OTracker> = match tr {
                OTracker::Idle => {
                    let mut v = vec![OTracker::Idle];
                    v.extend(
                        raw.transits
                            .iter()
                            .filter(|&&(tt, src, _)| tt == t && src.is_none())
                            .map(|&(_, _, d)| OTracker::At(d)),
                    );
                    v
                }
                OTracker::At(p) if pre & (1 << p) != 0 => {
                    let v: Vec<OTracker> = raw
                        .transits
                        .iter()
                        .filter(|&&(tt, src, _)| tt == t && src == Some(p))
                        .map(|&(_, _, d)| OTracker::At(d))
                        .collect();
                    if v.is_empty() {
                        vec![OTracker::Ended(p)]
                    } else {
                        v
                    }
                }
                other => vec![other],
            };
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
            out.push((Some(t), OState { marking: m, trackers }));
        }
    }
    out
}

fn to_product(raw: &RawNet, s: &OState) -> ProductState {
    ProductState {
        marking: Marking::from_places(raw.places, (0..raw.places).filter(|p| s.marking & (1 << p) != 0)),
        trackers: s
            .trackers
            .iter()
            .map(|t| match *t {
                OTracker::Idle => TrackerState::Idle,
                OTracker::At(p) => TrackerState::At(p),
                OTracker::Ended(p) => TrackerState::Ended(p),
            })
            .collect(),
    }
}

/// A lasso of at most `max_len` positions violating `phi` under the
/// assumptions, as (states, fired, loop start); `None` if there is none.
pub fn oracle_counterexample(
    raw: &RawNet,
    tn: &TransitNet,
    phi: &RunFormula,
    max_len: usize,
) -> Option<(Vec<ProductState>, Vec<Option<usize>>, usize)> {
    let resolved = resolve(tn.net(), &add_assumptions(tn.net(), phi)).expect("atoms resolve");
    let init = OState {
        marking: raw.initial,
        trackers: vec![OTracker::Idle; resolved.flows.len()],
    };
    let mut succ_cache: HashMap<OState, Vec<(Option<usize>, OState)>> = HashMap::new();
    let mut path: Vec<OState> = vec![init];
    let mut fired: Vec<Option<usize>> = Vec::new();

    fn dfs(
        raw: &RawNet,
        tn: &TransitNet,
        resolved: &workbench_core::flowltl::ResolvedFormula,
        cache: &mut HashMap<OState, Vec<(Option<usize>, OState)>>,
        path: &mut Vec<OState>,
        fired: &mut Vec<Option<usize>>,
        max_len: usize,
    ) -> Option<(Vec<ProductState>, Vec<Option<usize>>, usize)> {
        let last = path.last().expect("non-empty path").clone();
        let succ = cache
            .entry(last.clone())
            .or_insert_with(|| oracle_successors(raw, &last))
            .clone();
        // close the loop
        for (f, s) in &succ {
            for k in 0..path.len() {
                if path[k] == *s {
                    let states: Vec<ProductState> = path.iter().map(|s| to_product(raw, s)).collect();
                    let mut fs = fired.clone();
                    fs.push(*f);
                    let run = LassoRun {
                        states: &states,
                        fired: &fs,
                        loop_start: k,
                    };
                    if !eval_flow_formula(tn, resolved, &run) {
                        return Some((states, fs, k));
                    }
                }
            }
        }
        if path.len() >= max_len {
            return None;
        }
        for (f, s) in succ {
            path.push(s);
            fired.push(f);
            if let Some(r) = dfs(raw, tn, resolved, cache, path, fired, max_len) {
                return Some(r);
            }
            path.pop();
            fired.pop();
        }
        None
    }

    dfs(raw, tn, &resolved, &mut succ_cache, &mut path, &mut fired, max_len)
}

// ---------------------------------------------------------------------------
// Games

/// Random game: up to three system places, up to two environment places
/// sharing one token, one bad place and up to five transitions. A
/// transition takes at most one environment place and returns the
/// environment token only if it took it.
pub fn random_game(rng: &mut TestRng) -> RawNet {
    loop {
        let sys = rng.gen_range(1..=3);
        let envs = if rng.gen_bool(0.6) { 1 } else { 2 };
        let places = sys + envs + 1;
        let env_mask: u64 = ((1 << envs) - 1) << sys;
        let bad_place = places - 1;
        let env_place = |rng: &mut TestRng| sys + rng.gen_range(0..envs);
        let nt = rng.gen_range(3..=5);
        let mut transitions = Vec::new();
        for _ in 0..nt {
            let mut pre = random_mask(rng, sys, 0.45);
            let mut post = random_mask(rng, sys, 0.5);
            if rng.gen_bool(0.5) {
                post |= pre;
            }
            if rng.gen_bool(0.7) {
                pre |= 1 << env_place(rng);
                if rng.gen_bool(0.85) {
                    post |= 1 << env_place(rng);
                }
            }
            if pre == 0 {
                pre = 1 << rng.gen_range(0..sys);
            }
            if rng.gen_bool(0.35) {
                post |= 1 << bad_place;
            }
            transitions.push((pre, post));
        }
        let initial = random_mask(rng, sys, 0.7) | (1 << env_place(rng));
        if !(0..nt).any(|t| transitions[t].0 & !initial == 0) {
            continue;
        }
        let raw = RawNet {
            places,
            initial,
            weakfair: vec![false; nt],
            transitions,
            env: env_mask,
            bad: 1 << bad_place,
            transits: Vec::new(),
        };
        let Some(reach) = raw.reachable() else { continue };
        if reach.iter().all(|m| (m & env_mask).count_ones() <= 1) {
            return raw;
        }
    }
}

/// Game state of the reference semantics: marking plus a commitment mask
/// per marked system place (`None` while undecided).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RefState {
    pub marking: u64,
    pub commit: Vec<Option<u64>>,
}

pub struct RefGame<'a> {
    pub raw: &'a RawNet,
}

impl RefGame<'_> {
    fn is_sys(&self, p: usize) -> bool {
        self.raw.env & (1 << p) == 0
    }

    fn post_transitions(&self, p: usize) -> u64 {
        (0..self.raw.transitions.len())
            .filter(|&t| self.raw.transitions[t].0 & (1 << p) != 0)
            .fold(0, |m, t| m | (1 << t))
    }

    pub fn initial(&self) -> RefState {
        RefState {
            marking: self.raw.initial,
            commit: vec![None; self.raw.places],
        }
    }

    pub fn turn(&self, s: &RefState) -> Player {
        let pending = (0..self.raw.places)
            .any(|p| s.marking & (1 << p) != 0 && self.is_sys(p) && s.commit[p].is_none());
        if pending {
            Player::System
        } else {
            Player::Environment
        }
    }

    fn allowed(&self, s: &RefState) -> Vec<usize> {
        (0..self.raw.transitions.len())
            .filter(|&t| {
                let pre = self.raw.transitions[t].0;
                pre & !s.marking == 0
                    && (0..self.raw.places).all(|p| {
                        pre & (1 << p) == 0
                            || !self.is_sys(p)
                            || s.commit[p].is_some_and(|c| c & (1 << t) != 0)
                    })
            })
            .collect()
    }

    pub fn is_bad(&self, s: &RefState) -> bool {
        if s.marking & self.raw.bad != 0 {
            return true;
        }
        let net_moves = (0..self.raw.transitions.len()).any(|t| self.raw.enabled(s.marking, t));
        self.turn(s) == Player::Environment && self.allowed(s).is_empty() && net_moves
    }

    /// All moves, without pruning. Commitments range over every subset of
    /// the place's post-transitions.
    pub fn moves(&self, s: &RefState) -> Vec<RefState> {
        if self.is_bad(s) {
            return Vec::new();
        }
        match self.turn(s) {
            Player::System => {
                let pending: Vec<usize> = (0..self.raw.places)
                    .filter(|&p| s.marking & (1 << p) != 0 && self.is_sys(p) && s.commit[p].is_none())
                    .collect();
                let mut out = vec![s.clone()];
                for p in pending {
                    let post = self.post_transitions(p);
                    let mut next = Vec::new();
                    for st in &out {
                        // all submasks of post
                        let mut sub = post;
                        loop {
                            let mut c = st.clone();
                            c.commit[p] = Some(sub);
                            next.push(c);
                            if sub == 0 {
                                break;
                            }
                            sub = (sub - 1) & post;
                        }
                    }
                    out = next;
                }
                out
            }
            Player::Environment => self
                .allowed(s)
                .into_iter()
                .map(|t| {
                    let (pre, post) = self.raw.transitions[t];
                    let m = self.raw.fire(s.marking, t).expect("safe game");
                    let mut commit = s.commit.clone();
                    for (p, c) in commit.iter_mut().enumerate() {
                        let bit = 1 << p;
                        if m & bit == 0 || (post & bit != 0 && pre & bit == 0) {
                            *c = None;
                        }
                    }
                    RefState { marking: m, commit }
                })
                .collect(),
        }
    }

    /// Whether some memoryless strategy avoids bad states forever, by
    /// backtracking over the commitment choices at reachable system states.
    pub fn brute_force_realizable(&self) -> bool {
        let mut sigma: HashMap<RefState, RefState> = HashMap::new();
        self.search(&mut sigma)
    }

    fn search(&self, sigma: &mut HashMap<RefState, RefState>) -> bool {
        let mut seen = HashSet::new();
        let mut stack = vec![self.initial()];
        let mut undecided = None;
        while let Some(s) = stack.pop() {
            if !seen.insert(s.clone()) {
                continue;
            }
            if self.is_bad(&s) {
                return false;
            }
            match self.turn(&s) {
                Player::System => match sigma.get(&s) {
                    Some(t) => stack.push(t.clone()),
                    None => {
                        undecided = Some(s);
                        break;
                    }
                },
                Player::Environment => stack.extend(self.moves(&s)),
            }
        }
        let Some(s) = undecided else { return true };
        for m in self.moves(&s) {
            sigma.insert(s.clone(), m);
            if self.search(sigma) {
                return true;
            }
        }
        sigma.remove(&s);
        false
    }

    /// Number of states reachable from the initial state.
    pub fn closure_size(&self) -> usize {
        let mut seen = HashSet::from([self.initial()]);
        let mut stack = vec![self.initial()];
        while let Some(s) = stack.pop() {
            for n in self.moves(&s) {
                if seen.insert(n.clone()) {
                    stack.push(n);
                }
            }
        }
        seen.len()
    }
}

// ---------------------------------------------------------------------------
// Arenas

pub fn random_arena(rng: &mut TestRng, max_states: usize) -> (Vec<Player>, Vec<Vec<usize>>, Vec<bool>) {
    let n = rng.gen_range(1..=max_states);
    let owner: Vec<Player> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { Player::System } else { Player::Environment })
        .collect();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let k = rng.gen_range(0..=3);
            (0..k).map(|_| rng.gen_range(0..n)).collect()
        })
        .collect();
    let target: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.1)).collect();
    (owner, succ, target)
}

/// Random ultimately periodic word over `atoms` atoms: (valuations, loop start).
pub fn random_word(rng: &mut TestRng, atoms: usize, max_len: usize) -> (Vec<u32>, usize) {
    let len = rng.gen_range(1..=max_len);
    let vals = (0..len).map(|_| rng.gen_range(0..1u32 << atoms)).collect();
    (vals, rng.gen_range(0..len))
}

// ---------------------------------------------------------------------------
// One Flow-LTL oracle comparison

/// Lasso length explored by the enumeration oracle.
pub const ORACLE_LASSO_BOUND: usize = 8;

/// Checks one random (net, formula) pair against the lasso oracle. The
/// oracle bound is raised to the checker's witness length when there is one.
pub fn flow_pair(seed: u64) -> Result<workbench_core::flowltl::Verdict, String> {
    use workbench_core::flowltl::{check, replay, CheckOptions, Verdict};
    let mut r = rng(seed);
    let raw = random_transit_net(&mut r, 4, 4);
    let tn = raw.to_transit_net();
    let phi = random_run_formula(&mut r, &raw);
    let res = check(&tn, &phi, &CheckOptions::default(), &workbench_core::Control::new())
        .map_err(|e| format!("seed {seed}: {phi}: check failed: {e}"))?;
    let bound = match &res.counterexample {
        Some(l) => ORACLE_LASSO_BOUND.max(l.positions().0.len()),
        None => ORACLE_LASSO_BOUND,
    };
    let oracle = oracle_counterexample(&raw, &tn, &phi, bound);
    match (res.verdict, oracle.is_some()) {
        (Verdict::Satisfied, false) => Ok(Verdict::Satisfied),
        (Verdict::Unsatisfied, true) => {
            let lasso = res.counterexample.as_ref().expect("counterexample");
            replay(&tn, &phi, lasso).map_err(|e| format!("seed {seed}: {phi}: replay: {e}"))?;
            Ok(Verdict::Unsatisfied)
        }
        (v, o) => Err(format!(
            "seed {seed}: {phi} on {raw:?}: checker {v:?}, oracle violation {o}"
        )),
    }
}

// ---------------------------------------------------------------------------
// LTL-to-Büchi comparison

/// Translates one random formula over three atoms and compares the
/// automaton with the direct evaluator on `words` random lassos.
pub fn buchi_formula_case(seed: u64, words: usize) -> Result<(), String> {
    use workbench_core::flowltl::{eval_lasso, ltl_to_buchi};
    let mut r = rng(seed);
    let depth = r.gen_range(1..=4);
    let f = random_ltl(&mut r, &[0u32, 1, 2], depth);
    let b = ltl_to_buchi(&f).map_err(|e| format!("{f:?}: {e}"))?;
    for _ in 0..words {
        let (vals, l) = random_word(&mut r, 3, 6);
        let atom = |a: &u32, i: usize| vals[i] & (1 << a) != 0;
        let want = eval_lasso(&f, vals.len(), l, &atom);
        let got = b.accepts_lasso(vals.len(), l, &atom);
        if want != got {
            return Err(format!(
                "seed {seed}: {f:?} on {vals:?} loop {l}: evaluator {want}, automaton {got}"
            ));
        }
    }
    Ok(())
}

/// Iterate-to-fixpoint environment attractor.
pub fn fixpoint_attractor(owner: &[Player], succ: &[Vec<usize>], target: &[bool]) -> Vec<bool> {
    let mut set = target.to_vec();
    loop {
        let next: Vec<bool> = (0..owner.len())
            .map(|s| {
                set[s]
                    || match owner[s] {
                        Player::Environment => succ[s].iter().any(|&t| set[t]),
                        Player::System => !succ[s].is_empty() && succ[s].iter().all(|&t| set[t]),
                    }
            })
            .collect();
        if next == set {
            return set;
        }
        set = next;
    }
}

/// Upper bound on the reference game closure for brute-force comparison.
pub const BRUTE_FORCE_STATES: usize = 400;

/// Compares `solve` with brute-force strategy search on one random game.
/// `Ok(None)` when the game is too large for the brute-force search.
pub fn game_case(seed: u64) -> Result<Option<bool>, String> {
    use workbench_core::game::{solve, GameOptions, PetriGame, SynthesisVerdict};
    let mut r = rng(seed);
    let raw = random_game(&mut r);
    let reference = RefGame { raw: &raw };
    if reference.closure_size() > BRUTE_FORCE_STATES {
        return Ok(None);
    }
    let pg = PetriGame::new(raw.to_net()).map_err(|e| format!("seed {seed}: {e}"))?;
    let res = solve(&pg, &GameOptions::default(), &workbench_core::Control::new())
        .map_err(|e| format!("seed {seed}: {e}"))?;
    let want = reference.brute_force_realizable();
    let got = res.verdict == SynthesisVerdict::Realizable;
    if want != got {
        return Err(format!("seed {seed}: {raw:?}: solve {got}, brute force {want}"));
    }
    if let Some(sn) = &res.strategy_net {
        sn.verify(&pg, 100_000)
            .map_err(|e| format!("seed {seed}: strategy net: {e}"))?;
    }
    Ok(Some(got))
}
