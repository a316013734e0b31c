//! Attractors on explicit two-player arenas.

use std::collections::VecDeque;

use super::Player;

/// Environment attractor: states from which the environment can force a
/// visit to the target. `rank[s]` bounds the number of moves needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attractor {
    pub member: Vec<bool>,
    pub rank: Vec<usize>,
}

impl Attractor {
    pub fn contains(&self, s: usize) -> bool {
        self.member[s]
    }

    /// A successor that makes progress towards the target: one with
    /// smaller rank. `None` for targets and states outside.
    pub fn step(&self, succ: &[Vec<usize>], s: usize) -> Option<usize> {
        if !self.member[s] || self.rank[s] == 0 {
            return None;
        }
        succ[s]
            .iter()
            .copied()
            .filter(|&t| self.member[t])
            .min_by_key(|&t| (self.rank[t], t))
    }
}

/// Least set containing `target`, every environment state with some
/// successor in the set and every system state with all successors in it.
/// A system state without successors is never added.
pub fn attractor(owner: &[Player], succ: &[Vec<usize>], target: &[bool]) -> Attractor {
    let n = owner.len();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for (s, ts) in succ.iter().enumerate() {
        count[s] = ts.len();
        for &t in ts {
            pred[t].push(s);
        }
    }
    let mut member = target.to_vec();
    let mut rank = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if member[s] {
            rank[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(t) = queue.pop_front() {
        for &s in &pred[t] {
            if member[s] {
                continue;
            }
            let join = match owner[s] {
                Player::Environment => true,
                Player::System => {
                    count[s] -= 1;
                    count[s] == 0
                }
            };
            if join {
                member[s] = true;
                rank[s] = rank[t] + 1;
                queue.push_back(s);
            }
        }
    }
    Attractor { member, rank }
}

/// Same fixpoint by plain iteration; for cross-checking.
pub fn naive_attractor(owner: &[Player], succ: &[Vec<usize>], target: &[bool]) -> Vec<bool> {
    let mut set = target.to_vec();
    loop {
        let mut changed = false;
        for s in 0..owner.len() {
            if set[s] {
                continue;
            }
            let add = match owner[s] {
                Player::Environment => succ[s].iter().any(|&t| set[t]),
                Player::System => !succ[s].is_empty() && succ[s].iter().all(|&t| set[t]),
            };
            if add {
                set[s] = true;
                changed = true;
            }
        }
        if !changed {
            return set;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_targets() {
        let owner = vec![Player::System, Player::Environment];
        let succ = vec![vec![1], vec![0]];
        assert_eq!(attractor(&owner, &succ, &[false, false]).member, vec![false, false]);
        assert_eq!(attractor(&owner, &succ, &[true, true]).member, vec![true, true]);
    }

    #[test]
    fn system_escapes() {
        // 0 (sys) -> 1 (bad) or 2 (safe loop)
        let owner = vec![Player::System, Player::Environment, Player::Environment];
        let succ = vec![vec![1, 2], vec![], vec![2]];
        let a = attractor(&owner, &succ, &[false, true, false]);
        assert_eq!(a.member, vec![false, true, false]);
        let owner = vec![Player::Environment, Player::Environment, Player::Environment];
        let a = attractor(&owner, &succ, &[false, true, false]);
        assert_eq!(a.member, vec![true, true, false]);
        assert_eq!(a.step(&succ, 0), Some(1));
    }
}
