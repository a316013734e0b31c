use std::collections::{BTreeSet, HashMap};

use super::{Marking, Net, NetError};

/// Reachability graph built on demand, one node expansion at a time.
///
/// Node ids are indices in discovery order. Edges are kept sorted and
/// deduplicated, so the node and edge sets after reaching a fixpoint do not
/// depend on the order in which nodes were expanded (ids may).
#[derive(Debug, Clone, PartialEq)]
pub struct ReachGraph {
    nodes: Vec<Marking>,
    index: HashMap<Marking, usize>,
    edges: BTreeSet<(usize, usize, usize)>,
    frontier: BTreeSet<usize>,
}

impl ReachGraph {
    /// Graph containing only the initial marking, unexpanded.
    pub fn new(net: &Net) -> Self {
        let m0 = net.initial_marking();
        Self {
            index: HashMap::from([(m0.clone(), 0)]),
            nodes: vec![m0],
            edges: BTreeSet::new(),
            frontier: BTreeSet::from([0]),
        }
    }

    pub fn nodes(&self) -> &[Marking] {
        &self.nodes
    }

    pub fn node_id(&self, m: &Marking) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// `(source, transition, target)` triples of node ids.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn frontier(&self) -> &BTreeSet<usize> {
        &self.frontier
    }

    pub fn is_complete(&self) -> bool {
        self.frontier.is_empty()
    }

    /// Adds all successors of `node`. Returns the ids of nodes that were new.
    /// Expanding an already expanded node is a no-op.
    pub fn expand(&mut self, net: &Net, node: &Marking) -> Result<Vec<usize>, NetError> {
        let id = self.node_id(node).ok_or(NetError::UnknownMarking)?;
        self.expand_id(net, id)
    }

    pub fn expand_id(&mut self, net: &Net, id: usize) -> Result<Vec<usize>, NetError> {
        if id >= self.nodes.len() {
            return Err(NetError::UnknownMarking);
        }
        if !self.frontier.contains(&id) {
            return Ok(Vec::new());
        }
        let source = self.nodes[id].clone();
        let mut succ = Vec::new();
        for t in net.enabled(&source) {
            succ.push((t, net.fire(&source, t)?));
        }
        let mut fresh = Vec::new();
        for (t, m) in succ {
            let target = match self.index.get(&m) {
                Some(&j) => j,
                None => {
                    let j = self.nodes.len();
                    self.index.insert(m.clone(), j);
                    self.nodes.push(m);
                    self.frontier.insert(j);
                    fresh.push(j);
                    j
                }
            };
            self.edges.insert((id, t, target));
        }
        self.frontier.remove(&id);
        Ok(fresh)
    }

    /// Expands breadth-first until the frontier is empty or `limit` nodes exist.
    pub fn explore(&mut self, net: &Net, limit: usize) -> Result<bool, NetError> {
        while let Some(&id) = self.frontier.first() {
            if self.nodes.len() > limit {
                return Ok(false);
            }
            self.expand_id(net, id)?;
        }
        Ok(true)
    }

    /// Full reachability graph from the initial marking.
    pub fn full(net: &Net, limit: usize) -> Result<Self, NetError> {
        let mut g = Self::new(net);
        g.explore(net, limit)?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Place, Transition};

    fn cycle() -> Net {
        Net::new(
            "c",
            vec![Place::new("a").marked(), Place::new("b"), Place::new("d")],
            vec![Transition::new("ab"), Transition::new("ba"), Transition::new("ad")],
            &[
                ("ab", &["a"], &["b"]),
                ("ba", &["b"], &["a"]),
                ("ad", &["a"], &["d"]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn expand_is_idempotent() {
        let net = cycle();
        let mut g = ReachGraph::new(&net);
        let m0 = net.initial_marking();
        assert_eq!(g.expand(&net, &m0).unwrap(), vec![1, 2]);
        let snapshot = g.clone();
        assert!(g.expand(&net, &m0).unwrap().is_empty());
        assert_eq!(g, snapshot);
    }

    #[test]
    fn deadlock_has_no_successors() {
        let net = cycle();
        let mut g = ReachGraph::new(&net);
        g.expand_id(&net, 0).unwrap();
        let dead = net.marking_of(&["d"]).unwrap();
        assert!(g.expand(&net, &dead).unwrap().is_empty());
        assert_eq!(g.nodes().len(), 3);
        assert!(!g.frontier().contains(&g.node_id(&dead).unwrap()));
    }

    #[test]
    fn unknown_node() {
        let net = cycle();
        let mut g = ReachGraph::new(&net);
        let m = net.marking_of(&["b"]).unwrap();
        assert_eq!(g.expand(&net, &m), Err(NetError::UnknownMarking));
    }

    #[test]
    fn full_graph() {
        let net = cycle();
        let g = ReachGraph::full(&net, 100).unwrap();
        assert!(g.is_complete());
        assert_eq!(g.nodes().len(), 3);
        assert_eq!(g.edge_count(), 3);
    }
}
