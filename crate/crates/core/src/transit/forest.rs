use serde_json::{json, Value};

use super::{TransitNet, TransitSource};
use crate::net::{Marking, NetError};

/// Datum sitting on `place` after `position` firings of the run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNode {
    pub position: usize,
    pub place: usize,
    /// Consumed later in the run without a continuing transit.
    pub ended: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowEdge {
    pub from: usize,
    pub transition: usize,
    pub to: usize,
}

/// A chain start: `transition`, fired at run index `position`, created `node`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowRoot {
    pub node: usize,
    pub transition: usize,
    pub position: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DataFlowForest {
    pub nodes: Vec<FlowNode>,
    pub roots: Vec<FlowRoot>,
    pub edges: Vec<FlowEdge>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("run not fireable at position {position}: {source}")]
    RunNotFireable { position: usize, source: NetError },
}

impl DataFlowForest {
    pub fn to_json(&self, tn: &TransitNet) -> Value {
        let net = tn.net();
        json!({
            "nodes": self.nodes.iter().map(|n| json!({
                "position": n.position,
                "place": net.place(n.place).id,
                "ended": n.ended,
            })).collect::<Vec<_>>(),
            "roots": self.roots.iter().map(|r| json!({
                "node": r.node,
                "transition": net.transition(r.transition).id,
                "position": r.position,
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({
                "from": e.from,
                "transition": net.transition(e.transition).id,
                "to": e.to,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Data-flow forest of a finite firing sequence from the initial marking.
///
/// Tokens of the initial marking carry no data; data only enters through
/// start transits. A transit whose source holds no datum adds no edge.
pub fn data_flow_forest(tn: &TransitNet, run: &[usize]) -> Result<DataFlowForest, ForestError> {
    let net = tn.net();
    let mut forest = DataFlowForest::default();
    let mut marking: Marking = net.initial_marking();
    let mut holder: Vec<Option<usize>> = vec![None; net.place_count()];

    for (k, &t) in run.iter().enumerate() {
        marking = net
            .fire(&marking, t)
            .map_err(|source| ForestError::RunNotFireable {
                position: k,
                source,
            })?;
        let mut created: Vec<Option<usize>> = vec![None; net.place_count()];
        let mut node_for = |forest: &mut DataFlowForest, place: usize| -> usize {
            *created[place].get_or_insert_with(|| {
                forest.nodes.push(FlowNode {
                    position: k + 1,
                    place,
                    ended: false,
                });
                forest.nodes.len() - 1
            })
        };
        for tr in tn.transits(t) {
            match tr.source {
                TransitSource::Start => {
                    let node = node_for(&mut forest, tr.target);
                    forest.roots.push(FlowRoot {
                        node,
                        transition: t,
                        position: k,
                    });
                }
                TransitSource::Place(p) => {
                    if let Some(from) = holder[p] {
                        let to = node_for(&mut forest, tr.target);
                        forest.edges.push(FlowEdge {
                            from,
                            transition: t,
                            to,
                        });
                    }
                }
            }
        }
        for &p in net.pre(t) {
            if let Some(n) = holder[p].take() {
                let continues = tn
                    .transits(t)
                    .iter()
                    .any(|tr| tr.source == TransitSource::Place(p));
                if !continues {
                    forest.nodes[n].ended = true;
                }
            }
        }
        for &p in net.post(t) {
            holder[p] = created[p];
        }
    }
    Ok(forest)
}
