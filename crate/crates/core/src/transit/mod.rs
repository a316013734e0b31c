//! Petri nets with transits.
//!
//! A transit `(src, dst)` of transition `t` says that the datum on `src`
//! moves to `dst` when `t` fires; `src` may be the start marker `>`, which
//! creates a new flow chain. Chains are followed by [`TrackerState`]s, one
//! nondeterministic choice at a time.

mod forest;
mod tracker;

use serde::{Deserialize, Serialize};

use crate::net::{self, Net, ParseError};

pub use forest::{data_flow_forest, DataFlowForest, FlowEdge, FlowNode, FlowRoot, ForestError};
pub use tracker::{tracker_step, TrackerDisplay, TrackerState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TransitSource {
    Start,
    Place(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transit {
    pub source: TransitSource,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitNet {
    net: Net,
    transits: Vec<Vec<Transit>>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TransitError {
    #[error("transit source {place} is not in the preset of {transition}")]
    SourceNotInPreset { transition: String, place: String },
    #[error("transit target {place} is not in the postset of {transition}")]
    TargetNotInPostset { transition: String, place: String },
    #[error("duplicate transit on {0}")]
    Duplicate(String),
    #[error("transit table has {got} rows for {expected} transitions")]
    Shape { expected: usize, got: usize },
}

impl TransitNet {
    pub fn new(net: Net, transits: Vec<Vec<Transit>>) -> Result<Self, TransitError> {
        if transits.len() != net.transition_count() {
            return Err(TransitError::Shape {
                expected: net.transition_count(),
                got: transits.len(),
            });
        }
        for (t, list) in transits.iter().enumerate() {
            let tid = || net.transition(t).id.clone();
            for (i, tr) in list.iter().enumerate() {
                if let TransitSource::Place(p) = tr.source {
                    if !net.pre(t).contains(&p) {
                        return Err(TransitError::SourceNotInPreset {
                            transition: tid(),
                            place: net.place(p).id.clone(),
                        });
                    }
                }
                if !net.post(t).contains(&tr.target) {
                    return Err(TransitError::TargetNotInPostset {
                        transition: tid(),
                        place: net.place(tr.target).id.clone(),
                    });
                }
                if list[..i].contains(tr) {
                    return Err(TransitError::Duplicate(tid()));
                }
            }
        }
        Ok(Self { net, transits })
    }

    /// A net without any transits.
    pub fn plain(net: Net) -> Self {
        let transits = vec![Vec::new(); net.transition_count()];
        Self { net, transits }
    }

    /// Builds from transit triples given by id; `">"` denotes the start marker.
    pub fn with_transits(net: Net, triples: &[(&str, &str, &str)]) -> Result<Self, String> {
        let mut table = vec![Vec::new(); net.transition_count()];
        for &(t, src, dst) in triples {
            let ti = net.transition_index(t).map_err(|e| e.to_string())?;
            let source = if src == ">" {
                TransitSource::Start
            } else {
                TransitSource::Place(net.place_index(src).map_err(|e| e.to_string())?)
            };
            let target = net.place_index(dst).map_err(|e| e.to_string())?;
            table[ti].push(Transit { source, target });
        }
        Self::new(net, table).map_err(|e| e.to_string())
    }

    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn transits(&self, t: usize) -> &[Transit] {
        &self.transits[t]
    }

    pub fn transit_table(&self) -> &[Vec<Transit>] {
        &self.transits
    }

    pub fn render(&self) -> String {
        net::render(&self.net, &self.transits)
    }
}

/// Parses an `.apn` document including its `.transits` lines.
pub fn parse_transit_net(text: &str) -> Result<TransitNet, ParseError> {
    let doc = net::parse_document(text)?;
    Ok(TransitNet {
        net: doc.net,
        transits: doc.transits,
    })
}
