use std::fmt;

use serde::{Serialize, Serializer};

use super::{TransitNet, TransitSource};

/// Position of one flow-chain follower.
///
/// `Ended(p)` remembers the last place of a chain that was cut, so formulas
/// keep observing `p` after the chain stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrackerState {
    Idle,
    At(usize),
    Ended(usize),
}

impl TrackerState {
    /// The place observed in this state, if any.
    pub fn place(self) -> Option<usize> {
        match self {
            TrackerState::Idle => None,
            TrackerState::At(p) | TrackerState::Ended(p) => Some(p),
        }
    }

    /// Whether firing `t` advances this tracker (it sits on a consumed place).
    pub fn moves_with(self, tn: &TransitNet, t: usize) -> bool {
        matches!(self, TrackerState::At(p) if tn.net().pre(t).binary_search(&p).is_ok())
    }

    pub fn display<'a>(self, tn: &'a TransitNet) -> TrackerDisplay<'a> {
        TrackerDisplay { state: self, tn }
    }
}

pub struct TrackerDisplay<'a> {
    state: TrackerState,
    tn: &'a TransitNet,
}

impl fmt::Display for TrackerDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |p: usize| &self.tn.net().place(p).id;
        match self.state {
            TrackerState::Idle => f.write_str("IDLE"),
            TrackerState::At(p) => write!(f, "AT({})", name(p)),
            TrackerState::Ended(p) => write!(f, "ENDED({})", name(p)),
        }
    }
}

impl Serialize for TrackerDisplay<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Successor states of a tracker when `t` fires, in a fixed order.
///
/// An idle tracker may stay idle or pick up any chain started by `t`. A
/// tracker on a place consumed by `t` follows one transit out of it, or ends
/// if there is none. Other trackers are unaffected.
pub fn tracker_step(tn: &TransitNet, s: TrackerState, t: usize) -> Vec<TrackerState> {
    match s {
        TrackerState::Idle => std::iter::once(TrackerState::Idle)
            .chain(
                tn.transits(t)
                    .iter()
                    .filter(|tr| tr.source == TransitSource::Start)
                    .map(|tr| TrackerState::At(tr.target)),
            )
            .collect(),
        TrackerState::At(p) => {
            if !s.moves_with(tn, t) {
                return vec![s];
            }
            let next: Vec<_> = tn
                .transits(t)
                .iter()
                .filter(|tr| tr.source == TransitSource::Place(p))
                .map(|tr| TrackerState::At(tr.target))
                .collect();
            if next.is_empty() {
                vec![TrackerState::Ended(p)]
            } else {
                next
            }
        }
        TrackerState::Ended(_) => vec![s],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Net, Place, Transition};

    fn net() -> TransitNet {
        let net = Net::new(
            "n",
            vec![
                Place::new("s0").marked(),
                Place::new("s1").marked(),
                Place::new("q"),
                Place::new("r"),
            ],
            vec![
                Transition::new("ingress"),
                Transition::new("fwd"),
                Transition::new("split"),
                Transition::new("drop"),
            ],
            &[
                ("ingress", &["s0"], &["s0"]),
                ("fwd", &["s0", "s1"], &["s0", "s1"]),
                ("split", &["s1"], &["q", "r"]),
                ("drop", &["q"], &[]),
            ],
        )
        .unwrap();
        TransitNet::with_transits(
            net,
            &[
                ("ingress", ">", "s0"),
                ("ingress", "s0", "s0"),
                ("fwd", "s0", "s1"),
                ("fwd", "s1", "s1"),
                ("split", "s1", "q"),
                ("split", "s1", "r"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn idle_may_start_chain() {
        let tn = net();
        assert_eq!(
            tracker_step(&tn, TrackerState::Idle, 0),
            vec![TrackerState::Idle, TrackerState::At(0)]
        );
    }

    #[test]
    fn forwarding_moves_chain() {
        let tn = net();
        assert_eq!(tracker_step(&tn, TrackerState::At(0), 1), vec![TrackerState::At(1)]);
    }

    #[test]
    fn untouched_place_stays() {
        let tn = net();
        assert_eq!(tracker_step(&tn, TrackerState::At(1), 0), vec![TrackerState::At(1)]);
    }

    #[test]
    fn branching_transits() {
        let tn = net();
        assert_eq!(
            tracker_step(&tn, TrackerState::At(1), 2),
            vec![TrackerState::At(2), TrackerState::At(3)]
        );
    }

    #[test]
    fn consumed_without_transit_ends() {
        let tn = net();
        assert_eq!(tracker_step(&tn, TrackerState::At(2), 3), vec![TrackerState::Ended(2)]);
        assert_eq!(
            tracker_step(&tn, TrackerState::Ended(2), 0),
            vec![TrackerState::Ended(2)]
        );
    }
}
