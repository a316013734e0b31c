//! Bundled example models.

use crate::net::{parse_net, Net};
use crate::transit::{parse_transit_net, TransitNet};

pub const SDN_APN: &str = include_str!("../models/sdn.apn");
pub const ALARM_APN: &str = include_str!("../models/alarm.apn");

/// Every packet entering the network eventually reaches the egress switch.
pub const SDN_REACHES_EGRESS: &str = "A F s5";
/// If the update never starts, every packet passes switch `s2`.
pub const SDN_UPDATE_GUARD: &str = "G u0 -> A F s2";

pub fn sdn() -> TransitNet {
    parse_transit_net(SDN_APN).expect("bundled sdn model parses")
}

pub fn alarm() -> Net {
    parse_net(ALARM_APN).expect("bundled alarm model parses")
}
