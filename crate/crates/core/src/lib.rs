//! Transit nets, Flow-LTL model checking and Petri games.

pub mod control;
pub mod flowltl;
pub mod game;
pub mod graph;
pub mod layout;
pub mod models;
pub mod net;
pub mod transit;

pub use control::Control;
