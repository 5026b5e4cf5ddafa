//! Simulation toolkit for accuracy-enhancing clock protocols: tick
//! statistics, clock models, the four enhancement protocols with their
//! bounds, and a broadcast network scenario.

pub mod clock;
pub mod error;
pub mod network;
pub mod protocol;
pub mod stats;
pub mod tick;

pub use error::{Error, Result};
