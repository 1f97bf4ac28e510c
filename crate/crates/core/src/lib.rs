//! Weak values of pre- and post-selected photon states, synthesis of
//! post-selections from target weak values, and a linear-optics simulator
//! for the two-photon entangled Cheshire cat device.

pub mod error;
pub mod hilbert;
pub mod optics;
pub mod scenarios;
pub mod solver;
pub mod weakval;
mod parse;

pub use error::{Error, Result};
pub use parse::parse_angle;
