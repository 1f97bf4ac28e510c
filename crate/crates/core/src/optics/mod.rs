//! Linear-optics simulation of the two-photon device: a pre-selection block
//! preparing the entangled state and a post-selection block whose herald
//! detector realizes the post-selected state.
//!
//! States are kets over the same basis as [`crate::hilbert`]. Each
//! configuration of all photons is absorbed by the first matching detector,
//! so every run ends with exactly one detector firing.

mod calibrate;
mod circuit;
mod element;
mod montecarlo;
mod text;

pub use calibrate::{
    calibrate_postselection, effective_postselection, gates_unitary, herald_map,
    projection_residual, Calibration, CALIBRATION_TOLERANCE,
};
pub use circuit::{spdc_source, Circuit, DetectorOutcome, ExactRun, Item, Source, MAX_CIRCUIT_PHOTONS};
pub use element::{BeamSplitter, Element, Mode, Port};
pub use montecarlo::{run_monte_carlo, ClickRecord};
pub use text::parse_circuit;

use crate::error::Result;

/// Text of the bundled two-photon device description.
pub const TWO_CAT_CIRCUIT: &str = include_str!("../../data/two_cat.circuit");

/// The bundled device, uncalibrated, with its calibration target attached.
pub fn two_cat_circuit() -> Circuit {
    parse_circuit(TWO_CAT_CIRCUIT).expect("bundled circuit parses")
}

/// Calibrates against the circuit's own target, if it has one.
pub fn calibrated(circuit: &Circuit) -> Result<Circuit> {
    match circuit.target() {
        Some(t) => Ok(calibrate_postselection(circuit, t)?.circuit),
        None => Ok(circuit.clone()),
    }
}
