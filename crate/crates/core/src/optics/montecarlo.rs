use std::collections::BTreeMap;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::circuit::Circuit;
use crate::error::{Error, Result};

/// Shots per generator stream. Counts depend only on (seed, shots), never on
/// how the blocks are scheduled.
const BLOCK: u64 = 4096;

/// Click counts of a Monte Carlo run. Exactly one detector fires per shot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClickRecord {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl ClickRecord {
    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }
}

pub fn run_monte_carlo(circuit: &Circuit, shots: u64, seed: u64) -> Result<ClickRecord> {
    if shots == 0 {
        return Err(Error::input("shots must be at least 1"));
    }
    let exact = circuit.run_exact()?;
    let labels: Vec<&str> = exact.outcomes.iter().map(|o| o.label.as_str()).collect();
    let weights: Vec<f64> = exact.outcomes.iter().map(|o| o.probability).collect();
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::Configuration(format!("no detector can fire: {e}")))?;

    let blocks = shots.div_ceil(BLOCK);
    let tallies: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let n = BLOCK.min(shots - b * BLOCK);
            let mut tally = vec![0u64; labels.len()];
            for _ in 0..n {
                tally[dist.sample(&mut rng)] += 1;
            }
            tally
        })
        .collect();

    let mut counts: BTreeMap<String, u64> = labels.iter().map(|l| (l.to_string(), 0)).collect();
    for tally in tallies {
        for (label, c) in labels.iter().zip(tally) {
            *counts.get_mut(*label).expect("label present") += c;
        }
    }
    Ok(ClickRecord { counts, shots, seed })
}
