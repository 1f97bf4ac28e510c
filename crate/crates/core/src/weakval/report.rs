use std::fmt::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{weak_value, PrePostPair};
use crate::error::Result;
use crate::hilbert::{Arm, Operator};

/// Past this many photons the observables are built on the rayon pool.
const PARALLEL_FROM_PHOTONS: usize = 4;

/// Path projector `Π_{μ_i}` or grin observable `σ_z^{μ_i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObservableKind {
    Path,
    Grin,
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObservableKind::Path => "path",
            ObservableKind::Grin => "grin",
        })
    }
}

/// Ordering is photon, then kind (path before grin), then arm (L before R).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ObservableKey {
    pub photon: usize,
    pub kind: ObservableKind,
    pub arm: Arm,
}

impl ObservableKey {
    pub fn new(photon: usize, kind: ObservableKind, arm: Arm) -> Self {
        Self { photon, kind, arm }
    }

    /// All `4n` keys in report order.
    pub fn all(n_photons: usize) -> Vec<Self> {
        let mut keys = Vec::with_capacity(4 * n_photons);
        for photon in 1..=n_photons {
            for kind in [ObservableKind::Path, ObservableKind::Grin] {
                for arm in [Arm::L, Arm::R] {
                    keys.push(Self::new(photon, kind, arm));
                }
            }
        }
        keys
    }

    pub fn operator(&self, convention: crate::hilbert::BasisConvention) -> Result<Operator> {
        match self.kind {
            ObservableKind::Path => Operator::path_projector(convention, self.photon, self.arm),
            ObservableKind::Grin => Operator::grin_observable(convention, self.photon, self.arm),
        }
    }
}

impl fmt::Display for ObservableKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.kind, self.photon, self.arm)
    }
}

/// The `4n` path and grin weak values of a pair, plus the raw overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValueReport {
    photons: usize,
    entries: Vec<(ObservableKey, Complex64)>,
    overlap: Complex64,
}

#[derive(Serialize)]
struct JsonRow {
    photon: usize,
    kind: ObservableKind,
    arm: Arm,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct JsonReport {
    photons: usize,
    entries: Vec<JsonRow>,
    overlap: [f64; 2],
}

impl WeakValueReport {
    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn entries(&self) -> &[(ObservableKey, Complex64)] {
        &self.entries
    }

    pub fn overlap(&self) -> Complex64 {
        self.overlap
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: ObservableKey) -> Option<Complex64> {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(&key))
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Fixed-width table: Re and Im with 12 significant digits, plus a flag
    /// column marking values within 1e-12 of 0 or 1.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>6}  {:<4}  {:<3}  {:>20}  {:>20}  flag",
            "photon", "kind", "arm", "re", "im"
        );
        for (key, v) in &self.entries {
            let _ = writeln!(
                out,
                "{:>6}  {:<4}  {:<3}  {:>20}  {:>20}  {}",
                key.photon,
                key.kind.to_string(),
                key.arm.to_string(),
                sig12(v.re),
                sig12(v.im),
                delta_flag(*v)
            );
        }
        let _ = writeln!(
            out,
            "{:>6}  {:<4}  {:<3}  {:>20}  {:>20}",
            "-",
            "ovl",
            "-",
            sig12(self.overlap.re),
            sig12(self.overlap.im)
        );
        out
    }

    /// `photon,kind,arm,re,im` rows in round-trip float form, overlap last.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("photon,kind,arm,re,im\n");
        for (key, v) in &self.entries {
            let _ = writeln!(out, "{},{},{},{:?},{:?}", key.photon, key.kind, key.arm, v.re, v.im);
        }
        let _ = writeln!(out, "overlap,,,{:?},{:?}", self.overlap.re, self.overlap.im);
        out
    }

    /// Serializable view used for JSON output.
    pub fn to_serializable(&self) -> impl Serialize {
        JsonReport {
            photons: self.photons,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| JsonRow {
                    photon: k.photon,
                    kind: k.kind,
                    arm: k.arm,
                    re: v.re,
                    im: v.im,
                })
                .collect(),
            overlap: [self.overlap.re, self.overlap.im],
        }
    }
}

/// `=1` / `=0` when the value sits within 1e-12 of a Kronecker delta.
fn delta_flag(v: Complex64) -> &'static str {
    if (v - Complex64::new(1.0, 0.0)).norm() <= 1e-12 {
        "=1"
    } else if v.norm() <= 1e-12 {
        "=0"
    } else {
        ""
    }
}

/// Twelve significant digits; scientific outside a readable range.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    // the exponent after rounding, so 0.99999999999999 counts as magnitude 0
    let sci = format!("{x:.11e}");
    let mag: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if !(-4..12).contains(&mag) {
        return sci;
    }
    let decimals = (11 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Weak values of every `Π_{μ_i}` and `σ_z^{μ_i}` for the pair.
pub fn weak_value_report(pair: &PrePostPair) -> Result<WeakValueReport> {
    let overlap = pair.checked_overlap()?;
    let conv = pair.convention();
    let keys = ObservableKey::all(conv.photons());
    let eval = |key: &ObservableKey| -> Result<(ObservableKey, Complex64)> {
        Ok((*key, weak_value(&key.operator(conv)?, pair)?))
    };
    let entries: Result<Vec<_>> = if conv.photons() >= PARALLEL_FROM_PHOTONS {
        keys.par_iter().map(eval).collect()
    } else {
        keys.iter().map(eval).collect()
    };
    Ok(WeakValueReport {
        photons: conv.photons(),
        entries: entries?,
        overlap,
    })
}
