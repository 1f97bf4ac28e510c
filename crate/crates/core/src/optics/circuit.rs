use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use super::element::{Element, Port};
use crate::error::{Error, Result};
use crate::hilbert::{BasisConvention, Ket, Operator};

/// Circuits keep dense operators per gate; past this they are unwieldy.
pub const MAX_CIRCUIT_PHOTONS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// Both photons in `LL` with polarization `(|HV> + |VH>)/√2`. Two photons only.
    Spdc,
    /// An explicit input state (normalized on use).
    State(Ket),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Gate(Element),
    /// Absorbs every live configuration matching `port`.
    Detect { label: String, port: Port },
    /// Boundary between the pre-selection and post-selection blocks.
    PostSelect,
}

/// Source, ordered items, optional herald detector and calibration target.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    convention: BasisConvention,
    source: Source,
    items: Vec<Item>,
    herald: Option<String>,
    target: Option<Ket>,
}

/// Click probability of one detector label and the normalized state it absorbed.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorOutcome {
    pub label: String,
    pub probability: f64,
    /// `None` when the detector never fires.
    pub state: Option<Ket>,
}

/// Result of an exact run, one entry per label in order of first binding.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRun {
    pub outcomes: Vec<DetectorOutcome>,
}

impl ExactRun {
    pub fn probability(&self, label: &str) -> Option<f64> {
        self.outcomes
            .iter()
            .find(|o| o.label == label)
            .map(|o| o.probability)
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

/// Unnormalized amplitudes absorbed per label plus whatever is still live.
pub(crate) struct Propagation {
    pub absorbed: BTreeMap<String, BTreeMap<usize, Complex64>>,
    pub live: Ket,
}

pub fn spdc_source() -> Ket {
    let conv = BasisConvention::new(2).expect("two photons");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // |L1 L2> (|H1 V2> + |V1 H2>) / √2
    Ket::from_amplitudes(conv, [(0b0001, Complex64::new(s, 0.0)), (0b0010, Complex64::new(s, 0.0))])
        .expect("valid indices")
}

impl Circuit {
    pub fn new(photons: usize, source: Source) -> Result<Self> {
        if photons > MAX_CIRCUIT_PHOTONS {
            return Err(Error::input(format!(
                "circuits are limited to {MAX_CIRCUIT_PHOTONS} photons"
            )));
        }
        let convention = BasisConvention::new(photons)?;
        match &source {
            Source::Spdc if photons != 2 => {
                return Err(Error::input("the SPDC source emits exactly two photons"));
            }
            Source::State(k) if k.convention() != convention => {
                return Err(Error::input("input state photon count differs from the circuit"));
            }
            Source::State(k) if k.is_zero() => {
                return Err(Error::input("input state is zero"));
            }
            _ => {}
        }
        Ok(Self {
            convention,
            source,
            items: Vec::new(),
            herald: None,
            target: None,
        })
    }

    pub fn convention(&self) -> BasisConvention {
        self.convention
    }

    pub fn photons(&self) -> usize {
        self.convention.photons()
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub(crate) fn items_mut(&mut self) -> &mut [Item] {
        &mut self.items
    }

    pub fn herald(&self) -> Option<&str> {
        self.herald.as_deref()
    }

    pub fn target(&self) -> Option<&Ket> {
        self.target.as_ref()
    }

    pub fn push_gate(&mut self, element: Element) -> Result<()> {
        element.validate(self.convention)?;
        self.items.push(Item::Gate(element));
        Ok(())
    }

    pub fn push_detector(&mut self, label: &str, port: Port) -> Result<()> {
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(Error::input(format!("bad detector label `{label}`")));
        }
        if port.photons() != self.photons() {
            return Err(Error::input("detector port photon count differs from the circuit"));
        }
        self.items.push(Item::Detect {
            label: label.to_string(),
            port,
        });
        Ok(())
    }

    pub fn mark_postselect(&mut self) -> Result<()> {
        if self.postselect_index().is_some() {
            return Err(Error::input("post-selection boundary given twice"));
        }
        self.items.push(Item::PostSelect);
        Ok(())
    }

    pub fn set_herald(&mut self, label: &str) {
        self.herald = Some(label.to_string());
    }

    pub fn set_target(&mut self, target: Ket) -> Result<()> {
        if target.convention() != self.convention {
            return Err(Error::input("target photon count differs from the circuit"));
        }
        if target.is_zero() {
            return Err(Error::input("calibration target is zero"));
        }
        self.target = Some(target);
        Ok(())
    }

    pub fn clear_target(&mut self) {
        self.target = None;
    }

    /// Position of the `PostSelect` marker in [`Circuit::items`].
    pub fn postselect_index(&self) -> Option<usize> {
        self.items.iter().position(|i| matches!(i, Item::PostSelect))
    }

    /// Detector labels in order of first binding.
    pub fn labels(&self) -> Vec<String> {
        let mut seen = Vec::<String>::new();
        for item in &self.items {
            if let Item::Detect { label, .. } = item {
                if !seen.contains(label) {
                    seen.push(label.clone());
                }
            }
        }
        seen
    }

    /// Normalized source state.
    pub fn input_state(&self) -> Result<Ket> {
        match &self.source {
            Source::Spdc => Ok(spdc_source()),
            Source::State(k) => k.normalized(),
        }
    }

    /// Checks addressing, the herald label, and that no configuration can
    /// leave the circuit without reaching a detector.
    pub fn validate(&self) -> Result<()> {
        for item in &self.items {
            if let Item::Gate(e) = item {
                e.validate(self.convention)?;
            }
        }
        if let Some(h) = &self.herald {
            if !self.labels().contains(h) {
                return Err(Error::Configuration(format!(
                    "herald `{h}` is not bound to any port"
                )));
            }
        }
        let conv = self.convention;
        let mut live: BTreeSet<usize> = (0..conv.dim()).collect();
        for item in &self.items {
            match item {
                Item::Gate(e) => {
                    live = live.iter().flat_map(|&k| e.reach(conv, k)).collect();
                }
                Item::Detect { port, .. } => live.retain(|&k| !port.matches(conv, k)),
                Item::PostSelect => {}
            }
        }
        if let Some(&k) = live.iter().next() {
            return Err(Error::Configuration(format!(
                "{} output configuration(s) reach no detector, e.g. {} ({})",
                live.len(),
                conv.label(k),
                conv.alias(k)
            )));
        }
        Ok(())
    }

    pub(crate) fn operators(&self) -> Result<Vec<Option<Operator>>> {
        self.items
            .iter()
            .map(|item| match item {
                Item::Gate(e) => e.operator(self.convention).map(Some),
                _ => Ok(None),
            })
            .collect()
    }

    /// State reaching the post-selection boundary, or the end of the gates
    /// if there is no boundary. Detectors before the boundary must not fire.
    pub fn preselection_output(&self) -> Result<Ket> {
        let end = self.postselect_index().unwrap_or(self.items.len());
        let ops = self.operators()?;
        let p = propagate(self.convention, self.input_state()?, &self.items[..end], &ops[..end])?;
        if !p.absorbed.is_empty() {
            return Err(Error::Configuration(
                "a detector fires inside the pre-selection block".into(),
            ));
        }
        Ok(p.live)
    }

    pub fn run_exact(&self) -> Result<ExactRun> {
        self.validate()?;
        let ops = self.operators()?;
        let p = propagate(self.convention, self.input_state()?, &self.items, &ops)?;
        let outcomes = self
            .labels()
            .into_iter()
            .map(|label| {
                let (probability, state) = match p.absorbed.get(&label) {
                    Some(map) => {
                        let ket = Ket::from_amplitudes(self.convention, map.iter().map(|(&k, &v)| (k, v)))?;
                        let prob = ket.norm_sqr();
                        let state = if ket.is_zero() { None } else { Some(ket.normalized()?) };
                        (prob, state)
                    }
                    None => (0.0, None),
                };
                Ok(DetectorOutcome {
                    label,
                    probability,
                    state,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactRun { outcomes })
    }
}

/// Runs `state` through `items`; `ops[k]` is the operator of `items[k]` when it is a gate.
pub(crate) fn propagate(
    conv: BasisConvention,
    state: Ket,
    items: &[Item],
    ops: &[Option<Operator>],
) -> Result<Propagation> {
    let mut live = state;
    let mut absorbed: BTreeMap<String, BTreeMap<usize, Complex64>> = BTreeMap::new();
    for (item, op) in items.iter().zip(ops) {
        match item {
            Item::Gate(_) => {
                live = op.as_ref().expect("operator for every gate").apply(&live)?;
            }
            Item::Detect { label, port } => {
                let (hit, miss): (Vec<_>, Vec<_>) =
                    live.iter().partition(|&(k, _)| port.matches(conv, k));
                if !hit.is_empty() {
                    let slot = absorbed.entry(label.clone()).or_default();
                    for (k, v) in hit {
                        *slot.entry(k).or_default() += v;
                    }
                    live = Ket::from_amplitudes(conv, miss)?;
                }
            }
            Item::PostSelect => {}
        }
    }
    Ok(Propagation { absorbed, live })
}
