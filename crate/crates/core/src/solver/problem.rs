//! Observable descriptors and the solver's problem file.
//!
//! ```text
//! photons 2
//! pre 0100 0.7071067811865476 0
//! pre 1000 0.7071067811865476 0
//! target path:1:L 1 0
//! target grin:1:R 1 0
//! ```
//!
//! `photons` comes first. `pre` lines give `label re im`; `target` lines give
//! an observable descriptor and the complex weak value.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::WeakValueTarget;
use crate::error::{Error, Result};
use crate::hilbert::{Arm, BasisConvention, Ket, Operator};
use crate::parse::{content_lines, parse_complex};
use crate::weakval::{ObservableKey, ObservableKind};

/// `path:i:L|R`, `grin:i:L|R`, `sigma:i` or `identity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableSpec {
    Key(ObservableKey),
    Sigma { photon: usize },
    Identity,
}

impl ObservableSpec {
    /// Highest photon index the descriptor refers to (0 for the identity).
    pub fn photon(&self) -> usize {
        match *self {
            ObservableSpec::Key(k) => k.photon,
            ObservableSpec::Sigma { photon } => photon,
            ObservableSpec::Identity => 0,
        }
    }

    pub fn operator(&self, convention: BasisConvention) -> Result<Operator> {
        match *self {
            ObservableSpec::Key(k) => k.operator(convention),
            ObservableSpec::Sigma { photon } => Operator::circular_sigma_z(convention, photon),
            ObservableSpec::Identity => Operator::identity(convention),
        }
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableSpec::Key(k) => k.fmt(f),
            ObservableSpec::Sigma { photon } => write!(f, "sigma:{photon}"),
            ObservableSpec::Identity => f.write_str("identity"),
        }
    }
}

impl FromStr for ObservableSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::input(format!("unknown observable `{s}`"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let photon = |p: &str| -> Result<usize> {
            match p.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(Error::input(format!("bad photon index `{p}` in `{s}`"))),
            }
        };
        match parts[..] {
            ["identity"] => Ok(ObservableSpec::Identity),
            ["sigma", p] => Ok(ObservableSpec::Sigma { photon: photon(p)? }),
            [kind, p, arm] => {
                let kind = match kind {
                    "path" => ObservableKind::Path,
                    "grin" => ObservableKind::Grin,
                    _ => return Err(bad()),
                };
                let arm: Arm = arm.parse()?;
                Ok(ObservableSpec::Key(ObservableKey::new(photon(p)?, kind, arm)))
            }
            _ => Err(bad()),
        }
    }
}

/// Parses a descriptor and checks it against the photon count.
pub fn parse_observable(descriptor: &str, convention: BasisConvention) -> Result<Operator> {
    descriptor.parse::<ObservableSpec>()?.operator(convention)
}

/// A parsed problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub pre: Ket,
    pub targets: Vec<(ObservableSpec, Complex64)>,
}

impl Problem {
    pub fn weak_value_targets(&self) -> Result<Vec<WeakValueTarget>> {
        let conv = self.pre.convention();
        self.targets
            .iter()
            .map(|(spec, w)| WeakValueTarget::new(spec.operator(conv)?, *w))
            .collect()
    }
}

pub fn parse_problem(text: &str) -> Result<Problem> {
    let mut conv: Option<BasisConvention> = None;
    let mut pre: Vec<(usize, Complex64)> = Vec::new();
    let mut targets = Vec::new();
    let mut last_line = 0;
    for (line_no, line) in content_lines(text) {
        last_line = line_no;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[..] {
            ["photons", n] => {
                if conv.is_some() {
                    return Err(Error::parse(line_no, "`photons` given twice"));
                }
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad photon count `{n}`")))?;
                if n > super::MAX_SOLVER_PHOTONS {
                    return Err(Error::parse(
                        line_no,
                        format!("solver limited to {} photons", super::MAX_SOLVER_PHOTONS),
                    ));
                }
                conv = Some(
                    BasisConvention::new(n).map_err(|e| Error::parse(line_no, e.to_string()))?,
                );
            }
            [keyword, ..] if conv.is_none() && (keyword == "pre" || keyword == "target") => {
                return Err(Error::parse(line_no, "`photons` must come first"));
            }
            ["pre", label, re, im] => {
                let c = conv.expect("checked above");
                let index = c
                    .parse_label(label)
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
                if pre.iter().any(|&(k, _)| k == index) {
                    return Err(Error::parse(line_no, format!("label `{label}` repeated")));
                }
                pre.push((index, parse_complex(re, im, line_no)?));
            }
            ["target", desc, re, im] => {
                let c = conv.expect("checked above");
                let spec: ObservableSpec = desc
                    .parse()
                    .map_err(|e: Error| Error::parse(line_no, e.to_string()))?;
                if spec.photon() > c.photons() {
                    return Err(Error::parse(
                        line_no,
                        format!("`{desc}` refers to a photon beyond {}", c.photons()),
                    ));
                }
                targets.push((spec, parse_complex(re, im, line_no)?));
            }
            _ => return Err(Error::parse(line_no, format!("cannot read `{line}`"))),
        }
    }
    let conv = conv.ok_or_else(|| Error::parse(last_line.max(1), "missing `photons` line"))?;
    if pre.is_empty() {
        return Err(Error::parse(last_line, "no `pre` amplitudes"));
    }
    if targets.is_empty() {
        return Err(Error::parse(last_line, "no `target` lines"));
    }
    let pre = Ket::from_amplitudes(conv, pre).map_err(|e| Error::parse(last_line, e.to_string()))?;
    if pre.is_zero() {
        return Err(Error::parse(last_line, "pre-state is zero"));
    }
    Ok(Problem { pre, targets })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_round_trip() {
        for d in ["path:1:L", "grin:2:R", "sigma:3", "identity"] {
            assert_eq!(d.parse::<ObservableSpec>().unwrap().to_string(), d);
        }
        for bad in ["", "path:0:L", "path:1:X", "grin:1", "sigma", "spin:1:L", "path:1:L:2"] {
            assert!(bad.parse::<ObservableSpec>().is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn descriptor_beyond_photons_rejected() {
        let conv = BasisConvention::new(1).unwrap();
        assert!(parse_observable("path:2:L", conv).is_err());
        assert!(parse_observable("grin:1:R", conv).is_ok());
    }

    #[test]
    fn problem_parses() {
        let text = "# two-cat\nphotons 2\npre 0100 1 0\npre 1000 1 0\ntarget path:1:L 1 0\ntarget identity 1 0\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.pre.support(), 2);
        assert_eq!(p.targets.len(), 2);
        assert_eq!(p.weak_value_targets().unwrap().len(), 2);
    }

    #[test]
    fn problem_errors_carry_lines() {
        let cases = [
            ("pre 0100 1 0\n", 1),
            ("photons 2\npre 0100 1\n", 2),
            ("photons 2\npre 0100 1 0\npre 0100 1 0\n", 3),
            ("photons 2\npre 0100 1 0\ntarget path:3:L 1 0\n", 3),
            ("photons 2\n\npre 0100 x 0\n", 3),
            ("photons 2\npre 0100 1 0\n", 2),
            ("photons 9\n", 1),
        ];
        for (text, line) in cases {
            match parse_problem(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }
}
