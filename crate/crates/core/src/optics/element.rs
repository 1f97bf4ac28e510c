//! Optical elements, spatial modes and detector ports.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{Arm, BasisConvention, Operator, Pol};

const UNITARITY_TOLERANCE: f64 = 1e-12;

/// A joint path configuration of all photons, optionally with a joint
/// polarization configuration. Written `LR` or `LR:HV`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mode {
    /// Path block, photon 1 most significant.
    pub paths: usize,
    /// Polarization block, or `None` to act on every polarization alike.
    pub pols: Option<usize>,
    photons: usize,
}

impl Mode {
    pub fn parse(text: &str, photons: usize) -> Result<Self> {
        let (arms, pols) = match text.split_once(':') {
            Some((a, p)) => (a, Some(p)),
            None => (text, None),
        };
        let block = |s: &str, zero: char, one: char| -> Result<usize> {
            if s.chars().count() != photons {
                return Err(Error::input(format!(
                    "mode `{text}` needs exactly {photons} characters per block"
                )));
            }
            s.chars().try_fold(0usize, |acc, c| match c {
                c if c == zero => Ok(acc << 1),
                c if c == one => Ok((acc << 1) | 1),
                _ => Err(Error::input(format!("unexpected `{c}` in mode `{text}`"))),
            })
        };
        Ok(Self {
            paths: block(arms, 'L', 'R')?,
            pols: pols.map(|p| block(p, 'H', 'V')).transpose()?,
            photons,
        })
    }

    fn matches(&self, conv: BasisConvention, index: usize) -> bool {
        conv.path_part(index) == self.paths
            && self.pols.is_none_or(|p| conv.pol_part(index) == p)
    }

    /// Index in this mode carrying the polarization of `index` unless the mode fixes it.
    fn image(&self, conv: BasisConvention, index: usize) -> usize {
        conv.compose_index(self.paths, self.pols.unwrap_or(conv.pol_part(index)))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.photons;
        for k in (0..n).rev() {
            f.write_str(if (self.paths >> k) & 1 == 0 { "L" } else { "R" })?;
        }
        if let Some(p) = self.pols {
            f.write_str(":")?;
            for k in (0..n).rev() {
                f.write_str(if (p >> k) & 1 == 0 { "H" } else { "V" })?;
            }
        }
        Ok(())
    }
}

/// Set of configurations a detector absorbs. `*` matches everything; `LR:V*`
/// matches photon 1 in L, photon 2 in R with photon 1 vertical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Port {
    arms: Vec<Option<Arm>>,
    pols: Vec<Option<Pol>>,
}

impl Port {
    pub fn any(photons: usize) -> Self {
        Self {
            arms: vec![None; photons],
            pols: vec![None; photons],
        }
    }

    pub fn parse(text: &str, photons: usize) -> Result<Self> {
        if text == "*" {
            return Ok(Self::any(photons));
        }
        let (arms, pols) = match text.split_once(':') {
            Some((a, p)) => (a, p),
            None => (text, "*"),
        };
        fn block<T>(s: &str, n: usize, text: &str, f: impl Fn(char) -> Option<T>) -> Result<Vec<Option<T>>> {
            if s == "*" {
                return Ok((0..n).map(|_| None).collect());
            }
            if s.chars().count() != n {
                return Err(Error::input(format!(
                    "port `{text}` needs exactly {n} characters per block"
                )));
            }
            s.chars()
                .map(|c| match c {
                    '*' => Ok(None),
                    c => f(c)
                        .map(Some)
                        .ok_or_else(|| Error::input(format!("unexpected `{c}` in port `{text}`"))),
                })
                .collect()
        }
        Ok(Self {
            arms: block(arms, photons, text, |c| match c {
                'L' => Some(Arm::L),
                'R' => Some(Arm::R),
                _ => None,
            })?,
            pols: block(pols, photons, text, |c| match c {
                'H' => Some(Pol::H),
                'V' => Some(Pol::V),
                _ => None,
            })?,
        })
    }

    pub fn photons(&self) -> usize {
        self.arms.len()
    }

    pub fn matches(&self, conv: BasisConvention, index: usize) -> bool {
        (1..=conv.photons()).all(|p| {
            self.arms[p - 1].is_none_or(|a| conv.arm_of(index, p) == a)
                && self.pols[p - 1].is_none_or(|q| conv.pol_of(index, p) == q)
        })
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arms.iter().all(Option::is_none) && self.pols.iter().all(Option::is_none) {
            return f.write_str("*");
        }
        for a in &self.arms {
            write!(f, "{}", a.map_or("*".to_string(), |a| a.to_string()))?;
        }
        if self.pols.iter().any(Option::is_some) {
            f.write_str(":")?;
            for p in &self.pols {
                write!(f, "{}", p.map_or("*".to_string(), |p| p.to_string()))?;
            }
        }
        Ok(())
    }
}

/// Two-mode beam splitter with matrix `[[t, -r* e^{iχ}], [r, t* e^{iχ}]]`
/// in the `(a, b)` basis: `|a> -> t|a> + r|b>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    pub a: Mode,
    pub b: Mode,
    t: Complex64,
    r: Complex64,
    phase: f64,
    /// Whether calibration may change the setting.
    pub adjustable: bool,
}

impl BeamSplitter {
    pub fn new(a: Mode, b: Mode, t: Complex64, r: Complex64, phase: f64) -> Result<Self> {
        if a.photons != b.photons {
            return Err(Error::input("beam-splitter modes differ in photon count"));
        }
        if a.pols.is_some() != b.pols.is_some() {
            return Err(Error::input(
                "beam-splitter modes must both fix polarization or both leave it free",
            ));
        }
        if a == b {
            return Err(Error::input(format!("beam splitter joins mode `{a}` to itself")));
        }
        if a.pols.is_none() && a.paths == b.paths {
            return Err(Error::input("beam-splitter modes overlap"));
        }
        let s = Self {
            a,
            b,
            t,
            r,
            phase,
            adjustable: false,
        };
        s.set(t, r, phase)
    }

    /// Symmetric 50:50 splitter, `|a> -> (|a> + i|b>)/√2`.
    pub fn balanced(a: Mode, b: Mode) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(a, b, Complex64::new(s, 0.0), Complex64::new(0.0, s), 0.0)
    }

    pub fn with_adjustable(mut self, adjustable: bool) -> Self {
        self.adjustable = adjustable;
        self
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn r(&self) -> Complex64 {
        self.r
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Same modes, new setting; checks `|t|^2 + |r|^2 = 1`.
    pub fn set(mut self, t: Complex64, r: Complex64, phase: f64) -> Result<Self> {
        let finite = [t.re, t.im, r.re, r.im, phase].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::input("beam-splitter parameters must be finite"));
        }
        let total = t.norm_sqr() + r.norm_sqr();
        if (total - 1.0).abs() > UNITARITY_TOLERANCE {
            return Err(Error::input(format!(
                "beam splitter is not unitary: |t|^2 + |r|^2 = {total}"
            )));
        }
        self.t = t;
        self.r = r;
        self.phase = phase;
        Ok(self)
    }

    /// Setting that sends `α|a> + β|b>` entirely to `a` (and the orthogonal
    /// `-β*|a> + α*|b>` entirely to `b`).
    pub fn routing(self, alpha: Complex64, beta: Complex64) -> Result<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if n == 0.0 {
            return Err(Error::Degenerate("cannot route a zero superposition".into()));
        }
        self.set(alpha.conj() / n, -beta / n, 0.0)
    }

    pub(crate) fn matches_a(&self, conv: BasisConvention, index: usize) -> bool {
        self.a.matches(conv, index)
    }

    pub(crate) fn matches_b(&self, conv: BasisConvention, index: usize) -> bool {
        self.b.matches(conv, index)
    }

    /// Partner index of `index` in the other mode.
    pub(crate) fn partner(&self, conv: BasisConvention, index: usize) -> Option<usize> {
        if self.matches_a(conv, index) {
            Some(self.b.image(conv, index))
        } else if self.matches_b(conv, index) {
            Some(self.a.image(conv, index))
        } else {
            None
        }
    }

    fn column(&self, conv: BasisConvention, c: usize, out: &mut Vec<(usize, Complex64)>) {
        let e = Complex64::from_polar(1.0, self.phase);
        if self.matches_a(conv, c) {
            out.push((c, self.t));
            out.push((self.b.image(conv, c), self.r));
        } else if self.matches_b(conv, c) {
            out.push((self.a.image(conv, c), -self.r.conj() * e));
            out.push((c, self.t.conj() * e));
        } else {
            out.push((c, Complex64::new(1.0, 0.0)));
        }
    }
}

/// A unitary gate in the circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    /// Polarizing beam splitter: H keeps its arm, V switches arm.
    Pbs { photon: usize },
    /// Half-wave plate swapping H and V on one arm.
    Hwp { photon: usize, arm: Arm },
    /// Hadamard plate `(1/√2)[[1, 1], [1, -1]]` on one arm's polarization.
    Hadamard { photon: usize, arm: Arm },
    /// Multiplies amplitudes on one arm by `e^{i phase}`.
    PhaseShifter { photon: usize, arm: Arm, phase: f64 },
    /// Relabeling only; acts as the identity.
    Mirror { photon: usize, arm: Arm },
    BeamSplitter(BeamSplitter),
}

impl Element {
    pub fn photon(&self) -> Option<usize> {
        match *self {
            Element::Pbs { photon }
            | Element::Hwp { photon, .. }
            | Element::Hadamard { photon, .. }
            | Element::PhaseShifter { photon, .. }
            | Element::Mirror { photon, .. } => Some(photon),
            Element::BeamSplitter(_) => None,
        }
    }

    pub fn validate(&self, conv: BasisConvention) -> Result<()> {
        if let Some(p) = self.photon() {
            conv.check_photon(p)?;
        }
        match self {
            Element::PhaseShifter { phase, .. } if !phase.is_finite() => {
                Err(Error::input("phase must be finite"))
            }
            Element::BeamSplitter(bs) if bs.a.photons != conv.photons() => Err(Error::input(
                "beam-splitter modes do not match the circuit's photon count",
            )),
            _ => Ok(()),
        }
    }

    /// Embedding of the element on the full `4^n` space.
    pub fn operator(&self, conv: BasisConvention) -> Result<Operator> {
        self.validate(conv)?;
        let one = Complex64::new(1.0, 0.0);
        Operator::from_columns(conv, |c, out| match *self {
            Element::Pbs { photon } => {
                let flip = (c >> conv.pol_bit(photon)) & 1;
                out.push((c ^ (flip << conv.path_bit(photon)), one));
            }
            Element::Hwp { photon, arm } => {
                if conv.arm_of(c, photon) == arm {
                    out.push((c ^ (1 << conv.pol_bit(photon)), one));
                } else {
                    out.push((c, one));
                }
            }
            Element::Hadamard { photon, arm } => {
                if conv.arm_of(c, photon) == arm {
                    let s = std::f64::consts::FRAC_1_SQRT_2;
                    let bit = 1 << conv.pol_bit(photon);
                    let sign = if c & bit == 0 { s } else { -s };
                    out.push((c & !bit, Complex64::new(s, 0.0)));
                    out.push((c | bit, Complex64::new(sign, 0.0)));
                } else {
                    out.push((c, one));
                }
            }
            Element::PhaseShifter { photon, arm, phase } => {
                if conv.arm_of(c, photon) == arm {
                    out.push((c, Complex64::from_polar(1.0, phase)));
                } else {
                    out.push((c, one));
                }
            }
            Element::Mirror { .. } => out.push((c, one)),
            Element::BeamSplitter(ref bs) => bs.column(conv, c, out),
        })
    }

    /// Indices that `index` can reach through this element.
    pub(crate) fn reach(&self, conv: BasisConvention, index: usize) -> Vec<usize> {
        match *self {
            Element::Pbs { photon } => {
                let flip = (index >> conv.pol_bit(photon)) & 1;
                vec![index ^ (flip << conv.path_bit(photon))]
            }
            Element::Hwp { photon, arm } if conv.arm_of(index, photon) == arm => {
                vec![index ^ (1 << conv.pol_bit(photon))]
            }
            Element::Hadamard { photon, arm } if conv.arm_of(index, photon) == arm => {
                vec![index, index ^ (1 << conv.pol_bit(photon))]
            }
            Element::BeamSplitter(ref bs) => {
                let mut v = vec![index];
                v.extend(bs.partner(conv, index));
                v
            }
            _ => vec![index],
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Pbs { photon } => write!(f, "pbs {photon}"),
            Element::Hwp { photon, arm } => write!(f, "hwp {photon} {arm}"),
            Element::Hadamard { photon, arm } => write!(f, "hadamard {photon} {arm}"),
            Element::PhaseShifter { photon, arm, phase } => {
                write!(f, "phase {photon} {arm} {phase:?}")
            }
            Element::Mirror { photon, arm } => write!(f, "mirror {photon} {arm}"),
            Element::BeamSplitter(bs) => {
                write!(
                    f,
                    "bs {} {} t={:?},{:?} r={:?},{:?} phase={:?}",
                    bs.a, bs.b, bs.t.re, bs.t.im, bs.r.re, bs.r.im, bs.phase
                )?;
                if bs.adjustable {
                    f.write_str(" adjustable")?;
                }
                Ok(())
            }
        }
    }
}
