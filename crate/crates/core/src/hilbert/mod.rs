//! Sparse state vectors and operators on `n` photons, each carrying a path
//! qubit (L/R) and a polarization qubit (H/V).
//!
//! Basis indices read the `2n` factors as a binary number in the fixed order
//! `path_1 .. path_n pol_1 .. pol_n`, most significant factor first, with
//! `L, H -> 0` and `R, V -> 1`. So for two photons `|L_1 R_2 H_1 H_2>` is
//! `0100`, index 4.

mod ket;
mod operator;
mod text;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ket::Ket;
pub use operator::Operator;
pub use text::{parse_ket, parse_operator};

/// Amplitudes whose magnitude falls below this are dropped after arithmetic.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Tolerance on `|norm^2 - 1|` for a ket to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Largest photon count for which kets may be built (index must fit the basis labels).
pub const MAX_PHOTONS: usize = 24;

/// Operators store every column explicitly; past this they stop fitting in memory.
pub const MAX_OPERATOR_PHOTONS: usize = 10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which arm of its interferometer a photon travels through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Arm {
    L,
    R,
}

/// Linear polarization basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pol {
    H,
    V,
}

impl Arm {
    pub fn bit(self) -> usize {
        match self {
            Arm::L => 0,
            Arm::R => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Arm::L
        } else {
            Arm::R
        }
    }

    pub fn other(self) -> Self {
        match self {
            Arm::L => Arm::R,
            Arm::R => Arm::L,
        }
    }
}

impl Pol {
    pub fn bit(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Pol::H
        } else {
            Pol::V
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arm::L => "L",
            Arm::R => "R",
        })
    }
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pol::H => "H",
            Pol::V => "V",
        })
    }
}

impl FromStr for Arm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" => Ok(Arm::L),
            "R" | "r" => Ok(Arm::R),
            _ => Err(Error::input(format!("unknown arm `{s}`, expected L or R"))),
        }
    }
}

impl FromStr for Pol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(Pol::H),
            "V" | "v" => Ok(Pol::V),
            _ => Err(Error::input(format!("unknown polarization `{s}`, expected H or V"))),
        }
    }
}

/// Basis layout for `n` photons: all path factors, then all polarization factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisConvention {
    n_photons: usize,
}

impl BasisConvention {
    pub fn new(n_photons: usize) -> Result<Self> {
        if n_photons == 0 || n_photons > MAX_PHOTONS {
            return Err(Error::input(format!(
                "photon count must be in 1..={MAX_PHOTONS}, got {n_photons}"
            )));
        }
        Ok(Self { n_photons })
    }

    pub fn photons(&self) -> usize {
        self.n_photons
    }

    /// Number of two-level factors, `2n`.
    pub fn factors(&self) -> usize {
        2 * self.n_photons
    }

    /// Hilbert space dimension, `4^n`.
    pub fn dim(&self) -> usize {
        1usize << self.factors()
    }

    pub(crate) fn check_photon(&self, photon: usize) -> Result<()> {
        if photon == 0 || photon > self.n_photons {
            return Err(Error::input(format!(
                "photon index {photon} out of range 1..={}",
                self.n_photons
            )));
        }
        Ok(())
    }

    /// Bit position (from the least significant end) of photon `photon`'s path factor.
    pub fn path_bit(&self, photon: usize) -> usize {
        2 * self.n_photons - photon
    }

    /// Bit position of photon `photon`'s polarization factor.
    pub fn pol_bit(&self, photon: usize) -> usize {
        self.n_photons - photon
    }

    pub fn arm_of(&self, index: usize, photon: usize) -> Arm {
        Arm::from_bit(index >> self.path_bit(photon))
    }

    pub fn pol_of(&self, index: usize, photon: usize) -> Pol {
        Pol::from_bit(index >> self.pol_bit(photon))
    }

    /// Path block of an index: the top `n` bits.
    pub fn path_part(&self, index: usize) -> usize {
        index >> self.n_photons
    }

    /// Polarization block of an index: the low `n` bits.
    pub fn pol_part(&self, index: usize) -> usize {
        index & ((1usize << self.n_photons) - 1)
    }

    pub fn compose_index(&self, path: usize, pol: usize) -> usize {
        (path << self.n_photons) | pol
    }

    /// `2n`-character binary label of a basis index.
    pub fn label(&self, index: usize) -> String {
        let width = self.factors();
        (0..width)
            .map(|k| {
                if (index >> (width - 1 - k)) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }

    /// Parses a basis label into its index.
    ///
    /// Accepts the binary form (`0100`, spaces or underscores allowed as
    /// separators) and the alias form `L1 R2 H1 H2`, where every photon gets
    /// exactly one path token and one polarization token in any order.
    pub fn parse_label(&self, label: &str) -> Result<usize> {
        let trimmed = label.trim();
        if trimmed.is_empty() {
            return Err(Error::input("empty basis label"));
        }
        if trimmed
            .chars()
            .all(|c| c == '0' || c == '1' || c == ' ' || c == '_')
        {
            let bits: Vec<char> = trimmed.chars().filter(|c| *c == '0' || *c == '1').collect();
            if bits.len() != self.factors() {
                return Err(Error::input(format!(
                    "label `{trimmed}` has {} bits, expected {}",
                    bits.len(),
                    self.factors()
                )));
            }
            return Ok(bits
                .iter()
                .fold(0usize, |acc, &c| (acc << 1) | usize::from(c == '1')));
        }
        self.parse_alias(trimmed)
    }

    fn parse_alias(&self, label: &str) -> Result<usize> {
        let n = self.n_photons;
        let mut path: Vec<Option<Arm>> = vec![None; n];
        let mut pol: Vec<Option<Pol>> = vec![None; n];
        let mut chars = label.chars().peekable();
        while let Some(c) = chars.next() {
            if c.is_whitespace() {
                continue;
            }
            let mut digits = String::new();
            while let Some(d) = chars.peek().copied().filter(char::is_ascii_digit) {
                digits.push(d);
                chars.next();
            }
            if digits.is_empty() {
                return Err(Error::input(format!(
                    "label token `{c}` lacks a photon index"
                )));
            }
            let photon: usize = digits
                .parse()
                .map_err(|_| Error::input(format!("bad photon index `{digits}`")))?;
            self.check_photon(photon)?;
            let slot = photon - 1;
            let dup = match c {
                'L' | 'R' => path[slot]
                    .replace(c.to_string().parse::<Arm>()?)
                    .is_some(),
                'H' | 'V' => pol[slot].replace(c.to_string().parse::<Pol>()?).is_some(),
                _ => {
                    return Err(Error::input(format!(
                        "unexpected character `{c}` in basis label"
                    )))
                }
            };
            if dup {
                return Err(Error::input(format!(
                    "photon {photon} given twice for the same degree of freedom"
                )));
            }
        }
        let mut index = 0usize;
        for photon in 1..=n {
            let arm = path[photon - 1]
                .ok_or_else(|| Error::input(format!("label missing path of photon {photon}")))?;
            let p = pol[photon - 1].ok_or_else(|| {
                Error::input(format!("label missing polarization of photon {photon}"))
            })?;
            index |= arm.bit() << self.path_bit(photon);
            index |= p.bit() << self.pol_bit(photon);
        }
        Ok(index)
    }

    /// Human-readable `L1R2H1H2` style label.
    pub fn alias(&self, index: usize) -> String {
        let n = self.n_photons;
        let mut s = String::with_capacity(4 * n);
        for photon in 1..=n {
            s.push_str(&format!("{}{}", self.arm_of(index, photon), photon));
        }
        for photon in 1..=n {
            s.push_str(&format!("{}{}", self.pol_of(index, photon), photon));
        }
        s
    }
}

impl fmt::Display for BasisConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "photons={} order=paths-then-pols", self.n_photons)
    }
}

/// Builds the basis ket named by `label` (binary or alias form).
pub fn basis_ket(convention: BasisConvention, label: &str) -> Result<Ket> {
    Ket::basis(convention, label)
}

/// `Σ c_k |ψ_k>` over kets sharing one convention.
pub fn superpose(terms: &[(Complex64, &Ket)]) -> Result<Ket> {
    Ket::superpose(terms)
}

/// `<bra|ket>`, conjugate-linear in `bra`.
pub fn inner(bra: &Ket, ket: &Ket) -> Result<Complex64> {
    bra.inner(ket)
}

pub fn apply(op: &Operator, state: &Ket) -> Result<Ket> {
    op.apply(state)
}

pub fn normalize(state: &Ket) -> Result<Ket> {
    state.normalized()
}

/// `|μ><μ|` on photon `photon`'s path, identity elsewhere.
pub fn path_projector(convention: BasisConvention, photon: usize, arm: Arm) -> Result<Operator> {
    Operator::path_projector(convention, photon, arm)
}

/// Circular polarization observable `|↑><↑| - |↓><↓|` on photon `photon`.
pub fn circular_sigma_z(convention: BasisConvention, photon: usize) -> Result<Operator> {
    Operator::circular_sigma_z(convention, photon)
}

/// `σ_z^i Π_{μ_i}`: the polarization of photon `photon` found in arm `arm`.
pub fn grin_observable(convention: BasisConvention, photon: usize, arm: Arm) -> Result<Operator> {
    Operator::grin_observable(convention, photon, arm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_and_alias_labels_agree() {
        let conv = BasisConvention::new(2).unwrap();
        assert_eq!(conv.parse_label("0100").unwrap(), 4);
        assert_eq!(conv.parse_label("L1 R2 H1 H2").unwrap(), 4);
        assert_eq!(conv.parse_label("H2 R2 L1 H1").unwrap(), 4);
        assert_eq!(conv.parse_label("01 00").unwrap(), 4);
        assert_eq!(conv.alias(4), "L1R2H1H2");
        assert_eq!(conv.label(9), "1001");
    }

    #[test]
    fn one_photon_label() {
        let conv = BasisConvention::new(1).unwrap();
        assert_eq!(conv.parse_label("10").unwrap(), 2);
        assert_eq!(conv.parse_label("R1H1").unwrap(), 2);
    }

    #[test]
    fn bad_labels_are_rejected() {
        let conv = BasisConvention::new(2).unwrap();
        for bad in ["010", "01000", "0120", "", "L1 R2 H1", "L1 L1 H1 H2", "L3 R2 H1 H2", "X1"] {
            assert!(
                matches!(conv.parse_label(bad), Err(Error::Input(_))),
                "accepted `{bad}`"
            );
        }
    }

    #[test]
    fn factor_positions() {
        let conv = BasisConvention::new(3).unwrap();
        let idx = conv.parse_label("101 001").unwrap();
        assert_eq!(idx, 41);
        assert_eq!(conv.arm_of(idx, 1), Arm::R);
        assert_eq!(conv.arm_of(idx, 2), Arm::L);
        assert_eq!(conv.pol_of(idx, 3), Pol::V);
        assert_eq!(conv.pol_of(idx, 1), Pol::H);
        assert_eq!(conv.path_part(idx), 0b101);
        assert_eq!(conv.pol_part(idx), 0b001);
    }

    #[test]
    fn zero_photons_rejected() {
        assert!(BasisConvention::new(0).is_err());
    }
}
