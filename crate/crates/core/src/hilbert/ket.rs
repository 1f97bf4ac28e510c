use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::{BasisConvention, NORM_TOLERANCE, PRUNE_THRESHOLD, ZERO};
use crate::error::{Error, Result};

/// Sparse complex amplitude vector over a [`BasisConvention`].
///
/// Amplitudes are kept in index order, so iteration (and anything summed over
/// it) is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    convention: BasisConvention,
    amplitudes: BTreeMap<usize, Complex64>,
    normalized: bool,
}

impl Ket {
    pub fn zero(convention: BasisConvention) -> Self {
        Self {
            convention,
            amplitudes: BTreeMap::new(),
            normalized: false,
        }
    }

    pub fn basis(convention: BasisConvention, label: &str) -> Result<Self> {
        let index = convention.parse_label(label)?;
        Self::from_index(convention, index)
    }

    pub fn from_index(convention: BasisConvention, index: usize) -> Result<Self> {
        Self::from_amplitudes(convention, [(index, Complex64::new(1.0, 0.0))])
    }

    /// Sums repeated indices, drops negligible amplitudes.
    pub fn from_amplitudes(
        convention: BasisConvention,
        terms: impl IntoIterator<Item = (usize, Complex64)>,
    ) -> Result<Self> {
        let dim = convention.dim();
        let mut amplitudes = BTreeMap::new();
        for (index, amp) in terms {
            if index >= dim {
                return Err(Error::input(format!(
                    "basis index {index} outside dimension {dim}"
                )));
            }
            if !(amp.re.is_finite() && amp.im.is_finite()) {
                return Err(Error::input("non-finite amplitude"));
            }
            *amplitudes.entry(index).or_insert(ZERO) += amp;
        }
        Ok(Self::from_map(convention, amplitudes))
    }

    pub(crate) fn from_map(
        convention: BasisConvention,
        mut amplitudes: BTreeMap<usize, Complex64>,
    ) -> Self {
        amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        let norm_sqr: f64 = amplitudes.values().map(|a| a.norm_sqr()).sum();
        Self {
            convention,
            amplitudes,
            normalized: (norm_sqr - 1.0).abs() <= NORM_TOLERANCE,
        }
    }

    /// Linear combination of kets on one convention.
    pub fn superpose(terms: &[(Complex64, &Ket)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::input("superpose needs at least one term"))?;
        let convention = first.convention;
        let mut acc = BTreeMap::new();
        for (coeff, ket) in terms {
            if ket.convention != convention {
                return Err(Error::input("superpose over mixed basis conventions"));
            }
            for (&index, &amp) in &ket.amplitudes {
                *acc.entry(index).or_insert(ZERO) += coeff * amp;
            }
        }
        Ok(Self::from_map(convention, acc))
    }

    pub fn convention(&self) -> BasisConvention {
        self.convention
    }

    pub fn photons(&self) -> usize {
        self.convention.photons()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes.get(&index).copied().unwrap_or(ZERO)
    }

    /// Nonzero amplitudes in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amplitudes.iter().map(|(&k, &v)| (k, v))
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn support(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        self.same_convention(other)?;
        let (small, large, conj_small) = if self.amplitudes.len() <= other.amplitudes.len() {
            (&self.amplitudes, &other.amplitudes, true)
        } else {
            (&other.amplitudes, &self.amplitudes, false)
        };
        let mut acc = ZERO;
        for (index, a) in small {
            if let Some(b) = large.get(index) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let map = self
            .amplitudes
            .iter()
            .map(|(&k, &v)| (k, v * factor))
            .collect();
        Self::from_map(self.convention, map)
    }

    /// Unit-norm copy; the global phase is left alone.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm < PRUNE_THRESHOLD {
            return Err(Error::Degenerate("cannot normalize the zero vector".into()));
        }
        let mut out = self.scaled(Complex64::new(1.0 / norm, 0.0));
        out.normalized = (out.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE;
        Ok(out)
    }

    /// `|<a|b>| / (|a| |b|)`, the overlap after discarding global phase and scale.
    pub fn phase_free_overlap(&self, other: &Ket) -> Result<f64> {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return Err(Error::Degenerate("overlap with a zero vector".into()));
        }
        Ok(self.inner(other)?.norm() / denom)
    }

    /// Largest entrywise `|a_k - b_k|`.
    pub fn max_abs_diff(&self, other: &Ket) -> Result<f64> {
        self.same_convention(other)?;
        let mut worst: f64 = 0.0;
        for (k, a) in self.iter() {
            worst = worst.max((a - other.amplitude(k)).norm());
        }
        for (k, b) in other.iter() {
            if !self.amplitudes.contains_key(&k) {
                worst = worst.max(b.norm());
            }
        }
        Ok(worst)
    }

    /// Entrywise equality after removing the global phase that best aligns
    /// `other` with `self`.
    pub fn max_abs_diff_up_to_phase(&self, other: &Ket) -> Result<f64> {
        let ov = other.inner(self)?;
        let phase = if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.max_abs_diff(&other.scaled(phase))
    }

    fn same_convention(&self, other: &Ket) -> Result<()> {
        if self.convention != other.convention {
            return Err(Error::input(format!(
                "basis conventions differ ({} vs {})",
                self.convention, other.convention
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Ket {
    /// `(a)|0100> + (b)|1000>` with binary labels.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.amplitudes.is_empty() {
            return f.write_str("0");
        }
        for (n, (index, amp)) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.12}{:+.12}i)|{}>", amp.re, amp.im, self.convention.label(index))?;
        }
        Ok(())
    }
}
