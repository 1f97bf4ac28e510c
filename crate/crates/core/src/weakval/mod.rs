//! Weak values `<Ψ_f|O|Ψ_0> / <Ψ_f|Ψ_0>` and their readout through a weakly
//! coupled pointer.

mod pointer;
mod report;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{BasisConvention, Ket, Operator};

pub use pointer::{
    converges_quadratically, pointer_shift, pointer_sweep, PointerConfig, PointerShift, SweepRow,
    DEVIATION_FLOOR, MIN_HALVING_RATIO,
};
pub use report::{sig12, weak_value_report, ObservableKey, ObservableKind, WeakValueReport};

/// Relative overlap `|<Ψ_f|Ψ_0>| / (|Ψ_f| |Ψ_0|)` at or below which weak values are refused.
pub const OVERLAP_THRESHOLD: f64 = 1e-10;

/// A pre-selected and a post-selected state on the same basis.
///
/// Neither state has to be normalized; weak values do not depend on scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PrePostPair {
    pre: Ket,
    post: Ket,
}

impl PrePostPair {
    pub fn new(pre: Ket, post: Ket) -> Result<Self> {
        if pre.convention() != post.convention() {
            return Err(Error::input(
                "pre- and post-selected states use different basis conventions",
            ));
        }
        if pre.is_zero() || post.is_zero() {
            return Err(Error::Degenerate("pre- or post-selected state is zero".into()));
        }
        Ok(Self { pre, post })
    }

    pub fn pre(&self) -> &Ket {
        &self.pre
    }

    pub fn post(&self) -> &Ket {
        &self.post
    }

    pub fn convention(&self) -> BasisConvention {
        self.pre.convention()
    }

    pub fn photons(&self) -> usize {
        self.pre.photons()
    }

    /// `<Ψ_f|Ψ_0>`.
    pub fn overlap(&self) -> Complex64 {
        self.post
            .inner(&self.pre)
            .expect("conventions checked at construction")
    }

    /// Both states scaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        Self::new(self.pre.normalized()?, self.post.normalized()?)
    }

    /// The overlap, or [`Error::AnomalousSelection`] when it is too small to divide by.
    pub fn checked_overlap(&self) -> Result<Complex64> {
        let overlap = self.overlap();
        if overlap.norm() <= OVERLAP_THRESHOLD * self.pre.norm() * self.post.norm() {
            return Err(Error::AnomalousSelection { overlap });
        }
        Ok(overlap)
    }

    /// Post-selection probability `|<Ψ_f|Ψ_0>|^2` for the normalized states.
    pub fn success_probability(&self) -> f64 {
        self.overlap().norm_sqr() / (self.pre.norm_sqr() * self.post.norm_sqr())
    }
}

pub fn weak_value(obs: &Operator, pair: &PrePostPair) -> Result<Complex64> {
    let overlap = pair.checked_overlap()?;
    Ok(obs.matrix_element(&pair.post, &pair.pre)? / overlap)
}
