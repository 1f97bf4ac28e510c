use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Arm, BasisConvention, Ket, I, MAX_OPERATOR_PHOTONS, ONE, PRUNE_THRESHOLD, ZERO};
use crate::error::{Error, Result};

/// Sparse linear map on a `4^n`-dimensional space, stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    convention: BasisConvention,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    vals: Vec<Complex64>,
}

type Matrix2 = [[Complex64; 2]; 2];

impl Operator {
    /// Builds an operator by asking `column` for the nonzero entries of each column.
    pub(crate) fn from_columns(
        convention: BasisConvention,
        mut column: impl FnMut(usize, &mut Vec<(usize, Complex64)>),
    ) -> Result<Self> {
        if convention.photons() > MAX_OPERATOR_PHOTONS {
            return Err(Error::input(format!(
                "operators are limited to {MAX_OPERATOR_PHOTONS} photons"
            )));
        }
        let dim = convention.dim();
        let mut col_ptr = Vec::with_capacity(dim + 1);
        let mut rows = Vec::with_capacity(dim);
        let mut vals = Vec::with_capacity(dim);
        let mut scratch = Vec::with_capacity(4);
        col_ptr.push(0);
        for col in 0..dim {
            scratch.clear();
            column(col, &mut scratch);
            scratch.sort_by_key(|&(r, _)| r);
            let mut last: Option<usize> = None;
            for &(r, v) in scratch.iter() {
                if last == Some(r) {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
                rows.push(r);
                vals.push(v);
                last = Some(r);
            }
            // drop entries that cancelled or were negligible from the start
            let start = col_ptr[col];
            let mut keep = start;
            for k in start..rows.len() {
                if vals[k].norm() >= PRUNE_THRESHOLD {
                    rows[keep] = rows[k];
                    vals[keep] = vals[k];
                    keep += 1;
                }
            }
            rows.truncate(keep);
            vals.truncate(keep);
            col_ptr.push(rows.len());
        }
        Ok(Self {
            convention,
            col_ptr,
            rows,
            vals,
        })
    }

    pub fn from_entries(
        convention: BasisConvention,
        entries: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self> {
        let dim = convention.dim();
        let mut by_col: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (r, c, v) in entries {
            if r >= dim || c >= dim {
                return Err(Error::input(format!(
                    "matrix entry ({r}, {c}) outside dimension {dim}"
                )));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::input("non-finite matrix entry"));
            }
            by_col.entry(c).or_default().push((r, v));
        }
        Self::from_columns(convention, |c, out| {
            if let Some(col) = by_col.get(&c) {
                out.extend_from_slice(col);
            }
        })
    }

    /// Row-major dense input, mostly for tests and small hand-built observables.
    pub fn from_dense(convention: BasisConvention, rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = convention.dim();
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::input(format!("dense matrix must be {dim}x{dim}")));
        }
        Self::from_entries(
            convention,
            rows.iter().enumerate().flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| v.norm() > 0.0)
                    .map(move |(c, &v)| (r, c, v))
            }),
        )
    }

    pub fn identity(convention: BasisConvention) -> Result<Self> {
        Self::from_columns(convention, |c, out| out.push((c, ONE)))
    }

    /// Places the 2x2 matrix `m` on the factor at bit position `bit`.
    pub(crate) fn on_factor(convention: BasisConvention, bit: usize, m: Matrix2) -> Result<Self> {
        Self::from_columns(convention, |c, out| {
            let b = (c >> bit) & 1;
            for (r_bit, row) in m.iter().enumerate() {
                let v = row[b];
                if v != ZERO {
                    out.push(((c & !(1 << bit)) | (r_bit << bit), v));
                }
            }
        })
    }

    pub fn path_projector(convention: BasisConvention, photon: usize, arm: Arm) -> Result<Self> {
        convention.check_photon(photon)?;
        let m = match arm {
            Arm::L => [[ONE, ZERO], [ZERO, ZERO]],
            Arm::R => [[ZERO, ZERO], [ZERO, ONE]],
        };
        Self::on_factor(convention, convention.path_bit(photon), m)
    }

    /// `|↑><↑| - |↓><↓|` with `|↑> = (|H> + i|V>)/√2`, which is
    /// `[[0, -i], [i, 0]]` in the H/V basis.
    pub fn circular_sigma_z(convention: BasisConvention, photon: usize) -> Result<Self> {
        convention.check_photon(photon)?;
        Self::on_factor(convention, convention.pol_bit(photon), [[ZERO, -I], [I, ZERO]])
    }

    pub fn grin_observable(convention: BasisConvention, photon: usize, arm: Arm) -> Result<Self> {
        let sigma = Self::circular_sigma_z(convention, photon)?;
        let proj = Self::path_projector(convention, photon, arm)?;
        sigma.compose(&proj)
    }

    pub fn convention(&self) -> BasisConvention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        self.convention.dim()
    }

    /// Stored nonzero entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub(crate) fn column(&self, col: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let (a, b) = (self.col_ptr[col], self.col_ptr[col + 1]);
        self.rows[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    /// `(row, col, value)` for every stored entry, column-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |c| self.column(c).map(move |(r, v)| (r, c, v)))
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.column(col)
            .find(|&(r, _)| r == row)
            .map(|(_, v)| v)
            .unwrap_or(ZERO)
    }

    pub fn apply(&self, state: &Ket) -> Result<Ket> {
        self.check(state.convention())?;
        let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
        for (col, amp) in state.iter() {
            for (r, v) in self.column(col) {
                *acc.entry(r).or_insert(ZERO) += v * amp;
            }
        }
        Ok(Ket::from_map(self.convention, acc))
    }

    /// `<bra| self |ket>` without materializing `self |ket>`.
    pub fn matrix_element(&self, bra: &Ket, ket: &Ket) -> Result<Complex64> {
        self.check(bra.convention())?;
        self.check(ket.convention())?;
        let mut acc = ZERO;
        for (col, amp) in ket.iter() {
            for (r, v) in self.column(col) {
                let b = bra.amplitude(r);
                if b != ZERO {
                    acc += b.conj() * v * amp;
                }
            }
        }
        Ok(acc)
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Operator) -> Result<Self> {
        self.check(rhs.convention)?;
        let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
        Self::from_columns(self.convention, |c, out| {
            acc.clear();
            for (k, b) in rhs.column(c) {
                for (r, a) in self.column(k) {
                    *acc.entry(r).or_insert(ZERO) += a * b;
                }
            }
            out.extend(acc.iter().map(|(&r, &v)| (r, v)));
        })
    }

    /// `a·self + b·rhs`.
    pub fn linear_combination(&self, a: Complex64, rhs: &Operator, b: Complex64) -> Result<Self> {
        self.check(rhs.convention)?;
        Self::from_columns(self.convention, |c, out| {
            out.extend(self.column(c).map(|(r, v)| (r, a * v)));
            out.extend(rhs.column(c).map(|(r, v)| (r, b * v)));
        })
    }

    pub fn add(&self, rhs: &Operator) -> Result<Self> {
        self.linear_combination(ONE, rhs, ONE)
    }

    pub fn sub(&self, rhs: &Operator) -> Result<Self> {
        self.linear_combination(ONE, rhs, -ONE)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= factor;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let dim = self.dim();
        let mut by_col: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for (r, c, v) in self.entries() {
            by_col[r].push((c, v.conj()));
        }
        Self::from_columns(self.convention, |c, out| out.extend_from_slice(&by_col[c]))
            .expect("adjoint preserves the convention")
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.vals.iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint())
            .map(|d| d <= tol)
            .unwrap_or(false)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let dim = self.dim();
        let mut out = vec![vec![ZERO; dim]; dim];
        for (r, c, v) in self.entries() {
            out[r][c] = v;
        }
        out
    }

    fn check(&self, convention: BasisConvention) -> Result<()> {
        if convention != self.convention {
            return Err(Error::input(format!(
                "operator acts on {}, state lives on {}",
                self.convention, convention
            )));
        }
        Ok(())
    }
}
