//! Synthesis of post-selected states from target weak values.
//!
//! A target `<O>_w = w` is the ratio `<f|O|i> / <f|i> = w`. Clearing the
//! denominator gives `<f|(O - w)|i> = 0`, which is linear in the conjugated
//! post amplitudes `m = conj(f)`. Every target contributes one row; the post
//! state is read off the nullspace of the stacked rows, keeping only vectors
//! whose overlap with the pre-state is nonzero.

mod problem;

pub use problem::{parse_observable, parse_problem, ObservableSpec, Problem};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{Ket, Operator};
use crate::weakval::{weak_value, PrePostPair, OVERLAP_THRESHOLD};

/// Singular values at or below this fraction of the largest count as zero.
pub const SINGULAR_CUTOFF: f64 = 1e-10;

/// Largest photon number the dense solver accepts (`4^4 = 256` unknowns).
pub const MAX_SOLVER_PHOTONS: usize = 4;

const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Relative size below which an entry of a nullspace vector is zero.
const ENTRY_CUTOFF: f64 = 1e-12;

/// Requested weak value of one observable.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValueTarget {
    observable: Operator,
    target: Complex64,
}

impl WeakValueTarget {
    pub fn new(observable: Operator, target: Complex64) -> Result<Self> {
        if !observable.is_hermitian(HERMITIAN_TOLERANCE) {
            return Err(Error::input("target observable is not Hermitian"));
        }
        if !(target.re.is_finite() && target.im.is_finite()) {
            return Err(Error::input("target weak value must be finite"));
        }
        Ok(Self { observable, target })
    }

    pub fn observable(&self) -> &Operator {
        &self.observable
    }

    pub fn target(&self) -> Complex64 {
        self.target
    }
}

/// Rows act on `m = conj(post)`: `row · m = <post|(O - w)|pre>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    matrix: DMatrix<Complex64>,
    pre: Ket,
}

impl ConstraintSystem {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn pre(&self) -> &Ket {
        &self.pre
    }

    /// 0-based columns with a nonzero entry in some row.
    pub fn touched_columns(&self) -> Vec<usize> {
        (0..self.matrix.ncols())
            .filter(|&c| self.matrix.column(c).iter().any(|v| v.norm() > 0.0))
            .collect()
    }

    /// `‖matrix · conj(post)‖`.
    pub fn residual_norm(&self, post: &Ket) -> Result<f64> {
        if post.convention() != self.pre.convention() {
            return Err(Error::input("post-state photon count differs from the system"));
        }
        let m = DVector::from_iterator(
            self.matrix.ncols(),
            (0..self.matrix.ncols()).map(|k| post.amplitude(k).conj()),
        );
        Ok((&self.matrix * m).norm())
    }
}

pub fn assemble(pre: &Ket, targets: &[WeakValueTarget]) -> Result<ConstraintSystem> {
    if targets.is_empty() {
        return Err(Error::input("at least one weak-value target is required"));
    }
    if pre.is_zero() {
        return Err(Error::input("pre-state is zero"));
    }
    let conv = pre.convention();
    if conv.photons() > MAX_SOLVER_PHOTONS {
        return Err(Error::input(format!(
            "solver limited to {MAX_SOLVER_PHOTONS} photons"
        )));
    }
    let dim = conv.dim();
    let mut matrix = DMatrix::<Complex64>::zeros(targets.len(), dim);
    for (r, t) in targets.iter().enumerate() {
        if t.observable.convention() != conv {
            return Err(Error::input("target observable photon count differs from the pre-state"));
        }
        let applied = t.observable.apply(pre)?;
        let shifted = Ket::superpose(&[
            (Complex64::new(1.0, 0.0), &applied),
            (-t.target, pre),
        ])?;
        for (k, v) in shifted.iter() {
            matrix[(r, k)] = v;
        }
    }
    Ok(ConstraintSystem {
        matrix,
        pre: pre.clone(),
    })
}

/// Orthonormal nullspace basis of `matrix`, one vector per row.
fn nullspace(matrix: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (rows, cols) = matrix.shape();
    // pad to square so the SVD returns a complete set of right singular vectors
    let size = rows.max(cols);
    let mut padded = DMatrix::<Complex64>::zeros(size, cols);
    padded.view_mut((0, 0), (rows, cols)).copy_from(matrix);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let null: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= SINGULAR_CUTOFF * sigma_max)
        .collect();
    let mut basis = DMatrix::<Complex64>::zeros(null.len(), cols);
    for (r, &k) in null.iter().enumerate() {
        for c in 0..cols {
            // A v = 0 for v the conjugate of a row of V^H
            basis[(r, c)] = v_t[(k, c)].conj();
        }
    }
    basis
}

/// Reduced row echelon form with pivots taken in ascending column order.
/// Returns the reduced rows and their pivot columns.
fn rref(mut m: DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<usize>) {
    let (rows, cols) = m.shape();
    let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = ENTRY_CUTOFF * scale.max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows).max_by(|&a, &b| m[(a, c)].norm().total_cmp(&m[(b, c)].norm()));
        let Some(p) = best.filter(|&p| m[(p, c)].norm() > tol) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = Complex64::new(1.0, 0.0) / m[(r, c)];
        for j in 0..cols {
            m[(r, j)] *= inv;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, c)];
                if f != Complex64::new(0.0, 0.0) {
                    for j in 0..cols {
                        let sub = f * m[(r, j)];
                        m[(i, j)] -= sub;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    for v in m.iter_mut() {
        if v.norm() <= tol {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    (m.rows(0, r).into_owned(), pivots)
}

/// Picks the nullspace vector with nonzero pre-state overlap and the fewest
/// nonzero amplitudes, ties going to the earliest pivot. The result is the
/// unnormalized post-state, phased so its amplitude on the pre-state's first
/// (lowest-index) term is exactly `-i`.
pub fn solve_post(system: &ConstraintSystem) -> Result<Ket> {
    let basis = nullspace(&system.matrix);
    if basis.nrows() == 0 {
        return Err(Error::Infeasible(format!(
            "the {} targets admit no nonzero post-state",
            system.matrix.nrows()
        )));
    }
    let (reduced, _) = rref(basis);
    let conv = system.pre.convention();
    let pre: Vec<(usize, Complex64)> = system.pre.iter().collect();
    let pre_norm = system.pre.norm();

    let mut best: Option<(usize, usize)> = None;
    for r in 0..reduced.nrows() {
        let row = reduced.row(r);
        // <post|pre> with post = conj(m)
        let overlap: Complex64 = pre.iter().map(|&(k, a)| row[k] * a).sum();
        if overlap.norm() <= OVERLAP_THRESHOLD * row.norm() * pre_norm {
            continue;
        }
        let support = row.iter().filter(|v| v.norm() > 0.0).count();
        if best.is_none_or(|(_, s)| support < s) {
            best = Some((r, support));
        }
    }
    let (r, _) = best.ok_or(Error::VacuousSelection)?;
    let row = reduced.row(r);
    let post = Ket::from_amplitudes(conv, (0..row.len()).map(|k| (k, row[k].conj())))?;

    let anchor = pre
        .iter()
        .map(|&(k, _)| post.amplitude(k))
        .find(|a| a.norm() > ENTRY_CUTOFF * post.norm());
    Ok(match anchor {
        Some(a) => post.scaled(Complex64::new(0.0, -1.0) / a),
        None => post,
    })
}

/// Largest `|<O>_w - w|` over the targets for the given pair.
pub fn verify(pre: &Ket, post: &Ket, targets: &[WeakValueTarget]) -> Result<f64> {
    let pair = PrePostPair::new(pre.clone(), post.clone())?;
    let mut worst: f64 = 0.0;
    for t in targets {
        worst = worst.max((weak_value(&t.observable, &pair)? - t.target).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Arm, BasisConvention};
    use crate::weakval::ObservableKey;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn conv2() -> BasisConvention {
        BasisConvention::new(2).unwrap()
    }

    fn delta_targets(conv: BasisConvention) -> Vec<WeakValueTarget> {
        let pattern = crate::scenarios::expected_pattern(crate::scenarios::ScenarioId::TwoCat);
        ObservableKey::all(conv.photons())
            .into_iter()
            .map(|k| {
                WeakValueTarget::new(k.operator(conv).unwrap(), c(f64::from(pattern.get(k).unwrap()), 0.0))
                    .unwrap()
            })
            .collect()
    }

    fn general_pre(theta: f64, phi: f64) -> Ket {
        Ket::from_amplitudes(
            conv2(),
            [(4, c(theta.cos(), 0.0)), (8, Complex64::from_polar(theta.sin(), phi))],
        )
        .unwrap()
    }

    #[test]
    fn non_hermitian_target_rejected() {
        let conv = BasisConvention::new(1).unwrap();
        let op = Operator::from_entries(conv, [(0, 1, c(1.0, 0.0))]).unwrap();
        assert!(WeakValueTarget::new(op, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn two_cat_system_touches_six_components() {
        let sys = assemble(&general_pre(0.4, 1.0), &delta_targets(conv2())).unwrap();
        assert_eq!(sys.matrix().shape(), (8, 16));
        // 1-based {5, 6, 7, 9, 10, 11}
        assert_eq!(sys.touched_columns(), vec![4, 5, 6, 8, 9, 10]);
    }

    #[test]
    fn identity_target_row_vanishes() {
        let pre = general_pre(0.4, 1.0);
        let t = WeakValueTarget::new(Operator::identity(conv2()).unwrap(), c(1.0, 0.0)).unwrap();
        let sys = assemble(&pre, &[t]).unwrap();
        assert!(sys.matrix().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn single_term_projector_row() {
        let pre = Ket::basis(conv2(), "0100").unwrap();
        let pl1 = Operator::path_projector(conv2(), 1, Arm::L).unwrap();
        let sys = assemble(&pre, &[WeakValueTarget::new(pl1.clone(), c(0.0, 0.0)).unwrap()]).unwrap();
        assert_eq!(sys.touched_columns(), vec![4]);
        assert_eq!(sys.matrix()[(0, 4)], c(1.0, 0.0));

        let sys = assemble(&pre, &[WeakValueTarget::new(pl1, c(1.0, 0.0)).unwrap()]).unwrap();
        let post = solve_post(&sys).unwrap();
        assert_eq!(post, Ket::basis(conv2(), "0100").unwrap().scaled(c(0.0, -1.0)));
    }

    #[test]
    fn empty_targets_rejected() {
        assert!(assemble(&general_pre(0.4, 0.0), &[]).is_err());
    }

    #[test]
    fn two_cat_solution_at_quarter_pi() {
        let pre = general_pre(std::f64::consts::FRAC_PI_4, 0.0);
        let sys = assemble(&pre, &delta_targets(conv2())).unwrap();
        let post = solve_post(&sys).unwrap();
        let want =
            Ket::from_amplitudes(conv2(), [(4, c(0.0, -1.0)), (9, c(1.0, 0.0)), (10, c(1.0, 0.0))])
                .unwrap();
        assert!(post.max_abs_diff(&want).unwrap() < 1e-12, "{post}");
    }

    #[test]
    fn contradictory_targets_are_vacuous() {
        let pre = general_pre(0.4, 0.0);
        let pl1 = Operator::path_projector(conv2(), 1, Arm::L).unwrap();
        let targets = [
            WeakValueTarget::new(pl1.clone(), c(1.0, 0.0)).unwrap(),
            WeakValueTarget::new(pl1, c(0.0, 0.0)).unwrap(),
        ];
        assert_eq!(solve_post(&assemble(&pre, &targets).unwrap()), Err(Error::VacuousSelection));
    }

    #[test]
    fn full_rank_system_is_infeasible() {
        let conv = BasisConvention::new(1).unwrap();
        let pre = Ket::from_amplitudes(
            conv,
            [(0, c(1.0, 0.0)), (1, c(0.0, 1.0)), (2, c(0.5, 0.0)), (3, c(0.25, 0.0))],
        )
        .unwrap();
        // rank is full unless the target values sum to 1
        let targets: Vec<_> = [(0usize, 2.0), (1, -1.0), (2, 3.0), (3, 0.5)]
            .into_iter()
            .map(|(k, w)| {
                let op = Operator::from_entries(conv, [(k, k, c(1.0, 0.0))]).unwrap();
                WeakValueTarget::new(op, c(w, 0.0)).unwrap()
            })
            .collect();
        assert!(matches!(
            solve_post(&assemble(&pre, &targets).unwrap()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn verify_examples() {
        let pre = general_pre(std::f64::consts::FRAC_PI_4, 0.0);
        let targets = delta_targets(conv2());
        let post = solve_post(&assemble(&pre, &targets).unwrap()).unwrap();
        assert!(verify(&pre, &post, &targets).unwrap() < 1e-12);

        let bumped = Ket::superpose(&[
            (c(1.0, 0.0), &post),
            (c(1e-3, 0.0), &Ket::basis(conv2(), "0100").unwrap()),
        ])
        .unwrap();
        assert!(verify(&pre, &bumped, &targets).unwrap() > 1e-5);

        let id = WeakValueTarget::new(Operator::identity(conv2()).unwrap(), c(1.0, 0.0)).unwrap();
        assert_eq!(verify(&pre, &post, &[id]).unwrap(), 0.0);
    }

    #[test]
    fn rref_is_canonical() {
        let m = DMatrix::from_row_slice(
            2,
            3,
            &[c(2.0, 0.0), c(4.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)],
        );
        let (r, pivots) = rref(m);
        assert_eq!(pivots, vec![0, 2]);
        assert_eq!(r[(0, 1)], c(2.0, 0.0));
        assert_eq!(r[(1, 2)], c(1.0, 0.0));
        assert_eq!(r[(0, 2)], c(0.0, 0.0));
    }
}
