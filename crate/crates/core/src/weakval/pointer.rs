//! Von Neumann readout of a weak value.
//!
//! The system is coupled to a Gaussian pointer by `exp(-i g O ⊗ p)`, then
//! post-selected on `|Ψ_f>`. The conditional pointer state is
//!
//! ```text
//! ψ(p) = φ(p) <Ψ_f| exp(-i g p O) |Ψ_0>
//! ```
//!
//! in momentum space. `exp(-i g p O)|Ψ_0>` only needs `O` on the Krylov space
//! of `|Ψ_0>`, which is small for the observables used here, so the operator
//! is diagonalized there instead of on the full `4^n` space. The pointer lives
//! on a uniform position grid; momentum multiplication goes through the FFT.
//!
//! To first order, the mean position moves by `g Re<O>_w` and the mean
//! momentum by `2 g σ_p² Im<O>_w`, where `σ_p` is the pointer's momentum
//! spread (position spread `1 / (2 σ_p)`).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::PrePostPair;
use crate::error::{Error, Result};
use crate::hilbert::{Ket, Operator};

/// Smallest post-selection probability the pointer simulation accepts.
pub const MIN_POSTSELECTION_PROBABILITY: f64 = 1e-15;

/// Gaussian tail bound the grid has to respect in both position and momentum.
const TAIL_BOUND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerConfig {
    /// Coupling strength `g`.
    pub coupling: f64,
    /// Momentum standard deviation of the initial pointer.
    pub sigma_p: f64,
    /// The grid covers positions `[-half_width, half_width)`.
    pub half_width: f64,
    /// Number of grid points.
    pub points: usize,
}

impl PointerConfig {
    /// `σ_p = 0.5` (unit position spread) on 2048 points over ±24.
    pub fn new(coupling: f64) -> Self {
        Self {
            coupling,
            sigma_p: 0.5,
            half_width: 24.0,
            points: 2048,
        }
    }

    pub fn sigma_x(&self) -> f64 {
        0.5 / self.sigma_p
    }

    fn dx(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Checks the parameters and that the grid holds the pointer after a
    /// displacement of up to `max_shift`, with Gaussian tails below 1e-10 in
    /// position and momentum.
    pub fn validate(&self, max_shift: f64) -> Result<()> {
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return Err(Error::input("pointer coupling must be positive"));
        }
        if !(self.sigma_p > 0.0 && self.sigma_p.is_finite()) {
            return Err(Error::input("pointer width must be positive"));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) || self.points < 16 {
            return Err(Error::input("pointer grid needs a positive extent and at least 16 points"));
        }
        let z_x = (self.half_width - max_shift) / self.sigma_x();
        let z_p = std::f64::consts::PI / self.dx() / self.sigma_p;
        let tail = |z: f64| if z <= 0.0 { 1.0 } else { (-0.5 * z * z).exp() };
        if tail(z_x) > TAIL_BOUND {
            return Err(Error::input(format!(
                "pointer grid too narrow: position tail bound {:e}",
                tail(z_x)
            )));
        }
        if tail(z_p) > TAIL_BOUND {
            return Err(Error::input(format!(
                "pointer grid too coarse: momentum tail bound {:e}",
                tail(z_p)
            )));
        }
        Ok(())
    }
}

/// Mean shifts of the post-selected pointer relative to the initial pointer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerShift {
    pub position: f64,
    pub momentum: f64,
    /// Probability of the post-selection succeeding after the coupling.
    pub probability: f64,
}

/// Eigen-decomposition of `O` restricted to the Krylov space of `start`.
/// Returns `(λ_k, <post|v_k> <v_k|start>)`.
fn spectral_weights(obs: &Operator, start: &Ket, post: &Ket) -> Result<Vec<(f64, Complex64)>> {
    let dim = start.convention().dim();
    let scale = obs.frobenius_norm().max(1.0);
    let mut basis: Vec<Ket> = vec![start.normalized()?];
    loop {
        let mut w = obs.apply(basis.last().unwrap())?;
        // two passes of Gram-Schmidt keep the basis orthonormal to rounding
        for _ in 0..2 {
            for q in &basis {
                let proj = q.inner(&w)?;
                w = Ket::superpose(&[(Complex64::new(1.0, 0.0), &w), (-proj, q)])?;
            }
        }
        if w.norm() <= 1e-12 * scale || basis.len() == dim {
            break;
        }
        basis.push(w.normalized()?);
    }
    let m = basis.len();
    let mut t = DMatrix::<Complex64>::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            t[(a, b)] = obs.matrix_element(&basis[a], &basis[b])?;
        }
    }
    // symmetrize away rounding so the Hermitian solver sees an exact Hermitian matrix
    let t = (&t + t.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = t.symmetric_eigen();
    let post_proj: Vec<Complex64> = basis
        .iter()
        .map(|q| post.inner(q))
        .collect::<Result<_>>()?;
    let start_norm = start.norm();
    Ok((0..m)
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            let lhs: Complex64 = (0..m).map(|a| post_proj[a] * v[a]).sum();
            (eig.eigenvalues[k], lhs * v[0].conj() * start_norm)
        })
        .collect())
}

/// Simulates the weak coupling of `obs` to a Gaussian pointer followed by
/// post-selection, returning the conditional mean shifts.
pub fn pointer_shift(obs: &Operator, pair: &PrePostPair, cfg: &PointerConfig) -> Result<PointerShift> {
    let pair = pair.normalized()?;
    let weights = spectral_weights(obs, pair.pre(), pair.post())?;
    let max_eig = weights.iter().map(|(l, _)| l.abs()).fold(0.0, f64::max);
    cfg.validate(cfg.coupling * max_eig)?;

    let n = cfg.points;
    let dx = cfg.dx();
    let sigma_x = cfg.sigma_x();
    let xs: Vec<f64> = (0..n).map(|j| -cfg.half_width + j as f64 * dx).collect();
    let ps: Vec<f64> = (0..n)
        .map(|k| {
            let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * std::f64::consts::PI * signed / (n as f64 * dx)
        })
        .collect();
    let norm = (2.0 * std::f64::consts::PI * sigma_x * sigma_x).powf(-0.25);

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let mut phi: Vec<Complex64> = xs
        .iter()
        .map(|&x| Complex64::new(norm * (-x * x / (4.0 * sigma_x * sigma_x)).exp(), 0.0))
        .collect();
    let (x0, _) = position_moments(&phi, &xs);
    forward.process(&mut phi);
    let p0 = momentum_mean(&phi, &ps);

    let g = cfg.coupling;
    let mut psi: Vec<Complex64> = phi
        .iter()
        .zip(&ps)
        .map(|(&f, &p)| {
            let amp: Complex64 = weights
                .iter()
                .map(|&(lambda, c)| c * Complex64::from_polar(1.0, -g * lambda * p))
                .sum();
            f * amp
        })
        .collect();
    let p1 = momentum_mean(&psi, &ps);
    inverse.process(&mut psi);
    let inv_n = 1.0 / n as f64;
    for v in &mut psi {
        *v *= inv_n;
    }
    let (x1, mass) = position_moments(&psi, &xs);
    let probability = mass * dx;
    if probability < MIN_POSTSELECTION_PROBABILITY {
        return Err(Error::AnomalousSelection {
            overlap: pair.overlap(),
        });
    }
    Ok(PointerShift {
        position: x1 - x0,
        momentum: p1 - p0,
        probability,
    })
}

/// Deviations at or below this count as exact; the ratio test does not apply to them.
pub const DEVIATION_FLOOR: f64 = 1e-9;

/// Smallest accepted deviation ratio per halving of `g` (ideal quadratic scaling gives 4).
pub const MIN_HALVING_RATIO: f64 = 3.5;

/// One coupling strength of a pointer sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub coupling: f64,
    /// `shift_x / g`, the pointer's estimate of `Re<O>_w`.
    pub reading: f64,
    /// `|reading - Re<O>_w|`.
    pub deviation: f64,
    /// `shift_p / (2 g σ_p^2)`, the estimate of `Im<O>_w`.
    pub imaginary_reading: f64,
    pub probability: f64,
}

/// Runs [`pointer_shift`] at every coupling in `couplings`, comparing with
/// the exact weak value.
pub fn pointer_sweep(obs: &Operator, pair: &PrePostPair, couplings: &[f64]) -> Result<Vec<SweepRow>> {
    let exact = super::weak_value(obs, pair)?;
    couplings
        .iter()
        .map(|&g| {
            let cfg = PointerConfig::new(g);
            let shift = pointer_shift(obs, pair, &cfg)?;
            let reading = shift.position / g;
            Ok(SweepRow {
                coupling: g,
                reading,
                deviation: (reading - exact.re).abs(),
                imaginary_reading: shift.momentum / (2.0 * g * cfg.sigma_p * cfg.sigma_p),
                probability: shift.probability,
            })
        })
        .collect()
}

/// Whether each halving of `g` shrinks the deviation at least
/// [`MIN_HALVING_RATIO`]-fold. A deviation at or below [`DEVIATION_FLOOR`]
/// only requires the next one to stay below the floor as well.
pub fn converges_quadratically(rows: &[SweepRow]) -> bool {
    rows.windows(2).all(|w| {
        let (prev, next) = (w[0].deviation, w[1].deviation);
        if prev <= DEVIATION_FLOOR {
            next <= DEVIATION_FLOOR
        } else {
            let halvings = (w[0].coupling / w[1].coupling).log2();
            halvings > 0.0 && prev / next >= MIN_HALVING_RATIO.powf(halvings)
        }
    })
}

/// `(<x>, Σ|ψ|^2)` on the grid.
fn position_moments(psi: &[Complex64], xs: &[f64]) -> (f64, f64) {
    let mut mass = 0.0;
    let mut first = 0.0;
    for (v, &x) in psi.iter().zip(xs) {
        let w = v.norm_sqr();
        mass += w;
        first += w * x;
    }
    (if mass > 0.0 { first / mass } else { 0.0 }, mass)
}

fn momentum_mean(psi_p: &[Complex64], ps: &[f64]) -> f64 {
    let (mean, _) = position_moments(psi_p, ps);
    mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Arm, BasisConvention};
    use crate::weakval::weak_value;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_cat() -> PrePostPair {
        let conv = BasisConvention::new(2).unwrap();
        let s = FRAC_1_SQRT_2;
        let pre = Ket::from_amplitudes(conv, [(4, c(s, 0.0)), (8, c(s, 0.0))]).unwrap();
        let post =
            Ket::from_amplitudes(conv, [(4, c(0.0, -1.0)), (9, c(1.0, 0.0)), (10, c(1.0, 0.0))])
                .unwrap();
        PrePostPair::new(pre, post).unwrap()
    }

    #[test]
    fn projector_shift_reads_weak_value() {
        let pair = two_cat();
        let pl1 = Operator::path_projector(pair.convention(), 1, Arm::L).unwrap();
        let g = 1e-3;
        let s = pointer_shift(&pl1, &pair, &PointerConfig::new(g)).unwrap();
        assert!((s.position / g - 1.0).abs() < 1e-4, "{}", s.position / g);
        assert!((s.probability - 1.0 / 6.0).abs() < 1e-6);
    }

    #[test]
    fn eigenstate_shift_is_eigenvalue() {
        let conv = BasisConvention::new(1).unwrap();
        let s = FRAC_1_SQRT_2;
        let down = Ket::from_amplitudes(conv, [(0, c(s, 0.0)), (1, c(0.0, -s))]).unwrap();
        let post = Ket::from_amplitudes(conv, [(0, c(1.0, 0.0)), (1, c(0.3, 0.2))]).unwrap();
        let pair = PrePostPair::new(down, post).unwrap();
        let sz = Operator::circular_sigma_z(conv, 1).unwrap();
        let g = 1e-2;
        let shift = pointer_shift(&sz, &pair, &PointerConfig::new(g)).unwrap();
        assert!((shift.position / g + 1.0).abs() < 1e-8);
        assert!(shift.momentum.abs() < 1e-10);
    }

    #[test]
    fn deviation_shrinks_quadratically() {
        let pair = two_cat();
        let g_r1 = Operator::grin_observable(pair.convention(), 1, Arm::R).unwrap();
        let w = weak_value(&g_r1, &pair).unwrap().re;
        let devs: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&g| {
                let s = pointer_shift(&g_r1, &pair, &PointerConfig::new(g)).unwrap();
                (s.position / g - w).abs()
            })
            .collect();
        assert!(devs[0] > 1e-9);
        assert!(devs[0] / devs[1] >= 3.5, "{devs:?}");
        assert!(devs[1] / devs[2] >= 3.5, "{devs:?}");
    }

    #[test]
    fn config_validation() {
        assert!(PointerConfig::new(0.0).validate(0.0).is_err());
        assert!(PointerConfig::new(1e-3).validate(0.0).is_ok());
        let narrow = PointerConfig {
            half_width: 3.0,
            ..PointerConfig::new(1e-3)
        };
        assert!(narrow.validate(0.0).is_err());
        let coarse = PointerConfig {
            points: 32,
            ..PointerConfig::new(1e-3)
        };
        assert!(coarse.validate(0.0).is_err());
    }
}
