//! Tuning of adjustable beam splitters so that the herald detector projects
//! onto a chosen post-selection state.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::circuit::{propagate, Circuit, Item};
use super::element::Element;
use crate::error::{Error, Result};
use crate::hilbert::{Ket, Operator};

/// Largest relative deviation of the herald map from a rank-1 projection.
pub const CALIBRATION_TOLERANCE: f64 = 1e-10;

/// Magnitude below which a target amplitude counts as absent at a beam splitter.
const ROUTING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub circuit: Circuit,
    /// `‖K - K t t†‖_F / ‖K‖_F` for the herald map `K` and normalized target `t`.
    pub residual: f64,
}

fn block_start(circuit: &Circuit) -> usize {
    circuit.postselect_index().map_or(0, |k| k + 1)
}

fn herald_label(circuit: &Circuit) -> Result<&str> {
    circuit
        .herald()
        .ok_or_else(|| Error::Configuration("no herald detector declared".into()))
}

/// Linear map from states entering the post-selection block to the
/// amplitudes absorbed by the herald detector. Column `k` is the response to
/// basis state `k`; rows index output configurations.
pub fn herald_map(circuit: &Circuit) -> Result<DMatrix<Complex64>> {
    circuit.validate()?;
    let herald = herald_label(circuit)?.to_string();
    let conv = circuit.convention();
    let start = block_start(circuit);
    let items = &circuit.items()[start..];
    let ops = circuit.operators()?;
    let ops = &ops[start..];
    let dim = conv.dim();
    let mut k = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let p = propagate(conv, Ket::from_index(conv, col)?, items, ops)?;
        if let Some(hit) = p.absorbed.get(&herald) {
            for (&row, &v) in hit {
                k[(row, col)] = v;
            }
        }
    }
    Ok(k)
}

/// `‖K - K t t†‖_F / ‖K‖_F`, or 1 when the herald never sees `t`.
pub fn projection_residual(k: &DMatrix<Complex64>, target: &Ket) -> Result<f64> {
    let t = target.normalized()?;
    let dim = k.ncols();
    let tv = DMatrix::from_fn(dim, 1, |r, _| t.amplitude(r));
    let kt = k * &tv;
    let k_norm = k.norm();
    if k_norm == 0.0 || kt.norm() <= ROUTING_FLOOR * k_norm {
        return Ok(1.0);
    }
    Ok((k - &kt * tv.adjoint()).norm() / k_norm)
}

/// State the herald effectively projects onto: the dominant right singular
/// vector of the herald map.
pub fn effective_postselection(circuit: &Circuit) -> Result<Ket> {
    let k = herald_map(circuit)?;
    if k.norm() == 0.0 {
        return Err(Error::Configuration("the herald detector can never fire".into()));
    }
    let svd = k.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let top = (0..svd.singular_values.len())
        .max_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .expect("nonempty");
    let conv = circuit.convention();
    Ket::from_amplitudes(conv, (0..conv.dim()).map(|c| (c, v_t[(top, c)].conj())))?.normalized()
}

/// Sets every adjustable beam splitter after the post-selection boundary so
/// that the herald map becomes proportional to `<target|`.
///
/// The target is pushed through the block. At each adjustable splitter, its
/// amplitudes on the two modes form a `2 x P` matrix (one column per
/// polarization configuration the modes share); the splitter is set to send
/// the dominant left singular direction into mode `a`. Splitters the target
/// never reaches keep their setting.
pub fn calibrate_postselection(circuit: &Circuit, target: &Ket) -> Result<Calibration> {
    circuit.validate()?;
    herald_label(circuit)?;
    if target.convention() != circuit.convention() {
        return Err(Error::input("target photon count differs from the circuit"));
    }
    let conv = circuit.convention();
    let mut tuned = circuit.clone();
    let start = block_start(&tuned);
    let mut state = target.normalized()?;
    for idx in start..tuned.items().len() {
        let item = tuned.items()[idx].clone();
        match item {
            Item::Gate(Element::BeamSplitter(bs)) if bs.adjustable => {
                let pairs: Vec<(usize, usize)> = (0..conv.dim())
                    .filter(|&k| bs.matches_a(conv, k))
                    .map(|k| (k, bs.partner(conv, k).expect("a-mode index has a partner")))
                    .collect();
                let m = DMatrix::from_fn(2, pairs.len(), |r, c| {
                    let (ka, kb) = pairs[c];
                    state.amplitude(if r == 0 { ka } else { kb })
                });
                let bs = if m.norm() > ROUTING_FLOOR {
                    let eig = (&m * m.adjoint()).symmetric_eigen();
                    let top = if eig.eigenvalues[0] >= eig.eigenvalues[1] { 0 } else { 1 };
                    let u = eig.eigenvectors.column(top);
                    bs.routing(u[0], u[1])?
                } else {
                    bs
                };
                let gate = Element::BeamSplitter(bs);
                tuned.items_mut()[idx] = Item::Gate(gate);
                state = gate.operator(conv)?.apply(&state)?;
            }
            Item::Gate(e) => state = e.operator(conv)?.apply(&state)?,
            Item::Detect { port, .. } => {
                state = Ket::from_amplitudes(
                    conv,
                    state.iter().filter(|&(k, _)| !port.matches(conv, k)),
                )?;
            }
            Item::PostSelect => {}
        }
    }
    let residual = projection_residual(&herald_map(&tuned)?, target)?;
    if residual > CALIBRATION_TOLERANCE {
        return Err(Error::CalibrationFailed { residual });
    }
    tuned.set_target(target.clone())?;
    Ok(Calibration {
        circuit: tuned,
        residual,
    })
}

/// Whether the circuit's full unitary part keeps norms: every gate's
/// embedding `U` satisfies `‖U†U - I‖_max < tol`.
pub fn gates_unitary(circuit: &Circuit, tol: f64) -> Result<bool> {
    let id = Operator::identity(circuit.convention())?;
    for op in circuit.operators()?.into_iter().flatten() {
        if op.adjoint().compose(&op)?.max_abs_diff(&id)? >= tol {
            return Ok(false);
        }
    }
    Ok(true)
}
