mod common;

use cheshire_core::hilbert::{Arm, BasisConvention, Ket, Operator};
use cheshire_core::optics::{
    calibrated, effective_postselection, two_cat_circuit, run_monte_carlo,
};
use cheshire_core::scenarios::{build_pair, expected_pattern, ScenarioId};
use cheshire_core::solver::{assemble, solve_post, verify, WeakValueTarget};
use cheshire_core::weakval::{
    pointer_shift, weak_value, weak_value_report, ObservableKey, ObservableKind, PointerConfig,
    PrePostPair,
};
use common::c;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
}

fn nonzero_complex() -> impl Strategy<Value = Complex64> {
    complex().prop_filter("nonzero", |z| z.norm() > 1e-2)
}

fn ket(n: usize) -> impl Strategy<Value = Ket> {
    let dim = 1usize << (2 * n);
    proptest::collection::vec((0..dim, complex()), 1..=dim.min(12))
        .prop_map(move |terms| Ket::from_amplitudes(BasisConvention::new(n).unwrap(), terms).unwrap())
        .prop_filter("nonzero", |k| !k.is_zero())
}

fn pair(n: usize) -> impl Strategy<Value = PrePostPair> {
    (ket(n), ket(n))
        .prop_map(|(a, b)| PrePostPair::new(a, b).unwrap())
        .prop_filter("overlap well above the threshold", |p| {
            p.overlap().norm() > 1e-3 * p.pre().norm() * p.post().norm()
        })
}

fn key(n: usize) -> impl Strategy<Value = ObservableKey> {
    (1..=n, any::<bool>(), any::<bool>()).prop_map(|(p, grin, right)| {
        let kind = if grin { ObservableKind::Grin } else { ObservableKind::Path };
        ObservableKey::new(p, kind, if right { Arm::R } else { Arm::L })
    })
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projectors_idempotent_and_complete(n in 1usize..=6, photon_seed in 0usize..6, right in any::<bool>()) {
        let conv = BasisConvention::new(n).unwrap();
        let photon = photon_seed % n + 1;
        let arm = if right { Arm::R } else { Arm::L };
        let p = Operator::path_projector(conv, photon, arm).unwrap();
        let q = Operator::path_projector(conv, photon, arm.other()).unwrap();
        prop_assert_eq!(p.compose(&p).unwrap().max_abs_diff(&p).unwrap(), 0.0);
        prop_assert_eq!(p.add(&q).unwrap().max_abs_diff(&Operator::identity(conv).unwrap()).unwrap(), 0.0);
        prop_assert!(p.is_hermitian(1e-12));
        let g = Operator::grin_observable(conv, photon, arm).unwrap();
        prop_assert!(g.is_hermitian(1e-12));
    }

    #[test]
    fn inner_is_conjugate_symmetric(a in ket(2), b in ket(2)) {
        let ab = a.inner(&b).unwrap();
        let ba = b.inner(&a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
    }

    #[test]
    fn apply_distributes_over_superpose(a in ket(2), b in ket(2), x in complex(), y in complex(), k in key(2)) {
        let op = k.operator(a.convention()).unwrap();
        let sum = Ket::superpose(&[(x, &a), (y, &b)]).unwrap();
        let lhs = op.apply(&sum).unwrap();
        let rhs = Ket::superpose(&[(x, &op.apply(&a).unwrap()), (y, &op.apply(&b).unwrap())]).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn weak_value_scale_invariant(p in pair(2), k in key(2), a in nonzero_complex(), b in nonzero_complex()) {
        let op = k.operator(p.convention()).unwrap();
        let scaled = PrePostPair::new(p.pre().scaled(a), p.post().scaled(b)).unwrap();
        prop_assert!(close(weak_value(&op, &scaled).unwrap(), weak_value(&op, &p).unwrap(), 1e-12));
    }

    #[test]
    fn weak_value_linear(p in pair(2), ka in key(2), kb in key(2), a in complex(), b in complex()) {
        let conv = p.convention();
        let (oa, ob) = (ka.operator(conv).unwrap(), kb.operator(conv).unwrap());
        let combo = oa.linear_combination(a, &ob, b).unwrap();
        let lhs = weak_value(&combo, &p).unwrap();
        let rhs = a * weak_value(&oa, &p).unwrap() + b * weak_value(&ob, &p).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10));
    }

    #[test]
    fn arm_sum_rules(p in pair(3), photon in 1usize..=3) {
        let report = weak_value_report(&p).unwrap();
        let get = |kind, arm| report.get(ObservableKey::new(photon, kind, arm)).unwrap();
        let paths = get(ObservableKind::Path, Arm::L) + get(ObservableKind::Path, Arm::R);
        prop_assert!(close(paths, c(1.0, 0.0), 1e-10));
        let sigma = weak_value(&Operator::circular_sigma_z(p.convention(), photon).unwrap(), &p).unwrap();
        let grins = get(ObservableKind::Grin, Arm::L) + get(ObservableKind::Grin, Arm::R);
        prop_assert!(close(grins, sigma, 1e-10));
    }

    #[test]
    fn solver_round_trip_on_two_term_pre_states(a in nonzero_complex(), b in nonzero_complex(), z in nonzero_complex()) {
        let conv = BasisConvention::new(2).unwrap();
        let pre = Ket::from_amplitudes(conv, [(4, a), (8, b)]).unwrap();
        let pattern = expected_pattern(ScenarioId::TwoCat);
        let targets: Vec<_> = pattern
            .iter()
            .map(|(k, w)| WeakValueTarget::new(k.operator(conv).unwrap(), c(f64::from(w), 0.0)).unwrap())
            .collect();
        let system = assemble(&pre, &targets).unwrap();
        let post = solve_post(&system).unwrap();
        prop_assert!(verify(&pre, &post, &targets).unwrap() < 1e-10);
        prop_assert!(system.residual_norm(&post).unwrap() < 1e-12 * system.matrix().norm() * post.norm());
        // the solution ray does not depend on the pre-state's scale
        let rescaled = solve_post(&assemble(&pre.scaled(z), &targets).unwrap()).unwrap();
        prop_assert!(rescaled.phase_free_overlap(&post).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn solver_round_trip_when_feasible(n in 1usize..=2, pre in ket(1), pre2 in ket(2)) {
        let pre = if n == 1 { pre } else { pre2 };
        let conv = pre.convention();
        let id = if n == 1 { ScenarioId::Single } else { ScenarioId::TwoCat };
        let targets: Vec<_> = expected_pattern(id)
            .iter()
            .map(|(k, w)| WeakValueTarget::new(k.operator(conv).unwrap(), c(f64::from(w), 0.0)).unwrap())
            .collect();
        let system = assemble(&pre, &targets).unwrap();
        if let Ok(post) = solve_post(&system) {
            prop_assert!(verify(&pre, &post, &targets).unwrap() < 1e-10);
        }
    }

    #[test]
    fn general_family_matches_pattern(theta in 0.05f64..1.52, phi in -3.14f64..3.14) {
        let id = ScenarioId::General { theta, phi };
        let report = weak_value_report(&build_pair(id).unwrap()).unwrap();
        prop_assert!(expected_pattern(id).max_deviation(&report) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pointer_reads_weak_value_for_single_photons(p in pair(1), k in key(1)) {
        let op = k.operator(p.convention()).unwrap();
        let w = weak_value(&op, &p).unwrap();
        prop_assume!(w.norm() < 20.0);
        let g = 1e-4;
        let cfg = PointerConfig::new(g);
        let shift = pointer_shift(&op, &p, &cfg).unwrap();
        let im = shift.momentum / (2.0 * g * cfg.sigma_p * cfg.sigma_p);
        // first-order readout, error O(g |w|^2)
        let tol = 1e-6 + 10.0 * g * (1.0 + w.norm_sqr());
        prop_assert!((shift.position / g - w.re).abs() < tol, "{} vs {}", shift.position / g, w.re);
        prop_assert!((im - w.im).abs() < tol, "{} vs {}", im, w.im);
    }
}

#[test]
fn oracle_agreement_for_every_small_scenario() {
    let mut ids = vec![ScenarioId::Single, ScenarioId::TwoCat];
    ids.extend((2..=6).map(|n| ScenarioId::NCat { n }));
    for theta in [std::f64::consts::FRAC_PI_8, std::f64::consts::FRAC_PI_4, 3.0 * std::f64::consts::FRAC_PI_8] {
        for phi in [0.0, 1.0, std::f64::consts::PI] {
            ids.push(ScenarioId::General { theta, phi });
        }
    }
    for id in ids {
        let report = weak_value_report(&build_pair(id).unwrap()).unwrap();
        assert!(expected_pattern(id).max_deviation(&report) < 1e-12, "{id}");
        assert!(report.entries().iter().all(|(_, v)| v.im.abs() < 1e-12), "{id}");
    }
}

#[test]
fn monte_carlo_frequencies_pass_chi_square() {
    let circuit = calibrated(&two_cat_circuit()).unwrap();
    let exact = circuit.run_exact().unwrap();
    for (shots, seed) in [(1_000u64, 11u64), (10_000, 12), (100_000, 13)] {
        let record = run_monte_carlo(&circuit, shots, seed).unwrap();
        let mut chi2 = 0.0;
        let mut dof = 0;
        for o in &exact.outcomes {
            if o.probability > 0.0 {
                let expected = shots as f64 * o.probability;
                let diff = record.count(&o.label) as f64 - expected;
                chi2 += diff * diff / expected;
                dof += 1;
            } else {
                assert_eq!(record.count(&o.label), 0, "{} never fires", o.label);
            }
        }
        // 3 degrees of freedom: the 0.999 quantile is 16.27
        assert_eq!(dof, 4);
        assert!(chi2 < 16.27, "shots {shots}: chi2 {chi2}");
    }
}

#[test]
fn calibrated_herald_reproduces_weak_values() {
    let circuit = calibrated(&two_cat_circuit()).unwrap();
    let psi0 = circuit.preselection_output().unwrap();
    let effective = effective_postselection(&circuit).unwrap();
    let from_device = weak_value_report(&PrePostPair::new(psi0, effective).unwrap()).unwrap();
    let reference = weak_value_report(&build_pair(ScenarioId::TwoCat).unwrap()).unwrap();
    for ((k, a), (_, b)) in from_device.entries().iter().zip(reference.entries()) {
        assert!((a - b).norm() < 1e-10, "{k}: {a} vs {b}");
    }
}

#[test]
fn monte_carlo_counts_depend_only_on_seed_and_shots() {
    let circuit = calibrated(&two_cat_circuit()).unwrap();
    let a = run_monte_carlo(&circuit, 50_000, 3).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| run_monte_carlo(&circuit, 50_000, 3).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, run_monte_carlo(&circuit, 50_000, 4).unwrap());
}
