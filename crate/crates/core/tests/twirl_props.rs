mod common;

use common::*;
use proptest::prelude::*;
use resq::linalg::DensityMatrix;
use resq::measures::Evaluator;
use resq::sets::{self, FreeSet};
use resq::twirl::{
    self, measure_prepare_channel, group_closure, twirl_average, Channel, MagicGate, StabilizerInput, TwirlError,
    UnitaryEnsemble,
};
use std::sync::OnceLock;

fn groups() -> &'static [(String, UnitaryEnsemble)] {
    static G: OnceLock<Vec<(String, UnitaryEnsemble)>> = OnceLock::new();
    G.get_or_init(|| {
        let clifford1 = group_closure(&[sets::hadamard(), sets::phase_s()], 100).unwrap();
        vec![
            ("qubit clifford".into(), clifford1.ensemble().unwrap()),
            ("face".into(), twirl::face_ensemble().unwrap()),
            ("sl2z3".into(), UnitaryEnsemble::uniform(twirl::sl2z3_cliffords().unwrap()).unwrap()),
            ("hoggar".into(), twirl::hoggar_group(twirl::DEFAULT_GROUP_CAP).unwrap().ensemble().unwrap()),
        ]
    })
}

proptest! {
    #![proptest_config(fixed_config(8))]

    #[test]
    fn group_twirl_commutes_with_members(seed in any::<u64>(), which in 0usize..4) {
        let (name, g) = &groups()[which];
        let d = g.dim();
        let rho = random_state(&mut rng(seed), d, d);
        let out = twirl_average(g, &rho).unwrap();
        for u in &g.unitaries {
            let moved = u * out.matrix() * u.adjoint() - out.matrix();
            prop_assert!(moved.norm() <= 1e-8, "{name}: {}", moved.norm());
        }
    }
}

fn reference_channels() -> Vec<(&'static str, DensityMatrix, FreeSet)> {
    vec![
        ("strange", sets::strange_pure().density(), sets::stabilizer_states_qutrit(1).unwrap()),
        ("norrell", sets::norrell_pure().density(), sets::stabilizer_states_qutrit(1).unwrap()),
        ("max_coherent3", sets::max_coherent_pure(3).density(), sets::coherence_set(3).unwrap()),
        ("bell2", sets::bell_pure(2).density(), sets::ppt_set(2, 2).unwrap()),
    ]
}

#[test]
fn measure_and_prepare_channel_is_idempotent_and_free() {
    let ev = Evaluator::default();
    let mut r = rng(7);
    for (name, phi, set) in reference_channels() {
        let ch = measure_prepare_channel(&phi, &set, &ev).unwrap();
        let fixed = ch.apply(&phi).unwrap();
        assert!(max_abs_diff(fixed.matrix(), phi.matrix()) < 1e-9, "{name} moves its reference");
        for _ in 0..20 {
            let rho = random_state(&mut r, phi.dim(), phi.dim());
            let once = ch.apply(&rho).unwrap();
            let twice = ch.apply(&once).unwrap();
            assert!(max_abs_diff(once.matrix(), twice.matrix()) < 1e-9, "{name} not idempotent");
        }
        let report = ch.verify_free(&set).unwrap();
        assert!(report.free, "{name}: {report:?}");
    }
}

#[test]
fn channel_needs_collapsed_measures() {
    let ev = Evaluator::default();
    let stab = sets::stabilizer_states(1).unwrap();
    let res = measure_prepare_channel(&sets::face_state(), &stab, &ev);
    assert!(matches!(res, Err(TwirlError::PreconditionFailed(_))));
}

/// A free stabilizing channel forces `d_min(Φ) = d_max(Φ)`.
fn assert_collapse(name: &str, ens: &UnitaryEnsemble, phi: &DensityMatrix, set: &FreeSet) {
    let ev = Evaluator::default();
    let fixed = twirl_average(ens, phi).unwrap();
    assert!(max_abs_diff(fixed.matrix(), phi.matrix()) < 1e-9, "{name}: twirl moves the state");
    assert!(ens.verify_free(set).unwrap().free, "{name}: twirl not free");
    let lo = ev.d_min(phi, set).unwrap().bits();
    let hi = ev.d_max(phi, set).unwrap().bits();
    assert!((lo - hi).abs() < 1e-5, "{name}: d_min {lo} d_max {hi}");
}

#[test]
fn free_stabilizing_twirls_collapse_the_measures() {
    let stab1 = sets::stabilizer_states(1).unwrap();
    let stab3q = sets::stabilizer_states(3).unwrap();
    let qutrit = sets::stabilizer_states_qutrit(1).unwrap();
    assert_collapse("face", &twirl::face_ensemble().unwrap(), &sets::face_state(), &stab1);
    assert_collapse("strange", &groups()[2].1, &sets::strange_pure().density(), &qutrit);
    assert_collapse("hoggar", &groups()[3].1, &sets::hoggar_pure().density(), &stab3q);
    for gate in [MagicGate::QubitT, MagicGate::QutritT, MagicGate::Toffoli] {
        let (ens, psi) = twirl::clifford_magic_dephasing(gate, StabilizerInput::Plus).unwrap();
        let set = match gate.shape() {
            (2, n) => sets::stabilizer_states(n).unwrap(),
            (_, n) => sets::stabilizer_states_qutrit(n).unwrap(),
        };
        assert_collapse(&format!("{gate:?}"), &ens, &psi.density(), &set);
    }
}

#[test]
fn two_copy_face_twirl_is_free() {
    let face = twirl::face_ensemble().unwrap();
    let two = face.tensor(&face).unwrap();
    let stab2 = sets::stabilizer_states(2).unwrap();
    let f = sets::face_state();
    assert_collapse("face x2", &two, &f.kron(&f), &stab2);
}
