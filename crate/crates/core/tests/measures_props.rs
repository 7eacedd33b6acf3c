mod common;

use common::checks::{self, test_sets};
use common::*;
use proptest::prelude::*;
use resq::bounds::{closed_form_smoothed, isotropic_exact, Mode};
use resq::measures::Evaluator;
use resq::sets::{self, FreeSet};
use resq::twirl::measure_prepare_channel;
use std::sync::OnceLock;

fn cached_sets() -> &'static [FreeSet] {
    static SETS: OnceLock<Vec<FreeSet>> = OnceLock::new();
    SETS.get_or_init(test_sets)
}

fn ok(res: checks::Check) -> Result<(), TestCaseError> {
    match res {
        Ok(_) => Ok(()),
        Err(why) => Err(TestCaseError::fail(why)),
    }
}

proptest! {
    #![proptest_config(fixed_config(60))]

    #[test]
    fn ordering_chain(seed in any::<u64>(), which in 0usize..5) {
        ok(checks::ordering_chain(&cached_sets()[which], seed, 1))?;
    }

    #[test]
    fn g_fidelity_strong_duality(seed in any::<u64>(), which in 0usize..5) {
        ok(checks::g_fidelity_duality(&cached_sets()[which], seed, 1))?;
    }
}

proptest! {
    #![proptest_config(fixed_config(30))]

    #[test]
    fn hull_and_cone_agree_on_d_max(seed in any::<u64>()) {
        ok(checks::hull_vs_cone(&cached_sets()[1], seed, 1))?;
    }
}

proptest! {
    #![proptest_config(fixed_config(10))]

    #[test]
    fn smoothing_is_monotone_in_eps(seed in any::<u64>(), which in 0usize..5) {
        ok(checks::eps_monotonicity(&cached_sets()[which], seed, 1, &[0.0, 0.05, 0.15, 0.3, 0.45]))?;
    }
}

#[test]
fn measures_vanish_on_vertices() {
    for set in cached_sets() {
        if set.vertices().is_some() {
            checks::vertex_nullity(set).unwrap();
        }
    }
}

#[test]
fn closed_forms_match_pure_references() {
    let ev = Evaluator::default();
    let stab = sets::stabilizer_states_qutrit(1).unwrap();
    for (phi, r) in [
        (sets::strange_pure().density(), 1.0),
        (sets::norrell_pure().density(), 1.5_f64.log2()),
    ] {
        for k in 0..=10 {
            let eps = 0.05 * k as f64;
            let cf = closed_form_smoothed(r, 1.0, eps, Mode::FullDim).unwrap();
            let h = ev.d_h(&phi, &stab, eps).unwrap().bits();
            let m = ev.d_max_smooth(&phi, &stab, eps).unwrap().bits();
            let s = ev.d_s_smooth(&phi, &stab, eps).unwrap().bits();
            assert!((h - cf.d_h.unwrap()).abs() < 1e-4, "d_h {h} vs {:?} at {eps}", cf.d_h);
            assert!((m - cf.d_max_smooth).abs() < 1e-4, "d_max_smooth {m} vs {} at {eps}", cf.d_max_smooth);
            assert!((s - cf.d_s_smooth.unwrap()).abs() < 1e-4, "d_s_smooth {s} at {eps}");
        }
    }
}

#[test]
fn isotropic_values_match_in_both_modes() {
    let ev = Evaluator::default();
    let stab = sets::stabilizer_states_qutrit(1).unwrap();
    let coh = sets::coherence_set(3).unwrap();
    let cases = [
        (sets::norrell_pure(), &stab, 1.5_f64.log2(), Mode::FullDim),
        (sets::max_coherent_pure(3), &coh, 3.0_f64.log2(), Mode::ReducedDim),
    ];
    for (psi, set, r, mode) in cases {
        let sigma = measure_prepare_channel(&psi.density(), set, &ev).unwrap().sigma_star;
        for k in 0..=8 {
            let kappa = k as f64 / 8.0;
            let rho = sets::isotropic(&psi.density(), &sigma, kappa).unwrap();
            let want = isotropic_exact(r, kappa, mode).unwrap();
            let d_min = ev.d_min(&rho, set).unwrap().bits();
            let d_max = ev.d_max(&rho, set).unwrap().bits();
            assert!((d_min - want.d_min).abs() < 1e-4, "{mode:?} kappa {kappa}: d_min {d_min} vs {}", want.d_min);
            assert!((d_max - want.d_max).abs() < 1e-4, "{mode:?} kappa {kappa}: d_max {d_max} vs {}", want.d_max);
            if let Some(ds) = want.d_s {
                let got = ev.d_s(&rho, set).unwrap().bits();
                assert!((got - ds).abs() < 1e-4, "kappa {kappa}: d_s {got} vs {ds}");
            }
            if let Some(aff) = want.d_min_aff {
                let got = ev.d_min_aff(&rho, set).unwrap().bits();
                assert!((got - aff).abs() < 1e-4, "kappa {kappa}: d_min_aff {got} vs {aff}");
            }
        }
    }
}
