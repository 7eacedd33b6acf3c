mod common;

use common::*;
use proptest::prelude::*;
use resq::linalg::{
    fidelity, herm_eig, partial_transpose, purified_distance, ComplexMatrix, DensityMatrix, Subsystem,
};

fn conjugate(u: &ComplexMatrix, rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_numerical(&(u * rho.matrix() * u.adjoint())).unwrap()
}

proptest! {
    #![proptest_config(fixed_config(1000))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), d in 1usize..=16) {
        let a = random_hermitian(&mut rng(seed), d);
        let (vals, vecs) = herm_eig(&a).unwrap();
        let diag = ComplexMatrix::from_diagonal(&vals.map(|x| c(x)));
        let back = &vecs * diag * vecs.adjoint();
        prop_assert!(max_abs_diff(&back, &a) <= 1e-9 * d as f64);
        let orth = vecs.adjoint() * &vecs - ComplexMatrix::identity(d, d);
        prop_assert!(orth.norm() <= 1e-9 * d as f64);
    }
}

fn c(x: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(x, 0.0)
}

proptest! {
    #![proptest_config(fixed_config(200))]

    #[test]
    fn fidelity_is_symmetric_and_unitarily_invariant(seed in any::<u64>(), d in 2usize..=6) {
        let mut r = rng(seed);
        let rho = random_state(&mut r, d, 1 + (seed as usize) % d);
        let sigma = random_full_rank_state(&mut r, d);
        let u = random_unitary(&mut r, d);
        let f = fidelity(&rho, &sigma).unwrap();
        prop_assert!((f - fidelity(&sigma, &rho).unwrap()).abs() <= 1e-9);
        let g = fidelity(&conjugate(&u, &rho), &conjugate(&u, &sigma)).unwrap();
        prop_assert!((f - g).abs() <= 1e-9);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn purified_distance_improved_triangle(seed in any::<u64>(), d in 2usize..=4) {
        let mut r = rng(seed);
        let rho = random_full_rank_state(&mut r, d);
        // keep the triple close so the hypothesis P(ρ,σ)² + P(σ,τ)² ≤ 1 holds often
        let sigma = rho.mix(&random_full_rank_state(&mut r, d), 0.6).unwrap();
        let tau = sigma.mix(&random_full_rank_state(&mut r, d), 0.6).unwrap();
        let p_rs = purified_distance(&rho, &sigma).unwrap();
        let p_st = purified_distance(&sigma, &tau).unwrap();
        prop_assume!(p_rs * p_rs + p_st * p_st <= 1.0);
        let bound = p_rs * fidelity(&sigma, &tau).unwrap().sqrt() + p_st * fidelity(&rho, &sigma).unwrap().sqrt();
        prop_assert!(purified_distance(&rho, &tau).unwrap() <= bound + 1e-9);
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=3) {
        let a = ginibre(&mut rng(seed), da * db, da * db);
        for sys in [Subsystem::A, Subsystem::B] {
            let once = partial_transpose(&a, (da, db), sys).unwrap();
            let twice = partial_transpose(&once, (da, db), sys).unwrap();
            prop_assert!(max_abs_diff(&twice, &a) <= 1e-15);
        }
    }
}
