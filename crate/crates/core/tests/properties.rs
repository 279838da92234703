use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symsep::criteria::{eta_matrix, gell_mann_basis, schmidt_invariant};
use symsep::linalg::{
    min_eigenvalue, partial_trace, partial_transpose, partial_transpose_raw, random_density_hs, random_hs_matrix,
    realign, trace_norm, unrealign, Basis, DensityMatrix,
};
use symsep::symspace::{
    compressed_pt_spectrum, dicke_partial_trace, flip, representative_splits, sym_subspace_isometry, SymmetricState,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bipartite(da: usize, db: usize, seed: u64) -> DensityMatrix {
    let m = random_hs_matrix(da * db, &mut rng(seed));
    DensityMatrix::new(m, vec![da, db], Basis::Computational).unwrap()
}

fn invariant(d: usize, seed: u64) -> DensityMatrix {
    let m = random_hs_matrix(d * d, &mut rng(seed));
    let f = flip(d);
    let t = (&m + &f.matmul(&m).matmul(&f)).scale(0.5);
    DensityMatrix::new(t, vec![d, d], Basis::Computational).unwrap()
}

fn symmetric(d: usize, seed: u64) -> DensityMatrix {
    let v = sym_subspace_isometry(d);
    let s = random_hs_matrix(v.cols(), &mut rng(seed));
    DensityMatrix::new(s.conjugate_by(&v), vec![d, d], Basis::Computational).unwrap()
}

fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    use rand_distr::{Distribution, StandardNormal};
    let mut r = rng(seed);
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut r));
    g.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_transpose_is_an_involution(da in 2usize..4, db in 2usize..4, seed in any::<u64>()) {
        let rho = bipartite(da, db, seed);
        let once = partial_transpose(&rho, &[0]).unwrap();
        // the transpose need not be positive, so undo it on the raw matrix
        let twice = partial_transpose_raw(&once, &[da, db], &[0]);
        prop_assert!(twice.max_abs_diff(rho.matrix()) < 1e-15);
        prop_assert!((once.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(once.hermiticity_violation() < 1e-14);
    }

    #[test]
    fn partial_trace_of_product(da in 1usize..4, db in 1usize..4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_density_hs(da, &mut r);
        let b = random_density_hs(db, &mut r);
        let ab = a.kron(&b).unwrap();
        prop_assert!(partial_trace(&ab, &[1]).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-14);
        prop_assert!(partial_trace(&ab, &[0]).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-14);
    }

    #[test]
    fn realignment_round_trips(da in 2usize..4, db in 2usize..4, seed in any::<u64>()) {
        let rho = bipartite(da, db, seed);
        let r = realign(&rho).unwrap();
        prop_assert!(unrealign(&r, da, db).unwrap().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn density_matrices_have_unit_trace_norm(d in 2usize..7, seed in any::<u64>()) {
        let rho = random_density_hs(d, &mut rng(seed));
        prop_assert!((trace_norm(rho.matrix()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dicke_marginals_are_states(n in 2usize..7, keep in 1usize..6, seed in any::<u64>()) {
        prop_assume!(keep < n);
        let s = SymmetricState::new(random_hs_matrix(n + 1, &mut rng(seed)), n).unwrap();
        let m = dicke_partial_trace(&s, keep).unwrap();
        prop_assert!((m.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(min_eigenvalue(m.matrix()).unwrap() > -1e-12);
        if keep > 1 {
            let via = dicke_partial_trace(&m, keep - 1).unwrap();
            let direct = dicke_partial_trace(&s, keep - 1).unwrap();
            prop_assert!(via.matrix().max_abs_diff(direct.matrix()) < 1e-13);
        }
    }

    #[test]
    fn compressed_transposes_have_unit_trace(n in 2usize..8, seed in any::<u64>()) {
        let s = SymmetricState::new(random_hs_matrix(n + 1, &mut rng(seed)), n).unwrap();
        for split in representative_splits(n) {
            let sum: f64 = compressed_pt_spectrum(&s, split).unwrap().eigenvalues.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_spectrum_is_basis_independent(d in 2usize..4, seed in any::<u64>()) {
        let rho = invariant(d, seed);
        let basis = gell_mann_basis(d);
        let rotated = basis.rotated(&random_orthogonal(d * d, seed ^ 0x5eed));
        let mut a: Vec<f64> = eta_matrix(&rho, &basis).unwrap().0.symmetric_eigenvalues().iter().copied().collect();
        let mut b: Vec<f64> = eta_matrix(&rho, &rotated).unwrap().0.symmetric_eigenvalues().iter().copied().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn schmidt_weights_are_bounded(d in 2usize..5, seed in any::<u64>()) {
        let sum = schmidt_invariant(&invariant(d, seed), &gell_mann_basis(d)).unwrap().lambda_sum();
        prop_assert!(sum.abs() <= 1.0 + 1e-8);
        let sym = schmidt_invariant(&symmetric(d, seed), &gell_mann_basis(d)).unwrap();
        prop_assert!((sym.lambda_sum() - 1.0).abs() < 1e-8);
        let rho = symmetric(d, seed);
        prop_assert!(sym.reconstruct().max_abs_diff(rho.matrix()) < 1e-12);
    }
}
