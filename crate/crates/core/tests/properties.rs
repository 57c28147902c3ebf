use fisher_roof::experiments::{
    random_density, random_density_of_rank, random_hermitian, random_zero_diagonal_observable,
    summarize, trial_rng, BoundKind, TrialConfig,
};
use fisher_roof::hermitian::{
    complex_to_real_embedding, eigendecompose, min_eigenvalue, partial_trace, partial_transpose,
    symmetric_basis, tensor, MultipartiteLayout,
};
use fisher_roof::metrology::{qfi_bc, variance};
use fisher_roof::roofs::{
    concave_roof_decomposition, lemma2_split, mixture_variance, random_decomposition,
    theorem2_decomposition,
};
use fisher_roof::sdp::{bound_se, bound_sppt, SolveStatus, DEFAULT_TOLERANCE};
use fisher_roof::{CMatrix, DensityMatrix, HermitianOperator, PureDecomposition, C64};
use proptest::prelude::*;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn pair(seed: u64, d: usize) -> (DensityMatrix, HermitianOperator) {
    let mut rng = trial_rng(seed, 0);
    let rho = random_density(d, &mut rng);
    (rho, random_hermitian(d, &mut rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), d in 1usize..=81) {
        let h = random_hermitian(d, &mut trial_rng(seed, 1));
        let e = eigendecompose(&h);
        let scale = max_abs(&h).max(1.0);
        prop_assert!(max_abs(&(e.reconstruct() - &*h)) <= 1e-10 * scale);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn partial_trace_factorizes_products(seed in any::<u64>(), d in 2usize..=3) {
        let mut rng = trial_rng(seed, 2);
        let x = random_density(d, &mut rng);
        let y = random_density(d, &mut rng);
        let z = random_density(d, &mut rng);
        let xyz = tensor(&tensor(&x, &y), &z);
        let layout = MultipartiteLayout::new(3, d);
        let xz = partial_trace(&xyz, layout, &[1]).unwrap();
        prop_assert!(max_abs(&(xz.as_matrix() - tensor(&x, &z).as_matrix())) <= 1e-12);
        let y_only = partial_trace(&xyz, layout, &[0, 2]).unwrap();
        prop_assert!(max_abs(&(y_only.as_matrix() - &*y)) <= 1e-12);
    }

    #[test]
    fn partial_transpose_keeps_trace_and_hermiticity(seed in any::<u64>(), d in 2usize..=3, n in 2usize..=3) {
        let layout = MultipartiteLayout::new(n, d);
        let h = random_hermitian(layout.total_dim(), &mut trial_rng(seed, 3));
        let pt = partial_transpose(&h, layout, &[0]).unwrap();
        prop_assert!((pt.as_matrix().trace() - h.trace()).norm() <= 1e-12);
        prop_assert!(max_abs(&(pt.as_matrix() - pt.as_matrix().adjoint())) <= 1e-14);
    }

    #[test]
    fn embedding_preserves_spectrum_minimum(seed in any::<u64>(), d in 1usize..=12) {
        let h = random_hermitian(d, &mut trial_rng(seed, 4));
        let real = complex_to_real_embedding(&h);
        let real_min = real.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!((real_min - min_eigenvalue(&h)).abs() <= 1e-10);
    }

    #[test]
    fn concave_roof_is_attained(seed in any::<u64>(), d in 2usize..=6, rank in 1usize..=6) {
        let rank = rank.min(d);
        let mut rng = trial_rng(seed, 5);
        let rho = random_density_of_rank(d, rank, &mut rng);
        let a = random_hermitian(d, &mut rng);
        let decomp = concave_roof_decomposition(&rho, &a).unwrap();
        let v = variance(&rho, &a).unwrap();
        prop_assert!((mixture_variance(&decomp, &a).unwrap() - v).abs() <= 1e-8 * v.max(1.0));
        prop_assert!(decomp.reassembly_residual(&rho).unwrap() <= 1e-9);
        let mean = rho.expectation(&a);
        for s in decomp.states() {
            prop_assert!((s.expectation(&a) - mean).abs() <= 1e-8);
        }
    }

    #[test]
    fn rank2_zero_diagonal_decomposition_attains_the_fisher_information(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = trial_rng(seed, 6);
        let rho = random_density_of_rank(d, 2, &mut rng);
        let a = random_zero_diagonal_observable(&rho, &mut rng);
        let decomp = theorem2_decomposition(&rho, &a).unwrap();
        let qfi = qfi_bc(&rho, &a).unwrap();
        prop_assert!((4.0 * mixture_variance(&decomp, &a).unwrap() - qfi).abs() <= 1e-9 * qfi.max(1.0));
        prop_assert!(decomp.reassembly_residual(&rho).unwrap() <= 1e-9);
    }

    #[test]
    fn sandwich_holds(seed in any::<u64>(), d in 2usize..=4, extra in 0usize..4) {
        let mut rng = trial_rng(seed, 7);
        let rho = random_density(d, &mut rng);
        let a = random_hermitian(d, &mut rng);
        let decomp = random_decomposition(&rho, d + extra, &mut rng).unwrap();
        let mv = mixture_variance(&decomp, &a).unwrap();
        prop_assert!(mv <= variance(&rho, &a).unwrap() + 1e-9);
        prop_assert!(decomp.reassembly_residual(&rho).unwrap() <= 1e-9);
    }

    #[test]
    fn rank_split_reduces_rank(seed in any::<u64>(), d in 3usize..=5, rank in 3usize..=5) {
        let rank = rank.min(d);
        let mut rng = trial_rng(seed, 8);
        let rho = random_density_of_rank(d, rank, &mut rng);
        let a = random_hermitian(d, &mut rng);
        let split = lemma2_split(&rho, &a).unwrap();
        let rank_of = |r: &DensityMatrix| eigendecompose(r.as_operator()).rank(1e-9);
        prop_assert!(rank_of(&split.rho_minus) < rank && rank_of(&split.rho_plus) < rank);
        let p = split.p;
        let back = &*split.rho_minus * C64::new(p, 0.0) + &*split.rho_plus * C64::new(1.0 - p, 0.0);
        prop_assert!(max_abs(&(back - &*rho)) <= 1e-9);
        let mean = rho.expectation(&a);
        prop_assert!((split.rho_minus.expectation(&a) - mean).abs() <= 1e-9);
        prop_assert!((split.rho_plus.expectation(&a) - mean).abs() <= 1e-9);
    }

    #[test]
    fn symmetric_basis_is_orthonormal_and_invariant(d in 1usize..=3, n in 1usize..=4) {
        let layout = MultipartiteLayout::new(n, d);
        let basis = symmetric_basis(layout);
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let ip = u.amplitudes().dotc(v.amplitudes());
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip - C64::new(expected, 0.0)).norm() <= 1e-12);
            }
        }
        // Swapping the first two parties leaves every basis vector unchanged.
        if n >= 2 {
            let stride = d.pow(n as u32 - 2);
            for v in &basis {
                for idx in 0..layout.total_dim() {
                    let (a, b, rest) = (idx / (d * stride), (idx / stride) % d, idx % stride);
                    let swapped = (b * d + a) * stride + rest;
                    prop_assert!((v.amplitudes()[idx] - v.amplitudes()[swapped]).norm() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn decomposition_json_is_lossless(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = trial_rng(seed, 9);
        let rho = random_density(d, &mut rng);
        let decomp = random_decomposition(&rho, d + 1, &mut rng).unwrap();
        let back = PureDecomposition::from_json(&decomp.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, decomp);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bounds_are_sound_and_ordered(seed in any::<u64>(), d in 2usize..=3) {
        let (rho, a) = pair(seed, d);
        let sppt = bound_sppt(&rho, &a, DEFAULT_TOLERANCE).unwrap();
        let se3 = bound_se(&rho, &a, 3, DEFAULT_TOLERANCE).unwrap();
        prop_assert_eq!(sppt.witness.status, SolveStatus::Optimal);
        prop_assert_eq!(se3.witness.status, SolveStatus::Optimal);
        prop_assert!(sppt.value <= se3.value + 2.0 * DEFAULT_TOLERANCE);
        if d == 2 {
            let se4 = bound_se(&rho, &a, 4, DEFAULT_TOLERANCE).unwrap();
            prop_assert!(se3.value <= se4.value + 2.0 * DEFAULT_TOLERANCE);
        }
        let mut rng = trial_rng(seed, 10);
        let decomp = random_decomposition(&rho, d + 2, &mut rng).unwrap();
        prop_assert!(se3.value <= 4.0 * mixture_variance(&decomp, &a).unwrap() + 1e-6);
    }

    #[test]
    fn two_qubit_zero_diagonal_bound_is_exact(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 11);
        let rho = random_density(2, &mut rng);
        let a = random_zero_diagonal_observable(&rho, &mut rng);
        let qfi = qfi_bc(&rho, &a).unwrap();
        let b = bound_sppt(&rho, &a, DEFAULT_TOLERANCE).unwrap();
        prop_assume!(qfi > 1e-12);
        prop_assert!((b.value - qfi).abs() / qfi <= 1e-5);
    }

    #[test]
    fn summaries_recompute_from_records(seed in any::<u64>()) {
        let config = TrialConfig { trials: 6, ..TrialConfig::new(2, BoundKind::Sppt, false, seed) };
        let records = fisher_roof::experiments::run_trials(&config).unwrap();
        let text: Vec<String> = records.iter().map(|r| serde_json::to_string(r).unwrap()).collect();
        let parsed: Vec<_> = text.iter().map(|l| serde_json::from_str(l).unwrap()).collect();
        prop_assert_eq!(summarize(&parsed), summarize(&records));
    }
}
