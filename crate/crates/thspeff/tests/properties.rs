//! Randomized structural invariants of the ensemble and spectrum code.

use proptest::prelude::*;

use thspeff::ensembles::{EnsembleSpec, SpreadingMatrix};
use thspeff::spectra;

fn arb_spec() -> impl Strategy<Value = EnsembleSpec> {
    (1usize..6, 1usize..40, any::<u64>()).prop_flat_map(|(ns, k, seed)| {
        (1usize..6).prop_map(move |nh| EnsembleSpec::th(ns * nh, k, ns, seed).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn columns_are_unit_norm(spec in arb_spec()) {
        let m = SpreadingMatrix::sample(&spec).unwrap();
        for user in 0..spec.k {
            let norm2: f64 = m.column(user).iter().map(|v| v * v).sum();
            prop_assert!((norm2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inner_products_symmetric_and_bounded(spec in arb_spec()) {
        let m = SpreadingMatrix::sample(&spec).unwrap();
        for i in 0..spec.k {
            for j in 0..spec.k {
                let a = m.inner_product(i, j);
                prop_assert_eq!(a, m.inner_product(j, i));
                prop_assert!(a.abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn sparse_and_dense_inner_products_agree(spec in arb_spec()) {
        let m = SpreadingMatrix::sample(&spec).unwrap();
        for i in 0..spec.k.min(6) {
            for j in 0..spec.k.min(6) {
                let sparse = m.inner_product(i, j);
                let (ci, cj) = (m.column(i), m.column(j));
                let dense: f64 = ci.iter().zip(&cj).map(|(a, b)| a * b).sum();
                prop_assert!((sparse - dense).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectrum_trace_and_positivity(spec in arb_spec()) {
        let m = SpreadingMatrix::sample(&spec).unwrap();
        let eig = spectra::gram_eigenvalues(&m).unwrap();
        prop_assert_eq!(eig.len(), spec.n);
        let trace: f64 = eig.iter().sum();
        prop_assert!((trace - spec.k as f64).abs() < 1e-8);
        prop_assert!(eig.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn capacity_positive_and_bounded_by_rank(spec in arb_spec(), gamma in 0.01f64..100.0) {
        let m = SpreadingMatrix::sample(&spec).unwrap();
        let c = spectra::logdet_capacity(&m, gamma).unwrap();
        prop_assert!(c >= 0.0);
        // log det(I + gamma SS^T) <= rank * log2(1 + gamma lambda_max).
        let eig = spectra::gram_eigenvalues(&m).unwrap();
        let lmax = eig.iter().cloned().fold(0.0, f64::max);
        let rank = spectra::rank_from_eigenvalues(&eig, spec.n);
        let bound = rank as f64 * (1.0 + gamma * lmax).log2() / spec.n as f64;
        prop_assert!(c <= bound + 1e-9);
    }
}
