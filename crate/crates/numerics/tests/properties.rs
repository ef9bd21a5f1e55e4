use num_complex::Complex64 as C64;
use proptest::prelude::*;
use quasiecho_numerics::{eig_hermitian, eig_unitary, linear_least_squares, ComplexMatrix, DftPlan, Direction};

fn complex_vec(max_len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im)), 1..max_len)
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        let a = ComplexMatrix::from_fn(n, n, |r, c| C64::new(v[r * n + c].0, v[r * n + c].1));
        a.add(&a.adjoint()).scale(C64::new(0.5, 0.0))
    })
}

/// `exp(iH)` from the Hermitian eigensystem.
fn unitary_from(h: &ComplexMatrix) -> ComplexMatrix {
    let es = eig_hermitian(h).unwrap();
    let v = &es.eigenvectors;
    let d = ComplexMatrix::from_diagonal(&es.eigenvalues.iter().map(|l| C64::from_polar(1.0, l.re)).collect::<Vec<_>>());
    v.matmul(&d).matmul(&v.adjoint())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dft_round_trip_and_parseval(x in complex_vec(300)) {
        let plan = DftPlan::new(x.len());
        let mut y = x.clone();
        plan.process(&mut y, Direction::Forward);
        let n0: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let n1: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((n0 - n1).abs() < 1e-12 * n0.max(1.0));
        plan.process(&mut y, Direction::Inverse);
        for (a, b) in x.iter().zip(&y) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_eigensystem_is_orthonormal(h in (1usize..12).prop_flat_map(hermitian)) {
        let es = eig_hermitian(&h).unwrap();
        prop_assert!(es.residual_norm < 1e-10);
        prop_assert!(es.orthonormality_error() < 1e-12);
        prop_assert!(es.eigenvalues.iter().all(|l| l.im == 0.0));
    }

    #[test]
    fn unitary_eigensystem_is_orthonormal(h in (1usize..10).prop_flat_map(hermitian)) {
        let u = unitary_from(&h);
        let es = eig_unitary(&u).unwrap();
        prop_assert!(es.residual_norm < 1e-10);
        prop_assert!(es.orthonormality_error() < 1e-10);
        prop_assert!(es.eigenvalues.iter().all(|l| (l.norm() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn least_squares_recovers_exact_lines(slope in -10.0..10.0f64, intercept in -10.0..10.0f64, n in 3usize..50) {
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * 0.7 - 3.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
        let fit = linear_least_squares(&xs, &ys).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
        prop_assert!((fit.intercept - intercept).abs() < 1e-10);
    }
}
