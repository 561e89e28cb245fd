use aor_precond::classes::{classify, is_irreducible, is_l, is_nonsingular_m, is_z, jacobi_radius};
use aor_precond::harness::{counterexample_4x4, counterexample_6x6, gen_l_matrix, gen_m_matrix_with};
use aor_precond::matrix::cone_of;
use aor_precond::{cone_compare, decompose_dlu, inverse_nonneg, ConeOrder, Matrix};
use proptest::prelude::*;

fn square(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-5.0..5.0f64, n * n).prop_map(move |v| Matrix::new(n, v).unwrap())
    })
}

fn pair(max_n: usize) -> impl Strategy<Value = (Matrix, Matrix)> {
    (1..=max_n).prop_flat_map(|n| {
        // small integers so that exact ties occur
        let entries = || prop::collection::vec(-2i8..=2, n * n);
        (entries(), entries()).prop_map(move |(a, b)| {
            let m = |v: Vec<i8>| Matrix::new(n, v.into_iter().map(f64::from).collect()).unwrap();
            (m(a), m(b))
        })
    })
}

fn sparse_z(max_n: usize) -> impl Strategy<Value = Matrix> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![Just(0.0), 0.0..1.0f64], n * n).prop_map(move |v| {
            Matrix::from_fn(n, |i, j| if i == j { 1.0 } else { -v[i * n + j] / (n - 1) as f64 * 1.6 })
        })
    })
}

proptest! {
    #[test]
    fn dlu_reconstructs_exactly(a in square(7)) {
        let s = decompose_dlu(&a);
        prop_assert_eq!(s.reconstruct(), a.clone());
        let n = a.order();
        for i in 0..n {
            for j in 0..n {
                if i <= j { prop_assert_eq!(s.l[(i, j)], 0.0); }
                if i >= j { prop_assert_eq!(s.u[(i, j)], 0.0); }
                if i != j { prop_assert_eq!(s.d[(i, j)], 0.0); }
            }
        }
    }

    #[test]
    fn cone_relations_nest((a, b) in pair(4)) {
        let c = cone_compare(&a, &b, 0.0).unwrap();
        prop_assert_eq!(c, cone_of(&(&a - &b), 0.0));
        let d = &a - &b;
        match c {
            ConeOrder::Gg => prop_assert!(d.as_slice().iter().all(|&x| x > 0.0)),
            ConeOrder::Gt => prop_assert!(d.is_nonnegative(0.0) && d.max_abs() > 0.0),
            ConeOrder::Ge => prop_assert!(d.as_slice().iter().all(|&x| x == 0.0)),
            ConeOrder::None => prop_assert!(!d.is_nonnegative(0.0)),
        }
        if c == ConeOrder::Gt || c == ConeOrder::Gg {
            prop_assert_eq!(cone_compare(&b, &a, 0.0).unwrap(), ConeOrder::None);
        }
    }

    #[test]
    fn class_chain(a in sparse_z(8)) {
        let c = classify(&a, 0.0);
        if c.is_nonsingular_m { prop_assert!(c.is_l); }
        if c.is_l { prop_assert!(c.is_z); }
        prop_assert_eq!(c.is_nonsingular_m, c.is_monotone);
    }
}

#[test]
fn cone_examples() {
    let z = Matrix::zeros(2);
    let ones = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
    let e11 = Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
    assert_eq!(cone_compare(&ones, &ones, 0.0).unwrap(), ConeOrder::Ge);
    assert_eq!(cone_compare(&ones, &z, 0.0).unwrap(), ConeOrder::Gg);
    assert_eq!(cone_compare(&e11, &z, 0.0).unwrap(), ConeOrder::Gt);
    assert!(cone_compare(&ones, &Matrix::zeros(3), 0.0).is_err());
}

#[test]
fn dlu_examples() {
    let a = Matrix::from_rows(&[[1.0, -0.5], [-1.0, 1.0]]).unwrap();
    let s = decompose_dlu(&a);
    assert_eq!(s.d, Matrix::identity(2));
    assert_eq!(s.l.rows(), vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
    assert_eq!(s.u.rows(), vec![vec![0.0, 0.5], vec![0.0, 0.0]]);

    let s = decompose_dlu(&counterexample_4x4());
    for (i, j) in [(1, 0), (2, 1), (3, 2)] {
        assert_eq!(s.l[(i, j)], 1.0);
    }
    assert_eq!(s.u[(0, 1)], 0.5);
    assert_eq!(s.u[(0, 3)], 1.0);
}

#[test]
fn classify_examples() {
    let id = classify(&Matrix::identity(3), 0.0);
    assert!(id.is_z && id.is_l && !id.is_irreducible && id.is_nonsingular_m && id.is_monotone);

    for a in [counterexample_4x4(), counterexample_6x6()] {
        let c = classify(&a, 0.0);
        assert!(c.is_l && c.is_irreducible);
    }

    let a = Matrix::from_rows(&[[1.0, -2.0], [-2.0, 1.0]]).unwrap();
    let c = classify(&a, 0.0);
    assert!(c.is_z && c.is_l && !c.is_nonsingular_m && !c.is_monotone);
    // eigenvalues of [[0, 2], [2, 0]] are +-2
    assert!((jacobi_radius(&a).unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(inverse_nonneg(&a, 1e-12).unwrap(), ConeOrder::None);
    assert_eq!(inverse_nonneg(&Matrix::identity(3), 1e-12).unwrap(), ConeOrder::Gt);
}

#[test]
fn zero_diagonal_is_not_m_but_not_an_error() {
    let a = Matrix::from_rows(&[[0.0, -1.0], [-1.0, 1.0]]).unwrap();
    assert!(is_z(&a, 0.0));
    assert!(!is_l(&a, 0.0));
    assert!(!is_nonsingular_m(&a, 1e-9));
}

#[test]
fn irreducibility_examples() {
    assert!(!is_irreducible(&Matrix::identity(2), 0.0));
    assert!(is_irreducible(&Matrix::identity(1), 0.0));
    let n = 6;
    let cyclic = Matrix::from_fn(n, |i, j| if j == (i + 1) % n { 1.0 } else { 0.0 });
    assert!(is_irreducible(&cyclic, 0.0));
    assert!(!is_irreducible(&cyclic.transpose().scale(1e-13), 1e-12));
}

#[test]
fn irreducible_m_matrices_have_positive_inverse() {
    for seed in 0..200 {
        let n = 2 + (seed as usize % 9);
        let a = gen_m_matrix_with(n, 0.4, 0.1, true, seed).unwrap();
        assert!(is_irreducible(&a, 0.0));
        assert_eq!(inverse_nonneg(&a, 1e-9).unwrap(), ConeOrder::Gg, "seed {seed}");
    }
}

#[test]
fn generated_l_matrices_satisfy_class_chain() {
    for seed in 0..300 {
        let a = gen_l_matrix(2 + (seed as usize % 9), 0.5, seed % 3 == 0, seed).unwrap();
        let c = classify(&a, 0.0);
        assert!(c.is_l && c.is_z);
        assert_eq!(c.is_nonsingular_m, c.is_monotone, "seed {seed}");
    }
}
