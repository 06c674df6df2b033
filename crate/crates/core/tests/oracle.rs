use entvir::gaussian::{
    build_correlation_matrix, diagonalize, entanglement_entropy, enumerate_schmidt,
};
use entvir::model::{hamiltonian_density, momentum_density, ModelParams};
use entvir::oracle::*;
use entvir::quadratic::{Basis, QuadraticOperator};
use faer::{c64, Mat};

fn max_diff(a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

#[test]
fn number_operator_on_one_site() {
    let mut op = QuadraticOperator::zeros(Basis::Site, 1);
    op.add_one_body(0, 0, c64::new(1.0, 0.0));
    let d = densify(&op).unwrap();
    assert_eq!(d.matrix[(0, 0)], c64::new(0.0, 0.0));
    assert_eq!(d.matrix[(1, 1)], c64::new(1.0, 0.0));
    assert_eq!(d.matrix[(0, 1)], c64::new(0.0, 0.0));
}

#[test]
fn canonical_anticommutation() {
    let sites = 4;
    let a: Vec<_> = (0..sites)
        .map(|i| annihilation_matrix(i, sites).unwrap().matrix)
        .collect();
    let dim = 1 << sites;
    for i in 0..sites {
        for j in 0..sites {
            let ad = a[j].adjoint().to_owned();
            let anti = &a[i] * &ad + &ad * &a[i];
            let expected = if i == j {
                Mat::<c64>::identity(dim, dim)
            } else {
                Mat::zeros(dim, dim)
            };
            assert_eq!(max_diff(&anti, &expected), 0.0);
            let aa = &a[i] * &a[j] + &a[j] * &a[i];
            assert_eq!(max_diff(&aa, &Mat::zeros(dim, dim)), 0.0);
        }
    }
}

#[test]
fn ising_bond_by_hand() {
    // h = 1/2 (a+_2 a_1 + a_2 a_1 + h.c.) - 1/2 (n_1 + n_2) + const, basis |n_2 n_1>.
    let params = ModelParams::ising();
    let op = hamiltonian_density(&params, 1, 2).unwrap();
    let c = op.constant().re;
    let r = |x: f64| c64::new(x, 0.0);
    let expected = Mat::from_fn(4, 4, |i, j| match (i, j) {
        (0, 0) => r(c),
        (1, 1) | (2, 2) => r(c - 0.5),
        (3, 3) => r(c - 1.0),
        (1, 2) | (2, 1) | (0, 3) | (3, 0) => r(0.5),
        _ => r(0.0),
    });
    assert!(max_diff(&densify(&op).unwrap().matrix, &expected) < 1e-15);
}

#[test]
fn densify_maps_commutators() {
    for params in [
        ModelParams::ising(),
        ModelParams::xy(0.9),
        ModelParams::xx(),
    ] {
        let h1 = densify(&hamiltonian_density(&params, 1, 4).unwrap())
            .unwrap()
            .matrix;
        let h2 = densify(&hamiltonian_density(&params, 2, 4).unwrap())
            .unwrap()
            .matrix;
        let p = densify(&momentum_density(&params, 2, 4).unwrap())
            .unwrap()
            .matrix;
        let comm = (&h1 * &h2 - &h2 * &h1) * faer::Scale(c64::new(0.0, -1.0));
        assert!(max_diff(&p, &comm) < 1e-13);
    }
}

#[test]
fn densify_is_linear() {
    let params = ModelParams::xy(0.9);
    let a = hamiltonian_density(&params, 1, 3).unwrap();
    let b = momentum_density(&params, 2, 3).unwrap();
    let mut sum = a.clone();
    sum.axpy(c64::new(0.3, -1.2), &b).unwrap();
    let lhs = densify(&sum).unwrap().matrix;
    let rhs = densify(&a).unwrap().matrix
        + densify(&b).unwrap().matrix * faer::Scale(c64::new(0.3, -1.2));
    assert!(max_diff(&lhs, &rhs) < 1e-14);
    assert!(densify(&a).unwrap().hermiticity_defect() < 1e-15);
}

#[test]
fn dense_rho_is_the_gaussian_state() {
    for params in [ModelParams::ising(), ModelParams::xx()] {
        let cm = build_correlation_matrix(&params, 6).unwrap();
        let (bt, spec) = diagonalize(&cm).unwrap();
        let rho = dense_rho(&spec, &bt).unwrap();
        assert!((rho.trace() - c64::new(1.0, 0.0)).norm() < 1e-13);
        assert!(rho.hermiticity_defect() < 1e-14);
        assert!(correlation_deviation(&rho, &cm) < 1e-12);
        assert!((dense_entropy(&rho).unwrap() - entanglement_entropy(&spec)).abs() < 1e-10);
        // Every eigenvalue is a product of nu or 1 - nu.
        let all = enumerate_schmidt(&spec, 64).unwrap();
        for (s, w) in all.iter().zip(dense_weights(&rho).unwrap()) {
            assert!((s.weight - w).abs() < 1e-13);
        }
    }
}

#[test]
fn schmidt_vectors_are_orthonormal() {
    let cm = build_correlation_matrix(&ModelParams::xy(0.9), 6).unwrap();
    let (bt, spec) = diagonalize(&cm).unwrap();
    let states = enumerate_schmidt(&spec, 10).unwrap();
    let vectors = dense_states(&bt, &states).unwrap();
    for (a, u) in vectors.iter().enumerate() {
        for (b, v) in vectors.iter().enumerate() {
            let overlap: c64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
            let expected = if a == b { 1.0 } else { 0.0 };
            assert!((overlap - c64::new(expected, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn two_site_ising_agrees_exactly() {
    let report = crosscheck(&ModelParams::ising(), 2, &[0, 1, 2], 7, 0.04).unwrap();
    assert_eq!(report.states, 4);
    assert!(report.max_deviation < 1e-12, "{report:?}");
}

#[test]
fn eight_sites_all_presets() {
    for params in [
        ModelParams::ising(),
        ModelParams::xy(0.9),
        ModelParams::xx(),
    ] {
        let report = crosscheck(&params, 8, &[0, 1, 2], 7, 0.037).unwrap();
        assert!(report.passed);
        assert!(report.max_deviation < 1e-10, "{report:?}");
        let names: Vec<_> = report.operators.iter().map(|o| o.name.as_str()).collect();
        assert_eq!(names, ["H0", "H1", "L1", "L-1", "H2", "L2", "L-2"]);
    }
}

#[test]
fn size_limits() {
    assert!(densify(&QuadraticOperator::zeros(Basis::Site, 13)).is_err());
    assert!(densify(&QuadraticOperator::zeros(Basis::EntanglementMode, 2)).is_err());
    assert!(crosscheck(&ModelParams::ising(), 14, &[0], 3, 0.04).is_err());
}
