use entvir::model::{self, hamiltonian_density, momentum_density, ModelParams};
use faer::c64;

fn models() -> Vec<ModelParams> {
    vec![
        ModelParams::ising(),
        ModelParams::xy(0.9),
        ModelParams::xx(),
        ModelParams::new(0.3, 0.0).unwrap(),
        ModelParams::new(0.7, 0.4).unwrap(),
    ]
}

#[test]
fn momentum_is_commutator_of_adjacent_bonds() {
    for params in models() {
        let sites = 6;
        for center in 2..sites {
            let left = hamiltonian_density(&params, center - 1, sites).unwrap();
            let right = hamiltonian_density(&params, center, sites).unwrap();
            let expected = left.commutator(&right).unwrap().scaled(c64::new(0.0, -1.0));
            let p = momentum_density(&params, center, sites).unwrap();
            let diff = p.max_abs_diff(&expected).unwrap();
            assert!(diff < 1e-13, "{params:?} center {center}: {diff}");
            assert!(p.is_hermitian(1e-14));
        }
    }
}

#[test]
fn densities_are_hermitian() {
    for params in models() {
        for bond in 1..5 {
            assert!(hamiltonian_density(&params, bond, 5)
                .unwrap()
                .is_hermitian(1e-15));
        }
    }
}

#[test]
fn quadrature_matches_closed_forms() {
    for params in [ModelParams::ising(), ModelParams::xx()] {
        for d in [-7i64, -1, 0, 1, 2, 5, 40, 333] {
            let exact = model::correlator(&params, d).unwrap();
            let quad = model::correlator_by_quadrature(&params, d).unwrap();
            assert!(
                (exact.particle_hole - quad.particle_hole).abs() < 1e-12,
                "{d}"
            );
            assert!((exact.pairing - quad.pairing).abs() < 1e-12, "{d}");
        }
    }
}

#[test]
fn ising_ground_energy_density() {
    let e = model::ground_energy_density(&ModelParams::ising()).unwrap();
    assert!((e + 2.0 / std::f64::consts::PI + 0.5).abs() < 1e-14);
}
