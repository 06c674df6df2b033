use entvir::analysis::*;
use entvir::cft::{ExactTable, TowerSpectrum};
use entvir::gaussian::SchmidtState;
use entvir::pipeline::{self, Model, Preset};
use entvir::Error;
use faer::{c64, Mat};
use proptest::prelude::*;

fn state(energy: f64, index: usize) -> SchmidtState {
    SchmidtState {
        occupation: vec![],
        energy,
        weight: (-2.0 * std::f64::consts::PI * energy).exp(),
        index,
    }
}

fn from_exact(t: &ExactTable) -> Mat<c64> {
    let v = t.to_f64();
    Mat::from_fn(v.len(), v.len(), |a, b| c64::new(v[a][b], 0.0))
}

proptest! {
    #[test]
    fn rescaling_ignores_a_common_shift(
        energies in prop::collection::vec(0.0f64..5.0, 1..10),
        shift in -10.0f64..10.0,
        l in 1.0f64..20.0,
    ) {
        let base: Vec<_> = energies.iter().enumerate().map(|(i, &e)| state(e, i)).collect();
        let shifted: Vec<_> = energies.iter().enumerate().map(|(i, &e)| state(e + shift, i)).collect();
        for (a, b) in rescale_spectrum(&base, l).iter().zip(rescale_spectrum(&shifted, l)) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn alignment_preserves_magnitudes(phases in prop::collection::vec(0.0f64..6.3, 4)) {
        let tower = TowerSpectrum::ising();
        let cft = tower.hn_table(1, 4).unwrap();
        let d: Vec<c64> = phases.iter().map(|&p| c64::from_polar(1.0, p)).collect();
        let target = from_exact(&cft);
        // A lattice table that is the CFT table in a scrambled gauge.
        let lattice = Mat::from_fn(4, 4, |a, b| d[a] * target[(a, b)] * d[b].conj());
        let cmp = compare_tables(&[(1, lattice.as_ref(), &cft)]).unwrap();
        prop_assert!(cmp[0].max_abs_correction() < 1e-12);
        for a in 0..4 {
            for b in 0..4 {
                prop_assert!((cmp[0].aligned[(a, b)].norm() - lattice[(a, b)].norm()).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn equal_tables_have_no_corrections() {
    let tower = TowerSpectrum::ising();
    let cft = tower.hn_table(2, 7).unwrap();
    let lattice = from_exact(&cft);
    let cmp = compare_tables(&[(2, lattice.as_ref(), &cft)]).unwrap();
    assert_eq!(cmp[0].max_abs_correction(), 0.0);
    assert_eq!(cmp[0].max_abs_raw_correction(), 0.0);
}

#[test]
fn corrections_on_cft_zeros_are_raw_magnitudes() {
    let tower = TowerSpectrum::ising();
    let cft = tower.hn_table(1, 5).unwrap();
    let mut lattice = from_exact(&cft);
    lattice[(0, 3)] = c64::new(0.0, 0.02);
    lattice[(3, 0)] = c64::new(0.0, -0.02);
    let cmp = compare_tables(&[(1, lattice.as_ref(), &cft)]).unwrap();
    assert!(cft.get(0, 3).is_zero());
    assert!((cmp[0].corrections[(0, 3)].norm() - 0.02).abs() < 1e-15);
}

#[test]
fn fit_recovers_synthetic_cutoff() {
    let sizes = [64usize, 128, 256, 512, 1024];
    let eps = 0.042;
    let gaps: Vec<f64> = sizes
        .iter()
        .map(|&s| 1.0 / (3.0 * (s as f64 / eps).ln()))
        .collect();
    let fit = fit_epsilon(&sizes, &gaps).unwrap();
    assert!((fit.epsilon - eps).abs() < 1e-12);
    assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
    assert!(matches!(
        fit_epsilon(&sizes, &[0.1, 0.11, 0.12, 0.13, 0.14]),
        Err(Error::SingularFit(_))
    ));
}

#[test]
fn central_charge_from_synthetic_entropies() {
    let sizes = [64usize, 128, 256];
    let entropies: Vec<f64> = sizes
        .iter()
        .map(|&s| 0.5 / 3.0 * (s as f64).ln() + 0.4)
        .collect();
    assert!((fit_central_charge(&sizes, &entropies).unwrap() - 0.5).abs() < 1e-12);
}

fn level(dimension: f64, charge: Option<i32>, parity: i32) -> LatticeLevel {
    LatticeLevel {
        dimension,
        charge,
        parity,
    }
}

#[test]
fn boson_pair_resolved_by_charge() {
    let tower = TowerSpectrum::boson();
    let levels = [
        level(0.0, Some(0), 1),
        level(0.51, Some(-1), -1),
        level(0.51, Some(1), -1),
        level(1.0, Some(0), 1),
    ];
    let m = match_states(&levels, &tower, 4, 0.1, &[]).unwrap();
    // The tower lists e^{i phi} before e^{-i phi}.
    assert_eq!(
        (0..4).map(|i| m.dominant(i)).collect::<Vec<_>>(),
        [0, 2, 1, 3]
    );
}

#[test]
fn matching_ignores_input_order() {
    let tower = TowerSpectrum::boson();
    let levels = [
        level(0.0, Some(0), 1),
        level(0.5, Some(1), -1),
        level(0.5, Some(-1), -1),
        level(1.0, Some(0), 1),
    ];
    let swapped = [levels[0], levels[2], levels[1], levels[3]];
    let a = match_states(&levels, &tower, 4, 0.1, &[]).unwrap();
    let b = match_states(&swapped, &tower, 4, 0.1, &[]).unwrap();
    let perm = [0, 2, 1, 3];
    for i in 0..4 {
        assert_eq!(perm[a.dominant(i)], b.dominant(i));
    }
}

#[test]
fn unmatched_state_is_an_error() {
    let tower = TowerSpectrum::ising();
    let levels = [level(0.0, None, 1), level(0.9, None, -1)];
    assert!(matches!(
        match_states(&levels, &tower, 2, 0.1, &[]),
        Err(Error::Unmatched { index: 1, .. })
    ));
}

#[test]
fn ising_lattice_states_match_in_order() {
    let model = Model::preset(Preset::Ising);
    let run = pipeline::run_virasoro(
        &model.params,
        &model.tower().unwrap(),
        256,
        7,
        &[0, 1, 2],
        0.0375,
    )
    .unwrap();
    assert_eq!(run.assignment, [0, 1, 2, 3, 4, 5, 6]);
    let h1 = run.comparisons.iter().find(|c| c.n == 1).unwrap();
    assert!(h1.max_abs_correction() < 0.15);
}

#[test]
fn xx_stress_tensor_is_identified_by_symmetry() {
    let model = Model::preset(Preset::Xx);
    let tower = model.tower().unwrap();
    let run = pipeline::run_virasoro(&model.params, &tower, 512, 7, &[1, 2], 0.042).unwrap();
    let stress = run.levels[run.assignment[6]];
    assert_eq!((stress.charge, stress.parity), (Some(0), 1));
    assert!(
        (stress.dimension - 2.0).abs() < 0.25,
        "{}",
        stress.dimension
    );
    let h2 = run.comparisons.iter().find(|c| c.n == 2).unwrap();
    // <1|H_2|L_-2 1> = sqrt(c/2)/2 with c = 1.
    assert!((h2.aligned[(0, 6)].re - 0.5f64.sqrt() / 2.0).abs() < 0.02);
}
