use entvir::cft::{ExactTable, ExactValue, TowerSpectrum};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Sparse 7x7 table from 1-based `(row, col, numerator, denominator)` entries.
fn sparse(entries: &[(usize, usize, i64, i64)]) -> ExactTable {
    let mut rows = vec![vec![(0i64, 1i64); 7]; 7];
    for &(i, j, n, d) in entries {
        rows[i - 1][j - 1] = (n, d);
    }
    ExactTable::from_ratios(&rows)
}

#[test]
fn ising_dimensions() {
    let tower = TowerSpectrum::ising();
    let dims: Vec<String> = tower.dimensions(9).iter().map(|d| d.to_string()).collect();
    assert_eq!(dims, ["0", "1/2", "3/2", "2", "5/2", "3", "7/2", "4", "4"]);
}

#[test]
fn boson_dimensions() {
    let tower = TowerSpectrum::boson();
    let dims: Vec<String> = tower.dimensions(8).iter().map(|d| d.to_string()).collect();
    assert_eq!(dims, ["0", "1/2", "1/2", "1", "3/2", "3/2", "2", "2"]);
    let charges: Vec<Option<i32>> = tower.states[..7]
        .iter()
        .map(|s| tower.sectors[s.sector].charge)
        .collect();
    assert_eq!(
        charges,
        [
            Some(0),
            Some(1),
            Some(-1),
            Some(0),
            Some(1),
            Some(-1),
            Some(0)
        ]
    );
}

#[test]
fn ising_virasoro_matrices() {
    let tower = TowerSpectrum::ising();
    let l1 = sparse(&[(2, 3, 1, 1), (3, 5, 2, 1), (4, 6, 2, 1), (5, 7, 3, 1)]);
    let l2 = sparse(&[(1, 4, 1, 2), (2, 5, 3, 2), (3, 7, 5, 2)]);
    assert_eq!(tower.ln_table(1, 7).unwrap(), l1);
    assert_eq!(tower.ln_table(-1, 7).unwrap(), l1.transpose());
    assert_eq!(tower.ln_table(2, 7).unwrap(), l2);
    assert_eq!(tower.ln_table(-2, 7).unwrap(), l2.transpose());
    let l0 = tower.ln_table(0, 7).unwrap();
    let dims = sparse(&[
        (2, 2, 1, 2),
        (3, 3, 3, 2),
        (4, 4, 2, 1),
        (5, 5, 5, 2),
        (6, 6, 3, 1),
        (7, 7, 7, 2),
    ]);
    assert_eq!(l0, dims);
}

#[test]
fn ising_h_tables() {
    let tower = TowerSpectrum::ising();
    let h1 = sparse(&[
        (2, 3, 1, 2),
        (3, 2, 1, 2),
        (3, 5, 1, 1),
        (5, 3, 1, 1),
        (4, 6, 1, 1),
        (6, 4, 1, 1),
        (5, 7, 3, 2),
        (7, 5, 3, 2),
    ]);
    let h2 = sparse(&[
        (1, 4, 1, 4),
        (4, 1, 1, 4),
        (2, 5, 3, 4),
        (5, 2, 3, 4),
        (3, 7, 5, 4),
        (7, 3, 5, 4),
    ]);
    assert_eq!(tower.hn_table(1, 7).unwrap(), h1);
    assert_eq!(tower.hn_table(2, 7).unwrap(), h2);
}

#[test]
fn boson_virasoro_matrices() {
    let tower = TowerSpectrum::boson();
    let l1 = sparse(&[(2, 5, 1, 1), (3, 6, 1, 1)]);
    assert_eq!(tower.ln_table(1, 7).unwrap(), l1);
    assert_eq!(tower.ln_table(-1, 7).unwrap(), l1.transpose());
    let root_half =
        ExactValue::with_sqrt(BigRational::new(1.into(), 2.into()), BigInt::from(2)).unwrap();
    let mut l2 = sparse(&[]);
    l2.entries[0][6] = root_half;
    assert_eq!(tower.ln_table(2, 7).unwrap(), l2);
    assert_eq!(tower.ln_table(-2, 7).unwrap(), l2.transpose());
}

#[test]
fn virasoro_algebra_on_window() {
    for tower in [TowerSpectrum::ising(), TowerSpectrum::boson()] {
        for n in -2..=2 {
            for m in -2..=2 {
                assert!(
                    tower.virasoro_identity_holds(n, m, 9).unwrap(),
                    "[L{n}, L{m}]"
                );
            }
        }
    }
}

#[test]
fn lowering_is_transpose_of_raising() {
    let tower = TowerSpectrum::ising();
    for n in 1..=3 {
        assert_eq!(
            tower.ln_table(-n, 12).unwrap(),
            tower.ln_table(n, 12).unwrap().transpose()
        );
    }
}

fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::from_integer(1.into());
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| m[r][col] != BigRational::from_integer(0.into()))
        else {
            return BigRational::from_integer(0.into());
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            let f = &m[r][col] / &m[col][col];
            for c in col..n {
                let v = &f * &m[col][c];
                m[r][c] -= v;
            }
        }
    }
    det
}

#[test]
fn gram_positive_semidefinite_at_unitary_points() {
    use entvir::cft::gram_matrix;
    let zero = BigRational::from_integer(0.into());
    for (h, c) in [
        ((0, 1), (1, 2)),
        ((1, 2), (1, 2)),
        ((1, 16), (1, 2)),
        ((0, 1), (1, 1)),
        ((1, 2), (1, 1)),
        ((1, 1), (1, 1)),
    ] {
        let h = BigRational::new(h.0.into(), h.1.into());
        let c = BigRational::new(c.0.into(), c.1.into());
        for level in 1..=5 {
            let g = gram_matrix(&h, &c, level);
            // Every principal minor of a PSD matrix is non-negative.
            let n = g.len();
            for mask in 1u32..(1 << n) {
                let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let sub = idx
                    .iter()
                    .map(|&i| idx.iter().map(|&j| g[i][j].clone()).collect())
                    .collect();
                assert!(determinant(sub) >= zero, "h={h} c={c} level {level}");
            }
        }
    }
}

#[test]
fn null_states_have_zero_gram_determinant() {
    use entvir::cft::gram_matrix;
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let zero = q(0, 1);
    // eps at c=1/2 has a level-2 null vector; the vacuum has L_{-1}|0> null.
    assert_eq!(determinant(gram_matrix(&q(1, 2), &q(1, 2), 2)), zero);
    assert_eq!(determinant(gram_matrix(&q(0, 1), &q(1, 2), 1)), zero);
    assert!(determinant(gram_matrix(&q(1, 3), &q(1, 2), 2)) != zero);
}

#[test]
fn window_is_bounded() {
    assert!(TowerSpectrum::ising().ln_table(1, 0).is_err());
    assert!(TowerSpectrum::ising().ln_table(1, 10_000).is_err());
}
