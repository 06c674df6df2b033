//! Gaussian reduced density matrix of an interval.
//!
//! The interval correlation matrix is brought to canonical form by a
//! Bogoliubov transformation `c_k = sum_j A_kj a_j + B_kj a+_j`. In the
//! entanglement modes `c_k` the reduced density matrix is a product of
//! independent two-level factors with occupations `nu_k <= 1/2`, so Schmidt
//! vectors are occupation patterns over the `c_k` vacuum.
//!
//! For the XY family all correlators are real. With Majorana operators
//! `x = a + a+`, `y = -i (a - a+)` one has `<x_m y_n> = i T_mn` with
//! `T = 1 - 2 C - 2 F`, `C = <a+ a>`, `F = <a a>`, and the real SVD
//! `T = U S V^T` yields the transform directly (`A = (U+V)^T/2`,
//! `B = (U-V)^T/2`, `nu = (1 - s)/2`). When `F = 0` the transform is taken
//! from the eigenvectors of `C` instead so that every mode carries a definite
//! particle number.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use faer::{c64, Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ModelParams};

/// Occupations are clipped to `[NU_FLOOR, 1/2]` before taking logs.
pub const NU_FLOOR: f64 = 1e-300;

/// Relative tolerance under which two Schmidt energies are treated as equal.
pub const TIE_TOL: f64 = 1e-12;

/// Correlations of an interval of `size` consecutive sites, stored by their
/// Toeplitz generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    size: usize,
    /// `<a_n a+_m>` for `n - m = 0..size`.
    particle_hole: Vec<f64>,
    /// `<a_n a_m>` for `n - m = 0..size`.
    pairing: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn from_generators(particle_hole: Vec<f64>, pairing: Vec<f64>) -> Result<Self> {
        if particle_hole.len() != pairing.len() || particle_hole.is_empty() {
            return Err(Error::InvalidArgument(
                "generator lengths must match and be non-zero".into(),
            ));
        }
        Ok(Self {
            size: particle_hole.len(),
            particle_hole,
            pairing,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn has_pairing(&self) -> bool {
        self.pairing.iter().any(|&f| f != 0.0)
    }

    fn g(&self, d: i64) -> f64 {
        self.particle_hole[d.unsigned_abs() as usize]
    }

    fn f(&self, d: i64) -> f64 {
        let v = self.pairing[d.unsigned_abs() as usize];
        if d < 0 {
            -v
        } else {
            v
        }
    }

    /// `C_ij = <a+_i a_j>`.
    pub fn hopping_block(&self) -> Mat<f64> {
        Mat::from_fn(self.size, self.size, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            delta - self.g(j as i64 - i as i64)
        })
    }

    /// `F_ij = <a_i a_j>`.
    pub fn pairing_block(&self) -> Mat<f64> {
        Mat::from_fn(self.size, self.size, |i, j| self.f(i as i64 - j as i64))
    }

    /// The full `2L x 2L` matrix
    /// `[[<a+_i a_j>, <a+_i a+_j>], [<a_i a_j>, <a_i a+_j>]]`.
    pub fn gamma_matrix(&self) -> Mat<c64> {
        let n = self.size;
        Mat::from_fn(2 * n, 2 * n, |r, c| {
            let (i, j) = ((r % n) as i64, (c % n) as i64);
            let delta = if i == j { 1.0 } else { 0.0 };
            let v = match (r < n, c < n) {
                (true, true) => delta - self.g(j - i),
                (true, false) => self.f(j - i),
                (false, true) => self.f(i - j),
                (false, false) => self.g(i - j),
            };
            c64::new(v, 0.0)
        })
    }

    /// `T = 1 - 2C - 2F`, the Majorana cross-correlation.
    fn majorana_block(&self) -> Mat<f64> {
        Mat::from_fn(self.size, self.size, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            let c = delta - self.g(j as i64 - i as i64);
            delta - 2.0 * c - 2.0 * self.f(i as i64 - j as i64)
        })
    }
}

/// Correlation matrix of `sites` consecutive sites of the infinite chain.
pub fn build_correlation_matrix(params: &ModelParams, sites: usize) -> Result<CorrelationMatrix> {
    if sites < 2 || !sites.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "interval size must be even and >= 2, got {sites}"
        )));
    }
    let table = model::correlator_table(params, sites)?;
    CorrelationMatrix::from_generators(
        table.iter().map(|c| c.particle_hole).collect(),
        table.iter().map(|c| c.pairing).collect(),
    )
}

/// Canonical transformation `c_k = sum_j A_kj a_j + B_kj a+_j`.
#[derive(Debug, Clone)]
pub struct BogoliubovTransform {
    a: Mat<c64>,
    b: Mat<c64>,
    /// Particle number carried by `c+_k` when the transform conserves it.
    charges: Option<Vec<i32>>,
}

impl BogoliubovTransform {
    pub fn new(a: Mat<c64>, b: Mat<c64>) -> Result<Self> {
        if a.nrows() != a.ncols() || b.nrows() != a.nrows() || b.ncols() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: b.nrows(),
            });
        }
        Ok(Self {
            a,
            b,
            charges: None,
        })
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            a: Mat::identity(modes, modes),
            b: Mat::zeros(modes, modes),
            charges: Some(vec![1; modes]),
        }
    }

    pub fn modes(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> MatRef<'_, c64> {
        self.a.as_ref()
    }

    pub fn b(&self) -> MatRef<'_, c64> {
        self.b.as_ref()
    }

    pub fn charges(&self) -> Option<&[i32]> {
        self.charges.as_deref()
    }

    /// `W = [[A, B], [conj B, conj A]]`, mapping `(a, a+)` to `(c, c+)`.
    pub fn block_unitary(&self) -> Mat<c64> {
        let n = self.modes();
        Mat::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
            (true, true) => self.a[(r, c)],
            (true, false) => self.b[(r, c - n)],
            (false, true) => self.b[(r - n, c)].conj(),
            (false, false) => self.a[(r - n, c - n)].conj(),
        })
    }

    /// `max |W^dagger W - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let w = self.block_unitary();
        let prod = w.adjoint() * &w;
        let n = prod.nrows();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - c64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Multiplies mode `k` by `phases[k]` (a per-mode gauge change).
    pub fn with_gauge(&self, phases: &[c64]) -> Result<Self> {
        let n = self.modes();
        if phases.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: phases.len(),
            });
        }
        Ok(Self {
            a: Mat::from_fn(n, n, |k, j| phases[k] * self.a[(k, j)]),
            b: Mat::from_fn(n, n, |k, j| phases[k] * self.b[(k, j)]),
            charges: self.charges.clone(),
        })
    }

    /// Fixes each mode's phase so that its largest coefficient in `(A|B)` is
    /// real and positive.
    fn fix_gauge(&mut self) {
        let n = self.modes();
        for k in 0..n {
            let mut best = c64::new(0.0, 0.0);
            for j in 0..n {
                for v in [self.a[(k, j)], self.b[(k, j)]] {
                    if v.norm() > best.norm() * (1.0 + 1e-12) {
                        best = v;
                    }
                }
            }
            if best.norm() == 0.0 {
                continue;
            }
            let phase = best.conj() / best.norm();
            for j in 0..n {
                self.a[(k, j)] *= phase;
                self.b[(k, j)] *= phase;
            }
        }
    }
}

/// Occupations `nu_k` of the entanglement modes, ordered by increasing
/// single-particle entanglement energy `e_k = log((1 - nu_k)/nu_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleParticleSpectrum {
    pub nus: Vec<f64>,
    pub energies: Vec<f64>,
    /// `sum_k log(1 - nu_k)`, the log of the vacuum weight.
    pub log_norm: f64,
}

impl SingleParticleSpectrum {
    /// Builds the spectrum from occupations in the given mode order.
    pub fn from_nus(nus: Vec<f64>) -> Self {
        let nus: Vec<f64> = nus.into_iter().map(|v| v.clamp(NU_FLOOR, 0.5)).collect();
        let energies = nus.iter().map(|&v| (-v).ln_1p() - v.ln()).collect();
        let log_norm = nus.iter().map(|&v| (-v).ln_1p()).sum();
        Self {
            nus,
            energies,
            log_norm,
        }
    }

    /// Builds the spectrum from single-particle energies in the given order.
    pub fn from_energies(energies: &[f64]) -> Self {
        Self::from_nus(energies.iter().map(|&e| 1.0 / (1.0 + e.exp())).collect())
    }

    pub fn modes(&self) -> usize {
        self.nus.len()
    }

    /// `E_1`, the entanglement energy of the dominant Schmidt vector.
    pub fn ground_energy(&self) -> f64 {
        -self.log_norm / (2.0 * PI)
    }

    /// The first entanglement gap `E_2 - E_1 = min_k e_k / 2pi`.
    pub fn gap(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min) / (2.0 * PI)
    }
}

fn sort_modes(nus: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..nus.len()).collect();
    // Largest occupation (smallest e) first.
    order.sort_by(|&i, &j| nus[j].total_cmp(&nus[i]).then(i.cmp(&j)));
    order
}

/// Occupations from the Majorana singular values (or `C` eigenvalues).
fn occupations(cm: &CorrelationMatrix) -> Result<Vec<f64>> {
    if cm.has_pairing() {
        let s = cm
            .majorana_block()
            .singular_values()
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Ok(s.into_iter().map(|s| 0.5 * (1.0 - s)).collect())
    } else {
        let z = cm
            .hopping_block()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Ok(z.into_iter().map(|z| z.min(1.0 - z)).collect())
    }
}

/// Single-particle entanglement spectrum without the mode vectors.
pub fn single_particle_spectrum(cm: &CorrelationMatrix) -> Result<SingleParticleSpectrum> {
    let nus = occupations(cm)?;
    let order = sort_modes(&nus);
    Ok(SingleParticleSpectrum::from_nus(
        order.iter().map(|&k| nus[k]).collect(),
    ))
}

/// Canonical diagonalization of the interval correlation matrix.
pub fn diagonalize(
    cm: &CorrelationMatrix,
) -> Result<(BogoliubovTransform, SingleParticleSpectrum)> {
    let n = cm.size();
    let zero = c64::new(0.0, 0.0);
    let (nus, a, b, charges) = if cm.has_pairing() {
        let svd = cm
            .majorana_block()
            .svd()
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let (u, v) = (svd.U(), svd.V());
        let s = svd.S().column_vector();
        let nus: Vec<f64> = (0..n).map(|k| 0.5 * (1.0 - s[k])).collect();
        let a = Mat::from_fn(n, n, |k, j| c64::new(0.5 * (u[(j, k)] + v[(j, k)]), 0.0));
        let b = Mat::from_fn(n, n, |k, j| c64::new(0.5 * (u[(j, k)] - v[(j, k)]), 0.0));
        (nus, a, b, None)
    } else {
        let evd = cm
            .hopping_block()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let z = evd.S().column_vector();
        let u = evd.U();
        let particle: Vec<bool> = (0..n).map(|k| z[k] <= 0.5).collect();
        let nus: Vec<f64> = (0..n)
            .map(|k| if particle[k] { z[k] } else { 1.0 - z[k] })
            .collect();
        let a = Mat::from_fn(n, n, |k, j| {
            if particle[k] {
                c64::new(u[(j, k)], 0.0)
            } else {
                zero
            }
        });
        let b = Mat::from_fn(n, n, |k, j| {
            if particle[k] {
                zero
            } else {
                c64::new(u[(j, k)], 0.0)
            }
        });
        let charges = particle.iter().map(|&p| if p { 1 } else { -1 }).collect();
        (nus, a, b, Some(charges))
    };

    for &nu in &nus {
        if !(-1e-8..=0.5 + 1e-8).contains(&nu) {
            return Err(Error::Pairing(nu));
        }
    }

    let order = sort_modes(&nus);
    let mut bt = BogoliubovTransform {
        a: Mat::from_fn(n, n, |k, j| a[(order[k], j)]),
        b: Mat::from_fn(n, n, |k, j| b[(order[k], j)]),
        charges: charges.map(|c: Vec<i32>| order.iter().map(|&k| c[k]).collect()),
    };
    bt.fix_gauge();
    let spec = SingleParticleSpectrum::from_nus(order.iter().map(|&k| nus[k]).collect());
    Ok((bt, spec))
}

/// An occupation pattern over the entanglement-mode vacuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtState {
    /// Occupied modes, sorted ascending (0-based).
    pub occupation: Vec<usize>,
    /// Entanglement energy `E = (sum_{k in J} e_k - log_norm) / 2pi`.
    pub energy: f64,
    /// Schmidt weight `lambda^2 = exp(-2 pi E)`.
    pub weight: f64,
    /// Rank by energy, starting at 0.
    pub index: usize,
}

impl SchmidtState {
    pub fn parity(&self) -> i32 {
        if self.occupation.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    sum: f64,
    positions: Vec<usize>,
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap.
        other
            .sum
            .total_cmp(&self.sum)
            .then_with(|| other.positions.cmp(&self.positions))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `count` lowest-energy Schmidt states, in non-decreasing energy order;
/// exact ties are broken by the lexicographic order of the occupied modes.
pub fn enumerate_schmidt(spec: &SingleParticleSpectrum, count: usize) -> Result<Vec<SchmidtState>> {
    let modes = spec.modes();
    if count == 0 {
        return Err(Error::InvalidArgument(
            "at least one Schmidt state must be requested".into(),
        ));
    }
    if modes < 127 && count as u128 > 1u128 << modes {
        return Err(Error::TooManyStates {
            requested: count as u128,
            available: 1u128 << modes,
        });
    }
    let e = &spec.energies;
    let mut sorted: Vec<usize> = (0..modes).collect();
    sorted.sort_by(|&i, &j| e[i].total_cmp(&e[j]).then(i.cmp(&j)));
    let sum_of = |pos: &[usize]| pos.iter().map(|&p| e[sorted[p]]).sum::<f64>();

    let mut found: Vec<Node> = vec![Node {
        sum: 0.0,
        positions: Vec::new(),
    }];
    let mut heap = BinaryHeap::new();
    if modes > 0 {
        heap.push(Node {
            sum: e[sorted[0]],
            positions: vec![0],
        });
    }
    while let Some(top) = heap.peek() {
        if found.len() >= count {
            let kth = found[count - 1].sum;
            if top.sum > kth + 2.0 * TIE_TOL * kth.abs().max(1.0) {
                break;
            }
        }
        let node = heap.pop().expect("peeked");
        let last = *node.positions.last().expect("non-empty");
        if last + 1 < modes {
            let mut grow = node.positions.clone();
            grow.push(last + 1);
            heap.push(Node {
                sum: sum_of(&grow),
                positions: grow,
            });
            let mut shift = node.positions.clone();
            *shift.last_mut().expect("non-empty") = last + 1;
            heap.push(Node {
                sum: sum_of(&shift),
                positions: shift,
            });
        }
        found.push(node);
    }

    let mut states: Vec<(f64, Vec<usize>)> = found
        .into_iter()
        .map(|node| {
            let mut occ: Vec<usize> = node.positions.iter().map(|&p| sorted[p]).collect();
            occ.sort_unstable();
            let sum: f64 = occ.iter().map(|&k| e[k]).sum();
            (sum, occ)
        })
        .collect();
    states.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    // Sums equal up to round-off count as ties.
    let mut start = 0;
    while start < states.len() {
        let mut end = start + 1;
        while end < states.len()
            && states[end].0 - states[end - 1].0 <= TIE_TOL * states[end].0.abs().max(1.0)
        {
            end += 1;
        }
        states[start..end].sort_by(|x, y| x.1.cmp(&y.1));
        start = end;
    }
    states.truncate(count);
    Ok(states
        .into_iter()
        .enumerate()
        .map(|(index, (sum, occupation))| {
            let energy = (sum - spec.log_norm) / (2.0 * PI);
            SchmidtState {
                occupation,
                energy,
                weight: (spec.log_norm - sum).exp(),
                index,
            }
        })
        .collect())
}

/// Von Neumann entropy of the interval, in nats.
pub fn entanglement_entropy(spec: &SingleParticleSpectrum) -> f64 {
    spec.nus
        .iter()
        .map(|&v| {
            let mut s = 0.0;
            if v > 0.0 {
                s -= v * v.ln();
            }
            if v < 1.0 {
                s -= (1.0 - v) * (-v).ln_1p();
            }
            s
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_half_mode_entropy() {
        let spec = SingleParticleSpectrum::from_nus(vec![0.5]);
        assert!((entanglement_entropy(&spec) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(spec.energies[0], 0.0);
    }

    #[test]
    fn pure_modes_have_no_entropy() {
        let spec = SingleParticleSpectrum::from_nus(vec![0.0, 0.0, 0.0]);
        assert!(entanglement_entropy(&spec) < 1e-290);
    }

    #[test]
    fn vacuum_is_dominant() {
        let spec = SingleParticleSpectrum::from_nus(vec![0.4, 0.1, 0.3]);
        let states = enumerate_schmidt(&spec, 1).unwrap();
        assert!(states[0].occupation.is_empty());
        assert!((states[0].energy - spec.ground_energy()).abs() < 1e-15);
    }

    #[test]
    fn too_many_states() {
        let spec = SingleParticleSpectrum::from_nus(vec![0.4, 0.1]);
        assert!(enumerate_schmidt(&spec, 4).is_ok());
        assert!(matches!(
            enumerate_schmidt(&spec, 5),
            Err(Error::TooManyStates { .. })
        ));
        assert!(enumerate_schmidt(&spec, 0).is_err());
    }

    #[test]
    fn odd_size_rejected() {
        assert!(build_correlation_matrix(&ModelParams::ising(), 3).is_err());
        assert!(build_correlation_matrix(&ModelParams::ising(), 0).is_err());
    }
}
