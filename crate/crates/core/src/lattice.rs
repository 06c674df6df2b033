//! Lattice Virasoro generators on an interval of `2N` sites and their matrix
//! elements between Schmidt states.
//!
//! Generators are weighted sums of the Hamiltonian and momentum densities,
//!
//! ```text
//! L_n = (l/pi) sum_j w(x_{j+1/2}) cos(n theta) h_{j,j+1}
//!     - i (l/pi) sum_j w(x_{j+1}) sin(n theta) p_{j,j+1,j+2}
//!     + delta_{n,0} (c/24) (1 + 4 l^2 / pi^2),
//! ```
//!
//! with `w(x) = (N^2 - x^2)/N` and `theta(x) = pi/2 - (pi/2l) log((N+x)/(N-x))`.

use std::f64::consts::PI;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{BogoliubovTransform, SchmidtState};
use crate::model::{Densities, ModelParams};
use crate::quadratic::{Basis, QuadraticOperator};

/// Geometry of the interval and the cutoff entering `l = log(2N / epsilon)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeProfile {
    pub half_length: usize,
    pub epsilon: f64,
    /// Position of bond `j` is `j - N + bond_shift`.
    pub bond_shift: f64,
    /// Position of the momentum density starting at site `j` is
    /// `j - N + momentum_shift`.
    pub momentum_shift: f64,
}

impl LatticeProfile {
    pub fn new(half_length: usize, epsilon: f64) -> Result<Self> {
        if half_length < 1 {
            return Err(Error::InvalidArgument(
                "half-length must be positive".into(),
            ));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self {
            half_length,
            epsilon,
            bond_shift: 0.0,
            momentum_shift: 0.5,
        })
    }

    /// Overrides the default position assignment of the densities.
    pub fn with_positions(mut self, bond_shift: f64, momentum_shift: f64) -> Result<Self> {
        let n = self.half_length as f64;
        let inside = |x: f64| x.abs() < n;
        if !inside(1.0 - n + bond_shift) || !inside(n - 1.0 + bond_shift) {
            return Err(Error::InvalidArgument(format!(
                "bond shift {bond_shift} moves bonds off the interval"
            )));
        }
        if !inside(1.0 - n + momentum_shift) || !inside(n - 2.0 + momentum_shift) {
            return Err(Error::InvalidArgument(format!(
                "momentum shift {momentum_shift} moves densities off the interval"
            )));
        }
        self.bond_shift = bond_shift;
        self.momentum_shift = momentum_shift;
        Ok(self)
    }

    pub fn sites(&self) -> usize {
        2 * self.half_length
    }

    pub fn l(&self) -> f64 {
        (self.sites() as f64 / self.epsilon).ln()
    }

    /// Position of bond `j` (1-based, `1..=2N-1`).
    pub fn bond_position(&self, j: usize) -> f64 {
        j as f64 - self.half_length as f64 + self.bond_shift
    }

    /// Position of the momentum density on sites `j, j+1, j+2` (1-based `j`).
    pub fn momentum_position(&self, j: usize) -> f64 {
        j as f64 - self.half_length as f64 + self.momentum_shift
    }

    /// `(N^2 - x^2) / N`.
    pub fn envelope(&self, x: f64) -> f64 {
        let n = self.half_length as f64;
        (n * n - x * x) / n
    }

    pub fn theta(&self, x: f64) -> f64 {
        let n = self.half_length as f64;
        PI / 2.0 - PI / (2.0 * self.l()) * ((n + x) / (n - x)).ln()
    }

    /// `(c/24)(1 + 4 l^2 / pi^2)`.
    pub fn zero_mode_constant(&self, central_charge: f64) -> f64 {
        let l = self.l();
        central_charge / 24.0 * (1.0 + 4.0 * l * l / (PI * PI))
    }
}

fn prepare(params: &ModelParams) -> Result<(Densities, f64)> {
    Ok((Densities::new(*params)?, params.require_central_charge()?))
}

/// `H_n = (L_n + L_{-n})/2`.
pub fn build_hn(
    params: &ModelParams,
    profile: &LatticeProfile,
    n: i32,
) -> Result<QuadraticOperator> {
    let (dens, c) = prepare(params)?;
    let scale = profile.l() / PI;
    let mut op = QuadraticOperator::zeros(Basis::Site, profile.sites());
    for j in 1..profile.sites() {
        let x = profile.bond_position(j);
        let w = scale * profile.envelope(x) * (n as f64 * profile.theta(x)).cos();
        dens.add_bond(&mut op, j - 1, c64::new(w, 0.0));
    }
    if n == 0 {
        op.add_constant(c64::new(profile.zero_mode_constant(c), 0.0));
    }
    Ok(op)
}

/// Lattice Virasoro generator `L_n`.
pub fn build_ln(
    params: &ModelParams,
    profile: &LatticeProfile,
    n: i32,
) -> Result<QuadraticOperator> {
    let mut op = build_hn(params, profile, n)?;
    if n != 0 {
        let dens = Densities::new(*params)?;
        let scale = profile.l() / PI;
        for j in 1..profile.sites() - 1 {
            let x = profile.momentum_position(j);
            let w = scale * profile.envelope(x) * (n as f64 * profile.theta(x)).sin();
            // With p = -i[h_{j-1,j}, h_{j,j+1}] this orientation makes L_n
            // lower the entanglement energy, as the CFT generator does.
            dens.add_momentum(&mut op, j - 1, c64::new(0.0, -w));
        }
    }
    Ok(op)
}

/// Rewrites a site-basis operator in the entanglement modes of `bt`.
pub fn to_entanglement_basis(
    op: &QuadraticOperator,
    bt: &BogoliubovTransform,
) -> Result<QuadraticOperator> {
    check_transform(op, bt)?;
    op.change_basis(bt.block_unitary().as_ref(), Basis::EntanglementMode)
}

fn check_transform(op: &QuadraticOperator, bt: &BogoliubovTransform) -> Result<()> {
    if op.modes() != bt.modes() {
        return Err(Error::DimensionMismatch {
            expected: bt.modes(),
            found: op.modes(),
        });
    }
    if op.basis() != Basis::Site {
        return Err(Error::InvalidArgument(
            "operator is already in the entanglement-mode basis".into(),
        ));
    }
    Ok(())
}

/// An entanglement-basis operator restricted to a subset of modes.
///
/// The constant is exact (it involves every mode); only the one-body and pair
/// coefficients are truncated to `modes`.
#[derive(Debug, Clone)]
pub struct RestrictedOperator {
    modes: Vec<usize>,
    op: QuadraticOperator,
}

impl RestrictedOperator {
    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn operator(&self) -> &QuadraticOperator {
        &self.op
    }

    fn local(&self, mode: usize) -> Option<usize> {
        self.modes.binary_search(&mode).ok()
    }
}

/// Rewrites `op` in the entanglement modes, keeping only the coefficients
/// among `modes`. Costs `O(|modes|^2 nnz + L nnz)` instead of a dense
/// `2L x 2L` rotation.
pub fn restrict_to_modes(
    op: &QuadraticOperator,
    bt: &BogoliubovTransform,
    modes: &[usize],
) -> Result<RestrictedOperator> {
    check_transform(op, bt)?;
    let l = bt.modes();
    let mut modes = modes.to_vec();
    modes.sort_unstable();
    modes.dedup();
    if let Some(&m) = modes.iter().find(|&&m| m >= l) {
        return Err(Error::IndexOutOfRange {
            index: m,
            lo: 0,
            hi: l - 1,
        });
    }
    let (a, b) = (bt.a(), bt.b());
    // Row `x` of W = [[A, B], [conj B, conj A]].
    let w = |x: usize, col: usize| -> c64 {
        match (x < l, col < l) {
            (true, true) => a[(x, col)],
            (true, false) => b[(x, col - l)],
            (false, true) => b[(x - l, col)].conj(),
            (false, false) => a[(x - l, col - l)].conj(),
        }
    };
    let s = bdg_offset(op);
    let entries = op.bdg_entries();
    let rotated = |x: usize, y: usize| -> c64 {
        entries
            .iter()
            .map(|&(r, col, v)| w(x, r) * v * w(y, col).conj())
            .sum()
    };

    let full_trace: c64 = (0..l).map(|k| rotated(l + k, l + k)).sum();
    let k = modes.len();
    let nambu = |i: usize| if i < k { modes[i] } else { l + modes[i - k] };
    let local = Mat::from_fn(2 * k, 2 * k, |i, j| rotated(nambu(i), nambu(j)));
    let local_trace: c64 = (0..k).map(|i| local[(k + i, k + i)]).sum();
    let mut restricted = QuadraticOperator::from_bdg(Basis::EntanglementMode, s, local.as_ref());
    restricted.add_constant(0.5 * (full_trace - local_trace));
    Ok(RestrictedOperator {
        modes,
        op: restricted,
    })
}

/// The scalar `s` in `O = s + 1/2 Psi^dagger M Psi`.
fn bdg_offset(op: &QuadraticOperator) -> c64 {
    let n = op.modes();
    let trace: c64 = (0..n).map(|i| op.one_body()[(i, i)]).sum();
    op.constant() + 0.5 * trace
}

/// Coefficients of a quadratic operator in entanglement modes.
pub trait ModeCoefficients {
    fn constant(&self) -> c64;
    /// Coefficient of `c+_p c_q`.
    fn one_body(&self, p: usize, q: usize) -> c64;
    /// Coefficient of `c+_p c+_q` for `p < q`.
    fn creation_pair(&self, p: usize, q: usize) -> c64;
    /// Coefficient of `c_q c_p` for `p < q`.
    fn annihilation_pair(&self, p: usize, q: usize) -> c64;
}

impl ModeCoefficients for QuadraticOperator {
    fn constant(&self) -> c64 {
        QuadraticOperator::constant(self)
    }

    fn one_body(&self, p: usize, q: usize) -> c64 {
        QuadraticOperator::one_body(self)[(p, q)]
    }

    fn creation_pair(&self, p: usize, q: usize) -> c64 {
        self.creation_pairs()[(p, q)]
    }

    fn annihilation_pair(&self, p: usize, q: usize) -> c64 {
        self.annihilation_pairs()[(p, q)]
    }
}

impl ModeCoefficients for RestrictedOperator {
    fn constant(&self) -> c64 {
        self.op.constant()
    }

    fn one_body(&self, p: usize, q: usize) -> c64 {
        let (p, q) = (
            self.local(p).expect("mode in window"),
            self.local(q).expect("mode in window"),
        );
        self.op.one_body()[(p, q)]
    }

    fn creation_pair(&self, p: usize, q: usize) -> c64 {
        let (p, q) = (
            self.local(p).expect("mode in window"),
            self.local(q).expect("mode in window"),
        );
        self.op.creation_pairs()[(p, q)]
    }

    fn annihilation_pair(&self, p: usize, q: usize) -> c64 {
        let (p, q) = (
            self.local(p).expect("mode in window"),
            self.local(q).expect("mode in window"),
        );
        self.op.annihilation_pairs()[(p, q)]
    }
}

/// Number of entries of the sorted set `set` below `mode`.
fn below(set: &[usize], mode: usize) -> usize {
    set.partition_point(|&m| m < mode)
}

fn sign(count: usize) -> f64 {
    if count.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `<bra| op |ket>` for Schmidt states `|J> = c+_{j1} ... c+_{jk} |v_1>` with
/// `j1 < ... < jk`.
pub fn matrix_element<O: ModeCoefficients + ?Sized>(
    op: &O,
    bra: &SchmidtState,
    ket: &SchmidtState,
) -> c64 {
    let (jb, jk) = (&bra.occupation, &ket.occupation);
    let only_bra: Vec<usize> = jb
        .iter()
        .copied()
        .filter(|m| jk.binary_search(m).is_err())
        .collect();
    let only_ket: Vec<usize> = jk
        .iter()
        .copied()
        .filter(|m| jb.binary_search(m).is_err())
        .collect();
    match (only_bra.as_slice(), only_ket.as_slice()) {
        ([], []) => jk
            .iter()
            .fold(op.constant(), |acc, &i| acc + op.one_body(i, i)),
        (&[p], &[q]) => {
            let without_q: Vec<usize> = jk.iter().copied().filter(|&m| m != q).collect();
            op.one_body(p, q) * sign(below(jk, q) + below(&without_q, p))
        }
        (&[p, q], []) => op.creation_pair(p, q) * sign(below(jk, q) + below(jk, p)),
        ([], &[p, q]) => {
            let without_p: Vec<usize> = jk.iter().copied().filter(|&m| m != p).collect();
            op.annihilation_pair(p, q) * sign(below(jk, p) + below(&without_p, q))
        }
        _ => c64::new(0.0, 0.0),
    }
}

/// `T[a][b] = <states[a]| op |states[b]>`.
pub fn matrix_element_table<O: ModeCoefficients + ?Sized>(
    op: &O,
    states: &[SchmidtState],
) -> Mat<c64> {
    Mat::from_fn(states.len(), states.len(), |a, b| {
        matrix_element(op, &states[a], &states[b])
    })
}

/// Union of the modes occupied in `states`.
pub fn occupied_modes(states: &[SchmidtState]) -> Vec<usize> {
    let mut modes: Vec<usize> = states
        .iter()
        .flat_map(|s| s.occupation.iter().copied())
        .collect();
    modes.sort_unstable();
    modes.dedup();
    modes
}

/// Table of a site-basis operator between `states`, via [`restrict_to_modes`].
pub fn schmidt_table(
    op: &QuadraticOperator,
    bt: &BogoliubovTransform,
    states: &[SchmidtState],
) -> Result<Mat<c64>> {
    let restricted = restrict_to_modes(op, bt, &occupied_modes(states))?;
    Ok(matrix_element_table(&restricted, states))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_is_centered() {
        let p = LatticeProfile::new(32, 0.037).unwrap();
        assert!((p.theta(0.0) - PI / 2.0).abs() < 1e-15);
        assert!(p.theta(-31.0) > p.theta(31.0));
        assert_eq!(p.bond_position(32), 0.0);
        assert_eq!(p.momentum_position(1), -30.5);
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(LatticeProfile::new(8, 0.0).is_err());
        assert!(LatticeProfile::new(8, -1.0).is_err());
        assert!(LatticeProfile::new(0, 0.1).is_err());
        assert!(LatticeProfile::new(8, 0.1)
            .unwrap()
            .with_positions(2.0, 0.5)
            .is_err());
    }

    #[test]
    fn h1_vanishes_at_center_bond() {
        let params = ModelParams::ising();
        let profile = LatticeProfile::new(4, 0.05).unwrap();
        let h1 = build_hn(&params, &profile, 1).unwrap();
        // Bond 4 (sites 4, 5 in 1-based numbering) sits at x = 0.
        assert!(h1.one_body()[(3, 4)].norm() < 1e-15);
        assert!(h1.one_body()[(2, 3)].norm() > 1e-3);
    }
}
