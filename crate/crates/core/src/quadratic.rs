//! Quadratic fermionic operators.
//!
//! An operator on `L` modes is stored in normal-ordered form
//!
//! ```text
//! O = E0 + sum_ij P_ij f+_i f_j + 1/2 sum_ij Q_ij f+_i f+_j + 1/2 sum_ij R_ij f_j f_i
//! ```
//!
//! with `Q` and `R` antisymmetric. `O` is Hermitian iff `P = P^dagger`,
//! `R = conj(Q)` and `E0` is real. Non-Hermitian forms are needed for the
//! lattice `L_n` generators.
//!
//! Internally the Nambu (BdG) form `O = s + 1/2 Psi^dagger M Psi` with
//! `Psi = (f_1..f_L, f+_1..f+_L)` is used for commutators and canonical basis
//! changes, since `[1/2 Psi^dagger A Psi, 1/2 Psi^dagger B Psi] = 1/2 Psi^dagger [A, B] Psi`
//! on particle-hole structured matrices.

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// Lattice fermions `a_j` obtained by Jordan–Wigner.
    Site,
    /// Entanglement modes `c_k` that diagonalize the interval correlation matrix.
    EntanglementMode,
}

#[derive(Debug, Clone)]
pub struct QuadraticOperator {
    basis: Basis,
    constant: c64,
    one_body: Mat<c64>,
    creation_pairs: Mat<c64>,
    annihilation_pairs: Mat<c64>,
}

fn zero() -> c64 {
    c64::new(0.0, 0.0)
}

impl QuadraticOperator {
    pub fn zeros(basis: Basis, modes: usize) -> Self {
        Self {
            basis,
            constant: zero(),
            one_body: Mat::zeros(modes, modes),
            creation_pairs: Mat::zeros(modes, modes),
            annihilation_pairs: Mat::zeros(modes, modes),
        }
    }

    pub fn identity(basis: Basis, modes: usize, value: f64) -> Self {
        let mut op = Self::zeros(basis, modes);
        op.constant = c64::new(value, 0.0);
        op
    }

    pub fn modes(&self) -> usize {
        self.one_body.nrows()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn constant(&self) -> c64 {
        self.constant
    }

    /// `P`: coefficient of `f+_i f_j`.
    pub fn one_body(&self) -> MatRef<'_, c64> {
        self.one_body.as_ref()
    }

    /// `Q`: coefficient of `1/2 f+_i f+_j`.
    pub fn creation_pairs(&self) -> MatRef<'_, c64> {
        self.creation_pairs.as_ref()
    }

    /// `R`: coefficient of `1/2 f_j f_i`.
    pub fn annihilation_pairs(&self) -> MatRef<'_, c64> {
        self.annihilation_pairs.as_ref()
    }

    pub fn add_constant(&mut self, value: c64) {
        self.constant += value;
    }

    /// Adds `coef * f+_i f_j` (no conjugate term).
    pub fn add_one_body(&mut self, i: usize, j: usize, coef: c64) {
        self.one_body[(i, j)] += coef;
    }

    /// Adds `coef * f+_i f_j + h.c.`.
    pub fn add_hopping(&mut self, i: usize, j: usize, coef: c64) {
        self.one_body[(i, j)] += coef;
        self.one_body[(j, i)] += coef.conj();
    }

    /// Adds `coef * f+_i f+_j`.
    pub fn add_pair_creation(&mut self, i: usize, j: usize, coef: c64) {
        assert_ne!(i, j, "pair creation on a single mode vanishes");
        self.creation_pairs[(i, j)] += coef;
        self.creation_pairs[(j, i)] -= coef;
    }

    /// Adds `coef * f_i f_j`.
    pub fn add_pair_annihilation(&mut self, i: usize, j: usize, coef: c64) {
        assert_ne!(i, j, "pair annihilation on a single mode vanishes");
        self.annihilation_pairs[(j, i)] += coef;
        self.annihilation_pairs[(i, j)] -= coef;
    }

    /// Adds `coef * f_i f_j + h.c.`.
    pub fn add_pairing(&mut self, i: usize, j: usize, coef: c64) {
        self.add_pair_annihilation(i, j, coef);
        self.add_pair_creation(j, i, coef.conj());
    }

    /// `self += scale * other`.
    pub fn axpy(&mut self, scale: c64, other: &QuadraticOperator) -> Result<()> {
        self.check_compatible(other)?;
        self.constant += scale * other.constant;
        for (dst, src) in [
            (&mut self.one_body, &other.one_body),
            (&mut self.creation_pairs, &other.creation_pairs),
            (&mut self.annihilation_pairs, &other.annihilation_pairs),
        ] {
            let n = dst.nrows();
            for j in 0..n {
                for i in 0..n {
                    let v = src[(i, j)];
                    if v != zero() {
                        dst[(i, j)] += scale * v;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn scaled(&self, scale: c64) -> Self {
        let mut out = Self::zeros(self.basis, self.modes());
        out.axpy(scale, self).expect("same shape");
        out
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis,
            constant: self.constant.conj(),
            one_body: self.one_body.adjoint().to_owned(),
            creation_pairs: Mat::from_fn(self.modes(), self.modes(), |i, j| {
                self.annihilation_pairs[(i, j)].conj()
            }),
            annihilation_pairs: Mat::from_fn(self.modes(), self.modes(), |i, j| {
                self.creation_pairs[(i, j)].conj()
            }),
        }
    }

    /// Largest deviation from the Hermiticity conditions.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.modes();
        let mut worst = self.constant.im.abs();
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.one_body[(i, j)] - self.one_body[(j, i)].conj()).norm());
                worst = worst.max(
                    (self.annihilation_pairs[(i, j)] - self.creation_pairs[(i, j)].conj()).norm(),
                );
                worst =
                    worst.max((self.creation_pairs[(i, j)] + self.creation_pairs[(j, i)]).norm());
                worst = worst.max(
                    (self.annihilation_pairs[(i, j)] + self.annihilation_pairs[(j, i)]).norm(),
                );
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest absolute coefficient difference, including the constant.
    pub fn max_abs_diff(&self, other: &QuadraticOperator) -> Result<f64> {
        self.check_compatible(other)?;
        let mut worst = (self.constant - other.constant).norm();
        for (a, b) in [
            (&self.one_body, &other.one_body),
            (&self.creation_pairs, &other.creation_pairs),
            (&self.annihilation_pairs, &other.annihilation_pairs),
        ] {
            for j in 0..a.ncols() {
                for i in 0..a.nrows() {
                    worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
                }
            }
        }
        Ok(worst)
    }

    fn check_compatible(&self, other: &QuadraticOperator) -> Result<()> {
        if self.modes() != other.modes() {
            return Err(Error::DimensionMismatch {
                expected: self.modes(),
                found: other.modes(),
            });
        }
        if self.basis != other.basis {
            return Err(Error::InvalidArgument(format!(
                "cannot combine operators in {:?} and {:?} bases",
                self.basis, other.basis
            )));
        }
        Ok(())
    }

    /// Nambu form: returns `(s, M)` with `O = s + 1/2 Psi^dagger M Psi`.
    pub fn to_bdg(&self) -> (c64, Mat<c64>) {
        let n = self.modes();
        let trace: c64 = (0..n).map(|i| self.one_body[(i, i)]).sum();
        let m = Mat::from_fn(2 * n, 2 * n, |r, c| self.bdg_entry(r, c));
        (self.constant + 0.5 * trace, m)
    }

    #[inline]
    fn bdg_entry(&self, r: usize, c: usize) -> c64 {
        let n = self.modes();
        match (r < n, c < n) {
            (true, true) => self.one_body[(r, c)],
            (true, false) => self.creation_pairs[(r, c - n)],
            (false, true) => -self.annihilation_pairs[(r - n, c)],
            (false, false) => -self.one_body[(c - n, r - n)],
        }
    }

    /// Nonzero entries of the Nambu matrix, for sparse contractions.
    pub fn bdg_entries(&self) -> Vec<(usize, usize, c64)> {
        let n = self.modes();
        let mut out = Vec::new();
        for c in 0..2 * n {
            for r in 0..2 * n {
                let v = self.bdg_entry(r, c);
                if v != zero() {
                    out.push((r, c, v));
                }
            }
        }
        out
    }

    /// Inverse of [`to_bdg`](Self::to_bdg); antisymmetrizes the pair blocks.
    pub fn from_bdg(basis: Basis, offset: c64, m: MatRef<'_, c64>) -> Self {
        let n = m.nrows() / 2;
        let trace22: c64 = (0..n).map(|i| m[(n + i, n + i)]).sum();
        Self {
            basis,
            constant: offset + 0.5 * trace22,
            one_body: Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] - m[(n + j, n + i)])),
            creation_pairs: Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, n + j)] - m[(j, n + i)])),
            annihilation_pairs: Mat::from_fn(n, n, |i, j| -0.5 * (m[(n + i, j)] - m[(n + j, i)])),
        }
    }

    /// Exact commutator `[self, other]`.
    pub fn commutator(&self, other: &QuadraticOperator) -> Result<Self> {
        self.check_compatible(other)?;
        let (_, a) = self.to_bdg();
        let (_, b) = other.to_bdg();
        let m = &a * &b - &b * &a;
        Ok(Self::from_bdg(self.basis, zero(), m.as_ref()))
    }

    /// Re-expresses the operator in new modes `Phi = W Psi`, where `W` is the
    /// `2L x 2L` block unitary `[[A, B], [conj B, conj A]]`.
    pub fn change_basis(&self, w: MatRef<'_, c64>, basis: Basis) -> Result<Self> {
        if w.nrows() != 2 * self.modes() || w.ncols() != 2 * self.modes() {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.modes(),
                found: w.nrows(),
            });
        }
        let (s, m) = self.to_bdg();
        let rotated = w * &m * w.adjoint();
        Ok(Self::from_bdg(basis, s, rotated.as_ref()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> c64 {
        c64::new(x, 0.0)
    }

    #[test]
    fn bdg_round_trip() {
        let mut op = QuadraticOperator::zeros(Basis::Site, 3);
        op.add_constant(re(0.25));
        op.add_hopping(0, 2, c64::new(0.3, -0.1));
        op.add_one_body(1, 1, re(-0.7));
        op.add_pairing(0, 1, c64::new(0.2, 0.4));
        op.add_pair_creation(1, 2, re(1.5));
        let (s, m) = op.to_bdg();
        let back = QuadraticOperator::from_bdg(Basis::Site, s, m.as_ref());
        assert!(op.max_abs_diff(&back).unwrap() < 1e-15);
    }

    #[test]
    fn adjoint_of_hermitian_is_itself() {
        let mut op = QuadraticOperator::zeros(Basis::Site, 2);
        op.add_hopping(0, 1, c64::new(0.5, 0.2));
        op.add_pairing(1, 0, c64::new(-0.3, 0.1));
        op.add_one_body(0, 0, re(2.0));
        assert!(op.is_hermitian(1e-15));
        assert!(op.max_abs_diff(&op.adjoint()).unwrap() < 1e-15);
        let mut nh = op.clone();
        nh.add_pair_creation(0, 1, re(1.0));
        assert!(!nh.is_hermitian(1e-3));
    }

    #[test]
    fn number_operators_commute() {
        let mut n0 = QuadraticOperator::zeros(Basis::Site, 2);
        n0.add_one_body(0, 0, re(1.0));
        let mut n1 = QuadraticOperator::zeros(Basis::Site, 2);
        n1.add_one_body(1, 1, re(1.0));
        let c = n0.commutator(&n1).unwrap();
        assert!(
            c.max_abs_diff(&QuadraticOperator::zeros(Basis::Site, 2))
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn hopping_number_commutator() {
        // [n_0, a+_0 a_1] = a+_0 a_1
        let mut n0 = QuadraticOperator::zeros(Basis::Site, 2);
        n0.add_one_body(0, 0, re(1.0));
        let mut hop = QuadraticOperator::zeros(Basis::Site, 2);
        hop.add_one_body(0, 1, re(1.0));
        let c = n0.commutator(&hop).unwrap();
        assert!(c.max_abs_diff(&hop).unwrap() < 1e-15);
    }

    #[test]
    fn pair_commutator_has_constant() {
        // [a_1 a_0, a+_0 a+_1] = 1 - n_0 - n_1
        let mut ann = QuadraticOperator::zeros(Basis::Site, 2);
        ann.add_pair_annihilation(1, 0, re(1.0));
        let mut cre = QuadraticOperator::zeros(Basis::Site, 2);
        cre.add_pair_creation(0, 1, re(1.0));
        let c = ann.commutator(&cre).unwrap();
        let mut expected = QuadraticOperator::identity(Basis::Site, 2, 1.0);
        expected.add_one_body(0, 0, re(-1.0));
        expected.add_one_body(1, 1, re(-1.0));
        assert!(c.max_abs_diff(&expected).unwrap() < 1e-15);
    }
}
