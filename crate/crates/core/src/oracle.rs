//! Dense Fock-space cross-check for small intervals.
//!
//! Basis state `x` has site `i` occupied when bit `i` of `x` is set, and
//! `a+_{i_1} ... a+_{i_k} |0>` with `i_1 < ... < i_k` is `+|x>`.

use faer::{c64, Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    self, BogoliubovTransform, CorrelationMatrix, SchmidtState, SingleParticleSpectrum,
};
use crate::lattice::{self, LatticeProfile};
use crate::model::ModelParams;
use crate::quadratic::{Basis, QuadraticOperator};

/// Largest interval the dense representation accepts.
pub const MAX_SITES: usize = 12;

/// Deviation above which the cross-check fails.
pub const TOLERANCE: f64 = 1e-9;

/// An operator on the `2^L`-dimensional Fock space.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub sites: usize,
    pub matrix: Mat<c64>,
}

impl DenseOperator {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> c64 {
        (0..self.dimension()).map(|i| self.matrix[(i, i)]).sum()
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::InvalidArgument(format!(
            "dense oracle supports 1..={MAX_SITES} sites, got {sites}"
        )));
    }
    Ok(())
}

fn jw_sign(x: usize, site: usize) -> f64 {
    if (x & ((1 << site) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `a_site` applied to a dense vector.
fn annihilate(site: usize, v: &[c64], out: &mut [c64], coef: c64) {
    let bit = 1 << site;
    for (x, &amp) in v.iter().enumerate() {
        if x & bit != 0 && amp != c64::new(0.0, 0.0) {
            out[x ^ bit] += coef * jw_sign(x, site) * amp;
        }
    }
}

/// `a+_site` applied to a dense vector.
fn create(site: usize, v: &[c64], out: &mut [c64], coef: c64) {
    let bit = 1 << site;
    for (x, &amp) in v.iter().enumerate() {
        if x & bit == 0 && amp != c64::new(0.0, 0.0) {
            out[x | bit] += coef * jw_sign(x, site) * amp;
        }
    }
}

/// Dense matrix of `a_site` on `sites` sites.
pub fn annihilation_matrix(site: usize, sites: usize) -> Result<DenseOperator> {
    check_sites(sites)?;
    let dim = 1 << sites;
    let mut matrix = Mat::zeros(dim, dim);
    for x in 0..dim {
        if x & (1 << site) != 0 {
            matrix[(x ^ (1 << site), x)] = c64::new(jw_sign(x, site), 0.0);
        }
    }
    Ok(DenseOperator { sites, matrix })
}

/// Dense representation of a site-basis quadratic operator.
pub fn densify(op: &QuadraticOperator) -> Result<DenseOperator> {
    let sites = op.modes();
    check_sites(sites)?;
    if op.basis() != Basis::Site {
        return Err(Error::InvalidArgument(
            "densify expects a site-basis operator".into(),
        ));
    }
    let dim = 1 << sites;
    let zero = c64::new(0.0, 0.0);
    let (p, q, r) = (op.one_body(), op.creation_pairs(), op.annihilation_pairs());
    let mut matrix = Mat::zeros(dim, dim);
    let mut basis = vec![zero; dim];
    let mut tmp = vec![zero; dim];
    let mut col = vec![zero; dim];
    for x in 0..dim {
        basis.iter_mut().for_each(|v| *v = zero);
        basis[x] = c64::new(1.0, 0.0);
        col.iter_mut().for_each(|v| *v = zero);
        col[x] += op.constant();
        for j in 0..sites {
            for i in 0..sites {
                let terms = [(p[(i, j)], 0u8), (0.5 * q[(i, j)], 1), (0.5 * r[(i, j)], 2)];
                for (coef, kind) in terms {
                    if coef == zero {
                        continue;
                    }
                    tmp.iter_mut().for_each(|v| *v = zero);
                    match kind {
                        // a+_i a_j
                        0 => {
                            annihilate(j, &basis, &mut tmp, c64::new(1.0, 0.0));
                            create(i, &tmp, &mut col, coef);
                        }
                        // a+_i a+_j
                        1 => {
                            create(j, &basis, &mut tmp, c64::new(1.0, 0.0));
                            create(i, &tmp, &mut col, coef);
                        }
                        // a_j a_i
                        _ => {
                            annihilate(i, &basis, &mut tmp, c64::new(1.0, 0.0));
                            annihilate(j, &tmp, &mut col, coef);
                        }
                    }
                }
            }
        }
        for (y, v) in col.iter().enumerate() {
            matrix[(y, x)] = *v;
        }
    }
    Ok(DenseOperator { sites, matrix })
}

/// Dense entanglement modes `c_k = sum_j A_kj a_j + B_kj a+_j`.
struct DenseModes<'a> {
    bt: &'a BogoliubovTransform,
    sites: usize,
}

impl DenseModes<'_> {
    fn lower(&self, k: usize, v: &[c64]) -> Vec<c64> {
        let mut out = vec![c64::new(0.0, 0.0); v.len()];
        for j in 0..self.sites {
            annihilate(j, v, &mut out, self.bt.a()[(k, j)]);
            create(j, v, &mut out, self.bt.b()[(k, j)]);
        }
        out
    }

    fn raise(&self, k: usize, v: &[c64]) -> Vec<c64> {
        let mut out = vec![c64::new(0.0, 0.0); v.len()];
        for j in 0..self.sites {
            create(j, v, &mut out, self.bt.a()[(k, j)].conj());
            annihilate(j, v, &mut out, self.bt.b()[(k, j)].conj());
        }
        out
    }

    /// Dense `sum_k w_k c+_k c_k`.
    fn number_form(&self, weights: &[f64]) -> Mat<c64> {
        let dim = 1 << self.sites;
        let mut m = Mat::zeros(dim, dim);
        let mut basis = vec![c64::new(0.0, 0.0); dim];
        for x in 0..dim {
            basis[x] = c64::new(1.0, 0.0);
            for (k, &w) in weights.iter().enumerate() {
                let v = self.raise(k, &self.lower(k, &basis));
                for (y, amp) in v.into_iter().enumerate() {
                    m[(y, x)] += w * amp;
                }
            }
            basis[x] = c64::new(0.0, 0.0);
        }
        m
    }
}

fn hermitian_eigen(m: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    Ok((
        (0..m.nrows()).map(|i| s[i].re).collect(),
        evd.U().to_owned(),
    ))
}

/// Dense `rho = exp(-sum_k e_k c+_k c_k) / Z`.
pub fn dense_rho(spec: &SingleParticleSpectrum, bt: &BogoliubovTransform) -> Result<DenseOperator> {
    let sites = bt.modes();
    check_sites(sites)?;
    let modes = DenseModes { bt, sites };
    let k = modes.number_form(&spec.energies);
    let (values, vectors) = hermitian_eigen(&k)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let boltzmann: Vec<f64> = values.iter().map(|v| (-(v - min)).exp()).collect();
    let z: f64 = boltzmann.iter().sum();
    let scaled = Mat::from_fn(vectors.nrows(), vectors.ncols(), |i, a| {
        vectors[(i, a)] * (boltzmann[a] / z)
    });
    let matrix = &scaled * vectors.adjoint();
    Ok(DenseOperator { sites, matrix })
}

/// Eigenvalues of a dense density matrix, largest first.
pub fn dense_weights(rho: &DenseOperator) -> Result<Vec<f64>> {
    let (mut values, _) = hermitian_eigen(&rho.matrix)?;
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `-tr(rho log rho)` from the dense spectrum.
pub fn dense_entropy(rho: &DenseOperator) -> Result<f64> {
    Ok(dense_weights(rho)?
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum())
}

/// `max |tr(rho a+_i a_j) - C_ij|` and `max |tr(rho a_i a_j) - F_ij|`.
pub fn correlation_deviation(rho: &DenseOperator, cm: &CorrelationMatrix) -> f64 {
    let sites = rho.sites;
    let dim = 1 << sites;
    let (c, f) = (cm.hopping_block(), cm.pairing_block());
    let zero = c64::new(0.0, 0.0);
    let mut worst = 0.0f64;
    let mut basis = vec![zero; dim];
    let mut tmp = vec![zero; dim];
    let mut out = vec![zero; dim];
    for i in 0..sites {
        for j in 0..sites {
            let (mut hop, mut pair) = (zero, zero);
            for x in 0..dim {
                basis[x] = c64::new(1.0, 0.0);
                for (kind, acc) in [(0, &mut hop), (1, &mut pair)] {
                    tmp.iter_mut().for_each(|v| *v = zero);
                    out.iter_mut().for_each(|v| *v = zero);
                    annihilate(j, &basis, &mut tmp, c64::new(1.0, 0.0));
                    if kind == 0 {
                        create(i, &tmp, &mut out, c64::new(1.0, 0.0));
                    } else {
                        annihilate(i, &tmp, &mut out, c64::new(1.0, 0.0));
                    }
                    // tr(rho O) = sum_x <x| rho O |x>
                    for (y, amp) in out.iter().enumerate() {
                        if *amp != zero {
                            *acc += rho.matrix[(x, y)] * amp;
                        }
                    }
                }
                basis[x] = zero;
            }
            worst = worst
                .max((hop - c[(i, j)]).norm())
                .max((pair - f[(i, j)]).norm());
        }
    }
    worst
}

/// Dense Schmidt vectors `c+_{j_1} ... c+_{j_k} |v_1>`.
pub fn dense_states(bt: &BogoliubovTransform, states: &[SchmidtState]) -> Result<Vec<Vec<c64>>> {
    let sites = bt.modes();
    check_sites(sites)?;
    let modes = DenseModes { bt, sites };
    let ones = vec![1.0; sites];
    let (values, vectors) = hermitian_eigen(&modes.number_form(&ones))?;
    let ground = (0..values.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty spectrum");
    if values[ground].abs() > 1e-10 {
        return Err(Error::Eigensolver(format!(
            "no entanglement-mode vacuum (lowest {})",
            values[ground]
        )));
    }
    let vacuum: Vec<c64> = (0..1 << sites).map(|x| vectors[(x, ground)]).collect();
    Ok(states
        .iter()
        .map(|s| {
            s.occupation
                .iter()
                .rev()
                .fold(vacuum.clone(), |v, &k| modes.raise(k, &v))
        })
        .collect())
}

/// `<bra_a| O |ket_b>` for dense vectors.
pub fn dense_table(op: &DenseOperator, vectors: &[Vec<c64>]) -> Mat<c64> {
    let dim = op.dimension();
    let v = Mat::from_fn(dim, vectors.len(), |x, a| vectors[a][x]);
    v.adjoint() * &op.matrix * &v
}

fn max_deviation(a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Deviation of one generator table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDeviation {
    pub name: String,
    /// Restricted projection vs dense.
    pub restricted: f64,
    /// Full basis change vs dense.
    pub full: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub lambda: f64,
    pub gamma: f64,
    pub sites: usize,
    pub states: usize,
    pub correlation_deviation: f64,
    pub weight_deviation: f64,
    pub eigenvector_residual: f64,
    pub entropy_deviation: f64,
    pub operators: Vec<OperatorDeviation>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Compares the free-fermion pipeline with the dense computation on an
/// interval of `sites` sites.
pub fn crosscheck(
    params: &ModelParams,
    sites: usize,
    ns: &[i32],
    count: usize,
    epsilon: f64,
) -> Result<OracleReport> {
    check_sites(sites)?;
    let cm = gaussian::build_correlation_matrix(params, sites)?;
    let (bt, spec) = gaussian::diagonalize(&cm)?;
    let count = count.min(1 << sites);
    let states = gaussian::enumerate_schmidt(&spec, count)?;

    let rho = dense_rho(&spec, &bt)?;
    let correlation = correlation_deviation(&rho, &cm);
    let weights = dense_weights(&rho)?;
    let weight_deviation = states
        .iter()
        .zip(&weights)
        .map(|(s, w)| (s.weight - w).abs())
        .fold(0.0, f64::max);
    let entropy_deviation = (dense_entropy(&rho)? - gaussian::entanglement_entropy(&spec)).abs();

    let vectors = dense_states(&bt, &states)?;
    let mut residual = 0.0f64;
    for (s, v) in states.iter().zip(&vectors) {
        let dim = v.len();
        for y in 0..dim {
            let rv: c64 = (0..dim).map(|x| rho.matrix[(y, x)] * v[x]).sum();
            residual = residual.max((rv - s.weight * v[y]).norm());
        }
    }

    let profile = LatticeProfile::new(sites / 2, epsilon)?;
    let mut operators = Vec::new();
    let mut generators: Vec<(String, QuadraticOperator)> = Vec::new();
    for &n in ns {
        generators.push((format!("H{n}"), lattice::build_hn(params, &profile, n)?));
        if n != 0 {
            generators.push((format!("L{n}"), lattice::build_ln(params, &profile, n)?));
            generators.push((format!("L{}", -n), lattice::build_ln(params, &profile, -n)?));
        }
    }
    for (name, op) in generators {
        let dense = dense_table(&densify(&op)?, &vectors);
        let restricted = lattice::schmidt_table(&op, &bt, &states)?;
        let full =
            lattice::matrix_element_table(&lattice::to_entanglement_basis(&op, &bt)?, &states);
        operators.push(OperatorDeviation {
            name,
            restricted: max_deviation(&restricted, &dense),
            full: max_deviation(&full, &dense),
        });
    }

    let max_deviation = operators
        .iter()
        .flat_map(|o| [o.restricted, o.full])
        .chain([correlation, weight_deviation, residual, entropy_deviation])
        .fold(0.0, f64::max);
    Ok(OracleReport {
        lambda: params.lambda,
        gamma: params.gamma,
        sites,
        states: count,
        correlation_deviation: correlation,
        weight_deviation,
        eigenvector_residual: residual,
        entropy_deviation,
        operators,
        max_deviation,
        passed: max_deviation <= TOLERANCE,
    })
}
