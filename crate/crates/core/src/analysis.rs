//! Extrapolation of the cutoff, lattice-to-CFT state matching and
//! finite-size corrections of the generator tables.

use std::collections::VecDeque;
use std::f64::consts::PI;

use faer::{c64, Mat, MatRef, Side};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cft::{ExactTable, TowerSpectrum};
use crate::error::{Error, Result};
use crate::gaussian::{BogoliubovTransform, SchmidtState};

/// Ordinary least squares `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::SingularFit("need at least two points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return Err(Error::SingularFit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Cutoff from `1/Delta(2N) = slope log(2N) + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonFit {
    pub sizes: Vec<usize>,
    /// First entanglement gaps `E_2 - E_1`.
    pub gaps: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub epsilon: f64,
    /// `1/Delta - fit` at each size.
    pub residuals: Vec<f64>,
}

pub fn fit_epsilon(sizes: &[usize], gaps: &[f64]) -> Result<EpsilonFit> {
    if sizes.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "the fit needs at least 3 sizes, got {}",
            sizes.len()
        )));
    }
    if let Some(g) = gaps.iter().find(|&&g| !(g > 0.0 && g.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "gaps must be positive, got {g}"
        )));
    }
    let x: Vec<f64> = sizes.iter().map(|&s| (s as f64).ln()).collect();
    let y: Vec<f64> = gaps.iter().map(|g| 1.0 / g).collect();
    let fit = linear_fit(&x, &y)?;
    if fit.slope <= 0.0 {
        return Err(Error::SingularFit(format!(
            "inverse gap does not grow with size (slope {})",
            fit.slope
        )));
    }
    Ok(EpsilonFit {
        sizes: sizes.to_vec(),
        gaps: gaps.to_vec(),
        slope: fit.slope,
        intercept: fit.intercept,
        epsilon: (-fit.intercept / fit.slope).exp(),
        residuals: x
            .iter()
            .zip(&y)
            .map(|(a, b)| b - (fit.slope * a + fit.intercept))
            .collect(),
    })
}

/// `h_a = (2l/pi)(E_a - E_1)`, with `E_1` the first entry.
pub fn rescale_spectrum(states: &[SchmidtState], l: f64) -> Vec<f64> {
    let Some(first) = states.first() else {
        return Vec::new();
    };
    states
        .iter()
        .map(|s| 2.0 * l / PI * (s.energy - first.energy))
        .collect()
}

/// Central charge from `S = (c/3) log(2N) + const`.
pub fn fit_central_charge(sizes: &[usize], entropies: &[f64]) -> Result<f64> {
    let x: Vec<f64> = sizes.iter().map(|&s| (s as f64).ln()).collect();
    Ok(3.0 * linear_fit(&x, entropies)?.slope)
}

/// `(-1)^{|J|}`.
pub fn z2_parity(state: &SchmidtState) -> i32 {
    state.parity()
}

/// U(1) charge of a Schmidt state relative to the dominant one.
pub fn u1_charge(state: &SchmidtState, bt: &BogoliubovTransform) -> Result<i32> {
    let charges = bt.charges().ok_or(Error::ChargeUndefined)?;
    Ok(state.occupation.iter().map(|&k| charges[k]).sum())
}

/// Symmetry labels `(u1, parity)`; the charge is `None` when undefined.
pub fn symmetry_charges(state: &SchmidtState, bt: &BogoliubovTransform) -> (Option<i32>, i32) {
    (u1_charge(state, bt).ok(), z2_parity(state))
}

/// Quantum numbers of a lattice Schmidt state used for matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeLevel {
    pub dimension: f64,
    pub charge: Option<i32>,
    pub parity: i32,
}

pub fn lattice_levels(
    states: &[SchmidtState],
    bt: &BogoliubovTransform,
    l: f64,
) -> Vec<LatticeLevel> {
    rescale_spectrum(states, l)
        .into_iter()
        .zip(states)
        .map(|(dimension, s)| {
            let (charge, parity) = symmetry_charges(s, bt);
            LatticeLevel {
                dimension,
                charge,
                parity,
            }
        })
        .collect()
}

/// A lattice table used to orient degenerate lattice states, with the CFT
/// table it should reproduce.
#[derive(Debug, Clone, Copy)]
pub struct MatchGuide<'a> {
    /// Table over all lattice candidates.
    pub lattice: MatRef<'a, c64>,
    /// Table over the CFT window.
    pub cft: &'a ExactTable,
}

/// For each CFT state, the combination of lattice Schmidt states assigned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub vectors: Vec<Vec<c64>>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Lattice index carrying most of the weight of CFT state `i`.
    pub fn dominant(&self, i: usize) -> usize {
        let v = &self.vectors[i];
        (0..v.len())
            .max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
            .unwrap_or(0)
    }

    /// `P^dagger T P` on the matched window.
    pub fn project(&self, table: MatRef<'_, c64>) -> Mat<c64> {
        let k = self.vectors.len();
        Mat::from_fn(k, k, |i, j| {
            let (u, v) = (&self.vectors[i], &self.vectors[j]);
            let mut acc = c64::new(0.0, 0.0);
            for (a, ua) in u.iter().enumerate() {
                if *ua == c64::new(0.0, 0.0) {
                    continue;
                }
                for (b, vb) in v.iter().enumerate() {
                    if *vb != c64::new(0.0, 0.0) {
                        acc += ua.conj() * table[(a, b)] * vb;
                    }
                }
            }
            acc
        })
    }
}

/// Dimensions closer than this are treated as one degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-6;

struct Candidate {
    level: LatticeLevel,
    vector: Vec<c64>,
}

fn compatible(level: &LatticeLevel, charge: Option<i32>, parity: i32) -> bool {
    level.parity == parity && (level.charge.is_none() || charge.is_none() || level.charge == charge)
}

/// Assigns lattice states to the `count` lowest CFT states by dimension,
/// U(1) charge and Z2 parity, within `tolerance` in dimension.
///
/// Exactly degenerate lattice states with equal quantum numbers are rotated
/// into the combination whose `guides` rows best reproduce the non-zero
/// pattern of the CFT rows of already-matched states.
pub fn match_states(
    lattice: &[LatticeLevel],
    tower: &TowerSpectrum,
    count: usize,
    tolerance: f64,
    guides: &[MatchGuide<'_>],
) -> Result<Matching> {
    let n = lattice.len();
    for g in guides {
        if g.lattice.nrows() != n || g.cft.size() < count {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.lattice.nrows(),
            });
        }
    }
    let mut pool: Vec<Candidate> = lattice
        .iter()
        .enumerate()
        .map(|(i, level)| {
            let mut vector = vec![c64::new(0.0, 0.0); n];
            vector[i] = c64::new(1.0, 0.0);
            Candidate {
                level: *level,
                vector,
            }
        })
        .collect();
    let mut vectors: Vec<Vec<c64>> = Vec::with_capacity(count);

    for i in 0..count {
        let target = tower.dimension(i).to_f64().unwrap_or(f64::NAN);
        let sector = &tower.sectors[tower.states[i].sector];
        let best = pool
            .iter()
            .enumerate()
            .filter(|(_, c)| compatible(&c.level, sector.charge, sector.parity))
            .min_by(|(_, a), (_, b)| {
                (a.level.dimension - target)
                    .abs()
                    .total_cmp(&(b.level.dimension - target).abs())
            })
            .map(|(k, _)| k);
        let Some(best) = best.filter(|&k| (pool[k].level.dimension - target).abs() <= tolerance)
        else {
            return Err(Error::Unmatched {
                index: i,
                dimension: target,
                tolerance,
            });
        };
        let anchor = pool[best].level;
        let cluster: Vec<usize> = pool
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                c.level.charge == anchor.charge
                    && c.level.parity == anchor.parity
                    && (c.level.dimension - anchor.dimension).abs() <= DEGENERACY_TOL
            })
            .map(|(k, _)| k)
            .collect();

        if cluster.len() == 1 {
            vectors.push(pool.remove(best).vector);
            continue;
        }

        let m = cluster.len();
        let mut gram = Mat::<c64>::zeros(m, m);
        for guide in guides {
            for (j, matched) in vectors.iter().enumerate() {
                let sign = if guide.cft.get(i, j).is_zero() {
                    -1.0
                } else {
                    1.0
                };
                let row: Vec<c64> = cluster
                    .iter()
                    .map(|&k| {
                        let u = &pool[k].vector;
                        let mut acc = c64::new(0.0, 0.0);
                        for a in 0..n {
                            if u[a] == c64::new(0.0, 0.0) {
                                continue;
                            }
                            for b in 0..n {
                                acc += u[a].conj() * guide.lattice[(a, b)] * matched[b];
                            }
                        }
                        acc
                    })
                    .collect();
                for x in 0..m {
                    for y in 0..m {
                        gram[(x, y)] += sign * row[x] * row[y].conj();
                    }
                }
            }
        }
        let coefficients: Vec<c64> = if gram.norm_l2() == 0.0 {
            (0..m)
                .map(|x| c64::new(if x == 0 { 1.0 } else { 0.0 }, 0.0))
                .collect()
        } else {
            let evd = gram
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
            let u = evd.U();
            (0..m).map(|x| u[(x, m - 1)].conj()).collect()
        };
        let combine = |coef: &[c64]| -> Vec<c64> {
            let mut v = vec![c64::new(0.0, 0.0); n];
            for (x, &k) in cluster.iter().enumerate() {
                for a in 0..n {
                    v[a] += coef[x] * pool[k].vector[a];
                }
            }
            v
        };
        let chosen = combine(&coefficients);

        // The rest of the cluster stays available as its orthogonal complement.
        let mut rest: Vec<Vec<c64>> = Vec::new();
        for &k in &cluster {
            let mut v = pool[k].vector.clone();
            for basis in std::iter::once(&chosen).chain(rest.iter()) {
                let overlap: c64 = basis.iter().zip(&v).map(|(b, x)| b.conj() * x).sum();
                for (x, b) in v.iter_mut().zip(basis) {
                    *x -= overlap * b;
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                rest.push(v.into_iter().map(|x| x / norm).collect());
            }
            if rest.len() == m - 1 {
                break;
            }
        }
        let level = pool[best].level;
        let mut removed = cluster.clone();
        removed.sort_unstable_by(|a, b| b.cmp(a));
        for k in removed {
            pool.remove(k);
        }
        for vector in rest {
            pool.push(Candidate { level, vector });
        }
        vectors.push(chosen);
    }
    Ok(Matching { vectors })
}

/// Lattice vs CFT table for one generator.
#[derive(Debug, Clone)]
pub struct ComparisonTable {
    pub n: i32,
    pub lattice: Mat<c64>,
    pub cft: Vec<Vec<f64>>,
    /// Per-state phases `D` applied as `D^dagger T D`.
    pub gauge: Vec<c64>,
    /// `D^dagger T D`.
    pub aligned: Mat<c64>,
    /// `T - C` before alignment.
    pub raw_corrections: Mat<c64>,
    /// `D^dagger T D - C`.
    pub corrections: Mat<c64>,
}

impl ComparisonTable {
    pub fn max_abs_correction(&self) -> f64 {
        max_abs(self.corrections.as_ref())
    }

    pub fn max_abs_raw_correction(&self) -> f64 {
        max_abs(self.raw_corrections.as_ref())
    }
}

fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

fn conjugate_by(t: MatRef<'_, c64>, phases: &[c64]) -> Mat<c64> {
    Mat::from_fn(t.nrows(), t.ncols(), |a, b| {
        phases[a].conj() * t[(a, b)] * phases[b]
    })
}

/// Diagonal phases minimizing `sum_t || D^dagger T_t D - C_t ||_F^2` jointly
/// over all tables.
pub fn align_gauge(tables: &[(MatRef<'_, c64>, &[Vec<f64>])]) -> Result<Vec<c64>> {
    let Some(&(first, _)) = tables.first() else {
        return Ok(Vec::new());
    };
    let k = first.nrows();
    for (t, c) in tables {
        if t.nrows() != k || t.ncols() != k || c.len() != k || c.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: t.nrows(),
            });
        }
    }
    // Spanning-forest initialization along non-zero CFT entries.
    let mut phase: Vec<Option<f64>> = vec![None; k];
    for root in 0..k {
        if phase[root].is_some() {
            continue;
        }
        phase[root] = Some(0.0);
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for b in 0..k {
                if phase[b].is_some() {
                    continue;
                }
                let link = tables
                    .iter()
                    .map(|(t, c)| (t[(a, b)], c[a][b]))
                    .filter(|(t, c)| *c != 0.0 && t.norm() > 0.0)
                    .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()));
                if let Some((t, c)) = link {
                    // Make e^{-i phi_a} t e^{i phi_b} point along c.
                    let target = if c > 0.0 { 0.0 } else { PI };
                    phase[b] = Some(phase[a].expect("visited") + target - t.arg());
                    queue.push_back(b);
                }
            }
        }
    }
    let mut phi: Vec<f64> = phase.into_iter().map(|p| p.unwrap_or(0.0)).collect();

    for _ in 0..500 {
        let mut change = 0.0f64;
        for a in 0..k {
            let mut z = c64::new(0.0, 0.0);
            for (t, c) in tables {
                for b in 0..k {
                    if b == a {
                        continue;
                    }
                    let eb = c64::from_polar(1.0, phi[b]);
                    z += t[(a, b)] * eb * c[a][b];
                    z += (eb.conj() * t[(b, a)] * c[b][a]).conj();
                }
            }
            if z.norm() > 0.0 {
                let new = z.arg();
                let delta = (new - phi[a] + PI).rem_euclid(2.0 * PI) - PI;
                change = change.max(delta.abs());
                phi[a] = new;
            }
        }
        if change < 1e-14 {
            break;
        }
    }
    // Fix the global phase on the first state.
    let base = phi[0];
    Ok(phi
        .into_iter()
        .map(|p| c64::from_polar(1.0, p - base))
        .collect())
}

/// Compares a matched lattice table with the CFT table under `gauge`.
pub fn finite_size_table(
    n: i32,
    lattice: MatRef<'_, c64>,
    cft: &ExactTable,
    gauge: &[c64],
) -> Result<ComparisonTable> {
    let k = lattice.nrows();
    if cft.size() != k || gauge.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: cft.size(),
        });
    }
    let c = cft.to_f64();
    let target = Mat::from_fn(k, k, |a, b| c64::new(c[a][b], 0.0));
    let aligned = conjugate_by(lattice, gauge);
    Ok(ComparisonTable {
        n,
        lattice: lattice.to_owned(),
        raw_corrections: lattice - &target,
        corrections: &aligned - &target,
        aligned,
        gauge: gauge.to_vec(),
        cft: c,
    })
}

/// Aligns the gauge jointly over several tables and compares each.
pub fn compare_tables(
    tables: &[(i32, MatRef<'_, c64>, &ExactTable)],
) -> Result<Vec<ComparisonTable>> {
    let cft: Vec<Vec<Vec<f64>>> = tables.iter().map(|(_, _, c)| c.to_f64()).collect();
    let inputs: Vec<(MatRef<'_, c64>, &[Vec<f64>])> = tables
        .iter()
        .zip(&cft)
        .map(|((_, t, _), c)| (*t, c.as_slice()))
        .collect();
    let gauge = align_gauge(&inputs)?;
    tables
        .iter()
        .map(|(n, t, c)| finite_size_table(*n, *t, c, &gauge))
        .collect()
}
