//! Exact boundary-CFT reference data.
//!
//! Each conformal tower is a sum of Virasoro modules over primaries. Within a
//! module, descendants are the creation words of [`verma::level_words`],
//! orthogonalized level by level in that order; null combinations are
//! dropped, which leaves the irreducible module. Matrix elements of `L_n`
//! between the normalized states are exact numbers `q sqrt(r)`.

pub mod exact;
pub mod verma;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use exact::ExactValue;
pub use verma::{gram_matrix, level_words, VermaModule, Word};

use crate::error::{Error, Result};
use crate::model::Universality;

/// Levels are computed up to this bound.
pub const MAX_LEVEL: u32 = 6;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A primary field and its symmetry labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub label: String,
    pub weight: (i64, i64),
    /// U(1) charge, when the theory has one.
    pub charge: Option<i32>,
    /// Z2 parity of the sector.
    pub parity: i32,
}

impl Sector {
    fn weight(&self) -> BigRational {
        q(self.weight.0, self.weight.1)
    }
}

/// A normalized descendant `(1/sqrt(norm)) sum_w coef_w w |h>`.
#[derive(Debug, Clone)]
pub struct TowerState {
    pub sector: usize,
    pub level: u32,
    pub combination: Vec<(Word, BigRational)>,
    /// Squared norm of `combination`.
    pub norm: BigRational,
}

impl TowerState {
    /// Human-readable label of the leading word, such as `L-1 L-2 1`.
    pub fn describe(&self, tower: &TowerSpectrum) -> String {
        let mut s: String = self.combination[0]
            .0
            .iter()
            .map(|m| format!("L{m} "))
            .collect();
        s.push_str(&tower.sectors[self.sector].label);
        s
    }
}

/// The low-lying states of a boundary CFT, ordered by dimension.
#[derive(Debug, Clone)]
pub struct TowerSpectrum {
    pub class: Universality,
    pub central_charge: (i64, i64),
    pub sectors: Vec<Sector>,
    pub states: Vec<TowerState>,
    modules: Vec<VermaModule>,
}

impl TowerSpectrum {
    /// Ising CFT with Neumann boundary conditions: towers of `1` and `eps`.
    pub fn ising() -> Self {
        let sectors = vec![
            Sector {
                label: "1".into(),
                weight: (0, 1),
                charge: None,
                parity: 1,
            },
            Sector {
                label: "eps".into(),
                weight: (1, 2),
                charge: None,
                parity: -1,
            },
        ];
        Self::build(Universality::Ising, (1, 2), sectors)
    }

    /// Compact boson at radius 1 with Dirichlet boundary conditions.
    ///
    /// The charge-`Q` sector has weight `Q^2/2`; the neutral sector splits
    /// into Virasoro modules over `h = 0, 1, 4`.
    pub fn boson() -> Self {
        let vertex = |charge: i32| Sector {
            label: match charge {
                1 => "e^{i phi}".to_string(),
                -1 => "e^{-i phi}".to_string(),
                q => format!("e^{{{q}i phi}}"),
            },
            weight: ((charge * charge) as i64, 2),
            charge: Some(charge),
            parity: if charge % 2 == 0 { 1 } else { -1 },
        };
        let neutral = |label: &str, h: i64| Sector {
            label: label.into(),
            weight: (h, 1),
            charge: Some(0),
            parity: 1,
        };
        let sectors = vec![
            neutral("1", 0),
            vertex(1),
            vertex(-1),
            neutral("i dphi", 1),
            vertex(2),
            vertex(-2),
            neutral("W(4)", 4),
            vertex(3),
            vertex(-3),
        ];
        Self::build(Universality::Boson, (1, 1), sectors)
    }

    pub fn for_class(class: Universality) -> Self {
        match class {
            Universality::Ising => Self::ising(),
            Universality::Boson => Self::boson(),
        }
    }

    fn build(class: Universality, c: (i64, i64), sectors: Vec<Sector>) -> Self {
        let modules: Vec<VermaModule> = sectors
            .iter()
            .map(|s| VermaModule::new(s.weight(), q(c.0, c.1)))
            .collect();
        let mut states = Vec::new();
        for (index, module) in modules.iter().enumerate() {
            for level in 0..=MAX_LEVEL {
                states.extend(orthogonal_level(module, index, level));
            }
        }
        states.sort_by(|a, b| {
            let da = sectors[a.sector].weight() + BigRational::from_integer(a.level.into());
            let db = sectors[b.sector].weight() + BigRational::from_integer(b.level.into());
            da.cmp(&db).then(a.sector.cmp(&b.sector))
        });
        Self {
            class,
            central_charge: c,
            sectors,
            states,
            modules,
        }
    }

    pub fn dimension(&self, index: usize) -> BigRational {
        let s = &self.states[index];
        self.sectors[s.sector].weight() + BigRational::from_integer(s.level.into())
    }

    pub fn dimensions(&self, count: usize) -> Vec<BigRational> {
        (0..count.min(self.states.len()))
            .map(|i| self.dimension(i))
            .collect()
    }

    fn check_count(&self, count: usize) -> Result<()> {
        // States above the highest complete level may be missing.
        let complete = self
            .sectors
            .iter()
            .map(|s| s.weight())
            .fold(None::<BigRational>, |acc, w| {
                Some(acc.map_or(w.clone(), |a| a.min(w)))
            })
            .unwrap_or_else(BigRational::zero)
            + BigRational::from_integer(MAX_LEVEL.into());
        if count == 0 || count > self.states.len() || self.dimension(count - 1) > complete {
            return Err(Error::InvalidArgument(format!(
                "{count} states exceed the computed window of the tower"
            )));
        }
        Ok(())
    }

    /// Unnormalized `<u_i| L_{ops...} |u_j>`; zero across sectors.
    fn raw(&self, i: usize, ops: &[i32], j: usize) -> BigRational {
        let (a, b) = (&self.states[i], &self.states[j]);
        if a.sector != b.sector {
            return BigRational::zero();
        }
        self.modules[a.sector].sandwich(&a.combination, ops, &b.combination)
    }

    /// Exact matrix of `L_n` on the `count` lowest states.
    pub fn ln_table(&self, n: i32, count: usize) -> Result<ExactTable> {
        self.check_count(count)?;
        let mut entries = vec![vec![ExactValue::zero(); count]; count];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let v = self.raw(i, &[n], j);
                if !v.is_zero() {
                    let norm = &self.states[i].norm * &self.states[j].norm;
                    *entry = ExactValue::inverse_sqrt(&norm)?.scale(&v);
                }
            }
        }
        Ok(ExactTable { entries })
    }

    /// Exact matrix of `H_n = (L_n + L_{-n})/2`.
    pub fn hn_table(&self, n: i32, count: usize) -> Result<ExactTable> {
        let (a, b) = (self.ln_table(n, count)?, self.ln_table(-n, count)?);
        let half = q(1, 2);
        let mut entries = a.entries;
        for (row, other) in entries.iter_mut().zip(b.entries) {
            for (x, y) in row.iter_mut().zip(other) {
                *x = x.checked_add(&y)?.scale(&half);
            }
        }
        Ok(ExactTable { entries })
    }

    /// Checks `[L_n, L_m] = (n-m) L_{n+m} + (c/12) n (n^2-1) delta_{n+m}`
    /// between every pair of the `count` lowest states, in exact arithmetic.
    pub fn virasoro_identity_holds(&self, n: i32, m: i32, count: usize) -> Result<bool> {
        self.check_count(count)?;
        let c = q(self.central_charge.0, self.central_charge.1);
        for i in 0..count {
            for j in 0..count {
                let lhs = self.raw(i, &[n, m], j) - self.raw(i, &[m, n], j);
                let mut rhs = BigRational::from_integer((n - m).into()) * self.raw(i, &[n + m], j);
                if n + m == 0 {
                    let nn = BigInt::from(n);
                    rhs += &c
                        * BigRational::new(&nn * &nn * &nn - &nn, BigInt::from(12))
                        * self.raw(i, &[], j);
                }
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Orthogonal basis of one level of a module, by Gram-Schmidt over
/// [`level_words`] in order; null directions are dropped.
fn orthogonal_level(module: &VermaModule, sector: usize, level: u32) -> Vec<TowerState> {
    let words = level_words(level);
    let inner = |a: &[(Word, BigRational)], b: &[(Word, BigRational)]| module.sandwich(a, &[], b);
    let mut basis: Vec<TowerState> = Vec::new();
    for word in words {
        let mut combination = vec![(word, BigRational::one())];
        for prev in &basis {
            let overlap = inner(&prev.combination, &combination);
            if overlap.is_zero() {
                continue;
            }
            let factor = overlap / &prev.norm;
            for (w, coef) in &prev.combination {
                let delta = -(&factor * coef);
                match combination.iter_mut().find(|(x, _)| x == w) {
                    Some((_, c)) => *c += delta,
                    None => combination.push((w.clone(), delta)),
                }
            }
            combination.retain(|(_, c)| !c.is_zero());
        }
        let norm = inner(&combination, &combination);
        if norm.is_positive() {
            basis.push(TowerState {
                sector,
                level,
                combination,
                norm,
            });
        }
    }
    basis
}

/// A square matrix of exact values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactTable {
    pub entries: Vec<Vec<ExactValue>>,
}

impl ExactTable {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactValue {
        &self.entries[i][j]
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(ExactValue::to_f64).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        Self {
            entries: (0..n)
                .map(|i| (0..n).map(|j| self.entries[j][i].clone()).collect())
                .collect(),
        }
    }

    /// Builds a table from rationals `(numerator, denominator)`.
    pub fn from_ratios(rows: &[Vec<(i64, i64)>]) -> Self {
        Self {
            entries: rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|&(n, d)| ExactValue::from_ratio(n, d))
                        .collect()
                })
                .collect(),
        }
    }
}
