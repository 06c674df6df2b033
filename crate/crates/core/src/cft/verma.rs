//! Inner products in a Verma module of the Virasoro algebra.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A word `L_{a_1} L_{a_2} ... L_{a_k}`, applied right to left.
pub type Word = Vec<i32>;

/// Verma module over a primary of weight `h` at central charge `c`.
#[derive(Debug)]
pub struct VermaModule {
    h: BigRational,
    c: BigRational,
    memo: Mutex<HashMap<Word, BigRational>>,
}

impl Clone for VermaModule {
    fn clone(&self) -> Self {
        Self::new(self.h.clone(), self.c.clone())
    }
}

impl VermaModule {
    pub fn new(h: BigRational, c: BigRational) -> Self {
        Self {
            h,
            c,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn weight(&self) -> &BigRational {
        &self.h
    }

    pub fn central_charge(&self) -> &BigRational {
        &self.c
    }

    /// `<h| L_{a_1} ... L_{a_k} |h>`.
    pub fn expectation(&self, word: &[i32]) -> BigRational {
        if let Some(v) = self.memo.lock().expect("memo lock").get(word) {
            return v.clone();
        }
        let v = self.compute(word);
        self.memo
            .lock()
            .expect("memo lock")
            .insert(word.to_vec(), v.clone());
        v
    }

    fn compute(&self, word: &[i32]) -> BigRational {
        let Some(&last) = word.last() else {
            return BigRational::one();
        };
        if word[0] < 0 || last > 0 {
            return BigRational::zero();
        }
        if word.iter().sum::<i32>() != 0 {
            return BigRational::zero();
        }
        if last == 0 {
            return &self.h * self.expectation(&word[..word.len() - 1]);
        }
        // Rightmost non-negative mode; everything to its right lowers.
        let Some(p) = word.iter().rposition(|&a| a >= 0) else {
            return BigRational::zero();
        };
        let (n, m) = (word[p], word[p + 1]);
        let mut swapped = word.to_vec();
        swapped.swap(p, p + 1);
        let mut total = self.expectation(&swapped);

        let mut merged: Word = word[..p].to_vec();
        merged.push(n + m);
        merged.extend_from_slice(&word[p + 2..]);
        total += BigRational::from_integer(BigInt::from(n - m)) * self.expectation(&merged);

        if n + m == 0 {
            let mut rest: Word = word[..p].to_vec();
            rest.extend_from_slice(&word[p + 2..]);
            let n = BigInt::from(n);
            let anomaly = &self.c * BigRational::new(&n * &n * &n - &n, BigInt::from(12));
            total += anomaly * self.expectation(&rest);
        }
        total
    }

    /// `<u| L_n |v>` for descendants given as combinations of creation words.
    pub fn matrix_element(
        &self,
        bra: &[(Word, BigRational)],
        n: i32,
        ket: &[(Word, BigRational)],
    ) -> BigRational {
        self.sandwich(bra, &[n], ket)
    }

    /// `<u| L_{ops[0]} L_{ops[1]} ... |v>`.
    pub fn sandwich(
        &self,
        bra: &[(Word, BigRational)],
        ops: &[i32],
        ket: &[(Word, BigRational)],
    ) -> BigRational {
        let mut total = BigRational::zero();
        for (wb, cb) in bra {
            for (wk, ck) in ket {
                let mut word = adjoint(wb);
                word.extend_from_slice(ops);
                word.extend_from_slice(wk);
                let v = self.expectation(&word);
                if !v.is_zero() {
                    total += cb * ck * v;
                }
            }
        }
        total
    }
}

/// Adjoint of a word: reversed order and negated modes.
pub fn adjoint(word: &[i32]) -> Word {
    word.iter().rev().map(|&a| -a).collect()
}

/// Creation words `L_{-m_1} ... L_{-m_k}` at `level`, with `m_1 <= ... <= m_k`,
/// in lexicographic order of `(m_1, ..., m_k)`.
pub fn level_words(level: u32) -> Vec<Word> {
    fn rec(rest: u32, min: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for m in min..=rest {
            if m == rest || rest - m >= m {
                prefix.push(m);
                rec(rest - m, m, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut parts = Vec::new();
    rec(level, 1, &mut Vec::new(), &mut parts);
    parts.sort();
    parts
        .into_iter()
        .map(|p| p.into_iter().map(|m| -(m as i32)).collect())
        .collect()
}

/// Gram matrix of [`level_words`] at `level`.
pub fn gram_matrix(h: &BigRational, c: &BigRational, level: u32) -> Vec<Vec<BigRational>> {
    let module = VermaModule::new(h.clone(), c.clone());
    let words = level_words(level);
    words
        .iter()
        .map(|a| {
            words
                .iter()
                .map(|b| {
                    let mut w = adjoint(a);
                    w.extend_from_slice(b);
                    module.expectation(&w)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn words_by_level() {
        assert_eq!(level_words(0), vec![Vec::<i32>::new()]);
        assert_eq!(
            level_words(3),
            vec![vec![-1, -1, -1], vec![-1, -2], vec![-3]]
        );
        assert_eq!(level_words(6).len(), 11);
    }

    #[test]
    fn level_one_norm() {
        let g = gram_matrix(&q(1, 2), &q(1, 2), 1);
        assert_eq!(g, vec![vec![q(1, 1)]]);
        let g = gram_matrix(&q(0, 1), &q(1, 2), 1);
        assert_eq!(g, vec![vec![q(0, 1)]]);
    }

    #[test]
    fn stress_tensor_norm() {
        let g = gram_matrix(&q(0, 1), &q(1, 2), 2);
        assert_eq!(g[1][1], q(1, 4));
    }

    #[test]
    fn kac_determinant_level_two() {
        // det = 32 h (h - h_{1,2})(h - h_{2,1}); vanishes at h = 1/2, c = 1/2.
        let g = gram_matrix(&q(1, 2), &q(1, 2), 2);
        let det = &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0];
        assert!(det.is_zero());
    }
}
