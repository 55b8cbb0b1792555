use serde::Serialize;

use crate::config::Tolerances;
use crate::dynamics::BoundaryMap;
use crate::error::{Error, Result};
use crate::geometry::{CircleArc, CirclePoint};
use crate::net::nearest_index;
use crate::real::Real;

/// Square boolean matrix stored as bit rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BoolMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BoolMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut m = Self::new(n);
        for j in 0..n {
            for k in 0..n {
                m.set(j, k);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, j: usize, k: usize) {
        self.bits[j * self.words + k / 64] |= 1 << (k % 64);
    }

    pub fn get(&self, j: usize, k: usize) -> bool {
        self.bits[j * self.words + k / 64] >> (k % 64) & 1 == 1
    }

    fn row(&self, j: usize) -> &[u64] {
        &self.bits[j * self.words..(j + 1) * self.words]
    }

    pub fn row_indices(&self, j: usize) -> Vec<usize> {
        (0..self.n).filter(|&k| self.get(j, k)).collect()
    }

    /// Boolean product `self · other`.
    pub fn mul(&self, other: &BoolMatrix) -> BoolMatrix {
        let mut out = BoolMatrix::new(self.n);
        for j in 0..self.n {
            let dst = j * out.words;
            for k in 0..self.n {
                if self.get(j, k) {
                    for (w, &b) in other.row(k).iter().enumerate() {
                        out.bits[dst + w] |= b;
                    }
                }
            }
        }
        out
    }

    pub fn is_full(&self) -> bool {
        (0..self.n).all(|j| (0..self.n).all(|k| self.get(j, k)))
    }
}

/// One-step transitions between the cells of a partition.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub matrix: BoolMatrix,
    /// For each cell, the image arc as a `[first, last]` cyclic block of
    /// cell indices.
    pub blocks: Vec<(usize, usize)>,
}

/// Builds the transition matrix of `map` on the partition with sorted
/// endpoint set `w`. Every image endpoint must land on `w`.
pub fn transition_matrix<R: Real>(
    map: &BoundaryMap<R>,
    w: &[CirclePoint<R>],
    tol: &Tolerances,
) -> Result<TransitionMatrix> {
    let n = w.len();
    let mut matrix = BoolMatrix::new(n);
    let mut blocks = Vec::with_capacity(n);
    for j in 0..n {
        let cell = CircleArc::new(w[j].clone(), w[(j + 1) % n].clone());
        let b = map.branch_index(&cell.midpoint(), 0.0);
        let t = map.generator(map.branches[b].generator);
        let ends = [t.apply_boundary(&cell.left), t.apply_boundary(&cell.right)];
        let mut idx = [0usize; 2];
        for (slot, e) in idx.iter_mut().zip(ends.iter()) {
            *slot = nearest_index(w, e, tol.point).ok_or(Error::NotMarkovCell {
                cell: j,
                endpoint: e.to_f64(),
            })?;
        }
        let (first, stop) = (idx[0], idx[1]);
        let count = if stop == first { n } else { (stop + n - first) % n };
        for s in 0..count {
            matrix.set(j, (first + s) % n);
        }
        blocks.push((first, (first + count + n - 1) % n));
    }
    Ok(TransitionMatrix { matrix, blocks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Aperiodicity {
    /// Smallest power whose matrix has every entry set.
    Aperiodic(usize),
    NotAperiodic,
}

/// Primitivity test: squares up to the Wielandt bound `(n−1)²+1` decide
/// whether any power is full, then the least such power is found by
/// stepping.
pub fn aperiodicity_check(t: &TransitionMatrix) -> Aperiodicity {
    let a = &t.matrix;
    let n = a.size();
    if n == 0 {
        return Aperiodicity::NotAperiodic;
    }
    let bound = (n - 1) * (n - 1) + 1;
    let mut p = a.clone();
    let mut e = 1usize;
    while e < bound && !p.is_full() {
        p = p.mul(&p);
        e *= 2;
    }
    if !p.is_full() {
        return Aperiodicity::NotAperiodic;
    }
    let mut q = a.clone();
    for k in 1..=e {
        if q.is_full() {
            return Aperiodicity::Aperiodic(k);
        }
        q = q.mul(a);
    }
    Aperiodicity::Aperiodic(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_matrix_is_aperiodic_at_one() {
        let t = TransitionMatrix {
            matrix: BoolMatrix::full(5),
            blocks: vec![],
        };
        assert_eq!(aperiodicity_check(&t), Aperiodicity::Aperiodic(1));
    }

    #[test]
    fn permutation_is_not_aperiodic() {
        let mut m = BoolMatrix::new(70);
        for j in 0..70 {
            m.set(j, (j + 1) % 70);
        }
        let t = TransitionMatrix {
            matrix: m,
            blocks: vec![],
        };
        assert_eq!(aperiodicity_check(&t), Aperiodicity::NotAperiodic);
    }

    #[test]
    fn cycle_with_shortcut_needs_many_steps() {
        // cycle of length 4 plus a chord making lengths 4 and 3: primitive,
        // exponent (n−1)²+1 = 10 for the Wielandt matrix
        let mut m = BoolMatrix::new(4);
        for j in 0..4 {
            m.set(j, (j + 1) % 4);
        }
        m.set(3, 1);
        let t = TransitionMatrix {
            matrix: m,
            blocks: vec![],
        };
        assert_eq!(aperiodicity_check(&t), Aperiodicity::Aperiodic(10));
    }
}
