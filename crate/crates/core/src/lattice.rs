//! Finite lattices given by an order matrix.
//!
//! Used both for the symbol order of each arity class of a preordered signature
//! and for the underlying lattice of a finite quantale. Elements are local
//! indices `0..len`.

use crate::error::{Error, Result};

/// Reflexive-transitive closure of a relation given as a boolean matrix.
pub fn reflexive_transitive_closure(mut rel: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
    let n = rel.len();
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if rel[i][k] {
                let via = rel[k].clone();
                for (cell, &v) in rel[i].iter_mut().zip(&via) {
                    *cell |= v;
                }
            }
        }
    }
    rel
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
}

impl FiniteLattice {
    /// Builds the lattice from an order matrix, which must already be a partial
    /// order in which every pair has a meet and a join.
    pub fn from_order(leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = leq.len();
        if n == 0 {
            return Err(Error::NotLattice("empty carrier has no top or bottom".into()));
        }
        if leq.iter().any(|row| row.len() != n) {
            return Err(Error::NotLattice("order matrix is not square".into()));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::NotLattice(format!("order is not reflexive at {i}")));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::NotLattice(format!("order is not antisymmetric at ({i}, {j})")));
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::NotLattice(format!("order is not transitive at ({i}, {j}, {k})")));
                    }
                }
            }
        }
        let least_upper = |i: usize, j: usize| -> Option<usize> {
            let uppers: Vec<usize> = (0..n).filter(|&u| leq[i][u] && leq[j][u]).collect();
            uppers.iter().copied().find(|&u| uppers.iter().all(|&w| leq[u][w]))
        };
        let greatest_lower = |i: usize, j: usize| -> Option<usize> {
            let lowers: Vec<usize> = (0..n).filter(|&l| leq[l][i] && leq[l][j]).collect();
            lowers.iter().copied().find(|&l| lowers.iter().all(|&w| leq[w][l]))
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                join[i][j] = least_upper(i, j).ok_or_else(|| Error::NotLattice(format!("no join of {i} and {j}")))?;
                meet[i][j] =
                    greatest_lower(i, j).ok_or_else(|| Error::NotLattice(format!("no meet of {i} and {j}")))?;
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| leq[b][x]))
            .ok_or_else(|| Error::NotLattice("no bottom element".into()))?;
        let top = (0..n)
            .find(|&t| (0..n).all(|x| leq[x][t]))
            .ok_or_else(|| Error::NotLattice("no top element".into()))?;
        Ok(FiniteLattice {
            leq,
            meet,
            join,
            bottom,
            top,
        })
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn join_all<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(self.bottom, |acc, x| self.join[acc][x])
    }

    pub fn meet_all<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(self.top, |acc, x| self.meet[acc][x])
    }

    /// Least upper bound of a subset computed directly from the order, without
    /// going through the binary join table.
    pub fn supremum_by_order(&self, subset: &[usize]) -> Option<usize> {
        let n = self.len();
        let uppers: Vec<usize> = (0..n).filter(|&u| subset.iter().all(|&s| self.leq[s][u])).collect();
        uppers.iter().copied().find(|&u| uppers.iter().all(|&w| self.leq[u][w]))
    }

    pub fn is_total(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.leq[i][j] || self.leq[j][i]))
    }

    /// Checks that every subset's supremum is the fold of binary joins from the
    /// bottom, i.e. that closure under nullary and binary joins is closure under
    /// all joins. Returns the first offending subset as a bitmask.
    pub fn check_joins_finitary(&self) -> std::result::Result<(), u64> {
        let n = self.len();
        if n > 16 {
            return Ok(()); // finite lattices satisfy it by induction; only small ones are enumerated
        }
        for mask in 0u64..(1u64 << n) {
            let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if self.supremum_by_order(&subset) != Some(self.join_all(subset.iter().copied())) {
                return Err(mask);
            }
        }
        Ok(())
    }

    /// Binary distributivity `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`; first failing triple.
    pub fn check_binary_distributive(&self) -> std::result::Result<(), (usize, usize, usize)> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = self.meet(a, self.join(b, c));
                    let rhs = self.join(self.meet(a, b), self.meet(a, c));
                    if lhs != rhs {
                        return Err((a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    /// Infinite distributivity `a ∧ ⋁S = ⋁{a ∧ s | s ∈ S}` over every subset `S`
    /// (for lattices of at most 16 elements). Returns `(a, mask)` on failure.
    pub fn check_subset_distributive(&self) -> std::result::Result<(), (usize, u64)> {
        let n = self.len();
        if n > 16 {
            return match self.check_binary_distributive() {
                Ok(()) => Ok(()),
                Err((a, b, c)) => Err((a, (1 << b) | (1 << c))),
            };
        }
        for a in 0..n {
            for mask in 0u64..(1u64 << n) {
                let subset = (0..n).filter(|&i| mask & (1 << i) != 0);
                let lhs = self.meet(a, self.join_all(subset.clone()));
                let rhs = self.join_all(subset.map(|s| self.meet(a, s)));
                if lhs != rhs {
                    return Err((a, mask));
                }
            }
        }
        Ok(())
    }

    pub fn is_heyting(&self) -> bool {
        self.check_binary_distributive().is_ok() && self.check_subset_distributive().is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> FiniteLattice {
        FiniteLattice::from_order((0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect()).unwrap()
    }

    #[test]
    fn chain_is_total_heyting() {
        let l = chain(3);
        assert!(l.is_total());
        assert!(l.is_heyting());
        assert_eq!(l.bottom(), 0);
        assert_eq!(l.top(), 2);
        assert_eq!(l.join(0, 2), 2);
        assert_eq!(l.meet(1, 2), 1);
        assert!(l.check_joins_finitary().is_ok());
    }

    #[test]
    fn diamond_m3_is_not_distributive() {
        // 0 = bottom, 4 = top, 1,2,3 pairwise incomparable atoms
        let mut rel = vec![vec![false; 5]; 5];
        rel[0] = vec![true; 5];
        for row in &mut rel {
            row[4] = true;
        }
        let l = FiniteLattice::from_order(reflexive_transitive_closure(rel)).unwrap();
        assert!(!l.is_total());
        assert!(l.check_binary_distributive().is_err());
        assert!(!l.is_heyting());
    }

    #[test]
    fn missing_join_is_rejected() {
        // two incomparable maximal elements over a bottom
        let rel = vec![
            vec![true, true, true],
            vec![false, true, false],
            vec![false, false, true],
        ];
        assert!(matches!(FiniteLattice::from_order(rel), Err(Error::NotLattice(_))));
    }

    #[test]
    fn closure_is_reflexive_transitive() {
        let rel = vec![
            vec![false, true, false],
            vec![false, false, true],
            vec![false, false, false],
        ];
        let c = reflexive_transitive_closure(rel);
        assert!(c[0][2] && c[0][0] && c[2][2]);
        assert!(!c[2][0]);
    }
}
