//! Integer matrices, Smith normal form and finitely generated abelian groups.

use serde::Serialize;

use crate::scalar::ExactInt;

/// Order of a group: a positive integer or infinite.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupOrder<I> {
    Finite(I),
    Infinite,
}

impl<I: ExactInt> GroupOrder<I> {
    pub fn is_finite(&self) -> bool {
        matches!(self, GroupOrder::Finite(_))
    }

    /// `"infinite"` or the decimal order.
    pub fn label(&self) -> String {
        match self {
            GroupOrder::Finite(n) => n.to_string(),
            GroupOrder::Infinite => "infinite".to_string(),
        }
    }
}

impl<I: ExactInt> Serialize for GroupOrder<I> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// A finitely generated abelian group `Z^r ⊕ Z/d1 ⊕ … ⊕ Z/dk` with `d1 | d2 | …`, all `di > 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup<I> {
    pub free_rank: usize,
    pub torsion: Vec<I>,
}

impl<I: ExactInt> AbelianGroup<I> {
    pub fn order(&self) -> GroupOrder<I> {
        if self.free_rank > 0 {
            GroupOrder::Infinite
        } else {
            GroupOrder::Finite(self.torsion.iter().fold(I::one(), |a, d| a * d.clone()))
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.free_rank + self.torsion.len() <= 1
    }
}

/// Diagonal of the Smith normal form of a matrix with `cols` columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm<I> {
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub invariant_factors: Vec<I>,
    pub cols: usize,
}

impl<I: ExactInt> SmithForm<I> {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Cokernel `Z^cols / rowspace`.
    pub fn cokernel(&self) -> AbelianGroup<I> {
        AbelianGroup {
            free_rank: self.cols - self.rank(),
            torsion: self
                .invariant_factors
                .iter()
                .filter(|d| !d.is_one())
                .cloned()
                .collect(),
        }
    }
}

/// Smith normal form by repeated row and column Euclidean elimination.
///
/// `rows` is a list of equal-length rows; `cols` is given so that an empty
/// relation list still describes a free group of that rank.
pub fn smith_normal_form<I: ExactInt>(rows: &[Vec<I>], cols: usize) -> SmithForm<I> {
    let mut a: Vec<Vec<I>> = rows.to_vec();
    for r in &a {
        assert_eq!(r.len(), cols, "ragged relation matrix");
    }
    let m = a.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(cols) {
        // pivot: smallest nonzero magnitude in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = a[t][j].clone() * q.clone();
                    a[i][j] = a[i][j].clone() - v;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let v = row[t].clone() * q.clone();
                    row[j] = row[j].clone() - v;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let offender = (t + 1..m)
                .find(|&i| (t + 1..cols).any(|j| !(a[i][j].clone() % a[t][t].clone()).is_zero()));
            match offender {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] = a[t][j].clone() + v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    SmithForm {
        invariant_factors: diag,
        cols,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf(rows: &[&[i64]]) -> Vec<i64> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        smith_normal_form(&rows, cols).invariant_factors
    }

    #[test]
    fn diagonalizes_small_examples() {
        assert_eq!(snf(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]), vec![2, 6, 12]);
        assert_eq!(snf(&[&[2, 0], &[0, 3]]), vec![1, 6]);
        assert_eq!(snf(&[&[0, 0], &[0, 0]]), Vec::<i64>::new());
        assert_eq!(snf(&[&[4, 6]]), vec![2]);
    }

    #[test]
    fn cokernel_of_empty_relations_is_free() {
        let g = smith_normal_form::<i64>(&[], 2).cokernel();
        assert_eq!(g.free_rank, 2);
        assert_eq!(g.order(), GroupOrder::Infinite);
    }

    #[test]
    fn divisibility_chain_holds() {
        let f = snf(&[&[6, 0, 0], &[0, 10, 0], &[0, 0, 15]]);
        assert_eq!(f, vec![1, 30, 30]);
    }
}
