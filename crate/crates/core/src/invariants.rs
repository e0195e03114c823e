//! Invariant tuples in Q^n and their equivalence under rotation, reversal and
//! integer translation.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::{format_ratio, vec_as_string};
use crate::scalar::ExactInt;

/// Errors from tuple construction and comparison.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error("invariant tuples need at least two entries, got {0}")]
    TooShort(usize),
    #[error("tuple lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// An ordered tuple `(β1/α1, …, βn/αn)` with `n ≥ 2`, entries in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "I: ExactInt", try_from = "TupleRepr<I>", into = "TupleRepr<I>")]
pub struct InvariantTuple<I: ExactInt> {
    entries: Vec<Ratio<I>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "I: ExactInt", transparent)]
struct TupleRepr<I: ExactInt>(#[serde(with = "vec_as_string")] Vec<Ratio<I>>);

impl<I: ExactInt> TryFrom<TupleRepr<I>> for InvariantTuple<I> {
    type Error = InvariantError;
    fn try_from(r: TupleRepr<I>) -> Result<Self, Self::Error> {
        Self::new(r.0)
    }
}

impl<I: ExactInt> From<InvariantTuple<I>> for TupleRepr<I> {
    fn from(t: InvariantTuple<I>) -> Self {
        TupleRepr(t.entries)
    }
}

/// One generator of the equivalence relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EquivalenceMove<I> {
    /// `(a, b, …, z) ↦ (b, …, z, a)`
    Rotation,
    /// `(a, …, z) ↦ (−z, …, −a)`
    Reversal,
    /// add `k` to every entry
    Translation(I),
}

impl<I: ExactInt> InvariantTuple<I> {
    pub fn new(entries: Vec<Ratio<I>>) -> Result<Self, InvariantError> {
        if entries.len() < 2 {
            return Err(InvariantError::TooShort(entries.len()));
        }
        Ok(Self { entries })
    }

    /// Builds a tuple from `(β, α)` pairs; `α` must be nonzero.
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self, InvariantError> {
        Self::new(
            pairs
                .iter()
                .map(|&(b, a)| Ratio::new(I::from_i64_exact(b), I::from_i64_exact(a)))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[Ratio<I>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Denominators `αi` (positive).
    pub fn alphas(&self) -> Vec<I> {
        self.entries.iter().map(|r| r.denom().clone()).collect()
    }

    /// Numerators `βi`.
    pub fn betas(&self) -> Vec<I> {
        self.entries.iter().map(|r| r.numer().clone()).collect()
    }
}

impl<I: ExactInt> fmt::Debug for InvariantTuple<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<I: ExactInt> fmt::Display for InvariantTuple<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(format_ratio).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub fn apply_move<I: ExactInt>(t: &InvariantTuple<I>, m: &EquivalenceMove<I>) -> InvariantTuple<I> {
    let entries = match m {
        EquivalenceMove::Rotation => {
            let mut e = t.entries.clone();
            e.rotate_left(1);
            e
        }
        EquivalenceMove::Reversal => t.entries.iter().rev().map(|r| -r.clone()).collect(),
        EquivalenceMove::Translation(k) => {
            let k = Ratio::from_integer(k.clone());
            t.entries.iter().map(|r| r.clone() + k.clone()).collect()
        }
    };
    InvariantTuple { entries }
}

fn lex_cmp<I: ExactInt>(a: &[Ratio<I>], b: &[Ratio<I>]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Shifts every entry by the integer that puts the first entry in `[0, 1)`.
fn normalize_first<I: ExactInt>(e: Vec<Ratio<I>>) -> Vec<Ratio<I>> {
    let k = Ratio::from_integer(e[0].floor().to_integer());
    e.into_iter().map(|r| r - k.clone()).collect()
}

/// The `2n` rotation and rotation∘reversal images of a tuple.
fn dihedral_images<I: ExactInt>(t: &InvariantTuple<I>) -> Vec<Vec<Ratio<I>>> {
    let n = t.len();
    let reversed = apply_move(t, &EquivalenceMove::Reversal).entries;
    let mut out = Vec::with_capacity(2 * n);
    for base in [&t.entries, &reversed] {
        for s in 0..n {
            let mut e = base.clone();
            e.rotate_left(s);
            out.push(e);
        }
    }
    out
}

/// Lexicographically least translation-normalized dihedral image.
pub fn canonicalize<I: ExactInt>(t: &InvariantTuple<I>) -> InvariantTuple<I> {
    let best = dihedral_images(t)
        .into_iter()
        .map(normalize_first)
        .min_by(|a, b| lex_cmp(a, b))
        .expect("tuples are nonempty");
    InvariantTuple { entries: best }
}

pub fn are_equivalent<I: ExactInt>(
    a: &InvariantTuple<I>,
    b: &InvariantTuple<I>,
) -> Result<bool, InvariantError> {
    if a.len() != b.len() {
        return Err(InvariantError::LengthMismatch(a.len(), b.len()));
    }
    Ok(canonicalize(a) == canonicalize(b))
}

/// Consecutive entries (indices mod n) are pairwise distinct.
pub fn is_realizable<I: ExactInt>(t: &InvariantTuple<I>) -> bool {
    let n = t.len();
    (0..n).all(|i| t.entries[i] != t.entries[(i + 1) % n])
}

/// `e = −Σ entries`.
pub fn euler_sum<I: ExactInt>(t: &InvariantTuple<I>) -> Ratio<I> {
    -t.entries.iter().fold(Ratio::zero(), |acc, r| acc + r.clone())
}

/// Sorted multiset `{ t[i+1] − t[i] }` (indices mod n).
pub fn cyclic_differences<I: ExactInt>(t: &InvariantTuple<I>) -> Vec<Ratio<I>> {
    let n = t.len();
    let mut d: Vec<Ratio<I>> = (0..n)
        .map(|i| t.entries[(i + 1) % n].clone() - t.entries[i].clone())
        .collect();
    d.sort();
    d
}

/// Least common multiple of the denominators.
pub fn common_denominator<I: ExactInt>(t: &InvariantTuple<I>) -> I {
    t.entries
        .iter()
        .fold(I::one(), |acc, r| num_integer::Integer::lcm(&acc, r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type T = InvariantTuple<BigInt>;

    fn t(v: &[(i64, i64)]) -> T {
        T::from_pairs(v).unwrap()
    }

    fn q(n: i64, d: i64) -> Ratio<BigInt> {
        Ratio::new(n.into(), d.into())
    }

    #[test]
    fn moves_act_as_documented() {
        let x = t(&[(1, 2), (1, 3), (1, 5)]);
        assert_eq!(apply_move(&x, &EquivalenceMove::Rotation), t(&[(1, 3), (1, 5), (1, 2)]));
        assert_eq!(
            apply_move(&x, &EquivalenceMove::Reversal),
            t(&[(-1, 5), (-1, 3), (-1, 2)])
        );
        let y = t(&[(0, 1), (1, 2), (1, 3)]);
        assert_eq!(
            apply_move(&y, &EquivalenceMove::Translation(BigInt::from(1))),
            t(&[(1, 1), (3, 2), (4, 3)])
        );
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonicalize(&t(&[(0, 1), (1, 1), (2, 1)])), t(&[(0, 1), (-2, 1), (-1, 1)]));
        let h = t(&[(0, 1), (-1, 2), (1, 2)]);
        assert_eq!(canonicalize(&h), h);
        let abc = t(&[(1, 2), (1, 3), (1, 5)]);
        let bca = apply_move(&abc, &EquivalenceMove::Rotation);
        assert_eq!(canonicalize(&abc), canonicalize(&bca));
    }

    #[test]
    fn equivalence_examples() {
        let a = t(&[(0, 1), (-1, 2), (1, 2)]);
        let b = t(&[(0, 1), (1, 2), (-1, 2)]);
        assert!(!are_equivalent(&a, &b).unwrap());
        assert!(are_equivalent(&t(&[(0, 1), (1, 1), (2, 1)]), &t(&[(1, 1), (2, 1), (3, 1)])).unwrap());
        let four = t(&[(0, 1), (0, 1), (1, 1), (1, 1)]);
        assert_eq!(are_equivalent(&a, &four), Err(InvariantError::LengthMismatch(3, 4)));
    }

    #[test]
    fn realizability_examples() {
        assert!(!is_realizable(&t(&[(1, 2), (1, 2), (1, 3)])));
        assert!(is_realizable(&t(&[(0, 1), (-1, 2), (1, 2)])));
        assert!(!is_realizable(&t(&[(0, 1), (0, 1), (1, 1), (1, 1)])));
        assert!(is_realizable(&t(&[(0, 1), (1, 1), (0, 1), (1, 1)])));
    }

    #[test]
    fn euler_and_differences() {
        assert_eq!(euler_sum(&t(&[(0, 1), (-1, 2), (1, 2)])), q(0, 1));
        assert_eq!(euler_sum(&t(&[(1, 2), (1, 3), (1, 5)])), q(-31, 30));
        assert_eq!(euler_sum(&t(&[(1, 1), (1, 1), (1, 1)])), q(-3, 1));
        let mut want = vec![q(-1, 2), q(1, 1), q(-1, 2)];
        want.sort();
        assert_eq!(cyclic_differences(&t(&[(0, 1), (-1, 2), (1, 2)])), want);
        assert_eq!(cyclic_differences(&t(&[(-1, 2), (1, 2), (0, 1)])), want);
    }

    #[test]
    fn machine_integers_work_too() {
        let a = InvariantTuple::<i64>::from_pairs(&[(0, 1), (1, 1), (2, 1)]).unwrap();
        assert_eq!(canonicalize(&a).to_string(), "(0, -2, -1)");
    }

    #[test]
    fn serde_uses_fraction_strings() {
        let a = t(&[(0, 1), (-2, 4), (1, 2)]);
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"["0","-1/2","1/2"]"#);
        let back: T = serde_json::from_str(r#"["0", "-2/4", 1]"#).unwrap();
        assert_eq!(back, t(&[(0, 1), (-1, 2), (1, 1)]));
        assert!(serde_json::from_str::<T>(r#"["1/2"]"#).is_err());
        assert!(serde_json::from_str::<T>(r#"[0.5, 1]"#).is_err());
    }
}
