//! Weighted complex projective quotients realizing an invariant triple.
//!
//! The triple `(β1/α1, β2/α2, β3/α3)` gives the integer matrix with rows
//! `(α1, α2, α3)` and `(β1, β2, β3)`; its kernel is spanned by the primitive
//! cross product of the rows, which is the weight vector of the circle
//! `λ ↦ (λ^a, λ^b, λ^c)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::invariants::{is_realizable, InvariantTuple};
use crate::rational::int_text;
use crate::scalar::ExactInt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WcpError {
    #[error("weighted projective quotients need a triple, got {0} entries")]
    NotATriple(usize),
    #[error("invariants {0} are not realizable: consecutive entries coincide")]
    NotRealizable(String),
    #[error("matrix built from {0} has rank below 2")]
    RankDeficient(String),
    #[error("kernel {0} has a zero entry, the action would not be almost free")]
    ZeroWeight(String),
    #[error("weights must be nonzero with gcd 1, got ({0}, {1}, {2})")]
    InvalidWeights(String, String, String),
}

/// Nonzero integers `(a, b, c)` with `gcd(|a|, |b|, |c|) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(bound = "I: ExactInt", try_from = "WeightsRepr<I>", into = "WeightsRepr<I>")]
pub struct WeightTriple<I: ExactInt> {
    w: [I; 3],
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(bound = "I: ExactInt")]
struct WeightsRepr<I: ExactInt>(
    #[serde(with = "int_text")] I,
    #[serde(with = "int_text")] I,
    #[serde(with = "int_text")] I,
);

impl<I: ExactInt> TryFrom<WeightsRepr<I>> for WeightTriple<I> {
    type Error = WcpError;
    fn try_from(r: WeightsRepr<I>) -> Result<Self, WcpError> {
        WeightTriple::new(r.0, r.1, r.2)
    }
}

impl<I: ExactInt> From<WeightTriple<I>> for WeightsRepr<I> {
    fn from(w: WeightTriple<I>) -> Self {
        let [a, b, c] = w.w;
        WeightsRepr(a, b, c)
    }
}

impl<I: ExactInt> WeightTriple<I> {
    pub fn new(a: I, b: I, c: I) -> Result<Self, WcpError> {
        let g = a.gcd(&b).gcd(&c);
        if a.is_zero() || b.is_zero() || c.is_zero() || !g.is_one() {
            return Err(WcpError::InvalidWeights(a.to_string(), b.to_string(), c.to_string()));
        }
        Ok(Self { w: [a, b, c] })
    }

    pub fn of(a: i64, b: i64, c: i64) -> Result<Self, WcpError> {
        Self::new(I::from_i64_exact(a), I::from_i64_exact(b), I::from_i64_exact(c))
    }

    pub fn as_array(&self) -> &[I; 3] {
        &self.w
    }
}

impl<I: ExactInt> fmt::Display for WeightTriple<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.w[0], self.w[1], self.w[2])
    }
}

/// Weights plus the orders `ᾱ`, `β̄` of the finite group acting on the weighted projective space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "I: ExactInt")]
pub struct QuotientDescriptor<I: ExactInt> {
    pub weights: WeightTriple<I>,
    pub quotient: CyclicFactors<I>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "I: ExactInt")]
pub struct CyclicFactors<I: ExactInt> {
    #[serde(with = "int_text")]
    pub alpha_bar: I,
    #[serde(with = "int_text")]
    pub beta_bar: I,
}

impl<I: ExactInt> QuotientDescriptor<I> {
    /// The covering space itself, with trivial quotient.
    pub fn unquotiented(weights: WeightTriple<I>) -> Self {
        Self {
            weights,
            quotient: CyclicFactors {
                alpha_bar: I::one(),
                beta_bar: I::one(),
            },
        }
    }
}

fn cross<I: ExactInt>(u: &[I], v: &[I]) -> [I; 3] {
    let m = |a: &I, b: &I| a.clone() * b.clone();
    [
        m(&u[1], &v[2]) - m(&u[2], &v[1]),
        m(&u[2], &v[0]) - m(&u[0], &v[2]),
        m(&u[0], &v[1]) - m(&u[1], &v[0]),
    ]
}

fn gcd_all<I: ExactInt>(v: &[I]) -> I {
    v.iter().fold(I::zero(), |g, x| g.gcd(x))
}

/// Primitive kernel of the `(α; β)` matrix and the cyclic orders `ᾱ = gcd αi`, `β̄ = gcd βi`.
pub fn weights_from_invariants<I: ExactInt>(
    t: &InvariantTuple<I>,
) -> Result<QuotientDescriptor<I>, WcpError> {
    if t.len() != 3 {
        return Err(WcpError::NotATriple(t.len()));
    }
    if !is_realizable(t) {
        return Err(WcpError::NotRealizable(t.to_string()));
    }
    let alphas = t.alphas();
    let betas = t.betas();
    let k = cross(&alphas, &betas);
    let g = gcd_all(&k);
    if g.is_zero() {
        return Err(WcpError::RankDeficient(t.to_string()));
    }
    let [a, b, c] = k.map(|x| x / g.clone());
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Err(WcpError::ZeroWeight(format!("({a}, {b}, {c})")));
    }
    Ok(QuotientDescriptor {
        weights: WeightTriple { w: [a, b, c] },
        quotient: CyclicFactors {
            alpha_bar: gcd_all(&alphas),
            beta_bar: gcd_all(&betas),
        },
    })
}

/// The eight sign images of a weight triple, split by parity of the number of flips.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "I: ExactInt")]
pub struct SignRepresentatives<I: ExactInt> {
    /// zero or two sign flips
    pub even: Vec<WeightTriple<I>>,
    /// one or three sign flips
    pub odd: Vec<WeightTriple<I>>,
}

impl<I: ExactInt> SignRepresentatives<I> {
    pub fn all(&self) -> impl Iterator<Item = &WeightTriple<I>> {
        self.even.iter().chain(&self.odd)
    }

    pub fn contains(&self, w: &WeightTriple<I>) -> bool {
        self.all().any(|x| x == w)
    }
}

pub fn sign_representatives<I: ExactInt>(w: &WeightTriple<I>) -> SignRepresentatives<I> {
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for mask in 0u8..8 {
        let img = WeightTriple {
            w: std::array::from_fn(|i| {
                if mask >> i & 1 == 1 {
                    -w.w[i].clone()
                } else {
                    w.w[i].clone()
                }
            }),
        };
        let bucket = if mask.count_ones() % 2 == 0 { &mut even } else { &mut odd };
        if !bucket.contains(&img) {
            bucket.push(img);
        }
    }
    SignRepresentatives { even, odd }
}

/// Both rows built from `t` annihilate `w` exactly.
pub fn verify_kernel<I: ExactInt>(w: &WeightTriple<I>, t: &InvariantTuple<I>) -> Result<bool, WcpError> {
    if t.len() != 3 {
        return Err(WcpError::NotATriple(t.len()));
    }
    let dot = |row: Vec<I>| {
        row.iter()
            .zip(&w.w)
            .fold(I::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    };
    Ok(dot(t.alphas()).is_zero() && dot(t.betas()).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type T = InvariantTuple<BigInt>;
    type W = WeightTriple<BigInt>;

    fn t(v: &[(i64, i64)]) -> T {
        T::from_pairs(v).unwrap()
    }

    fn w(a: i64, b: i64, c: i64) -> W {
        W::of(a, b, c).unwrap()
    }

    #[test]
    fn two_n_family_examples() {
        let d = weights_from_invariants(&t(&[(0, 1), (-1, 2), (1, 2)])).unwrap();
        assert_eq!(d.weights, w(4, -1, -1));
        assert_eq!(d.quotient.alpha_bar, BigInt::from(1));
        assert_eq!(d.quotient.beta_bar, BigInt::from(1));
        let d = weights_from_invariants(&t(&[(0, 1), (-1, 3), (1, 3)])).unwrap();
        assert_eq!(d.weights, w(6, -1, -1));
        let d = weights_from_invariants(&t(&[(1, 1), (1, 2), (1, 3)])).unwrap();
        assert_eq!(d.weights, w(-1, 2, -1));
    }

    #[test]
    fn cyclic_factors_ignore_zero() {
        let d = weights_from_invariants(&t(&[(1, 3), (2, 3), (4, 3)])).unwrap();
        assert_eq!(d.quotient.alpha_bar, BigInt::from(3));
        assert_eq!(d.quotient.beta_bar, BigInt::from(1));
        let d = weights_from_invariants(&t(&[(0, 1), (2, 3), (4, 3)])).unwrap();
        assert_eq!(d.quotient.beta_bar, BigInt::from(2));
    }

    #[test]
    fn errors() {
        assert_eq!(
            weights_from_invariants(&t(&[(1, 2), (1, 2), (1, 3)])),
            Err(WcpError::NotRealizable("(1/2, 1/2, 1/3)".into()))
        );
        assert!(matches!(
            weights_from_invariants(&t(&[(0, 1), (1, 2)])),
            Err(WcpError::NotATriple(2))
        ));
        let d = weights_from_invariants(&t(&[(0, 1), (1, 1), (2, 1)])).unwrap();
        assert_eq!(d.weights, w(1, -2, 1));
        assert!(W::of(2, 4, 6).is_err());
        assert!(W::of(0, 1, 1).is_err());
    }

    #[test]
    fn signs() {
        let s = sign_representatives(&w(1, 1, 1));
        assert!(s.contains(&w(1, -1, -1)));
        assert_eq!(s.all().count(), 8);
        assert!(s.even.contains(&w(1, -1, -1)));
        assert!(s.odd.contains(&w(-1, -1, -1)));
        assert!(sign_representatives(&w(4, -1, -1)).contains(&w(4, 1, 1)));
        let x = w(3, -5, 7);
        assert!(sign_representatives(&x).contains(&x));
    }

    #[test]
    fn kernel_check() {
        let h = t(&[(0, 1), (-1, 2), (1, 2)]);
        assert!(verify_kernel(&w(4, -1, -1), &h).unwrap());
        assert!(!verify_kernel(&w(1, 1, 1), &h).unwrap());
    }

    #[test]
    fn json_shape() {
        let d = weights_from_invariants(&t(&[(0, 1), (-1, 2), (1, 2)])).unwrap();
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"weights":[4,-1,-1],"quotient":{"alpha_bar":1,"beta_bar":1}}"#
        );
    }
}
