//! Unnormalized Seifert presentations `{g; (α1,β1), …, (αn,βn)}` of genus zero.

use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::lattice::{AbelianGroup, GroupOrder};
use crate::presentation::{syl, GroupPresentation, Word};
use crate::rational::{format_ratio, int_text};
use crate::scalar::ExactInt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeifertError {
    #[error("fiber ({alpha}, {beta}): alpha must be positive")]
    NonPositiveAlpha { alpha: String, beta: String },
    #[error("fiber ({alpha}, {beta}): gcd(alpha, |beta|) must be 1")]
    NotCoprime { alpha: String, beta: String },
    #[error("genus {0} is not supported, only genus 0")]
    UnsupportedGenus(u32),
    #[error("empty fiber list must be flagged as the trivial fibration")]
    UnflaggedEmpty,
    #[error("expected exactly {expected} fibers, got {got}")]
    FiberCount { expected: usize, got: usize },
}

/// An exceptional or regular fiber `(α, β)`, `α > 0`, `gcd(α, |β|) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "I: ExactInt")]
pub struct Fiber<I: ExactInt>(
    #[serde(with = "int_text")] pub I,
    #[serde(with = "int_text")] pub I,
);

impl<I: ExactInt> Fiber<I> {
    pub fn alpha(&self) -> &I {
        &self.0
    }

    pub fn beta(&self) -> &I {
        &self.1
    }

    pub fn of(alpha: i64, beta: i64) -> Self {
        Fiber(I::from_i64_exact(alpha), I::from_i64_exact(beta))
    }
}

fn check_fiber<I: ExactInt>(alpha: &I, beta: &I) -> Result<(), SeifertError> {
    let strs = || (alpha.to_string(), beta.to_string());
    if !alpha.is_positive() {
        let (alpha, beta) = strs();
        return Err(SeifertError::NonPositiveAlpha { alpha, beta });
    }
    if !alpha.gcd(beta).is_one() {
        let (alpha, beta) = strs();
        return Err(SeifertError::NotCoprime { alpha, beta });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "I: ExactInt", try_from = "PresentationRepr<I>")]
pub struct SeifertPresentation<I: ExactInt> {
    genus: u32,
    fibers: Vec<Fiber<I>>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    trivial_fibration: bool,
}

#[derive(Deserialize)]
#[serde(bound = "I: ExactInt", deny_unknown_fields)]
struct PresentationRepr<I: ExactInt> {
    genus: u32,
    fibers: Vec<Fiber<I>>,
    #[serde(default)]
    trivial_fibration: bool,
}

impl<I: ExactInt> TryFrom<PresentationRepr<I>> for SeifertPresentation<I> {
    type Error = SeifertError;
    fn try_from(r: PresentationRepr<I>) -> Result<Self, Self::Error> {
        if r.fibers.is_empty() && r.trivial_fibration {
            return Self::trivial_fibration(r.genus);
        }
        Self::new(r.genus, r.fibers)
    }
}

impl<I: ExactInt> SeifertPresentation<I> {
    /// Validates every fiber; the fiber list must be nonempty.
    pub fn new(genus: u32, fibers: Vec<Fiber<I>>) -> Result<Self, SeifertError> {
        if fibers.is_empty() {
            return Err(SeifertError::UnflaggedEmpty);
        }
        for f in &fibers {
            check_fiber(&f.0, &f.1)?;
        }
        Ok(Self {
            genus,
            fibers,
            trivial_fibration: false,
        })
    }

    /// The product fibration with no marked fibers.
    pub fn trivial_fibration(genus: u32) -> Result<Self, SeifertError> {
        Ok(Self {
            genus,
            fibers: Vec::new(),
            trivial_fibration: true,
        })
    }

    /// Genus-zero presentation from machine-integer pairs.
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self, SeifertError> {
        Self::new(0, pairs.iter().map(|&(a, b)| Fiber::of(a, b)).collect())
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn fibers(&self) -> &[Fiber<I>] {
        &self.fibers
    }

    pub fn is_trivial_fibration(&self) -> bool {
        self.trivial_fibration
    }
}

impl<I: ExactInt> fmt::Display for SeifertPresentation<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .fibers
            .iter()
            .map(|x| format!("({}, {})", x.0, x.1))
            .collect();
        if parts.is_empty() {
            write!(f, "{{{}}}", self.genus)
        } else {
            write!(f, "{{{}; {}}}", self.genus, parts.join(", "))
        }
    }
}

/// The matrix `[[α, γ], [−β, δ]]` of determinant `αδ + βγ = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "I: ExactInt")]
pub struct TorusBasisChange<I: ExactInt> {
    #[serde(with = "int_text")]
    pub alpha: I,
    #[serde(with = "int_text")]
    pub beta: I,
    #[serde(with = "int_text")]
    pub gamma: I,
    #[serde(with = "int_text")]
    pub delta: I,
}

impl<I: ExactInt> TorusBasisChange<I> {
    pub fn determinant(&self) -> I {
        self.alpha.clone() * self.delta.clone() + self.beta.clone() * self.gamma.clone()
    }
}

/// Completes `(α, β)` to an SL(2,Z) matrix with `γ = β⁻¹ mod α` in `[0, α)`.
pub fn sl2_complete<I: ExactInt>(alpha: &I, beta: &I) -> Result<TorusBasisChange<I>, SeifertError> {
    check_fiber(alpha, beta)?;
    let (gamma, delta) = if alpha.is_one() {
        (I::zero(), I::one())
    } else {
        let eg = beta.extended_gcd(alpha);
        // eg.x * beta + eg.y * alpha = ±1
        let x = if eg.gcd.is_one() { eg.x } else { -eg.x };
        let gamma = x.mod_floor(alpha);
        let delta = (I::one() - beta.clone() * gamma.clone()) / alpha.clone();
        (gamma, delta)
    };
    Ok(TorusBasisChange {
        alpha: alpha.clone(),
        beta: beta.clone(),
        gamma,
        delta,
    })
}

/// The meridian `m = α q + β h` as its `(q, h)` coefficients.
pub fn meridian_coefficients<I: ExactInt>(alpha: &I, beta: &I) -> Result<(I, I), SeifertError> {
    check_fiber(alpha, beta)?;
    Ok((alpha.clone(), beta.clone()))
}

/// `e = −Σ βi/αi`.
pub fn euler_number<I: ExactInt>(p: &SeifertPresentation<I>) -> Ratio<I> {
    -p.fibers.iter().fold(Ratio::zero(), |acc, f| {
        acc + Ratio::new(f.1.clone(), f.0.clone())
    })
}

/// Reduces each `αi > 1` fiber to `0 < βi < αi` and appends the accumulated `(1, b)`.
pub fn normalize<I: ExactInt>(p: &SeifertPresentation<I>) -> SeifertPresentation<I> {
    let mut b = I::zero();
    let mut fibers = Vec::new();
    for f in &p.fibers {
        if f.0.is_one() {
            b = b + f.1.clone();
        } else {
            let reduced = f.1.mod_floor(&f.0);
            b = b + (f.1.clone() - reduced.clone()) / f.0.clone();
            fibers.push(Fiber(f.0.clone(), reduced));
        }
    }
    fibers.push(Fiber(I::one(), b));
    SeifertPresentation {
        genus: p.genus,
        fibers,
        trivial_fibration: false,
    }
}

/// `⟨q1,…,qn,h | [qi,h], qi^αi h^βi, q1⋯qn⟩`.
pub fn fundamental_group<I: ExactInt>(
    p: &SeifertPresentation<I>,
) -> Result<GroupPresentation<I>, SeifertError> {
    if p.genus != 0 {
        return Err(SeifertError::UnsupportedGenus(p.genus));
    }
    let n = p.fibers.len();
    let h = n;
    let mut generators: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    generators.push("h".to_string());
    let one = I::one();
    let mut relators: Vec<Word<I>> = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        relators.push(vec![
            syl(i, one.clone()),
            syl(h, one.clone()),
            syl(i, -one.clone()),
            syl(h, -one.clone()),
        ]);
    }
    for (i, f) in p.fibers.iter().enumerate() {
        relators.push(vec![syl(i, f.0.clone()), syl(h, f.1.clone())]);
    }
    relators.push((0..n).map(|i| syl(i, one.clone())).collect());
    Ok(GroupPresentation::new(generators, relators).expect("generators declared above"))
}

/// Abelianization of the fundamental group.
pub fn first_homology<I: ExactInt>(p: &SeifertPresentation<I>) -> Result<AbelianGroup<I>, SeifertError> {
    Ok(fundamental_group(p)?.abelianize())
}

/// `|α1β2 + α2β1|` for two fibers; zero means infinite (S²×S¹).
pub fn abelian_order_two_fibers<I: ExactInt>(
    p: &SeifertPresentation<I>,
) -> Result<GroupOrder<I>, SeifertError> {
    if p.genus != 0 {
        return Err(SeifertError::UnsupportedGenus(p.genus));
    }
    if p.fibers.len() != 2 {
        return Err(SeifertError::FiberCount {
            expected: 2,
            got: p.fibers.len(),
        });
    }
    let (a, b) = (&p.fibers[0], &p.fibers[1]);
    let d = (a.0.clone() * b.1.clone() + b.0.clone() * a.1.clone()).abs();
    Ok(if d.is_zero() {
        GroupOrder::Infinite
    } else {
        GroupOrder::Finite(d)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundaryLabel<I> {
    Sphere,
    LensSpace(I),
    S2xS1,
    Prism,
    Tetrahedral,
    Other,
}

impl<I: ExactInt> BoundaryLabel<I> {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryLabel::Sphere => "sphere",
            BoundaryLabel::LensSpace(_) => "lens-space",
            BoundaryLabel::S2xS1 => "s2xs1",
            BoundaryLabel::Prism => "prism",
            BoundaryLabel::Tetrahedral => "tetrahedral",
            BoundaryLabel::Other => "other",
        }
    }
}

/// Recognized type of a boundary 3-manifold; `admissible` is `None` when unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryRecognition<I> {
    pub label: BoundaryLabel<I>,
    pub admissible: Option<bool>,
}

impl<I: ExactInt> Serialize for BoundaryRecognition<I> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("label", self.label.name())?;
        if let BoundaryLabel::LensSpace(d) = &self.label {
            m.serialize_entry("order", &d.to_string())?;
        }
        m.serialize_entry("admissible", &self.admissible)?;
        m.end()
    }
}

fn from_order<I: ExactInt>(d: GroupOrder<I>) -> BoundaryRecognition<I> {
    match d {
        GroupOrder::Infinite => BoundaryRecognition {
            label: BoundaryLabel::S2xS1,
            admissible: Some(false),
        },
        GroupOrder::Finite(d) if d.is_one() => BoundaryRecognition {
            label: BoundaryLabel::Sphere,
            admissible: Some(true),
        },
        GroupOrder::Finite(d) => BoundaryRecognition {
            label: BoundaryLabel::LensSpace(d),
            admissible: Some(true),
        },
    }
}

/// Sphere / lens / S²×S¹ for at most two exceptional fibers; prism and
/// tetrahedral by the exceptional-order pattern for three.
///
/// `(1, b)` fibers are absorbed into a neighbouring fiber first, which does
/// not change the manifold.
pub fn recognize_boundary<I: ExactInt>(
    p: &SeifertPresentation<I>,
) -> Result<BoundaryRecognition<I>, SeifertError> {
    if p.genus != 0 {
        return Err(SeifertError::UnsupportedGenus(p.genus));
    }
    let mut b = I::zero();
    let mut exceptional: Vec<Fiber<I>> = Vec::new();
    for f in &p.fibers {
        if f.0.is_one() {
            b = b + f.1.clone();
        } else {
            exceptional.push(f.clone());
        }
    }
    match exceptional.len() {
        0 => Ok(from_order(if b.is_zero() {
            GroupOrder::Infinite
        } else {
            GroupOrder::Finite(b.abs())
        })),
        1 | 2 => {
            let first = &mut exceptional[0];
            first.1 = first.1.clone() + b * first.0.clone();
            if exceptional.len() == 1 {
                let beta = exceptional[0].1.abs();
                return Ok(from_order(if beta.is_zero() {
                    GroupOrder::Infinite
                } else {
                    GroupOrder::Finite(beta)
                }));
            }
            let two = SeifertPresentation {
                genus: 0,
                fibers: exceptional,
                trivial_fibration: false,
            };
            Ok(from_order(abelian_order_two_fibers(&two)?))
        }
        3 => {
            let mut alphas: Vec<I> = exceptional.iter().map(|f| f.0.clone()).collect();
            alphas.sort();
            let two = I::from_i64_exact(2);
            let three = I::from_i64_exact(3);
            let e_nonzero = !euler_number(p).is_zero();
            let label = if alphas[0] == two && alphas[1] == two {
                BoundaryLabel::Prism
            } else if alphas[0] == two && alphas[1] == three && alphas[2] == three {
                BoundaryLabel::Tetrahedral
            } else {
                BoundaryLabel::Other
            };
            let admissible = match label {
                BoundaryLabel::Other => None,
                _ => Some(e_nonzero),
            };
            Ok(BoundaryRecognition { label, admissible })
        }
        _ => Ok(BoundaryRecognition {
            label: BoundaryLabel::Other,
            admissible: None,
        }),
    }
}

/// Human-readable Euler number.
pub fn euler_number_text<I: ExactInt>(p: &SeifertPresentation<I>) -> String {
    format_ratio(&euler_number(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type P = SeifertPresentation<BigInt>;

    fn p(v: &[(i64, i64)]) -> P {
        P::from_pairs(v).unwrap()
    }

    fn q(n: i64, d: i64) -> Ratio<BigInt> {
        Ratio::new(n.into(), d.into())
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn sl2_examples() {
        let m = sl2_complete(&big(2), &big(1)).unwrap();
        assert_eq!((m.gamma.clone(), m.delta.clone()), (big(1), big(0)));
        let m = sl2_complete(&big(1), &big(0)).unwrap();
        assert_eq!((m.gamma.clone(), m.delta.clone()), (big(0), big(1)));
        let m = sl2_complete(&big(5), &big(3)).unwrap();
        assert_eq!((m.gamma.clone(), m.delta.clone()), (big(2), big(-1)));
        assert!(sl2_complete(&big(4), &big(2)).is_err());
        assert!(sl2_complete(&big(0), &big(1)).is_err());
    }

    #[test]
    fn sl2_negative_beta() {
        let m = sl2_complete(&7i64, &-3).unwrap();
        assert_eq!(m.determinant(), 1);
        assert!((0..7).contains(&m.gamma));
    }

    #[test]
    fn meridian_examples() {
        assert_eq!(meridian_coefficients(&2i64, &1).unwrap(), (2, 1));
        assert_eq!(meridian_coefficients(&3i64, &-2).unwrap(), (3, -2));
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_number(&p(&[(2, 1), (2, -1)])), q(0, 1));
        assert_eq!(euler_number(&p(&[(2, 1), (3, 1), (5, 1)])), q(-31, 30));
        assert_eq!(euler_number(&p(&[(1, -1)])), q(1, 1));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&p(&[(2, -1)])), p(&[(2, 1), (1, -1)]));
        assert_eq!(normalize(&p(&[(1, 0)])), p(&[(1, 0)]));
        assert_eq!(normalize(&p(&[(3, 4)])), p(&[(3, 1), (1, 1)]));
    }

    #[test]
    fn pi1_shape_and_examples() {
        let g = fundamental_group(&p(&[(2, 1), (3, -1)])).unwrap();
        assert_eq!(g.generators().len(), 3);
        assert_eq!(g.relators().len(), 5);
        assert_eq!(g.rendered_relators()[2], "q1^2 h^1");
        assert!(first_homology(&p(&[(1, 1)])).unwrap().is_trivial());
        let z = first_homology(&p(&[(1, 0)])).unwrap();
        assert_eq!((z.free_rank, z.torsion.len()), (1, 0));
        assert_eq!(
            first_homology(&p(&[(2, 1), (2, 1)])).unwrap().order(),
            GroupOrder::Finite(big(4))
        );
        let mut g1 = p(&[(2, 1)]);
        g1.genus = 1;
        assert_eq!(fundamental_group(&g1), Err(SeifertError::UnsupportedGenus(1)));
    }

    #[test]
    fn two_fiber_orders() {
        assert_eq!(abelian_order_two_fibers(&p(&[(2, 1), (3, 1)])).unwrap(), GroupOrder::Finite(big(5)));
        assert_eq!(abelian_order_two_fibers(&p(&[(2, 1), (2, -1)])).unwrap(), GroupOrder::Infinite);
        assert_eq!(abelian_order_two_fibers(&p(&[(1, 0), (1, 1)])).unwrap(), GroupOrder::Finite(big(1)));
        assert!(abelian_order_two_fibers(&p(&[(1, 0)])).is_err());
    }

    #[test]
    fn recognition_examples() {
        let r = recognize_boundary(&p(&[(2, -1), (2, 1), (3, 1)])).unwrap();
        assert_eq!((r.label, r.admissible), (BoundaryLabel::Prism, Some(true)));
        let r = recognize_boundary(&p(&[(2, 1), (2, -1)])).unwrap();
        assert_eq!((r.label, r.admissible), (BoundaryLabel::S2xS1, Some(false)));
        let r = recognize_boundary(&p(&[(1, 1)])).unwrap();
        assert_eq!((r.label, r.admissible), (BoundaryLabel::Sphere, Some(true)));
        let r = recognize_boundary(&p(&[(2, 1), (3, 1)])).unwrap();
        assert_eq!(r.label, BoundaryLabel::LensSpace(big(5)));
        assert!(P::from_pairs(&[(2, -1), (2, 1), (3, 0)]).is_err());
        let r = recognize_boundary(&p(&[(2, 1), (3, 1), (7, 1)])).unwrap();
        assert_eq!((r.label, r.admissible), (BoundaryLabel::Other, None));
        let r = recognize_boundary(&p(&[(2, 1), (3, -1), (3, 1), (1, -1)])).unwrap();
        assert_eq!(r.label, BoundaryLabel::Tetrahedral);
    }

    #[test]
    fn trivial_fibration_needs_flag() {
        assert_eq!(P::new(0, vec![]), Err(SeifertError::UnflaggedEmpty));
        let t: P = serde_json::from_str(r#"{"genus":0,"fibers":[],"trivial_fibration":true}"#).unwrap();
        assert_eq!(recognize_boundary(&t).unwrap().label, BoundaryLabel::S2xS1);
        assert!(serde_json::from_str::<P>(r#"{"genus":0,"fibers":[]}"#).is_err());
    }

    #[test]
    fn json_shape() {
        let x: P = serde_json::from_str(r#"{"genus":0,"fibers":[[2,1],[3,-1]]}"#).unwrap();
        assert_eq!(x, p(&[(2, 1), (3, -1)]));
        assert_eq!(serde_json::to_string(&x).unwrap(), r#"{"genus":0,"fibers":[[2,1],[3,-1]]}"#);
        assert!(serde_json::from_str::<P>(r#"{"genus":0,"fibers":[[2,2]]}"#).is_err());
    }
}
