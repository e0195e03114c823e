//! Singular multigraphs in the orbit 3-sphere and the classification they determine.
//!
//! Vertices are fixed points, edges are curves of finite isotropy `Z_k`.
//! Validation enforces the structural bounds (two or three fixed points,
//! degree at most three, no free closed curves, configurations (d) and (g)
//! of the two-vertex list excluded), and [`classify`] dispatches to the
//! suspension, weighted projective and loop-and-spur branches.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::invariants::{is_realizable, InvariantTuple};
use crate::lattice::GroupOrder;
use crate::presentation::{syl, GroupPresentation};
use crate::rational::int_text;
use crate::scalar::ExactInt;
use crate::seifert::{recognize_boundary, BoundaryLabel, BoundaryRecognition, Fiber, SeifertPresentation};
use crate::wcp::{weights_from_invariants, QuotientDescriptor, WeightTriple};

/// Machine-readable rejection tags.
pub mod tags {
    pub const AT_LEAST_TWO_FIXED_POINTS: &str = "at-least-two-fixed-points";
    pub const THREE_POINT_BOUND: &str = "three-point-bound";
    pub const DEGREE_BOUND: &str = "degree-bound";
    pub const NO_CLOSED_CURVES: &str = "no-closed-curves";
    pub const FIG5_DG: &str = "fig5-dg";
    pub const THREE_POINT_STRUCTURE: &str = "three-point-structure";
    pub const PAIRWISE_UNEQUAL: &str = "pairwise-unequal";
    pub const EDGE_ORDER_MISMATCH: &str = "edge-order-mismatch";
    pub const S2XS1_BOUNDARY: &str = "s2xs1-boundary";
    pub const K_PLUS_ONE_FIXED_POINTS: &str = "k-plus-one-fixed-points";
    pub const OUT_OF_CLASSIFIED_RANGE: &str = "out-of-classified-range";
}

/// Input that does not describe a graph, or lacks data a branch needs.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {edge} references vertex {vertex}, but there are only {count} vertices")]
    DanglingEndpoint { edge: usize, vertex: usize, count: usize },
    #[error("edge {edge} has isotropy order {order}; singular edges need order at least 2")]
    BadOrder { edge: usize, order: u64 },
    #[error("edge {0}: give exactly one of \"between\", \"loop\" or \"closed\"")]
    AmbiguousEdge(usize),
    #[error("fixed-point-homogeneous graphs need soul isotropy data")]
    MissingSoul,
    #[error("soul isotropy order must be at least 1")]
    BadSoul,
    #[error("the three-vertex branch needs an invariant tuple")]
    MissingInvariants,
    #[error("the loop-and-spur branch needs the spur beta (edge \"beta\" or graph \"spur_beta\")")]
    MissingSpurBeta,
    #[error("spur ({alpha}, {beta}) is not a coprime pair")]
    BadSpur { alpha: String, beta: String },
    #[error("loop order {0} is outside the supported range 2..=3")]
    LoopOrderRange(u64),
    #[error("soul circle weights must be coprime and nonzero")]
    BadSoulWeights,
    #[error("graph is not valid: {0}")]
    NotValid(String),
    #[error("graph is fixed-point homogeneous; completion does not apply")]
    FixedPointHomogeneous,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeEnds {
    Between(usize, usize),
    Loop(usize),
    /// A closed curve of finite isotropy through no fixed point.
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge<I> {
    pub ends: EdgeEnds,
    pub order: u64,
    pub beta: Option<I>,
    pub is_virtual: bool,
}

impl<I: ExactInt> GraphEdge<I> {
    pub fn between(u: usize, v: usize, order: u64) -> Self {
        let ends = if u == v {
            EdgeEnds::Loop(u)
        } else {
            EdgeEnds::Between(u.min(v), u.max(v))
        };
        Self {
            ends,
            order,
            beta: None,
            is_virtual: false,
        }
    }

    pub fn looped(v: usize, order: u64) -> Self {
        Self {
            ends: EdgeEnds::Loop(v),
            order,
            beta: None,
            is_virtual: false,
        }
    }

    pub fn closed(order: u64) -> Self {
        Self {
            ends: EdgeEnds::Closed,
            order,
            beta: None,
            is_virtual: false,
        }
    }

    pub fn with_beta(mut self, beta: I) -> Self {
        self.beta = Some(beta);
        self
    }

    fn touches(&self, v: usize) -> usize {
        match self.ends {
            EdgeEnds::Between(a, b) => usize::from(a == v) + usize::from(b == v),
            EdgeEnds::Loop(a) => 2 * usize::from(a == v),
            EdgeEnds::Closed => 0,
        }
    }
}

/// Isotropy of the soul orbit in the fixed-point-homogeneous case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SoulIsotropy {
    Finite(u64),
    /// Whole circle; the optional weights are those of its isotropy action on the normal sphere.
    Circle { weights: Option<(i64, i64)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularGraph<I> {
    vertex_count: usize,
    edges: Vec<GraphEdge<I>>,
    boundary_fixed_set: bool,
    soul: Option<SoulIsotropy>,
    spur_beta: Option<I>,
}

impl<I: ExactInt> SingularGraph<I> {
    pub fn new(vertex_count: usize, edges: Vec<GraphEdge<I>>) -> Result<Self, GraphError> {
        for (i, e) in edges.iter().enumerate() {
            if e.order < 2 && !(e.is_virtual && e.order == 1) {
                return Err(GraphError::BadOrder { edge: i, order: e.order });
            }
            let ends: Vec<usize> = match e.ends {
                EdgeEnds::Between(a, b) => vec![a, b],
                EdgeEnds::Loop(a) => vec![a],
                EdgeEnds::Closed => vec![],
            };
            if let Some(&v) = ends.iter().find(|&&v| v >= vertex_count) {
                return Err(GraphError::DanglingEndpoint {
                    edge: i,
                    vertex: v,
                    count: vertex_count,
                });
            }
        }
        Ok(Self {
            vertex_count,
            edges,
            boundary_fixed_set: false,
            soul: None,
            spur_beta: None,
        })
    }

    /// A fixed-point-homogeneous action: the fixed set is a boundary component of the orbit space.
    pub fn fixed_point_homogeneous(soul: SoulIsotropy) -> Result<Self, GraphError> {
        match soul {
            SoulIsotropy::Finite(0) => return Err(GraphError::BadSoul),
            SoulIsotropy::Circle { weights: Some((p, q)) }
                if p == 0 || q == 0 || num_integer::gcd(p, q) != 1 =>
            {
                return Err(GraphError::BadSoulWeights)
            }
            _ => {}
        }
        Ok(Self {
            vertex_count: 0,
            edges: Vec::new(),
            boundary_fixed_set: true,
            soul: Some(soul),
            spur_beta: None,
        })
    }

    pub fn with_spur_beta(mut self, beta: I) -> Self {
        self.spur_beta = Some(beta);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[GraphEdge<I>] {
        &self.edges
    }

    pub fn has_boundary_fixed_set(&self) -> bool {
        self.boundary_fixed_set
    }

    pub fn soul(&self) -> Option<&SoulIsotropy> {
        self.soul.as_ref()
    }

    pub fn spur_beta(&self) -> Option<&I> {
        self.spur_beta.as_ref()
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|e| e.touches(v)).sum()
    }

    fn loops(&self) -> Vec<(usize, &GraphEdge<I>)> {
        self.edges
            .iter()
            .filter_map(|e| match e.ends {
                EdgeEnds::Loop(v) => Some((v, e)),
                _ => None,
            })
            .collect()
    }

    fn between(&self) -> Vec<(usize, usize, &GraphEdge<I>)> {
        self.edges
            .iter()
            .filter_map(|e| match e.ends {
                EdgeEnds::Between(a, b) => Some((a, b, e)),
                _ => None,
            })
            .collect()
    }
}

/// A rejection with its machine-readable tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub tag: &'static str,
    pub reason: String,
}

impl Rejection {
    fn new(tag: &'static str, reason: impl Into<String>) -> Self {
        Self {
            tag,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    Valid,
    Rejected(Rejection),
}

/// Structural checks, in a fixed order; the first failure is reported.
pub fn validate_graph<I: ExactInt>(g: &SingularGraph<I>) -> Validation {
    use Validation::Rejected as R;
    if g.boundary_fixed_set {
        return Validation::Valid;
    }
    let n = g.vertex_count;
    if n < 2 {
        return R(Rejection::new(
            tags::AT_LEAST_TWO_FIXED_POINTS,
            format!("{n} fixed point(s); an action with discrete fixed set has at least two"),
        ));
    }
    if n > 3 {
        return R(Rejection::new(
            tags::THREE_POINT_BOUND,
            format!("{n} fixed points; at most three points have small spaces of directions"),
        ));
    }
    if let Some(v) = (0..n).find(|&v| g.degree(v) > 3) {
        return R(Rejection::new(
            tags::DEGREE_BOUND,
            format!("vertex {v} has degree {}; at most three curves meet at a fixed point", g.degree(v)),
        ));
    }
    if g.edges.iter().any(|e| e.ends == EdgeEnds::Closed) {
        return R(Rejection::new(
            tags::NO_CLOSED_CURVES,
            "a closed curve of finite isotropy avoids every fixed point",
        ));
    }
    let looped: BTreeSet<usize> = g.loops().iter().map(|(v, _)| *v).collect();
    if looped.len() >= 2 {
        return R(Rejection::new(
            tags::FIG5_DG,
            "loops at two distinct fixed points; branched covers over both would give four small points",
        ));
    }
    if n == 3 {
        if !looped.is_empty() {
            return R(Rejection::new(
                tags::THREE_POINT_STRUCTURE,
                "with three fixed points no loop is possible",
            ));
        }
        let mut pairs = BTreeSet::new();
        for (a, b, _) in g.between() {
            if !pairs.insert((a, b)) {
                return R(Rejection::new(
                    tags::THREE_POINT_STRUCTURE,
                    format!("two curves join fixed points {a} and {b}"),
                ));
            }
        }
    }
    Validation::Valid
}

fn require_valid<I: ExactInt>(g: &SingularGraph<I>) -> Result<(), GraphError> {
    match validate_graph(g) {
        Validation::Valid => Ok(()),
        Validation::Rejected(r) => Err(GraphError::NotValid(r.reason)),
    }
}

/// Adds order-1 virtual edges: `K3` on three vertices, a spur for a lone loop.
pub fn virtual_edge_completion<I: ExactInt>(g: &SingularGraph<I>) -> Result<SingularGraph<I>, GraphError> {
    require_valid(g)?;
    if g.boundary_fixed_set {
        return Err(GraphError::FixedPointHomogeneous);
    }
    let mut out = g.clone();
    let virt = |a: usize, b: usize, beta: Option<I>| GraphEdge {
        ends: EdgeEnds::Between(a, b),
        order: 1,
        beta,
        is_virtual: true,
    };
    if g.vertex_count == 3 {
        let present: BTreeSet<(usize, usize)> = g.between().iter().map(|(a, b, _)| (*a, *b)).collect();
        for pair in [(0, 1), (1, 2), (0, 2)] {
            if !present.contains(&pair) {
                out.edges.push(virt(pair.0, pair.1, None));
            }
        }
    } else if let Some(&(v, _)) = g.loops().first() {
        if g.between().is_empty() {
            let w = 1 - v;
            out.edges.push(virt(v.min(w), v.max(w), g.spur_beta.clone()));
        }
    }
    Ok(out)
}

/// Result of the orbifold fundamental group computation for a loop of order `k` and spur `(α, β)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "I: ExactInt")]
pub struct LoopAndSpurGroup<I: ExactInt> {
    #[serde(with = "int_text")]
    pub pi1_order: I,
    pub admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejection: Option<Rejection>,
}

/// Presentation of the orbifold group of the two cone pieces, glued along `q3` and `h`.
fn loop_and_spur_presentation<I: ExactInt>(k: &I, alpha: &I, beta: &I) -> GroupPresentation<I> {
    let one = I::one();
    let (q1, q2, q3, h) = (0, 1, 2, 3);
    let comm = |g: usize, e: I| vec![syl(h, one.clone()), syl(g, e.clone()), syl(h, -one.clone()), syl(g, -e)];
    let relators = vec![
        comm(q1, one.clone()),
        comm(q2, one.clone()),
        comm(q3, one.clone()),
        vec![syl(q1, k.clone()), syl(h, -one.clone())],
        vec![syl(q2, k.clone()), syl(h, one.clone())],
        vec![syl(q3, alpha.clone()), syl(h, beta.clone())],
        vec![syl(q1, one.clone()), syl(q2, one.clone()), syl(q3, one.clone())],
        comm(q3, -one.clone()),
        vec![syl(q3, -alpha.clone()), syl(h, -beta.clone())],
        vec![syl(q3, -one.clone())],
    ];
    GroupPresentation::new(
        ["q1", "q2", "q3", "h"].map(String::from).to_vec(),
        relators,
    )
    .expect("four generators declared")
}

/// `⟨q1, h | [h, q1], q1^k h^-1, h^β⟩`, the reduced form of the glued presentation.
pub fn loop_and_spur_reduced<I: ExactInt>(k: &I, beta: &I) -> GroupPresentation<I> {
    let one = I::one();
    GroupPresentation::new(
        vec!["q1".into(), "h".into()],
        vec![
            vec![syl(1, one.clone()), syl(0, one.clone()), syl(1, -one.clone()), syl(0, -one.clone())],
            vec![syl(0, k.clone()), syl(1, -one.clone())],
            vec![syl(1, beta.clone())],
        ],
    )
    .expect("two generators declared")
}

/// Order `k|β|` of the orbifold fundamental group; admissible only for `k = 2`, `β ≠ 0`.
///
/// The closed formula is checked against the abelianization of the glued
/// presentation; a disagreement is a bug and panics.
pub fn loop_and_spur_pi1<I: ExactInt>(k: u64, alpha: &I, beta: &I) -> Result<LoopAndSpurGroup<I>, GraphError> {
    if !(2..=3).contains(&k) {
        return Err(GraphError::LoopOrderRange(k));
    }
    if !alpha.is_positive() || !alpha.gcd(beta).is_one() {
        return Err(GraphError::BadSpur {
            alpha: alpha.to_string(),
            beta: beta.to_string(),
        });
    }
    let kk = I::from_u64(k).expect("small");
    let closed = kk.clone() * beta.abs();
    let pipeline = loop_and_spur_presentation(&kk, alpha, beta).abelianize();
    let expected = if closed.is_zero() {
        GroupOrder::Infinite
    } else {
        GroupOrder::Finite(closed.clone())
    };
    assert_eq!(pipeline.order(), expected, "glued presentation disagrees with k|beta|");
    assert!(pipeline.is_cyclic(), "glued presentation is not cyclic");
    let rejection = if beta.is_zero() {
        Some(Rejection::new(
            tags::S2XS1_BOUNDARY,
            "beta = 0 makes the boundary of the loop neighbourhood S2 x S1",
        ))
    } else if k != 2 {
        Some(Rejection::new(
            tags::K_PLUS_ONE_FIXED_POINTS,
            format!("the universal cover would carry k+1 = {} fixed points, more than three", k + 1),
        ))
    } else {
        None
    };
    Ok(LoopAndSpurGroup {
        pi1_order: closed,
        admissible: rejection.is_none(),
        rejection,
    })
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "I: ExactInt", tag = "kind", rename_all = "kebab-case")]
pub enum ClassificationResult<I: ExactInt> {
    /// Spherical suspension of `S³/Z_k`.
    FixedPointHomogeneousSuspension { k: u64 },
    /// Finite quotient of a weighted projective plane; weights known only when supplied.
    FixedPointHomogeneousWcp {
        descriptor: Option<QuotientDescriptor<I>>,
    },
    /// Suspension of the space of directions at either fixed point.
    Suspension {
        edge_orders: Vec<u64>,
        space_of_directions: Option<SeifertPresentation<I>>,
        boundary: Option<BoundaryRecognition<I>>,
    },
    WcpQuotient {
        descriptor: QuotientDescriptor<I>,
        invariants: InvariantTuple<I>,
    },
    LoopAndSpur {
        k: u64,
        #[serde(with = "int_text")]
        beta: I,
        spur: Fiber<I>,
        #[serde(with = "int_text")]
        orbifold_pi1_order: I,
        double_cover: QuotientDescriptor<I>,
    },
    Rejected(Rejection),
}

impl<I: ExactInt> ClassificationResult<I> {
    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            ClassificationResult::Rejected(r) => Some(r),
            _ => None,
        }
    }
}

fn rejected<I: ExactInt>(r: Rejection) -> Result<ClassificationResult<I>, GraphError> {
    Ok(ClassificationResult::Rejected(r))
}

/// Dispatches a graph (and, for three fixed points, its invariant tuple) to its branch.
pub fn classify<I: ExactInt>(
    g: &SingularGraph<I>,
    t: Option<&InvariantTuple<I>>,
) -> Result<ClassificationResult<I>, GraphError> {
    if let Validation::Rejected(r) = validate_graph(g) {
        return rejected(r);
    }
    if g.boundary_fixed_set {
        return match g.soul.as_ref().ok_or(GraphError::MissingSoul)? {
            SoulIsotropy::Finite(k) => Ok(ClassificationResult::FixedPointHomogeneousSuspension { k: *k }),
            SoulIsotropy::Circle { weights } => {
                let descriptor = match weights {
                    Some((p, q)) => Some(QuotientDescriptor::unquotiented(
                        WeightTriple::of(*p, *q, -1).map_err(|_| GraphError::BadSoulWeights)?,
                    )),
                    None => None,
                };
                Ok(ClassificationResult::FixedPointHomogeneousWcp { descriptor })
            }
        };
    }
    let c = virtual_edge_completion(g)?;
    if c.vertex_count == 3 {
        return classify_three_points(&c, t.ok_or(GraphError::MissingInvariants)?);
    }
    if let Some(&(_, lp)) = c.loops().first() {
        return classify_loop_and_spur(&c, lp);
    }
    classify_suspension(&c)
}

fn classify_three_points<I: ExactInt>(
    c: &SingularGraph<I>,
    t: &InvariantTuple<I>,
) -> Result<ClassificationResult<I>, GraphError> {
    if t.len() != 3 {
        return rejected(Rejection::new(
            tags::OUT_OF_CLASSIFIED_RANGE,
            format!("{} invariants given; classification covers triples only", t.len()),
        ));
    }
    if !is_realizable(t) {
        return rejected(Rejection::new(
            tags::PAIRWISE_UNEQUAL,
            format!("invariants {t} are not pairwise unequal"),
        ));
    }
    let mut orders: Vec<u64> = c.between().iter().map(|(_, _, e)| e.order).collect();
    let mut alphas: Vec<u64> = t
        .alphas()
        .iter()
        .map(|a| a.to_u64().unwrap_or(u64::MAX))
        .collect();
    orders.sort_unstable();
    alphas.sort_unstable();
    if orders != alphas {
        return rejected(Rejection::new(
            tags::EDGE_ORDER_MISMATCH,
            format!("edge orders {orders:?} differ from invariant denominators {alphas:?}"),
        ));
    }
    let descriptor = weights_from_invariants(t).expect("realizable triple has a kernel");
    Ok(ClassificationResult::WcpQuotient {
        descriptor,
        invariants: t.clone(),
    })
}

fn classify_loop_and_spur<I: ExactInt>(
    c: &SingularGraph<I>,
    lp: &GraphEdge<I>,
) -> Result<ClassificationResult<I>, GraphError> {
    let (_, _, spur) = c.between()[0];
    let beta = spur
        .beta
        .clone()
        .or_else(|| c.spur_beta.clone())
        .ok_or(GraphError::MissingSpurBeta)?;
    let alpha = I::from_u64(spur.order).expect("small");
    if lp.order > 3 {
        return rejected(Rejection::new(
            tags::K_PLUS_ONE_FIXED_POINTS,
            format!("the universal cover would carry k+1 = {} fixed points, more than three", lp.order + 1),
        ));
    }
    let group = loop_and_spur_pi1(lp.order, &alpha, &beta)?;
    if let Some(r) = group.rejection {
        return rejected(r);
    }
    let cover = InvariantTuple::new(vec![
        Ratio::from_integer(I::zero()),
        Ratio::new(-beta.clone(), alpha.clone()),
        Ratio::new(beta.clone(), alpha.clone()),
    ])
    .expect("three entries");
    let double_cover = weights_from_invariants(&cover).expect("beta != 0 makes the cover realizable");
    Ok(ClassificationResult::LoopAndSpur {
        k: lp.order,
        beta: beta.clone(),
        spur: Fiber(alpha, beta),
        orbifold_pi1_order: group.pi1_order,
        double_cover,
    })
}

fn classify_suspension<I: ExactInt>(c: &SingularGraph<I>) -> Result<ClassificationResult<I>, GraphError> {
    let mut edges: Vec<(u64, Option<I>)> = c
        .between()
        .iter()
        .map(|(_, _, e)| (e.order, e.beta.clone()))
        .collect();
    edges.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let edge_orders: Vec<u64> = edges.iter().map(|e| e.0).collect();
    let all_beta = !edges.is_empty() && edges.iter().all(|e| e.1.is_some());
    if !all_beta {
        return Ok(ClassificationResult::Suspension {
            edge_orders,
            space_of_directions: None,
            boundary: None,
        });
    }
    let fibers = edges
        .into_iter()
        .map(|(o, b)| Fiber(I::from_u64(o).expect("small"), b.expect("checked")))
        .collect();
    let sigma = SeifertPresentation::new(0, fibers).map_err(|e| GraphError::NotValid(e.to_string()))?;
    let boundary = recognize_boundary(&sigma).expect("genus zero");
    if boundary.label == BoundaryLabel::S2xS1 {
        return rejected(Rejection::new(
            tags::S2XS1_BOUNDARY,
            format!("space of directions {sigma} is S2 x S1, which carries no positive curvature"),
        ));
    }
    Ok(ClassificationResult::Suspension {
        edge_orders,
        space_of_directions: Some(sigma),
        boundary: Some(boundary),
    })
}

// ---------------------------------------------------------------- JSON

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EdgeRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    between: Option<[usize; 2]>,
    #[serde(default, rename = "loop", skip_serializing_if = "Option::is_none")]
    looped: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    closed: bool,
    order: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<serde_json::Value>,
    #[serde(default, rename = "virtual", skip_serializing_if = "std::ops::Not::not")]
    is_virtual: bool,
}

#[derive(Deserialize, Serialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum SoulRepr {
    Order(u64),
    Circle(CircleRepr),
}

#[derive(Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
struct CircleRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<(i64, i64)>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GraphRepr {
    #[serde(default)]
    vertices: usize,
    #[serde(default)]
    edges: Vec<EdgeRepr>,
    #[serde(default)]
    boundary_fixed_set: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    soul: Option<SoulRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spur_beta: Option<serde_json::Value>,
}

fn int_from_json<I: ExactInt>(v: &serde_json::Value) -> Result<I, String> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(I::from_i64_exact)
            .ok_or_else(|| format!("not an integer: {n}")),
        serde_json::Value::String(s) => s.trim().parse().map_err(|_| format!("not an integer: {s:?}")),
        other => Err(format!("not an integer: {other}")),
    }
}

fn int_to_json<I: ExactInt>(v: &I) -> serde_json::Value {
    match v.to_i64() {
        Some(x) => x.into(),
        None => v.to_string().into(),
    }
}

/// Parse failure of the graph JSON.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphParseError {
    #[error("malformed graph JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl<I: ExactInt> SingularGraph<I> {
    pub fn from_json_value(v: serde_json::Value) -> Result<Self, GraphParseError> {
        let r: GraphRepr = serde_json::from_value(v).map_err(|e| GraphParseError::Json(e.to_string()))?;
        if r.boundary_fixed_set {
            let soul = match r.soul.ok_or(GraphError::MissingSoul)? {
                SoulRepr::Order(k) => SoulIsotropy::Finite(k),
                SoulRepr::Circle(c) => SoulIsotropy::Circle { weights: c.weights },
            };
            if r.vertices != 0 || !r.edges.is_empty() {
                return Err(GraphParseError::Json(
                    "fixed-point-homogeneous graphs carry soul data only".into(),
                ));
            }
            return Ok(SingularGraph::fixed_point_homogeneous(soul)?);
        }
        if r.soul.is_some() {
            return Err(GraphParseError::Json("soul data needs boundary_fixed_set".into()));
        }
        let mut edges = Vec::with_capacity(r.edges.len());
        for (i, e) in r.edges.into_iter().enumerate() {
            let ends = match (e.between, e.looped, e.closed) {
                (Some([a, b]), None, false) if a == b => EdgeEnds::Loop(a),
                (Some([a, b]), None, false) => EdgeEnds::Between(a.min(b), a.max(b)),
                (None, Some(v), false) => EdgeEnds::Loop(v),
                (None, None, true) => EdgeEnds::Closed,
                _ => return Err(GraphError::AmbiguousEdge(i).into()),
            };
            let beta = e.beta.as_ref().map(int_from_json).transpose().map_err(GraphParseError::Json)?;
            edges.push(GraphEdge {
                ends,
                order: e.order,
                beta,
                is_virtual: e.is_virtual,
            });
        }
        let mut g = SingularGraph::new(r.vertices, edges)?;
        g.spur_beta = r
            .spur_beta
            .as_ref()
            .map(int_from_json)
            .transpose()
            .map_err(GraphParseError::Json)?;
        Ok(g)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let soul = self.soul.as_ref().map(|s| match s {
            SoulIsotropy::Finite(k) => SoulRepr::Order(*k),
            SoulIsotropy::Circle { weights } => SoulRepr::Circle(CircleRepr { weights: *weights }),
        });
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let (between, looped, closed) = match e.ends {
                    EdgeEnds::Between(a, b) => (Some([a, b]), None, false),
                    EdgeEnds::Loop(v) => (None, Some(v), false),
                    EdgeEnds::Closed => (None, None, true),
                };
                EdgeRepr {
                    between,
                    looped,
                    closed,
                    order: e.order,
                    beta: e.beta.as_ref().map(int_to_json),
                    is_virtual: e.is_virtual,
                }
            })
            .collect();
        serde_json::to_value(GraphRepr {
            vertices: self.vertex_count,
            edges,
            boundary_fixed_set: self.boundary_fixed_set,
            soul,
            spur_beta: self.spur_beta.as_ref().map(int_to_json),
        })
        .expect("graph serializes")
    }
}
