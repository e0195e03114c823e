//! q-extents: the maximum over q-point configurations of the average pairwise distance.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::space::SampledMetricSpace;
use super::LabError;
use crate::scalar::Real;

/// Largest sample on which xt₃ is enumerated exactly.
pub const EXACT_TRIPLES_UP_TO: usize = 300;
/// Restarts of the exchange ascent.
pub const RESTARTS: usize = 64;
const EXACT_BUDGET: u128 = 4_500_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExtentMethod {
    Exact,
    Heuristic { restarts: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtentReport<F> {
    pub q: usize,
    pub value: F,
    pub witness: Vec<usize>,
    pub method: ExtentMethod,
    pub sample_size: usize,
}

/// Average pairwise distance of a tuple, summed in a fixed order.
pub fn average_distance<F: Real>(space: &SampledMetricSpace<F>, tuple: &[usize]) -> F {
    let q = tuple.len();
    if q < 2 {
        return F::zero();
    }
    let mut s = F::zero();
    for a in 0..q {
        for b in a + 1..q {
            s = s + space.d(tuple[a], tuple[b]);
        }
    }
    s / F::of((q * (q - 1) / 2) as f64)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// xt_q with the method chosen by size: pairs always exactly, triples exactly up to
/// [`EXACT_TRIPLES_UP_TO`] points, larger q exactly while the tuple count is small.
pub fn extent<F: Real>(space: &SampledMetricSpace<F>, q: usize, seed: u64) -> Result<ExtentReport<F>, LabError> {
    let n = space.len();
    if q < 2 || q > n {
        return Err(LabError::ExtentOrder(q, n));
    }
    let exact = match q {
        2 => true,
        3 => n <= EXACT_TRIPLES_UP_TO,
        _ => binomial(n, q) <= EXACT_BUDGET,
    };
    Ok(if exact { extent_exact(space, q) } else { extent_heuristic(space, q, RESTARTS, seed) })
}

fn better<F: Real>(a: (F, Vec<usize>), b: (F, Vec<usize>)) -> (F, Vec<usize>) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Exhaustive maximum over all q-subsets.
pub fn extent_exact<F: Real>(space: &SampledMetricSpace<F>, q: usize) -> ExtentReport<F> {
    let n = space.len();
    assert!(q >= 2 && q <= n, "exact extent needs 2 ≤ q ≤ N");
    let (_, witness) = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut best = (F::neg_infinity(), Vec::new());
            let mut tuple = vec![first];
            let mut acc = vec![F::zero()];
            subsets(space, q, &mut tuple, &mut acc, &mut best);
            best
        })
        .reduce(|| (F::neg_infinity(), Vec::new()), better);
    let value = average_distance(space, &witness);
    ExtentReport { q, value, witness, method: ExtentMethod::Exact, sample_size: n }
}

fn subsets<F: Real>(
    space: &SampledMetricSpace<F>,
    q: usize,
    tuple: &mut Vec<usize>,
    acc: &mut Vec<F>,
    best: &mut (F, Vec<usize>),
) {
    let sum = *acc.last().expect("nonempty");
    if tuple.len() == q {
        if sum > best.0 {
            *best = (sum, tuple.clone());
        }
        return;
    }
    let last = *tuple.last().expect("nonempty");
    for next in last + 1..space.len() {
        if space.len() - next < q - tuple.len() {
            break;
        }
        let add = tuple.iter().fold(F::zero(), |s, &t| s + space.d(t, next));
        tuple.push(next);
        acc.push(sum + add);
        subsets(space, q, tuple, acc, best);
        tuple.pop();
        acc.pop();
    }
}

/// Best of `restarts` single-point exchange ascents from seeded random q-subsets.
pub fn extent_heuristic<F: Real>(
    space: &SampledMetricSpace<F>,
    q: usize,
    restarts: usize,
    seed: u64,
) -> ExtentReport<F> {
    let n = space.len();
    assert!(q >= 2 && q <= n, "heuristic extent needs 2 ≤ q ≤ N");
    let (_, witness) = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let start = sample(&mut rng, n, q).into_vec();
            let w = ascend(space, start);
            (average_distance(space, &w), w)
        })
        .reduce(|| (F::neg_infinity(), Vec::new()), better);
    let value = average_distance(space, &witness);
    ExtentReport { q, value, witness, method: ExtentMethod::Heuristic { restarts, seed }, sample_size: n }
}

/// Replaces one point at a time by the best sample point until no move improves;
/// at that fixed point, re-optimizes every pair of slots with the rest held fixed
/// and resumes if that improved the tuple.
fn ascend<F: Real>(space: &SampledMetricSpace<F>, mut tuple: Vec<usize>) -> Vec<usize> {
    loop {
        while single_moves(space, &mut tuple) {}
        if !pair_move(space, &mut tuple) {
            tuple.sort_unstable();
            return tuple;
        }
    }
}

/// Gains below this are rounding noise; accepting them lets moves cycle.
fn slack<F: Real>(v: F) -> F {
    F::epsilon() * F::of(64.0) * (v.abs() + F::one())
}

fn single_moves<F: Real>(space: &SampledMetricSpace<F>, tuple: &mut [usize]) -> bool {
    let mut moved = false;
    for slot in 0..tuple.len() {
        let gain = |c: usize| {
            tuple.iter().enumerate().filter(|&(s, _)| s != slot).fold(F::zero(), |acc, (_, &t)| acc + space.d(c, t))
        };
        let current = gain(tuple[slot]);
        let mut best = (current + slack(current), tuple[slot]);
        for c in 0..space.len() {
            if tuple.contains(&c) {
                continue;
            }
            let g = gain(c);
            if g > best.0 {
                best = (g, c);
            }
        }
        if best.1 != tuple[slot] {
            tuple[slot] = best.1;
            moved = true;
        }
    }
    moved
}

fn pair_move<F: Real>(space: &SampledMetricSpace<F>, tuple: &mut [usize]) -> bool {
    let n = space.len();
    let q = tuple.len();
    for a in 0..q {
        for b in a + 1..q {
            let rest: Vec<usize> = (0..q).filter(|&s| s != a && s != b).map(|s| tuple[s]).collect();
            let pull: Vec<F> = (0..n).map(|c| rest.iter().fold(F::zero(), |acc, &t| acc + space.d(c, t))).collect();
            let score = |y: usize, z: usize| pull[y] + pull[z] + space.d(y, z);
            let current = score(tuple[a], tuple[b]);
            let mut best = (current + slack(current), tuple[a], tuple[b]);
            for y in 0..n {
                if rest.contains(&y) {
                    continue;
                }
                let row = space.row(y);
                for z in y + 1..n {
                    if rest.contains(&z) {
                        continue;
                    }
                    let v = pull[y] + pull[z] + row[z];
                    if v > best.0 {
                        best = (v, y, z);
                    }
                }
            }
            if (best.1, best.2) != (tuple[a], tuple[b]) {
                tuple[a] = best.1;
                tuple[b] = best.2;
                return true;
            }
        }
    }
    false
}

/// Outcome of [`is_small`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Smallness<F> {
    pub small: bool,
    /// `π/3 − xt₃`.
    pub margin: F,
    pub xt3: F,
    pub witness: Vec<usize>,
}

/// Whether `xt₃ ≤ π/3 + tol`. Spaces with fewer than three points have `xt₃ = 0`.
pub fn is_small<F: Real>(space: &SampledMetricSpace<F>, tol: F, seed: u64) -> Smallness<F> {
    let (xt3, witness) = if space.len() < 3 {
        (F::zero(), Vec::new())
    } else {
        let r = extent(space, 3, seed).expect("3 ≤ N");
        (r.value, r.witness)
    };
    let third = F::PI() / F::of(3.0);
    Smallness { small: xt3 <= third + tol, margin: third - xt3, xt3, witness }
}

/// `xt_q(a) − xt_q(b)` with both reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtentGap<F> {
    pub gap: F,
    pub a: ExtentReport<F>,
    pub b: ExtentReport<F>,
}

pub fn compare_extents<F: Real>(
    a: &SampledMetricSpace<F>,
    b: &SampledMetricSpace<F>,
    q: usize,
    seed: u64,
) -> Result<ExtentGap<F>, LabError> {
    let ra = extent(a, q, seed)?;
    let rb = extent(b, q, seed)?;
    Ok(ExtentGap { gap: ra.value - rb.value, a: ra, b: rb })
}

#[cfg(test)]
mod tests {
    use super::super::space::sample_round_sphere;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pairs_and_triples_on_round_sphere() {
        let s = sample_round_sphere::<f64>(300, 7);
        let x2 = extent(&s, 2, 0).unwrap();
        let x3 = extent(&s, 3, 0).unwrap();
        assert_eq!(x3.method, ExtentMethod::Exact);
        assert!((x2.value - PI).abs() < 0.1);
        assert!((x3.value - 2.0 * PI / 3.0).abs() < 0.05);
        assert!(x3.value <= x2.value);
        assert_eq!(x3.value, average_distance(&s, &x3.witness));
    }

    #[test]
    fn heuristic_matches_enumeration_on_sphere() {
        let s = sample_round_sphere::<f64>(150, 3);
        let e = extent_exact(&s, 3);
        let h = extent_heuristic(&s, 3, RESTARTS, 11);
        assert!((e.value - h.value).abs() <= 1e-12);
        let e4 = extent_exact(&sample_round_sphere::<f64>(30, 1), 4);
        let h4 = extent_heuristic(&sample_round_sphere::<f64>(30, 1), 4, RESTARTS, 2);
        assert!(h4.value <= e4.value + 1e-15);
    }

    #[test]
    fn heuristic_is_deterministic() {
        let s = sample_round_sphere::<f64>(400, 5);
        let a = extent(&s, 3, 8).unwrap();
        let b = extent(&s, 3, 8).unwrap();
        assert_eq!(a, b);
        assert!(matches!(a.method, ExtentMethod::Heuristic { restarts: 64, seed: 8 }));
    }

    #[test]
    fn order_out_of_range() {
        let s = sample_round_sphere::<f64>(5, 5);
        assert!(matches!(extent(&s, 1, 0), Err(LabError::ExtentOrder(1, 5))));
        assert!(matches!(extent(&s, 6, 0), Err(LabError::ExtentOrder(6, 5))));
    }

    #[test]
    fn smallness_edges() {
        let one = SampledMetricSpace::<f64>::new(vec![[1.0, 0.0, 0.0, 0.0]], vec![0.0], vec![]).unwrap();
        let s = is_small(&one, 0.02, 0);
        assert!(s.small);
        assert_eq!(s.xt3, 0.0);
        assert!(!is_small(&sample_round_sphere::<f64>(200, 1), 0.02, 0).small);
    }

    #[test]
    fn self_comparison_has_zero_gap() {
        let s = sample_round_sphere::<f64>(80, 1);
        assert_eq!(compare_extents(&s, &s, 3, 0).unwrap().gap, 0.0);
    }
}
