use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use x4_core::extent_lab::{extent, sample_round_sphere};
use x4_core::invariants::{are_equivalent, canonicalize};
use x4_core::lattice::smith_normal_form;
use x4_core::seifert::{euler_number, first_homology, normalize};
use x4_core::wcp::{weights_from_invariants, WcpError};
use x4_core::{InvariantTuple, SampledMetricSpace, SeifertPresentation};

type Q = Ratio<BigInt>;

fn tuple(pairs: &[(i64, i64)]) -> InvariantTuple {
    InvariantTuple::from_pairs(pairs).unwrap()
}

fn ratios(t: &InvariantTuple) -> Vec<Q> {
    t.entries().to_vec()
}

/// Rotation `s`, optional reversal with negation, then an integer shift.
fn moved(e: &[Q], s: usize, flip: bool, k: i64) -> Vec<Q> {
    let mut v: Vec<Q> = if flip { e.iter().rev().map(|x| -x.clone()).collect() } else { e.to_vec() };
    let n = v.len();
    v.rotate_left(s % n);
    v.into_iter().map(|x| x + Q::from_integer(k.into())).collect()
}

/// Searches every rotation and reflection for one differing from `b` by a constant integer.
fn brute_equivalent(a: &[Q], b: &[Q]) -> bool {
    let n = a.len();
    (0..n).any(|s| {
        [false, true].into_iter().any(|flip| {
            let img = moved(a, s, flip, 0);
            let d = b[0].clone() - img[0].clone();
            d.is_integer() && img.iter().zip(b).all(|(x, y)| y.clone() - x.clone() == d)
        })
    })
}

fn entry() -> impl Strategy<Value = (i64, i64)> {
    (-9i64..=9, 1i64..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn equivalence_matches_orbit_search(
        a in prop::collection::vec(entry(), 2..6),
        b in prop::collection::vec(entry(), 2..6),
        s in 0usize..6, flip: bool, k in -3i64..=3,
    ) {
        let ta = tuple(&a);
        let ea = ratios(&ta);
        let image = InvariantTuple::new(moved(&ea, s, flip, k)).unwrap();
        prop_assert!(are_equivalent(&ta, &image).unwrap());
        prop_assert_eq!(canonicalize(&ta), canonicalize(&image));
        if a.len() == b.len() {
            let tb = tuple(&b);
            prop_assert_eq!(are_equivalent(&ta, &tb).unwrap(), brute_equivalent(&ea, &ratios(&tb)));
        } else {
            prop_assert!(are_equivalent(&ta, &tuple(&b)).is_err());
        }
    }

    #[test]
    fn canonical_form_is_idempotent(a in prop::collection::vec(entry(), 2..6)) {
        let c = canonicalize(&tuple(&a));
        prop_assert_eq!(canonicalize(&c), c.clone());
        let first = &c.entries()[0];
        prop_assert!(!first.is_negative() && *first < Q::from_integer(1.into()));
    }
}

fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// gcd of all k×k minors.
fn determinantal_divisor(m: &[Vec<i64>], k: usize) -> i128 {
    let (r, c) = (m.len(), m[0].len());
    let mut g = 0i128;
    for rows in subsets(r, k) {
        for cols in subsets(c, k) {
            let sub: Vec<Vec<i128>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j] as i128).collect()).collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_matches_determinantal_divisors(
        (r, c, flat) in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(-6i64..=6, r * c)))
    ) {
        let m: Vec<Vec<i64>> = flat.chunks(c).map(|x| x.to_vec()).collect();
        let rows: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let snf = smith_normal_form(&rows, c);
        let f: Vec<i128> = snf.invariant_factors.iter().map(|x| x.to_i128().unwrap()).collect();
        let mut rank = 0;
        for k in 1..=r.min(c) {
            if determinantal_divisor(&m, k) != 0 {
                rank = k;
            }
        }
        prop_assert_eq!(snf.rank(), rank);
        let mut prod = 1i128;
        for k in 1..=rank {
            prod *= f[k - 1];
            prop_assert!(f[k - 1] > 0);
            if k > 1 {
                prop_assert_eq!(f[k - 1] % f[k - 2], 0);
            }
            prop_assert_eq!(prod, determinantal_divisor(&m, k));
        }
    }

    #[test]
    fn normalizing_keeps_euler_number_and_homology(
        fibers in prop::collection::vec((1i64..=7, -20i64..=20), 1..5)
    ) {
        let fibers: Vec<(i64, i64)> = fibers.into_iter().filter(|(a, b)| a.gcd(b) == 1).collect();
        prop_assume!(!fibers.is_empty());
        let p = SeifertPresentation::from_pairs(&fibers).unwrap();
        let n = normalize(&p);
        prop_assert_eq!(euler_number(&n), euler_number(&p));
        prop_assert_eq!(first_homology(&n).unwrap(), first_homology(&p).unwrap());
        let (last, rest) = n.fibers().split_last().unwrap();
        prop_assert_eq!(last.alpha().clone(), BigInt::from(1));
        for f in rest {
            prop_assert!(f.beta().is_positive() && f.beta() < f.alpha());
        }
        let oracle: Q = -fibers.iter().map(|&(a, b)| Q::new(b.into(), a.into())).fold(Q::zero(), |s, x| s + x);
        prop_assert_eq!(euler_number(&p), oracle);
    }

    #[test]
    fn weights_span_the_kernel(t in prop::collection::vec(entry(), 3)) {
        let tt = tuple(&t);
        let alphas: Vec<i64> = tt.alphas().iter().map(|x| x.to_i64().unwrap()).collect();
        let betas: Vec<i64> = tt.betas().iter().map(|x| x.to_i64().unwrap()).collect();
        match weights_from_invariants(&tt) {
            Ok(d) => {
                let w: Vec<i64> = d.weights.as_array().iter().map(|x| x.to_i64().unwrap()).collect();
                prop_assert_eq!((0..3).map(|i| alphas[i] * w[i]).sum::<i64>(), 0);
                prop_assert_eq!((0..3).map(|i| betas[i] * w[i]).sum::<i64>(), 0);
                prop_assert_eq!(w[0].gcd(&w[1]).gcd(&w[2]), 1);
                prop_assert!(w.iter().all(|&x| x != 0));
                let ab = alphas[0].gcd(&alphas[1]).gcd(&alphas[2]);
                prop_assert_eq!(d.quotient.alpha_bar, BigInt::from(ab));
            }
            Err(WcpError::NotRealizable(_)) => {
                let e = ratios(&tt);
                prop_assert!((0..3).any(|i| e[i] == e[(i + 1) % 3]));
            }
            Err(WcpError::RankDeficient(_)) => {
                let cross = [
                    alphas[1] * betas[2] - alphas[2] * betas[1],
                    alphas[2] * betas[0] - alphas[0] * betas[2],
                    alphas[0] * betas[1] - alphas[1] * betas[0],
                ];
                prop_assert_eq!(cross, [0, 0, 0]);
            }
            Err(WcpError::ZeroWeight(_)) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }
}

fn brute_extent(space: &SampledMetricSpace, q: usize) -> f64 {
    let pairs = (q * (q - 1) / 2) as f64;
    subsets(space.len(), q)
        .into_iter()
        .map(|s| {
            let mut sum = 0.0;
            for i in 0..q {
                for j in i + 1..q {
                    sum += space.d(s[i], s[j]);
                }
            }
            sum / pairs
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extents_decrease_and_match_enumeration(n in 5usize..=12, seed in 0u64..1000) {
        let space: SampledMetricSpace = sample_round_sphere(n, seed);
        let xt: Vec<f64> = (2..=5).map(|q| extent(&space, q, seed).unwrap().value).collect();
        prop_assert!((xt[0] - space.diameter()).abs() < 1e-12);
        for q in 2..=5 {
            prop_assert!((xt[q - 2] - brute_extent(&space, q)).abs() < 1e-12);
        }
        for w in xt.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }
}
