//! Double covers of sampled surfaces branched over two marked points.
//!
//! The cover is built on graphs over the base sample. A 12-nearest-neighbour graph
//! carries a cut along a shortest path between the branch points. Inside a ball
//! around each branch point the cut is the straight ray to the last path node in
//! the ball and side labels come from the angle to that ray; between the balls
//! labels come from frames at the path nodes. An edge switches sheets when its
//! labels differ and it is close enough to the cut to cross it.
//!
//! Longer edges between nearby samples get exact base lengths on the lift found in
//! the glued 12-graph when that lift is clearly shorter than the other, or on the
//! lift given by the angle rule when both ends share a ball. Other pairs keep
//! lengths realised by paths and are measured again in the denser graph. Branch
//! points are joined to every lifted node by their exact base distance. Cover
//! distances are shortest paths in the resulting graph.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::space::{MarkedPoint, SampledMetricSpace};
use super::LabError;
use crate::scalar::Real;

/// Neighbours per node in the cut graph.
pub const CUT_NEIGHBOURS: usize = 12;
/// Neighbours per node in the distance graph.
pub const METRIC_NEIGHBOURS: usize = 96;
/// Relative path stretch tolerated in the cut graph when choosing a lift.
pub const STRETCH: f64 = 0.2;

/// A base sample lifted to two sheets.
#[derive(Clone, Debug)]
pub struct BranchedCover<F> {
    pub space: SampledMetricSpace<F>,
    pub base_len: usize,
    pub branch: (usize, usize),
}

impl<F: Real> BranchedCover<F> {
    /// Cover index of base point `i` on `sheet`; branch points have a single lift.
    pub fn node(&self, i: usize, sheet: u8) -> usize {
        node_index(self.base_len, self.branch, i, sheet)
    }

    /// Distance between lifts of base points `i` and `j` on the given sheets.
    pub fn lifted(&self, i: usize, si: u8, j: usize, sj: u8) -> F {
        self.space.d(self.node(i, si), self.node(j, sj))
    }
}

fn node_index(n: usize, (b1, b2): (usize, usize), i: usize, sheet: u8) -> usize {
    if sheet == 0 || i == b1 || i == b2 {
        i
    } else {
        n + i - usize::from(b1 < i) - usize::from(b2 < i)
    }
}

/// Two-resolution convergence certificate.
#[derive(Clone, Debug, Serialize)]
pub struct CoverCertificate {
    pub coarse_samples: usize,
    pub fine_samples: usize,
    pub drift: f64,
    pub threshold: f64,
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Key<F>(F);

impl<F: PartialOrd> PartialEq for Key<F> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<F: PartialOrd> Eq for Key<F> {}
impl<F: PartialOrd> PartialOrd for Key<F> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<F: PartialOrd> Ord for Key<F> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.partial_cmp(&o.0).unwrap_or(Ordering::Equal)
    }
}

type Adjacency<F> = Vec<Vec<(usize, F)>>;

/// Single-source shortest paths, stopping once the frontier passes `bound`.
fn dijkstra<F: Real>(adj: &Adjacency<F>, src: usize, bound: F) -> Vec<F> {
    let mut dist = vec![F::infinity(); adj.len()];
    let mut heap = BinaryHeap::new();
    dist[src] = F::zero();
    heap.push(Reverse((Key(F::zero()), src)));
    while let Some(Reverse((Key(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if d > bound {
            break;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((Key(nd), v)));
            }
        }
    }
    dist
}

fn shortest_path<F: Real>(adj: &Adjacency<F>, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut dist = vec![F::infinity(); adj.len()];
    let mut prev = vec![usize::MAX; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[from] = F::zero();
    heap.push(Reverse((Key(F::zero()), from)));
    while let Some(Reverse((Key(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == to {
            break;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = u;
                heap.push(Reverse((Key(nd), v)));
            }
        }
    }
    if !dist[to].is_finite() {
        return None;
    }
    let mut path = vec![to];
    while *path.last().expect("nonempty") != from {
        path.push(prev[*path.last().expect("nonempty")]);
    }
    path.reverse();
    Some(path)
}

fn nearest<F: Real>(space: &SampledMetricSpace<F>, k: usize) -> Vec<Vec<usize>> {
    let n = space.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let row = space.row(i);
            let mut idx: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let cmp = |a: &usize, b: &usize| row[*a].partial_cmp(&row[*b]).unwrap_or(Ordering::Equal).then(a.cmp(b));
            let k = k.min(idx.len());
            if k < idx.len() {
                idx.select_nth_unstable_by(k, cmp);
                idx.truncate(k);
            }
            idx.sort_by(cmp);
            idx
        })
        .collect()
}

fn symmetric_graph<F: Real>(space: &SampledMetricSpace<F>, knn: &[Vec<usize>]) -> Adjacency<F> {
    let n = space.len();
    let mut sets: Vec<Vec<usize>> = knn.to_vec();
    for (i, list) in knn.iter().enumerate() {
        for &j in list {
            sets[j].push(i);
        }
    }
    (0..n)
        .map(|i| {
            let s = &mut sets[i];
            s.sort_unstable();
            s.dedup();
            s.iter().map(|&j| (j, space.d(i, j))).collect()
        })
        .collect()
}

fn connected<F>(adj: &Adjacency<F>) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Angle at the apex between two points, from the three side lengths.
fn apex_angle<F: Real>(to_b: F, to_c: F, b_to_c: F) -> F {
    if to_b <= F::epsilon() || to_c <= F::epsilon() {
        return F::zero();
    }
    let c = (to_b * to_b + to_c * to_c - b_to_c * b_to_c) / (F::of(2.0) * to_b * to_c);
    c.max(-F::one()).min(F::one()).acos()
}

/// Signed angles about `apex` measured from the ray to `ray`, capped at `cap`;
/// the sign is fixed relative to a reference node well away from the ray.
struct Frame<F> {
    apex: usize,
    ray: usize,
    cap: F,
    reference: Option<(usize, F)>,
}

impl<F: Real> Frame<F> {
    fn new(s: &SampledMetricSpace<F>, apex: usize, ray: usize, cap: F, pool: &[usize], lo: F, hi: F) -> Self {
        let mut f = Frame { apex, ray, cap, reference: None };
        let mut best = F::neg_infinity();
        for &w in pool {
            let r = s.d(apex, w);
            if w == apex || w == ray || r < lo || r > hi {
                continue;
            }
            let a = f.magnitude(s, w);
            let score = a.min(cap - a);
            if score > best {
                best = score;
                f.reference = Some((w, a));
            }
        }
        f
    }

    fn magnitude(&self, s: &SampledMetricSpace<F>, w: usize) -> F {
        apex_angle(s.d(self.apex, self.ray), s.d(self.apex, w), s.d(self.ray, w)).min(self.cap)
    }

    fn signed(&self, s: &SampledMetricSpace<F>, w: usize) -> F {
        let a = self.magnitude(s, w);
        let Some((r, ar)) = self.reference else { return a };
        if w == r {
            return a;
        }
        let m = apex_angle(s.d(self.apex, r), s.d(self.apex, w), s.d(r, w));
        let same = (a - ar).abs();
        let opposite = (a + ar).min(F::of(2.0) * self.cap - a - ar);
        if (m - same).abs() <= (m - opposite).abs() {
            a
        } else {
            -a
        }
    }
}

#[derive(Clone, Copy)]
enum Side<F> {
    /// Label from a frame at an interior cut node.
    Band(bool),
    /// Label inside the ball around a branch point, with the angle scaled to (−π, π].
    Ball(usize, bool, F),
}

impl<F: Copy> Side<F> {
    fn left(&self) -> bool {
        match *self {
            Side::Band(l) | Side::Ball(_, l, _) => l,
        }
    }
}

/// Builds the sheet-change parity of every edge of the 12-graph.
fn cut_parity<F: Real>(
    s: &SampledMetricSpace<F>,
    adj: &Adjacency<F>,
    path: &[usize],
    orders: (u64, u64),
) -> Cut<F> {
    let n = s.len();
    let reach = adj.iter().flatten().map(|e| e.1).fold(F::zero(), F::max);
    let band = F::of(2.0) * reach;
    let ball = F::of(1.5) * band;
    let m = path.len() - 1;
    // Inside each ball the cut runs straight from the branch point to the last
    // path node in the ball; beyond that it follows the path.
    let first = (1..m).take_while(|&i| s.d(path[0], path[i]) <= ball).last().unwrap_or(1);
    let last = (1..m).rev().take_while(|&i| s.d(path[m], path[i]) <= ball).last().unwrap_or(m - 1);
    let ends = [(path[0], path[first], orders.0), (path[m], path[last], orders.1)];
    let all: Vec<usize> = (0..n).collect();

    let ball_frames: Vec<(Frame<F>, F)> = ends
        .iter()
        .map(|&(b, c, k)| {
            let half = F::PI() / F::of(k.max(1) as f64);
            (Frame::new(s, b, c, half, &all, reach / F::of(2.0), ball), half)
        })
        .collect();
    // Frames at the path nodes between the balls: angle plus the signed angle back along the path.
    let usable: Vec<usize> = (first..=last).collect();
    let frames: Vec<(Frame<F>, F)> = usable
        .iter()
        .map(|&i| {
            let f = Frame::new(s, path[i], path[i + 1], F::PI(), &all, reach / F::of(2.0), band);
            let back = f.signed(s, path[i - 1]);
            (f, back)
        })
        .collect();
    let on_path: Vec<bool> = {
        let mut v = vec![false; n];
        path.iter().for_each(|&p| v[p] = true);
        v
    };
    let tau = F::TAU();
    let ccw = |t: F| if t < F::zero() { t + tau } else { t };
    let frame_left = |j: usize, w: usize| -> (bool, F) {
        let (f, back) = &frames[j];
        let t = f.signed(s, w);
        let r = s.d(f.apex, w);
        let clear = t.abs().min((ccw(t) - ccw(*back)).abs()).min(F::FRAC_PI_2());
        (ccw(t) < ccw(*back), r * clear.sin())
    };
    let ball_left = |e: usize, w: usize| -> (bool, F) {
        let (f, half) = &ball_frames[e];
        let t = f.signed(s, w);
        let clear = t.abs().min(*half - t.abs()).min(F::FRAC_PI_2());
        (t > F::zero(), s.d(f.apex, w) * clear.sin())
    };
    let agree = |la: &dyn Fn(usize) -> (bool, F), lb: &dyn Fn(usize) -> (bool, F), near: &dyn Fn(usize) -> bool| {
        let (mut yes, mut no, mut weak_yes, mut weak_no) = (0usize, 0usize, 0usize, 0usize);
        for w in 0..n {
            if on_path[w] || !near(w) {
                continue;
            }
            let ((a, ca), (b, cb)) = (la(w), lb(w));
            let confident = ca >= reach / F::of(2.0) && cb >= reach / F::of(2.0);
            match (a == b, confident) {
                (true, true) => yes += 1,
                (false, true) => no += 1,
                (true, false) => weak_yes += 1,
                (false, false) => weak_no += 1,
            }
        }
        if yes + no > 0 {
            yes >= no
        } else {
            weak_yes >= weak_no
        }
    };

    let mut frame_flip = vec![false; frames.len()];
    for j in 1..frames.len() {
        let (pa, pb) = (frames[j - 1].0.apex, frames[j].0.apex);
        let prev = frame_flip[j - 1];
        let same = agree(
            &|w| {
                let (l, c) = frame_left(j - 1, w);
                (l ^ prev, c)
            },
            &|w| frame_left(j, w),
            &|w| s.d(pa, w) <= band && s.d(pb, w) <= band,
        );
        frame_flip[j] = !same;
    }
    let mut ball_flip = [false, false];
    if frames.is_empty() {
        ball_flip[1] = !agree(&|w| ball_left(0, w), &|w| ball_left(1, w), &|w| {
            s.d(path[0], w) <= ball && s.d(path[m], w) <= ball
        });
    } else {
        // Each ball is aligned with the frame where its straight cut meets the path.
        for (e, j) in [(0usize, 0usize), (1, frames.len() - 1)] {
            let fl = frame_flip[j];
            let (apex, centre) = (ends[e].0, frames[j].0.apex);
            ball_flip[e] = !agree(
                &|w| {
                    let (l, c) = frame_left(j, w);
                    (l ^ fl, c)
                },
                &|w| ball_left(e, w),
                &|w| s.d(centre, w) <= band && s.d(apex, w) <= ball,
            );
        }
    }

    let mut side: Vec<Option<Side<F>>> = vec![None; n];
    for w in 0..n {
        if w == path[0] || w == path[m] {
            continue;
        }
        let (d0, d1) = (s.d(path[0], w), s.d(path[m], w));
        let in_ball = if d0 <= ball && d0 <= d1 {
            Some(0)
        } else if d1 <= ball {
            Some(1)
        } else {
            None
        };
        if let Some(e) = in_ball {
            let (f, half) = &ball_frames[e];
            let scale = F::PI() / *half;
            let psi = if w == f.ray {
                let tiny = F::of(1e-9);
                if ball_flip[e] {
                    -tiny
                } else {
                    tiny
                }
            } else {
                f.signed(s, w) * scale
            };
            let left = (psi > F::zero()) ^ ball_flip[e];
            side[w] = Some(Side::Ball(e, left, psi));
            continue;
        }
        if on_path[w] {
            side[w] = Some(Side::Band(true));
            continue;
        }
        let nearest = (0..frames.len())
            .map(|j| (s.d(frames[j].0.apex, w), j))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        if let Some((dj, j)) = nearest {
            if dj <= band {
                let (l, _) = frame_left(j, w);
                side[w] = Some(Side::Band(l ^ frame_flip[j]));
            }
        }
    }
    let near = (0..n).map(|w| path.iter().map(|&c| s.d(c, w)).fold(F::infinity(), F::min)).collect();
    Cut { side, near, reach }
}

/// Side labels around a cut, with each node's distance to the cut.
struct Cut<F> {
    side: Vec<Option<Side<F>>>,
    near: Vec<F>,
    reach: F,
}

impl<F: Real> Cut<F> {
    /// Whether the segment from `u` to `v`, of length `w`, changes sheets. A
    /// crossing lies within `reach/2` of a cut node and within `w/2` of the nearer end.
    fn parity(&self, u: usize, v: usize, w: F) -> bool {
        let half = F::of(0.5);
        let (lo, hi) = (self.near[u].min(self.near[v]), self.near[u].max(self.near[v]));
        if lo > half * (w + self.reach) || hi > w + half * self.reach {
            return false;
        }
        match (self.side[u], self.side[v]) {
            (Some(Side::Ball(eu, lu, pu)), Some(Side::Ball(ev, lv, pv))) if eu == ev => {
                lu != lv && pu.abs() + pv.abs() < F::PI()
            }
            (Some(a), Some(b)) => a.left() != b.left(),
            _ => false,
        }
    }
}

/// Cut graph on both sheets; slot `i + N` is sheet 1 of `i`.
fn glued_graph<F: Real>(adj: &Adjacency<F>, cut: &Cut<F>, (b1, b2): (usize, usize)) -> Adjacency<F> {
    let n = adj.len();
    let is_branch = |i: usize| i == b1 || i == b2;
    let mut glued: Adjacency<F> = vec![Vec::new(); 2 * n];
    for u in 0..n {
        for &(v, w) in &adj[u] {
            match (is_branch(u), is_branch(v)) {
                (true, true) => glued[u].push((v, w)),
                (true, false) => {
                    glued[u].push((v, w));
                    glued[u].push((v + n, w));
                }
                (false, true) => {
                    glued[u].push((v, w));
                    glued[u + n].push((v, w));
                }
                (false, false) => {
                    let p = cut.parity(u, v, w);
                    let (t0, t1) = if p { (v + n, v) } else { (v, v + n) };
                    glued[u].push((t0, w));
                    glued[u + n].push((t1, w));
                }
            }
        }
    }
    glued
}

/// Distance graph on both sheets from lifted pair lengths, with the branch points
/// joined to every node by their base distance.
fn metric_graph<F: Real>(
    space: &SampledMetricSpace<F>,
    pairs: &BTreeMap<(usize, usize), (F, F)>,
    decide: &dyn Fn(F, F, F) -> (F, F, bool),
    (b1, b2): (usize, usize),
) -> Adjacency<F> {
    let n = space.len();
    let is_branch = |i: usize| i == b1 || i == b2;
    let mut graph: Adjacency<F> = vec![Vec::new(); 2 * n];
    for (&(x, z), &(a, b)) in pairs {
        let (wa, wb, _) = decide(space.d(x, z), a, b);
        for (zs, zo, wt) in [(z, z + n, wa), (z + n, z, wb)] {
            if wt.is_finite() {
                graph[x].push((zs, wt));
                graph[zs].push((x, wt));
                graph[x + n].push((zo, wt));
                graph[zo].push((x + n, wt));
            }
        }
    }
    for b in [b1, b2] {
        for v in 0..n {
            if v == b {
                continue;
            }
            let w = space.d(b, v);
            graph[b].push((v, w));
            graph[v].push((b, w));
            if !is_branch(v) {
                graph[b].push((v + n, w));
                graph[v + n].push((b, w));
            }
        }
    }
    graph
}

/// Double cover of `space` branched over two of its marked points.
pub fn double_branched_cover<F: Real>(
    space: &SampledMetricSpace<F>,
    branch: (usize, usize),
) -> Result<BranchedCover<F>, LabError> {
    let (b1, b2) = branch;
    let n = space.len();
    let find = |i: usize| space.marked.iter().find(|m| m.index == i);
    let (m1, m2) = match (find(b1), find(b2)) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return Err(LabError::BranchNotMarked(b1, b2)),
    };
    if b1 == b2 || space.d(b1, b2) <= F::zero() {
        return Err(LabError::BranchCoincide(b1, b2));
    }
    let knn = nearest(space, CUT_NEIGHBOURS);
    let adj = symmetric_graph(space, &knn);
    if !connected(&adj) {
        return Err(LabError::Disconnected);
    }
    let path = shortest_path(&adj, b1, b2).ok_or(LabError::Disconnected)?;
    let cut = cut_parity(space, &adj, &path, (m1.order, m2.order));
    let is_branch = |i: usize| i == b1 || i == b2;

    let glued = glued_graph(&adj, &cut, branch);

    let dense = nearest(space, METRIC_NEIGHBOURS);
    let lifted: Vec<Vec<(usize, F, F)>> = (0..n)
        .into_par_iter()
        .map(|x| {
            if is_branch(x) {
                return Vec::new();
            }
            let far = dense[x].iter().map(|&z| space.d(x, z)).fold(F::zero(), F::max);
            let d = dijkstra(&glued, x, F::of(2.5) * far + F::epsilon());
            dense[x]
                .iter()
                .filter(|&&z| !is_branch(z))
                .filter_map(|&z| {
                    let (mut a, mut b) = (d[z], d[z + n]);
                    // Inside a branch ball the segment lifts by the short-arc rule.
                    if let (Some(Side::Ball(e, ..)), Some(Side::Ball(f, ..))) = (cut.side[x], cut.side[z]) {
                        if e == f {
                            let w = space.d(x, z);
                            if cut.parity(x, z, w) {
                                b = b.min(w);
                            } else {
                                a = a.min(w);
                            }
                        }
                    }
                    (a.is_finite() || b.is_finite()).then_some((z, a, b))
                })
                .collect()
        })
        .collect();
    let mut pairs: BTreeMap<(usize, usize), (F, F)> = BTreeMap::new();
    for (x, list) in lifted.iter().enumerate() {
        for &(z, a, b) in list {
            let key = (x.min(z), x.max(z));
            if x < z || !pairs.contains_key(&key) {
                pairs.insert(key, (a, b));
            }
        }
    }

    // A pair takes its base length on the shorter lift only when the lengths
    // found so far differ by more than the stretch allowance; otherwise both lifts
    // keep lengths realised by paths. Undecided pairs are measured again in the
    // denser graph.
    let decide = |w: F, a: F, b: F| -> (F, F, bool) {
        if (a - b).abs() > F::of(STRETCH) * w {
            if a < b {
                (w, b, true)
            } else {
                (a, w, true)
            }
        } else {
            (a, b, false)
        }
    };
    let mut graph = metric_graph(space, &pairs, &decide, (b1, b2));
    let open: BTreeMap<usize, Vec<usize>> = pairs.iter().fold(BTreeMap::new(), |mut m, (&(x, z), &(a, b))| {
        if !decide(space.d(x, z), a, b).2 {
            m.entry(x).or_insert_with(Vec::new).push(z);
        }
        m
    });
    if !open.is_empty() {
        let again: Vec<((usize, usize), (F, F))> = open
            .par_iter()
            .flat_map_iter(|(&x, zs)| {
                let far = zs.iter().map(|&z| space.d(x, z)).fold(F::zero(), F::max);
                let d = dijkstra(&graph, x, F::of(2.5) * far + F::epsilon());
                zs.iter().map(|&z| ((x, z), (d[z], d[z + n]))).collect::<Vec<_>>()
            })
            .collect();
        for (key, (a, b)) in again {
            let e = pairs.get_mut(&key).expect("measured pair");
            *e = (e.0.min(a), e.1.min(b));
        }
        graph = metric_graph(space, &pairs, &decide, (b1, b2));
    }
    let rows: Vec<Vec<F>> = (0..n).into_par_iter().map(|x| dijkstra(&graph, x, F::infinity())).collect();
    let size = 2 * n - 2;
    let slot = |i: usize, sheet: u8| if sheet == 0 || is_branch(i) { i } else { i + n };
    let mut dist = vec![F::zero(); size * size];
    for i in 0..n {
        for si in 0..2u8 {
            if si == 1 && is_branch(i) {
                continue;
            }
            let a = node_index(n, branch, i, si);
            for j in 0..n {
                for sj in 0..2u8 {
                    if sj == 1 && is_branch(j) {
                        continue;
                    }
                    let b = node_index(n, branch, j, sj);
                    // Sheet-1 rows follow from sheet 0 by the deck involution.
                    let flip = si == 1;
                    let target = slot(j, if flip { 1 - sj } else { sj });
                    dist[a * size + b] = rows[i][target];
                }
            }
        }
    }
    for a in 0..size {
        dist[a * size + a] = F::zero();
        for b in a + 1..size {
            let v = dist[a * size + b].min(dist[b * size + a]);
            if !v.is_finite() {
                return Err(LabError::Disconnected);
            }
            dist[a * size + b] = v;
            dist[b * size + a] = v;
        }
    }

    let mut points = vec![[F::zero(); 4]; size];
    let mut marked = Vec::new();
    for i in 0..n {
        points[node_index(n, branch, i, 0)] = space.points[i];
        if !is_branch(i) {
            points[node_index(n, branch, i, 1)] = space.points[i];
        }
    }
    for m in &space.marked {
        if is_branch(m.index) {
            marked.push(MarkedPoint { index: m.index, label: format!("branch over {}", m.label), order: m.order });
        } else {
            for sheet in 0..2u8 {
                marked.push(MarkedPoint {
                    index: node_index(n, branch, m.index, sheet),
                    label: format!("{} (sheet {sheet})", m.label),
                    order: m.order,
                });
            }
        }
    }
    marked.sort_by_key(|m| m.index);
    let space = SampledMetricSpace::new(points, dist, marked)?;
    Ok(BranchedCover { space, base_len: n, branch })
}

/// Largest change of lifted distances between a cover and a cover of a sample
/// extending the same base points, compared as unordered pairs over the two lifts.
pub fn drift<F: Real>(coarse: &BranchedCover<F>, fine: &BranchedCover<F>) -> f64 {
    let n = coarse.base_len;
    let is_branch = |i: usize| i == coarse.branch.0 || i == coarse.branch.1;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let pair = |c: &BranchedCover<F>| {
                    let a = c.lifted(i, 0, j, 0).to_f64_lossy();
                    let b = if is_branch(i) || is_branch(j) { a } else { c.lifted(i, 0, j, 1).to_f64_lossy() };
                    (a.min(b), a.max(b))
                };
                let (c, f) = (pair(coarse), pair(fine));
                worst = worst.max((c.0 - f.0).abs()).max((c.1 - f.1).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Builds covers of a sample and of an extension of it and certifies that they
/// agree within `2·tol`.
pub fn certified_cover<F: Real>(
    coarse: &SampledMetricSpace<F>,
    fine: &SampledMetricSpace<F>,
    branch: (usize, usize),
    tol: f64,
) -> Result<(BranchedCover<F>, BranchedCover<F>, CoverCertificate), LabError> {
    let n = coarse.len();
    if fine.len() < n || (0..n).any(|i| fine.points[i] != coarse.points[i]) {
        return Err(LabError::NotNested);
    }
    let a = double_branched_cover(coarse, branch)?;
    let b = double_branched_cover(fine, branch)?;
    let d = drift(&a, &b);
    let threshold = 2.0 * tol;
    let cert = CoverCertificate {
        coarse_samples: n,
        fine_samples: fine.len(),
        drift: d,
        threshold,
        converged: d <= threshold,
    };
    Ok((a, b, cert))
}

#[cfg(test)]
mod tests {
    use super::super::action::{GammaSpec, IsometricActionSpec};
    use super::super::space::sample_quotient;
    use super::*;

    fn hopf(n: usize) -> SampledMetricSpace<f64> {
        sample_quotient(&IsometricActionSpec::hopf(n, 42)).unwrap()
    }

    #[test]
    fn sheet_swap_goes_through_nearest_branch_point() {
        let base = hopf(400);
        let cover = double_branched_cover(&base, (0, 1)).unwrap();
        assert!((cover.lifted(0, 0, 1, 0) - base.d(0, 1)).abs() < 1e-12);
        let mut worst = 0.0f64;
        for x in 2..base.len() {
            let want = 2.0 * base.d(x, 0).min(base.d(x, 1));
            worst = worst.max((cover.lifted(x, 0, x, 1) - want).abs());
        }
        assert!(worst < 0.03, "sheet swap error {worst}");
    }

    #[test]
    fn projection_recovers_base_distances() {
        let base = hopf(400);
        let cover = double_branched_cover(&base, (0, 1)).unwrap();
        let mut worst = 0.0f64;
        for x in 2..base.len() {
            for y in 2..base.len() {
                let d = cover.lifted(x, 0, y, 0).min(cover.lifted(x, 0, y, 1));
                assert!(d >= base.d(x, y) - 1e-12);
                worst = worst.max(d - base.d(x, y));
            }
        }
        assert!(worst < 0.05, "projection error {worst}");
        assert!(cover.space.triangle_check(0).worst_violation <= 1e-9);
    }

    #[test]
    fn branch_points_must_be_marked_and_distinct() {
        let base = hopf(100);
        assert!(matches!(double_branched_cover(&base, (0, 0)), Err(LabError::BranchCoincide(0, 0))));
        assert!(matches!(double_branched_cover(&base, (0, 7)), Err(LabError::BranchNotMarked(0, 7))));
    }

    #[test]
    fn cone_point_covers() {
        let spec = IsometricActionSpec::new((1, 1), GammaSpec::Preset("binary-dihedral:3".into()), 400, 1);
        let base = sample_quotient::<f64>(&spec).unwrap();
        let mut cones: Vec<(u64, usize)> = base.finite_isotropy().iter().map(|m| (m.order, m.index)).collect();
        cones.sort();
        let [(2, e0), (2, e1), (3, pole)] = cones[..] else { panic!("{cones:?}") };

        // Cone angle π at both branch points: sheets meet only through them.
        let cover = double_branched_cover(&base, (e0, e1)).unwrap();
        let mut worst = 0.0f64;
        for x in (0..base.len()).filter(|&x| x != e0 && x != e1) {
            let want = 2.0 * base.d(x, e0).min(base.d(x, e1));
            worst = worst.max((cover.lifted(x, 0, x, 1) - want).abs());
        }
        assert!(worst < 0.03, "sheet swap error {worst}");

        // Cone angle 2π/3 at the pole: the lifts sit 2π/3 apart around the doubled
        // cone and are joined by a chord of the radius-½ sphere.
        let cover = double_branched_cover(&base, (pole, e0)).unwrap();
        let mut worst = 0.0f64;
        for x in (0..base.len()).filter(|&x| x != pole && x != e0) {
            let swap = cover.lifted(x, 0, x, 1);
            assert!(swap <= 2.0 * base.d(x, pole).min(base.d(x, e0)) + 1e-9);
            let r = base.d(x, pole);
            if (0.1..0.19).contains(&r) {
                let (c, sn) = ((2.0 * r).cos(), (2.0 * r).sin());
                let chord = 0.5 * (c * c - 0.5 * sn * sn).acos();
                worst = worst.max((swap - chord).abs());
            }
        }
        assert!(worst < 0.02, "chord error {worst}");
    }

    fn polar(x: &[f64; 4]) -> (f64, f64) {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        let y = [2.0 * (a * c + b * d), 2.0 * (b * c - a * d), a * a + b * b - c * c - d * d];
        (y[2].clamp(-1.0, 1.0).acos(), y[1].atan2(y[0]))
    }

    // Cover of the round sphere of radius 1/2 branched at the poles: cone angle
    // 4π there, geodesics through a pole once the azimuth gap passes π.
    fn football(t1: f64, t2: f64, dpsi: f64) -> f64 {
        let tau = std::f64::consts::TAU;
        let mut d = dpsi.rem_euclid(2.0 * tau);
        if d > tau {
            d = 2.0 * tau - d;
        }
        if d <= std::f64::consts::PI {
            0.5 * (t1.cos() * t2.cos() + t1.sin() * t2.sin() * d.cos()).clamp(-1.0, 1.0).acos()
        } else {
            0.5 * (t1 + t2).min(tau - t1 - t2)
        }
    }

    #[test]
    fn hopf_cover_matches_spindle_metric() {
        let base = hopf(400);
        let cover = double_branched_cover(&base, (0, 1)).unwrap();
        let pol: Vec<(f64, f64)> = base.points.iter().map(polar).collect();
        let mut worst = 0.0f64;
        for i in 2..base.len() {
            for j in 2..base.len() {
                let ((t1, p1), (t2, p2)) = (pol[i], pol[j]);
                let e0 = football(t1, t2, p2 - p1);
                let e1 = football(t1, t2, p2 - p1 + std::f64::consts::TAU);
                let (a, b) = (cover.lifted(i, 0, j, 0), cover.lifted(i, 0, j, 1));
                worst = worst.max((a.min(b) - e0.min(e1)).abs()).max((a.max(b) - e0.max(e1)).abs());
            }
        }
        assert!(worst < 0.03, "{worst}");
    }
}
