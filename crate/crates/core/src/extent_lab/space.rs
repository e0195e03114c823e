//! Finite metric samples of orbit spaces and their validation and export.

use std::io::{self, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::action::{IsometricActionSpec, QuotientMetric, THETA_TOL};
use super::linalg::{self, Vec4};
use super::LabError;
use crate::scalar::Real;

/// Magic bytes of the binary distance-matrix format.
pub const MAGIC: &[u8; 6] = b"X4EXT1";
/// Largest sample for which the triangle inequality is checked on every triple.
pub const FULL_TRIANGLE_CHECK: usize = 300;
/// Number of random triples checked on larger samples.
pub const RANDOM_TRIPLES: usize = 1_000_000;

/// A distinguished sample point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub index: usize,
    pub label: String,
    /// Order of the local group; the cone angle is `2π / order`.
    pub order: u64,
}

impl MarkedPoint {
    pub fn finite_isotropy(&self) -> bool {
        self.order >= 2
    }
}

/// N points with their pairwise distances and marked points.
#[derive(Clone, Debug)]
pub struct SampledMetricSpace<F> {
    pub points: Vec<Vec4<F>>,
    dist: Vec<F>,
    pub marked: Vec<MarkedPoint>,
}

/// Result of the triangle-inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriangleCheck {
    pub triples: u64,
    pub exhaustive: bool,
    pub worst_violation: f64,
}

impl<F: Real> SampledMetricSpace<F> {
    /// Builds a space from a row-major distance matrix, checking symmetry, the diagonal and the range.
    pub fn new(points: Vec<Vec4<F>>, dist: Vec<F>, marked: Vec<MarkedPoint>) -> Result<Self, LabError> {
        let n = points.len();
        if dist.len() != n * n {
            return Err(LabError::Shape(dist.len(), n));
        }
        if let Some(m) = marked.iter().find(|m| m.index >= n) {
            return Err(LabError::MarkedIndex(m.index));
        }
        let space = SampledMetricSpace { points, dist, marked };
        space.check_basic()?;
        Ok(space)
    }

    fn check_basic(&self) -> Result<(), LabError> {
        let n = self.len();
        let top = F::PI() + F::identity_tol();
        for i in 0..n {
            if self.d(i, i) != F::zero() {
                return Err(LabError::NotAMetric(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = self.d(i, j);
                if !(v >= F::zero() && v <= top) {
                    return Err(LabError::NotAMetric(format!("entry ({i},{j}) = {v} outside [0, π]")));
                }
                if v != self.d(j, i) {
                    return Err(LabError::NotAMetric(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> F {
        self.dist[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[F] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn matrix(&self) -> &[F] {
        &self.dist
    }

    pub fn diameter(&self) -> F {
        self.dist.iter().copied().fold(F::zero(), F::max)
    }

    pub fn finite_isotropy(&self) -> Vec<&MarkedPoint> {
        self.marked.iter().filter(|m| m.finite_isotropy()).collect()
    }

    /// Largest violation of `d(i,k) ≤ d(i,j) + d(j,k)`; every triple up to
    /// [`FULL_TRIANGLE_CHECK`] points, otherwise [`RANDOM_TRIPLES`] seeded triples.
    pub fn triangle_check(&self, seed: u64) -> TriangleCheck {
        let n = self.len();
        if n <= FULL_TRIANGLE_CHECK {
            let worst = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut w = 0.0f64;
                    for j in 0..n {
                        for k in 0..n {
                            w = w.max((self.d(i, k) - self.d(i, j) - self.d(j, k)).to_f64_lossy());
                        }
                    }
                    w
                })
                .reduce(|| 0.0, f64::max);
            return TriangleCheck { triples: (n * n * n) as u64, exhaustive: true, worst_violation: worst };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..RANDOM_TRIPLES {
            let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            worst = worst.max((self.d(i, k) - self.d(i, j) - self.d(j, k)).to_f64_lossy());
        }
        TriangleCheck { triples: RANDOM_TRIPLES as u64, exhaustive: false, worst_violation: worst }
    }

    /// Writes the 16-byte header and the row-major little-endian `f64` matrix.
    pub fn write_matrix<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[0, 0])?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for v in &self.dist {
            w.write_all(&v.to_f64_lossy().to_le_bytes())?;
        }
        w.flush()
    }
}

/// Reads a matrix written by [`SampledMetricSpace::write_matrix`].
pub fn read_matrix<R: Read>(mut r: R) -> Result<(usize, Vec<f64>), LabError> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header).map_err(|e| LabError::Io(e.to_string()))?;
    if &header[..6] != MAGIC {
        return Err(LabError::Io("bad magic".into()));
    }
    let n = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes")) as usize;
    let mut buf = vec![0u8; n.checked_mul(n).and_then(|x| x.checked_mul(8)).ok_or_else(|| LabError::Io("size".into()))?];
    r.read_exact(&mut buf).map_err(|e| LabError::Io(e.to_string()))?;
    let vals = buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok((n, vals))
}

fn gaussian_points<F: Real>(count: usize, seed: u64) -> Vec<Vec4<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let n = linalg::norm(&v);
            if n > 1e-6 {
                break v.map(|x| F::of(x / n));
            }
        })
        .collect()
}

fn assemble<F: Real>(n: usize, f: impl Fn(usize, usize) -> F + Sync) -> Vec<F> {
    let rows: Vec<Vec<F>> = (0..n).into_par_iter().map(|i| (i + 1..n).map(|j| f(i, j)).collect()).collect();
    let mut dist = vec![F::zero(); n * n];
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            dist[i * n + j] = v;
            dist[j * n + i] = v;
        }
    }
    dist
}

/// Samples the quotient of S³ by the circle and Γ. Marked points come first; the
/// remaining points are seeded Gaussian directions, so a larger sample with the
/// same seed extends a smaller one.
pub fn sample_quotient<F: Real>(spec: &IsometricActionSpec) -> Result<SampledMetricSpace<F>, LabError> {
    let group = spec.validate::<F>()?;
    let metric = QuotientMetric::new(spec.weights.0, spec.weights.1, group);
    let marked_pts = singular_representatives(&metric);
    if marked_pts.len() > spec.samples {
        return Err(LabError::TooFewSamples(spec.samples, marked_pts.len()));
    }
    let mut points: Vec<Vec4<F>> = marked_pts.iter().map(|(x, _, _)| *x).collect();
    points.extend(gaussian_points::<F>(spec.samples - marked_pts.len(), spec.seed));
    let marked = marked_pts
        .into_iter()
        .enumerate()
        .map(|(index, (_, label, order))| MarkedPoint { index, label, order })
        .collect();
    let dist = assemble(points.len(), |i, j| metric.distance(&points[i], &points[j]));
    SampledMetricSpace::new(points, dist, marked)
}

/// Seeded uniform sample of the round sphere S²(1), embedded as `(x, y, z, 0)`.
pub fn sample_round_sphere<F: Real>(n: usize, seed: u64) -> SampledMetricSpace<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec4<F>> = (0..n)
        .map(|_| loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if r > 1e-6 {
                break [F::of(v[0] / r), F::of(v[1] / r), F::of(v[2] / r), F::zero()];
            }
        })
        .collect();
    let dist = assemble(n, |i, j| {
        let (a, b) = (&points[i], &points[j]);
        let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt().atan2(linalg::dot(a, b))
    });
    SampledMetricSpace::new(points, dist, Vec::new()).expect("round sphere distances are a metric")
}

/// Local minima of `g` over the scan grid, refined by golden section, as `(θ, g(θ))`.
fn scan_minima<F: Real>(m: usize, accept: F, g: impl Fn(F) -> F) -> Vec<(F, F)> {
    let h = F::TAU() / F::of(m as f64);
    let vals: Vec<F> = (0..m).map(|k| g(h * F::of(k as f64))).collect();
    let mut out = Vec::new();
    for k in 0..m {
        let v = vals[k];
        if v > accept || v > vals[(k + m - 1) % m] || v >= vals[(k + 1) % m] {
            continue;
        }
        let c = h * F::of(k as f64);
        out.push(linalg::golden_min(c - h, c + h, F::of(THETA_TOL), &g));
    }
    out
}

fn fixed_count<F: Real>(metric: &QuotientMetric<F>, g: impl Fn(F) -> F) -> usize {
    let tight = F::of(1e-12).max(F::epsilon().sqrt());
    scan_minima(metric.scan_len(), F::of(1e-2), g).into_iter().filter(|&(_, v)| v < tight).count()
}

/// `|Stab(x)| / |kernel|` for the action of T¹ × Γ.
pub fn isotropy_order<F: Real>(metric: &QuotientMetric<F>, x: &Vec4<F>) -> u64 {
    let mut stab = 0;
    let mut kernel = 0;
    for g in &metric.group.elements {
        let gx = linalg::apply(g, x);
        stab += fixed_count(metric, |t| {
            let d = linalg::sub(&metric.rotate(t, &gx), x);
            linalg::dot(&d, &d)
        });
        kernel += fixed_count(metric, |t| {
            let r = linalg::mat_mul(&super::action::circle_matrix(metric.p, metric.q, t), g);
            let id = linalg::identity::<F>();
            (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).fold(F::zero(), |s, (i, j)| {
                let e = r[i][j] - id[i][j];
                s + e * e
            })
        });
    }
    (stab / kernel.max(1)) as u64
}

/// Representatives of the coordinate circles and of the Γ-singular loci, one per
/// orbit, with labels and isotropy orders.
pub fn singular_representatives<F: Real>(metric: &QuotientMetric<F>) -> Vec<(Vec4<F>, String, u64)> {
    let (o, z) = (F::one(), F::zero());
    let mut cands: Vec<(Vec4<F>, String)> =
        vec![([o, z, z, z], "circle z2=0".into()), ([z, z, o, z], "circle z1=0".into())];
    let id = linalg::identity::<F>();
    for (gi, g) in metric.group.elements.iter().enumerate() {
        if linalg::max_abs_diff(g, &id) <= F::of(1e-9) {
            continue;
        }
        let sym_at = |t: F| {
            let m = linalg::mat_mul(&super::action::circle_matrix(metric.p, metric.q, t), g);
            let s: [[F; 4]; 4] =
                std::array::from_fn(|i| std::array::from_fn(|j| (m[i][j] + m[j][i]) / F::of(2.0)));
            linalg::symmetric_eigen(&s)
        };
        let gap = |t: F| {
            let (vals, _) = sym_at(t);
            F::one() - vals.iter().copied().fold(F::neg_infinity(), F::max)
        };
        for (t, v) in scan_minima(metric.scan_len(), F::of(1e-2), gap) {
            if v > F::of(1e-9) {
                continue;
            }
            let (vals, vecs) = sym_at(t);
            if vals.iter().all(|&l| l > F::one() - F::of(1e-6)) {
                continue;
            }
            for k in 0..4 {
                if vals[k] > F::one() - F::of(1e-6) {
                    let x = linalg::normalized(&[vecs[0][k], vecs[1][k], vecs[2][k], vecs[3][k]]);
                    cands.push((x, format!("fixed by element {gi}")));
                }
            }
        }
    }
    let mut out: Vec<(Vec4<F>, String, u64)> = Vec::new();
    for (x, label) in cands {
        if out.iter().any(|(y, _, _)| metric.distance(&x, y) < F::of(1e-6)) {
            continue;
        }
        let order = isotropy_order(metric, &x);
        out.push((x, label, order));
    }
    out
}
