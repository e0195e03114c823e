//! Weighted circle actions on S³ ⊂ C², finite isometry groups commuting with them,
//! and the induced quotient metric.

use serde::{Deserialize, Serialize};

use super::linalg::{self, Mat4, Vec4};
use super::LabError;
use crate::scalar::Real;

/// Samples per unit of `max(|p|, |q|)` in the θ-scan.
pub const SCAN_DENSITY: usize = 256;
/// Width at which golden-section refinement stops.
pub const THETA_TOL: f64 = 1e-10;
/// Smallest sample size accepted by [`super::sample_quotient`].
pub const MIN_SAMPLES: usize = 50;

const ORTHO_TOL: f64 = 1e-12;
const GROUP_TOL: f64 = 1e-9;

/// The finite group Γ, either by preset name or as explicit matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Preset(String),
    Matrices { matrices: Vec<[[f64; 4]; 4]> },
}

impl Default for GammaSpec {
    fn default() -> Self {
        GammaSpec::Preset("trivial".into())
    }
}

/// A weighted circle action together with Γ, a sample size and a seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometricActionSpec {
    pub weights: (i64, i64),
    #[serde(default)]
    pub gamma: GammaSpec,
    pub samples: usize,
    pub seed: u64,
}

impl IsometricActionSpec {
    pub fn new(weights: (i64, i64), gamma: GammaSpec, samples: usize, seed: u64) -> Self {
        IsometricActionSpec { weights, gamma, samples, seed }
    }

    pub fn hopf(samples: usize, seed: u64) -> Self {
        Self::new((1, 1), GammaSpec::default(), samples, seed)
    }

    /// Checks weights, sample size and Γ, returning the resolved group.
    pub fn validate<F: Real>(&self) -> Result<Group<F>, LabError> {
        let (p, q) = self.weights;
        if p == 0 || q == 0 || num_integer::gcd(p, q) != 1 {
            return Err(LabError::Weights(p, q));
        }
        if self.samples < MIN_SAMPLES {
            return Err(LabError::TooFewSamples(self.samples, MIN_SAMPLES));
        }
        Group::resolve(&self.gamma, p, q)
    }
}

fn preset_matrices(name: &str) -> Result<Vec<Mat4<f64>>, LabError> {
    let bad = || LabError::UnknownPreset(name.to_string());
    if name == "trivial" {
        return Ok(vec![linalg::identity()]);
    }
    let (kind, m) = name.split_once(':').ok_or_else(bad)?;
    let m: usize = m.parse().map_err(|_| bad())?;
    if m == 0 {
        return Err(bad());
    }
    let tau = std::f64::consts::TAU;
    match kind {
        "cyclic" => Ok((0..m).map(|k| right_phase(tau * k as f64 / m as f64)).collect()),
        "binary-dihedral" => {
            if m < 2 {
                return Err(bad());
            }
            let j = right_j();
            let mut out: Vec<Mat4<f64>> =
                (0..2 * m).map(|k| right_phase(std::f64::consts::PI * k as f64 / m as f64)).collect();
            let with_j: Vec<_> = out.iter().map(|a| linalg::mat_mul(a, &j)).collect();
            out.extend(with_j);
            Ok(out)
        }
        _ => Err(bad()),
    }
}

/// Right multiplication by `e^{iφ}` on quaternions `z₁ + z₂j`: `(z₁, z₂) ↦ (e^{iφ}z₁, e^{−iφ}z₂)`.
fn right_phase(phi: f64) -> Mat4<f64> {
    let (s, c) = phi.sin_cos();
    [[c, -s, 0.0, 0.0], [s, c, 0.0, 0.0], [0.0, 0.0, c, s], [0.0, 0.0, -s, c]]
}

/// Right multiplication by `j`: `(z₁, z₂) ↦ (−z₂, z₁)`.
fn right_j() -> Mat4<f64> {
    [[0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, -1.0], [1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]
}

/// The circle element `R(θ)` for weights `(p, q)`.
pub fn circle_matrix<F: Real>(p: i64, q: i64, theta: F) -> Mat4<F> {
    let (s1, c1) = (F::of(p as f64) * theta).sin_cos();
    let (s2, c2) = (F::of(q as f64) * theta).sin_cos();
    let z = F::zero();
    [[c1, -s1, z, z], [s1, c1, z, z], [z, z, c2, -s2], [z, z, s2, c2]]
}

/// A validated finite group of orthogonal matrices normalizing the circle.
#[derive(Clone, Debug)]
pub struct Group<F> {
    pub elements: Vec<Mat4<F>>,
}

impl<F: Real> Group<F> {
    pub fn resolve(spec: &GammaSpec, p: i64, q: i64) -> Result<Self, LabError> {
        let mats = match spec {
            GammaSpec::Preset(name) => preset_matrices(name)?,
            GammaSpec::Matrices { matrices } => matrices.clone(),
        };
        if mats.is_empty() {
            return Err(LabError::NotClosed);
        }
        let id = linalg::identity::<f64>();
        for (i, g) in mats.iter().enumerate() {
            let gtg = linalg::mat_mul(&linalg::transpose(g), g);
            if linalg::max_abs_diff(&gtg, &id) > ORTHO_TOL {
                return Err(LabError::NotOrthogonal(i));
            }
        }
        let find = |m: &Mat4<f64>| mats.iter().position(|g| linalg::max_abs_diff(g, m) <= GROUP_TOL);
        for a in &mats {
            for b in &mats {
                if find(&linalg::mat_mul(a, b)).is_none() {
                    return Err(LabError::NotClosed);
                }
            }
        }
        let theta = 0.7;
        let r = circle_matrix::<f64>(p, q, theta);
        let r_inv = circle_matrix::<f64>(p, q, -theta);
        for (i, g) in mats.iter().enumerate() {
            let conj = linalg::mat_mul(&linalg::mat_mul(g, &r), &linalg::transpose(g));
            if linalg::max_abs_diff(&conj, &r) > GROUP_TOL && linalg::max_abs_diff(&conj, &r_inv) > GROUP_TOL {
                return Err(LabError::NotNormalizing(i));
            }
        }
        // Identity first keeps pruning effective for nearby points.
        let mut ordered = mats;
        if let Some(k) = ordered.iter().position(|g| linalg::max_abs_diff(g, &id) <= GROUP_TOL) {
            ordered.swap(0, k);
        }
        Ok(Group { elements: ordered.iter().map(|g| g.map(|row| row.map(F::of))).collect() })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// The metric on S³ / (T¹ × Γ) computed from representatives on S³.
#[derive(Clone, Debug)]
pub struct QuotientMetric<F> {
    pub p: i64,
    pub q: i64,
    pub group: Group<F>,
    table: Vec<[F; 4]>,
}

impl<F: Real> QuotientMetric<F> {
    pub fn new(p: i64, q: i64, group: Group<F>) -> Self {
        let m = SCAN_DENSITY * p.unsigned_abs().max(q.unsigned_abs()) as usize;
        let table = (0..m)
            .map(|k| {
                let t = F::TAU() * F::of(k as f64) / F::of(m as f64);
                let (sp, cp) = (F::of(p as f64) * t).sin_cos();
                let (sq, cq) = (F::of(q as f64) * t).sin_cos();
                [cp, sp, cq, sq]
            })
            .collect();
        QuotientMetric { p, q, group, table }
    }

    pub fn scan_len(&self) -> usize {
        self.table.len()
    }

    pub fn rotate(&self, theta: F, x: &Vec4<F>) -> Vec4<F> {
        linalg::apply(&circle_matrix(self.p, self.q, theta), x)
    }

    /// Quotient distance `min_{γ,θ} ∠(x, R(θ)γy)` in radians.
    pub fn distance(&self, x: &Vec4<F>, y: &Vec4<F>) -> F {
        let (w, theta) = self.nearest_representative(x, y);
        let chord = linalg::norm(&linalg::sub(x, &self.rotate(theta, &w)));
        let half = (chord / F::of(2.0)).min(F::one());
        F::of(2.0) * half.asin()
    }

    /// Returns `(γy, θ*)` with `R(θ*)γy` closest to `x`.
    pub fn nearest_representative(&self, x: &Vec4<F>, y: &Vec4<F>) -> (Vec4<F>, F) {
        let mut cands: Vec<(F, Vec4<F>, [F; 4])> = self
            .group
            .elements
            .iter()
            .map(|g| {
                let w = linalg::apply(g, y);
                let c = coefficients(x, &w);
                (self.upper_bound(&c), w, c)
            })
            .collect();
        cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut best: Option<(F, Vec4<F>, F)> = None;
        for (ub, w, c) in cands {
            if let Some((bf, _, _)) = &best {
                if ub <= *bf {
                    break;
                }
            }
            let (theta, f) = self.maximize(&c);
            if best.as_ref().is_none_or(|(bf, _, _)| f > *bf) {
                best = Some((f, w, theta));
            }
        }
        let (_, w, theta) = best.expect("group is nonempty");
        (w, theta)
    }

    /// Bound on `max_θ f(θ)`; exact when `p = ±q`.
    fn upper_bound(&self, c: &[F; 4]) -> F {
        let [a1, b1, a2, b2] = *c;
        if self.p == self.q {
            (a1 + a2).hypot(b1 + b2)
        } else if self.p == -self.q {
            (a1 + a2).hypot(b1 - b2)
        } else {
            a1.hypot(b1) + a2.hypot(b2)
        }
    }

    fn value(&self, c: &[F; 4], theta: F) -> F {
        let (sp, cp) = (F::of(self.p as f64) * theta).sin_cos();
        let (sq, cq) = (F::of(self.q as f64) * theta).sin_cos();
        c[0] * cp - c[1] * sp + c[2] * cq - c[3] * sq
    }

    /// Newton steps on `f′` from a golden-section estimate; the maximum is flat, so
    /// golden section alone leaves θ uncertain at the square root of the precision.
    fn polish(&self, c: &[F; 4], mut t: F) -> F {
        let (p, q) = (F::of(self.p as f64), F::of(self.q as f64));
        for _ in 0..3 {
            let (sp, cp) = (p * t).sin_cos();
            let (sq, cq) = (q * t).sin_cos();
            let d1 = -p * (c[0] * sp + c[1] * cp) - q * (c[2] * sq + c[3] * cq);
            let d2 = -p * p * (c[0] * cp - c[1] * sp) - q * q * (c[2] * cq - c[3] * sq);
            if d2 >= F::zero() {
                break;
            }
            let step = d1 / d2;
            if step.abs() > F::of(1e-6) {
                break;
            }
            t = t - step;
        }
        t
    }

    /// Maximizes `f(θ) = Re(c₁e^{ipθ}) + Re(c₂e^{iqθ})` by scan and golden refinement.
    fn maximize(&self, c: &[F; 4]) -> (F, F) {
        let m = self.table.len();
        let vals: Vec<F> =
            self.table.iter().map(|t| c[0] * t[0] - c[1] * t[1] + c[2] * t[2] - c[3] * t[3]).collect();
        let top = vals.iter().copied().fold(F::neg_infinity(), F::max);
        let h = F::TAU() / F::of(m as f64);
        let curvature = F::of((self.p * self.p) as f64) * c[0].hypot(c[1])
            + F::of((self.q * self.q) as f64) * c[2].hypot(c[3]);
        let margin = h * h * curvature / F::of(4.0) + F::epsilon();
        let mut best = (F::zero(), F::neg_infinity());
        for k in 0..m {
            let v = vals[k];
            if v < top - margin || v < vals[(k + m - 1) % m] || v < vals[(k + 1) % m] {
                continue;
            }
            let centre = h * F::of(k as f64);
            let (t, _) = linalg::golden_min(centre - h, centre + h, F::of(THETA_TOL), |t| -self.value(c, t));
            let t = self.polish(c, t);
            let f = self.value(c, t);
            if f > best.1 {
                best = (t, f);
            }
        }
        best
    }
}

/// Coefficients `(Re c₁, Im c₁, Re c₂, Im c₂)` with `cⱼ = conj(xⱼ)·wⱼ`.
fn coefficients<F: Real>(x: &Vec4<F>, w: &Vec4<F>) -> [F; 4] {
    [
        x[0] * w[0] + x[1] * w[1],
        x[0] * w[1] - x[1] * w[0],
        x[2] * w[2] + x[3] * w[3],
        x[2] * w[3] - x[3] * w[2],
    ]
}
