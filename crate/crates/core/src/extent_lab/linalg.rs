//! Small fixed-size linear algebra on R^4.

use crate::scalar::Real;

pub type Vec4<F> = [F; 4];
pub type Mat4<F> = [[F; 4]; 4];

pub fn identity<F: Real>() -> Mat4<F> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { F::one() } else { F::zero() }))
}

pub fn mat_mul<F: Real>(a: &Mat4<F>, b: &Mat4<F>) -> Mat4<F> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..4).fold(F::zero(), |s, k| s + a[i][k] * b[k][j]))
    })
}

pub fn transpose<F: Real>(a: &Mat4<F>) -> Mat4<F> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn apply<F: Real>(a: &Mat4<F>, x: &Vec4<F>) -> Vec4<F> {
    std::array::from_fn(|i| (0..4).fold(F::zero(), |s, k| s + a[i][k] * x[k]))
}

pub fn dot<F: Real>(a: &Vec4<F>, b: &Vec4<F>) -> F {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn norm<F: Real>(a: &Vec4<F>) -> F {
    dot(a, a).sqrt()
}

pub fn normalized<F: Real>(a: &Vec4<F>) -> Vec4<F> {
    let n = norm(a);
    a.map(|x| x / n)
}

pub fn sub<F: Real>(a: &Vec4<F>, b: &Vec4<F>) -> Vec4<F> {
    std::array::from_fn(|i| a[i] - b[i])
}

/// Largest absolute entry of `a − b`.
pub fn max_abs_diff<F: Real>(a: &Mat4<F>, b: &Mat4<F>) -> F {
    let mut m = F::zero();
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

/// Determinant by cofactor expansion along 2×2 minors.
pub fn det<F: Real>(m: &Mat4<F>) -> F {
    let s = |i: usize, j: usize, k: usize, l: usize| m[i][k] * m[j][l] - m[i][l] * m[j][k];
    s(0, 1, 0, 1) * s(2, 3, 2, 3) - s(0, 1, 0, 2) * s(2, 3, 1, 3) + s(0, 1, 0, 3) * s(2, 3, 1, 2)
        + s(0, 1, 1, 2) * s(2, 3, 0, 3)
        - s(0, 1, 1, 3) * s(2, 3, 0, 2)
        + s(0, 1, 2, 3) * s(2, 3, 0, 1)
}

/// Eigenvalues and eigenvectors (as columns `vecs[.][k]`) of a symmetric matrix, cyclic Jacobi.
pub fn symmetric_eigen<F: Real>(m: &Mat4<F>) -> ([F; 4], Mat4<F>) {
    let mut a = *m;
    let mut v = identity::<F>();
    for _sweep in 0..64 {
        let off: F = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .fold(F::zero(), |s, (i, j)| s + a[i][j] * a[i][j]);
        if off <= F::epsilon() * F::epsilon() {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                if a[p][q] == F::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (F::of(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt());
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..4 {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2], a[3][3]], v)
}

/// Minimizes a function on `[lo, hi]` by golden-section search to width `tol`.
pub fn golden_min<F: Real>(mut lo: F, mut hi: F, tol: F, f: impl Fn(F) -> F) -> (F, F) {
    let r = F::of(0.618_033_988_749_894_9);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut guard = 0;
    while hi - lo > tol && guard < 200 {
        guard += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
