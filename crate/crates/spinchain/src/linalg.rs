//! Dense linear-algebra helpers shared across the crate: Kronecker
//! products, norms, the matrix exponential, and deterministic
//! orthonormalization with phase fixing.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Factorize, Solve, UPLO};
use num_complex::Complex64;

use crate::error::Result;

/// Complex scalar used everywhere in the crate.
pub type C64 = Complex64;

/// Shorthand complex constructor.
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real number lifted to a complex scalar.
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Kronecker product with the first factor on the slow (block) index:
/// `kron(a, b)[ia*rb + ib, ja*cb + jb] = a[ia, ja] * b[ib, jb]`.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for ia in 0..ra {
        for ja in 0..ca {
            let f = a[(ia, ja)];
            if f == cr(0.0) {
                continue;
            }
            for ib in 0..rb {
                for jb in 0..cb {
                    out[(ia * rb + ib, ja * cb + jb)] = f * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Frobenius norm.
pub fn frobenius(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry magnitude.
pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise difference between two equal-shaped matrices.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    assert_eq!(a.dim(), b.dim(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Maximum absolute column sum (induced 1-norm).
pub fn one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Hermiticity test against an absolute entrywise tolerance.
pub fn is_hermitian(a: &Array2<C64>, tol: f64) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Inner product `<a, b>` conjugating the first argument.
pub fn inner(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Hermitian eigendecomposition through a column-major copy.
///
/// The LAPACK bridge forwards row-major arrays as their transpose,
/// which for a complex Hermitian matrix is its conjugate, and the
/// eigenvectors then come back conjugated. Copying into column-major
/// first makes the result layout-independent. Eigenvalues ascend and
/// eigenvectors are the columns of the returned matrix.
pub fn eigh_c(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    use ndarray::ShapeBuilder;
    let mut f = Array2::<C64>::zeros(m.raw_dim().f());
    f.assign(m);
    let (w, u) = f.eigh(UPLO::Lower)?;
    Ok((w, u))
}

/// Spectral norm (largest singular value) via power iteration on `A'A`.
/// Accurate to a relative 1e-6, which is ample for tolerance scales.
pub fn spectral_norm(a: &Array2<C64>) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    // Deterministic start with incommensurate entries so the iterate is
    // not orthogonal to the top singular subspace.
    let mut v: Array1<C64> = Array1::from_shape_fn(n, |i| {
        cr(1.0 + ((i as u64).wrapping_mul(2654435761) % 1009) as f64 / 1009.0)
    });
    let nv = vec_norm(&v);
    v.mapv_inplace(|z| z / cr(nv));
    let ad = dagger(a);
    let mut lam = 0.0f64;
    for _ in 0..100 {
        let w = a.dot(&v);
        let u = ad.dot(&w);
        let nu = vec_norm(&u);
        if nu == 0.0 {
            return 0.0;
        }
        let rel = (nu - lam).abs() / nu.max(f64::MIN_POSITIVE);
        v = u.mapv(|z| z / cr(nu));
        lam = nu;
        if rel < 1e-6 {
            break;
        }
    }
    lam.sqrt()
}

/// Evenly spaced grid including both endpoints. `points >= 2` except that
/// a single point yields `[start]`.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 0 {
        return Vec::new();
    }
    if points == 1 {
        return vec![start];
    }
    let step = (stop - start) / (points - 1) as f64;
    let mut xs: Vec<f64> = (0..points).map(|i| start + step * i as f64).collect();
    // Pin the last point so the endpoint is exact.
    *xs.last_mut().unwrap() = stop;
    xs
}

/// Rotate a vector's global phase so its largest-magnitude entry is real
/// and positive. Ties break toward the lowest index; zero vectors are
/// left unchanged.
pub fn phase_fix(v: &mut Array1<C64>) {
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        // Strict inequality keeps the lowest index on ties.
        if m > best_mag {
            best = i;
            best_mag = m;
        }
    }
    if best_mag == 0.0 {
        return;
    }
    let phase = v[best] / cr(best_mag);
    v.mapv_inplace(|z| z / phase);
}

/// Modified Gram-Schmidt over candidate vectors in the given order.
/// Candidates whose orthogonalized remainder is shorter than `keep_tol`
/// are dropped; kept vectors are normalized and phase-fixed.
pub fn mgs_orthonormalize(candidates: Vec<Array1<C64>>, keep_tol: f64) -> Vec<Array1<C64>> {
    let mut basis: Vec<Array1<C64>> = Vec::new();
    for mut v in candidates {
        for b in &basis {
            let coeff = inner(b, &v);
            v = &v - &b.mapv(|z| z * coeff);
        }
        let n = vec_norm(&v);
        if n > keep_tol {
            v.mapv_inplace(|z| z / cr(n));
            phase_fix(&mut v);
            basis.push(v);
        }
    }
    basis
}

// Pade-13 coefficients for the scaling-and-squaring matrix exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const PADE13_THETA: f64 = 5.371920351148152;

/// Matrix exponential by degree-13 Pade approximation with scaling and
/// squaring. Dense square input; no trace pre-shift is applied.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let norm = one_norm(a);
    let eye: Array2<C64> = Array2::eye(n);
    if norm == 0.0 {
        return Ok(eye);
    }
    let s = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z * cr(0.5f64.powi(s)));
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let b = &PADE13;
    let u_inner = a6.dot(&(&a6 * cr(b[13]) + &a4 * cr(b[11]) + &a2 * cr(b[9])))
        + &a6 * cr(b[7])
        + &a4 * cr(b[5])
        + &a2 * cr(b[3])
        + &eye * cr(b[1]);
    let u = scaled.dot(&u_inner);
    let v = a6.dot(&(&a6 * cr(b[12]) + &a4 * cr(b[10]) + &a2 * cr(b[8])))
        + &a6 * cr(b[6])
        + &a4 * cr(b[4])
        + &a2 * cr(b[2])
        + &eye * cr(b[0]);
    let lhs = &v - &u;
    let rhs = &v + &u;
    let f = lhs.factorize()?;
    let mut x = Array2::zeros((n, n));
    for j in 0..n {
        let col = f.solve(&rhs.column(j).to_owned())?;
        x.column_mut(j).assign(&col);
    }
    for _ in 0..s {
        x = x.dot(&x);
    }
    Ok(x)
}
