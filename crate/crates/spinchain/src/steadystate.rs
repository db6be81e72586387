//! Steady states by three independent routes: the Liouvillian kernel,
//! long-time evolution, and the weak-dissipation projection onto
//! Hamiltonian eigenstate populations. Also hosts observables and
//! fidelity metrics used by the sweep drivers.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, EigVals, Factorize, Solve, SVD};

use crate::error::{Error, Result};
use crate::linalg::{self, cr, C64};
use crate::liouvillian::{build_liouvillian, devectorize, vectorize, Superoperator};
use crate::models::{build_hamiltonian, build_jump_operators, DissipatorSpec, ModelSpec};
use crate::spin_ops::DenseOperator;

/// Route that produced a steady-state result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Nullspace,
    Evolution,
    WeakLimit,
}

/// Steady state plus kernel diagnostics.
#[derive(Clone, Debug)]
pub struct SteadyStateResult {
    /// Hermitian, unit-trace, positive-semidefinite density matrix
    /// (negative dust up to 1e-8 clipped).
    pub rho: DenseOperator,
    /// Number of generator eigenvalues with modulus below the kernel
    /// threshold of the method's generator.
    pub kernel_dim: usize,
    /// `||L vec(rho)||_2` for the kernel route; `||M p||_2` for the weak
    /// limit.
    pub residual: f64,
    /// Route used.
    pub method: Method,
    /// Set when the kernel is degenerate and `rho` is the canonical
    /// projection of the maximally mixed state onto it.
    pub non_unique: bool,
}

/// Kernel threshold for a Liouvillian: `1e-10 * ||entries||_2`.
pub fn kernel_tol(l: &Superoperator) -> f64 {
    1e-10 * linalg::spectral_norm(l.entries())
}

const RESIDUAL_BOUND: f64 = 1e-8;

/// Steady state from the kernel of the Liouvillian.
///
/// Eigenvalues are computed without vectors to count the kernel; for a
/// unique kernel the vector is then obtained by LU-based inverse
/// iteration started from the maximally mixed state, which always
/// overlaps the kernel since `<vec(I), vec(rho)> = tr rho`. Degenerate
/// kernels fall back to a full eigendecomposition and return the kernel
/// projection of the maximally mixed state with `non_unique` set.
pub fn steady_state(l: &Superoperator) -> Result<SteadyStateResult> {
    let d = l.dim();
    let n = d * d;
    let norm = linalg::spectral_norm(l.entries());
    if norm == 0.0 {
        // The zero generator fixes every state.
        let rho = DenseOperator::new(
            Array2::eye(d).mapv(|z: C64| z / cr(d as f64)),
            l.basis_tag(),
        )?;
        return Ok(SteadyStateResult {
            rho,
            kernel_dim: n,
            residual: 0.0,
            method: Method::Nullspace,
            non_unique: true,
        });
    }
    let tol = 1e-10 * norm;
    let vals = l.entries().eigvals()?;
    let kernel_dim = vals.iter().filter(|z| z.norm() < tol).count();
    if kernel_dim == 0 {
        return Err(Error::Numerical(format!(
            "kernel numerically empty: smallest eigenvalue modulus {:.3e} exceeds tolerance {:.3e}",
            vals.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min),
            tol
        )));
    }

    if kernel_dim == 1 {
        if let Some(v) = inverse_iteration_kernel(l, tol) {
            return finish(l, &v, kernel_dim, false);
        }
    }
    let (v, non_unique) = kernel_by_full_eig(l, tol, kernel_dim)?;
    finish(l, &v, kernel_dim, non_unique)
}

/// Inverse iteration for the kernel vector of a generator with a unique
/// kernel. Returns `None` when the factorization or the iteration fails;
/// the caller then falls back to the full eigendecomposition.
fn inverse_iteration_kernel(l: &Superoperator, tol: f64) -> Option<Array1<C64>> {
    let d = l.dim();
    let f = l.entries().factorize().ok()?;
    let mut v = vectorize(
        &DenseOperator::new(
            Array2::eye(d).mapv(|z: C64| z / cr(d as f64)),
            l.basis_tag(),
        )
        .ok()?,
    );
    for _ in 0..8 {
        let w = f.solve(&v).ok()?;
        let nw = linalg::vec_norm(&w);
        if !nw.is_finite() || nw == 0.0 {
            return None;
        }
        v = w.mapv(|z| z / cr(nw));
        let res = linalg::vec_norm(&l.entries().dot(&v));
        if res < tol {
            return Some(v);
        }
    }
    None
}

/// Kernel vector via the full eigendecomposition. For degenerate kernels
/// the maximally mixed state is projected onto the kernel span.
fn kernel_by_full_eig(
    l: &Superoperator,
    tol: f64,
    kernel_dim: usize,
) -> Result<(Array1<C64>, bool)> {
    let d = l.dim();
    let (vals, vecs) = l.entries().eig()?;
    let mut kernel: Vec<(f64, usize)> = vals
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() < tol)
        .map(|(i, z)| (z.norm(), i))
        .collect();
    if kernel.is_empty() {
        return Err(Error::Numerical(
            "kernel numerically empty in the eigenvector pass".into(),
        ));
    }
    kernel.sort_by(|a, b| a.0.total_cmp(&b.0));
    if kernel_dim <= 1 {
        return Ok((vecs.column(kernel[0].1).to_owned(), false));
    }
    let columns: Vec<Array1<C64>> = kernel
        .iter()
        .map(|(_, i)| vecs.column(*i).to_owned())
        .collect();
    let basis = linalg::mgs_orthonormalize(columns, 1e-10);
    let mixed = vectorize(&DenseOperator::new(
        Array2::eye(d).mapv(|z: C64| z / cr(d as f64)),
        l.basis_tag(),
    )?);
    let mut proj: Array1<C64> = Array1::zeros(d * d);
    for q in &basis {
        let coeff = linalg::inner(q, &mixed);
        proj = &proj + &q.mapv(|z| z * coeff);
    }
    if linalg::vec_norm(&proj) < 1e-12 {
        // Mixed state orthogonal to the kernel span; fall back to the
        // least-modulus eigenvector as the canonical representative.
        return Ok((vecs.column(kernel[0].1).to_owned(), true));
    }
    Ok((proj, true))
}

/// Shared post-processing: hermitize, trace-normalize, repair positivity
/// dust, and verify the residual bound.
fn finish(
    l: &Superoperator,
    v: &Array1<C64>,
    kernel_dim: usize,
    non_unique: bool,
) -> Result<SteadyStateResult> {
    let raw = devectorize(v, l.basis_tag())?;
    let tr0 = raw.trace();
    if tr0.norm() < 1e-12 * raw.frobenius_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::Numerical(
            "kernel vector is traceless; no canonical density matrix in this kernel direction"
                .into(),
        ));
    }
    // The kernel vector carries an arbitrary complex phase. Rotating the
    // trace onto the positive real axis first keeps hermitization from
    // cancelling the signal and amplifying non-kernel contamination.
    let phase = tr0.conj() / cr(tr0.norm());
    let rotated = raw.entries().mapv(|z| z * phase);
    let herm = (&rotated + &linalg::dagger(&rotated)).mapv(|z| z * cr(0.5));
    // Hermitization makes the trace exactly real; real division keeps
    // Hermiticity and flips an overall negative sign.
    let tr: f64 = herm.diag().iter().map(|z| z.re).sum();
    let normalized = herm.mapv(|z| z / cr(tr));
    let rho = repair_positivity(&normalized, l.basis_tag())?;
    let residual = linalg::vec_norm(&l.entries().dot(&vectorize(&rho)));
    if residual > RESIDUAL_BOUND {
        return Err(Error::Numerical(format!(
            "steady-state residual {residual:.3e} exceeds {RESIDUAL_BOUND:.1e}"
        )));
    }
    Ok(SteadyStateResult {
        rho,
        kernel_dim,
        residual,
        method: Method::Nullspace,
        non_unique,
    })
}

/// Clip eigenvalue dust in `[-1e-8, 0)` to zero and renormalize; deeper
/// negativity is an error.
fn repair_positivity(m: &Array2<C64>, tag: &str) -> Result<DenseOperator> {
    let (w, u) = linalg::eigh_c(m)?;
    let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-8 {
        return Err(Error::Numerical(format!(
            "density matrix eigenvalue {min:.3e} below the -1e-8 repair threshold"
        )));
    }
    let clipped: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numerical(
            "density matrix has vanishing trace".into(),
        ));
    }
    let d = m.nrows();
    let mut out: Array2<C64> = Array2::zeros((d, d));
    for (k, lam) in clipped.iter().enumerate() {
        if *lam == 0.0 {
            continue;
        }
        let col = u.column(k);
        let p = lam / total;
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += col[i] * col[j].conj() * cr(p);
            }
        }
    }
    DenseOperator::new(out, tag)
}

/// Evolve a density matrix for time `t` under the generator, via the
/// dense matrix exponential. Trace preservation is verified to 1e-9.
pub fn evolve(l: &Superoperator, rho0: &DenseOperator, t: f64) -> Result<DenseOperator> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidInput(format!(
            "evolution time must be nonnegative and finite, got {t}"
        )));
    }
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch(format!(
            "rho0 dim {} vs superoperator Hilbert dim {}",
            rho0.dim(),
            l.dim()
        )));
    }
    if !rho0.is_hermitian(1e-8) {
        return Err(Error::InvalidInput("rho0 is not Hermitian".into()));
    }
    let tr0 = rho0.trace();
    if (tr0 - cr(1.0)).norm() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "rho0 trace {tr0} deviates from 1 by more than 1e-6"
        )));
    }
    let propagator = linalg::expm(&l.entries().mapv(|z| z * cr(t)))?;
    let v = propagator.dot(&vectorize(rho0));
    let rho = devectorize(&v, l.basis_tag())?;
    let tr = rho.trace();
    if (tr - tr0).norm() > 1e-9 {
        return Err(Error::Numerical(format!(
            "evolution failed to preserve the trace: drift {:.3e}",
            (tr - tr0).norm()
        )));
    }
    Ok(rho)
}

/// Classical rate-matrix populations of the weak-dissipation limit in a
/// fixed eigenbasis. Returns `(populations, kernel_dim, non_unique,
/// residual)`. Shared with the degeneracy module, which supplies
/// continuity-tracked eigenvectors.
pub(crate) fn weak_limit_populations(
    eigvecs: &Array2<C64>,
    jumps: &[(f64, DenseOperator)],
) -> Result<(Array1<f64>, usize, bool, f64)> {
    let d = eigvecs.ncols();
    let mut m: Array2<f64> = Array2::zeros((d, d));
    for (g, c) in jumps {
        let b = linalg::dagger(eigvecs).dot(c.entries()).dot(eigvecs);
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    m[(j, i)] += 2.0 * g * b[(j, i)].norm_sqr();
                }
            }
        }
    }
    for i in 0..d {
        let out: f64 = (0..d).filter(|j| *j != i).map(|j| m[(j, i)]).sum();
        m[(i, i)] = -out;
    }

    let smax_guess = m.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if smax_guess == 0.0 {
        // No dissipation at all: every population vector is stationary.
        let p = Array1::from_elem(d, 1.0 / d as f64);
        return Ok((p, d, true, 0.0));
    }
    let (_, s, vt) = m.svd(false, true)?;
    let vt = vt.expect("svd requested right singular vectors");
    let smax = s[0];
    let ktol = 1e-10 * smax;
    let kernel: Vec<usize> = (0..d).filter(|&i| s[i] < ktol).collect();
    if kernel.is_empty() {
        return Err(Error::Numerical(
            "rate matrix kernel numerically empty".into(),
        ));
    }
    let non_unique = kernel.len() > 1;
    let mut p: Array1<f64> = if non_unique {
        // Disconnected rate graph: project the uniform distribution onto
        // the kernel span as the canonical representative.
        let uniform = Array1::from_elem(d, 1.0 / d as f64);
        let mut acc = Array1::zeros(d);
        for &k in &kernel {
            let row = vt.row(k).to_owned();
            let coeff = row.dot(&uniform);
            acc = acc + row.mapv(|x| x * coeff);
        }
        acc
    } else {
        vt.row(kernel[0]).to_owned()
    };
    let total: f64 = p.sum();
    if total < 0.0 {
        p.mapv_inplace(|x| -x);
    } else if total == 0.0 {
        return Err(Error::Numerical(
            "stationary population vector sums to zero".into(),
        ));
    }
    let total: f64 = p.sum();
    p.mapv_inplace(|x| x / total);
    let pmin = p.iter().cloned().fold(f64::INFINITY, f64::min);
    if pmin < -1e-8 {
        return Err(Error::Numerical(format!(
            "stationary population {pmin:.3e} below the -1e-8 repair threshold"
        )));
    }
    p.mapv_inplace(|x| x.max(0.0));
    let total: f64 = p.sum();
    p.mapv_inplace(|x| x / total);
    let residual = m.dot(&p).iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((p, kernel.len(), non_unique, residual))
}

/// Weak-dissipation steady state: populations of the classical rate
/// matrix over the Hamiltonian eigenbasis.
///
/// The rate from eigenstate `i` to `j` is `sum_m 2 g_m |<j|c_m|i>|^2`.
/// This is exactly the kernel-projected first-order equation restricted
/// to populations, which is the whole story for a nondegenerate `H`
/// because the kernel projector keeps only diagonal elements there.
pub fn weak_limit_steady_state(
    h: &DenseOperator,
    jumps: &[(f64, DenseOperator)],
) -> Result<SteadyStateResult> {
    for (_, c) in jumps {
        h.check_same_basis(c)?;
    }
    if !h.is_hermitian(1e-10 * h.frobenius_norm().max(1.0)) {
        return Err(Error::InvalidInput("Hamiltonian is not Hermitian".into()));
    }
    let (vals, vecs) = linalg::eigh_c(h.entries())?;
    let scale = vals.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let degeneracy_tol = 1e-8 * scale;
    let d = vals.len();
    let min_gap = (1..d)
        .map(|i| vals[i] - vals[i - 1])
        .fold(f64::INFINITY, f64::min);
    if d > 1 && min_gap <= degeneracy_tol {
        return Err(Error::InvalidInput(format!(
            "degenerate Hamiltonian: minimum eigenvalue gap {min_gap:.3e} within \
             degeneracy tolerance {degeneracy_tol:.3e}; the weak limit is ill-defined"
        )));
    }
    let (p, kernel_dim, non_unique, residual) = weak_limit_populations(&vecs, jumps)?;
    let mut rho: Array2<C64> = Array2::zeros((d, d));
    for k in 0..d {
        if p[k] == 0.0 {
            continue;
        }
        let col = vecs.column(k);
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] += col[i] * col[j].conj() * cr(p[k]);
            }
        }
    }
    Ok(SteadyStateResult {
        rho: DenseOperator::new(rho, h.basis_tag())?,
        kernel_dim,
        residual,
        method: Method::WeakLimit,
        non_unique,
    })
}

/// `tr(obs * rho)`.
pub fn expectation(rho: &DenseOperator, obs: &DenseOperator) -> Result<C64> {
    rho.check_same_basis(obs)?;
    let d = rho.dim();
    let mut acc = cr(0.0);
    for i in 0..d {
        for j in 0..d {
            acc += obs.entries()[(i, j)] * rho.entries()[(j, i)];
        }
    }
    Ok(acc)
}

/// Real expectation value of a Hermitian observable; errors when the
/// imaginary part exceeds 1e-10.
pub fn expectation_real(rho: &DenseOperator, obs: &DenseOperator) -> Result<f64> {
    let e = expectation(rho, obs)?;
    if e.im.abs() >= 1e-10 {
        return Err(Error::Numerical(format!(
            "expectation value has imaginary part {:.3e}; observable not Hermitian \
             or state invalid",
            e.im
        )));
    }
    Ok(e.re)
}

/// Hermitian square root with dust clipping in `[-1e-8, 0)`.
fn psd_sqrt(m: &Array2<C64>) -> Result<Array2<C64>> {
    let (w, u) = linalg::eigh_c(m)?;
    let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-8 {
        return Err(Error::InvalidInput(format!(
            "matrix eigenvalue {min:.3e} is too negative for a density matrix"
        )));
    }
    let d = m.nrows();
    let mut out: Array2<C64> = Array2::zeros((d, d));
    for (k, lam) in w.iter().enumerate() {
        let r = lam.max(0.0).sqrt();
        if r == 0.0 {
            continue;
        }
        let col = u.column(k);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += col[i] * col[j].conj() * cr(r);
            }
        }
    }
    Ok(out)
}

/// Uhlmann fidelity `F(rho, sigma) = (tr sqrt(sqrt(sigma) rho
/// sqrt(sigma)))^2`, clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho: &DenseOperator, sigma: &DenseOperator) -> Result<f64> {
    rho.check_same_basis(sigma)?;
    for (name, op) in [("rho", rho), ("sigma", sigma)] {
        let tr = op.trace();
        if (tr - cr(1.0)).norm() > 1e-6 {
            return Err(Error::InvalidInput(format!(
                "{name} trace {tr} deviates from 1 by more than 1e-6"
            )));
        }
    }
    let s = psd_sqrt(sigma.entries())?;
    let m = s.dot(rho.entries()).dot(&s);
    let m = (&m + &linalg::dagger(&m)).mapv(|z| z * cr(0.5));
    let (w, _) = linalg::eigh_c(&m)?;
    let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-8 {
        return Err(Error::Numerical(format!(
            "fidelity kernel eigenvalue {min:.3e} below the repair threshold"
        )));
    }
    let root_sum: f64 = w.iter().map(|x| x.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// Steady-state infidelity between `b_x` and `b_x + delta_b`, both by
/// the kernel route.
pub fn infidelity_pair(
    spec: &ModelSpec,
    diss: &DissipatorSpec,
    b_x: f64,
    delta_b: f64,
) -> Result<f64> {
    if !(delta_b > 0.0) || !delta_b.is_finite() {
        return Err(Error::InvalidInput(format!(
            "delta_b must be positive and finite, got {delta_b}"
        )));
    }
    let jumps = build_jump_operators(diss, spec.n_sites)?;
    let mut states = Vec::with_capacity(2);
    for x in [b_x, b_x + delta_b] {
        let h = build_hamiltonian(&spec.with_b_x(x))?;
        let l = build_liouvillian(&h, &jumps)?;
        states.push(steady_state(&l)?.rho);
    }
    Ok(1.0 - uhlmann_fidelity(&states[0], &states[1])?)
}

/// Trace norm of a Hermitian operator (sum of absolute eigenvalues).
pub fn trace_norm(op: &DenseOperator) -> Result<f64> {
    if !op.is_hermitian(1e-8 * op.frobenius_norm().max(1.0)) {
        return Err(Error::InvalidInput(
            "trace_norm implemented for Hermitian operators only".into(),
        ));
    }
    let (w, _) = linalg::eigh_c(op.entries())?;
    Ok(w.iter().map(|x| x.abs()).sum())
}

/// Trace distance `||a - b||_tr / 2`.
pub fn trace_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    a.check_same_basis(b)?;
    Ok(trace_norm(&(a - b))? / 2.0)
}
