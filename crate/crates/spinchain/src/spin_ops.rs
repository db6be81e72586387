//! Single-site Pauli/ladder operators embedded into the N-site Hilbert
//! space, collective operators, and the dense-operator container.
//!
//! Basis conventions: the computational basis is `|s_1 s_2 ... s_N>` with
//! site 1 in the most significant bit of the index. `|0>` is the ground
//! state and carries `sigma^z` eigenvalue +1; `sigma^+ = |1><0|` excites
//! it. Explicitly `sigma^y = i(sigma^+ - sigma^-)`, consistent with
//! `sigma^x sigma^y = i sigma^z`.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, C64};

/// Operator axis for single-site and collective constructors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Basis tag for the full computational basis on `n_sites` spins.
pub fn full_basis_tag(n_sites: usize) -> String {
    format!("spin:{n_sites}")
}

/// Dense operator on the chain Hilbert space or on a named sector.
///
/// `entries` is square with side `dim`; the `basis_tag` identifies which
/// basis the matrix elements refer to, and binary operations require both
/// operands to carry the same tag.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Array2<C64>,
    basis_tag: String,
}

impl DenseOperator {
    /// Wrap a square matrix. Errors on non-square input.
    pub fn new(entries: Array2<C64>, basis_tag: impl Into<String>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(DenseOperator {
            dim: entries.nrows(),
            entries,
            basis_tag: basis_tag.into(),
        })
    }

    /// Identity operator.
    pub fn identity(dim: usize, basis_tag: impl Into<String>) -> Self {
        DenseOperator {
            dim,
            entries: Array2::eye(dim),
            basis_tag: basis_tag.into(),
        }
    }

    /// Zero operator.
    pub fn zeros(dim: usize, basis_tag: impl Into<String>) -> Self {
        DenseOperator {
            dim,
            entries: Array2::zeros((dim, dim)),
            basis_tag: basis_tag.into(),
        }
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix elements in the tagged basis.
    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    /// Consume the operator, returning its matrix.
    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    /// Basis label.
    pub fn basis_tag(&self) -> &str {
        &self.basis_tag
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        DenseOperator {
            dim: self.dim,
            entries: linalg::dagger(&self.entries),
            basis_tag: self.basis_tag.clone(),
        }
    }

    /// Matrix product. Panics on basis or dimension mismatch; use
    /// [`DenseOperator::check_same_basis`] at fallible boundaries.
    pub fn dot(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        DenseOperator {
            dim: self.dim,
            entries: self.entries.dot(&other.entries),
            basis_tag: self.basis_tag.clone(),
        }
    }

    /// Scalar multiple.
    pub fn scaled(&self, factor: C64) -> Self {
        DenseOperator {
            dim: self.dim,
            entries: self.entries.mapv(|z| z * factor),
            basis_tag: self.basis_tag.clone(),
        }
    }

    /// Hermiticity test against an absolute entrywise tolerance.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::is_hermitian(&self.entries, tol)
    }

    /// Frobenius norm of the matrix.
    pub fn frobenius_norm(&self) -> f64 {
        linalg::frobenius(&self.entries)
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[(i, i)]).sum()
    }

    /// Frobenius norm of the commutator `[self, other]`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        self.assert_compatible(other);
        let ab = self.entries.dot(&other.entries);
        let ba = other.entries.dot(&self.entries);
        linalg::frobenius(&(&ab - &ba))
    }

    /// Fallible basis/dimension compatibility check.
    pub fn check_same_basis(&self, other: &Self) -> Result<()> {
        if self.basis_tag != other.basis_tag {
            return Err(Error::BasisMismatch(
                self.basis_tag.clone(),
                other.basis_tag.clone(),
            ));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator dims {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(
            self.basis_tag, other.basis_tag,
            "basis_tag mismatch in operator arithmetic"
        );
        assert_eq!(
            self.dim, other.dim,
            "dimension mismatch in operator arithmetic"
        );
    }

    /// Row-major CSV dump, one matrix row per line, each entry as a
    /// `re,im` pair. Used by golden-file tests.
    pub fn dump_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if j > 0 {
                    out.push(',');
                }
                let z = self.entries[(i, j)];
                let _ = write!(out, "{:.16e},{:.16e}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        self.assert_compatible(rhs);
        DenseOperator {
            dim: self.dim,
            entries: &self.entries + &rhs.entries,
            basis_tag: self.basis_tag.clone(),
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        self.assert_compatible(rhs);
        DenseOperator {
            dim: self.dim,
            entries: &self.entries - &rhs.entries,
            basis_tag: self.basis_tag.clone(),
        }
    }
}

impl Neg for &DenseOperator {
    type Output = DenseOperator;
    fn neg(self) -> DenseOperator {
        self.scaled(cr(-1.0))
    }
}

impl Mul<C64> for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: C64) -> DenseOperator {
        self.scaled(rhs)
    }
}

/// 2x2 matrix for a single-site operator.
fn single_site(axis: Axis) -> Array2<C64> {
    let mut m = Array2::zeros((2, 2));
    match axis {
        Axis::X => {
            m[(0, 1)] = cr(1.0);
            m[(1, 0)] = cr(1.0);
        }
        Axis::Y => {
            m[(0, 1)] = c(0.0, -1.0);
            m[(1, 0)] = c(0.0, 1.0);
        }
        Axis::Z => {
            m[(0, 0)] = cr(1.0);
            m[(1, 1)] = cr(-1.0);
        }
        Axis::Plus => {
            m[(1, 0)] = cr(1.0);
        }
        Axis::Minus => {
            m[(0, 1)] = cr(1.0);
        }
    }
    m
}

/// Largest chain length for which dense operators stay at desk scale.
pub const MAX_DENSE_SITES: usize = 12;

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::InvalidInput("n_sites must be at least 1".into()));
    }
    if n_sites > MAX_DENSE_SITES {
        return Err(Error::InvalidInput(format!(
            "n_sites = {n_sites} exceeds the dense-operator limit of {MAX_DENSE_SITES}"
        )));
    }
    Ok(())
}

/// Single-site operator embedded at `site` (1-based) in an `n_sites`
/// chain: identity on every other site.
pub fn pauli_site(axis: Axis, site: usize, n_sites: usize) -> Result<DenseOperator> {
    check_sites(n_sites)?;
    if site == 0 || site > n_sites {
        return Err(Error::InvalidInput(format!(
            "site {site} out of range 1..={n_sites}"
        )));
    }
    let left: Array2<C64> = Array2::eye(1 << (site - 1));
    let right: Array2<C64> = Array2::eye(1 << (n_sites - site));
    let embedded = linalg::kron(&linalg::kron(&left, &single_site(axis)), &right);
    DenseOperator::new(embedded, full_basis_tag(n_sites))
}

/// Collective operator `J = sum_k sigma_k` along the chosen axis.
pub fn collective(axis: Axis, n_sites: usize) -> Result<DenseOperator> {
    check_sites(n_sites)?;
    let mut acc = DenseOperator::zeros(1 << n_sites, full_basis_tag(n_sites));
    for k in 1..=n_sites {
        acc = &acc + &pauli_site(axis, k, n_sites)?;
    }
    Ok(acc)
}
