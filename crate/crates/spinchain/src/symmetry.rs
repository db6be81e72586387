//! Chain symmetries: translation, reflection, and spin flip, plus
//! joint-eigenspace isometries used to compress operators into a sector.
//!
//! Sector bases are deterministic: the joint projector is applied to the
//! computational basis vectors in ascending index order, the images are
//! orthonormalized by modified Gram-Schmidt, and each kept column gets
//! its global phase fixed. This reproduces identical matrix dumps across
//! runs and platforms.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{self, cr, C64};
use crate::spin_ops::{full_basis_tag, DenseOperator};

/// Built-in symmetry kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryKind {
    /// Cyclic shift `(s_1, ..., s_N) -> (s_N, s_1, ..., s_{N-1})`.
    Translation,
    /// Site reversal `(s_1, ..., s_N) -> (s_N, ..., s_1)`.
    Reflection,
    /// Global spin flip of every site.
    Flip,
}

/// Permutation matrix for a chain symmetry. `T^N = R^2 = F^2 = I`.
pub fn symmetry_op(kind: SymmetryKind, n_sites: usize) -> Result<DenseOperator> {
    if n_sites == 0 {
        return Err(Error::InvalidInput("n_sites must be at least 1".into()));
    }
    let n = n_sites;
    let dim = 1usize << n;
    let mask = dim - 1;
    let mut entries: Array2<C64> = Array2::zeros((dim, dim));
    for b in 0..dim {
        let m = match kind {
            // Site 1 is the most significant bit; the shift moves the
            // last site to the front.
            SymmetryKind::Translation => ((b & 1) << (n - 1)) | (b >> 1),
            SymmetryKind::Reflection => {
                let mut r = 0usize;
                for k in 0..n {
                    if b >> k & 1 == 1 {
                        r |= 1 << (n - 1 - k);
                    }
                }
                r
            }
            SymmetryKind::Flip => b ^ mask,
        };
        entries[(m, b)] = cr(1.0);
    }
    DenseOperator::new(entries, full_basis_tag(n))
}

/// Isometry onto a joint eigenspace of commuting symmetry projectors.
#[derive(Clone, Debug)]
pub struct SectorIsometry {
    full_dim: usize,
    sector_dim: usize,
    columns: Array2<C64>,
    label: String,
    generators: Vec<(DenseOperator, C64)>,
}

impl SectorIsometry {
    /// Dimension of the ambient space.
    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// Dimension of the sector.
    pub fn sector_dim(&self) -> usize {
        self.sector_dim
    }

    /// Orthonormal columns spanning the sector (`full_dim x sector_dim`).
    pub fn columns(&self) -> &Array2<C64> {
        &self.columns
    }

    /// Sector label, e.g. `T=1,R=1`; used as the compressed basis tag.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Generators and target eigenvalues defining this sector.
    pub fn generators(&self) -> &[(DenseOperator, C64)] {
        &self.generators
    }
}

/// Smallest positive power at which the operator returns to the identity.
fn operator_order(u: &DenseOperator) -> Result<usize> {
    let eye = DenseOperator::identity(u.dim(), u.basis_tag());
    let mut power = u.clone();
    let cap = 256usize;
    for m in 1..=cap {
        if linalg::max_abs_diff(power.entries(), eye.entries()) < 1e-10 {
            return Ok(m);
        }
        power = power.dot(u);
    }
    Err(Error::InvalidInput(format!(
        "generator has no finite order up to {cap}; cannot build a sector projector"
    )))
}

fn format_eigenvalue(lambda: C64) -> String {
    if lambda.im.abs() < 1e-12 {
        let r = lambda.re;
        if (r - r.round()).abs() < 1e-12 {
            return format!("{}", r.round() as i64);
        }
        return format!("{r:.6}");
    }
    format!("{:.6}{:+.6}i", lambda.re, lambda.im)
}

/// Name a generator by matching it against the built-in symmetry ops.
fn generator_name(u: &DenseOperator, n_sites: usize, index: usize) -> String {
    for (kind, name) in [
        (SymmetryKind::Translation, "T"),
        (SymmetryKind::Reflection, "R"),
        (SymmetryKind::Flip, "F"),
    ] {
        if let Ok(canon) = symmetry_op(kind, n_sites) {
            if canon.dim() == u.dim() && linalg::max_abs_diff(canon.entries(), u.entries()) < 1e-12
            {
                return name.to_string();
            }
        }
    }
    format!("G{}", index + 1)
}

/// Build the isometry onto the joint eigenspace of the given generators
/// with the given target eigenvalues.
///
/// Each generator must be unitary with finite order; the sector
/// projectors (group averages weighted by the target eigenvalue) must
/// mutually commute. Projector commutation is the operative requirement:
/// translation and reflection do not commute as matrices for `N >= 3`,
/// yet their eigenvalue-1 projectors do, and that is what makes the
/// joint sector well defined.
pub fn sector_isometry(
    generators: &[(DenseOperator, C64)],
    n_sites: usize,
) -> Result<SectorIsometry> {
    if generators.is_empty() {
        return Err(Error::InvalidInput(
            "sector_isometry requires at least one generator".into(),
        ));
    }
    let dim = 1usize << n_sites;
    let tag = full_basis_tag(n_sites);
    let eye: Array2<C64> = Array2::eye(dim);

    let mut projectors: Vec<Array2<C64>> = Vec::with_capacity(generators.len());
    let mut label_parts: Vec<String> = Vec::with_capacity(generators.len());
    for (idx, (u, lambda)) in generators.iter().enumerate() {
        if u.dim() != dim || u.basis_tag() != tag {
            return Err(Error::BasisMismatch(u.basis_tag().to_string(), tag.clone()));
        }
        let udu = linalg::dagger(u.entries()).dot(u.entries());
        if linalg::max_abs_diff(&udu, &eye) > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "generator {} is not unitary",
                idx + 1
            )));
        }
        if (lambda.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "target eigenvalue {lambda} of generator {} is not unimodular",
                idx + 1
            )));
        }
        let order = operator_order(u)?;
        if (lambda.powu(order as u32) - cr(1.0)).norm() > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "eigenvalue {lambda} is not an order-{order} root of unity; the sector is empty"
            )));
        }
        // Group average sum_p (conj(lambda) U)^p / order projects onto
        // the lambda eigenspace.
        let seed = u.entries().mapv(|z| z * lambda.conj());
        let mut term: Array2<C64> = Array2::eye(dim);
        let mut proj: Array2<C64> = Array2::eye(dim);
        for _ in 1..order {
            term = term.dot(&seed);
            proj += &term;
        }
        proj.mapv_inplace(|z| z / cr(order as f64));
        projectors.push(proj);
        label_parts.push(format!(
            "{}={}",
            generator_name(u, n_sites, idx),
            format_eigenvalue(*lambda)
        ));
    }

    for i in 0..projectors.len() {
        for j in (i + 1)..projectors.len() {
            let pq = projectors[i].dot(&projectors[j]);
            let qp = projectors[j].dot(&projectors[i]);
            if linalg::max_abs_diff(&pq, &qp) > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "sector projectors of generators {} and {} do not commute",
                    i + 1,
                    j + 1
                )));
            }
        }
    }

    let mut joint = projectors[0].clone();
    for p in &projectors[1..] {
        joint = joint.dot(p);
    }
    let trace: C64 = (0..dim).map(|i| joint[(i, i)]).sum();
    let rank = trace.re.round();
    if (trace.re - rank).abs() > 1e-8 || trace.im.abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "joint projector trace {trace} is not an integer"
        )));
    }
    let rank = rank as usize;
    if rank == 0 {
        return Err(Error::InvalidInput("empty sector".into()));
    }

    let candidates: Vec<Array1<C64>> = (0..dim).map(|b| joint.column(b).to_owned()).collect();
    let basis = linalg::mgs_orthonormalize(candidates, 1e-8);
    if basis.len() != rank {
        return Err(Error::Numerical(format!(
            "orthonormalization found {} sector vectors, expected {rank}",
            basis.len()
        )));
    }
    let mut columns: Array2<C64> = Array2::zeros((dim, rank));
    for (j, v) in basis.iter().enumerate() {
        columns.column_mut(j).assign(v);
    }

    // Post-check: every column is a joint eigenvector with the labeled
    // eigenvalue. This is the correctness gate for exotic generator
    // combinations.
    for (u, lambda) in generators {
        let uv = u.entries().dot(&columns);
        let lv = columns.mapv(|z| z * *lambda);
        if linalg::max_abs_diff(&uv, &lv) > 1e-8 {
            return Err(Error::Numerical(
                "sector columns are not joint eigenvectors of the generators".into(),
            ));
        }
    }

    Ok(SectorIsometry {
        full_dim: dim,
        sector_dim: rank,
        columns,
        label: label_parts.join(","),
        generators: generators.to_vec(),
    })
}

/// Compress an operator into the sector: `columns' * op * columns`.
///
/// The operator must commute with every sector generator; otherwise it
/// maps sector states out of the sector and compression would silently
/// discard dynamics, so the call errors instead.
pub fn compress(op: &DenseOperator, iso: &SectorIsometry) -> Result<DenseOperator> {
    if op.dim() != iso.full_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator dim {} vs sector full_dim {}",
            op.dim(),
            iso.full_dim
        )));
    }
    op.check_same_basis(&iso.generators[0].0)?;
    let tol = 1e-10 * op.frobenius_norm().max(1.0);
    for (idx, (u, _)) in iso.generators.iter().enumerate() {
        if op.commutator_norm(u) > tol {
            return Err(Error::InvalidInput(format!(
                "operator does not commute with sector generator {} (leaks out of the sector)",
                idx + 1
            )));
        }
    }
    let v = &iso.columns;
    let compressed = linalg::dagger(v).dot(op.entries()).dot(v);
    DenseOperator::new(compressed, iso.label.clone())
}

/// Compress a weighted jump-operator list with the same isometry.
/// Rejects lists with sector-incompatible operators (e.g. local decay).
pub fn compress_jumps(
    jumps: &[(f64, DenseOperator)],
    iso: &SectorIsometry,
) -> Result<Vec<(f64, DenseOperator)>> {
    jumps
        .iter()
        .map(|(g, c)| Ok((*g, compress(c, iso)?)))
        .collect()
}
