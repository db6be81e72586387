//! Vectorization of density matrices and assembly of the Lindblad
//! superoperator `L = L0 + gamma L1`.
//!
//! Column stacking is used throughout: `vec(rho)[i + d*j] = rho[i][j]`.
//! Under this convention `vec(A X B) = kron(B^T, A) vec(X)` with the
//! Kronecker product placing its first factor on the slow (block) index,
//! so the coherent part reads `-i (kron(I, H) - kron(H^T, I))` and each
//! jump pair `(g, c)` contributes
//! `g [2 kron(conj(c), c) - kron(I, c'c) - kron((c'c)^T, I)]`.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, C64};
use crate::spin_ops::DenseOperator;

/// Lindblad superoperator on vectorized density matrices.
#[derive(Clone, Debug)]
pub struct Superoperator {
    dim: usize,
    entries: Array2<C64>,
    gamma_split: Option<(Array2<C64>, Array2<C64>)>,
    basis_tag: String,
}

impl Superoperator {
    /// Hilbert-space dimension `d`; `entries` is `d^2 x d^2`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Full generator matrix.
    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    /// Hamiltonian and dissipative parts `(L0, L1-at-given-rates)`,
    /// retained separately for perturbative use.
    pub fn gamma_split(&self) -> Option<(&Array2<C64>, &Array2<C64>)> {
        self.gamma_split.as_ref().map(|(a, b)| (a, b))
    }

    /// Basis tag inherited from the operators that built this generator.
    pub fn basis_tag(&self) -> &str {
        &self.basis_tag
    }

    /// Apply the generator to a density matrix without forming `vec`.
    pub fn apply(&self, rho: &DenseOperator) -> Result<DenseOperator> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "rho dim {} vs superoperator Hilbert dim {}",
                rho.dim(),
                self.dim
            )));
        }
        let v = vectorize(rho);
        devectorize(&self.entries.dot(&v), &self.basis_tag)
    }
}

/// Column-stacking vectorization.
pub fn vectorize(rho: &DenseOperator) -> Array1<C64> {
    let d = rho.dim();
    let mut v = Array1::zeros(d * d);
    for j in 0..d {
        for i in 0..d {
            v[i + d * j] = rho.entries()[(i, j)];
        }
    }
    v
}

/// Inverse of [`vectorize`]. Errors when the length is not a perfect
/// square.
pub fn devectorize(v: &Array1<C64>, basis_tag: impl Into<String>) -> Result<DenseOperator> {
    let len = v.len();
    let d = (len as f64).sqrt().round() as usize;
    if d * d != len {
        return Err(Error::DimensionMismatch(format!(
            "vector length {len} is not a perfect square"
        )));
    }
    let mut m = Array2::zeros((d, d));
    for j in 0..d {
        for i in 0..d {
            m[(i, j)] = v[i + d * j];
        }
    }
    DenseOperator::new(m, basis_tag)
}

/// Assemble the Lindblad generator for a Hamiltonian and weighted jumps.
/// Every pair `(g, c)` enters in the factor-2 form
/// `g (2 c rho c' - {c'c, rho})`.
pub fn build_liouvillian(
    h: &DenseOperator,
    jumps: &[(f64, DenseOperator)],
) -> Result<Superoperator> {
    let d = h.dim();
    let n2 = d * d;
    for (g, op) in jumps {
        h.check_same_basis(op)?;
        if !g.is_finite() || *g < 0.0 {
            return Err(Error::InvalidInput(format!(
                "jump rate must be nonnegative and finite, got {g}"
            )));
        }
    }

    let eye: Array2<C64> = Array2::eye(d);
    let ht = h.entries().t().to_owned();
    let mut ham: Array2<C64> = &linalg::kron(&eye, h.entries()) - &linalg::kron(&ht, &eye);
    ham.mapv_inplace(|z| z * c(0.0, -1.0));

    let mut diss: Array2<C64> = Array2::zeros((n2, n2));
    for (g, op) in jumps {
        if *g == 0.0 {
            continue;
        }
        let cm = op.entries();
        let cdag = linalg::dagger(cm);
        let cdc = cdag.dot(cm);
        let conj_c = cm.mapv(|z| z.conj());
        let mut term = linalg::kron(&conj_c, cm).mapv(|z| z * cr(2.0));
        term = term - linalg::kron(&eye, &cdc);
        term = term - linalg::kron(&cdc.t().to_owned(), &eye);
        diss = diss + term.mapv(|z| z * cr(*g));
    }

    let entries = &ham + &diss;
    Ok(Superoperator {
        dim: d,
        entries,
        gamma_split: Some((ham, diss)),
        basis_tag: h.basis_tag().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::models::{
        build_hamiltonian, build_jump_operators, Boundary, DissipatorSpec, Model, ModelSpec,
    };
    use crate::spin_ops::{full_basis_tag, pauli_site, Axis};
    use ndarray_linalg::Eig;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_density(d: usize, rng: &mut ChaCha8Rng, tag: &str) -> DenseOperator {
        // A A' / tr normalization yields a valid density matrix.
        let a = Array2::from_shape_fn((d, d), |_| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let m = a.dot(&linalg::dagger(&a));
        let tr: C64 = (0..d).map(|i| m[(i, i)]).sum();
        DenseOperator::new(m.mapv(|z| z / tr), tag).unwrap()
    }

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng, tag: &str) -> DenseOperator {
        let a = Array2::from_shape_fn((d, d), |_| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let m = &a + &linalg::dagger(&a);
        DenseOperator::new(m.mapv(|z| z * cr(0.5)), tag).unwrap()
    }

    fn direct_action(
        h: &DenseOperator,
        jumps: &[(f64, DenseOperator)],
        rho: &DenseOperator,
    ) -> Array2<C64> {
        let hr = h.entries().dot(rho.entries());
        let rh = rho.entries().dot(h.entries());
        let mut out = (&hr - &rh).mapv(|z| z * c(0.0, -1.0));
        for (g, op) in jumps {
            let cm = op.entries();
            let cd = linalg::dagger(cm);
            let cdc = cd.dot(cm);
            let sandwich = cm.dot(rho.entries()).dot(&cd);
            let anti = &cdc.dot(rho.entries()) + &rho.entries().dot(&cdc);
            out = out + (&sandwich.mapv(|z| z * cr(2.0)) - &anti).mapv(|z| z * cr(*g));
        }
        out
    }

    #[test]
    fn vectorize_conventions() {
        let eye = DenseOperator::identity(2, "spin:1");
        assert_eq!(
            vectorize(&eye).to_vec(),
            vec![cr(1.0), cr(0.0), cr(0.0), cr(1.0)]
        );

        let sp = pauli_site(Axis::Plus, 1, 1).unwrap();
        // |1><0| has its entry at row 1, column 0 -> slot 1.
        assert_eq!(
            vectorize(&sp).to_vec(),
            vec![cr(0.0), cr(1.0), cr(0.0), cr(0.0)]
        );
    }

    #[test]
    fn vectorize_roundtrip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random_density(4, &mut rng, "spin:2");
        let back = devectorize(&vectorize(&rho), "spin:2").unwrap();
        assert_eq!(max_abs_diff(rho.entries(), back.entries()), 0.0);
        assert!(devectorize(&Array1::zeros(5), "spin:1").is_err());
    }

    #[test]
    fn pure_decay_spectrum() {
        let h = DenseOperator::zeros(2, full_basis_tag(1));
        let jumps = vec![(1.0, pauli_site(Axis::Minus, 1, 1).unwrap())];
        let l = build_liouvillian(&h, &jumps).unwrap();
        let (vals, _) = l.entries().eig().unwrap();
        let mut re: Vec<f64> = vals.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        let expect = [-2.0, -1.0, -1.0, 0.0];
        for (a, b) in re.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(vals.iter().map(|z| z.im.abs()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn coherence_rotates_under_detuning() {
        // H = nu |1><1|, rho = |1><0|: L rho = -i nu rho.
        let nu = 0.7;
        let mut hm = Array2::zeros((2, 2));
        hm[(1, 1)] = cr(nu);
        let h = DenseOperator::new(hm, full_basis_tag(1)).unwrap();
        let l = build_liouvillian(&h, &[]).unwrap();
        let rho = pauli_site(Axis::Plus, 1, 1).unwrap();
        let out = l.apply(&rho).unwrap();
        let expect = rho.scaled(c(0.0, -nu));
        assert!(max_abs_diff(out.entries(), expect.entries()) < 1e-14);
    }

    #[test]
    fn trace_preservation_row() {
        let spec = ModelSpec {
            n_sites: 2,
            model: Model::Xxz {
                alpha1: 0.3,
                alpha2: 1.1,
            },
            boundary: Boundary::Open,
            b_x: 0.45,
            b_z: 0.0,
            nu_tilde: 0.0,
        };
        let h = build_hamiltonian(&spec).unwrap();
        let jumps = build_jump_operators(
            &DissipatorSpec::Local {
                rates: vec![0.02, 0.05],
            },
            2,
        )
        .unwrap();
        let l = build_liouvillian(&h, &jumps).unwrap();
        let eye = DenseOperator::identity(4, full_basis_tag(2));
        let vec_i = vectorize(&eye);
        // vec(I)' annihilates the generator.
        let row = linalg::dagger(&vec_i.insert_axis(ndarray::Axis(1))).dot(l.entries());
        let norm: f64 = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm < 1e-10 * linalg::frobenius(l.entries()));
    }

    #[test]
    fn action_equivalence_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let spec = ModelSpec {
            n_sites: 2,
            model: Model::Heisenberg { alpha: 0.8 },
            boundary: Boundary::Open,
            b_x: 0.6,
            b_z: 0.2,
            nu_tilde: 0.1,
        };
        let h = build_hamiltonian(&spec).unwrap();
        let jumps = build_jump_operators(
            &DissipatorSpec::LocalWithHeating {
                a_minus: 0.4,
                a_plus: 0.07,
            },
            2,
        )
        .unwrap();
        let l = build_liouvillian(&h, &jumps).unwrap();
        for _ in 0..5 {
            let rho = random_density(4, &mut rng, &full_basis_tag(2));
            let via_superop = l.apply(&rho).unwrap();
            let direct = direct_action(&h, &jumps, &rho);
            assert!(max_abs_diff(via_superop.entries(), &direct) < 1e-12);
        }
    }

    #[test]
    fn hermiticity_preservation_and_adjoint_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let h = build_hamiltonian(&ModelSpec {
            n_sites: 2,
            model: Model::Ising { alpha3: 1.0 },
            boundary: Boundary::Open,
            b_x: 0.9,
            b_z: 0.0,
            nu_tilde: 0.0,
        })
        .unwrap();
        let jumps = build_jump_operators(&DissipatorSpec::Collective { rate: 0.12 }, 2).unwrap();
        let l = build_liouvillian(&h, &jumps).unwrap();
        for _ in 0..5 {
            let rho = random_hermitian(4, &mut rng, &full_basis_tag(2));
            let out = l.apply(&rho).unwrap();
            assert!(out.is_hermitian(1e-12));
            // L(rho)' = L(rho') on general inputs.
            let general = random_density(4, &mut rng, &full_basis_tag(2)).dot(&random_hermitian(
                4,
                &mut rng,
                &full_basis_tag(2),
            ));
            let lhs = l.apply(&general).unwrap().dagger();
            let rhs = l.apply(&general.dagger()).unwrap();
            assert!(max_abs_diff(lhs.entries(), rhs.entries()) < 1e-12);
        }
    }

    #[test]
    fn spectrum_in_left_half_plane() {
        let h = build_hamiltonian(&ModelSpec {
            n_sites: 2,
            model: Model::Xxz {
                alpha1: 0.25,
                alpha2: 1.0,
            },
            boundary: Boundary::Open,
            b_x: 0.3,
            b_z: 0.0,
            nu_tilde: 0.0,
        })
        .unwrap();
        let jumps = build_jump_operators(
            &DissipatorSpec::Local {
                rates: vec![0.1, 0.2],
            },
            2,
        )
        .unwrap();
        let l = build_liouvillian(&h, &jumps).unwrap();
        let (vals, _) = l.entries().eig().unwrap();
        let max_re = vals.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        assert!(max_re <= 1e-10);
        // Zero is always an eigenvalue.
        let min_mod = vals.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        assert!(min_mod < 1e-12);
    }

    #[test]
    fn gamma_split_sums_to_entries() {
        let h = build_hamiltonian(&ModelSpec {
            n_sites: 2,
            model: Model::Ising { alpha3: 0.7 },
            boundary: Boundary::Open,
            b_x: 0.4,
            b_z: 0.0,
            nu_tilde: 0.0,
        })
        .unwrap();
        let jumps = build_jump_operators(
            &DissipatorSpec::Local {
                rates: vec![0.3, 0.3],
            },
            2,
        )
        .unwrap();
        let l = build_liouvillian(&h, &jumps).unwrap();
        let (ham, diss) = l.gamma_split().unwrap();
        assert!(max_abs_diff(&(ham + diss), l.entries()) < 1e-15);

        // Hamiltonian-only generator has an empty dissipative part.
        let l0 = build_liouvillian(&h, &[]).unwrap();
        let (h0, d0) = l0.gamma_split().unwrap();
        assert_eq!(linalg::max_abs(d0), 0.0);
        assert!(max_abs_diff(h0, l0.entries()) < 1e-15);
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let h = DenseOperator::zeros(2, "spin:1");
        let bad_tag = DenseOperator::zeros(2, "sector:x");
        assert!(build_liouvillian(&h, &[(1.0, bad_tag)]).is_err());
        let neg = pauli_site(Axis::Minus, 1, 1).unwrap();
        assert!(build_liouvillian(&h, &[(-0.5, neg)]).is_err());
    }
}
