//! Declarative spin-chain models and dissipators, with builders that
//! assemble dense Hamiltonians and weighted jump-operator lists.
//!
//! Hamiltonian form: nearest-neighbor couplings per model plus
//! `b_x * sum_k (sigma_k^+ + sigma_k^-) + b_z * sum_k sigma_k^z
//! + nu_tilde * sum_k |1><1|_k`. Open boundaries sum bonds `k = 1..N-1`;
//! periodic adds the bond `(N, 1)`.

use crate::error::{Error, Result};
use crate::linalg::cr;
use crate::spin_ops::{collective, full_basis_tag, pauli_site, Axis, DenseOperator};

/// Nearest-neighbor coupling structure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    /// `alpha1 (xx + yy) + alpha2 zz` per bond.
    Xxz { alpha1: f64, alpha2: f64 },
    /// `alpha3 zz` per bond.
    Ising { alpha3: f64 },
    /// `alpha (xx + yy + zz)` per bond; identical to `Xxz(alpha, alpha)`.
    Heisenberg { alpha: f64 },
}

impl Model {
    /// `(xy, zz)` coupling pair for bond terms.
    pub fn couplings(&self) -> (f64, f64) {
        match *self {
            Model::Xxz { alpha1, alpha2 } => (alpha1, alpha2),
            Model::Ising { alpha3 } => (0.0, alpha3),
            Model::Heisenberg { alpha } => (alpha, alpha),
        }
    }
}

/// Chain boundary condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Full description of a chain Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub n_sites: usize,
    pub model: Model,
    pub boundary: Boundary,
    /// Transverse field, multiplying `sum_k (sigma_k^+ + sigma_k^-)`.
    pub b_x: f64,
    /// Longitudinal field, multiplying `sum_k sigma_k^z`.
    pub b_z: f64,
    /// Diagonal detuning, multiplying `sum_k |1><1|_k`.
    pub nu_tilde: f64,
}

impl ModelSpec {
    /// Copy of the spec with the transverse field replaced. Sweeps vary
    /// `b_x` while holding everything else fixed.
    pub fn with_b_x(&self, b_x: f64) -> ModelSpec {
        ModelSpec {
            b_x,
            ..self.clone()
        }
    }

    /// Bond list as 1-based site pairs.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<(usize, usize)> = (1..self.n_sites).map(|k| (k, k + 1)).collect();
        if self.boundary == Boundary::Periodic {
            bonds.push((self.n_sites, 1));
        }
        bonds
    }

    /// Validate structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidInput(
                "two-site couplings require n_sites >= 2".into(),
            ));
        }
        if self.boundary == Boundary::Periodic && self.n_sites < 3 {
            return Err(Error::InvalidInput(
                "periodic boundary requires n_sites >= 3 (n_sites = 2 would double-count the bond)"
                    .into(),
            ));
        }
        let (xy, zz) = self.model.couplings();
        for (name, v) in [
            ("coupling", xy),
            ("coupling", zz),
            ("b_x", self.b_x),
            ("b_z", self.b_z),
            ("nu_tilde", self.nu_tilde),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Dissipation channel structure.
#[derive(Clone, Debug, PartialEq)]
pub enum DissipatorSpec {
    /// Independent decay `sigma_k^-` with per-site rates `gamma_k`.
    Local { rates: Vec<f64> },
    /// Collective decay through `J^- = sum_k sigma_k^-` at a single rate.
    Collective { rate: f64 },
    /// Per-site decay at `a_minus` plus per-site heating `sigma_k^+` at
    /// `a_plus`. The intended regime is `a_plus <= a_minus`.
    LocalWithHeating { a_minus: f64, a_plus: f64 },
}

impl DissipatorSpec {
    /// Convenience constructor for equal local rates.
    pub fn uniform_local(rate: f64, n_sites: usize) -> DissipatorSpec {
        DissipatorSpec::Local {
            rates: vec![rate; n_sites],
        }
    }

    /// Largest rate carried by the spec; used for unit-rate normalization.
    pub fn max_rate(&self) -> f64 {
        match self {
            DissipatorSpec::Local { rates } => rates.iter().cloned().fold(0.0, f64::max),
            DissipatorSpec::Collective { rate } => *rate,
            DissipatorSpec::LocalWithHeating { a_minus, a_plus } => a_minus.max(*a_plus),
        }
    }

    /// Copy with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> DissipatorSpec {
        match self {
            DissipatorSpec::Local { rates } => DissipatorSpec::Local {
                rates: rates.iter().map(|r| r * factor).collect(),
            },
            DissipatorSpec::Collective { rate } => DissipatorSpec::Collective {
                rate: rate * factor,
            },
            DissipatorSpec::LocalWithHeating { a_minus, a_plus } => {
                DissipatorSpec::LocalWithHeating {
                    a_minus: a_minus * factor,
                    a_plus: a_plus * factor,
                }
            }
        }
    }
}

/// Build the dense Hamiltonian for a model spec.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<DenseOperator> {
    spec.validate()?;
    let n = spec.n_sites;
    let dim = 1usize << n;
    let tag = full_basis_tag(n);
    let mut h = DenseOperator::zeros(dim, &tag);

    let (xy, zz) = spec.model.couplings();
    for (i, j) in spec.bonds() {
        if xy != 0.0 {
            let xx = pauli_site(Axis::X, i, n)?.dot(&pauli_site(Axis::X, j, n)?);
            let yy = pauli_site(Axis::Y, i, n)?.dot(&pauli_site(Axis::Y, j, n)?);
            h = &h + &(&(&xx + &yy) * cr(xy));
        }
        if zz != 0.0 {
            let zzop = pauli_site(Axis::Z, i, n)?.dot(&pauli_site(Axis::Z, j, n)?);
            h = &h + &(&zzop * cr(zz));
        }
    }
    if spec.b_x != 0.0 {
        // sigma^+ + sigma^- summed over sites equals J^x.
        h = &h + &(&collective(Axis::X, n)? * cr(spec.b_x));
    }
    if spec.b_z != 0.0 {
        h = &h + &(&collective(Axis::Z, n)? * cr(spec.b_z));
    }
    if spec.nu_tilde != 0.0 {
        // |1><1|_k = (I - sigma_k^z) / 2 summed over sites.
        let excited =
            &(&DenseOperator::identity(dim, &tag) * cr(n as f64)) - &collective(Axis::Z, n)?;
        h = &h + &(&excited * cr(spec.nu_tilde / 2.0));
    }
    debug_assert!(h.is_hermitian(1e-14));
    Ok(h)
}

/// Build the weighted jump-operator list for a dissipator spec.
///
/// Every returned pair `(g, c)` contributes `g (2 c rho c' - {c'c, rho})`
/// to the master equation. Local dissipation yields one `sigma_k^-` per
/// site; collective yields a single `J^-`; heating appends `sigma_k^+`
/// operators after the decay block.
pub fn build_jump_operators(
    diss: &DissipatorSpec,
    n_sites: usize,
) -> Result<Vec<(f64, DenseOperator)>> {
    if n_sites == 0 {
        return Err(Error::InvalidInput("n_sites must be at least 1".into()));
    }
    let check_rate = |name: &str, r: f64| -> Result<()> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidInput(format!(
                "{name} must be a nonnegative finite rate, got {r}"
            )));
        }
        Ok(())
    };
    match diss {
        DissipatorSpec::Local { rates } => {
            if rates.len() != n_sites {
                return Err(Error::InvalidInput(format!(
                    "local dissipator carries {} rates for {} sites",
                    rates.len(),
                    n_sites
                )));
            }
            let mut out = Vec::with_capacity(n_sites);
            for (k, &g) in rates.iter().enumerate() {
                check_rate("gamma_k", g)?;
                out.push((g, pauli_site(Axis::Minus, k + 1, n_sites)?));
            }
            Ok(out)
        }
        DissipatorSpec::Collective { rate } => {
            check_rate("gamma", *rate)?;
            Ok(vec![(*rate, collective(Axis::Minus, n_sites)?)])
        }
        DissipatorSpec::LocalWithHeating { a_minus, a_plus } => {
            check_rate("a_minus", *a_minus)?;
            check_rate("a_plus", *a_plus)?;
            if a_plus > a_minus {
                eprintln!(
                    "warning: a_plus = {a_plus} exceeds a_minus = {a_minus}; \
                     the weak-heating regime expects a_plus <= a_minus"
                );
            }
            let mut out = Vec::with_capacity(2 * n_sites);
            for k in 1..=n_sites {
                out.push((*a_minus, pauli_site(Axis::Minus, k, n_sites)?));
            }
            for k in 1..=n_sites {
                out.push((*a_plus, pauli_site(Axis::Plus, k, n_sites)?));
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, kron, max_abs_diff, C64};
    use ndarray::Array2;

    fn spec(n: usize, model: Model, boundary: Boundary, b_x: f64) -> ModelSpec {
        ModelSpec {
            n_sites: n,
            model,
            boundary,
            b_x,
            b_z: 0.0,
            nu_tilde: 0.0,
        }
    }

    #[test]
    fn ising_two_site_diagonal() {
        let h =
            build_hamiltonian(&spec(2, Model::Ising { alpha3: 1.0 }, Boundary::Open, 0.0)).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| h.entries()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(h.entries().iter().filter(|z| z.norm() > 0.0).count(), 4);
    }

    #[test]
    fn xxz_with_equal_couplings_is_heisenberg() {
        for (n, boundary) in [(2, Boundary::Open), (3, Boundary::Periodic)] {
            let a = build_hamiltonian(&spec(
                n,
                Model::Xxz {
                    alpha1: 0.37,
                    alpha2: 0.37,
                },
                boundary,
                0.81,
            ))
            .unwrap();
            let b = build_hamiltonian(&spec(n, Model::Heisenberg { alpha: 0.37 }, boundary, 0.81))
                .unwrap();
            assert_eq!(max_abs_diff(a.entries(), b.entries()), 0.0);
        }
    }

    #[test]
    fn ising_with_field_matches_bruteforce_assembly() {
        // Independent assembly from raw Kronecker products.
        let n = 4;
        let d = 16;
        let eye = |k: usize| -> Array2<C64> { Array2::eye(1 << k) };
        let sz: Array2<C64> = ndarray::array![[cr(1.0), cr(0.0)], [cr(0.0), cr(-1.0)]];
        let sx: Array2<C64> = ndarray::array![[cr(0.0), cr(1.0)], [cr(1.0), cr(0.0)]];
        let embed = |op: &Array2<C64>, k: usize| -> Array2<C64> {
            kron(&kron(&eye(k - 1), op), &eye(n - k))
        };
        let mut reference: Array2<C64> = Array2::zeros((d, d));
        for k in 1..n {
            reference = reference + embed(&sz, k).dot(&embed(&sz, k + 1));
        }
        for k in 1..=n {
            reference = reference + embed(&sx, k).mapv(|z| z * cr(0.5));
        }

        let h =
            build_hamiltonian(&spec(n, Model::Ising { alpha3: 1.0 }, Boundary::Open, 0.5)).unwrap();
        assert!(max_abs_diff(h.entries(), &reference) < 1e-14);
    }

    #[test]
    fn built_hamiltonians_are_hermitian() {
        let cases = [
            spec(
                3,
                Model::Xxz {
                    alpha1: -0.4,
                    alpha2: 1.3,
                },
                Boundary::Periodic,
                0.9,
            ),
            ModelSpec {
                n_sites: 3,
                model: Model::Heisenberg { alpha: 0.7 },
                boundary: Boundary::Open,
                b_x: 0.2,
                b_z: -0.3,
                nu_tilde: 0.11,
            },
        ];
        for s in cases {
            let h = build_hamiltonian(&s).unwrap();
            assert!(h.is_hermitian(1e-14));
        }
    }

    #[test]
    fn nu_tilde_counts_excitations() {
        // For Ising with alpha3 = 0 surrogate use XXZ(0,0): H reduces to
        // nu_tilde * (number of excited sites).
        let s = ModelSpec {
            n_sites: 2,
            model: Model::Xxz {
                alpha1: 0.0,
                alpha2: 0.0,
            },
            boundary: Boundary::Open,
            b_x: 0.0,
            b_z: 0.0,
            nu_tilde: 0.6,
        };
        let h = build_hamiltonian(&s).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| h.entries()[(i, i)].re).collect();
        // |00>, |01>, |10>, |11> hold 0, 1, 1, 2 excitations.
        assert_eq!(diag, vec![0.0, 0.6, 0.6, 1.2]);
    }

    #[test]
    fn boundary_validation() {
        assert!(build_hamiltonian(&spec(
            2,
            Model::Ising { alpha3: 1.0 },
            Boundary::Periodic,
            0.0
        ))
        .is_err());
        assert!(
            build_hamiltonian(&spec(1, Model::Ising { alpha3: 1.0 }, Boundary::Open, 0.0)).is_err()
        );
        assert!(build_hamiltonian(&spec(
            3,
            Model::Ising { alpha3: f64::NAN },
            Boundary::Open,
            0.0
        ))
        .is_err());
    }

    #[test]
    fn local_jump_list() {
        let jumps = build_jump_operators(
            &DissipatorSpec::Local {
                rates: vec![0.1, 0.1],
            },
            2,
        )
        .unwrap();
        assert_eq!(jumps.len(), 2);
        assert_eq!(jumps[0].0, 0.1);
        let s1 = pauli_site(Axis::Minus, 1, 2).unwrap();
        let s2 = pauli_site(Axis::Minus, 2, 2).unwrap();
        assert_eq!(max_abs_diff(jumps[0].1.entries(), s1.entries()), 0.0);
        assert_eq!(max_abs_diff(jumps[1].1.entries(), s2.entries()), 0.0);
    }

    #[test]
    fn collective_jump_is_total_lowering() {
        let jumps = build_jump_operators(&DissipatorSpec::Collective { rate: 0.3 }, 3).unwrap();
        assert_eq!(jumps.len(), 1);
        assert_eq!(jumps[0].0, 0.3);
        let jm = collective(Axis::Minus, 3).unwrap();
        assert_eq!(max_abs_diff(jumps[0].1.entries(), jm.entries()), 0.0);
    }

    #[test]
    fn heating_jump_list_order_and_rates() {
        let jumps = build_jump_operators(
            &DissipatorSpec::LocalWithHeating {
                a_minus: 1.0,
                a_plus: 0.01,
            },
            1,
        )
        .unwrap();
        assert_eq!(jumps.len(), 2);
        assert_eq!(jumps[0].0, 1.0);
        assert_eq!(jumps[1].0, 0.01);
        let sm = pauli_site(Axis::Minus, 1, 1).unwrap();
        let sp = pauli_site(Axis::Plus, 1, 1).unwrap();
        assert_eq!(max_abs_diff(jumps[0].1.entries(), sm.entries()), 0.0);
        assert_eq!(max_abs_diff(jumps[1].1.entries(), sp.entries()), 0.0);
    }

    #[test]
    fn dissipator_validation() {
        assert!(build_jump_operators(&DissipatorSpec::Local { rates: vec![0.1] }, 2).is_err());
        assert!(build_jump_operators(
            &DissipatorSpec::Local {
                rates: vec![-0.1, 0.1]
            },
            2
        )
        .is_err());
        assert!(build_jump_operators(&DissipatorSpec::Collective { rate: -1.0 }, 2).is_err());
        assert!(build_jump_operators(&DissipatorSpec::Collective { rate: 1.0 }, 0).is_err());
    }
}
