//! Second diagonalization: the oscillator dressed by one adiabatic surface.
//!
//! With the two-level sector already diagonal at each position, the remaining
//! problem on a single branch is the N x N Fock-basis matrix
//!
//!   M[n,m] = (n + 1/2) delta_nm + <n|eps_branch|m>,
//!
//! whose eigenpairs give the branch energies E_k and coefficient vectors
//! c_k(n) = <n|psi_k>. Because eps_branch is even in xi, M couples only Fock
//! states of equal parity, so the even and odd sub-blocks are solved
//! independently and merged; every eigenvector is then exactly parity pure.

use crate::eig::{eigh, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::hermite::{
    default_quadrature_order, gauss_hermite_rule, hermite_values, potential_matrix, FockBasisSpec,
    QuadratureRule,
};
use crate::model::{adiabatic_eigenvector, adiabatic_energy, Branch, ModelParams};

/// Parity of the Fock-coefficient support of a branch eigenstate: Even means
/// c(n) = 0 for all odd n, and vice versa.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FockParity {
    Even,
    Odd,
}

/// Converged low part of one branch spectrum: ascending energies with their
/// Fock coefficient vectors (each exactly parity pure and normalized).
#[derive(Debug, Clone, PartialEq)]
pub struct BOSpectrum {
    params: ModelParams,
    branch: Branch,
    n_max: usize,
    energies: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
    fock_parity: Vec<FockParity>,
}

impl BOSpectrum {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Coefficient vectors c_k(n), each of length n_max.
    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn fock_parity(&self) -> &[FockParity] {
        &self.fock_parity
    }

    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }
}

/// M[n,m] = (n + 1/2) delta_nm + <n|eps_branch|m> by quadrature.
pub fn build_bo_matrix(
    params: &ModelParams,
    branch: Branch,
    basis: FockBasisSpec,
    rule: &QuadratureRule,
) -> Result<SymmetricMatrix> {
    let params = *params;
    let mut m = potential_matrix(
        move |xi| adiabatic_energy(&params, branch, xi),
        basis,
        rule,
    )?;
    for n in 0..basis.n_max() {
        let ladder = n as f64 + 0.5;
        m.set(n, n, m.get(n, n) + ladder);
    }
    Ok(m)
}

/// Solves one branch with a freshly built default-order quadrature rule.
pub fn solve_bo(
    params: &ModelParams,
    branch: Branch,
    n_max: usize,
    n_levels: usize,
) -> Result<BOSpectrum> {
    let basis = FockBasisSpec::new(n_max)?;
    let rule = gauss_hermite_rule(default_quadrature_order(n_max))?;
    solve_bo_with(params, branch, basis, &rule, n_levels)
}

/// Solves one branch reusing a caller-provided rule (sweeps share one rule
/// across all coupling points). Requires 1 <= n_levels <= N and
/// rule order >= 2N+1.
pub fn solve_bo_with(
    params: &ModelParams,
    branch: Branch,
    basis: FockBasisSpec,
    rule: &QuadratureRule,
    n_levels: usize,
) -> Result<BOSpectrum> {
    let n = basis.n_max();
    if n_levels < 1 || n_levels > n {
        return Err(Error::InvalidInput(format!(
            "n_levels must satisfy 1 <= K <= N, got K={n_levels}, N={n}"
        )));
    }
    let m = build_bo_matrix(params, branch, basis, rule)?;

    // eps_branch is even, so M is block diagonal in Fock parity (the
    // off-parity entries are pure quadrature noise below 1e-12); solving the
    // sub-blocks yields exactly parity-pure eigenvectors and, for the near
    // degenerate double-well doublets, avoids any mixing across the split.
    let mut states: Vec<(f64, Vec<f64>, FockParity)> = Vec::with_capacity(n);
    for (start, parity) in [(0usize, FockParity::Even), (1usize, FockParity::Odd)] {
        let idx: Vec<usize> = (start..n).step_by(2).collect();
        if idx.is_empty() {
            continue;
        }
        let block = SymmetricMatrix::from_fn(idx.len(), |i, j| m.get(idx[i], idx[j]));
        let dec = eigh(&block)?;
        for (k, &e) in dec.values.iter().enumerate() {
            let mut c = vec![0.0; n];
            for (i, &full_index) in idx.iter().enumerate() {
                c[full_index] = dec.vectors[k][i];
            }
            states.push((e, c, parity));
        }
    }
    states.sort_by(|a, b| a.0.total_cmp(&b.0));
    states.truncate(n_levels);

    let mut energies = Vec::with_capacity(n_levels);
    let mut coeffs = Vec::with_capacity(n_levels);
    let mut fock_parity = Vec::with_capacity(n_levels);
    for (e, c, p) in states {
        energies.push(e);
        coeffs.push(c);
        fock_parity.push(p);
    }
    Ok(BOSpectrum {
        params: *params,
        branch,
        n_max: n,
        energies,
        coeffs,
        fock_parity,
    })
}

/// Two spin-component amplitudes at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinComponents {
    pub up: f64,
    pub down: f64,
}

/// Branch eigenstates sampled on a position grid: the scalar oscillator part
/// psi_k(xi) = sum_n c_k(n) h_n(xi) and the full two-component wavefunction
/// Phi_k(xi, sigma) = phi_branch(xi, sigma) psi_k(xi).
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    xi: Vec<f64>,
    psi: Vec<Vec<f64>>,
    components: Vec<Vec<SpinComponents>>,
}

impl WavefunctionGrid {
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// psi[k][i] is state k at grid point i.
    pub fn psi(&self) -> &[Vec<f64>] {
        &self.psi
    }

    /// components[k][i] are the spin-up/down amplitudes of state k at point i.
    pub fn components(&self) -> &[Vec<SpinComponents>] {
        &self.components
    }

    pub fn n_states(&self) -> usize {
        self.psi.len()
    }
}

/// Samples every state of `spec` on a strictly increasing grid.
pub fn wavefunctions_on_grid(spec: &BOSpectrum, xi_grid: &[f64]) -> Result<WavefunctionGrid> {
    if xi_grid.is_empty() {
        return Err(Error::InvalidInput("grid must be non-empty".into()));
    }
    for w in xi_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidInput(
                "grid must be strictly increasing".into(),
            ));
        }
    }
    if xi_grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("grid points must be finite".into()));
    }
    let k_states = spec.n_levels();
    let mut psi = vec![Vec::with_capacity(xi_grid.len()); k_states];
    let mut components = vec![Vec::with_capacity(xi_grid.len()); k_states];
    for &x in xi_grid {
        let hv = hermite_values(spec.n_max() - 1, x);
        let phi = adiabatic_eigenvector(spec.params(), spec.branch(), x);
        for k in 0..k_states {
            let value: f64 = spec.coeffs()[k]
                .iter()
                .zip(&hv)
                .map(|(c, h)| c * h)
                .sum();
            psi[k].push(value);
            components[k].push(SpinComponents {
                up: phi[0] * value,
                down: phi[1] * value,
            });
        }
    }
    Ok(WavefunctionGrid {
        xi: xi_grid.to_vec(),
        psi,
        components,
    })
}
