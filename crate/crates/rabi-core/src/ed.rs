//! Exact diagonalization of the full model in the truncated Fock x spin basis.
//!
//! This is the reference the two-step scheme is validated against: the
//! 2N x 2N matrix of H = a^dag a + 1/2 + (Delta/2) sigma_x + g sigma_z (a + a^dag)
//! in the |n> tensor |sigma_z> product basis, solved densely. The zero-point
//! 1/2 is included so both solvers report energies in the same convention.
//!
//! H commutes with the parity Pi = sigma_x (-1)^{a^dag a}, which survives the
//! truncation exactly; converged eigenstates therefore carry <Pi> = +/-1 and
//! are labeled by it.

use crate::eig::{eigh, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::hermite::FockBasisSpec;
use crate::model::ModelParams;

/// Eigenvalue of the conserved parity Pi = sigma_x (-1)^{a^dag a}:
/// Even is <Pi> = +1, Odd is <Pi> = -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TotalParity {
    Even,
    Odd,
}

/// Converged low part of the full spectrum. States are indexed over the
/// product basis as d(2n + s) with s = 0 for sigma_z = +1 and s = 1 for
/// sigma_z = -1.
#[derive(Debug, Clone, PartialEq)]
pub struct EDSpectrum {
    params: ModelParams,
    n_max: usize,
    energies: Vec<f64>,
    states: Vec<Vec<f64>>,
    parity: Vec<TotalParity>,
}

impl EDSpectrum {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Coefficient vectors over the 2N product basis, indexed d[2n + s].
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn parity(&self) -> &[TotalParity] {
        &self.parity
    }

    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }
}

/// Assembles the 2N x 2N Hamiltonian for arbitrary delta >= 0, g >= 0.
///
/// The relaxed delta = 0 entry point exists because the zero-splitting limit
/// (exactly solvable displaced oscillators) is a test oracle, while
/// [`ModelParams`] itself rejects delta = 0.
pub fn build_ed_matrix_raw(delta: f64, g: f64, n_max: usize) -> Result<SymmetricMatrix> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidInput(format!(
            "delta must be finite and non-negative, got {delta}"
        )));
    }
    if !g.is_finite() || g < 0.0 {
        return Err(Error::InvalidInput(format!(
            "g must be finite and non-negative, got {g}"
        )));
    }
    if n_max < 1 {
        return Err(Error::InvalidInput("basis size N must be >= 1".into()));
    }
    Ok(SymmetricMatrix::from_fn(2 * n_max, |i, j| {
        let (n, s) = (i / 2, i % 2);
        let (m, t) = (j / 2, j % 2);
        if i == j {
            n as f64 + 0.5
        } else if n == m && s != t {
            // (Delta/2) sigma_x
            0.5 * delta
        } else if s == t && m == n + 1 {
            // g sigma_z (a + a^dag), sign from sigma_z = +/-1
            let sign = if s == 0 { 1.0 } else { -1.0 };
            sign * g * ((n + 1) as f64).sqrt()
        } else {
            0.0
        }
    }))
}

/// The Hamiltonian at validated model parameters.
pub fn build_ed_matrix(params: &ModelParams, basis: FockBasisSpec) -> Result<SymmetricMatrix> {
    build_ed_matrix_raw(params.delta(), params.g(), basis.n_max())
}

/// Expectation of Pi = sigma_x (-1)^{a^dag a} in a product-basis vector:
/// 2 sum_n (-1)^n d(n, up) d(n, down).
pub fn parity_expectation(state: &[f64]) -> f64 {
    let mut total = 0.0;
    for n in 0..state.len() / 2 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * state[2 * n] * state[2 * n + 1];
    }
    2.0 * total
}

/// Lowest `n_levels` eigenpairs of the full Hamiltonian, with parity labels
/// from the sign of the Pi expectation. Requires 1 <= K <= 2N.
pub fn solve_ed(params: &ModelParams, n_max: usize, n_levels: usize) -> Result<EDSpectrum> {
    if n_levels < 1 || n_levels > 2 * n_max {
        return Err(Error::InvalidInput(format!(
            "n_levels must satisfy 1 <= K <= 2N, got K={n_levels}, N={n_max}"
        )));
    }
    let basis = FockBasisSpec::new(n_max)?;
    let m = build_ed_matrix(params, basis)?;
    let dec = eigh(&m)?;
    let energies: Vec<f64> = dec.values[..n_levels].to_vec();
    let states: Vec<Vec<f64>> = dec.vectors[..n_levels].to_vec();
    let parity = states
        .iter()
        .map(|d| {
            if parity_expectation(d) >= 0.0 {
                TotalParity::Even
            } else {
                TotalParity::Odd
            }
        })
        .collect();
    Ok(EDSpectrum {
        params: *params,
        n_max,
        energies,
        states,
        parity,
    })
}

/// Mean photon number <a^dag a> = sum_{n,sigma} n d(n,sigma)^2 of state k.
pub fn photon_number_ed(spec: &EDSpectrum, k: usize) -> Result<f64> {
    let state = spec
        .states()
        .get(k)
        .ok_or_else(|| Error::InvalidInput(format!("state index {k} out of range")))?;
    Ok(state
        .iter()
        .enumerate()
        .map(|(i, d)| (i / 2) as f64 * d * d)
        .sum())
}
