//! Dense real-symmetric eigendecomposition, the single numerical kernel shared
//! by both diagonalization stages and the quadrature construction.
//!
//! The decomposition itself is delegated to nalgebra's symmetric eigensolver;
//! this module owns the contract on top of it: validated input, ascending
//! eigenvalues, orthonormal eigenvectors with a fixed sign convention, and
//! convergence failures surfaced as errors instead of wrong answers.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Dense symmetric matrix in row-major storage. The builders write both
/// triangles from a single value, so `entries[i][j] == entries[j][i]` holds
/// exactly as stored, not merely up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    /// Zero matrix of the given dimension (dim >= 1).
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "SymmetricMatrix requires dim >= 1");
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    /// Builds from a generator evaluated only on the upper triangle (i <= j);
    /// the value is mirrored, so symmetry is exact by construction.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m.entries[i * dim + j] = v;
                m.entries[j * dim + i] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Writes both (i, j) and (j, i).
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
        self.entries[j * self.dim + i] = v;
    }

    /// Row-major dense storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    /// Frobenius norm, used by residual bounds.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Result of [`eigh`]: `values[k]` and `vectors[k]` form the k-th eigenpair,
/// values ascending, vectors orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Eigenvectors, one per eigenvalue. Sign convention: the
    /// largest-magnitude component is positive, ties broken by lowest index.
    pub vectors: Vec<Vec<f64>>,
}

/// Iteration cap passed to the QR/QL iteration; exceeding it is reported as
/// [`Error::NoConvergence`].
fn iteration_cap(dim: usize) -> usize {
    1000 + 40 * dim
}

/// Full eigendecomposition of a real symmetric matrix.
///
/// Deterministic for a given input: same bits in, same bits out.
pub fn eigh(a: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let dim = a.dim();
    if let Some(bad) = a.as_slice().iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "matrix entries must be finite, found {bad}"
        )));
    }
    let m = DMatrix::from_row_slice(dim, dim, a.as_slice());
    let dec = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, iteration_cap(dim))
        .ok_or_else(|| {
            Error::NoConvergence(format!(
                "symmetric eigensolver exceeded {} iterations at dim {}",
                iteration_cap(dim),
                dim
            ))
        })?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| dec.eigenvalues[i].total_cmp(&dec.eigenvalues[j]));

    let mut values = Vec::with_capacity(dim);
    let mut vectors = Vec::with_capacity(dim);
    for &k in &order {
        values.push(dec.eigenvalues[k]);
        let mut v: Vec<f64> = dec.eigenvectors.column(k).iter().copied().collect();
        fix_sign(&mut v);
        vectors.push(v);
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Flips the vector so its largest-magnitude component (lowest index on ties)
/// is positive, making decompositions reproducible bit-for-bit across runs.
fn fix_sign(v: &mut [f64]) {
    let mut imax = 0;
    let mut vmax = v[0].abs();
    for (i, x) in v.iter().enumerate().skip(1) {
        if x.abs() > vmax {
            vmax = x.abs();
            imax = i;
        }
    }
    if v[imax] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;

    fn random_symmetric(dim: usize, seed: u64) -> SymmetricMatrix {
        let mut rng = StdRng::seed_from_u64(seed);
        SymmetricMatrix::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn diagonal_matrix_sorts_ascending() {
        let mut a = SymmetricMatrix::zeros(3);
        a.set(0, 0, 3.0);
        a.set(1, 1, 1.0);
        a.set(2, 2, 2.0);
        let dec = eigh(&a).unwrap();
        assert_eq!(dec.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_exchange() {
        let mut a = SymmetricMatrix::zeros(2);
        a.set(0, 1, 1.0);
        let dec = eigh(&a).unwrap();
        let s = 0.5_f64.sqrt();
        assert!((dec.values[0] + 1.0).abs() < 1e-14);
        assert!((dec.values[1] - 1.0).abs() < 1e-14);
        // sign convention: tied magnitudes resolve to a positive first entry
        assert!((dec.vectors[0][0] - s).abs() < 1e-14);
        assert!((dec.vectors[0][1] + s).abs() < 1e-14);
        assert!((dec.vectors[1][0] - s).abs() < 1e-14);
        assert!((dec.vectors[1][1] - s).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_oracle_50x50() {
        let a = random_symmetric(50, 7);
        let dec = eigh(&a).unwrap();
        let mut max_err: f64 = 0.0;
        for i in 0..50 {
            for j in 0..50 {
                let mut s = 0.0;
                for k in 0..50 {
                    s += dec.values[k] * dec.vectors[k][i] * dec.vectors[k][j];
                }
                max_err = max_err.max((s - a.get(i, j)).abs());
            }
        }
        assert!(max_err < 1e-9, "reconstruction error {max_err}");
    }

    #[test]
    fn residual_and_orthogonality_bounds() {
        let a = random_symmetric(40, 11);
        let dec = eigh(&a).unwrap();
        let scale = a.frobenius_norm().max(1.0);
        for k in 0..40 {
            let mut res = 0.0;
            for i in 0..40 {
                let mut av = 0.0;
                for j in 0..40 {
                    av += a.get(i, j) * dec.vectors[k][j];
                }
                let r = av - dec.values[k] * dec.vectors[k][i];
                res += r * r;
            }
            assert!(res.sqrt() <= 1e-10 * scale);
        }
        for p in 0..40 {
            for q in 0..40 {
                let dot: f64 = (0..40).map(|i| dec.vectors[p][i] * dec.vectors[q][i]).sum();
                let expect = if p == q { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn trace_preserved() {
        let a = random_symmetric(30, 3);
        let dec = eigh(&a).unwrap();
        let tr: f64 = (0..30).map(|i| a.get(i, i)).sum();
        let sum: f64 = dec.values.iter().sum();
        assert!((sum - tr).abs() <= 1e-9 * tr.abs().max(1.0));
    }

    #[test]
    fn shift_invariance() {
        let a = random_symmetric(25, 5);
        let c = 3.7;
        let mut b = a.clone();
        for i in 0..25 {
            b.set(i, i, a.get(i, i) + c);
        }
        let da = eigh(&a).unwrap();
        let db = eigh(&b).unwrap();
        for k in 0..25 {
            assert!((db.values[k] - da.values[k] - c).abs() <= 1e-10);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut a = SymmetricMatrix::zeros(2);
        a.set(0, 1, f64::NAN);
        assert!(matches!(eigh(&a), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn deterministic_repeat() {
        let a = random_symmetric(20, 13);
        let d1 = eigh(&a).unwrap();
        let d2 = eigh(&a).unwrap();
        assert_eq!(d1.values, d2.values);
        assert_eq!(d1.vectors, d2.vectors);
    }

    #[test]
    fn sign_convention_flips_negative_dominant() {
        // rank-1 dominant direction with a negative large component
        let v = [0.1, -0.9, 0.2];
        let a = SymmetricMatrix::from_fn(3, |i, j| 2.0 * v[i] * v[j]);
        let dec = eigh(&a).unwrap();
        let top = &dec.vectors[2];
        let mut imax = 0;
        for i in 1..3 {
            if top[i].abs() > top[imax].abs() {
                imax = i;
            }
        }
        assert!(top[imax] > 0.0);
    }
}
