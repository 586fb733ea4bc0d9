//! Gauss-Hermite quadrature and normalized oscillator eigenfunctions.
//!
//! Matrix elements <n|f|m> of an even potential in the truncated Fock basis
//! are assembled as Q-point quadrature sums. To avoid the e^{+xi^2} blow-up
//! of the naive formula w_q e^{+xi_q^2} h_n h_m f, everything is expressed
//! through total weights wt_q = w_q e^{+xi_q^2} = 1 / sum_{j<Q} h_j(xi_q)^2
//! (the Christoffel form), which stay O(1) across the node range:
//!
//!   M[n,m] = sum_q u_n(q) f(xi_q) u_m(q),   u_n(q) = h_n(xi_q) sqrt(wt_q).

use crate::eig::{eigh, SymmetricMatrix};
use crate::error::{Error, Result};

/// Gauss-Hermite rule for the weight e^{-xi^2}: `nodes` are the roots of the
/// degree-Q Hermite polynomial (ascending, symmetric about 0), `weights` the
/// classical weights, `total_weights` the Christoffel weights w e^{+xi^2}.
///
/// For very high orders (Q around 400 and up) the outermost classical weights
/// underflow f64 to zero; all internal assembly therefore uses
/// `total_weights`, which are O(1) at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    total_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Abscissae, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Classical weights for integrals against e^{-xi^2}.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total weights for integrals of whole integrands (weight absorbed):
    /// integral of F approx sum_q total_weights[q] F(nodes[q]) for F that
    /// decays like a polynomial times e^{-xi^2}.
    pub fn total_weights(&self) -> &[f64] {
        &self.total_weights
    }
}

/// Truncated Fock basis |0>, ..., |N-1>.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasisSpec {
    n_max: usize,
}

impl FockBasisSpec {
    /// Validates N >= 1.
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidInput("basis size N must be >= 1".into()));
        }
        Ok(Self { n_max })
    }

    /// Basis size N; indices run over 0..N-1.
    pub fn n_max(&self) -> usize {
        self.n_max
    }
}

/// Default quadrature order for a basis of size N: max(201, 2N+1), so the
/// exactness degree 2Q-1 dominates the bilinear Hermite degree 2(N-1) with
/// headroom for the non-polynomial factor sqrt(1 + beta^2 xi^2).
pub fn default_quadrature_order(n_max: usize) -> usize {
    (2 * n_max + 1).max(201)
}

/// Builds the order-Q rule by the Golub-Welsch tridiagonal eigenproblem
/// (off-diagonals sqrt(k/2)). Nodes are symmetrized exactly about 0; weights
/// come from the Christoffel identity wt_q = 1 / sum_{j<Q} h_j(xi_q)^2.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if order < 1 {
        return Err(Error::InvalidInput(
            "quadrature order Q must be >= 1".into(),
        ));
    }
    let jacobi = SymmetricMatrix::from_fn(order, |i, j| {
        if j == i + 1 {
            ((j as f64) / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes = eigh(&jacobi)?.values;
    // enforce the +/- pairing exactly; eigh already sorts ascending
    for q in 0..order / 2 {
        let x = 0.5 * (nodes[order - 1 - q] - nodes[q]);
        nodes[q] = -x;
        nodes[order - 1 - q] = x;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    let mut weights = Vec::with_capacity(order);
    let mut total_weights = Vec::with_capacity(order);
    for &x in &nodes {
        let hv = hermite_values(order - 1, x);
        let s: f64 = hv.iter().map(|h| h * h).sum();
        let wt = 1.0 / s;
        total_weights.push(wt);
        weights.push(wt * (-x * x).exp());
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        total_weights,
    })
}

// 2^512 and 2^-512, the renormalization thresholds of the scaled recurrence.
const SCALE: f64 = 1.3407807929942597e154;
const SCALE_INV: f64 = 7.458340731200207e-155;

/// Materializes m * 2^e without intermediate overflow/underflow by splitting
/// the exponent in two; each half stays within the f64 exponent range for
/// every e that can arise, and out-of-range results round to 0 or +/-inf.
fn assemble(m: f64, e: i64) -> f64 {
    let half = e / 2;
    m * ((half as f64).exp2()) * (((e - half) as f64).exp2())
}

/// Values h_0(xi), ..., h_n(xi) of the orthonormal oscillator eigenfunctions
/// h_k(xi) = (2^k k! sqrt(pi))^{-1/2} H_k(xi) e^{-xi^2/2}.
///
/// Uses the normalized three-term recurrence
/// h_{k+1} = sqrt(2/(k+1)) xi h_k - sqrt(k/(k+1)) h_{k-1} on mantissas with a
/// shared power-of-two exponent, so the sequence survives seeds as small as
/// h_0(40) = e^{-800}, far below f64 range. Individual returned values that
/// round to subnormal zero (deep classically forbidden region) come back as
/// an exact 0.0.
pub fn hermite_values(n: usize, xi: f64) -> Vec<f64> {
    // h_0 = pi^{-1/4} e^{-xi^2/2}, seeded in log2 to dodge the underflow
    let log2_h0 = -0.25 * std::f64::consts::PI.log2() - 0.5 * xi * xi * std::f64::consts::LOG2_E;
    let e0 = log2_h0.floor();
    let mut exp = e0 as i64;
    let mut prev = 0.0_f64;
    let mut cur = (log2_h0 - e0).exp2();
    let mut out = Vec::with_capacity(n + 1);
    out.push(assemble(cur, exp));
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > SCALE {
            cur *= SCALE_INV;
            prev *= SCALE_INV;
            exp += 512;
        } else if mag < SCALE_INV && mag > 0.0 {
            cur *= SCALE;
            prev *= SCALE;
            exp -= 512;
        }
        out.push(assemble(cur, exp));
    }
    out
}

/// Single orthonormal oscillator eigenfunction h_n(xi); finite for all
/// n <= 1000, |xi| <= 40.
pub fn hermite_function(n: usize, xi: f64) -> f64 {
    hermite_values(n, xi)[n]
}

/// N x N matrix of <n|f|m> for an even function f, by order-Q quadrature.
/// Requires Q >= 2N+1 so the polynomial part of each integrand is integrated
/// exactly with headroom.
pub fn potential_matrix<F: Fn(f64) -> f64>(
    f: F,
    basis: FockBasisSpec,
    rule: &QuadratureRule,
) -> Result<SymmetricMatrix> {
    let n = basis.n_max();
    let q_len = rule.order();
    if q_len < 2 * n + 1 {
        return Err(Error::InvalidInput(format!(
            "quadrature order {q_len} too small for basis size {n}; need Q >= 2N+1 = {}",
            2 * n + 1
        )));
    }
    let fvals: Vec<f64> = rule.nodes().iter().map(|&x| f(x)).collect();
    // u[k][q] = h_k(xi_q) sqrt(wt_q)
    let mut u = vec![vec![0.0; q_len]; n];
    for q in 0..q_len {
        let hv = hermite_values(n - 1, rule.nodes()[q]);
        let sw = rule.total_weights()[q].sqrt();
        for (k, row) in u.iter_mut().enumerate() {
            row[q] = hv[k] * sw;
        }
    }
    Ok(SymmetricMatrix::from_fn(n, |i, j| {
        (0..q_len).map(|q| u[i][q] * fvals[q] * u[j][q]).sum()
    }))
}
