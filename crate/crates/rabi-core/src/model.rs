//! Closed-form quantities of the adiabatically diagonalized two-level sector.
//!
//! At fixed oscillator position xi the two-level part of the Hamiltonian,
//! H_sigma(xi) = (Delta/2) sigma_x + sqrt(2) g xi sigma_z, has eigenvalues
//!
//!   eps_pm(xi) = +/- (Delta/2) sqrt(1 + beta^2 xi^2),   beta = 2 sqrt(2) g / Delta,
//!
//! with eigenvectors expressed through gamma(xi) = beta xi / sqrt(1 + beta^2 xi^2):
//!
//!   phi_pm(xi) = ( +/- sqrt(1 +/- gamma), sqrt(1 -/+ gamma) )^T / sqrt(2).
//!
//! The lower surface yields the effective potential
//! V_-(xi) = xi^2/2 - (Delta/2) sqrt(1 + beta^2 xi^2), which turns from a
//! single well into a double well exactly when Delta beta^2 / 2 > 1.

use crate::error::{Error, Result};

/// Dimensionless model parameters. All energies are in units of the mode
/// quantum, so the two knobs are the two-level splitting and the coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    delta: f64,
    g: f64,
}

impl ModelParams {
    /// Validates delta > 0 and g >= 0 (both finite).
    ///
    /// delta = 0 is rejected: beta = 2 sqrt(2) g / delta is singular there.
    /// The zero-splitting limit stays reachable through the
    /// exact-diagonalization module, which accepts raw (delta, g) pairs.
    pub fn new(delta: f64, g: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "delta must be finite and positive, got {delta}"
            )));
        }
        if !g.is_finite() || g < 0.0 {
            return Err(Error::InvalidInput(format!(
                "g must be finite and non-negative, got {g}"
            )));
        }
        Ok(Self { delta, g })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// beta = 2 sqrt(2) g / Delta; zero iff g = 0.
    pub fn beta(&self) -> f64 {
        2.0 * std::f64::consts::SQRT_2 * self.g / self.delta
    }
}

/// Selects the lower (Minus) or upper (Plus) adiabatic surface. Minus is the
/// default everywhere; the upper surface is exposed but sits one excitation
/// gap higher and is excluded from default sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Minus,
    Plus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            Branch::Plus => 1.0,
        }
    }
}

/// Critical coupling g_c = sqrt(1 + sqrt(1 + Delta^2/16)), the scale used to
/// normalize coupling sweeps. Approaches sqrt(2) as Delta -> 0+.
pub fn critical_coupling(params: &ModelParams) -> f64 {
    let d = params.delta();
    (1.0 + (1.0 + d * d / 16.0).sqrt()).sqrt()
}

/// Adiabatic energy eps_branch(xi) = sign * (Delta/2) sqrt(1 + beta^2 xi^2).
pub fn adiabatic_energy(params: &ModelParams, branch: Branch, xi: f64) -> f64 {
    let b = params.beta();
    branch.sign() * 0.5 * params.delta() * (1.0 + b * b * xi * xi).sqrt()
}

/// Mixing function gamma(xi) = beta xi / sqrt(1 + beta^2 xi^2), odd in xi and
/// confined to (-1, 1).
pub fn mixing_angle_gamma(params: &ModelParams, xi: f64) -> f64 {
    let bx = params.beta() * xi;
    bx / (1.0 + bx * bx).sqrt()
}

/// Normalized eigenvector of H_sigma(xi) for the chosen branch,
/// phi_pm = ( +/- sqrt((1 +/- gamma)/2), sqrt((1 -/+ gamma)/2) )^T.
pub fn adiabatic_eigenvector(params: &ModelParams, branch: Branch, xi: f64) -> [f64; 2] {
    let gamma = mixing_angle_gamma(params, xi);
    let s = branch.sign();
    [
        s * (0.5 * (1.0 + s * gamma)).sqrt(),
        (0.5 * (1.0 - s * gamma)).sqrt(),
    ]
}

/// Effective potential V_branch(xi) = xi^2/2 + eps_branch(xi).
pub fn effective_potential(params: &ModelParams, branch: Branch, xi: f64) -> f64 {
    0.5 * xi * xi + adiabatic_energy(params, branch, xi)
}

/// Coefficients of the small-xi expansion V_-(xi) = c0 + c2 xi^2 + c4 xi^4 + O(xi^6).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCoefficients {
    /// c0 = -Delta/2.
    pub c0: f64,
    /// c2 = 1/2 - beta^2 Delta / 4; vanishes at beta^2 Delta = 2, i.e. g = sqrt(Delta)/2.
    pub c2: f64,
    /// c4 = beta^4 Delta / 16.
    pub c4: f64,
}

/// Taylor coefficients of the lower effective potential around xi = 0.
///
/// The sign of c2 is the Landau-expansion diagnostic for the well shape; the
/// exact double-well onset used by [`potential_minima`] is Delta beta^2/2 > 1,
/// which is the same condition: c2 = (1 - Delta beta^2/2)/2.
pub fn quartic_expansion(params: &ModelParams) -> QuarticCoefficients {
    let d = params.delta();
    let b2 = params.beta() * params.beta();
    QuarticCoefficients {
        c0: -0.5 * d,
        c2: 0.5 - 0.25 * b2 * d,
        c4: b2 * b2 * d / 16.0,
    }
}

/// Minimizer positions of the lower effective potential V_-.
///
/// Returns {0} while Delta beta^2/2 <= 1 (single well) and {-xi*, +xi*} with
/// xi* = sqrt(((Delta beta^2/2)^2 - 1)) / beta once V_-''(0) < 0.
pub fn potential_minima(params: &ModelParams) -> Vec<f64> {
    let b = params.beta();
    let a = 0.5 * params.delta() * b * b;
    if a <= 1.0 {
        vec![0.0]
    } else {
        let xi = (a * a - 1.0).sqrt() / b;
        vec![-xi, xi]
    }
}
