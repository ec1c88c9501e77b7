//! The joint minimax problem for `p` spatially distributed phases.
//!
//! With all `N` gates spent in one shot on the free-atom model, the joint
//! cost tends to `E/N²`, where `E` is the ground energy of a particle in
//! the cross-polytope `{μ : Σ|μᵢ| ≤ 1/2}` with Dirichlet walls. This module
//! solves that eigenproblem numerically for small `p`, and brackets it for
//! every `p` between an Airy-function lower bound (`≈ 0.63 p³`) and a Bessel
//! upper bound from the largest inscribed ball. It also provides the
//! covariant phase-measurement cost used to check the single-phase limit.

mod phase;
mod quadrature;
mod simplex;
pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use phase::{
    phase_cost_analytic, phase_cost_monte_carlo, MonteCarloEstimate, PhaseMeasurementModel,
    DEFAULT_PDF_RESOLUTION,
};
pub use simplex::{
    default_grid, richardson_ground_energy, simplex_ground_energy, simplex_ground_state,
    RichardsonEstimate, SimplexGroundState, SimplexSpectrum, MAX_GRID_NODES,
};

/// Default integration cutoff for the Airy integrals; the integrands decay like `e^{−(4/3)μ^{3/2}}`.
pub const AIRY_CUTOFF: f64 = 12.0;

/// The Airy-function lower bound on the joint minimax constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AiryBoundResult {
    /// First zero `a′₁` of `Ai′`.
    pub a_prime_zero: f64,
    /// `∫₀^∞ Ai(a′₁+μ)² dμ`.
    pub i_norm: f64,
    /// `∫₀^∞ μ Ai(a′₁+μ)² dμ`.
    pub i_mean: f64,
    /// `∫₀^∞ Ai′(a′₁+μ)² dμ`.
    pub i_kinetic: f64,
    /// Coefficient `c` of the bound `c·p³/N²`.
    pub constant: f64,
    pub cutoff: f64,
}

pub fn airy_lower_bound() -> Result<AiryBoundResult> {
    airy_lower_bound_with_cutoff(AIRY_CUTOFF)
}

/// Evaluates `4·I_kinetic·I_mean²/I_norm³` with the integrals truncated at `cutoff`.
pub fn airy_lower_bound_with_cutoff(cutoff: f64) -> Result<AiryBoundResult> {
    if !(cutoff > 1.0 && cutoff.is_finite()) {
        return Err(invalid("cutoff must be a finite number above 1"));
    }
    let a0 = special::airy_prime_first_zero();
    let ai = |mu: f64| special::airy_ai(a0 + mu);
    let (abs_tol, rel_tol) = (1e-16, 1e-13);
    let i_norm = quadrature::integrate(|mu| ai(mu).powi(2), 0.0, cutoff, abs_tol, rel_tol)?;
    let i_mean = quadrature::integrate(|mu| mu * ai(mu).powi(2), 0.0, cutoff, abs_tol, rel_tol)?;
    let i_kinetic = quadrature::integrate(
        |mu| special::airy_ai_prime(a0 + mu).powi(2),
        0.0,
        cutoff,
        abs_tol,
        rel_tol,
    )?;
    Ok(AiryBoundResult {
        a_prime_zero: a0,
        i_norm,
        i_mean,
        i_kinetic,
        constant: 4.0 * i_kinetic * i_mean * i_mean / i_norm.powi(3),
        cutoff,
    })
}

/// `p·(2 j_{p/2−1,1})²`: the Dirichlet ground energy of the largest ball
/// inscribed in the cross-polytope, an upper bound on its ground energy.
pub fn ball_upper_bound(p: usize) -> Result<f64> {
    if p == 0 {
        return Err(invalid("p must be at least 1"));
    }
    let j = special::bessel_first_zero(p as f64 / 2.0 - 1.0)?;
    Ok(p as f64 * (2.0 * j).powi(2))
}
