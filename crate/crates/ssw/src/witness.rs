//! Entanglement witnesses of the current-carrying steady state.
//!
//! Internal energy per site of the effective Hamiltonian obeys
//! U/N = e + (γ/β) jᴱ, and adding BM − (γ/β)Q cancels the current term,
//! so the energy witness reduces to two integrals:
//!
//!   W₁ = 2|U + BM − (γ/β)Q| / (JN) = 2|e + B m| / J,
//!
//! which also equals 2|G₁| because (J cos q − B + B) tanh(βξ) folds the
//! Zeeman part into the hopping correlator. Separable states obey W₁ ≤ 1.
//!
//! The current witness uses the separable bound |Q| ≤ JN(2B + J)/2 (with
//! |⟨σᶻ⟩| ≤ 1):
//!
//!   W_ss = 2|Q| / (JN(2B + J)) = 2|jᴱ| / (J(2B + J)),
//!
//! nonzero only out of equilibrium since Q(γ=0) = 0.

use crate::error::Result;
use crate::model::ChainParams;
use crate::quadrature::QuadratureConfig;
use crate::thermo::{
    energy_current_density, energy_density_term, magnetization_density, ThermoPoint,
};

/// Energy witness W₁ = 2|e + B m|/J; > 1 certifies entanglement.
pub fn w1(params: &ChainParams, config: &QuadratureConfig) -> Result<f64> {
    let e = energy_density_term(params, config)?;
    let m = magnetization_density(params, config)?;
    Ok(2.0 * (e + params.b_field() * m).abs() / params.j_coupling())
}

/// Current witness W_ss = 2|jᴱ|/(J(2B+J)); > 1 certifies entanglement.
pub fn w_ss(params: &ChainParams, config: &QuadratureConfig) -> Result<f64> {
    let jq = energy_current_density(params, config)?;
    Ok(2.0 * jq.abs() / (params.j_coupling() * (2.0 * params.b_field() + params.j_coupling())))
}

/// Both witnesses with the thermodynamic densities they came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessResult {
    pub w1: f64,
    pub w_ss: f64,
    pub thermo: ThermoPoint,
}

/// Evaluate both witnesses from a single ThermoPoint pass.
pub fn witness_result(params: &ChainParams, config: &QuadratureConfig) -> Result<WitnessResult> {
    let thermo = ThermoPoint::compute(params, config)?;
    let w1 = 2.0 * (thermo.e_density + params.b_field() * thermo.m_density).abs()
        / params.j_coupling();
    let w_ss = 2.0 * thermo.q_density.abs()
        / (params.j_coupling() * (2.0 * params.b_field() + params.j_coupling()));
    Ok(WitnessResult { w1, w_ss, thermo })
}
