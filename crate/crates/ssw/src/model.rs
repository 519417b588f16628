//! Chain parameters and single-mode dispersions.
//!
//! The XX ring H₀ = −(J/2) Σ_l (σˣ_l σˣ_{l+1} + σʸ_l σʸ_{l+1}) − bB Σ_l σᶻ_l
//! carries the energy current J^E, and the current-biased steady state
//! ρ ∝ exp(−βH₀ − γJ^E) is the Gibbs state of the quadratic fermion
//! Hamiltonian H = Σ_q 2ξ(q) n_q − bBN with
//!
//!   ξ(q) = bB − J cos q + 2(γ/β) J sin q (B − J cos q).
//!
//! γ enters every observable only through γ/β = γT. The auxiliary field
//! scale b multiplies B in the Zeeman term only; the current keeps the
//! physical B, which is what makes m = (1/βB) ∂_b ln z a clean identity.
//! At b = 1 the dispersion factorizes as
//!
//!   Λ(q) = (B − J cos q)(1 + 2(γ/β) J sin q).

use crate::error::{Result, SswError};

/// Physical and bias parameters of one steady-state point.
///
/// Invariants enforced at construction: `j_coupling > 0`, `b_field >= 0`,
/// `temperature > 0`, everything finite. `gamma` may take any finite value;
/// `b_aux` is the auxiliary Zeeman scale and defaults to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    j_coupling: f64,
    b_field: f64,
    temperature: f64,
    gamma: f64,
    b_aux: f64,
}

impl ChainParams {
    /// Physical parameters with the Zeeman scale pinned at b = 1.
    pub fn new(j_coupling: f64, b_field: f64, temperature: f64, gamma: f64) -> Result<Self> {
        Self::with_b_aux(j_coupling, b_field, temperature, gamma, 1.0)
    }

    /// Full constructor including the auxiliary Zeeman scale b.
    pub fn with_b_aux(
        j_coupling: f64,
        b_field: f64,
        temperature: f64,
        gamma: f64,
        b_aux: f64,
    ) -> Result<Self> {
        let fields = [
            ("J", j_coupling),
            ("B", b_field),
            ("T", temperature),
            ("gamma", gamma),
            ("b", b_aux),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(SswError::InvalidParams(format!(
                    "{name} = {value} is not finite"
                )));
            }
        }
        if j_coupling <= 0.0 {
            return Err(SswError::InvalidParams(format!(
                "J = {j_coupling} must be positive"
            )));
        }
        if b_field < 0.0 {
            return Err(SswError::InvalidParams(format!(
                "B = {b_field} must be non-negative"
            )));
        }
        if temperature <= 0.0 {
            return Err(SswError::InvalidParams(format!(
                "T = {temperature} must be positive"
            )));
        }
        Ok(Self {
            j_coupling,
            b_field,
            temperature,
            gamma,
            b_aux,
        })
    }

    pub fn j_coupling(&self) -> f64 {
        self.j_coupling
    }

    pub fn b_field(&self) -> f64 {
        self.b_field
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn b_aux(&self) -> f64 {
        self.b_aux
    }

    /// Inverse temperature β = 1/T.
    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    /// The combination γ/β = γT through which the bias enters everywhere.
    pub fn gamma_over_beta(&self) -> f64 {
        self.gamma * self.temperature
    }

    /// Mode energy ξ(q) = bB − J cos q + 2(γ/β) J sin q (B − J cos q).
    pub fn xi(&self, q: f64) -> f64 {
        let (sin_q, cos_q) = q.sin_cos();
        let j = self.j_coupling;
        self.b_aux * self.b_field - j * cos_q
            + 2.0 * self.gamma_over_beta() * j * sin_q * (self.b_field - j * cos_q)
    }

    /// βξ(q) assembled so the current term carries γ alone, with no 1/T
    /// factor to round through. Identical to `beta() * xi(q)` in exact
    /// arithmetic.
    pub fn beta_xi(&self, q: f64) -> f64 {
        let (sin_q, cos_q) = q.sin_cos();
        let j = self.j_coupling;
        self.beta() * (self.b_aux * self.b_field - j * cos_q)
            + 2.0 * self.gamma * j * sin_q * (self.b_field - j * cos_q)
    }

    /// Factorized dispersion Λ(q) = (B − J cos q)(1 + 2(γ/β) J sin q),
    /// equal to ξ(q) at b = 1.
    pub fn lambda_dispersion(&self, q: f64) -> f64 {
        let (sin_q, cos_q) = q.sin_cos();
        let j = self.j_coupling;
        (self.b_field - j * cos_q) * (1.0 + 2.0 * self.gamma_over_beta() * j * sin_q)
    }
}
