//! Exact steady-state observables on a finite ring from the free-fermion
//! picture.
//!
//! The Jordan-Wigner map sends the chain to free fermions whose boundary
//! condition depends on fermion parity: even-parity states see
//! antiperiodic momenta q = 2π(k+½)/N, odd-parity states see periodic
//! momenta q = 2πk/N. Projecting each sector onto its own parity turns the
//! trace into four signed Gaussian branches,
//!
//!   Z e^{−βbBN} = ½(W₊^{AP} + W₋^{AP}) + ½(W₊^{P} − W₋^{P}),
//!   W_σ = Π_q (1 + σ e^{−2βξ(q)}),
//!
//! and every observable is the matching signed average of per-branch
//! values. The projected ensemble is not Gaussian, so Wick contraction
//! runs inside each branch (with its own tanh or coth two-point table) and
//! only the resulting polynomial values are averaged. Parity-weighted
//! branches contain 1 − e^{−2βξ(q)} factors that vanish on degenerate
//! modes; modes with |2βξ| below a small threshold are therefore taken out
//! of the Gaussian product and their occupations enumerated explicitly,
//! which keeps every factor bounded away from zero at any temperature.

use std::f64::consts::TAU;

use crate::correlators::{concurrence_from_pairs, pair_correlators_from_tables, PairCorrelators};
use crate::error::{Result, SswError};
use crate::model::ChainParams;

/// Modes with |2βξ| below this are enumerated explicitly inside the
/// parity-weighted branches instead of entering coth factors.
const PIN_THRESHOLD: f64 = 0.05;

/// A parity-weighted branch whose log-weight bound sits this far below the
/// leading branch cannot move an f64 sum and is dropped whole.
const SKIP_LOG_MARGIN: f64 = 45.0;

/// Enumerating k pinned modes costs 2^k subterms; past this the branch is
/// refused rather than silently truncated.
const MAX_PINNED: usize = 24;

/// Everything the finite ring determines at one parameter point.
#[derive(Debug, Clone)]
pub struct FreeFermionPoint {
    pub n_sites: usize,
    /// ln Z / N.
    pub log_z_density: f64,
    /// ⟨Σ σᶻ⟩ / N.
    pub m_density: f64,
    /// ⟨H₀⟩ / N.
    pub e_density: f64,
    /// ⟨H₀ + (γ/β) J^E⟩ / N.
    pub u_density: f64,
    /// ⟨J^E⟩ / N.
    pub q_density: f64,
    /// G_R = ⟨A_l B_{l+R}⟩ for R = 0, 1, 2.
    pub g: [f64; 3],
    /// S_R tables (⟨B_l B_{l+R}⟩ = i s_R) for R = 0, 1, 2.
    pub s: [f64; 3],
    pub pair_r1: PairCorrelators,
    pub pair_r2: PairCorrelators,
    pub concurrence_r1: f64,
    pub concurrence_r2: f64,
}

/// One fermion momentum mode: q, the dimensionless weight exponent
/// t = 2βξ(q), the H₀ single-particle energy, and the J^E velocity.
struct Mode {
    q: f64,
    t: f64,
    eps0: f64,
    v: f64,
}

fn momentum_modes(params: &ChainParams, n_sites: usize, antiperiodic: bool) -> Vec<Mode> {
    let offset = if antiperiodic { 0.5 } else { 0.0 };
    let j = params.j_coupling();
    let b = params.b_field();
    let bb = params.b_aux() * b;
    (0..n_sites)
        .map(|k| {
            let q = TAU * (k as f64 + offset) / n_sites as f64;
            Mode {
                q,
                t: 2.0 * params.beta_xi(q),
                eps0: 2.0 * (bb - j * q.cos()),
                v: 4.0 * j * q.sin() * (b - j * q.cos()),
            }
        })
        .collect()
}

/// ln(1 + e^z) without overflow.
fn ln_one_plus_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// ln|1 − e^{−t}|, valid away from t = 0.
fn ln_abs_one_minus_exp_neg(t: f64) -> f64 {
    if t > 0.0 {
        (-(-t).exp()).ln_1p()
    } else {
        -t + (-t.exp()).ln_1p()
    }
}

/// Per-branch observable densities plus the branch's signed log-weight.
struct BranchTerm {
    log_mag: f64,
    /// Projection coefficient times the weight sign: ±½.
    coeff: f64,
    /// Σ ε₀(q) n̄(q) / N without the −bB shift.
    e: f64,
    /// Σ v(q) n̄(q) / N.
    q_dens: f64,
    g: [f64; 3],
    s: [f64; 3],
}

/// Running signed sums at a fixed log shift. Every added term has
/// log_mag ≤ shift, so the exponentials never overflow.
struct Accumulator {
    shift: f64,
    denom: f64,
    e: f64,
    q_dens: f64,
    g: [f64; 3],
    s: [f64; 3],
    xx: [f64; 2],
    yx: [f64; 2],
    zz: [f64; 2],
}

impl Accumulator {
    fn new(shift: f64) -> Self {
        Accumulator {
            shift,
            denom: 0.0,
            e: 0.0,
            q_dens: 0.0,
            g: [0.0; 3],
            s: [0.0; 3],
            xx: [0.0; 2],
            yx: [0.0; 2],
            zz: [0.0; 2],
        }
    }

    fn add(&mut self, term: &BranchTerm) -> Result<()> {
        let w = term.coeff * (term.log_mag - self.shift).exp();
        if w == 0.0 {
            return Ok(());
        }
        self.denom += w;
        self.e += w * term.e;
        self.q_dens += w * term.q_dens;
        for r in 0..3 {
            self.g[r] += w * term.g[r];
            self.s[r] += w * term.s[r];
        }
        for r in 1..=2 {
            let pair = pair_correlators_from_tables(&term.g, &term.s, r)?;
            self.xx[r - 1] += w * pair.xx_plus_yy;
            self.yx[r - 1] += w * pair.yx_minus_xy;
            self.zz[r - 1] += w * pair.zz;
        }
        Ok(())
    }
}

/// Gaussian branch with σ = +1: every factor 1 + e^{−t} is safely
/// positive, the two-point table is tanh(t/2).
fn plus_branch(modes: &[Mode], coeff: f64) -> BranchTerm {
    let n = modes.len() as f64;
    let mut term = BranchTerm {
        log_mag: 0.0,
        coeff,
        e: 0.0,
        q_dens: 0.0,
        g: [0.0; 3],
        s: [0.0; 3],
    };
    for mode in modes {
        term.log_mag += ln_one_plus_exp(-mode.t);
        let r = (mode.t / 2.0).tanh();
        let occ = 1.0 / (1.0 + mode.t.exp());
        term.e += mode.eps0 * occ / n;
        term.q_dens += mode.v * occ / n;
        for k in 0..3 {
            term.g[k] += (mode.q * k as f64).cos() * r / n;
            term.s[k] += (mode.q * k as f64).sin() * r / n;
        }
    }
    term
}

/// Parity-weighted branch with σ = −1: factors 1 − e^{−t} change sign
/// with t and vanish on degenerate modes, so near-zero modes are pulled
/// out and enumerated. Appends one term per pinned-occupation pattern,
/// or nothing when the whole branch is below the significance cutoff.
fn minus_branch(
    modes: &[Mode],
    coeff: f64,
    skip_below: f64,
    out: &mut impl FnMut(&BranchTerm) -> Result<()>,
) -> Result<()> {
    let n = modes.len() as f64;
    let (pinned, unpinned): (Vec<&Mode>, Vec<&Mode>) =
        modes.iter().partition(|m| m.t.abs() < PIN_THRESHOLD);

    let mut base = BranchTerm {
        log_mag: 0.0,
        coeff,
        e: 0.0,
        q_dens: 0.0,
        g: [0.0; 3],
        s: [0.0; 3],
    };
    let mut base_sign = 1.0;
    for mode in &unpinned {
        base.log_mag += ln_abs_one_minus_exp_neg(mode.t);
        if mode.t < 0.0 {
            base_sign = -base_sign;
        }
        let r = 1.0 / (mode.t / 2.0).tanh();
        let occ = -1.0 / mode.t.exp_m1();
        base.e += mode.eps0 * occ / n;
        base.q_dens += mode.v * occ / n;
        for k in 0..3 {
            base.g[k] += (mode.q * k as f64).cos() * r / n;
            base.s[k] += (mode.q * k as f64).sin() * r / n;
        }
    }

    // Largest possible sub-term magnitude: every pinned mode at its
    // heavier occupation, the 2^k count folded in as k ln 2.
    let bound = base.log_mag
        + pinned.iter().map(|m| (-m.t).max(0.0)).sum::<f64>()
        + pinned.len() as f64 * std::f64::consts::LN_2;
    if bound < skip_below {
        return Ok(());
    }
    if pinned.len() > MAX_PINNED {
        return Err(SswError::PrecisionLoss(format!(
            "{} near-degenerate modes would need 2^{} parity subterms",
            pinned.len(),
            pinned.len()
        )));
    }

    for mask in 0..(1usize << pinned.len()) {
        let mut term = BranchTerm {
            log_mag: base.log_mag,
            coeff: base.coeff * base_sign,
            e: base.e,
            q_dens: base.q_dens,
            g: base.g,
            s: base.s,
        };
        for (bit, mode) in pinned.iter().enumerate() {
            let occupied = mask & (1 << bit) != 0;
            // Occupied pinned modes weigh σ e^{−t}: one sign flip each.
            let (r, occ) = if occupied {
                term.log_mag += -mode.t;
                term.coeff = -term.coeff;
                (-1.0, 1.0)
            } else {
                (1.0, 0.0)
            };
            term.e += mode.eps0 * occ / n;
            term.q_dens += mode.v * occ / n;
            for k in 0..3 {
                term.g[k] += (mode.q * k as f64).cos() * r / n;
                term.s[k] += (mode.q * k as f64).sin() * r / n;
            }
        }
        out(&term)?;
    }
    Ok(())
}

/// Exact observables of ρ = e^{−βH₀−γJ^E}/Z on an N-site ring.
pub fn free_fermion_finite(params: &ChainParams, n_sites: usize) -> Result<FreeFermionPoint> {
    if n_sites < 3 {
        return Err(SswError::InvalidParams(format!(
            "periodic chain needs at least 3 sites, got {n_sites}"
        )));
    }
    let antiperiodic = momentum_modes(params, n_sites, true);
    let periodic = momentum_modes(params, n_sites, false);

    // Even fermion parity lives on antiperiodic momenta, odd parity on
    // periodic ones; the (P, −) branch enters with coefficient −½.
    let ap_plus = plus_branch(&antiperiodic, 0.5);
    let p_plus = plus_branch(&periodic, 0.5);
    // |1 − x| ≤ 1 + x mode by mode, so no σ = −1 branch can outweigh its
    // σ = +1 partner and this shift never truncates a leading term.
    let shift = ap_plus.log_mag.max(p_plus.log_mag);

    let mut acc = Accumulator::new(shift);
    acc.add(&ap_plus)?;
    acc.add(&p_plus)?;
    let skip_below = shift - SKIP_LOG_MARGIN;
    minus_branch(&antiperiodic, 0.5, skip_below, &mut |t| acc.add(t))?;
    minus_branch(&periodic, -0.5, skip_below, &mut |t| acc.add(t))?;

    if !acc.denom.is_finite() || acc.denom <= 0.0 {
        return Err(SswError::PrecisionLoss(format!(
            "parity-projected partition sum collapsed to {}",
            acc.denom
        )));
    }

    let bb = params.b_aux() * params.b_field();
    let m_density = acc.g[0] / acc.denom;
    let e_density = acc.e / acc.denom - bb;
    let q_density = acc.q_dens / acc.denom;
    let g = [
        acc.g[0] / acc.denom,
        acc.g[1] / acc.denom,
        acc.g[2] / acc.denom,
    ];
    let s = [
        acc.s[0] / acc.denom,
        acc.s[1] / acc.denom,
        acc.s[2] / acc.denom,
    ];
    let pair = |idx: usize| PairCorrelators {
        xx_plus_yy: acc.xx[idx] / acc.denom,
        yx_minus_xy: acc.yx[idx] / acc.denom,
        zz: acc.zz[idx] / acc.denom,
        z_single: m_density,
        separation: idx + 1,
    };
    let pair_r1 = pair(0);
    let pair_r2 = pair(1);

    Ok(FreeFermionPoint {
        n_sites,
        log_z_density: params.beta() * bb + (shift + acc.denom.ln()) / n_sites as f64,
        m_density,
        e_density,
        u_density: e_density + params.gamma_over_beta() * q_density,
        q_density,
        g,
        s,
        pair_r1,
        pair_r2,
        concurrence_r1: concurrence_from_pairs(&pair_r1)?,
        concurrence_r2: concurrence_from_pairs(&pair_r2)?,
    })
}
