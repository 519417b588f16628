//! Fermionic two-point functions, string-contracted pair correlators, and
//! pairwise concurrence.
//!
//! Jordan-Wigner Majorana components A_l = a_l† + a_l and B_l = a_l† − a_l
//! have the steady-state pair expectations
//!
//!   G_R = ⟨A_l B_{l+R}⟩ = ∫ (dq/2π) cos(qR) tanh(βξ(q))
//!   S_R = ⟨B_l B_{l+R}⟩ = i ∫ (dq/2π) sin(qR) tanh(βξ(q)) = i·s_R
//!
//! with ⟨A_l A_{l+R}⟩ = −S_R and G_0 = ⟨σᶻ⟩. Spin pair correlators at
//! separation R are Pfaffians of the antisymmetric matrix of pair
//! expectations over a 2R-operator Majorana string:
//!
//!   ⟨σˣ_l σˣ_{l+R} + σʸ_l σʸ_{l+R}⟩ = −Pf[A_l (AB)… B_{l+R}] + Pf[B_l (AB)… A_{l+R}]
//!   ⟨σʸ_l σˣ_{l+R} − σˣ_l σʸ_{l+R}⟩ = (−1)^R (−i Pf[A_l (AB)… A_{l+R}] + i Pf[B_l (AB)… B_{l+R}])
//!   ⟨σᶻ_l σᶻ_{l+R}⟩ = G_0² − G_R² + S_R² = g_0² − g_R² − s_R²
//!
//! where (AB)… is the string A_m B_m over the interior sites. All values
//! are real in exact arithmetic; the complex Pfaffian residue is kept as a
//! cross-check. The U(1)-symmetric two-site state is X-shaped, so the
//! concurrence has the closed form C = 2 max{|z| − √vy, 0}.

use num_complex::Complex64;

use crate::error::{Result, SswError};
use crate::model::ChainParams;
use crate::quadrature::{periodic_average, QuadratureConfig};

/// G_R = ∫ (dq/2π) cos(qR) tanh(βξ(q)).
pub fn g_r(params: &ChainParams, r: usize, config: &QuadratureConfig) -> Result<f64> {
    let rf = r as f64;
    periodic_average(|q| (rf * q).cos() * params.beta_xi(q).tanh(), config)
}

/// s_R, the imaginary coefficient of S_R = i ∫ (dq/2π) sin(qR) tanh(βξ(q)).
///
/// s_0 = 0 exactly; every formula in this module consumes the real s_R.
pub fn s_r(params: &ChainParams, r: usize, config: &QuadratureConfig) -> Result<f64> {
    if r == 0 {
        return Ok(0.0);
    }
    let rf = r as f64;
    periodic_average(|q| (rf * q).sin() * params.beta_xi(q).tanh(), config)
}

/// The tables G_0..G_R and s_0..s_R of one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorSet {
    /// g[R] = G_R; g[0] is the magnetization density.
    pub g: Vec<f64>,
    /// s[R] with S_R = i·s_R; s[0] = 0.
    pub s: Vec<f64>,
}

impl CorrelatorSet {
    pub fn compute(params: &ChainParams, r_max: usize, config: &QuadratureConfig) -> Result<Self> {
        let mut g = Vec::with_capacity(r_max + 1);
        let mut s = Vec::with_capacity(r_max + 1);
        for r in 0..=r_max {
            g.push(g_r(params, r, config)?);
            s.push(s_r(params, r, config)?);
        }
        Ok(Self { g, s })
    }

    pub fn r_max(&self) -> usize {
        self.g.len() - 1
    }
}

/// One Majorana factor at a site offset within a translationally invariant
/// string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Majorana {
    A(usize),
    B(usize),
}

/// Pair-expectation lookup over precomputed g, s tables.
///
/// ⟨A_m A_n⟩ = −S_{n−m}, ⟨B_m B_n⟩ = S_{n−m}, ⟨A_m B_n⟩ = G_{n−m},
/// ⟨B_m A_n⟩ = −G_{n−m}, with G even and S odd in the separation.
struct PairTable<'a> {
    g: &'a [f64],
    s: &'a [f64],
}

impl PairTable<'_> {
    fn pair(&self, left: Majorana, right: Majorana) -> Complex64 {
        let (m, n) = (site_of(left), site_of(right));
        let d = n as isize - m as isize;
        let sep = d.unsigned_abs();
        let sgn = if d >= 0 { 1.0 } else { -1.0 };
        match (left, right) {
            (Majorana::A(_), Majorana::A(_)) => Complex64::new(0.0, -sgn * self.s[sep]),
            (Majorana::B(_), Majorana::B(_)) => Complex64::new(0.0, sgn * self.s[sep]),
            (Majorana::A(_), Majorana::B(_)) => Complex64::new(self.g[sep], 0.0),
            (Majorana::B(_), Majorana::A(_)) => Complex64::new(-self.g[sep], 0.0),
        }
    }
}

fn site_of(op: Majorana) -> usize {
    match op {
        Majorana::A(site) | Majorana::B(site) => site,
    }
}

/// Pfaffian of the ordered pair-expectation matrix of `ops`, by expansion
/// along the first row: Pf = Σ_j (−1)^{j−1} ⟨op_0 op_j⟩ Pf(rest).
fn pfaffian(table: &PairTable, ops: &[Majorana]) -> Complex64 {
    debug_assert!(ops.len().is_multiple_of(2));
    if ops.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for j in 1..ops.len() {
        let factor = table.pair(ops[0], ops[j]);
        if factor != Complex64::new(0.0, 0.0) {
            let rest: Vec<Majorana> = ops[1..]
                .iter()
                .enumerate()
                .filter_map(|(i, &op)| (i != j - 1).then_some(op))
                .collect();
            total += sign * factor * pfaffian(table, &rest);
        }
        sign = -sign;
    }
    total
}

/// The Majorana string [first, A_1 B_1 … A_{R−1} B_{R−1}, last].
fn string_ops(first: Majorana, last: Majorana, r: usize) -> Vec<Majorana> {
    let mut ops = Vec::with_capacity(2 * r);
    ops.push(first);
    for m in 1..r {
        ops.push(Majorana::A(m));
        ops.push(Majorana::B(m));
    }
    ops.push(last);
    ops
}

/// Raw complex string contractions (xx_plus_yy, yx_minus_xy, zz); the
/// imaginary parts are pure numerical residue.
pub(crate) fn string_values(g: &[f64], s: &[f64], r: usize) -> (Complex64, Complex64, Complex64) {
    assert!(r >= 1 && g.len() > r && s.len() > r);
    let table = PairTable { g, s };
    let pf = |first, last| pfaffian(&table, &string_ops(first, last, r));

    let xx_plus_yy = -pf(Majorana::A(0), Majorana::B(r)) + pf(Majorana::B(0), Majorana::A(r));
    // σʸ_l σˣ_{l+R} = i A_l (Π A_m B_m) A_{l+R} and σˣ_l σʸ_{l+R} with B's:
    // the middle-site substitution σᶻ = AB carries no R-dependent phase
    // (confirmed against exact diagonalization at R = 1 and 2).
    let i = Complex64::new(0.0, 1.0);
    let yx_minus_xy =
        i * pf(Majorana::A(0), Majorana::A(r)) - i * pf(Majorana::B(0), Majorana::B(r));
    let zz = pfaffian(
        &table,
        &[Majorana::A(0), Majorana::B(0), Majorana::A(r), Majorana::B(r)],
    );
    (xx_plus_yy, yx_minus_xy, zz)
}

/// Two-site spin correlators at a fixed separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCorrelators {
    /// ⟨σˣ_l σˣ_{l+R} + σʸ_l σʸ_{l+R}⟩.
    pub xx_plus_yy: f64,
    /// ⟨σʸ_l σˣ_{l+R} − σˣ_l σʸ_{l+R}⟩.
    pub yx_minus_xy: f64,
    /// ⟨σᶻ_l σᶻ_{l+R}⟩.
    pub zz: f64,
    /// ⟨σᶻ⟩ at either site (translation invariance).
    pub z_single: f64,
    pub separation: usize,
}

/// Assemble pair correlators from g, s tables covering separations 0..=R.
pub(crate) fn pair_correlators_from_tables(
    g: &[f64],
    s: &[f64],
    r: usize,
) -> Result<PairCorrelators> {
    if !(r == 1 || r == 2) {
        return Err(SswError::UnsupportedSeparation(r));
    }
    let (xx, yx, zz) = string_values(g, s, r);
    debug_assert!(
        xx.im.abs() < 1e-12 && yx.im.abs() < 1e-12 && zz.im.abs() < 1e-12,
        "string contraction left imaginary residue"
    );
    Ok(PairCorrelators {
        xx_plus_yy: xx.re,
        yx_minus_xy: yx.re,
        zz: zz.re,
        z_single: g[0],
        separation: r,
    })
}

/// Pair correlators of the bulk steady state at separation R ∈ {1, 2}.
pub fn pair_correlators(
    params: &ChainParams,
    r: usize,
    config: &QuadratureConfig,
) -> Result<PairCorrelators> {
    if !(r == 1 || r == 2) {
        return Err(SswError::UnsupportedSeparation(r));
    }
    let set = CorrelatorSet::compute(params, r, config)?;
    pair_correlators_from_tables(&set.g, &set.s, r)
}

/// Concurrence of the X-shaped two-site state described by `pairs`:
/// C = 2 max{|z| − √vy, 0} with z = (⟨xx+yy⟩ − i⟨yx−xy⟩)/4 and
/// vy = ((1+⟨zz⟩)² − 4⟨σᶻ⟩²)/16.
pub fn concurrence_from_pairs(pairs: &PairCorrelators) -> Result<f64> {
    let z_abs = pairs.xx_plus_yy.hypot(pairs.yx_minus_xy) / 4.0;
    let minor = (1.0 + pairs.zz).powi(2) - 4.0 * pairs.z_single.powi(2);
    if minor < -1e-10 {
        return Err(SswError::NegativeVy(minor));
    }
    let vy = minor.max(0.0) / 16.0;
    Ok((2.0 * (z_abs - vy.sqrt())).max(0.0))
}

/// Steady-state concurrence at separation R ∈ {1, 2}.
pub fn concurrence(params: &ChainParams, r: usize, config: &QuadratureConfig) -> Result<f64> {
    concurrence_from_pairs(&pair_correlators(params, r, config)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::magnetization_density;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    // Zero-temperature Fermi-sea value −(2/π)√(1−B²) of G₁ at B = 0.5.
    const G1_ZERO_T_HALF_FIELD: f64 = -0.5513288954217921;

    #[test]
    fn g_r_matches_zero_temperature_fermi_sea() {
        let p = ChainParams::new(1.0, 0.5, 1e-3, 0.0).unwrap();
        assert_abs_diff_eq!(
            g_r(&p, 1, &cfg()).unwrap(),
            G1_ZERO_T_HALF_FIELD,
            epsilon = 1e-3
        );
    }

    #[test]
    fn g_r_vanishes_when_polarized() {
        // tanh ≡ 1 across the zone leaves ∫cos q dq = 0.
        let p = ChainParams::new(1.0, 2.0, 1e-3, 0.0).unwrap();
        assert_abs_diff_eq!(g_r(&p, 1, &cfg()).unwrap(), 0.0, epsilon = 1e-4);
    }

    #[test]
    fn g_zero_is_the_magnetization() {
        let p = ChainParams::new(1.0, 0.5, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            g_r(&p, 0, &cfg()).unwrap(),
            magnetization_density(&p, &cfg()).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn s_r_is_zero_at_equilibrium_and_at_zero_separation() {
        let p = ChainParams::new(1.0, 0.5, 1.0, 0.0).unwrap();
        assert_eq!(s_r(&p, 0, &cfg()).unwrap(), 0.0);
        for r in 1..4 {
            assert_abs_diff_eq!(s_r(&p, r, &cfg()).unwrap(), 0.0, epsilon = 1e-10);
        }
        let driven = ChainParams::new(1.0, 0.5, 1.0, 1.0).unwrap();
        assert!(s_r(&driven, 1, &cfg()).unwrap().abs() > 1e-3);
    }

    #[test]
    fn string_values_match_hand_expanded_wick_terms() {
        // Synthetic tables; hand expansion of the 4- and 6-operator
        // Pfaffians: R=1 gives (−2g₁, 2s₁, g₀²−g₁²−s₁²); R=2 gives
        // (2g₁²−2s₁²−2g₀g₂, 2g₀s₂−4g₁s₁, g₀²−g₂²−s₂²).
        let g = [0.3, -0.2, 0.15];
        let s = [0.0, 0.25, -0.1];

        let (xx1, yx1, zz1) = string_values(&g, &s, 1);
        assert_relative_eq!(xx1.re, 0.4, max_relative = 1e-14);
        assert_relative_eq!(yx1.re, 0.5, max_relative = 1e-14);
        assert_relative_eq!(zz1.re, -0.0125, max_relative = 1e-14);

        let (xx2, yx2, zz2) = string_values(&g, &s, 2);
        assert_relative_eq!(xx2.re, -0.135, max_relative = 1e-13);
        assert_relative_eq!(yx2.re, 0.14, max_relative = 1e-13);
        assert_relative_eq!(zz2.re, 0.0575, max_relative = 1e-13);

        for v in [xx1, yx1, zz1, xx2, yx2, zz2] {
            assert!(v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        // Pf(M)² = det(M) for the antisymmetric pair matrix of any string.
        let g = [0.42, -0.31, 0.17];
        let s = [0.0, 0.23, -0.08];
        let table = PairTable { g: &g, s: &s };
        let ops = string_ops(Majorana::A(0), Majorana::B(2), 2);

        let n = ops.len();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            for j in (i + 1)..n {
                let v = table.pair(ops[i], ops[j]);
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        let pf = pfaffian(&table, &ops);
        let det = m.determinant();
        assert_relative_eq!((pf * pf).re, det.re, max_relative = 1e-12);
        assert_abs_diff_eq!((pf * pf).im, det.im, epsilon = 1e-12);
    }

    #[test]
    fn equilibrium_pairs_have_no_current_component() {
        let p = ChainParams::new(1.0, 0.5, 0.7, 0.0).unwrap();
        for r in [1, 2] {
            let pairs = pair_correlators(&p, r, &cfg()).unwrap();
            assert_abs_diff_eq!(pairs.yx_minus_xy, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn polarized_pairs_are_classical() {
        let p = ChainParams::new(1.0, 5.0, 1e-3, 0.0).unwrap();
        let pairs = pair_correlators(&p, 1, &cfg()).unwrap();
        assert_abs_diff_eq!(pairs.zz, 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(pairs.xx_plus_yy, 0.0, epsilon = 1e-4);
        assert_abs_diff_eq!(concurrence(&p, 1, &cfg()).unwrap(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn unsupported_separations_are_rejected() {
        let p = ChainParams::new(1.0, 0.5, 1.0, 0.0).unwrap();
        assert!(matches!(
            pair_correlators(&p, 0, &cfg()),
            Err(SswError::UnsupportedSeparation(0))
        ));
        assert!(matches!(
            pair_correlators(&p, 3, &cfg()),
            Err(SswError::UnsupportedSeparation(3))
        ));
    }

    #[test]
    fn bell_pair_correlators_give_unit_concurrence() {
        // (|01⟩+|10⟩)/√2: ⟨xx⟩ = ⟨yy⟩ = 1, ⟨zz⟩ = −1, ⟨σᶻ⟩ = 0.
        let pairs = PairCorrelators {
            xx_plus_yy: 2.0,
            yx_minus_xy: 0.0,
            zz: -1.0,
            z_single: 0.0,
            separation: 1,
        };
        assert_relative_eq!(concurrence_from_pairs(&pairs).unwrap(), 1.0);
    }

    #[test]
    fn unphysical_diagonal_minor_is_an_error() {
        let pairs = PairCorrelators {
            xx_plus_yy: 0.0,
            yx_minus_xy: 0.0,
            zz: -0.5,
            z_single: 0.9,
            separation: 1,
        };
        assert!(matches!(
            concurrence_from_pairs(&pairs),
            Err(SswError::NegativeVy(_))
        ));
    }

    #[test]
    fn hot_limit_along_fixed_ratio_kills_all_correlations() {
        let t_hot = 1e6;
        let p = ChainParams::new(1.0, 0.5, t_hot, 1.0 / t_hot).unwrap();
        for r in [1, 2] {
            assert_abs_diff_eq!(g_r(&p, r, &cfg()).unwrap(), 0.0, epsilon = 1e-6);
            assert_abs_diff_eq!(concurrence(&p, r, &cfg()).unwrap(), 0.0, epsilon = 1e-6);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn physical_ranges_hold_for_random_points(
            b in 0.0f64..2.0,
            t in 0.2f64..5.0,
            gamma in 0.0f64..2.0,
        ) {
            let p = ChainParams::new(1.0, b, t, gamma).unwrap();
            let set = CorrelatorSet::compute(&p, 3, &cfg()).unwrap();
            for r in 0..=3 {
                prop_assert!(set.g[r].abs() <= 1.0 + 1e-12);
                prop_assert!(set.s[r].abs() <= 1.0 + 1e-12);
            }
            for r in [1, 2] {
                let pairs = pair_correlators_from_tables(&set.g, &set.s, r).unwrap();
                prop_assert!(pairs.zz.abs() <= 1.0 + 1e-12);
                prop_assert!(pairs.xx_plus_yy.abs() <= 2.0 + 1e-12);
                prop_assert!(pairs.yx_minus_xy.abs() <= 2.0 + 1e-12);
                let c = concurrence_from_pairs(&pairs).unwrap();
                prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
            }
        }
    }
}
