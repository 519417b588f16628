//! Cross-validation of the parity-resolved free-fermion evaluation
//! against dense exact diagonalization on rings the oracle can still
//! hold in memory. Both sides describe the same finite system exactly,
//! so agreement is expected at near machine precision; the tolerances
//! below leave room only for eigensolver and summation noise.

use ssw::ed::free_fermion::free_fermion_finite;
use ssw::ed::{
    build_h0, build_je, expect_matrix, jw_majorana_a, jw_majorana_b, thermal_state, two_site_rdm,
    wootters_concurrence,
};
use ssw::ChainParams;

fn oracle_state(n: usize, params: &ChainParams) -> ssw::ed::ThermalState {
    let h0 = build_h0(n, params.j_coupling(), params.b_field(), params.b_aux()).unwrap();
    let je = build_je(n, params.j_coupling(), params.b_field()).unwrap();
    thermal_state(&h0, &je, params.beta(), params.gamma()).unwrap()
}

/// Hard corners of the keystone grid plus a biased low-T point.
fn probe_points() -> Vec<ChainParams> {
    [(1.0, 0.2, 1.0), (0.5, 1.0, 2.0), (0.0, 5.0, 2.0), (1.5, 0.2, 0.0)]
        .into_iter()
        .map(|(b, t, g)| ChainParams::new(1.0, b, t, g).unwrap())
        .collect()
}

#[test]
fn ten_site_concurrence_matches_exact_diagonalization() {
    for params in probe_points() {
        let ff = free_fermion_finite(&params, 10).unwrap();
        let state = oracle_state(10, &params);
        for (r, from_tables) in [(1usize, ff.concurrence_r1), (2, ff.concurrence_r2)] {
            let rdm = two_site_rdm(&state, 1, 1 + r).unwrap();
            let exact = wootters_concurrence(&rdm).unwrap();
            assert!(
                (from_tables - exact).abs() <= 1e-6,
                "concurrence R={r} at (B={}, T={}, gamma={}): tables {from_tables} vs ED {exact}",
                params.b_field(),
                params.temperature(),
                params.gamma()
            );
        }
    }
}

#[test]
fn eight_site_mode_tables_match_majorana_expectations() {
    let n = 8usize;
    for params in probe_points() {
        let ff = free_fermion_finite(&params, n).unwrap();
        let state = oracle_state(n, &params);
        let a1 = jw_majorana_a(n, 1).unwrap();
        for r in 0..=2usize {
            // <A_1 B_{1+R}> = g_R, real.
            let b = jw_majorana_b(n, 1 + r).unwrap();
            let g = expect_matrix(&(&a1.matrix * &b.matrix), &state).unwrap();
            assert!((g.re - ff.g[r]).abs() <= 1e-8 && g.im.abs() <= 1e-10);

            // <A_1 A_{1+R}> = -i s_R for R > 0, purely imaginary.
            if r > 0 {
                let a = jw_majorana_a(n, 1 + r).unwrap();
                let s = expect_matrix(&(&a1.matrix * &a.matrix), &state).unwrap();
                assert!((s.im + ff.s[r]).abs() <= 1e-8 && s.re.abs() <= 1e-10);
            }
        }
        // The diagonal of the table: <A_l B_l> = <sigma^z_l> = m.
        assert!((ff.g[0] - ff.m_density).abs() <= 1e-12);
    }
}
