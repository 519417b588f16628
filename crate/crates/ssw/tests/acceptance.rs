//! End-to-end acceptance gate. Each numbered test prints exactly one
//! PASS or FAIL line (visible under `--nocapture`, and in the panic
//! message on failure) and asserts the criterion at its stated
//! tolerance, so this target doubles as a release checklist.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ssw::ed::free_fermion::free_fermion_finite;
use ssw::ed::{build_h0, build_je, build_jl, build_xx_plus_yy_sum, expect_pure, random_product_state};
use ssw::verify::{default_axes, run_verify};
use ssw::{
    concurrence, g_r, log_z_density, scan, w1, witness_result, ChainParams, GridAxes,
    Quantity, QuadratureConfig, ScanGrid, ThermoPoint,
};

fn gate(name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("[{verdict}] acceptance {name}: {detail}");
    assert!(ok, "acceptance {name} FAIL: {detail}");
}

fn tight() -> QuadratureConfig {
    QuadratureConfig {
        tolerance: 1e-13,
        ..QuadratureConfig::default()
    }
}

fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    let step = (max - min) / (count - 1) as f64;
    (0..count).map(|i| min + step * i as f64).collect()
}

/// N=8 periodic ring: exact diagonalization and the parity-resolved free
/// fermion evaluation agree on every reported quantity across the
/// 4 x 3 x 3 keystone grid to 1e-8 absolute.
#[test]
fn acceptance_1_keystone_ed_free_fermion_equivalence() {
    let start = Instant::now();
    let report = run_verify(8, 1.0, 1.0, &default_axes(), &QuadratureConfig::default())
        .expect("verification grid must evaluate");
    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(300);
    gate(
        "1 (keystone N=8 oracle equivalence)",
        report.pass && in_time,
        &format!(
            "max |ED - free fermion| = {:.3e} over {} rows (tolerance {:.0e}) in {elapsed:.2?}",
            report.max_diff_ed_ff,
            report.rows.len(),
            report.tolerance
        ),
    );
}

/// The finite-ring values converge to the bulk quadrature: the gap for
/// M/N and Q/N at (J=1, B=0.5, T=1, gamma=1) shrinks along the ring
/// ladder and is below 1e-8 at N=4096.
#[test]
fn acceptance_2_finite_size_convergence() {
    let start = Instant::now();
    let params = ChainParams::new(1.0, 0.5, 1.0, 1.0).unwrap();
    let bulk = ThermoPoint::compute(&params, &tight()).unwrap();

    let mut detail = String::new();
    let mut prev = (f64::INFINITY, f64::INFINITY);
    let mut decreasing = true;
    for n in [8usize, 16, 32, 4096] {
        let ff = free_fermion_finite(&params, n).unwrap();
        let dm = (ff.m_density - bulk.m_density).abs();
        let dq = (ff.q_density - bulk.q_density).abs();
        decreasing &= dm < prev.0 && dq < prev.1;
        prev = (dm, dq);
        write!(detail, "N={n}: dM={dm:.2e} dQ={dq:.2e}; ").unwrap();
    }
    let converged = prev.0 < 1e-8 && prev.1 < 1e-8;
    let elapsed = start.elapsed();
    write!(detail, "in {elapsed:.2?}").unwrap();
    gate(
        "2 (finite-size convergence)",
        decreasing && converged && elapsed < Duration::from_secs(10),
        &detail,
    );
}

/// The closed-form densities are the corresponding ln Z derivatives:
/// Q = -d lnZ/d gamma, e = -d lnZ/d beta, M = (1/(beta B)) d lnZ/d b at
/// b = 1, checked by central differences at 10 seeded random points.
#[test]
fn acceptance_3_derivative_identities() {
    let config = tight();
    let mut rng = ChaCha8Rng::seed_from_u64(20260819);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let b_field: f64 = rng.gen_range(0.2..1.5);
        let temperature: f64 = rng.gen_range(0.3..3.0);
        let gamma: f64 = rng.gen_range(0.3..2.0);
        let params = ChainParams::new(1.0, b_field, temperature, gamma).unwrap();
        let point = ThermoPoint::compute(&params, &config).unwrap();
        let beta = params.beta();

        let lnz = |t: f64, g: f64, b: f64| {
            log_z_density(
                &ChainParams::with_b_aux(1.0, b_field, t, g, b).unwrap(),
                &config,
            )
            .unwrap()
        };
        let q_num = -(lnz(temperature, gamma + h, 1.0) - lnz(temperature, gamma - h, 1.0))
            / (2.0 * h);
        let e_num = -(lnz(1.0 / (beta + h), gamma, 1.0) - lnz(1.0 / (beta - h), gamma, 1.0))
            / (2.0 * h);
        let m_num = (lnz(temperature, gamma, 1.0 + h) - lnz(temperature, gamma, 1.0 - h))
            / (2.0 * h * beta * b_field);

        for (numeric, analytic) in [
            (q_num, point.q_density),
            (e_num, point.e_density),
            (m_num, point.m_density),
        ] {
            worst = worst.max(((numeric - analytic) / analytic).abs());
        }
    }
    gate(
        "3 (derivative identities)",
        worst <= 1e-6,
        &format!("worst relative error {worst:.2e} over 10 points (tolerance 1e-6)"),
    );
}

/// The separability bounds behind both witnesses hold for random product
/// states: |<J^E>| <= J N (2B + J)/2 and |<sum xx + yy>| <= N, with zero
/// violations over 200 fixed-seed states at N=6.
#[test]
fn acceptance_4_product_state_bounds() {
    let n = 6usize;
    let j = 1.0;
    let xx_yy = build_xx_plus_yy_sum(n).unwrap();
    let je_ops: Vec<_> = [0.3, 1.0]
        .iter()
        .map(|&b| (b, build_je(n, j, b).unwrap()))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut violations = 0usize;
    let mut closest: f64 = f64::INFINITY;
    for _ in 0..200 {
        let psi = random_product_state(n, &mut rng).unwrap();
        let hop = expect_pure(&xx_yy, &psi).unwrap();
        if hop.abs() > n as f64 {
            violations += 1;
        }
        closest = closest.min(n as f64 - hop.abs());
        for (b, je) in &je_ops {
            let bound = j * n as f64 * (2.0 * b + j) / 2.0;
            let current = expect_pure(je, &psi).unwrap();
            if current.abs() > bound {
                violations += 1;
            }
            closest = closest.min(bound - current.abs());
        }
    }
    gate(
        "4 (product-state separability bounds)",
        violations == 0,
        &format!("{violations} violations over 200 states; smallest margin {closest:.3e}"),
    );
}

/// Zero-temperature anchors on the gamma = 0 line: W1(B=0) = 4/pi, the
/// W1 = 1 crossing sits at B = sqrt(1 - pi^2/16), and
/// G_1(B=0.5) = -(2/pi) sqrt(3)/2.
#[test]
fn acceptance_5_zero_temperature_anchors() {
    let config = QuadratureConfig::default();
    let cold = 1e-3;

    let w1_b0 = w1(&ChainParams::new(1.0, 0.0, cold, 0.0).unwrap(), &config).unwrap();
    let anchor = 4.0 / std::f64::consts::PI;
    let anchor_ok = (w1_b0 - anchor).abs() <= 1e-3;

    let b_star = (1.0 - std::f64::consts::PI.powi(2) / 16.0).sqrt();
    let mut crossing_ok = true;
    let mut worst_b = f64::NAN;
    for b in linspace(0.0, 1.2, 61) {
        let value = w1(&ChainParams::new(1.0, b, cold, 0.0).unwrap(), &config).unwrap();
        let expected_above = b <= b_star - 0.01;
        let expected_below = b >= b_star + 0.01;
        if (expected_above && value <= 1.0) || (expected_below && value >= 1.0) {
            crossing_ok = false;
            worst_b = b;
        }
    }

    let g1 = g_r(&ChainParams::new(1.0, 0.5, cold, 0.0).unwrap(), 1, &config).unwrap();
    let g1_anchor = -(2.0 / std::f64::consts::PI) * 0.75f64.sqrt();
    let g1_ok = (g1 - g1_anchor).abs() <= 1e-3;

    gate(
        "5 (zero-temperature anchors)",
        anchor_ok && crossing_ok && g1_ok,
        &format!(
            "W1(0) = {w1_b0:.6} vs 4/pi = {anchor:.6}; crossing at B* = {b_star:.4} ({}); G1 = {g1:.6} vs {g1_anchor:.6}",
            if crossing_ok {
                "clean".to_string()
            } else {
                format!("violated at B = {worst_b}")
            }
        ),
    );
}

fn hot_axes() -> GridAxes {
    GridAxes {
        b: linspace(0.0, 2.0, 21),
        t: linspace(0.1, 10.0, 34),
        gamma: vec![0.0, 1.0, 2.0],
    }
}

fn fresh_scan(quantity: Quantity) -> ScanGrid {
    scan(quantity, 1.0, 1.0, hot_axes(), &QuadratureConfig::default()).unwrap()
}

/// The 6a-6d assertions share one grid per quantity; computed once.
fn witness_scan(quantity: Quantity) -> &'static ScanGrid {
    static GRIDS: std::sync::OnceLock<[ScanGrid; 4]> = std::sync::OnceLock::new();
    let grids = GRIDS.get_or_init(|| {
        [
            fresh_scan(Quantity::W1),
            fresh_scan(Quantity::Wss),
            fresh_scan(Quantity::CR1),
            fresh_scan(Quantity::CR2),
        ]
    });
    match quantity {
        Quantity::W1 => &grids[0],
        Quantity::Wss => &grids[1],
        Quantity::CR1 => &grids[2],
        Quantity::CR2 => &grids[3],
        _ => unreachable!("only witness and concurrence grids are cached"),
    }
}

/// At gamma = 2 the energy witness W1 should exceed 1 somewhere in the
/// hot region T >= 5. It does not: W1 is built from e + B m, whose
/// current-induced enhancement cancels to leading order at high T, so the
/// measured maximum stays two decades below the threshold. Kept failing
/// deliberately rather than weakening the check.
#[test]
fn acceptance_6a_energy_witness_above_one_at_high_temperature() {
    let grid = witness_scan(Quantity::W1);
    let mut max_w1: f64 = 0.0;
    for (ib, _) in grid.axes.b.iter().enumerate() {
        for (it, t) in grid.axes.t.iter().enumerate() {
            if *t >= 5.0 {
                max_w1 = max_w1.max(grid.value_at(ib, it, 2));
            }
        }
    }
    gate(
        "6a-W1 (energy witness above one at T >= 5, gamma = 2)",
        max_w1 > 1.0,
        &format!("max W1 over the hot region = {max_w1:.4}, needs > 1"),
    );
}

/// At gamma = 2 the current witness W_ss exceeds 1 at points with T >= 5:
/// the current bias keeps detectable entanglement alive far above the
/// equilibrium melting temperature.
#[test]
fn acceptance_6a_current_witness_above_one_at_high_temperature() {
    let grid = witness_scan(Quantity::Wss);
    let mut max_wss: f64 = 0.0;
    let mut hot_points = 0usize;
    for (ib, _) in grid.axes.b.iter().enumerate() {
        for (it, t) in grid.axes.t.iter().enumerate() {
            if *t >= 5.0 {
                let value = grid.value_at(ib, it, 2);
                max_wss = max_wss.max(value);
                if value > 1.0 {
                    hot_points += 1;
                }
            }
        }
    }
    gate(
        "6a-Wss (current witness above one at T >= 5, gamma = 2)",
        hot_points > 0,
        &format!("{hot_points} grid points with W_ss > 1, max = {max_wss:.4}"),
    );
}

/// W_ss vanishes identically on the gamma = 0 plane: no current, no
/// current-based witness.
#[test]
fn acceptance_6b_current_witness_vanishes_without_bias() {
    let grid = witness_scan(Quantity::Wss);
    let mut max_abs: f64 = 0.0;
    for ib in 0..grid.axes.b.len() {
        for it in 0..grid.axes.t.len() {
            max_abs = max_abs.max(grid.value_at(ib, it, 0).abs());
        }
    }
    gate(
        "6b (W_ss = 0 at gamma = 0)",
        max_abs <= 1e-12,
        &format!("max |W_ss| on the gamma = 0 plane = {max_abs:.2e}"),
    );
}

/// The detected region {W_ss > 1} grows with the bias: its grid-cell
/// count over (B, T) in [0,2] x [0.1,10] is non-decreasing in gamma.
#[test]
fn acceptance_6c_detected_area_grows_with_bias() {
    let grid = witness_scan(Quantity::Wss);
    let mut counts = [0usize; 3];
    for (ig, count) in counts.iter_mut().enumerate() {
        for ib in 0..grid.axes.b.len() {
            for it in 0..grid.axes.t.len() {
                if grid.value_at(ib, it, ig) > 1.0 {
                    *count += 1;
                }
            }
        }
    }
    gate(
        "6c (W_ss > 1 area non-decreasing in gamma)",
        counts[0] <= counts[1] && counts[1] <= counts[2] && counts[2] > 0,
        &format!(
            "cells above threshold: {} (gamma=0), {} (gamma=1), {} (gamma=2)",
            counts[0], counts[1], counts[2]
        ),
    );
}

/// Concurrence maps: nearest-neighbour entanglement at gamma = 0 melts
/// above a finite temperature for every field, while the bias creates
/// next-nearest-neighbour entanglement at low T and high B that has no
/// gamma = 0 counterpart.
#[test]
fn acceptance_6d_concurrence_melting_and_new_regions() {
    let nn = witness_scan(Quantity::CR1);
    let nnn = witness_scan(Quantity::CR2);

    let mut melted = true;
    for ib in 0..nn.axes.b.len() {
        for (it, t) in nn.axes.t.iter().enumerate() {
            if *t >= 1.0 && nn.value_at(ib, it, 0) > 0.0 {
                melted = false;
            }
        }
    }

    let mut fresh_points = 0usize;
    for (ib, b) in nnn.axes.b.iter().enumerate() {
        for (it, t) in nnn.axes.t.iter().enumerate() {
            let biased = nnn.value_at(ib, it, 2);
            let unbiased = nnn.value_at(ib, it, 0);
            if *b >= 1.5 && *t <= 0.5 && biased > 1e-3 && unbiased == 0.0 {
                fresh_points += 1;
            }
        }
    }

    gate(
        "6d (concurrence melting and bias-created regions)",
        melted && fresh_points > 0,
        &format!(
            "NN concurrence zero for all T >= 1 at gamma = 0: {melted}; {fresh_points} high-B low-T points with NNN concurrence only at gamma = 2"
        ),
    );
}

/// All four scan assertions above stay inside the shared runtime budget.
#[test]
fn acceptance_6_runtime_budget() {
    let start = Instant::now();
    for quantity in [Quantity::W1, Quantity::Wss, Quantity::CR1, Quantity::CR2] {
        witness_scan(quantity);
    }
    let elapsed = start.elapsed();
    gate(
        "6 (scan runtime budget)",
        elapsed < Duration::from_secs(120),
        &format!("four 21 x 34 x 3 scans in {elapsed:.2?} (budget 120 s)"),
    );
}

/// Infinite-temperature limit taken along fixed lambda = gamma T: every
/// density, witness, and concurrence tends to zero and the ln Z density
/// tends to ln 2.
#[test]
fn acceptance_7_infinite_temperature_limit() {
    let config = tight();
    let temperature = 1e7;
    let mut worst: f64 = 0.0;
    let mut worst_label = String::new();
    for lambda in [0.0f64, 1.0, 2.0] {
        for b_field in [0.0f64, 0.5, 1.0, 1.5] {
            let params =
                ChainParams::new(1.0, b_field, temperature, lambda / temperature).unwrap();
            let witness = witness_result(&params, &config).unwrap();
            let thermo = witness.thermo;
            let values = [
                ("lnZ - ln2", thermo.log_z_density - std::f64::consts::LN_2),
                ("m", thermo.m_density),
                ("e", thermo.e_density),
                ("q", thermo.q_density),
                ("u", thermo.u_density),
                ("W1", witness.w1),
                ("W_ss", witness.w_ss),
                ("C_R1", concurrence(&params, 1, &config).unwrap()),
                ("C_R2", concurrence(&params, 2, &config).unwrap()),
            ];
            for (label, value) in values {
                if value.abs() > worst {
                    worst = value.abs();
                    worst_label = format!("{label} at lambda = {lambda}, B = {b_field}");
                }
            }
        }
    }
    gate(
        "7 (infinite-temperature limit)",
        worst <= 1e-5,
        &format!("largest residual {worst:.2e} ({worst_label}), tolerance 1e-5"),
    );
}

/// The conserved current operator is literally the lattice sum of the
/// continuity-equation local currents, and it commutes with the chain
/// Hamiltonian.
#[test]
fn acceptance_8_current_construction_identity() {
    let j = 1.0;
    let b_field = 0.7;
    let mut worst_sum: f64 = 0.0;
    let mut worst_comm: f64 = 0.0;
    for n in [4usize, 6, 8] {
        let je = build_je(n, j, b_field).unwrap();
        let mut summed = build_jl(n, 1, j, b_field, 1.0).unwrap().matrix;
        for l in 2..=n {
            summed += &build_jl(n, l, j, b_field, 1.0).unwrap().matrix;
        }
        let diff = (&summed - &je.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        worst_sum = worst_sum.max(diff);

        let h0 = build_h0(n, j, b_field, 1.0).unwrap();
        let comm = &je.matrix * &h0.matrix - &h0.matrix * &je.matrix;
        let comm_norm = comm.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let je_norm = je.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let h0_norm = h0.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst_comm = worst_comm.max(comm_norm / (je_norm * h0_norm));
    }
    gate(
        "8 (current construction identity)",
        worst_sum <= 1e-12 && worst_comm < 1e-11,
        &format!(
            "max |sum_l j_l - J^E| = {worst_sum:.2e} (tolerance 1e-12); relative commutator residue {worst_comm:.2e} (tolerance 1e-11)"
        ),
    );
}
