//! Three-way cross-validation: exact diagonalization vs parity-resolved
//! free fermions vs bulk quadrature, on a shared parameter grid.
//!
//! The ED and free-fermion columns describe the same finite ring and must
//! agree to near machine precision; that agreement is the pass/fail gate.
//! The quadrature column is the N → ∞ limit and sits a finite-size gap
//! away from both, so it is reported for context but never gated.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlators::{concurrence, pair_correlators};
use crate::ed::{
    build_h0, build_je, build_site_operator, expect, thermal_state, two_site_rdm,
    wootters_concurrence, Axis,
};
use crate::ed::free_fermion::free_fermion_finite;
use crate::error::{Result, SswError};
use crate::model::ChainParams;
use crate::quadrature::QuadratureConfig;
use crate::scan::GridAxes;
use crate::thermo::ThermoPoint;

/// Gate on |ED − free fermion| for every compared quantity.
pub const ED_FF_TOLERANCE: f64 = 1e-8;

/// Default comparison grid: fields from zero through strong, temperatures
/// from cold to hot, and drivings from equilibrium to strong, in every
/// combination. Includes the B = J point whose zero mode exercises the
/// degenerate-branch handling.
pub fn default_axes() -> GridAxes {
    GridAxes {
        b: vec![0.0, 0.5, 1.0, 1.5],
        t: vec![0.2, 1.0, 5.0],
        gamma: vec![0.0, 1.0, 2.0],
    }
}

/// One compared quantity at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub b_field: f64,
    pub temperature: f64,
    pub gamma: f64,
    pub quantity: String,
    pub ed: f64,
    pub free_fermion: f64,
    pub quadrature: f64,
    pub diff_ed_ff: f64,
    pub diff_ed_quadrature: f64,
    pub diff_ff_quadrature: f64,
}

/// Full comparison table plus its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub version: String,
    pub n_sites: usize,
    pub j: f64,
    pub b_aux: f64,
    /// Gate applied to the `diff_ed_ff` column.
    pub tolerance: f64,
    pub max_diff_ed_ff: f64,
    /// Copy of the row with the largest `diff_ed_ff`, for quick triage.
    pub worst: Option<VerifyRow>,
    pub pass: bool,
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("verify report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<VerifyReport> {
        let report: VerifyReport = serde_json::from_str(text)
            .map_err(|e| SswError::InvalidConfig(format!("bad verify JSON: {e}")))?;
        if report.schema != 1 {
            return Err(SswError::InvalidConfig(format!(
                "unsupported verify schema {}",
                report.schema
            )));
        }
        Ok(report)
    }

    /// Human-readable pointer at the worst row, for error messages.
    pub fn worst_description(&self) -> String {
        match &self.worst {
            Some(row) => format!(
                "{} at B = {}, T = {}, gamma = {}: |ED - free fermion| = {:.3e}",
                row.quantity, row.b_field, row.temperature, row.gamma, row.diff_ed_ff
            ),
            None => "empty comparison table".to_string(),
        }
    }
}

fn pauli_2x2(axis: Axis) -> DMatrix<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match axis {
        Axis::X => [zero, one, one, zero],
        Axis::Y => [zero, -i, i, zero],
        Axis::Z => [one, zero, zero, -one],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

fn re_trace_product(rdm: &DMatrix<Complex64>, op: &DMatrix<Complex64>) -> f64 {
    (op * rdm).trace().re
}

/// (xx_plus_yy, yx_minus_xy, zz) read off a two-site reduced density matrix.
fn pair_values_from_rdm(rdm: &DMatrix<Complex64>) -> (f64, f64, f64) {
    let sx = pauli_2x2(Axis::X);
    let sy = pauli_2x2(Axis::Y);
    let sz = pauli_2x2(Axis::Z);
    let xx_plus_yy = sx.kronecker(&sx) + sy.kronecker(&sy);
    let yx_minus_xy = sy.kronecker(&sx) - sx.kronecker(&sy);
    let zz = sz.kronecker(&sz);
    (
        re_trace_product(rdm, &xx_plus_yy),
        re_trace_product(rdm, &yx_minus_xy),
        re_trace_product(rdm, &zz),
    )
}

struct PointColumns {
    ed: [f64; 11],
    ff: [f64; 11],
    quad: [f64; 11],
}

const QUANTITY_LABELS: [&str; 11] = [
    "m",
    "u",
    "q",
    "xx_plus_yy_r1",
    "yx_minus_xy_r1",
    "zz_r1",
    "concurrence_r1",
    "xx_plus_yy_r2",
    "yx_minus_xy_r2",
    "zz_r2",
    "concurrence_r2",
];

fn evaluate_point(
    n_sites: usize,
    j: f64,
    b_aux: f64,
    b: f64,
    t: f64,
    gamma: f64,
    config: &QuadratureConfig,
) -> Result<PointColumns> {
    let params = ChainParams::with_b_aux(j, b, t, gamma, b_aux)?;

    let h0 = build_h0(n_sites, j, b, b_aux)?;
    let je = build_je(n_sites, j, b)?;
    let state = thermal_state(&h0, &je, params.beta(), gamma)?;

    let mut z_total = 0.0;
    for site in 1..=n_sites {
        z_total += expect(&build_site_operator(n_sites, site, Axis::Z)?, &state)?;
    }
    let m_ed = z_total / n_sites as f64;
    let e_ed = expect(&h0, &state)? / n_sites as f64;
    let q_ed = expect(&je, &state)? / n_sites as f64;
    let u_ed = e_ed + params.gamma_over_beta() * q_ed;

    let rdm1 = two_site_rdm(&state, 1, 2)?;
    let rdm2 = two_site_rdm(&state, 1, 3)?;
    let (xx1_ed, yx1_ed, zz1_ed) = pair_values_from_rdm(&rdm1);
    let (xx2_ed, yx2_ed, zz2_ed) = pair_values_from_rdm(&rdm2);
    let c1_ed = wootters_concurrence(&rdm1)?;
    let c2_ed = wootters_concurrence(&rdm2)?;

    let ff = free_fermion_finite(&params, n_sites)?;

    let thermo = ThermoPoint::compute(&params, config)?;
    let pair1 = pair_correlators(&params, 1, config)?;
    let pair2 = pair_correlators(&params, 2, config)?;
    let c1_quad = concurrence(&params, 1, config)?;
    let c2_quad = concurrence(&params, 2, config)?;

    Ok(PointColumns {
        ed: [
            m_ed, u_ed, q_ed, xx1_ed, yx1_ed, zz1_ed, c1_ed, xx2_ed, yx2_ed, zz2_ed, c2_ed,
        ],
        ff: [
            ff.m_density,
            ff.u_density,
            ff.q_density,
            ff.pair_r1.xx_plus_yy,
            ff.pair_r1.yx_minus_xy,
            ff.pair_r1.zz,
            ff.concurrence_r1,
            ff.pair_r2.xx_plus_yy,
            ff.pair_r2.yx_minus_xy,
            ff.pair_r2.zz,
            ff.concurrence_r2,
        ],
        quad: [
            thermo.m_density,
            thermo.u_density,
            thermo.q_density,
            pair1.xx_plus_yy,
            pair1.yx_minus_xy,
            pair1.zz,
            c1_quad,
            pair2.xx_plus_yy,
            pair2.yx_minus_xy,
            pair2.zz,
            c2_quad,
        ],
    })
}

/// Evaluate every grid point three ways and gate on the ED vs free-fermion
/// agreement. Errors at any point abort the whole run: a comparison table
/// with holes cannot certify anything.
pub fn run_verify(
    n_sites: usize,
    j: f64,
    b_aux: f64,
    axes: &GridAxes,
    config: &QuadratureConfig,
) -> Result<VerifyReport> {
    axes.validate()?;
    config.validate()?;

    let mut points = Vec::with_capacity(axes.len());
    for &b in &axes.b {
        for &t in &axes.t {
            for &gamma in &axes.gamma {
                points.push((b, t, gamma));
            }
        }
    }
    let columns: Vec<Result<PointColumns>> = points
        .par_iter()
        .map(|&(b, t, gamma)| evaluate_point(n_sites, j, b_aux, b, t, gamma, config))
        .collect();

    let mut rows = Vec::with_capacity(points.len() * QUANTITY_LABELS.len());
    for (&(b, t, gamma), cols) in points.iter().zip(columns) {
        let cols = cols?;
        for (k, label) in QUANTITY_LABELS.iter().enumerate() {
            let (ed, ff, quad) = (cols.ed[k], cols.ff[k], cols.quad[k]);
            rows.push(VerifyRow {
                b_field: b,
                temperature: t,
                gamma,
                quantity: (*label).to_string(),
                ed,
                free_fermion: ff,
                quadrature: quad,
                diff_ed_ff: (ed - ff).abs(),
                diff_ed_quadrature: (ed - quad).abs(),
                diff_ff_quadrature: (ff - quad).abs(),
            });
        }
    }

    let mut max_diff = 0.0_f64;
    let mut worst: Option<VerifyRow> = None;
    let mut all_finite = true;
    for row in &rows {
        if !row.diff_ed_ff.is_finite() {
            all_finite = false;
        }
        if !row.diff_ed_ff.is_finite() || row.diff_ed_ff > max_diff {
            max_diff = if row.diff_ed_ff.is_finite() {
                row.diff_ed_ff
            } else {
                f64::INFINITY
            };
            worst = Some(row.clone());
        }
    }
    let pass = all_finite && max_diff <= ED_FF_TOLERANCE && !rows.is_empty();

    Ok(VerifyReport {
        schema: 1,
        version: env!("CARGO_PKG_VERSION").to_string(),
        n_sites,
        j,
        b_aux,
        tolerance: ED_FF_TOLERANCE,
        max_diff_ed_ff: max_diff,
        worst,
        pass,
        rows,
    })
}
