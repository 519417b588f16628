//! Dense parameter-grid evaluation and its CSV/JSON serializations.
//!
//! A scan evaluates one scalar quantity over the Cartesian grid
//! b_axis × t_axis × gamma_axis at fixed J and Zeeman scale b. Points are
//! independent, so evaluation is data-parallel; output order is the fixed
//! row-major (B outer, T middle, γ inner) enumeration regardless of thread
//! scheduling. Quadrature failures surface as NaN values plus an error
//! count, never as silent zeros. Serialized floats use the shortest
//! round-trip decimal form, so write → read is lossless at full binary
//! precision.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::correlators::concurrence;
use crate::error::{Result, SswError};
use crate::model::ChainParams;
use crate::quadrature::QuadratureConfig;
use crate::thermo::{energy_current_density, magnetization_density};
use crate::witness::{w1, w_ss};

/// Scannable scalar observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    /// Energy witness W₁.
    #[serde(rename = "W1")]
    W1,
    /// Current witness W_ss.
    #[serde(rename = "WSS")]
    Wss,
    /// Energy-current density ⟨J^E⟩/N.
    #[serde(rename = "Q")]
    Q,
    /// Magnetization density ⟨σᶻ⟩.
    #[serde(rename = "M")]
    M,
    /// Nearest-neighbour concurrence.
    #[serde(rename = "C_R1")]
    CR1,
    /// Next-nearest-neighbour concurrence.
    #[serde(rename = "C_R2")]
    CR2,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            Quantity::W1 => "W1",
            Quantity::Wss => "WSS",
            Quantity::Q => "Q",
            Quantity::M => "M",
            Quantity::CR1 => "C_R1",
            Quantity::CR2 => "C_R2",
        };
        f.write_str(token)
    }
}

impl FromStr for Quantity {
    type Err = SswError;

    /// Case- and underscore-insensitive, so `W_ss` and `c_r1` work on the
    /// command line while the canonical tokens stay fixed in files.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '_')
            .map(|c| c.to_ascii_uppercase())
            .collect();
        match key.as_str() {
            "W1" => Ok(Quantity::W1),
            "WSS" => Ok(Quantity::Wss),
            "Q" => Ok(Quantity::Q),
            "M" => Ok(Quantity::M),
            "CR1" => Ok(Quantity::CR1),
            "CR2" => Ok(Quantity::CR2),
            _ => Err(SswError::InvalidConfig(format!(
                "unknown quantity {s:?}; expected W1, WSS, Q, M, C_R1, or C_R2"
            ))),
        }
    }
}

/// The three scan axes. Each must be nonempty, finite, and strictly
/// increasing; temperatures positive, fields non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxes {
    pub b: Vec<f64>,
    pub t: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl GridAxes {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&str, &[f64]); 3] = [("B", &self.b), ("T", &self.t), ("gamma", &self.gamma)];
        for (name, axis) in checks {
            if axis.is_empty() {
                return Err(SswError::InvalidAxes(format!("{name} axis is empty")));
            }
            if axis.iter().any(|v| !v.is_finite()) {
                return Err(SswError::InvalidAxes(format!(
                    "{name} axis contains a non-finite value"
                )));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(SswError::InvalidAxes(format!(
                    "{name} axis is not strictly increasing"
                )));
            }
        }
        if self.b[0] < 0.0 {
            return Err(SswError::InvalidAxes("B axis must be non-negative".into()));
        }
        if self.t[0] <= 0.0 {
            return Err(SswError::InvalidAxes("T axis must be positive".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.b.len() * self.t.len() * self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One evaluated grid: axes, row-major values, and provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub quantity: Quantity,
    pub j: f64,
    pub b_aux: f64,
    pub axes: GridAxes,
    /// Row-major over (B, T, γ): index (ib·n_t + it)·n_γ + ig. NaN marks a
    /// failed point.
    pub values: Vec<f64>,
    pub error_count: usize,
    pub quadrature: QuadratureConfig,
}

fn evaluate(
    quantity: Quantity,
    j: f64,
    b_aux: f64,
    b: f64,
    t: f64,
    gamma: f64,
    config: &QuadratureConfig,
) -> Result<f64> {
    let params = ChainParams::with_b_aux(j, b, t, gamma, b_aux)?;
    match quantity {
        Quantity::W1 => w1(&params, config),
        Quantity::Wss => w_ss(&params, config),
        Quantity::Q => energy_current_density(&params, config),
        Quantity::M => magnetization_density(&params, config),
        Quantity::CR1 => concurrence(&params, 1, config),
        Quantity::CR2 => concurrence(&params, 2, config),
    }
}

/// Evaluate `quantity` over the grid. Deterministic: the value vector
/// depends only on the inputs, not on thread scheduling.
pub fn scan(
    quantity: Quantity,
    j: f64,
    b_aux: f64,
    axes: GridAxes,
    config: &QuadratureConfig,
) -> Result<ScanGrid> {
    axes.validate()?;
    config.validate()?;
    if !(j.is_finite() && j > 0.0) {
        return Err(SswError::InvalidParams(format!("J = {j} must be positive")));
    }
    if !b_aux.is_finite() {
        return Err(SswError::InvalidParams(format!("b = {b_aux} is not finite")));
    }

    let mut points = Vec::with_capacity(axes.len());
    for &b in &axes.b {
        for &t in &axes.t {
            for &gamma in &axes.gamma {
                points.push((b, t, gamma));
            }
        }
    }
    let results: Vec<Option<f64>> = points
        .par_iter()
        .map(|&(b, t, gamma)| evaluate(quantity, j, b_aux, b, t, gamma, config).ok())
        .collect();
    let error_count = results.iter().filter(|v| v.is_none()).count();
    let values = results.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();

    Ok(ScanGrid {
        quantity,
        j,
        b_aux,
        axes,
        values,
        error_count,
        quadrature: *config,
    })
}

impl ScanGrid {
    pub fn value_at(&self, ib: usize, it: usize, ig: usize) -> f64 {
        let (nt, ng) = (self.axes.t.len(), self.axes.gamma.len());
        self.values[(ib * nt + it) * ng + ig]
    }

    /// Extract the single-γ (B, T) plane at gamma index `ig`.
    pub fn gamma_slice(&self, ig: usize) -> Result<ScanGrid> {
        let ng = self.axes.gamma.len();
        if ig >= ng {
            return Err(SswError::InvalidAxes(format!(
                "gamma index {ig} out of range for axis of length {ng}"
            )));
        }
        let mut values = Vec::with_capacity(self.axes.b.len() * self.axes.t.len());
        for ib in 0..self.axes.b.len() {
            for it in 0..self.axes.t.len() {
                values.push(self.value_at(ib, it, ig));
            }
        }
        let error_count = values.iter().filter(|v| v.is_nan()).count();
        Ok(ScanGrid {
            quantity: self.quantity,
            j: self.j,
            b_aux: self.b_aux,
            axes: GridAxes {
                b: self.axes.b.clone(),
                t: self.axes.t.clone(),
                gamma: vec![self.axes.gamma[ig]],
            },
            values,
            error_count,
            quadrature: self.quadrature,
        })
    }

    /// CSV document: `#` metadata comments, a `B,T,gamma,value` header,
    /// one row per point in canonical order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# schema = 1\n");
        out.push_str(&format!("# version = {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("# quantity = {}\n", self.quantity));
        out.push_str(&format!("# J = {}\n", self.j));
        out.push_str(&format!("# b = {}\n", self.b_aux));
        out.push_str(&format!(
            "# quadrature_tolerance = {:e}\n",
            self.quadrature.tolerance
        ));
        out.push_str(&format!(
            "# quadrature_initial_nodes = {}\n",
            self.quadrature.initial_nodes
        ));
        out.push_str(&format!("# quadrature_max_nodes = {}\n", self.quadrature.max_nodes));
        out.push_str(&format!("# errors = {}\n", self.error_count));
        out.push_str("B,T,gamma,value\n");
        let mut idx = 0;
        for &b in &self.axes.b {
            for &t in &self.axes.t {
                for &gamma in &self.axes.gamma {
                    out.push_str(&format!("{b},{t},{gamma},{}\n", self.values[idx]));
                    idx += 1;
                }
            }
        }
        out
    }

    /// Parse a document produced by [`ScanGrid::to_csv`].
    pub fn from_csv(text: &str) -> Result<ScanGrid> {
        let mut meta = std::collections::HashMap::new();
        let mut rows: Vec<[f64; 4]> = Vec::new();
        let mut saw_header = false;
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((key, value)) = rest.split_once('=') {
                    meta.insert(key.trim().to_string(), value.trim().to_string());
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if !saw_header {
                if line != "B,T,gamma,value" {
                    return Err(SswError::InvalidConfig(format!(
                        "expected CSV header B,T,gamma,value, found {line:?}"
                    )));
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(SswError::InvalidConfig(format!(
                    "CSV row has {} fields, expected 4: {line:?}",
                    fields.len()
                )));
            }
            let mut row = [0.0; 4];
            for (slot, field) in row.iter_mut().zip(&fields) {
                *slot = field.parse::<f64>().map_err(|_| {
                    SswError::InvalidConfig(format!("unparseable CSV number {field:?}"))
                })?;
            }
            rows.push(row);
        }
        if !saw_header {
            return Err(SswError::InvalidConfig("CSV document has no header".into()));
        }

        let get = |key: &str| -> Result<&String> {
            meta.get(key)
                .ok_or_else(|| SswError::InvalidConfig(format!("missing CSV metadata {key:?}")))
        };
        let parse_num = |key: &str| -> Result<f64> {
            get(key)?
                .parse::<f64>()
                .map_err(|_| SswError::InvalidConfig(format!("bad numeric metadata {key:?}")))
        };
        let quantity: Quantity = get("quantity")?.parse()?;
        let j = parse_num("J")?;
        let b_aux = parse_num("b")?;
        let quadrature = QuadratureConfig {
            tolerance: parse_num("quadrature_tolerance")?,
            initial_nodes: parse_num("quadrature_initial_nodes")? as usize,
            max_nodes: parse_num("quadrature_max_nodes")? as usize,
        };

        let ordered_unique = |col: usize| -> Vec<f64> {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for row in &rows {
                if seen.insert(row[col].to_bits()) {
                    out.push(row[col]);
                }
            }
            out
        };
        let axes = GridAxes {
            b: ordered_unique(0),
            t: ordered_unique(1),
            gamma: ordered_unique(2),
        };
        if axes.len() != rows.len() {
            return Err(SswError::InvalidConfig(format!(
                "CSV has {} rows but axes imply {} grid points",
                rows.len(),
                axes.len()
            )));
        }
        let mut idx = 0;
        let mut values = Vec::with_capacity(rows.len());
        for &b in &axes.b {
            for &t in &axes.t {
                for &gamma in &axes.gamma {
                    let row = &rows[idx];
                    if row[0] != b || row[1] != t || row[2] != gamma {
                        return Err(SswError::InvalidConfig(format!(
                            "CSV row {idx} out of canonical (B,T,gamma) order"
                        )));
                    }
                    values.push(row[3]);
                    idx += 1;
                }
            }
        }
        let error_count = values.iter().filter(|v| v.is_nan()).count();
        let declared: usize = parse_num("errors")? as usize;
        if declared != error_count {
            return Err(SswError::InvalidConfig(format!(
                "CSV declares {declared} errors but contains {error_count} NaN values"
            )));
        }
        Ok(ScanGrid {
            quantity,
            j,
            b_aux,
            axes,
            values,
            error_count,
            quadrature,
        })
    }

    /// JSON document with explicit nulls for failed points.
    pub fn to_json(&self) -> String {
        let doc = ScanDocument {
            schema: 1,
            version: env!("CARGO_PKG_VERSION").to_string(),
            quantity: self.quantity,
            j: self.j,
            b: self.b_aux,
            axes: self.axes.clone(),
            values: self
                .values
                .iter()
                .map(|v| if v.is_nan() { None } else { Some(*v) })
                .collect(),
            error_count: self.error_count,
            quadrature: self.quadrature,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("scan document serializes");
        text.push('\n');
        text
    }

    /// Parse a document produced by [`ScanGrid::to_json`].
    pub fn from_json(text: &str) -> Result<ScanGrid> {
        let doc: ScanDocument = serde_json::from_str(text)
            .map_err(|e| SswError::InvalidConfig(format!("bad scan JSON: {e}")))?;
        if doc.schema != 1 {
            return Err(SswError::InvalidConfig(format!(
                "unsupported scan schema {}",
                doc.schema
            )));
        }
        let values: Vec<f64> = doc.values.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        if values.len() != doc.axes.len() {
            return Err(SswError::InvalidConfig(format!(
                "scan JSON has {} values but axes imply {}",
                values.len(),
                doc.axes.len()
            )));
        }
        let error_count = values.iter().filter(|v| v.is_nan()).count();
        if error_count != doc.error_count {
            return Err(SswError::InvalidConfig(format!(
                "scan JSON declares {} errors but contains {error_count} nulls",
                doc.error_count
            )));
        }
        Ok(ScanGrid {
            quantity: doc.quantity,
            j: doc.j,
            b_aux: doc.b,
            axes: doc.axes,
            values,
            error_count,
            quadrature: doc.quadrature,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ScanDocument {
    schema: u32,
    #[serde(default)]
    version: String,
    quantity: Quantity,
    j: f64,
    b: f64,
    axes: GridAxes,
    values: Vec<Option<f64>>,
    error_count: usize,
    quadrature: QuadratureConfig,
}
