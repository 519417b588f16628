//! Command-line front end: single-point evaluation, grid scans, detection
//! boundaries, and the finite-ring verification table.
//!
//! Every output is a pure function of the effective run configuration.
//! Flags may also be given in a TOML config file (`--config`), with
//! explicit flags taking precedence; serialized scans carry their
//! provenance metadata and contain no timestamps, so reruns are
//! byte-identical. `SSW_THREADS` caps the worker count for grid
//! parallelism. Exit codes: 0 success, 2 numerical failure, 3 invalid
//! configuration, 4 verification mismatch.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ssw::correlators::{concurrence, g_r, s_r};
use ssw::thermo::{
    energy_current_density, internal_energy_density, log_z_density, magnetization_density,
};
use ssw::verify::{default_axes, run_verify};
use ssw::witness::{w1, w_ss};
use ssw::{detection_boundary, scan, ChainParams, GridAxes, Quantity, QuadratureConfig, SswError};

#[derive(Parser)]
#[command(name = "ssw", version, about = "Steady-state XX chain: thermodynamics, witnesses, correlators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate bulk quantities at a single parameter point
    Point(PointArgs),
    /// Evaluate one quantity over a (B, T, gamma) grid
    Scan(ScanArgs),
    /// Extract level-set polylines of a quantity in the (B, T) plane
    Contour(ContourArgs),
    /// Cross-check exact diagonalization, finite free fermions, and quadrature
    Verify(VerifyArgs),
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct CoreOpts {
    /// TOML config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Exchange coupling J > 0 [default: 1]
    #[arg(long = "J")]
    j: Option<f64>,
    /// Zeeman scale b multiplying B in H0 [default: 1]
    #[arg(long)]
    b: Option<f64>,
    /// Quadrature tolerance [default: 1e-10]
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    core: CoreOpts,
    /// Transverse field B >= 0 [default: 0.5]
    #[arg(long = "B")]
    b_field: Option<f64>,
    /// Temperature T > 0 [default: 1]
    #[arg(long = "T")]
    temperature: Option<f64>,
    /// Driving strength gamma [default: 0]
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated quantities: lnZ,M,U,Q,W1,W_ss,G0,G1,G2,S1,S2,C_R1,C_R2 [default: all]
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<String>>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    core: CoreOpts,
    /// Quantity to scan: W1, W_ss, Q, M, C_R1, or C_R2
    #[arg(long)]
    q: Option<String>,
    /// Single B value (one-point axis)
    #[arg(long = "B")]
    b_field: Option<f64>,
    /// B axis as min:max:count
    #[arg(long = "B-range")]
    b_range: Option<String>,
    /// Single T value (one-point axis)
    #[arg(long = "T")]
    temperature: Option<f64>,
    /// T axis as min:max:count
    #[arg(long = "T-range")]
    t_range: Option<String>,
    /// Single gamma value (one-point axis)
    #[arg(long)]
    gamma: Option<f64>,
    /// Gamma axis as min:max:count
    #[arg(long = "gamma-range")]
    gamma_range: Option<String>,
    /// Output file [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long)]
    format: Option<OutputFormat>,
}

#[derive(Args)]
struct ContourArgs {
    #[command(flatten)]
    core: CoreOpts,
    /// Quantity whose level set to extract [default: WSS]
    #[arg(long)]
    q: Option<String>,
    /// Contour level [default: 1]
    #[arg(long)]
    level: Option<f64>,
    /// B axis as min:max:count
    #[arg(long = "B-range")]
    b_range: Option<String>,
    /// T axis as min:max:count
    #[arg(long = "T-range")]
    t_range: Option<String>,
    /// Fixed gamma for the slice [default: 0]
    #[arg(long)]
    gamma: Option<f64>,
    /// Output file [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long)]
    format: Option<OutputFormat>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    core: CoreOpts,
    /// Ring size for the finite-N oracles, at most 12 [default: 8]
    #[arg(long = "N")]
    n_sites: Option<usize>,
    /// B axis as min:max:count [default: 0, 0.5, 1, 1.5]
    #[arg(long = "B-range")]
    b_range: Option<String>,
    /// T axis as min:max:count [default: 0.2, 1, 5]
    #[arg(long = "T-range")]
    t_range: Option<String>,
    /// Gamma axis as min:max:count [default: 0, 1, 2]
    #[arg(long = "gamma-range")]
    gamma_range: Option<String>,
    /// Output file for the JSON table [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Csv,
    Json,
}

/// File counterpart of the flags. Keys are spelled exactly like the flags.
#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    #[serde(rename = "J")]
    j: Option<f64>,
    #[serde(rename = "B")]
    b_field: Option<f64>,
    #[serde(rename = "T")]
    temperature: Option<f64>,
    gamma: Option<f64>,
    b: Option<f64>,
    q: Option<String>,
    tol: Option<f64>,
    #[serde(rename = "B-range")]
    b_range: Option<String>,
    #[serde(rename = "T-range")]
    t_range: Option<String>,
    #[serde(rename = "gamma-range")]
    gamma_range: Option<String>,
    level: Option<f64>,
    #[serde(rename = "N")]
    n_sites: Option<usize>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, SswError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path)?;
    toml::from_str(&text)
        .map_err(|e| SswError::InvalidConfig(format!("config {}: {e}", path.display())))
}

fn quad_config(tol: Option<f64>) -> Result<QuadratureConfig, SswError> {
    let mut cfg = QuadratureConfig::default();
    if let Some(t) = tol {
        cfg.tolerance = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `min:max:count` to an inclusive linspace.
fn parse_range(name: &str, text: &str) -> Result<Vec<f64>, SswError> {
    let invalid = |why: &str| {
        SswError::InvalidConfig(format!("{name}-range {text:?}: {why} (expected min:max:count)"))
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(invalid("wrong number of fields"));
    }
    let min: f64 = parts[0].parse().map_err(|_| invalid("bad min"))?;
    let max: f64 = parts[1].parse().map_err(|_| invalid("bad max"))?;
    let count: usize = parts[2].parse().map_err(|_| invalid("bad count"))?;
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    if count == 1 {
        if min != max {
            return Err(invalid("a one-point range needs min == max"));
        }
        return Ok(vec![min]);
    }
    // partial_cmp so a NaN bound is rejected rather than sorted arbitrarily
    if max.partial_cmp(&min) != Some(std::cmp::Ordering::Greater) {
        return Err(invalid("max must exceed min"));
    }
    Ok((0..count)
        .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
        .collect())
}

/// CLI axis flags shadow both file axis keys: passing either `--X` or
/// `--X-range` discards the file's version of that axis entirely.
fn merge_axis(
    cli_range: Option<String>,
    cli_scalar: Option<f64>,
    file_range: Option<String>,
    file_scalar: Option<f64>,
) -> (Option<String>, Option<f64>) {
    if cli_range.is_some() || cli_scalar.is_some() {
        (cli_range, cli_scalar)
    } else {
        (file_range, file_scalar)
    }
}

fn resolve_axis(
    name: &str,
    range: Option<String>,
    scalar: Option<f64>,
) -> Result<Vec<f64>, SswError> {
    match (range, scalar) {
        (Some(_), Some(_)) => Err(SswError::InvalidConfig(format!(
            "pass either --{name} or --{name}-range, not both"
        ))),
        (Some(r), None) => parse_range(name, &r),
        (None, Some(v)) => Ok(vec![v]),
        (None, None) => Err(SswError::InvalidConfig(format!(
            "missing {name} axis: pass --{name} or --{name}-range"
        ))),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), SswError> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Everything `point` can print, in canonical output order. Each entry
/// evaluates through the same public library call a user would make.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PointQuantity {
    LnZ,
    M,
    U,
    Q,
    W1,
    Wss,
    G0,
    G1,
    G2,
    S1,
    S2,
    CR1,
    CR2,
}

const POINT_ORDER: [PointQuantity; 13] = [
    PointQuantity::LnZ,
    PointQuantity::M,
    PointQuantity::U,
    PointQuantity::Q,
    PointQuantity::W1,
    PointQuantity::Wss,
    PointQuantity::G0,
    PointQuantity::G1,
    PointQuantity::G2,
    PointQuantity::S1,
    PointQuantity::S2,
    PointQuantity::CR1,
    PointQuantity::CR2,
];

impl PointQuantity {
    fn token(self) -> &'static str {
        match self {
            PointQuantity::LnZ => "lnZ",
            PointQuantity::M => "M",
            PointQuantity::U => "U",
            PointQuantity::Q => "Q",
            PointQuantity::W1 => "W1",
            PointQuantity::Wss => "W_ss",
            PointQuantity::G0 => "G0",
            PointQuantity::G1 => "G1",
            PointQuantity::G2 => "G2",
            PointQuantity::S1 => "S1",
            PointQuantity::S2 => "S2",
            PointQuantity::CR1 => "C_R1",
            PointQuantity::CR2 => "C_R2",
        }
    }

    fn parse(token: &str) -> Result<Self, SswError> {
        let key: String = token
            .chars()
            .filter(|c| *c != '_')
            .map(|c| c.to_ascii_uppercase())
            .collect();
        let quantity = match key.as_str() {
            "LNZ" => PointQuantity::LnZ,
            "M" => PointQuantity::M,
            "U" => PointQuantity::U,
            "Q" => PointQuantity::Q,
            "W1" => PointQuantity::W1,
            "WSS" => PointQuantity::Wss,
            "G0" => PointQuantity::G0,
            "G1" => PointQuantity::G1,
            "G2" => PointQuantity::G2,
            "S1" => PointQuantity::S1,
            "S2" => PointQuantity::S2,
            "CR1" => PointQuantity::CR1,
            "CR2" => PointQuantity::CR2,
            _ => {
                return Err(SswError::InvalidConfig(format!(
                    "unknown point quantity {token:?}; expected one of \
                     lnZ, M, U, Q, W1, W_ss, G0, G1, G2, S1, S2, C_R1, C_R2"
                )))
            }
        };
        Ok(quantity)
    }

    fn evaluate(self, params: &ChainParams, cfg: &QuadratureConfig) -> Result<f64, SswError> {
        match self {
            PointQuantity::LnZ => log_z_density(params, cfg),
            PointQuantity::M => magnetization_density(params, cfg),
            PointQuantity::U => internal_energy_density(params, cfg),
            PointQuantity::Q => energy_current_density(params, cfg),
            PointQuantity::W1 => w1(params, cfg),
            PointQuantity::Wss => w_ss(params, cfg),
            PointQuantity::G0 => g_r(params, 0, cfg),
            PointQuantity::G1 => g_r(params, 1, cfg),
            PointQuantity::G2 => g_r(params, 2, cfg),
            PointQuantity::S1 => s_r(params, 1, cfg),
            PointQuantity::S2 => s_r(params, 2, cfg),
            PointQuantity::CR1 => concurrence(params, 1, cfg),
            PointQuantity::CR2 => concurrence(params, 2, cfg),
        }
    }
}

fn cmd_point(args: PointArgs) -> Result<ExitCode, SswError> {
    let file = load_config(args.core.config.as_deref())?;
    let j = args.core.j.or(file.j).unwrap_or(1.0);
    let b_aux = args.core.b.or(file.b).unwrap_or(1.0);
    let b_field = args.b_field.or(file.b_field).unwrap_or(0.5);
    let temperature = args.temperature.or(file.temperature).unwrap_or(1.0);
    let gamma = args.gamma.or(file.gamma).unwrap_or(0.0);
    let cfg = quad_config(args.core.tol.or(file.tol))?;
    let params = ChainParams::with_b_aux(j, b_field, temperature, gamma, b_aux)?;

    let tokens: Option<Vec<String>> = args.q.or_else(|| {
        file.q
            .map(|s| s.split(',').map(|t| t.trim().to_string()).collect())
    });
    let selected: Vec<PointQuantity> = match tokens {
        Some(list) => {
            let mut requested = Vec::new();
            for token in &list {
                requested.push(PointQuantity::parse(token)?);
            }
            POINT_ORDER
                .into_iter()
                .filter(|q| requested.contains(q))
                .collect()
        }
        None => POINT_ORDER.to_vec(),
    };

    let mut text = format!("# quadrature tolerance = {:e}\n", cfg.tolerance);
    for quantity in selected {
        let value = quantity.evaluate(&params, &cfg).inspect_err(|_| {
            eprintln!("point: failed computing {}", quantity.token());
        })?;
        text.push_str(&format!("{} = {}\n", quantity.token(), value));
    }
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn parse_scan_quantity(token: Option<String>) -> Result<Quantity, SswError> {
    let Some(token) = token else {
        return Err(SswError::InvalidConfig(
            "missing quantity: pass --q (one of W1, W_ss, Q, M, C_R1, C_R2)".into(),
        ));
    };
    if token.contains(',') {
        return Err(SswError::InvalidConfig(format!(
            "scan takes a single quantity per run, got {token:?}"
        )));
    }
    token.parse()
}

fn cmd_scan(args: ScanArgs) -> Result<ExitCode, SswError> {
    let file = load_config(args.core.config.as_deref())?;
    let quantity = parse_scan_quantity(args.q.or(file.q))?;
    let j = args.core.j.or(file.j).unwrap_or(1.0);
    let b_aux = args.core.b.or(file.b).unwrap_or(1.0);
    let cfg = quad_config(args.core.tol.or(file.tol))?;

    let (b_range, b_scalar) = merge_axis(args.b_range, args.b_field, file.b_range, file.b_field);
    let (t_range, t_scalar) =
        merge_axis(args.t_range, args.temperature, file.t_range, file.temperature);
    let (g_range, g_scalar) =
        merge_axis(args.gamma_range, args.gamma, file.gamma_range, file.gamma);
    let axes = GridAxes {
        b: resolve_axis("B", b_range, b_scalar)?,
        t: resolve_axis("T", t_range, t_scalar)?,
        gamma: resolve_axis("gamma", g_range, g_scalar)?,
    };

    let grid = scan(quantity, j, b_aux, axes, &cfg)?;
    let format = args.format.or(file.format).unwrap_or(OutputFormat::Csv);
    let text = match format {
        OutputFormat::Csv => grid.to_csv(),
        OutputFormat::Json => grid.to_json(),
    };
    emit(args.out.or(file.out).as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ContourDocument {
    schema: u32,
    version: String,
    quantity: Quantity,
    j: f64,
    b: f64,
    gamma: f64,
    level: f64,
    /// Each polyline is a list of (B, T) vertices.
    polylines: Vec<Vec<[f64; 2]>>,
}

fn cmd_contour(args: ContourArgs) -> Result<ExitCode, SswError> {
    let file = load_config(args.core.config.as_deref())?;
    let quantity = parse_scan_quantity(Some(
        args.q.or(file.q).unwrap_or_else(|| "WSS".to_string()),
    ))?;
    let j = args.core.j.or(file.j).unwrap_or(1.0);
    let b_aux = args.core.b.or(file.b).unwrap_or(1.0);
    let gamma = args.gamma.or(file.gamma).unwrap_or(0.0);
    let level = args.level.or(file.level).unwrap_or(1.0);
    let cfg = quad_config(args.core.tol.or(file.tol))?;

    let b_axis = resolve_axis("B", args.b_range.or(file.b_range), None)?;
    let t_axis = resolve_axis("T", args.t_range.or(file.t_range), None)?;
    let axes = GridAxes {
        b: b_axis,
        t: t_axis,
        gamma: vec![gamma],
    };

    let grid = scan(quantity, j, b_aux, axes, &cfg)?;
    let polylines = detection_boundary(&grid, level)?;

    let format = args.format.or(file.format).unwrap_or(OutputFormat::Csv);
    let text = match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str("# schema = 1\n");
            out.push_str(&format!("# version = {}\n", env!("CARGO_PKG_VERSION")));
            out.push_str(&format!("# quantity = {quantity}\n"));
            out.push_str(&format!("# J = {j}\n"));
            out.push_str(&format!("# b = {b_aux}\n"));
            out.push_str(&format!("# gamma = {gamma}\n"));
            out.push_str(&format!("# level = {level}\n"));
            out.push_str("polyline,B,T\n");
            for (k, line) in polylines.iter().enumerate() {
                for &(b, t) in line {
                    out.push_str(&format!("{k},{b},{t}\n"));
                }
            }
            out
        }
        OutputFormat::Json => {
            let doc = ContourDocument {
                schema: 1,
                version: env!("CARGO_PKG_VERSION").to_string(),
                quantity,
                j,
                b: b_aux,
                gamma,
                level,
                polylines: polylines
                    .iter()
                    .map(|line| line.iter().map(|&(b, t)| [b, t]).collect())
                    .collect(),
            };
            let mut text =
                serde_json::to_string_pretty(&doc).expect("contour document serializes");
            text.push('\n');
            text
        }
    };
    emit(args.out.or(file.out).as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, SswError> {
    let file = load_config(args.core.config.as_deref())?;
    let n_sites = args.n_sites.or(file.n_sites).unwrap_or(8);
    let j = args.core.j.or(file.j).unwrap_or(1.0);
    let b_aux = args.core.b.or(file.b).unwrap_or(1.0);
    let cfg = quad_config(args.core.tol.or(file.tol))?;

    let defaults = default_axes();
    let axis_or = |range: Option<String>, fallback: Vec<f64>| -> Result<Vec<f64>, SswError> {
        match range {
            Some(r) => parse_range("axis", &r),
            None => Ok(fallback),
        }
    };
    let axes = GridAxes {
        b: axis_or(args.b_range.or(file.b_range), defaults.b)?,
        t: axis_or(args.t_range.or(file.t_range), defaults.t)?,
        gamma: axis_or(args.gamma_range.or(file.gamma_range), defaults.gamma)?,
    };

    let report = run_verify(n_sites, j, b_aux, &axes, &cfg)?;
    emit(args.out.or(file.out).as_deref(), &report.to_json())?;
    if report.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("verification failure: {}", report.worst_description());
        Ok(ExitCode::from(4))
    }
}

fn exit_code_for(err: &SswError) -> u8 {
    match err {
        SswError::NonConvergence { .. }
        | SswError::PrecisionLoss(_)
        | SswError::EigensolverFailure(_)
        | SswError::DimensionMismatch(_)
        | SswError::InvalidDensityMatrix(_)
        | SswError::NegativeVy(_) => 2,
        SswError::InvalidParams(_)
        | SswError::InvalidQuadrature(_)
        | SswError::InvalidAxes(_)
        | SswError::EmptyGrid
        | SswError::UnsupportedSeparation(_)
        | SswError::SizeLimit(_)
        | SswError::InvalidConfig(_) => 3,
        SswError::Io(_) => 1,
    }
}

fn configure_threads() -> Result<(), SswError> {
    match env::var("SSW_THREADS") {
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| {
                SswError::InvalidConfig(format!("SSW_THREADS = {raw:?} is not a positive integer"))
            })?;
            if n == 0 {
                return Err(SswError::InvalidConfig(
                    "SSW_THREADS must be at least 1".into(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| SswError::InvalidConfig(format!("thread pool setup failed: {e}")))
        }
        Err(env::VarError::NotPresent) => Ok(()),
        Err(env::VarError::NotUnicode(_)) => Err(SswError::InvalidConfig(
            "SSW_THREADS is not valid unicode".into(),
        )),
    }
}

fn run(cli: Cli) -> Result<ExitCode, SswError> {
    configure_threads()?;
    match cli.command {
        Command::Point(args) => cmd_point(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Contour(args) => cmd_contour(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn main() -> ExitCode {
    // Usage errors exit 3 so that 2 stays reserved for numerical failures;
    // --help and --version are not errors.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 3 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
