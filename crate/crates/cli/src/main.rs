//! Command-line driver for the matrix time-frequency toolkit.
//!
//! Every subcommand reads plain JSON, computes with [`qwigner_core`], and
//! writes either JSON to stdout (query commands) or artifact files plus a
//! `manifest.json` with SHA-256 digests (artifact commands).  Exit codes:
//! `0` on success, `1` for invalid input or usage, `2` for numerical or
//! environment failures.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qwigner_core::blockmat::{self, BlockMatrix2d};
use qwigner_core::detect::{self, GridCrossCheck};
use qwigner_core::wexact::{self, RightHandSide};
use qwigner_core::wgrid::{self, Axis, SignalSpec};
use qwigner_core::{AtomicMeasure, CoreError, GaussHermite1d, QuasicrystalSpec, TestFunctionNd};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

const DEFAULT_SIGNAL_MARGIN: f64 = 6.0;
const DEFAULT_OUT_HALF: f64 = 2.0;
const DEFAULT_OUT_STEP: f64 = 1.0 / 64.0;
const DEFAULT_DUALITY_HALF: f64 = 1.0;
const DEFAULT_DUALITY_STEP: f64 = 0.25;
const DEFAULT_DUALITY_TOL: f64 = 1e-3;
const DEFAULT_THRESHOLD: f64 = 0.05;
const DEFAULT_MMAX: usize = 500;
const DEFAULT_WIDTH: f64 = 1.0;

#[derive(Parser)]
#[command(
    name = "qwigner",
    version,
    about = "Matrix time-frequency transforms of atomic measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand W_T(μ, ν) exactly into chirp-weighted point atoms.
    ComputeExact(ComputeExactArgs),
    /// Sample a signal and evaluate the grid transform over a position-frequency box.
    ComputeGrid(ComputeGridArgs),
    /// Classify a block matrix: routing, determinant diagnostics, Cohen form, dual.
    Check(MatrixArgs),
    /// Print the dual matrix and verify that dualizing twice returns the input.
    Dual(MatrixArgs),
    /// Test whether the matrix has Cohen form and recover its parameter block.
    Cohen(MatrixArgs),
    /// Report determinant equivalences between the matrix blocks and the inverse blocks.
    Schur(MatrixArgs),
    /// Expand a quasicrystal description into an explicit atomic measure.
    GenerateQc(GenerateQcArgs),
    /// Scan fractional parts of m·slope + shift for shrinking gaps.
    Counterexample(CounterexampleArgs),
    /// Pair the transform of a measure against separable Gaussian test functions.
    Pair(PairArgs),
    /// Compare the grid transform against its dual-side evaluation.
    DualityCheck(DualityArgs),
    /// Run support-structure detection on a measure and print the report.
    Detect(DetectArgs),
    /// Execute a subcommand described by a JSON scenario file.
    Run(RunArgs),
}

#[derive(Args)]
struct MatrixArgs {
    /// Block matrix: JSON path, or `classical:<d>` / `ambiguity:<d>`.
    #[arg(long)]
    matrix: String,
}

#[derive(Args)]
struct ComputeExactArgs {
    /// Block matrix: JSON path, or `classical:<d>` / `ambiguity:<d>`.
    #[arg(long)]
    matrix: String,
    /// Atomic measure JSON path.
    #[arg(long)]
    measure: PathBuf,
    /// Optional second measure for the sesquilinear form (defaults to the first).
    #[arg(long)]
    measure2: Option<PathBuf>,
    /// Output directory for `chirp_sum.json` and `manifest.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ComputeGridArgs {
    /// Block matrix: JSON path, or `classical:<d>` / `ambiguity:<d>`.
    #[arg(long)]
    matrix: String,
    /// Signal description JSON path.
    #[arg(long)]
    signal: PathBuf,
    /// Signal sampling step (default: width / 8).
    #[arg(long)]
    signal_step: Option<f64>,
    /// Signal box margin in multiples of the signal width.
    #[arg(long, default_value_t = DEFAULT_SIGNAL_MARGIN)]
    signal_margin: f64,
    /// Half-range of each output position axis.
    #[arg(long, default_value_t = DEFAULT_OUT_HALF)]
    x_half: f64,
    /// Step of each output position axis.
    #[arg(long, default_value_t = DEFAULT_OUT_STEP)]
    x_step: f64,
    /// Half-range of each output frequency axis.
    #[arg(long, default_value_t = DEFAULT_OUT_HALF)]
    omega_half: f64,
    /// Step of each output frequency axis.
    #[arg(long, default_value_t = DEFAULT_OUT_STEP)]
    omega_step: f64,
    /// Output directory for `wigner.bin`, `wigner.json`, and `manifest.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateQcArgs {
    /// Quasicrystal description JSON path.
    #[arg(long)]
    spec: PathBuf,
    /// Output directory for `measure.json` and `manifest.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// Slope of the scanned sequence m·slope + shift.
    #[arg(long, allow_hyphen_values = true)]
    slope: f64,
    /// Shift of the scanned sequence.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    shift: f64,
    /// Largest m to scan.
    #[arg(long, default_value_t = DEFAULT_MMAX)]
    mmax: usize,
}

#[derive(Args)]
struct PairArgs {
    /// Atomic measure JSON path.
    #[arg(long)]
    measure: PathBuf,
    /// Width of the Gaussian position factor.
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    width1: f64,
    /// Width of the Gaussian frequency factor.
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    width2: f64,
    /// Optional matrix: also verify the pairing against the transform-side evaluation.
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Args)]
struct DualityArgs {
    /// Block matrix: JSON path, or `classical:<d>` / `ambiguity:<d>`.
    #[arg(long)]
    matrix: String,
    /// Signal description JSON path.
    #[arg(long)]
    signal: PathBuf,
    /// Signal sampling step (default: width / 32).
    #[arg(long)]
    signal_step: Option<f64>,
    /// Signal box margin in multiples of the signal width.
    #[arg(long, default_value_t = DEFAULT_SIGNAL_MARGIN)]
    signal_margin: f64,
    /// Half-range of each output position axis.
    #[arg(long, default_value_t = DEFAULT_DUALITY_HALF)]
    x_half: f64,
    /// Step of each output position axis.
    #[arg(long, default_value_t = DEFAULT_DUALITY_STEP)]
    x_step: f64,
    /// Half-range of each output frequency axis.
    #[arg(long, default_value_t = DEFAULT_DUALITY_HALF)]
    omega_half: f64,
    /// Step of each output frequency axis.
    #[arg(long, default_value_t = DEFAULT_DUALITY_STEP)]
    omega_step: f64,
    /// Half-range for sampling the Fourier transform (default: 6 / width).
    #[arg(long)]
    fhat_half: Option<f64>,
    /// Step for sampling the Fourier transform (default: fhat_half / 512).
    #[arg(long)]
    fhat_step: Option<f64>,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = DEFAULT_DUALITY_TOL)]
    tol: f64,
}

#[derive(Args)]
struct DetectArgs {
    /// Block matrix: JSON path, or `classical:<d>` / `ambiguity:<d>`.
    #[arg(long)]
    matrix: String,
    /// Atomic measure JSON path.
    #[arg(long)]
    measure: PathBuf,
    /// Cross-check the exact support against a mollified grid run.
    #[arg(long)]
    grid: bool,
    /// Relative peak threshold for the grid cross-check.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Optional output directory for `report.json` and `manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON path (field `command` plus the subcommand's parameters).
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario matrix.
    #[arg(long)]
    matrix: Option<String>,
    /// Override the scenario measure path.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Override the scenario signal path.
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Override the scenario output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the scenario grid cross-check flag.
    #[arg(long)]
    grid: Option<bool>,
    /// Override the scenario peak threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// Override the scenario scan length.
    #[arg(long)]
    mmax: Option<usize>,
    /// Override the scenario tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

/// A full subcommand invocation stored as data, used by `run --config`.
#[derive(Deserialize)]
struct Scenario {
    command: String,
    matrix: Option<String>,
    measure: Option<PathBuf>,
    measure2: Option<PathBuf>,
    signal: Option<PathBuf>,
    spec: Option<PathBuf>,
    out: Option<PathBuf>,
    signal_step: Option<f64>,
    signal_margin: Option<f64>,
    x_half: Option<f64>,
    x_step: Option<f64>,
    omega_half: Option<f64>,
    omega_step: Option<f64>,
    fhat_half: Option<f64>,
    fhat_step: Option<f64>,
    slope: Option<f64>,
    shift: Option<f64>,
    mmax: Option<usize>,
    width1: Option<f64>,
    width2: Option<f64>,
    grid: Option<bool>,
    threshold: Option<f64>,
    tol: Option<f64>,
}

fn main() {
    let code = match Cli::try_parse() {
        Ok(cli) => match dispatch(cli.command) {
            Ok(()) => 0,
            Err(err) => {
                eprintln!("error: {}", render_error(&err));
                classify(&err)
            }
        },
        Err(err) => {
            let _ = err.print();
            use clap::error::ErrorKind;
            match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            }
        }
    };
    std::process::exit(code);
}

/// Render the outermost context plus the root cause, skipping duplicate text.
fn render_error(err: &anyhow::Error) -> String {
    let mut text = err.to_string();
    if let Some(root) = err.chain().last() {
        let root = root.to_string();
        if !text.contains(&root) {
            text.push_str(&format!(": {root}"));
        }
    }
    text
}

/// Map an error to the exit code: invalid input 1, numerical/environment 2.
fn classify(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<CoreError>() {
        Some(core) if core.is_validation() => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::ComputeExact(args) => cmd_compute_exact(&args),
        Command::ComputeGrid(args) => cmd_compute_grid(&args),
        Command::Check(args) => cmd_check(&args),
        Command::Dual(args) => cmd_dual(&args),
        Command::Cohen(args) => cmd_cohen(&args),
        Command::Schur(args) => cmd_schur(&args),
        Command::GenerateQc(args) => cmd_generate_qc(&args),
        Command::Counterexample(args) => cmd_counterexample(&args),
        Command::Pair(args) => cmd_pair(&args),
        Command::DualityCheck(args) => cmd_duality_check(&args),
        Command::Detect(args) => cmd_detect(&args),
        Command::Run(args) => cmd_run(args),
    }
}

// ---------------------------------------------------------------------------
// Input loading
// ---------------------------------------------------------------------------

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path)
        .map_err(CoreError::from)
        .with_context(|| format!("reading {}", path.display()))?;
    let value = serde_json::from_str(&text)
        .map_err(CoreError::from)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(value)
}

/// Parse `--matrix`: a JSON path, or the shortcuts `classical:<d>` / `ambiguity:<d>`.
/// Returns the matrix and, when it came from a file, the path for the manifest.
fn load_matrix(arg: &str) -> anyhow::Result<(BlockMatrix2d, Option<PathBuf>)> {
    for (prefix, build) in [
        (
            "classical:",
            BlockMatrix2d::classical_wigner as fn(usize) -> BlockMatrix2d,
        ),
        (
            "ambiguity:",
            BlockMatrix2d::ambiguity as fn(usize) -> BlockMatrix2d,
        ),
    ] {
        if let Some(rest) = arg.strip_prefix(prefix) {
            let d: usize = rest.parse().map_err(|_| {
                CoreError::InvalidParam(format!("matrix shortcut needs a dimension: `{arg}`"))
            })?;
            if d == 0 {
                return Err(
                    CoreError::InvalidParam("matrix dimension must be positive".into()).into(),
                );
            }
            return Ok((build(d), None));
        }
    }
    let path = PathBuf::from(arg);
    let t: BlockMatrix2d = read_json(&path)?;
    Ok((t, Some(path)))
}

fn gaussian_test_function(d: usize, width: f64) -> anyhow::Result<TestFunctionNd> {
    let factors = (0..d)
        .map(|_| GaussHermite1d::gaussian(0.0, width))
        .collect::<qwigner_core::Result<Vec<_>>>()?;
    Ok(TestFunctionNd::new(factors)?)
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    parameters: serde_json::Value,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    wall_time_ms: u128,
}

fn sha256_hex(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path)
        .map_err(CoreError::from)
        .with_context(|| format!("hashing {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn digest_list(paths: &[&Path]) -> anyhow::Result<Vec<FileDigest>> {
    paths
        .iter()
        .map(|p| {
            Ok(FileDigest {
                path: p.display().to_string(),
                sha256: sha256_hex(p)?,
            })
        })
        .collect()
}

fn write_pretty_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(CoreError::from)?;
    text.push('\n');
    fs::write(path, text)
        .map_err(CoreError::from)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Write `manifest.json` into `dir`, hashing all inputs and outputs.  The wall
/// time lives only here so the numeric artifacts stay bit-reproducible.
fn write_manifest(
    dir: &Path,
    command: &'static str,
    parameters: serde_json::Value,
    inputs: &[&Path],
    outputs: &[&Path],
    started: Instant,
) -> anyhow::Result<()> {
    let manifest = Manifest {
        tool: "qwigner",
        version: env!("CARGO_PKG_VERSION"),
        command,
        parameters,
        inputs: digest_list(inputs)?,
        outputs: digest_list(outputs)?,
        wall_time_ms: started.elapsed().as_millis(),
    };
    write_pretty_json(&dir.join("manifest.json"), &manifest)
}

fn ensure_out_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir)
        .map_err(CoreError::from)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(())
}

/// Write a line to stdout, exiting quietly when the reader has gone away
/// (e.g. the output is piped into `head`).
fn emit(text: &str) -> anyhow::Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(CoreError::from(e).into()),
    }
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    emit(&serde_json::to_string_pretty(value).map_err(CoreError::from)?)
}

// ---------------------------------------------------------------------------
// Artifact commands
// ---------------------------------------------------------------------------

fn cmd_compute_exact(args: &ComputeExactArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let (t, matrix_path) = load_matrix(&args.matrix)?;
    let mu: AtomicMeasure = read_json(&args.measure)?;
    let w = match &args.measure2 {
        Some(path) => {
            let nu: AtomicMeasure = read_json(path)?;
            wexact::wigner_t_exact_pair(&t, &mu, &nu)?
        }
        None => wexact::wigner_t_exact(&t, &mu)?,
    };

    ensure_out_dir(&args.out)?;
    let sum_path = args.out.join("chirp_sum.json");
    write_pretty_json(&sum_path, &w)?;

    let mut inputs: Vec<&Path> = Vec::new();
    if let Some(p) = &matrix_path {
        inputs.push(p);
    }
    inputs.push(&args.measure);
    if let Some(p) = &args.measure2 {
        inputs.push(p);
    }
    let params = json!({
        "matrix": args.matrix,
        "measure": args.measure,
        "measure2": args.measure2,
    });
    write_manifest(
        &args.out,
        "compute-exact",
        params,
        &inputs,
        &[&sum_path],
        started,
    )?;

    let chirps: usize = w.atoms().iter().map(|a| a.chirps.len()).sum();
    let total = w.total_weight();
    emit(&format!(
        "exact expansion in dimension {}: |det T| = {}",
        w.dim(),
        w.abs_det()
    ))?;
    emit(&format!(
        "{} position atoms carrying {} chirps",
        w.atoms().len(),
        chirps
    ))?;
    emit(&format!("total weight {} + {}i", total.re, total.im))?;
    emit(&format!("wrote {}", sum_path.display()))?;
    Ok(())
}

fn cmd_compute_grid(args: &ComputeGridArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let (t, matrix_path) = load_matrix(&args.matrix)?;
    let spec: SignalSpec = read_json(&args.signal)?;
    let d = t.dim();

    let step = args.signal_step.unwrap_or(spec.width() / 8.0);
    let signal_axes = spec.default_axes(step, args.signal_margin)?;
    let f = spec.sample(&signal_axes)?;

    let mut out_axes = Vec::with_capacity(2 * d);
    for _ in 0..d {
        out_axes.push(Axis::symmetric(args.x_half, args.x_step)?);
    }
    for _ in 0..d {
        out_axes.push(Axis::symmetric(args.omega_half, args.omega_step)?);
    }
    let wig = wgrid::wigner_t_grid(&t, &f, &out_axes)?;

    ensure_out_dir(&args.out)?;
    let base = args.out.join("wigner");
    wig.save(&base)?;
    let bin_path = args.out.join("wigner.bin");
    let json_path = args.out.join("wigner.json");

    let mut inputs: Vec<&Path> = Vec::new();
    if let Some(p) = &matrix_path {
        inputs.push(p);
    }
    inputs.push(&args.signal);
    let params = json!({
        "matrix": args.matrix,
        "signal": args.signal,
        "signal_step": step,
        "signal_margin": args.signal_margin,
        "x_half": args.x_half,
        "x_step": args.x_step,
        "omega_half": args.omega_half,
        "omega_step": args.omega_step,
    });
    write_manifest(
        &args.out,
        "compute-grid",
        params,
        &inputs,
        &[&bin_path, &json_path],
        started,
    )?;

    let shape: Vec<String> = wig.shape().iter().map(|n| n.to_string()).collect();
    emit(&format!("grid transform on a {} grid", shape.join("×")))?;
    emit(&format!(
        "max |W| = {:.6e}, max |Im W| = {:.3e}",
        wig.max_abs(),
        wig.max_imag_abs()
    ))?;
    emit(&format!(
        "wrote {} and {}",
        bin_path.display(),
        json_path.display()
    ))?;
    Ok(())
}

fn cmd_generate_qc(args: &GenerateQcArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let spec: QuasicrystalSpec = read_json(&args.spec)?;
    let mu = spec.generate()?;

    ensure_out_dir(&args.out)?;
    let measure_path = args.out.join("measure.json");
    write_pretty_json(&measure_path, &mu)?;
    let params = json!({ "spec": args.spec });
    write_manifest(
        &args.out,
        "generate-qc",
        params,
        &[&args.spec],
        &[&measure_path],
        started,
    )?;

    emit(&format!(
        "generated {} atoms in dimension {}",
        mu.len(),
        mu.dim()
    ))?;
    emit(&format!("wrote {}", measure_path.display()))?;
    Ok(())
}

fn cmd_detect(args: &DetectArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let (t, matrix_path) = load_matrix(&args.matrix)?;
    let mu: AtomicMeasure = read_json(&args.measure)?;
    let grid = args.grid.then(|| GridCrossCheck {
        rel_threshold: args.threshold,
        ..GridCrossCheck::default()
    });
    let report = detect::end_to_end_detect(&t, &mu, grid.as_ref())?;

    if let Some(dir) = &args.out {
        ensure_out_dir(dir)?;
        let report_path = dir.join("report.json");
        write_pretty_json(&report_path, &report)?;
        let mut inputs: Vec<&Path> = Vec::new();
        if let Some(p) = &matrix_path {
            inputs.push(p);
        }
        inputs.push(&args.measure);
        let params = json!({
            "matrix": args.matrix,
            "measure": args.measure,
            "grid": args.grid,
            "threshold": args.threshold,
        });
        write_manifest(dir, "detect", params, &inputs, &[&report_path], started)?;
    }

    emit(&format!("{report}"))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Query commands (pure JSON on stdout)
// ---------------------------------------------------------------------------

fn cmd_check(args: &MatrixArgs) -> anyhow::Result<()> {
    let (t, _) = load_matrix(&args.matrix)?;
    let (which, reason) = detect::route(&t);
    let diff_verdict = blockmat::det_verdict(&(t.b0() - t.d0()));
    let inverse_top_sum = t
        .invert_blocks()
        .ok()
        .map(|inv| blockmat::det_verdict(&(inv.a + inv.b)));
    let cohen = t.cohen_form().map(|e| blockmat::mat_to_rows(&e));
    let dual = t.dual_matrix()?;

    print_json(&json!({
        "d": t.dim(),
        "det": t.det_verdict(),
        "route": which,
        "route_reason": reason,
        "right_block_difference_det": diff_verdict,
        "inverse_top_sum_det": inverse_top_sum,
        "cohen_parameter": cohen,
        "dual": dual,
    }))
}

fn cmd_dual(args: &MatrixArgs) -> anyhow::Result<()> {
    let (t, _) = load_matrix(&args.matrix)?;
    let dual = t.dual_matrix()?;
    let back = dual.dual_matrix()?;
    let involution_verified = blockmat::mats_close(t.a0(), back.a0())
        && blockmat::mats_close(t.b0(), back.b0())
        && blockmat::mats_close(t.c0(), back.c0())
        && blockmat::mats_close(t.d0(), back.d0());
    print_json(&json!({
        "dual": dual,
        "involution_verified": involution_verified,
    }))
}

fn cmd_cohen(args: &MatrixArgs) -> anyhow::Result<()> {
    let (t, _) = load_matrix(&args.matrix)?;
    let parameter = t.cohen_form().map(|e| blockmat::mat_to_rows(&e));
    print_json(&json!({
        "is_cohen_form": parameter.is_some(),
        "parameter": parameter,
    }))
}

fn cmd_schur(args: &MatrixArgs) -> anyhow::Result<()> {
    let (t, _) = load_matrix(&args.matrix)?;
    let report = blockmat::schur_report(&t)?;
    print_json(&report)
}

fn cmd_counterexample(args: &CounterexampleArgs) -> anyhow::Result<()> {
    let scan = detect::counterexample_scan(args.slope, args.shift, args.mmax)?;
    print_json(&scan)
}

fn cmd_pair(args: &PairArgs) -> anyhow::Result<()> {
    let mu: AtomicMeasure = read_json(&args.measure)?;
    let d = mu.dim();
    let phi1 = gaussian_test_function(d, args.width1)?;
    let phi2 = gaussian_test_function(d, args.width2)?;
    let value = wexact::pair_wigner_formula(&mu, &phi1, &phi2)?;

    let relation = match &args.matrix {
        Some(arg) => {
            let (t, _) = load_matrix(arg)?;
            Some(wexact::relation_w_wt(
                &t,
                &mu,
                &phi1,
                &phi2,
                RightHandSide::ClosedForm,
            )?)
        }
        None => None,
    };
    print_json(&json!({
        "pairing": { "re": value.re, "im": value.im },
        "relation": relation,
    }))
}

fn cmd_duality_check(args: &DualityArgs) -> anyhow::Result<()> {
    let (t, _) = load_matrix(&args.matrix)?;
    let spec: SignalSpec = read_json(&args.signal)?;
    let d = t.dim();

    let step = args.signal_step.unwrap_or(spec.width() / 32.0);
    let signal_axes = spec.default_axes(step, args.signal_margin)?;
    let f = spec.sample(&signal_axes)?;

    let fhat_half = args
        .fhat_half
        .unwrap_or(DEFAULT_SIGNAL_MARGIN / spec.width());
    let fhat_step = args.fhat_step.unwrap_or(fhat_half / 1024.0);
    let fhat_axes: Vec<Axis> = (0..d)
        .map(|_| Axis::symmetric(fhat_half, fhat_step))
        .collect::<qwigner_core::Result<_>>()?;

    let mut out_axes = Vec::with_capacity(2 * d);
    for _ in 0..d {
        out_axes.push(Axis::symmetric(args.x_half, args.x_step)?);
    }
    for _ in 0..d {
        out_axes.push(Axis::symmetric(args.omega_half, args.omega_step)?);
    }

    let check = wgrid::check_duality(&t, &f, &fhat_axes, &out_axes)?;
    let pass = check.rel_error <= args.tol;
    print_json(&json!({
        "check": check,
        "tol": args.tol,
        "pass": pass,
    }))?;
    if !pass {
        return Err(CoreError::PropertyViolation(format!(
            "duality relative error {:.6e} exceeds tolerance {:.6e}",
            check.rel_error, args.tol
        ))
        .into());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scenario execution
// ---------------------------------------------------------------------------

fn scenario_field<T: Clone>(value: &Option<T>, command: &str, name: &str) -> anyhow::Result<T> {
    value.clone().ok_or_else(|| {
        CoreError::InvalidParam(format!("scenario `{command}` needs field `{name}`")).into()
    })
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let mut sc: Scenario = read_json(&args.config)?;
    if args.matrix.is_some() {
        sc.matrix = args.matrix;
    }
    if args.measure.is_some() {
        sc.measure = args.measure;
    }
    if args.signal.is_some() {
        sc.signal = args.signal;
    }
    if args.out.is_some() {
        sc.out = args.out;
    }
    if args.grid.is_some() {
        sc.grid = args.grid;
    }
    if args.threshold.is_some() {
        sc.threshold = args.threshold;
    }
    if args.mmax.is_some() {
        sc.mmax = args.mmax;
    }
    if args.tol.is_some() {
        sc.tol = args.tol;
    }

    let command = sc.command.clone();
    let cmd = command.as_str();
    match cmd {
        "compute-exact" => cmd_compute_exact(&ComputeExactArgs {
            matrix: scenario_field(&sc.matrix, cmd, "matrix")?,
            measure: scenario_field(&sc.measure, cmd, "measure")?,
            measure2: sc.measure2,
            out: scenario_field(&sc.out, cmd, "out")?,
        }),
        "compute-grid" => cmd_compute_grid(&ComputeGridArgs {
            matrix: scenario_field(&sc.matrix, cmd, "matrix")?,
            signal: scenario_field(&sc.signal, cmd, "signal")?,
            signal_step: sc.signal_step,
            signal_margin: sc.signal_margin.unwrap_or(DEFAULT_SIGNAL_MARGIN),
            x_half: sc.x_half.unwrap_or(DEFAULT_OUT_HALF),
            x_step: sc.x_step.unwrap_or(DEFAULT_OUT_STEP),
            omega_half: sc.omega_half.unwrap_or(DEFAULT_OUT_HALF),
            omega_step: sc.omega_step.unwrap_or(DEFAULT_OUT_STEP),
            out: scenario_field(&sc.out, cmd, "out")?,
        }),
        "check" => cmd_check(&MatrixArgs {
            matrix: scenario_field(&sc.matrix, cmd, "matrix")?,
        }),
        "dual" => cmd_dual(&MatrixArgs {
            matrix: scenario_field(&sc.matrix, cmd, "matrix")?,
        }),
        "cohen" => cmd_cohen(&MatrixArgs {
            matrix: scenario_field(&sc.matrix, cmd, "matrix")?,
        }),
        "schur" => cmd_schur(&MatrixArgs {
            matrix: scenario_field(&sc.matrix, cmd, "matrix")?,
        }),
        "generate-qc" => cmd_generate_qc(&GenerateQcArgs {
            spec: scenario_field(&sc.spec, cmd, "spec")?,
            out: scenario_field(&sc.out, cmd, "out")?,
        }),
        "counterexample" => cmd_counterexample(&CounterexampleArgs {
            slope: scenario_field(&sc.slope, cmd, "slope")?,
            shift: sc.shift.unwrap_or(0.0),
            mmax: sc.mmax.unwrap_or(DEFAULT_MMAX),
        }),
        "pair" => cmd_pair(&PairArgs {
            measure: scenario_field(&sc.measure, cmd, "measure")?,
            width1: sc.width1.unwrap_or(DEFAULT_WIDTH),
            width2: sc.width2.unwrap_or(DEFAULT_WIDTH),
            matrix: sc.matrix,
        }),
        "duality-check" => cmd_duality_check(&DualityArgs {
            matrix: scenario_field(&sc.matrix, cmd, "matrix")?,
            signal: scenario_field(&sc.signal, cmd, "signal")?,
            signal_step: sc.signal_step,
            signal_margin: sc.signal_margin.unwrap_or(DEFAULT_SIGNAL_MARGIN),
            x_half: sc.x_half.unwrap_or(DEFAULT_DUALITY_HALF),
            x_step: sc.x_step.unwrap_or(DEFAULT_DUALITY_STEP),
            omega_half: sc.omega_half.unwrap_or(DEFAULT_DUALITY_HALF),
            omega_step: sc.omega_step.unwrap_or(DEFAULT_DUALITY_STEP),
            fhat_half: sc.fhat_half,
            fhat_step: sc.fhat_step,
            tol: sc.tol.unwrap_or(DEFAULT_DUALITY_TOL),
        }),
        "detect" => cmd_detect(&DetectArgs {
            matrix: scenario_field(&sc.matrix, cmd, "matrix")?,
            measure: scenario_field(&sc.measure, cmd, "measure")?,
            grid: sc.grid.unwrap_or(false),
            threshold: sc.threshold.unwrap_or(DEFAULT_THRESHOLD),
            out: sc.out,
        }),
        other => Err(CoreError::InvalidParam(format!("unknown scenario command `{other}`")).into()),
    }
}
