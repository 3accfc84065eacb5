//! Command-line front end for the composition-operator laboratory.
//!
//! Each subcommand is a thin orchestration over the `compop` library:
//!
//! * `validate`   — boundedness verdict for a symbol spec;
//! * `decay`      — approximation-number decay study at `N` and `2N`;
//! * `lowerbound` — kernel-pencil lower bounds on tangency grids;
//! * `carleson`   — Monte-Carlo pullback mass profile;
//! * `transfer`   — disc-to-half-plane transference comparison;
//! * `selftest`   — built-in smoke checks of the numeric kernel.
//!
//! Reproducibility contract: every run resolves its inputs into a
//! [`RunConfig`] that round-trips losslessly through JSON; the config —
//! including any Monte-Carlo seed and sample count — is embedded in
//! every output document, all floats are printed with 17 significant
//! digits, and identical configs produce byte-identical outputs.
//!
//! Exit codes: `0` success (or verdict *bounded*), `1` negative verdict
//! (*unbounded*), `2` *undecidable*, `3` usage errors, `4` runtime
//! failures.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use compop::operator::{self, DecayReport};
use compop::symbol::{parse_symbol_spec, LinearSymbol, ParsedSymbol, ValidationVerdict};
use compop::{
    bernstein_lower_bound, grid_section8, pullback_profile, verify_transfer_inequality,
    DiscSelfMap, PullbackProfile, TransferReport,
};

/// Exit code for a negative verdict (`validate` on an unbounded symbol).
const EXIT_NEGATIVE: u8 = 1;
/// Exit code when no verdict could be reached.
const EXIT_UNDECIDABLE: u8 = 2;
/// Exit code for command-line usage errors.
const EXIT_USAGE: u8 = 3;
/// Exit code for runtime failures (I/O, parse, numerical errors).
const EXIT_FAILURE: u8 = 4;

/// Version tag written into every CSV header and JSON schema string.
const SCHEMA_VERSION: u32 = 1;

/// Tolerance for the `κ = 1/2` requirement of the tangency grid.
const KAPPA_HALF_TOLERANCE: f64 = 1e-12;

#[derive(Parser)]
#[command(
    name = "compop",
    about = "Numerical laboratory for composition operators on the Dirichlet-series Hardy space",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    /// Print the JSON document to stdout instead of the text summary.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a symbol spec defines a bounded composition operator.
    Validate {
        /// Path to a JSON symbol spec.
        #[arg(long)]
        spec: PathBuf,
    },
    /// Approximation numbers, eigenvalue moduli, and decay fits at N and 2N.
    Decay {
        /// Path to a JSON symbol spec.
        #[arg(long)]
        spec: PathBuf,
        /// Truncation level (matrix columns).
        #[arg(long)]
        n: usize,
        /// Row truncation tolerance.
        #[arg(long = "row-tol", default_value_t = operator::DEFAULT_ROW_TOLERANCE)]
        row_tol: f64,
        /// Fit window "lo,hi" (1-based, inclusive); defaults to a central window.
        #[arg(long, value_parser = parse_window)]
        window: Option<(usize, usize)>,
        /// Write <out>.csv and <out>.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kernel-pencil lower bounds for a=n on tangency grids.
    Lowerbound {
        /// Path to a JSON symbol spec (must be linear with κ = 1/2).
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated list of grid sizes n.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Write <out>.csv and <out>.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo pullback mass profile over a ladder of box sizes.
    Carleson {
        /// Path to a JSON symbol spec (must be linear).
        #[arg(long)]
        spec: PathBuf,
        /// Monte-Carlo sample count.
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        /// Monte-Carlo seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated box sizes ε, strictly decreasing.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1e-1, 1e-2, 1e-3])]
        eps: Vec<f64>,
        /// Write <out>.csv and <out>.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transfer a disc self-map and compare both approximation-number sequences.
    Transfer {
        /// Path to a JSON disc self-map spec.
        #[arg(long)]
        spec: PathBuf,
        /// Truncation level (matrix columns on both sides).
        #[arg(long)]
        n: usize,
        /// Write <out>.csv and <out>.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run built-in smoke checks of the numeric kernel.
    Selftest,
}

/// Parses a fit window given as `"lo,hi"`.
fn parse_window(text: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| format!("expected \"lo,hi\", got {text:?}"))?;
    let lo: usize = lo.trim().parse().map_err(|e| format!("bad window low end: {e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("bad window high end: {e}"))?;
    if lo < 1 || hi < lo {
        return Err(format!("window must satisfy 1 ≤ lo ≤ hi, got ({lo}, {hi})"));
    }
    Ok((lo, hi))
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

/// The fully resolved inputs of one run.  Embedded verbatim in every
/// output document so results carry their own provenance; the
/// serialization round-trips losslessly (17-significant-digit floats
/// plus exact-parse on read).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunConfig {
    /// Subcommand name.
    command: String,
    /// Input spec path as given (absent for `selftest`).
    spec: Option<String>,
    /// Truncation levels / grid sizes, in command order.
    n: Vec<usize>,
    /// Row truncation tolerance (matrix-building commands).
    row_tolerance: f64,
    /// Fit window, when one was requested.
    window: Option<(usize, usize)>,
    /// Monte-Carlo sample count (0 for deterministic commands).
    samples: u64,
    /// Monte-Carlo seed (0 for deterministic commands).
    seed: u64,
    /// Box-size ladder for `carleson` (empty elsewhere).
    epsilons: Vec<f64>,
    /// Output path prefix, when files were requested.
    out: Option<String>,
    /// Whether stdout carries the JSON document.
    json: bool,
}

impl RunConfig {
    /// A config skeleton with the deterministic-command defaults.
    fn new(command: &str, json: bool) -> RunConfig {
        RunConfig {
            command: command.to_owned(),
            spec: None,
            n: Vec::new(),
            row_tolerance: operator::DEFAULT_ROW_TOLERANCE,
            window: None,
            samples: 0,
            seed: 0,
            epsilons: Vec::new(),
            out: None,
            json,
        }
    }
}

// ---------------------------------------------------------------------------
// Output formatting
// ---------------------------------------------------------------------------

/// Formats a float with 17 significant digits (one before the point,
/// sixteen after, exponent form) — enough to reproduce any `f64`
/// exactly on re-parse.
fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `serde_json` formatter that prints every float through
/// [`format_float`].  Inputs are finite by construction (the library
/// never emits NaN/∞ into report structs), so the output stays valid
/// JSON.
struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
        value: f64,
    ) -> std::io::Result<()> {
        write!(writer, "{}", format_float(value))
    }
}

/// Serializes any document with 17-significant-digit floats.
fn to_json(value: &impl Serialize) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// The top-level JSON document wrapping every command's result.
#[derive(Serialize)]
struct Document<T: Serialize> {
    /// `compop/<command>/v<version>`.
    schema: String,
    /// The resolved run configuration.
    config: RunConfig,
    /// Command-specific payload.
    result: T,
}

impl<T: Serialize> Document<T> {
    fn new(config: RunConfig, result: T) -> Document<T> {
        Document {
            schema: format!("compop/{}/v{SCHEMA_VERSION}", config.command),
            config,
            result,
        }
    }
}

/// Builds the versioned CSV text: a schema comment, the embedded
/// config, a column header, and the data rows.
fn csv_text(config: &RunConfig, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "# compop {} csv v{SCHEMA_VERSION}", config.command);
    let _ = writeln!(text, "# config: {}", to_json(config));
    let _ = writeln!(text, "{}", columns.join(","));
    for row in rows {
        let _ = writeln!(text, "{}", row.join(","));
    }
    text
}

/// Writes `<prefix>.csv` / `<prefix>.json` when an output prefix was
/// requested, then prints either the JSON document or the text summary
/// to stdout.
fn emit<T: Serialize>(
    config: &RunConfig,
    document: &Document<T>,
    csv: Option<String>,
    summary: &str,
) -> Result<(), Box<dyn std::error::Error>> {
    let json_text = format!("{}\n", to_json(document));
    if let Some(prefix) = &config.out {
        if let Some(csv_body) = &csv {
            std::fs::write(format!("{prefix}.csv"), csv_body)?;
        }
        std::fs::write(format!("{prefix}.json"), &json_text)?;
    }
    if config.json {
        print!("{json_text}");
    } else {
        println!("{summary}");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

fn read_symbol(path: &PathBuf) -> Result<ParsedSymbol, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read symbol spec {}: {e}", path.display()))?;
    Ok(parse_symbol_spec(&text)?)
}

/// `validate` needs no output files; its verdict is the exit code.
#[derive(Serialize)]
struct ValidateResult {
    verdict: ValidationVerdict,
    kappa: Option<f64>,
    dimension: Option<usize>,
}

fn cmd_validate(config: RunConfig, spec: &PathBuf) -> Result<u8, Box<dyn std::error::Error>> {
    let parsed = read_symbol(spec)?;
    let symbol = parsed.to_symbol();
    let verdict = symbol.validate();
    let linear = parsed.as_linear();
    let result = ValidateResult {
        verdict: verdict.clone(),
        kappa: linear.as_ref().map(LinearSymbol::kappa),
        dimension: linear.as_ref().map(LinearSymbol::dimension),
    };
    let (label, code) = match &verdict {
        ValidationVerdict::Bounded { .. } => ("bounded", 0),
        ValidationVerdict::Unbounded { .. } => ("unbounded", EXIT_NEGATIVE),
        ValidationVerdict::Undecidable { .. } => ("undecidable", EXIT_UNDECIDABLE),
    };
    let summary = format!("verdict: {label}\nreason: {}", verdict.reason());
    emit(&config, &Document::new(config.clone(), result), None, &summary)?;
    Ok(code)
}

fn cmd_decay(
    config: RunConfig,
    spec: &PathBuf,
    n: usize,
    row_tol: f64,
    window: Option<(usize, usize)>,
) -> Result<u8, Box<dyn std::error::Error>> {
    let symbol = read_symbol(spec)?.to_symbol();
    let report: DecayReport = operator::decay_report(&symbol, n, row_tol, window, n)?;

    let mut rows = Vec::new();
    for (i, a) in report.singular_values.iter().enumerate() {
        rows.push(vec![
            (i + 1).to_string(),
            format_float(*a),
            report
                .eigenvalue_moduli
                .get(i)
                .map(|v| format_float(*v))
                .unwrap_or_default(),
            report
                .convergence
                .get(i)
                .map(|v| format_float(*v))
                .unwrap_or_default(),
        ]);
    }
    let csv = csv_text(
        &config,
        &["n", "a_n", "eigenvalue_modulus", "relative_change_vs_second_level"],
        &rows,
    );

    let fit = &report.fits;
    let summary = format!(
        "levels: {} and {} columns ({} rows at the first)\n\
         power fit  : alpha = {}, residual = {}\n\
         geometric  : r = {}, residual = {}\n\
         fit window : [{}, {}]",
        report.levels.0,
        report.levels.1,
        report.rows,
        format_float(fit.power.alpha),
        format_float(fit.power.residual),
        format_float(fit.geometric.log_r.exp()),
        format_float(fit.geometric.residual),
        fit.window.0,
        fit.window.1,
    );
    emit(&config, &Document::new(config.clone(), report), Some(csv), &summary)?;
    Ok(0)
}

/// One grid size of the `lowerbound` table.
#[derive(Serialize)]
struct LowerBoundRow {
    n: usize,
    nu: u64,
    bound: f64,
    /// `bound · n^{(d−1)/2}` — constant for the predicted lower rate.
    normalized_bound: f64,
    pencil_min: f64,
    jitter_applied: bool,
    preimage_count: usize,
    lattice_sampled: bool,
}

#[derive(Serialize)]
struct LowerBoundResult {
    dimension: usize,
    rows: Vec<LowerBoundRow>,
}

fn cmd_lowerbound(
    config: RunConfig,
    spec: &PathBuf,
    sizes: &[usize],
) -> Result<u8, Box<dyn std::error::Error>> {
    let parsed = read_symbol(spec)?;
    let linear = parsed
        .as_linear()
        .ok_or("lowerbound requires a linear symbol spec")?;
    if (linear.kappa() - 0.5).abs() > KAPPA_HALF_TOLERANCE {
        return Err(format!(
            "the tangency grid needs κ = 1/2, got κ = {}",
            format_float(linear.kappa())
        )
        .into());
    }
    if sizes.iter().any(|&n| n < 2) {
        return Err("grid sizes must be at least 2".into());
    }
    let reduced = linear.reduce_to_real();
    let d = reduced.dimension();

    let mut table = Vec::new();
    for &n in sizes {
        let grid = grid_section8(&reduced, n)?;
        let bound = bernstein_lower_bound(&grid.config)?;
        table.push(LowerBoundRow {
            n,
            nu: grid.nu,
            bound: bound.bound,
            normalized_bound: bound.bound * (n as f64).powf((d as f64 - 1.0) / 2.0),
            pencil_min: bound.pencil_min,
            jitter_applied: bound.jitter_applied,
            preimage_count: grid.config.total_points(),
            lattice_sampled: grid.sampled,
        });
    }

    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.nu.to_string(),
                format_float(r.bound),
                format_float(r.normalized_bound),
                format_float(r.pencil_min),
                r.jitter_applied.to_string(),
                r.preimage_count.to_string(),
                r.lattice_sampled.to_string(),
            ]
        })
        .collect();
    let csv = csv_text(
        &config,
        &[
            "n",
            "nu",
            "bound",
            "normalized_bound",
            "pencil_min",
            "jitter_applied",
            "preimage_count",
            "lattice_sampled",
        ],
        &rows,
    );

    let mut summary = format!("dimension d = {d}; normalized column is bound · n^(d-1)/2");
    for r in &table {
        let _ = write!(
            summary,
            "\nn = {:>5}: bound = {}, normalized = {}",
            r.n,
            format_float(r.bound),
            format_float(r.normalized_bound)
        );
    }
    emit(
        &config,
        &Document::new(config.clone(), LowerBoundResult { dimension: d, rows: table }),
        Some(csv),
        &summary,
    )?;
    Ok(0)
}

fn cmd_carleson(
    config: RunConfig,
    spec: &PathBuf,
) -> Result<u8, Box<dyn std::error::Error>> {
    let parsed = read_symbol(spec)?;
    let linear = parsed
        .as_linear()
        .ok_or("carleson requires a linear symbol spec")?;
    let profile: PullbackProfile = pullback_profile(
        &linear.bohr_lift(),
        &config.epsilons,
        config.samples,
        config.seed,
    )?;

    let rows: Vec<Vec<String>> = profile
        .rows
        .iter()
        .map(|r| {
            vec![
                format_float(r.epsilon),
                format_float(r.max_box_mass),
                format_float(r.mass_over_ell),
                format_float(r.lemma_normalized_mass),
                format_float(r.standard_error),
            ]
        })
        .collect();
    let csv = csv_text(
        &config,
        &[
            "epsilon",
            "max_box_mass",
            "mass_over_ell",
            "lemma_normalized_mass",
            "standard_error",
        ],
        &rows,
    );

    let mut summary = format!(
        "dimension d = {}; {} samples, seed {}",
        profile.dimension, profile.samples, profile.seed
    );
    for r in &profile.rows {
        let _ = write!(
            summary,
            "\neps = {}: mass/eps = {}, mass/eps^((d+1)/2) = {}",
            format_float(r.epsilon),
            format_float(r.mass_over_ell),
            format_float(r.lemma_normalized_mass)
        );
    }
    emit(&config, &Document::new(config.clone(), profile), Some(csv), &summary)?;
    Ok(0)
}

#[derive(Serialize)]
struct TransferResult {
    map: DiscSelfMap,
    report: TransferReport,
}

fn cmd_transfer(
    config: RunConfig,
    spec: &PathBuf,
    n: usize,
) -> Result<u8, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(spec)
        .map_err(|e| format!("cannot read disc map spec {}: {e}", spec.display()))?;
    let map: DiscSelfMap = serde_json::from_str(&text)
        .map_err(|e| format!("malformed disc map spec: {e}"))?;
    if n < 10 {
        return Err("transfer needs --n at least 10 for the decay fits".into());
    }
    let report: TransferReport = verify_transfer_inequality(&map, n)?;

    let mut rows = Vec::new();
    for i in 0..report.transferred.len() {
        rows.push(vec![
            (i + 1).to_string(),
            format_float(report.transferred[i]),
            format_float(report.disc[i]),
            report
                .ratios
                .get(i)
                .map(|v| format_float(*v))
                .unwrap_or_default(),
        ]);
    }
    let csv = csv_text(&config, &["n", "transferred_a_n", "disc_a_n", "ratio"], &rows);

    let max_ratio = report.ratios.iter().cloned().fold(0.0f64, f64::max);
    let mut summary = format!(
        "transferred vs disc over {} indices; max ratio = {}",
        report.transferred.len(),
        format_float(max_ratio)
    );
    if let Some(fit) = &report.transferred_fit {
        let _ = write!(
            summary,
            "\ntransferred geometric rate (window [{}, {}]): {}",
            fit.window.0,
            fit.window.1,
            format_float(fit.geometric.log_r.exp())
        );
    }
    if let Some(fit) = &report.disc_fit {
        let _ = write!(
            summary,
            "\ndisc geometric rate (same window): {}",
            format_float(fit.geometric.log_r.exp())
        );
    }
    emit(
        &config,
        &Document::new(config.clone(), TransferResult { map, report }),
        Some(csv),
        &summary,
    )?;
    Ok(0)
}

/// One smoke check of `selftest`.
#[derive(Serialize)]
struct SelfCheck {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn run_selftest() -> Vec<SelfCheck> {
    let mut checks = Vec::new();
    let mut push = |name: &'static str, outcome: Result<String, String>| match outcome {
        Ok(detail) => checks.push(SelfCheck { name, pass: true, detail }),
        Err(detail) => checks.push(SelfCheck { name, pass: false, detail }),
    };

    push("zeta spot value", {
        match compop::zeta::zeta_real(2.0) {
            Ok(z) => {
                let target = std::f64::consts::PI.powi(2) / 6.0;
                let err = (z - target).abs();
                if err <= 1e-12 {
                    Ok(format!("|zeta(2) - pi^2/6| = {}", format_float(err)))
                } else {
                    Err(format!("zeta(2) off by {}", format_float(err)))
                }
            }
            Err(e) => Err(e.to_string()),
        }
    });

    push("diagonal compression exactness", {
        let mut psi = compop::poly::DirichletPoly::zero(compop::poly::Cutoff::Frequency(
            num_bigint::BigUint::from(1u32),
        ));
        psi.add_term(num_bigint::BigUint::from(1u32), Complex64::new(1.0, 0.0));
        let symbol = compop::symbol::Symbol::new(1, psi);
        (|| -> Result<String, String> {
            let op = operator::assemble(&symbol, 50, operator::DEFAULT_ROW_TOLERANCE)
                .map_err(|e| e.to_string())?;
            let sv = op.approximation_numbers(50).map_err(|e| e.to_string())?;
            let worst = sv
                .iter()
                .enumerate()
                .map(|(i, a)| (a - 1.0 / (i as f64 + 1.0)).abs())
                .fold(0.0f64, f64::max);
            if worst <= 1e-10 {
                Ok(format!("max |a_n - 1/n| = {}", format_float(worst)))
            } else {
                Err(format!("diagonal defect {}", format_float(worst)))
            }
        })()
    });

    push("weyl product inequality", {
        let mut psi = compop::poly::DirichletPoly::zero(compop::poly::Cutoff::Frequency(
            num_bigint::BigUint::from(2u32),
        ));
        psi.add_term(num_bigint::BigUint::from(1u32), Complex64::new(1.75, 0.0));
        psi.add_term(num_bigint::BigUint::from(2u32), Complex64::new(-0.25, 0.0));
        let symbol = compop::symbol::Symbol::new(0, psi);
        (|| -> Result<String, String> {
            let op = operator::assemble(&symbol, 32, operator::DEFAULT_ROW_TOLERANCE)
                .map_err(|e| e.to_string())?;
            let weyl = op.weyl_check(16).map_err(|e| e.to_string())?;
            if weyl.holds {
                Ok(format!("worst prefix margin = {}", format_float(weyl.margin)))
            } else {
                Err(format!("violated with margin {}", format_float(weyl.margin)))
            }
        })()
    });

    push("pseudo-distance closed forms", {
        let got = compop::pseudo_distance(
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 1.0),
        );
        let err = (got - std::f64::consts::FRAC_1_SQRT_2).abs();
        if err <= 1e-12 {
            Ok(format!("defect = {}", format_float(err)))
        } else {
            Err(format!("two forms disagree by {}", format_float(err)))
        }
    });

    push("transference series oracle", {
        (|| -> Result<String, String> {
            let omega = DiscSelfMap::new(
                vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
                0.9,
                16,
            )
            .map_err(|e| e.to_string())?;
            let ts = compop::transfer_symbol(&omega, 4).map_err(|e| e.to_string())?;
            let h = ts.h_coefficients();
            let expect = [1.0, -1.0, 0.5, -0.25, 0.125];
            for (k, want) in expect.iter().enumerate() {
                if h[k] != Complex64::new(*want, 0.0) {
                    return Err(format!("h_{k} = {} instead of {want}", h[k]));
                }
            }
            Ok("h_k = 2(-1/2)^k reproduced exactly".to_owned())
        })()
    });

    checks
}

fn cmd_selftest(config: RunConfig) -> Result<u8, Box<dyn std::error::Error>> {
    let checks = run_selftest();
    let all_pass = checks.iter().all(|c| c.pass);
    let mut summary = String::new();
    for check in &checks {
        let _ = writeln!(
            summary,
            "{} {} — {}",
            if check.pass { "ok  " } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    let _ = write!(
        summary,
        "{}/{} checks passed",
        checks.iter().filter(|c| c.pass).count(),
        checks.len()
    );
    emit(&config, &Document::new(config.clone(), checks), None, &summary)?;
    Ok(if all_pass { 0 } else { EXIT_FAILURE })
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn dispatch(cli: Cli) -> Result<u8, Box<dyn std::error::Error>> {
    match &cli.command {
        Command::Validate { spec } => {
            let mut config = RunConfig::new("validate", cli.json);
            config.spec = Some(spec.display().to_string());
            cmd_validate(config, spec)
        }
        Command::Decay { spec, n, row_tol, window, out } => {
            let mut config = RunConfig::new("decay", cli.json);
            config.spec = Some(spec.display().to_string());
            config.n = vec![*n];
            config.row_tolerance = *row_tol;
            config.window = *window;
            config.out = out.as_ref().map(|p| p.display().to_string());
            cmd_decay(config, spec, *n, *row_tol, *window)
        }
        Command::Lowerbound { spec, n, out } => {
            let mut config = RunConfig::new("lowerbound", cli.json);
            config.spec = Some(spec.display().to_string());
            config.n = n.clone();
            config.out = out.as_ref().map(|p| p.display().to_string());
            cmd_lowerbound(config, spec, n)
        }
        Command::Carleson { spec, samples, seed, eps, out } => {
            let mut config = RunConfig::new("carleson", cli.json);
            config.spec = Some(spec.display().to_string());
            config.samples = *samples;
            config.seed = *seed;
            config.epsilons = eps.clone();
            config.out = out.as_ref().map(|p| p.display().to_string());
            cmd_carleson(config, spec)
        }
        Command::Transfer { spec, n, out } => {
            let mut config = RunConfig::new("transfer", cli.json);
            config.spec = Some(spec.display().to_string());
            config.n = vec![*n];
            config.out = out.as_ref().map(|p| p.display().to_string());
            cmd_transfer(config, spec, *n)
        }
        Command::Selftest => cmd_selftest(RunConfig::new("selftest", cli.json)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn float_formatting_is_17_significant_digits_and_lossless() {
        for x in [
            0.1,
            1.0 / 3.0,
            std::f64::consts::PI,
            1e-12,
            6.022_140_76e23,
            -0.0,
            5.0_f64.sqrt() * 1e-300,
        ] {
            let text = format_float(x);
            let mantissa = text
                .trim_start_matches('-')
                .split('e')
                .next()
                .unwrap()
                .replace('.', "");
            assert_eq!(mantissa.len(), 17, "{text}");
            assert_eq!(text.parse::<f64>().unwrap(), x, "{text}");
        }
    }

    #[test]
    fn window_parser_accepts_pairs_and_rejects_garbage() {
        assert_eq!(parse_window("5,40").unwrap(), (5, 40));
        assert_eq!(parse_window(" 2 , 2 ").unwrap(), (2, 2));
        assert!(parse_window("5").is_err());
        assert!(parse_window("0,4").is_err());
        assert!(parse_window("7,3").is_err());
        assert!(parse_window("a,b").is_err());
    }

    #[test]
    fn run_config_round_trips_through_its_own_formatter() {
        let mut config = RunConfig::new("carleson", true);
        config.spec = Some("specs/d2.json".to_owned());
        config.n = vec![8, 16, 32];
        config.row_tolerance = 3.33e-13;
        config.window = Some((5, 40));
        config.samples = 10_000_000;
        config.seed = 42;
        config.epsilons = vec![0.1, 0.01, 1.0 / 3.0];
        config.out = Some("out/run1".to_owned());
        let text = to_json(&config);
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(config, back);
    }

    proptest! {
        #[test]
        fn run_config_round_trip_is_lossless(
            row_tol in proptest::num::f64::POSITIVE,
            eps in proptest::collection::vec(proptest::num::f64::POSITIVE, 0..6),
            n in proptest::collection::vec(1usize..100_000, 0..6),
            samples in 0u64..u64::MAX,
            seed in 0u64..u64::MAX,
            json in any::<bool>(),
            window in proptest::option::of((1usize..500, 1usize..500)),
        ) {
            let mut config = RunConfig::new("decay", json);
            config.n = n;
            config.row_tolerance = row_tol;
            config.window = window;
            config.samples = samples;
            config.seed = seed;
            config.epsilons = eps;
            let back: RunConfig = serde_json::from_str(&to_json(&config)).unwrap();
            prop_assert_eq!(config, back);
        }
    }
}
