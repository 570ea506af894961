//! `ndeb`: threshold tables, nonlocality reports, protocol simulation and
//! Bell-state diagnostics for the N-dimensional entanglement-based key
//! distribution protocol.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ndeb_core::bell::{bell_overlap, BellIndex, BellVariant, OverlapMode};
use ndeb_core::cerf::invariance_classes;
use ndeb_core::parse::{parse_bell_indices, parse_config, parse_dim_range, MAX_CLI_DIM};
use ndeb_core::qudit::optimal_angle;
use ndeb_core::sim::run_simulation_sharded;
use ndeb_core::threshold::security_report;
use ndeb_core::Dim;
use serde::Serialize;

use output::{complex, sig, write_csv, OutputRecord};

/// Environment variable that replaces the seed of a simulation config.
const SEED_ENV: &str = "NDEB_SEED";

#[derive(Parser)]
#[command(
    name = "ndeb",
    version,
    about = "Security thresholds and simulation for N-dimensional entanglement-based QKD"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Ra,
    Bc,
}

#[derive(Subcommand)]
enum Command {
    /// Crossover fidelity F_A and the optimal cloner for each N.
    Table {
        /// Dimension range, e.g. `2..10`.
        #[arg(long = "n")]
        range: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Crossover fidelity against the nonlocality threshold for each N.
    Report {
        #[arg(long = "n")]
        range: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run the protocol from a JSON config and write the report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; the report does not depend on this.
        #[arg(long)]
        shards: Option<usize>,
    },
    /// Invariance classes of the cloner coefficients for a set of φ-bases.
    Classes {
        #[arg(long = "n")]
        n: usize,
        /// Basis angle in radians (repeatable).
        #[arg(long = "phi", allow_negative_numbers = true)]
        phis: Vec<f64>,
        /// Optimal angle 2πi/4N (repeatable).
        #[arg(long = "phi-index")]
        phi_indices: Vec<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Overlap ⟨B^{φ1}_{i,j}|B^{φ2}_{k,l}⟩ in closed form and by brute force.
    Overlap {
        #[arg(long = "n")]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        phi1: f64,
        #[arg(long, allow_negative_numbers = true)]
        phi2: f64,
        /// Labels `i,j,k,l`.
        #[arg(long)]
        idx: String,
        #[arg(long, value_enum, default_value = "ra")]
        variant: Variant,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Serialize)]
struct TableRow {
    n: usize,
    f_a: f64,
    v: f64,
    x: f64,
    y: f64,
    info: f64,
}

#[derive(Serialize)]
struct ReportRow {
    n: usize,
    f_a: f64,
    v_thr: f64,
    f_thr: f64,
    error_thr: f64,
    sufficient: bool,
}

#[derive(Serialize)]
struct ClassesPayload {
    n: usize,
    phis: Vec<f64>,
    classes: Vec<Vec<(usize, usize)>>,
}

#[derive(Serialize)]
struct OverlapPayload {
    n: usize,
    phi1: f64,
    phi2: f64,
    indices: [usize; 4],
    closed_form: [f64; 2],
    brute_force: [f64; 2],
}

fn dim(n: usize) -> Result<Dim> {
    if n > MAX_CLI_DIM {
        bail!("n = {n} exceeds {MAX_CLI_DIM}");
    }
    Ok(Dim::new(n)?)
}

fn cmd_table(range: &str, format: Format, out: &mut impl Write) -> Result<()> {
    let dims = parse_dim_range(range)?;
    let rows: Vec<TableRow> = security_report(&dims)?
        .into_iter()
        .map(|r| TableRow { n: r.n.get(), f_a: r.f_a, v: r.v, x: r.x, y: r.y, info: r.i_ab })
        .collect();
    match format {
        Format::Json => OutputRecord::new("table", rows).write_json(out),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.n.to_string(), sig(r.f_a), sig(r.v), sig(r.x), sig(r.y), sig(r.info)])
                .collect();
            write_csv(out, &["N", "F_A", "v", "x", "y", "I_AB=I_AE"], &body)
        }
    }
}

fn cmd_report(range: &str, format: Format, out: &mut impl Write) -> Result<()> {
    let dims = parse_dim_range(range)?;
    let rows: Vec<ReportRow> = security_report(&dims)?
        .into_iter()
        .map(|r| ReportRow {
            n: r.n.get(),
            f_a: r.f_a,
            v_thr: r.v_thr,
            f_thr: r.f_thr,
            error_thr: 1.0 - r.f_thr,
            sufficient: r.secure_iff_nonlocal,
        })
        .collect();
    match format {
        Format::Json => OutputRecord::new("report", rows).write_json(out),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        sig(r.f_a),
                        sig(r.v_thr),
                        sig(r.f_thr),
                        sig(r.error_thr),
                        r.sufficient.to_string(),
                    ]
                })
                .collect();
            write_csv(out, &["N", "F_A", "V_thr", "F_thr", "1-F_thr", "sufficient"], &body)
        }
    }
}

fn cmd_simulate(
    config: &PathBuf,
    out_path: &PathBuf,
    shards: Option<usize>,
    out: &mut impl Write,
) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading config {}", config.display()))?;
    let mut cfg = parse_config(&text).with_context(|| format!("parsing config {}", config.display()))?;
    if let Ok(seed) = std::env::var(SEED_ENV) {
        cfg.seed = seed.trim().parse().with_context(|| format!("{SEED_ENV}={seed:?} is not a u64"))?;
    }
    let shards = shards.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let report = run_simulation_sharded(&cfg, shards)?;
    let file = fs::File::create(out_path).with_context(|| format!("creating {}", out_path.display()))?;
    OutputRecord::new("simulate", &report).write_json(io::BufWriter::new(file))?;
    writeln!(
        out,
        "rounds={} sifted_fraction={} qber={} ± {}",
        report.rounds,
        sig(report.sifted_fraction),
        sig(report.qber),
        sig(report.qber_stderr)
    )?;
    Ok(())
}

fn cmd_classes(n: usize, phis: &[f64], indices: &[usize], json: bool, out: &mut impl Write) -> Result<()> {
    let d = dim(n)?;
    let mut all: Vec<f64> = phis.to_vec();
    for &i in indices {
        if i > 3 {
            bail!("phi index {i} out of range 0..=3");
        }
        all.push(optimal_angle(d, i));
    }
    if all.is_empty() {
        bail!("give at least one --phi or --phi-index");
    }
    if let Some(bad) = all.iter().find(|p| !p.is_finite()) {
        bail!("angle {bad} is not finite");
    }
    let partition = invariance_classes(d, &all)?;
    if json {
        let payload = ClassesPayload { n, phis: all, classes: partition.classes };
        return OutputRecord::new("classes", payload).write_json(out);
    }
    writeln!(out, "{} classes", partition.len())?;
    for class in &partition.classes {
        let cells: Vec<String> = class.iter().map(|(m, k)| format!("({m},{k})")).collect();
        writeln!(out, "  {}", cells.join(" "))?;
    }
    Ok(())
}

fn cmd_overlap(
    n: usize,
    phi1: f64,
    phi2: f64,
    idx: &str,
    variant: Variant,
    json: bool,
    out: &mut impl Write,
) -> Result<()> {
    let d = dim(n)?;
    if !phi1.is_finite() || !phi2.is_finite() {
        bail!("angles must be finite");
    }
    let [i, j, k, l] = parse_bell_indices(idx, d)?;
    let variant = match variant {
        Variant::Ra => BellVariant::Ra,
        Variant::Bc => BellVariant::Bc,
    };
    let a = BellIndex::new(d, i, j, variant)?;
    let b = BellIndex::new(d, k, l, variant)?;
    let closed = bell_overlap(d, phi1, phi2, a, b, OverlapMode::ClosedForm)?;
    let brute = bell_overlap(d, phi1, phi2, a, b, OverlapMode::BruteForce)?;
    if json {
        let payload = OverlapPayload {
            n,
            phi1,
            phi2,
            indices: [i, j, k, l],
            closed_form: [closed.re, closed.im],
            brute_force: [brute.re, brute.im],
        };
        return OutputRecord::new("overlap", payload).write_json(out);
    }
    writeln!(out, "closed-form: {}", complex(closed))?;
    writeln!(out, "brute-force: {}", complex(brute))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Table { range, format } => cmd_table(&range, format, &mut out),
        Command::Report { range, format } => cmd_report(&range, format, &mut out),
        Command::Simulate { config, out: path, shards } => cmd_simulate(&config, &path, shards, &mut out),
        Command::Classes { n, phis, phi_indices, json } => {
            cmd_classes(n, &phis, &phi_indices, json, &mut out)
        }
        Command::Overlap { n, phi1, phi2, idx, variant, json } => {
            cmd_overlap(n, phi1, phi2, &idx, variant, json, &mut out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
