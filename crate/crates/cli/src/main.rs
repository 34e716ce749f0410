//! `fuzzy`: build fuzzy circles and spheres, run the verification suites over
//! a range of truncations and export reports, spectra and plot data.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or an
//! artifact cannot be produced, 2 on invalid arguments.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fuzzysphere::scan::{emit_plot_data, run_scan, write_plot_csv, ScanConfig, ScanReport, Suite};
use fuzzysphere::spectral::write_spectra_csv;
use fuzzysphere::{build_circle, build_sphere, Error};

#[derive(Parser)]
#[command(
    name = "fuzzy",
    version,
    about = "Fuzzy circle and fuzzy sphere verification toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the spaces and print their sizes.
    Build(Common),
    /// Run verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// relations, spectra, lie, scs, minimize or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Coordinate eigenvalues as CSV (`lambda,m,h,eigenvalue`).
    Spectrum(Common),
    /// Uncertainty relations, coherent-state frames and weak orbits.
    Scs(Common),
    /// States of minimal spatial dispersion.
    Minimize(Common),
    /// Long-format CSV (`series,lambda,x,y`) for plotting.
    Plotdata(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// 1 for the circle, 2 for the sphere.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    d: u8,
    /// A single truncation `A` or an inclusive range `A..B`.
    #[arg(long, default_value = "1", value_parser = parse_range)]
    lambda: (u32, u32),
    /// Sharpness override; defaults to Lambda^2 (Lambda+1)^2 per truncation.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write CSV output here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads over truncations.
    #[arg(long)]
    jobs: Option<usize>,
}

fn parse_range(s: &str) -> std::result::Result<(u32, u32), String> {
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("'{t}': {e}"));
    match s.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => parse(s).map(|a| (a, a)),
    }
}

impl Common {
    fn config(&self, suites: Vec<Suite>) -> ScanConfig {
        ScanConfig {
            d: self.d,
            lambda_min: self.lambda.0,
            lambda_max: self.lambda.1,
            k: self.k,
            tol: self.tol,
            suites,
            seed: self.seed,
            jobs: self.jobs,
        }
    }
}

/// Invalid input, reported with exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn validated(config: ScanConfig) -> Result<ScanConfig> {
    config.validate().map_err(|e| Usage(e.to_string()))?;
    Ok(config)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: &Path, report: &ScanReport) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Prints the summary and returns the exit status of the report.
fn conclude(report: &ScanReport, json: Option<&Path>) -> Result<ExitCode> {
    if let Some(p) = json {
        write_json(p, report)?;
    }
    eprintln!("passed {} failed {}", report.summary.passed, report.summary.failed);
    Ok(match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some(c) => {
            let at = c.lambda.map(|l| format!(" lambda={l}")).unwrap_or_default();
            let m = c.m.map(|m| format!(" m={m}")).unwrap_or_default();
            println!("FAIL {}{at}{m} value={:e}", c.tag, c.value);
            ExitCode::from(1)
        }
    })
}

fn scan(common: &Common, suites: Vec<Suite>) -> Result<ExitCode> {
    let config = validated(common.config(suites))?;
    let outcome = run_scan(&config)?;
    if config.has(Suite::Spectra) {
        if let Some(p) = &common.csv {
            let mut w = open_output(Some(p))?;
            write_spectra_csv(&mut w, &outcome.spectra)?;
            w.flush()?;
        }
    }
    conclude(&outcome.report, common.json.as_deref())
}

fn build(common: &Common) -> Result<ExitCode> {
    validated(common.config(vec![Suite::Relations]))?;
    let mut rows = Vec::new();
    for lambda in common.lambda.0..=common.lambda.1 {
        let (dim, k, x2) = if common.d == 1 {
            let c = build_circle(lambda, common.k).map_err(|e| Usage(e.to_string()))?;
            (c.dim(), c.k, c.x_squared)
        } else {
            let s = build_sphere(lambda, common.k).map_err(|e| Usage(e.to_string()))?;
            (s.dim(), s.k, s.x_squared)
        };
        let diag: Vec<f64> = x2.diagonal().iter().map(|z| z.re).collect();
        let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("d={} lambda={lambda} dim={dim} k={k} x2=[{lo:.12}, {hi:.12}]", common.d);
        rows.push(serde_json::json!({
            "d": common.d,
            "lambda": lambda,
            "dim": dim,
            "k": k,
            "x_squared_min": lo,
            "x_squared_max": hi,
        }));
    }
    if let Some(p) = &common.json {
        let file = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(file), &rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn spectrum(common: &Common) -> Result<ExitCode> {
    let config = validated(common.config(vec![Suite::Spectra]))?;
    let outcome = run_scan(&config)?;
    let mut w = open_output(common.csv.as_deref())?;
    write_spectra_csv(&mut w, &outcome.spectra)?;
    w.flush()?;
    drop(w);
    conclude(&outcome.report, common.json.as_deref())
}

fn plotdata(common: &Common) -> Result<ExitCode> {
    let config = validated(common.config(Suite::ALL.to_vec()))?;
    let rows = emit_plot_data(&config)?;
    if rows.is_empty() {
        anyhow::bail!("no plot data produced");
    }
    let mut w = open_output(common.csv.as_deref())?;
    write_plot_csv(&mut w, &rows)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Build(c) => build(c),
        Command::Verify { common, suite } => {
            let suites = Suite::parse_list(suite).map_err(|e| Usage(e.to_string()))?;
            scan(common, suites)
        }
        Command::Spectrum(c) => spectrum(c),
        Command::Scs(c) => scan(c, vec![Suite::Scs]),
        Command::Minimize(c) => scan(c, vec![Suite::Minimize]),
        Command::Plotdata(c) => plotdata(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<Usage>().is_some()
                || matches!(
                    e.downcast_ref::<Error>(),
                    Some(Error::InvalidTruncation(_) | Error::InvalidParameter(_) | Error::SharpnessTooSmall { .. })
                );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
