//! Verification scans over a range of truncations.
//!
//! Each truncation is processed independently (in parallel when asked) with
//! its own random stream derived from the seed, so a scan is reproducible
//! regardless of the number of workers.

use std::io::{self, Write};
use std::ops::RangeInclusive;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{build_circle, verify_circle_relations};
use crate::coherent::{
    minimum_bound, verify_circle_minimizer, verify_circle_scs, verify_sphere_minimizer, verify_sphere_scs,
    MinimizeOptions,
};
use crate::error::{Error, Result};
use crate::lierep::{reconstruct_so4, reconstruct_su2, verify_rotations, EulerAngles};
use crate::report::{Check, Report};
use crate::spectral::{
    circle_spectrum_rows, circle_top_bound, eig_bisection, sphere_spectrum_rows, sphere_top_bound,
    verify_circle_spectra, verify_sphere_spectra, SpectrumRow, BISECTION_TOL,
};
use crate::sphere::{build_sphere, verify_sphere_relations};
use crate::{circle, min_sharpness, sphere, Sharpness};

/// Random states per truncation in the uncertainty checks.
pub const RANDOM_STATES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Relations,
    Spectra,
    Lie,
    Scs,
    Minimize,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Relations,
        Suite::Spectra,
        Suite::Lie,
        Suite::Scs,
        Suite::Minimize,
    ];

    /// Parses one suite name, or `all`.
    pub fn parse_list(name: &str) -> Result<Vec<Suite>> {
        Ok(match name {
            "all" => Suite::ALL.to_vec(),
            "relations" => vec![Suite::Relations],
            "spectra" => vec![Suite::Spectra],
            "lie" => vec![Suite::Lie],
            "scs" => vec![Suite::Scs],
            "minimize" => vec![Suite::Minimize],
            other => {
                return Err(Error::InvalidParameter(format!("unknown suite '{other}'")));
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Dimension of the classical space: 1 for the circle, 2 for the sphere.
    pub d: u8,
    pub lambda_min: u32,
    pub lambda_max: u32,
    /// Sharpness override; `None` uses the default of each truncation.
    pub k: Option<f64>,
    pub tol: f64,
    pub suites: Vec<Suite>,
    pub seed: u64,
    /// Worker threads; `None` uses the rayon default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            d: 1,
            lambda_min: 1,
            lambda_max: 1,
            k: None,
            tol: 1e-10,
            suites: Suite::ALL.to_vec(),
            seed: 0,
            jobs: None,
        }
    }
}

impl ScanConfig {
    pub fn lambdas(&self) -> RangeInclusive<u32> {
        self.lambda_min..=self.lambda_max
    }

    pub fn has(&self, suite: Suite) -> bool {
        self.suites.contains(&suite)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d != 1 && self.d != 2 {
            return Err(Error::InvalidParameter(format!("d must be 1 or 2, got {}", self.d)));
        }
        if self.lambda_min > self.lambda_max {
            return Err(Error::InvalidTruncation(format!(
                "empty range {}..{}",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.lambda_min < 1 {
            return Err(Error::InvalidTruncation("scans need Lambda >= 1".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.suites.is_empty() {
            return Err(Error::InvalidParameter("no suite selected".into()));
        }
        if let Some(k) = self.k {
            let min = min_sharpness(self.lambda_max);
            if !k.is_finite() || k < min {
                return Err(Error::SharpnessTooSmall { k, min });
            }
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidParameter("jobs must be positive".into()));
        }
        Ok(())
    }

    fn sharpness(&self) -> Sharpness {
        self.k.map_or(Sharpness::Default, Sharpness::Value)
    }

    fn rng_for(&self, lambda: u32) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (lambda as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn minimize_options(&self, lambda: u32) -> MinimizeOptions {
        MinimizeOptions {
            seed: self.seed.wrapping_add(lambda as u64),
            ..MinimizeOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

/// The JSON document written by a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub config: ScanConfig,
    pub checks: Vec<Check>,
    pub summary: Summary,
    pub version: String,
}

impl ScanReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Checks and spectra of a scan; the spectra are empty unless the spectra suite ran.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub report: ScanReport,
    pub spectra: Vec<SpectrumRow>,
}

struct LambdaResult {
    report: Report,
    spectra: Vec<SpectrumRow>,
    minimum: Option<f64>,
}

fn scan_one(config: &ScanConfig, lambda: u32) -> Result<LambdaResult> {
    let mut report = Report::new();
    let mut spectra = Vec::new();
    let mut minimum = None;
    let mut rng = config.rng_for(lambda);
    let angles = [EulerAngles::new(0.3, 1.1, 4.0)?, EulerAngles::new(5.5, 2.9, 0.2)?];
    if config.d == 1 {
        let c = build_circle(lambda, config.k)?;
        if config.has(Suite::Relations) {
            report.extend(verify_circle_relations(&c, config.tol));
        }
        if config.has(Suite::Spectra) {
            report.extend(verify_circle_spectra(lambda..=lambda));
            spectra = circle_spectrum_rows(lambda, config.sharpness());
        }
        if config.has(Suite::Lie) {
            let e = reconstruct_su2(&c)?;
            report.extend(e.verify(config.tol));
            let rt = e.round_trip(&c)?;
            report.push(Check::residual("su2.round_trip", Some(lambda), rt.global, config.tol));
            report.push(Check::residual(
                "su2.round_trip_off_edge",
                Some(lambda),
                rt.off_edge,
                config.tol,
            ));
        }
        if config.has(Suite::Scs) {
            report.extend(verify_circle_scs(&c, &mut rng, RANDOM_STATES)?);
        }
        if config.has(Suite::Minimize) {
            let (min, r) = verify_circle_minimizer(&c, &config.minimize_options(lambda))?;
            report.extend(r);
            minimum = Some(min.value);
        }
    } else {
        let s = build_sphere(lambda, config.k)?;
        if config.has(Suite::Relations) {
            report.extend(verify_sphere_relations(&s, config.tol));
        }
        if config.has(Suite::Spectra) {
            report.extend(verify_sphere_spectra(lambda..=lambda));
            spectra = sphere_spectrum_rows(lambda, config.sharpness());
        }
        if config.has(Suite::Lie) {
            let gens = reconstruct_so4(&s)?;
            let tol = config.tol.max(1e-9);
            report.extend(gens.verify(tol));
            let rt = gens.round_trip(&s);
            report.push(Check::residual("so4.round_trip", Some(lambda), rt.global, config.tol));
            report.push(Check::residual(
                "so4.round_trip_off_edge",
                Some(lambda),
                rt.off_edge,
                config.tol,
            ));
            report.extend(verify_rotations(&s, &angles, config.tol));
        }
        if config.has(Suite::Scs) {
            report.extend(verify_sphere_scs(&s, &mut rng, RANDOM_STATES)?);
        }
        if config.has(Suite::Minimize) {
            let (min, r) = verify_sphere_minimizer(&s, &config.minimize_options(lambda))?;
            report.extend(r);
            minimum = Some(min.value);
        }
    }
    Ok(LambdaResult {
        report,
        spectra,
        minimum,
    })
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::InvalidParameter(format!("cannot start {n} workers: {e}"))),
    }
}

/// Runs the selected suites for every truncation in the range.
pub fn run_scan(config: &ScanConfig) -> Result<ScanOutcome> {
    config.validate()?;
    let lambdas: Vec<u32> = config.lambdas().collect();
    let results: Vec<LambdaResult> = with_pool(config.jobs, || {
        lambdas
            .par_iter()
            .map(|&lambda| scan_one(config, lambda))
            .collect::<Result<Vec<_>>>()
    })??;

    let mut report = Report::new();
    let mut spectra = Vec::new();
    let mut minima = Vec::new();
    for (lambda, r) in lambdas.iter().zip(results) {
        report.extend(r.report);
        spectra.extend(r.spectra);
        if let Some(v) = r.minimum {
            minima.push((*lambda, v));
        }
    }
    if minima.len() >= 2 {
        let margin = minima.windows(2).map(|w| w[0].1 - w[1].1).fold(f64::INFINITY, f64::min);
        let tag = if config.d == 1 {
            "circle.min_dispersion_decreasing"
        } else {
            "sphere.min_dispersion_decreasing"
        };
        report.push(Check::flag(tag, None, margin > 0.0, margin));
    }
    let summary = Summary {
        passed: report.passed(),
        failed: report.failed(),
    };
    Ok(ScanOutcome {
        report: ScanReport {
            config: config.clone(),
            checks: report.checks,
            summary,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        spectra,
    })
}

/// One point of plot-ready data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub series: String,
    pub lambda: u32,
    pub x: f64,
    pub y: f64,
}

fn row(series: &str, lambda: u32, x: f64, y: f64) -> PlotRow {
    PlotRow {
        series: series.to_string(),
        lambda,
        x,
        y,
    }
}

/// Minimal dispersion, top eigenvalue and eigenvalue ladders, each with its bound.
///
/// Series: `dispersion`, `dispersion_bound`, `alpha1`, `alpha1_bound`
/// (`x = Lambda`) and `interlacing` (`x = h`, `y` the `h`-th largest eigenvalue).
/// On the sphere the top eigenvalue and ladders are those of the `m = 0` block,
/// and the bound on the top eigenvalue starts at `Lambda = 2`.
pub fn emit_plot_data(config: &ScanConfig) -> Result<Vec<PlotRow>> {
    config.validate()?;
    let lambdas: Vec<u32> = config.lambdas().collect();
    let per_lambda = with_pool(config.jobs, || {
        lambdas
            .par_iter()
            .map(|&lambda| -> Result<Vec<PlotRow>> {
                let x = lambda as f64;
                let opts = config.minimize_options(lambda);
                let (min, spectrum, bound) = if config.d == 1 {
                    let c = build_circle(lambda, config.k)?;
                    let min = crate::coherent::try_minimize_dispersion(&c, &opts)?;
                    let t = circle::circle_coordinate_matrix(lambda, config.sharpness());
                    (min, eig_bisection(&t, BISECTION_TOL), Some(circle_top_bound(lambda)))
                } else {
                    let s = build_sphere(lambda, config.k)?;
                    let min = crate::coherent::try_minimize_dispersion(&s, &opts)?;
                    let t = sphere::sphere_coordinate_block(lambda, config.sharpness(), 0);
                    let bound = (lambda >= 2).then(|| sphere_top_bound(lambda));
                    (min, eig_bisection(&t, BISECTION_TOL), bound)
                };
                let mut rows = vec![
                    row("dispersion", lambda, x, min.value),
                    row("dispersion_bound", lambda, x, minimum_bound(config.d, lambda)),
                    row("alpha1", lambda, x, spectrum.top()),
                ];
                if let Some(b) = bound {
                    rows.push(row("alpha1_bound", lambda, x, b));
                }
                for (h, &v) in spectrum.values().iter().enumerate() {
                    rows.push(row("interlacing", lambda, (h + 1) as f64, v));
                }
                Ok(rows)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut rows: Vec<PlotRow> = per_lambda.into_iter().flatten().collect();
    // group by series, then by lambda
    let order = [
        "dispersion",
        "dispersion_bound",
        "alpha1",
        "alpha1_bound",
        "interlacing",
    ];
    rows.sort_by_key(|r| order.iter().position(|s| *s == r.series).unwrap_or(order.len()));
    Ok(rows)
}

/// Writes `series,lambda,x,y` rows.
pub fn write_plot_csv<W: Write>(mut w: W, rows: &[PlotRow]) -> io::Result<()> {
    writeln!(w, "series,lambda,x,y")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.series, r.lambda, r.x, r.y)?;
    }
    Ok(())
}
