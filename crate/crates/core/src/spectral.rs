//! Zero-diagonal hermitian tridiagonal matrices and their spectra.
//!
//! The characteristic polynomials `p_n(a) = det(a I - A_n)` of the nested
//! family obey `p_{k+1} = a p_k - |a_k|^2 p_{k-1}`, so the spectrum depends
//! only on the moduli of the off-diagonal entries. The recurrence doubles as a
//! Sturm sequence: the number of sign changes along `p_0, ..., p_n` counts the
//! eigenvalues above the shift, which drives a plain bisection solver.
//!
//! The coordinate matrices of both fuzzy spaces are of this form, and
//! [`verify_circle_spectra`] / [`verify_sphere_spectra`] check the
//! structural properties of their spectra (symmetry, interlacing in the
//! truncation, ordering of the top eigenvalues, lower bounds).

use std::io::{self, Write};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circle::circle_coordinate_matrix;
use crate::error::{Error, Result};
use crate::linop::{hermitian_eig, Operator};
use crate::report::{Check, Report};
use crate::sphere::sphere_coordinate_block;
use crate::Sharpness;

/// Absolute accuracy of the bisection solver used by the theorem checks.
pub const BISECTION_TOL: f64 = 1e-12;

/// Two eigenvalues closer than this are flagged degenerate.
pub const SIMPLE_GAP: f64 = 10.0 * BISECTION_TOL;

/// Hermitian tridiagonal matrix with identically zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagSpec {
    offdiag: Vec<Complex64>,
}

impl TridiagSpec {
    /// `n x n` matrix with superdiagonal `offdiag` (length `n - 1`).
    pub fn new(n: usize, offdiag: Vec<Complex64>) -> Result<Self> {
        if n == 0 || offdiag.len() + 1 != n {
            return Err(Error::DimensionMismatch {
                expected: n.saturating_sub(1),
                found: offdiag.len(),
            });
        }
        Ok(Self { offdiag })
    }

    pub fn from_real(offdiag: &[f64]) -> Self {
        Self {
            offdiag: offdiag.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        }
    }

    /// Constant off-diagonal `value`.
    pub fn toeplitz(n: usize, value: f64) -> Self {
        assert!(n >= 1);
        Self::from_real(&vec![value; n - 1])
    }

    pub fn size(&self) -> usize {
        self.offdiag.len() + 1
    }

    pub fn offdiag(&self) -> &[Complex64] {
        &self.offdiag
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.offdiag.iter().map(|a| a.norm()).collect()
    }

    /// Same moduli, phases replaced by `phases` (one per off-diagonal entry).
    pub fn with_phases(&self, phases: &[f64]) -> Self {
        assert_eq!(phases.len(), self.offdiag.len());
        Self {
            offdiag: self
                .offdiag
                .iter()
                .zip(phases)
                .map(|(a, &t)| Complex64::from_polar(a.norm(), t))
                .collect(),
        }
    }

    /// Leading `n x n` principal block.
    pub fn leading_block(&self, n: usize) -> Self {
        assert!(n >= 1 && n <= self.size());
        Self {
            offdiag: self.offdiag[..n - 1].to_vec(),
        }
    }

    /// Reversed basis order (the same matrix up to a permutation).
    pub fn reversed(&self) -> Self {
        Self {
            offdiag: self.offdiag.iter().rev().map(|a| a.conj()).collect(),
        }
    }

    pub fn to_operator(&self) -> Operator {
        let n = self.size();
        let mut op = Operator::zeros(n, "tridiag");
        for (h, &a) in self.offdiag.iter().enumerate() {
            op[(h, h + 1)] = a;
            op[(h + 1, h)] = a.conj();
        }
        op
    }

    fn gershgorin_radius(&self) -> f64 {
        2.0 * self.offdiag.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Real eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    /// `degenerate[h]` is set when `values[h]` lies within [`SIMPLE_GAP`] of a neighbour.
    degenerate: Vec<bool>,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let degenerate = degeneracy_flags(&values, SIMPLE_GAP);
        Self { values, degenerate }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn degenerate(&self) -> &[bool] {
        &self.degenerate
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest eigenvalue.
    pub fn top(&self) -> f64 {
        self.values[0]
    }

    /// Smallest distance between consecutive eigenvalues (`inf` for fewer than two).
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_simple(&self, threshold: f64) -> bool {
        self.min_gap() > threshold
    }

    /// Eigenvalues strictly above `threshold`.
    pub fn positive_part(&self, threshold: f64) -> Spectrum {
        Spectrum::new(self.values.iter().copied().filter(|&v| v > threshold).collect())
    }

    pub fn max_deviation(&self, other: &Spectrum) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn degeneracy_flags(values: &[f64], threshold: f64) -> Vec<bool> {
    let n = values.len();
    (0..n)
        .map(|h| {
            (h > 0 && values[h - 1] - values[h] <= threshold) || (h + 1 < n && values[h] - values[h + 1] <= threshold)
        })
        .collect()
}

/// Value of `p_n` at a shift, with the Sturm count of eigenvalues above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharPoly {
    pub value: f64,
    pub sign_changes: usize,
}

/// Evaluates `p_n(alpha)` by the three-term recurrence.
///
/// The pair `(p_k, p_{k-1})` is rescaled by `max(|p_k|, 1)` every step and
/// the scale is accumulated in log form. An exact zero inherits the sign of
/// its predecessor, so `sign_changes` counts eigenvalues strictly above `alpha`.
pub fn charpoly_eval(t: &TridiagSpec, alpha: f64) -> CharPoly {
    let mut prev = 1.0_f64;
    let mut cur = alpha;
    let mut log_scale = 0.0_f64;
    let mut prev_sign = 1.0_f64;
    let mut changes = 0usize;

    let mut tally = |p: f64, prev_sign: &mut f64| {
        let s = if p == 0.0 { *prev_sign } else { p.signum() };
        if s != *prev_sign {
            changes += 1;
        }
        *prev_sign = s;
    };
    tally(cur, &mut prev_sign);

    for a in &t.offdiag {
        let next = alpha * cur - a.norm_sqr() * prev;
        prev = cur;
        cur = next;
        tally(cur, &mut prev_sign);
        let s = cur.abs().max(1.0);
        if s > 1.0 {
            cur /= s;
            prev /= s;
            log_scale += s.ln();
        }
    }
    let value = if log_scale == 0.0 { cur } else { cur * log_scale.exp() };
    CharPoly {
        value,
        sign_changes: changes,
    }
}

/// Number of eigenvalues strictly greater than `alpha`.
pub fn count_above(t: &TridiagSpec, alpha: f64) -> usize {
    charpoly_eval(t, alpha).sign_changes
}

/// All eigenvalues by Sturm bisection, to absolute accuracy `tol`.
pub fn eig_bisection(t: &TridiagSpec, tol: f64) -> Spectrum {
    assert!(tol > 0.0, "bisection tolerance must be positive");
    let n = t.size();
    let radius = t.gershgorin_radius();
    if radius == 0.0 {
        return Spectrum::new(vec![0.0; n]);
    }
    let bracket = radius * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    let values = (1..=n)
        .map(|h| {
            // h-th largest: count_above(lo) >= h > count_above(hi)
            let (mut lo, mut hi) = (-bracket, bracket);
            for _ in 0..200 {
                if hi - lo <= 0.5 * tol {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if count_above(t, mid) >= h {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    Spectrum::new(values)
}

/// True iff the multiset of eigenvalues is invariant under negation.
pub fn check_spectrum_symmetry(s: &Spectrum, tol: f64) -> bool {
    symmetry_defect(s) <= tol
}

fn symmetry_defect(s: &Spectrum) -> f64 {
    let v = s.values();
    let n = v.len();
    (0..n).map(|i| (v[i] + v[n - 1 - i]).abs()).fold(0.0, f64::max)
}

/// Strict interlacing `outer_1 > inner_1 > outer_2 > ... > inner_n > outer_{n+1}`.
pub fn check_interlacing(inner: &Spectrum, outer: &Spectrum) -> Result<bool> {
    if outer.len() != inner.len() + 1 {
        return Err(Error::InterlacingSize {
            inner: inner.len(),
            outer: outer.len(),
        });
    }
    Ok(interlacing_margin(inner, outer) > 0.0)
}

/// Smallest gap in the merged chain; positive iff interlacing is strict.
fn interlacing_margin(inner: &Spectrum, outer: &Spectrum) -> f64 {
    let (i, o) = (inner.values(), outer.values());
    let mut margin = f64::INFINITY;
    for h in 0..i.len() {
        margin = margin.min(o[h] - i[h]).min(i[h] - o[h + 1]);
    }
    margin
}

/// For every leading block `A_n` of `t`, checks that its spectrum interlaces with `A_{n+1}`.
pub fn check_nested_interlacing(t: &TridiagSpec) -> bool {
    let spectra: Vec<Spectrum> = (1..=t.size())
        .map(|n| hermitian_eig(&t.leading_block(n).to_operator()).map(|(s, _)| s))
        .collect::<Result<_>>()
        .expect("tridiagonal matrices are hermitian");
    spectra
        .windows(2)
        .all(|w| check_interlacing(&w[0], &w[1]).unwrap_or(false))
}

/// Compares the spectrum of `t` with those of `|t|` and of `t` with random phases.
///
/// Uses the dense eigensolver, which unlike the recurrence sees the phases.
pub fn spectrum_invariance_under_phases<R: Rng + ?Sized>(t: &TridiagSpec, rng: &mut R) -> bool {
    let spectrum = |m: &TridiagSpec| {
        hermitian_eig(&m.to_operator())
            .expect("tridiagonal matrices are hermitian")
            .0
    };
    let base = spectrum(t);
    let modulus = spectrum(&t.with_phases(&vec![0.0; t.offdiag.len()]));
    let phases: Vec<f64> = (0..t.offdiag.len())
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    let rotated = spectrum(&t.with_phases(&phases));
    base.max_deviation(&modulus) <= 1e-10 && base.max_deviation(&rotated) <= 1e-10
}

/// Largest gap between consecutive eigenvalues after mapping through `arccos`.
pub fn max_arccos_gap(s: &Spectrum) -> f64 {
    let angles: Vec<f64> = s.values().iter().map(|v| v.clamp(-1.0, 1.0).acos()).collect();
    angles.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
}

/// `1 - pi^2 / (8 (Lambda+1)^2)`.
pub fn circle_top_bound(lambda: u32) -> f64 {
    let l = lambda as f64 + 1.0;
    1.0 - std::f64::consts::PI.powi(2) / (8.0 * l * l)
}

/// `1 - pi^2 / (2 (Lambda+2)^2)`, valid for `Lambda >= 2`.
pub fn sphere_top_bound(lambda: u32) -> f64 {
    let l = lambda as f64 + 2.0;
    1.0 - std::f64::consts::PI.powi(2) / (2.0 * l * l)
}

fn solver_agreement(t: &TridiagSpec, bisected: &Spectrum) -> f64 {
    let dense = hermitian_eig(&t.to_operator())
        .expect("tridiagonal matrices are hermitian")
        .0;
    bisected.max_deviation(&dense)
}

/// Spectral properties of the circle coordinate `X(Lambda)` for every `Lambda` in `range`,
/// with the default sharpness of each truncation.
pub fn verify_circle_spectra(range: std::ops::RangeInclusive<u32>) -> Report {
    let mut report = Report::new();
    let spectrum_at = |lambda: u32| {
        let t = circle_coordinate_matrix(lambda, Sharpness::Default);
        let s = eig_bisection(&t, BISECTION_TOL);
        (t, s)
    };
    let mut next = spectrum_at(*range.start());
    for lambda in range {
        let (t, s) = next;
        next = spectrum_at(lambda + 1);
        let lam = Some(lambda);
        report.push(Check::residual(
            "circle.spectrum.solver_agreement",
            lam,
            solver_agreement(&t, &s),
            1e-10,
        ));
        report.push(Check::residual(
            "circle.spectrum.symmetry",
            lam,
            symmetry_defect(&s),
            1e-10,
        ));
        report.push(Check::at_least("circle.spectrum.simple", lam, s.min_gap(), SIMPLE_GAP));
        let inner = s.positive_part(SIMPLE_GAP);
        let outer = next.1.positive_part(SIMPLE_GAP);
        let (ok, margin) = match check_interlacing(&inner, &outer) {
            Ok(ok) => (ok, interlacing_margin(&inner, &outer)),
            Err(_) => (false, f64::NAN),
        };
        report.push(Check::flag("circle.spectrum.interlacing", lam, ok, margin));
        report.push(Check::at_least(
            "circle.spectrum.top_bound",
            lam,
            s.top(),
            circle_top_bound(lambda),
        ));
    }
    report
}

/// Spectral properties of every block `X_m(Lambda)`, `m = 0..=Lambda`, for `Lambda` in `range`.
///
/// The lower bound on the top eigenvalue is only asserted for `Lambda >= 2`.
pub fn verify_sphere_spectra(range: std::ops::RangeInclusive<u32>) -> Report {
    let mut report = Report::new();
    let blocks_at = |lambda: u32| -> Vec<(TridiagSpec, Spectrum)> {
        (0..=lambda as i64)
            .map(|m| {
                let t = sphere_coordinate_block(lambda, Sharpness::Default, m);
                let s = eig_bisection(&t, BISECTION_TOL);
                (t, s)
            })
            .collect()
    };
    let mut next = blocks_at(*range.start());
    for lambda in range {
        let blocks = next;
        next = blocks_at(lambda + 1);
        let lam = Some(lambda);
        for (m, (t, s)) in blocks.iter().enumerate() {
            let m = m as i64;
            report.push(
                Check::residual("sphere.spectrum.solver_agreement", lam, solver_agreement(t, s), 1e-10).with_m(m),
            );
            report.push(Check::residual("sphere.spectrum.symmetry", lam, symmetry_defect(s), 1e-10).with_m(m));
            report.push(Check::at_least("sphere.spectrum.simple", lam, s.min_gap(), SIMPLE_GAP).with_m(m));
            let outer = &next[m as usize].1;
            let (ok, margin) = match check_interlacing(s, outer) {
                Ok(ok) => (ok, interlacing_margin(s, outer)),
                Err(_) => (false, f64::NAN),
            };
            report.push(Check::flag("sphere.spectrum.interlacing", lam, ok, margin).with_m(m));
        }
        let tops: Vec<f64> = blocks.iter().map(|(_, s)| s.top()).collect();
        let margin = tops.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        report.push(Check::flag(
            "sphere.spectrum.top_decreases_in_m",
            lam,
            margin > 0.0,
            margin,
        ));
        if lambda >= 2 {
            report.push(Check::at_least("sphere.spectrum.top_bound", lam, tops[0], sphere_top_bound(lambda)).with_m(0));
        }
    }
    report
}

/// Both spectral suites for `Lambda = 1..=lambda_max`.
pub fn verify_spectral_structure(lambda_max: u32) -> Result<Report> {
    if lambda_max < 2 {
        return Err(Error::InvalidTruncation(format!(
            "spectral checks need lambda_max >= 2, got {lambda_max}"
        )));
    }
    let mut report = verify_circle_spectra(1..=lambda_max);
    report.extend(verify_sphere_spectra(1..=lambda_max));
    Ok(report)
}

/// One row of a spectra export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub lambda: u32,
    pub m: Option<i64>,
    pub h: usize,
    pub eigenvalue: f64,
}

/// Rows for the circle coordinate at `lambda` (`m` empty).
pub fn circle_spectrum_rows(lambda: u32, k: Sharpness) -> Vec<SpectrumRow> {
    let s = eig_bisection(&circle_coordinate_matrix(lambda, k), BISECTION_TOL);
    s.values()
        .iter()
        .enumerate()
        .map(|(h, &eigenvalue)| SpectrumRow {
            lambda,
            m: None,
            h: h + 1,
            eigenvalue,
        })
        .collect()
}

/// Rows for every block `m = -lambda..=lambda` of the sphere coordinate.
pub fn sphere_spectrum_rows(lambda: u32, k: Sharpness) -> Vec<SpectrumRow> {
    let l = lambda as i64;
    (-l..=l)
        .flat_map(|m| {
            let s = eig_bisection(&sphere_coordinate_block(lambda, k, m), BISECTION_TOL);
            s.values()
                .iter()
                .enumerate()
                .map(|(h, &eigenvalue)| SpectrumRow {
                    lambda,
                    m: Some(m),
                    h: h + 1,
                    eigenvalue,
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Writes `lambda,m,h,eigenvalue` rows; `m` is left empty for the circle.
pub fn write_spectra_csv<W: Write>(mut w: W, rows: &[SpectrumRow]) -> io::Result<()> {
    writeln!(w, "lambda,m,h,eigenvalue")?;
    for r in rows {
        let m = r.m.map(|m| m.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{}", r.lambda, m, r.h, r.eigenvalue)?;
    }
    Ok(())
}
