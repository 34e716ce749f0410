//! Finite matrix models of the O(2)-covariant fuzzy circle and the
//! O(3)-covariant fuzzy sphere.
//!
//! A truncation `Lambda` keeps the angular-momentum states with
//! `l <= Lambda`; the coordinates `x_i` are explicit sparse matrices on that
//! space whose commutators are proportional to the angular momentum and whose
//! square `x^2` stays close to one. The crate builds these spaces at any
//! truncation and checks, numerically and to rounding accuracy:
//!
//! * the algebraic relations of each space ([`circle`], [`sphere`]),
//! * the spectral structure of the coordinates ([`spectral`]),
//! * the identification with `su(2)` and `so(4)` representations ([`lierep`]),
//! * uncertainty relations, coherent-state frames and the states of minimal
//!   spatial dispersion ([`coherent`]).
//!
//! [`scan`] runs all suites over a range of truncations and produces the
//! reports written by the `fuzzy` command-line tool.

pub mod circle;
pub mod coherent;
pub mod error;
pub mod lierep;
pub mod linop;
pub mod report;
pub mod scan;
pub mod spectral;
pub mod sphere;

pub use circle::{build_circle, FuzzyCircle};
pub use error::{Error, Result};
pub use linop::{Operator, State};
pub use report::{Check, Report};
pub use spectral::{Spectrum, TridiagSpec};
pub use sphere::{build_madore, build_sphere, FuzzySphere, MadoreSphere};

/// Smallest admissible sharpness, `Lambda^2 (Lambda+1)^2`.
pub fn min_sharpness(lambda: u32) -> f64 {
    let l = lambda as f64;
    l * l * (l + 1.0) * (l + 1.0)
}

/// Sharpness used when none is given: the minimum, or 1 for the degenerate `Lambda = 0`.
pub fn default_sharpness(lambda: u32) -> f64 {
    min_sharpness(lambda).max(1.0)
}

/// How `k` is chosen when a coordinate matrix is produced without building a space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Sharpness {
    /// [`default_sharpness`] of the truncation.
    #[default]
    Default,
    Value(f64),
    /// The `k -> infinity` limit, taken analytically.
    Infinite,
}

impl Sharpness {
    /// `None` for the infinite limit.
    pub fn resolve(self, lambda: u32) -> Option<f64> {
        match self {
            Sharpness::Default => Some(default_sharpness(lambda)),
            Sharpness::Value(k) => Some(k),
            Sharpness::Infinite => None,
        }
    }
}

pub(crate) fn check_sharpness(lambda: u32, k: Option<f64>) -> Result<f64> {
    let min = min_sharpness(lambda);
    let k = k.unwrap_or_else(|| default_sharpness(lambda));
    if !k.is_finite() || k < min || k <= 0.0 {
        return Err(Error::SharpnessTooSmall { k, min });
    }
    Ok(k)
}
