//! The O(2)-covariant fuzzy circle.
//!
//! The Hilbert space is spanned by the eigenvectors `psi_n` of the angular
//! momentum `L`, `n = -Lambda..=Lambda`, stored in descending order
//! (`psi_Lambda` first). The coordinates `x_+ = x_1 + i x_2` and
//! `x_- = x_+^dag` shift `n` by one unit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linop::{c, commutator, relative_residual, Operator};
use crate::report::{Check, Report};
use crate::spectral::TridiagSpec;
use crate::{check_sharpness, Sharpness};

/// Matrix element of `x_+` between `psi_n` and `psi_{n+1}`.
///
/// [`CoefficientForm::Exact`] is `sqrt(1 + n(n+1)/k)`; [`CoefficientForm::FirstOrder`]
/// is its expansion `1 + n(n+1)/(2k)`, which satisfies the algebraic
/// relations only up to `O(1/k^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientForm {
    #[default]
    Exact,
    FirstOrder,
}

impl CoefficientForm {
    fn raising(self, n: i64, k: f64) -> f64 {
        let q = (n * (n + 1)) as f64 / k;
        match self {
            CoefficientForm::Exact => (1.0 + q).sqrt(),
            CoefficientForm::FirstOrder => 1.0 + 0.5 * q,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FuzzyCircle {
    pub lambda: u32,
    pub k: f64,
    pub form: CoefficientForm,
    pub l: Operator,
    pub x_plus: Operator,
    pub x_minus: Operator,
    pub x1: Operator,
    pub x2: Operator,
    pub x_squared: Operator,
}

impl FuzzyCircle {
    pub fn dim(&self) -> usize {
        2 * self.lambda as usize + 1
    }

    /// Position of `psi_n` in the basis.
    pub fn index(&self, n: i64) -> usize {
        assert!(n.abs() <= self.lambda as i64, "n out of range");
        (self.lambda as i64 - n) as usize
    }

    /// Basis labels `n` in storage order.
    pub fn labels(&self) -> Vec<i64> {
        let l = self.lambda as i64;
        (-l..=l).rev().collect()
    }

    /// Projector on `C psi_n`.
    pub fn projector(&self, n: i64) -> Operator {
        let mut p = Operator::zeros(self.dim(), format!("P_{n}"));
        let i = self.index(n);
        p[(i, i)] = c(1.0, 0.0);
        p
    }
}

/// Builds the fuzzy circle with the exact coefficients.
///
/// `k` defaults to `Lambda^2 (Lambda+1)^2`, the smallest value allowed.
pub fn build_circle(lambda: u32, k: Option<f64>) -> Result<FuzzyCircle> {
    build_circle_with(lambda, k, CoefficientForm::Exact)
}

pub fn build_circle_with(lambda: u32, k: Option<f64>, form: CoefficientForm) -> Result<FuzzyCircle> {
    if lambda < 1 {
        return Err(Error::InvalidTruncation("the fuzzy circle needs Lambda >= 1".into()));
    }
    let k = check_sharpness(lambda, k)?;
    let lam = lambda as i64;
    let dim = 2 * lambda as usize + 1;
    let index = |n: i64| (lam - n) as usize;

    let l = Operator::from_diagonal(&(-lam..=lam).rev().map(|n| n as f64).collect::<Vec<_>>(), "L");
    let mut x_plus = Operator::zeros(dim, "x+");
    for n in -lam..lam {
        x_plus[(index(n + 1), index(n))] = c(form.raising(n, k), 0.0);
    }
    let x_minus = x_plus.adjoint().with_label("x-");
    let x1 = (&x_plus + &x_minus).scale_real(0.5).with_label("x1");
    let x2 = (&x_plus - &x_minus).scale(Complex64::new(0.0, -0.5)).with_label("x2");
    let x_squared = (&(&x_plus * &x_minus) + &(&x_minus * &x_plus))
        .scale_real(0.5)
        .with_label("x^2");
    Ok(FuzzyCircle {
        lambda,
        k,
        form,
        l,
        x_plus,
        x_minus,
        x1,
        x2,
        x_squared,
    })
}

/// Checks the defining relations of the fuzzy circle.
///
/// Everything is recomputed from `l`, `x_plus` and `x_minus`, so a corrupted
/// coefficient shows up in the residuals.
pub fn verify_circle_relations(circle: &FuzzyCircle, tol: f64) -> Report {
    let lam = Some(circle.lambda);
    let lambda = circle.lambda as i64;
    let dim = circle.dim();
    let id = Operator::identity(dim);
    let edge = 1.0 + (lambda * (lambda + 1)) as f64 / circle.k;
    let p_top = circle.projector(lambda);
    let p_bottom = circle.projector(-lambda);
    let mut report = Report::new();

    let comm_plus = commutator(&circle.l, &circle.x_plus).expect("same space");
    report.push(Check::residual(
        "circle.L_xplus_commutator",
        lam,
        relative_residual(&comm_plus, &circle.x_plus),
        tol,
    ));
    let comm_minus = commutator(&circle.l, &circle.x_minus).expect("same space");
    report.push(Check::residual(
        "circle.L_xminus_commutator",
        lam,
        relative_residual(&comm_minus, &-&circle.x_minus),
        tol,
    ));
    report.push(Check::residual(
        "circle.xplus_adjoint",
        lam,
        relative_residual(&circle.x_plus.adjoint(), &circle.x_minus),
        tol,
    ));
    report.push(Check::residual(
        "circle.L_hermitian",
        lam,
        relative_residual(&circle.l.adjoint(), &circle.l),
        tol,
    ));

    let bracket = commutator(&circle.x_plus, &circle.x_minus).expect("same space");
    let mut expected = circle.l.scale_real(-2.0 / circle.k);
    expected.add_scaled(c(edge, 0.0), &(&p_top - &p_bottom));
    report.push(Check::residual(
        "circle.xplus_xminus_commutator",
        lam,
        relative_residual(&bracket, &expected),
        tol,
    ));

    let x_sq = (&(&circle.x_plus * &circle.x_minus) + &(&circle.x_minus * &circle.x_plus)).scale_real(0.5);
    let mut expected = &id + &(&circle.l * &circle.l).scale_real(1.0 / circle.k);
    expected.add_scaled(c(-0.5 * edge, 0.0), &(&p_top + &p_bottom));
    report.push(Check::residual(
        "circle.x_squared",
        lam,
        relative_residual(&x_sq, &expected),
        tol,
    ));

    let mut poly = id.clone();
    for n in -lambda..=lambda {
        let mut shifted = circle.l.clone();
        shifted.add_scaled(c(-(n as f64), 0.0), &id);
        poly = &poly * &shifted;
    }
    report.push(Check::residual(
        "circle.L_minimal_polynomial",
        lam,
        poly.frobenius_norm(),
        tol,
    ));

    let power = 2 * circle.lambda + 1;
    report.push(Check::residual(
        "circle.xplus_nilpotent",
        lam,
        circle.x_plus.pow(power).frobenius_norm(),
        tol,
    ));
    report.push(Check::residual(
        "circle.xminus_nilpotent",
        lam,
        circle.x_minus.pow(power).frobenius_norm(),
        tol,
    ));
    report
}

/// Matrix of `x_1` on `psi_Lambda, ..., psi_-Lambda`, read off the built operator.
pub fn coordinate_matrix(circle: &FuzzyCircle) -> TridiagSpec {
    let offdiag: Vec<f64> = (0..circle.dim() - 1).map(|i| circle.x1[(i, i + 1)].re).collect();
    TridiagSpec::from_real(&offdiag)
}

/// `X(Lambda)` straight from the coefficients; [`Sharpness::Infinite`] gives the
/// Toeplitz limit with every off-diagonal entry equal to `1/2`.
pub fn circle_coordinate_matrix(lambda: u32, k: Sharpness) -> TridiagSpec {
    let lam = lambda as i64;
    let offdiag: Vec<f64> = match k.resolve(lambda) {
        None => vec![0.5; 2 * lambda as usize],
        Some(k) => (-lam + 1..=lam)
            .rev()
            .map(|n| 0.5 * (1.0 + (n * (n - 1)) as f64 / k).sqrt())
            .collect(),
    };
    TridiagSpec::from_real(&offdiag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: f64) -> bool {
        (a - c(b, 0.0)).norm() < 1e-14
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(build_circle(0, None), Err(Error::InvalidTruncation(_))));
        assert!(matches!(
            build_circle(2, Some(35.0)),
            Err(Error::SharpnessTooSmall { min, .. }) if min == 36.0
        ));
        assert!(build_circle(2, Some(36.0)).is_ok());
    }

    #[test]
    fn lambda_one_actions() {
        let s = build_circle(1, Some(4.0)).unwrap();
        let (m1, z, p1) = (s.index(-1), s.index(0), s.index(1));
        assert!(close(s.x_plus[(z, m1)], 1.0));
        assert!(close(s.x_plus[(p1, z)], 1.0));
        // x+ psi_1 = 0
        assert!((0..3).all(|i| s.x_plus[(i, p1)].norm() == 0.0));
        assert!(close(s.x_squared[(z, z)], 1.0));
        assert!(close(s.x_squared[(p1, p1)], 0.5));
        assert!(close(s.x_squared[(m1, m1)], 0.5));
        assert!(s.x_squared.is_diagonal());
    }

    #[test]
    fn l_is_diagonal_with_integer_eigenvalues() {
        for lambda in [1u32, 4, 9] {
            let s = build_circle(lambda, None).unwrap();
            assert!(s.l.is_diagonal());
            let top = s.index(lambda as i64);
            assert_eq!(s.l[(top, top)], c(lambda as f64, 0.0));
            assert_eq!(s.labels()[0], lambda as i64);
        }
    }

    #[test]
    fn relations_hold_small_cases() {
        let s = build_circle(1, Some(4.0)).unwrap();
        let report = verify_circle_relations(&s, 1e-12);
        assert!(report.all_pass(), "{report:?}");
        let z = s.index(1);
        let bracket = commutator(&s.x_plus, &s.x_minus).unwrap();
        assert!(close(bracket[(z, z)], 1.0));

        let s = build_circle(5, None).unwrap();
        assert!(verify_circle_relations(&s, 1e-10).all_pass());
    }

    #[test]
    fn perturbation_is_detected() {
        let mut s = build_circle(3, None).unwrap();
        let (i, j) = (s.index(1), s.index(0));
        s.x_plus[(i, j)] += c(0.1, 0.0);
        let report = verify_circle_relations(&s, 1e-10);
        let bracket = report.get("circle.xplus_xminus_commutator").unwrap();
        assert!(!bracket.pass && bracket.value > 1e-3);
    }

    #[test]
    fn first_order_coefficients_fail_at_second_order() {
        // Lambda = 1 has only n(n+1) = 0 links, so both forms coincide there
        let s = build_circle_with(1, Some(4.0), CoefficientForm::FirstOrder).unwrap();
        assert!(verify_circle_relations(&s, 1e-12).all_pass());

        let s = build_circle_with(2, None, CoefficientForm::FirstOrder).unwrap();
        let r = verify_circle_relations(&s, 1e-10);
        let x_sq = r.get("circle.x_squared").unwrap();
        assert!(!x_sq.pass);
        // defect 1/(2k^2) on each of psi_{+-1}, psi_{+-2}; the residual is relative to |x^2|
        let exact = build_circle(2, None).unwrap();
        let absolute = x_sq.value * exact.x_squared.frobenius_norm();
        assert!((absolute * s.k * s.k - 1.0).abs() < 1e-6);
        assert!(r.get("circle.L_xplus_commutator").unwrap().pass);
    }

    #[test]
    fn coordinate_matrix_examples() {
        let s = build_circle(1, Some(4.0)).unwrap();
        let t = coordinate_matrix(&s);
        assert_eq!(t, TridiagSpec::from_real(&[0.5, 0.5]));

        let limit = circle_coordinate_matrix(6, Sharpness::Infinite);
        assert!(limit.moduli().iter().all(|&a| a == 0.5));
        assert_eq!(limit.size(), 13);
    }

    #[test]
    fn coordinate_matrix_matches_closed_form_and_symmetry() {
        for lambda in [2u32, 5, 13] {
            let s = build_circle(lambda, None).unwrap();
            let built = coordinate_matrix(&s);
            let direct = circle_coordinate_matrix(lambda, Sharpness::Default);
            let dev = built
                .moduli()
                .iter()
                .zip(direct.moduli())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(dev < 1e-15);
            // link n <-> n-1 is invariant under n -> 1-n
            let a = built.moduli();
            assert!(a.iter().zip(a.iter().rev()).all(|(x, y)| (x - y).abs() < 1e-15));
            // b_n/2 against the first-order coefficients: O(1/k^2)
            let lam = lambda as i64;
            for (i, n) in (-lam + 1..=lam).rev().enumerate() {
                let first_order = 0.5 * (1.0 + (n * (n - 1)) as f64 / (2.0 * s.k));
                assert!((a[i] - first_order).abs() <= 0.0625 * ((n * (n - 1)) as f64 / s.k).powi(2) + 1e-16);
            }
        }
    }

    #[test]
    fn x_squared_eigenvalues() {
        for lambda in [1u32, 3, 10, 30] {
            let s = build_circle(lambda, None).unwrap();
            let upper = 1.0 + (lambda * (lambda + 1)) as f64 / s.k;
            for d in s.x_squared.diagonal() {
                assert!(d.re >= 0.5 - 1e-15 && d.re <= upper + 1e-15);
            }
            let interior_max = (1 - lambda as i64..lambda as i64)
                .map(|n| (s.x_squared[(s.index(n), s.index(n))].re - 1.0).abs())
                .fold(0.0, f64::max);
            assert!(interior_max <= ((lambda - 1) as f64).powi(2) / s.k + 1e-14);
        }
    }
}
