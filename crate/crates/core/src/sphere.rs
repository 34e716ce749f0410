//! The O(3)-covariant fuzzy sphere and the Madore–Hoppe comparator.
//!
//! Basis vectors `psi_l^m`, `l = 0..=Lambda`, `m = -l..=l`, are stored with
//! `l` ascending and then `m` ascending, so `psi_l^m` sits at `l^2 + l + m`
//! and each `l`-shell is a contiguous block. The coordinates change `l` by
//! one unit; their matrix elements are products of the factors
//! `c_l = sqrt(1 + l^2/k)` (with `c_0 = c_{Lambda+1} = 0`) and the
//! Clebsch–Gordan-type coefficients [`clebsch_a`].

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::coherent::{minimize_dispersion, MinimizeOptions};
use crate::error::{Error, Result};
use crate::linop::{c, commutator, relative_residual, relative_residual_all, HermitianEigen, Operator};
use crate::report::{Check, Report};
use crate::spectral::TridiagSpec;
use crate::{check_sharpness, Sharpness};

/// Position of `psi_l^m` in the basis.
#[inline]
pub fn basis_index(l: u32, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() <= l as u64);
    (l as i64 * l as i64 + l as i64 + m) as usize
}

/// Totally antisymmetric symbol on `{0, 1, 2}`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Coefficient `A_l^{a,m}` of the `l -> l-1` transition of `x_a`, `a` in `{-1, 0, 1}`.
///
/// `A^0 = sqrt((l+m)(l-m) / ((2l+1)(2l-1)))`,
/// `A^{+-} = +-sqrt((l-+m)(l-+m-1) / ((2l-1)(2l+1)))`.
pub fn clebsch_a(a: i64, l: i64, m: i64) -> f64 {
    let den = ((2 * l + 1) * (2 * l - 1)) as f64;
    let num = match a {
        0 => (l + m) * (l - m),
        1 => (l - m) * (l - m - 1),
        -1 => (l + m) * (l + m - 1),
        _ => panic!("a must be -1, 0 or 1"),
    };
    let mag = (num.max(0) as f64 / den).sqrt();
    if a == -1 {
        -mag
    } else {
        mag
    }
}

/// `B_l^{a,m} = A_{l+1}^{-a,m+a}`, the `l -> l+1` coefficient.
pub fn clebsch_b(a: i64, l: i64, m: i64) -> f64 {
    clebsch_a(-a, l + 1, m + a)
}

fn c_factor(l: i64, lambda: i64, k: f64) -> f64 {
    if l <= 0 || l > lambda {
        0.0
    } else {
        (1.0 + (l * l) as f64 / k).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct FuzzySphere {
    pub lambda: u32,
    pub k: f64,
    pub l_plus: Operator,
    pub l_minus: Operator,
    pub l1: Operator,
    pub l2: Operator,
    pub l3: Operator,
    pub l_squared: Operator,
    pub x_plus: Operator,
    pub x_minus: Operator,
    pub x1: Operator,
    pub x2: Operator,
    pub x3: Operator,
    pub x_squared: Operator,
    l2_eigen: OnceLock<HermitianEigen>,
}

impl FuzzySphere {
    pub fn dim(&self) -> usize {
        let n = self.lambda as usize + 1;
        n * n
    }

    /// `x_0`, an alias of `x_3`.
    pub fn x0(&self) -> &Operator {
        &self.x3
    }

    pub fn coordinates(&self) -> [&Operator; 3] {
        [&self.x1, &self.x2, &self.x3]
    }

    pub fn angular_momenta(&self) -> [&Operator; 3] {
        [&self.l1, &self.l2, &self.l3]
    }

    /// Labels `(l, m)` in storage order.
    pub fn labels(&self) -> Vec<(u32, i64)> {
        (0..=self.lambda)
            .flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)))
            .collect()
    }

    /// `m` of every basis vector.
    pub fn magnetic_numbers(&self) -> Vec<i64> {
        self.labels().into_iter().map(|(_, m)| m).collect()
    }

    /// Projector on the `L^2 = l(l+1)` eigenspace.
    pub fn projector(&self, l: u32) -> Operator {
        assert!(l <= self.lambda);
        let mut p = Operator::zeros(self.dim(), format!("P_{l}"));
        for m in -(l as i64)..=l as i64 {
            let i = basis_index(l, m);
            p[(i, i)] = c(1.0, 0.0);
        }
        p
    }

    /// Eigendecomposition of `L_2`, computed once.
    pub fn l2_eigen(&self) -> &HermitianEigen {
        self.l2_eigen
            .get_or_init(|| HermitianEigen::new(&self.l2).expect("L_2 is hermitian"))
    }
}

/// Builds `S^2_Lambda`; `k` defaults to `Lambda^2 (Lambda+1)^2` (1 for `Lambda = 0`).
pub fn build_sphere(lambda: u32, k: Option<f64>) -> Result<FuzzySphere> {
    let k = check_sharpness(lambda, k)?;
    let lam = lambda as i64;
    let dim = (lambda as usize + 1).pow(2);

    let mut l_plus = Operator::zeros(dim, "L+");
    let mut l3 = Operator::zeros(dim, "L3");
    let mut l_squared = Operator::zeros(dim, "L^2");
    let mut x_ops = [
        Operator::zeros(dim, "x-"),
        Operator::zeros(dim, "x0"),
        Operator::zeros(dim, "x+"),
    ];
    for l in 0..=lam {
        for m in -l..=l {
            let j = basis_index(l as u32, m);
            l3[(j, j)] = c(m as f64, 0.0);
            l_squared[(j, j)] = c((l * (l + 1)) as f64, 0.0);
            if m < l {
                l_plus[(basis_index(l as u32, m + 1), j)] = c((((l - m) * (l + m + 1)) as f64).sqrt(), 0.0);
            }
            for a in -1..=1i64 {
                let target_m = m + a;
                let op = &mut x_ops[(a + 1) as usize];
                if l >= 1 && target_m.abs() <= l - 1 {
                    op[(basis_index((l - 1) as u32, target_m), j)] += c(c_factor(l, lam, k) * clebsch_a(a, l, m), 0.0);
                }
                if l < lam {
                    op[(basis_index((l + 1) as u32, target_m), j)] +=
                        c(c_factor(l + 1, lam, k) * clebsch_b(a, l, m), 0.0);
                }
            }
        }
    }
    let [x_minus, x3, x_plus] = x_ops;
    let l_minus = l_plus.adjoint().with_label("L-");
    let half = 0.5;
    let minus_half_i = Complex64::new(0.0, -0.5);
    let l1 = (&l_plus + &l_minus).scale_real(half).with_label("L1");
    let l2 = (&l_plus - &l_minus).scale(minus_half_i).with_label("L2");
    let x1 = (&x_plus + &x_minus).scale_real(half).with_label("x1");
    let x2 = (&x_plus - &x_minus).scale(minus_half_i).with_label("x2");
    let x3 = x3.with_label("x3");
    let x_squared = (&(&(&x1 * &x1) + &(&x2 * &x2)) + &(&x3 * &x3)).with_label("x^2");
    Ok(FuzzySphere {
        lambda,
        k,
        l_plus,
        l_minus,
        l1,
        l2,
        l3,
        l_squared,
        x_plus,
        x_minus,
        x1,
        x2,
        x3,
        x_squared,
        l2_eigen: OnceLock::new(),
    })
}

fn commutator_table(
    left: [&Operator; 3],
    right: [&Operator; 3],
    rhs: impl Fn(usize, usize) -> Operator,
) -> (Vec<Operator>, Vec<Operator>) {
    let mut lhs_all = Vec::with_capacity(9);
    let mut rhs_all = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            lhs_all.push(commutator(left[i], right[j]).expect("same space"));
            rhs_all.push(rhs(i, j));
        }
    }
    (lhs_all, rhs_all)
}

fn epsilon_sum(i: usize, j: usize, ops: [&Operator; 3], factor: Complex64) -> Operator {
    let mut out = Operator::zeros(ops[0].dim(), "eps-sum");
    for (h, op) in ops.iter().enumerate() {
        let e = levi_civita(i, j, h);
        if e != 0.0 {
            out.add_scaled(factor * e, op);
        }
    }
    out
}

fn combined(lhs: &[Operator], rhs: &[Operator]) -> f64 {
    relative_residual_all(lhs.iter().zip(rhs.iter()))
}

/// Checks the defining relations of the fuzzy sphere.
///
/// The coordinate bracket is `[x_i, x_j] = i eps_ijh L_h (-1/k + K P_Lambda)`;
/// `L_h` commutes with `P_Lambda`, and the left, right and symmetrized
/// placements of the projector are all recorded.
pub fn verify_sphere_relations(s: &FuzzySphere, tol: f64) -> Report {
    let lam = Some(s.lambda);
    let lambda = s.lambda as i64;
    let k = s.k;
    let dim = s.dim();
    let id = Operator::identity(dim);
    let xs = s.coordinates();
    let ls = s.angular_momenta();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut report = Report::new();

    let herm_x: Vec<Operator> = xs.iter().map(|x| x.adjoint()).collect();
    let xs_owned: Vec<Operator> = xs.iter().map(|&x| x.clone()).collect();
    report.push(Check::residual(
        "sphere.x_hermitian",
        lam,
        combined(&herm_x, &xs_owned),
        tol,
    ));
    let herm_l: Vec<Operator> = ls.iter().map(|l| l.adjoint()).collect();
    let ls_owned: Vec<Operator> = ls.iter().map(|&l| l.clone()).collect();
    report.push(Check::residual(
        "sphere.L_hermitian",
        lam,
        combined(&herm_l, &ls_owned),
        tol,
    ));

    let (lhs, rhs) = commutator_table(ls, xs, |i, j| epsilon_sum(i, j, xs, i_unit));
    report.push(Check::residual("sphere.L_x_commutator", lam, combined(&lhs, &rhs), tol));
    let (lhs, rhs) = commutator_table(ls, ls, |i, j| epsilon_sum(i, j, ls, i_unit));
    report.push(Check::residual("sphere.L_L_commutator", lam, combined(&lhs, &rhs), tol));

    let mut contraction = Operator::zeros(dim, "x.L");
    for i in 0..3 {
        contraction = &contraction + &(xs[i] * ls[i]);
    }
    report.push(Check::residual(
        "sphere.xL_contraction",
        lam,
        contraction.frobenius_norm(),
        tol,
    ));

    let big_k = 1.0 / k + (1.0 + (lambda * lambda) as f64 / k) / (2 * lambda + 1) as f64;
    let p_top = s.projector(s.lambda);
    let mut correction = id.scale_real(-1.0 / k);
    correction.add_scaled(c(big_k, 0.0), &p_top);
    let (lhs, _) = commutator_table(xs, xs, |_, _| Operator::zeros(1, ""));
    let placements: [(&str, fn(&Operator, &Operator) -> Operator); 3] = [
        ("sphere.x_x_commutator", |lh, q| (&(lh * q) + &(q * lh)).scale_real(0.5)),
        ("sphere.x_x_commutator_projector_right", |lh, q| lh * q),
        ("sphere.x_x_commutator_projector_left", |lh, q| q * lh),
    ];
    for (tag, place) in placements {
        let rhs: Vec<Operator> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| place(&epsilon_sum(i, j, ls, i_unit), &correction))
            .collect();
        report.push(Check::residual(tag, lam, combined(&lhs, &rhs), tol));
    }

    let x_sq = &(&(xs[0] * xs[0]) + &(xs[1] * xs[1])) + &(xs[2] * xs[2]);
    let mut expected = &id + &(&s.l_squared + &id).scale_real(1.0 / k);
    let edge = (1.0 + ((lambda + 1) * (lambda + 1)) as f64 / k) * (lambda + 1) as f64 / (2 * lambda + 1) as f64;
    expected.add_scaled(c(-edge, 0.0), &p_top);
    report.push(Check::residual(
        "sphere.x_squared",
        lam,
        relative_residual(&x_sq, &expected),
        tol,
    ));

    let l_sq = &(&(ls[0] * ls[0]) + &(ls[1] * ls[1])) + &(ls[2] * ls[2]);
    let mut poly = id.clone();
    for l in 0..=lambda {
        let mut shifted = l_sq.clone();
        shifted.add_scaled(c(-((l * (l + 1)) as f64), 0.0), &id);
        poly = &poly * &shifted;
    }
    report.push(Check::residual(
        "sphere.L_squared_minimal_polynomial",
        lam,
        poly.frobenius_norm() / l_sq.frobenius_norm().max(1.0).powi(lambda as i32 + 1),
        tol,
    ));

    let mut worst = 0.0_f64;
    for l in 0..=s.lambda {
        let mut poly = s.projector(l);
        for m in -(l as i64)..=l as i64 {
            let mut shifted = s.l3.clone();
            shifted.add_scaled(c(-(m as f64), 0.0), &id);
            poly = &shifted * &poly;
        }
        worst = worst.max(poly.frobenius_norm());
    }
    report.push(Check::residual("sphere.L3_shell_polynomial", lam, worst, tol));

    let power = 2 * s.lambda + 1;
    report.push(Check::residual(
        "sphere.xplus_nilpotent",
        lam,
        s.x_plus.pow(power).frobenius_norm(),
        tol,
    ));
    report.push(Check::residual(
        "sphere.xminus_nilpotent",
        lam,
        s.x_minus.pow(power).frobenius_norm(),
        tol,
    ));
    report
}

/// Block of `x_3` on `span{psi_l^m : l = |m|..=Lambda}`, read off the built operator.
pub fn coordinate_block(s: &FuzzySphere, m: i64) -> TridiagSpec {
    assert!(m.unsigned_abs() <= s.lambda as u64, "|m| must not exceed Lambda");
    let ls: Vec<u32> = (m.unsigned_abs() as u32..=s.lambda).collect();
    let offdiag: Vec<f64> = ls
        .windows(2)
        .map(|w| s.x3[(basis_index(w[1], m), basis_index(w[0], m))].re)
        .collect();
    TridiagSpec::from_real(&offdiag)
}

/// `X_m(Lambda)` for `m = 0..=Lambda`.
pub fn coordinate_blocks(s: &FuzzySphere) -> BTreeMap<i64, TridiagSpec> {
    (0..=s.lambda as i64).map(|m| (m, coordinate_block(s, m))).collect()
}

/// `X_m(Lambda)` from the coefficients, off-diagonal `c_{l+1} A_{l+1}^{0,m}`.
/// In the infinite-sharpness limit all `c_l` are 1.
pub fn sphere_coordinate_block(lambda: u32, k: Sharpness, m: i64) -> TridiagSpec {
    assert!(m.unsigned_abs() <= lambda as u64);
    let lam = lambda as i64;
    let offdiag: Vec<f64> = (m.abs() + 1..=lam)
        .map(|l| {
            let cl = match k.resolve(lambda) {
                Some(k) => c_factor(l, lam, k),
                None => 1.0,
            };
            cl * clebsch_a(0, l, m)
        })
        .collect();
    TridiagSpec::from_real(&offdiag)
}

/// Madore–Hoppe fuzzy sphere: `x_i = L_i / sqrt(l(l+1))` in the spin-`l` irrep.
#[derive(Debug, Clone)]
pub struct MadoreSphere {
    /// `2l`.
    pub two_l: u32,
    pub spin: [Operator; 3],
    pub x: [Operator; 3],
    pub x_squared: Operator,
    l2_eigen: OnceLock<HermitianEigen>,
}

impl MadoreSphere {
    pub fn l(&self) -> f64 {
        self.two_l as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_l as usize + 1
    }

    pub fn radius_scale(&self) -> f64 {
        let l = self.l();
        (l * (l + 1.0)).sqrt()
    }

    pub fn l2_eigen(&self) -> &HermitianEigen {
        self.l2_eigen
            .get_or_init(|| HermitianEigen::new(&self.spin[1]).expect("L_2 is hermitian"))
    }

    /// `m` of every basis vector (`l, l-1, ..., -l`).
    pub fn magnetic_numbers(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.l() - j as f64).collect()
    }
}

/// Builds the spin-`l` Madore sphere; `2l` must be a positive integer.
pub fn build_madore(l: f64) -> Result<MadoreSphere> {
    let two_l = 2.0 * l;
    if !(two_l >= 1.0) || two_l.fract() != 0.0 || two_l > u32::MAX as f64 {
        return Err(Error::InvalidParameter(format!(
            "spin must be a positive half-integer, got {l}"
        )));
    }
    let two_l = two_l as u32;
    let n = two_l as usize + 1;
    let ms: Vec<f64> = (0..n).map(|j| l - j as f64).collect();
    let mut l_plus = Operator::zeros(n, "L+");
    for j in 1..n {
        let m = ms[j];
        l_plus[(j - 1, j)] = c(((l - m) * (l + m + 1.0)).sqrt(), 0.0);
    }
    let l_minus = l_plus.adjoint();
    let l1 = (&l_plus + &l_minus).scale_real(0.5).with_label("L1");
    let l2 = (&l_plus - &l_minus).scale(Complex64::new(0.0, -0.5)).with_label("L2");
    let l3 = Operator::from_diagonal(&ms, "L3");
    let scale = 1.0 / (l * (l + 1.0)).sqrt();
    let x = [
        l1.scale_real(scale).with_label("x1"),
        l2.scale_real(scale).with_label("x2"),
        l3.scale_real(scale).with_label("x3"),
    ];
    let x_squared = (&(&(&x[0] * &x[0]) + &(&x[1] * &x[1])) + &(&x[2] * &x[2])).with_label("x^2");
    Ok(MadoreSphere {
        two_l,
        spin: [l1, l2, l3],
        x,
        x_squared,
        l2_eigen: OnceLock::new(),
    })
}

/// `[x_i, x_j] = i/sqrt(l(l+1)) eps_ijk x_k` and `x^2 = 1`.
pub fn verify_madore(ms: &MadoreSphere, tol: f64) -> Report {
    let lam = if ms.two_l % 2 == 0 { Some(ms.two_l / 2) } else { None };
    let xs = [&ms.x[0], &ms.x[1], &ms.x[2]];
    let factor = Complex64::new(0.0, 1.0 / ms.radius_scale());
    let (lhs, rhs) = commutator_table(xs, xs, |i, j| epsilon_sum(i, j, xs, factor));
    let mut report = Report::new();
    report.push(Check::residual("madore.x_x_commutator", lam, combined(&lhs, &rhs), tol));
    report.push(Check::residual(
        "madore.x_squared",
        lam,
        relative_residual(&ms.x_squared, &Operator::identity(ms.dim())),
        tol,
    ));
    report
}

/// Minimal `(Delta x)^2` over all states of the Madore sphere.
pub fn madore_min_dispersion(ms: &MadoreSphere) -> f64 {
    minimize_dispersion(ms, &MinimizeOptions::default()).value
}
