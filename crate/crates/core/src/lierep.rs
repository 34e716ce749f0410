//! The fuzzy spaces as irreducible representations of `su(2)` and `so(4)`.
//!
//! The coordinates are squeezed versions of Lie algebra generators:
//! `x_+- = f_+-(E_0) E_+-` on the circle and `x_i = g(lambda) L_{4i} g(lambda)`
//! on the sphere. Both maps are inverted here with positive diagonal factors,
//! and the resulting generator sets are checked against their Lie brackets and
//! Casimir values. Rotations of the sphere are built from Euler angles.

use num_complex::Complex64;

use crate::circle::FuzzyCircle;
use crate::error::{Error, Result};
use crate::linop::{c, commutator, relative_residual, relative_residual_all, HermitianEigen, Operator};
use crate::report::{Check, Report};
use crate::sphere::{basis_index, FuzzySphere, MadoreSphere};

/// `g = exp(phi I_3) exp(theta I_2) exp(psi I_3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub const IDENTITY: EulerAngles = EulerAngles {
        phi: 0.0,
        theta: 0.0,
        psi: 0.0,
    };

    /// Requires `phi, psi` in `[0, 2 pi)` and `theta` in `[0, pi]`.
    pub fn new(phi: f64, theta: f64, psi: f64) -> Result<Self> {
        let tau = std::f64::consts::TAU;
        let in_turn = |a: f64| (0.0..tau).contains(&a);
        if !in_turn(phi) || !in_turn(psi) || !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "Euler angles out of range: ({phi}, {theta}, {psi})"
            )));
        }
        Ok(Self { phi, theta, psi })
    }

    /// The 3x3 rotation `R(g)`; `pi(g)^dag x_i pi(g) = R_ij x_j`.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let r3 = |a: f64| {
            let (s, c) = a.sin_cos();
            [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]]
        };
        let (s, c) = self.theta.sin_cos();
        let r2 = [[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]];
        mat3_mul(&mat3_mul(&r3(self.phi), &r2), &r3(self.psi))
    }

    /// `R(g) e_3 = (-sin theta cos phi, sin theta sin phi, cos theta)`.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [-st * cp, st * sp, ct]
    }

    /// Angles with `R(g) e_3 = v / |v|` and `psi = 0`; `None` for the zero vector.
    pub fn aligning(v: [f64; 3]) -> Option<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r == 0.0 || !r.is_finite() {
            return None;
        }
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(-v[0]).rem_euclid(std::f64::consts::TAU);
        let phi = if phi >= std::f64::consts::TAU { 0.0 } else { phi };
        Some(Self { phi, theta, psi: 0.0 })
    }
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// `f_+(s) = sqrt((1 + s(s-1)/k) / (Lambda(Lambda+1) - s(s-1)))`.
pub fn squeeze_factor_circle(s: i64, lambda: u32, k: f64) -> Result<f64> {
    let lam = lambda as f64;
    let ss = (s * (s - 1)) as f64;
    let den = lam * (lam + 1.0) - ss;
    let num = 1.0 + ss / k;
    if den <= 0.0 || num <= 0.0 || !k.is_finite() || k <= 0.0 {
        return Err(Error::Domain {
            function: "squeeze_factor_circle",
            value: s as f64,
        });
    }
    Ok((num / den).sqrt())
}

/// `f_-(s) = f_+(s + 1)`.
pub fn squeeze_factor_circle_minus(s: i64, lambda: u32, k: f64) -> Result<f64> {
    squeeze_factor_circle(s + 1, lambda, k)
}

/// Row-wise division of `x` by `f(row label)`, skipping zero rows.
fn unsqueeze_rows(x: &Operator, labels: &[i64], f: impl Fn(i64) -> Result<f64>) -> Result<Operator> {
    let mut d = vec![c(0.0, 0.0); x.dim()];
    for (i, &n) in labels.iter().enumerate() {
        if x.row(i).iter().any(|z| z.norm() != 0.0) {
            d[i] = c(1.0 / f(n)?, 0.0);
        }
    }
    Ok(x.scale_rows(&d))
}

/// Residuals of a reconstructed identity, over the whole space and off the band edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTrip {
    pub global: f64,
    pub off_edge: f64,
}

fn round_trip(lhs: &Operator, rhs: &Operator, edge: &Operator) -> RoundTrip {
    let id = Operator::identity(lhs.dim());
    let q = &id - edge;
    let diff = lhs - rhs;
    let scale = rhs.frobenius_norm().max(1.0);
    RoundTrip {
        global: diff.frobenius_norm() / scale,
        off_edge: (&(&q * &diff) * &q).frobenius_norm() / scale,
    }
}

/// `E_0 = L`, `E_+- = f_+-(E_0)^{-1} x_+-` on the fuzzy circle.
///
/// The inversion returns the standard ladder operators of spin `Lambda`,
/// `E_+ psi_n = sqrt(Lambda(Lambda+1) - n(n+1)) psi_{n+1}`. The normalization
/// in which `[E_+, E_-] = E_0` and `E_a E_{-a} = Lambda(Lambda+1)` is
/// [`Su2Generators::cartan_weyl`], which rescales `E_+-` by `1/sqrt(2)`.
#[derive(Debug, Clone)]
pub struct Su2Generators {
    pub lambda: u32,
    pub e_plus: Operator,
    pub e_minus: Operator,
    pub e0: Operator,
}

impl Su2Generators {
    /// `(E_+ / sqrt 2, E_- / sqrt 2, E_0)`.
    pub fn cartan_weyl(&self) -> [Operator; 3] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [
            self.e_plus.scale_real(s).with_label("E+"),
            self.e_minus.scale_real(s).with_label("E-"),
            self.e0.clone(),
        ]
    }

    /// `C = E_a E_{-a}` in the Cartan–Weyl normalization.
    pub fn casimir(&self) -> Operator {
        let [ep, em, e0] = self.cartan_weyl();
        (&(&(&ep * &em) + &(&em * &ep)) + &(&e0 * &e0)).with_label("C")
    }

    pub fn verify(&self, tol: f64) -> Report {
        let lam = Some(self.lambda);
        let [ep, em, e0] = self.cartan_weyl();
        let mut report = Report::new();
        let bracket = |a: &Operator, b: &Operator| commutator(a, b).expect("same space");
        report.push(Check::residual(
            "su2.E_plus_E_minus",
            lam,
            relative_residual(&bracket(&ep, &em), &e0),
            tol,
        ));
        let lhs = [bracket(&e0, &ep), bracket(&e0, &em)];
        let rhs = [ep.clone(), -&em];
        report.push(Check::residual(
            "su2.E0_ladder",
            lam,
            relative_residual_all(lhs.iter().zip(rhs.iter())),
            tol,
        ));
        let adj = [ep.adjoint(), e0.adjoint()];
        let expected = [em.clone(), e0.clone()];
        report.push(Check::residual(
            "su2.adjoint",
            lam,
            relative_residual_all(adj.iter().zip(expected.iter())),
            tol,
        ));
        let l = self.lambda as f64;
        let target = Operator::identity(e0.dim()).scale_real(l * (l + 1.0));
        report.push(Check::residual(
            "su2.casimir",
            lam,
            relative_residual(&self.casimir(), &target),
            tol,
        ));
        report
    }

    /// `f_+-(E_0) E_+-` against the circle's `x_+-`.
    pub fn round_trip(&self, circle: &FuzzyCircle) -> Result<RoundTrip> {
        let labels = circle.labels();
        let fp: Vec<Complex64> = labels
            .iter()
            .map(|&n| squeeze_factor_circle(n, circle.lambda, circle.k).map_or(c(0.0, 0.0), |f| c(f, 0.0)))
            .collect();
        let fm: Vec<Complex64> = labels
            .iter()
            .map(|&n| squeeze_factor_circle_minus(n, circle.lambda, circle.k).map_or(c(0.0, 0.0), |f| c(f, 0.0)))
            .collect();
        let lam = circle.lambda as i64;
        let edge = &circle.projector(lam) + &circle.projector(-lam);
        let plus = round_trip(&self.e_plus.scale_rows(&fp), &circle.x_plus, &edge);
        let minus = round_trip(&self.e_minus.scale_rows(&fm), &circle.x_minus, &edge);
        Ok(RoundTrip {
            global: plus.global.max(minus.global),
            off_edge: plus.off_edge.max(minus.off_edge),
        })
    }
}

pub fn reconstruct_su2(circle: &FuzzyCircle) -> Result<Su2Generators> {
    let labels = circle.labels();
    let (lambda, k) = (circle.lambda, circle.k);
    let e_plus = unsqueeze_rows(&circle.x_plus, &labels, |s| squeeze_factor_circle(s, lambda, k))?;
    let e_minus = unsqueeze_rows(&circle.x_minus, &labels, |s| squeeze_factor_circle_minus(s, lambda, k))?;
    Ok(Su2Generators {
        lambda,
        e_plus: e_plus.with_label("E+"),
        e_minus: e_minus.with_label("E-"),
        e0: circle.l.clone().with_label("E0"),
    })
}

/// `g(l)` from its finite-product form.
pub fn g_weight(l: u32, lambda: u32, k: f64) -> Result<f64> {
    if l > lambda {
        return Err(Error::InvalidParameter(format!("l = {l} exceeds Lambda = {lambda}")));
    }
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::InvalidParameter(format!("sharpness must be positive, got {k}")));
    }
    let (l, lam) = (l as f64, lambda as f64);
    let num: f64 = (0..l as u32).map(|h| lam + l - 2.0 * h as f64).product();
    let den: f64 = (0..=l as u32).map(|h| lam + l + 1.0 - 2.0 * h as f64).product();
    let ratio: f64 = if l == 0.0 {
        1.0
    } else {
        (0..=((l as u32 - 1) / 2))
            .map(|j| {
                let j = j as f64;
                (1.0 + (l - 2.0 * j).powi(2) / k) / (1.0 + (l - 1.0 - 2.0 * j).powi(2) / k)
            })
            .product()
    };
    let g2 = num / den * ratio;
    if !(g2 > 0.0) || !g2.is_finite() {
        return Err(Error::Domain {
            function: "g_weight",
            value: l,
        });
    }
    Ok(g2.sqrt())
}

/// `L_IJ`, `I, J` in `0..4`, with `L_ij = eps_ijk L_k` and `L_{3i} = g^-1 x_i g^-1`.
#[derive(Debug, Clone)]
pub struct So4Generators {
    pub lambda: u32,
    generators: Vec<Vec<Operator>>,
    g_diag: Vec<f64>,
}

impl So4Generators {
    pub fn get(&self, i: usize, j: usize) -> &Operator {
        &self.generators[i][j]
    }

    /// The diagonal of `g(lambda)`.
    pub fn g_diagonal(&self) -> &[f64] {
        &self.g_diag
    }

    fn pairs() -> impl Iterator<Item = (usize, usize)> {
        (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j)))
    }

    /// `sum_{I<J} L_IJ L_IJ`, equal to `Lambda(Lambda+2)` on an irreducible space.
    pub fn casimir(&self) -> Operator {
        let mut out = Operator::zeros(self.generators[0][1].dim(), "C");
        for (i, j) in Self::pairs() {
            let g = self.get(i, j);
            out = &out + &(g * g);
        }
        out
    }

    /// `eps^{HIJK} L_HI L_JK`.
    pub fn pseudo_casimir(&self) -> Operator {
        let mut out = Operator::zeros(self.generators[0][1].dim(), "C'");
        for h in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        let e = levi_civita4([h, i, j, k]);
                        if e != 0.0 {
                            let prod = self.get(h, i) * self.get(j, k);
                            out.add_scaled(c(e, 0.0), &prod);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn verify(&self, tol: f64) -> Report {
        let lam = Some(self.lambda);
        let dim = self.generators[0][1].dim();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        let pairs: Vec<_> = Self::pairs().collect();
        for &(h, i) in &pairs {
            for &(j, k) in &pairs {
                lhs.push(commutator(self.get(h, i), self.get(j, k)).expect("same space"));
                let mut r = Operator::zeros(dim, "rhs");
                let iu = Complex64::new(0.0, 1.0);
                r.add_scaled(iu * delta(h, j), self.get(i, k));
                r.add_scaled(-iu * delta(h, k), self.get(i, j));
                r.add_scaled(-iu * delta(i, j), self.get(h, k));
                r.add_scaled(iu * delta(i, k), self.get(h, j));
                rhs.push(r);
            }
        }
        let mut report = Report::new();
        report.push(Check::residual(
            "so4.brackets",
            lam,
            relative_residual_all(lhs.iter().zip(rhs.iter())),
            tol,
        ));
        let mut herm = 0.0_f64;
        let mut anti = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                let g = self.get(i, j);
                herm = herm.max(g.hermiticity_residual());
                anti = anti.max((g + self.get(j, i)).frobenius_norm());
            }
        }
        report.push(Check::residual("so4.hermitian", lam, herm, tol));
        report.push(Check::residual("so4.antisymmetric", lam, anti, tol));
        let l = self.lambda as f64;
        let target = Operator::identity(dim).scale_real(l * (l + 2.0));
        report.push(Check::residual(
            "so4.casimir",
            lam,
            relative_residual(&self.casimir(), &target),
            tol,
        ));
        report.push(Check::residual(
            "so4.pseudo_casimir",
            lam,
            self.pseudo_casimir().frobenius_norm(),
            tol,
        ));
        report
    }

    /// `g L_{4i} g` against `x_i`, and `L_i = (1/2) eps_{ijk4} L_jk`.
    pub fn round_trip(&self, s: &FuzzySphere) -> RoundTrip {
        let g: Vec<Complex64> = self.g_diag.iter().map(|&v| c(v, 0.0)).collect();
        let edge = s.projector(s.lambda);
        let mut out = RoundTrip {
            global: 0.0,
            off_edge: 0.0,
        };
        for (i, x) in s.coordinates().into_iter().enumerate() {
            let rebuilt = self.get(3, i).scale_rows(&g).scale_cols(&g);
            let rt = round_trip(&rebuilt, x, &edge);
            out.global = out.global.max(rt.global);
            out.off_edge = out.off_edge.max(rt.off_edge);
        }
        for (i, l) in s.angular_momenta().into_iter().enumerate() {
            let mut rebuilt = Operator::zeros(s.dim(), "L");
            for j in 0..3 {
                for k in 0..3 {
                    let e = levi_civita4([i, j, k, 3]);
                    if e != 0.0 {
                        rebuilt.add_scaled(c(0.5 * e, 0.0), self.get(j, k));
                    }
                }
            }
            let rt = round_trip(&rebuilt, l, &edge);
            out.global = out.global.max(rt.global);
            out.off_edge = out.off_edge.max(rt.off_edge);
        }
        out
    }
}

fn levi_civita4(idx: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

pub fn reconstruct_so4(s: &FuzzySphere) -> Result<So4Generators> {
    let mut g_diag = vec![0.0; s.dim()];
    for (l, m) in s.labels() {
        g_diag[basis_index(l, m)] = g_weight(l, s.lambda, s.k)?;
    }
    let inv: Vec<Complex64> = g_diag.iter().map(|&g| c(1.0 / g, 0.0)).collect();
    let dim = s.dim();
    let mut generators = vec![vec![Operator::zeros(dim, "0"); 4]; 4];
    let ls = s.angular_momenta();
    for i in 0..3 {
        for j in 0..3 {
            let mut op = Operator::zeros(dim, format!("L{}{}", i + 1, j + 1));
            for (k, l) in ls.iter().enumerate() {
                let e = crate::sphere::levi_civita(i, j, k);
                if e != 0.0 {
                    op.add_scaled(c(e, 0.0), l);
                }
            }
            generators[i][j] = op;
        }
    }
    for (i, x) in s.coordinates().into_iter().enumerate() {
        let op = x.scale_rows(&inv).scale_cols(&inv);
        generators[i][3] = (-&op).with_label(format!("L{}4", i + 1));
        generators[3][i] = op.with_label(format!("L4{}", i + 1));
    }
    Ok(So4Generators {
        lambda: s.lambda,
        generators,
        g_diag,
    })
}

/// `exp(i phi L_3) exp(i theta L_2) exp(i psi L_3)` from the diagonal of `L_3`
/// and an eigendecomposition of `L_2`.
pub(crate) fn euler_operator(m: &[f64], l2: &HermitianEigen, g: &EulerAngles) -> Operator {
    let phases = |a: f64| -> Vec<Complex64> { m.iter().map(|&mm| Complex64::from_polar(1.0, a * mm)).collect() };
    l2.exp_i(g.theta)
        .scale_rows(&phases(g.phi))
        .scale_cols(&phases(g.psi))
        .with_label("pi(g)")
}

/// `pi(g) v`, or `pi(g)^dag v` when `inverse`, without forming `pi(g)`.
pub(crate) fn euler_apply(
    m: &[f64],
    l2: &HermitianEigen,
    g: &EulerAngles,
    v: &[Complex64],
    inverse: bool,
) -> Result<Vec<Complex64>> {
    if v.len() != m.len() {
        return Err(Error::DimensionMismatch {
            expected: m.len(),
            found: v.len(),
        });
    }
    let sign = if inverse { -1.0 } else { 1.0 };
    let (first, last) = if inverse { (g.phi, g.psi) } else { (g.psi, g.phi) };
    let phase = |w: &mut [Complex64], a: f64| {
        for (z, &mm) in w.iter_mut().zip(m) {
            *z *= Complex64::from_polar(1.0, sign * a * mm);
        }
    };
    let mut w = v.to_vec();
    phase(&mut w, first);
    let vecs = l2.vectors();
    let mut coords = vecs.adjoint().apply_unchecked(&w);
    for (z, &lam) in coords.iter_mut().zip(l2.values()) {
        *z *= Complex64::from_polar(1.0, sign * g.theta * lam);
    }
    let mut w = vecs.apply_unchecked(&coords);
    phase(&mut w, last);
    Ok(w)
}

/// `pi_Lambda(g)` on the fuzzy sphere.
pub fn rotation_operator(s: &FuzzySphere, g: &EulerAngles) -> Operator {
    let m: Vec<f64> = s.magnetic_numbers().into_iter().map(|m| m as f64).collect();
    euler_operator(&m, s.l2_eigen(), g)
}

/// Spin-`l` rotation on the Madore sphere.
pub fn madore_rotation_operator(ms: &MadoreSphere, g: &EulerAngles) -> Operator {
    euler_operator(&ms.magnetic_numbers(), ms.l2_eigen(), g)
}

/// `exp(i alpha L)` on the fuzzy circle.
pub fn circle_rotation_operator(circle: &FuzzyCircle, alpha: f64) -> Operator {
    let d: Vec<Complex64> = circle
        .labels()
        .iter()
        .map(|&n| Complex64::from_polar(1.0, alpha * n as f64))
        .collect();
    Operator::from_complex_diagonal(&d, "exp(i alpha L)")
}

/// Checks of unitarity, block structure and vector covariance of `pi(g)`.
pub fn verify_rotations(s: &FuzzySphere, angles: &[EulerAngles], tol: f64) -> Report {
    let lam = Some(s.lambda);
    let id = Operator::identity(s.dim());
    let mut unitary = 0.0_f64;
    let mut block = 0.0_f64;
    let mut covariance = 0.0_f64;
    let xs = s.coordinates();
    for g in angles {
        let u = rotation_operator(s, g);
        let ud = u.adjoint();
        unitary = unitary.max(relative_residual(&(&ud * &u), &id));
        block = block.max(commutator(&u, &s.l_squared).expect("same space").frobenius_norm());
        let r = g.matrix();
        let conj: Vec<Operator> = xs.iter().map(|&x| &(&ud * x) * &u).collect();
        for i in 0..3 {
            let mut expected = Operator::zeros(s.dim(), "R x");
            for j in 0..3 {
                expected.add_scaled(c(r[i][j], 0.0), xs[j]);
            }
            covariance = covariance.max(relative_residual(&conj[i], &expected));
        }
    }
    let mut report = Report::new();
    report.push(Check::residual("rotation.unitary", lam, unitary, tol));
    report.push(Check::residual("rotation.commutes_with_L_squared", lam, block, tol));
    report.push(Check::residual("rotation.vector_covariance", lam, covariance, tol));
    report
}
