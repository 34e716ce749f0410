//! Uncertainty relations and systems of coherent states.
//!
//! Strong systems come with an exact resolution of the identity, checked by
//! quadratures whose orders exceed the degree of every integrand, so the
//! integrals are exact up to rounding. The weak system is the rotation orbit
//! of a state of minimal spatial dispersion, found by self-consistent
//! iteration.

use std::f64::consts::{PI, TAU};
use std::fmt::Debug;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::circle::FuzzyCircle;
use crate::error::{Error, Result};
use crate::lierep::{circle_rotation_operator, euler_apply, madore_rotation_operator, rotation_operator, EulerAngles};
use crate::linop::{c, norm, HermitianEigen, Operator, State};
use crate::report::{Check, Report};
use crate::sphere::{basis_index, FuzzySphere, MadoreSphere};

/// Slack allowed when an inequality is saturated.
pub const SATURATION_TOL: f64 = 1e-12;
/// Residual bound for the circle's resolution of the identity.
pub const CIRCLE_RESOLUTION_TOL: f64 = 1e-10;
/// Residual bound for the sphere's resolutions of the identity.
pub const SPHERE_RESOLUTION_TOL: f64 = 1e-8;
/// Bound on the stationarity residual of a minimizer.
pub const STATIONARITY_TOL: f64 = 1e-10;

const GROUND_DEGENERACY: f64 = 1e-9;

/// A fuzzy space with coordinates, angular momenta and a rotation group.
pub trait FuzzySpace {
    type Rotation: Copy + Debug;

    fn dim(&self) -> usize;
    /// Truncation reported in checks.
    fn truncation(&self) -> Option<u32>;
    fn coordinates(&self) -> Vec<&Operator>;
    fn x_squared(&self) -> &Operator;
    fn angular_momenta(&self) -> Vec<&Operator>;
    /// Index of the coordinate along which states are gauge-fixed.
    fn axis(&self) -> usize;
    fn identity_rotation(&self) -> Self::Rotation;
    fn rotation_operator(&self, g: &Self::Rotation) -> Operator;
    /// `R(g)` with `pi(g)^dag x_i pi(g) = R_ij x_j`.
    fn classical_rotation(&self, g: &Self::Rotation) -> Vec<Vec<f64>>;
    /// A rotation with `R(g) e_axis` parallel to `v`; `None` for `v = 0`.
    fn aligning_rotation(&self, v: &[f64]) -> Option<Self::Rotation>;

    fn rotate(&self, g: &Self::Rotation, psi: &State) -> Result<State> {
        psi.evolve(&self.rotation_operator(g))
    }

    fn rotate_inverse(&self, g: &Self::Rotation, psi: &State) -> Result<State> {
        psi.evolve(&self.rotation_operator(g).adjoint())
    }
}

impl FuzzySpace for FuzzyCircle {
    type Rotation = f64;

    fn dim(&self) -> usize {
        FuzzyCircle::dim(self)
    }
    fn truncation(&self) -> Option<u32> {
        Some(self.lambda)
    }
    fn coordinates(&self) -> Vec<&Operator> {
        vec![&self.x1, &self.x2]
    }
    fn x_squared(&self) -> &Operator {
        &self.x_squared
    }
    fn angular_momenta(&self) -> Vec<&Operator> {
        vec![&self.l]
    }
    fn axis(&self) -> usize {
        0
    }
    fn identity_rotation(&self) -> f64 {
        0.0
    }
    fn rotation_operator(&self, alpha: &f64) -> Operator {
        circle_rotation_operator(self, *alpha)
    }
    fn classical_rotation(&self, alpha: &f64) -> Vec<Vec<f64>> {
        let (s, c) = alpha.sin_cos();
        vec![vec![c, s], vec![-s, c]]
    }
    fn aligning_rotation(&self, v: &[f64]) -> Option<f64> {
        if v[0] == 0.0 && v[1] == 0.0 {
            return None;
        }
        Some((-v[1]).atan2(v[0]))
    }
}

fn euler_rotation_matrix(g: &EulerAngles) -> Vec<Vec<f64>> {
    g.matrix().iter().map(|row| row.to_vec()).collect()
}

fn euler_aligning(v: &[f64]) -> Option<EulerAngles> {
    EulerAngles::aligning([v[0], v[1], v[2]])
}

impl FuzzySpace for FuzzySphere {
    type Rotation = EulerAngles;

    fn dim(&self) -> usize {
        FuzzySphere::dim(self)
    }
    fn truncation(&self) -> Option<u32> {
        Some(self.lambda)
    }
    fn coordinates(&self) -> Vec<&Operator> {
        FuzzySphere::coordinates(self).to_vec()
    }
    fn x_squared(&self) -> &Operator {
        &self.x_squared
    }
    fn angular_momenta(&self) -> Vec<&Operator> {
        FuzzySphere::angular_momenta(self).to_vec()
    }
    fn axis(&self) -> usize {
        2
    }
    fn identity_rotation(&self) -> EulerAngles {
        EulerAngles::IDENTITY
    }
    fn rotation_operator(&self, g: &EulerAngles) -> Operator {
        rotation_operator(self, g)
    }
    fn classical_rotation(&self, g: &EulerAngles) -> Vec<Vec<f64>> {
        euler_rotation_matrix(g)
    }
    fn aligning_rotation(&self, v: &[f64]) -> Option<EulerAngles> {
        euler_aligning(v)
    }
    fn rotate(&self, g: &EulerAngles, psi: &State) -> Result<State> {
        let m: Vec<f64> = self.magnetic_numbers().into_iter().map(|m| m as f64).collect();
        State::normalized(euler_apply(&m, self.l2_eigen(), g, psi.coeffs(), false)?)
    }
    fn rotate_inverse(&self, g: &EulerAngles, psi: &State) -> Result<State> {
        let m: Vec<f64> = self.magnetic_numbers().into_iter().map(|m| m as f64).collect();
        State::normalized(euler_apply(&m, self.l2_eigen(), g, psi.coeffs(), true)?)
    }
}

impl FuzzySpace for MadoreSphere {
    type Rotation = EulerAngles;

    fn dim(&self) -> usize {
        MadoreSphere::dim(self)
    }
    fn truncation(&self) -> Option<u32> {
        None
    }
    fn coordinates(&self) -> Vec<&Operator> {
        self.x.iter().collect()
    }
    fn x_squared(&self) -> &Operator {
        &self.x_squared
    }
    fn angular_momenta(&self) -> Vec<&Operator> {
        self.spin.iter().collect()
    }
    fn axis(&self) -> usize {
        2
    }
    fn identity_rotation(&self) -> EulerAngles {
        EulerAngles::IDENTITY
    }
    fn rotation_operator(&self, g: &EulerAngles) -> Operator {
        madore_rotation_operator(self, g)
    }
    fn classical_rotation(&self, g: &EulerAngles) -> Vec<Vec<f64>> {
        euler_rotation_matrix(g)
    }
    fn aligning_rotation(&self, v: &[f64]) -> Option<EulerAngles> {
        euler_aligning(v)
    }
}

/// Mean and spread of the coordinates and angular momenta on one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionReport {
    pub mean_x: Vec<f64>,
    pub mean_x_squared: f64,
    /// `<x^2> - <x>.<x>`.
    pub dispersion_x: f64,
    pub mean_l: Vec<f64>,
    pub mean_l_squared: f64,
    /// `<L^2> - <L>.<L>`.
    pub dispersion_l: f64,
}

impl DispersionReport {
    pub fn mean_l_norm(&self) -> f64 {
        self.mean_l.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mean_x_norm(&self) -> f64 {
        self.mean_x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `(<A>, <A^2>)` for hermitian `A`, the second as `|A psi|^2`.
fn moments(a: &Operator, psi: &[Complex64]) -> (f64, f64) {
    let w = a.apply_unchecked(psi);
    let mean: Complex64 = psi.iter().zip(&w).map(|(p, q)| p.conj() * q).sum();
    (mean.re, w.iter().map(|z| z.norm_sqr()).sum())
}

fn spread(ops: &[&Operator], psi: &[Complex64]) -> (Vec<f64>, f64, f64) {
    let mut means = Vec::with_capacity(ops.len());
    let (mut second, mut variance) = (0.0, 0.0);
    for op in ops {
        let (m, s) = moments(op, psi);
        means.push(m);
        second += s;
        variance += (s - m * m).max(0.0);
    }
    (means, second, variance)
}

pub fn dispersion<S: FuzzySpace + ?Sized>(space: &S, psi: &State) -> Result<DispersionReport> {
    if psi.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: psi.dim(),
        });
    }
    let v = psi.coeffs();
    let (mean_x, mean_x_squared, dispersion_x) = spread(&space.coordinates(), v);
    let (mean_l, mean_l_squared, dispersion_l) = spread(&space.angular_momenta(), v);
    Ok(DispersionReport {
        mean_x,
        mean_x_squared,
        dispersion_x,
        mean_l,
        mean_l_squared,
        dispersion_l,
    })
}

/// A normalized state with independent complex gaussian coefficients.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> State {
    loop {
        let coeffs: Vec<Complex64> = (0..dim)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(s) = State::normalized(coeffs) {
            return s;
        }
    }
}

fn slack_check(tag: &str, lambda: Option<u32>, lhs: f64, rhs: f64) -> Check {
    Check::at_least(tag, lambda, lhs - rhs, -SATURATION_TOL * (1.0 + rhs.abs()))
}

/// `DL Dx_1 >= |<x_2>|/2`, `DL Dx_2 >= |<x_1>|/2`, `(DL)^2 (Dx)^2 >= <x>^2/4`; values are slacks.
pub fn check_heisenberg_circle(circle: &FuzzyCircle, psi: &State) -> Result<Report> {
    if psi.dim() != circle.dim() {
        return Err(Error::DimensionMismatch {
            expected: circle.dim(),
            found: psi.dim(),
        });
    }
    let lam = Some(circle.lambda);
    let v = psi.coeffs();
    let (l_mean, l_sq) = moments(&circle.l, v);
    let (x1, x1_sq) = moments(&circle.x1, v);
    let (x2, x2_sq) = moments(&circle.x2, v);
    let dl2 = (l_sq - l_mean * l_mean).max(0.0);
    let dx1 = (x1_sq - x1 * x1).max(0.0);
    let dx2 = (x2_sq - x2 * x2).max(0.0);
    Ok(Report::from_iter([
        slack_check("circle.heisenberg_x1", lam, (dl2 * dx1).sqrt(), x2.abs() / 2.0),
        slack_check("circle.heisenberg_x2", lam, (dl2 * dx2).sqrt(), x1.abs() / 2.0),
        slack_check(
            "circle.heisenberg_total",
            lam,
            dl2 * (dx1 + dx2),
            (x1 * x1 + x2 * x2) / 4.0,
        ),
    ]))
}

/// `<L^2> >= |<L>| (|<L>| + 1)`; the value is the slack.
pub fn check_angular_uncertainty<S: FuzzySpace + ?Sized>(space: &S, psi: &State) -> Result<Check> {
    let d = dispersion(space, psi)?;
    let l = d.mean_l_norm();
    Ok(slack_check(
        "sphere.angular_uncertainty",
        space.truncation(),
        d.mean_l_squared,
        l * (l + 1.0),
    ))
}

/// `omega_alpha^beta = sum_n exp(i(alpha n + beta_n)) psi_n / sqrt(2 Lambda + 1)`, `beta` indexed by `n + Lambda`.
pub fn strong_scs_circle(circle: &FuzzyCircle, beta: &[f64], alpha: f64) -> Result<State> {
    if beta.len() != circle.dim() {
        return Err(Error::DimensionMismatch {
            expected: circle.dim(),
            found: beta.len(),
        });
    }
    let lam = circle.lambda as i64;
    let scale = 1.0 / (circle.dim() as f64).sqrt();
    let mut coeffs = vec![c(0.0, 0.0); circle.dim()];
    for n in -lam..=lam {
        let phase = alpha * n as f64 + beta[(n + lam) as usize];
        coeffs[circle.index(n)] = Complex64::from_polar(scale, phase);
    }
    State::new(coeffs)
}

/// `(2 Lambda + 1)/(2 pi) int P_alpha^beta d alpha` on a uniform grid, against the identity.
///
/// The default grid has `4 Lambda + 3` points.
pub fn verify_identity_resolution_circle(circle: &FuzzyCircle, beta: &[f64], points: Option<usize>) -> Result<Report> {
    let n = circle.dim();
    let points = points.unwrap_or(4 * circle.lambda as usize + 3);
    if points == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one point".into()));
    }
    let mut sum = Operator::zeros(n, "int P");
    for j in 0..points {
        let alpha = TAU * j as f64 / points as f64;
        let w = strong_scs_circle(circle, beta, alpha)?;
        let v = w.coeffs();
        for a in 0..n {
            for b in 0..n {
                sum[(a, b)] += v[a] * v[b].conj();
            }
        }
    }
    let result = sum.scale_real(n as f64 / points as f64);
    let residual = (&result - &Operator::identity(n)).frobenius_norm();
    Ok(Report::from_iter([Check::residual(
        "circle.identity_resolution",
        Some(circle.lambda),
        residual,
        CIRCLE_RESOLUTION_TOL,
    )]))
}

/// `phi_{l,g} = pi(g) psi_l^l`.
pub fn spin_cs(s: &FuzzySphere, l: u32, g: &EulerAngles) -> Result<State> {
    if l > s.lambda {
        return Err(Error::InvalidParameter(format!(
            "l = {l} exceeds Lambda = {}",
            s.lambda
        )));
    }
    let top = State::basis(s.dim(), basis_index(l, l as i64));
    s.rotate(g, &top)
}

/// `phi^beta = sum_l exp(i beta_l) sqrt(2l+1)/(Lambda+1) psi_l^0`, rotated by `pi(g)`.
pub fn strong_scs_sphere_phi(s: &FuzzySphere, beta: &[f64], g: &EulerAngles) -> Result<State> {
    let n = s.lambda as usize + 1;
    if beta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: beta.len(),
        });
    }
    let mut coeffs = vec![c(0.0, 0.0); s.dim()];
    for (l, &b) in beta.iter().enumerate() {
        let amp = ((2 * l + 1) as f64).sqrt() / n as f64;
        coeffs[basis_index(l as u32, 0)] = Complex64::from_polar(amp, b);
    }
    s.rotate(g, &State::new(coeffs)?)
}

/// Product quadrature over Euler angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrameQuadrature {
    pub phi_points: usize,
    pub theta_nodes: usize,
    /// `0` integrates over the sphere of directions only (`psi = 0`).
    pub psi_points: usize,
}

impl FrameQuadrature {
    /// `4 Lambda + 3` azimuthal points, `4 Lambda + 4` Gauss–Legendre nodes.
    pub fn group(lambda: u32) -> Self {
        let l = lambda as usize;
        Self {
            phi_points: 4 * l + 3,
            theta_nodes: 4 * l + 4,
            psi_points: 4 * l + 3,
        }
    }

    pub fn directions(lambda: u32) -> Self {
        Self {
            psi_points: 0,
            ..Self::group(lambda)
        }
    }

    /// Total measure: `8 pi^2` for the group, `4 pi` for directions.
    pub fn volume(&self) -> f64 {
        if self.psi_points == 0 {
            4.0 * PI
        } else {
            8.0 * PI * PI
        }
    }
}

/// `F_ab = sum_j w e^{i a_j (m_a - m_b)}` for a uniform grid of total weight `2 pi`.
fn azimuthal_filter(m: &[f64], points: usize) -> Operator {
    let n = m.len();
    let w = TAU / points as f64;
    Operator::from_fn(n, "F", |a, b| {
        (0..points)
            .map(|j| Complex64::from_polar(w, TAU * j as f64 / points as f64 * (m[a] - m[b])))
            .sum()
    })
}

fn hadamard(a: &Operator, b: &Operator) -> Operator {
    let n = a.dim();
    Operator::from_fn(n, a.label().to_string(), |i, j| a[(i, j)] * b[(i, j)])
}

/// `int d mu(g) pi(g) M pi(g)^dag` by product quadrature.
pub fn frame_integral(s: &FuzzySphere, m0: &Operator, q: &FrameQuadrature) -> Result<Operator> {
    if m0.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: m0.dim(),
        });
    }
    let theta_nodes = NonZeroUsize::new(q.theta_nodes)
        .ok_or_else(|| Error::InvalidParameter("need at least one polar node".into()))?;
    if q.phi_points == 0 {
        return Err(Error::InvalidParameter("need at least one azimuthal point".into()));
    }
    let m: Vec<f64> = s.magnetic_numbers().into_iter().map(|m| m as f64).collect();
    let inner = if q.psi_points == 0 {
        m0.clone()
    } else {
        hadamard(m0, &azimuthal_filter(&m, q.psi_points))
    };
    let l2 = s.l2_eigen();
    let mut acc = Operator::zeros(s.dim(), "int");
    for &(x, w) in GaussLegendre::new(theta_nodes).as_node_weight_pairs() {
        let e = l2.exp_i(x.clamp(-1.0, 1.0).acos());
        let term = &(&e * &inner) * &e.adjoint();
        acc.add_scaled(c(w, 0.0), &term);
    }
    Ok(hadamard(&acc, &azimuthal_filter(&m, q.phi_points)).with_label("int pi M pi^dag"))
}

/// Families of strong coherent states on the fuzzy sphere.
#[derive(Debug, Clone)]
pub enum SphereFamily {
    /// `phi_{l,g}` for every `l`, weighted by `(2l+1)/(8 pi^2)`.
    Spin,
    /// Orbit of a fixed state `omega`.
    Omega(State),
    /// `phi_g^beta`, `g` on the sphere of directions.
    Phi(Vec<f64>),
}

impl SphereFamily {
    fn tag(&self) -> &'static str {
        match self {
            SphereFamily::Spin => "sphere.identity_resolution_spin",
            SphereFamily::Omega(_) => "sphere.identity_resolution_omega",
            SphereFamily::Phi(_) => "sphere.identity_resolution_phi",
        }
    }
}

/// Per-`l` defects `sum_h |omega_l^h|^2 - (2l+1)/(Lambda+1)^2`.
pub fn omega_weight_defects(s: &FuzzySphere, omega: &State) -> Vec<(usize, f64)> {
    let n = (s.lambda + 1) as f64;
    (0..=s.lambda)
        .map(|l| {
            let weight: f64 = (-(l as i64)..=l as i64)
                .map(|m| omega.coeffs()[basis_index(l, m)].norm_sqr())
                .sum();
            (l as usize, weight - (2 * l + 1) as f64 / (n * n))
        })
        .collect()
}

/// Integrates a family with [`FrameQuadrature::group`] (or `directions` for `Phi`).
pub fn verify_identity_resolution_sphere(s: &FuzzySphere, family: &SphereFamily) -> Result<Report> {
    let q = match family {
        SphereFamily::Phi(_) => FrameQuadrature::directions(s.lambda),
        _ => FrameQuadrature::group(s.lambda),
    };
    verify_identity_resolution_sphere_with(s, family, &q)
}

pub fn verify_identity_resolution_sphere_with(
    s: &FuzzySphere,
    family: &SphereFamily,
    q: &FrameQuadrature,
) -> Result<Report> {
    let dim = s.dim();
    let n = (s.lambda + 1) as f64;
    let outer = |v: &[Complex64], w: f64| Operator::from_fn(dim, "P", |a, b| v[a] * v[b].conj() * w);
    let m0 = match family {
        SphereFamily::Spin => {
            let mut m0 = Operator::zeros(dim, "sum C_l P");
            for l in 0..=s.lambda {
                let i = basis_index(l, l as i64);
                m0[(i, i)] = c((2 * l + 1) as f64 / (8.0 * PI * PI), 0.0);
            }
            m0
        }
        SphereFamily::Omega(omega) => {
            if omega.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: omega.dim(),
                });
            }
            let defects: Vec<(usize, f64)> = omega_weight_defects(s, omega)
                .into_iter()
                .filter(|(_, d)| d.abs() > SATURATION_TOL)
                .collect();
            if !defects.is_empty() {
                return Err(Error::WeightCondition { defects });
            }
            outer(omega.coeffs(), n * n / (8.0 * PI * PI))
        }
        SphereFamily::Phi(beta) => {
            let phi = strong_scs_sphere_phi(s, beta, &EulerAngles::IDENTITY)?;
            outer(phi.coeffs(), n * n / (4.0 * PI))
        }
    };
    let result = frame_integral(s, &m0, q)?;
    let residual = (&result - &Operator::identity(dim)).frobenius_norm();
    Ok(Report::from_iter([Check::residual(
        family.tag(),
        Some(s.lambda),
        residual,
        SPHERE_RESOLUTION_TOL,
    )]))
}

/// Settings of the dispersion minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizeOptions {
    pub max_iterations: usize,
    /// Stop once the dispersion changes by less than this.
    pub tolerance: f64,
    /// Random starting states besides the top coordinate eigenvector.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-13,
            restarts: 5,
            seed: 0,
        }
    }
}

/// Outcome of [`minimize_dispersion`], gauge-fixed so that `<x>` points along the axis.
#[derive(Debug, Clone)]
pub struct Minimizer {
    pub state: State,
    /// Minimal `(Delta x)^2`.
    pub value: f64,
    pub mean_x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `|H chi - <H> chi|` plus the distance of `<H>` above the lowest eigenvalue of `H`.
    pub stationarity: f64,
    /// Final dispersion of every start, the deterministic one first.
    pub starts: Vec<f64>,
}

fn effective_hamiltonian<S: FuzzySpace + ?Sized>(space: &S, b: &[f64]) -> Operator {
    let mut h = space.x_squared().clone();
    for (x, &bi) in space.coordinates().into_iter().zip(b) {
        if bi != 0.0 {
            h.add_scaled(c(-2.0 * bi, 0.0), x);
        }
    }
    h.with_label("H_eff")
}

/// Lowest eigenvector of `h`; within a degenerate ground space, the normalized projection of `previous`.
fn ground_state(h: &Operator, previous: &State) -> Result<(State, f64)> {
    let eig = HermitianEigen::new(h)?;
    let n = eig.values().len();
    let lowest = eig.values()[n - 1];
    let ground: Vec<usize> = (0..n)
        .filter(|&j| eig.values()[j] - lowest <= GROUND_DEGENERACY * (1.0 + lowest.abs()))
        .collect();
    if ground.len() > 1 {
        let mut proj = vec![c(0.0, 0.0); n];
        for &j in &ground {
            let v = eig.vector(j);
            let overlap = v.inner(previous);
            for (p, z) in proj.iter_mut().zip(v.coeffs()) {
                *p += overlap * z;
            }
        }
        if norm(&proj) > 1e-8 {
            return Ok((State::normalized(proj)?, lowest));
        }
    }
    Ok((eig.vector(n - 1), lowest))
}

/// Stationarity residual of `chi` for `H_eff(<x>_chi)`.
pub fn stationarity_residual<S: FuzzySpace + ?Sized>(space: &S, chi: &State) -> Result<f64> {
    let d = dispersion(space, chi)?;
    let h = effective_hamiltonian(space, &d.mean_x);
    let hv = h.apply(chi.coeffs())?;
    let energy: Complex64 = chi.coeffs().iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
    let res: Vec<Complex64> = hv.iter().zip(chi.coeffs()).map(|(a, b)| a - energy * b).collect();
    let eig = HermitianEigen::new(&h)?;
    let lowest = *eig.values().last().expect("nonempty");
    Ok(norm(&res) + (energy.re - lowest).max(0.0))
}

/// Rotates `chi` so that `<x>` is a nonnegative multiple of the axis.
fn gauge_fix<S: FuzzySpace + ?Sized>(space: &S, chi: &State) -> Result<State> {
    let d = dispersion(space, chi)?;
    match space.aligning_rotation(&d.mean_x) {
        Some(g) => space.rotate_inverse(&g, chi),
        None => Ok(chi.clone()),
    }
}

struct Run {
    state: State,
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Self-consistent iteration in the gauge-fixed frame: `b` is kept along the axis.
fn iterate<S: FuzzySpace + ?Sized>(space: &S, start: State, opts: &MinimizeOptions) -> Result<Run> {
    let axis = space.axis();
    let mut chi = gauge_fix(space, &start)?;
    let mut value = dispersion(space, &chi)?.dispersion_x;
    for it in 1..=opts.max_iterations {
        let d = dispersion(space, &chi)?;
        let mut b = vec![0.0; d.mean_x.len()];
        b[axis] = d.mean_x_norm();
        let (next, _) = ground_state(&effective_hamiltonian(space, &b), &chi)?;
        let next = gauge_fix(space, &next)?;
        let next_value = dispersion(space, &next)?.dispersion_x;
        let change = (value - next_value).abs();
        chi = next;
        value = next_value;
        if change < opts.tolerance && stationarity_residual(space, &chi)? <= 0.1 * STATIONARITY_TOL {
            return Ok(Run {
                state: chi,
                value,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(Run {
        state: chi,
        value,
        iterations: opts.max_iterations,
        converged: false,
    })
}

/// Minimizes `(Delta x)^2` over unit states.
///
/// The first start is the top eigenvector of the axis coordinate; the others
/// are seeded random states. The best fixed point is returned.
pub fn minimize_dispersion<S: FuzzySpace + ?Sized>(space: &S, opts: &MinimizeOptions) -> Minimizer {
    try_minimize_dispersion(space, opts).expect("operators of a built space are hermitian")
}

pub fn try_minimize_dispersion<S: FuzzySpace + ?Sized>(space: &S, opts: &MinimizeOptions) -> Result<Minimizer> {
    let axis_op = space.coordinates()[space.axis()];
    let top = HermitianEigen::new(axis_op)?.vector(0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![top];
    starts.extend((0..opts.restarts).map(|_| random_state(space.dim(), &mut rng)));

    let mut best: Option<Run> = None;
    let mut values = Vec::with_capacity(starts.len());
    for start in starts {
        let run = iterate(space, start, opts)?;
        values.push(run.value);
        let better = match &best {
            None => true,
            Some(b) => run.value < b.value - 1e-14,
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let d = dispersion(space, &best.state)?;
    Ok(Minimizer {
        stationarity: stationarity_residual(space, &best.state)?,
        state: best.state.phase_fixed(),
        value: best.value,
        mean_x: d.mean_x,
        iterations: best.iterations,
        converged: best.converged,
        starts: values,
    })
}

/// The rotation orbit `{pi(g) chi}` of a minimizer.
#[derive(Debug, Clone)]
pub struct WeakOrbit<G> {
    pub members: Vec<(G, State)>,
}

pub fn weak_scs_orbit<S: FuzzySpace + ?Sized>(
    space: &S,
    chi: &State,
    grid: &[S::Rotation],
) -> Result<WeakOrbit<S::Rotation>> {
    let members = grid
        .iter()
        .map(|g| Ok((*g, space.rotate(g, chi)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeakOrbit { members })
}

/// On every member: `(Delta x)^2` equals the minimum and `<x> = |<x>| R(g) e_axis`.
pub fn verify_weak_orbit<S: FuzzySpace + ?Sized>(
    space: &S,
    minimizer: &Minimizer,
    orbit: &WeakOrbit<S::Rotation>,
) -> Result<Report> {
    let axis = space.axis();
    let radius = minimizer.mean_x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut worst_disp = 0.0_f64;
    let mut worst_dir = 0.0_f64;
    for (g, member) in &orbit.members {
        let d = dispersion(space, member)?;
        worst_disp = worst_disp.max((d.dispersion_x - minimizer.value).abs());
        let r = space.classical_rotation(g);
        for (i, row) in r.iter().enumerate() {
            let expected = radius * row[axis];
            worst_dir = worst_dir.max((d.mean_x[i] - expected).abs());
        }
    }
    let lam = space.truncation();
    Ok(Report::from_iter([
        Check::residual("weak_scs.dispersion_invariant", lam, worst_disp, 1e-10),
        Check::residual("weak_scs.direction", lam, worst_dir, 1e-9),
    ]))
}

/// `|L_3 chi|`.
pub fn l3_residual(s: &FuzzySphere, chi: &State) -> f64 {
    norm(&s.l3.apply_unchecked(chi.coeffs()))
}

/// `(1/(Lambda+1)) (1/2 + 1/(3 Lambda))`.
pub fn circle_phi_bound(lambda: u32) -> f64 {
    let l = lambda as f64;
    (0.5 + 1.0 / (3.0 * l)) / (l + 1.0)
}

/// `3.5/(Lambda+1)^2` on the circle, `11/(Lambda+1)^2` on the sphere.
pub fn minimum_bound(d: u8, lambda: u32) -> f64 {
    let n = (lambda + 1) as f64;
    if d == 1 {
        3.5 / (n * n)
    } else {
        11.0 / (n * n)
    }
}

fn random_phases<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..TAU)).collect()
}

fn random_angles<R: Rng + ?Sized>(rng: &mut R) -> EulerAngles {
    EulerAngles {
        phi: rng.random_range(0.0..TAU),
        theta: rng.random_range(0.0..=PI),
        psi: rng.random_range(0.0..TAU),
    }
}

/// A state with `sum_h |omega_l^h|^2 = (2l+1)/(Lambda+1)^2` and random phases and shapes.
pub fn random_admissible_omega<R: Rng + ?Sized>(s: &FuzzySphere, rng: &mut R) -> State {
    let n = (s.lambda + 1) as f64;
    let mut coeffs = vec![c(0.0, 0.0); s.dim()];
    for l in 0..=s.lambda {
        let block = random_state(2 * l as usize + 1, rng);
        let scale = ((2 * l + 1) as f64).sqrt() / n;
        for (j, m) in (-(l as i64)..=l as i64).enumerate() {
            coeffs[basis_index(l, m)] = block.coeffs()[j] * scale;
        }
    }
    State::normalized(coeffs).expect("nonzero")
}

/// Uncertainty relations and strong coherent states of the fuzzy circle.
pub fn verify_circle_scs<R: Rng + ?Sized>(circle: &FuzzyCircle, rng: &mut R, random_states: usize) -> Result<Report> {
    let lam = Some(circle.lambda);
    let lambda = circle.lambda as f64;
    let mut report = Report::new();

    let mut basis_slack = f64::INFINITY;
    let mut basis_dl = 0.0_f64;
    for n in circle.labels() {
        let psi = State::basis(circle.dim(), circle.index(n));
        let r = check_heisenberg_circle(circle, &psi)?;
        for ch in &r.checks {
            basis_slack = basis_slack.min(ch.value.abs());
        }
        basis_dl = basis_dl.max(dispersion(circle, &psi)?.dispersion_l);
    }
    report.push(Check::residual(
        "circle.heisenberg_saturated",
        lam,
        basis_slack,
        SATURATION_TOL,
    ));
    report.push(Check::residual("circle.basis_dL_zero", lam, basis_dl, SATURATION_TOL));

    let mut min_slack = f64::INFINITY;
    let mut violations = 0usize;
    for _ in 0..random_states {
        let psi = random_state(circle.dim(), rng);
        for ch in check_heisenberg_circle(circle, &psi)?.checks {
            min_slack = min_slack.min(ch.value);
            if !ch.pass {
                violations += 1;
            }
        }
    }
    report.push(Check::flag(
        "circle.heisenberg_random",
        lam,
        violations == 0,
        if random_states == 0 { 0.0 } else { min_slack },
    ));

    let beta = random_phases(circle.dim(), rng);
    let alpha = rng.random_range(0.0..TAU);
    let omega = strong_scs_circle(circle, &beta, alpha)?;
    let d = dispersion(circle, &omega)?;
    report.push(Check::residual(
        "circle.omega_mean_L",
        lam,
        d.mean_l[0].abs(),
        SATURATION_TOL,
    ));
    let target = lambda * (lambda + 1.0) / 3.0;
    report.push(Check::residual(
        "circle.omega_dL",
        lam,
        (d.dispersion_l - target).abs(),
        SATURATION_TOL * (1.0 + target),
    ));
    let phi = strong_scs_circle(circle, &vec![0.0; circle.dim()], alpha)?;
    report.push(Check::below(
        "circle.phi_dispersion_bound",
        lam,
        dispersion(circle, &phi)?.dispersion_x,
        circle_phi_bound(circle.lambda),
    ));
    report.extend(verify_identity_resolution_circle(
        circle,
        &vec![0.0; circle.dim()],
        None,
    )?);
    let mut r = verify_identity_resolution_circle(circle, &beta, None)?;
    r.checks[0].tag = "circle.identity_resolution_random_beta".into();
    report.extend(r);
    Ok(report)
}

/// Uncertainty relations and strong coherent states of the fuzzy sphere.
pub fn verify_sphere_scs<R: Rng + ?Sized>(s: &FuzzySphere, rng: &mut R, random_states: usize) -> Result<Report> {
    let lam = Some(s.lambda);
    let lambda = s.lambda as f64;
    let mut report = Report::new();

    let mut saturation = 0.0_f64;
    for l in 0..=s.lambda {
        let g = random_angles(rng);
        let d = dispersion(s, &spin_cs(s, l, &g)?)?;
        saturation = saturation.max((d.dispersion_l - d.mean_l_norm()).abs());
    }
    report.push(Check::residual("sphere.spin_cs_saturation", lam, saturation, 1e-9));

    let mut min_slack = f64::INFINITY;
    let mut violations = 0usize;
    for _ in 0..random_states {
        let ch = check_angular_uncertainty(s, &random_state(s.dim(), rng))?;
        min_slack = min_slack.min(ch.value);
        if !ch.pass {
            violations += 1;
        }
    }
    report.push(Check::flag(
        "sphere.angular_uncertainty_random",
        lam,
        violations == 0,
        if random_states == 0 { 0.0 } else { min_slack },
    ));

    let g = random_angles(rng);
    let beta = random_phases(s.lambda as usize + 1, rng);
    let phi = strong_scs_sphere_phi(s, &beta, &g)?;
    let target = lambda * (lambda + 2.0) / 2.0;
    report.push(Check::residual(
        "sphere.phi_dL",
        lam,
        (dispersion(s, &phi)?.dispersion_l - target).abs(),
        1e-10 * (1.0 + target),
    ));
    let phi0 = strong_scs_sphere_phi(s, &vec![0.0; s.lambda as usize + 1], &g)?;
    report.push(Check::below(
        "sphere.phi_dispersion_bound",
        lam,
        dispersion(s, &phi0)?.dispersion_x,
        1.0 / (lambda + 1.0),
    ));

    let psi = random_state(s.dim(), rng);
    let before = dispersion(s, &psi)?.dispersion_x;
    let after = dispersion(s, &s.rotate(&random_angles(rng), &psi)?)?.dispersion_x;
    report.push(Check::residual(
        "sphere.dispersion_rotation_invariant",
        lam,
        (before - after).abs(),
        1e-10,
    ));

    report.extend(verify_identity_resolution_sphere(s, &SphereFamily::Spin)?);
    let omega = random_admissible_omega(s, rng);
    report.extend(verify_identity_resolution_sphere(s, &SphereFamily::Omega(omega))?);
    report.extend(verify_identity_resolution_sphere(s, &SphereFamily::Phi(beta))?);
    Ok(report)
}

/// Minimizer bound, convergence, stationarity and weak orbit on the fuzzy circle.
pub fn verify_circle_minimizer(circle: &FuzzyCircle, opts: &MinimizeOptions) -> Result<(Minimizer, Report)> {
    let lam = Some(circle.lambda);
    let min = try_minimize_dispersion(circle, opts)?;
    let mut report = Report::new();
    report.push(Check::below(
        "circle.min_dispersion_bound",
        lam,
        min.value,
        minimum_bound(1, circle.lambda),
    ));
    report.push(Check::flag(
        "circle.minimizer_converged",
        lam,
        min.converged,
        min.iterations as f64,
    ));
    report.push(Check::residual(
        "circle.minimizer_stationary",
        lam,
        min.stationarity,
        STATIONARITY_TOL,
    ));
    report.push(Check::residual(
        "circle.minimizer_gauge",
        lam,
        min.mean_x[1].abs(),
        1e-12,
    ));
    let grid: Vec<f64> = (0..8).map(|j| TAU * j as f64 / 8.0).collect();
    let orbit = weak_scs_orbit(circle, &min.state, &grid)?;
    let mut r = verify_weak_orbit(circle, &min, &orbit)?;
    for ch in &mut r.checks {
        ch.tag = format!("circle.{}", ch.tag);
    }
    report.extend(r);
    Ok((min, report))
}

/// Minimizer bound, `L_3 chi = 0`, stationarity and weak orbit on the fuzzy sphere.
pub fn verify_sphere_minimizer(s: &FuzzySphere, opts: &MinimizeOptions) -> Result<(Minimizer, Report)> {
    let lam = Some(s.lambda);
    let min = try_minimize_dispersion(s, opts)?;
    let mut report = Report::new();
    report.push(Check::below(
        "sphere.min_dispersion_bound",
        lam,
        min.value,
        minimum_bound(2, s.lambda),
    ));
    report.push(Check::flag(
        "sphere.minimizer_converged",
        lam,
        min.converged,
        min.iterations as f64,
    ));
    report.push(Check::residual(
        "sphere.minimizer_stationary",
        lam,
        min.stationarity,
        STATIONARITY_TOL,
    ));
    report.push(Check::residual(
        "sphere.minimizer_L3",
        lam,
        l3_residual(s, &min.state),
        1e-10,
    ));
    let grid = [
        EulerAngles::IDENTITY,
        EulerAngles {
            phi: 0.0,
            theta: PI / 2.0,
            psi: 0.0,
        },
        EulerAngles {
            phi: 1.0,
            theta: 2.0,
            psi: 3.0,
        },
        EulerAngles {
            phi: 4.5,
            theta: 0.3,
            psi: 0.7,
        },
    ];
    let orbit = weak_scs_orbit(s, &min.state, &grid)?;
    let mut r = verify_weak_orbit(s, &min, &orbit)?;
    for ch in &mut r.checks {
        ch.tag = format!("sphere.{}", ch.tag);
    }
    report.extend(r);
    Ok((min, report))
}

/// `1 - |<chi, top x_3 eigenvector>|^2`.
pub fn top_eigenvector_deficit(s: &FuzzySphere, chi: &State) -> Result<f64> {
    let top = HermitianEigen::new(&s.x3)?.vector(0);
    Ok(1.0 - top.inner(chi).norm_sqr())
}

/// `1 - |<a, b>|^2`, zero for equal rays.
pub fn ray_distance(a: &State, b: &State) -> f64 {
    1.0 - a.inner(b).norm_sqr()
}

/// `|a - b|` after removing the best global phase.
pub fn state_distance(a: &State, b: &State) -> f64 {
    let overlap = a.inner(b);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        c(1.0, 0.0)
    };
    let diff: Vec<Complex64> = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x * phase - y).collect();
    norm(&diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::build_circle;
    use crate::sphere::{build_madore, build_sphere};
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn basis_states_of_the_circle() {
        let circle = build_circle(3, None).unwrap();
        for n in circle.labels() {
            let psi = State::basis(circle.dim(), circle.index(n));
            let d = dispersion(&circle, &psi).unwrap();
            assert_eq!(d.dispersion_l, 0.0);
            assert!(d.mean_x.iter().all(|v| v.abs() < 1e-15));
            let i = circle.index(n);
            assert!((d.dispersion_x - circle.x_squared[(i, i)].re).abs() < 1e-14);
            assert!(check_heisenberg_circle(&circle, &psi).unwrap().all_pass());
        }
    }

    #[test]
    fn uniform_state_lambda_one() {
        let circle = build_circle(1, Some(4.0)).unwrap();
        let omega = strong_scs_circle(&circle, &[0.0; 3], 0.0).unwrap();
        assert!(omega
            .coeffs()
            .iter()
            .all(|z| (z.re - 1.0 / 3f64.sqrt()).abs() < 1e-15 && z.im == 0.0));
        let d = dispersion(&circle, &omega).unwrap();
        assert!((d.dispersion_l - 2.0 / 3.0).abs() < 1e-12);
        assert!(d.mean_l[0].abs() < 1e-15);
    }

    #[test]
    fn two_level_superposition_slack() {
        // (psi_0 + psi_1)/sqrt 2 on Lambda = 1, k = 4: x_+ psi_0 = psi_1,
        // so <x_1> = 1/2, <x_2> = 0, <L> = 1/2, (Delta L)^2 = 1/4.
        let circle = build_circle(1, Some(4.0)).unwrap();
        let mut v = vec![c(0.0, 0.0); 3];
        v[circle.index(0)] = c(1.0, 0.0);
        v[circle.index(1)] = c(1.0, 0.0);
        let psi = State::normalized(v).unwrap();
        let d = dispersion(&circle, &psi).unwrap();
        assert!((d.mean_x[0] - 0.5).abs() < 1e-15);
        assert!(d.mean_x[1].abs() < 1e-15);
        assert!((d.dispersion_l - 0.25).abs() < 1e-15);
        let r = check_heisenberg_circle(&circle, &psi).unwrap();
        assert!(r.all_pass());
        // total: (1/4)(Delta x)^2 >= 1/16
        let total = r.get("circle.heisenberg_total").unwrap();
        assert!((total.value - (0.25 * d.dispersion_x - 1.0 / 16.0)).abs() < 1e-14);
    }

    #[test]
    fn circle_resolution_and_aliasing() {
        let circle = build_circle(1, Some(4.0)).unwrap();
        let r = verify_identity_resolution_circle(&circle, &[0.0; 3], None).unwrap();
        assert!(r.checks[0].value <= 1e-12);
        let r = verify_identity_resolution_circle(&circle, &[0.0; 3], Some(2)).unwrap();
        assert!(!r.all_pass());
        let circle = build_circle(10, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let beta = random_phases(21, &mut rng);
        assert!(verify_identity_resolution_circle(&circle, &beta, None)
            .unwrap()
            .all_pass());
        assert!(strong_scs_circle(&circle, &beta[..3], 0.0).is_err());
    }

    #[test]
    fn spin_coherent_states() {
        let s = build_sphere(5, None).unwrap();
        for l in 0..=5 {
            let psi = spin_cs(&s, l, &EulerAngles::IDENTITY).unwrap();
            assert_eq!(psi.coeffs()[basis_index(l, l as i64)], c(1.0, 0.0));
            let d = dispersion(&s, &psi).unwrap();
            assert!((d.dispersion_l - l as f64).abs() < 1e-12);
            assert!((d.mean_l_norm() - l as f64).abs() < 1e-12);
        }
        assert!(spin_cs(&s, 6, &EulerAngles::IDENTITY).is_err());
        let g = EulerAngles::new(0.4, 2.2, 5.1).unwrap();
        let psi = spin_cs(&s, 3, &g).unwrap();
        let d = dispersion(&s, &psi).unwrap();
        assert!((d.dispersion_l - d.mean_l_norm()).abs() < 1e-9);
        let p3 = s.projector(3);
        let inside = p3.apply(psi.coeffs()).unwrap();
        assert!((norm(&inside) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fast_rotation_matches_operator() {
        let s = build_sphere(4, None).unwrap();
        let g = EulerAngles::new(1.3, 0.8, 2.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_state(s.dim(), &mut rng);
        let fast = s.rotate(&g, &psi).unwrap();
        let slow = psi.evolve(&rotation_operator(&s, &g)).unwrap();
        assert!(state_distance(&fast, &slow) < 1e-12);
        let back = s.rotate_inverse(&g, &fast).unwrap();
        assert!(state_distance(&back, &psi) < 1e-12);
    }

    #[test]
    fn sphere_resolutions() {
        let s = build_sphere(1, None).unwrap();
        let r = verify_identity_resolution_sphere(&s, &SphereFamily::Spin).unwrap();
        assert!(r.checks[0].value <= 1e-10, "{r:?}");
        let s = build_sphere(3, None).unwrap();
        assert!(verify_identity_resolution_sphere(&s, &SphereFamily::Phi(vec![0.0; 4]))
            .unwrap()
            .all_pass());
        // equal weight 1/4 on every shell instead of (2l+1)/16
        let mut v = vec![c(0.0, 0.0); s.dim()];
        for l in 0..=3 {
            v[basis_index(l, 0)] = c(0.5, 0.0);
        }
        let equal = State::new(v).unwrap();
        match verify_identity_resolution_sphere(&s, &SphereFamily::Omega(equal)) {
            Err(Error::WeightCondition { defects }) => {
                let expected = [3.0 / 16.0, 1.0 / 16.0, -1.0 / 16.0, -3.0 / 16.0];
                assert_eq!(defects.len(), 4);
                for ((l, d), e) in defects.iter().zip(expected) {
                    assert!((d - e).abs() < 1e-15, "l = {l}");
                }
            }
            other => panic!("expected a weight condition error, got {other:?}"),
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let omega = random_admissible_omega(&s, &mut rng);
        assert!(omega_weight_defects(&s, &omega).iter().all(|(_, d)| d.abs() < 1e-14));
        assert!(verify_identity_resolution_sphere(&s, &SphereFamily::Omega(omega))
            .unwrap()
            .all_pass());
    }

    #[test]
    fn under_resolved_sphere_quadrature_fails() {
        let s = build_sphere(3, None).unwrap();
        let q = FrameQuadrature {
            phi_points: 3,
            theta_nodes: 2,
            psi_points: 3,
        };
        let r = verify_identity_resolution_sphere_with(&s, &SphereFamily::Spin, &q).unwrap();
        assert!(!r.all_pass());
    }

    #[test]
    fn phi_family_values() {
        let s = build_sphere(2, None).unwrap();
        let phi = strong_scs_sphere_phi(&s, &[0.3, 1.0, 2.0], &EulerAngles::IDENTITY).unwrap();
        let d = dispersion(&s, &phi).unwrap();
        assert!((d.dispersion_l - 4.0).abs() < 1e-10);
        assert!(norm(&s.l3.apply(phi.coeffs()).unwrap()) < 1e-15);
        let s = build_sphere(5, None).unwrap();
        let phi0 = strong_scs_sphere_phi(&s, &[0.0; 6], &EulerAngles::IDENTITY).unwrap();
        assert!(dispersion(&s, &phi0).unwrap().dispersion_x < 1.0 / 6.0);
    }

    #[test]
    fn circle_minimizer() {
        for lambda in [1u32, 4, 12] {
            let circle = build_circle(lambda, None).unwrap();
            let (min, r) = verify_circle_minimizer(&circle, &MinimizeOptions::default()).unwrap();
            assert!(r.all_pass(), "{r:?}");
            assert!(min.mean_x[0] > 0.0);
        }
    }

    #[test]
    fn sphere_minimizer() {
        for lambda in [1u32, 3, 6] {
            let s = build_sphere(lambda, None).unwrap();
            let (_, r) = verify_sphere_minimizer(&s, &MinimizeOptions::default()).unwrap();
            assert!(r.all_pass(), "{r:?}");
        }
    }

    #[test]
    fn minimizer_is_rotation_covariant() {
        let s = build_sphere(3, None).unwrap();
        let min = minimize_dispersion(&s, &MinimizeOptions::default());
        let g = EulerAngles::new(0.0, PI / 2.0, 0.0).unwrap();
        let rotated = s.rotate(&g, &min.state).unwrap();
        let d = dispersion(&s, &rotated).unwrap();
        assert!((d.mean_x[0] + min.mean_x[2]).abs() < 1e-9);
        assert!(d.mean_x[1].abs() < 1e-9 && d.mean_x[2].abs() < 1e-9);

        let circle = build_circle(4, None).unwrap();
        let min = minimize_dispersion(&circle, &MinimizeOptions::default());
        let rotated = circle.rotate(&(PI / 2.0), &min.state).unwrap();
        let d = dispersion(&circle, &rotated).unwrap();
        assert!(d.mean_x[0].abs() < 1e-9);
        assert!((d.mean_x[1] + min.mean_x[0]).abs() < 1e-9);
        assert!((d.dispersion_x - min.value).abs() < 1e-10);
    }

    #[test]
    fn madore_minimum_is_top_state() {
        let ms = build_madore(1.0).unwrap();
        let min = minimize_dispersion(&ms, &MinimizeOptions::default());
        assert!((min.value - 0.5).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn dispersion_is_nonnegative_and_invariant(seed in any::<u64>(), phi in 0.0..6.28f64, theta in 0.0..3.14f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = build_sphere(3, None).unwrap();
            let psi = random_state(s.dim(), &mut rng);
            let d = dispersion(&s, &psi).unwrap();
            prop_assert!(d.dispersion_x >= -1e-12);
            let alt = d.mean_x_squared - d.mean_x.iter().map(|v| v * v).sum::<f64>();
            prop_assert!((alt - d.dispersion_x).abs() < 1e-12);
            let g = EulerAngles { phi, theta, psi: 0.0 };
            let r = dispersion(&s, &s.rotate(&g, &psi).unwrap()).unwrap();
            prop_assert!((r.dispersion_x - d.dispersion_x).abs() < 1e-10);
            prop_assert!(check_angular_uncertainty(&s, &psi).unwrap().pass);
        }

        #[test]
        fn heisenberg_on_random_states(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let circle = build_circle(5, None).unwrap();
            let psi = random_state(circle.dim(), &mut rng);
            prop_assert!(check_heisenberg_circle(&circle, &psi).unwrap().all_pass());
            let alpha = rng.random_range(0.0..TAU);
            let a = dispersion(&circle, &psi).unwrap();
            let b = dispersion(&circle, &circle.rotate(&alpha, &psi).unwrap()).unwrap();
            prop_assert!((a.dispersion_x - b.dispersion_x).abs() < 1e-10);
        }
    }
}
