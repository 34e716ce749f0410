//! Dense complex operators and normalized states.
//!
//! Every operator in this crate (coordinates, angular momenta, projectors,
//! rotations) is an [`Operator`]: a square, row-major matrix of `Complex64`
//! with a free-form label. The matrices built by the fuzzy spaces are very
//! sparse, so the product skips zero entries of the left factor; products
//! with a dense left factor are handed to faer.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::Spectrum;

/// Relative tolerance used when an operator must be hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default relative Frobenius tolerance for operator identities.
pub const DEFAULT_TOL: f64 = 1e-10;

// products with a left factor denser than 1/DENSE_FRACTION go through faer
const DENSE_MIN_DIM: usize = 24;
const DENSE_FRACTION: usize = 8;

const NORM_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A square complex matrix acting on a finite-dimensional Hilbert space.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex64>,
    label: String,
}

impl Operator {
    pub fn zeros(dim: usize, label: impl Into<String>) -> Self {
        assert!(dim >= 1, "operators need dim >= 1");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
            label: label.into(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim, "I");
        for i in 0..dim {
            op[(i, i)] = c(1.0, 0.0);
        }
        op
    }

    pub fn from_diagonal(diag: &[f64], label: impl Into<String>) -> Self {
        let mut op = Self::zeros(diag.len(), label);
        for (i, &d) in diag.iter().enumerate() {
            op[(i, i)] = c(d, 0.0);
        }
        op
    }

    pub fn from_complex_diagonal(diag: &[Complex64], label: impl Into<String>) -> Self {
        let mut op = Self::zeros(diag.len(), label);
        for (i, &d) in diag.iter().enumerate() {
            op[(i, i)] = d;
        }
        op
    }

    pub fn from_fn(dim: usize, label: impl Into<String>, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut op = Self::zeros(dim, label);
        for i in 0..dim {
            for j in 0..dim {
                op.data[i * dim + j] = f(i, j);
            }
        }
        op
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(dim: usize, data: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self {
            dim,
            data,
            label: label.into(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n, format!("{}^dag", self.label));
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
            label: self.label.clone(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: Complex64, other: &Operator) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add_scaled");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Multiplies row `i` by `d[i]` (left product with a diagonal matrix).
    pub fn scale_rows(&self, d: &[Complex64]) -> Self {
        assert_eq!(d.len(), self.dim);
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for z in &mut out.data[i * n..(i + 1) * n] {
                *z *= d[i];
            }
        }
        out
    }

    /// Multiplies column `j` by `d[j]` (right product with a diagonal matrix).
    pub fn scale_cols(&self, d: &[Complex64]) -> Self {
        assert_eq!(d.len(), self.dim);
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for (z, &s) in out.data[i * n..(i + 1) * n].iter_mut().zip(d) {
                *z *= s;
            }
        }
        out
    }

    pub fn try_mul(&self, rhs: &Operator) -> Result<Operator> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Operator) -> Operator {
        let n = self.dim;
        let nnz = self.data.iter().filter(|z| z.re != 0.0 || z.im != 0.0).count();
        if n >= DENSE_MIN_DIM && nnz * DENSE_FRACTION > n * n {
            let mut prod = Mat::<Complex64>::zeros(n, n);
            matmul(
                &mut prod,
                Accum::Replace,
                &self.to_faer(),
                &rhs.to_faer(),
                c(1.0, 0.0),
                Par::Seq,
            );
            return Operator::from_fn(n, format!("{}*{}", self.label, rhs.label), |i, j| prod[(i, j)]);
        }
        let mut out = Operator::zeros(n, format!("{}*{}", self.label, rhs.label));
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let b_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Integer power by repeated squaring; `pow(0)` is the identity.
    pub fn pow(&self, mut exp: u32) -> Operator {
        let mut result = Operator::identity(self.dim);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = &result * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        result.with_label(format!("{}^n", self.label))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A^dag|` over all entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = self.data[i * n + j] - self.data[j * n + i].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Entrywise hermiticity test, relative to `1 + max|A|`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol * (1.0 + self.max_abs())
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self.data[i * n + j] == c(0.0, 0.0)))
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).collect()
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(v).map(|(&a, &x)| a * x).sum())
            .collect()
    }

    /// `<psi, A psi>`.
    pub fn expectation(&self, psi: &State) -> Result<Complex64> {
        let w = self.apply(psi.coeffs())?;
        Ok(psi.coeffs().iter().zip(&w).map(|(a, b)| a.conj() * b).sum())
    }

    pub(crate) fn to_faer(&self) -> Mat<Complex64> {
        let n = self.dim;
        Mat::from_fn(n, n, |i, j| self.data[i * n + j])
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator `{}` ({}x{})", self.label, self.dim, self.dim)?;
        if self.dim <= 8 {
            for i in 0..self.dim {
                let row: Vec<String> = self
                    .row(i)
                    .iter()
                    .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                    .collect();
                writeln!(f, "  [{}]", row.join(", "))?;
            }
        }
        Ok(())
    }
}

impl Mul<&Operator> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in operator product");
        self.mul_unchecked(rhs)
    }
}

impl Add<&Operator> for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in operator sum");
        Operator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
            label: format!("{}+{}", self.label, rhs.label),
        }
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in operator difference");
        Operator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
            label: format!("{}-{}", self.label, rhs.label),
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, s: f64) -> Operator {
        self.scale_real(s)
    }
}

impl Mul<Complex64> for &Operator {
    type Output = Operator;

    fn mul(self, s: Complex64) -> Operator {
        self.scale(s)
    }
}

/// `ab - ba`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    let ab = a.try_mul(b)?;
    let ba = b.mul_unchecked(a);
    Ok((&ab - &ba).with_label(format!("[{},{}]", a.label, b.label)))
}

/// `ab + ba`.
pub fn anticommutator(a: &Operator, b: &Operator) -> Result<Operator> {
    let ab = a.try_mul(b)?;
    let ba = b.mul_unchecked(a);
    Ok((&ab + &ba).with_label(format!("{{{},{}}}", a.label, b.label)))
}

/// `||lhs - rhs||_F / max(1, ||rhs||_F)`.
pub fn relative_residual(lhs: &Operator, rhs: &Operator) -> f64 {
    (lhs - rhs).frobenius_norm() / rhs.frobenius_norm().max(1.0)
}

/// Combined relative residual of several identities `lhs_i = rhs_i`.
pub fn relative_residual_all<'a>(pairs: impl IntoIterator<Item = (&'a Operator, &'a Operator)>) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (l, r) in pairs {
        num += (l - r).frobenius_norm().powi(2);
        den += r.frobenius_norm().powi(2);
    }
    num.sqrt() / den.sqrt().max(1.0)
}

/// A unit vector of coefficients over a space's ordered basis.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    coeffs: Vec<Complex64>,
}

impl State {
    /// Wraps coefficients that are already normalized.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&coeffs);
        if coeffs.is_empty() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { coeffs })
    }

    /// Normalizes arbitrary nonzero coefficients.
    pub fn normalized(mut coeffs: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&coeffs);
        if coeffs.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        for z in &mut coeffs {
            *z /= norm;
        }
        Ok(Self { coeffs })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut coeffs = vec![c(0.0, 0.0); dim];
        coeffs[index] = c(1.0, 0.0);
        Self { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &State) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    /// `U psi` for a unitary `U`; the result is renormalized to absorb rounding.
    pub fn evolve(&self, unitary: &Operator) -> Result<State> {
        State::normalized(unitary.apply(&self.coeffs)?)
    }

    /// Multiplies by a global phase so the largest coefficient is real and positive.
    pub fn phase_fixed(&self) -> State {
        let pivot = self
            .coeffs
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(c(1.0, 0.0));
        if pivot.norm() == 0.0 {
            return self.clone();
        }
        let phase = pivot.conj() / pivot.norm();
        State {
            coeffs: self.coeffs.iter().map(|&z| z * phase).collect(),
        }
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a hermitian operator, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    vectors: Operator,
}

impl HermitianEigen {
    pub fn new(a: &Operator) -> Result<Self> {
        let residual = a.hermiticity_residual();
        if residual > HERMITIAN_TOL * (1.0 + a.max_abs()) {
            return Err(Error::NotHermitian {
                label: a.label.clone(),
                residual,
            });
        }
        let n = a.dim;
        let evd = a
            .to_faer()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        // faer sorts ascending
        let values: Vec<f64> = (0..n).rev().map(|j| s[j].re).collect();
        let vectors = Operator::from_fn(n, format!("eigvecs({})", a.label), |i, j| u[(i, n - 1 - j)]);
        Ok(Self { values, vectors })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &Operator {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> State {
        let n = self.vectors.dim;
        let coeffs: Vec<Complex64> = (0..n).map(|i| self.vectors[(i, j)]).collect();
        State::normalized(coeffs).expect("eigenvectors are unit vectors")
    }

    pub fn states(&self) -> Vec<State> {
        (0..self.values.len()).map(|j| self.vector(j)).collect()
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(self.values.clone())
    }

    /// `V f(D) V^dag`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> Operator {
        let d: Vec<Complex64> = self.values.iter().map(|&x| f(x)).collect();
        let left = self.vectors.scale_cols(&d);
        let mut out = &left * &self.vectors.adjoint();
        out.label = format!("f({})", self.vectors.label);
        out
    }

    /// `exp(i t A)`.
    pub fn exp_i(&self, t: f64) -> Operator {
        self.map(|x| Complex64::from_polar(1.0, t * x))
    }

    pub fn reconstruct(&self) -> Operator {
        self.map(|x| c(x, 0.0))
    }
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a hermitian operator.
pub fn hermitian_eig(a: &Operator) -> Result<(Spectrum, Vec<State>)> {
    let eig = HermitianEigen::new(a)?;
    Ok((eig.spectrum(), eig.states()))
}

/// `exp(i t h)` for hermitian `h`, through its eigendecomposition.
pub fn expm_hermitian_generator(h: &Operator, t: f64) -> Result<Operator> {
    if h.is_diagonal() {
        if h.hermiticity_residual() > HERMITIAN_TOL * (1.0 + h.max_abs()) {
            return Err(Error::NotHermitian {
                label: h.label.clone(),
                residual: h.hermiticity_residual(),
            });
        }
        let d: Vec<Complex64> = h
            .diagonal()
            .iter()
            .map(|z| Complex64::from_polar(1.0, t * z.re))
            .collect();
        return Ok(Operator::from_complex_diagonal(&d, format!("exp(i t {})", h.label)));
    }
    Ok(HermitianEigen::new(h)?
        .exp_i(t)
        .with_label(format!("exp(i t {})", h.label)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_hermitian(n: usize, seed: u64) -> Operator {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut a = Operator::zeros(n, "H");
        for i in 0..n {
            a[(i, i)] = c(next(), 0.0);
            for j in i + 1..n {
                let z = c(next(), next());
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        a
    }

    #[test]
    fn commutator_with_identity_and_self_vanishes() {
        let a = random_hermitian(5, 3);
        let id = Operator::identity(5);
        assert_eq!(commutator(&id, &a).unwrap().max_abs(), 0.0);
        assert!(commutator(&a, &a).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn commutator_of_raising_and_lowering() {
        let mut up = Operator::zeros(2, "s+");
        up[(0, 1)] = c(1.0, 0.0);
        let down = up.adjoint();
        let comm = commutator(&up, &down).unwrap();
        assert_eq!(comm, Operator::from_diagonal(&[1.0, -1.0], "").with_label(comm.label()));
    }

    #[test]
    fn commutator_rejects_dimension_mismatch() {
        let err = commutator(&Operator::identity(2), &Operator::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn eig_of_diagonal_is_sorted_descending() {
        let (spec, _) = hermitian_eig(&Operator::from_diagonal(&[3.0, 1.0, 2.0], "d")).unwrap();
        assert_eq!(spec.values(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn eig_of_pauli_x() {
        let mut sx = Operator::zeros(2, "sx");
        sx[(0, 1)] = c(1.0, 0.0);
        sx[(1, 0)] = c(1.0, 0.0);
        let (spec, vecs) = hermitian_eig(&sx).unwrap();
        assert!((spec.values()[0] - 1.0).abs() < 1e-14);
        assert!((spec.values()[1] + 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = vecs[0].phase_fixed();
        assert!((v0.coeffs()[0] - c(r, 0.0)).norm() < 1e-14);
        assert!((v0.coeffs()[1] - c(r, 0.0)).norm() < 1e-14);
        let v1 = vecs[1].phase_fixed();
        assert!((v1.coeffs()[0].re.abs() - r).abs() < 1e-14);
        assert!((v1.coeffs()[0] + v1.coeffs()[1]).norm() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut a = Operator::zeros(2, "a");
        a[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            expm_hermitian_generator(&a, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn expm_at_zero_is_identity() {
        let h = random_hermitian(4, 11);
        let u = expm_hermitian_generator(&h, 0.0).unwrap();
        assert!(relative_residual(&u, &Operator::identity(4)) < 1e-13);
    }

    #[test]
    fn expm_of_diagonal_generator() {
        let h = Operator::from_diagonal(&[1.0, 2.0], "h");
        let u = expm_hermitian_generator(&h, std::f64::consts::PI).unwrap();
        assert!((u[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(u[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a = random_hermitian(4, 5);
        let mut direct = Operator::identity(4);
        for _ in 0..7 {
            direct = &direct * &a;
        }
        assert!(relative_residual(&a.pow(7), &direct) < 1e-13);
    }

    #[test]
    fn state_validation() {
        assert!(State::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        let s = State::normalized(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((s.inner(&s).re - 1.0).abs() < 1e-15);
        assert!(State::normalized(vec![c(0.0, 0.0)]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn adjoint_of_product_reverses(seed in any::<u64>(), n in 1usize..7) {
            let a = random_hermitian(n, seed);
            let b = {
                let h = random_hermitian(n, seed ^ 0xdead_beef);
                &h * &a
            };
            let lhs = (&a * &b).adjoint();
            let rhs = &b.adjoint() * &a.adjoint();
            prop_assert!((&lhs - &rhs).max_abs() <= 1e-12);
        }

        #[test]
        fn eig_reconstructs_and_is_orthonormal(seed in any::<u64>(), n in 1usize..12) {
            let a = random_hermitian(n, seed);
            let eig = HermitianEigen::new(&a).unwrap();
            prop_assert!(eig.values().windows(2).all(|w| w[0] >= w[1]));
            let rec = (&eig.reconstruct() - &a).frobenius_norm();
            prop_assert!(rec <= 1e-10 * a.frobenius_norm().max(1e-300));
            let v = eig.vectors();
            let gram = &v.adjoint() * v;
            prop_assert!((&gram - &Operator::identity(n)).frobenius_norm() <= 1e-10);
        }

        #[test]
        fn expm_is_unitary(seed in any::<u64>(), n in 1usize..10, t in -10.0f64..10.0) {
            let h = random_hermitian(n, seed);
            let u = expm_hermitian_generator(&h, t).unwrap();
            let gram = &u.adjoint() * &u;
            prop_assert!((&gram - &Operator::identity(n)).frobenius_norm() <= 1e-10);
        }
    }
}
