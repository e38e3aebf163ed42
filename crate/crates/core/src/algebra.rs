//! Small-matrix Lie algebra for the frame equations.
//!
//! Connections are built from scalar coefficient triples either as real
//! 3×3 matrices (`so(3)`, or `so(2,1)` when the signature sign is −1) or as
//! traceless anti-Hermitian 2×2 complex matrices (`su(2)`). The two forms
//! describe the same frame data; [`iso_to_so3`] carries one into the other.
//!
//! Every matrix type used in a field implements [`MatrixValue`], which bundles
//! the handful of operations the residual, Lax and transport code needs.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Real 3×3 matrix: connection values `A`, `B`, `C` and orthogonal frames.
pub type So3 = Matrix3<f64>;
/// Complex 2×2 matrix: connection values `U`, `V`, `W` and spin frames.
pub type Su2 = Matrix2<Complex64>;
/// Complexified 3×3 matrix, used for self-dual potentials and dressed frames.
pub type Complex3 = Matrix3<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Anything that can be sampled on a grid and differenced.
pub trait FieldValue: Copy + Debug + Send + Sync + 'static + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    fn scale(&self, s: f64) -> Self;
    /// Absolute value for scalars, Frobenius norm for matrices.
    fn magnitude(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl FieldValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Square matrix values: Lie-algebra elements and group elements alike.
pub trait MatrixValue: FieldValue + PartialEq + Mul<Output = Self> + Neg<Output = Self> {
    /// The complexification, `Self` for already-complex matrices.
    type Complex: ComplexMatrix;
    const DIM: usize;

    fn identity() -> Self;
    /// Conjugate transpose (plain transpose for real matrices).
    fn dagger(&self) -> Self;
    fn expm(&self) -> Self;
    /// Nearest orthogonal/unitary matrix (polar factor).
    fn project_to_group(&self) -> Self;
    fn det_abs(&self) -> f64;
    fn to_complex(&self) -> Self::Complex;
    /// Row-major `(re, im)` pairs.
    fn entries(&self) -> Vec<(f64, f64)>;
}

pub trait ComplexMatrix: MatrixValue<Complex = Self> {
    fn scale_c(&self, c: Complex64) -> Self;
    fn from_diagonal(d: &[Complex64]) -> Self;
}

macro_rules! impl_field_value_matrix {
    ($ty:ty) => {
        impl FieldValue for $ty {
            fn zero() -> Self {
                <$ty>::zeros()
            }
            fn scale(&self, s: f64) -> Self {
                self.map(|z| z * s)
            }
            fn magnitude(&self) -> f64 {
                self.norm()
            }
            fn is_finite(&self) -> bool {
                self.iter().all(|z| z.is_finite())
            }
        }
    };
}

impl_field_value_matrix!(So3);
impl_field_value_matrix!(Su2);
impl_field_value_matrix!(Complex3);

impl MatrixValue for So3 {
    type Complex = Complex3;
    const DIM: usize = 3;

    fn identity() -> Self {
        So3::identity()
    }
    fn dagger(&self) -> Self {
        self.transpose()
    }
    fn expm(&self) -> Self {
        let sym = (self + self.transpose()).norm();
        if sym <= 1e-14 * self.norm().max(1.0) {
            rodrigues(self)
        } else {
            expm_taylor(self)
        }
    }
    fn project_to_group(&self) -> Self {
        let svd = self.svd(true, true);
        svd.u.unwrap() * svd.v_t.unwrap()
    }
    fn det_abs(&self) -> f64 {
        self.determinant().abs()
    }
    fn to_complex(&self) -> Complex3 {
        self.map(|x| Complex64::new(x, 0.0))
    }
    fn entries(&self) -> Vec<(f64, f64)> {
        (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).map(|(r, c)| (self[(r, c)], 0.0)).collect()
    }
}

impl MatrixValue for Su2 {
    type Complex = Su2;
    const DIM: usize = 2;

    fn identity() -> Self {
        Su2::identity()
    }
    fn dagger(&self) -> Self {
        self.adjoint()
    }
    fn expm(&self) -> Self {
        expm_2x2(self)
    }
    fn project_to_group(&self) -> Self {
        let svd = self.svd(true, true);
        svd.u.unwrap() * svd.v_t.unwrap()
    }
    fn det_abs(&self) -> f64 {
        self.determinant().norm()
    }
    fn to_complex(&self) -> Su2 {
        *self
    }
    fn entries(&self) -> Vec<(f64, f64)> {
        (0..2).flat_map(|r| (0..2).map(move |c| (r, c))).map(|(r, c)| (self[(r, c)].re, self[(r, c)].im)).collect()
    }
}

impl ComplexMatrix for Su2 {
    fn scale_c(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }
    fn from_diagonal(d: &[Complex64]) -> Self {
        assert_eq!(d.len(), 2, "diagonal length must match matrix dimension");
        Su2::new(d[0], Complex64::ZERO, Complex64::ZERO, d[1])
    }
}

impl MatrixValue for Complex3 {
    type Complex = Complex3;
    const DIM: usize = 3;

    fn identity() -> Self {
        Complex3::identity()
    }
    fn dagger(&self) -> Self {
        self.adjoint()
    }
    fn expm(&self) -> Self {
        expm_taylor(self)
    }
    fn project_to_group(&self) -> Self {
        let svd = self.svd(true, true);
        svd.u.unwrap() * svd.v_t.unwrap()
    }
    fn det_abs(&self) -> f64 {
        self.determinant().norm()
    }
    fn to_complex(&self) -> Complex3 {
        *self
    }
    fn entries(&self) -> Vec<(f64, f64)> {
        (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).map(|(r, c)| (self[(r, c)].re, self[(r, c)].im)).collect()
    }
}

impl ComplexMatrix for Complex3 {
    fn scale_c(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }
    fn from_diagonal(d: &[Complex64]) -> Self {
        assert_eq!(d.len(), 3, "diagonal length must match matrix dimension");
        let mut m = Complex3::zeros();
        for (i, z) in d.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }
}

/// Three real coefficients, e.g. `(k, σ, τ)` of the x-direction connection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoeffTriple {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CoeffTriple {
    pub const ZERO: CoeffTriple = CoeffTriple { c1: 0.0, c2: 0.0, c3: 0.0 };

    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        CoeffTriple { c1, c2, c3 }
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite() && self.c3.is_finite()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub fn scale(&self, s: f64) -> Self {
        CoeffTriple::new(self.c1 * s, self.c2 * s, self.c3 * s)
    }
}

impl Add for CoeffTriple {
    type Output = CoeffTriple;
    fn add(self, o: CoeffTriple) -> CoeffTriple {
        CoeffTriple::new(self.c1 + o.c1, self.c2 + o.c2, self.c3 + o.c3)
    }
}

impl Sub for CoeffTriple {
    type Output = CoeffTriple;
    fn sub(self, o: CoeffTriple) -> CoeffTriple {
        CoeffTriple::new(self.c1 - o.c1, self.c2 - o.c2, self.c3 - o.c3)
    }
}

impl From<[f64; 3]> for CoeffTriple {
    fn from(a: [f64; 3]) -> Self {
        CoeffTriple::new(a[0], a[1], a[2])
    }
}

/// Signature sign `e₁·e₁ = β`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Beta {
    #[default]
    Plus,
    Minus,
}

impl Beta {
    pub fn value(self) -> f64 {
        match self {
            Beta::Plus => 1.0,
            Beta::Minus => -1.0,
        }
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Beta::Plus),
            -1 => Ok(Beta::Minus),
            _ => Err(domain(format!("beta must be +1 or -1, got {v}"))),
        }
    }
}

/// A ±1 choice: bracket signs, exponent signs, derivative-map signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Scalar in front of the 2×2 coefficient matrix.
///
/// `HalfI` (i/2) makes the coefficient-preserving map to `so(3)` a Lie
/// algebra homomorphism. `InverseTwoI` (1/(2i) = −i/2) is the form found in
/// the literature; with it the same map reverses every bracket.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Su2Prefactor {
    #[default]
    #[serde(rename = "i/2")]
    HalfI,
    #[serde(rename = "1/(2i)")]
    InverseTwoI,
}

impl Su2Prefactor {
    pub fn value(self) -> Complex64 {
        match self {
            Su2Prefactor::HalfI => Complex64::new(0.0, 0.5),
            Su2Prefactor::InverseTwoI => Complex64::new(0.0, -0.5),
        }
    }
}

fn check_finite(c: &CoeffTriple) -> Result<()> {
    if c.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("non-finite coefficient triple {c:?}")))
    }
}

/// `[[0, k, −σ], [−βk, 0, τ], [βσ, −τ, 0]]` for `c = (k, σ, τ)`.
pub fn so3_from_coeffs(c: CoeffTriple, beta: Beta) -> Result<So3> {
    check_finite(&c)?;
    Ok(so3_unchecked(c, beta))
}

pub(crate) fn so3_unchecked(c: CoeffTriple, beta: Beta) -> So3 {
    let b = beta.value();
    let CoeffTriple { c1: k, c2: s, c3: t } = c;
    So3::new(0.0, k, -s, -b * k, 0.0, t, b * s, -t, 0.0)
}

/// `prefactor · [[τ, k + iσ], [k − iσ, −τ]]` for `c = (k, σ, τ)`.
pub fn su2_from_coeffs(c: CoeffTriple, prefactor: Su2Prefactor) -> Result<Su2> {
    check_finite(&c)?;
    Ok(su2_unchecked(c, prefactor))
}

pub(crate) fn su2_unchecked(c: CoeffTriple, prefactor: Su2Prefactor) -> Su2 {
    let CoeffTriple { c1: k, c2: s, c3: t } = c;
    let p = prefactor.value();
    Su2::new(
        Complex64::new(t, 0.0),
        Complex64::new(k, s),
        Complex64::new(k, -s),
        Complex64::new(-t, 0.0),
    )
    .map(|z| z * p)
}

/// Reads `(k, σ, τ)` back from an `so(3)` matrix built with β = +1.
///
/// Uses the entries `(0,1)`, `(2,0)`, `(1,2)` directly, so the coefficients of a
/// matrix residual are bit-identical to a componentwise evaluation.
pub fn so3_coeffs(m: &So3) -> CoeffTriple {
    CoeffTriple::new(m[(0, 1)], m[(2, 0)], m[(1, 2)])
}

/// Reads `(k, σ, τ)` back from a 2×2 matrix built with `prefactor`.
pub fn su2_coeffs(m: &Su2, prefactor: Su2Prefactor) -> CoeffTriple {
    let inv = 1.0 / prefactor.value();
    let tau = (m[(0, 0)] * inv).re;
    let off = m[(0, 1)] * inv;
    CoeffTriple::new(off.re, off.im, tau)
}

/// Checks tracelessness and anti-Hermiticity to `tol` (entrywise).
pub fn check_su2(m: &Su2, tol: f64) -> Result<()> {
    let tr = (m[(0, 0)] + m[(1, 1)]).norm();
    let herm = (m + m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if tr > tol || herm > tol {
        return Err(domain(format!(
            "matrix is not traceless anti-Hermitian (|tr| = {tr:e}, |m + m†| = {herm:e})"
        )));
    }
    Ok(())
}

/// Linear map sending the 2×2 basis (unit triples under `prefactor`) to the
/// 3×3 basis (unit triples, β = +1).
pub fn iso_to_so3(x: &Su2, prefactor: Su2Prefactor) -> Result<So3> {
    let scale = x.norm().max(1.0);
    check_su2(x, 1e-12 * scale)?;
    Ok(so3_unchecked(su2_coeffs(x, prefactor), Beta::Plus))
}

/// `xy − yx`.
pub fn commutator<E: MatrixValue>(x: &E, y: &E) -> E {
    *x * *y - *y * *x
}

/// Frobenius norm.
pub fn norm<E: FieldValue>(x: &E) -> f64 {
    x.magnitude()
}

/// Rodrigues' formula for an antisymmetric 3×3 matrix.
pub fn expm_so3(x: &So3) -> Result<So3> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(domain("non-finite matrix"));
    }
    if (x + x.transpose()).norm() > 1e-12 * x.norm().max(1.0) {
        return Err(domain("expm_so3 needs an antisymmetric matrix"));
    }
    Ok(rodrigues(x))
}

/// Closed-form exponential of a traceless anti-Hermitian 2×2 matrix.
pub fn expm_su2(x: &Su2) -> Result<Su2> {
    check_su2(x, 1e-12 * x.norm().max(1.0))?;
    Ok(expm_2x2(x))
}

fn rodrigues(x: &So3) -> So3 {
    let theta = x.norm() / std::f64::consts::SQRT_2;
    let t2 = theta * theta;
    let (a, b) = if theta < 1e-4 {
        (1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / t2)
    };
    So3::identity() + x * a + (x * x) * b
}

/// exp(X) = e^{tr/2} (cosh μ · I + sinh μ / μ · Y), Y = X − tr/2, μ² = −det Y.
fn expm_2x2(x: &Su2) -> Su2 {
    let half_tr = (x[(0, 0)] + x[(1, 1)]) * 0.5;
    let y = x - Su2::identity() * half_tr;
    let mu = (-y.determinant()).sqrt();
    let mu2 = mu * mu;
    let (c, s) = if mu.norm() < 1e-4 {
        (
            Complex64::ONE + mu2 / 2.0 + mu2 * mu2 / 24.0,
            Complex64::ONE + mu2 / 6.0 + mu2 * mu2 / 120.0,
        )
    } else {
        (mu.cosh(), mu.sinh() / mu)
    };
    (Su2::identity() * c + y * s) * half_tr.exp()
}

/// Scaling and squaring with a degree-18 Taylor polynomial.
fn expm_taylor<E>(x: &E) -> E
where
    E: MatrixValue,
{
    let n = x.magnitude();
    let squarings = if n > 0.5 { (n / 0.5).log2().ceil() as i32 } else { 0 };
    let y = x.scale(0.5f64.powi(squarings));
    let mut term = E::identity();
    let mut sum = E::identity();
    for k in 1..=18 {
        term = (term * y).scale(1.0 / k as f64);
        sum = sum + term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Multiplies a complex matrix by `i`.
pub fn times_i<C: ComplexMatrix>(m: &C) -> C {
    m.scale_c(I)
}

/// Orthogonality/unitarity defect ‖g†g − I‖.
pub fn group_drift<E: MatrixValue>(g: &E) -> f64 {
    (g.dagger() * *g - E::identity()).magnitude()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(a: f64, b: f64, d: f64) -> CoeffTriple {
        CoeffTriple::new(a, b, d)
    }

    fn close<E: FieldValue>(a: &E, b: &E, tol: f64) -> bool {
        (*a - *b).magnitude() <= tol
    }

    #[test]
    fn so3_entry_pattern() {
        let m = so3_from_coeffs(c(2.0, 3.0, 5.0), Beta::Plus).unwrap();
        assert_eq!(m, So3::new(0.0, 2.0, -3.0, -2.0, 0.0, 5.0, 3.0, -5.0, 0.0));
        assert_eq!(so3_from_coeffs(CoeffTriple::ZERO, Beta::Plus).unwrap(), So3::zeros());
        let m = so3_from_coeffs(c(1.0, 0.0, 0.0), Beta::Minus).unwrap();
        assert_eq!(m, So3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn non_finite_coefficients_rejected() {
        assert!(so3_from_coeffs(c(f64::NAN, 0.0, 0.0), Beta::Plus).is_err());
        assert!(su2_from_coeffs(c(0.0, f64::INFINITY, 0.0), Su2Prefactor::HalfI).is_err());
    }

    #[test]
    fn su2_entry_pattern() {
        let z = |re, im| Complex64::new(re, im);
        let m = su2_from_coeffs(c(0.0, 0.0, 2.0), Su2Prefactor::InverseTwoI).unwrap();
        assert!(close(&m, &Su2::new(z(0.0, -1.0), z(0.0, 0.0), z(0.0, 0.0), z(0.0, 1.0)), 1e-15));
        assert_eq!(su2_from_coeffs(CoeffTriple::ZERO, Su2Prefactor::HalfI).unwrap(), Su2::zeros());
        let m = su2_from_coeffs(c(2.0, 0.0, 0.0), Su2Prefactor::HalfI).unwrap();
        assert!(close(&m, &Su2::new(z(0.0, 0.0), z(0.0, 1.0), z(0.0, 1.0), z(0.0, 0.0)), 1e-15));
        check_su2(&m, 1e-15).unwrap();
    }

    #[test]
    fn structure_constants() {
        let f = |i: usize| {
            let mut a = [0.0; 3];
            a[i] = 1.0;
            so3_from_coeffs(a.into(), Beta::Plus).unwrap()
        };
        assert_eq!(commutator(&f(0), &f(1)), f(2));
        assert_eq!(commutator(&f(1), &f(2)), f(0));
        assert_eq!(commutator(&f(2), &f(0)), f(1));

        let e = |i: usize| {
            let mut a = [0.0; 3];
            a[i] = 1.0;
            su2_from_coeffs(a.into(), Su2Prefactor::HalfI).unwrap()
        };
        assert!(close(&commutator(&e(0), &e(1)), &e(2), 1e-15));
        assert!(close(&commutator(&e(1), &e(2)), &e(0), 1e-15));
        assert!(close(&commutator(&e(2), &e(0)), &e(1), 1e-15));
    }

    #[test]
    fn commutator_trivial_cases() {
        let x = so3_from_coeffs(c(1.0, -2.0, 0.5), Beta::Plus).unwrap();
        assert_eq!(commutator(&x, &x), So3::zeros());
        assert_eq!(commutator(&x, &So3::identity()), So3::zeros());
    }

    #[test]
    fn iso_basis_and_zero() {
        let x = su2_from_coeffs(c(1.0, 0.0, 0.0), Su2Prefactor::HalfI).unwrap();
        assert!(close(
            &iso_to_so3(&x, Su2Prefactor::HalfI).unwrap(),
            &so3_from_coeffs(c(1.0, 0.0, 0.0), Beta::Plus).unwrap(),
            1e-15
        ));
        assert_eq!(iso_to_so3(&Su2::zeros(), Su2Prefactor::HalfI).unwrap(), So3::zeros());
        assert!(iso_to_so3(&Su2::identity(), Su2Prefactor::HalfI).is_err());
    }

    fn random_triple(rng: &mut ChaCha8Rng) -> CoeffTriple {
        c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
    }

    #[test]
    fn iso_is_homomorphism_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        let mut worst_inverse: f64 = 0.0;
        for _ in 0..1000 {
            let (a, b) = (random_triple(&mut rng), random_triple(&mut rng));
            for (p, w) in [(Su2Prefactor::HalfI, &mut worst), (Su2Prefactor::InverseTwoI, &mut worst_inverse)] {
                let x = su2_from_coeffs(a, p).unwrap();
                let y = su2_from_coeffs(b, p).unwrap();
                let lhs = iso_to_so3(&commutator(&x, &y), p).unwrap();
                let rhs = commutator(&iso_to_so3(&x, p).unwrap(), &iso_to_so3(&y, p).unwrap());
                *w = w.max((lhs - rhs).norm());
            }
        }
        assert!(worst <= 1e-12, "worst deviation {worst:e}");
        // reversed brackets under the literature prefactor
        assert!(worst_inverse > 0.1);
    }

    #[test]
    fn expm_group_constraints() {
        assert_eq!(So3::zeros().expm(), So3::identity());
        assert_eq!(expm_su2(&Su2::zeros()).unwrap(), Su2::identity());

        let x = so3_from_coeffs(c(0.0, 0.0, PI), Beta::Plus).unwrap();
        let g = expm_so3(&x).unwrap();
        let ginv = expm_so3(&-x).unwrap();
        assert!(close(&(g * ginv), &So3::identity(), 1e-14));
        assert!(group_drift(&g) <= 1e-14);
        // rotation by π about the F₃ axis: fixes e₁, flips e₂ and e₃
        assert!(close(&g, &So3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, -1.0)), 1e-14));

        let e1 = su2_from_coeffs(c(1.0, 0.0, 0.0), Su2Prefactor::HalfI).unwrap();
        for theta in [0.3, 1.0, PI, 2.0 * PI, 4.0] {
            let u = expm_su2(&(e1 * Complex64::new(theta, 0.0))).unwrap();
            let tr = u[(0, 0)] + u[(1, 1)];
            assert!((tr - Complex64::new(2.0 * (theta / 2.0).cos(), 0.0)).norm() <= 1e-14);
            assert!(group_drift(&u) <= 1e-14);
        }
        let u = expm_su2(&(e1 * Complex64::new(4.0 * PI, 0.0))).unwrap();
        assert!(close(&u, &Su2::identity(), 1e-13));
        let u = expm_su2(&(e1 * Complex64::new(2.0 * PI, 0.0))).unwrap();
        assert!(close(&u, &(-Su2::identity()), 1e-13));
    }

    #[test]
    fn expm_general_paths_agree_with_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x = so3_from_coeffs(random_triple(&mut rng), Beta::Plus).unwrap();
            assert!(close(&rodrigues(&x), &expm_taylor(&x), 1e-12));
            let s = su2_from_coeffs(random_triple(&mut rng), Su2Prefactor::HalfI).unwrap();
            assert!(close(&expm_2x2(&s), &expm_taylor(&s), 1e-12));
        }
    }

    #[test]
    fn norms() {
        assert_eq!(norm(&So3::zeros()), 0.0);
        assert!((norm(&So3::identity()) - 3f64.sqrt()).abs() < 1e-15);
        let m = so3_from_coeffs(c(2.0, 3.0, 5.0), Beta::Plus).unwrap();
        assert!((norm(&m) - 76f64.sqrt()).abs() < 1e-14);
        assert!((norm(&m.scale(-2.5)) - 2.5 * norm(&m)).abs() < 1e-13);
    }

    #[test]
    fn coefficient_roundtrip() {
        let t = c(0.3, -1.2, 2.5);
        assert_eq!(so3_coeffs(&so3_from_coeffs(t, Beta::Plus).unwrap()), t);
        for p in [Su2Prefactor::HalfI, Su2Prefactor::InverseTwoI] {
            let back = su2_coeffs(&su2_from_coeffs(t, p).unwrap(), p);
            assert!((back - t).as_array().iter().all(|d| d.abs() < 1e-15));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn triple() -> impl Strategy<Value = CoeffTriple> {
            (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b, d)| c(a, b, d))
        }

        proptest! {
            #[test]
            fn so3_linear_and_antisymmetric(a in triple(), b in triple(), s in -3.0..3.0f64) {
                let lhs = so3_unchecked(a.scale(s) + b, Beta::Plus);
                let rhs = so3_unchecked(a, Beta::Plus).scale(s) + so3_unchecked(b, Beta::Plus);
                prop_assert!((lhs - rhs).norm() <= 1e-12);
                prop_assert_eq!(lhs.transpose(), -lhs);
            }

            #[test]
            fn su2_traceless_anti_hermitian(a in triple()) {
                for p in [Su2Prefactor::HalfI, Su2Prefactor::InverseTwoI] {
                    let m = su2_unchecked(a, p);
                    prop_assert_eq!(m[(0, 0)] + m[(1, 1)], Complex64::ZERO);
                    prop_assert!(check_su2(&m, 1e-15).is_ok());
                }
            }

            #[test]
            fn commutator_antisymmetric(a in triple(), b in triple()) {
                let x = so3_unchecked(a, Beta::Plus);
                let y = so3_unchecked(b, Beta::Plus);
                prop_assert_eq!(commutator(&x, &y), -commutator(&y, &x));
            }

            #[test]
            fn expm_inverse_product(a in triple()) {
                let x = so3_unchecked(a, Beta::Plus);
                prop_assert!((x.expm() * (-x).expm() - So3::identity()).norm() <= 1e-14);
                prop_assert!(group_drift(&x.expm()) <= 1e-14);
                let s = su2_unchecked(a, Su2Prefactor::HalfI);
                prop_assert!((s.expm() * (-s).expm() - Su2::identity()).norm() <= 1e-14);
                prop_assert!(group_drift(&s.expm()) <= 1e-14);
            }
        }
    }
}
