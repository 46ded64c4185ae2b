//! Tracial matrix algebras.
//!
//! An [`OperatorElement`] is a square complex matrix together with the
//! weight of its trace: `τ(f) = trace_weight · tr(f)`. Matrix algebras `M_n`
//! use weight 1, group algebras under the left regular representation use
//! `1/|G|` so that `τ(1) = 1`. All noncommutative `L_p` norms in the crate
//! are Schatten norms with respect to this weighted trace.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Relative tolerance for the Hermiticity gate: `‖f − f*‖∞ ≤ 1e−9·(1+‖f‖∞)`.
pub const HERMITIAN_TOL: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct OperatorElement {
    matrix: CMatrix,
    trace_weight: f64,
}

impl fmt::Debug for OperatorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorElement")
            .field("dim", &self.dim())
            .field("trace_weight", &self.trace_weight)
            .field("matrix", &self.matrix)
            .finish()
    }
}

impl OperatorElement {
    pub fn new(matrix: CMatrix, trace_weight: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        if !(trace_weight > 0.0 && trace_weight.is_finite()) {
            return Err(Error::InvalidTraceWeight(trace_weight));
        }
        Ok(Self {
            matrix,
            trace_weight,
        })
    }

    /// Element of `M_n` with the unnormalized trace.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, 1.0)
    }

    pub fn from_real(matrix: &DMatrix<f64>, trace_weight: f64) -> Result<Self> {
        Self::new(matrix.map(|x| C64::new(x, 0.0)), trace_weight)
    }

    pub fn identity(dim: usize, trace_weight: f64) -> Self {
        Self::new(CMatrix::identity(dim, dim), trace_weight).expect("identity is valid")
    }

    pub fn zeros(dim: usize, trace_weight: f64) -> Self {
        Self::new(CMatrix::zeros(dim, dim), trace_weight).expect("zero is valid")
    }

    /// Matrix unit `e_{ij}` (zero-based indices).
    pub fn matrix_unit(dim: usize, i: usize, j: usize, trace_weight: f64) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(i, j)] = ONE;
        Self::new(m, trace_weight).expect("matrix unit is valid")
    }

    pub fn diagonal(values: &[f64], trace_weight: f64) -> Self {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)));
        Self::new(CMatrix::from_diagonal(&d), trace_weight).expect("diagonal is valid")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace_weight(&self) -> f64 {
        self.trace_weight
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// New element in the same algebra (same trace weight).
    pub fn like(&self, matrix: CMatrix) -> Self {
        assert_eq!(matrix.nrows(), self.dim(), "dimension mismatch");
        assert_eq!(matrix.ncols(), self.dim(), "dimension mismatch");
        Self {
            matrix,
            trace_weight: self.trace_weight,
        }
    }

    pub fn identity_like(&self) -> Self {
        Self::identity(self.dim(), self.trace_weight)
    }

    pub fn check_same_algebra(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        self.like(self.matrix.adjoint())
    }

    /// Weighted trace `τ(f)`.
    pub fn trace(&self) -> C64 {
        self.matrix.trace() * self.trace_weight
    }

    /// `|f|² = f* f`.
    pub fn abs_squared(&self) -> Self {
        self.like(self.matrix.adjoint() * &self.matrix)
    }

    /// Trace inner product `⟨f, g⟩ = τ(f* g)`.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for (a, b) in self.matrix.iter().zip(other.matrix.iter()) {
            acc += a.conj() * b;
        }
        acc * self.trace_weight
    }

    pub fn scale(&self, c: C64) -> Self {
        self.like(self.matrix.map(|z| z * c))
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.like(self.matrix.map(|z| z * c))
    }

    /// Tensor product; trace weights multiply.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
            trace_weight: self.trace_weight * other.trace_weight,
        }
    }

    /// Entrywise (Schur) product with a real symbol.
    pub fn schur_real(&self, symbol: &DMatrix<f64>) -> Self {
        assert_eq!(symbol.shape(), self.matrix.shape(), "symbol shape mismatch");
        self.like(self.matrix.zip_map(symbol, |z, s| z * s))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.like(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator norm `‖f‖∞` (largest singular value).
    pub fn norm_inf(&self) -> f64 {
        singular_values(self).iter().copied().fold(0.0, f64::max)
    }

    pub fn hermitian_part(&self) -> Self {
        self.like((&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0))
    }

    /// `‖f − f*‖∞`.
    pub fn hermitian_defect(&self) -> f64 {
        let diff = self.like(&self.matrix - self.matrix.adjoint());
        diff.norm_inf()
    }

    pub fn is_hermitian(&self) -> bool {
        self.check_hermitian().is_ok()
    }

    /// Gate for every Hermitian-only operation.
    pub fn check_hermitian(&self) -> Result<()> {
        let diff = &self.matrix - self.matrix.adjoint();
        let fro_defect = diff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // ‖·‖∞ ≤ ‖·‖_F and ‖f‖∞ ≥ ‖f‖_F/√n give a cheap sufficient test.
        let cheap_scale = 1.0 + self.frobenius() / (self.dim() as f64).sqrt();
        if fro_defect <= HERMITIAN_TOL * cheap_scale {
            return Ok(());
        }
        let defect = self.like(diff).norm_inf();
        let tolerance = HERMITIAN_TOL * (1.0 + self.norm_inf());
        if defect <= tolerance {
            Ok(())
        } else {
            Err(Error::NotHermitian { defect, tolerance })
        }
    }
}

impl Add for &OperatorElement {
    type Output = OperatorElement;
    fn add(self, rhs: &OperatorElement) -> OperatorElement {
        self.like(&self.matrix + &rhs.matrix)
    }
}

impl Sub for &OperatorElement {
    type Output = OperatorElement;
    fn sub(self, rhs: &OperatorElement) -> OperatorElement {
        self.like(&self.matrix - &rhs.matrix)
    }
}

impl Mul for &OperatorElement {
    type Output = OperatorElement;
    fn mul(self, rhs: &OperatorElement) -> OperatorElement {
        self.like(&self.matrix * &rhs.matrix)
    }
}

impl Neg for &OperatorElement {
    type Output = OperatorElement;
    fn neg(self) -> OperatorElement {
        self.like(-&self.matrix)
    }
}

impl Add for OperatorElement {
    type Output = OperatorElement;
    fn add(self, rhs: OperatorElement) -> OperatorElement {
        &self + &rhs
    }
}

impl Sub for OperatorElement {
    type Output = OperatorElement;
    fn sub(self, rhs: OperatorElement) -> OperatorElement {
        &self - &rhs
    }
}

impl Mul for OperatorElement {
    type Output = OperatorElement;
    fn mul(self, rhs: OperatorElement) -> OperatorElement {
        &self * &rhs
    }
}

/// Schatten exponent `p ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchattenExponent {
    Finite(f64),
    Infinity,
}

impl SchattenExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        if p.is_infinite() {
            Ok(Self::Infinity)
        } else {
            Ok(Self::Finite(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Finite(p) => p,
            Self::Infinity => f64::INFINITY,
        }
    }

    /// Hölder conjugate `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Self {
        match self {
            Self::Infinity => Self::Finite(1.0),
            Self::Finite(p) if p == 1.0 => Self::Infinity,
            Self::Finite(p) => Self::Finite(p / (p - 1.0)),
        }
    }
}

pub fn singular_values(f: &OperatorElement) -> DVector<f64> {
    f.matrix.clone().svd(false, false).singular_values
}

/// `(τ Σ σᵢ^p)^{1/p}`, or `max σᵢ` for `p = ∞` (independent of the weight).
pub fn schatten_norm(f: &OperatorElement, p: SchattenExponent) -> f64 {
    let sv = singular_values(f);
    schatten_from_values(sv.as_slice(), f.trace_weight, p)
}

pub(crate) fn schatten_from_values(values: &[f64], weight: f64, p: SchattenExponent) -> f64 {
    let top = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    match p {
        SchattenExponent::Infinity => top,
        SchattenExponent::Finite(p) => {
            if top == 0.0 {
                return 0.0;
            }
            let sum: f64 = values.iter().map(|v| (v.abs() / top).powf(p)).sum();
            top * (weight * sum).powf(1.0 / p)
        }
    }
}

/// Eigendecomposition `h = U Λ U*` of a Hermitian element, eigenvalues ascending.
pub fn hermitian_eigen(h: &OperatorElement) -> Result<(Vec<f64>, CMatrix)> {
    h.check_hermitian()?;
    let sym = h.hermitian_part().into_matrix();
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(h.dim(), h.dim(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Eigenvalues of a Hermitian element, ascending.
pub fn hermitian_spectrum(h: &OperatorElement) -> Result<Vec<f64>> {
    h.check_hermitian()?;
    let sym = h.hermitian_part().into_matrix();
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `U φ(Λ) U*` for Hermitian `h`.
pub fn hermitian_calculus<F>(h: &OperatorElement, phi: F) -> Result<OperatorElement>
where
    F: Fn(f64) -> f64,
{
    hermitian_calculus_complex(h, |x| C64::new(phi(x), 0.0))
}

pub fn hermitian_calculus_complex<F>(h: &OperatorElement, phi: F) -> Result<OperatorElement>
where
    F: Fn(f64) -> C64,
{
    let (values, u) = hermitian_eigen(h)?;
    let mut scaled = u.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let c = phi(lambda);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= c);
    }
    Ok(h.like(scaled * u.adjoint()))
}

/// `|f| = (f* f)^{1/2}`.
pub fn operator_abs(f: &OperatorElement) -> OperatorElement {
    let gram = f.abs_squared().hermitian_part();
    hermitian_calculus(&gram, |x| x.max(0.0).sqrt()).expect("f*f is Hermitian")
}

/// `max(0, −λ_min(f))`.
pub fn psd_defect(f: &OperatorElement) -> Result<f64> {
    let spectrum = hermitian_spectrum(f)?;
    Ok((-spectrum[0]).max(0.0))
}

/// Scale-invariant test of `a ≤ b`: `psd_defect(b − a) ≤ tol·(1+‖b‖∞)`.
/// Returns the defect and whether it is within tolerance.
pub fn operator_leq(a: &OperatorElement, b: &OperatorElement, tol: f64) -> Result<(f64, bool)> {
    let defect = psd_defect(&(b - a))?;
    let scale = 1.0 + b.norm_inf();
    Ok((defect, defect <= tol * scale))
}

/// `‖h‖∞` of a Hermitian element from its spectrum.
pub fn hermitian_norm_inf(h: &OperatorElement) -> Result<f64> {
    let spectrum = hermitian_spectrum(h)?;
    Ok(spectrum[0].abs().max(spectrum[spectrum.len() - 1].abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{gaussian_element, random_psd, Seeded};
    use approx::assert_relative_eq;

    fn p(v: f64) -> SchattenExponent {
        SchattenExponent::new(v).unwrap()
    }

    #[test]
    fn schatten_examples() {
        let id = OperatorElement::identity(3, 1.0);
        assert_relative_eq!(schatten_norm(&id, p(2.0)), 3f64.sqrt(), epsilon = 1e-14);
        let d = OperatorElement::diagonal(&[1.0, -2.0], 1.0);
        assert_relative_eq!(schatten_norm(&d, p(1.0)), 3.0, epsilon = 1e-14);
        let e12 = OperatorElement::matrix_unit(2, 0, 1, 1.0);
        assert_relative_eq!(schatten_norm(&e12, SchattenExponent::Infinity), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn exponent_below_one_rejected() {
        assert_eq!(SchattenExponent::new(0.5), Err(Error::InvalidExponent(0.5)));
        assert!(SchattenExponent::new(f64::NAN).is_err());
        assert_eq!(SchattenExponent::new(f64::INFINITY).unwrap(), SchattenExponent::Infinity);
    }

    #[test]
    fn inf_norm_ignores_trace_weight() {
        let mut rng = Seeded::new(3).stream(0);
        let f = gaussian_element(5, 1.0, &mut rng);
        let g = OperatorElement::new(f.matrix().clone(), 0.2).unwrap();
        assert_eq!(
            schatten_norm(&f, SchattenExponent::Infinity),
            schatten_norm(&g, SchattenExponent::Infinity)
        );
        assert_relative_eq!(
            schatten_norm(&g, p(2.0)),
            0.2f64.sqrt() * schatten_norm(&f, p(2.0)),
            max_relative = 1e-12
        );
    }

    #[test]
    fn abs_examples() {
        let d = OperatorElement::diagonal(&[-1.0, 2.0], 1.0);
        let a = operator_abs(&d);
        assert!((a.matrix() - OperatorElement::diagonal(&[1.0, 2.0], 1.0).matrix()).norm() < 1e-14);

        let e12 = OperatorElement::matrix_unit(2, 0, 1, 1.0);
        let e22 = OperatorElement::matrix_unit(2, 1, 1, 1.0);
        assert!((operator_abs(&e12).matrix() - e22.matrix()).norm() < 1e-14);

        // a unitary: rotation times a phase
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0)],
        );
        let u = OperatorElement::from_matrix(u).unwrap();
        assert!((operator_abs(&u).matrix() - CMatrix::identity(2, 2)).norm() < 1e-13);
    }

    #[test]
    fn calculus_examples() {
        let h = OperatorElement::diagonal(&[0.0, -1.0], 1.0);
        let e = hermitian_calculus(&h, f64::exp).unwrap();
        assert_relative_eq!(e.matrix()[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.matrix()[(1, 1)].re, (-1f64).exp(), epsilon = 1e-14);

        let mut rng = Seeded::new(11).stream(0);
        let g = gaussian_element(6, 1.0, &mut rng);
        let h = g.hermitian_part();
        let sq = hermitian_calculus(&h, |x| x * x).unwrap();
        let direct = &h * &h;
        assert!((sq.matrix() - direct.matrix()).norm() <= 1e-10 * direct.matrix().norm());

        let ident = hermitian_calculus(&h, |x| x).unwrap();
        assert!((ident.matrix() - h.matrix()).norm() <= 1e-10 * h.matrix().norm());

        let psd = random_psd(7, 1.0, &mut rng);
        let root = hermitian_calculus(&psd, |x| x.max(0.0).sqrt()).unwrap();
        let back = &root * &root;
        assert!((back.matrix() - psd.matrix()).norm() <= 1e-8 * psd.matrix().norm());
    }

    #[test]
    fn calculus_rejects_non_hermitian() {
        let e12 = OperatorElement::matrix_unit(2, 0, 1, 1.0);
        assert!(matches!(
            hermitian_calculus(&e12, f64::exp),
            Err(Error::NotHermitian { .. })
        ));
        assert!(psd_defect(&e12).is_err());
    }

    #[test]
    fn psd_defect_examples() {
        assert_eq!(psd_defect(&OperatorElement::identity(4, 1.0)).unwrap(), 0.0);
        let d = OperatorElement::diagonal(&[1.0, -0.5], 1.0);
        assert_relative_eq!(psd_defect(&d).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn calculus_composition() {
        let mut rng = Seeded::new(5).stream(1);
        let psd = random_psd(5, 1.0, &mut rng);
        let once = hermitian_calculus(&psd, |x| (x.max(0.0)).sqrt()).unwrap();
        let twice = hermitian_calculus(&once, |x| x.exp()).unwrap();
        let composed = hermitian_calculus(&psd, |x| x.max(0.0).sqrt().exp()).unwrap();
        assert!((twice.matrix() - composed.matrix()).norm() <= 1e-8 * composed.matrix().norm());
    }

    #[test]
    fn random_examples_hold_duality_and_monotonicity() {
        let seeds = Seeded::new(42);
        for k in 0..40 {
            let mut rng = seeds.stream(k);
            let n = 2 + (k as usize % 5);
            let f = gaussian_element(n, 1.0, &mut rng);
            let g = gaussian_element(n, 1.0, &mut rng);
            for &pv in &[1.0, 1.5, 2.0, 3.0, 8.0] {
                let pe = p(pv);
                let pairing = (f.matrix() * g.matrix().adjoint()).trace().norm();
                let bound = schatten_norm(&f, pe) * schatten_norm(&g, pe.conjugate());
                assert!(pairing <= bound * (1.0 + 1e-12));
                // ‖f‖_p ≤ n^{1/p}‖f‖∞ for the unnormalized trace
                let inf = schatten_norm(&f, SchattenExponent::Infinity);
                assert!(schatten_norm(&f, pe) <= (n as f64).powf(1.0 / pv) * inf * (1.0 + 1e-12));
            }
            // normalized trace: p ↦ ‖f‖_p nondecreasing
            let fn_ = OperatorElement::new(f.matrix().clone(), 1.0 / n as f64).unwrap();
            let norms: Vec<f64> = [1.0, 2.0, 4.0, f64::INFINITY]
                .iter()
                .map(|&pv| schatten_norm(&fn_, p(pv)))
                .collect();
            assert!(norms.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-12)));
            // |f| has the singular values of f
            let mut a = singular_values(&operator_abs(&f)).as_slice().to_vec();
            let mut b = singular_values(&f).as_slice().to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-10 * (1.0 + y));
            }
        }
    }
}
