//! Quantum metrics: Lipschitz seminorms from the gradient form or from
//! commutators with powers of the generator, and the distance they induce
//! on states, `d(φ, ψ) = sup{|φ(a) − ψ(a)| : |a|_lip ≤ 1}`.
//!
//! For Hermitian `a` both seminorms have the form `|a|² = ‖Q(a, a)‖` with `Q`
//! a PSD-valued sesquilinear form, so `|a| ≤ 1` iff `τ(W Q(a,a)) ≤ 1` for
//! every density matrix `W`. The distance is the support function of that
//! intersection of ellipsoids, and by convex duality
//! `d = min_W (ℓᵀ Q_W⁻¹ ℓ)^{1/2}` with `ℓ` the functional `φ − ψ`. The solver
//! follows the log-det barrier path of the primal problem; each center gives a
//! dual `W` (an upper bound) and a feasible witness (a lower bound).

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::forms::GradientForms;
use crate::groups::{left_regular, FiniteGroup, LengthFunction};
use crate::opcore::{psd_defect, CMatrix, OperatorElement, C64, I, ONE, ZERO};
use crate::sampling::{complex_normal, Seeded};
use crate::semigroup::{MarkovSemigroup, Species};

/// Tolerance for a density to count as positive and normalized.
pub const STATE_TOL: f64 = 1e-10;

/// Eigenvalues of the form below this fraction of its largest are its kernel.
const NULL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SeminormKind {
    /// `max{‖Γ(f,f)‖^{1/2}, ‖Γ(f*,f*)‖^{1/2}}`.
    GammaMax,
    /// `‖[L^α, f]‖` on the carrier space, `α ∈ (0, 1]`.
    Commutator { alpha: f64 },
}

/// A Lipschitz seminorm on the algebra of a Markov semigroup.
#[derive(Clone, Debug)]
pub struct LipschitzSeminorm {
    kind: SeminormKind,
    semigroup: MarkovSemigroup,
    /// `L^α` on the carrier space: `ℓ²(G)` for groups, `L²(M_n)` (vectorized) for Schur.
    generator_power: Option<CMatrix>,
}

impl LipschitzSeminorm {
    pub fn gamma_max(semigroup: &MarkovSemigroup) -> Self {
        Self {
            kind: SeminormKind::GammaMax,
            semigroup: semigroup.clone(),
            generator_power: None,
        }
    }

    pub fn commutator(semigroup: &MarkovSemigroup, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidExponent(alpha));
        }
        let power = |v: f64| C64::new(v.max(0.0).powf(alpha), 0.0);
        let diagonal: Vec<C64> = match semigroup.species() {
            Species::Group { .. } => semigroup.effective_length().unwrap().into_iter().map(power).collect(),
            Species::Schur { .. } => semigroup.effective_rates().unwrap().iter().map(|&v| power(v)).collect(),
        };
        Ok(Self {
            kind: SeminormKind::Commutator { alpha },
            semigroup: semigroup.clone(),
            generator_power: Some(CMatrix::from_diagonal(&DVector::from_vec(diagonal))),
        })
    }

    pub fn new(semigroup: &MarkovSemigroup, kind: SeminormKind) -> Result<Self> {
        match kind {
            SeminormKind::GammaMax => Ok(Self::gamma_max(semigroup)),
            SeminormKind::Commutator { alpha } => Self::commutator(semigroup, alpha),
        }
    }

    pub fn kind(&self) -> SeminormKind {
        self.kind
    }

    pub fn semigroup(&self) -> &MarkovSemigroup {
        &self.semigroup
    }

    /// `f` as an operator on the carrier space.
    fn carrier_operator(&self, f: &OperatorElement) -> CMatrix {
        match self.semigroup.species() {
            Species::Group { .. } => f.matrix().clone(),
            // left multiplication on column-major vec(X): I ⊗ f
            Species::Schur { .. } => {
                let n = f.dim();
                CMatrix::identity(n, n).kronecker(f.matrix())
            }
        }
    }

    /// `[L^α, f]` on the carrier space.
    fn commutator_matrix(&self, f: &OperatorElement) -> CMatrix {
        let d = self.generator_power.as_ref().expect("commutator seminorm");
        let m = self.carrier_operator(f);
        d * &m - &m * d
    }

    /// `Q(a, b)`: `Γ(a, b)` or `[L^α, a]*[L^α, b]`. For Hermitian `a`, `|a|² = ‖Q(a, a)‖`.
    fn pair(&self, a: &OperatorElement, b: &OperatorElement) -> Result<CMatrix> {
        match self.kind {
            SeminormKind::GammaMax => Ok(GradientForms::new(&self.semigroup).gamma(a, b)?.into_matrix()),
            SeminormKind::Commutator { .. } => Ok(self.commutator_matrix(a).adjoint() * self.commutator_matrix(b)),
        }
    }

    pub fn lip(&self, f: &OperatorElement) -> Result<f64> {
        match self.kind {
            SeminormKind::GammaMax => {
                let forms = GradientForms::new(&self.semigroup);
                let fs = f.adjoint();
                Ok(top_eigenvalue(forms.gamma(f, f)?.matrix())
                    .max(top_eigenvalue(forms.gamma(&fs, &fs)?.matrix()))
                    .max(0.0)
                    .sqrt())
            }
            SeminormKind::Commutator { .. } => {
                let c = self.commutator_matrix(f);
                Ok(top_eigenvalue(&(c.adjoint() * &c)).max(0.0).sqrt())
            }
        }
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn top_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// A τ-orthonormal real basis of the Hermitian elements with `τ(a) = 0`.
pub fn hermitian_basis(s: &MarkovSemigroup) -> Vec<OperatorElement> {
    match s.species() {
        Species::Group { length } => {
            let group = length.group();
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let mut out = Vec::new();
            for g in 0..group.order() {
                let gi = group.inv(g);
                if g == group.identity() || gi < g {
                    continue;
                }
                let lg = left_regular(g, group);
                if gi == g {
                    out.push(lg);
                } else {
                    let li = left_regular(gi, group);
                    out.push((&lg + &li).scale_real(r));
                    out.push((&lg - &li).scale(I * r));
                }
            }
            out
        }
        Species::Schur { trace_weight, .. } => {
            let n = s.dim();
            let w = *trace_weight;
            let c = 1.0 / (2.0 * w).sqrt();
            let mut out = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let mut re = CMatrix::zeros(n, n);
                    re[(i, j)] = C64::new(c, 0.0);
                    re[(j, i)] = C64::new(c, 0.0);
                    let mut im = CMatrix::zeros(n, n);
                    im[(i, j)] = C64::new(0.0, -c);
                    im[(j, i)] = C64::new(0.0, c);
                    out.push(OperatorElement::new(re, w).unwrap());
                    out.push(OperatorElement::new(im, w).unwrap());
                }
            }
            // generalized Gell-Mann diagonals
            for k in 1..n {
                let scale = 1.0 / (w * (k * (k + 1)) as f64).sqrt();
                let mut d = vec![0.0; n];
                d[..k].iter_mut().for_each(|v| *v = scale);
                d[k] = -(k as f64) * scale;
                out.push(OperatorElement::diagonal(&d, w));
            }
            out
        }
    }
}

/// A state `a ↦ τ(d a)` given by its density.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    density: OperatorElement,
}

impl State {
    pub fn new(density: OperatorElement) -> Result<Self> {
        let defect = density.hermitian_defect();
        if defect > STATE_TOL {
            return Err(Error::InvalidState(format!("density is not Hermitian (defect {defect:.3e})")));
        }
        let density = density.hermitian_part();
        let negative = psd_defect(&density)?;
        if negative > STATE_TOL {
            return Err(Error::InvalidState(format!("density has eigenvalue {:.3e}", -negative)));
        }
        let mass = density.trace().re;
        if (mass - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("density has trace {mass}")));
        }
        Ok(Self { density })
    }

    /// On a group algebra: `λ(g) ↦ p(g)` for a positive definite `p` with `p(e) = 1`.
    pub fn from_positive_definite(p: &[C64], group: &FiniteGroup) -> Result<Self> {
        if p.len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                got: p.len(),
            });
        }
        let coefficients: Vec<C64> = (0..group.order()).map(|g| p[group.inv(g)]).collect();
        Self::new(crate::groups::synthesize(&coefficients, group))
    }

    /// On `M_n`: the vector state `a ↦ ⟨ξ, aξ⟩/‖ξ‖²`.
    pub fn vector(xi: &DVector<C64>, trace_weight: f64) -> Result<Self> {
        let xi = xi / C64::new(xi.norm(), 0.0);
        Self::new(OperatorElement::new(&xi * xi.adjoint(), trace_weight)?.scale_real(1.0 / trace_weight))
    }

    /// `f*f/τ(f*f)` for a Gaussian `f` of the semigroup's algebra.
    pub fn random<R: Rng + ?Sized>(s: &MarkovSemigroup, rng: &mut R) -> Self {
        let f = s.random_element(rng);
        let g = f.abs_squared().hermitian_part();
        let mass = g.trace().re;
        Self { density: g.scale_real(1.0 / mass) }
    }

    pub fn density(&self) -> &OperatorElement {
        &self.density
    }

    pub fn evaluate(&self, a: &OperatorElement) -> C64 {
        (&self.density * a).trace()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Cap on Newton steps.
    pub iterations: usize,
    /// Stop once `upper − lower ≤ gap_tol·(1 + upper)`.
    pub gap_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            iterations: 500,
            gap_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceResult {
    /// Achieved value `φ(a*) − ψ(a*)` of the feasible witness.
    pub distance: f64,
    /// Best dual value; the true distance lies in `[distance, upper_bound]`.
    pub upper_bound: f64,
    pub gap: f64,
    /// Coefficients of the witness in [`hermitian_basis`].
    pub witness_coefficients: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl DistanceResult {
    fn infinite(m: usize) -> Self {
        Self {
            distance: f64::INFINITY,
            upper_bound: f64::INFINITY,
            gap: 0.0,
            witness_coefficients: vec![0.0; m],
            iterations: 0,
            converged: true,
        }
    }
}

/// The problem data in a basis of the form's range.
struct DualProblem {
    /// Range basis as combinations of the Hermitian basis (columns).
    range: DMatrix<f64>,
    /// `blocks[i][j] = Q(E'_i, E'_j)`.
    blocks: Vec<Vec<CMatrix>>,
    ell: DVector<f64>,
    dim: usize,
}

impl DualProblem {
    fn q_matrix(&self, w: &CMatrix) -> DMatrix<f64> {
        let m = self.ell.len();
        let wt = w.transpose();
        DMatrix::from_fn(m, m, |i, j| {
            // Re Tr(W B) = Re Σ W_ab B_ba
            self.blocks[i][j].component_mul(&wt).iter().map(|z| z.re).sum()
        })
        .symmetrize()
    }

    fn combine(&self, y: &DVector<f64>) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.blocks.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                let c = y[i] * y[j];
                if c != 0.0 {
                    out += b * C64::new(c, 0.0);
                }
            }
        }
        hermitian_part(&out)
    }
}

trait Symmetrize {
    fn symmetrize(self) -> Self;
}

impl Symmetrize for DMatrix<f64> {
    fn symmetrize(self) -> Self {
        (&self + self.transpose()) * 0.5
    }
}

/// One evaluation of the dual at `W`: value and the witness direction `Q_W⁻¹ℓ`.
struct Evaluation {
    upper: f64,
    lower: f64,
    y: DVector<f64>,
    top: f64,
}

fn evaluate(p: &DualProblem, w: &CMatrix) -> Option<Evaluation> {
    let q = p.q_matrix(w);
    let y = q.cholesky()?.solve(&p.ell);
    let value = p.ell.dot(&y);
    if !(value > 0.0 && value.is_finite()) {
        return None;
    }
    let form = p.combine(&y);
    let top = top_eigenvalue(&form);
    Some(Evaluation {
        upper: value.sqrt(),
        lower: value / top.sqrt(),
        y,
        top,
    })
}

/// `d(φ, ψ)` for the given seminorm.
pub fn state_distance(phi: &State, psi: &State, seminorm: &LipschitzSeminorm, config: &SolverConfig) -> Result<DistanceResult> {
    let s = seminorm.semigroup();
    let diff = phi.density() - psi.density();
    diff.check_same_algebra(&s.unit())?;
    if let Species::Group { .. } = s.species() {
        // both densities must lie in the group algebra
        s.coefficients(phi.density())?;
        s.coefficients(psi.density())?;
    }
    let basis = hermitian_basis(s);
    let m = basis.len();
    if m == 0 {
        return Ok(DistanceResult {
            distance: 0.0,
            upper_bound: 0.0,
            gap: 0.0,
            witness_coefficients: vec![],
            iterations: 0,
            converged: true,
        });
    }
    let ell = DVector::from_iterator(m, basis.iter().map(|e| (&diff * e).trace().re));
    let raw: Vec<Vec<CMatrix>> = (0..m)
        .into_par_iter()
        .map(|i| (0..m).map(|j| seminorm.pair(&basis[i], &basis[j])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let dim = raw[0][0].nrows();

    // range of the form, from the maximally mixed W
    let full = DualProblem {
        range: DMatrix::identity(m, m),
        blocks: raw,
        ell: ell.clone(),
        dim,
    };
    let mixed = CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0);
    let eig = full.q_matrix(&mixed).symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..m).filter(|&k| eig.eigenvalues[k] > NULL_TOL * top).collect();
    let null_mass: f64 = (0..m)
        .filter(|k| !keep.contains(k))
        .map(|k| eig.eigenvectors.column(k).dot(&ell).powi(2))
        .sum();
    if ell.norm() == 0.0 {
        return Ok(DistanceResult {
            distance: 0.0,
            upper_bound: 0.0,
            gap: 0.0,
            witness_coefficients: vec![0.0; m],
            iterations: 0,
            converged: true,
        });
    }
    if keep.is_empty() || null_mass.sqrt() > 1e-9 * ell.norm() {
        return Ok(DistanceResult::infinite(m));
    }
    let range = DMatrix::from_fn(m, keep.len(), |i, k| eig.eigenvectors[(i, keep[k])]);
    let r = keep.len();
    let blocks: Vec<Vec<CMatrix>> = (0..r)
        .map(|a| {
            (0..r)
                .map(|b| {
                    let mut acc = CMatrix::zeros(dim, dim);
                    for i in 0..m {
                        for j in 0..m {
                            // real x only sees the symmetrized form
                            let c = 0.5 * range[(i, a)] * range[(j, b)];
                            if c != 0.0 {
                                acc += (&full.blocks[i][j] + &full.blocks[j][i]) * C64::new(c, 0.0);
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let problem = DualProblem {
        ell: range.transpose() * &ell,
        range,
        blocks,
        dim,
    };

    let mut best_upper = f64::INFINITY;
    let mut best_lower = 0.0f64;
    let mut best_witness = DVector::zeros(r);
    let mut iterations = 0;
    let certify = |x: &DVector<f64>, w: &CMatrix, best_upper: &mut f64, best_lower: &mut f64, best_witness: &mut DVector<f64>| {
        if let Some(e) = evaluate(&problem, w) {
            *best_upper = best_upper.min(e.upper);
            if e.lower > *best_lower {
                *best_lower = e.lower;
                *best_witness = &e.y / e.top.sqrt();
            }
        }
        let top = top_eigenvalue(&problem.combine(x));
        if top > 0.0 {
            let lower = problem.ell.dot(x) / top.sqrt();
            if lower > *best_lower {
                *best_lower = lower;
                *best_witness = x / top.sqrt();
            }
        }
    };
    let zero = DVector::zeros(r);
    certify(&zero, &mixed, &mut best_upper, &mut best_lower, &mut best_witness);

    // path following on −tℓᵀx − log det(1 − Q(a_x, a_x)); its centers give dual W ∝ (1 − Q)⁻¹
    let identity = CMatrix::identity(dim, dim);
    let barrier = |x: &DVector<f64>| -> Option<(f64, CMatrix)> {
        let chol = (&identity - problem.combine(x)).cholesky()?;
        let logdet: f64 = chol.l_dirty().diagonal().iter().map(|z| 2.0 * z.re.ln()).sum();
        Some((-logdet, chol.inverse()))
    };
    let mut x = zero;
    let mut t = 1.0 / best_upper;
    let (mut phi, mut b) = barrier(&x).expect("origin is strictly feasible");
    while iterations < config.iterations && best_upper - best_lower > config.gap_tol * (1.0 + best_upper) {
        iterations += 1;
        let derivs: Vec<CMatrix> = (0..r)
            .map(|i| {
                let mut d = CMatrix::zeros(dim, dim);
                for j in 0..r {
                    d += &problem.blocks[i][j] * C64::new(2.0 * x[j], 0.0);
                }
                &b * d
            })
            .collect();
        let grad = DVector::from_fn(r, |i, _| derivs[i].trace().re - t * problem.ell[i]);
        let bt = b.transpose();
        let hess = DMatrix::from_fn(r, r, |i, j| {
            let curvature: f64 = derivs[i].component_mul(&derivs[j].transpose()).iter().map(|z| z.re).sum();
            let second: f64 = problem.blocks[i][j].component_mul(&bt).iter().map(|z| z.re).sum();
            curvature + 2.0 * second
        })
        .symmetrize();
        let Some(newton) = hess.cholesky() else {
            break;
        };
        let delta = -newton.solve(&grad);
        let decrement = -grad.dot(&delta);
        if decrement < 1e-8 {
            let w = hermitian_part(&b) / C64::new(b.trace().re, 0.0);
            certify(&x, &w, &mut best_upper, &mut best_lower, &mut best_witness);
            t *= 8.0;
            continue;
        }
        let objective = |phi: f64, x: &DVector<f64>| phi - t * problem.ell.dot(x);
        let current = objective(phi, &x);
        let mut step = 1.0 / (1.0 + decrement.sqrt());
        loop {
            let trial = &x + &delta * step;
            if let Some((p, inv)) = barrier(&trial) {
                let value = objective(p, &trial);
                if value < current && value <= current - 0.25 * step * decrement {
                    x = trial;
                    phi = p;
                    b = inv;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
        if step < 1e-12 {
            // numerically centered
            let w = hermitian_part(&b) / C64::new(b.trace().re, 0.0);
            certify(&x, &w, &mut best_upper, &mut best_lower, &mut best_witness);
            t *= 8.0;
        }
    }
    let coefficients = &problem.range * &best_witness;
    let gap = (best_upper - best_lower).max(0.0);
    Ok(DistanceResult {
        distance: best_lower,
        upper_bound: best_upper,
        gap,
        witness_coefficients: coefficients.iter().copied().collect(),
        iterations,
        converged: gap <= config.gap_tol * (1.0 + best_upper),
    })
}

/// The witness `a* = Σ cᵢEᵢ` as an element.
pub fn witness_element(s: &MarkovSemigroup, coefficients: &[f64]) -> OperatorElement {
    let basis = hermitian_basis(s);
    let mut out = s.unit().scale(ZERO);
    for (e, c) in basis.iter().zip(coefficients) {
        out = &out + &e.scale_real(*c);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeminormAudit {
    /// Worst `|lip(cf) − |c|lip(f)|`, relative.
    pub homogeneity: f64,
    /// Worst `lip(f + g) − lip(f) − lip(g)`, relative.
    pub triangle: f64,
    /// Worst `lip(fg) − lip(f)‖g‖ − ‖f‖lip(g)`, relative; reported only.
    pub leibniz: f64,
    pub unit: f64,
}

/// Seminorm properties on random pairs.
pub fn seminorm_audit(seminorm: &LipschitzSeminorm, samples: usize, seed: u64) -> Result<SeminormAudit> {
    let s = seminorm.semigroup();
    let streams = Seeded::new(seed);
    let rows = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = streams.stream(k as u64);
            let f = s.random_element(&mut rng);
            let g = s.random_element(&mut rng);
            let c = complex_normal(&mut rng);
            let (lf, lg) = (seminorm.lip(&f)?, seminorm.lip(&g)?);
            let scale = 1.0 + lf + lg;
            let hom = (seminorm.lip(&f.scale(c))? - c.norm() * lf).abs() / (1.0 + c.norm() * lf);
            let tri = (seminorm.lip(&(&f + &g))? - lf - lg) / scale;
            let (nf, ng) = (f.norm_inf(), g.norm_inf());
            let leib = (seminorm.lip(&(&f * &g))? - lf * ng - nf * lg) / (1.0 + lf * ng + nf * lg);
            Ok([hom, tri, leib])
        })
        .collect::<Result<Vec<[f64; 3]>>>()?;
    let worst = |i: usize| rows.iter().map(|r| r[i]).fold(f64::NEG_INFINITY, f64::max);
    Ok(SeminormAudit {
        homogeneity: worst(0),
        triangle: worst(1),
        leibniz: worst(2),
        unit: seminorm.lip(&s.unit())?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RapidDecayProfile {
    /// `(k, min_{|g| = k} ψ(g))` for every attained word length `k ≥ 1`.
    pub rows: Vec<(usize, f64)>,
    /// `min ψ ≈ c k^α` fitted in log-log coordinates.
    pub c: f64,
    pub alpha: f64,
    pub fit: Option<LinearFit>,
}

/// The profile `k ↦ inf_{|g|=k} ψ(g)` and a power-law fit over `1 ≤ k ≤ k_fit_max`.
pub fn rapid_decay_profile(psi: &LengthFunction, word_length: &LengthFunction, k_fit_max: Option<usize>) -> Result<RapidDecayProfile> {
    if !Arc::ptr_eq(psi.group(), word_length.group()) && psi.group() != word_length.group() {
        return Err(Error::InvalidLength("length functions live on different groups".into()));
    }
    let mut by_length: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
    for (g, &w) in word_length.values().iter().enumerate() {
        let k = w.round();
        if (w - k).abs() > 1e-9 {
            return Err(Error::InvalidLength(format!("word length {w} at element {g} is not an integer")));
        }
        let k = k as usize;
        if k == 0 {
            continue;
        }
        let e = by_length.entry(k).or_insert(f64::INFINITY);
        *e = e.min(psi.get(g));
    }
    let rows: Vec<(usize, f64)> = by_length.into_iter().collect();
    let fitted: Vec<&(usize, f64)> = rows
        .iter()
        .filter(|(k, v)| *v > 0.0 && k_fit_max.is_none_or(|m| *k <= m))
        .collect();
    let x: Vec<f64> = fitted.iter().map(|(k, _)| (*k as f64).ln()).collect();
    let y: Vec<f64> = fitted.iter().map(|(_, v)| v.ln()).collect();
    let fit = linear_fit(&x, &y);
    Ok(RapidDecayProfile {
        c: fit.map_or(f64::NAN, |f| f.intercept.exp()),
        alpha: fit.map_or(f64::NAN, |f| f.slope),
        fit,
        rows,
    })
}

/// `2/√s`: the distance between the two point masses of `C(ℤ₂)` when `ψ(1) = s`.
pub fn two_point_distance(s: f64) -> f64 {
    2.0 / s.sqrt()
}

/// The unit `𝟏` coefficient vector on a group, for building states.
pub fn trivial_character(order: usize) -> Vec<C64> {
    vec![ONE; order]
}
