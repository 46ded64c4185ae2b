//! Semigroup BMO seminorms, square functions and the `H₁` norm.
//!
//! The supremum over `0 < t < ∞` is taken over a finite [`TGrid`]. The
//! column seminorms are
//!
//! * `bmo_c(f) = sup_t ‖S_t|f|² − |S_tf|²‖^{1/2}`,
//! * `BMO_c(f) = sup_t ‖S_t|f − S_tf|²‖^{1/2}`,
//!
//! and the two-sided versions take the maximum over `f` and `f*`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::synthesize;
use crate::opcore::{hermitian_calculus, hermitian_spectrum, schatten_norm, CMatrix, OperatorElement, SchattenExponent, C64, ZERO};
use crate::quadrature::{cached, RuleKind};
use crate::semigroup::{MarkovSemigroup, Species, KERNEL_TOL};

/// Tolerance for the Kadison–Schwarz positivity of the inner operators.
pub const KADISON_SCHWARZ_TOL: f64 = 1e-9;

/// Discretization of `0 < t < ∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TGrid {
    points: Vec<f64>,
    doubling_closed: bool,
}

impl TGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("no points".into()));
        }
        if points.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidGrid("points must be positive and finite".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("points must be strictly increasing".into()));
        }
        let doubling_closed = detect_doubling(&points);
        Ok(Self { points, doubling_closed })
    }

    /// `count` log-spaced points in `[lo, hi]`.
    pub fn log(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && count >= 2) {
            return Err(Error::InvalidGrid(format!("bad log grid [{lo}, {hi}] x {count}")));
        }
        Self::new(crate::semigroup::log_grid(lo, hi, count))
    }

    /// `t_min·2^{k/m}` up to `t_max`: contains `2t` for every `t` below its top octave.
    pub fn doubling(t_min: f64, t_max: f64, per_octave: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && per_octave >= 1) {
            return Err(Error::InvalidGrid("bad doubling grid".into()));
        }
        let steps = ((t_max / t_min).log2() * per_octave as f64 + 1e-9).floor() as usize;
        let points = (0..=steps)
            .map(|k| t_min * 2f64.powf(k as f64 / per_octave as f64))
            .collect();
        Self::new(points)
    }

    /// The grid used by the seminorms unless stated otherwise:
    /// four points per octave over `[1e−3, 1e2]`.
    pub fn standard() -> Self {
        Self::doubling(1e-3, 1e2, 4).expect("valid grid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn doubling_closed(&self) -> bool {
        self.doubling_closed
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Inserts the geometric midpoint of every consecutive pair.
    pub fn refined(&self) -> Self {
        let mut points = Vec::with_capacity(2 * self.points.len());
        for w in self.points.windows(2) {
            points.push(w[0]);
            points.push((w[0] * w[1]).sqrt());
        }
        points.push(self.max());
        Self::new(points).expect("refinement keeps the grid valid")
    }
}

fn detect_doubling(points: &[f64]) -> bool {
    let top = points[points.len() - 1];
    points.len() > 1
        && points.iter().filter(|&&t| 2.0 * t <= top * (1.0 + 1e-12)).all(|&t| {
            let target = 2.0 * t;
            points.iter().any(|&s| (s - target).abs() <= 1e-12 * target)
        })
        && points.iter().any(|&t| 2.0 * t <= top * (1.0 + 1e-12))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BmoKind {
    /// `S_t|f|² − |S_tf|²`.
    Little,
    /// `S_t|f − S_tf|²`.
    Big,
}

/// `S_t|f|² − |S_tf|²` or `S_t|f − S_tf|²`.
pub fn oscillation(kind: BmoKind, s: &MarkovSemigroup, t: f64, f: &OperatorElement) -> Result<OperatorElement> {
    let stf = s.apply(t, f)?;
    let out = match kind {
        BmoKind::Little => &s.apply(t, &f.abs_squared())? - &stf.abs_squared(),
        BmoKind::Big => s.apply(t, &(f - &stf).abs_squared())?,
    };
    Ok(out.hermitian_part())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BmoValue {
    pub value: f64,
    /// Grid point where the supremum is attained.
    pub worst_t: f64,
    /// Largest `max(0, −λ_min)` of the inner operator over the grid.
    pub psd_defect: f64,
}

/// Column seminorm with the attaining time and the positivity audit.
pub fn column_seminorm(kind: BmoKind, f: &OperatorElement, s: &MarkovSemigroup, grid: &TGrid) -> Result<BmoValue> {
    let mut best = BmoValue {
        value: 0.0,
        worst_t: grid.points[0],
        psd_defect: 0.0,
    };
    for &t in &grid.points {
        let spectrum = hermitian_spectrum(&oscillation(kind, s, t, f)?)?;
        let top = spectrum[spectrum.len() - 1].max(0.0);
        best.psd_defect = best.psd_defect.max((-spectrum[0]).max(0.0));
        if top.sqrt() > best.value {
            best.value = top.sqrt();
            best.worst_t = t;
        }
    }
    Ok(best)
}

/// `bmo_c(f)`.
pub fn bmo_c(f: &OperatorElement, s: &MarkovSemigroup, grid: &TGrid) -> Result<f64> {
    Ok(column_seminorm(BmoKind::Little, f, s, grid)?.value)
}

/// `BMO_c(f)`.
pub fn big_bmo_c(f: &OperatorElement, s: &MarkovSemigroup, grid: &TGrid) -> Result<f64> {
    Ok(column_seminorm(BmoKind::Big, f, s, grid)?.value)
}

/// `bmo(f) = max{bmo_c(f), bmo_c(f*)}`.
pub fn bmo(f: &OperatorElement, s: &MarkovSemigroup, grid: &TGrid) -> Result<f64> {
    Ok(bmo_c(f, s, grid)?.max(bmo_c(&f.adjoint(), s, grid)?))
}

/// `BMO(f) = max{BMO_c(f), BMO_c(f*)}`.
pub fn big_bmo(f: &OperatorElement, s: &MarkovSemigroup, grid: &TGrid) -> Result<f64> {
    Ok(big_bmo_c(f, s, grid)?.max(big_bmo_c(&f.adjoint(), s, grid)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquivalenceAudit {
    /// `BMO_c(f)`.
    pub lhs: f64,
    /// `bmo_c(f) + sup_t ‖S_tf − S_{2t}f‖∞`.
    pub rhs: f64,
    /// `lhs / rhs`, or 1 when both vanish.
    pub ratio: f64,
}

/// Compares `BMO_c(f)` with `bmo_c(f) + sup_t ‖S_tf − S_{2t}f‖∞`.
pub fn bmo_equivalence_audit(f: &OperatorElement, s: &MarkovSemigroup, grid: &TGrid) -> Result<EquivalenceAudit> {
    if !grid.doubling_closed() {
        return Err(Error::InvalidGrid("equivalence audit needs a doubling-closed grid".into()));
    }
    let lhs = big_bmo_c(f, s, grid)?;
    let little = bmo_c(f, s, grid)?;
    let mut drift = 0.0f64;
    for &t in grid.points() {
        let d = &s.apply(t, f)? - &s.apply(2.0 * t, f)?;
        drift = drift.max(d.norm_inf());
    }
    let rhs = little + drift;
    let scale = f.norm_inf().max(f64::MIN_POSITIVE);
    let ratio = if lhs <= 1e-14 * scale && rhs <= 1e-14 * scale {
        1.0
    } else {
        lhs / rhs
    };
    Ok(EquivalenceAudit { lhs, rhs, ratio })
}

/// Min and max of the equivalence ratio over a sample set.
pub fn equivalence_band(samples: &[OperatorElement], s: &MarkovSemigroup, grid: &TGrid) -> Result<(f64, f64)> {
    let ratios: Vec<f64> = samples
        .par_iter()
        .map(|f| bmo_equivalence_audit(f, s, grid).map(|a| a.ratio))
        .collect::<Result<_>>()?;
    Ok(ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SquareFunctionMethod {
    /// Exact `t`-integral per Fourier/Schur coefficient.
    ClosedForm,
    /// 128-point Gauss–Legendre in `log t`.
    GaussLegendre,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareFunctionOptions {
    pub method: SquareFunctionMethod,
    /// Remove the fixed points of `S_t` before integrating.
    pub project_kernel: bool,
}

impl Default for SquareFunctionOptions {
    fn default() -> Self {
        Self {
            method: SquareFunctionMethod::ClosedForm,
            project_kernel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquareFunctions {
    /// `G(f)² = ∫ Γ(S_tf, S_tf) dt`.
    pub g_squared: OperatorElement,
    /// `S(f)² = ∫ S_tΓ(S_tf, S_tf) dt`.
    pub s_squared: OperatorElement,
    pub g: OperatorElement,
    pub s: OperatorElement,
    /// `‖S(f)‖₁ + ‖f‖₁`.
    pub h1_norm: f64,
}

/// The square functions `G(f)`, `S(f)` and the `H₁` norm of `f`.
pub fn square_functions(f: &OperatorElement, s: &MarkovSemigroup, options: SquareFunctionOptions) -> Result<SquareFunctions> {
    let input = if options.project_kernel {
        s.project_out_kernel(f)?
    } else {
        f.clone()
    };
    let (g_squared, s_squared) = match options.method {
        SquareFunctionMethod::ClosedForm => closed_form_squares(&input, s)?,
        SquareFunctionMethod::GaussLegendre => {
            // divergence is detected exactly before integrating numerically
            closed_form_squares(&input, s)?;
            quadrature_squares(&input, s)?
        }
    };
    let g_squared = g_squared.hermitian_part();
    let s_squared = s_squared.hermitian_part();
    let g = hermitian_calculus(&g_squared, |x| x.max(0.0).sqrt())?;
    let sq = hermitian_calculus(&s_squared, |x| x.max(0.0).sqrt())?;
    let one = SchattenExponent::Finite(1.0);
    let h1_norm = schatten_norm(&sq, one) + schatten_norm(f, one);
    Ok(SquareFunctions {
        g_squared,
        s_squared,
        g,
        s: sq,
        h1_norm,
    })
}

fn divergence(weight: C64, k: f64, scale: f64) -> bool {
    (weight * k).norm() > 1e-14 * scale
}

fn closed_form_squares(f: &OperatorElement, s: &MarkovSemigroup) -> Result<(OperatorElement, OperatorElement)> {
    let scale = 1.0 + f.max_abs_entry().powi(2) * (1.0 + s.spectral_radius());
    match s.species() {
        Species::Schur { .. } => {
            let r = s.effective_rates().expect("schur species");
            let n = r.nrows();
            let m = f.matrix();
            let mut g2 = CMatrix::zeros(n, n);
            let mut s2 = CMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let (mut gij, mut sij) = (ZERO, ZERO);
                    for k in 0..n {
                        let w = m[(k, i)].conj() * m[(k, j)];
                        let kern = 0.5 * (r[(k, i)] + r[(k, j)] - r[(i, j)]);
                        if kern == 0.0 || w == ZERO {
                            continue;
                        }
                        let dg = r[(k, i)] + r[(k, j)];
                        if dg > 0.0 {
                            gij += w * (kern / dg);
                        } else if divergence(w, kern, scale) {
                            return Err(Error::Divergent(format!("G(f) coefficient ({k}; {i}, {j})")));
                        }
                        let ds = dg + r[(i, j)];
                        if ds > 0.0 {
                            sij += w * (kern / ds);
                        }
                    }
                    g2[(i, j)] = gij;
                    s2[(i, j)] = sij;
                }
            }
            Ok((f.like(g2), f.like(s2)))
        }
        Species::Group { length } => {
            let group = length.group();
            let phi = s.effective_length().expect("group species");
            let c = s.coefficients(f)?;
            let n = group.order();
            let mut g2 = vec![ZERO; n];
            let mut s2 = vec![ZERO; n];
            for a in 0..n {
                if c[a] == ZERO {
                    continue;
                }
                for b in 0..n {
                    if c[b] == ZERO {
                        continue;
                    }
                    let target = group.mul(group.inv(a), b);
                    let w = c[a].conj() * c[b];
                    let kern = 0.5 * (phi[a] + phi[b] - phi[target]);
                    if kern == 0.0 {
                        continue;
                    }
                    let dg = phi[a] + phi[b];
                    if dg > 0.0 {
                        g2[target] += w * (kern / dg);
                    } else if divergence(w, kern, scale) {
                        return Err(Error::Divergent(format!("G(f) coefficient pair ({a}, {b})")));
                    }
                    let ds = dg + phi[target];
                    if ds > 0.0 {
                        s2[target] += w * (kern / ds);
                    }
                }
            }
            Ok((
                f.like(synthesize(&g2, group).into_matrix()),
                f.like(synthesize(&s2, group).into_matrix()),
            ))
        }
    }
}

fn quadrature_squares(f: &OperatorElement, s: &MarkovSemigroup) -> Result<(OperatorElement, OperatorElement)> {
    let forms = crate::forms::GradientForms::new(s);
    let top = s.spectral_radius();
    if top == 0.0 {
        let zero = f.like(CMatrix::zeros(f.dim(), f.dim()));
        return Ok((zero.clone(), zero));
    }
    let cutoff = KERNEL_TOL * top.max(1.0);
    let symbols: Vec<f64> = match s.species() {
        Species::Schur { .. } => s.effective_rates().unwrap().iter().copied().collect(),
        Species::Group { .. } => s.effective_length().unwrap(),
    };
    let low = symbols.iter().copied().filter(|&v| v > cutoff).fold(f64::INFINITY, f64::min);
    // integrand below 1e−14 of its peak outside [t_lo, t_hi]
    let t_lo = 1e-14 / (3.0 * top);
    let t_hi = 14.0 * std::f64::consts::LN_10 / low;
    let (u_lo, u_hi) = (t_lo.ln(), t_hi.ln());
    let half = 0.5 * (u_hi - u_lo);
    let mid = 0.5 * (u_hi + u_lo);
    let rule = cached(RuleKind::Legendre, 128)?;
    let terms: Vec<Result<(OperatorElement, OperatorElement)>> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&x, &w)| {
            let t = (mid + half * x).exp();
            let stf = s.apply(t, f)?;
            let gam = forms.gamma(&stf, &stf)?;
            let weight = w * half * t;
            Ok((gam.scale_real(weight), s.apply(t, &gam)?.scale_real(weight)))
        })
        .collect();
    let mut g2 = f.like(CMatrix::zeros(f.dim(), f.dim()));
    let mut s2 = g2.clone();
    for term in terms {
        let (a, b) = term?;
        g2 = &g2 + &a;
        s2 = &s2 + &b;
    }
    Ok((g2, s2))
}

/// `‖f‖_p / (BMO(f)^{1−1/p} ‖f‖₁^{1/p})`, the empirical interpolation constant.
pub fn interpolation_ratio(f: &OperatorElement, s: &MarkovSemigroup, grid: &TGrid, p: f64) -> Result<f64> {
    let exponent = SchattenExponent::new(p)?;
    let num = schatten_norm(f, exponent);
    let den = big_bmo(f, s, grid)?.powf(1.0 - 1.0 / p) * schatten_norm(f, SchattenExponent::Finite(1.0)).powf(1.0 / p);
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

/// `sup_t ‖(S_t|S_tf|²)^{1/2}‖₁ / ‖f‖₁`, the best constant in the square-mean
/// `L₁` hypothesis for the given sample.
pub fn square_mean_l1_ratio(f: &OperatorElement, s: &MarkovSemigroup, grid: &TGrid) -> Result<f64> {
    let one = SchattenExponent::Finite(1.0);
    let base = schatten_norm(f, one);
    if base == 0.0 {
        return Ok(0.0);
    }
    let mut best = 0.0f64;
    for &t in grid.points() {
        let inner = s.apply(t, &s.apply(t, f)?.abs_squared())?.hermitian_part();
        let root = hermitian_calculus(&inner, |x| x.max(0.0).sqrt())?;
        best = best.max(schatten_norm(&root, one) / base);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{builtin_cocycles, left_regular, BuiltinGroup};
    use crate::opcore::psd_defect;
    use crate::sampling::Seeded;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn planar(n: usize) -> MarkovSemigroup {
        MarkovSemigroup::group(builtin_cocycles(&BuiltinGroup::CyclicPlanar { n }).unwrap().length)
    }

    fn s3() -> MarkovSemigroup {
        MarkovSemigroup::group(
            builtin_cocycles(&BuiltinGroup::SymmetricPermutation {
                n: 3,
                basepoint: vec![1.0, 2.0, 3.0],
            })
            .unwrap()
            .length,
        )
    }

    #[test]
    fn grids() {
        let g = TGrid::doubling(1e-3, 1e2, 4).unwrap();
        assert!(g.doubling_closed());
        assert!(g.refined().doubling_closed());
        assert_eq!(g.refined().points().len(), 2 * g.points().len() - 1);
        assert!(!TGrid::log(1e-3, 1e2, 40).unwrap().doubling_closed());
        assert!(TGrid::new(vec![1.0, 1.0]).is_err());
        assert!(TGrid::new(vec![]).is_err());
        assert!(TGrid::new(vec![-1.0]).is_err());
    }

    #[test]
    fn unit_and_diagonal_vanish() {
        let grid = TGrid::standard();
        let p = MarkovSemigroup::poisson_schur(5);
        let one = p.unit();
        assert_eq!(bmo_c(&one, &p, &grid).unwrap(), 0.0);
        assert_eq!(big_bmo(&one, &p, &grid).unwrap(), 0.0);
        let d = OperatorElement::diagonal(&[1.0, -3.0, 0.5, 2.0, 7.0], 1.0);
        assert_eq!(bmo(&d, &p, &grid).unwrap(), 0.0);
        assert_eq!(big_bmo(&d, &p, &grid).unwrap(), 0.0);
        let audit = bmo_equivalence_audit(&one, &p, &grid).unwrap();
        assert_eq!((audit.lhs, audit.rhs, audit.ratio), (0.0, 0.0, 1.0));
    }

    #[test]
    fn left_regular_closed_forms() {
        let s = planar(6);
        let group = s.group_ref().unwrap().clone();
        let psi = s.effective_length().unwrap();
        for g in 1..6 {
            let grid = TGrid::doubling(1e-3, 1e2 / psi[g], 4).unwrap();
            let f = left_regular(g, &group);
            // grid top is within one quarter-octave of 1e2/ψ
            let top = grid.max();
            assert_relative_eq!(bmo_c(&f, &s, &grid).unwrap(), (1.0 - (-2.0 * top * psi[g]).exp()).sqrt(), epsilon = 1e-12);
            assert!((bmo_c(&f, &s, &grid).unwrap() - 1.0).abs() < 1e-6);
            assert_relative_eq!(big_bmo_c(&f, &s, &grid).unwrap(), 1.0 - (-top * psi[g]).exp(), epsilon = 1e-12);
            let audit = bmo_equivalence_audit(&f, &s, &grid).unwrap();
            assert!(audit.lhs > 0.0 && audit.lhs <= 2.0 && audit.rhs > 0.0 && audit.rhs <= 2.0);
        }
    }

    #[test]
    fn square_functions_of_left_regular() {
        for s in [planar(5), s3(), planar(4).subordinate()] {
            let group = s.group_ref().unwrap().clone();
            for g in 1..group.order() {
                let f = left_regular(g, &group);
                let sq = square_functions(&f, &s, SquareFunctionOptions::default()).unwrap();
                let target = f.identity_like().scale_real(0.5f64.sqrt());
                assert!((&sq.g - &target).max_abs_entry() < 1e-12);
                assert!((&sq.s - &target).max_abs_entry() < 1e-12);
                let one = SchattenExponent::Finite(1.0);
                assert_relative_eq!(schatten_norm(&sq.g, one), schatten_norm(&sq.s, one), epsilon = 1e-12);
                assert_relative_eq!(sq.h1_norm, 0.5f64.sqrt() + 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_agrees_with_closed_form() {
        let mut rng = Seeded::new(21).stream(0);
        for s in [MarkovSemigroup::poisson_schur(4), planar(6), s3()] {
            let f = s.random_element(&mut rng);
            let exact = square_functions(&f, &s, SquareFunctionOptions::default()).unwrap();
            let numeric = square_functions(
                &f,
                &s,
                SquareFunctionOptions {
                    method: SquareFunctionMethod::GaussLegendre,
                    project_kernel: true,
                },
            )
            .unwrap();
            let scale = 1.0 + exact.g_squared.max_abs_entry();
            assert!((&exact.g_squared - &numeric.g_squared).max_abs_entry() < 1e-6 * scale);
            assert!((&exact.s_squared - &numeric.s_squared).max_abs_entry() < 1e-6 * scale);
            assert!(psd_defect(&exact.g_squared).unwrap() < 1e-10 * scale);
        }
    }

    #[test]
    fn kernel_component_diverges_unless_projected() {
        // For conditionally negative ψ, Γ vanishes between kernel elements, so the
        // integral only diverges for symbols outside the Markov class.
        let z4 = std::sync::Arc::new(crate::groups::FiniteGroup::cyclic(4));
        let psi = crate::groups::LengthFunction::new(z4.clone(), vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(!crate::groups::conditionally_negative(&psi).conditionally_negative);
        let s = MarkovSemigroup::group(psi);
        let f = &left_regular(1, &z4) + &left_regular(3, &z4);
        let raw = SquareFunctionOptions {
            method: SquareFunctionMethod::ClosedForm,
            project_kernel: false,
        };
        assert!(matches!(square_functions(&f, &s, raw), Err(Error::Divergent(_))));
        let projected = square_functions(&f, &s, SquareFunctionOptions::default()).unwrap();
        assert_eq!(projected.g.max_abs_entry(), 0.0);

        let cn = crate::groups::LengthFunction::new(z4.clone(), vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let s = MarkovSemigroup::group(cn);
        let f = &left_regular(2, &z4) + &left_regular(1, &z4);
        assert!(square_functions(&f, &s, raw).is_ok());
    }

    #[test]
    fn row_column_asymmetry_is_measured() {
        let p = MarkovSemigroup::poisson_schur(2);
        let grid = TGrid::standard();
        let e12 = OperatorElement::matrix_unit(2, 0, 1, 1.0);
        let col = big_bmo_c(&e12, &p, &grid).unwrap();
        let row = big_bmo_c(&e12.adjoint(), &p, &grid).unwrap();
        assert_relative_eq!(big_bmo(&e12, &p, &grid).unwrap(), col.max(row), epsilon = 0.0);
        assert!(col > 0.0 && row > 0.0);
    }

    #[test]
    fn equivalence_requires_doubling_grid() {
        let p = MarkovSemigroup::poisson_schur(3);
        let grid = TGrid::log(1e-3, 1e2, 40).unwrap();
        assert!(bmo_equivalence_audit(&p.unit(), &p, &grid).is_err());
    }

    fn semigroups() -> Vec<MarkovSemigroup> {
        vec![
            MarkovSemigroup::poisson_schur(4),
            planar(5),
            s3(),
            MarkovSemigroup::schur(DMatrix::from_fn(3, 3, |i, j| (i as f64 - j as f64).powi(2))).unwrap(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn seminorm_axioms(which in 0usize..4, seed in any::<u64>(), c_re in -3.0f64..3.0, c_im in -3.0f64..3.0) {
            let s = &semigroups()[which];
            let grid = TGrid::doubling(1e-2, 1e1, 2).unwrap();
            let mut rng = Seeded::new(seed).stream(0);
            let f = s.random_element(&mut rng);
            let g = s.random_element(&mut rng);
            let c = C64::new(c_re, c_im);
            let norms: [fn(&OperatorElement, &MarkovSemigroup, &TGrid) -> Result<f64>; 4] = [bmo_c, big_bmo_c, bmo, big_bmo];
            for norm in norms {
                let nf = norm(&f, s, &grid).unwrap();
                let ng = norm(&g, s, &grid).unwrap();
                let ncf = norm(&f.scale(c), s, &grid).unwrap();
                prop_assert!((ncf - c.norm() * nf).abs() <= 1e-9 * (1.0 + ncf));
                let sum = norm(&(&f + &g), s, &grid).unwrap();
                prop_assert!(sum <= nf + ng + 1e-9 * (1.0 + nf + ng));
            }
            prop_assert!(big_bmo(&f, s, &grid).unwrap() <= 2.0 * f.norm_inf() * (1.0 + 1e-12));
            for kind in [BmoKind::Little, BmoKind::Big] {
                let v = column_seminorm(kind, &f, s, &grid).unwrap();
                prop_assert!(v.psd_defect <= KADISON_SCHWARZ_TOL * (1.0 + f.norm_inf().powi(2)));
            }
        }
    }
}
