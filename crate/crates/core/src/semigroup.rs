//! Markov semigroups `S_t = e^{−tL}` of Schur and Fourier multiplier type.
//!
//! Both species are simultaneously diagonal: a Schur semigroup multiplies the
//! matrix unit `e_ij` by `e^{−t r_ij}`, a group semigroup multiplies `λ(g)` by
//! `e^{−tψ(g)}`. The subordinated (Poisson) variant replaces the stored symbol
//! by its square root. Every spectral multiplier `φ(L)` is therefore a
//! coefficientwise map, see [`MarkovSemigroup::spectral_multiplier`].

use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{
    project_coefficients, synthesize, membership_defect, BuiltinGroup, FiniteGroup, LengthFunction,
    DEFAULT_GROUP_CAP,
};
use crate::opcore::{schatten_norm, OperatorElement, SchattenExponent, C64};
use crate::report::{AuditCheck, AuditReport, Worst};
use crate::sampling::{gaussian_element, Seeded};

/// Symbol values at or below this fraction of the largest symbol count as the kernel of `L`.
pub const KERNEL_TOL: f64 = 1e-12;

/// Tolerance for symbol/kernel positivity in the Markov audit.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// 40 log-spaced points in `[1e−3, 1e2]`.
pub fn default_t_grid() -> Vec<f64> {
    log_grid(1e-3, 1e2, 40)
}

pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2, "invalid log grid");
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Species {
    /// Schur multipliers on `M_n`: `e_ij ↦ e^{−t r_ij} e_ij`.
    Schur { rates: DMatrix<f64>, trace_weight: f64 },
    /// Fourier multipliers on the group algebra: `λ(g) ↦ e^{−tψ(g)} λ(g)`.
    Group { length: LengthFunction },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovSemigroup {
    species: Species,
    subordinated: bool,
}

impl MarkovSemigroup {
    /// Schur semigroup on `M_n` (trace weight 1) with heat scaling.
    pub fn schur(rates: DMatrix<f64>) -> Result<Self> {
        Self::schur_with(rates, 1.0, false)
    }

    pub fn schur_with(rates: DMatrix<f64>, trace_weight: f64, subordinated: bool) -> Result<Self> {
        if !rates.is_square() {
            return Err(Error::InvalidSemigroup("rate matrix must be square".into()));
        }
        if !(trace_weight.is_finite() && trace_weight > 0.0) {
            return Err(Error::InvalidTraceWeight(trace_weight));
        }
        let n = rates.nrows();
        let scale = 1.0 + rates.amax();
        for i in 0..n {
            if rates[(i, i)] != 0.0 {
                return Err(Error::InvalidSemigroup(format!("rate ({i},{i}) must be zero")));
            }
            for j in 0..n {
                let r = rates[(i, j)];
                if !r.is_finite() || r < 0.0 {
                    return Err(Error::InvalidSemigroup(format!("rate ({i},{j}) = {r} must be nonnegative")));
                }
                if (r - rates[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidSemigroup(format!("rates not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self {
            species: Species::Schur { rates, trace_weight },
            subordinated,
        })
    }

    /// `e_ij ↦ e^{−t|i−j|} e_ij` on `M_n`, stored as the subordinated form of rates `(i−j)²`.
    pub fn poisson_schur(n: usize) -> Self {
        let rates = DMatrix::from_fn(n, n, |i, j| (i as f64 - j as f64).powi(2));
        Self::schur_with(rates, 1.0, true).expect("valid rates")
    }

    /// Schur semigroup with rates `‖b(i) − b(j)‖²` for points `b(i)` in a Hilbert space.
    pub fn schur_from_points(points: &[Vec<f64>]) -> Self {
        let n = points.len();
        let rates = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).powi(2)).sum()
            }
        });
        Self::schur(rates).expect("squared distances are valid rates")
    }

    pub fn group(length: LengthFunction) -> Self {
        Self {
            species: Species::Group { length },
            subordinated: false,
        }
    }

    pub fn group_subordinated(length: LengthFunction) -> Self {
        Self {
            species: Species::Group { length },
            subordinated: true,
        }
    }

    /// The Poisson semigroup `P_t = e^{−t√L}`.
    pub fn subordinate(&self) -> Self {
        if !self.subordinated {
            return Self {
                species: self.species.clone(),
                subordinated: true,
            };
        }
        let species = match &self.species {
            Species::Schur { rates, trace_weight } => Species::Schur {
                rates: rates.map(f64::sqrt),
                trace_weight: *trace_weight,
            },
            Species::Group { length } => Species::Group {
                length: length.map(f64::sqrt).expect("square root of a length is a length"),
            },
        };
        Self {
            species,
            subordinated: true,
        }
    }

    pub fn species(&self) -> &Species {
        &self.species
    }

    pub fn is_subordinated(&self) -> bool {
        self.subordinated
    }

    pub fn dim(&self) -> usize {
        match &self.species {
            Species::Schur { rates, .. } => rates.nrows(),
            Species::Group { length } => length.group().order(),
        }
    }

    pub fn trace_weight(&self) -> f64 {
        match &self.species {
            Species::Schur { trace_weight, .. } => *trace_weight,
            Species::Group { length } => 1.0 / length.group().order() as f64,
        }
    }

    pub fn group_ref(&self) -> Option<&Arc<FiniteGroup>> {
        match &self.species {
            Species::Group { length } => Some(length.group()),
            Species::Schur { .. } => None,
        }
    }

    pub fn unit(&self) -> OperatorElement {
        OperatorElement::identity(self.dim(), self.trace_weight())
    }

    fn effective(&self, stored: f64) -> f64 {
        if self.subordinated {
            stored.sqrt()
        } else {
            stored
        }
    }

    /// Effective Schur symbol `r_ij` (or `√r_ij`); `None` for group species.
    pub fn effective_rates(&self) -> Option<DMatrix<f64>> {
        match &self.species {
            Species::Schur { rates, .. } => Some(rates.map(|r| self.effective(r))),
            Species::Group { .. } => None,
        }
    }

    /// Effective length `ψ(g)` (or `√ψ(g)`); `None` for Schur species.
    pub fn effective_length(&self) -> Option<Vec<f64>> {
        match &self.species {
            Species::Group { length } => Some(length.values().iter().map(|&v| self.effective(v)).collect()),
            Species::Schur { .. } => None,
        }
    }

    /// Largest eigenvalue of `L`.
    pub fn spectral_radius(&self) -> f64 {
        match &self.species {
            Species::Schur { rates, .. } => self.effective(rates.max().max(0.0)),
            Species::Group { length } => self.effective(length.values().iter().copied().fold(0.0, f64::max)),
        }
    }

    fn check_dim(&self, f: &OperatorElement) -> Result<()> {
        if f.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: f.dim(),
            });
        }
        Ok(())
    }

    /// Fourier coefficients of `f` for group species, with a cheap membership test.
    pub fn coefficients(&self, f: &OperatorElement) -> Result<Vec<C64>> {
        let Species::Group { length } = &self.species else {
            return Err(Error::InvalidSemigroup("Fourier coefficients need a group species".into()));
        };
        self.check_dim(f)?;
        let group = length.group();
        let coefficients = project_coefficients(f, group);
        if membership_defect(f, &coefficients, group).is_some() {
            // the exact test decides borderline cases
            crate::groups::fourier_coefficients(f, group)?;
        }
        Ok(coefficients)
    }

    /// `φ(L)` applied to `f`: entrywise `φ(r_ij)` for Schur species,
    /// `φ(ψ(g))` on Fourier coefficients for group species.
    pub fn spectral_multiplier(&self, f: &OperatorElement, phi: impl Fn(f64) -> C64) -> Result<OperatorElement> {
        self.check_dim(f)?;
        match &self.species {
            Species::Schur { rates, .. } => {
                let m = f.matrix().zip_map(rates, |z, r| z * phi(self.effective(r)));
                Ok(f.like(m))
            }
            Species::Group { length } => {
                let coefficients = self.coefficients(f)?;
                let scaled: Vec<C64> = coefficients
                    .iter()
                    .zip(length.values())
                    .map(|(c, &v)| c * phi(self.effective(v)))
                    .collect();
                let out = synthesize(&scaled, length.group());
                Ok(f.like(out.into_matrix()))
            }
        }
    }

    pub fn apply(&self, t: f64, f: &OperatorElement) -> Result<OperatorElement> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidGrid(format!("time must be finite and nonnegative, got {t}")));
        }
        if t == 0.0 {
            self.check_dim(f)?;
            return Ok(f.clone());
        }
        self.spectral_multiplier(f, |s| C64::new((-t * s).exp(), 0.0))
    }

    /// `Lf`.
    pub fn generator_apply(&self, f: &OperatorElement) -> Result<OperatorElement> {
        self.spectral_multiplier(f, |s| C64::new(s, 0.0))
    }

    /// Removes the components on which `L` vanishes (the fixed points of `S_t`).
    pub fn project_out_kernel(&self, f: &OperatorElement) -> Result<OperatorElement> {
        let cutoff = KERNEL_TOL * self.spectral_radius().max(1.0);
        self.spectral_multiplier(f, |s| C64::new(if s > cutoff { 1.0 } else { 0.0 }, 0.0))
    }

    /// Tensor product: effective symbols add across the tensor index.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        // a zero symbol reads the same at either scale, so it adopts the other flag
        let sub1 = self.subordinated || (other.subordinated && self.spectral_radius() == 0.0);
        let sub2 = other.subordinated || (self.subordinated && other.spectral_radius() == 0.0);
        let both = sub1 && sub2;
        // stored symbol for the product, given the effective sum
        let store = |a: f64, b: f64| {
            if both {
                (a.sqrt() + b.sqrt()).powi(2)
            } else {
                self.effective(a) + other.effective(b)
            }
        };
        match (&self.species, &other.species) {
            (Species::Schur { rates: r1, trace_weight: w1 }, Species::Schur { rates: r2, trace_weight: w2 }) => {
                let n2 = r2.nrows();
                let n = r1.nrows() * n2;
                let rates = DMatrix::from_fn(n, n, |a, b| store(r1[(a / n2, b / n2)], r2[(a % n2, b % n2)]));
                Self::schur_with(rates, w1 * w2, both)
            }
            (Species::Group { length: l1 }, Species::Group { length: l2 }) => {
                let group = Arc::new(l1.group().direct_product(l2.group()));
                let n2 = l2.group().order();
                let values = (0..group.order())
                    .map(|a| store(l1.get(a / n2), l2.get(a % n2)))
                    .collect();
                let length = LengthFunction::new(group, values)?;
                Ok(Self {
                    species: Species::Group { length },
                    subordinated: both,
                })
            }
            _ => Err(Error::IncompatibleSpecies),
        }
    }

    /// Symbol matrix `(e^{−t r_ij})` or kernel `(e^{−tψ(g⁻¹h)})` whose
    /// positivity is equivalent to complete positivity of `S_t`.
    pub fn positivity_kernel(&self, t: f64) -> DMatrix<f64> {
        match &self.species {
            Species::Schur { rates, .. } => rates.map(|r| (-t * self.effective(r)).exp()),
            Species::Group { length } => length.kernel(|v| (-t * self.effective(v)).exp()),
        }
    }

    /// Checks unitality, complete positivity, symmetry, trace preservation and
    /// continuity at `t = 0` over the grid, on `sample_count` random elements.
    pub fn markov_audit(&self, t_grid: &[f64], sample_count: usize, seed: u64) -> Result<AuditReport> {
        if t_grid.is_empty() {
            return Err(Error::InvalidGrid("empty t grid".into()));
        }
        let w = self.trace_weight();
        let unit = self.unit();
        let streams = Seeded::new(seed);
        let samples: Vec<OperatorElement> = (0..sample_count.max(2))
            .map(|k| self.random_element(&mut streams.stream(k as u64)))
            .collect::<Vec<_>>();

        let mut unitality = Worst::default();
        let mut positivity = Worst::default();
        let mut symmetry = Worst::default();
        let mut trace = Worst::default();
        for &t in t_grid {
            let st1 = self.apply(t, &unit)?;
            unitality.update((&st1 - &unit).max_abs_entry(), t);

            let kernel = self.positivity_kernel(t);
            let low = kernel
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            positivity.update((-low).max(0.0), t);

            for pair in samples.chunks(2) {
                let (f, g) = (&pair[0], &pair[pair.len() - 1]);
                let sf = self.apply(t, f)?;
                let sg = self.apply(t, g)?;
                let lhs = (&sf * g).trace();
                let rhs = (f * &sg).trace();
                let scale = 1.0 + f.frobenius() * g.frobenius() * w;
                symmetry.update((lhs - rhs).norm() / scale, t);
                trace.update((sf.trace() - f.trace()).norm() / (1.0 + f.frobenius() * w.sqrt()), t);
            }
        }

        // continuity at 0: ‖S_h f − f‖∞ must shrink with h
        let mut continuity = 0.0f64;
        for f in &samples {
            let norm = f.norm_inf();
            let defects: Vec<f64> = [1e-4, 1e-6, 1e-8]
                .iter()
                .map(|&h| self.apply(h, f).map(|s| (&s - f).norm_inf() / (1.0 + norm)))
                .collect::<Result<_>>()?;
            let monotone = defects.windows(2).all(|p| p[1] <= p[0] + 1e-14);
            let last = defects[defects.len() - 1];
            continuity = continuity.max(if monotone { last } else { f64::INFINITY });
        }

        let mut report = AuditReport::default();
        let witness = |w: &Worst<f64>| format!("t={:.6e}", w.at.unwrap_or(t_grid[0]));
        report.push(AuditCheck::new("unitality", unitality.value, 1e-12).with_witness(witness(&unitality)));
        report.push(AuditCheck::new("positivity", positivity.value, POSITIVITY_TOL).with_witness(witness(&positivity)));
        report.push(AuditCheck::new("symmetry", symmetry.value, 1e-10).with_witness(witness(&symmetry)));
        report.push(AuditCheck::new("trace_preservation", trace.value, 1e-10).with_witness(witness(&trace)));
        report.push(AuditCheck::new(
            "continuity",
            continuity,
            1e-6 * (1.0 + self.spectral_radius()),
        ));
        Ok(report)
    }

    /// A Gaussian element of the algebra the semigroup acts on.
    pub fn random_element<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> OperatorElement {
        match &self.species {
            Species::Schur { .. } => gaussian_element(self.dim(), self.trace_weight(), rng),
            Species::Group { length } => {
                let c = crate::sampling::gaussian_coefficients(self.dim(), rng);
                synthesize(&c, length.group())
            }
        }
    }

    pub fn to_spec(&self, group_ref: Option<&str>) -> SemigroupSpec {
        match &self.species {
            Species::Schur { rates, .. } => SemigroupSpec {
                species: SpeciesName::Schur,
                rates: Some(rates.row_iter().map(|r| r.iter().copied().collect()).collect()),
                group_ref: None,
                psi: None,
                subordinated: self.subordinated,
            },
            Species::Group { length } => SemigroupSpec {
                species: SpeciesName::Group,
                rates: None,
                group_ref: group_ref.map(str::to_owned),
                psi: Some(length.values().to_vec()),
                subordinated: self.subordinated,
            },
        }
    }
}

/// L_p contraction check used by tests and audits: `‖S_t f‖_p ≤ ‖f‖_p`.
pub fn contraction_defect(s: &MarkovSemigroup, t: f64, f: &OperatorElement, p: SchattenExponent) -> Result<f64> {
    let before = schatten_norm(f, p);
    let after = schatten_norm(&s.apply(t, f)?, p);
    Ok((after - before).max(0.0) / (1.0 + before))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeciesName {
    Schur,
    #[serde(alias = "group_multiplier")]
    Group,
}

/// JSON form `{species, rates | (group_ref, psi), subordinated}`.
///
/// `group_ref` is a builtin name (`cyclic_planar:8`) or a path to a Cayley
/// table file. For builtins `psi` may be omitted to use the builtin length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemigroupSpec {
    pub species: SpeciesName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_ref: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<f64>>,
    #[serde(default)]
    pub subordinated: bool,
}

impl SemigroupSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn build(&self) -> Result<MarkovSemigroup> {
        match self.species {
            SpeciesName::Schur => {
                let rows = self
                    .rates
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSemigroup("schur species needs rates".into()))?;
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidSemigroup("rates must be a square array".into()));
                }
                let rates = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
                MarkovSemigroup::schur_with(rates, 1.0, self.subordinated)
            }
            SpeciesName::Group => {
                let reference = self
                    .group_ref
                    .as_deref()
                    .ok_or_else(|| Error::InvalidSemigroup("group species needs group_ref".into()))?;
                let (group, builtin_length) = match BuiltinGroup::parse(reference) {
                    Ok(builtin) => {
                        let model = builtin.build(DEFAULT_GROUP_CAP)?;
                        (model.group, Some(model.length))
                    }
                    Err(_) if Path::new(reference).exists() => {
                        let group = FiniteGroup::load(reference)?;
                        group.check_cap(DEFAULT_GROUP_CAP)?;
                        (Arc::new(group), None)
                    }
                    Err(e) => return Err(e),
                };
                let length = match (&self.psi, builtin_length) {
                    (Some(values), _) => LengthFunction::new(group, values.clone())?,
                    (None, Some(length)) => length,
                    (None, None) => {
                        return Err(Error::InvalidSemigroup("psi is required for Cayley-file groups".into()))
                    }
                };
                Ok(MarkovSemigroup {
                    species: Species::Group { length },
                    subordinated: self.subordinated,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{builtin_cocycles, left_regular, BuiltinGroup};
    use crate::opcore::{ONE, ZERO};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn z3_psi3() -> MarkovSemigroup {
        let g = Arc::new(FiniteGroup::cyclic(3));
        MarkovSemigroup::group(LengthFunction::new(g, vec![0.0, 3.0, 3.0]).unwrap())
    }

    fn planar(n: usize) -> MarkovSemigroup {
        MarkovSemigroup::group(builtin_cocycles(&BuiltinGroup::CyclicPlanar { n }).unwrap().length)
    }

    fn s3_perm() -> MarkovSemigroup {
        let m = builtin_cocycles(&BuiltinGroup::SymmetricPermutation {
            n: 3,
            basepoint: vec![1.0, 2.0, 3.0],
        })
        .unwrap();
        MarkovSemigroup::group(m.length)
    }

    fn corpus() -> Vec<MarkovSemigroup> {
        vec![
            MarkovSemigroup::poisson_schur(5),
            MarkovSemigroup::schur(DMatrix::from_fn(4, 4, |i, j| (i as f64 - j as f64).powi(2))).unwrap(),
            planar(6),
            planar(5).subordinate(),
            s3_perm(),
        ]
    }

    #[test]
    fn poisson_schur_matches_abs_difference() {
        let s = MarkovSemigroup::poisson_schur(4);
        let t = 0.7;
        for i in 0..4 {
            for j in 0..4 {
                let e = OperatorElement::matrix_unit(4, i, j, 1.0);
                let out = s.apply(t, &e).unwrap();
                let expected = (-t * (i as f64 - j as f64).abs()).exp();
                assert_relative_eq!(out.matrix()[(i, j)].re, expected, epsilon = 1e-15);
            }
        }
        let l = s.generator_apply(&OperatorElement::matrix_unit(3, 0, 2, 1.0));
        assert!(l.is_err());
        let s3 = MarkovSemigroup::poisson_schur(3);
        let l = s3.generator_apply(&OperatorElement::matrix_unit(3, 0, 2, 1.0)).unwrap();
        assert_eq!(l.matrix()[(0, 2)], C64::new(2.0, 0.0));
    }

    #[test]
    fn group_examples() {
        let s = z3_psi3();
        let g = s.group_ref().unwrap().clone();
        let out = s.apply(0.4, &left_regular(1, &g)).unwrap();
        let expected = left_regular(1, &g).scale_real((-1.2f64).exp());
        assert!((&out - &expected).max_abs_entry() < 1e-15);
        let l = s.generator_apply(&left_regular(2, &g)).unwrap();
        assert!((&l - &left_regular(2, &g).scale_real(3.0)).max_abs_entry() < 1e-14);
        for s in corpus() {
            let unit = s.unit();
            assert!((&s.apply(2.5, &unit).unwrap() - &unit).max_abs_entry() < 1e-15);
            assert!(s.generator_apply(&unit).unwrap().max_abs_entry() < 1e-15);
        }
    }

    #[test]
    fn group_apply_rejects_outside_elements() {
        let s = z3_psi3();
        let e = OperatorElement::matrix_unit(3, 0, 1, 1.0 / 3.0);
        assert!(matches!(s.apply(1.0, &e), Err(Error::OutsideGroupAlgebra { .. })));
    }

    #[test]
    fn generator_matches_finite_differences() {
        let mut rng = Seeded::new(3).stream(0);
        for s in corpus() {
            let f = s.random_element(&mut rng);
            let lf = s.generator_apply(&f).unwrap();
            let err = |h: f64| {
                let d = (&f - &s.apply(h, &f).unwrap()).scale_real(1.0 / h);
                (&d - &lf).norm_inf()
            };
            let ratio = err(1e-3) / err(1e-4);
            assert!((ratio - 10.0).abs() < 1.0, "ratio {ratio}");
        }
    }

    #[test]
    fn subordinate_twice_takes_fourth_root() {
        let s = planar(7).subordinate().subordinate();
        let psi = planar(7).effective_length().unwrap();
        for (a, b) in s.effective_length().unwrap().iter().zip(&psi) {
            assert_relative_eq!(*a, b.powf(0.25), epsilon = 1e-14);
        }
    }

    #[test]
    fn markov_audit_passes_on_corpus() {
        let grid = default_t_grid();
        for s in corpus() {
            let report = s.markov_audit(&grid, 6, 11).unwrap();
            assert!(report.passed(), "{report:?}");
        }
        let rep = MarkovSemigroup::poisson_schur(4).markov_audit(&grid, 4, 0).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn markov_audit_detects_non_cn_length() {
        let m = builtin_cocycles(&BuiltinGroup::CyclicPlanar { n: 6 }).unwrap();
        let delta = crate::groups::cn_breaking_perturbation(&m.length, 1, 1e3, 1e-6).unwrap();
        let bad = MarkovSemigroup::group(m.length.perturbed(1, 2.0 * delta).unwrap());
        let grid = log_grid(1e-3, 10.0, 30);
        let report = bad.markov_audit(&grid, 2, 0).unwrap();
        assert!(!report.get("positivity").unwrap().passed);
        assert!(report.get("unitality").unwrap().passed);
    }

    #[test]
    fn tensor_examples() {
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let a = MarkovSemigroup::group(LengthFunction::new(z2.clone(), vec![0.0, 1.5]).unwrap());
        let b = MarkovSemigroup::group(LengthFunction::new(z2, vec![0.0, 0.25]).unwrap());
        let ab = a.tensor_product(&b).unwrap();
        assert_relative_eq!(ab.effective_length().unwrap()[3], 1.75, epsilon = 1e-15);

        let trivial = MarkovSemigroup::schur(DMatrix::zeros(1, 1)).unwrap();
        let p = MarkovSemigroup::poisson_schur(3);
        let pt = p.tensor_product(&trivial).unwrap();
        assert_eq!(pt.effective_rates(), p.effective_rates());
        assert!(pt.is_subordinated());
        assert!(matches!(p.tensor_product(&a), Err(Error::IncompatibleSpecies)));

        let grid = log_grid(1e-3, 1e2, 12);
        let double = planar(3).tensor_product(&s3_perm()).unwrap();
        assert!(double.markov_audit(&grid, 2, 1).unwrap().passed());
        let schur2 = MarkovSemigroup::poisson_schur(3).tensor_product(&MarkovSemigroup::poisson_schur(2)).unwrap();
        assert!(schur2.markov_audit(&grid, 2, 1).unwrap().passed());
    }

    #[test]
    fn tensor_factorizes() {
        let mut rng = Seeded::new(5).stream(0);
        let pairs = [
            (MarkovSemigroup::poisson_schur(3), MarkovSemigroup::poisson_schur(2)),
            (
                MarkovSemigroup::poisson_schur(2),
                MarkovSemigroup::schur(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap(),
            ),
            (planar(3), planar(4)),
            (planar(3).subordinate(), s3_perm()),
        ];
        for (s1, s2) in pairs {
            let prod = s1.tensor_product(&s2).unwrap();
            let f = s1.random_element(&mut rng);
            let g = s2.random_element(&mut rng);
            let lhs = prod.apply(0.3, &f.kron(&g)).unwrap();
            let rhs = s1.apply(0.3, &f).unwrap().kron(&s2.apply(0.3, &g).unwrap());
            assert!((&lhs - &rhs).max_abs_entry() <= 1e-12 * (1.0 + rhs.max_abs_entry()));
        }
    }

    #[test]
    fn json_round_trip() {
        let s = MarkovSemigroup::poisson_schur(3);
        let spec = s.to_spec(None);
        assert_eq!(SemigroupSpec::from_json(&spec.to_json()).unwrap().build().unwrap(), s);
        let spec = SemigroupSpec::from_json(r#"{"species":"group","group_ref":"cyclic_planar:5","subordinated":true}"#)
            .unwrap();
        let g = spec.build().unwrap();
        assert!(g.is_subordinated());
        assert_eq!(g.dim(), 5);
        assert!(SemigroupSpec::from_json(r#"{"species":"group"}"#).unwrap().build().is_err());
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(MarkovSemigroup::schur(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0])).is_err());
        assert!(MarkovSemigroup::schur(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0])).is_err());
        assert!(MarkovSemigroup::schur(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0])).is_err());
    }

    #[test]
    fn kernel_projection() {
        let s = planar(4);
        let g = s.group_ref().unwrap().clone();
        let f = &left_regular(0, &g) + &left_regular(1, &g);
        let c = s.coefficients(&s.project_out_kernel(&f).unwrap()).unwrap();
        assert_eq!(c[0], ZERO);
        assert!((c[1] - ONE).norm() < 1e-15);
    }

    fn semigroup_strategy() -> impl Strategy<Value = MarkovSemigroup> {
        (0usize..5, 2usize..7).prop_map(|(kind, n)| match kind {
            0 => MarkovSemigroup::poisson_schur(n),
            1 => planar(n),
            2 => planar(n).subordinate(),
            3 => s3_perm(),
            _ => MarkovSemigroup::schur_from_points(
                &(0..n).map(|i| vec![i as f64 * 0.5, (i * i) as f64 / 7.0, (i % 2) as f64]).collect::<Vec<_>>(),
            ),
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn semigroup_law_and_contraction(s in semigroup_strategy(), seed in any::<u64>(), a in 0.0f64..3.0, b in 0.0f64..3.0) {
            let mut rng = Seeded::new(seed).stream(0);
            let f = s.random_element(&mut rng);
            let g = s.random_element(&mut rng);
            let lhs = s.apply(a, &s.apply(b, &f).unwrap()).unwrap();
            let rhs = s.apply(a + b, &f).unwrap();
            prop_assert!((&lhs - &rhs).max_abs_entry() <= 1e-12 * (1.0 + f.max_abs_entry()));
            prop_assert!((&s.apply(0.0, &f).unwrap() - &f).max_abs_entry() == 0.0);
            // self-adjointness on L2
            let l = s.apply(a, &f).unwrap().inner(&g);
            let r = f.inner(&s.apply(a, &g).unwrap());
            prop_assert!((l - r).norm() <= 1e-10 * (1.0 + f.frobenius() * g.frobenius()));
            for p in [1.0, 2.0, 4.0] {
                prop_assert!(contraction_defect(&s, a, &f, SchattenExponent::new(p).unwrap()).unwrap() <= 1e-12);
            }
            prop_assert!(contraction_defect(&s, a, &f, SchattenExponent::Infinity).unwrap() <= 1e-12);
            // heat and subordinated scales commute
            let p = s.subordinate();
            let x = p.apply(a, &s.apply(b, &f).unwrap()).unwrap();
            let y = s.apply(b, &p.apply(a, &f).unwrap()).unwrap();
            prop_assert!((&x - &y).max_abs_entry() <= 1e-12 * (1.0 + f.max_abs_entry()));
        }
    }
}
