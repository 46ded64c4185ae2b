//! Gradient forms `Γ`, `Γ₂` and Bakry's chain of equivalent inequalities.
//!
//! In finite dimension the domain of the forms is the whole algebra.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::opcore::{psd_defect, OperatorElement};
use crate::report::Worst;
use crate::sampling::Seeded;
use crate::semigroup::MarkovSemigroup;

/// Tolerance for operator inequalities `A ≤ B`, scaled by `1 + ‖B‖∞`.
pub const INEQUALITY_TOL: f64 = 1e-9;

/// Absolute tolerance for `Γ(f,f) ≥ 0` and `Γ₂(f,f) ≥ 0`.
pub const FORM_PSD_TOL: f64 = 1e-10;

/// Default number of Gaussian samples in audits.
pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug)]
pub struct GradientForms<'a> {
    semigroup: &'a MarkovSemigroup,
}

impl<'a> GradientForms<'a> {
    pub fn new(semigroup: &'a MarkovSemigroup) -> Self {
        Self { semigroup }
    }

    pub fn semigroup(&self) -> &'a MarkovSemigroup {
        self.semigroup
    }

    /// `Γ(f,g) = ½(L(f*)g + f*L(g) − L(f*g))`.
    pub fn gamma(&self, f: &OperatorElement, g: &OperatorElement) -> Result<OperatorElement> {
        let s = self.semigroup;
        let fs = f.adjoint();
        let a = &s.generator_apply(&fs)? * g;
        let b = &fs * &s.generator_apply(g)?;
        let c = s.generator_apply(&(&fs * g))?;
        Ok((&(&a + &b) - &c).scale_real(0.5))
    }

    /// `Γ₂(f,g) = ½(Γ(Lf,g) + Γ(f,Lg) − LΓ(f,g))`.
    pub fn gamma2(&self, f: &OperatorElement, g: &OperatorElement) -> Result<OperatorElement> {
        let s = self.semigroup;
        let a = self.gamma(&s.generator_apply(f)?, g)?;
        let b = self.gamma(f, &s.generator_apply(g)?)?;
        let c = s.generator_apply(&self.gamma(f, g)?)?;
        Ok((&(&a + &b) - &c).scale_real(0.5))
    }

    /// `psd_defect(Γ(f,f))`.
    pub fn gamma_defect(&self, f: &OperatorElement) -> Result<f64> {
        psd_defect(&self.gamma(f, f)?.hermitian_part())
    }

    pub fn gamma2_defect(&self, f: &OperatorElement) -> Result<f64> {
        psd_defect(&self.gamma2(f, f)?.hermitian_part())
    }

    /// The two semigroup inequalities of the chain at a single `(f, t)`:
    /// returns the scaled defects of `Γ(S_tf,S_tf) ≤ S_tΓ(f,f)` and of
    /// `2S_t|S_tf|² ≤ S_{2t}|f|² + |S_{2t}f|²`.
    pub fn bakry_defects(&self, f: &OperatorElement, t: f64) -> Result<(f64, f64)> {
        let s = self.semigroup;
        let stf = s.apply(t, f)?;
        let upper = s.apply(t, &self.gamma(f, f)?)?;
        let lower = self.gamma(&stf, &stf)?;
        let d1 = scaled_defect(&lower, &upper)?;

        let s2tf = s.apply(2.0 * t, f)?;
        let upper = &s.apply(2.0 * t, &f.abs_squared())? + &s2tf.abs_squared();
        let lower = s.apply(t, &stf.abs_squared())?.scale_real(2.0);
        let d2 = scaled_defect(&lower, &upper)?;
        Ok((d1, d2))
    }

    /// Samples `f` and `t` and reports the three members of the chain.
    pub fn bakry_chain_audit(&self, t_grid: &[f64], sample_count: usize, seed: u64) -> Result<BakryReport> {
        let streams = Seeded::new(seed);
        let per_sample: Vec<Result<(Worst<usize>, Worst<(usize, f64)>, Worst<(usize, f64)>, Worst<usize>)>> =
            (0..sample_count)
                .into_par_iter()
                .map(|k| {
                    let f = self.semigroup.random_element(&mut streams.stream(k as u64));
                    let mut gamma = Worst::default();
                    let mut gamma2 = Worst::default();
                    let mut commutation = Worst::default();
                    let mut semigroup_form = Worst::default();
                    gamma.update(self.gamma_defect(&f)?, k);
                    gamma2.update(self.gamma2_defect(&f)?, k);
                    for &t in t_grid {
                        let (d1, d2) = self.bakry_defects(&f, t)?;
                        commutation.update(d1, (k, t));
                        semigroup_form.update(d2, (k, t));
                    }
                    Ok((gamma2, commutation, semigroup_form, gamma))
                })
                .collect();
        let mut gamma2 = Worst::default();
        let mut commutation = Worst::default();
        let mut semigroup_form = Worst::default();
        let mut gamma = Worst::default();
        for item in per_sample {
            let (a, b, c, d) = item?;
            gamma2 = gamma2.merge(a);
            commutation = commutation.merge(b);
            semigroup_form = semigroup_form.merge(c);
            gamma = gamma.merge(d);
        }
        let gamma2_ok = gamma2.value <= FORM_PSD_TOL;
        let commutation_ok = commutation.value <= INEQUALITY_TOL;
        let semigroup_form_ok = semigroup_form.value <= INEQUALITY_TOL;
        Ok(BakryReport {
            samples: sample_count,
            seed,
            gamma_defect: gamma.value,
            gamma2_defect: gamma2.value,
            commutation_defect: commutation.value,
            commutation_worst: commutation.at,
            semigroup_form_defect: semigroup_form.value,
            semigroup_form_worst: semigroup_form.at,
            gamma_ok: gamma.value <= FORM_PSD_TOL,
            gamma2_ok,
            commutation_ok,
            semigroup_form_ok,
            consistent: gamma2_ok == commutation_ok && commutation_ok == semigroup_form_ok,
        })
    }
}

/// `psd_defect(upper − lower) / (1 + ‖upper‖∞)`.
pub fn scaled_defect(lower: &OperatorElement, upper: &OperatorElement) -> Result<f64> {
    let diff = (upper - lower).hermitian_part();
    let scale = 1.0 + upper.norm_inf();
    Ok(psd_defect(&diff)? / scale)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BakryReport {
    pub samples: usize,
    pub seed: u64,
    pub gamma_defect: f64,
    pub gamma2_defect: f64,
    pub commutation_defect: f64,
    pub commutation_worst: Option<(usize, f64)>,
    pub semigroup_form_defect: f64,
    pub semigroup_form_worst: Option<(usize, f64)>,
    pub gamma_ok: bool,
    pub gamma2_ok: bool,
    pub commutation_ok: bool,
    pub semigroup_form_ok: bool,
    /// All three members of the chain returned the same verdict.
    pub consistent: bool,
}

impl BakryReport {
    pub fn passed(&self) -> bool {
        self.gamma_ok && self.gamma2_ok && self.commutation_ok && self.semigroup_form_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{builtin_cocycles, left_regular, BuiltinGroup};
    use crate::opcore::{OperatorElement, C64, ONE};
    use crate::semigroup::log_grid;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn planar(n: usize) -> (MarkovSemigroup, crate::groups::Cocycle) {
        let m = builtin_cocycles(&BuiltinGroup::CyclicPlanar { n }).unwrap();
        (MarkovSemigroup::group(m.length), m.cocycle.unwrap())
    }

    fn s3() -> (MarkovSemigroup, crate::groups::Cocycle) {
        let m = builtin_cocycles(&BuiltinGroup::SymmetricPermutation {
            n: 3,
            basepoint: vec![1.0, 2.0, 3.0],
        })
        .unwrap();
        (MarkovSemigroup::group(m.length), m.cocycle.unwrap())
    }

    #[test]
    fn unit_examples() {
        for s in [MarkovSemigroup::poisson_schur(4), planar(5).0] {
            let forms = GradientForms::new(&s);
            let one = s.unit();
            assert_eq!(forms.gamma(&one, &one).unwrap().max_abs_entry(), 0.0);
            assert_eq!(forms.gamma2(&one, &one).unwrap().max_abs_entry(), 0.0);
            let (a, b) = forms.bakry_defects(&one, 0.7).unwrap();
            assert_eq!((a, b), (0.0, 0.0));
        }
    }

    #[test]
    fn group_closed_forms() {
        for (s, cocycle) in [planar(6), s3()] {
            let forms = GradientForms::new(&s);
            let g = s.group_ref().unwrap().clone();
            let psi = s.effective_length().unwrap();
            for a in 0..g.order() {
                let la = left_regular(a, &g);
                let one = la.identity_like();
                let gam = forms.gamma(&la, &la).unwrap();
                assert!((&gam - &one.scale_real(psi[a])).max_abs_entry() < 1e-12);
                let gam2 = forms.gamma2(&la, &la).unwrap();
                assert!((&gam2 - &one.scale_real(psi[a] * psi[a])).max_abs_entry() < 1e-11);
                for b in 0..g.order() {
                    let lb = left_regular(b, &g);
                    let c = s.coefficients(&forms.gamma(&la, &lb).unwrap()).unwrap();
                    let target = g.mul(g.inv(a), b);
                    let expected = cocycle.b(a).dot(cocycle.b(b));
                    assert!((c[target] - C64::new(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    // Γ_ij = Σ_k ½(r_ki + r_kj − r_ij) conj(f_ki) g_kj
    fn schur_gamma_oracle(rates: &DMatrix<f64>, f: &OperatorElement, g: &OperatorElement) -> OperatorElement {
        let n = rates.nrows();
        let (fm, gm) = (f.matrix(), g.matrix());
        f.like(crate::opcore::CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| fm[(k, i)].conj() * gm[(k, j)] * (0.5 * (rates[(k, i)] + rates[(k, j)] - rates[(i, j)])))
                .sum()
        }))
    }

    #[test]
    fn schur_gamma_matches_entry_formula() {
        let s = MarkovSemigroup::poisson_schur(5);
        let forms = GradientForms::new(&s);
        let mut rng = Seeded::new(9).stream(0);
        let rates = s.effective_rates().unwrap();
        for _ in 0..10 {
            let f = s.random_element(&mut rng);
            let g = s.random_element(&mut rng);
            let oracle = schur_gamma_oracle(&rates, &f, &g);
            assert!((&forms.gamma(&f, &g).unwrap() - &oracle).max_abs_entry() < 1e-11);
        }
    }

    #[test]
    fn group_gamma_is_sum_of_squares_of_derivations() {
        let (s, cocycle) = s3();
        let forms = GradientForms::new(&s);
        let g = s.group_ref().unwrap().clone();
        let mut rng = Seeded::new(2).stream(0);
        let f = s.random_element(&mut rng);
        let c = s.coefficients(&f).unwrap();
        let mut sum = OperatorElement::zeros(g.order(), 1.0 / g.order() as f64);
        for i in 0..cocycle.dim() {
            let di: Vec<C64> = (0..g.order()).map(|x| c[x] * cocycle.b(x)[i]).collect();
            let d = crate::groups::synthesize(&di, &g);
            sum = &sum + &(&d.adjoint() * &d);
        }
        assert!((&forms.gamma(&f, &f).unwrap() - &sum).max_abs_entry() < 1e-10);
    }

    #[test]
    fn bakry_chain_passes_on_small_corpus() {
        let grid = log_grid(1e-3, 1e2, 10);
        let tensor = planar(3).0.tensor_product(&planar(2).0).unwrap();
        for s in [MarkovSemigroup::poisson_schur(5), planar(6).0, s3().0, tensor] {
            let report = GradientForms::new(&s).bakry_chain_audit(&grid, 12, 4).unwrap();
            assert!(report.passed(), "{report:?}");
            assert!(report.consistent);
        }
    }

    #[test]
    fn bakry_audit_is_deterministic() {
        let s = MarkovSemigroup::poisson_schur(4);
        let grid = log_grid(1e-2, 10.0, 5);
        let a = GradientForms::new(&s).bakry_chain_audit(&grid, 8, 1).unwrap();
        let b = GradientForms::new(&s).bakry_chain_audit(&grid, 8, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scalar_semigroup_has_zero_forms() {
        let z1 = Arc::new(crate::groups::FiniteGroup::cyclic(1));
        let s = MarkovSemigroup::group(crate::groups::LengthFunction::zero(z1));
        let f = OperatorElement::identity(1, 1.0).scale(ONE * 3.0);
        assert_eq!(GradientForms::new(&s).gamma(&f, &f).unwrap().max_abs_entry(), 0.0);
    }

    fn semigroups() -> Vec<MarkovSemigroup> {
        vec![MarkovSemigroup::poisson_schur(4), planar(5).0, planar(4).0.subordinate(), s3().0]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn sesquilinear_hermitian_positive(which in 0usize..4, seed in any::<u64>()) {
            let s = &semigroups()[which];
            let forms = GradientForms::new(s);
            let mut rng = Seeded::new(seed).stream(0);
            let f = s.random_element(&mut rng);
            let g = s.random_element(&mut rng);
            let fg = forms.gamma(&f, &g).unwrap();
            let gf = forms.gamma(&g, &f).unwrap();
            prop_assert!((&fg.adjoint() - &gf).max_abs_entry() <= 1e-12 * (1.0 + fg.max_abs_entry()));
            // polarization: Γ(f,g) = ¼ Σ_k i^k Γ(i^k f + g, i^k f + g)
            let mut acc = f.like(crate::opcore::CMatrix::zeros(f.dim(), f.dim()));
            let mut unit = ONE;
            for _ in 0..4 {
                let h = &f.scale(unit) + &g;
                acc = &acc + &forms.gamma(&h, &h).unwrap().scale(unit);
                unit *= crate::opcore::I;
            }
            let polar = acc.scale_real(0.25);
            prop_assert!((&polar - &fg).max_abs_entry() <= 1e-10 * (1.0 + fg.max_abs_entry()));
            prop_assert!(forms.gamma_defect(&f).unwrap() <= FORM_PSD_TOL);
            prop_assert!(forms.gamma2_defect(&f).unwrap() <= FORM_PSD_TOL * (1.0 + f.frobenius().powi(2)));
        }
    }
}
