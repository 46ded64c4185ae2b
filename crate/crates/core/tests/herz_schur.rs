//! The Fourier semigroup of a length ψ on G agrees with the Schur semigroup on
//! M_|G| with rates ψ(xy⁻¹), restricted to the image of the left regular
//! representation. The Schur side is computed entrywise, so it serves as an
//! independent oracle for the group code paths.

use nalgebra::DMatrix;
use ncharm::bmo::{bmo_c, big_bmo, TGrid};
use ncharm::forms::GradientForms;
use ncharm::groups::{builtin_cocycles, synthesize, BuiltinGroup, GroupModel};
use ncharm::opcore::OperatorElement;
use ncharm::sampling::{gaussian_coefficients, Seeded};
use ncharm::semigroup::MarkovSemigroup;
use ncharm::transforms::imaginary_power;
use proptest::prelude::*;

fn models() -> Vec<GroupModel> {
    [
        BuiltinGroup::CyclicPlanar { n: 5 },
        BuiltinGroup::WordLengthCyclic { n: 6 },
        BuiltinGroup::SymmetricPermutation { n: 3, basepoint: vec![1.0, 2.0, 4.0] },
    ]
    .iter()
    .map(|b| builtin_cocycles(b).unwrap())
    .collect()
}

fn pair(model: &GroupModel, subordinated: bool) -> (MarkovSemigroup, MarkovSemigroup) {
    let g = &model.group;
    let n = g.order();
    let rates = DMatrix::from_fn(n, n, |x, y| model.length.get(g.mul(x, g.inv(y))));
    let schur = MarkovSemigroup::schur_with(rates, 1.0 / n as f64, subordinated).unwrap();
    let group = if subordinated {
        MarkovSemigroup::group_subordinated(model.length.clone())
    } else {
        MarkovSemigroup::group(model.length.clone())
    };
    (group, schur)
}

fn close(a: &OperatorElement, b: &OperatorElement, tol: f64) -> bool {
    (a - b).max_abs_entry() <= tol * (1.0 + a.max_abs_entry())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semigroup_and_forms_agree(which in 0usize..3, sub in any::<bool>(), seed in any::<u64>(), t in 1e-3f64..5.0) {
        let model = &models()[which];
        let (group, schur) = pair(model, sub);
        let mut rng = Seeded::new(seed).stream(0);
        let n = model.group.order();
        let f = synthesize(&gaussian_coefficients(n, &mut rng), &model.group);
        let h = synthesize(&gaussian_coefficients(n, &mut rng), &model.group);
        prop_assert!(close(&group.apply(t, &f).unwrap(), &schur.apply(t, &f).unwrap(), 1e-10));
        prop_assert!(close(&group.generator_apply(&f).unwrap(), &schur.generator_apply(&f).unwrap(), 1e-10));
        let (fg, fs) = (GradientForms::new(&group), GradientForms::new(&schur));
        prop_assert!(close(&fg.gamma(&f, &h).unwrap(), &fs.gamma(&f, &h).unwrap(), 1e-9));
        prop_assert!(close(&fg.gamma2(&f, &h).unwrap(), &fs.gamma2(&f, &h).unwrap(), 1e-9));
        let u = 3.0 * t;
        prop_assert!(close(&imaginary_power(u, &group, &f).unwrap(), &imaginary_power(u, &schur, &f).unwrap(), 1e-9));
    }
}

#[test]
fn bmo_values_agree() {
    let grid = TGrid::standard();
    for model in models() {
        let (group, schur) = pair(&model, false);
        let n = model.group.order();
        for k in 0..5 {
            let f = synthesize(&gaussian_coefficients(n, &mut Seeded::new(3).stream(k)), &model.group);
            let (a, b) = (bmo_c(&f, &group, &grid).unwrap(), bmo_c(&f, &schur, &grid).unwrap());
            assert!((a - b).abs() <= 1e-9 * a.max(1.0), "bmo_c {a} vs {b}");
            let (a, b) = (big_bmo(&f, &group, &grid).unwrap(), big_bmo(&f, &schur, &grid).unwrap());
            assert!((a - b).abs() <= 1e-9 * a.max(1.0), "BMO {a} vs {b}");
        }
    }
}
