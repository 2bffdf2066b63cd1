//! Algebraic invariants under random inputs.

use std::sync::OnceLock;

use proptest::prelude::*;
use sfz_core::classify::norms_in_same_orbit;
use sfz_core::fieldtower::{Fe, FieldTower};
use sfz_core::linmaps::QLinearMap;
use sfz_core::projgeom::{quadratic_form, ProjLine, ProjPoint, Vec4};
use sfz_core::zoo::{make_da, make_dab, scattered_da_parameters, DABParams, DAParams};

fn towers() -> &'static [FieldTower] {
    static T: OnceLock<Vec<FieldTower>> = OnceLock::new();
    T.get_or_init(|| {
        [(3, 1), (5, 1), (3, 2)]
            .into_iter()
            .map(|(p, h)| FieldTower::build(p, h).unwrap())
            .collect()
    })
}

fn tower(i: usize) -> &'static FieldTower {
    &towers()[i % towers().len()]
}

fn elem(t: &FieldTower, raw: u32) -> Fe {
    Fe(raw % t.order())
}

fn cubic(t: &FieldTower, raw: u32) -> Fe {
    let all = t.subfield_elements(3);
    all[raw as usize % all.len()]
}

fn vec4(t: &FieldTower, raw: [u32; 4]) -> Vec4 {
    raw.map(|x| cubic(t, x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(ti in 0usize..3, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let t = tower(ti);
        let (a, b, c) = (elem(t, a), elem(t, b), elem(t, c));
        prop_assert_eq!(t.mul(a, t.add(b, c)), t.add(t.mul(a, b), t.mul(a, c)));
        prop_assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
        prop_assert_eq!(t.add(a, t.neg(a)), Fe::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(t.mul(a, t.inv(a)), Fe::ONE);
        }
    }

    #[test]
    fn frobenius_is_an_automorphism(ti in 0usize..3, a in any::<u32>(), b in any::<u32>(), k in -6i64..6) {
        let t = tower(ti);
        let (a, b) = (elem(t, a), elem(t, b));
        prop_assert_eq!(t.frob(t.add(a, b), k), t.add(t.frob(a, k), t.frob(b, k)));
        prop_assert_eq!(t.frob(t.mul(a, b), k), t.mul(t.frob(a, k), t.frob(b, k)));
        prop_assert_eq!(t.frob(t.frob(a, k), -k), a);
        prop_assert_eq!(t.frob(a, 6), a);
    }

    #[test]
    fn norm_multiplicative_trace_additive(ti in 0usize..3, a in any::<u32>(), b in any::<u32>()) {
        let t = tower(ti);
        let (a, b) = (cubic(t, a), cubic(t, b));
        prop_assert_eq!(t.norm3(t.mul(a, b)), t.mul(t.norm3(a), t.norm3(b)));
        prop_assert_eq!(t.trace3(t.add(a, b)), t.add(t.trace3(a), t.trace3(b)));
        prop_assert!(t.in_subfield(t.norm3(a), 1));
        prop_assert!(t.in_subfield(t.trace3(a), 1));
    }

    #[test]
    fn norm_orbit_test_is_symmetric(ti in 0usize..3, a in any::<u32>(), b in any::<u32>()) {
        let t = tower(ti);
        let (a, b) = (elem(t, a), elem(t, b));
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!(norms_in_same_orbit(t, a, b).unwrap(), norms_in_same_orbit(t, b, a).unwrap());
        prop_assert!(norms_in_same_orbit(t, a, t.frob_p(a, 1)).unwrap());
    }

    #[test]
    fn q_polynomial_inverse(ti in 0usize..3, c in any::<[u32; 3]>(), x in any::<u32>()) {
        let t = tower(ti);
        let f = QLinearMap::new(cubic(t, c[0]), cubic(t, c[1]), cubic(t, c[2]));
        let x = cubic(t, x);
        if let Ok(g) = f.invert(t) {
            prop_assert!(f.is_bijective(t));
            prop_assert_eq!(g.apply(t, f.apply(t, x)), x);
            prop_assert_eq!(f.compose(t, &g), QLinearMap::identity());
        } else {
            prop_assert!(!f.is_bijective(t));
        }
    }

    #[test]
    fn polarity_is_an_involution(ti in 0usize..3, u in any::<[u32; 4]>(), v in any::<[u32; 4]>()) {
        let t = tower(ti);
        let (u, v) = (vec4(t, u), vec4(t, v));
        if let Some(p) = ProjPoint::from_vec(t, &u) {
            prop_assert_eq!(p.polar(t).polar(t), p);
            prop_assert_eq!(p.polar(t).contains(t, &p), quadratic_form(t, &u).is_zero());
        }
        if let Some(l) = ProjLine::span_vecs(t, &u, &v) {
            let lp = l.polar(t);
            prop_assert_eq!(lp.polar(t), l);
            prop_assert_eq!(lp.quadric_profile(t), l.quadric_profile(t));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn da_linear_set_invariants(idx in any::<usize>(), r in 1u32..=2) {
        let t = tower(1);
        let params = scattered_da_parameters(t);
        let a = params[idx % params.len()];
        let s = make_da(t, &DAParams::new(t, r, a, None).unwrap()).unwrap();
        let tt = s.transpose().transpose();
        prop_assert_eq!(tt.basis(), s.basis());
        let l = s.linear_set(t);
        prop_assert_eq!(l.partition_sum(t), t.q().pow(6) - 1);
        prop_assert!(!l.meets_quadric(t));
        prop_assert!(l.is_scattered(t));
        let lt = s.transpose().linear_set(t);
        prop_assert_eq!(lt.partition_sum(t), t.q().pow(6) - 1);
    }

    #[test]
    fn dab_dual_is_an_involution(idx in any::<usize>(), r in 1u32..=2) {
        let t = tower(1);
        let params = scattered_da_parameters(t);
        let b = params[idx % params.len()];
        let s = make_dab(t, &DABParams::new(t, r, b, None).unwrap()).unwrap();
        let d = s.translation_dual(t).unwrap();
        prop_assert!(d.translation_dual(t).unwrap().same_span(t, &s));
        prop_assert!(d.verify_no_zero_divisors(t).nonsingular);
    }
}
