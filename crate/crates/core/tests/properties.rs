use std::collections::BTreeMap;
use std::sync::Arc;

use modlie::contact::ContactForm;
use modlie::forms::DiffForm;
use modlie::weights::{gl_character, peel_highest_weights};
use modlie::{DivPowRing, DividedPoly, Heights, VectorField};
use proptest::prelude::*;

fn ring(p: u32, n: &[u32]) -> Arc<DivPowRing> {
    DivPowRing::new(p, Heights(n.to_vec())).unwrap()
}

fn arb_poly(r: Arc<DivPowRing>, max_terms: usize) -> impl Strategy<Value = DividedPoly> {
    let monos = r.all_monomials();
    let p = r.p();
    prop::collection::vec((0..monos.len(), 1..p), 0..max_terms).prop_map(move |ts| DividedPoly::from_terms(&r, ts.into_iter().map(|(i, c)| (monos[i], c)).collect()))
}

fn arb_field(r: Arc<DivPowRing>, max_terms: usize) -> impl Strategy<Value = VectorField> {
    let m = r.m();
    prop::collection::vec(arb_poly(r, max_terms), m).prop_map(|cs| VectorField::from_coeffs(&cs).unwrap())
}

fn arb_form(r: Arc<DivPowRing>, degree: usize) -> impl Strategy<Value = DiffForm> {
    let m = r.m();
    let idx: Vec<Vec<usize>> = (0u32..1 << m).filter(|s| s.count_ones() as usize == degree).map(|s| (0..m).filter(|i| s & (1 << i) != 0).collect()).collect();
    let n = idx.len();
    prop::collection::vec(arb_poly(r.clone(), 4), n).prop_map(move |cs| {
        let mut w = DiffForm::zero(&r, degree);
        for (f, i) in cs.iter().zip(&idx) {
            w = w.add(&DiffForm::term(f, i).unwrap()).unwrap();
        }
        w
    })
}

/// Characteristic-2, -3 and -5 rings with mixed heights.
fn rings() -> [Arc<DivPowRing>; 3] {
    [ring(2, &[2, 1, 2]), ring(3, &[2, 1, 1]), ring(5, &[1, 1])]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divergence_of_bracket((d, e) in (0usize..3).prop_flat_map(|k| (arb_field(rings()[k].clone(), 4), arb_field(rings()[k].clone(), 4)))) {
        let lhs = d.bracket(&e).unwrap().divergence();
        let rhs = d.apply(&e.divergence()).unwrap().sub(&e.apply(&d.divergence()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fields_are_derivations((d, f, g) in (arb_field(ring(3, &[2, 1]), 4), arb_poly(ring(3, &[2, 1]), 5), arb_poly(ring(3, &[2, 1]), 5))) {
        let lhs = d.apply(&f.mul(&g).unwrap()).unwrap();
        let rhs = d.apply(&f).unwrap().mul(&g).unwrap().add(&f.mul(&d.apply(&g).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_squared_vanishes(w in (0usize..2).prop_flat_map(|k| arb_form(ring(3, &[2, 1, 2]), k))) {
        prop_assert!(w.d().unwrap().d().unwrap().is_zero());
    }

    #[test]
    fn exact_top_forms_integrate_to_zero(w in arb_form(ring(5, &[1, 2]), 1)) {
        prop_assert_eq!(w.d().unwrap().integral().unwrap().value(), 0);
    }

    #[test]
    fn contact_fields_recover_their_generating_function(f in arb_poly(ContactForm::new(1, Heights(vec![1, 1, 2]), 3).unwrap().ring().clone(), 6)) {
        let form = ContactForm::new(1, Heights(vec![1, 1, 2]), 3).unwrap();
        let k = form.field_any(&f).unwrap();
        prop_assert!(form.is_contact(&k.field).unwrap());
        prop_assert_eq!(form.generating_function(&k.field).unwrap(), k.generating);
    }

    #[test]
    fn peeling_inverts_characters(a in 0i64..4, b in 0i64..4, c in -2i64..3, d in 0i64..3) {
        let lambda = vec![c + a + b, c + a, c];
        let mu = vec![c + d, c + d, c];
        let mut sum: BTreeMap<Vec<i64>, usize> = gl_character(&lambda);
        for (w, n) in gl_character(&mu) {
            *sum.entry(w).or_insert(0) += n;
        }
        let mut found = peel_highest_weights(&sum).unwrap();
        found.sort();
        let mut expected = vec![lambda, mu];
        expected.sort();
        prop_assert_eq!(found, expected);
    }
}
