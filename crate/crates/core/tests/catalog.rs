//! Golden dimensions of the catalog algebras outside the acceptance criteria.

use std::collections::BTreeMap;

use modlie::catalog::{self, G1_DOUBLE_PRIME};
use modlie::contact::{contact_seed, ContactForm};
use modlie::prolong::{heights_experiment, StopReason};
use modlie::{complete_prolong, Heights, ProlongOptions, ProlongResult, ProlongSeed};

fn prolong(seed: &ProlongSeed) -> ProlongResult {
    let r = complete_prolong(seed, &ProlongOptions::default()).unwrap();
    assert!(matches!(r.stop, StopReason::ZeroComponent(_)));
    r
}

fn dims(pairs: &[(i32, usize)]) -> BTreeMap<i32, usize> {
    pairs.iter().copied().collect()
}

const SBY_DIMS: &[(i32, usize)] = &[(-3, 1), (-2, 3), (-1, 3), (0, 8), (1, 6), (2, 15), (3, 7), (4, 15), (5, 6), (6, 11), (7, 3), (8, 3), (9, 1)];

#[test]
fn sby_and_by_double_prime() {
    let sby = prolong(&catalog::sby_seed().unwrap());
    assert_eq!(sby.dims(), dims(SBY_DIMS));
    // dim SBY(N) = 3^(|N|+1) + 1, dim SBY(N)^(1) = 3^(|N|+1) - 3
    assert_eq!(sby.dim(), 82);
    assert_eq!(sby.algebra.derived_subalgebra().unwrap().dim(), 78);

    let by = prolong(&catalog::by_seed().unwrap());
    let by2 = catalog::g1_summand_algebra(&by.algebra, "by2", &G1_DOUBLE_PRIME).unwrap();
    let mut expected = dims(SBY_DIMS);
    expected.insert(6, 8);
    expected.remove(&9);
    assert_eq!(by2.dims_by_degree(), expected);
    by2.check_jacobi().unwrap();
}

#[test]
fn smy_and_my_double_prime() {
    let smy = prolong(&catalog::smy_seed().unwrap());
    assert_eq!(smy.dim(), 84);
    assert_eq!(smy.algebra.derived_subalgebra().unwrap().dim(), 81);
    let my = prolong(&catalog::my_seed().unwrap());
    let my2 = catalog::g1_summand_algebra(&my.algebra, "my2", &G1_DOUBLE_PRIME).unwrap();
    assert_eq!(my2.dim(), 77);
    my2.check_jacobi().unwrap();
}

#[test]
fn contact_algebra_k3() {
    let form = ContactForm::new(1, Heights(vec![1, 1, 1]), 3).unwrap();
    let k3 = prolong(&contact_seed(&form, "k3").unwrap());
    // dim K(2n+1;N) = p^|N| when 2n+4 is not divisible by p
    assert_eq!(k3.dim(), 27);
    assert_eq!(k3.dims(), dims(&[(-2, 1), (-1, 2), (0, 4), (1, 4), (2, 5), (3, 4), (4, 4), (5, 2), (6, 1)]));
}

#[test]
fn frank_partial_prolong() {
    let fr = catalog::frank_partial(1).unwrap();
    assert_eq!(fr.algebra.dims_by_degree(), dims(&[(-2, 1), (-1, 2), (0, 4), (1, 2), (2, 4), (3, 2), (4, 3)]));
    assert!(fr.fills_g0);
    fr.algebra.check_jacobi().unwrap();
}

#[test]
fn ermolaev_prolong_is_one_larger_than_its_derived_algebra() {
    let (full, er) = catalog::er_algebra().unwrap();
    assert_eq!(full.dim(), 27);
    assert_eq!(full.algebra.outer_trace_count().unwrap(), 1);
    assert_eq!(er.dim(), 26);
}

#[test]
fn brown_abc_needs_a_zero_for_degree_two() {
    let h = Heights(vec![1, 1, 2]);
    for (a, b, c) in [(1, 1, 0), (2, 1, 1), (1, 2, 1)] {
        let r = prolong(&catalog::br2abc_seed(a, b, c, Some(&h)).unwrap());
        assert!(r.dims().get(&2).is_none_or(|&n| n == 0), "a={a} b={b} c={c}: {:?}", r.dims());
    }
    for c in [1, 2] {
        let r = prolong(&catalog::br2abc_seed(0, 1, c, Some(&h)).unwrap());
        assert!(r.dims().get(&2).is_some_and(|&n| n > 0), "c={c}: {:?}", r.dims());
    }
    assert!(catalog::br2abc_seed(1, 1, 1, None).is_err());
}

#[test]
fn melikyan_heights_experiment_flags_the_last_two_heights() {
    let (base, trials) = heights_experiment(catalog::me5_seed_with_heights, &Heights::ones(5), 128).unwrap();
    assert_eq!(base.values().sum::<usize>(), 125);
    let grew: Vec<bool> = trials.iter().map(|t| t.grew).collect();
    assert_eq!(grew, vec![false, false, false, true, true]);
}
