//! Acceptance criteria, one test each. Every test prints a single
//! `criterion NN PASS|FAIL: ...` line; run with `--nocapture` to see them.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use modlie::catalog::{self, G1_DOUBLE_PRIME, G1_PRIME};
use modlie::contact::{contact_seed, ContactForm};
use modlie::forms::DiffForm;
use modlie::prolong::{ProlongSeed, StopReason};
use modlie::weights::{self, Weight, WeightTable};
use modlie::{complete_prolong, minimal_relations, DivPowRing, DividedPoly, FreeGenerator, GradedAlgebra, Heights, MultiIndex, ProlongOptions, ProlongResult, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Row = (i32, usize, &'static [[i64; 3]]);

fn report(n: u32, title: &str, problems: Vec<String>) {
    if problems.is_empty() {
        println!("criterion {n:02} PASS: {title}");
    } else {
        println!("criterion {n:02} FAIL: {title}; {}", problems.join("; "));
    }
    assert!(problems.is_empty(), "criterion {n} failed: {problems:?}");
}

fn check<T: PartialEq + std::fmt::Debug>(problems: &mut Vec<String>, what: &str, found: T, expected: T) {
    if found != expected {
        problems.push(format!("{what}: found {found:?}, expected {expected:?}"));
    }
}

fn prolong(seed: &ProlongSeed, cap: i32) -> ProlongResult {
    let r = complete_prolong(seed, &ProlongOptions { cap, ..Default::default() }).unwrap();
    assert!(matches!(r.stop, StopReason::ZeroComponent(_)), "{} hit the cap", seed.name);
    r
}

fn dy() -> &'static ProlongResult {
    static DY: OnceLock<ProlongResult> = OnceLock::new();
    DY.get_or_init(|| prolong(&catalog::dy_seed().unwrap(), 64))
}

fn by() -> &'static ProlongResult {
    static BY: OnceLock<ProlongResult> = OnceLock::new();
    BY.get_or_init(|| prolong(&catalog::by_seed().unwrap(), 64))
}

fn my() -> &'static ProlongResult {
    static MY: OnceLock<ProlongResult> = OnceLock::new();
    MY.get_or_init(|| prolong(&catalog::my_seed().unwrap(), 64))
}

fn me5() -> &'static ProlongResult {
    static ME5: OnceLock<ProlongResult> = OnceLock::new();
    ME5.get_or_init(|| prolong(&catalog::me5_seed().unwrap(), 64))
}

fn sorted(mut ws: Vec<Weight>) -> Vec<Weight> {
    ws.sort();
    ws
}

/// Weights of vectors killed by every raising operator of g_0.
fn extreme_weights(alg: &GradedAlgebra, d: i32) -> Vec<Weight> {
    let ops = weights::raising_operators(alg);
    sorted(weights::highest_weight_vectors(alg, d, &ops).into_iter().map(|e| e.weight).collect())
}

fn compare_table(problems: &mut Vec<String>, alg: &GradedAlgebra, rows: &[(i32, usize, Vec<Weight>)], peel: bool) {
    let dims = alg.dims_by_degree();
    check(problems, "degrees", dims.keys().copied().collect::<Vec<_>>(), rows.iter().map(|r| r.0).collect());
    let table = WeightTable::of(alg).unwrap();
    for (d, dim, ws) in rows {
        check(problems, &format!("dim in degree {d}"), dims.get(d).copied(), Some(*dim));
        let found = if peel { sorted(weights::peel_highest_weights(&table.rows[d]).unwrap()) } else { extreme_weights(alg, *d) };
        check(problems, &format!("weights in degree {d}"), found, sorted(ws.clone()));
    }
}

fn rows3(rows: &[Row]) -> Vec<(i32, usize, Vec<Weight>)> {
    rows.iter().map(|&(d, n, ws)| (d, n, ws.iter().map(|w| w.to_vec()).collect())).collect()
}

// Me5 table. Degrees 14 and 15 use the weights whose coordinates sum to the degree;
// the tabulated (8,7) in degree 14 and (8,3) in degree 15 do not.
const ME5_ROWS: &[(i32, usize, &[[i64; 2]])] = &[
    (-3, 2, &[[-1, -2]]),
    (-2, 1, &[[-1, -1]]),
    (-1, 2, &[[0, -1]]),
    (0, 4, &[[1, -1], [0, 0]]),
    (1, 2, &[[1, 0]]),
    (2, 4, &[[2, 0], [1, 1]]),
    (3, 6, &[[3, 0], [2, 1]]),
    (4, 3, &[[3, 1]]),
    (5, 6, &[[4, 1], [3, 2]]),
    (6, 8, &[[5, 1], [4, 2]]),
    (7, 4, &[[5, 2]]),
    (8, 8, &[[6, 2], [5, 3]]),
    (9, 10, &[[7, 2], [6, 3]]),
    (10, 5, &[[7, 3]]),
    (11, 10, &[[8, 3], [7, 4]]),
    (12, 8, &[[8, 4], [7, 5]]),
    (13, 4, &[[8, 5]]),
    (14, 8, &[[9, 5], [8, 6]]),
    (15, 6, &[[9, 6], [8, 7]]),
    (16, 3, &[[9, 7]]),
    (17, 6, &[[10, 7], [9, 8]]),
    (18, 4, &[[10, 8], [9, 9]]),
    (19, 2, &[[10, 9]]),
    (20, 4, &[[11, 9], [10, 10]]),
    (21, 2, &[[11, 10]]),
    (22, 1, &[[11, 11]]),
    (23, 2, &[[12, 11]]),
];

#[test]
fn criterion_01_melikyan_table() {
    let r = me5();
    let mut problems = Vec::new();
    check(&mut problems, "dim", r.dim(), 125);
    check(&mut problems, "top degree", r.top_degree(), 23);
    let rows: Vec<_> = ME5_ROWS.iter().map(|&(d, n, ws)| (d, n, ws.iter().map(|w| w.to_vec()).collect())).collect();
    compare_table(&mut problems, &r.algebra, &rows, false);
    for (d, tabulated) in [(14, [8i64, 7]), (15, [8, 3])] {
        if tabulated.iter().sum::<i64>() == d as i64 {
            problems.push(format!("tabulated weight {tabulated:?} in degree {d} is consistent and should be kept"));
        }
    }
    report(1, "Me(5) prolong: dim 125, top degree 23, table rows match", problems);
}

/// Per-degree dims of the Me5 prolong with one height raised to 2 in the fourth or
/// fifth coordinate.
fn me5_raised_dims() -> BTreeMap<i32, usize> {
    let mut dims: BTreeMap<i32, usize> = ME5_ROWS.iter().filter(|r| r.0 <= 11).map(|r| (r.0, r.1)).collect();
    for d in 12..=71 {
        dims.insert(d, if d % 3 == 1 { 5 } else { 10 });
    }
    for (d, n) in (72..).zip([8, 4, 8, 6, 3, 6, 4, 2, 4, 2, 1, 2]) {
        dims.insert(d, n);
    }
    dims
}

#[test]
fn criterion_02_melikyan_heights() {
    let base: BTreeMap<i32, usize> = ME5_ROWS.iter().map(|r| (r.0, r.1)).collect();
    let run = |h: [u32; 5]| prolong(&catalog::me5_seed_with_heights(&Heights(h.to_vec())).unwrap(), 128);
    let mut problems = Vec::new();
    let first = run([2, 1, 1, 1, 1]);
    check(&mut problems, "dims at N=(2,1,1,1,1)", first.dims(), base.clone());
    let raised = me5_raised_dims();
    for h in [[1, 1, 1, 2, 1], [1, 1, 1, 1, 2]] {
        let r = run(h);
        check(&mut problems, &format!("dim at N={h:?}"), r.dim(), 625);
        check(&mut problems, &format!("top degree at N={h:?}"), r.top_degree(), 83);
        check(&mut problems, &format!("dims at N={h:?}"), r.dims(), raised.clone());
    }
    report(2, "Me(5) heights: N_1 is inert, N_4 and N_5 grow the prolong to 625", problems);
}

#[test]
fn criterion_03_brown_dimensions() {
    let mut problems = Vec::new();
    for a in 0..3 {
        check(&mut problems, &format!("Br(2;{a})"), catalog::br2a_algebra(a).unwrap().algebra.dim(), 10);
    }
    let br3 = catalog::br3_via_dy(&dy().algebra).unwrap();
    check(&mut problems, "Br(3)", br3.dim(), 29);
    report(3, "Br(2;a) has dim 10 for a = 0, 1, 2; Br(3) inside DY has dim 29", problems);
}

fn generators(g: &catalog::GeneratedAlgebra, degrees: &[i32]) -> Vec<FreeGenerator> {
    g.generators.iter().zip(degrees).map(|((name, vector), &degree)| FreeGenerator { name: name.clone(), vector: vector.clone(), degree }).collect()
}

fn compare_relations(problems: &mut Vec<String>, label: &str, target: &GradedAlgebra, gens: &[FreeGenerator], max_degree: i32, expected: &[&str]) -> modlie::RelationSet {
    let rs = minimal_relations(target, gens, max_degree).unwrap();
    rs.verify(target, gens).unwrap();
    let given: Vec<_> = expected.iter().map(|s| rs.parse(s).unwrap()).collect();
    let m = rs.compare(&given).unwrap();
    for (i, r) in &m.unmatched {
        problems.push(format!("{label}: expected relation {} ({r}) does not hold", i + 1));
    }
    for r in &m.missing {
        problems.push(format!("{label}: relation {r} = 0 is not implied by the expected list"));
    }
    for i in &m.redundant {
        problems.push(format!("{label}: expected relation {} follows from the others", i + 1));
    }
    rs
}

#[test]
fn criterion_04_brown_relations() {
    let mut problems = Vec::new();
    for a in 0..3 {
        let g = catalog::br2a_algebra(a).unwrap();
        let rs = compare_relations(&mut problems, &format!("Br(2;{a})"), &g.algebra, &generators(&g, &[1, 1]), 8, &["[x1,[x1,x2]]", "[x2,[x2,[x2,x1]]]"]);
        check(&mut problems, &format!("Br(2;{a}) relation count"), rs.count(), 2);
    }
    let g = catalog::br3_algebra(&dy().algebra).unwrap();
    let expected = ["[x1,x3]", "[x2,[x2,x1]]", "[x2,[x2,x3]]", "[x3,[x3,[x3,x2]]]", "[[x3,[x3,x2]],[[x3,[x2,x1]],[x3,[x3,x2]]]]"];
    let rs = compare_relations(&mut problems, "Br(3)", &g.algebra, &generators(&g, &[1, 1, 1]), 10, &expected);
    check(&mut problems, "Br(3) relation count", rs.count(), expected.len());
    report(4, "minimal relations of Br(2;a) and Br(3) equal the expected lists", problems);
}

fn mono(r: &[u32]) -> MultiIndex {
    MultiIndex::from_slice(r)
}

/// The three fields of the closed-form g_k, read with divided powers.
fn br01c_fields(ring: &Arc<DivPowRing>, c: i64, k: u32) -> Vec<VectorField> {
    let f = |t: &[(MultiIndex, usize, i64)]| VectorField::from_terms(ring, t).unwrap();
    vec![
        f(&[(mono(&[0, 0, k + 1]), 0, 1)]),
        f(&[(mono(&[0, 1, k]), 0, 1), (mono(&[2, 0, k - 1]), 0, -c), (mono(&[0, 0, k + 1]), 1, 1), (mono(&[1, 0, k]), 2, c)]),
        f(&[(mono(&[1, 0, k]), 0, -1), (mono(&[0, 0, k + 1]), 2, 1)]),
    ]
}

#[test]
fn criterion_05_brown_family() {
    let mut problems = Vec::new();
    for c in [1, 2] {
        for n in [1u32, 2] {
            let r = catalog::br201c_prolong(c, n).unwrap();
            let top = 3i32.pow(n) - 2;
            check(&mut problems, &format!("c={c} n={n} top degree"), r.top_degree(), top);
            for k in 1..=top {
                check(&mut problems, &format!("c={c} n={n} dim g_{k}"), r.dims().get(&k).copied(), Some(3));
                let coords: Option<Vec<Vec<u32>>> = br01c_fields(r.seed.ring(), c, k as u32).iter().map(|f| r.coordinates(f)).collect();
                match coords {
                    Some(v) => {
                        let mut s = modlie::Subspace::zero(3, r.dim());
                        let rank = v.iter().filter(|x| s.insert(x)).count();
                        check(&mut problems, &format!("c={c} n={n} rank of closed-form g_{k}"), rank, 3);
                    }
                    None => problems.push(format!("c={c} n={n}: closed-form g_{k} is not in the prolong")),
                }
            }
            if !r.algebra.is_simple().0 {
                problems.push(format!("c={c} n={n}: prolong is not simple"));
            }
        }
    }
    report(5, "Br(2;0,1,c): 3-dim components up to 3^n-2, closed-form basis, simple", problems);
}

const DY_ROWS: &[Row] = &[
    (-4, 3, &[[-1, -1, -2]]),
    (-3, 1, &[[-1, -1, -1]]),
    (-2, 3, &[[0, -1, -1]]),
    (-1, 3, &[[0, 0, -1]]),
    (0, 9, &[[1, 0, -1], [0, 0, 0]]),
    (1, 3, &[[1, 0, 0]]),
    (2, 9, &[[2, 0, 0], [1, 1, 0]]),
    (3, 8, &[[2, 1, 0], [1, 1, 1]]),
    (4, 18, &[[3, 1, 0], [2, 1, 1]]),
    (5, 6, &[[3, 1, 1]]),
    (6, 18, &[[4, 1, 1], [3, 2, 1]]),
    (7, 15, &[[4, 2, 1]]),
    (8, 21, &[[4, 3, 1], [4, 2, 2]]),
    (9, 7, &[[4, 3, 2]]),
    (10, 21, &[[5, 3, 2], [4, 4, 2]]),
    (11, 15, &[[5, 4, 2]]),
    (12, 18, &[[5, 5, 2], [5, 4, 3]]),
    (13, 6, &[[5, 5, 3]]),
    (14, 18, &[[6, 5, 3], [5, 5, 4]]),
    (15, 11, &[[6, 6, 3], [6, 5, 4]]),
    (16, 9, &[[6, 6, 4], [6, 5, 5]]),
    (17, 3, &[[6, 6, 5]]),
    (18, 9, &[[7, 6, 5], [6, 6, 6]]),
    (19, 3, &[[7, 6, 6]]),
    (20, 3, &[[7, 7, 6]]),
    (21, 1, &[[7, 7, 7]]),
    (22, 3, &[[8, 7, 7]]),
];

#[test]
fn criterion_06_skryabin_dy() {
    let r = dy();
    let mut problems = Vec::new();
    check(&mut problems, "dim", r.dim(), 244);
    let derived = r.algebra.derived_subalgebra().unwrap();
    check(&mut problems, "derived dim", derived.dim(), 3usize.pow(3 + 2) - 2);
    compare_table(&mut problems, &r.algebra, &rows3(DY_ROWS), false);
    check(&mut problems, "derived dim in degree 15", derived.dims_by_degree().get(&15).copied(), Some(8));
    check(&mut problems, "derived weights in degree 15", extreme_weights(&derived, 15), vec![vec![6, 5, 4]]);
    report(6, "DY prolong 244, derived 241, table rows -4..22 with the 8 (+3) split", problems);
}

// BY table from the characteristic-0 peel of each weight multiset. Degree 12 lists the
// dominant weights and degree 13 the weight with coordinate sum 13.
const BY_ROWS: &[Row] = &[
    (-3, 1, &[[-1, -1, -1]]),
    (-2, 3, &[[0, -1, -1]]),
    (-1, 3, &[[0, 0, -1]]),
    (0, 9, &[[1, 0, -1], [0, 0, 0]]),
    (1, 9, &[[1, 1, -1], [1, 0, 0]]),
    (2, 18, &[[2, 1, -1], [1, 1, 0]]),
    (3, 16, &[[2, 1, 0], [2, 1, 0]]),
    (4, 24, &[[3, 1, 0], [2, 2, 0], [2, 1, 1]]),
    (5, 24, &[[3, 2, 0], [3, 1, 1], [2, 2, 1]]),
    (6, 26, &[[4, 1, 1], [3, 2, 1], [3, 2, 1]]),
    (7, 24, &[[4, 2, 1], [3, 3, 1], [3, 2, 2]]),
    (8, 24, &[[4, 3, 1], [4, 2, 2], [3, 3, 2]]),
    (9, 19, &[[5, 2, 2], [4, 3, 2], [3, 3, 3]]),
    (10, 18, &[[5, 3, 2], [4, 3, 3]]),
    (11, 9, &[[5, 3, 3], [4, 4, 3]]),
    (12, 11, &[[6, 3, 3], [4, 4, 4]]),
    (13, 3, &[[5, 4, 4]]),
    (14, 3, &[[5, 5, 4]]),
];

/// Weights of the full algebra missing from a subalgebra, degree by degree.
fn weight_complement(full: &GradedAlgebra, sub: &GradedAlgebra) -> BTreeMap<i32, Vec<Weight>> {
    let a = WeightTable::of(full).unwrap();
    let b = WeightTable::of(sub).unwrap();
    let mut out = BTreeMap::new();
    for (d, row) in &a.rows {
        for (w, &n) in row {
            let m = b.rows.get(d).and_then(|r| r.get(w)).copied().unwrap_or(0);
            for _ in m..n {
                out.entry(*d).or_insert_with(Vec::new).push(w.clone());
            }
        }
    }
    out
}

#[test]
fn criterion_07_skryabin_by() {
    let r = by();
    let mut problems = Vec::new();
    check(&mut problems, "dim", r.dim(), 244);
    let derived = r.algebra.derived_subalgebra().unwrap();
    check(&mut problems, "derived dim", derived.dim(), 240);
    let expected: BTreeMap<i32, Vec<Weight>> = [(9, vec![vec![3, 3, 3]]), (12, sorted(vec![vec![6, 3, 3], vec![3, 6, 3], vec![3, 3, 6]]))].into_iter().collect();
    check(&mut problems, "outer trace weights", weight_complement(&r.algebra, &derived), expected);
    compare_table(&mut problems, &r.algebra, &rows3(BY_ROWS), true);
    let by1 = catalog::g1_summand_algebra(&r.algebra, "by1", &G1_PRIME).unwrap();
    check(&mut problems, "BY' dim", by1.dim(), 19);
    match by1.is_simple() {
        (false, Some(w)) if !w.is_empty() && w.len() < by1.dim() => {}
        other => problems.push(format!("BY' simplicity: {:?}", other.0)),
    }
    let by2 = catalog::g1_summand_algebra(&r.algebra, "by2", &G1_DOUBLE_PRIME).unwrap();
    check(&mut problems, "BY'' dim", by2.dim(), 78);
    report(7, "BY prolong 244, derived 240, four outer traces, BY' 19 not simple, BY'' 78", problems);
}

// MY table. Weights in degree k have coordinate sum k, which fixes degrees -2, -1 and 4;
// the tabulated degree-4 row repeats degree 5.
const MY_ROWS: &[Row] = &[
    (-2, 3, &[[0, -1, -1]]),
    (-1, 3, &[[0, 0, -1]]),
    (0, 9, &[[1, 0, -1], [0, 0, 0]]),
    (1, 9, &[[1, 1, -1], [1, 0, 0]]),
    (2, 18, &[[2, 1, -1], [1, 1, 0]]),
    (3, 18, &[[2, 2, -1], [2, 1, 0]]),
    (4, 21, &[[3, 1, 0], [2, 2, 0]]),
    (5, 21, &[[3, 2, 0], [3, 1, 1]]),
    (6, 18, &[[4, 1, 1], [3, 2, 1]]),
    (7, 18, &[[4, 2, 1], [3, 2, 2]]),
    (8, 9, &[[4, 2, 2], [3, 3, 2]]),
    (9, 9, &[[4, 3, 2], [3, 3, 3]]),
    (10, 3, &[[4, 3, 3]]),
    (11, 3, &[[4, 4, 3]]),
];

/// Weights of Λ²(V ⊕ V* ⊕ 1) for the standard gl(3)-module V.
fn o7_weights() -> Vec<Weight> {
    let mut basis: Vec<Weight> = Vec::new();
    for i in 0..3 {
        let mut e = vec![0; 3];
        e[i] = 1;
        basis.push(e.clone());
        basis.push(e.iter().map(|x| -x).collect());
    }
    basis.push(vec![0; 3]);
    let mut out = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            out.push((0..3).map(|k| basis[i][k] + basis[j][k]).collect());
        }
    }
    sorted(out)
}

#[test]
fn criterion_08_skryabin_my() {
    let r = my();
    let mut problems = Vec::new();
    check(&mut problems, "dim", r.dim(), 162);
    compare_table(&mut problems, &r.algebra, &rows3(MY_ROWS), false);
    let my1 = catalog::g1_summand_algebra(&r.algebra, "my1", &G1_PRIME).unwrap();
    check(&mut problems, "MY' dim", my1.dim(), 21);
    let all: Vec<Weight> = my1.labels().iter().map(|l| l.weight.clone()).collect();
    check(&mut problems, "MY' weights", sorted(all), o7_weights());
    report(8, "MY prolong 162 with the 14-row table; MY' has dim 21 and the weights of o(7)", problems);
}

#[test]
fn criterion_09_ermolaev() {
    let (full, er) = catalog::er_algebra().unwrap();
    let mut problems = Vec::new();
    check(&mut problems, "dims", er.dims_by_degree(), [(-1, 3), (0, 6), (1, 9), (2, 6), (3, 2)].into_iter().collect());
    check(&mut problems, "dim", er.dim(), 3usize.pow(2 + 1) - 1);
    check(&mut problems, "complete prolong dims", full.dims(), [(-1, 3), (0, 6), (1, 9), (2, 6), (3, 3)].into_iter().collect());
    check(&mut problems, "derived algebra of the prolong", full.algebra.derived_subalgebra().unwrap().dim(), er.dim());
    if !er.is_simple().0 {
        problems.push("Er is not simple".into());
    }
    report(9, "Er: dims 3, 6, 9, 6, 2 in degrees -1..3, total 26, simple", problems);
}

const FRANK_EXPECTED: &[&str] = &[
    "[x1,[x1,z1]]",
    "[x1,[x1,[x1,z2]]]",
    "[z1,z2]",
    "[z1,[z1,[x1,z1]]]",
    "[[x1,z1],[x1,[x1,z2]]]",
    "[z2,[z1,[x1,z1]]] + [z2,[x1,z2]]",
    "[[x1,z1],[[x1,z1],z2]] + [z2,[x1,[x1,z2]]]",
    "[z2,[[x1,z1],z2]]",
    "[[x1,z2],[[x1,z1],z2]]",
    "[z2,[z2,[x1,z2]]]",
    "[[x1,z2],[z2,[x1,z2]]]",
    "[[x1,[x1,z2]],[z2,[x1,z2]]]",
];

#[test]
fn criterion_10_frank() {
    let fr = catalog::frank_partial(1).unwrap();
    let gens: Vec<FreeGenerator> =
        fr.generators.iter().zip([0, 1, 2]).map(|((name, vector), degree)| FreeGenerator { name: name.clone(), vector: vector.clone(), degree }).collect();
    let target = &fr.ambient.algebra;
    let rs = minimal_relations(target, &gens, 8).unwrap();
    rs.verify(target, &gens).unwrap();
    let given: Vec<_> = FRANK_EXPECTED.iter().map(|s| rs.parse(s).unwrap()).collect();
    let m = rs.compare(&given).unwrap();
    let mut problems = Vec::new();
    check(&mut problems, "expected relations that do not hold", m.unmatched.len(), 0);
    check(&mut problems, "relations missing from the expected list", m.missing.clone(), Vec::<String>::new());
    let degrees: Vec<i32> = rs.counts_by_degree().keys().copied().collect();
    if degrees.iter().any(|d| !(1..=6).contains(d)) {
        problems.push(format!("minimal relations in degrees {degrees:?}"));
    }
    let mut redundant = m.redundant.clone();
    redundant.sort();
    check(&mut problems, "expected relations implied by lower ones (0-based)", redundant, vec![7, 8, 9, 10]);
    report(10, "Fr(1): the expected relations generate the computed ideal in degrees 1..6", problems);
}

#[test]
fn criterion_11_melikyan_small_characteristic() {
    let mut problems = Vec::new();
    // dim S(3;N) = 2 p^|N| + 1
    for (p, n) in [(3u32, [1u32, 1]), (3, [2, 1]), (2, [1, 1]), (2, [2, 1])] {
        let dim = 2 * (p as usize).pow(n[0] + n[1] + 1) + 1;
        check(&mut problems, &format!("me3 p={p} N={n:?} dim"), catalog::me3_algebra(p, &n).unwrap().dim(), dim);
    }
    let t = 3usize.pow(2);
    let me3 = catalog::me3_algebra(3, &[1, 1]).unwrap();
    check(&mut problems, "me3 p=3 dims", me3.dims_by_degree(), [(-1, t), (0, 2 * t), (1, 2 * t), (2, t + 1)].into_iter().collect());
    let me3_2 = catalog::me3_algebra(2, &[1, 1]).unwrap();
    check(&mut problems, "me3 p=2 dims", me3_2.dims_by_degree(), [(-1, 4), (0, 8), (1, 5)].into_iter().collect());
    let me2 = catalog::me2_algebra(&[1, 1]).unwrap();
    check(&mut problems, "me2 dim", me2.dim(), 15);
    match me2.is_simple() {
        (false, Some(w)) => check(&mut problems, "me2 ideal witness dim", w.len(), me2.dim() - 1),
        other => problems.push(format!("me2 simplicity: {:?}", other.0)),
    }
    let derived = me2.derived_subalgebra().unwrap();
    check(&mut problems, "me2 derived dim", derived.dim(), 14);
    if !derived.is_simple().0 {
        problems.push("me2 derived algebra is not simple".into());
    }
    report(11, "Melikyan type at p=3 and p=2: block dims, me2 codim-1 ideal, simple derived", problems);
}

fn random_poly(ring: &Arc<DivPowRing>, rng: &mut ChaCha8Rng, terms: usize) -> DividedPoly {
    let monos = ring.all_monomials();
    let p = ring.p();
    DividedPoly::from_terms(ring, (0..terms).map(|_| (monos[rng.gen_range(0..monos.len())], rng.gen_range(1..p))).collect())
}

fn random_field(ring: &Arc<DivPowRing>, rng: &mut ChaCha8Rng) -> VectorField {
    let coeffs: Vec<DividedPoly> = (0..ring.m()).map(|_| random_poly(ring, rng, 4)).collect();
    VectorField::from_coeffs(&coeffs).unwrap()
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << m).filter(|s| s.count_ones() as usize == k).map(|s| (0..m).filter(|i| s & (1 << i) != 0).collect()).collect()
}

fn all_algebras() -> Vec<GradedAlgebra> {
    let mut out = vec![me5().algebra.clone(), dy().algebra.clone(), by().algebra.clone(), my().algebra.clone()];
    for r in [dy(), by(), my()] {
        out.push(r.algebra.derived_subalgebra().unwrap());
    }
    for lowest in [G1_PRIME, G1_DOUBLE_PRIME] {
        out.push(catalog::g1_summand_algebra(&by().algebra, "by-part", &lowest).unwrap());
        out.push(catalog::g1_summand_algebra(&my().algebra, "my-part", &lowest).unwrap());
    }
    out.push(catalog::br3_via_dy(&dy().algebra).unwrap());
    let (er_full, er) = catalog::er_algebra().unwrap();
    out.extend([er_full.algebra, er]);
    for a in 0..3 {
        out.push(catalog::br2a_algebra(a).unwrap().algebra);
    }
    out.push(catalog::br201c_prolong(1, 1).unwrap().algebra);
    let fr = catalog::frank_partial(1).unwrap();
    out.extend([fr.ambient.algebra, fr.algebra]);
    out.push(catalog::me3_algebra(3, &[1, 1]).unwrap());
    out.push(catalog::me3_algebra(2, &[1, 1]).unwrap());
    let me2 = catalog::me2_algebra(&[1, 1]).unwrap();
    out.push(me2.derived_subalgebra().unwrap());
    out.push(me2);
    out
}

#[test]
fn criterion_12_property_suites() {
    let mut problems = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(12);

    let mut built = 0;
    for alg in all_algebras() {
        built += 1;
        if let Err(e) = alg.check_jacobi() {
            problems.push(e.to_string());
        }
        match WeightTable::of(&alg) {
            Ok(t) => check(&mut problems, &format!("{} weight multiplicities", alg.name), t.dims(), alg.dims_by_degree()),
            Err(e) => problems.push(format!("{}: {e}", alg.name)),
        }
    }

    let rings = [DivPowRing::new(3, Heights(vec![1, 1, 1])).unwrap(), DivPowRing::new(5, Heights(vec![1, 1])).unwrap(), DivPowRing::new(2, Heights(vec![2, 1, 2])).unwrap()];
    let mut div_failures = 0;
    for i in 0..10_000 {
        let ring = &rings[i % rings.len()];
        let (d, e) = (random_field(ring, &mut rng), random_field(ring, &mut rng));
        let lhs = d.bracket(&e).unwrap().divergence();
        let rhs = d.apply(&e.divergence()).unwrap().sub(&e.apply(&d.divergence()).unwrap()).unwrap();
        div_failures += usize::from(lhs != rhs);
    }
    check(&mut problems, "Div[D,E] = D(Div E) - E(Div D) failures in 10^4 pairs", div_failures, 0);

    let mut dd_checked = 0;
    let mut dd_failures = 0;
    for p in [2, 3, 5] {
        for m in 1..=3 {
            let ring = DivPowRing::new(p, Heights::ones(m)).unwrap();
            for r in ring.all_monomials() {
                let f = DividedPoly::monomial(&ring, r, 1).unwrap();
                for k in (0..=m).filter(|k| k + 2 <= m) {
                    for idx in subsets(m, k) {
                        dd_checked += 1;
                        dd_failures += usize::from(!DiffForm::term(&f, &idx).unwrap().d().unwrap().d().unwrap().is_zero());
                    }
                }
            }
        }
    }
    check(&mut problems, &format!("d(d(w)) != 0 among {dd_checked} basis forms"), dd_failures, 0);

    let form_rings = [DivPowRing::new(3, Heights(vec![1, 1, 1])).unwrap(), DivPowRing::new(5, Heights(vec![1, 1])).unwrap(), DivPowRing::new(3, Heights(vec![2, 1])).unwrap()];
    let mut int_failures = 0;
    for i in 0..1_000 {
        let ring = &form_rings[i % form_rings.len()];
        let m = ring.m();
        let mut w = DiffForm::zero(ring, m - 1);
        for idx in subsets(m, m - 1) {
            w = w.add(&DiffForm::term(&random_poly(ring, &mut rng, 5), &idx).unwrap()).unwrap();
        }
        int_failures += usize::from(w.d().unwrap().integral().unwrap().value() != 0);
    }
    check(&mut problems, "nonzero integrals of exact forms in 10^3 samples", int_failures, 0);

    let form = ContactForm::new(1, Heights(vec![1, 1, 1]), 3).unwrap();
    let mut proofs = vec![me5(), dy(), by(), my()].into_iter().map(|r| (r.seed.name.clone(), r.certificates.clone())).collect::<Vec<_>>();
    let k3 = prolong(&contact_seed(&form, "k3").unwrap(), 64);
    proofs.push((k3.seed.name.clone(), k3.certificates.clone()));
    let er = catalog::er_algebra().unwrap().0;
    proofs.push((er.seed.name.clone(), er.certificates.clone()));
    for (name, certs) in &proofs {
        for c in certs {
            if !c.passed || c.samples < 100 {
                problems.push(format!("{name}: certificate in degree {} ({} samples, passed {})", c.degree, c.samples, c.passed));
            }
        }
        if certs.is_empty() {
            problems.push(format!("{name}: no certificates"));
        }
    }

    report(12, &format!("property suites: Jacobi and weight sums on {built} algebras, Div, d^2, integrals, certificates"), problems);
}
