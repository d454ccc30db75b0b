//! Torus weights of graded components, extreme vectors, and g_0-submodules.
//!
//! Basis vectors of a [`GradedAlgebra`] are weight vectors, so a component splits into
//! weight blocks directly from the labels. Raising operators are the root vectors of
//! g_0 whose weight is lexicographically positive; lowering operators those whose
//! weight is lexicographically negative.

use std::collections::BTreeMap;

use crate::ffla::{MatFp, Subspace};
use crate::glie::{GradedAlgebra, WeightMode};
use crate::Error;

pub type Weight = Vec<i64>;

/// Per-degree weight multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    pub mode: WeightMode,
    pub rows: BTreeMap<i32, BTreeMap<Weight, usize>>,
}

impl WeightTable {
    pub fn of(alg: &GradedAlgebra) -> Result<Self, Error> {
        let mut rows = BTreeMap::new();
        for (&d, &dim) in &alg.dims_by_degree() {
            let row = weight_decomposition(alg, d)?;
            let total: usize = row.values().sum();
            if total != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: total });
            }
            rows.insert(d, row);
        }
        Ok(WeightTable { mode: alg.weight_mode(), rows })
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.rows.iter().map(|(&d, r)| (d, r.values().sum())).collect()
    }
}

/// Weight multiplicities of the degree-`d` component. Every torus element must act
/// on the component by the scalar recorded in the labels (mod p).
pub fn weight_decomposition(alg: &GradedAlgebra, d: i32) -> Result<BTreeMap<Weight, usize>, Error> {
    let labels = alg.labels();
    let comp = alg.component(d);
    for &t in alg.torus() {
        for &i in &comp {
            let v = alg.bracket_with_basis(&alg.unit(t), i);
            if v.iter().enumerate().any(|(k, &c)| k != i && c != 0) {
                return Err(Error::Invariant(format!("torus element {} does not act diagonally on {}", labels[t].name, labels[i].name)));
            }
        }
    }
    let mut out = BTreeMap::new();
    for &i in &comp {
        *out.entry(labels[i].weight.clone()).or_insert(0) += 1;
    }
    Ok(out)
}

fn lex_sign(w: &[i64]) -> i32 {
    match w.iter().find(|&&x| x != 0) {
        Some(&x) if x > 0 => 1,
        Some(_) => -1,
        None => 0,
    }
}

/// Degree-0 basis vectors with lexicographically positive weight.
pub fn raising_operators(alg: &GradedAlgebra) -> Vec<Vec<u32>> {
    root_vectors(alg, 1)
}

/// Degree-0 basis vectors with lexicographically negative weight.
pub fn lowering_operators(alg: &GradedAlgebra) -> Vec<Vec<u32>> {
    root_vectors(alg, -1)
}

fn root_vectors(alg: &GradedAlgebra, sign: i32) -> Vec<Vec<u32>> {
    alg.component(0).into_iter().filter(|&i| lex_sign(&alg.labels()[i].weight) == sign).map(|i| alg.unit(i)).collect()
}

/// A vector annihilated by a family of operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremeVector {
    pub weight: Weight,
    pub vector: Vec<u32>,
}

/// Joint kernel of ad(ops) on the degree-`d` component, one basis per weight block.
/// With raising operators these are highest-weight vectors, with lowering operators
/// lowest-weight vectors.
pub fn highest_weight_vectors(alg: &GradedAlgebra, d: i32, ops: &[Vec<u32>]) -> Vec<ExtremeVector> {
    let n = alg.dim();
    let p = alg.p();
    let labels = alg.labels();
    let mut blocks: BTreeMap<&Weight, Vec<usize>> = BTreeMap::new();
    for i in alg.component(d) {
        blocks.entry(&labels[i].weight).or_default().push(i);
    }
    let mut out = Vec::new();
    for (w, idx) in blocks.into_iter().rev() {
        let mut m = MatFp::zeros(p, ops.len() * n, idx.len());
        for (col, &i) in idx.iter().enumerate() {
            for (o, op) in ops.iter().enumerate() {
                let img = alg.bracket(op, &alg.unit(i));
                for (k, &c) in img.iter().enumerate() {
                    if c != 0 {
                        m.set(o * n + k, col, c);
                    }
                }
            }
        }
        for kv in m.kernel_basis() {
            let mut v = vec![0u32; n];
            for (t, &c) in kv.iter().enumerate() {
                v[idx[t]] = c;
            }
            out.push(ExtremeVector { weight: w.clone(), vector: v });
        }
    }
    out
}

/// Smallest ad(g_0)-stable subspace containing `v`, with a spanning list that consists
/// of weight vectors when `v` is one.
pub fn g0_submodule(alg: &GradedAlgebra, v: &[u32]) -> (Subspace, Vec<Vec<u32>>) {
    let g0 = alg.component(0);
    let mut span = Subspace::zero(alg.p(), alg.dim());
    span.insert(v);
    let mut found = vec![v.to_vec()];
    let mut next = 0;
    while next < found.len() {
        let x = found[next].clone();
        next += 1;
        for &j in &g0 {
            let y = alg.bracket_with_basis(&x, j);
            if span.insert(&y) {
                found.push(y);
            }
        }
    }
    (span, found)
}

/// One g_0-submodule generated by an extreme vector.
#[derive(Clone, Debug)]
pub struct Summand {
    pub weight: Weight,
    pub dim: usize,
    pub generator: Vec<u32>,
    pub span: Subspace,
    /// Weight vectors spanning the summand.
    pub vectors: Vec<Vec<u32>>,
}

/// Submodules generated by the extreme vectors of a component.
#[derive(Clone, Debug)]
pub struct ModuleSplit {
    pub summands: Vec<Summand>,
    /// The summands are independent.
    pub direct: bool,
    /// The summands span the component.
    pub complete: bool,
}

impl ModuleSplit {
    /// Whether the component is a direct sum of the summands found.
    pub fn is_direct_sum(&self) -> bool {
        self.direct && self.complete
    }

    pub fn blocks(&self) -> Vec<(Weight, usize)> {
        self.summands.iter().map(|s| (s.weight.clone(), s.dim)).collect()
    }
}

/// Split the degree-`d` component into the g_0-submodules generated by its extreme
/// vectors with respect to `ops` (lowering operators give lowest weights). Submodules
/// contained in earlier ones are skipped; an overlap or a missing part means some
/// summand is reducible.
pub fn module_components(alg: &GradedAlgebra, d: i32, ops: &[Vec<u32>]) -> ModuleSplit {
    let n = alg.dim();
    let p = alg.p();
    let mut extremes = highest_weight_vectors(alg, d, ops);
    // lowest weights first when splitting by lowering operators
    if ops.first().is_some_and(|o| o.iter().position(|&c| c != 0).is_some_and(|i| lex_sign(&alg.labels()[i].weight) < 0)) {
        extremes.reverse();
    }
    let mut total = Subspace::zero(p, n);
    let mut summands = Vec::new();
    let mut direct = true;
    for e in extremes {
        if total.contains(&e.vector) {
            continue;
        }
        let (span, vectors) = g0_submodule(alg, &e.vector);
        let before = total.dim();
        for b in span.basis() {
            total.insert(b);
        }
        if total.dim() - before != span.dim() {
            direct = false;
        }
        summands.push(Summand { weight: e.weight, dim: span.dim(), generator: e.vector, span, vectors });
    }
    let complete = total.dim() == alg.component(d).len();
    ModuleSplit { summands, direct, complete }
}

/// Weight multiset of the irreducible gl(n)-module with highest weight `lambda`
/// (nonincreasing) in characteristic 0, from Gelfand–Tsetlin patterns.
pub fn gl_character(lambda: &[i64]) -> BTreeMap<Weight, usize> {
    fn rec(row: &[i64], acc: &mut Vec<i64>, out: &mut BTreeMap<Weight, usize>) {
        let n = row.len();
        let s: i64 = row.iter().sum();
        if n == 1 {
            acc.push(s);
            let mut w = acc.clone();
            w.reverse();
            // acc holds row-sum differences from the top row down
            *out.entry(w).or_insert(0) += 1;
            acc.pop();
            return;
        }
        let mut next = vec![0i64; n - 1];
        fn fill(row: &[i64], i: usize, next: &mut Vec<i64>, s: i64, acc: &mut Vec<i64>, out: &mut BTreeMap<Weight, usize>) {
            if i == next.len() {
                let t: i64 = next.iter().sum();
                acc.push(s - t);
                let nx = next.clone();
                rec(&nx, acc, out);
                acc.pop();
                return;
            }
            for v in row[i + 1]..=row[i] {
                next[i] = v;
                fill(row, i + 1, next, s, acc, out);
            }
        }
        fill(row, 0, &mut next, s, acc, out);
    }
    let mut out = BTreeMap::new();
    if lambda.is_empty() {
        return out;
    }
    rec(lambda, &mut Vec::new(), &mut out);
    out
}

/// Highest weights of a characteristic-0 gl(n) decomposition of a weight multiset:
/// repeatedly take the lexicographically largest weight and remove its character.
pub fn peel_highest_weights(mult: &BTreeMap<Weight, usize>) -> Result<Vec<Weight>, Error> {
    let mut rest: BTreeMap<Weight, i64> = mult.iter().map(|(w, &c)| (w.clone(), c as i64)).filter(|x| x.1 != 0).collect();
    let mut out = Vec::new();
    while let Some((top, _)) = rest.iter().next_back() {
        let top = top.clone();
        if top.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invariant(format!("leading weight {top:?} is not dominant")));
        }
        for (w, c) in gl_character(&top) {
            let e = rest.entry(w.clone()).or_insert(0);
            *e -= c as i64;
            if *e < 0 {
                return Err(Error::Invariant(format!("weight {w:?} overdrawn while removing {top:?}")));
            }
            if *e == 0 {
                rest.remove(&w);
            }
        }
        out.push(top);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glie::BasisLabel;

    fn sl2_adjoint() -> GradedAlgebra {
        // e, h, f with [h,e]=2e, [h,f]=-2f, [e,f]=h over F_5
        let l = |n: &str, w: i64| BasisLabel { name: n.into(), degree: 0, weight: vec![w] };
        let labels = vec![l("f", -2), l("h", 0), l("e", 2)];
        GradedAlgebra::from_constants("sl2", 5, labels, vec![(1, 2, 2, 2), (1, 0, 0, 3), (2, 0, 1, 1)], vec![1], WeightMode::Integer).unwrap()
    }

    #[test]
    fn gl_character_dims() {
        assert_eq!(gl_character(&[2, 0]).values().sum::<usize>(), 3);
        assert_eq!(gl_character(&[1, 0, -1]).values().sum::<usize>(), 8);
        assert_eq!(gl_character(&[2, 1, 0]).values().sum::<usize>(), 8);
        assert_eq!(gl_character(&[3, 0, 0]).values().sum::<usize>(), 10);
        assert_eq!(gl_character(&[1, 0, -1])[&vec![0, 0, 0]], 2);
        let c = gl_character(&[1, 0, 0]);
        assert_eq!(c.keys().cloned().collect::<Vec<_>>(), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn peeling_adjoint_plus_trivial() {
        let mut m = gl_character(&[1, 0, -1]);
        *m.entry(vec![0, 0, 0]).or_insert(0) += 1;
        assert_eq!(peel_highest_weights(&m).unwrap(), vec![vec![1, 0, -1], vec![0, 0, 0]]);
    }

    #[test]
    fn irreducible_sl2_module_has_one_highest_line() {
        let g = sl2_adjoint();
        let up = raising_operators(&g);
        assert_eq!(up.len(), 1);
        let hw = highest_weight_vectors(&g, 0, &up);
        assert_eq!(hw.len(), 1);
        assert_eq!(hw[0].weight, vec![2]);
        let split = module_components(&g, 0, &up);
        assert!(split.is_direct_sum());
        assert_eq!(split.blocks(), vec![(vec![2], 3)]);
        let t = WeightTable::of(&g).unwrap();
        assert_eq!(t.dims()[&0], 3);
        // the torus has weight 0 on itself
        assert_eq!(g.labels()[g.torus()[0]].weight, vec![0]);
    }
}
