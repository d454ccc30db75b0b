//! Finite-dimensional graded Lie algebras given by structure constants.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ffla::{self, Subspace};
use crate::sparse::Echelon;
use crate::vfield::{self, VectorField};
use crate::Error;

/// How torus weights are recorded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// Integer eigenvalues from lifted grading operators.
    Integer,
    /// Eigenvalues only defined mod p (flagged in tables).
    ModP,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisLabel {
    pub name: String,
    pub degree: i32,
    pub weight: Vec<i64>,
}

/// Sparse structure-constant entry list: (k, c) pairs sorted by k.
pub type Entries = Vec<(u32, u32)>;

#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    pub name: String,
    p: u32,
    labels: Vec<BasisLabel>,
    sc: Vec<Entries>,
    torus: Vec<usize>,
    mode: WeightMode,
    /// Coordinates of each basis vector in a parent algebra, when built as a subalgebra.
    parent: Option<Vec<Vec<u32>>>,
}

/// Dense vector helpers.
fn dense_add(acc: &mut [u32], e: &[(u32, u32)], c: u32, p: u32) {
    if c == 0 {
        return;
    }
    for &(k, x) in e {
        let k = k as usize;
        acc[k] = ffla::add(acc[k], ffla::mul(x, c, p), p);
    }
}

impl GradedAlgebra {
    /// Build from constants c_{ij}^k given for i < j. Labels must be sorted by degree.
    pub fn from_constants(
        name: &str,
        p: u32,
        labels: Vec<BasisLabel>,
        constants: impl IntoIterator<Item = (usize, usize, usize, u32)>,
        torus: Vec<usize>,
        mode: WeightMode,
    ) -> Result<Self, Error> {
        let n = labels.len();
        if labels.windows(2).any(|w| w[0].degree > w[1].degree) {
            return Err(Error::BadInput("basis labels must be sorted by degree".into()));
        }
        let mut table: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); n * n];
        for (i, j, k, c) in constants {
            if i >= n || j >= n || k >= n {
                return Err(Error::BadInput(format!("constant index ({i},{j},{k}) out of range")));
            }
            if i == j {
                if c % p != 0 {
                    return Err(Error::Invariant(format!("[e{i}, e{i}] must vanish")));
                }
                continue;
            }
            let (a, b, c) = if i < j { (i, j, c % p) } else { (j, i, ffla::neg(c % p, p)) };
            let e = table[a * n + b].entry(k as u32).or_insert(0);
            *e = ffla::add(*e, c, p);
        }
        let mut sc = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let e: Entries = table[i * n + j].iter().filter(|x| *x.1 != 0).map(|(&k, &c)| (k, c)).collect();
                for &(k, _) in &e {
                    if labels[k as usize].degree != labels[i].degree + labels[j].degree {
                        return Err(Error::Invariant(format!("constant [{},{}] -> {} breaks the grading", labels[i].name, labels[j].name, labels[k as usize].name)));
                    }
                }
                sc[j * n + i] = e.iter().map(|&(k, c)| (k, ffla::neg(c, p))).collect();
                sc[i * n + j] = e;
            }
        }
        Ok(GradedAlgebra { name: name.to_string(), p, labels, sc, torus, mode, parent: None })
    }

    /// Structure constants of a span of vector fields closed under the bracket.
    /// `torus` holds lifted diagonal coefficients of grading operators; `torus_index`
    /// marks which basis elements are the torus.
    pub fn from_fields(name: &str, basis: &[(String, i32, VectorField)], torus: &[Vec<i64>], torus_index: Vec<usize>) -> Result<Self, Error> {
        let first = basis.first().ok_or_else(|| Error::BadInput("empty basis".into()))?;
        let ring = first.2.ring().clone();
        let p = ring.p();
        let mut order: Vec<usize> = (0..basis.len()).collect();
        order.sort_by_key(|&i| basis[i].1);
        if order.iter().enumerate().any(|(a, &b)| a != b) {
            return Err(Error::BadInput("field basis must be sorted by degree".into()));
        }
        let mut ech = Echelon::new(p);
        for (name, _, f) in basis {
            if !ech.insert(f.svec()) {
                return Err(Error::BadInput(format!("field {name} is linearly dependent on earlier ones")));
            }
        }
        let (weights, mode) = field_weights(basis.iter().map(|b| &b.2), torus, p)?;
        let labels: Vec<BasisLabel> = basis.iter().zip(weights).map(|((n, d, _), w)| BasisLabel { name: n.clone(), degree: *d, weight: w }).collect();
        let n = basis.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let results: Vec<Result<Vec<(usize, usize, usize, u32)>, Error>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let b = vfield::bracket_svec(&ring, basis[i].2.svec(), basis[j].2.svec());
                let (res, combo) = ech.reduce_tracked(&b);
                if !res.is_empty() {
                    let r = VectorField::from_svec(&ring, res);
                    return Err(Error::NotClosed { left: basis[i].0.clone(), right: basis[j].0.clone(), residual: r.to_string() });
                }
                Ok(combo.into_iter().map(|(k, c)| (i, j, k, c)).collect())
            })
            .collect();
        let mut consts = Vec::new();
        for r in results {
            consts.extend(r?);
        }
        Self::from_constants(name, p, labels, consts, torus_index, mode)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn torus(&self) -> &[usize] {
        &self.torus
    }

    pub fn weight_mode(&self) -> WeightMode {
        self.mode
    }

    pub fn parent_coordinates(&self) -> Option<&[Vec<u32>]> {
        self.parent.as_deref()
    }

    pub fn set_name(&mut self, name: &str) {
        self.name = name.into();
    }

    /// Structure constants of [e_i, e_j].
    pub fn bracket_basis(&self, i: usize, j: usize) -> &Entries {
        &self.sc[i * self.dim() + j]
    }

    /// All constants (i, j, k, c) with i < j, ordered.
    pub fn constants(&self) -> Vec<(usize, usize, usize, u32)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for &(k, c) in &self.sc[i * n + j] {
                    out.push((i, j, k as usize, c));
                }
            }
        }
        out
    }

    pub fn degree_range(&self) -> Option<(i32, i32)> {
        Some((self.labels.first()?.degree, self.labels.last()?.degree))
    }

    pub fn component(&self, d: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.labels[i].degree == d).collect()
    }

    pub fn dims_by_degree(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for l in &self.labels {
            *out.entry(l.degree).or_insert(0) += 1;
        }
        out
    }

    pub fn unit(&self, i: usize) -> Vec<u32> {
        let mut v = vec![0; self.dim()];
        v[i] = 1;
        v
    }

    /// [v, e_j] for a dense vector v.
    pub fn bracket_with_basis(&self, v: &[u32], j: usize) -> Vec<u32> {
        let n = self.dim();
        let mut acc = vec![0u32; n];
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                dense_add(&mut acc, &self.sc[i * n + j], c, self.p);
            }
        }
        acc
    }

    pub fn bracket(&self, v: &[u32], w: &[u32]) -> Vec<u32> {
        let n = self.dim();
        let mut acc = vec![0u32; n];
        for (i, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in w.iter().enumerate() {
                if b != 0 {
                    dense_add(&mut acc, &self.sc[i * n + j], ffla::mul(a, b, self.p), self.p);
                }
            }
        }
        acc
    }

    fn jacobi_triple(&self, i: usize, j: usize, k: usize) -> bool {
        let n = self.dim();
        let p = self.p;
        let mut acc = vec![0u32; n];
        let mut any = false;
        for &(a, b, c) in &[(i, j, k), (j, k, i), (k, i, j)] {
            for &(m, x) in &self.sc[a * n + b] {
                let e = &self.sc[m as usize * n + c];
                if !e.is_empty() {
                    any = true;
                    dense_add(&mut acc, e, x, p);
                }
            }
        }
        !any || acc.iter().all(|&x| x == 0)
    }

    /// Jacobi identity: exhaustive up to dimension 300, otherwise 10^5 random triples.
    pub fn check_jacobi(&self) -> Result<(), Error> {
        let n = self.dim();
        let bad = if n <= 300 {
            (0..n).into_par_iter().find_map_any(|i| {
                for j in i + 1..n {
                    for k in j + 1..n {
                        if !self.jacobi_triple(i, j, k) {
                            return Some((i, j, k));
                        }
                    }
                }
                None
            })
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..100_000).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))).find(|&(i, j, k)| !self.jacobi_triple(i, j, k))
        };
        match bad {
            None => Ok(()),
            Some((i, j, k)) => Err(Error::Invariant(format!("Jacobi fails on ({}, {}, {}) in {}", self.labels[i].name, self.labels[j].name, self.labels[k].name, self.name))),
        }
    }

    /// Subalgebra spanned by homogeneous weight vectors (coordinates in this algebra).
    /// Every vector must lie in a single (degree, weight) block.
    pub fn subalgebra(&self, name: &str, vectors: &[Vec<u32>]) -> Result<GradedAlgebra, Error> {
        let p = self.p;
        let n = self.dim();
        let mut blocks: BTreeMap<(i32, Vec<i64>), Subspace> = BTreeMap::new();
        for v in vectors {
            let Some(lead) = v.iter().position(|&x| x != 0) else { continue };
            let key = (self.labels[lead].degree, self.labels[lead].weight.clone());
            if v.iter().enumerate().any(|(i, &x)| x != 0 && (self.labels[i].degree, &self.labels[i].weight) != (key.0, &key.1)) {
                return Err(Error::BadInput("subalgebra generator is not homogeneous".into()));
            }
            blocks.entry(key).or_insert_with(|| Subspace::zero(p, n)).insert(v);
        }
        let mut basis: Vec<Vec<u32>> = Vec::new();
        let mut labels = Vec::new();
        for ((deg, w), s) in &blocks {
            for (t, v) in s.basis().iter().enumerate() {
                let src = &self.labels[s.pivots()[t]];
                let nm = if s.dim() == 1 && v.iter().filter(|&&x| x != 0).count() == 1 { src.name.clone() } else { format!("{}~{}", src.name, t) };
                labels.push(BasisLabel { name: nm, degree: *deg, weight: w.clone() });
                basis.push(v.clone());
            }
        }
        let pivot_of: Vec<usize> = basis.iter().map(|v| v.iter().position(|&x| x != 0).unwrap()).collect();
        let express = |w: &[u32]| -> Option<Vec<(usize, u32)>> {
            let mut r = w.to_vec();
            let mut out = Vec::new();
            for (b, v) in basis.iter().enumerate() {
                let c = r[pivot_of[b]];
                if c != 0 {
                    ffla::axpy(&mut r, p - c, v, p);
                    out.push((b, c));
                }
            }
            r.iter().all(|&x| x == 0).then_some(out)
        };
        let m = basis.len();
        let mut consts = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let w = self.bracket(&basis[i], &basis[j]);
                match express(&w) {
                    Some(c) => consts.extend(c.into_iter().map(|(k, x)| (i, j, k, x))),
                    None => {
                        return Err(Error::NotClosed { left: labels[i].name.clone(), right: labels[j].name.clone(), residual: format!("{w:?}") });
                    }
                }
            }
        }
        let torus: Vec<usize> = (0..m).filter(|&b| self.torus.contains(&pivot_of[b]) && basis[b].iter().filter(|&&x| x != 0).count() == 1).collect();
        let mut g = GradedAlgebra::from_constants(name, p, labels, consts, torus, self.mode)?;
        g.parent = Some(basis);
        Ok(g)
    }

    /// Span of all brackets.
    pub fn derived_subalgebra(&self) -> Result<GradedAlgebra, Error> {
        let n = self.dim();
        let mut vecs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let e = &self.sc[i * n + j];
                if !e.is_empty() {
                    let mut v = vec![0u32; n];
                    dense_add(&mut v, e, 1, self.p);
                    vecs.push(v);
                }
            }
        }
        self.subalgebra(&format!("{}'", self.name), &vecs)
    }

    /// Closure of generators under bracket.
    pub fn subalgebra_generated_by(&self, name: &str, generators: &[Vec<u32>]) -> Result<GradedAlgebra, Error> {
        let n = self.dim();
        let mut span = Subspace::zero(self.p, n);
        let mut found: Vec<Vec<u32>> = Vec::new();
        for g in generators {
            if span.insert(g) {
                found.push(g.clone());
            }
        }
        let mut frontier = 0;
        while frontier < found.len() {
            let x = found[frontier].clone();
            frontier += 1;
            for y in found[..frontier].to_vec() {
                let z = self.bracket(&x, &y);
                if span.insert(&z) {
                    found.push(z);
                }
            }
        }
        self.subalgebra(name, &found)
    }

    /// Joint kernel of all ad maps.
    pub fn center(&self) -> Vec<Vec<u32>> {
        let n = self.dim();
        // rows: (j, k) coordinates of [v, e_j]; columns: i
        let mut m = ffla::MatFp::zeros(self.p, n * n, n);
        for i in 0..n {
            for j in 0..n {
                for &(k, c) in &self.sc[i * n + j] {
                    m.set(j * n + k as usize, i, c);
                }
            }
        }
        m.kernel_basis()
    }

    pub fn outer_trace_count(&self) -> Result<usize, Error> {
        Ok(self.dim() - self.derived_subalgebra()?.dim())
    }

    /// Ideal generated by `v`; stops early once it contains `stop`.
    pub fn ideal_generated(&self, v: &[u32], stop: Option<&[u32]>) -> Subspace {
        let n = self.dim();
        let mut span = Subspace::zero(self.p, n);
        let mut queue = vec![v.to_vec()];
        span.insert(v);
        // negative-degree basis elements first: they reach the bottom quickly
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&j| self.labels[j].degree);
        while let Some(x) = queue.pop() {
            for &j in &order {
                let y = self.bracket_with_basis(&x, j);
                if span.insert(&y) {
                    if span.dim() == n || stop.is_some_and(|s| span.contains(s)) {
                        return span;
                    }
                    queue.push(y);
                }
            }
        }
        span
    }

    /// Simple iff the ideal generated by every basis vector is everything. On failure the
    /// proper ideal is returned as witness.
    pub fn is_simple(&self) -> (bool, Option<Vec<Vec<u32>>>) {
        let n = self.dim();
        if n < 2 {
            return (false, None);
        }
        let center = self.center();
        if !center.is_empty() {
            return (false, Some(center));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&j| self.labels[j].degree);
        let anchor = order[0];
        let first = self.ideal_generated(&self.unit(anchor), None);
        if first.dim() < n {
            return (false, Some(first.basis().to_vec()));
        }
        let anchor_vec = self.unit(anchor);
        let witness = (0..n).into_par_iter().filter(|&i| i != anchor).find_map_any(|i| {
            let s = self.ideal_generated(&self.unit(i), Some(&anchor_vec));
            (s.dim() < n && !s.contains(&anchor_vec)).then(|| s.basis().to_vec())
        });
        match witness {
            Some(w) => (false, Some(w)),
            None => (true, None),
        }
    }
}

/// The Lie algebra generated by homogeneous vector fields, graded by the weighted
/// degree `w`. Basis elements are labelled by the bracket that produced them; degree-0
/// diagonal fields are recorded as the torus.
pub fn closure_of_fields(name: &str, gens: &[(String, VectorField)], w: &crate::divpow::WeightVector, torus: &[Vec<i64>]) -> Result<GradedAlgebra, Error> {
    let first = gens.first().ok_or_else(|| Error::BadInput("no generators".into()))?;
    let ring = first.1.ring().clone();
    let p = ring.p();
    let mut ech = Echelon::new(p);
    let mut found: Vec<(String, VectorField)> = Vec::new();
    for (n, f) in gens {
        if f.weighted_degree(w).is_none() && !f.is_zero() {
            return Err(Error::BadInput(format!("generator {n} is not homogeneous")));
        }
        if ech.insert(f.svec()) {
            found.push((n.clone(), f.clone()));
        }
    }
    let mut start = 0;
    while start < found.len() {
        let end = found.len();
        for i in start..end {
            for j in 0..end {
                if j >= start && j >= i {
                    continue;
                }
                let b = found[j].1.bracket(&found[i].1)?;
                if ech.insert(b.svec()) {
                    found.push((format!("[{},{}]", found[j].0, found[i].0), b));
                }
            }
        }
        start = end;
    }
    let mut basis: Vec<(String, i32, VectorField)> = found
        .into_iter()
        .map(|(n, f)| {
            let d = f.weighted_degree(w).unwrap_or(0) as i32;
            (n, d, f)
        })
        .collect();
    basis.sort_by_key(|b| b.1);
    let torus_index = basis.iter().enumerate().filter(|(_, b)| b.1 == 0 && b.2.diagonal().is_some()).map(|(i, _)| i).collect();
    GradedAlgebra::from_fields(name, &basis, torus, torus_index)
}

/// Torus weights of homogeneous fields: integer lift when consistent, else mod p.
pub fn field_weights<'a>(fields: impl Iterator<Item = &'a VectorField> + Clone, torus: &[Vec<i64>], p: u32) -> Result<(Vec<Vec<i64>>, WeightMode), Error> {
    let integer = |f: &VectorField| -> Option<Vec<i64>> {
        let mut it = f.svec().iter().map(|&(k, _)| vfield::field_weight(k, torus));
        let w = it.next().unwrap_or_else(|| vec![0; torus.len()]);
        it.all(|x| x == w).then_some(w)
    };
    if let Some(ws) = fields.clone().map(integer).collect::<Option<Vec<_>>>() {
        return Ok((ws, WeightMode::Integer));
    }
    let modp = |f: &VectorField| -> Option<Vec<i64>> {
        let red = |w: Vec<i64>| w.into_iter().map(|x| x.rem_euclid(p as i64)).collect::<Vec<_>>();
        let mut it = f.svec().iter().map(|&(k, _)| red(vfield::field_weight(k, torus)));
        let w = it.next().unwrap_or_else(|| vec![0; torus.len()]);
        it.all(|x| x == w).then_some(w)
    };
    fields.map(|f| modp(f).ok_or_else(|| Error::Invariant(format!("field {f} is not a torus weight vector")))).collect::<Result<Vec<_>, _>>().map(|w| (w, WeightMode::ModP))
}
