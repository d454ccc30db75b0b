//! Cartan and Tanaka prolongation of graded seeds realized by vector fields, partial
//! prolongs, and subalgebra generation.
//!
//! The positive components are found by an integration scheme. Every candidate value
//! y = [X, e_a] in g_{k-1} (for a basis e_a of g_{-1}) determines the brackets of X with
//! all of g_- through Jacobi, hence with the frame E_b = ∂_b + A_b, hence the partial
//! derivatives of the coefficients of X standard degree by standard degree. The
//! candidate combinations whose integrated field really has [X, e_a] = y span g_k.
//! The plain kernel of X ↦ ([X, e_a] mod g_{k-1}) over the ambient weight block is
//! available as [`prolong_step_direct`] and serves as the oracle.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::divpow::{DivPowRing, Heights, MultiIndex, WeightVector};
use crate::ffla::{self, MatFp, Subspace};
use crate::glie::{self, BasisLabel, GradedAlgebra, WeightMode};
use crate::sparse::{self, Acc, Echelon, SVec};
use crate::vfield::{self, key, key_coord, key_mono, VectorField};
use crate::Error;

/// Default degree cap for complete prolongs.
pub const DEFAULT_CAP: i32 = 64;

/// One homogeneous component with a basis of weight vectors.
#[derive(Clone, Debug)]
pub struct Component {
    pub degree: i32,
    pub names: Vec<String>,
    pub fields: Vec<VectorField>,
    pub weights: Vec<Vec<i64>>,
}

impl Component {
    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub(crate) fn echelon(&self, p: u32) -> Echelon {
        let mut e = Echelon::new(p);
        for f in &self.fields {
            e.insert(f.svec());
        }
        e
    }
}

/// Non-positive part of a graded algebra of vector fields.
#[derive(Clone, Debug)]
pub struct ProlongSeed {
    pub name: String,
    ring: Arc<DivPowRing>,
    weight: WeightVector,
    torus: Vec<Vec<i64>>,
    mode: WeightMode,
    parts: Vec<Component>,
    /// For g_{-j}, j ≥ 2: element t = Σ κ [e_a, b_c] with b_c ∈ g_{-(j-1)}.
    generation: BTreeMap<(i32, usize), Vec<(usize, usize, u32)>>,
    /// E_b = Σ_s frame_inv[b][s] · s over the flattened negative basis.
    frame_inv: MatFp,
    neg: Vec<(i32, usize)>,
    /// A_b = E_b − ∂_b.
    frame_tail: Vec<SVec>,
}

impl ProlongSeed {
    /// Validate a seed: homogeneity, independence, closure, generation by degree −1 and
    /// transitivity. `torus` holds lifted diagonal coefficients of grading operators.
    pub fn new(name: &str, ring: &Arc<DivPowRing>, weight: WeightVector, parts: BTreeMap<i32, Vec<(String, VectorField)>>, torus: Vec<Vec<i64>>) -> Result<Self, Error> {
        let p = ring.p();
        let m = ring.m();
        if weight.0.len() != m || torus.iter().any(|t| t.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, found: weight.0.len() });
        }
        if parts.keys().any(|&d| d > 0) || !parts.contains_key(&-1) {
            return Err(Error::BadInput("seed parts must lie in degrees ≤ 0 and include −1".into()));
        }
        let depth = -*parts.keys().next().unwrap();
        for d in -depth..=0 {
            if d < 0 && parts.get(&d).is_none_or(|v| v.is_empty()) {
                return Err(Error::BadInput(format!("seed component {d} is empty")));
            }
        }
        let all: Vec<&VectorField> = parts.values().flatten().map(|x| &x.1).collect();
        let (weights, mode) = glie::field_weights(all.iter().copied(), &torus, p)?;
        let mut wit = weights.into_iter();
        let mut comps = Vec::new();
        for (&d, list) in &parts {
            let mut ech = Echelon::new(p);
            let mut c = Component { degree: d, names: vec![], fields: vec![], weights: vec![] };
            for (nm, f) in list {
                if !crate::divpow::same_ring(f.ring(), ring) {
                    return Err(Error::IncompatibleAmbient);
                }
                match f.weighted_degree(&weight) {
                    Some(x) if x == d as i64 => {}
                    _ => return Err(Error::Invariant(format!("seed field {nm} is not homogeneous of degree {d}"))),
                }
                if !ech.insert(f.svec()) {
                    return Err(Error::Invariant(format!("seed field {nm} is linearly dependent")));
                }
                c.names.push(nm.clone());
                c.fields.push(f.clone());
                c.weights.push(wit.next().unwrap());
            }
            comps.push(c);
        }
        let by_deg: BTreeMap<i32, usize> = comps.iter().enumerate().map(|(i, c)| (c.degree, i)).collect();
        // closure of the non-positive part
        let echs: Vec<Echelon> = comps.iter().map(|c| c.echelon(p)).collect();
        for (ci, a) in comps.iter().enumerate() {
            for b in &comps[ci..] {
                for (i, x) in a.fields.iter().enumerate() {
                    for (j, y) in b.fields.iter().enumerate() {
                        let z = vfield::bracket_svec(ring, x.svec(), y.svec());
                        let ok = match by_deg.get(&(a.degree + b.degree)) {
                            Some(&t) => echs[t].contains(&z),
                            None => z.is_empty(),
                        };
                        if !ok {
                            let r = VectorField::from_svec(ring, z);
                            return Err(Error::NotClosed { left: a.names[i].clone(), right: b.names[j].clone(), residual: r.to_string() });
                        }
                    }
                }
            }
        }
        // generation of g_- by g_{-1}
        let minus1 = &comps[by_deg[&-1]];
        let mut generation = BTreeMap::new();
        for j in 2..=depth {
            let upper = &comps[by_deg[&-(j - 1)]];
            let cur = &comps[by_deg[&-j]];
            let mut ech = Echelon::new(p);
            let mut ids = Vec::new();
            for (a, e) in minus1.fields.iter().enumerate() {
                for (c, b) in upper.fields.iter().enumerate() {
                    ech.insert(&vfield::bracket_svec(ring, e.svec(), b.svec()));
                    ids.push((a, c));
                }
            }
            for (t, f) in cur.fields.iter().enumerate() {
                let combo = ech.express(f.svec()).ok_or_else(|| Error::NotGenerated(format!("{} is not in [g_-1, g_{}]", cur.names[t], -(j - 1))))?;
                generation.insert((-j, t), combo.into_iter().map(|(id, k)| (ids[id].0, ids[id].1, k)).collect());
            }
        }
        // frame
        let mut neg = Vec::new();
        let mut rows = Vec::new();
        for c in comps.iter().filter(|c| c.degree < 0) {
            for (t, f) in c.fields.iter().enumerate() {
                neg.push((c.degree, t));
                rows.push(f.constant_part());
            }
        }
        if neg.len() != m {
            return Err(Error::Invariant(format!("negative part has dim {} but there are {m} indeterminates", neg.len())));
        }
        let mat = MatFp::from_rows(p, m, &rows);
        let inv = mat.inverse().ok_or_else(|| Error::Invariant("negative part is not transitive".into()))?;
        let frame_inv = inv;
        let mut frame_tail = Vec::new();
        for b in 0..m {
            let mut acc = Acc::new(p);
            for (s, &(d, t)) in neg.iter().enumerate() {
                acc.add_vec(comps[by_deg[&d]].fields[t].svec(), frame_inv.get(b, s));
            }
            acc.add(key(MultiIndex::ZERO, b), p - 1);
            frame_tail.push(acc.into_svec());
        }
        Ok(ProlongSeed { name: name.to_string(), ring: ring.clone(), weight, torus, mode, parts: comps, generation, frame_inv, neg, frame_tail })
    }

    pub fn ring(&self) -> &Arc<DivPowRing> {
        &self.ring
    }

    pub fn weight(&self) -> &WeightVector {
        &self.weight
    }

    pub fn torus(&self) -> &[Vec<i64>] {
        &self.torus
    }

    pub fn weight_mode(&self) -> WeightMode {
        self.mode
    }

    pub fn depth(&self) -> i32 {
        -self.parts[0].degree
    }

    pub fn parts(&self) -> &[Component] {
        &self.parts
    }

    pub fn part(&self, d: i32) -> Option<&Component> {
        self.parts.iter().find(|c| c.degree == d)
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.parts.iter().map(|c| (c.degree, c.dim())).collect()
    }

    /// Replace the degree-zero part (validated again).
    pub fn with_g0(&self, g0: Vec<(String, VectorField)>) -> Result<Self, Error> {
        let mut parts: BTreeMap<i32, Vec<(String, VectorField)>> =
            self.parts.iter().filter(|c| c.degree < 0).map(|c| (c.degree, c.names.iter().cloned().zip(c.fields.iter().cloned()).collect())).collect();
        if !g0.is_empty() {
            parts.insert(0, g0);
        }
        ProlongSeed::new(&self.name, &self.ring, self.weight.clone(), parts, self.torus.clone())
    }

    fn key_weight(&self, k: u64) -> Vec<i64> {
        let w = vfield::field_weight(k, &self.torus);
        self.normalize(w)
    }

    fn normalize(&self, w: Vec<i64>) -> Vec<i64> {
        match self.mode {
            WeightMode::Integer => w,
            WeightMode::ModP => w.into_iter().map(|x| x.rem_euclid(self.ring.p() as i64)).collect(),
        }
    }

    fn minus1(&self) -> &Component {
        self.part(-1).unwrap()
    }

    /// Brackets [X, t] for all t ∈ g_-, given the values [X, e_a] on g_{-1}.
    fn propagate(&self, y1: &[SVec]) -> BTreeMap<(i32, usize), SVec> {
        let p = self.ring.p();
        let mut out: BTreeMap<(i32, usize), SVec> = BTreeMap::new();
        for (a, y) in y1.iter().enumerate() {
            out.insert((-1, a), y.clone());
        }
        let e = &self.minus1().fields;
        for j in 2..=self.depth() {
            let upper = self.part(-(j - 1)).unwrap();
            for t in 0..self.part(-j).unwrap().dim() {
                let mut acc = Acc::new(p);
                for &(a, c, k) in &self.generation[&(-j, t)] {
                    let ya = &out[&(-1, a)];
                    if !ya.is_empty() {
                        acc.add_vec(&vfield::bracket_svec(&self.ring, ya, upper.fields[c].svec()), k);
                    }
                    let yc = &out[&(-(j - 1), c)];
                    if !yc.is_empty() {
                        acc.add_vec(&vfield::bracket_svec(&self.ring, e[a].svec(), yc), k);
                    }
                }
                out.insert((-j, t), acc.into_svec());
            }
        }
        out
    }

    /// The unique field X without terms of standard degree 0 whose brackets with the
    /// frame are the given values, read off coordinate by coordinate. Consistency is
    /// not checked here.
    fn integrate(&self, y: &BTreeMap<(i32, usize), SVec>) -> SVec {
        let ring = &*self.ring;
        let p = ring.p();
        let m = ring.m();
        let top: usize = (0..m).map(|i| ring.max_exponent(i) as usize).sum();
        // acc[b][s]: standard-degree-s part of [∂_b, X]
        let mut acc: Vec<Vec<FxHashMap<u64, u32>>> = vec![vec![FxHashMap::default(); top + 1]; m];
        let push = |bucket: &mut Vec<FxHashMap<u64, u32>>, v: &[(u64, u32)], c: u32| {
            for &(k, x) in v {
                let s = key_mono(k).degree() as usize;
                let e = bucket[s].entry(k).or_insert(0);
                *e = ffla::add(*e, ffla::mul(x, c, p), p);
            }
        };
        for b in 0..m {
            for (s, &nk) in self.neg.iter().enumerate() {
                let c = self.frame_inv.get(b, s);
                if c != 0 {
                    push(&mut acc[b], &y[&nk], p - c);
                }
            }
        }
        let mut total = Acc::new(p);
        for s in 1..=top {
            let mut xs = Acc::new(p);
            for (b, bucket) in acc.iter().enumerate() {
                for (&k, &c) in &bucket[s - 1] {
                    if c == 0 {
                        continue;
                    }
                    let r0 = key_mono(k);
                    if r0.get(b) >= ring.max_exponent(b) || (0..b).any(|i| r0.get(i) != 0) {
                        continue;
                    }
                    xs.add(key(r0.with(b, r0.get(b) + 1), key_coord(k)), c);
                }
            }
            if xs.is_empty() {
                continue;
            }
            let xs = xs.into_svec();
            for b in 0..m {
                if !self.frame_tail[b].is_empty() {
                    let z = vfield::bracket_svec(ring, &xs, &self.frame_tail[b]);
                    push(&mut acc[b], &z, 1);
                }
            }
            total.add_vec(&xs, 1);
        }
        total.into_svec()
    }
}

/// Why a complete prolong stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StopReason {
    ZeroComponent(i32),
    DegreeCap(i32),
}

/// Random maximality check of one degree.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub degree: i32,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct ProlongResult {
    pub seed: ProlongSeed,
    pub components: Vec<Component>,
    pub stop: StopReason,
    pub certificates: Vec<Certificate>,
    pub algebra: GradedAlgebra,
}

impl ProlongResult {
    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.components.iter().map(|c| (c.degree, c.dim())).collect()
    }

    pub fn dim(&self) -> usize {
        self.components.iter().map(|c| c.dim()).sum()
    }

    pub fn top_degree(&self) -> i32 {
        self.components.iter().rev().find(|c| c.dim() > 0).map_or(0, |c| c.degree)
    }

    pub fn component(&self, d: i32) -> Option<&Component> {
        self.components.iter().find(|c| c.degree == d)
    }

    /// Field realizing the algebra basis vector `i`.
    pub fn field(&self, i: usize) -> &VectorField {
        let mut i = i;
        for c in &self.components {
            if i < c.dim() {
                return &c.fields[i];
            }
            i -= c.dim();
        }
        panic!("basis index out of range")
    }

    /// Field of an algebra vector given in coordinates.
    pub fn realize(&self, v: &[u32]) -> VectorField {
        let p = self.seed.ring.p();
        let mut acc = Acc::new(p);
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                acc.add_vec(self.field(i).svec(), c);
            }
        }
        VectorField::from_svec(&self.seed.ring, acc.into_svec())
    }

    /// Coordinates of a homogeneous field in the algebra basis, if it lies in the span.
    pub fn coordinates(&self, f: &VectorField) -> Option<Vec<u32>> {
        let n = self.algebra.dim();
        if f.is_zero() {
            return Some(vec![0; n]);
        }
        let d = f.weighted_degree(&self.seed.weight)? as i32;
        let mut offset = 0;
        for c in &self.components {
            if c.degree == d {
                let combo = c.echelon(self.seed.ring.p()).express(f.svec())?;
                let mut v = vec![0u32; n];
                for (t, x) in combo {
                    v[offset + t] = x;
                }
                return Some(v);
            }
            offset += c.dim();
        }
        None
    }

    /// Recheck [x, y] against the structure constants for the given basis pairs.
    pub fn verify_constants(&self, pairs: &[(usize, usize)]) -> Result<(), Error> {
        let n = self.algebra.dim();
        for &(i, j) in pairs {
            let z = vfield::bracket_svec(&self.seed.ring, self.field(i).svec(), self.field(j).svec());
            let mut v = vec![0u32; n];
            v[i] = 1;
            let w = self.algebra.bracket_with_basis(&v, j);
            if self.realize(&w).svec() != &z {
                let l = self.algebra.labels();
                return Err(Error::Invariant(format!("structure constant mismatch on [{}, {}]", l[i].name, l[j].name)));
            }
        }
        Ok(())
    }
}

fn canonical_block(p: u32, fields: Vec<SVec>) -> Vec<SVec> {
    let mut e = Echelon::new(p);
    for f in &fields {
        e.insert(f);
    }
    let mut rows: Vec<(u64, SVec)> = e.pivot_keys().zip(e.basis().cloned()).collect();
    rows.sort_by(|a, b| vfield::canonical_cmp(a.0, b.0));
    rows.into_iter().map(|r| r.1).collect()
}

fn assemble(seed: &ProlongSeed, k: i32, blocks: Vec<(Vec<i64>, Vec<SVec>)>) -> Component {
    let mut c = Component { degree: k, names: vec![], fields: vec![], weights: vec![] };
    for (w, fs) in blocks {
        for f in fs {
            c.names.push(format!("g{k}_{}", c.fields.len()));
            c.fields.push(VectorField::from_svec(&seed.ring, f));
            c.weights.push(w.clone());
        }
    }
    c
}

/// Degree-k component of the prolong given degree k−1 (k ≥ 0; for k = 0 this is the
/// maximal degree-zero part compatible with g_-).
pub fn prolong_step(seed: &ProlongSeed, prev: &Component) -> Result<Component, Error> {
    let p = seed.ring.p();
    let k = prev.degree + 1;
    if k < 0 {
        return Err(Error::BadInput("prolong_step needs k ≥ 0".into()));
    }
    let e = seed.minus1();
    let na = e.dim();
    let mut cands: BTreeMap<Vec<i64>, Vec<(usize, usize)>> = BTreeMap::new();
    for a in 0..na {
        for (t, w) in prev.weights.iter().enumerate() {
            let mu: Vec<i64> = w.iter().zip(&e.weights[a]).map(|(x, y)| x - y).collect();
            cands.entry(seed.normalize(mu)).or_default().push((a, t));
        }
    }
    let blocks: Vec<(Vec<i64>, Vec<(usize, usize)>)> = cands.into_iter().collect();
    let solved: Vec<(Vec<i64>, Vec<SVec>)> = blocks
        .into_par_iter()
        .map(|(mu, lams)| {
            let mut xs = Vec::with_capacity(lams.len());
            let mut rowmap: FxHashMap<(usize, u64), u64> = FxHashMap::default();
            let mut ech = Echelon::new(p);
            let mut kernel: Vec<Vec<(usize, u32)>> = Vec::new();
            for (li, &(a, t)) in lams.iter().enumerate() {
                let mut y1 = vec![SVec::new(); na];
                y1[a] = prev.fields[t].svec().clone();
                let y = seed.propagate(&y1);
                let x = seed.integrate(&y);
                let mut obs = Vec::new();
                for (b, eb) in e.fields.iter().enumerate() {
                    let z = vfield::bracket_svec(&seed.ring, &x, eb.svec());
                    let d = sparse::lin(1, &z, p - 1, &y1[b], p);
                    for (kk, c) in d {
                        let n = rowmap.len() as u64;
                        let r = *rowmap.entry((b, kk)).or_insert(n);
                        obs.push((r, c));
                    }
                }
                obs.sort_unstable();
                let (res, combo) = ech.reduce_tracked(&obs);
                if res.is_empty() {
                    let mut v = vec![(li, 1)];
                    v.extend(combo.into_iter().map(|(g, c)| (g, p - c)));
                    kernel.push(v);
                }
                ech.insert(&obs);
                xs.push(x);
            }
            let fields = kernel
                .into_iter()
                .map(|v| {
                    let mut acc = Acc::new(p);
                    for (li, c) in v {
                        acc.add_vec(&xs[li], c);
                    }
                    acc.into_svec()
                })
                .collect();
            (mu, canonical_block(p, fields))
        })
        .collect();
    Ok(assemble(seed, k, solved))
}

/// All fields u^r ∂_i of degree k, grouped by torus weight.
fn ambient_blocks(seed: &ProlongSeed, k: i32) -> BTreeMap<Vec<i64>, Vec<u64>> {
    let space = vfield::graded_component(&seed.ring, &seed.weight, k as i64);
    let mut out: BTreeMap<Vec<i64>, Vec<u64>> = BTreeMap::new();
    for f in &space.basis {
        let kk = f.svec()[0].0;
        out.entry(seed.key_weight(kk)).or_default().push(kk);
    }
    out
}

/// Same component by brute-force kernel over the ambient weight blocks.
pub fn prolong_step_direct(seed: &ProlongSeed, prev: &Component) -> Result<Component, Error> {
    let p = seed.ring.p();
    let k = prev.degree + 1;
    let pe = prev.echelon(p);
    let e = seed.minus1();
    let blocks: Vec<(Vec<i64>, Vec<u64>)> = ambient_blocks(seed, k).into_iter().collect();
    let solved: Vec<(Vec<i64>, Vec<SVec>)> = blocks
        .into_par_iter()
        .map(|(mu, keys)| {
            let mut rowmap: FxHashMap<(usize, u64), usize> = FxHashMap::default();
            let mut cols: Vec<Vec<(usize, u32)>> = Vec::new();
            for &kk in &keys {
                let mut col = Vec::new();
                for (b, eb) in e.fields.iter().enumerate() {
                    let z = pe.reduce(&vfield::bracket_svec(&seed.ring, &[(kk, 1)], eb.svec()));
                    for (r, c) in z {
                        let n = rowmap.len();
                        col.push((*rowmap.entry((b, r)).or_insert(n), c));
                    }
                }
                cols.push(col);
            }
            let mut m = MatFp::zeros(p, rowmap.len(), keys.len());
            for (j, col) in cols.iter().enumerate() {
                for &(r, c) in col {
                    m.set(r, j, c);
                }
            }
            let fields = m.kernel_basis().into_iter().map(|v| keys.iter().zip(v).filter(|x| x.1 != 0).map(|(&kk, c)| (kk, c)).collect::<SVec>()).map(|mut v| {
                v.sort_unstable();
                v
            });
            (mu, canonical_block(p, fields.collect()))
        })
        .filter(|x| !x.1.is_empty())
        .collect();
    Ok(assemble(seed, k, solved))
}

/// Random check that no ambient field outside g_k satisfies the defining condition.
pub fn certify(seed: &ProlongSeed, prev: &Component, comp: &Component, samples: usize, rng_seed: u64) -> Certificate {
    let p = seed.ring.p();
    let k = comp.degree;
    let pe = prev.echelon(p);
    let ce = comp.echelon(p);
    let space = vfield::graded_component(&seed.ring, &seed.weight, k as i64);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed ^ (k as u64).wrapping_mul(0x9e37_79b9));
    let e = seed.minus1();
    let mut passed = true;
    for s in 0..samples {
        let mut acc = Acc::new(p);
        for f in &comp.fields {
            acc.add_vec(f.svec(), rng.gen_range(0..p));
        }
        if s % 4 != 0 && !space.basis.is_empty() {
            let r = &space.basis[rng.gen_range(0..space.basis.len())];
            acc.add_vec(r.svec(), rng.gen_range(1..p));
        }
        let x = acc.into_svec();
        let cond = e.fields.iter().all(|eb| pe.contains(&vfield::bracket_svec(&seed.ring, &x, eb.svec())));
        if cond != ce.contains(&x) {
            passed = false;
            break;
        }
    }
    Certificate { degree: k, samples, passed }
}

/// Options for [`complete_prolong`].
#[derive(Clone, Debug)]
pub struct ProlongOptions {
    pub cap: i32,
    pub certificate_samples: usize,
    pub name: Option<String>,
}

impl Default for ProlongOptions {
    fn default() -> Self {
        ProlongOptions { cap: DEFAULT_CAP, certificate_samples: 100, name: None }
    }
}

/// Iterate [`prolong_step`] until a zero component or the cap. A capped run still
/// returns the partial result with `StopReason::DegreeCap`.
pub fn complete_prolong(seed: &ProlongSeed, opts: &ProlongOptions) -> Result<ProlongResult, Error> {
    let mut comps: Vec<Component> = seed.parts.clone();
    if comps.last().unwrap().degree < 0 {
        comps.push(Component { degree: 0, names: vec![], fields: vec![], weights: vec![] });
    }
    let mut certificates = Vec::new();
    let stop = loop {
        let prev = comps.last().unwrap();
        let k = prev.degree + 1;
        if k > opts.cap {
            break StopReason::DegreeCap(opts.cap);
        }
        let c = prolong_step(seed, prev)?;
        if opts.certificate_samples > 0 {
            certificates.push(certify(seed, prev, &c, opts.certificate_samples, 0xce47));
        }
        if c.dim() == 0 {
            break StopReason::ZeroComponent(k);
        }
        comps.push(c);
    };
    let name = opts.name.clone().unwrap_or_else(|| seed.name.clone());
    let algebra = algebra_from_components(&name, seed, &comps)?;
    Ok(ProlongResult { seed: seed.clone(), components: comps, stop, certificates, algebra })
}

/// Structure constants of a graded span of fields known to be closed; brackets landing
/// outside the computed degree range are taken to be zero.
fn algebra_from_components(name: &str, seed: &ProlongSeed, comps: &[Component]) -> Result<GradedAlgebra, Error> {
    let p = seed.ring.p();
    let mut labels = Vec::new();
    let mut fields: Vec<&VectorField> = Vec::new();
    let mut offset = BTreeMap::new();
    for c in comps {
        offset.insert(c.degree, labels.len());
        for i in 0..c.dim() {
            labels.push(BasisLabel { name: c.names[i].clone(), degree: c.degree, weight: c.weights[i].clone() });
            fields.push(&c.fields[i]);
        }
    }
    let echs: BTreeMap<i32, Echelon> = comps.par_iter().map(|c| (c.degree, c.echelon(p))).collect();
    let n = labels.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| echs.contains_key(&(labels[i].degree + labels[j].degree))).collect();
    let results: Vec<Result<Vec<(usize, usize, usize, u32)>, Error>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let d = labels[i].degree + labels[j].degree;
            let z = vfield::bracket_svec(&seed.ring, fields[i].svec(), fields[j].svec());
            let combo = echs[&d].express(&z).ok_or_else(|| Error::NotClosed {
                left: labels[i].name.clone(),
                right: labels[j].name.clone(),
                residual: VectorField::from_svec(&seed.ring, echs[&d].reduce(&z)).to_string(),
            })?;
            Ok(combo.into_iter().map(|(t, c)| (i, j, offset[&d] + t, c)).collect())
        })
        .collect();
    let mut consts = Vec::new();
    for r in results {
        consts.extend(r?);
    }
    let torus: Vec<usize> =
        offset.get(&0).map_or(vec![], |&o| (0..comps.iter().find(|c| c.degree == 0).unwrap().dim()).filter(|&t| fields[o + t].diagonal().is_some()).map(|t| o + t).collect());
    GradedAlgebra::from_constants(name, p, labels, consts, torus, seed.mode)
}

/// Result of a partial prolong.
#[derive(Clone, Debug)]
pub struct PartialProlong {
    pub algebra: GradedAlgebra,
    /// Whether [g_{-1}, h_1] is all of g_0 (otherwise it is a proper subspace).
    pub fills_g0: bool,
}

/// Partial prolong: h_i = g_i for i ≤ 0, h_1 given, h_i = {D ∈ g_i : [D, g_{-1}] ⊆ h_{i-1}}.
/// `h1` holds coordinates in `ambient`, which must be graded with g_{-1} ≠ 0.
pub fn partial_prolong(ambient: &GradedAlgebra, name: &str, h1: &[Vec<u32>]) -> Result<PartialProlong, Error> {
    let p = ambient.p();
    let n = ambient.dim();
    let labels = ambient.labels();
    let g1 = ambient.component(1);
    let minus1 = ambient.component(-1);
    for v in h1 {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        if v.iter().enumerate().any(|(i, &c)| c != 0 && labels[i].degree != 1) {
            return Err(Error::BadInput("h1 is not a subspace of g_1".into()));
        }
    }
    // split into weight blocks; the span must be torus-stable
    let h1span = Subspace::span(p, n, h1)?;
    let mut split = Subspace::zero(p, n);
    for v in h1span.basis() {
        let mut by_w: BTreeMap<&Vec<i64>, Vec<u32>> = BTreeMap::new();
        for &i in &g1 {
            if v[i] != 0 {
                by_w.entry(&labels[i].weight).or_insert_with(|| vec![0; n])[i] = v[i];
            }
        }
        for (_, u) in by_w {
            split.insert(&u);
        }
    }
    if split.dim() != h1span.dim() {
        return Err(Error::BadInput("h1 is not spanned by weight vectors".into()));
    }
    let mut h = split;
    let mut vectors: Vec<Vec<u32>> = (0..n).filter(|&i| labels[i].degree <= 0).map(|i| ambient.unit(i)).collect();
    let mut fill = Subspace::zero(p, n);
    for v in h.basis() {
        for &a in &minus1 {
            fill.insert(&ambient.bracket_with_basis(v, a));
        }
    }
    let fills_g0 = fill.dim() == ambient.component(0).len();
    let mut deg = 1;
    while h.dim() > 0 {
        vectors.extend(h.basis().iter().cloned());
        deg += 1;
        let gi = ambient.component(deg);
        let mut blocks: BTreeMap<&Vec<i64>, Vec<usize>> = BTreeMap::new();
        for &i in &gi {
            blocks.entry(&labels[i].weight).or_default().push(i);
        }
        let mut next = Subspace::zero(p, n);
        for (_, idx) in blocks {
            let cols: Vec<Vec<u32>> = idx.iter().map(|&i| minus1.iter().flat_map(|&a| h.reduce(&ambient.bracket_with_basis(&ambient.unit(i), a))).collect()).collect();
            let mut m = MatFp::zeros(p, minus1.len() * n, idx.len());
            for (j, c) in cols.iter().enumerate() {
                for (r, &x) in c.iter().enumerate() {
                    if x != 0 {
                        m.set(r, j, x);
                    }
                }
            }
            for kv in m.kernel_basis() {
                let mut v = vec![0u32; n];
                for (t, &c) in kv.iter().enumerate() {
                    v[idx[t]] = c;
                }
                next.insert(&v);
            }
        }
        h = next;
    }
    let algebra = ambient.subalgebra(name, &vectors)?;
    Ok(PartialProlong { algebra, fills_g0 })
}

/// Closure of `generators` (coordinates in `ambient`) under bracket.
pub fn subalgebra_generated_by(ambient: &GradedAlgebra, name: &str, generators: &[Vec<u32>]) -> Result<GradedAlgebra, Error> {
    ambient.subalgebra_generated_by(name, generators)
}

/// Left-invariant fields of a graded nilpotent Lie algebra in coordinates of the second
/// kind, g = exp(u_1 x_1)···exp(u_m x_m) with exp(u x) = Σ u^(k) x^k. Basis vector i has
/// degree −w_i (w nondecreasing); `consts` lists [x_i, x_j] = c·x_k for i < j. The
/// returned fields X_i = ∂_i + … satisfy [X_i, X_j] = Σ c X_k.
pub fn nilpotent_realization(ring: &Arc<DivPowRing>, w: &WeightVector, consts: &[(usize, usize, usize, i64)]) -> Result<Vec<VectorField>, Error> {
    use crate::divpow::DividedPoly;
    let m = ring.m();
    let p = ring.p();
    if w.0.len() != m || w.0.windows(2).any(|x| x[0] > x[1]) || w.0.iter().any(|&x| x < 1) {
        return Err(Error::BadInput("weights must be positive and nondecreasing".into()));
    }
    let mut ad = vec![vec![Vec::<(usize, u32)>::new(); m]; m];
    for &(i, j, k, c) in consts {
        if i >= m || j >= m || k >= m || w.0[k] != w.0[i] + w.0[j] {
            return Err(Error::BadInput(format!("bad constant [{i},{j}] -> {k}")));
        }
        let c = ffla::reduce(c, p);
        ad[i][j].push((k, c));
        ad[j][i].push((k, ffla::neg(c, p)));
    }
    // (ad x_s)^k x_j as dense coordinate vectors, k ≥ 1
    let powers = |s: usize, j: usize| -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; m];
        cur[j] = 1;
        loop {
            let mut next = vec![0u32; m];
            for (l, &c) in cur.iter().enumerate() {
                if c != 0 {
                    for &(k, d) in &ad[s][l] {
                        next[k] = ffla::add(next[k], ffla::mul(c, d, p), p);
                    }
                }
            }
            if next.iter().all(|&x| x == 0) {
                return out;
            }
            out.push(next.clone());
            cur = next;
        }
    };
    let upow = |s: usize, k: usize| -> Result<DividedPoly, Error> {
        DividedPoly::monomial(ring, MultiIndex::unit(s).with(s, k as u32), 1).map_err(|_| Error::Invariant(format!("realization needs u{}^({k}) beyond the heights", s + 1)))
    };
    let mut fields = Vec::new();
    for i in 0..m {
        let mut out: Vec<DividedPoly> = vec![DividedPoly::zero(ring); m];
        // work items: (slot, index, coefficient); slot s means right after factor s
        let mut work: Vec<(usize, usize, DividedPoly)> = vec![(m - 1, i, DividedPoly::one(ring))];
        while let Some((s, j, f)) = work.pop() {
            if f.is_zero() {
                continue;
            }
            if j == s {
                out[j] = out[j].add(&f)?;
            } else if j > s {
                let t = s + 1;
                work.push((t, j, f.clone()));
                for (k, v) in powers(t, j).into_iter().enumerate() {
                    let sign = if k % 2 == 0 { p - 1 } else { 1 };
                    let g = f.mul(&upow(t, k + 1)?)?.scale(sign);
                    for (l, &c) in v.iter().enumerate() {
                        if c != 0 {
                            work.push((t, l, g.scale(c)));
                        }
                    }
                }
            } else {
                work.push((s - 1, j, f.clone()));
                for (k, v) in powers(s, j).into_iter().enumerate() {
                    // −(−1)^(k+1) u_s^(k+1) ad^(k+1)
                    let sign = if k % 2 == 0 { 1 } else { p - 1 };
                    let g = f.mul(&upow(s, k + 1)?)?.scale(sign);
                    for (l, &c) in v.iter().enumerate() {
                        if c != 0 {
                            work.push((s, l, g.scale(c)));
                        }
                    }
                }
            }
        }
        fields.push(VectorField::from_coeffs(&out)?);
    }
    for &(i, j, k, c) in consts {
        let lhs = fields[i].bracket(&fields[j])?;
        if lhs != fields[k].scale(ffla::reduce(c, p)) {
            return Err(Error::Invariant(format!("realization fails on [x{}, x{}]", i + 1, j + 1)));
        }
    }
    Ok(fields)
}

/// Outcome of raising one height.
#[derive(Clone, Debug)]
pub struct HeightTrial {
    pub heights: Heights,
    pub dims: BTreeMap<i32, usize>,
    pub grew: bool,
}

/// Raise each height by one in turn and compare per-degree dims up to `cap` against
/// the base heights.
pub fn heights_experiment(build: impl Fn(&Heights) -> Result<ProlongSeed, Error>, base: &Heights, cap: i32) -> Result<(BTreeMap<i32, usize>, Vec<HeightTrial>), Error> {
    let opts = ProlongOptions { cap, certificate_samples: 0, name: None };
    let base_dims = complete_prolong(&build(base)?, &opts)?.dims();
    let mut trials = Vec::new();
    for i in 0..base.0.len() {
        let mut h = base.clone();
        h.0[i] += 1;
        let dims = complete_prolong(&build(&h)?, &opts)?.dims();
        let grew = dims != base_dims;
        trials.push(HeightTrial { heights: h, dims, grew });
    }
    Ok((base_dims, trials))
}
