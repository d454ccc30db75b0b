//! Sparse vectors over F_p keyed by packed u64 coordinates, and an incremental
//! reduced echelon basis that can express vectors in terms of inserted generators.

use rustc_hash::FxHashMap;

use crate::ffla;

/// Sparse vector sorted by key, no zero entries.
pub type SVec = Vec<(u64, u32)>;

/// Hash accumulator for building sparse vectors.
#[derive(Clone, Debug)]
pub struct Acc {
    p: u32,
    map: FxHashMap<u64, u32>,
}

impl Acc {
    pub fn new(p: u32) -> Self {
        Acc { p, map: FxHashMap::default() }
    }

    #[inline]
    pub fn add(&mut self, k: u64, c: u32) {
        if c == 0 {
            return;
        }
        let p = self.p;
        let e = self.map.entry(k).or_insert(0);
        *e = ffla::add(*e, c, p);
    }

    pub fn add_vec(&mut self, v: &[(u64, u32)], c: u32) {
        if c == 0 {
            return;
        }
        for &(k, x) in v {
            self.add(k, ffla::mul(x, c, self.p));
        }
    }

    pub fn get(&self, k: u64) -> u32 {
        self.map.get(&k).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.map.values().all(|&c| c == 0)
    }

    pub fn map(&self) -> &FxHashMap<u64, u32> {
        &self.map
    }

    pub fn into_svec(self) -> SVec {
        let mut v: SVec = self.map.into_iter().filter(|&(_, c)| c != 0).collect();
        v.sort_unstable_by_key(|x| x.0);
        v
    }
}

/// y ← a·x + b·y for sorted sparse vectors.
pub fn lin(a: u32, x: &[(u64, u32)], b: u32, y: &[(u64, u32)], p: u32) -> SVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j == y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i == x.len() || (j < y.len() && y[j].0 < x[i].0);
        let (k, c) = if take_x {
            i += 1;
            (x[i - 1].0, ffla::mul(a, x[i - 1].1, p))
        } else if take_y {
            j += 1;
            (y[j - 1].0, ffla::mul(b, y[j - 1].1, p))
        } else {
            i += 1;
            j += 1;
            (x[i - 1].0, ffla::add(ffla::mul(a, x[i - 1].1, p), ffla::mul(b, y[j - 1].1, p), p))
        };
        if c != 0 {
            out.push((k, c));
        }
    }
    out
}

pub fn get(v: &[(u64, u32)], k: u64) -> u32 {
    v.binary_search_by_key(&k, |x| x.0).map_or(0, |i| v[i].1)
}

pub fn scale(v: &[(u64, u32)], c: u32, p: u32) -> SVec {
    if c == 0 {
        return Vec::new();
    }
    v.iter().map(|&(k, x)| (k, ffla::mul(x, c, p))).collect()
}

/// Σ c_i v_i.
pub fn combine(p: u32, coeffs: &[u32], vecs: &[&SVec]) -> SVec {
    let mut acc = Acc::new(p);
    for (&c, v) in coeffs.iter().zip(vecs) {
        acc.add_vec(v, c);
    }
    acc.into_svec()
}

#[derive(Clone, Debug)]
struct Row {
    pivot: u64,
    vec: SVec,
    combo: Vec<(usize, u32)>,
}

/// Reduced echelon basis of a span of sparse vectors; rows are zero at every other pivot.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u32,
    rows: Vec<Row>,
    pivots: FxHashMap<u64, usize>,
    inserted: usize,
}

impl Echelon {
    pub fn new(p: u32) -> Self {
        Echelon { p, rows: Vec::new(), pivots: FxHashMap::default(), inserted: 0 }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduce modulo the span, returning the residual and the combination of
    /// generators subtracted.
    pub fn reduce_tracked(&self, v: &[(u64, u32)]) -> (SVec, Vec<(usize, u32)>) {
        let p = self.p;
        let hits: Vec<(usize, u32)> = v.iter().filter_map(|&(k, c)| self.pivots.get(&k).map(|&r| (r, c))).collect();
        if hits.is_empty() {
            return (v.to_vec(), Vec::new());
        }
        let mut acc = Acc::new(p);
        acc.add_vec(v, 1);
        let mut combo = Acc::new(p);
        for &(r, c) in &hits {
            acc.add_vec(&self.rows[r].vec, p - c);
            for &(g, x) in &self.rows[r].combo {
                combo.add(g as u64, ffla::mul(x, c, p));
            }
        }
        let combo = combo.into_svec().into_iter().map(|(g, x)| (g as usize, x)).collect();
        (acc.into_svec(), combo)
    }

    pub fn reduce(&self, v: &[(u64, u32)]) -> SVec {
        self.reduce_tracked(v).0
    }

    pub fn contains(&self, v: &[(u64, u32)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Coefficients of `v` over the inserted generators (only independent ones get
    /// nonzero weight), or `None` if `v` is outside the span.
    pub fn express(&self, v: &[(u64, u32)]) -> Option<Vec<(usize, u32)>> {
        let (res, combo) = self.reduce_tracked(v);
        res.is_empty().then_some(combo)
    }

    /// Insert a generator; returns true if it was independent. Generator indices count
    /// every call, dependent or not.
    pub fn insert(&mut self, v: &[(u64, u32)]) -> bool {
        let p = self.p;
        let id = self.inserted;
        self.inserted += 1;
        let (res, combo) = self.reduce_tracked(v);
        if res.is_empty() {
            return false;
        }
        // residual = v − Σ combo; track residual as a combination of generators
        let mut track = Acc::new(p);
        track.add(id as u64, 1);
        for &(g, x) in &combo {
            track.add(g as u64, p - x);
        }
        let (pivot, pc) = res[0];
        let ic = ffla::inv(pc, p);
        let vec = scale(&res, ic, p);
        let combo: Vec<(usize, u32)> = track.into_svec().into_iter().map(|(g, x)| (g as usize, ffla::mul(x, ic, p))).collect();
        for r in self.rows.iter_mut() {
            let f = get(&r.vec, pivot);
            if f != 0 {
                r.vec = lin(p - f, &vec, 1, &r.vec, p);
                let mut t = Acc::new(p);
                for &(g, x) in &r.combo {
                    t.add(g as u64, x);
                }
                for &(g, x) in &combo {
                    t.add(g as u64, ffla::mul(p - f, x, p));
                }
                r.combo = t.into_svec().into_iter().map(|(g, x)| (g as usize, x)).collect();
            }
        }
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(Row { pivot, vec, combo });
        true
    }

    pub fn basis(&self) -> impl Iterator<Item = &SVec> {
        self.rows.iter().map(|r| &r.vec)
    }

    pub fn pivot_keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.rows.iter().map(|r| r.pivot)
    }
}
