//! Vector fields W(m;N) = der O(m;N): bracket, divergence, graded components.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::divpow::{same_ring, DivPowRing, DividedPoly, MultiIndex, WeightVector};
use crate::ffla;
use crate::sparse::{self, Acc, SVec};
use crate::Error;

const COORD_SHIFT: u32 = 60;
const MONO_MASK: u64 = (1 << COORD_SHIFT) - 1;

/// Packed key of the basis field u^r ∂_i.
#[inline]
pub fn key(r: MultiIndex, i: usize) -> u64 {
    r.raw() | ((i as u64) << COORD_SHIFT)
}

#[inline]
pub fn key_mono(k: u64) -> MultiIndex {
    MultiIndex::from_raw(k & MONO_MASK)
}

#[inline]
pub fn key_coord(k: u64) -> usize {
    (k >> COORD_SHIFT) as usize
}

/// Canonical order of basis fields: graded lexicographic on the monomial, then coordinate.
pub fn canonical_cmp(a: u64, b: u64) -> Ordering {
    key_mono(a).cmp(&key_mono(b)).then(key_coord(a).cmp(&key_coord(b)))
}

/// D = Σ f_i ∂_i.
#[derive(Clone, Debug)]
pub struct VectorField {
    ring: Arc<DivPowRing>,
    terms: SVec,
}

impl PartialEq for VectorField {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for VectorField {}

impl VectorField {
    pub fn zero(ring: &Arc<DivPowRing>) -> Self {
        VectorField { ring: ring.clone(), terms: Vec::new() }
    }

    pub(crate) fn from_svec(ring: &Arc<DivPowRing>, terms: SVec) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        VectorField { ring: ring.clone(), terms }
    }

    /// Build from (monomial, coordinate, coefficient) triples.
    pub fn from_terms(ring: &Arc<DivPowRing>, terms: &[(MultiIndex, usize, i64)]) -> Result<Self, Error> {
        let mut acc = Acc::new(ring.p());
        for &(r, i, c) in terms {
            if i >= ring.m() || !ring.admissible(r) {
                return Err(Error::BadInput(format!("term {} d{} outside W", ring.render_mono(r), i + 1)));
            }
            acc.add(key(r, i), ffla::reduce(c, ring.p()));
        }
        Ok(Self::from_svec(ring, acc.into_svec()))
    }

    /// The constant field ∂_i (0-based).
    pub fn partial(ring: &Arc<DivPowRing>, i: usize) -> Self {
        Self::from_svec(ring, vec![(key(MultiIndex::ZERO, i), 1)])
    }

    pub fn from_coeffs(coeffs: &[DividedPoly]) -> Result<Self, Error> {
        let ring = coeffs.first().ok_or_else(|| Error::BadInput("empty coefficient list".into()))?.ring().clone();
        if coeffs.len() != ring.m() || coeffs.iter().any(|f| !same_ring(f.ring(), &ring)) {
            return Err(Error::IncompatibleAmbient);
        }
        let mut acc = Acc::new(ring.p());
        for (i, f) in coeffs.iter().enumerate() {
            for &(r, c) in f.terms() {
                acc.add(key(r, i), c);
            }
        }
        Ok(Self::from_svec(&ring, acc.into_svec()))
    }

    pub fn ring(&self) -> &Arc<DivPowRing> {
        &self.ring
    }

    pub fn p(&self) -> u32 {
        self.ring.p()
    }

    pub fn svec(&self) -> &SVec {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as (monomial, coordinate, coefficient) in canonical order.
    pub fn terms(&self) -> Vec<(MultiIndex, usize, u32)> {
        let mut t: Vec<(MultiIndex, usize, u32)> = self.terms.iter().map(|&(k, c)| (key_mono(k), key_coord(k), c)).collect();
        t.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        t
    }

    pub fn coeff(&self, i: usize) -> DividedPoly {
        let t = self.terms.iter().filter(|&&(k, _)| key_coord(k) == i).map(|&(k, c)| (key_mono(k), c)).collect();
        DividedPoly::from_terms(&self.ring, t)
    }

    fn compatible(&self, other: &Self) -> Result<(), Error> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::IncompatibleAmbient)
        }
    }

    pub fn lin(&self, a: u32, other: &Self, b: u32) -> Self {
        Self::from_svec(&self.ring, sparse::lin(a, &self.terms, b, &other.terms, self.p()))
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        self.compatible(other)?;
        Ok(self.lin(1, other, 1))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.compatible(other)?;
        Ok(self.lin(1, other, self.p() - 1))
    }

    pub fn scale(&self, c: u32) -> Self {
        Self::from_svec(&self.ring, sparse::scale(&self.terms, c % self.p(), self.p()))
    }

    pub fn bracket(&self, other: &Self) -> Result<Self, Error> {
        self.compatible(other)?;
        Ok(Self::from_svec(&self.ring, bracket_svec(&self.ring, &self.terms, &other.terms)))
    }

    /// D(f) = Σ f_i ∂_i f.
    pub fn apply(&self, f: &DividedPoly) -> Result<DividedPoly, Error> {
        if !same_ring(&self.ring, f.ring()) {
            return Err(Error::IncompatibleAmbient);
        }
        let p = self.p();
        let mut out = Vec::new();
        for &(k, c) in &self.terms {
            let (a, i) = (key_mono(k), key_coord(k));
            for &(b, d) in f.terms() {
                if let Some(b1) = b.dec(i) {
                    if let Some((r, x)) = self.ring.mono_mul(a, b1) {
                        out.push((r, ffla::mul(x, ffla::mul(c, d, p), p)));
                    }
                }
            }
        }
        Ok(DividedPoly::from_terms(&self.ring, out))
    }

    /// f · D.
    pub fn mul_function(&self, f: &DividedPoly) -> Result<Self, Error> {
        if !same_ring(&self.ring, f.ring()) {
            return Err(Error::IncompatibleAmbient);
        }
        let p = self.p();
        let mut acc = Acc::new(p);
        for &(k, c) in &self.terms {
            let (a, i) = (key_mono(k), key_coord(k));
            for &(b, d) in f.terms() {
                if let Some((r, x)) = self.ring.mono_mul(a, b) {
                    acc.add(key(r, i), ffla::mul(x, ffla::mul(c, d, p), p));
                }
            }
        }
        Ok(Self::from_svec(&self.ring, acc.into_svec()))
    }

    /// Div D = Σ ∂_i f_i.
    pub fn divergence(&self) -> DividedPoly {
        let t = self.terms.iter().filter_map(|&(k, c)| key_mono(k).dec(key_coord(k)).map(|r| (r, c))).collect();
        DividedPoly::from_terms(&self.ring, t)
    }

    /// Degree under deg(u^r ∂_i) = Σ r_j w_j − w_i; `None` if inhomogeneous or zero.
    pub fn weighted_degree(&self, w: &WeightVector) -> Option<i64> {
        let mut it = self.terms.iter().map(|&(k, _)| field_degree(k, &w.0));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Coefficients c with D = Σ c_i u_i ∂_i, if D has that diagonal form.
    pub fn diagonal(&self) -> Option<Vec<u32>> {
        let mut c = vec![0u32; self.ring.m()];
        for &(k, x) in &self.terms {
            let (r, i) = (key_mono(k), key_coord(k));
            if r != MultiIndex::unit(i) {
                return None;
            }
            c[i] = x;
        }
        Some(c)
    }

    /// Coefficients of the constant part Σ c_i ∂_i.
    pub fn constant_part(&self) -> Vec<u32> {
        let mut c = vec![0u32; self.ring.m()];
        for &(k, x) in &self.terms {
            if key_mono(k) == MultiIndex::ZERO {
                c[key_coord(k)] = x;
            }
        }
        c
    }
}

#[inline]
pub fn field_degree(k: u64, w: &[i64]) -> i64 {
    key_mono(k).weighted(w) - w[key_coord(k)]
}

/// Integer weight of u^r ∂_i under diagonal grading operators with lifted eigenvalues.
#[inline]
pub fn field_weight(k: u64, torus: &[Vec<i64>]) -> Vec<i64> {
    torus.iter().map(|c| field_degree(k, c)).collect()
}

/// Bracket of two sparse fields.
pub(crate) fn bracket_svec(ring: &DivPowRing, x: &[(u64, u32)], y: &[(u64, u32)]) -> SVec {
    let p = ring.p();
    let mut acc = Acc::new(p);
    for &(ka, c) in x {
        let (a, i) = (key_mono(ka), key_coord(ka));
        for &(kb, d) in y {
            let (b, j) = (key_mono(kb), key_coord(kb));
            let cd = ffla::mul(c, d, p);
            if let Some(b1) = b.dec(i) {
                if let Some((r, t)) = ring.mono_mul(a, b1) {
                    acc.add(key(r, j), ffla::mul(cd, t, p));
                }
            }
            if let Some(a1) = a.dec(j) {
                if let Some((r, t)) = ring.mono_mul(b, a1) {
                    acc.add(key(r, i), p - ffla::mul(cd, t, p));
                }
            }
        }
    }
    acc.into_svec()
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .into_iter()
            .map(|(r, i, c)| {
                let m = self.ring.render_mono(r);
                let body = if m == "1" { format!("d{}", i + 1) } else { format!("{m}*d{}", i + 1) };
                if c == 1 {
                    body
                } else {
                    format!("{c}*{body}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A homogeneous component with an explicit basis.
#[derive(Clone, Debug)]
pub struct GradedFieldSpace {
    pub weight: WeightVector,
    pub degree: i64,
    pub basis: Vec<VectorField>,
}

impl GradedFieldSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// All basis fields u^r ∂_i of weighted degree d.
pub fn graded_component(ring: &Arc<DivPowRing>, w: &WeightVector, d: i64) -> GradedFieldSpace {
    let mut keys = Vec::new();
    for i in 0..ring.m() {
        for r in ring.monomial_basis(w, d + w.0[i]) {
            keys.push(key(r, i));
        }
    }
    keys.sort_by(|&a, &b| canonical_cmp(a, b));
    let basis = keys.into_iter().map(|k| VectorField::from_svec(ring, vec![(k, 1)])).collect();
    GradedFieldSpace { weight: w.clone(), degree: d, basis }
}

/// Kernel of the divergence restricted to a component.
pub fn special_subspace(space: &GradedFieldSpace) -> GradedFieldSpace {
    let Some(first) = space.basis.first() else {
        return space.clone();
    };
    let ring = first.ring().clone();
    let p = ring.p();
    let divs: Vec<DividedPoly> = space.basis.iter().map(|b| b.divergence()).collect();
    let mut rows: Vec<MultiIndex> = divs.iter().flat_map(|d| d.terms().iter().map(|t| t.0)).collect();
    rows.sort();
    rows.dedup();
    let mut m = ffla::MatFp::zeros(p, rows.len(), space.basis.len());
    for (j, d) in divs.iter().enumerate() {
        for &(r, c) in d.terms() {
            let i = rows.binary_search(&r).unwrap();
            m.set(i, j, c);
        }
    }
    let basis = m
        .kernel_basis()
        .into_iter()
        .map(|v| {
            let mut acc = Acc::new(p);
            for (j, &c) in v.iter().enumerate() {
                acc.add_vec(space.basis[j].svec(), c);
            }
            VectorField::from_svec(&ring, acc.into_svec())
        })
        .collect();
    GradedFieldSpace { weight: space.weight.clone(), degree: space.degree, basis }
}
