//! The divided-power algebra O(m;N) with its derivations and weighted gradings.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::ffla;
use crate::Error;

/// Maximal number of indeterminates supported by the packed exponent encoding.
pub const MAX_VARS: usize = 10;
const BITS: u32 = 6;
const FIELD: u64 = (1 << BITS) - 1;

/// Shearing vector (N_1, ..., N_m).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Heights(pub Vec<u32>);

impl Heights {
    pub fn ones(m: usize) -> Self {
        Heights(vec![1; m])
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// Declared degrees deg u_i = w_i.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(pub Vec<i64>);

impl WeightVector {
    pub fn standard(m: usize) -> Self {
        WeightVector(vec![1; m])
    }
}

/// Exponent vector packed six bits per coordinate, coordinate 0 most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(pub(crate) u64);

#[inline]
fn shift(i: usize) -> u32 {
    BITS * (MAX_VARS as u32 - 1 - i as u32)
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex(0);

    pub fn from_slice(r: &[u32]) -> Self {
        assert!(r.len() <= MAX_VARS);
        let mut v = 0u64;
        for (i, &x) in r.iter().enumerate() {
            assert!((x as u64) <= FIELD, "exponent {x} too large");
            v |= (x as u64) << shift(i);
        }
        MultiIndex(v)
    }

    pub fn unit(i: usize) -> Self {
        MultiIndex(1 << shift(i))
    }

    #[inline]
    pub fn get(self, i: usize) -> u32 {
        ((self.0 >> shift(i)) & FIELD) as u32
    }

    #[inline]
    pub fn with(self, i: usize, v: u32) -> Self {
        let s = shift(i);
        MultiIndex((self.0 & !(FIELD << s)) | ((v as u64) << s))
    }

    pub fn to_vec(self, m: usize) -> Vec<u32> {
        (0..m).map(|i| self.get(i)).collect()
    }

    /// Standard (unweighted) degree |r|.
    #[inline]
    pub fn degree(self) -> u32 {
        let mut v = self.0;
        let mut s = 0;
        while v != 0 {
            s += (v & FIELD) as u32;
            v >>= BITS;
        }
        s
    }

    pub fn weighted(self, w: &[i64]) -> i64 {
        w.iter().enumerate().map(|(i, &wi)| self.get(i) as i64 * wi).sum()
    }

    /// r − e_i, if r_i > 0.
    #[inline]
    pub fn dec(self, i: usize) -> Option<MultiIndex> {
        (self.get(i) > 0).then(|| MultiIndex(self.0 - (1 << shift(i))))
    }

    #[inline]
    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(v: u64) -> Self {
        MultiIndex(v)
    }

    /// Index of the first coordinate with a positive exponent.
    pub fn first_nonzero(self) -> Option<usize> {
        (self.0 != 0).then(|| ((self.0.leading_zeros() + MAX_VARS as u32 * BITS - 64) / BITS) as usize)
    }
}

impl Ord for MultiIndex {
    /// Graded lexicographic: by degree, then larger leading exponents first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ambient data (p, m, N) with a Lucas binomial table.
#[derive(Debug, PartialEq, Eq)]
pub struct DivPowRing {
    p: u32,
    m: usize,
    heights: Heights,
    max: Vec<u32>,
    binom: Vec<Vec<u32>>,
}

impl DivPowRing {
    pub fn new(p: u32, heights: Heights) -> Result<Arc<Self>, Error> {
        if !ffla::is_prime(p) {
            return Err(Error::BadInput(format!("{p} is not prime")));
        }
        let m = heights.0.len();
        if m == 0 || m > MAX_VARS {
            return Err(Error::BadInput(format!("number of indeterminates {m} outside 1..={MAX_VARS}")));
        }
        let mut max = Vec::with_capacity(m);
        for &n in &heights.0 {
            if n == 0 {
                return Err(Error::BadInput("heights must be positive".into()));
            }
            let top = (p as u64).checked_pow(n).filter(|&v| v - 1 <= FIELD);
            match top {
                Some(v) => max.push((v - 1) as u32),
                None => return Err(Error::BadInput(format!("p^N = {p}^{n} exceeds the supported exponent range"))),
            }
        }
        let lim = 2 * (FIELD as usize + 1);
        let binom = (0..lim).map(|n| (0..=n.min(FIELD as usize)).map(|k| lucas(n as u64, k as u64, p)).collect()).collect();
        Ok(Arc::new(DivPowRing { p, m, heights, max, binom }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn heights(&self) -> &Heights {
        &self.heights
    }

    /// τ(N): the exponent p^{N_i} − 1 in every coordinate.
    pub fn tau(&self) -> MultiIndex {
        MultiIndex::from_slice(&self.max)
    }

    pub fn max_exponent(&self, i: usize) -> u32 {
        self.max[i]
    }

    pub fn dim(&self) -> u64 {
        (self.p as u64).pow(self.heights.total())
    }

    pub fn admissible(&self, r: MultiIndex) -> bool {
        (0..self.m).all(|i| r.get(i) <= self.max[i]) && (self.m == MAX_VARS || r.0 & ((1u64 << shift(self.m - 1)) - 1) == 0)
    }

    /// C(n, k) mod p.
    #[inline]
    pub fn binomial(&self, n: u32, k: u32) -> u32 {
        self.binom[n as usize][k as usize]
    }

    /// u^a · u^b = (Π C(a_i+b_i, a_i)) u^{a+b}; `None` when the coefficient vanishes.
    #[inline]
    pub fn mono_mul(&self, a: MultiIndex, b: MultiIndex) -> Option<(MultiIndex, u32)> {
        let mut c = 1u32;
        let mut out = 0u64;
        for i in 0..self.m {
            let (x, y) = (a.get(i), b.get(i));
            if y == 0 {
                out |= (x as u64) << shift(i);
                continue;
            }
            if x == 0 {
                out |= (y as u64) << shift(i);
                continue;
            }
            let s = x + y;
            if s > self.max[i] {
                return None;
            }
            let bc = self.binom[s as usize][x as usize];
            if bc == 0 {
                return None;
            }
            c = ffla::mul(c, bc, self.p);
            out |= (s as u64) << shift(i);
        }
        Some((MultiIndex(out), c))
    }

    /// All admissible multi-indices.
    pub fn all_monomials(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::ZERO];
        for i in 0..self.m {
            out = out.into_iter().flat_map(|r| (0..=self.max[i]).map(move |k| r.with(i, k))).collect();
        }
        out.sort();
        out
    }

    /// Admissible multi-indices of weighted degree `d`, canonically ordered.
    pub fn monomial_basis(&self, w: &WeightVector, d: i64) -> Vec<MultiIndex> {
        assert_eq!(w.0.len(), self.m);
        let m = self.m;
        // bounds of the remaining weighted degree achievable from coordinate i on
        let mut lo = vec![0i64; m + 1];
        let mut hi = vec![0i64; m + 1];
        for i in (0..m).rev() {
            let t = w.0[i] * self.max[i] as i64;
            lo[i] = lo[i + 1] + t.min(0);
            hi[i] = hi[i + 1] + t.max(0);
        }
        let mut out = Vec::new();
        let mut cur = vec![0u32; m];
        fn rec(ring: &DivPowRing, w: &[i64], i: usize, rem: i64, lo: &[i64], hi: &[i64], cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if i == ring.m {
                if rem == 0 {
                    out.push(MultiIndex::from_slice(cur));
                }
                return;
            }
            if rem < lo[i] || rem > hi[i] {
                return;
            }
            for k in 0..=ring.max[i] {
                cur[i] = k;
                rec(ring, w, i + 1, rem - w[i] * k as i64, lo, hi, cur, out);
            }
            cur[i] = 0;
        }
        rec(self, &w.0, 0, d, &lo, &hi, &mut cur, &mut out);
        out.sort();
        out
    }

    pub fn render_mono(&self, r: MultiIndex) -> String {
        let parts: Vec<String> = (0..self.m).filter(|&i| r.get(i) > 0).map(|i| if r.get(i) == 1 { format!("u{}", i + 1) } else { format!("u{}^({})", i + 1, r.get(i)) }).collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Binomial coefficient mod p through base-p digits.
pub fn lucas(mut n: u64, mut k: u64, p: u32) -> u32 {
    let p64 = p as u64;
    let mut r = 1u32;
    while n > 0 || k > 0 {
        let (a, b) = (n % p64, k % p64);
        if b > a {
            return 0;
        }
        r = ffla::mul(r, small_binom(a, b, p), p);
        n /= p64;
        k /= p64;
    }
    r
}

fn small_binom(n: u64, k: u64, p: u32) -> u32 {
    let mut num = 1u32;
    let mut den = 1u32;
    for i in 0..k {
        num = ffla::mul(num, ((n - i) % p as u64) as u32, p);
        den = ffla::mul(den, ((i + 1) % p as u64) as u32, p);
    }
    ffla::mul(num, ffla::inv(den, p), p)
}

/// Element of O(m;N).
#[derive(Clone, Debug)]
pub struct DividedPoly {
    ring: Arc<DivPowRing>,
    terms: Vec<(MultiIndex, u32)>,
}

impl PartialEq for DividedPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for DividedPoly {}

pub(crate) fn same_ring(a: &Arc<DivPowRing>, b: &Arc<DivPowRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl DividedPoly {
    pub fn zero(ring: &Arc<DivPowRing>) -> Self {
        DividedPoly { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn monomial(ring: &Arc<DivPowRing>, r: MultiIndex, c: i64) -> Result<Self, Error> {
        if !ring.admissible(r) {
            return Err(Error::BadInput(format!("inadmissible exponent {:?}", r.to_vec(ring.m))));
        }
        Ok(Self::from_terms(ring, vec![(r, ffla::reduce(c, ring.p))]))
    }

    pub fn one(ring: &Arc<DivPowRing>) -> Self {
        Self::from_terms(ring, vec![(MultiIndex::ZERO, 1)])
    }

    /// Build from (index, coefficient) pairs, merging duplicates.
    pub fn from_terms(ring: &Arc<DivPowRing>, terms: Vec<(MultiIndex, u32)>) -> Self {
        let p = ring.p;
        let mut t = terms;
        t.sort_by_key(|a| a.0);
        let mut out: Vec<(MultiIndex, u32)> = Vec::with_capacity(t.len());
        for (r, c) in t {
            match out.last_mut() {
                Some(last) if last.0 == r => last.1 = ffla::add(last.1, c, p),
                _ => out.push((r, c % p)),
            }
        }
        out.retain(|x| x.1 != 0);
        DividedPoly { ring: ring.clone(), terms: out }
    }

    pub fn ring(&self) -> &Arc<DivPowRing> {
        &self.ring
    }

    pub fn terms(&self) -> &[(MultiIndex, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, r: MultiIndex) -> u32 {
        self.terms.binary_search_by(|x| x.0.cmp(&r)).map_or(0, |i| self.terms[i].1)
    }

    fn compatible(&self, other: &Self) -> Result<(), Error> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::IncompatibleAmbient)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        self.compatible(other)?;
        Ok(self.lin(1, other, 1))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.compatible(other)?;
        Ok(self.lin(1, other, self.ring.p - 1))
    }

    pub(crate) fn lin(&self, a: u32, other: &Self, b: u32) -> Self {
        let p = self.ring.p;
        let mut t: Vec<(MultiIndex, u32)> = self.terms.iter().map(|&(r, c)| (r, ffla::mul(a, c, p))).collect();
        t.extend(other.terms.iter().map(|&(r, c)| (r, ffla::mul(b, c, p))));
        Self::from_terms(&self.ring, t)
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.ring.p;
        Self::from_terms(&self.ring, self.terms.iter().map(|&(r, x)| (r, ffla::mul(x, c, p))).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        self.compatible(other)?;
        let p = self.ring.p;
        let mut t = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(a, x) in &self.terms {
            for &(b, y) in &other.terms {
                if let Some((r, c)) = self.ring.mono_mul(a, b) {
                    t.push((r, ffla::mul(c, ffla::mul(x, y, p), p)));
                }
            }
        }
        Ok(Self::from_terms(&self.ring, t))
    }

    /// Divided-power partial derivative ∂_i (0-based coordinate).
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.ring.m, "coordinate out of range");
        Self::from_terms(&self.ring, self.terms.iter().filter_map(|&(r, c)| r.dec(i).map(|s| (s, c))).collect())
    }

    /// Σ r_i w_i if homogeneous, `None` if inhomogeneous.
    pub fn weighted_degree(&self, w: &WeightVector) -> Result<Option<i64>, Error> {
        let mut it = self.terms.iter().map(|(r, _)| r.weighted(&w.0));
        let Some(d) = it.next() else {
            return Err(Error::BadInput("weighted degree of zero".into()));
        };
        Ok(it.all(|e| e == d).then_some(d))
    }
}

impl fmt::Display for DividedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(r, c)| {
                let m = self.ring.render_mono(r);
                match (c, m.as_str()) {
                    (_, "1") => format!("{c}"),
                    (1, _) => m,
                    _ => format!("{c}*{m}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
