//! Dense linear algebra over a prime field F_p.

use std::fmt;

use crate::Error;

/// Residue class modulo a small prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    p: u32,
}

impl Fp {
    pub fn new(value: i64, p: u32) -> Self {
        Fp { value: reduce(value, p), p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Fp> {
        if self.value == 0 {
            None
        } else {
            Some(Fp { value: inv(self.value, self.p), p: self.p })
        }
    }

    /// Symmetric representative in (-p/2, p/2].
    pub fn signed(self) -> i64 {
        signed(self.value, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! fp_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl std::ops::$tr for Fp {
            type Output = Fp;
            fn $m(self, rhs: Fp) -> Fp {
                assert_eq!(self.p, rhs.p, "mixed moduli");
                Fp { value: $body(self.value, rhs.value, self.p), p: self.p }
            }
        }
    };
}

fp_binop!(Add, add, add);
fp_binop!(Sub, sub, sub);
fp_binop!(Mul, mul, mul);

impl std::ops::Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { value: neg(self.value, self.p), p: self.p }
    }
}

#[inline]
pub fn reduce(v: i64, p: u32) -> u32 {
    v.rem_euclid(p as i64) as u32
}

#[inline]
pub fn add(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (s % p as u64) as u32
}

#[inline]
pub fn sub(a: u32, b: u32, p: u32) -> u32 {
    add(a, p - b % p, p)
}

#[inline]
pub fn neg(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline]
pub fn mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn pow(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse by Fermat; `a` must be nonzero mod p.
pub fn inv(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow(a, p as u64 - 2, p)
}

pub fn signed(v: u32, p: u32) -> i64 {
    if v as u64 * 2 > p as u64 {
        v as i64 - p as i64
    } else {
        v as i64
    }
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d: &u32| (*d as u64) * (*d as u64) <= p as u64).all(|d| !p.is_multiple_of(d))
}

/// `y += c * x` on dense vectors.
#[inline]
pub fn axpy(y: &mut [u32], c: u32, x: &[u32], p: u32) {
    if c == 0 {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        if xi != 0 {
            *yi = ((*yi as u64 + c as u64 * xi as u64) % p as u64) as u32;
        }
    }
}

pub fn scale(y: &mut [u32], c: u32, p: u32) {
    for yi in y.iter_mut() {
        *yi = mul(*yi, c, p);
    }
}

/// Row-major dense matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatFp {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl MatFp {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        MatFp { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn from_rows(p: u32, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&v| v % p));
        }
        MatFp { p, rows: rows.len(), cols, data }
    }

    pub fn from_i64(p: u32, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|&v| reduce(v, p)).collect()).collect();
        Self::from_rows(p, cols, &rows)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> MatFp {
        let mut t = MatFp::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let s: u64 = self.row(r).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64 % self.p as u64).sum();
                (s % self.p as u64) as u32
            })
            .collect()
    }

    pub fn mul(&self, other: &MatFp) -> MatFp {
        assert_eq!(self.cols, other.rows);
        let mut out = MatFp::zeros(self.p, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a != 0 {
                    let (p, oc) = (self.p, other.cols);
                    axpy(&mut out.data[r * oc..(r + 1) * oc], a, other.row(k), p);
                }
            }
        }
        out
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (MatFp, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let (p, cols) = (self.p, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(src) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if src != r {
                for k in 0..cols {
                    self.data.swap(src * cols + k, r * cols + k);
                }
            }
            let iv = inv(self.data[r * cols + c], p);
            scale(&mut self.data[r * cols..(r + 1) * cols], iv, p);
            let pivot_row = self.data[r * cols..(r + 1) * cols].to_vec();
            for i in 0..self.rows {
                if i != r {
                    let f = self.data[i * cols + c];
                    if f != 0 {
                        axpy(&mut self.data[i * cols..(i + 1) * cols], p - f, &pivot_row, p);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn inverse(&self) -> Option<MatFp> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        let mut aug = MatFp::zeros(self.p, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let (red, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut out = MatFp::zeros(self.p, n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, red.get(r, n + c));
            }
        }
        Some(out)
    }

    /// Basis of the right null space.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let (r, pivots) = self.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1 % p;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = neg(r.get(i, free), p);
            }
            out.push(v);
        }
        out
    }
}

/// A subspace of F_p^n kept in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    p: u32,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: u32, n: usize) -> Self {
        Subspace { p, n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn span(p: u32, n: usize, vectors: &[Vec<u32>]) -> Result<Self, Error> {
        let mut s = Subspace::zero(p, n);
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce `v` against the echelon basis; zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let mut w = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = w[c];
            if f != 0 {
                axpy(&mut w, self.p - f, row, self.p);
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coordinates of `v` in the echelon basis, if it lies in the subspace.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let coords: Vec<u32> = self.pivots.iter().map(|&c| v[c]).collect();
        let mut w = v.to_vec();
        for (row, &k) in self.rows.iter().zip(&coords) {
            if k != 0 {
                axpy(&mut w, self.p - k, row, self.p);
            }
        }
        w.iter().all(|&x| x == 0).then_some(coords)
    }

    /// Insert a vector; returns true if the dimension grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let p = self.p;
        let mut w = self.reduce(v);
        let Some(c) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let iv = inv(w[c], p);
        scale(&mut w, iv, p);
        for row in self.rows.iter_mut() {
            let f = row[c];
            if f != 0 {
                axpy(row, p - f, &w, p);
            }
        }
        let at = self.pivots.partition_point(|&q| q < c);
        self.pivots.insert(at, c);
        self.rows.insert(at, w);
        true
    }

    fn check(&self, other: &Subspace) -> Result<(), Error> {
        if self.n != other.n || self.p != other.p {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, Error> {
        self.check(other)?;
        let mut s = self.clone();
        for v in &other.rows {
            s.insert(v);
        }
        Ok(s)
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, Error> {
        self.check(other)?;
        let p = self.p;
        let (a, b) = (self.dim(), other.dim());
        // columns: basis of A then negated basis of B
        let mut m = MatFp::zeros(p, self.n, a + b);
        for (j, v) in self.rows.iter().enumerate() {
            for (i, &x) in v.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        for (j, v) in other.rows.iter().enumerate() {
            for (i, &x) in v.iter().enumerate() {
                m.set(i, a + j, neg(x, p));
            }
        }
        let mut out = Subspace::zero(p, self.n);
        for k in m.kernel_basis() {
            let mut v = vec![0u32; self.n];
            for (j, row) in self.rows.iter().enumerate() {
                axpy(&mut v, k[j], row, p);
            }
            out.insert(&v);
        }
        Ok(out)
    }

    /// Canonical complement coordinates: a basis of `self` reduced modulo `inner`, in echelon form.
    pub fn quotient_basis(&self, inner: &Subspace) -> Vec<Vec<u32>> {
        let mut q = Subspace::zero(self.p, self.n);
        let mut out = Vec::new();
        for v in &self.rows {
            let r = inner.reduce(v);
            if q.insert(&r) {
                out.push(r);
            }
        }
        let mut canon = Subspace::zero(self.p, self.n);
        for v in &out {
            canon.insert(&inner.reduce(v));
        }
        canon.rows.iter().map(|v| inner.reduce(v)).collect()
    }
}

/// Sum, intersection and a membership test of two spans in F_p^n.
pub fn subspace_ops(p: u32, n: usize, a: &[Vec<u32>], b: &[Vec<u32>]) -> Result<(Subspace, Subspace, impl Fn(&[u32]) -> bool), Error> {
    let sa = Subspace::span(p, n, a)?;
    let sb = Subspace::span(p, n, b)?;
    let sum = sa.sum(&sb)?;
    let int = sa.intersection(&sb)?;
    let member = sum.clone();
    Ok((sum, int, move |v: &[u32]| member.contains(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mat(rng: &mut impl Rng, p: u32, r: usize, c: usize) -> MatFp {
        let rows: Vec<Vec<u32>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..p)).collect()).collect();
        MatFp::from_rows(p, c, &rows)
    }

    /// Fraction-free (Bareiss-style over Z mod p at the end) rank oracle: eliminate with
    /// cross-multiplication only, never dividing.
    fn rank_fraction_free(m: &MatFp) -> usize {
        let p = m.p() as i64;
        let mut a: Vec<Vec<i64>> = m.row_vecs().into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect();
        let (rows, cols) = (m.rows(), m.cols());
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows).find(|&i| a[i][c] % p != 0) else { continue };
            a.swap(rank, piv);
            for i in 0..rows {
                if i != rank && a[i][c] % p != 0 {
                    let (x, y) = (a[rank][c], a[i][c]);
                    for k in 0..cols {
                        a[i][k] = (a[i][k] * x - a[rank][k] * y).rem_euclid(p);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn rref_identity() {
        let m = MatFp::identity(3, 2);
        let (r, piv) = m.rref();
        assert_eq!(r, m);
        assert_eq!(piv, vec![0, 1]);
    }

    #[test]
    fn rref_dependent_rows() {
        let m = MatFp::from_i64(3, &[vec![1, 2], vec![2, 4]]);
        let (r, piv) = m.rref();
        assert_eq!(r, MatFp::from_i64(3, &[vec![1, 2], vec![0, 0]]));
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn rank_matches_fraction_free_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = random_mat(&mut rng, 5, 50, 60);
            assert_eq!(m.rank(), rank_fraction_free(&m));
        }
        // low-rank products
        for _ in 0..10 {
            let a = random_mat(&mut rng, 5, 50, 7);
            let b = random_mat(&mut rng, 5, 7, 60);
            let m = a.mul(&b);
            assert_eq!(m.rank(), rank_fraction_free(&m));
            assert!(m.rank() <= 7);
        }
    }

    #[test]
    fn kernel_trivial_cases() {
        assert_eq!(MatFp::zeros(3, 3, 3).kernel_basis().len(), 3);
        assert!(MatFp::identity(5, 4).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_of_all_ones_row_by_enumeration() {
        let m = MatFp::from_i64(3, &[vec![1, 1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v.iter().sum::<u32>() % 3, 0);
        }
        let span = Subspace::span(3, 3, &k).unwrap();
        let mut count = 0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let v = [a, b, c];
                    let in_kernel = (a + b + c) % 3 == 0;
                    assert_eq!(span.contains(&v), in_kernel);
                    count += in_kernel as usize;
                }
            }
        }
        assert_eq!(count, 9);
    }

    #[test]
    fn subspace_equal_and_complementary() {
        let a = vec![vec![1, 2, 0], vec![0, 1, 1]];
        let (s, i, _) = subspace_ops(3, 3, &a, &a).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(i.dim(), 2);
        let e = |k: usize| (0..4).map(|j| (j == k) as u32).collect::<Vec<u32>>();
        let (s, i, member) = subspace_ops(3, 4, &[e(0), e(1)], &[e(2), e(3)]).unwrap();
        assert_eq!((s.dim(), i.dim()), (4, 0));
        assert!(member(&[1, 2, 1, 1]));
    }

    #[test]
    fn subspace_dimension_mismatch() {
        assert!(subspace_ops(3, 3, &[vec![1, 0, 0]], &[vec![1, 0]]).is_err());
    }

    fn enumerate(p: u32, n: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..p).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn random_subspaces_modular_law_by_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let all = enumerate(3, 5);
        for _ in 0..5 {
            let a: Vec<Vec<u32>> = (0..3).map(|_| (0..5).map(|_| rng.gen_range(0..3)).collect()).collect();
            let b: Vec<Vec<u32>> = (0..3).map(|_| (0..5).map(|_| rng.gen_range(0..3)).collect()).collect();
            let sa = Subspace::span(3, 5, &a).unwrap();
            let sb = Subspace::span(3, 5, &b).unwrap();
            let (sum, int, _) = subspace_ops(3, 5, &a, &b).unwrap();
            let in_a = all.iter().filter(|v| sa.contains(v)).count();
            let in_b = all.iter().filter(|v| sb.contains(v)).count();
            let in_both = all.iter().filter(|v| sa.contains(v) && sb.contains(v)).count();
            assert_eq!(in_a, 3usize.pow(sa.dim() as u32));
            assert_eq!(in_b, 3usize.pow(sb.dim() as u32));
            assert_eq!(in_both, 3usize.pow(int.dim() as u32));
            assert_eq!(sum.dim() + int.dim(), sa.dim() + sb.dim());
        }
    }

    #[test]
    fn field_inverse_all_primes() {
        for p in [2u32, 3, 5, 7, 65521] {
            for a in 1..p.min(500) {
                assert_eq!(mul(a, inv(a, p), p), 1);
                let x = Fp::new(a as i64, p);
                assert_eq!((x * x.inv().unwrap()).value(), 1);
            }
        }
    }

    proptest! {
        #[test]
        fn rank_nullity(seed in 0u64..1000, r in 1usize..12, c in 1usize..12, pi in 0usize..4) {
            let p = [2u32, 3, 5, 7][pi];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_mat(&mut rng, p, r, c);
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.len(), c);
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn rref_idempotent(seed in 0u64..1000, r in 1usize..10, c in 1usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_mat(&mut rng, 3, r, c);
            let (once, _) = m.rref();
            let (twice, _) = once.rref();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn arithmetic_closed(a in -1000i64..1000, b in -1000i64..1000) {
            for p in [2u32, 3, 5, 7] {
                let (x, y) = (Fp::new(a, p), Fp::new(b, p));
                prop_assert!((x + y).value() < p && (x * y).value() < p && (x - y).value() < p);
                prop_assert_eq!((x + y).value() as i64, (a + b).rem_euclid(p as i64));
                prop_assert_eq!((x * y).value() as i64, (a * b).rem_euclid(p as i64));
            }
        }
    }
}
