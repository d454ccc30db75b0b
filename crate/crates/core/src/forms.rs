//! Differential forms over O(m;N): exterior derivative, wedge, interior product,
//! twisted Lie derivative, the integral and the cohomology of the de Rham complex.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::divpow::{same_ring, DivPowRing, DividedPoly, MultiIndex};
use crate::ffla::{self, MatFp, Subspace};
use crate::vfield::VectorField;
use crate::Error;

/// Divergence twist A in ρ_{A Div}(D) = ρ(D) + A·Div(D).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistedAction {
    pub a: u32,
}

impl TwistedAction {
    pub const PLAIN: TwistedAction = TwistedAction { a: 0 };

    pub fn new(a: i64, p: u32) -> Self {
        TwistedAction { a: ffla::reduce(a, p) }
    }
}

/// Σ f_I du_I with index sets encoded as bit masks.
#[derive(Clone, Debug)]
pub struct DiffForm {
    ring: Arc<DivPowRing>,
    degree: usize,
    coeffs: BTreeMap<u32, DividedPoly>,
}

impl PartialEq for DiffForm {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.degree == other.degree && self.coeffs == other.coeffs
    }
}

impl Eq for DiffForm {}

impl DiffForm {
    pub fn zero(ring: &Arc<DivPowRing>, degree: usize) -> Self {
        DiffForm { ring: ring.clone(), degree, coeffs: BTreeMap::new() }
    }

    pub fn function(f: &DividedPoly) -> Self {
        Self::term(f, &[]).expect("0-form")
    }

    /// f du_{i_1}...du_{i_k} for 0-based indices in any order (sign-normalized).
    pub fn term(f: &DividedPoly, idx: &[usize]) -> Result<Self, Error> {
        let ring = f.ring().clone();
        let mut mask = 0u32;
        let mut negs = 0usize;
        for (pos, &i) in idx.iter().enumerate() {
            if i >= ring.m() {
                return Err(Error::BadInput(format!("index {i} out of range")));
            }
            if mask & (1 << i) != 0 {
                return Ok(Self::zero(&ring, idx.len()));
            }
            negs += idx[..pos].iter().filter(|&&j| j > i).count();
            mask |= 1 << i;
        }
        let mut out = Self::zero(&ring, idx.len());
        let c = if negs % 2 == 1 { f.scale(ring.p() - 1) } else { f.clone() };
        out.add_term(mask, &c);
        Ok(out)
    }

    /// The volume form du_1...du_m times f.
    pub fn volume(f: &DividedPoly) -> Self {
        let m = f.ring().m();
        Self::term(f, &(0..m).collect::<Vec<_>>()).expect("volume form")
    }

    pub fn ring(&self) -> &Arc<DivPowRing> {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficients by ascending index set (0-based).
    pub fn coeffs(&self) -> Vec<(Vec<usize>, &DividedPoly)> {
        self.coeffs.iter().map(|(&m, f)| (mask_indices(m), f)).collect()
    }

    pub fn coeff(&self, idx: &[usize]) -> DividedPoly {
        let mask = idx.iter().fold(0u32, |m, &i| m | (1 << i));
        self.coeffs.get(&mask).cloned().unwrap_or_else(|| DividedPoly::zero(&self.ring))
    }

    fn add_term(&mut self, mask: u32, f: &DividedPoly) {
        if f.is_zero() {
            return;
        }
        let e = self.coeffs.entry(mask).or_insert_with(|| DividedPoly::zero(f.ring()));
        *e = e.lin(1, f, 1);
        if e.is_zero() {
            self.coeffs.remove(&mask);
        }
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
        if self.degree != other.degree {
            return Err(Error::BadInput("adding forms of different degrees".into()));
        }
        let mut out = self.clone();
        for (&m, f) in &other.coeffs {
            out.add_term(m, f);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u32) -> Self {
        let mut out = Self::zero(&self.ring, self.degree);
        for (&m, f) in &self.coeffs {
            out.add_term(m, &f.scale(c));
        }
        out
    }

    pub fn mul_function(&self, g: &DividedPoly) -> Result<Self, Error> {
        let mut out = Self::zero(&self.ring, self.degree);
        for (&m, f) in &self.coeffs {
            out.add_term(m, &f.mul(g)?);
        }
        Ok(out)
    }

    /// Exterior derivative; top-degree forms are rejected.
    pub fn d(&self) -> Result<Self, Error> {
        if self.degree >= self.ring.m() {
            return Err(Error::BadInput("d of a top-degree form; use the integral".into()));
        }
        Ok(self.d_unchecked())
    }

    fn d_unchecked(&self) -> Self {
        let mut out = Self::zero(&self.ring, self.degree + 1);
        if self.degree >= self.ring.m() {
            return out;
        }
        let p = self.ring.p();
        for (&mask, f) in &self.coeffs {
            for j in 0..self.ring.m() {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let df = f.partial(j);
                if df.is_zero() {
                    continue;
                }
                let before = (mask & ((1 << j) - 1)).count_ones();
                let c = if before % 2 == 1 { df.scale(p - 1) } else { df };
                out.add_term(mask | (1 << j), &c);
            }
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self, Error> {
        self.compatible(other)?;
        let p = self.ring.p();
        let mut out = Self::zero(&self.ring, self.degree + other.degree);
        if self.degree + other.degree > self.ring.m() {
            return Ok(out);
        }
        for (&a, f) in &self.coeffs {
            for (&b, g) in &other.coeffs {
                if a & b != 0 {
                    continue;
                }
                // inversions: pairs i in a, j in b with i > j
                let inv: u32 = mask_indices(b).iter().map(|&j| (a >> (j + 1)).count_ones()).sum();
                let fg = f.mul(g)?;
                let c = if inv % 2 == 1 { fg.scale(p - 1) } else { fg };
                out.add_term(a | b, &c);
            }
        }
        Ok(out)
    }

    /// Interior product ι_D.
    pub fn interior(&self, field: &VectorField) -> Result<Self, Error> {
        if !same_ring(&self.ring, field.ring()) {
            return Err(Error::IncompatibleAmbient);
        }
        let p = self.ring.p();
        let mut out = Self::zero(&self.ring, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return Ok(out);
        }
        for (&mask, f) in &self.coeffs {
            for (pos, k) in mask_indices(mask).into_iter().enumerate() {
                let dk = field.coeff(k);
                if dk.is_zero() {
                    continue;
                }
                let g = dk.mul(f)?;
                let g = if pos % 2 == 1 { g.scale(p - 1) } else { g };
                out.add_term(mask & !(1 << k), &g);
            }
        }
        Ok(out)
    }

    /// L_D ω + A·Div(D)·ω by the Cartan formula.
    pub fn lie_derivative(&self, field: &VectorField, twist: TwistedAction) -> Result<Self, Error> {
        let mut out = if self.degree == 0 {
            let mut o = Self::zero(&self.ring, 0);
            o.add_term(0, &field.apply(&self.coeff(&[]))?);
            o
        } else {
            self.interior(field)?.d_unchecked().add(&self.d_unchecked().interior(field)?)?
        };
        if twist.a != 0 {
            out = out.add(&self.mul_function(&field.divergence().scale(twist.a))?)?;
        }
        Ok(out)
    }

    /// Coefficient of u^τ in the top-degree coefficient.
    pub fn integral(&self) -> Result<ffla::Fp, Error> {
        if self.degree != self.ring.m() {
            return Err(Error::BadInput(format!("integral of a {}-form in {} variables", self.degree, self.ring.m())));
        }
        let tau = self.ring.tau();
        Ok(ffla::Fp::new(self.coeff(&(0..self.ring.m()).collect::<Vec<_>>()).coeff(tau) as i64, self.ring.p()))
    }
}

fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask & (1 << i) != 0).collect()
}

fn subsets(m: usize, k: usize) -> Vec<u32> {
    let mut out: Vec<u32> = (0u32..(1 << m)).filter(|s| s.count_ones() as usize == k).collect();
    out.sort_by_key(|&s| mask_indices(s));
    out
}

/// Coordinates of Ω^i: (index set, monomial).
fn omega_basis(ring: &DivPowRing, i: usize) -> Vec<(u32, MultiIndex)> {
    let monos = ring.all_monomials();
    subsets(ring.m(), i).into_iter().flat_map(|s| monos.iter().map(move |&r| (s, r))).collect()
}

fn to_vector(form: &DiffForm, index: &BTreeMap<(u32, u64), usize>, n: usize) -> Vec<u32> {
    let mut v = vec![0u32; n];
    for (&mask, f) in &form.coeffs {
        for &(r, c) in f.terms() {
            v[index[&(mask, r.raw())]] = c;
        }
    }
    v
}

fn from_vector(ring: &Arc<DivPowRing>, degree: usize, basis: &[(u32, MultiIndex)], v: &[u32]) -> DiffForm {
    let mut out = DiffForm::zero(ring, degree);
    for (&(mask, r), &c) in basis.iter().zip(v) {
        if c != 0 {
            out.add_term(mask, &DividedPoly::from_terms(ring, vec![(r, c)]));
        }
    }
    out
}

fn mono_form(ring: &Arc<DivPowRing>, mask: u32, r: MultiIndex) -> DiffForm {
    let mut f = DiffForm::zero(ring, mask.count_ones() as usize);
    f.add_term(mask, &DividedPoly::from_terms(ring, vec![(r, 1)]));
    f
}

/// Closed and exact i-forms as subspaces of the coordinate space of Ω^i.
pub fn cocycles_and_coboundaries(ring: &Arc<DivPowRing>, i: usize) -> (Vec<(u32, MultiIndex)>, Subspace, Subspace) {
    let p = ring.p();
    let basis = omega_basis(ring, i);
    let n = basis.len();
    let index: BTreeMap<(u32, u64), usize> = basis.iter().enumerate().map(|(k, &(s, r))| ((s, r.raw()), k)).collect();
    let z = if i == ring.m() {
        Subspace::span(p, n, &(0..n).map(|k| (0..n).map(|j| (j == k) as u32).collect()).collect::<Vec<_>>()).unwrap()
    } else {
        let next = omega_basis(ring, i + 1);
        let nindex: BTreeMap<(u32, u64), usize> = next.iter().enumerate().map(|(k, &(s, r))| ((s, r.raw()), k)).collect();
        let mut m = MatFp::zeros(p, next.len(), n);
        for (j, &(s, r)) in basis.iter().enumerate() {
            let v = to_vector(&mono_form(ring, s, r).d_unchecked(), &nindex, next.len());
            for (row, &c) in v.iter().enumerate() {
                if c != 0 {
                    m.set(row, j, c);
                }
            }
        }
        Subspace::span(p, n, &m.kernel_basis()).unwrap()
    };
    let mut b = Subspace::zero(p, n);
    if i > 0 {
        for (s, r) in omega_basis(ring, i - 1) {
            b.insert(&to_vector(&mono_form(ring, s, r).d_unchecked(), &index, n));
        }
    }
    (basis, z, b)
}

/// Representatives of Z^i / B^i computed by linear algebra.
pub fn cohomology_basis(ring: &Arc<DivPowRing>, i: usize) -> Result<Vec<DiffForm>, Error> {
    if i > ring.m() {
        return Err(Error::BadInput(format!("form degree {i} exceeds {}", ring.m())));
    }
    let (basis, z, b) = cocycles_and_coboundaries(ring, i);
    Ok(z.quotient_basis(&b).iter().map(|v| from_vector(ring, i, &basis, v)).collect())
}

/// The monomial classes u_{i_1}^{(τ)}...u_{i_k}^{(τ)} du_{i_1}...du_{i_k}.
pub fn monomial_cohomology_classes(ring: &Arc<DivPowRing>, i: usize) -> Vec<DiffForm> {
    subsets(ring.m(), i)
        .into_iter()
        .map(|s| {
            let r = mask_indices(s).into_iter().fold(MultiIndex::ZERO, |r, k| r.with(k, ring.max_exponent(k)));
            mono_form(ring, s, r)
        })
        .collect()
}

/// Whether two families span the same subspace of Z^i modulo B^i.
pub fn same_cohomology_span(ring: &Arc<DivPowRing>, i: usize, a: &[DiffForm], b: &[DiffForm]) -> bool {
    let (basis, _, bnd) = cocycles_and_coboundaries(ring, i);
    let n = basis.len();
    let index: BTreeMap<(u32, u64), usize> = basis.iter().enumerate().map(|(k, &(s, r))| ((s, r.raw()), k)).collect();
    let span = |fs: &[DiffForm]| {
        let mut s = bnd.clone();
        for f in fs {
            s.insert(&to_vector(f, &index, n));
        }
        s
    };
    span(a) == span(b)
}

/// {u^a vol : a ≠ τ}: the volume forms with zero integral.
pub fn primed_volume_basis(ring: &Arc<DivPowRing>) -> Vec<DiffForm> {
    let tau = ring.tau();
    ring.all_monomials().into_iter().filter(|&r| r != tau).map(|r| DiffForm::volume(&DividedPoly::from_terms(ring, vec![(r, 1)]))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divpow::Heights;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(p: u32, n: &[u32]) -> Arc<DivPowRing> {
        DivPowRing::new(p, Heights(n.to_vec())).unwrap()
    }

    fn u(r: &Arc<DivPowRing>, e: &[u32]) -> DividedPoly {
        DividedPoly::monomial(r, MultiIndex::from_slice(e), 1).unwrap()
    }

    fn random_form(rng: &mut impl Rng, ring: &Arc<DivPowRing>, i: usize) -> DiffForm {
        let basis = omega_basis(ring, i);
        let mut out = DiffForm::zero(ring, i);
        for _ in 0..rng.gen_range(1..8) {
            let (s, r) = basis[rng.gen_range(0..basis.len())];
            out.add_term(s, &DividedPoly::from_terms(ring, vec![(r, rng.gen_range(1..ring.p()))]));
        }
        out
    }

    #[test]
    fn d_of_coordinates() {
        let r = ring(3, &[1, 1]);
        let du1 = DiffForm::term(&DividedPoly::one(&r), &[0]).unwrap();
        assert_eq!(DiffForm::function(&u(&r, &[1, 0])).d().unwrap(), du1);
        let w = DiffForm::term(&u(&r, &[2, 0]), &[1]).unwrap();
        assert_eq!(w.d().unwrap(), DiffForm::term(&u(&r, &[1, 0]), &[0, 1]).unwrap());
        let r1 = ring(3, &[1]);
        assert!(DiffForm::term(&u(&r1, &[2]), &[0]).unwrap().d().is_err());
    }

    #[test]
    fn integrals() {
        let r = ring(3, &[1]);
        assert_eq!(DiffForm::volume(&u(&r, &[2])).integral().unwrap().value(), 1);
        assert_eq!(DiffForm::volume(&DividedPoly::one(&r)).integral().unwrap().value(), 0);
        assert!(DiffForm::function(&u(&r, &[2])).integral().is_err());
    }

    #[test]
    fn integral_of_exact_forms_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = ring(3, &[1, 1]);
        for _ in 0..50 {
            let w = random_form(&mut rng, &r, 1);
            assert_eq!(w.d().unwrap().integral().unwrap().value(), 0);
        }
    }

    #[test]
    fn cohomology_dims_and_classes() {
        let r = ring(3, &[1]);
        let h1 = cohomology_basis(&r, 1).unwrap();
        assert_eq!(h1.len(), 1);
        assert!(same_cohomology_span(&r, 1, &h1, &[DiffForm::volume(&u(&r, &[2]))]));
        for (p, n) in [(3u32, vec![1u32, 1]), (3, vec![2, 1]), (2, vec![1, 1, 1]), (5, vec![1, 1])] {
            let r = ring(p, &n);
            let h0 = cohomology_basis(&r, 0).unwrap();
            assert_eq!(h0, vec![DiffForm::function(&DividedPoly::one(&r))]);
            for i in 0..=n.len() {
                let h = cohomology_basis(&r, i).unwrap();
                let binom = (0..i).fold(1usize, |a, k| a * (n.len() - k) / (k + 1));
                assert_eq!(h.len(), binom, "H^{i} for p={p} N={n:?}");
                assert!(same_cohomology_span(&r, i, &h, &monomial_cohomology_classes(&r, i)));
            }
        }
    }

    #[test]
    fn lie_derivative_basics() {
        let r = ring(3, &[1, 1]);
        let du1 = DiffForm::term(&DividedPoly::one(&r), &[0]).unwrap();
        let d1 = VectorField::partial(&r, 0);
        assert!(du1.lie_derivative(&d1, TwistedAction::PLAIN).unwrap().is_zero());
        let e = VectorField::from_terms(&r, &[(MultiIndex::from_slice(&[1, 0]), 0, 1)]).unwrap();
        assert_eq!(du1.lie_derivative(&e, TwistedAction::PLAIN).unwrap(), du1);
        // on the volume form the plain action is multiplication by the divergence
        let vol = DiffForm::volume(&DividedPoly::one(&r));
        let lv = vol.lie_derivative(&e, TwistedAction::PLAIN).unwrap();
        assert_eq!(lv, vol.mul_function(&e.divergence()).unwrap());
        assert!(vol.lie_derivative(&e, TwistedAction::new(-1, 3)).unwrap().is_zero());
    }

    #[test]
    fn primed_volume() {
        let r = ring(3, &[1]);
        let b = primed_volume_basis(&r);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0], DiffForm::volume(&DividedPoly::one(&r)));
        assert_eq!(b[1], DiffForm::volume(&u(&r, &[1])));
        let r = ring(3, &[1, 1]);
        let b = primed_volume_basis(&r);
        assert_eq!(b.len(), 8);
        assert!(b.iter().all(|w| w.integral().unwrap().is_zero()));
    }

    #[test]
    fn d_squared_zero_exhaustive() {
        for m in 1..=3usize {
            for p in [2u32, 3, 5] {
                let r = ring(p, &vec![1; m]);
                for i in 0..m.saturating_sub(1) {
                    for (s, mono) in omega_basis(&r, i) {
                        let w = mono_form(&r, s, mono);
                        assert!(w.d().unwrap().d_unchecked().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn wedge_signs() {
        let r = ring(3, &[1, 1, 1]);
        let one = DividedPoly::one(&r);
        let du = |i| DiffForm::term(&one, &[i]).unwrap();
        assert_eq!(du(1).wedge(&du(0)).unwrap(), DiffForm::term(&one, &[0, 1]).unwrap().scale(2));
        assert!(du(2).wedge(&du(2)).unwrap().is_zero());
        // d is a graded derivation
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_form(&mut rng, &r, 1);
            let b = random_form(&mut rng, &r, 1);
            let lhs = a.wedge(&b).unwrap().d().unwrap();
            let rhs = a.d().unwrap().wedge(&b).unwrap().add(&a.wedge(&b.d().unwrap()).unwrap().scale(2)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn lie_derivative_is_a_representation(seed in 0u64..10_000, a in 0i64..3, deg in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = ring(3, &[1, 1, 1]);
            let monos = r.all_monomials();
            let mut field = || {
                let t: Vec<_> = (0..3).map(|_| (monos[rng.gen_range(0..monos.len())], rng.gen_range(0..3usize), rng.gen_range(1..3i64))).collect();
                VectorField::from_terms(&r, &t).unwrap()
            };
            let (x, y) = (field(), field());
            let w = random_form(&mut rng, &r, deg);
            let t = TwistedAction::new(a, 3);
            let lhs = w.lie_derivative(&x.bracket(&y).unwrap(), t).unwrap();
            let xy = w.lie_derivative(&y, t).unwrap().lie_derivative(&x, t).unwrap();
            let yx = w.lie_derivative(&x, t).unwrap().lie_derivative(&y, t).unwrap();
            prop_assert_eq!(lhs, xy.add(&yx.scale(2)).unwrap());
        }
    }
}
