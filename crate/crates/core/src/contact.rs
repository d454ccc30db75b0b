//! Contact algebras K(2n+1;N): fields preserving the Pfaff equation α = 0 for
//! α = dt − Σ(p_i dq_i − q_i dp_i), and the correspondence f ↦ K_f with α(K_f) = f.
//!
//! Coordinates are ordered (q_1..q_n, p_1..p_n, t) with deg q = deg p = 1, deg t = 2.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::divpow::{DivPowRing, DividedPoly, Heights, MultiIndex, WeightVector};
use crate::ffla::{self, MatFp};
use crate::forms::{DiffForm, TwistedAction};
use crate::prolong::ProlongSeed;
use crate::vfield::{self, GradedFieldSpace, VectorField};
use crate::Error;

#[derive(Clone, Debug)]
pub struct ContactForm {
    n: usize,
    ring: Arc<DivPowRing>,
    alpha: DiffForm,
    weight: WeightVector,
    torus: Vec<Vec<i64>>,
}

/// A contact field together with its generating function α(D).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactField {
    pub field: VectorField,
    pub generating: DividedPoly,
}

impl ContactForm {
    /// `heights` has length 2n+1 in the order (q, p, t).
    pub fn new(n: usize, heights: Heights, p: u32) -> Result<Self, Error> {
        if n == 0 || heights.0.len() != 2 * n + 1 {
            return Err(Error::BadInput(format!("contact form needs {} heights", 2 * n + 1)));
        }
        let ring = DivPowRing::new(p, heights)?;
        let m = 2 * n + 1;
        let one = DividedPoly::one(&ring);
        let mut alpha = DiffForm::term(&one, &[m - 1])?;
        for i in 0..n {
            let pi = DividedPoly::monomial(&ring, MultiIndex::unit(n + i), 1)?;
            let qi = DividedPoly::monomial(&ring, MultiIndex::unit(i), 1)?;
            alpha = alpha.add(&DiffForm::term(&pi, &[i])?.scale(p - 1))?;
            alpha = alpha.add(&DiffForm::term(&qi, &[n + i])?)?;
        }
        let mut w = vec![1i64; m];
        w[m - 1] = 2;
        // q_i ∂_{q_i} − p_i ∂_{p_i}, then the degree
        let mut torus = Vec::new();
        for i in 0..n {
            let mut c = vec![0i64; m];
            c[i] = 1;
            c[n + i] = -1;
            torus.push(c);
        }
        torus.push(w.clone());
        Ok(ContactForm { n, ring, alpha, weight: WeightVector(w), torus })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &Arc<DivPowRing> {
        &self.ring
    }

    pub fn alpha(&self) -> &DiffForm {
        &self.alpha
    }

    pub fn weight(&self) -> &WeightVector {
        &self.weight
    }

    /// Grading operators q_i∂_{q_i} − p_i∂_{p_i} followed by the contact degree.
    pub fn torus(&self) -> &[Vec<i64>] {
        &self.torus
    }

    pub fn q(&self, i: usize) -> usize {
        i
    }

    pub fn p(&self, i: usize) -> usize {
        self.n + i
    }

    pub fn t(&self) -> usize {
        2 * self.n
    }

    /// The generating function α(D).
    pub fn generating_function(&self, d: &VectorField) -> Result<DividedPoly, Error> {
        Ok(self.alpha.interior(d)?.coeff(&[]))
    }

    /// L_D α ∧ α, which vanishes exactly when L_D α ∈ O·α.
    fn defect(&self, d: &VectorField) -> Result<DiffForm, Error> {
        self.alpha.lie_derivative(d, TwistedAction::PLAIN)?.wedge(&self.alpha)
    }

    pub fn is_contact(&self, d: &VectorField) -> Result<bool, Error> {
        Ok(self.defect(d)?.is_zero())
    }

    /// Parses a function of (q, p, t) such as `q1*p1^2 - 2*t`; powers are divided powers
    /// when `divided` is set, ordinary powers otherwise. For n = 1 the names q, p, t
    /// without index are accepted.
    pub fn function(&self, text: &str, divided: bool) -> Result<DividedPoly, Error> {
        let bad = |msg: String| Error::Parse { source_name: "function".into(), line: 1, msg };
        let p = self.ring.p();
        let mut out = DividedPoly::zero(&self.ring);
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') && !cur.ends_with('(') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for t in terms.into_iter().filter(|t| !t.is_empty()) {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, t.strip_prefix('+').unwrap_or(&t)),
            };
            let mut coeff = if neg { p - 1 } else { 1 };
            let mut exps = vec![0u32; self.ring.m()];
            for f in body.split('*') {
                if let Ok(c) = f.parse::<i64>() {
                    coeff = ffla::mul(coeff, ffla::reduce(c, p), p);
                    continue;
                }
                let (var, pow) = match f.split_once('^') {
                    Some((v, e)) => (v, e.trim_matches(|c| c == '(' || c == ')').parse::<u32>().map_err(|_| bad(format!("bad exponent in {f}")))?),
                    None => (f, 1),
                };
                let idx = self.variable(var).ok_or_else(|| bad(format!("unknown variable {var}")))?;
                exps[idx] += pow;
            }
            if !divided {
                for &e in &exps {
                    coeff = ffla::mul(coeff, (1..=e).fold(1u32, |a, k| ffla::mul(a, k % p, p)), p);
                }
            }
            let r = MultiIndex::from_slice(&exps);
            out = out.add(&DividedPoly::monomial(&self.ring, r, coeff as i64)?)?;
        }
        Ok(out)
    }

    fn variable(&self, name: &str) -> Option<usize> {
        if name == "t" {
            return Some(self.t());
        }
        let (head, idx) = name.split_at(1);
        let i = if idx.is_empty() && self.n == 1 { 0 } else { idx.parse::<usize>().ok()?.checked_sub(1)? };
        if i >= self.n {
            return None;
        }
        match head {
            "q" => Some(self.q(i)),
            "p" => Some(self.p(i)),
            _ => None,
        }
    }

    /// Monomial fields u^r∂_j of degree `d` and torus weight `w`.
    fn block(&self, d: i64, w: &[i64]) -> Vec<VectorField> {
        vfield::graded_component(&self.ring, &self.weight, d).basis.into_iter().filter(|f| vfield::field_weight(f.svec()[0].0, &self.torus) == w).collect()
    }

    /// Solves Σ x_j b_j with zero defect and (optionally) α(Σ x_j b_j) = f; returns the
    /// affine solution (if any) and a basis of the homogeneous solutions.
    fn solve(&self, basis: &[VectorField], f: Option<&DividedPoly>) -> Result<(Option<VectorField>, Vec<VectorField>), Error> {
        let p = self.ring.p();
        let mut rows: HashMap<(u32, MultiIndex), usize> = HashMap::new();
        let mut cols: Vec<Vec<(usize, u32)>> = Vec::new();
        let row_of = |key: (u32, MultiIndex), rows: &mut HashMap<(u32, MultiIndex), usize>| {
            let n = rows.len();
            *rows.entry(key).or_insert(n)
        };
        let fun_tag = u32::MAX;
        for b in basis {
            let mut col = Vec::new();
            for (idx, c) in self.defect(b)?.coeffs() {
                let mask = idx.iter().fold(0u32, |m, &i| m | (1 << i));
                for &(r, x) in c.terms() {
                    col.push((row_of((mask, r), &mut rows), x));
                }
            }
            if f.is_some() {
                for &(r, x) in self.generating_function(b)?.terms() {
                    col.push((row_of((fun_tag, r), &mut rows), x));
                }
            }
            cols.push(col);
        }
        let mut rhs = Vec::new();
        if let Some(f) = f {
            for &(r, x) in f.terms() {
                rhs.push((row_of((fun_tag, r), &mut rows), x));
            }
        }
        let nc = basis.len();
        let mut m = MatFp::zeros(p, rows.len(), nc + 1);
        for (j, col) in cols.iter().enumerate() {
            for &(i, x) in col {
                m.set(i, j, ffla::add(m.get(i, j), x, p));
            }
        }
        for &(i, x) in &rhs {
            // augmented column holds −f so that kernel vectors with last entry 1 solve the system
            m.set(i, nc, ffla::add(m.get(i, nc), ffla::neg(x, p), p));
        }
        let combine = |v: &[u32]| -> VectorField {
            let mut out = VectorField::zero(&self.ring);
            for (j, &c) in v.iter().enumerate().take(nc) {
                if c != 0 {
                    out = out.lin(1, &basis[j], c);
                }
            }
            out
        };
        let mut particular = None;
        let mut homogeneous = Vec::new();
        let ker = m.kernel_basis();
        for v in &ker {
            if v[nc] == 0 {
                homogeneous.push(combine(v));
            } else if particular.is_none() {
                let s = ffla::inv(v[nc], p);
                let scaled: Vec<u32> = v.iter().map(|&c| ffla::mul(c, s, p)).collect();
                particular = Some(combine(&scaled));
            }
        }
        if f.is_none() {
            // without a right-hand side the augmented column is zero and every kernel
            // vector with a nonzero last entry is spurious
            particular = None;
            homogeneous = ker.iter().map(|v| combine(v)).filter(|x| !x.is_zero()).collect();
        }
        Ok((particular, homogeneous))
    }

    /// Basis of {D ∈ W_d : L_D α ∈ O·α}, assembled from torus weight blocks.
    pub fn component(&self, d: i64) -> Result<GradedFieldSpace, Error> {
        let all = vfield::graded_component(&self.ring, &self.weight, d).basis;
        let mut blocks: BTreeMap<Vec<i64>, Vec<VectorField>> = BTreeMap::new();
        for f in all {
            blocks.entry(vfield::field_weight(f.svec()[0].0, &self.torus)).or_default().push(f);
        }
        let mut basis = Vec::new();
        for (_, b) in blocks {
            basis.extend(self.solve(&b, None)?.1);
        }
        Ok(GradedFieldSpace { weight: self.weight.clone(), degree: d, basis })
    }

    /// The contact field K_f with α(K_f) = f; f must be a sum of terms of one degree and
    /// one torus weight.
    pub fn field(&self, f: &DividedPoly) -> Result<ContactField, Error> {
        if f.is_zero() {
            return Ok(ContactField { field: VectorField::zero(&self.ring), generating: f.clone() });
        }
        let (r0, _) = f.terms()[0];
        let deg = r0.weighted(&self.weight.0);
        let wt: Vec<i64> = self.torus.iter().map(|c| r0.weighted(c)).collect();
        for &(r, _) in f.terms() {
            if r.weighted(&self.weight.0) != deg || self.torus.iter().map(|c| r.weighted(c)).collect::<Vec<_>>() != wt {
                return Err(Error::BadInput(format!("generating function {f} is not homogeneous")));
            }
        }
        // α has weight 0 under q∂q − p∂p and degree 2
        let mut wt = wt;
        *wt.last_mut().unwrap() -= 2;
        let block = self.block(deg - 2, &wt);
        let (sol, hom) = self.solve(&block, Some(f))?;
        if !hom.is_empty() {
            return Err(Error::Invariant(format!("contact field of {f} is not unique")));
        }
        let field = sol.ok_or_else(|| Error::NoSolution(format!("no contact field with generating function {f}")))?;
        Ok(ContactField { field, generating: f.clone() })
    }

    /// Sums of homogeneous pieces are handled by splitting f into (degree, weight) parts.
    pub fn field_any(&self, f: &DividedPoly) -> Result<ContactField, Error> {
        let mut parts: BTreeMap<(i64, Vec<i64>), Vec<(MultiIndex, u32)>> = BTreeMap::new();
        for &(r, c) in f.terms() {
            let key = (r.weighted(&self.weight.0), self.torus.iter().map(|w| r.weighted(w)).collect());
            parts.entry(key).or_default().push((r, c));
        }
        let mut field = VectorField::zero(&self.ring);
        for (_, t) in parts {
            field = field.add(&self.field(&DividedPoly::from_terms(&self.ring, t))?.field)?;
        }
        Ok(ContactField { field, generating: f.clone() })
    }

    /// [K_f, K_g] as a contact field; its generating function is the contact bracket.
    pub fn bracket(&self, a: &ContactField, b: &ContactField) -> Result<ContactField, Error> {
        let field = a.field.bracket(&b.field)?;
        let generating = self.generating_function(&field)?;
        Ok(ContactField { field, generating })
    }
}

pub fn contact_component(n: usize, heights: Heights, p: u32, d: i64) -> Result<GradedFieldSpace, Error> {
    ContactForm::new(n, heights, p)?.component(d)
}

pub fn contact_field(form: &ContactForm, f: &DividedPoly) -> Result<ContactField, Error> {
    form.field(f)
}

/// Non-positive part of K(2n+1;N) as a prolong seed; basis labels are generating
/// functions.
pub fn contact_seed(form: &ContactForm, name: &str) -> Result<ProlongSeed, Error> {
    let mut parts: BTreeMap<i32, Vec<(String, VectorField)>> = BTreeMap::new();
    for d in -2..=0 {
        let mut list = Vec::new();
        for f in form.component(d)?.basis {
            let g = form.generating_function(&f)?;
            list.push((g.to_string(), f));
        }
        parts.insert(d as i32, list);
    }
    ProlongSeed::new(name, form.ring(), form.weight().clone(), parts, form.torus().to_vec())
}

/// Generators of Br(2;a) inside K(3;(1,1,1)) over F_3.
#[derive(Clone, Debug)]
pub struct Br2aGenerators {
    pub form: ContactForm,
    pub x1_minus: ContactField,
    pub x2_minus: ContactField,
    pub x1_plus: ContactField,
    pub x2_plus: ContactField,
    pub h1: ContactField,
    pub h2: ContactField,
}

impl Br2aGenerators {
    pub fn all(&self) -> [&ContactField; 4] {
        [&self.x1_minus, &self.x2_minus, &self.x1_plus, &self.x2_plus]
    }
}

/// X_1^- = q², X_2^- = p, X_1^+ = −p², X_2^+ = δ(a·pq² − qt) with δ = 1 for a = 2 and
/// 1/(a+1) otherwise. Powers in generating functions are divided powers.
pub fn br2a_generators(a: i64) -> Result<Br2aGenerators, Error> {
    let p = 3u32;
    let form = ContactForm::new(1, Heights(vec![1, 1, 1]), p)?;
    let a = ffla::reduce(a, p);
    let delta = if a == 2 {
        1
    } else if a == p - 1 {
        return Err(Error::BadInput("a = -1 leaves δ = 1/(a+1) undefined".into()));
    } else {
        ffla::inv(a + 1, p)
    };
    let f = |s: &str| form.function(s, true);
    let x1_minus = form.field(&f("q^2")?)?;
    let x2_minus = form.field(&f("p")?)?;
    let x1_plus = form.field(&f("-p^2")?)?;
    let x2_plus = form.field_any(&f(&format!("{a}*p*q^2 - q*t"))?.scale(delta))?;
    let h1 = form.field(&f("p*q")?)?;
    let h2 = if a == 2 {
        form.field_any(&f("p*q - t")?)?
    } else {
        let inv = ffla::inv(a + 1, p);
        let c = ffla::mul(ffla::sub(a, 1, p), inv, p);
        form.field_any(&f(&format!("{c}*p*q - {inv}*t"))?)?
    };
    Ok(Br2aGenerators { form, x1_minus, x2_minus, x1_plus, x2_plus, h1, h2 })
}

/// The K(5) seed over F_5: g_{-2} = K_1, g_{-1} = K_{p_1}, K_{p_2}, K_{q_1}, K_{q_2}, and g_0
/// spanned by the five images of W(1) plus K_t.
pub fn melikyan_contact_seed() -> Result<ProlongSeed, Error> {
    let form = ContactForm::new(2, Heights(vec![1; 5]), 5)?;
    let f = |s: &str| form.function(s, true);
    let mut parts: BTreeMap<i32, Vec<(String, VectorField)>> = BTreeMap::new();
    parts.insert(-2, vec![("1".into(), form.field(&f("1")?)?.field)]);
    let mut g1 = Vec::new();
    for s in ["p1", "p2", "q1", "q2"] {
        g1.push((s.to_string(), form.field(&f(s)?)?.field));
    }
    parts.insert(-1, g1);
    let mut g0 = Vec::new();
    for (label, s) in [("u^4d", "-q2^2 + p1*p2"), ("u^3d", "-q1*p1 + 2*q2*p2"), ("u^2d", "-q1*q2 - 2*p2^2"), ("ud", "-q1*p2"), ("d", "-q1^2"), ("t", "t")] {
        g0.push((label.to_string(), form.field_any(&f(s)?)?.field));
    }
    parts.insert(0, g0);
    // the diagonal element −q1p1 + 2q2p2 and the degree
    let torus = vec![vec![-3, 1, 3, -1, 0], vec![1, 1, 1, 1, 2]];
    ProlongSeed::new("me5-contact", form.ring(), form.weight().clone(), parts, torus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> ContactForm {
        ContactForm::new(1, Heights(vec![1, 1, 1]), 3).unwrap()
    }

    #[test]
    fn low_components_of_k3() {
        let k = k3();
        assert_eq!(k.component(-2).unwrap().dim(), 1);
        assert_eq!(k.component(-1).unwrap().dim(), 2);
        assert_eq!(k.component(0).unwrap().dim(), 4);
    }

    #[test]
    fn unit_generates_dt() {
        let k = k3();
        let d = k.field(&DividedPoly::one(k.ring())).unwrap();
        assert_eq!(d.field, VectorField::partial(k.ring(), 2));
    }

    #[test]
    fn round_trip_of_generating_functions() {
        let k = k3();
        for s in ["q", "p", "p*q", "q^2", "t", "t*q", "p^2*q", "q^2*t"] {
            let f = k.function(s, false).unwrap();
            let d = k.field(&f).unwrap();
            assert!(k.is_contact(&d.field).unwrap());
            assert_eq!(k.generating_function(&d.field).unwrap(), f, "{s}");
        }
    }

    #[test]
    fn brackets_of_contact_fields_stay_contact() {
        let k = k3();
        let names = ["q", "p", "p*q", "q^2", "p^2", "t", "t*q", "t*p"];
        for a in names {
            for b in names {
                let x = k.field(&k.function(a, false).unwrap()).unwrap();
                let y = k.field(&k.function(b, false).unwrap()).unwrap();
                let z = k.bracket(&x, &y).unwrap();
                assert!(k.is_contact(&z.field).unwrap());
                assert_eq!(k.field_any(&z.generating).unwrap().field, z.field);
            }
        }
    }
}
