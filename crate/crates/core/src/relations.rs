//! Minimal defining relations of the subalgebra generated by homogeneous elements.
//!
//! Free Lie algebra elements are stored by their images in the free associative
//! algebra: polynomials over words, a word packing up to 16 letters of 4 bits each,
//! left-aligned, so that numeric order of words is lexicographic order (a proper prefix
//! comes first). Letter i stands for generator i, and generators are ordered as given.
//!
//! The Hall basis is the Lyndon basis: Lyndon words ordered by degree and then
//! lexicographically, each with its standard bracketing P(w) = [P(u), P(v)] where v is
//! the smallest proper suffix of w. Since P(w) = w + (lexicographically larger words of
//! the same content), Hall coordinates are read off by triangular reduction.
//!
//! Generators carry a degree ≥ 0 of their own choosing and the torus weight of their
//! target label; a component is a pair (degree, weight). In each component the
//! relations are the evaluation kernel modulo the consequences Σ_i [x_i, K_{γ−g_i}] of
//! the kernels of lower components. Letters of degree 0 are handled by increasing their
//! count until every component at that count consists of consequences only, which
//! (inductively over the degree) shows that no later count carries a new relation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::ffla::{self, MatFp, Subspace};
use crate::glie::GradedAlgebra;
use crate::sparse::{Acc, Echelon, SVec};
use crate::Error;

/// Letters per word.
pub const MAX_WORD: usize = 16;
/// Generators per alphabet.
pub const MAX_GENERATORS: usize = 15;
/// Default degree cap.
pub const DEFAULT_MAX_DEGREE: i32 = 8;
/// Cap on the number of degree-0 letters in one component.
pub const ZERO_LETTER_CAP: usize = 24;

pub type Word = u64;

pub fn word_len(w: Word) -> usize {
    if w == 0 {
        0
    } else {
        (64 - w.trailing_zeros() as usize).div_ceil(4)
    }
}

pub fn word_letters(w: Word) -> Vec<usize> {
    (0..word_len(w)).map(|j| ((w >> (60 - 4 * j)) & 15) as usize - 1).collect()
}

pub fn word_from_letters(ls: &[usize]) -> Word {
    assert!(ls.len() <= MAX_WORD);
    ls.iter().enumerate().fold(0, |w, (j, &l)| w | ((l as u64 + 1) << (60 - 4 * j)))
}

fn concat(a: Word, b: Word) -> Word {
    let la = word_len(a);
    if la == 0 {
        b
    } else if la == 16 {
        a
    } else {
        a | (b >> (4 * la))
    }
}

pub fn is_lyndon(ls: &[usize]) -> bool {
    !ls.is_empty() && (1..ls.len()).all(|i| ls < &ls[i..])
}

/// Standard factorization w = uv of a Lyndon word of length ≥ 2.
pub fn standard_factorization(ls: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut best = 1;
    for i in 2..ls.len() {
        if ls[i..] < ls[best..] {
            best = i;
        }
    }
    (ls[..best].to_vec(), ls[best..].to_vec())
}

/// Commutator of two word polynomials.
fn poly_bracket(a: &[(Word, u32)], b: &[(Word, u32)], p: u32) -> SVec {
    let mut acc = Acc::new(p);
    for &(wa, ca) in a {
        for &(wb, cb) in b {
            let c = ffla::mul(ca, cb, p);
            acc.add(concat(wa, wb), c);
            acc.add(concat(wb, wa), p - c);
        }
    }
    acc.into_svec()
}

/// Expansions P(w) of Lyndon words, memoized.
#[derive(Clone, Debug, Default)]
struct Expander {
    p: u32,
    memo: HashMap<Word, SVec>,
}

impl Expander {
    fn new(p: u32) -> Self {
        Expander { p, memo: HashMap::new() }
    }

    fn expand(&mut self, w: Word) -> SVec {
        if let Some(v) = self.memo.get(&w) {
            return v.clone();
        }
        let ls = word_letters(w);
        let v = if ls.len() == 1 {
            vec![(w, 1)]
        } else {
            let (u, t) = standard_factorization(&ls);
            let a = self.expand(word_from_letters(&u));
            let b = self.expand(word_from_letters(&t));
            poly_bracket(&a, &b, self.p)
        };
        self.memo.insert(w, v.clone());
        v
    }

    /// Hall coordinates of a Lie polynomial.
    fn hall(&mut self, v: &[(Word, u32)]) -> Result<Vec<(Word, u32)>, Error> {
        let p = self.p;
        let mut acc = Acc::new(p);
        acc.add_vec(v, 1);
        let mut cur = acc.into_svec();
        let mut out = Vec::new();
        while let Some(&(w, c)) = cur.first() {
            if !is_lyndon(&word_letters(w)) {
                return Err(Error::Invariant("polynomial is not a Lie element".into()));
            }
            let e = self.expand(w);
            cur = crate::sparse::lin(1, &cur, p - c, &e, p);
            out.push((w, c));
        }
        Ok(out)
    }
}

/// A free Lie algebra element in Hall coordinates: (Lyndon word, coefficient) pairs in
/// increasing word order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeLieElement {
    pub p: u32,
    pub terms: Vec<(Word, u32)>,
}

impl FreeLieElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Rendering in bracket notation with the given generator names.
    pub fn render(&self, names: &[String]) -> String {
        fn bracket(ls: &[usize], names: &[String]) -> String {
            if ls.len() == 1 {
                return names[ls[0]].clone();
            }
            let (u, v) = standard_factorization(ls);
            format!("[{},{}]", bracket(&u, names), bracket(&v, names))
        }
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, &(w, c)) in self.terms.iter().enumerate() {
            let sc = ffla::signed(c, self.p);
            let b = bracket(&word_letters(w), names);
            let mag = sc.abs();
            let body = if mag == 1 { b } else { format!("{mag}*{b}") };
            match (i, sc < 0) {
                (0, false) => s.push_str(&body),
                (0, true) => s += &format!("-{body}"),
                (_, false) => s += &format!(" + {body}"),
                (_, true) => s += &format!(" - {body}"),
            }
        }
        s
    }
}

/// One generator: target coordinates and a chosen degree ≥ 0.
#[derive(Clone, Debug)]
pub struct FreeGenerator {
    pub name: String,
    pub vector: Vec<u32>,
    pub degree: i32,
}

/// Grading of a component: (degree, torus weight).
pub type Grade = (i32, Vec<i64>);

#[derive(Clone, Debug)]
struct ComponentData {
    zero_letters: usize,
    /// Lyndon words of the component.
    hall_dim: usize,
    relations: Vec<SVec>,
    /// Basis of the consequences of lower relations.
    consequences: Vec<SVec>,
}

/// Minimal relations, component by component.
#[derive(Clone, Debug)]
pub struct RelationSet {
    pub p: u32,
    pub names: Vec<String>,
    pub max_degree: i32,
    /// Per degree: count of degree-0 letters from which on every component is spanned by
    /// consequences.
    pub saturation: BTreeMap<i32, usize>,
    /// Per degree: dimension of the span of evaluated brackets.
    pub image_dims: BTreeMap<i32, usize>,
    gen_grades: Vec<Grade>,
    components: BTreeMap<Grade, ComponentData>,
}

/// A relation with its component.
#[derive(Clone, Debug)]
pub struct Relation {
    pub grade: Grade,
    pub zero_letters: usize,
    pub element: FreeLieElement,
}

impl RelationSet {
    /// All relations ordered by degree, count of degree-0 letters and weight.
    pub fn relations(&self) -> Vec<Relation> {
        let mut out = Vec::new();
        let mut ex = Expander::new(self.p);
        let mut keys: Vec<(&Grade, &ComponentData)> = self.components.iter().collect();
        keys.sort_by(|a, b| (a.0 .0, a.1.zero_letters, &a.0 .1).cmp(&(b.0 .0, b.1.zero_letters, &b.0 .1)));
        for (g, c) in keys {
            for r in &c.relations {
                let terms = ex.hall(r).expect("relations are Lie elements");
                out.push(Relation { grade: g.clone(), zero_letters: c.zero_letters, element: FreeLieElement { p: self.p, terms } });
            }
        }
        out
    }

    pub fn count(&self) -> usize {
        self.components.values().map(|c| c.relations.len()).sum()
    }

    /// Relations per degree.
    pub fn counts_by_degree(&self) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for (g, c) in &self.components {
            if !c.relations.is_empty() {
                *m.entry(g.0).or_insert(0) += c.relations.len();
            }
        }
        m
    }

    /// Plain-text listing, one relation per line: `deg <d>: <relation> = 0`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in self.relations() {
            s += &format!("deg {}: {} = 0\n", r.grade.0, r.element.render(&self.names));
        }
        s
    }

    fn grade_of_word(&self, w: Word) -> Grade {
        grade_of_letters(&self.gen_grades, &word_letters(w))
    }

    /// Parse a bracket expression such as `[x1,[x1,x2]] - 2*[x2,[x1,x2]]` over the
    /// generator names.
    pub fn parse(&self, text: &str) -> Result<SVec, Error> {
        parse_lie(text, &self.names, self.p)
    }

    /// Compare with another list of relations: per component, the span of the
    /// relations together with the consequences of lower components must agree, and
    /// the other list must be independent modulo consequences.
    pub fn compare(&self, other: &[SVec]) -> Result<RelationMatch, Error> {
        let p = self.p;
        let mut by_grade: BTreeMap<Grade, Vec<(usize, &SVec)>> = BTreeMap::new();
        for (i, r) in other.iter().enumerate() {
            let Some(&(w0, _)) = r.first() else {
                return Err(Error::BadInput(format!("relation {i} is zero")));
            };
            let g = self.grade_of_word(w0);
            if r.iter().any(|&(w, _)| self.grade_of_word(w) != g) {
                return Err(Error::BadInput(format!("relation {i} is not homogeneous")));
            }
            by_grade.entry(g).or_default().push((i, r));
        }
        let mut m = RelationMatch::default();
        let mut ex = Expander::new(p);
        let render = |v: &SVec, ex: &mut Expander| ex.hall(v).map(|t| FreeLieElement { p, terms: t }.render(&self.names)).unwrap_or_else(|_| "?".into());
        for (g, c) in &self.components {
            let theirs = by_grade.remove(g).unwrap_or_default();
            let mut base = Echelon::new(p);
            for v in &c.consequences {
                base.insert(v);
            }
            let mut with_ours = base.clone();
            for r in &c.relations {
                with_ours.insert(r);
            }
            let mut with_theirs = base.clone();
            for (i, r) in &theirs {
                if !with_theirs.insert(r) {
                    m.redundant.push(*i);
                }
            }
            for (i, r) in &theirs {
                if !with_ours.contains(r) {
                    m.unmatched.push((*i, render(r, &mut ex)));
                }
            }
            for r in &c.relations {
                if !with_theirs.contains(r) {
                    m.missing.push(render(r, &mut ex));
                }
            }
        }
        for (_, rest) in by_grade {
            for (i, r) in rest {
                m.unmatched.push((i, render(r, &mut ex)));
            }
        }
        Ok(m)
    }

    /// Re-evaluate every relation in `target` through its Hall coordinates.
    pub fn verify(&self, target: &GradedAlgebra, gens: &[FreeGenerator]) -> Result<(), Error> {
        let p = self.p;
        let mut memo: HashMap<Word, Vec<u32>> = gens.iter().enumerate().map(|(i, g)| (word_from_letters(&[i]), g.vector.clone())).collect();
        for r in self.relations() {
            let mut v = vec![0; target.dim()];
            for &(w, c) in &r.element.terms {
                ffla::axpy(&mut v, c, &eval(w, &mut memo, target), p);
            }
            if v.iter().any(|&x| x != 0) {
                return Err(Error::Invariant(format!("relation {} does not vanish", r.element.render(&self.names))));
            }
        }
        Ok(())
    }

    /// Dimensions per degree of the free Lie algebra modulo the ideal generated by the
    /// relations, leaving out the one at index `skip`. Components past the saturation
    /// count are taken to lie in the ideal.
    pub fn quotient_dims(&self, skip: Option<usize>) -> BTreeMap<i32, usize> {
        let p = self.p;
        let mut kept: BTreeMap<&Grade, Vec<&SVec>> = BTreeMap::new();
        let mut idx = 0;
        let mut keys: Vec<(&Grade, &ComponentData)> = self.components.iter().collect();
        keys.sort_by(|a, b| (a.0 .0, a.1.zero_letters, &a.0 .1).cmp(&(b.0 .0, b.1.zero_letters, &b.0 .1)));
        for (g, c) in &keys {
            for r in &c.relations {
                if Some(idx) != skip {
                    kept.entry(*g).or_default().push(r);
                }
                idx += 1;
            }
        }
        let degrees: Vec<i32> = self.gen_grades.iter().map(|g| g.0).collect();
        let d_start = if degrees.contains(&0) { 0 } else { *degrees.iter().min().unwrap() };
        let mut ex = Expander::new(p);
        let mut ideal: BTreeMap<&Grade, Vec<SVec>> = BTreeMap::new();
        let mut out = BTreeMap::new();
        for (g, c) in keys {
            let mut ech = Echelon::new(p);
            for (i, gg) in self.gen_grades.iter().enumerate() {
                let lower: Grade = (g.0 - gg.0, g.1.iter().zip(&gg.1).map(|(a, b)| a - b).collect());
                let x = vec![(word_from_letters(&[i]), 1)];
                let lk = if gg.0 == 0 { c.zero_letters.wrapping_sub(1) } else { c.zero_letters };
                if lower.0 >= d_start && lk != usize::MAX && self.saturation.get(&lower.0).is_some_and(|&s| lk > s) {
                    for w in component_words(&degrees, &self.gen_grades, &lower, lk).expect("words fit") {
                        ech.insert(&poly_bracket(&x, &ex.expand(w), p));
                    }
                } else if let Some(vs) = ideal.get(&lower) {
                    for v in vs {
                        ech.insert(&poly_bracket(&x, v, p));
                    }
                }
            }
            for r in kept.get(g).into_iter().flatten() {
                ech.insert(r);
            }
            *out.entry(g.0).or_insert(0) += c.hall_dim - ech.dim();
            ideal.insert(g, ech.basis().cloned().collect());
        }
        out
    }
}

fn grade_of_letters(gen_grades: &[Grade], ls: &[usize]) -> Grade {
    let mut d = 0;
    let mut wt = vec![0i64; gen_grades[0].1.len()];
    for &l in ls {
        d += gen_grades[l].0;
        for (a, b) in wt.iter_mut().zip(&gen_grades[l].1) {
            *a += b;
        }
    }
    (d, wt)
}

/// Lyndon words of one component with `k` letters of degree 0.
fn component_words(degrees: &[i32], gen_grades: &[Grade], g: &Grade, k: usize) -> Result<Vec<Word>, Error> {
    let mut ws = Vec::new();
    words_rec(degrees, g.0, k, 0, &mut Vec::new(), &mut ws)?;
    Ok(ws.into_iter().filter(|&w| grade_of_letters(gen_grades, &word_letters(w)) == *g).collect())
}

/// Outcome of [`RelationSet::compare`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationMatch {
    /// Given relations (by index) not in the span of ours and consequences.
    pub unmatched: Vec<(usize, String)>,
    /// Our relations not in the span of the given ones and consequences.
    pub missing: Vec<String>,
    /// Given relations dependent on earlier ones modulo consequences.
    pub redundant: Vec<usize>,
}

impl RelationMatch {
    pub fn is_exact(&self) -> bool {
        self.unmatched.is_empty() && self.missing.is_empty() && self.redundant.is_empty()
    }
}

/// Parse a bracket expression into a word polynomial.
pub fn parse_lie(text: &str, names: &[String], p: u32) -> Result<SVec, Error> {
    let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).map(|c| if c == '−' { '-' } else { c }).collect();
    let err = |m: &str| Error::BadInput(format!("cannot parse relation {text:?}: {m}"));
    fn atom(s: &[char], pos: &mut usize, names: &[String], p: u32) -> Result<SVec, String> {
        if s.get(*pos) == Some(&'[') {
            *pos += 1;
            let a = atom(s, pos, names, p)?;
            if s.get(*pos) != Some(&',') {
                return Err("expected ','".into());
            }
            *pos += 1;
            let b = atom(s, pos, names, p)?;
            if s.get(*pos) != Some(&']') {
                return Err("expected ']'".into());
            }
            *pos += 1;
            return Ok(poly_bracket(&a, &b, p));
        }
        let start = *pos;
        while *pos < s.len() && (s[*pos].is_alphanumeric() || s[*pos] == '_') {
            *pos += 1;
        }
        let name: String = s[start..*pos].iter().collect();
        let i = names.iter().position(|n| *n == name).ok_or(format!("unknown generator {name:?}"))?;
        Ok(vec![(word_from_letters(&[i]), 1)])
    }
    let mut pos = 0;
    let mut acc = Acc::new(p);
    while pos < s.len() {
        let mut sign = 1i64;
        if pos > 0 || s[0] == '+' || s[0] == '-' {
            match s.get(pos) {
                Some('+') => pos += 1,
                Some('-') => {
                    sign = -1;
                    pos += 1
                }
                _ if pos == 0 => {}
                _ => return Err(err("expected '+' or '-'")),
            }
        }
        let start = pos;
        while pos < s.len() && s[pos].is_ascii_digit() {
            pos += 1;
        }
        let mut c = 1i64;
        if pos > start {
            c = s[start..pos].iter().collect::<String>().parse().map_err(|_| err("bad coefficient"))?;
            if s.get(pos) != Some(&'*') {
                return Err(err("expected '*' after coefficient"));
            }
            pos += 1;
        }
        let v = atom(&s, &mut pos, names, p).map_err(|m| err(&m))?;
        acc.add_vec(&v, ffla::reduce(sign * c, p));
    }
    Ok(acc.into_svec())
}

/// Hall basis of the degree-d component for generators of positive degrees.
pub fn hall_basis(degrees: &[i32], d: i32) -> Result<Vec<Word>, Error> {
    if degrees.iter().any(|&e| e <= 0) || d < 1 {
        return Err(Error::BadInput("hall_basis needs positive generator degrees and d ≥ 1".into()));
    }
    if degrees.len() > MAX_GENERATORS {
        return Err(Error::BadInput(format!("at most {MAX_GENERATORS} generators")));
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    words_rec(degrees, d, usize::MAX, 0, &mut cur, &mut out)?;
    Ok(out)
}

/// Lyndon words with positive-letter degree `d` and exactly `k` letters of degree 0.
fn words_rec(degrees: &[i32], d: i32, k: usize, used_zero: usize, cur: &mut Vec<usize>, out: &mut Vec<Word>) -> Result<(), Error> {
    if d == 0 && (k == usize::MAX || used_zero == k) && !cur.is_empty() && is_lyndon(cur) {
        out.push(word_from_letters(cur));
    }
    if d == 0 && (k == usize::MAX || used_zero == k) {
        return Ok(());
    }
    if cur.len() == MAX_WORD {
        return Err(Error::CapReached(MAX_WORD as i32));
    }
    for (i, &e) in degrees.iter().enumerate() {
        if e == 0 {
            if k == usize::MAX || used_zero >= k {
                continue;
            }
        } else if e > d {
            continue;
        }
        cur.push(i);
        let z = used_zero + (e == 0) as usize;
        words_rec(degrees, d - e, k, z, cur, out)?;
        cur.pop();
    }
    Ok(())
}

/// Dimension of the degree-d component of the free Lie algebra on n generators of
/// degree 1 (necklace formula).
pub fn witt_dimension(n: u64, d: u64) -> u64 {
    fn mobius(mut n: u64) -> i64 {
        let mut r = 1;
        let mut q = 2;
        while q * q <= n {
            if n.is_multiple_of(q) {
                n /= q;
                if n.is_multiple_of(q) {
                    return 0;
                }
                r = -r;
            }
            q += 1;
        }
        if n > 1 {
            r = -r;
        }
        r
    }
    let s: i64 = (1..=d).filter(|e| d.is_multiple_of(*e)).map(|e| mobius(e) * n.pow((d / e) as u32) as i64).sum();
    (s / d as i64) as u64
}

/// Minimal relations of the subalgebra of `target` generated by `gens`, through degree
/// `max_degree`. Every positive target component up to that degree must be reached.
pub fn minimal_relations(target: &GradedAlgebra, gens: &[FreeGenerator], max_degree: i32) -> Result<RelationSet, Error> {
    let p = target.p();
    let n = target.dim();
    if gens.is_empty() || gens.len() > MAX_GENERATORS {
        return Err(Error::BadInput(format!("need 1 to {MAX_GENERATORS} generators")));
    }
    let labels = target.labels();
    let mut gen_grades = Vec::new();
    for g in gens {
        if g.vector.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.vector.len() });
        }
        if g.degree < 0 {
            return Err(Error::BadInput(format!("generator {} has negative degree", g.name)));
        }
        let lead = g.vector.iter().position(|&c| c != 0).ok_or_else(|| Error::BadInput(format!("generator {} is zero", g.name)))?;
        let w = &labels[lead].weight;
        if g.vector.iter().enumerate().any(|(i, &c)| c != 0 && (labels[i].weight != *w || labels[i].degree != labels[lead].degree)) {
            return Err(Error::BadInput(format!("generator {} is not a homogeneous weight vector", g.name)));
        }
        gen_grades.push((g.degree, w.clone()));
    }
    let degrees: Vec<i32> = gens.iter().map(|g| g.degree).collect();
    let has_zero = degrees.contains(&0);
    let d_start = if has_zero { 0 } else { *degrees.iter().min().unwrap() };
    let mut ex = Expander::new(p);
    let mut evals: HashMap<Word, Vec<u32>> = HashMap::new();
    for (i, g) in gens.iter().enumerate() {
        evals.insert(word_from_letters(&[i]), g.vector.clone());
    }
    let mut components: BTreeMap<Grade, ComponentData> = BTreeMap::new();
    // kernels, or None when the component is spanned by consequences
    let mut kernels: BTreeMap<Grade, Vec<SVec>> = BTreeMap::new();
    let mut saturation = BTreeMap::new();
    let mut image_dims = BTreeMap::new();
    let grade_of = |ls: &[usize]| grade_of_letters(&gen_grades, ls);
    let mut total = Subspace::zero(p, n);
    for d in d_start..=max_degree {
        let mut image = Subspace::zero(p, n);
        let mut k = 0usize;
        loop {
            if k > ZERO_LETTER_CAP {
                return Err(Error::CapReached(ZERO_LETTER_CAP as i32));
            }
            let mut words = Vec::new();
            let mut cur = Vec::new();
            words_rec(&degrees, d, k, 0, &mut cur, &mut words)?;
            let mut by_grade: BTreeMap<Grade, Vec<Word>> = BTreeMap::new();
            for w in words {
                by_grade.entry(grade_of(&word_letters(w))).or_default().push(w);
            }
            let mut all_full = true;
            for (g, ws) in by_grade {
                // evaluation
                let mut cols = Vec::with_capacity(ws.len());
                for &w in &ws {
                    cols.push(eval(w, &mut evals, target));
                }
                let mut m = MatFp::zeros(p, n, ws.len());
                for (j, c) in cols.iter().enumerate() {
                    image.insert(c);
                    for (r, &x) in c.iter().enumerate() {
                        if x != 0 {
                            m.set(r, j, x);
                        }
                    }
                }

                let kernel: Vec<SVec> = m
                    .kernel_basis()
                    .into_iter()
                    .map(|kv| {
                        let mut acc = Acc::new(p);
                        for (j, &c) in kv.iter().enumerate() {
                            if c != 0 {
                                acc.add_vec(&ex.expand(ws[j]), c);
                            }
                        }
                        acc.into_svec()
                    })
                    .collect();
                // consequences
                let mut cons = Echelon::new(p);
                for (i, gg) in gen_grades.iter().enumerate() {
                    let lower: Grade = (g.0 - gg.0, g.1.iter().zip(&gg.1).map(|(a, b)| a - b).collect());
                    let x = vec![(word_from_letters(&[i]), 1)];
                    let lk = if gg.0 == 0 { k.wrapping_sub(1) } else { k };
                    let lower_full = lower.0 >= d_start && lk != usize::MAX && saturation.get(&lower.0).is_some_and(|&s| lk > s);
                    if lower_full {
                        // beyond saturation the whole component consists of consequences
                        for w in component_words(&degrees, &gen_grades, &lower, lk)? {
                            let e = ex.expand(w);
                            cons.insert(&poly_bracket(&x, &e, p));
                        }
                    } else if let Some(vs) = kernels.get(&lower) {
                        for v in vs {
                            cons.insert(&poly_bracket(&x, v, p));
                        }
                    }
                }
                let consequences: Vec<SVec> = cons.basis().cloned().collect();
                let mut with = cons;
                let mut relations = Vec::new();
                for v in &kernel {
                    if with.insert(v) {
                        relations.push(v.clone());
                    }
                }
                if with.dim() != kernel.len() {
                    return Err(Error::Invariant(format!("consequences leave the evaluation kernel in component {g:?}")));
                }
                if consequences.len() < ws.len() {
                    all_full = false;
                }
                components.insert(g.clone(), ComponentData { zero_letters: k, hall_dim: ws.len(), relations, consequences });
                kernels.insert(g, kernel);
            }
            if !has_zero {
                saturation.insert(d, 0);
                break;
            }
            let generator_next = d == 0 && k == 0;
            let lower_ok = degrees.iter().filter(|&&e| e > 0 && d - e >= d_start).all(|&e| saturation.get(&(d - e)).is_some_and(|&s| k + 1 >= s));
            if all_full && !generator_next && lower_ok {
                saturation.insert(d, k);
                break;
            }
            k += 1;
        }
        image_dims.insert(d, image.dim());
        total = total.sum(&image)?;
    }
    let generated = target.subalgebra_generated_by("gen", &gens.iter().map(|g| g.vector.clone()).collect::<Vec<_>>())?;
    if total.dim() < generated.dim() {
        return Err(Error::GeneratorsInsufficient(format!("{max_degree}: brackets span {} of the generated {}", total.dim(), generated.dim())));
    }
    Ok(RelationSet { p, names: gens.iter().map(|g| g.name.clone()).collect(), max_degree, saturation, image_dims, gen_grades, components })
}

fn eval(w: Word, memo: &mut HashMap<Word, Vec<u32>>, target: &GradedAlgebra) -> Vec<u32> {
    if let Some(v) = memo.get(&w) {
        return v.clone();
    }
    let ls = word_letters(w);
    let (u, v) = standard_factorization(&ls);
    let a = eval(word_from_letters(&u), memo, target);
    let b = eval(word_from_letters(&v), memo, target);
    let r = target.bracket(&a, &b);
    memo.insert(w, r.clone());
    r
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
