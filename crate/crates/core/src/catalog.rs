//! Seed realizations stored as checksummed text files, and constructors for the
//! catalog algebras.
//!
//! File format, one directive per line (`#` starts a comment):
//!
//! ```text
//! name me5
//! p 5
//! heights 1 1 1 1 1
//! weights 1 1 2 3 3
//! torus 1 0 1 2 1          (one line per grading operator, lifted coefficients)
//! powers divided           (or `ordinary`: u^k means k!·u^(k))
//! field <degree> <label> = <expr>
//! dims -3:2 -2:1 -1:2 0:4  (sanity check)
//! ```
//!
//! An expression is a signed sum of terms `[c*]u1^2*u3*d4`; every term has exactly one
//! `d<i>` factor, and `u<i>^k` without a `d` factor is not allowed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::contact::{br2a_generators, contact_seed, ContactForm};
use crate::divpow::{DivPowRing, DividedPoly, Heights, MultiIndex, WeightVector};
use crate::ffla;
use crate::glie::{self, BasisLabel, GradedAlgebra, WeightMode};
use crate::prolong::{complete_prolong, partial_prolong, ProlongOptions, ProlongResult, ProlongSeed};
use crate::vfield::{self, GradedFieldSpace, VectorField};
use crate::weights;
use crate::Error;

/// Embedded seed files with their SHA-256 digests.
const SEED_FILES: &[(&str, &str, &str)] = &[
    ("me5", include_str!("../data/me5.seed"), "4a3343f2cf96f61bd520c31a2ceb5515ea7de481fece502c61a690f4f2b783f6"),
    ("dy", include_str!("../data/dy.seed"), "a384d5da40adaa2fe951df1b042948538f3ddf7fbbed850dbc496c158460f96e"),
    ("er", include_str!("../data/er.seed"), "6a94161aa14a6b9e05e06853dcc7aaba081c023b2bd99d559944d10e7d5d7aaa"),
    ("by", include_str!("../data/by.seed"), "4a44a3f262e7a9969ac9d72be1ec04ec146a408cfd058ad356ff9fce96f2f3f0"),
    ("my", include_str!("../data/my.seed"), "9a60f56c983f3b6a2cd27b7c8fe5908baf66c0ea9d29937bf74c1fe6c59c9632"),
];

/// Environment variable naming an override directory for seed files.
pub const SEED_DIR_ENV: &str = "MODLIE_SEED_DIR";

pub fn sha256_hex(text: &str) -> String {
    let d = Sha256::digest(text.as_bytes());
    d.iter().map(|b| format!("{b:02x}")).collect()
}

/// One term c·u^r·∂_i as written in a file (exponents are read per `powers`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTerm {
    pub coeff: i64,
    pub exps: Vec<u32>,
    pub coord: usize,
}

#[derive(Clone, Debug)]
pub struct SeedSpec {
    pub name: String,
    pub p: u32,
    pub heights: Heights,
    pub weights: WeightVector,
    pub torus: Vec<Vec<i64>>,
    pub divided: bool,
    pub fields: Vec<(i32, String, Vec<RawTerm>)>,
    pub dims: BTreeMap<i32, usize>,
    pub checksum: String,
}

fn parse_err(src: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { source_name: src.to_string(), line, msg: msg.into() }
}

fn parse_ints<T: std::str::FromStr>(src: &str, line: usize, toks: &[&str]) -> Result<Vec<T>, Error> {
    toks.iter().map(|t| t.parse::<T>().map_err(|_| parse_err(src, line, format!("bad number {t}")))).collect()
}

/// Parse a field expression over m indeterminates.
pub fn parse_expr(src: &str, line: usize, text: &str, m: usize) -> Result<Vec<RawTerm>, Error> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('−', "-");
    let mut terms = Vec::new();
    let mut chunks: Vec<(i64, String)> = Vec::new();
    let mut sign = 1i64;
    let mut cur = String::new();
    for ch in s.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            chunks.push((sign, std::mem::take(&mut cur)));
            sign = if ch == '-' { -1 } else { 1 };
        } else if ch == '+' || ch == '-' {
            if ch == '-' {
                sign = -sign;
            }
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(parse_err(src, line, "empty term"));
    }
    chunks.push((sign, cur));
    for (sign, chunk) in chunks {
        let mut coeff = sign;
        let mut exps = vec![0u32; m];
        let mut coord = None;
        for f in chunk.split('*') {
            if let Some(rest) = f.strip_prefix('d') {
                let i: usize = rest.parse().map_err(|_| parse_err(src, line, format!("bad factor {f}")))?;
                if i == 0 || i > m || coord.is_some() {
                    return Err(parse_err(src, line, format!("bad derivation {f}")));
                }
                coord = Some(i - 1);
            } else if let Some(rest) = f.strip_prefix('u') {
                let (v, e) = match rest.split_once('^') {
                    Some((v, e)) => (v, e.trim_matches(|c| c == '(' || c == ')')),
                    None => (rest, "1"),
                };
                let i: usize = v.parse().map_err(|_| parse_err(src, line, format!("bad factor {f}")))?;
                let e: u32 = e.parse().map_err(|_| parse_err(src, line, format!("bad exponent {f}")))?;
                if i == 0 || i > m {
                    return Err(parse_err(src, line, format!("bad indeterminate {f}")));
                }
                exps[i - 1] += e;
            } else {
                let c: i64 = f.parse().map_err(|_| parse_err(src, line, format!("bad factor {f}")))?;
                coeff *= c;
            }
        }
        let coord = coord.ok_or_else(|| parse_err(src, line, format!("term {chunk} has no derivation")))?;
        terms.push(RawTerm { coeff, exps, coord });
    }
    Ok(terms)
}

/// Parse a seed file.
pub fn parse_seed(src: &str, text: &str) -> Result<SeedSpec, Error> {
    let mut name = None;
    let mut p = None;
    let mut heights = None;
    let mut weights = None;
    let mut torus = Vec::new();
    let mut divided = true;
    let mut fields = Vec::new();
    let mut dims = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "name" => name = toks.get(1).map(|s| s.to_string()),
            "p" => p = Some(parse_ints::<u32>(src, ln, &toks[1..])?.first().copied().ok_or_else(|| parse_err(src, ln, "missing p"))?),
            "heights" => heights = Some(Heights(parse_ints(src, ln, &toks[1..])?)),
            "weights" => weights = Some(WeightVector(parse_ints(src, ln, &toks[1..])?)),
            "torus" => torus.push(parse_ints(src, ln, &toks[1..])?),
            "powers" => match toks.get(1) {
                Some(&"divided") => divided = true,
                Some(&"ordinary") => divided = false,
                _ => return Err(parse_err(src, ln, "powers must be divided or ordinary")),
            },
            "field" => {
                let m = weights.as_ref().map(|w: &WeightVector| w.0.len()).ok_or_else(|| parse_err(src, ln, "weights must precede fields"))?;
                let (head, expr) = line.split_once('=').ok_or_else(|| parse_err(src, ln, "missing ="))?;
                let h: Vec<&str> = head.split_whitespace().collect();
                if h.len() != 3 {
                    return Err(parse_err(src, ln, "expected: field <degree> <label> = <expr>"));
                }
                let d: i32 = h[1].parse().map_err(|_| parse_err(src, ln, "bad degree"))?;
                fields.push((d, h[2].to_string(), parse_expr(src, ln, expr, m)?));
            }
            "dims" => {
                for t in &toks[1..] {
                    let (d, n) = t.split_once(':').ok_or_else(|| parse_err(src, ln, "dims entries are degree:dim"))?;
                    let d: i32 = d.parse().map_err(|_| parse_err(src, ln, "bad degree"))?;
                    let n: usize = n.parse().map_err(|_| parse_err(src, ln, "bad dim"))?;
                    dims.insert(d, n);
                }
            }
            other => return Err(parse_err(src, ln, format!("unknown directive {other}"))),
        }
    }
    let weights = weights.ok_or_else(|| parse_err(src, 0, "missing weights"))?;
    let heights = heights.unwrap_or_else(|| Heights::ones(weights.0.len()));
    if heights.0.len() != weights.0.len() {
        return Err(parse_err(src, 0, "heights and weights differ in length"));
    }
    Ok(SeedSpec {
        name: name.ok_or_else(|| parse_err(src, 0, "missing name"))?,
        p: p.ok_or_else(|| parse_err(src, 0, "missing p"))?,
        heights,
        weights,
        torus,
        divided,
        fields,
        dims,
        checksum: sha256_hex(text),
    })
}

fn factorial_mod(n: u32, p: u32) -> u32 {
    (1..=n).fold(1, |a, k| ffla::mul(a, k % p, p))
}

impl SeedSpec {
    /// Realize one transcribed field over the given ring.
    pub fn realize(&self, ring: &Arc<DivPowRing>, terms: &[RawTerm]) -> Result<VectorField, Error> {
        let p = ring.p();
        let mut out = Vec::new();
        for t in terms {
            let mut c = ffla::reduce(t.coeff, p);
            if !self.divided {
                for &e in &t.exps {
                    c = ffla::mul(c, factorial_mod(e, p), p);
                }
            }
            if c == 0 {
                continue;
            }
            let r = MultiIndex::from_slice(&t.exps);
            if !ring.admissible(r) {
                return Err(Error::BadInput(format!("{}: exponent {:?} not admissible for heights {:?}", self.name, t.exps, ring.heights().0)));
            }
            out.push((r, t.coord, c as i64));
        }
        VectorField::from_terms(ring, &out)
    }

    /// Ring with the file heights or an override.
    pub fn ring(&self, heights: Option<&Heights>) -> Result<Arc<DivPowRing>, Error> {
        DivPowRing::new(self.p, heights.cloned().unwrap_or_else(|| self.heights.clone()))
    }

    /// Realized fields grouped by degree.
    pub fn parts(&self, ring: &Arc<DivPowRing>) -> Result<BTreeMap<i32, Vec<(String, VectorField)>>, Error> {
        let mut parts: BTreeMap<i32, Vec<(String, VectorField)>> = BTreeMap::new();
        for (d, nm, terms) in &self.fields {
            parts.entry(*d).or_default().push((nm.clone(), self.realize(ring, terms)?));
        }
        let found: BTreeMap<i32, usize> = parts.iter().map(|(d, v)| (*d, v.len())).collect();
        if !self.dims.is_empty() && found != self.dims {
            return Err(Error::Invariant(format!("{}: transcribed dims {found:?} differ from declared {:?}", self.name, self.dims)));
        }
        Ok(parts)
    }

    pub fn seed(&self, heights: Option<&Heights>) -> Result<crate::prolong::ProlongSeed, Error> {
        let ring = self.ring(heights)?;
        let parts = self.parts(&ring)?;
        crate::prolong::ProlongSeed::new(&self.name, &ring, self.weights.clone(), parts, self.torus.clone())
    }
}

/// Access to seed files, embedded or from an override directory; every load is
/// checked against the embedded digest.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    dir: Option<PathBuf>,
}

impl Catalog {
    pub fn embedded() -> Self {
        Catalog { dir: None }
    }

    pub fn with_dir(dir: impl AsRef<Path>) -> Self {
        Catalog { dir: Some(dir.as_ref().to_path_buf()) }
    }

    /// Uses the directory from the environment when set.
    pub fn from_env() -> Self {
        match std::env::var_os(SEED_DIR_ENV) {
            Some(d) if !d.is_empty() => Catalog::with_dir(PathBuf::from(d)),
            _ => Catalog::embedded(),
        }
    }

    pub fn names() -> Vec<&'static str> {
        SEED_FILES.iter().map(|f| f.0).collect()
    }

    pub fn text(&self, name: &str) -> Result<String, Error> {
        let (_, embedded, digest) = SEED_FILES.iter().find(|f| f.0 == name).ok_or_else(|| Error::BadInput(format!("unknown seed {name}")))?;
        let text = match &self.dir {
            Some(d) => std::fs::read_to_string(d.join(format!("{name}.seed"))).map_err(|e| Error::BadInput(format!("cannot read seed {name}: {e}")))?,
            None => embedded.to_string(),
        };
        let found = sha256_hex(&text);
        if found != *digest {
            return Err(Error::Checksum { name: name.to_string(), expected: digest.to_string(), found });
        }
        Ok(text)
    }

    pub fn spec(&self, name: &str) -> Result<SeedSpec, Error> {
        let text = self.text(name)?;
        parse_seed(&format!("{name}.seed"), &text)
    }
}

// Constructors of the catalog algebras.

fn embedded_seed(name: &str, heights: Option<&Heights>) -> Result<ProlongSeed, Error> {
    Catalog::from_env().spec(name)?.seed(heights)
}

/// Melikyan seed over F_5 (five indeterminates, weights 1 1 2 3 3).
pub fn me5_seed() -> Result<ProlongSeed, Error> {
    embedded_seed("me5", None)
}

pub fn me5_seed_with_heights(heights: &Heights) -> Result<ProlongSeed, Error> {
    embedded_seed("me5", Some(heights))
}

/// Skryabin DY seed over F_3 (ten indeterminates).
pub fn dy_seed() -> Result<ProlongSeed, Error> {
    embedded_seed("dy", None)
}

pub fn by_seed() -> Result<ProlongSeed, Error> {
    embedded_seed("by", None)
}

pub fn my_seed() -> Result<ProlongSeed, Error> {
    embedded_seed("my", None)
}

pub fn er_seed() -> Result<ProlongSeed, Error> {
    embedded_seed("er", None)
}

/// Replace g_0 by the kernel of tr(ad|g_{-1}) restricted to its weight-zero part; the
/// root vectors are kept.
pub fn traceless_cut(seed: &ProlongSeed, name: &str) -> Result<ProlongSeed, Error> {
    let p = seed.ring().p();
    let g0 = seed.part(0).ok_or_else(|| Error::BadInput("seed has no degree-0 part".into()))?;
    let minus1 = seed.part(-1).unwrap();
    let ech = minus1.echelon(p);
    let mut kept = Vec::new();
    let mut zero = Vec::new();
    for i in 0..g0.dim() {
        let (nm, f) = (g0.names[i].clone(), g0.fields[i].clone());
        if g0.weights[i].iter().all(|&x| x == 0) {
            let mut tr = 0;
            for (a, e) in minus1.fields.iter().enumerate() {
                let z = f.bracket(e)?;
                let combo = ech.express(z.svec()).ok_or_else(|| Error::Invariant(format!("{nm} does not preserve g_-1")))?;
                tr = ffla::add(tr, combo.iter().find(|c| c.0 == a).map_or(0, |c| c.1), p);
            }
            zero.push((nm, f, tr));
        } else {
            kept.push((nm, f));
        }
    }
    match zero.iter().position(|z| z.2 != 0) {
        None => kept.extend(zero.into_iter().map(|z| (z.0, z.1))),
        Some(j) => {
            let (nj, fj, tj) = zero[j].clone();
            let tinv = ffla::inv(tj, p);
            for (i, (ni, fi, ti)) in zero.into_iter().enumerate() {
                if i != j {
                    let c = ffla::neg(ffla::mul(ti, tinv, p), p);
                    let label = if ti == 0 { ni } else { format!("{ni}-{}{nj}", ffla::signed(ffla::neg(c, p), p)) };
                    kept.push((label, fi.lin(1, &fj, c)));
                }
            }
        }
    }
    let mut s = seed.with_g0(kept)?;
    s.name = name.to_string();
    Ok(s)
}

/// MY with g_0 cut to sl(3).
pub fn smy_seed() -> Result<ProlongSeed, Error> {
    traceless_cut(&my_seed()?, "smy")
}

/// BY with g_0 cut to sl(3).
pub fn sby_seed() -> Result<ProlongSeed, Error> {
    traceless_cut(&by_seed()?, "sby")
}

fn field(ring: &Arc<DivPowRing>, terms: &[(&[u32], usize, i64)]) -> Result<VectorField, Error> {
    let t: Vec<(MultiIndex, usize, i64)> = terms.iter().map(|&(r, i, c)| (MultiIndex::from_slice(r), i, c)).collect();
    VectorField::from_terms(ring, &t)
}

/// S(3;(N_1,N_2,1)) graded by deg u_1 = deg u_2 = 0, deg u_3 = 1.
pub fn me3_algebra(p: u32, n: &[u32]) -> Result<GradedAlgebra, Error> {
    if n.len() != 2 {
        return Err(Error::BadInput("me3 takes two heights".into()));
    }
    let ring = DivPowRing::new(p, Heights(vec![n[0], n[1], 1]))?;
    let w = WeightVector(vec![0, 0, 1]);
    let torus = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    let mut basis = Vec::new();
    for d in -1..p as i64 {
        let mut blocks: BTreeMap<Vec<i64>, Vec<VectorField>> = BTreeMap::new();
        for f in vfield::graded_component(&ring, &w, d).basis {
            blocks.entry(vfield::field_weight(f.svec()[0].0, &torus)).or_default().push(f);
        }
        let mut t = 0;
        for (_, b) in blocks {
            for f in vfield::special_subspace(&GradedFieldSpace { weight: w.clone(), degree: d, basis: b }).basis {
                basis.push((format!("s{d}_{t}"), d as i32, f));
                t += 1;
            }
        }
    }
    let torus_index = basis.iter().enumerate().filter(|(_, b)| b.1 == 0 && b.2.diagonal().is_some()).map(|(i, _)| i).collect();
    GradedAlgebra::from_fields("me3", &basis, &torus, torus_index)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Me2Kind {
    Field(usize),
    Volume,
    Function,
}

/// Brown's algebra over F_2: W(2;N) ⊕ O(2;N)_Div ⊕ O(2;N) with [fv, g] = f H_g,
/// [f, g] = H_f(g) v, [fv, gv] = 0 and H_f = ∂_1 f ∂_2 + ∂_2 f ∂_1, graded by
/// deg u^r∂_i = 3|r|−3, deg u^r v = 3|r|−2, deg u^r = 3|r|−4, with the constants
/// (degree −4) factored out.
pub fn me2_algebra(n: &[u32]) -> Result<GradedAlgebra, Error> {
    if n.len() != 2 {
        return Err(Error::BadInput("me2 takes two heights".into()));
    }
    let p = 2;
    let ring = DivPowRing::new(p, Heights(n.to_vec()))?;
    let mut elems: Vec<(i32, Me2Kind, MultiIndex)> = Vec::new();
    for r in ring.all_monomials() {
        let k = r.degree() as i32;
        elems.push((3 * k - 3, Me2Kind::Field(0), r));
        elems.push((3 * k - 3, Me2Kind::Field(1), r));
        elems.push((3 * k - 2, Me2Kind::Volume, r));
        if k > 0 {
            elems.push((3 * k - 4, Me2Kind::Function, r));
        }
    }
    elems.sort();
    let index: BTreeMap<(Me2Kind, MultiIndex), usize> = elems.iter().enumerate().map(|(i, e)| ((e.1, e.2), i)).collect();
    let poly = |r: MultiIndex| DividedPoly::monomial(&ring, r, 1);
    let vf = |r: MultiIndex, i: usize| VectorField::from_terms(&ring, &[(r, i, 1)]);
    let ham = |f: &DividedPoly| VectorField::from_coeffs(&[f.partial(1), f.partial(0)]);
    let mut consts = Vec::new();
    let push_field = |i: usize, j: usize, f: &VectorField, out: &mut Vec<(usize, usize, usize, u32)>| {
        for (r, k, c) in f.terms() {
            out.push((i, j, index[&(Me2Kind::Field(k), r)], c));
        }
    };
    for i in 0..elems.len() {
        for j in i + 1..elems.len() {
            let (a, b, swap) = if elems[i].1 <= elems[j].1 { (&elems[i], &elems[j], false) } else { (&elems[j], &elems[i], true) };
            let mut out = Vec::new();
            match (a.1, b.1) {
                (Me2Kind::Field(x), Me2Kind::Field(y)) => push_field(i, j, &vf(a.2, x)?.bracket(&vf(b.2, y)?)?, &mut out),
                (Me2Kind::Field(x), Me2Kind::Volume) => {
                    let d = vf(a.2, x)?;
                    let f = poly(b.2)?;
                    let g = d.apply(&f)?.add(&f.mul(&d.divergence())?)?;
                    out.extend(g.terms().iter().map(|&(r, c)| (i, j, index[&(Me2Kind::Volume, r)], c)));
                }
                (Me2Kind::Field(x), Me2Kind::Function) => {
                    let g = vf(a.2, x)?.apply(&poly(b.2)?)?;
                    out.extend(g.terms().iter().filter(|t| t.0.degree() > 0).map(|&(r, c)| (i, j, index[&(Me2Kind::Function, r)], c)));
                }
                (Me2Kind::Volume, Me2Kind::Volume) => {}
                (Me2Kind::Volume, Me2Kind::Function) => {
                    let h = ham(&poly(b.2)?)?.mul_function(&poly(a.2)?)?;
                    push_field(i, j, &h, &mut out);
                }
                (Me2Kind::Function, Me2Kind::Function) => {
                    let g = ham(&poly(a.2)?)?.apply(&poly(b.2)?)?;
                    out.extend(g.terms().iter().map(|&(r, c)| (i, j, index[&(Me2Kind::Volume, r)], c)));
                }
                _ => unreachable!("kinds are ordered"),
            }
            if swap {
                out.iter_mut().for_each(|e| e.3 = ffla::neg(e.3, p));
            }
            consts.extend(out);
        }
    }
    let labels = elems
        .iter()
        .map(|&(d, kind, r)| {
            let e = r.to_vec(2);
            let (name, w) = match kind {
                Me2Kind::Field(k) => (format!("{}d{}", ring.render_mono(r), k + 1), [e[0] as i64 - (k == 0) as i64, e[1] as i64 - (k == 1) as i64]),
                Me2Kind::Volume => (format!("{}v", ring.render_mono(r)), [e[0] as i64 + 1, e[1] as i64 + 1]),
                Me2Kind::Function => (ring.render_mono(r), [e[0] as i64, e[1] as i64]),
            };
            BasisLabel { name, degree: d, weight: w.iter().map(|x| x.rem_euclid(2)).collect() }
        })
        .collect();
    let u1 = MultiIndex::unit(0);
    let u2 = MultiIndex::unit(1);
    let torus = vec![index[&(Me2Kind::Field(0), u1)], index[&(Me2Kind::Field(1), u2)]];
    GradedAlgebra::from_constants("me2", p, labels, consts, torus, WeightMode::ModP)
}

/// Seed of Br(2;a,b,c) over F_3: g_{-1} = ⟨∂_1, ∂_2, ∂_3⟩ and g_0 = ⟨X̃^-, H̃, X̃^+, Ẽ⟩.
pub fn br2abc_seed(a: i64, b: i64, c: i64, heights: Option<&Heights>) -> Result<ProlongSeed, Error> {
    br2_seed(a, b, c, heights, true, "br2abc")
}

fn br2_seed(a: i64, b: i64, c: i64, heights: Option<&Heights>, with_e: bool, name: &str) -> Result<ProlongSeed, Error> {
    let p = 3;
    let w = ffla::reduce(a - b * c, p) as i64;
    if w == 0 {
        return Err(Error::BadInput("a = bc makes T(a,b,c) reducible".into()));
    }
    let ring = DivPowRing::new(p, heights.cloned().unwrap_or_else(|| Heights::ones(3)))?;
    let (e1, e2, e3): (&[u32], &[u32], &[u32]) = (&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]);
    let mut parts = BTreeMap::new();
    parts.insert(-1, (0..3).map(|i| (format!("d{}", i + 1), VectorField::partial(&ring, i))).collect());
    let mut g0 = vec![
        ("X-".to_string(), field(&ring, &[(e1, 2, c), (e2, 0, 1), (e3, 1, 1)])?),
        ("H".to_string(), field(&ring, &[(e1, 0, w), (e3, 2, -w)])?),
        ("X+".to_string(), field(&ring, &[(e1, 1, a), (e2, 2, a), (e3, 0, b)])?),
    ];
    if with_e {
        g0.push(("E".to_string(), field(&ring, &[(e1, 0, 1), (e2, 1, 1), (e3, 2, 1)])?));
    }
    parts.insert(0, g0.into_iter().filter(|g| !g.1.is_zero()).collect());
    ProlongSeed::new(name, &ring, WeightVector::standard(3), parts, vec![vec![1, 0, -1], vec![1, 1, 1]])
}

/// Complete prolong of Br(2;0,1,c)_{≤0} with g_0 = sl(2), heights (1,1,n).
pub fn br201c_prolong(c: i64, n: u32) -> Result<ProlongResult, Error> {
    let seed = br2_seed(0, 1, c, Some(&Heights(vec![1, 1, n])), false, "br201c")?;
    complete_prolong(&seed, &ProlongOptions { name: Some(format!("br201c-{}-{n}", ffla::reduce(c, 3))), ..Default::default() })
}

/// An algebra together with named generators in its coordinates.
#[derive(Clone, Debug)]
pub struct GeneratedAlgebra {
    pub algebra: GradedAlgebra,
    pub generators: Vec<(String, Vec<u32>)>,
}

fn generator_by_label(alg: &GradedAlgebra, name: &str) -> Result<Vec<u32>, Error> {
    let i = alg.labels().iter().position(|l| l.name == name).ok_or_else(|| Error::Invariant(format!("no basis element {name}")))?;
    Ok(alg.unit(i))
}

/// Br(2;a) as the algebra generated by X_1^±, X_2^± inside K(3;(1,1,1)); the generators
/// returned are the positive ones x1 = X_1^+, x2 = X_2^+.
pub fn br2a_algebra(a: i64) -> Result<GeneratedAlgebra, Error> {
    let g = br2a_generators(a)?;
    let gens = vec![
        ("x1-".to_string(), g.x1_minus.field.clone()),
        ("x2-".to_string(), g.x2_minus.field.clone()),
        ("x1".to_string(), g.x1_plus.field.clone()),
        ("x2".to_string(), g.x2_plus.field.clone()),
    ];
    let algebra = glie::closure_of_fields(&format!("br2a-{}", ffla::reduce(a, 3)), &gens, g.form.weight(), g.form.torus())?;
    let generators = vec![("x1".to_string(), generator_by_label(&algebra, "x1")?), ("x2".to_string(), generator_by_label(&algebra, "x2")?)];
    Ok(GeneratedAlgebra { algebra, generators })
}

/// The complete prolong of the Ermolaev seed and the subalgebra generated by its
/// components of degree −1, 0 and 1.
pub fn er_algebra() -> Result<(ProlongResult, GradedAlgebra), Error> {
    let full = complete_prolong(&er_seed()?, &ProlongOptions::default())?;
    let a = &full.algebra;
    let gens: Vec<Vec<u32>> = (0..a.dim()).filter(|&i| a.labels()[i].degree <= 1).map(|i| a.unit(i)).collect();
    let er = a.subalgebra_generated_by("er", &gens)?;
    Ok((full, er))
}

/// Ambient K(3;(1,1,n)) over F_3, the Frank algebra Fr(n) as its partial prolong at
/// h_1 = ⟨K_{p²q−pt}, K_{pq²+qt}⟩, and the generators x1 = K_{p²}, z1 = K_{pq²+qt},
/// z2 = K_{q²t} in ambient coordinates.
#[derive(Clone, Debug)]
pub struct FrankAlgebra {
    pub ambient: ProlongResult,
    pub algebra: GradedAlgebra,
    pub fills_g0: bool,
    pub generators: Vec<(String, Vec<u32>)>,
}

pub fn frank_partial(n: u32) -> Result<FrankAlgebra, Error> {
    let form = ContactForm::new(1, Heights(vec![1, 1, n]), 3)?;
    let seed = contact_seed(&form, &format!("k3-11{n}"))?;
    let ambient = complete_prolong(&seed, &ProlongOptions::default())?;
    let coords = |s: &str| -> Result<Vec<u32>, Error> {
        let f = form.field_any(&form.function(s, FRANK_DIVIDED)?)?;
        ambient.coordinates(&f.field).ok_or_else(|| Error::Invariant(format!("K_{{{s}}} is not in the prolong")))
    };
    let h1 = vec![coords("p^2*q - p*t")?, coords("p*q^2 + q*t")?];
    let part = partial_prolong(&ambient.algebra, &format!("fr{n}"), &h1)?;
    let generators = vec![("x1".to_string(), coords("p^2")?), ("z1".to_string(), coords("p*q^2 + q*t")?), ("z2".to_string(), coords("q^2*t")?)];
    Ok(FrankAlgebra { algebra: part.algebra, fills_g0: part.fills_g0, ambient, generators })
}

const FRANK_DIVIDED: bool = false;

/// The subalgebra of the DY prolong generated by g_- and g_1.
pub fn br3_via_dy(dy: &GradedAlgebra) -> Result<GradedAlgebra, Error> {
    let gens: Vec<Vec<u32>> = (0..dy.dim()).filter(|&i| dy.labels()[i].degree < 0 || dy.labels()[i].degree == 1).map(|i| dy.unit(i)).collect();
    dy.subalgebra_generated_by("br3", &gens)
}

/// Br(3) inside the DY prolong, with positive Chevalley generators x1, x2 (the g_0 root
/// vectors of weights (1,−1,0) and (0,1,−1)) and x3 (the lowest weight vector of g_1).
pub fn br3_algebra(dy: &GradedAlgebra) -> Result<GeneratedAlgebra, Error> {
    let algebra = br3_via_dy(dy)?;
    let root = |w: &[i64]| -> Result<Vec<u32>, Error> {
        let hits: Vec<usize> = (0..algebra.dim()).filter(|&i| algebra.labels()[i].degree == 0 && algebra.labels()[i].weight == w).collect();
        match hits[..] {
            [i] => Ok(algebra.unit(i)),
            _ => Err(Error::Invariant(format!("g_0 of br3 has {} vectors of weight {w:?}", hits.len()))),
        }
    };
    let x1 = root(&[1, -1, 0])?;
    let x2 = root(&[0, 1, -1])?;
    let split = weights::module_components(&algebra, 1, &weights::lowering_operators(&algebra));
    let x3 = match &split.summands[..] {
        [s] => s.generator.clone(),
        _ => return Err(Error::Invariant(format!("g_1 of br3 splits into {} summands", split.summands.len()))),
    };
    let generators = vec![("x1".to_string(), x1), ("x2".to_string(), x2), ("x3".to_string(), x3)];
    Ok(GeneratedAlgebra { algebra, generators })
}

/// The algebra generated by g_- and the g_0-submodule of g_1 with the given lowest
/// weight (BY′, BY″, MY′, MY″).
pub fn g1_summand_algebra(alg: &GradedAlgebra, name: &str, lowest: &[i64]) -> Result<GradedAlgebra, Error> {
    let split = weights::module_components(alg, 1, &weights::lowering_operators(alg));
    let s = split.summands.iter().find(|s| s.weight == lowest).ok_or_else(|| Error::Invariant(format!("g_1 of {} has no summand with lowest weight {lowest:?}", alg.name)))?;
    let mut gens: Vec<Vec<u32>> = (0..alg.dim()).filter(|&i| alg.labels()[i].degree < 0).map(|i| alg.unit(i)).collect();
    gens.extend(s.vectors.iter().cloned());
    alg.subalgebra_generated_by(name, &gens)
}

/// Lowest weights of the two g_1 summands of BY and MY.
pub const G1_PRIME: [i64; 3] = [0, 0, 1];
pub const G1_DOUBLE_PRIME: [i64; 3] = [-1, 1, 1];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_digests_match() {
        for (name, text, digest) in SEED_FILES {
            assert_eq!(&sha256_hex(text), digest, "digest of {name}");
        }
    }

    #[test]
    fn expression_parsing() {
        let t = parse_expr("t", 1, "d1 - u2*d3 - 2*u1*u2^2*d4", 5).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0], RawTerm { coeff: 1, exps: vec![0; 5], coord: 0 });
        assert_eq!(t[2], RawTerm { coeff: -2, exps: vec![1, 2, 0, 0, 0], coord: 3 });
        assert!(parse_expr("t", 1, "u1*u2", 2).is_err());
        assert!(parse_expr("t", 1, "d1*d2", 2).is_err());
    }

    #[test]
    fn corrupted_text_fails_checksum() {
        let dir = std::env::temp_dir().join(format!("modlie-seed-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let text = Catalog::embedded().text("er").unwrap().replace("u2*d1", "2*u2*d1");
        std::fs::write(dir.join("er.seed"), text).unwrap();
        let err = Catalog::with_dir(&dir).spec("er").unwrap_err();
        assert!(matches!(err, Error::Checksum { .. }));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn ordinary_powers_carry_factorials() {
        let spec = parse_seed("t", "name t\np 5\nweights 1\npowers ordinary\nfield 1 x = u1^3*d1\n").unwrap();
        let ring = spec.ring(None).unwrap();
        let f = spec.realize(&ring, &spec.fields[0].2).unwrap();
        assert_eq!(f.terms()[0].2, 1); // 3! = 6 ≡ 1 mod 5
    }
}
