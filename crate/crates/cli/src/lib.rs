//! Commands behind the `modlie` binary.

pub mod cache;
pub mod dump;
pub mod registry;

use std::fmt::Write as _;
use std::path::Path;

use modlie::glie::GradedAlgebra;
use modlie::relations::{minimal_relations, RelationSet};
use modlie::weights::{self, WeightTable};
use modlie::Error;
use serde::Serialize;

use cache::Cache;
use dump::AlgebraDump;
use registry::{Built, Params};

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BadInput(_) | Error::Parse { .. } | Error::DimensionMismatch { .. } | Error::GeneratorsInsufficient(_) => 2,
        Error::CapReached(_) => 3,
        _ => 1,
    }
}

/// Algebra for `name`, from the cache when present.
pub fn obtain(name: &str, params: &Params, cache: Option<&Cache>) -> Result<(GradedAlgebra, Option<Built>), Error> {
    if let Some(d) = cache.and_then(|c| c.load(name, params)) {
        return Ok((d.algebra()?, None));
    }
    let built = registry::build(name, params)?;
    if let Some(c) = cache {
        c.store(name, params, &AlgebraDump::of(&built.algebra, params.heights.clone())?)?;
    }
    Ok((built.algebra.clone(), Some(built)))
}

pub fn summary(alg: &GradedAlgebra) -> String {
    let (lo, hi) = alg.degree_range().unwrap_or((0, 0));
    let dims: Vec<String> = alg.dims_by_degree().iter().map(|(d, n)| format!("{d}:{n}")).collect();
    format!("{}: dim {}, degrees {lo}..{hi}, top degree {hi}\n  {}\n", alg.name, alg.dim(), dims.join(" "))
}

/// How the weight column of a table is filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightColumn {
    /// Weights of vectors killed by all raising operators of g_0.
    Extreme,
    /// Highest weights of a characteristic-0 decomposition of the weight multiset.
    Peel,
    /// The full weight multiset.
    All,
}

impl std::str::FromStr for WeightColumn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "extreme" => Ok(WeightColumn::Extreme),
            "peel" => Ok(WeightColumn::Peel),
            "all" => Ok(WeightColumn::All),
            _ => Err(Error::BadInput(format!("--weights takes extreme, peel or all, not {s}"))),
        }
    }
}

pub fn format_weight(w: &[i64]) -> String {
    format!("({})", w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

/// Per-degree rows (degree, dim, weights).
pub fn table_rows(alg: &GradedAlgebra, column: WeightColumn) -> Result<Vec<(i32, usize, Vec<Vec<i64>>)>, Error> {
    let table = WeightTable::of(alg)?;
    let ops = weights::raising_operators(alg);
    let mut rows = Vec::new();
    for (&d, mult) in &table.rows {
        let ws = match column {
            WeightColumn::Extreme => weights::highest_weight_vectors(alg, d, &ops).into_iter().map(|e| e.weight).collect(),
            WeightColumn::Peel => weights::peel_highest_weights(mult)?,
            WeightColumn::All => mult.iter().flat_map(|(w, &c)| std::iter::repeat_n(w.clone(), c)).collect(),
        };
        rows.push((d, mult.values().sum(), ws));
    }
    Ok(rows)
}

pub const TABLE_SCHEMA: &str = "modlie.table/1";

pub fn table_csv(alg: &GradedAlgebra, column: WeightColumn) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Invariant(format!("csv: {e}"));
    w.write_record(["degree", "dim", "weights"]).map_err(csv_err)?;
    for (d, n, ws) in table_rows(alg, column)? {
        let text = ws.iter().map(|w| format_weight(w)).collect::<Vec<_>>().join(",");
        w.write_record([d.to_string(), n.to_string(), text]).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invariant(format!("csv: {e}")))?;
    Ok(format!("# schema {TABLE_SCHEMA}\n{}", String::from_utf8(bytes).expect("csv output is utf-8")))
}

/// Outcome of the invariant suite.
#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub lines: Vec<(String, bool)>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.1)
    }

    pub fn render(&self) -> String {
        self.lines.iter().map(|(t, ok)| format!("{} {t}\n", if *ok { "pass" } else { "FAIL" })).collect()
    }

    fn push(&mut self, text: impl Into<String>, ok: bool) {
        self.lines.push((text.into(), ok));
    }
}

/// Jacobi identity, weight sums, outer trace count, and for prolongs the realized
/// brackets and the maximality certificates.
pub fn check(name: &str, params: &Params) -> Result<CheckReport, Error> {
    let built = registry::build(name, params)?;
    let alg = &built.algebra;
    let mut r = CheckReport::default();
    let jac = alg.check_jacobi();
    r.push(format!("jacobi identity, dim {}{}", alg.dim(), jac.as_ref().err().map(|e| format!(": {e}")).unwrap_or_default()), jac.is_ok());
    match WeightTable::of(alg) {
        Ok(t) => r.push(format!("weight multiplicities sum to dims in {} degrees", t.rows.len()), t.dims() == alg.dims_by_degree()),
        Err(e) => r.push(format!("weight table: {e}"), false),
    }
    let outer = alg.outer_trace_count()?;
    r.push(format!("derived algebra has codimension {outer}"), true);
    if let Some(pr) = &built.prolong {
        let n = alg.dim();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let step = (pairs.len() / 2000).max(1);
        let sample: Vec<(usize, usize)> = pairs.into_iter().step_by(step).collect();
        let closed = pr.verify_constants(&sample);
        r.push(format!("realized brackets agree with constants on {} pairs{}", sample.len(), closed.as_ref().err().map(|e| format!(": {e}")).unwrap_or_default()), closed.is_ok());
        let failed: Vec<i32> = pr.certificates.iter().filter(|c| !c.passed).map(|c| c.degree).collect();
        r.push(format!("maximality certificates in {} degrees, failing {failed:?}", pr.certificates.len()), failed.is_empty());
    }
    Ok(r)
}

pub const RELATIONS_SCHEMA: &str = "modlie.relations/1";

#[derive(Serialize)]
struct RelationJson {
    degree: i32,
    weight: Vec<i64>,
    relation: String,
}

#[derive(Serialize)]
struct RelationsJson<'a> {
    schema: &'a str,
    name: &'a str,
    p: u32,
    generators: Vec<(String, i32)>,
    max_degree: i32,
    relations: Vec<RelationJson>,
    quotient_dims: std::collections::BTreeMap<i32, usize>,
}

pub fn relations(name: &str, params: &Params, max_degree: i32) -> Result<(RelationSet, Vec<(String, i32)>), Error> {
    let (target, gens) = registry::relation_setup(name, params)?;
    let rs = minimal_relations(&target, &gens, max_degree)?;
    rs.verify(&target, &gens)?;
    Ok((rs, gens.iter().map(|g| (g.name.clone(), g.degree)).collect()))
}

pub fn relations_text(name: &str, rs: &RelationSet, gens: &[(String, i32)]) -> String {
    let mut s = format!("# schema {RELATIONS_SCHEMA}\n# {name} over F_{}, generators", rs.p);
    for (g, d) in gens {
        let _ = write!(s, " {g}(deg {d})");
    }
    let _ = writeln!(s, ", through degree {}", rs.max_degree);
    s + &rs.render()
}

pub fn relations_json(name: &str, rs: &RelationSet, gens: &[(String, i32)]) -> String {
    let j = RelationsJson {
        schema: RELATIONS_SCHEMA,
        name,
        p: rs.p,
        generators: gens.to_vec(),
        max_degree: rs.max_degree,
        relations: rs.relations().into_iter().map(|r| RelationJson { degree: r.grade.0, weight: r.grade.1.clone(), relation: r.element.render(&rs.names) }).collect(),
        quotient_dims: rs.quotient_dims(None),
    };
    let mut s = serde_json::to_string_pretty(&j).expect("relations serialize");
    s.push('\n');
    s
}

/// Compare with relations listed one per line in `path` (blank lines and `#` comments
/// skipped).
pub fn compare_with_file(rs: &RelationSet, path: &Path) -> Result<String, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::BadInput(format!("cannot read {}: {e}", path.display())))?;
    let given: Vec<_> =
        text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(|l| rs.parse(l.trim_end_matches("= 0").trim())).collect::<Result<_, _>>()?;
    let m = rs.compare(&given)?;
    let mut s = String::new();
    for (i, r) in &m.unmatched {
        let _ = writeln!(s, "given relation {} is not implied: {r}", i + 1);
    }
    for r in &m.missing {
        let _ = writeln!(s, "minimal relation not implied by the given list: {r}");
    }
    for i in &m.redundant {
        let _ = writeln!(s, "given relation {} follows from the others", i + 1);
    }
    let _ = writeln!(s, "{}", if m.unmatched.is_empty() && m.missing.is_empty() { "same ideal" } else { "different ideals" });
    Ok(s)
}
