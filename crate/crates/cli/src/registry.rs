//! Named build pipelines.

use modlie::catalog::{self, Catalog};
use modlie::contact::{contact_seed, ContactForm};
use modlie::glie::GradedAlgebra;
use modlie::prolong::{complete_prolong, ProlongOptions, ProlongResult, StopReason};
use modlie::relations::FreeGenerator;
use modlie::{Error, Heights};

/// Parameters shared by all pipelines.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub heights: Option<Vec<u32>>,
    pub p: Option<u32>,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub derived: bool,
    pub cap: i32,
}

pub struct Built {
    pub algebra: GradedAlgebra,
    pub prolong: Option<ProlongResult>,
}

pub const NAMES: &[(&str, &str)] = &[
    ("me5", "Melikyan algebra over F_5, complete prolong (--N, five heights)"),
    ("me3", "Melikyan-type algebra S(3;(N1,N2,1)) (--p 2 or 3, --N two heights)"),
    ("me2", "Melikyan-type algebra over F_2 (--N two heights)"),
    ("dy", "Skryabin DY, complete prolong"),
    ("by", "Skryabin BY, complete prolong"),
    ("my", "Skryabin MY, complete prolong"),
    ("smy", "complete prolong of (g_-, sl(3)) for MY"),
    ("sby", "complete prolong of (g_-, sl(3)) for BY"),
    ("my1", "subalgebra of MY generated by g_- and g'_1"),
    ("my2", "subalgebra of MY generated by g_- and g''_1"),
    ("by1", "subalgebra of BY generated by g_- and g'_1"),
    ("by2", "subalgebra of BY generated by g_- and g''_1"),
    ("er-full", "Ermolaev seed, complete prolong"),
    ("er", "Ermolaev algebra: generated by degrees -1, 0, 1 of the prolong"),
    ("k3", "contact algebra K(3;N) over F_3 (--N three heights)"),
    ("frank", "Frank algebra Fr(n) (--N n)"),
    ("br2", "Brown algebra Br(2;a) inside K(3;(1,1,1)) (--a)"),
    ("br2abc", "complete prolong of the Brown seed (--a --b --c, --N three heights)"),
    ("br201c", "complete prolong of Br(2;0,1,c) with g_0 = sl(2) (--c, --N n)"),
    ("br3", "Brown algebra Br(3) inside DY"),
];

pub const RELATION_NAMES: &[&str] = &["br2", "br3", "frank"];

fn heights(params: &Params, len: usize, default: &[u32]) -> Result<Heights, Error> {
    let h = params.heights.clone().unwrap_or_else(|| default.to_vec());
    if h.len() != len {
        return Err(Error::BadInput(format!("--N needs {len} entries, got {}", h.len())));
    }
    Ok(Heights(h))
}

fn single_height(params: &Params) -> Result<u32, Error> {
    match params.heights.as_deref() {
        None => Ok(1),
        Some([n]) => Ok(*n),
        Some(h) => Err(Error::BadInput(format!("--N needs one entry, got {}", h.len()))),
    }
}

fn prolong(seed: &modlie::prolong::ProlongSeed, params: &Params) -> Result<ProlongResult, Error> {
    let r = complete_prolong(seed, &ProlongOptions { cap: params.cap, ..Default::default() })?;
    if let StopReason::DegreeCap(d) = r.stop {
        return Err(Error::CapReached(d));
    }
    Ok(r)
}

fn seed_prolong(name: &str, params: &Params) -> Result<ProlongResult, Error> {
    let spec = Catalog::from_env().spec(name)?;
    let h = params.heights.clone().map(Heights);
    prolong(&spec.seed(h.as_ref())?, params)
}

fn from_prolong(r: ProlongResult) -> Built {
    Built { algebra: r.algebra.clone(), prolong: Some(r) }
}

/// Runs the pipeline for `name`.
pub fn build(name: &str, params: &Params) -> Result<Built, Error> {
    let built = match name {
        "me5" => from_prolong(prolong(&catalog::me5_seed_with_heights(&heights(params, 5, &[1, 1, 1, 1, 1])?)?, params)?),
        "me3" => {
            let h = heights(params, 2, &[1, 1])?;
            Built { algebra: catalog::me3_algebra(params.p.unwrap_or(3), &h.0)?, prolong: None }
        }
        "me2" => Built { algebra: catalog::me2_algebra(&heights(params, 2, &[1, 1])?.0)?, prolong: None },
        "dy" | "by" | "my" => from_prolong(seed_prolong(name, params)?),
        "er-full" => from_prolong(seed_prolong("er", params)?),
        "smy" => from_prolong(prolong(&catalog::smy_seed()?, params)?),
        "sby" => from_prolong(prolong(&catalog::sby_seed()?, params)?),
        "my1" | "my2" | "by1" | "by2" => {
            let r = seed_prolong(&name[..2], params)?;
            let lowest: &[i64] = if name.ends_with('1') { &catalog::G1_PRIME } else { &catalog::G1_DOUBLE_PRIME };
            Built { algebra: catalog::g1_summand_algebra(&r.algebra, name, lowest)?, prolong: None }
        }
        "er" => Built { algebra: catalog::er_algebra()?.1, prolong: None },
        "k3" => {
            let form = ContactForm::new(1, heights(params, 3, &[1, 1, 1])?, 3)?;
            from_prolong(prolong(&contact_seed(&form, "k3")?, params)?)
        }
        "frank" => Built { algebra: catalog::frank_partial(single_height(params)?)?.algebra, prolong: None },
        "br2" => Built { algebra: catalog::br2a_algebra(params.a)?.algebra, prolong: None },
        "br2abc" => {
            let h = heights(params, 3, &[1, 1, 1])?;
            from_prolong(prolong(&catalog::br2abc_seed(params.a, params.b, params.c, Some(&h))?, params)?)
        }
        "br201c" => from_prolong(catalog::br201c_prolong(params.c, single_height(params)?)?),
        "br3" => {
            let dy = seed_prolong("dy", &Params::default_cap())?;
            Built { algebra: catalog::br3_via_dy(&dy.algebra)?, prolong: None }
        }
        _ => return Err(Error::BadInput(format!("unknown algebra {name}; try `modlie list`"))),
    };
    if params.derived {
        let mut d = built.algebra.derived_subalgebra()?;
        d.set_name(&format!("{name}-derived"));
        return Ok(Built { algebra: d, prolong: None });
    }
    Ok(built)
}

impl Params {
    pub fn default_cap() -> Self {
        Params { cap: modlie::prolong::DEFAULT_CAP, ..Default::default() }
    }
}

/// Default degree cap of a relations run; the last Br(3) relation has degree 9.
pub fn relation_max_degree(name: &str) -> i32 {
    if name == "br3" {
        10
    } else {
        modlie::relations::DEFAULT_MAX_DEGREE
    }
}

/// Target algebra and generators (with their degrees) for a relations run.
pub fn relation_setup(name: &str, params: &Params) -> Result<(GradedAlgebra, Vec<FreeGenerator>), Error> {
    let gens = |v: Vec<(String, Vec<u32>)>, degrees: &[i32]| -> Vec<FreeGenerator> {
        v.into_iter().zip(degrees).map(|((name, vector), &degree)| FreeGenerator { name, vector, degree }).collect()
    };
    match name {
        "br2" => {
            let g = catalog::br2a_algebra(params.a)?;
            Ok((g.algebra, gens(g.generators, &[1, 1])))
        }
        "br3" => {
            let dy = seed_prolong("dy", &Params::default_cap())?;
            let g = catalog::br3_algebra(&dy.algebra)?;
            Ok((g.algebra, gens(g.generators, &[1, 1, 1])))
        }
        "frank" => {
            let fr = catalog::frank_partial(single_height(params)?)?;
            Ok((fr.ambient.algebra, gens(fr.generators, &[0, 1, 2])))
        }
        _ => Err(Error::BadInput(format!("no generators known for {name}; choose one of {}", RELATION_NAMES.join(", ")))),
    }
}
