//! JSON dumps of graded algebras.

use std::collections::BTreeMap;

use modlie::catalog::sha256_hex;
use modlie::glie::{BasisLabel, GradedAlgebra, WeightMode};
use modlie::weights::WeightTable;
use modlie::Error;
use serde::{Deserialize, Serialize};

pub const DUMP_SCHEMA: &str = "modlie.algebra/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDump {
    pub name: String,
    pub degree: i32,
    pub weight: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRow {
    pub degree: i32,
    pub weights: Vec<(Vec<i64>, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDump {
    pub schema: String,
    pub name: String,
    pub p: u32,
    /// Heights of the underlying divided power algebra, when given.
    pub heights: Option<Vec<u32>>,
    /// `integer` or `mod-p`.
    pub weight_mode: String,
    pub dim: usize,
    pub degree_range: Option<(i32, i32)>,
    pub dims: BTreeMap<i32, usize>,
    pub torus: Vec<usize>,
    pub labels: Vec<LabelDump>,
    /// (i, j, k, c) with i < j, ordered, meaning [e_i, e_j] = Σ c e_k.
    pub constants: Vec<(usize, usize, usize, u32)>,
    pub weight_table: Vec<WeightRow>,
    /// sha256 of the constants listing.
    pub constants_sha256: String,
}

fn constants_digest(constants: &[(usize, usize, usize, u32)]) -> String {
    let text: String = constants.iter().map(|(i, j, k, c)| format!("{i} {j} {k} {c}\n")).collect();
    sha256_hex(&text)
}

impl AlgebraDump {
    pub fn of(alg: &GradedAlgebra, heights: Option<Vec<u32>>) -> Result<Self, Error> {
        let constants = alg.constants();
        let table = WeightTable::of(alg)?;
        Ok(AlgebraDump {
            schema: DUMP_SCHEMA.to_string(),
            name: alg.name.clone(),
            p: alg.p(),
            heights,
            weight_mode: match alg.weight_mode() {
                WeightMode::Integer => "integer",
                WeightMode::ModP => "mod-p",
            }
            .to_string(),
            dim: alg.dim(),
            degree_range: alg.degree_range(),
            dims: alg.dims_by_degree(),
            torus: alg.torus().to_vec(),
            labels: alg.labels().iter().map(|l| LabelDump { name: l.name.clone(), degree: l.degree, weight: l.weight.clone() }).collect(),
            constants_sha256: constants_digest(&constants),
            constants,
            weight_table: table.rows.iter().map(|(&degree, m)| WeightRow { degree, weights: m.iter().map(|(w, &c)| (w.clone(), c)).collect() }).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("dump serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let d: AlgebraDump = serde_json::from_str(text).map_err(|e| Error::BadInput(format!("malformed dump: {e}")))?;
        if d.schema != DUMP_SCHEMA {
            return Err(Error::BadInput(format!("dump schema {} is not {DUMP_SCHEMA}", d.schema)));
        }
        let found = constants_digest(&d.constants);
        if found != d.constants_sha256 {
            return Err(Error::Checksum { name: d.name.clone(), expected: d.constants_sha256.clone(), found });
        }
        Ok(d)
    }

    pub fn algebra(&self) -> Result<GradedAlgebra, Error> {
        let mode = match self.weight_mode.as_str() {
            "integer" => WeightMode::Integer,
            "mod-p" => WeightMode::ModP,
            m => return Err(Error::BadInput(format!("unknown weight mode {m}"))),
        };
        let labels = self.labels.iter().map(|l| BasisLabel { name: l.name.clone(), degree: l.degree, weight: l.weight.clone() }).collect();
        GradedAlgebra::from_constants(&self.name, self.p, labels, self.constants.iter().copied(), self.torus.clone(), mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_identical() {
        let alg = modlie::catalog::me2_algebra(&[1, 1]).unwrap();
        let text = AlgebraDump::of(&alg, Some(vec![1, 1])).unwrap().to_json();
        let back = AlgebraDump::from_json(&text).unwrap();
        let again = AlgebraDump::of(&back.algebra().unwrap(), back.heights.clone()).unwrap().to_json();
        assert_eq!(text, again);
    }

    #[test]
    fn tampered_constants_are_rejected() {
        let alg = modlie::catalog::me2_algebra(&[1, 1]).unwrap();
        let mut d = AlgebraDump::of(&alg, None).unwrap();
        d.constants[0].3 ^= 1;
        assert!(matches!(AlgebraDump::from_json(&d.to_json()), Err(Error::Checksum { .. })));
    }
}
