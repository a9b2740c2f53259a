//! JSON fixtures exchanged with external lattice tooling.
//!
//! Format (schema 1): UTF-8 JSON object with `schema`, `N` (decimal
//! string), `basis` (row-major integer matrix), `target`, `diagonal`,
//! `delta` (`"a/b"`), and optionally `reduced_basis`, `b_op`, `relations`
//! and `cvp_dist_sq`. Matrix entries are JSON integers; `N`, `u`, `v` and
//! distances are decimal strings.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BabaiResult, Basis, ReductionResult};
use crate::primes_lattice::CvpInstance;
use crate::relations::SmoothRelation;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRow {
    pub u: String,
    pub v: String,
    pub e: Vec<i64>,
    pub residue: Vec<u32>,
}

impl From<&SmoothRelation> for RelationRow {
    fn from(r: &SmoothRelation) -> Self {
        RelationRow {
            u: r.pair.u.to_string(),
            v: r.pair.v.to_string(),
            e: r.pair.exponents.clone(),
            residue: r.residue_exponents.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub schema: u32,
    #[serde(rename = "N")]
    pub modulus: String,
    pub basis: Vec<Vec<i64>>,
    pub target: Vec<i64>,
    pub diagonal: Vec<i64>,
    pub delta: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced_basis: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_op: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<Vec<RelationRow>>,
    /// Exhaustive-search optimum `‖t − b_0‖²`, when recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cvp_dist_sq: Option<String>,
}

fn small_vec(v: &[BigInt], what: &str) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| Error::Fixture(format!("{what} entry {x} does not fit in i64")))
        })
        .collect()
}

fn small_rows(b: &Basis, what: &str) -> Result<Vec<Vec<i64>>> {
    b.to_rows().iter().map(|r| small_vec(r, what)).collect()
}

pub fn format_ratio(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::Fixture(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl Fixture {
    pub fn from_instance(
        modulus: &BigUint,
        cvp: &CvpInstance,
        delta: &BigRational,
    ) -> Result<Self> {
        Ok(Fixture {
            schema: SCHEMA_VERSION,
            modulus: modulus.to_string(),
            basis: small_rows(&cvp.basis, "basis")?,
            target: small_vec(&cvp.target, "target")?,
            diagonal: cvp.diagonal.clone(),
            delta: format_ratio(delta),
            reduced_basis: None,
            b_op: None,
            relations: None,
            cvp_dist_sq: None,
        })
    }

    pub fn with_reduction(mut self, reduction: &ReductionResult) -> Result<Self> {
        self.reduced_basis = Some(small_rows(&reduction.reduced, "reduced_basis")?);
        Ok(self)
    }

    pub fn with_babai(mut self, babai: &BabaiResult) -> Result<Self> {
        self.b_op = Some(small_vec(&babai.b_op, "b_op")?);
        Ok(self)
    }

    pub fn with_relations(mut self, relations: &[SmoothRelation]) -> Self {
        self.relations = Some(relations.iter().map(RelationRow::from).collect());
        self
    }

    pub fn modulus(&self) -> Result<BigUint> {
        BigUint::from_str(&self.modulus)
            .map_err(|_| Error::Fixture(format!("bad N {:?}", self.modulus)))
    }

    pub fn basis(&self) -> Result<Basis> {
        Basis::from_rows(&self.basis)
    }

    pub fn target(&self) -> Vec<BigInt> {
        self.target.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn delta(&self) -> Result<BigRational> {
        parse_ratio(&self.delta)
    }

    pub fn reduced_basis(&self) -> Result<Option<Basis>> {
        self.reduced_basis
            .as_ref()
            .map(|r| Basis::from_rows(r))
            .transpose()
    }

    /// The fixture's reduction as a [`ReductionResult`] against its own
    /// basis.
    pub fn reduction(&self) -> Result<ReductionResult> {
        let reduced = self
            .reduced_basis()?
            .ok_or_else(|| Error::Fixture("fixture has no reduced_basis".into()))?;
        ReductionResult::from_reduced(self.basis()?, reduced, self.delta()?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: Fixture = serde_json::from_str(s)?;
        if f.schema != SCHEMA_VERSION {
            return Err(Error::Fixture(format!("unsupported schema {}", f.schema)));
        }
        Ok(f)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Writes `payload` as `<dir>/<stage>.json`.
pub fn export_fixture(dir: &Path, stage: &str, payload: &Fixture) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{stage}.json"));
    payload.write(&path)?;
    Ok(path)
}
