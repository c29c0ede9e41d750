//! Versioned JSON result records.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use designrank_core::{DesignParams, InvariantFactorMultiset, ValuationProfile};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Elimination,
    CharacterSum,
    Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub b: u64,
    pub r: u64,
    pub n: u64,
}

impl From<DesignParams> for ParamsRecord {
    fn from(p: DesignParams) -> Self {
        Self {
            v: p.v,
            k: p.k,
            lambda: p.lambda,
            b: p.b,
            r: p.r,
            n: p.n,
        }
    }
}

impl From<ParamsRecord> for DesignParams {
    fn from(p: ParamsRecord) -> Self {
        DesignParams {
            v: p.v,
            k: p.k,
            lambda: p.lambda,
            b: p.b,
            r: p.r,
            n: p.n,
        }
    }
}

/// What produced the record: family and parameters, or an input file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub primes: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub schema: u32,
    pub method: Method,
    pub job: Job,
    pub params: ParamsRecord,
    /// `[[d, multiplicity], ...]`, ascending.
    pub invariants: Option<Vec<[u64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snf: Option<String>,
    pub ranks: BTreeMap<String, u64>,
    /// Per prime, counts of invariant factors by valuation; the last entry
    /// counts valuations at or above the precision.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub profiles: BTreeMap<String, Vec<u64>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: BTreeMap<String, serde_json::Value>,
    pub wall_time_ms: f64,
}

impl Record {
    pub fn new(method: Method, job: Job, params: DesignParams) -> Self {
        Self {
            schema: SCHEMA,
            method,
            job,
            params: params.into(),
            invariants: None,
            snf: None,
            ranks: BTreeMap::new(),
            profiles: BTreeMap::new(),
            extra: BTreeMap::new(),
            wall_time_ms: 0.0,
        }
    }

    pub fn set_invariants(&mut self, inv: &InvariantFactorMultiset) {
        self.invariants = Some(inv.terms().iter().map(|&(d, m)| [d, m]).collect());
        self.snf = Some(inv.to_string());
    }

    pub fn add_profile(&mut self, prof: &ValuationProfile) {
        self.ranks.insert(prof.prime().to_string(), prof.rank());
        self.profiles.insert(prof.prime().to_string(), prof.counts().to_vec());
    }

    pub fn invariant_factors(&self) -> Result<Option<InvariantFactorMultiset>> {
        match &self.invariants {
            None => Ok(None),
            Some(terms) => Ok(Some(InvariantFactorMultiset::new(
                terms.iter().map(|&[d, m]| (d, m)).collect(),
            )?)),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let rec: Record = serde_json::from_str(&text)?;
        if rec.schema != SCHEMA {
            return Err(CliError::Usage(format!(
                "{}: unsupported schema {}",
                path.display(),
                rec.schema
            )));
        }
        Ok(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let params = DesignParams::from_vkl(7, 3, 1).unwrap();
        let mut rec = Record::new(Method::CharacterSum, Job::default(), params);
        rec.set_invariants(&"1^4 2^2 6^1".parse().unwrap());
        rec.ranks.insert("2".into(), 4);
        let v: serde_json::Value = serde_json::from_str(&rec.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["method"], "character-sum");
        assert_eq!(v["invariants"], serde_json::json!([[1, 4], [2, 2], [6, 1]]));
        assert_eq!(v["ranks"]["2"], 4);
        assert_eq!(v["params"]["lambda"], 1);
        let back: Record = serde_json::from_value(v).unwrap();
        assert_eq!(back, rec);
    }
}
