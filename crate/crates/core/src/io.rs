//! Cayley table files and label-level (de)serialization.
//!
//! A table file is JSON of the form
//! `{"size": n, "identity": i, "labels": [...], "table": [[...], ...]}` with
//! `table[a][b] = a·b`. `identity` may be `null` for semigroups and `labels`
//! may be omitted.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monoid::{ElementId, FiniteMonoid, Magma, MonoidError, RawMonoid};
use crate::power::{FactorMultiset, FactorWord, PSet};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed table file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] MonoidError),
    #[error("unknown element `{0}` in subset")]
    BadSubset(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidFile {
    pub size: usize,
    pub identity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub table: Vec<Vec<usize>>,
}

impl MonoidFile {
    fn check_size(&self) -> Result<(), MonoidError> {
        if self.size != self.table.len() {
            return Err(MonoidError::SizeMismatch {
                declared: self.size,
                rows: self.table.len(),
            });
        }
        Ok(())
    }

    pub fn into_monoid(self) -> Result<FiniteMonoid, MonoidError> {
        self.check_size()?;
        FiniteMonoid::validate(RawMonoid {
            table: self.table,
            identity: self.identity,
            labels: self.labels,
        })
    }

    pub fn into_magma(self) -> Result<Magma, MonoidError> {
        self.check_size()?;
        Magma::new(self.table)
    }
}

impl From<&FiniteMonoid> for MonoidFile {
    fn from(m: &FiniteMonoid) -> Self {
        MonoidFile {
            size: m.size(),
            identity: Some(0),
            labels: Some(m.labels().to_vec()),
            table: m.rows(),
        }
    }
}

pub fn parse_monoid(json: &str) -> Result<FiniteMonoid, IoError> {
    let file: MonoidFile = serde_json::from_str(json)?;
    Ok(file.into_monoid()?)
}

pub fn parse_magma(json: &str) -> Result<Magma, IoError> {
    let file: MonoidFile = serde_json::from_str(json)?;
    Ok(file.into_magma()?)
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_monoid(path: impl AsRef<Path>) -> Result<FiniteMonoid, IoError> {
    parse_monoid(&read(path.as_ref())?)
}

pub fn load_magma(path: impl AsRef<Path>) -> Result<Magma, IoError> {
    parse_magma(&read(path.as_ref())?)
}

/// Table file text, one table row per line.
pub fn monoid_to_json(m: &FiniteMonoid) -> String {
    let file = MonoidFile::from(m);
    let labels = serde_json::to_string(&file.labels).expect("labels serialize");
    let rows: Vec<String> = file
        .table
        .iter()
        .map(|r| format!("    {}", serde_json::to_string(r).expect("row serializes")))
        .collect();
    format!(
        "{{\n  \"size\": {},\n  \"identity\": 0,\n  \"labels\": {},\n  \"table\": [\n{}\n  ]\n}}\n",
        file.size,
        labels,
        rows.join(",\n")
    )
}

/// Parses a comma-separated list of labels (or indices) into a set.
///
/// Returns the set and whether the identity had to be added.
pub fn parse_subset(m: &FiniteMonoid, spec: &str) -> Result<(PSet, bool), IoError> {
    let mut bits = 0u64;
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let idx = m
            .labels()
            .iter()
            .position(|l| l == token)
            .or_else(|| token.parse::<usize>().ok().filter(|&i| i < m.size()))
            .ok_or_else(|| IoError::BadSubset(token.to_string()))?;
        bits |= 1 << idx;
    }
    let added = bits & 1 == 0;
    Ok((PSet::with_identity(bits), added))
}

pub fn set_labels(m: &FiniteMonoid, x: PSet) -> Vec<String> {
    x.elements().map(|e| m.label(e).to_string()).collect()
}

pub fn word_labels(m: &FiniteMonoid, w: &FactorWord) -> Vec<Vec<String>> {
    w.letters().iter().map(|&a| set_labels(m, a)).collect()
}

pub fn multiset_labels(m: &FiniteMonoid, w: &FactorMultiset) -> Vec<Vec<String>> {
    w.letters().iter().map(|&a| set_labels(m, a)).collect()
}

pub fn element_labels(m: &FiniteMonoid, xs: &[ElementId]) -> Vec<String> {
    xs.iter().map(|&x| m.label(x).to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_round_trip() {
        for (name, _) in fixtures::MONOIDS {
            let m = fixtures::monoid(name);
            let again = parse_monoid(&monoid_to_json(&m)).unwrap();
            assert_eq!(again, m, "{name}");
        }
    }

    #[test]
    fn size_mismatch_is_reported() {
        let err =
            parse_monoid(r#"{"size": 3, "identity": 0, "table": [[0,1],[1,0]]}"#).unwrap_err();
        assert!(matches!(
            err,
            IoError::Invalid(MonoidError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn semigroup_fixture_has_no_identity() {
        let err = parse_monoid(fixtures::S_JSON).unwrap_err();
        assert!(matches!(err, IoError::Invalid(MonoidError::NoIdentity)));
        assert_eq!(parse_magma(fixtures::S_JSON).unwrap().size(), 3);
    }

    #[test]
    fn subsets_by_label() {
        let h1 = fixtures::monoid("h1");
        let (x, added) = parse_subset(&h1, "x2, x3").unwrap();
        assert!(added);
        assert_eq!(x.indices(), vec![0, 2, 3]);
        let (x, added) = parse_subset(&h1, "e,4").unwrap();
        assert!(!added);
        assert_eq!(set_labels(&h1, x), vec!["e", "x4"]);
        assert!(matches!(
            parse_subset(&h1, "x9"),
            Err(IoError::BadSubset(_))
        ));
        assert_eq!(parse_subset(&h1, "").unwrap().0, PSet::IDENTITY);
    }
}
