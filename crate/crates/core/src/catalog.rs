//! Flag manifolds with two, three and four isotropy summands, as concrete
//! (type, Σ\Θ) instances, and the check that each has the listed number of
//! summands.

use crate::flagdecomp::{decompose_isotropy, FlagError, FlagSpec};
use crate::rootsys::{Family, LieType, RootSysError, RootSystem};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

const BUILTIN: &str = include_str!("../data/catalog.json");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("rows file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("row {row}: {source}")]
    Type { row: usize, source: RootSysError },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error(transparent)]
    RootSet(#[from] RootSetError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootSetError {
    #[error("root descriptor {0:?} is only defined for G2 (use long or short)")]
    DescriptorNeedsG2(String),
    #[error("unknown root descriptor {0:?} (expected long or short)")]
    UnknownDescriptor(String),
    #[error("cannot parse simple-root list {0:?} (expected e.g. 1,2)")]
    BadList(String),
    #[error(transparent)]
    Flag(#[from] FlagError),
}

/// A set of simple roots, either as 1-based indices or, for G2, as
/// `long`/`short`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootSet {
    Indices(Vec<usize>),
    Descriptor(String),
}

impl RootSet {
    /// Parses `1,2`, `{1, 2}`, an empty string, `long` or `short`.
    pub fn parse(s: &str) -> Result<Self, RootSetError> {
        let t = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
        if t.eq_ignore_ascii_case("long") || t.eq_ignore_ascii_case("short") {
            return Ok(RootSet::Descriptor(t.to_ascii_lowercase()));
        }
        t.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .map(|p| p.trim_start_matches('α').parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map(RootSet::Indices)
            .map_err(|_| RootSetError::BadList(s.to_string()))
    }

    /// 0-based sorted indices for the given type.
    pub fn resolve(&self, lie_type: LieType) -> Result<Vec<usize>, RootSetError> {
        let mut out = match self {
            RootSet::Indices(v) => {
                for &i in v {
                    if i == 0 || i > lie_type.rank() {
                        return Err(FlagError::IndexOutOfRange { index: i, rank: lie_type.rank() }.into());
                    }
                }
                v.iter().map(|i| i - 1).collect::<Vec<_>>()
            }
            RootSet::Descriptor(d) => {
                if lie_type.family() != Family::G {
                    return Err(RootSetError::DescriptorNeedsG2(d.clone()));
                }
                match d.as_str() {
                    "long" => vec![0],
                    "short" => vec![1],
                    _ => return Err(RootSetError::UnknownDescriptor(d.clone())),
                }
            }
        };
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for RootSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootSet::Indices(v) => {
                let parts: Vec<String> = v.iter().map(|i| format!("α{i}")).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            RootSet::Descriptor(d) => write!(f, "{{{d}}}"),
        }
    }
}

/// One instance of a table row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRow {
    pub table: u8,
    pub label: String,
    #[serde(rename = "type")]
    pub lie_type: String,
    pub sigma_minus_theta: RootSet,
    #[serde(rename = "s")]
    pub expected_s: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowsFile {
    pub rows: Vec<RawRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogRow {
    pub table: u8,
    pub label: String,
    pub lie_type: LieType,
    pub sigma_minus_theta: RootSet,
    pub expected_s: usize,
}

/// Parses and validates a rows file.
pub fn parse_rows(json: &str) -> Result<Vec<CatalogRow>, CatalogError> {
    let file: RowsFile = serde_json::from_str(json)?;
    file.rows
        .into_iter()
        .enumerate()
        .map(|(k, r)| {
            let row = k + 1;
            let lie_type: LieType = r.lie_type.parse().map_err(|source| CatalogError::Type { row, source })?;
            if !(2..=4).contains(&r.expected_s) {
                return Err(CatalogError::Row { row, message: format!("s = {} is not in 2..=4", r.expected_s) });
            }
            r.sigma_minus_theta.resolve(lie_type).map_err(|e| CatalogError::Row { row, message: e.to_string() })?;
            Ok(CatalogRow {
                table: r.table,
                label: r.label,
                lie_type,
                sigma_minus_theta: r.sigma_minus_theta,
                expected_s: r.expected_s,
            })
        })
        .collect()
}

/// The built-in transcription of the two-summand and three/four-summand
/// tables.
pub fn builtin_rows() -> Vec<CatalogRow> {
    parse_rows(BUILTIN).expect("built-in catalog is valid")
}

pub fn builtin_json() -> &'static str {
    BUILTIN
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogCheck {
    pub row: CatalogRow,
    pub computed_s: usize,
}

impl CatalogCheck {
    pub fn ok(&self) -> bool {
        self.computed_s == self.row.expected_s
    }
}

/// Counts the summands of every row.
pub fn check_rows(rows: &[CatalogRow]) -> Result<Vec<CatalogCheck>, CatalogError> {
    let mut systems: Vec<RootSystem> = Vec::new();
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let idx = match systems.iter().position(|rs| rs.lie_type() == row.lie_type) {
            Some(i) => i,
            None => {
                systems.push(RootSystem::new(row.lie_type));
                systems.len() - 1
            }
        };
        let rs = &systems[idx];
        let complement = row.sigma_minus_theta.resolve(row.lie_type)?;
        let fs = FlagSpec::from_complement(rs, &complement).map_err(RootSetError::from)?;
        out.push(CatalogCheck { row: row.clone(), computed_s: decompose_isotropy(&fs).len() });
    }
    Ok(out)
}
