//! Two-valued assignments on sets of rays.
//!
//! A valuation gives every ray 0 or 1 so that each complete orthogonal
//! basis holds exactly one 1 and no two orthogonal rays are both 1. Ray
//! coordinates are exact numbers in `Q(√r)`, so orthogonality is decided
//! without tolerances.

mod check;
mod graph;
mod scalar;
mod solver;

pub use check::{verify_against_vectors, verify_valuation, Violation};
pub use graph::{build_graph, OrthogonalityGraph};
pub use scalar::{dot, parallel, parse_surd, Surd};
pub use solver::{enumerate_valuations, find_valuation, SearchOutcome, SearchStats};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rays with exact coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSet {
    pub dim: usize,
    pub radical: u32,
    pub vectors: Vec<Vec<Surd>>,
    pub labels: Vec<Option<String>>,
}

impl VectorSet {
    /// Validates and builds a set: no zero vectors, no parallel pairs.
    pub fn new(
        dim: usize,
        radical: u32,
        vectors: Vec<Vec<Surd>>,
        labels: Vec<Option<String>>,
    ) -> Result<Self> {
        check_radical(radical).map_err(|msg| Error::Parse { line: 0, msg })?;
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().all(Surd::is_zero) {
                return Err(Error::InvalidState(format!("vector {} is zero", i + 1)));
            }
            for (j, u) in vectors[..i].iter().enumerate() {
                if parallel(u, v, radical) {
                    return Err(Error::ParallelRays {
                        first: j + 1,
                        second: i + 1,
                    });
                }
            }
        }
        Ok(Self {
            dim,
            radical,
            vectors,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Floating-point coordinates.
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.vectors
            .iter()
            .map(|v| v.iter().map(|x| x.to_f64(self.radical)).collect())
            .collect()
    }

    /// The set without the listed vertices.
    pub fn without(&self, removed: &[usize]) -> VectorSet {
        let keep = |i: &usize| !removed.contains(i);
        VectorSet {
            dim: self.dim,
            radical: self.radical,
            vectors: (0..self.len())
                .filter(keep)
                .map(|i| self.vectors[i].clone())
                .collect(),
            labels: (0..self.len())
                .filter(keep)
                .map(|i| self.labels[i].clone())
                .collect(),
        }
    }

    /// Parses the text format; see [`load_vector_set`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut header = None;
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        let mut lines_of = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((dim, radical)) = header else {
                header = Some(parse_header(line).map_err(err)?);
                continue;
            };
            let (label, body) = match line.split_once(':') {
                Some((l, b)) => (Some(l.trim().to_string()), b),
                None => (None, line),
            };
            let v = body
                .split_whitespace()
                .map(|t| parse_surd(t, radical))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(err)?;
            if v.len() != dim {
                return Err(err(format!("expected {dim} components, found {}", v.len())));
            }
            vectors.push(v);
            labels.push(label);
            lines_of.push(line_no);
        }
        let (dim, radical) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing header `dim=<d> radical=<r>`".into(),
        })?;
        VectorSet::new(dim, radical, vectors, labels).map_err(|e| match e {
            Error::ParallelRays { first, second } => Error::Parse {
                line: lines_of[second - 1],
                msg: format!(
                    "rays on lines {} and {} are parallel",
                    lines_of[first - 1],
                    lines_of[second - 1]
                ),
            },
            other => other,
        })
    }
}

fn check_radical(r: u32) -> std::result::Result<(), String> {
    let s = f64::from(r).sqrt().round() as u32;
    if r != 0 && s * s == r {
        Err(format!("radical {r} is a perfect square"))
    } else {
        Ok(())
    }
}

fn parse_header(line: &str) -> std::result::Result<(usize, u32), String> {
    let mut dim = None;
    let mut radical = 0;
    for field in line.split_whitespace() {
        match field.split_once('=') {
            Some(("dim", v)) => dim = Some(v.parse::<usize>().map_err(|_| "bad dim".to_string())?),
            Some(("radical", v)) => {
                radical = v.parse().map_err(|_| "bad radical".to_string())?;
                check_radical(radical)?;
            }
            _ => {
                return Err(format!(
                    "expected header `dim=<d> radical=<r>`, found `{line}`"
                ))
            }
        }
    }
    match dim {
        Some(d) if d >= 3 => Ok((d, radical)),
        Some(d) => Err(format!("dimension must be at least 3, found {d}")),
        None => Err("header lacks `dim=`".into()),
    }
}

/// Loads a vector-set file.
///
/// ```text
/// # comment
/// dim=3 radical=2
/// a: 0 1 √2
/// 1 -1 1+√2
/// ```
pub fn load_vector_set(path: impl AsRef<Path>) -> Result<VectorSet> {
    VectorSet::parse(&std::fs::read_to_string(path)?)
}

/// A {0,1} value per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Valuation {
    pub values: Vec<u8>,
}

impl Valuation {
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == 1)
            .map(|(i, _)| i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = VectorSet::parse("dim=3 radical=0\n1 1 0\n\n2 2 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = VectorSet::parse("dim=3\n1 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = VectorSet::parse("# only\ndim=3 radical=4\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = VectorSet::parse("dim=3 radical=0\n0 0 0\n").unwrap_err();
        assert!(matches!(e, Error::InvalidState(_)));
        assert!(VectorSet::parse("1 0 0\n").is_err());
        assert!(VectorSet::parse("dim=2 radical=0\n1 0\n").is_err());
    }

    #[test]
    fn labels_and_comments() {
        let s = VectorSet::parse("dim=3 radical=2 # header\nx: 1 0 √2 # c\n0 1 0\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.labels, vec![Some("x".into()), None]);
    }
}
