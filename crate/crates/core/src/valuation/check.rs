//! Independent re-check of a valuation. Shares no code with the search.

use serde::Serialize;

use super::{dot, OrthogonalityGraph, Valuation, VectorSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    WrongLength {
        expected: usize,
        found: usize,
    },
    /// Condition (i): a value other than 0 or 1.
    NotBinary {
        vertex: usize,
        value: u8,
    },
    /// Condition (ii): a complete basis without exactly one 1.
    Basis {
        basis: Vec<usize>,
        ones: usize,
    },
    /// Condition (iii): two orthogonal rays both valued 1.
    OrthogonalPair {
        first: usize,
        second: usize,
    },
}

fn check(
    n: usize,
    dim: usize,
    orth: &dyn Fn(usize, usize) -> bool,
    v: &Valuation,
) -> Result<(), Violation> {
    if v.values.len() != n {
        return Err(Violation::WrongLength {
            expected: n,
            found: v.values.len(),
        });
    }
    if let Some((vertex, &value)) = v.values.iter().enumerate().find(|(_, x)| **x > 1) {
        return Err(Violation::NotBinary { vertex, value });
    }
    for i in 0..n {
        for j in i + 1..n {
            if v.values[i] == 1 && v.values[j] == 1 && orth(i, j) {
                return Err(Violation::OrthogonalPair {
                    first: i,
                    second: j,
                });
            }
        }
    }
    // every d-subset of pairwise orthogonal rays, by plain enumeration
    let mut stack: Vec<usize> = Vec::with_capacity(dim);
    let mut next = 0usize;
    loop {
        if stack.len() == dim {
            let ones = stack.iter().filter(|&&k| v.values[k] == 1).count();
            if ones != 1 {
                return Err(Violation::Basis {
                    basis: stack.clone(),
                    ones,
                });
            }
        }
        if stack.len() < dim && next < n {
            if stack.iter().all(|&k| orth(k, next)) {
                stack.push(next);
            }
            next += 1;
            continue;
        }
        match stack.pop() {
            Some(last) => next = last + 1,
            None => return Ok(()),
        }
    }
}

/// Checks conditions (i)-(iii) against the graph's edge list.
pub fn verify_valuation(
    g: &OrthogonalityGraph,
    v: &Valuation,
    dim: usize,
) -> Result<(), Violation> {
    let edges: std::collections::HashSet<(usize, usize)> = g.edges.iter().copied().collect();
    let orth = |i: usize, j: usize| edges.contains(&(i.min(j), i.max(j)));
    check(g.n, dim, &orth, v)
}

/// Checks conditions (i)-(iii) against exact dot products of the vectors.
pub fn verify_against_vectors(set: &VectorSet, v: &Valuation) -> Result<(), Violation> {
    let orth = |i: usize, j: usize| dot(&set.vectors[i], &set.vectors[j], set.radical).is_zero();
    check(set.len(), set.dim, &orth, v)
}
