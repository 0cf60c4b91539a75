//! Linear-programming bounds on finite fragments.
//!
//! On a finite fragment a noncontextual deterministic model is a
//! distribution over atoms, the {0,1} valuations of the fragment's rays.
//! [`feasibility_max_epistemic`] asks whether each prepared state admits
//! such a distribution that reproduces the Born rule while only loading
//! atoms that answer "yes" to the state's own ray. [`max_overlap_fraction`]
//! maximizes a uniform lower bound `t` on the overlap fraction across all
//! pairs of prepared states.

mod fragment;
mod model;
mod simplex;

pub use fragment::{load_fragment, Fragment, ORTHO_TOL};
pub use model::AtomModel;
pub use simplex::{simplex_solve, FarkasCertificate, LinearProgram, LpOutcome, LP_TOL};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::valuation::{enumerate_valuations, OrthogonalityGraph};

/// Enumeration stops with an error beyond this many atoms.
pub const ATOM_LIMIT: usize = 1 << 16;

/// Pairs with Born probability below this get no overlap constraint.
const PAIR_MIN_BORN: f64 = 1e-9;

/// Attached to every overlap report: the optimum is over the
/// noncontextual deterministic class only.
pub const CAVEAT: &str = "noncontextual-deterministic class";

/// A {0,1} valuation of the fragment's rays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Atom {
    /// Value per ray.
    pub values: Vec<u8>,
    /// Selected outcome per basis.
    pub outcomes: Vec<usize>,
}

impl Atom {
    pub fn fires(&self, ray: usize) -> bool {
        self.values[ray] == 1
    }
}

/// All atoms of the fragment, in solver order.
pub fn enumerate_atoms(frag: &Fragment) -> Result<Vec<Atom>> {
    let g = OrthogonalityGraph::from_relation(frag.rays.len(), frag.dim, |i, j| {
        frag.is_orthogonal(i, j)
    });
    let (vals, _) = enumerate_valuations(&g, ATOM_LIMIT + 1);
    if vals.len() > ATOM_LIMIT {
        return Err(Error::InvalidState(format!(
            "more than {ATOM_LIMIT} atoms; split the fragment"
        )));
    }
    Ok(vals
        .into_iter()
        .map(|v| {
            let outcomes = frag
                .basis_rays
                .iter()
                .map(|rays| {
                    rays.iter()
                        .position(|&r| v.values[r] == 1)
                        .expect("a valuation selects one outcome per basis")
                })
                .collect();
            Atom {
                values: v.values,
                outcomes,
            }
        })
        .collect())
}

/// Atoms a state may load: those valuing its own ray 1, when measured.
fn allowed(frag: &Fragment, atoms: &[Atom], state: usize) -> Vec<usize> {
    match frag.state_ray(state) {
        Some(r) => (0..atoms.len()).filter(|&a| atoms[a].fires(r)).collect(),
        None => (0..atoms.len()).collect(),
    }
}

/// Born rows for `state` over the listed atoms, columns offset by `offset`
/// in a program with `width` variables.
fn born_rows(
    frag: &Fragment,
    atoms: &[Atom],
    state: usize,
    cols: &[usize],
    offset: usize,
    width: usize,
) -> Vec<(Vec<f64>, f64)> {
    let mut rows = Vec::new();
    for rays in &frag.basis_rays {
        for &r in rays {
            let mut row = vec![0.0; width];
            for (k, &a) in cols.iter().enumerate() {
                if atoms[a].fires(r) {
                    row[offset + k] = 1.0;
                }
            }
            rows.push((row, frag.born(state, r)));
        }
    }
    rows
}

/// The Born-and-support program for one state; variables are the allowed
/// atoms in increasing order.
pub fn feasibility_lp(frag: &Fragment, atoms: &[Atom], state: usize) -> LinearProgram {
    let cols = allowed(frag, atoms, state);
    let mut lp = LinearProgram::new(cols.len());
    for (row, b) in born_rows(frag, atoms, state, &cols, 0, cols.len()) {
        lp.add_eq(row, b);
    }
    lp
}

/// Weights over atoms for each prepared state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteModel {
    pub atoms: Vec<Atom>,
    /// `weights[i][a]`: probability of atom `a` when state `i` is prepared.
    pub weights: Vec<Vec<f64>>,
}

impl FiniteModel {
    /// Largest violation of the Born, support and normalization
    /// constraints.
    pub fn violation(&self, frag: &Fragment) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            worst = worst.max((w.iter().sum::<f64>() - 1.0).abs());
            for x in w {
                worst = worst.max(-x);
            }
            if let Some(r) = frag.state_ray(i) {
                for (a, x) in w.iter().enumerate() {
                    if !self.atoms[a].fires(r) {
                        worst = worst.max(x.abs());
                    }
                }
            }
            for rays in &frag.basis_rays {
                for &r in rays {
                    let p: f64 = (0..w.len())
                        .filter(|&a| self.atoms[a].fires(r))
                        .map(|a| w[a])
                        .sum();
                    worst = worst.max((p - frag.born(i, r)).abs());
                }
            }
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Feasibility {
    Feasible {
        model: FiniteModel,
    },
    /// State `state` admits no model; the certificate refers to
    /// [`feasibility_lp`] for that state.
    Infeasible {
        state: usize,
        certificate: FarkasCertificate,
    },
}

/// Whether every prepared state admits a reciprocal noncontextual
/// deterministic model on the fragment.
pub fn feasibility_max_epistemic(frag: &Fragment, atoms: &[Atom]) -> Result<Feasibility> {
    let mut weights = Vec::new();
    for i in 0..frag.states.len() {
        let lp = feasibility_lp(frag, atoms, i);
        match simplex_solve(&lp)? {
            LpOutcome::Optimal { x, .. } => {
                let mut w = vec![0.0; atoms.len()];
                for (k, a) in allowed(frag, atoms, i).into_iter().enumerate() {
                    w[a] = x[k];
                }
                weights.push(w);
            }
            LpOutcome::Infeasible { certificate } => {
                return Ok(Feasibility::Infeasible {
                    state: i,
                    certificate,
                })
            }
            LpOutcome::Unbounded => unreachable!("zero objective"),
        }
    }
    Ok(Feasibility::Feasible {
        model: FiniteModel {
            atoms: atoms.to_vec(),
            weights,
        },
    })
}

/// Atoms that some feasible distribution for `state` loads. This is the
/// largest possible support, found by one homogenized program:
/// maximize `Σ z` with `z <= μ`, `z <= 1` and `A μ = b τ`.
pub fn max_support(frag: &Fragment, atoms: &[Atom], state: usize) -> Result<Option<Vec<usize>>> {
    let cols = allowed(frag, atoms, state);
    let k = cols.len();
    let width = 2 * k + 1;
    let mut c = vec![0.0; width];
    for v in &mut c[k..2 * k] {
        *v = 1.0;
    }
    let mut lp = LinearProgram::new(width).maximize(c);
    for (mut row, b) in born_rows(frag, atoms, state, &cols, 0, width) {
        row[2 * k] = -b;
        lp.add_eq(row, 0.0);
    }
    for j in 0..k {
        let mut row = vec![0.0; width];
        row[k + j] = 1.0;
        row[j] = -1.0;
        lp.add_le(row, 0.0);
        let mut cap = vec![0.0; width];
        cap[k + j] = 1.0;
        lp.add_le(cap, 1.0);
    }
    match simplex_solve(&lp)? {
        // only μ = 0 is left when the state admits no distribution
        LpOutcome::Optimal { value, .. } if value < 0.5 => Ok(None),
        LpOutcome::Optimal { x, .. } => Ok(Some(
            (0..k)
                .filter(|&j| x[k + j] > 0.5)
                .map(|j| cols[j])
                .collect(),
        )),
        LpOutcome::Infeasible { .. } => unreachable!("μ = 0 is feasible"),
        LpOutcome::Unbounded => unreachable!("objective is capped"),
    }
}

/// Overlap fraction achieved for one ordered pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairFraction {
    /// The state whose support is measured.
    pub phi: usize,
    /// The prepared state.
    pub psi: usize,
    pub born: f64,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapReport {
    pub f_star: f64,
    pub model: FiniteModel,
    pub pairs: Vec<PairFraction>,
    /// Largest support per state, as atom indices.
    pub supports: Vec<Vec<usize>>,
    pub caveat: &'static str,
}

/// Maximizes `t` such that, for every prepared-and-measured `φ` and every
/// prepared `ψ` not orthogonal to it, `ψ` puts at least `t |<φ|ψ>|²` of its
/// mass on the largest support of `φ`.
///
/// The support of `φ` is taken as the largest support any feasible
/// distribution for `φ` can have, which makes `t` an upper bound over
/// the choice of `φ`'s own distribution.
pub fn max_overlap_fraction(frag: &Fragment, atoms: &[Atom]) -> Result<OverlapReport> {
    if atoms.is_empty() {
        return Err(Error::EmptyAtomSet);
    }
    let n_s = frag.states.len();
    let mut supports = Vec::with_capacity(n_s);
    for i in 0..n_s {
        supports.push(max_support(frag, atoms, i)?.ok_or_else(|| {
            Error::InvalidState(format!(
                "state `{}` admits no model on this fragment",
                frag.state_labels[i]
            ))
        })?);
    }
    let cols: Vec<Vec<usize>> = (0..n_s).map(|i| allowed(frag, atoms, i)).collect();
    let offsets: Vec<usize> = cols
        .iter()
        .scan(0, |acc, c| {
            let o = *acc;
            *acc += c.len();
            Some(o)
        })
        .collect();
    let t_var = cols.iter().map(Vec::len).sum::<usize>();
    let width = t_var + 1;
    let mut c = vec![0.0; width];
    c[t_var] = 1.0;
    let mut lp = LinearProgram::new(width).maximize(c);
    for i in 0..n_s {
        for (row, b) in born_rows(frag, atoms, i, &cols[i], offsets[i], width) {
            lp.add_eq(row, b);
        }
    }
    let mut pairs = Vec::new();
    for j in (0..n_s).filter(|&j| frag.state_ray(j).is_some()) {
        for i in (0..n_s).filter(|&i| i != j) {
            let born = crate::hilbert::born_probability(&frag.states[j], &frag.states[i])?;
            if born < PAIR_MIN_BORN {
                continue;
            }
            let mut row = vec![0.0; width];
            row[t_var] = born;
            for (k, a) in cols[i].iter().enumerate() {
                if supports[j].contains(a) {
                    row[offsets[i] + k] = -1.0;
                }
            }
            lp.add_le(row, 0.0);
            pairs.push((j, i, born));
        }
    }
    let mut cap = vec![0.0; width];
    cap[t_var] = 1.0;
    lp.add_le(cap, 1.0);
    let x = match simplex_solve(&lp)? {
        LpOutcome::Optimal { x, .. } => x,
        LpOutcome::Infeasible { .. } => {
            return Err(Error::InvalidState("fragment admits no joint model".into()))
        }
        LpOutcome::Unbounded => unreachable!("t is capped"),
    };
    let weights: Vec<Vec<f64>> = (0..n_s)
        .map(|i| {
            let mut w = vec![0.0; atoms.len()];
            for (k, &a) in cols[i].iter().enumerate() {
                w[a] = x[offsets[i] + k];
            }
            w
        })
        .collect();
    let pairs = pairs
        .into_iter()
        .map(|(phi, psi, born)| PairFraction {
            phi,
            psi,
            born,
            fraction: supports[phi].iter().map(|&a| weights[psi][a]).sum::<f64>() / born,
        })
        .collect();
    Ok(OverlapReport {
        f_star: x[t_var],
        model: FiniteModel {
            atoms: atoms.to_vec(),
            weights,
        },
        pairs,
        supports,
        caveat: CAVEAT,
    })
}
