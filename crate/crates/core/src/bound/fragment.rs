//! Finite prepare-and-measure fragments and their text format.

use std::path::Path;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hilbert::{born_probability, Basis, PureState};
use crate::valuation::{dot, parse_surd, Surd};

/// Two rays are orthogonal when `|<u|v>|` is below this.
pub const ORTHO_TOL: f64 = 1e-9;

/// States and bases of one experiment, plus derived ray data.
#[derive(Clone, Debug)]
pub struct Fragment {
    pub dim: usize,
    pub states: Vec<PureState>,
    pub state_labels: Vec<String>,
    pub bases: Vec<Basis>,
    pub basis_labels: Vec<String>,
    /// Distinct rays among all basis vectors.
    pub rays: Vec<PureState>,
    /// `basis_rays[b][k]` indexes the ray of outcome `k` of basis `b`.
    pub basis_rays: Vec<Vec<usize>>,
    /// Whether orthogonality and Born values were computed exactly.
    pub exact: bool,
    orth: Vec<Vec<bool>>,
    /// `born[i][r]`: probability of ray `r` in state `i`.
    born: Vec<Vec<f64>>,
    state_ray: Vec<Option<usize>>,
}

/// Exact real coordinates attached to states and basis vectors.
struct ExactParts {
    radical: u32,
    states: Vec<Vec<Surd>>,
    bases: Vec<Vec<Vec<Surd>>>,
}

impl Fragment {
    /// Builds a fragment in floating point.
    pub fn new(states: Vec<PureState>, bases: Vec<Basis>) -> Result<Self> {
        let n_s = states.len();
        let n_b = bases.len();
        Self::build(
            states,
            (1..=n_s).map(|i| format!("psi{i}")).collect(),
            bases,
            (1..=n_b).map(|i| format!("B{i}")).collect(),
            None,
        )
    }

    fn build(
        states: Vec<PureState>,
        state_labels: Vec<String>,
        bases: Vec<Basis>,
        basis_labels: Vec<String>,
        exact: Option<ExactParts>,
    ) -> Result<Self> {
        let dim = bases
            .first()
            .map(Basis::dim)
            .or_else(|| states.first().map(PureState::dim))
            .ok_or_else(|| Error::InvalidState("empty fragment".into()))?;
        for d in states
            .iter()
            .map(PureState::dim)
            .chain(bases.iter().map(Basis::dim))
        {
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d,
                });
            }
        }

        let mut rays: Vec<PureState> = Vec::new();
        let mut exact_rays: Vec<Vec<Surd>> = Vec::new();
        let mut basis_rays = Vec::new();
        for (b, basis) in bases.iter().enumerate() {
            let mut idx = Vec::new();
            for (k, v) in basis.vectors().iter().enumerate() {
                let found = rays.iter().position(|r| r.same_ray(v));
                idx.push(found.unwrap_or_else(|| {
                    rays.push(v.clone());
                    if let Some(e) = &exact {
                        exact_rays.push(e.bases[b][k].clone());
                    }
                    rays.len() - 1
                }));
            }
            basis_rays.push(idx);
        }
        let n = rays.len();

        let (orth, born) = match &exact {
            None => {
                let orth = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                i != j
                                    && rays[i].inner(&rays[j]).map(|z| z.norm()).unwrap_or(1.0)
                                        < ORTHO_TOL
                            })
                            .collect()
                    })
                    .collect();
                let born = states
                    .iter()
                    .map(|s| {
                        rays.iter()
                            .map(|r| born_probability(r, s))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                (orth, born)
            }
            Some(e) => {
                let r = e.radical;
                let orth = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| i != j && dot(&exact_rays[i], &exact_rays[j], r).is_zero())
                            .collect()
                    })
                    .collect();
                let born = e
                    .states
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        exact_rays
                            .iter()
                            .map(|v| {
                                exact_born(s, v, r).ok_or_else(|| {
                                    Error::InvalidState(format!(
                                        "state `{}` has an irrational Born value; drop `exact`",
                                        state_labels[i]
                                    ))
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                (orth, born)
            }
        };
        let state_ray = states
            .iter()
            .map(|s| rays.iter().position(|r| r.same_ray(s)))
            .collect();
        Ok(Self {
            dim,
            states,
            state_labels,
            bases,
            basis_labels,
            rays,
            basis_rays,
            exact: exact.is_some(),
            orth,
            born,
            state_ray,
        })
    }

    pub fn is_orthogonal(&self, r1: usize, r2: usize) -> bool {
        self.orth[r1][r2]
    }

    /// Probability of ray `ray` when state `state` is prepared.
    pub fn born(&self, state: usize, ray: usize) -> f64 {
        self.born[state][ray]
    }

    /// The ray of state `i`, when some basis measures it.
    pub fn state_ray(&self, i: usize) -> Option<usize> {
        self.state_ray[i]
    }

    /// Parses the fragment format.
    ///
    /// ```text
    /// dim=3 radical=2 exact
    /// state psi: 0 √2 1
    /// basis Z:
    ///   1 0 0
    ///   0 1 0
    ///   0 0 1
    /// ```
    ///
    /// Without `exact`, amplitudes are `re` or `re,im`, each part a decimal,
    /// a fraction or a surd such as `1/2√3`. With `exact`, amplitudes must
    /// be real surds in the header radical and every Born value rational.
    /// Vectors need not be normalized.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<Header> = None;
        let mut states = Vec::new();
        let mut state_labels = Vec::new();
        let mut bases: Vec<(String, usize, Vec<Amps>)> = Vec::new();
        let mut last_line = 0;
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            last_line = line_no;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some(h) = &header else {
                header = Some(Header::parse(line).map_err(err)?);
                continue;
            };
            let open = bases.last().filter(|(_, _, v)| v.len() < h.dim);
            if let Some((label, start, _)) = open {
                if line.starts_with("state") || line.starts_with("basis") {
                    return Err(Error::Parse {
                        line: *start,
                        msg: format!("basis `{label}` has fewer than {} vectors", h.dim),
                    });
                }
                let v = h.vector(line).map_err(err)?;
                bases.last_mut().expect("open basis").2.push(v);
                continue;
            }
            let (head, body) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected `state:` or `basis:`, found `{line}`")))?;
            let mut words = head.split_whitespace();
            let kind = words.next().unwrap_or("");
            let label = words.next().map(str::to_string);
            match kind {
                "state" => {
                    states.push(h.vector(body).map_err(err)?);
                    state_labels.push(label.unwrap_or_else(|| format!("psi{}", states.len())));
                }
                "basis" => {
                    let label = label.unwrap_or_else(|| format!("B{}", bases.len() + 1));
                    bases.push((label, line_no, Vec::new()));
                    if !body.trim().is_empty() {
                        return Err(err("basis vectors go on the following lines".into()));
                    }
                }
                other => return Err(err(format!("unknown entry `{other}`"))),
            }
        }
        let h = header.ok_or(Error::Parse {
            line: last_line,
            msg: "missing header `dim=<d>`".into(),
        })?;
        if let Some((label, start, v)) = bases.last() {
            if v.len() < h.dim {
                return Err(Error::Parse {
                    line: *start,
                    msg: format!("basis `{label}` has fewer than {} vectors", h.dim),
                });
            }
        }
        let to_state = |a: &Amps| PureState::normalized(a.complex.clone());
        let st = states.iter().map(to_state).collect::<Result<Vec<_>>>()?;
        let mut bs = Vec::new();
        for (label, line, vs) in &bases {
            let vectors = vs.iter().map(to_state).collect::<Result<Vec<_>>>()?;
            bs.push(Basis::new(vectors).map_err(|e| Error::Parse {
                line: *line,
                msg: format!("basis `{label}`: {e}"),
            })?);
        }
        let exact = h.exact.then(|| ExactParts {
            radical: h.radical,
            states: states.iter().map(|a| a.exact.clone()).collect(),
            bases: bases
                .iter()
                .map(|(_, _, vs)| vs.iter().map(|a| a.exact.clone()).collect())
                .collect(),
        });
        Self::build(
            st,
            state_labels,
            bs,
            bases.into_iter().map(|b| b.0).collect(),
            exact,
        )
    }
}

/// Loads a fragment file; see [`Fragment::parse`].
pub fn load_fragment(path: impl AsRef<Path>) -> Result<Fragment> {
    Fragment::parse(&std::fs::read_to_string(path)?)
}

fn exact_born(s: &[Surd], v: &[Surd], r: u32) -> Option<f64> {
    let ip = dot(s, v, r);
    let num = ip.mul(&ip, r);
    let den = dot(s, s, r).mul(&dot(v, v, r), r);
    let q = num.div(&den, r)?;
    q.q.is_zero().then(|| q.p.to_f64().unwrap_or(f64::NAN))
}

struct Header {
    dim: usize,
    radical: u32,
    exact: bool,
}

struct Amps {
    complex: Vec<Complex64>,
    exact: Vec<Surd>,
}

impl Header {
    fn parse(line: &str) -> std::result::Result<Self, String> {
        let mut h = Header {
            dim: 0,
            radical: 0,
            exact: false,
        };
        for field in line.split_whitespace() {
            match field.split_once('=') {
                Some(("dim", v)) => h.dim = v.parse().map_err(|_| format!("bad dim `{v}`"))?,
                Some(("radical", v)) => {
                    h.radical = v.parse().map_err(|_| format!("bad radical `{v}`"))?
                }
                None if field == "exact" => h.exact = true,
                _ => {
                    return Err(format!(
                        "expected header `dim=<d> [radical=<r>] [exact]`, found `{line}`"
                    ))
                }
            }
        }
        if h.dim < 2 {
            return Err("header needs `dim=<d>` with d >= 2".into());
        }
        Ok(h)
    }

    fn vector(&self, body: &str) -> std::result::Result<Amps, String> {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != self.dim {
            return Err(format!(
                "expected {} amplitudes, found {}",
                self.dim,
                tokens.len()
            ));
        }
        let mut complex = Vec::new();
        let mut exact = Vec::new();
        for t in tokens {
            if self.exact {
                if t.contains(',') {
                    return Err(format!("`{t}`: exact fragments take real amplitudes"));
                }
                let s = parse_surd(t, self.radical)?;
                complex.push(Complex64::new(s.to_f64(self.radical), 0.0));
                exact.push(s);
            } else {
                let (re, im) = t.split_once(',').unwrap_or((t, "0"));
                complex.push(Complex64::new(parse_real(re)?, parse_real(im)?));
            }
        }
        Ok(Amps { complex, exact })
    }
}

/// A decimal, a fraction, or a surd with any radicand.
fn parse_real(token: &str) -> std::result::Result<f64, String> {
    if let Ok(x) = token.parse::<f64>() {
        return Ok(x);
    }
    let t = token.replace("sqrt", "√");
    match t.split_once('√') {
        Some((_, rad)) => {
            let r: u32 = rad
                .parse()
                .map_err(|_| format!("bad radicand in `{token}`"))?;
            Ok(parse_surd(&t, r)?.to_f64(r))
        }
        None => t
            .parse::<BigRational>()
            .ok()
            .and_then(|q| q.to_f64())
            .ok_or_else(|| format!("bad number `{token}`")),
    }
}
