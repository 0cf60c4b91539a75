//! Integration engines.
//!
//! Every expectation over an epistemic state goes through [`expect`]. Point
//! masses are summed exactly whichever engine is chosen; continuous
//! components are integrated by quadrature or sampled.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EpistemicState, OnticPoint};
use crate::error::{Error, Result};
use crate::quadrature::SphereQuadrature;
use crate::rng::Stream;

/// Draws per Monte Carlo work unit. Fixed so that results do not depend on
/// the number of threads.
const CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EngineKind {
    ClosedForm,
    SphereQuadrature { level: usize },
    MonteCarlo { samples: u64, seed: u64 },
}

/// An integration strategy and the tolerance its results are held to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Engine {
    pub kind: EngineKind,
    pub tolerance: f64,
}

impl Engine {
    pub fn closed_form() -> Self {
        Self {
            kind: EngineKind::ClosedForm,
            tolerance: 1e-9,
        }
    }

    pub fn quadrature(level: usize) -> Self {
        Self {
            kind: EngineKind::SphereQuadrature { level },
            tolerance: 1e-6,
        }
    }

    /// Monte Carlo; agreement is judged at three standard errors.
    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        Self {
            kind: EngineKind::MonteCarlo { samples, seed },
            tolerance: 1e-9,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Replaces the Monte Carlo seed; other engines are unchanged.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let EngineKind::MonteCarlo { samples, .. } = self.kind {
            self.kind = EngineKind::MonteCarlo { samples, seed };
        }
        self
    }

    pub fn is_sampling(&self) -> bool {
        matches!(self.kind, EngineKind::MonteCarlo { .. })
    }

    fn seed(&self) -> u64 {
        match self.kind {
            EngineKind::MonteCarlo { seed, .. } => seed,
            _ => 0,
        }
    }

    fn exact(&self, value: f64) -> Estimate {
        Estimate {
            value,
            std_error: 0.0,
            tolerance: self.tolerance,
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EngineKind::ClosedForm => write!(f, "closed"),
            EngineKind::SphereQuadrature { level } => write!(f, "quad:{level}"),
            EngineKind::MonteCarlo { samples, .. } => write!(f, "mc:{samples}"),
        }
    }
}

/// Parses `closed`, `quad:<level>` or `mc:<samples>`. The Monte Carlo seed
/// is zero until set with [`Engine::with_seed`].
impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadEngineSpec(s.to_string());
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("closed", None) => Ok(Engine::closed_form()),
            ("quad", Some(a)) => {
                let level: usize = a.parse().map_err(|_| bad())?;
                if level == 0 {
                    return Err(bad());
                }
                Ok(Engine::quadrature(level))
            }
            ("mc", Some(a)) => {
                let n: u64 = a.parse().map_err(|_| bad())?;
                if n < 2 {
                    return Err(bad());
                }
                Ok(Engine::monte_carlo(n, 0))
            }
            _ => Err(bad()),
        }
    }
}

/// A numerical result with its uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Zero for deterministic engines.
    pub std_error: f64,
    pub tolerance: f64,
}

impl Estimate {
    /// Agreement with `target`: within tolerance, or within three standard
    /// errors for sampled results.
    pub fn agrees_with(&self, target: f64) -> bool {
        (self.value - target).abs() <= self.tolerance.max(3.0 * self.std_error) + 1e-12
    }

    pub fn scaled(self, c: f64) -> Estimate {
        Estimate {
            value: self.value * c,
            std_error: self.std_error * c.abs(),
            tolerance: self.tolerance * c.abs(),
        }
    }
}

/// Componentwise expectation of `g` under `state`. `g` writes `k` values
/// into its output slice; all components share the same draws. `cuts` are
/// extra discontinuity planes of `g` on the sphere.
pub fn expect_vec(
    state: &EpistemicState,
    k: usize,
    g: &(dyn Fn(&OnticPoint, &mut [f64]) + Sync),
    cuts: &[[f64; 3]],
    engine: &Engine,
    stream: Stream,
) -> Result<Vec<Estimate>> {
    let mut value = vec![0.0; k];
    let mut var = vec![0.0; k];
    let mut buf = vec![0.0; k];
    for (leaf_no, (w, leaf)) in state.leaves().into_iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let leaf_stream = stream.child(leaf_no as u64);
        match leaf {
            EpistemicState::Atoms(pts) => {
                for (p, pw) in pts {
                    g(p, &mut buf);
                    for j in 0..k {
                        value[j] += w * pw * buf[j];
                    }
                }
            }
            EpistemicState::Sphere(law) => match engine.kind {
                EngineKind::ClosedForm => {
                    return Err(Error::EngineNotApplicable {
                        engine: engine.to_string(),
                        what: "continuous density on the sphere".into(),
                    })
                }
                EngineKind::SphereQuadrature { level } => {
                    let q = SphereQuadrature::new(level);
                    let mut all_cuts = law.cuts();
                    all_cuts.extend_from_slice(cuts);
                    for j in 0..k {
                        let f = |n: &[f64; 3]| {
                            let rho = law.density(n);
                            if rho == 0.0 {
                                return 0.0;
                            }
                            let mut out = vec![0.0; k];
                            g(&OnticPoint::Direction { n: *n }, &mut out);
                            rho * out[j]
                        };
                        value[j] += w * q.integrate(&f, &all_cuts, None);
                    }
                }
                EngineKind::MonteCarlo { samples, .. } => {
                    let (m, v) = sample_mean(leaf, k, g, samples, engine.seed(), leaf_stream);
                    for j in 0..k {
                        value[j] += w * m[j];
                        var[j] += w * w * v[j];
                    }
                }
            },
            EpistemicState::RayWithAux { .. } => match engine.kind {
                EngineKind::MonteCarlo { samples, .. } => {
                    let (m, v) = sample_mean(leaf, k, g, samples, engine.seed(), leaf_stream);
                    for j in 0..k {
                        value[j] += w * m[j];
                        var[j] += w * w * v[j];
                    }
                }
                _ => {
                    return Err(Error::EngineNotApplicable {
                        engine: engine.to_string(),
                        what: "auxiliary-variable law".into(),
                    })
                }
            },
            EpistemicState::Mixture(_) => unreachable!("leaves are flattened"),
        }
    }
    Ok(value
        .into_iter()
        .zip(var)
        .map(|(v, s2)| Estimate {
            value: v,
            std_error: s2.sqrt(),
            tolerance: engine.tolerance,
        })
        .collect())
}

/// Expectation of a scalar function.
pub fn expect(
    state: &EpistemicState,
    g: &(dyn Fn(&OnticPoint) -> f64 + Sync),
    cuts: &[[f64; 3]],
    engine: &Engine,
    stream: Stream,
) -> Result<Estimate> {
    let gv = |p: &OnticPoint, out: &mut [f64]| out[0] = g(p);
    Ok(expect_vec(state, 1, &gv, cuts, engine, stream)?[0])
}

/// Sample means and variances of the means, over `n` draws from `leaf`.
fn sample_mean(
    leaf: &EpistemicState,
    k: usize,
    g: &(dyn Fn(&OnticPoint, &mut [f64]) + Sync),
    n: u64,
    seed: u64,
    stream: Stream,
) -> (Vec<f64>, Vec<f64>) {
    let stream = Stream::new(seed ^ stream.seed, stream.stream);
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut s = vec![0.0; k];
            let mut s2 = vec![0.0; k];
            let mut buf = vec![0.0; k];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let lambda = leaf.sample(&mut stream.rng(i));
                g(&lambda, &mut buf);
                for j in 0..k {
                    s[j] += buf[j];
                    s2[j] += buf[j] * buf[j];
                }
            }
            (s, s2)
        })
        .collect();
    let mut s = vec![0.0; k];
    let mut s2 = vec![0.0; k];
    for (a, b) in partial {
        for j in 0..k {
            s[j] += a[j];
            s2[j] += b[j];
        }
    }
    let nf = n as f64;
    let mean: Vec<f64> = s.iter().map(|x| x / nf).collect();
    let var = (0..k)
        .map(|j| (s2[j] / nf - mean[j] * mean[j]).max(0.0) / (nf - 1.0))
        .collect();
    (mean, var)
}

/// Total-variation distance between two epistemic states.
///
/// States made only of point masses (including a point mass on a ray with
/// an auxiliary law) are compared exactly. States made only of sphere
/// densities are compared by integrating `|f_a - f_b| / 2`.
pub fn tv_distance(
    a: &EpistemicState,
    b: &EpistemicState,
    engine: &Engine,
    stream: Stream,
) -> Result<Estimate> {
    let la = a.leaves();
    let lb = b.leaves();
    let is_sphere = |l: &(f64, &EpistemicState)| matches!(l.1, EpistemicState::Sphere(_));
    if la.iter().chain(&lb).all(is_sphere) {
        return sphere_tv(&la, &lb, engine, stream);
    }
    if la.iter().chain(&lb).any(is_sphere) {
        return Err(Error::EngineNotApplicable {
            engine: engine.to_string(),
            what: "distance between densities and point masses".into(),
        });
    }
    // point-mass structure: compare weights on a common list of keys
    struct Key<'a> {
        leaf: &'a EpistemicState,
        point: Option<&'a OnticPoint>,
        w: [f64; 2],
    }
    let mut keys: Vec<Key> = Vec::new();
    for (side, leaves) in [&la, &lb].into_iter().enumerate() {
        for &(lw, leaf) in leaves {
            let items: Vec<(Option<&OnticPoint>, f64)> = match leaf {
                EpistemicState::Atoms(pts) => pts.iter().map(|(p, w)| (Some(p), lw * w)).collect(),
                _ => vec![(None, lw)],
            };
            for (p, w) in items {
                let pos = keys.iter().position(|k| match (k.point, p) {
                    (Some(q), Some(p)) => q.same_point(p),
                    (None, None) => same_aux_leaf(k.leaf, leaf),
                    _ => false,
                });
                match pos {
                    Some(i) => keys[i].w[side] += w,
                    None => {
                        let mut ws = [0.0; 2];
                        ws[side] = w;
                        keys.push(Key {
                            leaf,
                            point: p,
                            w: ws,
                        });
                    }
                }
            }
        }
    }
    let tv = 0.5 * keys.iter().map(|k| (k.w[0] - k.w[1]).abs()).sum::<f64>();
    Ok(Estimate {
        value: tv,
        std_error: 0.0,
        tolerance: engine.tolerance,
    })
}

fn same_aux_leaf(a: &EpistemicState, b: &EpistemicState) -> bool {
    match (a, b) {
        (
            EpistemicState::RayWithAux { ray: r, aux: x },
            EpistemicState::RayWithAux { ray: s, aux: y },
        ) => r.same_ray(s) && x == y,
        _ => false,
    }
}

fn sphere_tv(
    la: &[(f64, &EpistemicState)],
    lb: &[(f64, &EpistemicState)],
    engine: &Engine,
    stream: Stream,
) -> Result<Estimate> {
    let density = |leaves: &[(f64, &EpistemicState)], n: &[f64; 3]| -> f64 {
        leaves
            .iter()
            .map(|(w, l)| match l {
                EpistemicState::Sphere(law) => w * law.density(n),
                _ => 0.0,
            })
            .sum()
    };
    let diff = |n: &[f64; 3]| density(la, n) - density(lb, n);
    match engine.kind {
        EngineKind::ClosedForm => Err(Error::EngineNotApplicable {
            engine: engine.to_string(),
            what: "distance between sphere densities".into(),
        }),
        EngineKind::SphereQuadrature { level } => {
            let cuts: Vec<[f64; 3]> = la.iter().chain(lb).flat_map(|(_, l)| l.cuts()).collect();
            let q = SphereQuadrature::new(level);
            let v = 0.5 * q.integrate(&|n| diff(n).abs(), &cuts, Some(&diff));
            Ok(engine.exact(v))
        }
        EngineKind::MonteCarlo { samples, seed } => {
            // sample the reference measure
            let reference = EpistemicState::Sphere(std::sync::Arc::new(UniformSphere));
            let g = |p: &OnticPoint, out: &mut [f64]| {
                out[0] = match p {
                    OnticPoint::Direction { n } => 0.5 * diff(n).abs(),
                    _ => 0.0,
                }
            };
            let (m, v) = sample_mean(&reference, 1, &g, samples, seed, stream);
            Ok(Estimate {
                value: m[0],
                std_error: v[0].sqrt(),
                tolerance: engine.tolerance,
            })
        }
    }
}

/// The reference measure on the sphere.
#[derive(Debug)]
pub struct UniformSphere;

impl super::SphereLaw for UniformSphere {
    fn density(&self, _n: &[f64; 3]) -> f64 {
        1.0
    }

    fn sample(&self, rng: &mut dyn rand::RngCore) -> [f64; 3] {
        match super::OnticSpace::Sphere2.sample_reference(rng) {
            OnticPoint::Direction { n } => n,
            _ => unreachable!(),
        }
    }

    fn cuts(&self) -> Vec<[f64; 3]> {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn engine_specs_round_trip() {
        for s in ["closed", "quad:17", "mc:1000"] {
            assert_eq!(s.parse::<Engine>().unwrap().to_string(), s);
        }
        for s in ["quad", "quad:0", "mc:x", "mc:1", "exact", "closed:3"] {
            assert!(s.parse::<Engine>().is_err(), "{s}");
        }
    }

    #[test]
    fn atoms_are_exact_under_every_engine() {
        let st = EpistemicState::Atoms(vec![
            (OnticPoint::Atom { index: 0 }, 0.3),
            (OnticPoint::Atom { index: 1 }, 0.7),
        ]);
        let g = |p: &OnticPoint| match p {
            OnticPoint::Atom { index } => *index as f64,
            _ => 0.0,
        };
        for e in [
            Engine::closed_form(),
            Engine::quadrature(4),
            Engine::monte_carlo(10, 1),
        ] {
            let est = expect(&st, &g, &[], &e, Stream::new(0, 0)).unwrap();
            assert_eq!(est.value, 0.7);
            assert_eq!(est.std_error, 0.0);
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_covers_truth() {
        let st = EpistemicState::Sphere(Arc::new(UniformSphere));
        let g = |p: &OnticPoint| match p {
            OnticPoint::Direction { n } => n[2] * n[2],
            _ => 0.0,
        };
        let e = Engine::monte_carlo(20_000, 9);
        let a = expect(&st, &g, &[], &e, Stream::new(0, 4)).unwrap();
        let b = expect(&st, &g, &[], &e, Stream::new(0, 4)).unwrap();
        assert_eq!(a, b);
        assert!(a.agrees_with(1.0 / 3.0), "{a:?}");
        assert!(a.std_error > 0.0);
    }

    #[test]
    fn closed_form_rejects_densities() {
        let st = EpistemicState::Sphere(Arc::new(UniformSphere));
        let r = expect(
            &st,
            &|_| 1.0,
            &[],
            &Engine::closed_form(),
            Stream::new(0, 0),
        );
        assert!(matches!(r, Err(Error::EngineNotApplicable { .. })));
    }
}
