//! The ontological-model abstraction.
//!
//! A model has a space of ontic states, a preparation map from quantum
//! states to distributions over that space (epistemic states), and a
//! response function giving outcome probabilities for each ontic state.
//! Everything that checks a model lives in the submodules: integration
//! engines in [`engine`], Born and certainty checks in [`checks`], and the
//! randomized property classifier in [`classify`].

pub mod checks;
pub mod classify;
pub mod engine;

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Basis, Decomposition, PureState};
use crate::quadrature::SphereQuadrature;
use crate::rng::{halton, DrawId};

pub use checks::{
    check_normalization, check_quantum_certainty, check_support_chain, is_maximally_epistemic,
    overlap_fraction, predict_basis, predict_probability, support_mass, verify_born, BornPair,
    BornReport, CheckOutcome, MaxEpistemicReport,
};
pub use classify::{
    classify, fourier_basis, functional_dependence_test, ks_om_consistency, prep_context_distance,
    replay, yes_no, Budget, ClassificationReport, DrawSource, FunctionalReport, FunctionalVerdict,
    KsOmReport, KsOmRow, PredicateEntry, PrepContextReport, PrepVerdict, Replay, Status, TableRow,
    Witness, PREP_CONTEXT_THRESHOLD,
};
pub use engine::{expect, expect_vec, tv_distance, Engine, EngineKind, Estimate, UniformSphere};

/// Pointwise tolerance for response-function values.
pub const POINTWISE_TOL: f64 = 1e-9;

/// Law of the auxiliary component of a composite ontic state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxKind {
    /// Uniform on `[0, 1)`.
    Uniform01,
    /// Independent standard complex Gaussians, `E|z|^2 = 1` per coordinate.
    ComplexGaussian { dim: usize },
}

impl AuxKind {
    fn uniform_dims(&self) -> usize {
        match self {
            AuxKind::Uniform01 => 1,
            AuxKind::ComplexGaussian { dim } => 2 * dim,
        }
    }

    fn from_uniforms(&self, u: &[f64]) -> AuxValue {
        match self {
            AuxKind::Uniform01 => AuxValue::Uniform(u[0]),
            AuxKind::ComplexGaussian { dim } => {
                let g = gaussians(u);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                AuxValue::Gaussian(
                    (0..*dim)
                        .map(|k| Complex64::new(s * g[2 * k], s * g[2 * k + 1]))
                        .collect(),
                )
            }
        }
    }

    /// Total mass of the auxiliary law, integrated numerically.
    pub fn normalization(&self) -> f64 {
        match self {
            AuxKind::Uniform01 => {
                let (_, w) = crate::quadrature::gauss_legendre(8);
                w.iter().sum::<f64>() / 2.0
            }
            AuxKind::ComplexGaussian { dim } => {
                // product of 2*dim identical one-dimensional normal integrals
                let (x, w) = crate::quadrature::gauss_legendre(64);
                let panels = 16;
                let (lo, hi) = (-12.0_f64, 12.0_f64);
                let mut one = 0.0;
                for p in 0..panels {
                    let a = lo + (hi - lo) * p as f64 / panels as f64;
                    let b = lo + (hi - lo) * (p + 1) as f64 / panels as f64;
                    for (xi, wi) in x.iter().zip(&w) {
                        let t = 0.5 * (a + b) + 0.5 * (b - a) * xi;
                        one += 0.5 * (b - a) * wi * (-0.5 * t * t).exp();
                    }
                }
                (one / TAU.sqrt()).powi(2 * *dim as i32)
            }
        }
    }
}

/// Box-Muller on consecutive pairs of uniforms in `[0, 1)`.
fn gaussians(u: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.len());
    for pair in u.chunks(2) {
        let r = (-2.0 * (1.0 - pair[0]).ln()).sqrt();
        let a = TAU * pair.get(1).copied().unwrap_or(0.0);
        out.push(r * a.cos());
        out.push(r * a.sin());
    }
    out.truncate(u.len());
    out
}

/// Value of an auxiliary variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxValue {
    Uniform(f64),
    Gaussian(Vec<Complex64>),
}

/// An ontic state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OnticPoint {
    /// Unit vector on the sphere.
    Direction { n: [f64; 3] },
    /// A ray of Hilbert space.
    Ray { ray: PureState },
    /// A ray together with auxiliary data.
    Composite { ray: PureState, aux: AuxValue },
    /// An element of a finite ontic space.
    Atom { index: usize },
}

impl OnticPoint {
    /// The Hilbert-space ray carried by this point, if any.
    pub fn ray(&self) -> Option<&PureState> {
        match self {
            OnticPoint::Ray { ray } | OnticPoint::Composite { ray, .. } => Some(ray),
            _ => None,
        }
    }

    /// Same point, with rays compared up to phase.
    pub fn same_point(&self, other: &OnticPoint) -> bool {
        match (self, other) {
            (OnticPoint::Direction { n: a }, OnticPoint::Direction { n: b }) => a == b,
            (OnticPoint::Ray { ray: a }, OnticPoint::Ray { ray: b }) => a.same_ray(b),
            (
                OnticPoint::Composite { ray: a, aux: x },
                OnticPoint::Composite { ray: b, aux: y },
            ) => a.same_ray(b) && x == y,
            (OnticPoint::Atom { index: a }, OnticPoint::Atom { index: b }) => a == b,
            _ => false,
        }
    }
}

/// How reference-measure probe points are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeKind {
    /// Independent draws from the reference measure.
    Random,
    /// Quadrature nodes on the sphere; a Halton sequence pushed through the
    /// reference sampler elsewhere.
    Quadrature { level: usize },
}

/// The space of ontic states together with its reference measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OnticSpace {
    /// Unit sphere, uniform reference measure.
    Sphere2,
    /// Projective Hilbert space, Haar-induced measure.
    Ray { dim: usize },
    /// Rays times auxiliary data, product measure.
    Composite { dim: usize, aux: AuxKind },
    /// A finite set, uniform counting measure.
    Discrete { atoms: usize },
}

impl OnticSpace {
    fn uniform_dims(&self) -> usize {
        match self {
            OnticSpace::Sphere2 => 2,
            OnticSpace::Ray { dim } => 2 * dim,
            OnticSpace::Composite { dim, aux } => 2 * dim + aux.uniform_dims(),
            OnticSpace::Discrete { .. } => 1,
        }
    }

    /// Pushes a point of the unit cube through the reference sampler.
    fn from_uniforms(&self, u: &[f64]) -> OnticPoint {
        match self {
            OnticSpace::Sphere2 => {
                let z = 1.0 - 2.0 * u[0];
                let r = (1.0 - z * z).max(0.0).sqrt();
                let a = TAU * u[1];
                OnticPoint::Direction {
                    n: [r * a.cos(), r * a.sin(), z],
                }
            }
            OnticSpace::Ray { dim } => OnticPoint::Ray {
                ray: ray_from_uniforms(*dim, u),
            },
            OnticSpace::Composite { dim, aux } => OnticPoint::Composite {
                ray: ray_from_uniforms(*dim, &u[..2 * dim]),
                aux: aux.from_uniforms(&u[2 * dim..]),
            },
            OnticSpace::Discrete { atoms } => OnticPoint::Atom {
                index: ((u[0] * *atoms as f64) as usize).min(atoms.saturating_sub(1)),
            },
        }
    }

    /// Draws from the reference measure.
    pub fn sample_reference(&self, rng: &mut dyn RngCore) -> OnticPoint {
        let u: Vec<f64> = (0..self.uniform_dims())
            .map(|_| rng.random::<f64>())
            .collect();
        self.from_uniforms(&u)
    }

    /// The `draw.index`-th probe point of the given kind.
    pub fn probe(&self, kind: ProbeKind, draw: DrawId) -> OnticPoint {
        match (kind, self) {
            (ProbeKind::Random, _) => self.sample_reference(&mut draw.rng()),
            (ProbeKind::Quadrature { level }, OnticSpace::Sphere2) => {
                let nodes = SphereQuadrature::new(level).nodes();
                let (n, _) = nodes[(draw.index as usize) % nodes.len()];
                OnticPoint::Direction { n }
            }
            (ProbeKind::Quadrature { .. }, _) => {
                let u = halton(draw.index, self.uniform_dims());
                self.from_uniforms(&u)
            }
        }
    }

    /// The quantum state's role inside an ontic state.
    pub fn psi_component(&self) -> PsiComponent {
        match self {
            OnticSpace::Sphere2 | OnticSpace::Discrete { .. } => PsiComponent::Absent,
            OnticSpace::Ray { .. } => PsiComponent::Whole,
            OnticSpace::Composite { .. } => PsiComponent::Part,
        }
    }
}

/// Whether an ontic state contains the prepared quantum state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiComponent {
    Absent,
    /// The ontic state is the ray itself.
    Whole,
    /// The ray is one component next to auxiliary data.
    Part,
}

fn ray_from_uniforms(dim: usize, u: &[f64]) -> PureState {
    let g = gaussians(u);
    let v: Vec<Complex64> = (0..dim)
        .map(|k| Complex64::new(g[2 * k], g[2 * k + 1]))
        .collect();
    PureState::normalized(v).unwrap_or_else(|_| PureState::basis(dim, 0))
}

/// A continuous distribution on the sphere, given by its density with
/// respect to the normalized uniform measure.
pub trait SphereLaw: Send + Sync + fmt::Debug {
    fn density(&self, n: &[f64; 3]) -> f64;

    fn sample(&self, rng: &mut dyn RngCore) -> [f64; 3];

    /// Normals of planes across which the density may jump or kink.
    fn cuts(&self) -> Vec<[f64; 3]>;
}

/// A distribution over ontic states.
///
/// Continuous laws carry a density against the reference measure; point
/// masses are listed explicitly since they have none.
#[derive(Clone, Debug)]
pub enum EpistemicState {
    /// Finitely many weighted points.
    Atoms(Vec<(OnticPoint, f64)>),
    /// Density on the sphere.
    Sphere(Arc<dyn SphereLaw>),
    /// Point mass on a ray, times an auxiliary law.
    RayWithAux { ray: PureState, aux: AuxKind },
    /// Convex combination.
    Mixture(Vec<(f64, EpistemicState)>),
}

impl EpistemicState {
    pub fn point(p: OnticPoint) -> Self {
        EpistemicState::Atoms(vec![(p, 1.0)])
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> OnticPoint {
        match self {
            EpistemicState::Atoms(pts) => pick(pts.iter().map(|(p, w)| (*w, p)), rng).clone(),
            EpistemicState::Sphere(law) => OnticPoint::Direction { n: law.sample(rng) },
            EpistemicState::RayWithAux { ray, aux } => {
                let u: Vec<f64> = (0..aux.uniform_dims())
                    .map(|_| rng.random::<f64>())
                    .collect();
                OnticPoint::Composite {
                    ray: ray.clone(),
                    aux: aux.from_uniforms(&u),
                }
            }
            EpistemicState::Mixture(parts) => {
                pick(parts.iter().map(|(w, s)| (*w, s)), rng).sample(rng)
            }
        }
    }

    /// Membership in the support.
    pub fn contains(&self, lambda: &OnticPoint) -> bool {
        match self {
            EpistemicState::Atoms(pts) => pts.iter().any(|(p, w)| *w > 0.0 && p.same_point(lambda)),
            EpistemicState::Sphere(law) => match lambda {
                OnticPoint::Direction { n } => law.density(n) > 0.0,
                _ => false,
            },
            EpistemicState::RayWithAux { ray, aux } => match lambda {
                OnticPoint::Composite { ray: r, aux: a } => {
                    ray.same_ray(r)
                        && match (aux, a) {
                            (AuxKind::Uniform01, AuxValue::Uniform(x)) => (0.0..1.0).contains(x),
                            (AuxKind::ComplexGaussian { dim }, AuxValue::Gaussian(v)) => {
                                v.len() == *dim
                            }
                            _ => false,
                        }
                }
                _ => false,
            },
            EpistemicState::Mixture(parts) => {
                parts.iter().any(|(w, s)| *w > 0.0 && s.contains(lambda))
            }
        }
    }

    /// Cut planes of every spherical component.
    pub fn cuts(&self) -> Vec<[f64; 3]> {
        match self {
            EpistemicState::Sphere(law) => law.cuts(),
            EpistemicState::Mixture(parts) => parts.iter().flat_map(|(_, s)| s.cuts()).collect(),
            _ => Vec::new(),
        }
    }

    /// Flattens nested mixtures into weighted leaves.
    pub fn leaves(&self) -> Vec<(f64, &EpistemicState)> {
        match self {
            EpistemicState::Mixture(parts) => parts
                .iter()
                .flat_map(|(w, s)| s.leaves().into_iter().map(move |(v, l)| (w * v, l)))
                .collect(),
            other => vec![(1.0, other)],
        }
    }
}

fn pick<'a, T>(items: impl Iterator<Item = (f64, &'a T)>, rng: &mut dyn RngCore) -> &'a T {
    let items: Vec<(f64, &T)> = items.collect();
    let total: f64 = items.iter().map(|(w, _)| w).sum();
    let mut u = rng.random::<f64>() * total;
    for (w, t) in &items {
        if u < *w {
            return t;
        }
        u -= w;
    }
    items
        .iter()
        .rev()
        .find(|(w, _)| *w > 0.0)
        .map(|(_, t)| *t)
        .expect("nonempty distribution")
}

/// Preparation context. When a mixed state is prepared, the decomposition
/// used is part of the context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepContext {
    pub label: String,
    pub decomposition: Option<Decomposition>,
}

impl PrepContext {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            decomposition: None,
        }
    }

    pub fn mixture(label: impl Into<String>, decomposition: Decomposition) -> Self {
        Self {
            label: label.into(),
            decomposition: Some(decomposition),
        }
    }
}

impl Default for PrepContext {
    fn default() -> Self {
        Self::new("default")
    }
}

/// Measurement context: the ordered basis in which an outcome is measured.
/// Without a basis, models complete the outcome canonically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasContext {
    pub label: String,
    pub basis: Option<Basis>,
}

impl MeasContext {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            basis: None,
        }
    }

    pub fn with_basis(label: impl Into<String>, basis: Basis) -> Self {
        Self {
            label: label.into(),
            basis: Some(basis),
        }
    }

    /// The context's basis if it contains `outcome`, else the canonical
    /// completion of `outcome`, together with the outcome's index.
    pub fn basis_for(&self, outcome: &PureState) -> (Basis, usize) {
        if let Some(b) = &self.basis {
            if let Some(i) = b.position(outcome) {
                return (b.clone(), i);
            }
        }
        (Basis::completing(outcome), 0)
    }
}

impl Default for MeasContext {
    fn default() -> Self {
        Self::new("default")
    }
}

/// `xi(outcome | lambda, context)` together with its analytic core
/// (`xi = 1`) and support (`xi > 0`).
pub trait ResponseFunction: Send + Sync {
    fn evaluate(&self, outcome: &PureState, lambda: &OnticPoint, ctx: &MeasContext) -> f64;

    fn is_core(&self, outcome: &PureState, lambda: &OnticPoint, ctx: &MeasContext) -> bool;

    fn is_support(&self, outcome: &PureState, lambda: &OnticPoint, ctx: &MeasContext) -> bool;

    /// Planes on the sphere across which `evaluate` jumps.
    fn cuts(&self, _outcome: &PureState) -> Vec<[f64; 3]> {
        Vec::new()
    }

    /// Structural flag: does evaluation read the prepared quantum state?
    fn reads_prepared_state(&self) -> bool;
}

/// Properties a model claims for itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredProperties {
    pub reciprocal: bool,
    pub outcome_deterministic: bool,
    pub measurement_contextual: bool,
    pub preparation_contextual: bool,
    pub psi_dependent_response: bool,
}

/// The predicates a classifier can test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    QuantumCertainty,
    SupportChain,
    Reciprocity,
    Determinism,
    NonDeficiency,
    MeasurementNoncontextuality,
    PreparationNoncontextuality,
    FunctionalEpistemicity,
    MaximalEpistemicity,
}

impl Predicate {
    pub fn key(&self) -> &'static str {
        match self {
            Predicate::QuantumCertainty => "quantum_certainty",
            Predicate::SupportChain => "support_chain",
            Predicate::Reciprocity => "reciprocity",
            Predicate::Determinism => "determinism",
            Predicate::NonDeficiency => "non_deficiency",
            Predicate::MeasurementNoncontextuality => "measurement_noncontextuality",
            Predicate::PreparationNoncontextuality => "preparation_noncontextuality",
            Predicate::FunctionalEpistemicity => "functional_epistemicity",
            Predicate::MaximalEpistemicity => "maximal_epistemicity",
        }
    }
}

/// An ontological model for states of one Hilbert-space dimension.
pub trait OntologicalModel: Send + Sync {
    /// Registry name, e.g. `bb:3`.
    fn name(&self) -> String;

    fn dim(&self) -> usize;

    fn supported_dims(&self) -> Vec<usize> {
        vec![self.dim()]
    }

    fn ontic_space(&self) -> OnticSpace;

    fn prepare(&self, psi: &PureState, ctx: &PrepContext) -> Result<EpistemicState>;

    /// A mixed state prepared by sampling the decomposition's components.
    fn prepare_mixed(&self, decomp: &Decomposition, ctx: &PrepContext) -> Result<EpistemicState> {
        let parts = decomp
            .components()
            .iter()
            .map(|(w, s)| Ok((*w, self.prepare(s, ctx)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(EpistemicState::Mixture(parts))
    }

    fn response(&self) -> &dyn ResponseFunction;

    fn declared(&self) -> DeclaredProperties;

    /// Predicates that hold by construction rather than by sampling.
    fn analytic(&self) -> Vec<Predicate> {
        Vec::new()
    }

    fn default_engine(&self) -> Engine;
}

/// Rejects states of the wrong dimension.
pub fn check_dim(model: &dyn OntologicalModel, dim: usize) -> Result<()> {
    if model.supported_dims().contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDim {
            model: model.name(),
            dim,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn reference_samplers_are_valid() {
        let s = Stream::new(3, 0);
        for space in [
            OnticSpace::Sphere2,
            OnticSpace::Ray { dim: 3 },
            OnticSpace::Composite {
                dim: 2,
                aux: AuxKind::Uniform01,
            },
            OnticSpace::Composite {
                dim: 3,
                aux: AuxKind::ComplexGaussian { dim: 3 },
            },
            OnticSpace::Discrete { atoms: 5 },
        ] {
            for i in 0..50 {
                for kind in [ProbeKind::Random, ProbeKind::Quadrature { level: 5 }] {
                    match space.probe(kind, s.draw(i)) {
                        OnticPoint::Direction { n } => {
                            let r = n.iter().map(|x| x * x).sum::<f64>();
                            assert!((r - 1.0).abs() < 1e-12);
                        }
                        OnticPoint::Atom { index } => assert!(index < 5),
                        OnticPoint::Composite {
                            aux: AuxValue::Uniform(x),
                            ..
                        } => {
                            assert!((0.0..1.0).contains(&x))
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    #[test]
    fn aux_laws_are_normalized() {
        assert!((AuxKind::Uniform01.normalization() - 1.0).abs() < 1e-12);
        assert!((AuxKind::ComplexGaussian { dim: 3 }.normalization() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixture_support_and_sampling() {
        let a = OnticPoint::Atom { index: 0 };
        let b = OnticPoint::Atom { index: 1 };
        let m = EpistemicState::Mixture(vec![
            (0.25, EpistemicState::point(a.clone())),
            (0.75, EpistemicState::point(b.clone())),
        ]);
        assert!(m.contains(&a) && m.contains(&b));
        assert!(!m.contains(&OnticPoint::Atom { index: 2 }));
        let s = Stream::new(1, 1);
        let hits = (0..4000).filter(|&i| m.sample(&mut s.rng(i)) == a).count();
        assert!((hits as f64 / 4000.0 - 0.25).abs() < 0.03);
        assert_eq!(m.leaves().len(), 2);
    }
}
