//! Deliberately broken models, used as negative controls.

use crate::error::Result;
use crate::framework::{
    check_dim, DeclaredProperties, Engine, EpistemicState, MeasContext, OnticPoint, OnticSpace,
    OntologicalModel, Predicate, PrepContext, ResponseFunction,
};
use crate::hilbert::{born_probability, PureState};

use super::ks::{prepare_cosine, Hemisphere};

/// The hemisphere model with its core shrunk to `n_phi . lambda > 0.2`, so
/// states prepared near the rim of the hemisphere fail with certainty.
#[derive(Debug, Clone, Copy)]
pub struct ShrunkCore {
    response: Hemisphere,
}

impl Default for ShrunkCore {
    fn default() -> Self {
        Self {
            response: Hemisphere { threshold: 0.2 },
        }
    }
}

impl OntologicalModel for ShrunkCore {
    fn name(&self) -> String {
        "ks-shrunk".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn ontic_space(&self) -> OnticSpace {
        OnticSpace::Sphere2
    }

    fn prepare(&self, psi: &PureState, _ctx: &PrepContext) -> Result<EpistemicState> {
        prepare_cosine("ks-shrunk", psi)
    }

    fn response(&self) -> &dyn ResponseFunction {
        &self.response
    }

    fn declared(&self) -> DeclaredProperties {
        super::make_ks().declared()
    }

    fn default_engine(&self) -> Engine {
        Engine::quadrature(17)
    }
}

/// A deterministic, noncontextual rule on rays of any dimension:
/// `phi` occurs iff `|<phi|lambda>|^2 > 1/2`. It is not a valid model
/// (probabilities over a basis need not sum to one).
#[derive(Debug, Clone, Copy)]
pub struct DeterministicFake {
    dim: usize,
}

impl DeterministicFake {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl ResponseFunction for DeterministicFake {
    fn evaluate(&self, outcome: &PureState, lambda: &OnticPoint, ctx: &MeasContext) -> f64 {
        if self.is_core(outcome, lambda, ctx) {
            1.0
        } else {
            0.0
        }
    }

    fn is_core(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> bool {
        lambda
            .ray()
            .is_some_and(|r| born_probability(outcome, r).unwrap_or(0.0) > 0.5)
    }

    fn is_support(&self, outcome: &PureState, lambda: &OnticPoint, ctx: &MeasContext) -> bool {
        self.is_core(outcome, lambda, ctx)
    }

    fn reads_prepared_state(&self) -> bool {
        true
    }
}

impl OntologicalModel for DeterministicFake {
    fn name(&self) -> String {
        format!("fake:{}", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn ontic_space(&self) -> OnticSpace {
        OnticSpace::Ray { dim: self.dim }
    }

    fn prepare(&self, psi: &PureState, _ctx: &PrepContext) -> Result<EpistemicState> {
        check_dim(self, psi.dim())?;
        Ok(EpistemicState::point(OnticPoint::Ray { ray: psi.clone() }))
    }

    fn response(&self) -> &dyn ResponseFunction {
        self
    }

    fn declared(&self) -> DeclaredProperties {
        DeclaredProperties {
            reciprocal: false,
            outcome_deterministic: true,
            measurement_contextual: false,
            preparation_contextual: true,
            psi_dependent_response: true,
        }
    }

    fn analytic(&self) -> Vec<Predicate> {
        vec![
            Predicate::Determinism,
            Predicate::MeasurementNoncontextuality,
        ]
    }

    fn default_engine(&self) -> Engine {
        Engine::closed_form()
    }
}

/// Wraps a model and flips its declared reciprocity.
pub struct Misdeclared<M> {
    pub inner: M,
}

impl<M: OntologicalModel> OntologicalModel for Misdeclared<M> {
    fn name(&self) -> String {
        format!("{}-misdeclared", self.inner.name())
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn ontic_space(&self) -> OnticSpace {
        self.inner.ontic_space()
    }

    fn prepare(&self, psi: &PureState, ctx: &PrepContext) -> Result<EpistemicState> {
        self.inner.prepare(psi, ctx)
    }

    fn response(&self) -> &dyn ResponseFunction {
        self.inner.response()
    }

    fn declared(&self) -> DeclaredProperties {
        let mut d = self.inner.declared();
        d.reciprocal = !d.reciprocal;
        d
    }

    fn analytic(&self) -> Vec<Predicate> {
        self.inner.analytic()
    }

    fn default_engine(&self) -> Engine {
        self.inner.default_engine()
    }
}
