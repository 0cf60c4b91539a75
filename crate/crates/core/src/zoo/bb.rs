//! The ontic state is the quantum state itself and outcomes follow the
//! Born rule directly.

use crate::error::Result;
use crate::framework::{
    check_dim, DeclaredProperties, Engine, EpistemicState, MeasContext, OnticPoint, OnticSpace,
    OntologicalModel, Predicate, PrepContext, ResponseFunction,
};
use crate::hilbert::{born_probability, PureState};

/// Overlaps below this are zero.
const ZERO: f64 = 1e-24;

#[derive(Debug, Clone, Copy)]
struct BornResponse;

fn overlap(outcome: &PureState, lambda: &OnticPoint) -> f64 {
    match lambda {
        OnticPoint::Ray { ray } => born_probability(outcome, ray).unwrap_or(0.0),
        _ => 0.0,
    }
}

impl ResponseFunction for BornResponse {
    fn evaluate(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> f64 {
        overlap(outcome, lambda)
    }

    fn is_core(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> bool {
        lambda.ray().is_some_and(|r| r.same_ray(outcome))
    }

    fn is_support(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> bool {
        overlap(outcome, lambda) > ZERO
    }

    fn reads_prepared_state(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BbModel {
    dim: usize,
    response: BornResponse,
}

/// # Panics
/// If `dim < 2`.
pub fn make_bb(dim: usize) -> BbModel {
    assert!(dim >= 2, "dimension must be at least 2");
    BbModel {
        dim,
        response: BornResponse,
    }
}

impl OntologicalModel for BbModel {
    fn name(&self) -> String {
        format!("bb:{}", self.dim)
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
        &self.response
    }

    fn declared(&self) -> DeclaredProperties {
        DeclaredProperties {
            reciprocal: true,
            outcome_deterministic: false,
            measurement_contextual: false,
            preparation_contextual: true,
            psi_dependent_response: true,
        }
    }

    fn analytic(&self) -> Vec<Predicate> {
        vec![
            Predicate::QuantumCertainty,
            Predicate::SupportChain,
            Predicate::Reciprocity,
            Predicate::MeasurementNoncontextuality,
        ]
    }

    fn default_engine(&self) -> Engine {
        Engine::closed_form()
    }
}
