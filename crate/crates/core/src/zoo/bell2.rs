//! A qubit model with a uniform auxiliary variable `x`.
//!
//! Each two-outcome measurement has a canonical first vector `phi_1`: the
//! one whose Bloch vector is lexicographically positive. Outcome `phi_1`
//! occurs iff `x < |<phi_1|psi>|^2`.

use crate::error::Result;
use crate::framework::{
    check_dim, AuxKind, AuxValue, DeclaredProperties, Engine, EpistemicState, MeasContext,
    OnticPoint, OnticSpace, OntologicalModel, Predicate, PrepContext, ResponseFunction,
};
use crate::hilbert::{born_probability, PureState};

use super::ks::bloch;

/// Whether `phi` is the canonical first vector of its measurement.
pub fn is_canonical(phi: &PureState) -> bool {
    bloch(phi)
        .and_then(|b| b.into_iter().find(|c| c.abs() > 1e-12))
        .is_some_and(|c| c > 0.0)
}

#[derive(Debug, Clone, Copy)]
struct Threshold;

impl Threshold {
    fn fires(outcome: &PureState, lambda: &OnticPoint) -> bool {
        let OnticPoint::Composite {
            ray,
            aux: AuxValue::Uniform(x),
        } = lambda
        else {
            return false;
        };
        let canonical = is_canonical(outcome);
        let first = if canonical {
            outcome.clone()
        } else {
            match outcome.qubit_complement() {
                Ok(c) => c,
                Err(_) => return false,
            }
        };
        let p = born_probability(&first, ray).unwrap_or(0.0);
        // a ray equal to a basis vector decides the outcome for every x
        let p = if p > 1.0 - 1e-12 {
            1.0
        } else if p < 1e-12 {
            0.0
        } else {
            p
        };
        (*x < p) == canonical
    }
}

impl ResponseFunction for Threshold {
    fn evaluate(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> f64 {
        if Self::fires(outcome, lambda) {
            1.0
        } else {
            0.0
        }
    }

    fn is_core(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> bool {
        Self::fires(outcome, lambda)
    }

    fn is_support(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> bool {
        Self::fires(outcome, lambda)
    }

    fn reads_prepared_state(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Bell2Model {
    response: Threshold,
}

pub fn make_bell2() -> Bell2Model {
    Bell2Model {
        response: Threshold,
    }
}

impl OntologicalModel for Bell2Model {
    fn name(&self) -> String {
        "bell2".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn ontic_space(&self) -> OnticSpace {
        OnticSpace::Composite {
            dim: 2,
            aux: AuxKind::Uniform01,
        }
    }

    fn prepare(&self, psi: &PureState, _ctx: &PrepContext) -> Result<EpistemicState> {
        check_dim(self, psi.dim())?;
        Ok(EpistemicState::RayWithAux {
            ray: psi.clone(),
            aux: AuxKind::Uniform01,
        })
    }

    fn response(&self) -> &dyn ResponseFunction {
        &self.response
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
            Predicate::QuantumCertainty,
            Predicate::SupportChain,
            Predicate::Determinism,
            Predicate::MeasurementNoncontextuality,
        ]
    }

    fn default_engine(&self) -> Engine {
        Engine::monte_carlo(200_000, 0)
    }
}
