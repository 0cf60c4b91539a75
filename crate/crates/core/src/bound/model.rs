//! A solved fragment as an ontological model over its atoms.

use crate::error::{Error, Result};
use crate::framework::{
    check_dim, DeclaredProperties, Engine, EpistemicState, MeasContext, OnticPoint, OnticSpace,
    OntologicalModel, Predicate, PrepContext, ResponseFunction,
};
use crate::hilbert::PureState;

use super::{FiniteModel, Fragment};

struct AtomResponse {
    rays: Vec<PureState>,
    values: Vec<Vec<u8>>,
}

impl AtomResponse {
    /// NaN for outcomes outside the fragment, so any check touching them
    /// fails.
    fn value(&self, outcome: &PureState, lambda: &OnticPoint) -> f64 {
        let Some(r) = self.rays.iter().position(|r| r.same_ray(outcome)) else {
            return f64::NAN;
        };
        match lambda {
            OnticPoint::Atom { index } if *index < self.values.len() => {
                f64::from(self.values[*index][r])
            }
            _ => 0.0,
        }
    }
}

impl ResponseFunction for AtomResponse {
    fn evaluate(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> f64 {
        self.value(outcome, lambda)
    }

    fn is_core(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> bool {
        self.value(outcome, lambda) == 1.0
    }

    fn is_support(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> bool {
        self.value(outcome, lambda) > 0.0
    }

    fn reads_prepared_state(&self) -> bool {
        false
    }
}

/// Prepares only the fragment's states and answers only its rays.
pub struct AtomModel {
    dim: usize,
    states: Vec<PureState>,
    weights: Vec<Vec<f64>>,
    response: AtomResponse,
}

impl AtomModel {
    pub fn new(frag: &Fragment, model: &FiniteModel) -> Self {
        AtomModel {
            dim: frag.dim,
            states: frag.states.clone(),
            weights: model.weights.clone(),
            response: AtomResponse {
                rays: frag.rays.clone(),
                values: model.atoms.iter().map(|a| a.values.clone()).collect(),
            },
        }
    }
}

impl OntologicalModel for AtomModel {
    fn name(&self) -> String {
        format!("atoms:{}", self.response.values.len())
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn supported_dims(&self) -> Vec<usize> {
        vec![self.dim]
    }

    fn ontic_space(&self) -> OnticSpace {
        OnticSpace::Discrete {
            atoms: self.response.values.len(),
        }
    }

    fn prepare(&self, psi: &PureState, _ctx: &PrepContext) -> Result<EpistemicState> {
        check_dim(self, psi.dim())?;
        let i = self
            .states
            .iter()
            .position(|s| s.same_ray(psi))
            .ok_or_else(|| Error::UnknownPreparation(format!("{:?}", psi.amplitudes())))?;
        Ok(EpistemicState::Atoms(
            self.weights[i]
                .iter()
                .enumerate()
                .filter(|(_, w)| **w > 0.0)
                .map(|(index, w)| (OnticPoint::Atom { index }, *w))
                .collect(),
        ))
    }

    fn response(&self) -> &dyn ResponseFunction {
        &self.response
    }

    fn declared(&self) -> DeclaredProperties {
        DeclaredProperties {
            reciprocal: true,
            outcome_deterministic: true,
            measurement_contextual: false,
            preparation_contextual: false,
            psi_dependent_response: false,
        }
    }

    fn analytic(&self) -> Vec<Predicate> {
        Vec::new()
    }

    fn default_engine(&self) -> Engine {
        Engine::closed_form()
    }
}
