//! Ontic states are the quantum state together with an unnormalized
//! Gaussian vector `b`. In basis `{|j>}`, outcome `i` occurs when
//! `|a_i / b_i|` is the largest ratio, where `a_j = <j|psi>` and
//! `b_j = <j|b>`.

use num_complex::Complex64;

use crate::error::Result;
use crate::framework::{
    check_dim, AuxKind, AuxValue, DeclaredProperties, Engine, EpistemicState, MeasContext,
    OnticPoint, OnticSpace, OntologicalModel, Predicate, PrepContext, ResponseFunction,
};
use crate::hilbert::PureState;

/// Index of the largest `|a_j / b_j|`. A zero `b_j` gives an infinite
/// ratio unless `a_j` is zero too, in which case the ratio is zero; ties
/// go to the lowest index.
pub fn winner(a: &[Complex64], b: &[Complex64]) -> usize {
    let ratio = |j: usize| {
        let (x, y) = (a[j].norm(), b[j].norm());
        if x == 0.0 {
            0.0
        } else if y == 0.0 {
            f64::INFINITY
        } else {
            x / y
        }
    };
    let mut best = 0;
    for j in 1..a.len() {
        if ratio(j) > ratio(best) {
            best = j;
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
struct LargestRatio;

impl LargestRatio {
    fn fires(outcome: &PureState, lambda: &OnticPoint, ctx: &MeasContext) -> bool {
        let OnticPoint::Composite {
            ray,
            aux: AuxValue::Gaussian(g),
        } = lambda
        else {
            return false;
        };
        if g.len() != ray.dim() || outcome.dim() != ray.dim() {
            return false;
        }
        let (basis, i) = ctx.basis_for(outcome);
        let project = |v: &[Complex64]| -> Vec<Complex64> {
            basis
                .vectors()
                .iter()
                .map(|e| {
                    e.amplitudes()
                        .iter()
                        .zip(v)
                        .map(|(x, y)| x.conj() * y)
                        .sum()
                })
                .collect()
        };
        winner(&project(ray.amplitudes()), &project(g)) == i
    }
}

impl ResponseFunction for LargestRatio {
    fn evaluate(&self, outcome: &PureState, lambda: &OnticPoint, ctx: &MeasContext) -> f64 {
        if Self::fires(outcome, lambda, ctx) {
            1.0
        } else {
            0.0
        }
    }

    fn is_core(&self, outcome: &PureState, lambda: &OnticPoint, ctx: &MeasContext) -> bool {
        Self::fires(outcome, lambda, ctx)
    }

    fn is_support(&self, outcome: &PureState, lambda: &OnticPoint, ctx: &MeasContext) -> bool {
        Self::fires(outcome, lambda, ctx)
    }

    fn reads_prepared_state(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WsModel {
    dim: usize,
    response: LargestRatio,
}

/// # Panics
/// If `dim < 2`.
pub fn make_ws(dim: usize) -> WsModel {
    assert!(dim >= 2, "dimension must be at least 2");
    WsModel {
        dim,
        response: LargestRatio,
    }
}

impl OntologicalModel for WsModel {
    fn name(&self) -> String {
        format!("ws:{}", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn ontic_space(&self) -> OnticSpace {
        OnticSpace::Composite {
            dim: self.dim,
            aux: AuxKind::ComplexGaussian { dim: self.dim },
        }
    }

    fn prepare(&self, psi: &PureState, _ctx: &PrepContext) -> Result<EpistemicState> {
        check_dim(self, psi.dim())?;
        Ok(EpistemicState::RayWithAux {
            ray: psi.clone(),
            aux: AuxKind::ComplexGaussian { dim: self.dim },
        })
    }

    fn response(&self) -> &dyn ResponseFunction {
        &self.response
    }

    fn declared(&self) -> DeclaredProperties {
        DeclaredProperties {
            reciprocal: false,
            outcome_deterministic: true,
            measurement_contextual: self.dim >= 3,
            preparation_contextual: true,
            psi_dependent_response: true,
        }
    }

    fn analytic(&self) -> Vec<Predicate> {
        vec![Predicate::Determinism]
    }

    fn default_engine(&self) -> Engine {
        Engine::monte_carlo(200_000, 0)
    }
}
