//! The hemisphere model of a qubit.
//!
//! Ontic states are unit vectors. Preparing `psi` gives the cosine law
//! `(n_psi . lambda) / pi` on the hemisphere around its Bloch vector, and
//! an outcome `phi` occurs exactly when `lambda` lies in the open hemisphere
//! around `n_phi`.

use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::framework::{
    DeclaredProperties, Engine, EpistemicState, MeasContext, OnticPoint, OnticSpace,
    OntologicalModel, Predicate, PrepContext, ResponseFunction, SphereLaw,
};
use crate::hilbert::PureState;

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn bloch(s: &PureState) -> Option<[f64; 3]> {
    s.bloch().ok().map(|b| b.to_array())
}

/// Density `4 (n . lambda)_+` against the normalized uniform measure.
#[derive(Debug, Clone, Copy)]
pub struct CosineLaw {
    pub axis: [f64; 3],
}

impl SphereLaw for CosineLaw {
    fn density(&self, n: &[f64; 3]) -> f64 {
        4.0 * dot(&self.axis, n).max(0.0)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> [f64; 3] {
        let c = rng.random::<f64>().sqrt();
        let s = (1.0 - c * c).max(0.0).sqrt();
        let a = std::f64::consts::TAU * rng.random::<f64>();
        let (u, v) = perpendicular(&self.axis);
        let (x, y) = (s * a.cos(), s * a.sin());
        [0, 1, 2].map(|k| c * self.axis[k] + x * u[k] + y * v[k])
    }

    fn cuts(&self) -> Vec<[f64; 3]> {
        vec![self.axis]
    }
}

fn perpendicular(n: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let t = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let d = dot(n, &t);
    let u = [t[0] - d * n[0], t[1] - d * n[1], t[2] - d * n[2]];
    let nu = dot(&u, &u).sqrt();
    let u = u.map(|x| x / nu);
    let v = [
        n[1] * u[2] - n[2] * u[1],
        n[2] * u[0] - n[0] * u[2],
        n[0] * u[1] - n[1] * u[0],
    ];
    (u, v)
}

/// `xi(phi | lambda) = 1` iff `n_phi . lambda > threshold`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Hemisphere {
    pub(crate) threshold: f64,
}

impl Hemisphere {
    fn inside(&self, outcome: &PureState, lambda: &OnticPoint) -> bool {
        match (lambda, bloch(outcome)) {
            (OnticPoint::Direction { n }, Some(b)) => dot(&b, n) > self.threshold,
            _ => false,
        }
    }
}

impl ResponseFunction for Hemisphere {
    fn evaluate(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> f64 {
        if self.inside(outcome, lambda) {
            1.0
        } else {
            0.0
        }
    }

    fn is_core(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> bool {
        self.inside(outcome, lambda)
    }

    fn is_support(&self, outcome: &PureState, lambda: &OnticPoint, _ctx: &MeasContext) -> bool {
        self.inside(outcome, lambda)
    }

    fn cuts(&self, outcome: &PureState) -> Vec<[f64; 3]> {
        if self.threshold == 0.0 {
            bloch(outcome).into_iter().collect()
        } else {
            Vec::new()
        }
    }

    fn reads_prepared_state(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KsModel {
    response: Hemisphere,
}

pub fn make_ks() -> KsModel {
    KsModel {
        response: Hemisphere { threshold: 0.0 },
    }
}

pub(crate) fn prepare_cosine(model: &str, psi: &PureState) -> Result<EpistemicState> {
    let axis = psi.bloch().map_err(|_| Error::UnsupportedDim {
        model: model.into(),
        dim: psi.dim(),
    })?;
    Ok(EpistemicState::Sphere(Arc::new(CosineLaw {
        axis: axis.to_array(),
    })))
}

impl OntologicalModel for KsModel {
    fn name(&self) -> String {
        "ks".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn ontic_space(&self) -> OnticSpace {
        OnticSpace::Sphere2
    }

    fn prepare(&self, psi: &PureState, _ctx: &PrepContext) -> Result<EpistemicState> {
        prepare_cosine("ks", psi)
    }

    fn response(&self) -> &dyn ResponseFunction {
        &self.response
    }

    fn declared(&self) -> DeclaredProperties {
        DeclaredProperties {
            reciprocal: true,
            outcome_deterministic: true,
            measurement_contextual: false,
            preparation_contextual: true,
            psi_dependent_response: false,
        }
    }

    fn analytic(&self) -> Vec<Predicate> {
        vec![
            Predicate::QuantumCertainty,
            Predicate::SupportChain,
            Predicate::Reciprocity,
            Predicate::Determinism,
            Predicate::MeasurementNoncontextuality,
            Predicate::FunctionalEpistemicity,
        ]
    }

    fn default_engine(&self) -> Engine {
        Engine::quadrature(17)
    }
}
