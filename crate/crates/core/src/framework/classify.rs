//! Randomized classification of models against the structural predicates.
//!
//! Continuous supports cannot be enumerated, so every predicate is tested by
//! trying to falsify it within a budget. A status records whether the
//! predicate holds by construction, survived the budget, or was falsified,
//! in which case it carries a witness that can be replayed bit for bit.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::checks::{check_quantum_certainty, check_support_chain, overlap_fraction_at};
use super::engine::{tv_distance, Engine, Estimate};
use super::{
    DeclaredProperties, MeasContext, OnticPoint, OntologicalModel, Predicate, PrepContext,
    ProbeKind, PsiComponent, POINTWISE_TOL,
};
use crate::error::{Error, Result};
use crate::hilbert::{mix, Basis, Decomposition, DensityOperator, PureState};
use crate::rng::{DrawId, Stream};

const S_STATES: u64 = 10;
const S_ALT: u64 = 11;
const S_OUTCOMES: u64 = 12;
const S_CTX: u64 = 13;
const S_CTX_A: u64 = 14;
const S_CTX_B: u64 = 15;
const S_REF_DRAW: u64 = 20;
const S_PSI_DRAW: u64 = 21;
const S_ALT_DRAW: u64 = 22;
const S_NC_DRAW: u64 = 23;
const S_FUNCTIONAL: u64 = 24;
const S_TV: u64 = 25;

/// Preparation-contextuality threshold on the total-variation distance.
pub const PREP_CONTEXT_THRESHOLD: f64 = 0.01;

/// Where a witness's ontic state was drawn from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DrawSource {
    /// The epistemic state prepared for `state` in the default context.
    Prepared { state: PureState },
    /// The reference measure of the ontic space.
    Reference { probe: ProbeKind },
}

/// Data that falsified a predicate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub predicate: Predicate,
    pub state: PureState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<PureState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt_state: Option<PureState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<OnticPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draw: Option<DrawId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<DrawSource>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub contexts: Vec<Basis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
}

impl Witness {
    pub fn new(predicate: Predicate, state: PureState) -> Self {
        Self {
            predicate,
            state,
            outcome: None,
            alt_state: None,
            lambda: None,
            draw: None,
            source: None,
            contexts: Vec::new(),
            value: None,
            engine: None,
        }
    }

    fn context(&self, k: usize) -> MeasContext {
        match self.contexts.get(k) {
            Some(b) => MeasContext::with_basis(format!("context-{k}"), b.clone()),
            None => MeasContext::default(),
        }
    }

    fn lambda(&self) -> Result<&OnticPoint> {
        self.lambda
            .as_ref()
            .ok_or_else(|| Error::InvalidState("witness without an ontic state".into()))
    }

    /// Whether the recorded data violates the witness's predicate.
    pub fn violated(&self, model: &dyn OntologicalModel) -> Result<bool> {
        let resp = model.response();
        let out = self.outcome.as_ref().unwrap_or(&self.state);
        Ok(match self.predicate {
            Predicate::QuantumCertainty => {
                let l = self.lambda()?;
                (resp.evaluate(&self.state, l, &self.context(0)) - 1.0).abs() > POINTWISE_TOL
            }
            Predicate::SupportChain => {
                let l = self.lambda()?;
                let ctx = self.context(0);
                let core = resp.is_core(&self.state, l, &ctx);
                match self.source {
                    Some(DrawSource::Reference { .. }) => {
                        core && !resp.is_support(&self.state, l, &ctx)
                    }
                    _ => !core,
                }
            }
            Predicate::Reciprocity => {
                let l = self.lambda()?;
                let mu = model.prepare(&self.state, &PrepContext::default())?;
                resp.is_core(&self.state, l, &self.context(0)) != mu.contains(l)
            }
            Predicate::Determinism | Predicate::NonDeficiency => {
                let l = self.lambda()?;
                let ctx = self.context(0);
                let v = resp.evaluate(out, l, &ctx);
                let indeterminate = v > POINTWISE_TOL && v < 1.0 - POINTWISE_TOL;
                indeterminate || resp.is_core(out, l, &ctx) != resp.is_support(out, l, &ctx)
            }
            Predicate::MeasurementNoncontextuality => {
                let l = self.lambda()?;
                let a = resp.evaluate(out, l, &self.context(0));
                let b = resp.evaluate(out, l, &self.context(1));
                (a - b).abs() > POINTWISE_TOL
            }
            Predicate::FunctionalEpistemicity => {
                let l = self.lambda()?;
                let alt = self
                    .alt_state
                    .as_ref()
                    .ok_or_else(|| Error::InvalidState("witness without a second state".into()))?;
                let ctx = self.context(0);
                match with_ray(l, alt) {
                    Some(l2) => {
                        (resp.evaluate(out, l, &ctx) - resp.evaluate(out, &l2, &ctx)).abs()
                            > POINTWISE_TOL
                    }
                    None => false,
                }
            }
            Predicate::MaximalEpistemicity => {
                let f = self.recompute(model)?;
                f.value < 1.0 && !f.agrees_with(1.0)
            }
            Predicate::PreparationNoncontextuality => {
                self.recompute(model)?.value > PREP_CONTEXT_THRESHOLD
            }
        })
    }

    /// Recomputes the numerical value behind an integral-based witness.
    fn recompute(&self, model: &dyn OntologicalModel) -> Result<Estimate> {
        let engine = self.engine.unwrap_or_else(|| model.default_engine());
        let stream = self
            .draw
            .map(|d| Stream::new(d.seed, d.stream))
            .unwrap_or(Stream::new(0, S_TV));
        match self.predicate {
            Predicate::MaximalEpistemicity => {
                let phi = self
                    .outcome
                    .as_ref()
                    .ok_or_else(|| Error::InvalidState("witness without an outcome".into()))?;
                overlap_fraction_at(model, phi, &self.state, &engine, stream)
            }
            Predicate::PreparationNoncontextuality => {
                let [a, b] = self.contexts.as_slice() else {
                    return Err(Error::InvalidState("witness needs two contexts".into()));
                };
                let da = Decomposition::uniform(a);
                let db = Decomposition::uniform(b);
                let ma = model.prepare_mixed(&da, &PrepContext::mixture("a", da.clone()))?;
                let mb = model.prepare_mixed(&db, &PrepContext::mixture("b", db.clone()))?;
                tv_distance(&ma, &mb, &engine, stream)
            }
            _ => Err(Error::InvalidState("not an integral witness".into())),
        }
    }
}

/// `lambda` with its ray component replaced.
fn with_ray(lambda: &OnticPoint, ray: &PureState) -> Option<OnticPoint> {
    match lambda {
        OnticPoint::Ray { .. } => Some(OnticPoint::Ray { ray: ray.clone() }),
        OnticPoint::Composite { aux, .. } => Some(OnticPoint::Composite {
            ray: ray.clone(),
            aux: aux.clone(),
        }),
        _ => None,
    }
}

/// Outcome of replaying a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Replay {
    /// The regenerated draw (or recomputed value) equals the recorded one.
    pub identical: bool,
    pub violated: bool,
}

/// Regenerates a witness from its seed and indices and re-tests it.
pub fn replay(model: &dyn OntologicalModel, witness: &Witness) -> Result<Replay> {
    match witness.predicate {
        Predicate::MaximalEpistemicity | Predicate::PreparationNoncontextuality => {
            let v = witness.recompute(model)?.value;
            return Ok(Replay {
                identical: Some(v) == witness.value,
                violated: witness.violated(model)?,
            });
        }
        _ => {}
    }
    let (Some(draw), Some(source)) = (witness.draw, witness.source.as_ref()) else {
        return Err(Error::InvalidState("witness has no draw to replay".into()));
    };
    let lambda = match source {
        DrawSource::Prepared { state } => model
            .prepare(state, &PrepContext::default())?
            .sample(&mut draw.rng()),
        DrawSource::Reference { probe } => model.ontic_space().probe(*probe, draw),
    };
    let regenerated = Witness {
        lambda: Some(lambda),
        ..witness.clone()
    };
    Ok(Replay {
        identical: regenerated.lambda == witness.lambda,
        violated: regenerated.violated(model)?,
    })
}

/// Verdict on one predicate.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    /// Holds by construction and survived testing.
    ConfirmedAnalytic,
    /// No counterexample within the budget.
    NotFalsified {
        n_trials: usize,
    },
    Falsified {
        witness: Box<Witness>,
    },
    /// The predicate does not apply to this model.
    NotApplicable {
        reason: String,
    },
}

impl Status {
    /// `Some(true)` unless falsified; `None` when not applicable.
    pub fn holds(&self) -> Option<bool> {
        match self {
            Status::ConfirmedAnalytic | Status::NotFalsified { .. } => Some(true),
            Status::Falsified { .. } => Some(false),
            Status::NotApplicable { .. } => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::ConfirmedAnalytic => "confirmed_analytic",
            Status::NotFalsified { .. } => "not_falsified",
            Status::Falsified { .. } => "falsified",
            Status::NotApplicable { .. } => "not_applicable",
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Status::Falsified { witness } => Some(witness),
            _ => None,
        }
    }

    fn from_search(
        model: &dyn OntologicalModel,
        p: Predicate,
        witness: Option<Witness>,
        n_trials: usize,
    ) -> Status {
        match witness {
            Some(w) => Status::Falsified {
                witness: Box::new(w),
            },
            None if model.analytic().contains(&p) => Status::ConfirmedAnalytic,
            None => Status::NotFalsified { n_trials },
        }
    }
}

/// Trial budget for classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Random states (and outcomes, and contexts) tried.
    pub states: usize,
    /// Ontic states drawn per state and per source.
    pub draws: usize,
    pub seed: u64,
    /// How reference-measure draws are generated.
    pub probe: ProbeKind,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            states: 20,
            draws: 500,
            seed: 0,
            probe: ProbeKind::Random,
        }
    }
}

struct Trial {
    psi: PureState,
    alt: PureState,
    phi: PureState,
    ctx_psi: Basis,
    ctx_phi: [Basis; 2],
    mu_psi: super::EpistemicState,
    mu_alt: super::EpistemicState,
}

fn trials(model: &dyn OntologicalModel, budget: &Budget) -> Result<Vec<Trial>> {
    let d = model.dim();
    let s = |tag| Stream::new(budget.seed, tag);
    (0..budget.states as u64)
        .map(|t| {
            let psi = PureState::random(d, &mut s(S_STATES).rng(t));
            let alt = PureState::random(d, &mut s(S_ALT).rng(t));
            let phi = PureState::random(d, &mut s(S_OUTCOMES).rng(t));
            let sp = PrepContext::default();
            Ok(Trial {
                ctx_psi: Basis::random_completion(&psi, &mut s(S_CTX).rng(t)),
                ctx_phi: [
                    Basis::random_completion(&phi, &mut s(S_CTX_A).rng(t)),
                    Basis::random_completion(&phi, &mut s(S_CTX_B).rng(t)),
                ],
                mu_psi: model.prepare(&psi, &sp)?,
                mu_alt: model.prepare(&alt, &sp)?,
                psi,
                alt,
                phi,
            })
        })
        .collect()
}

/// First witness among `n` candidates, searched in parallel but reported
/// in index order.
fn search(
    model: &dyn OntologicalModel,
    n: usize,
    make: &(dyn Fn(usize) -> Witness + Sync),
) -> Result<Option<Witness>> {
    use rayon::prelude::*;
    let found = (0..n)
        .into_par_iter()
        .map(|i| {
            let w = make(i);
            w.violated(model).map(|v| v.then_some(w))
        })
        .find_first(|r| !matches!(r, Ok(None)));
    found.transpose().map(Option::flatten)
}

/// The pointwise predicates: certainty, support chain, reciprocity,
/// determinism and measurement noncontextuality.
pub(crate) fn sampled_checks(
    model: &dyn OntologicalModel,
    budget: &Budget,
) -> Result<BTreeMap<Predicate, Status>> {
    let ts = trials(model, budget)?;
    let space = model.ontic_space();
    let draws = budget.draws;
    let seed = budget.seed;
    let mut out = BTreeMap::new();

    let mut certainty = None;
    let mut chain = None;
    for (t, tr) in ts.iter().enumerate() {
        let sub = seed.wrapping_add((t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        if certainty.is_none() {
            let sm = MeasContext::with_basis("trial", tr.ctx_psi.clone());
            let sp = PrepContext::default();
            certainty =
                check_quantum_certainty(model, &tr.psi, &sp, &sm, draws as u64, sub)?.witness;
        }
        if chain.is_none() {
            chain = check_support_chain(model, &tr.psi, draws as u64, sub)?.witness;
        }
    }
    let n = ts.len() * draws;
    out.insert(
        Predicate::QuantumCertainty,
        Status::from_search(model, Predicate::QuantumCertainty, certainty, n),
    );
    out.insert(
        Predicate::SupportChain,
        Status::from_search(model, Predicate::SupportChain, chain, n),
    );

    // three sources per trial: reference measure, mu_psi, mu_alt
    let (ts, space) = (&ts, &space);
    let pointwise = |p: Predicate| {
        move |i: usize| {
            let t = i / (3 * draws);
            let r = i % (3 * draws);
            let j = (t * draws + r % draws) as u64;
            let tr = &ts[t];
            let (draw, lambda, source) = match r / draws {
                0 => {
                    let d = Stream::new(seed, S_REF_DRAW).draw(j);
                    let probe = budget.probe;
                    (d, space.probe(probe, d), DrawSource::Reference { probe })
                }
                1 => {
                    let d = Stream::new(seed, S_PSI_DRAW).draw(j);
                    let l = tr.mu_psi.sample(&mut d.rng());
                    (
                        d,
                        l,
                        DrawSource::Prepared {
                            state: tr.psi.clone(),
                        },
                    )
                }
                _ => {
                    let d = Stream::new(seed, S_ALT_DRAW).draw(j);
                    let l = tr.mu_alt.sample(&mut d.rng());
                    (
                        d,
                        l,
                        DrawSource::Prepared {
                            state: tr.alt.clone(),
                        },
                    )
                }
            };
            Witness {
                lambda: Some(lambda),
                draw: Some(draw),
                source: Some(source),
                contexts: vec![tr.ctx_psi.clone()],
                ..Witness::new(p, tr.psi.clone())
            }
        }
    };
    let n3 = 3 * n;
    for p in [Predicate::Reciprocity, Predicate::Determinism] {
        let w = search(model, n3, &pointwise(p))?;
        out.insert(p, Status::from_search(model, p, w, n3));
    }

    let nc = |i: usize| {
        let tr = &ts[i / draws];
        let d = Stream::new(seed, S_NC_DRAW).draw(i as u64);
        let probe = budget.probe;
        Witness {
            outcome: Some(tr.phi.clone()),
            lambda: Some(space.probe(probe, d)),
            draw: Some(d),
            source: Some(DrawSource::Reference { probe }),
            contexts: tr.ctx_phi.to_vec(),
            ..Witness::new(Predicate::MeasurementNoncontextuality, tr.psi.clone())
        }
    };
    let p = Predicate::MeasurementNoncontextuality;
    let w = search(model, n, &nc)?;
    out.insert(p, Status::from_search(model, p, w, n));
    Ok(out)
}

/// Preparation-contextuality verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepVerdict {
    Contextual,
    Noncontextual,
    /// Above tolerance but below the contextuality threshold.
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrepContextReport {
    pub distance: Estimate,
    pub verdict: PrepVerdict,
}

/// Total-variation distance between the epistemic states that two
/// preparation contexts of the same density operator produce.
pub fn prep_context_distance(
    model: &dyn OntologicalModel,
    rho: &DensityOperator,
    a: &PrepContext,
    b: &PrepContext,
    engine: &Engine,
) -> Result<PrepContextReport> {
    let mut states = Vec::new();
    for ctx in [a, b] {
        let decomp = ctx
            .decomposition
            .as_ref()
            .ok_or_else(|| Error::UnknownPreparation(ctx.label.clone()))?;
        super::check_dim(model, decomp.dim())?;
        let gap = mix(decomp)?.distance(rho)?;
        if gap > crate::hilbert::ALG_TOL {
            return Err(Error::ContextStateMismatch(gap));
        }
        states.push(model.prepare_mixed(decomp, ctx)?);
    }
    let distance = tv_distance(&states[0], &states[1], engine, Stream::new(0, S_TV))?;
    let verdict = if distance.value > PREP_CONTEXT_THRESHOLD {
        PrepVerdict::Contextual
    } else if distance.value <= distance.tolerance.max(3.0 * distance.std_error) {
        PrepVerdict::Noncontextual
    } else {
        PrepVerdict::Indeterminate
    };
    Ok(PrepContextReport { distance, verdict })
}

/// Discrete Fourier basis; the `x` basis for a qubit.
pub fn fourier_basis(dim: usize) -> Basis {
    let s = 1.0 / (dim as f64).sqrt();
    let vectors = (0..dim)
        .map(|k| {
            let amps = (0..dim)
                .map(|j| {
                    let a = std::f64::consts::TAU * (j * k) as f64 / dim as f64;
                    Complex64::from_polar(s, a)
                })
                .collect();
            PureState::normalized(amps).expect("nonzero")
        })
        .collect();
    Basis::new(vectors).expect("Fourier vectors are orthonormal")
}

fn prep_status(model: &dyn OntologicalModel) -> Result<(Status, Option<f64>)> {
    let d = model.dim();
    let a = Basis::computational(d);
    let b = fourier_basis(d);
    let da = Decomposition::uniform(&a);
    let db = Decomposition::uniform(&b);
    let engine = model.default_engine();
    let report = prep_context_distance(
        model,
        &DensityOperator::maximally_mixed(d),
        &PrepContext::mixture("computational", da),
        &PrepContext::mixture("fourier", db),
        &engine,
    )?;
    let value = report.distance.value;
    let status = match report.verdict {
        PrepVerdict::Contextual => Status::Falsified {
            witness: Box::new(Witness {
                contexts: vec![a.clone(), b],
                value: Some(value),
                engine: Some(engine),
                draw: Some(Stream::new(0, S_TV).draw(0)),
                ..Witness::new(
                    Predicate::PreparationNoncontextuality,
                    a.vectors()[0].clone(),
                )
            }),
        },
        PrepVerdict::Noncontextual => Status::NotFalsified { n_trials: 1 },
        PrepVerdict::Indeterminate => Status::NotApplicable {
            reason: format!("distance {value:.3e} is below the contextuality threshold"),
        },
    };
    Ok((status, Some(value)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalVerdict {
    FunctionallyEpistemic,
    FunctionallyOntic,
    /// The ontic state determines the quantum state, so it cannot vary.
    Degenerate,
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionalReport {
    pub verdict: FunctionalVerdict,
    pub status: Status,
    pub reads_prepared_state: bool,
    pub explanation: String,
}

/// Does the response change when the quantum state changes at fixed
/// `(outcome, lambda, context)`?
pub fn functional_dependence_test(
    model: &dyn OntologicalModel,
    n_trials: usize,
    seed: u64,
) -> Result<FunctionalReport> {
    let reads = model.response().reads_prepared_state();
    let space = model.ontic_space();
    match space.psi_component() {
        PsiComponent::Whole => {
            return Ok(FunctionalReport {
                verdict: FunctionalVerdict::Degenerate,
                status: Status::NotApplicable {
                    reason:
                        "the ontic state is the prepared ray, which cannot vary at fixed lambda"
                            .into(),
                },
                reads_prepared_state: reads,
                explanation: "lambda determines psi".into(),
            })
        }
        PsiComponent::Absent => {
            let (verdict, status, explanation) = if reads {
                (
                    FunctionalVerdict::FunctionallyOntic,
                    Status::NotApplicable {
                        reason: "response reads a state that lambda does not carry".into(),
                    },
                    "structural flag set without a psi component",
                )
            } else if model
                .analytic()
                .contains(&Predicate::FunctionalEpistemicity)
            {
                (
                    FunctionalVerdict::FunctionallyEpistemic,
                    Status::ConfirmedAnalytic,
                    "response reads only lambda and the outcome",
                )
            } else {
                (
                    FunctionalVerdict::FunctionallyEpistemic,
                    Status::NotFalsified { n_trials: 0 },
                    "lambda carries no quantum state",
                )
            };
            return Ok(FunctionalReport {
                verdict,
                status,
                reads_prepared_state: reads,
                explanation: explanation.into(),
            });
        }
        PsiComponent::Part => {}
    }
    let d = model.dim();
    let s = |tag| Stream::new(seed, tag);
    let sp = PrepContext::default();
    let mut found = None;
    for t in 0..n_trials as u64 {
        let psi = PureState::random(d, &mut s(S_STATES).rng(t));
        let alt = PureState::random(d, &mut s(S_ALT).rng(t));
        let phi = PureState::random(d, &mut s(S_OUTCOMES).rng(t));
        let ctx = Basis::random_completion(&phi, &mut s(S_CTX).rng(t));
        let draw = s(S_FUNCTIONAL).draw(t);
        let lambda = model.prepare(&psi, &sp)?.sample(&mut draw.rng());
        let w = Witness {
            outcome: Some(phi),
            alt_state: Some(alt),
            lambda: Some(lambda),
            draw: Some(draw),
            source: Some(DrawSource::Prepared { state: psi.clone() }),
            contexts: vec![ctx],
            ..Witness::new(Predicate::FunctionalEpistemicity, psi)
        };
        if w.violated(model)? {
            found = Some(w);
            break;
        }
    }
    Ok(match found {
        Some(w) => FunctionalReport {
            verdict: FunctionalVerdict::FunctionallyOntic,
            status: Status::Falsified {
                witness: Box::new(w),
            },
            reads_prepared_state: reads,
            explanation: "response changed when the ray component was replaced".into(),
        },
        None => FunctionalReport {
            verdict: FunctionalVerdict::FunctionallyEpistemic,
            status: Status::NotFalsified { n_trials },
            reads_prepared_state: reads,
            explanation: "response never changed when the ray component was replaced".into(),
        },
    })
}

/// One predicate's line in a classification report.
#[derive(Clone, Debug, Serialize)]
pub struct PredicateEntry {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub n_trials: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Yes/no projection of a classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub reciprocity: bool,
    pub determinism: bool,
    pub contextual: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub model: String,
    pub dim: usize,
    pub seed: u64,
    #[serde(skip)]
    pub statuses: BTreeMap<Predicate, Status>,
    pub predicates: BTreeMap<&'static str, PredicateEntry>,
    pub declared: DeclaredProperties,
    pub prep_distance: Option<f64>,
}

impl ClassificationReport {
    pub fn status(&self, p: Predicate) -> &Status {
        &self.statuses[&p]
    }

    fn holds(&self, p: Predicate) -> bool {
        self.statuses
            .get(&p)
            .and_then(Status::holds)
            .unwrap_or(true)
    }

    pub fn row(&self) -> TableRow {
        TableRow {
            reciprocity: self.holds(Predicate::Reciprocity),
            determinism: self.holds(Predicate::Determinism),
            contextual: !self.holds(Predicate::MeasurementNoncontextuality),
        }
    }

    pub fn declared_row(&self) -> TableRow {
        TableRow {
            reciprocity: self.declared.reciprocal,
            determinism: self.declared.outcome_deterministic,
            contextual: self.declared.measurement_contextual,
        }
    }

    /// Declared properties contradicted by the measurements.
    pub fn mismatches(&self) -> Vec<String> {
        let m = self.row();
        let d = self.declared_row();
        let mut out = Vec::new();
        for (name, measured, declared) in [
            ("reciprocity", m.reciprocity, d.reciprocity),
            ("determinism", m.determinism, d.determinism),
            ("contextual", m.contextual, d.contextual),
        ] {
            if measured != declared {
                out.push(format!(
                    "{name}: declared {}, measured {}",
                    yes_no(declared),
                    yes_no(measured)
                ));
            }
        }
        let prep = !self.holds(Predicate::PreparationNoncontextuality);
        if prep != self.declared.preparation_contextual {
            out.push(format!(
                "preparation contextual: declared {}, measured {}",
                yes_no(self.declared.preparation_contextual),
                yes_no(prep)
            ));
        }
        out
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Runs every predicate test on a model.
pub fn classify(model: &dyn OntologicalModel, budget: &Budget) -> Result<ClassificationReport> {
    let mut statuses = sampled_checks(model, budget)?;

    // deficiency is nonreciprocity or indeterminism; never measured alone
    let r = &statuses[&Predicate::Reciprocity];
    let det = &statuses[&Predicate::Determinism];
    let nd = match (r, det) {
        (Status::Falsified { witness }, _) | (_, Status::Falsified { witness }) => {
            Status::Falsified {
                witness: witness.clone(),
            }
        }
        (Status::ConfirmedAnalytic, Status::ConfirmedAnalytic) => Status::ConfirmedAnalytic,
        (Status::NotFalsified { n_trials }, _) | (_, Status::NotFalsified { n_trials }) => {
            Status::NotFalsified {
                n_trials: *n_trials,
            }
        }
        _ => Status::NotApplicable {
            reason: "derived from inapplicable predicates".into(),
        },
    };
    statuses.insert(Predicate::NonDeficiency, nd);

    let (prep, prep_distance) = prep_status(model)?;
    statuses.insert(Predicate::PreparationNoncontextuality, prep);

    let functional = functional_dependence_test(model, budget.states, budget.seed)?;
    statuses.insert(Predicate::FunctionalEpistemicity, functional.status.clone());

    let n_trials = budget.states * budget.draws;
    let predicates = statuses
        .iter()
        .map(|(p, s)| {
            let n = match s {
                Status::NotFalsified { n_trials } => *n_trials,
                _ => n_trials,
            };
            let note = match (p, s) {
                (_, Status::NotApplicable { reason }) => Some(reason.clone()),
                (Predicate::NonDeficiency, _) => {
                    Some("derived from reciprocity and determinism".into())
                }
                (Predicate::FunctionalEpistemicity, _) => Some(functional.explanation.clone()),
                _ => None,
            };
            (
                p.key(),
                PredicateEntry {
                    status: s.label(),
                    witness: s.witness().cloned(),
                    n_trials: n,
                    seed: budget.seed,
                    note,
                },
            )
        })
        .collect();
    Ok(ClassificationReport {
        model: model.name(),
        dim: model.dim(),
        seed: budget.seed,
        statuses,
        predicates,
        declared: model.declared(),
        prep_distance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KsOmRow {
    pub model: String,
    pub dim: usize,
    pub skipped: bool,
    pub deterministic: bool,
    pub noncontextual: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KsOmReport {
    pub pass: bool,
    pub rows: Vec<KsOmRow>,
}

/// Every model of dimension at least three must be classified
/// indeterministic or measurement contextual.
pub fn ks_om_consistency(models: &[&dyn OntologicalModel], budget: &Budget) -> Result<KsOmReport> {
    let mut rows = Vec::new();
    for m in models {
        if m.dim() < 3 {
            rows.push(KsOmRow {
                model: m.name(),
                dim: m.dim(),
                skipped: true,
                deterministic: false,
                noncontextual: false,
            });
            continue;
        }
        let s = sampled_checks(*m, budget)?;
        let holds = |p| s.get(&p).and_then(Status::holds).unwrap_or(true);
        rows.push(KsOmRow {
            model: m.name(),
            dim: m.dim(),
            skipped: false,
            deterministic: holds(Predicate::Determinism),
            noncontextual: holds(Predicate::MeasurementNoncontextuality),
        });
    }
    Ok(KsOmReport {
        pass: rows
            .iter()
            .all(|r| r.skipped || !(r.deterministic && r.noncontextual)),
        rows,
    })
}
