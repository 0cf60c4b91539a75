//! Predictions of a model and the checks built directly on them.

use rayon::prelude::*;
use serde::Serialize;

use super::classify::{sampled_checks, Budget, DrawSource, Status, Witness};
use super::engine::{expect, expect_vec, Engine, Estimate};
use super::{
    check_dim, MeasContext, OnticPoint, OntologicalModel, Predicate, PrepContext, ProbeKind,
};
use crate::error::{Error, Result};
use crate::hilbert::{born_probability, Basis, PureState};
use crate::rng::Stream;

pub(crate) const S_CERTAINTY: u64 = 1;
pub(crate) const S_SUPPORT_PREP: u64 = 2;
pub(crate) const S_SUPPORT_REF: u64 = 3;
pub(crate) const S_PAIRS: u64 = 30;
pub(crate) const S_MC: u64 = 40;

/// Born probabilities below this are treated as orthogonal when a ratio
/// is taken.
const MIN_OVERLAP: f64 = 1e-3;

/// `P(phi | psi)` predicted by the model.
pub fn predict_probability(
    model: &dyn OntologicalModel,
    psi: &PureState,
    sp: &PrepContext,
    phi: &PureState,
    sm: &MeasContext,
    engine: &Engine,
) -> Result<Estimate> {
    check_dim(model, psi.dim())?;
    check_dim(model, phi.dim())?;
    let mu = model.prepare(psi, sp)?;
    let resp = model.response();
    let g = |l: &OnticPoint| resp.evaluate(phi, l, sm);
    expect(&mu, &g, &resp.cuts(phi), engine, Stream::new(0, S_MC))
}

/// Predicted distribution over the outcomes of a basis, from common draws.
pub fn predict_basis(
    model: &dyn OntologicalModel,
    psi: &PureState,
    sp: &PrepContext,
    basis: &Basis,
    engine: &Engine,
) -> Result<Vec<Estimate>> {
    predict_basis_at(model, psi, sp, basis, engine, Stream::new(0, S_MC))
}

fn predict_basis_at(
    model: &dyn OntologicalModel,
    psi: &PureState,
    sp: &PrepContext,
    basis: &Basis,
    engine: &Engine,
    stream: Stream,
) -> Result<Vec<Estimate>> {
    check_dim(model, psi.dim())?;
    check_dim(model, basis.dim())?;
    let mu = model.prepare(psi, sp)?;
    let resp = model.response();
    let sm = MeasContext::with_basis("basis", basis.clone());
    let g = |l: &OnticPoint, out: &mut [f64]| {
        for (o, v) in out.iter_mut().zip(basis.vectors()) {
            *o = resp.evaluate(v, l, &sm);
        }
    };
    let cuts: Vec<[f64; 3]> = basis.vectors().iter().flat_map(|v| resp.cuts(v)).collect();
    expect_vec(&mu, basis.dim(), &g, &cuts, engine, stream)
}

/// Total probability the model assigns to `psi`; should be one.
pub fn check_normalization(
    model: &dyn OntologicalModel,
    psi: &PureState,
    engine: &Engine,
) -> Result<Estimate> {
    let mu = model.prepare(psi, &PrepContext::default())?;
    expect(&mu, &|_| 1.0, &[], engine, Stream::new(0, S_MC))
}

/// One predicted outcome probability against the Born rule.
#[derive(Clone, Debug, Serialize)]
pub struct BornPair {
    pub trial: usize,
    pub outcome: usize,
    /// Bloch-sphere angle between state and outcome.
    pub angle: f64,
    pub predicted: Estimate,
    pub born: f64,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BornReport {
    pub model: String,
    pub engine: String,
    pub pairs: Vec<BornPair>,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Compares predictions with the Born rule. `states[i]` is measured in
/// `bases[i]`; every outcome of the basis is checked.
pub fn verify_born(
    model: &dyn OntologicalModel,
    states: &[PureState],
    bases: &[Basis],
    engine: &Engine,
) -> Result<BornReport> {
    if states.len() != bases.len() {
        return Err(Error::InvalidState(format!(
            "{} states but {} bases",
            states.len(),
            bases.len()
        )));
    }
    let mut pairs = Vec::new();
    let sp = PrepContext::default();
    for (t, (psi, basis)) in states.iter().zip(bases).enumerate() {
        let stream = Stream::new(0, S_MC).child(t as u64);
        let pred = predict_basis_at(model, psi, &sp, basis, engine, stream)?;
        for (i, (est, phi)) in pred.into_iter().zip(basis.vectors()).enumerate() {
            let born = born_probability(phi, psi)?;
            let overlap = born.sqrt().min(1.0);
            pairs.push(BornPair {
                trial: t,
                outcome: i,
                angle: 2.0 * overlap.acos(),
                deviation: (est.value - born).abs(),
                pass: est.agrees_with(born),
                predicted: est,
                born,
            });
        }
    }
    let max_deviation = pairs.iter().map(|p| p.deviation).fold(0.0, f64::max);
    Ok(BornReport {
        model: model.name(),
        engine: engine.to_string(),
        pass: pairs.iter().all(|p| p.pass),
        max_deviation,
        pairs,
    })
}

/// Result of a sampled check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub pass: bool,
    pub n_checked: u64,
    pub witness: Option<Witness>,
}

/// First index in `0..n` whose witness violates its predicate.
fn first_violation(
    model: &dyn OntologicalModel,
    n: u64,
    make: &(dyn Fn(u64) -> Result<Witness> + Sync),
) -> Result<CheckOutcome> {
    let found = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Option<Witness>> {
            let w = make(i)?;
            Ok(if w.violated(model)? { Some(w) } else { None })
        })
        .find_first(|r| !matches!(r, Ok(None)));
    match found {
        Some(Err(e)) => Err(e),
        Some(Ok(w)) => Ok(CheckOutcome {
            pass: false,
            n_checked: n,
            witness: w,
        }),
        None => Ok(CheckOutcome {
            pass: true,
            n_checked: n,
            witness: None,
        }),
    }
}

/// Samples `lambda` from the state prepared for `psi` and checks that
/// measuring `psi` itself gives its outcome with certainty.
pub fn check_quantum_certainty(
    model: &dyn OntologicalModel,
    psi: &PureState,
    sp: &PrepContext,
    sm: &MeasContext,
    n_samples: u64,
    seed: u64,
) -> Result<CheckOutcome> {
    check_dim(model, psi.dim())?;
    let mu = model.prepare(psi, sp)?;
    let stream = Stream::new(seed, S_CERTAINTY);
    let contexts: Vec<Basis> = sm.basis.iter().cloned().collect();
    let make = |i: u64| {
        let draw = stream.draw(i);
        Ok(Witness {
            lambda: Some(mu.sample(&mut draw.rng())),
            draw: Some(draw),
            source: Some(DrawSource::Prepared { state: psi.clone() }),
            contexts: contexts.clone(),
            ..Witness::new(Predicate::QuantumCertainty, psi.clone())
        })
    };
    first_violation(model, n_samples, &make)
}

/// Checks the chain `supp mu_psi ⊆ core(psi) ⊆ supp xi_psi`: the first
/// inclusion on draws from the prepared state, the second on draws from
/// the reference measure.
pub fn check_support_chain(
    model: &dyn OntologicalModel,
    psi: &PureState,
    n_samples: u64,
    seed: u64,
) -> Result<CheckOutcome> {
    check_dim(model, psi.dim())?;
    let mu = model.prepare(psi, &PrepContext::default())?;
    let space = model.ontic_space();
    let prep = Stream::new(seed, S_SUPPORT_PREP);
    let refs = Stream::new(seed, S_SUPPORT_REF);
    let half = n_samples.div_ceil(2);
    let make = |i: u64| {
        let (draw, lambda, source) = if i < half {
            let d = prep.draw(i);
            let l = mu.sample(&mut d.rng());
            (d, l, DrawSource::Prepared { state: psi.clone() })
        } else {
            let d = refs.draw(i - half);
            let probe = ProbeKind::Random;
            (d, space.probe(probe, d), DrawSource::Reference { probe })
        };
        Ok(Witness {
            lambda: Some(lambda),
            draw: Some(draw),
            source: Some(source),
            ..Witness::new(Predicate::SupportChain, psi.clone())
        })
    };
    first_violation(model, n_samples, &make)
}

/// `mu_psi(Lambda_phi)`: the probability, when `psi` is prepared, of an
/// ontic state in the support of the state prepared for `phi`.
pub fn support_mass(
    model: &dyn OntologicalModel,
    phi: &PureState,
    psi: &PureState,
    engine: &Engine,
) -> Result<Estimate> {
    support_mass_at(model, phi, psi, engine, Stream::new(0, S_MC))
}

fn support_mass_at(
    model: &dyn OntologicalModel,
    phi: &PureState,
    psi: &PureState,
    engine: &Engine,
    stream: Stream,
) -> Result<Estimate> {
    check_dim(model, psi.dim())?;
    check_dim(model, phi.dim())?;
    let sp = PrepContext::default();
    let mu_psi = model.prepare(psi, &sp)?;
    let mu_phi = model.prepare(phi, &sp)?;
    let g = |l: &OnticPoint| if mu_phi.contains(l) { 1.0 } else { 0.0 };
    expect(&mu_psi, &g, &mu_phi.cuts(), engine, stream)
}

/// `mu_psi(Lambda_phi) / |<phi|psi>|^2`.
pub fn overlap_fraction(
    model: &dyn OntologicalModel,
    phi: &PureState,
    psi: &PureState,
    engine: &Engine,
) -> Result<Estimate> {
    overlap_fraction_at(model, phi, psi, engine, Stream::new(0, S_MC))
}

pub(crate) fn overlap_fraction_at(
    model: &dyn OntologicalModel,
    phi: &PureState,
    psi: &PureState,
    engine: &Engine,
    stream: Stream,
) -> Result<Estimate> {
    let born = born_probability(phi, psi)?;
    if born < crate::hilbert::ALG_TOL {
        return Err(Error::OrthogonalPair);
    }
    let mass = support_mass_at(model, phi, psi, engine, stream)?;
    Ok(mass.scaled(1.0 / born))
}

/// Maximal epistemicity together with its two consistency checks: it
/// should coincide with reciprocity plus determinism, and it should imply
/// measurement noncontextuality.
#[derive(Clone, Debug, Serialize)]
pub struct MaxEpistemicReport {
    pub model: String,
    pub status: Status,
    pub n_pairs: usize,
    pub min_fraction: f64,
    pub reciprocal: bool,
    pub deterministic: bool,
    pub noncontextual: bool,
    /// Maximality agrees with reciprocity plus determinism.
    pub equivalence_consistent: bool,
    /// Maximality implies measurement noncontextuality.
    pub corollary_consistent: bool,
    pub framework_error: Option<String>,
}

impl MaxEpistemicReport {
    pub fn is_maximal(&self) -> bool {
        !matches!(self.status, Status::Falsified { .. })
    }
}

/// Tests `mu_psi(Lambda_phi) = |<phi|psi>|^2` on random pairs.
pub fn is_maximally_epistemic(
    model: &dyn OntologicalModel,
    n_pairs: usize,
    engine: &Engine,
    seed: u64,
) -> Result<MaxEpistemicReport> {
    let d = model.dim();
    let pairs = Stream::new(seed, S_PAIRS);
    let engine = engine.with_seed(seed);
    let mut min_fraction = f64::INFINITY;
    let mut witness = None;
    let mut checked = 0;
    let mut t = 0u64;
    while checked < n_pairs {
        let phi = PureState::random(d, &mut pairs.rng(2 * t));
        let psi = PureState::random(d, &mut pairs.rng(2 * t + 1));
        t += 1;
        if born_probability(&phi, &psi)? < MIN_OVERLAP {
            continue;
        }
        checked += 1;
        let stream = Stream::new(seed, S_MC).child(t);
        let f = overlap_fraction_at(model, &phi, &psi, &engine, stream)?;
        min_fraction = min_fraction.min(f.value);
        if witness.is_none() && !f.agrees_with(1.0) && f.value < 1.0 {
            witness = Some(Witness {
                outcome: Some(phi),
                draw: Some(stream.draw(0)),
                value: Some(f.value),
                engine: Some(engine),
                ..Witness::new(Predicate::MaximalEpistemicity, psi)
            });
        }
    }

    let sampled = sampled_checks(
        model,
        &Budget {
            states: 8,
            draws: 400,
            seed,
            probe: ProbeKind::Random,
        },
    )?;
    let holds = |p: Predicate| sampled.get(&p).and_then(Status::holds).unwrap_or(false);
    let declared = model.declared();
    let reciprocal = declared.reciprocal && holds(Predicate::Reciprocity);
    let deterministic = declared.outcome_deterministic && holds(Predicate::Determinism);
    let noncontextual = holds(Predicate::MeasurementNoncontextuality);

    let status = match witness {
        Some(w) => Status::Falsified {
            witness: Box::new(w),
        },
        None if declared.reciprocal && declared.outcome_deterministic => Status::ConfirmedAnalytic,
        None => Status::NotFalsified { n_trials: checked },
    };
    let maximal = !matches!(status, Status::Falsified { .. });
    let equivalence_consistent = maximal == (reciprocal && deterministic);
    let corollary_consistent = !maximal || noncontextual;
    let framework_error = match (equivalence_consistent, corollary_consistent) {
        (true, true) => None,
        (false, _) => Some(format!(
            "maximal = {maximal} but reciprocal = {reciprocal}, deterministic = {deterministic}"
        )),
        (true, false) => Some("maximal but measurement contextual".into()),
    };
    Ok(MaxEpistemicReport {
        model: model.name(),
        status,
        n_pairs: checked,
        min_fraction,
        reciprocal,
        deterministic,
        noncontextual,
        equivalence_consistent,
        corollary_consistent,
        framework_error,
    })
}
