//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Run with `cargo test -p ontic-cli --test acceptance`.

use std::ffi::OsString;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use ontic::bound::*;
use ontic::framework::*;
use ontic::hilbert::{mix, Basis, Decomposition, DensityOperator, PureState};
use ontic::rng::Stream;
use ontic::valuation::*;
use ontic::zoo::{self, fixtures};

const BORN_QUAD_TOL: f64 = 1e-6;
const BORN_RUNTIME_S: f64 = 60.0;
const CERTAINTY_SAMPLES: u64 = 10_000;
const CERTAINTY_STATES: u64 = 20;
const CERTAINTY_RUNTIME_S: f64 = 30.0;
const MAX_EPI_TOL: f64 = 1e-6;
const PREP_TV_MIN: f64 = 0.1;
const MIX_TOL: f64 = 1e-12;
const PERES_RUNTIME_S: f64 = 10.0;
const LP_TOL_ACCEPT: f64 = 1e-9;
const BOUND_RUNTIME_S: f64 = 60.0;
/// Golden optimum of the shipped three-basis qutrit fragment.
const D3_F_STAR: f64 = 1.0 / 6.0;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
}

fn cli(args: &[&str]) -> (i32, String) {
    let argv: Vec<OsString> = std::iter::once("ontic")
        .chain(args.iter().copied())
        .map(OsString::from)
        .collect();
    let mut out = Vec::new();
    let code = ontic_cli::run_with(argv, None, &mut out, &mut Vec::new());
    (code, String::from_utf8(out).unwrap_or_default())
}

fn random_trials(d: usize, n: usize, seed: u64) -> (Vec<PureState>, Vec<Basis>) {
    let mut rng = Stream::new(seed, 1).rng(0);
    (0..n)
        .map(|_| (PureState::random(d, &mut rng), Basis::random(d, &mut rng)))
        .unzip()
}

fn born() -> Check {
    let t = Instant::now();
    let e = |x: ontic::Error| x.to_string();
    let (s, b) = random_trials(3, 100, 1);
    let bb = verify_born(&zoo::make_bb(3), &s, &b, &Engine::closed_form()).map_err(e)?;
    ensure(
        bb.max_deviation == 0.0,
        format!("B-B deviation {}", bb.max_deviation),
    )?;
    let (s, b) = random_trials(2, 100, 2);
    let ks = verify_born(&zoo::make_ks(), &s, &b, &Engine::quadrature(17)).map_err(e)?;
    ensure(
        ks.max_deviation < BORN_QUAD_TOL,
        format!("K-S deviation {}", ks.max_deviation),
    )?;
    let mut worst_sigma: f64 = 0.0;
    for (m, seed) in [
        (Box::new(zoo::make_bell2()) as Box<dyn OntologicalModel>, 3),
        (Box::new(zoo::make_ws(3)), 4),
    ] {
        let (s, b) = random_trials(m.dim(), 10, seed);
        let r =
            verify_born(m.as_ref(), &s, &b, &Engine::monte_carlo(1_000_000, seed)).map_err(e)?;
        ensure(r.pass, format!("{} outside 3 sigma", m.name()))?;
        for p in &r.pairs {
            if p.predicted.std_error > 0.0 {
                worst_sigma = worst_sigma.max(p.deviation / p.predicted.std_error);
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < BORN_RUNTIME_S, format!("took {secs:.1} s"))?;
    Ok(format!(
        "B-B dev 0, K-S dev {:.1e}, MC worst {worst_sigma:.2} sigma, {secs:.1} s",
        ks.max_deviation
    ))
}

fn certainty() -> Check {
    let t = Instant::now();
    let mut n = 0;
    for name in zoo::NAMES {
        let m = zoo::from_name(name).map_err(|e| e.to_string())?;
        let s = Stream::new(77, 0);
        for k in 0..CERTAINTY_STATES {
            let psi = PureState::random(m.dim(), &mut s.rng(k));
            let sm = MeasContext::with_basis(
                "rand",
                Basis::random_completion(&psi, &mut s.rng(1000 + k)),
            );
            let c = check_quantum_certainty(
                m.as_ref(),
                &psi,
                &PrepContext::default(),
                &sm,
                CERTAINTY_SAMPLES,
                k,
            )
            .map_err(|e| e.to_string())?;
            ensure(c.pass, format!("{name}: certainty violated"))?;
            let c = check_support_chain(m.as_ref(), &psi, CERTAINTY_SAMPLES, k)
                .map_err(|e| e.to_string())?;
            ensure(c.pass, format!("{name}: support chain violated"))?;
            n += 2 * CERTAINTY_SAMPLES;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < CERTAINTY_RUNTIME_S, format!("took {secs:.1} s"))?;
    Ok(format!("{n} samples, 0 violations, {secs:.1} s"))
}

fn table() -> Check {
    let (code, out) = cli(&["table", "--format", "json"]);
    ensure(code == 0, format!("`table` exited {code}"))?;
    let v: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let expect = [
        (1, "yes/no/no"),
        (2, "yes/yes/no"),
        (5, "no/yes/no"),
        (7, "no/yes/yes"),
    ];
    for (row, cells) in expect {
        let m = &v["result"]["rows"][row - 1]["measured"];
        let got = format!(
            "{}/{}/{}",
            m["reciprocity"].as_str().unwrap_or("?"),
            m["determinism"].as_str().unwrap_or("?"),
            m["contextual"].as_str().unwrap_or("?")
        );
        ensure(got == cells, format!("row {row}: {got}, expected {cells}"))?;
    }
    Ok("rows 1, 2, 5, 7 measured as catalogued; exit 0".into())
}

fn max_epistemic() -> Check {
    let e = |x: ontic::Error| x.to_string();
    let ks = is_maximally_epistemic(&zoo::make_ks(), 100, &Engine::quadrature(17), 1).map_err(e)?;
    ensure(ks.is_maximal(), "K-S not maximal")?;
    ensure(
        (ks.min_fraction - 1.0).abs() < MAX_EPI_TOL,
        format!("K-S f = {}", ks.min_fraction),
    )?;
    let bb = is_maximally_epistemic(&zoo::make_bb(3), 100, &Engine::closed_form(), 1).map_err(e)?;
    let w = bb.status.witness().ok_or("B-B not falsified")?;
    ensure(
        w.value == Some(0.0),
        format!("B-B witness f = {:?}", w.value),
    )?;
    let ws = is_maximally_epistemic(&zoo::make_ws(3), 20, &Engine::monte_carlo(20_000, 1), 1)
        .map_err(e)?;
    ensure(ws.status.witness().is_some(), "W-S not falsified")?;
    let b2 = is_maximally_epistemic(&zoo::make_bell2(), 20, &Engine::monte_carlo(20_000, 1), 1)
        .map_err(e)?;
    for r in [&ks, &bb, &ws, &b2] {
        ensure(
            r.equivalence_consistent && r.corollary_consistent,
            format!("{}: verdicts inconsistent", r.model),
        )?;
    }
    Ok(format!(
        "K-S f = {:.9}, B-B witness f = 0, W-S falsified, 4/4 consistent",
        ks.min_fraction
    ))
}

fn prep_contextuality() -> Check {
    let z = Decomposition::uniform(&Basis::computational(2));
    let x = Decomposition::uniform(&fourier_basis(2));
    let rho = DensityOperator::maximally_mixed(2);
    for d in [&z, &x] {
        let gap = mix(d)
            .and_then(|m| m.distance(&rho))
            .map_err(|e| e.to_string())?;
        ensure(gap <= MIX_TOL, format!("mixture off I/2 by {gap}"))?;
    }
    let r = prep_context_distance(
        &zoo::make_ks(),
        &rho,
        &PrepContext::mixture("z", z),
        &PrepContext::mixture("x", x),
        &Engine::quadrature(17),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        r.distance.value > PREP_TV_MIN,
        format!("TV = {}", r.distance.value),
    )?;
    Ok(format!(
        "TV = {:.9}, both mixtures equal I/2",
        r.distance.value
    ))
}

fn ks_valuation() -> Check {
    let e = |x: ontic::Error| x.to_string();
    let triad = load_vector_set(data("triad.vec")).map_err(e)?;
    let g = build_graph(&triad);
    let (all, _) = enumerate_valuations(&g, 100);
    ensure(all.len() == 3, format!("triad: {} valuations", all.len()))?;
    let mut checked = 0;
    for v in &all {
        ensure(
            verify_valuation(&g, v, 3).is_ok(),
            "triad valuation fails the checker",
        )?;
        checked += 1;
    }
    let peres = load_vector_set(data("peres33.vec")).map_err(e)?;
    let t = Instant::now();
    let out = find_valuation(&build_graph(&peres), 3);
    let secs = t.elapsed().as_secs_f64();
    ensure(!out.is_sat(), "Peres set is SAT")?;
    ensure(secs < PERES_RUNTIME_S, format!("search took {secs:.1} s"))?;
    for k in 0..peres.len() {
        let sub = peres.without(&[k]);
        let g = build_graph(&sub);
        if let SearchOutcome::Sat { valuation, .. } = find_valuation(&g, 3) {
            ensure(
                verify_valuation(&g, &valuation, 3).is_ok()
                    && verify_against_vectors(&sub, &valuation).is_ok(),
                "SAT answer fails the checker",
            )?;
            checked += 1;
        }
    }
    Ok(format!(
        "triad 3 valuations, 33-ray set UNSAT in {secs:.3} s, {checked} SAT answers checked"
    ))
}

fn ks_om() -> Check {
    let b = Budget {
        states: 10,
        draws: 300,
        seed: 3,
        probe: ProbeKind::Random,
    };
    let (bb, ws, ks, b2) = (
        zoo::make_bb(3),
        zoo::make_ws(3),
        zoo::make_ks(),
        zoo::make_bell2(),
    );
    let zoo_models: [&dyn OntologicalModel; 4] = [&bb, &ws, &ks, &b2];
    let r = ks_om_consistency(&zoo_models, &b).map_err(|e| e.to_string())?;
    ensure(
        r.pass,
        "a d>=3 zoo model is deterministic and noncontextual",
    )?;
    let fake = fixtures::DeterministicFake::new(3);
    let neg = ks_om_consistency(&[&fake], &b).map_err(|e| e.to_string())?;
    ensure(!neg.pass, "negative control passed")?;
    Ok("zoo consistent; negative control fails".into())
}

fn epi_bound() -> Check {
    let t = Instant::now();
    let e = |x: ontic::Error| x.to_string();
    let d2 = load_fragment(data("fragments/d2_zx.frag")).map_err(e)?;
    let atoms = enumerate_atoms(&d2).map_err(e)?;
    let Feasibility::Feasible { model } = feasibility_max_epistemic(&d2, &atoms).map_err(e)? else {
        return Err("qubit fragment infeasible".into());
    };
    let r = max_overlap_fraction(&d2, &atoms).map_err(e)?;
    ensure(
        (r.f_star - 1.0).abs() < LP_TOL_ACCEPT,
        format!("qubit f* = {}", r.f_star),
    )?;

    let mut feasible_checked = 0;
    let mut born_ok = |f: &Fragment, m: &FiniteModel| -> Result<(), String> {
        ensure(
            m.violation(f) < LP_TOL_ACCEPT,
            "solution violates its constraints",
        )?;
        let am = AtomModel::new(f, m);
        let (mut ss, mut bs) = (Vec::new(), Vec::new());
        for s in &f.states {
            for b in &f.bases {
                ss.push(s.clone());
                bs.push(b.clone());
            }
        }
        let rep = verify_born(&am, &ss, &bs, &Engine::closed_form()).map_err(|x| x.to_string())?;
        ensure(rep.pass, "finite model fails the Born check")?;
        feasible_checked += 1;
        Ok(())
    };
    born_ok(&d2, &model)?;
    born_ok(&d2, &r.model)?;

    let d3 = load_fragment(data("fragments/d3_three_bases.frag")).map_err(e)?;
    let atoms3 = enumerate_atoms(&d3).map_err(e)?;
    if let Feasibility::Feasible { model } = feasibility_max_epistemic(&d3, &atoms3).map_err(e)? {
        born_ok(&d3, &model)?;
    }
    let r3 = max_overlap_fraction(&d3, &atoms3).map_err(e)?;
    born_ok(&d3, &r3.model)?;
    ensure(r3.f_star < 1.0, "qutrit fragment reaches f* = 1")?;
    ensure(
        (r3.f_star - D3_F_STAR).abs() < LP_TOL_ACCEPT,
        format!("qutrit f* = {}", r3.f_star),
    )?;

    let peres = load_fragment(data("fragments/d3_peres.frag")).map_err(e)?;
    let none = enumerate_atoms(&peres).map_err(e)?;
    ensure(none.is_empty(), "uncolourable fragment has atoms")?;
    let set = load_vector_set(data("peres33.vec")).map_err(e)?;
    ensure(
        !find_valuation(&build_graph(&set), 3).is_sat(),
        "valuation cross-check disagrees",
    )?;
    let Feasibility::Infeasible { state, certificate } =
        feasibility_max_epistemic(&peres, &none).map_err(e)?
    else {
        return Err("uncolourable fragment feasible".into());
    };
    ensure(
        certificate.verify(&feasibility_lp(&peres, &none, state), LP_TOL_ACCEPT),
        "Farkas certificate does not verify",
    )?;
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < BOUND_RUNTIME_S, format!("took {secs:.1} s"))?;
    Ok(format!(
        "qubit f* = 1, qutrit f* = {:.12} (< 1), uncolourable fragment infeasible with verified certificate, {feasible_checked} models Born-checked, {secs:.1} s",
        r3.f_star
    ))
}

fn replayability() -> Check {
    let args = [
        "classify", "--seed", "42", "--states", "6", "--draws", "100", "--format", "json",
    ];
    let (_, a) = cli(&args);
    let (_, b) = cli(&args);
    ensure(!a.is_empty() && a == b, "classify reports differ")?;
    let mc = [
        "verify", "--model", "ws:3", "--engine", "mc:20000", "--pairs", "3", "--seed", "9",
        "--format", "json",
    ];
    ensure(cli(&mc).1 == cli(&mc).1, "Monte Carlo reports differ")?;
    let budget = Budget {
        states: 10,
        draws: 300,
        seed: 42,
        probe: ProbeKind::Random,
    };
    let mut n = 0;
    for name in zoo::NAMES {
        let m = zoo::from_name(name).map_err(|e| e.to_string())?;
        let rep = classify(m.as_ref(), &budget).map_err(|e| e.to_string())?;
        for s in rep.statuses.values() {
            if let Some(w) = s.witness() {
                let r = replay(m.as_ref(), w).map_err(|e| e.to_string())?;
                ensure(
                    r.identical && r.violated,
                    format!("{name} {:?} witness does not replay", w.predicate),
                )?;
                n += 1;
            }
        }
    }
    Ok(format!("byte-identical reports, {n} witnesses replayed"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("Born reproduction", born),
        ("quantum certainty and support chain", certainty),
        ("catalogue table", table),
        ("maximal psi-epistemicity", max_epistemic),
        ("preparation contextuality", prep_contextuality),
        ("KS valuation", ks_valuation),
        ("KS-OM consistency", ks_om),
        ("LP bounds", epi_bound),
        ("determinism and replay", replayability),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {why}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
