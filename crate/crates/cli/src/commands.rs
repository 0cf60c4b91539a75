//! The subcommands.

use std::fmt::Write as _;
use std::path::Path;

use ontic::bound::{
    enumerate_atoms, feasibility_lp, feasibility_max_epistemic, max_overlap_fraction, Feasibility,
    Fragment,
};
use ontic::framework::{
    classify, fourier_basis, prep_context_distance, verify_born, yes_no, Budget,
    ClassificationReport, Engine, OntologicalModel, PrepContext, PrepVerdict, TableRow,
};
use ontic::hilbert::{Basis, Complex64, Decomposition, DensityOperator, PureState};
use ontic::rng::Stream;
use ontic::valuation::{
    build_graph, enumerate_valuations, find_valuation, verify_against_vectors, verify_valuation,
    SearchOutcome, Valuation, VectorSet,
};
use ontic::zoo::{self, fixtures::Misdeclared, CATALOGUE, NAMES};
use serde_json::{json, Value};

use crate::report::{num, Input, Outcome};
use crate::{CliError, Command, Settings};

/// Stream tag for the random trials of `verify`.
const VERIFY_STREAM: u64 = 0x7665_7269;

pub fn dispatch(cmd: Command, s: &Settings) -> Result<(&'static str, Outcome), CliError> {
    Ok(match cmd {
        Command::Verify {
            model,
            engine,
            pairs,
        } => ("verify", verify(s, model, engine, pairs)?),
        Command::Classify {
            model,
            states,
            draws,
        } => ("classify", classify_cmd(s, model, states, draws)?),
        Command::Table {
            states,
            draws,
            fixtures,
        } => ("table", table(s, states, draws, &fixtures)?),
        Command::Ksval { file, enumerate } => ("ksval", ksval(&file, enumerate)?),
        Command::Bound { file } => ("bound", bound(&file)?),
        Command::Prepctx {
            model,
            rho,
            ctx,
            engine,
        } => ("prepctx", prepctx(s, model, &rho, &ctx, engine)?),
    })
}

fn model_name(s: &Settings, flag: Option<String>) -> Result<String, CliError> {
    flag.or_else(|| s.config.get("model").map(str::to_string))
        .ok_or_else(|| CliError::Usage("no model given; use --model".into()))
}

fn engine_for(
    s: &Settings,
    flag: Option<String>,
    model: &dyn OntologicalModel,
) -> Result<Engine, CliError> {
    let spec = flag.or_else(|| s.config.get("engine").map(str::to_string));
    let engine = match spec {
        Some(e) => e.parse::<Engine>()?,
        None => model.default_engine(),
    };
    Ok(engine.with_seed(s.seed))
}

fn budget(s: &Settings, states: Option<usize>, draws: Option<usize>) -> Result<Budget, CliError> {
    let d = Budget::default();
    Ok(Budget {
        states: s.pick(states, "states")?.unwrap_or(d.states),
        draws: s.pick(draws, "draws")?.unwrap_or(d.draws),
        seed: s.seed,
        probe: d.probe,
    })
}

fn verify(
    s: &Settings,
    model: Option<String>,
    engine: Option<String>,
    pairs: Option<usize>,
) -> Result<Outcome, CliError> {
    let name = model_name(s, model)?;
    let m = zoo::from_name(&name)?;
    let engine = engine_for(s, engine, m.as_ref())?;
    let n = s.pick(pairs, "pairs")?.unwrap_or(100);
    let d = m.dim();
    let mut rng = Stream::new(s.seed, VERIFY_STREAM).rng(0);
    let mut states = Vec::with_capacity(n);
    let mut bases = Vec::with_capacity(n);
    for _ in 0..n {
        states.push(PureState::random(d, &mut rng));
        bases.push(Basis::random(d, &mut rng));
    }
    let r = verify_born(m.as_ref(), &states, &bases, &engine)?;
    let mut csv = vec![[
        "trial",
        "outcome",
        "angle",
        "born",
        "predicted",
        "std_error",
        "deviation",
        "pass",
    ]
    .map(String::from)
    .to_vec()];
    for p in &r.pairs {
        csv.push(vec![
            p.trial.to_string(),
            p.outcome.to_string(),
            num(p.angle),
            num(p.born),
            num(p.predicted.value),
            num(p.predicted.std_error),
            num(p.deviation),
            p.pass.to_string(),
        ]);
    }
    let text = format!(
        "{} with {}: {} outcomes, max deviation {:.3e}: {}\n",
        r.model,
        r.engine,
        r.pairs.len(),
        r.max_deviation,
        if r.pass { "pass" } else { "FAIL" }
    );
    Ok(Outcome {
        code: if r.pass { 0 } else { 1 },
        engine: engine.to_string(),
        inputs: Vec::new(),
        result: serde_json::to_value(&r).expect("report serializes"),
        csv,
        text,
    })
}

fn classify_cmd(
    s: &Settings,
    models: Vec<String>,
    states: Option<usize>,
    draws: Option<usize>,
) -> Result<Outcome, CliError> {
    let names: Vec<String> = if !models.is_empty() {
        models
    } else if let Some(m) = s.config.get("model") {
        vec![m.to_string()]
    } else {
        NAMES.iter().map(|n| n.to_string()).collect()
    };
    let b = budget(s, states, draws)?;
    let mut reports = Vec::new();
    let mut csv = vec![["model", "predicate", "status", "n_trials"]
        .map(String::from)
        .to_vec()];
    let mut text = String::new();
    let mut code = 0;
    for n in &names {
        let m = zoo::from_name(n)?;
        let r = classify(m.as_ref(), &b)?;
        for (k, e) in &r.predicates {
            csv.push(vec![
                r.model.clone(),
                k.to_string(),
                e.status.to_string(),
                e.n_trials.to_string(),
            ]);
        }
        let row = r.row();
        let _ = writeln!(
            text,
            "{}: reciprocity {}, determinism {}, contextual {}",
            r.model,
            yes_no(row.reciprocity),
            yes_no(row.determinism),
            yes_no(row.contextual)
        );
        for mm in r.mismatches() {
            code = 1;
            let _ = writeln!(text, "  mismatch: {mm}");
        }
        reports.push(serde_json::to_value(&r).expect("report serializes"));
    }
    Ok(Outcome {
        code,
        engine: "default".into(),
        inputs: Vec::new(),
        result: Value::Array(reports),
        csv,
        text,
    })
}

fn row_json(row: &TableRow) -> Value {
    json!({
        "reciprocity": yes_no(row.reciprocity),
        "determinism": yes_no(row.determinism),
        "contextual": yes_no(row.contextual),
    })
}

fn diff(claimed: &TableRow, measured: &TableRow) -> Vec<String> {
    let cols = [
        ("reciprocity", claimed.reciprocity, measured.reciprocity),
        ("determinism", claimed.determinism, measured.determinism),
        ("contextual", claimed.contextual, measured.contextual),
    ];
    cols.iter()
        .filter(|(_, c, m)| c != m)
        .map(|(k, c, m)| format!("{k}: claimed {}, measured {}", yes_no(*c), yes_no(*m)))
        .collect()
}

fn table(
    s: &Settings,
    states: Option<usize>,
    draws: Option<usize>,
    fixtures: &[String],
) -> Result<Outcome, CliError> {
    let b = budget(s, states, draws)?;
    let header = [
        "row",
        "name",
        "type",
        "reciprocity",
        "determinism",
        "contextual",
        "source",
    ];
    let mut csv = vec![header[1..6]
        .iter()
        .chain([&"source"])
        .map(|h| h.to_string())
        .collect::<Vec<_>>()];
    let mut rows = Vec::new();
    let mut text = format!(
        "{:<4}{:<26}{:<24}{:<13}{:<13}{:<12}{}\n",
        "#", header[1], header[2], header[3], header[4], header[5], header[6]
    );
    let mut code = 0;
    let mut push = |row: usize,
                    name: String,
                    kind: &str,
                    claimed: TableRow,
                    measured: Option<&ClassificationReport>| {
        let shown = measured.map_or(claimed, ClassificationReport::row);
        let mismatches = measured
            .map(|r| diff(&claimed, &r.row()))
            .unwrap_or_default();
        let source = match (measured, mismatches.is_empty()) {
            (None, _) => "unimplemented",
            (Some(_), true) => "measured",
            (Some(_), false) => "mismatch",
        };
        if !mismatches.is_empty() {
            code = 1;
        }
        csv.push(vec![
            name.clone(),
            kind.to_string(),
            yes_no(shown.reciprocity).into(),
            yes_no(shown.determinism).into(),
            yes_no(shown.contextual).into(),
            source.into(),
        ]);
        let _ = writeln!(
            text,
            "{:<4}{:<26}{:<24}{:<13}{:<13}{:<12}{}",
            row,
            name,
            kind,
            yes_no(shown.reciprocity),
            yes_no(shown.determinism),
            yes_no(shown.contextual),
            source
        );
        for m in &mismatches {
            let _ = writeln!(text, "    - {m}");
        }
        rows.push(json!({
            "row": row,
            "name": name,
            "type": kind,
            "source": source,
            "claimed": row_json(&claimed),
            "measured": measured.map(|r| row_json(&r.row())),
            "mismatches": mismatches,
        }));
    };
    for e in CATALOGUE {
        let claimed = TableRow {
            reciprocity: e.reciprocity,
            determinism: e.determinism,
            contextual: e.contextual,
        };
        let report = match e.registry {
            Some(reg) => Some(classify(zoo::from_name(reg)?.as_ref(), &b)?),
            None => None,
        };
        push(e.row, e.name.to_string(), e.kind, claimed, report.as_ref());
    }
    for (k, f) in fixtures.iter().enumerate() {
        let m: Box<dyn OntologicalModel> = match f.as_str() {
            "misdeclared" => Box::new(Misdeclared {
                inner: zoo::make_ks(),
            }),
            other => return Err(CliError::Usage(format!("unknown fixture `{other}`"))),
        };
        let r = classify(m.as_ref(), &b)?;
        push(
            CATALOGUE.len() + 1 + k,
            m.name(),
            "fixture",
            r.declared_row(),
            Some(&r),
        );
    }
    Ok(Outcome {
        code,
        engine: "default".into(),
        inputs: Vec::new(),
        result: json!({ "budget": b, "rows": rows }),
        csv,
        text,
    })
}

fn ones(set: &VectorSet, v: &Valuation) -> Vec<String> {
    v.ones()
        .map(|i| {
            set.labels[i]
                .clone()
                .unwrap_or_else(|| format!("#{}", i + 1))
        })
        .collect()
}

fn check_all(set: &VectorSet, vals: &[Valuation]) -> Result<(), String> {
    let g = build_graph(set);
    for v in vals {
        verify_valuation(&g, v, set.dim).map_err(|e| format!("{e:?}"))?;
        verify_against_vectors(set, v).map_err(|e| format!("{e:?}"))?;
    }
    Ok(())
}

fn ksval(file: &Path, enumerate: Option<usize>) -> Result<Outcome, CliError> {
    let (input, text) = Input::read(file)?;
    let set = VectorSet::parse(&text)?;
    let g = build_graph(&set);
    let (vals, stats) = match enumerate {
        Some(limit) => enumerate_valuations(&g, limit),
        None => match find_valuation(&g, set.dim) {
            SearchOutcome::Sat { valuation, stats } => (vec![valuation], stats),
            SearchOutcome::Unsat { stats } => (Vec::new(), stats),
        },
    };
    let sat = !vals.is_empty();
    let checker = check_all(&set, &vals);
    let code = match (&checker, sat) {
        (Err(_), _) | (Ok(()), false) => 1,
        (Ok(()), true) => 0,
    };
    let listed: Vec<Vec<String>> = vals.iter().map(|v| ones(&set, v)).collect();
    let mut csv = vec![["valuation", "ones"].map(String::from).to_vec()];
    for (k, l) in listed.iter().enumerate() {
        csv.push(vec![(k + 1).to_string(), l.join(" ")]);
    }
    let mut txt = format!(
        "{}: {} rays, {} edges, {} bases: {}\n",
        input.path,
        g.n,
        g.edges.len(),
        g.bases.len(),
        if sat { "SAT" } else { "UNSAT" }
    );
    for l in &listed {
        let _ = writeln!(txt, "  value 1 on: {}", l.join(" "));
    }
    let _ = writeln!(
        txt,
        "  search: {} nodes, {} backtracks, {} propagations",
        stats.nodes, stats.backtracks, stats.propagations
    );
    if let Err(e) = &checker {
        let _ = writeln!(txt, "  checker FAILED: {e}");
    }
    let result = json!({
        "rays": g.n,
        "edges": g.edges.len(),
        "bases": g.bases.len(),
        "result": if sat { "sat" } else { "unsat" },
        "valuations": listed,
        "stats": stats,
        "checker": match &checker { Ok(()) => "pass".to_string(), Err(e) => format!("fail: {e}") },
    });
    Ok(Outcome {
        code,
        engine: "backtracking".into(),
        inputs: vec![input],
        result,
        csv,
        text: txt,
    })
}

fn bound(file: &Path) -> Result<Outcome, CliError> {
    let (input, text) = Input::read(file)?;
    let frag = Fragment::parse(&text)?;
    let atoms = enumerate_atoms(&frag)?;
    let feas = feasibility_max_epistemic(&frag, &atoms)?;
    let (feasible, certificate) = match &feas {
        Feasibility::Feasible { .. } => (true, Value::Null),
        Feasibility::Infeasible { state, certificate } => {
            let ok = certificate.verify(&feasibility_lp(&frag, &atoms, *state), 1e-9);
            let mut c = serde_json::to_value(certificate).expect("certificate serializes");
            c["state"] = frag.state_labels[*state].clone().into();
            c["verified"] = ok.into();
            (false, c)
        }
    };
    let overlap = if feasible {
        Some(max_overlap_fraction(&frag, &atoms)?)
    } else {
        None
    };
    let f_star = overlap.as_ref().map(|o| o.f_star);
    let maximal = f_star.is_some_and(|f| f >= 1.0 - 1e-9);
    let mut csv = vec![["phi", "psi", "born", "fraction"]
        .map(String::from)
        .to_vec()];
    let mut pairs = Vec::new();
    if let Some(o) = &overlap {
        for p in &o.pairs {
            let (phi, psi) = (&frag.state_labels[p.phi], &frag.state_labels[p.psi]);
            csv.push(vec![phi.clone(), psi.clone(), num(p.born), num(p.fraction)]);
            pairs.push(json!({"phi": phi, "psi": psi, "born": p.born, "fraction": p.fraction}));
        }
    }
    let mut txt = format!(
        "{}: {} states, {} bases, {} rays, {} atoms\n  feasible: {}\n",
        input.path,
        frag.states.len(),
        frag.bases.len(),
        frag.rays.len(),
        atoms.len(),
        if feasible { "yes" } else { "no" }
    );
    match f_star {
        Some(f) => {
            let _ = writeln!(txt, "  f* = {} ({})", num(f), ontic::bound::CAVEAT);
        }
        None => txt.push_str("  f* undefined\n"),
    }
    let result = json!({
        "fragment": input.path,
        "n_atoms": atoms.len(),
        "feasible": feasible,
        "f_star": f_star,
        "caveat": ontic::bound::CAVEAT,
        "certificate": certificate,
        "pairs": pairs,
    });
    Ok(Outcome {
        code: if maximal { 0 } else { 1 },
        engine: "simplex".into(),
        inputs: vec![input],
        result,
        csv,
        text: txt,
    })
}

fn decomposition(name: &str, dim: usize) -> Result<Decomposition, CliError> {
    let basis = match name {
        "z" => Basis::computational(dim),
        "x" => fourier_basis(dim),
        "y" if dim == 2 => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let v = |sign: f64| {
                PureState::new(vec![Complex64::new(s, 0.0), Complex64::new(0.0, sign * s)])
            };
            Basis::new(vec![v(1.0)?, v(-1.0)?])?
        }
        other => return Err(CliError::Usage(format!("unknown context `{other}`"))),
    };
    Ok(Decomposition::uniform(&basis))
}

fn prepctx(
    s: &Settings,
    model: Option<String>,
    rho: &str,
    ctx: &str,
    engine: Option<String>,
) -> Result<Outcome, CliError> {
    let name = model_name(s, model)?;
    let m = zoo::from_name(&name)?;
    let engine = engine_for(s, engine, m.as_ref())?;
    if rho != "unpolarized" {
        return Err(CliError::Usage(format!(
            "unknown rho `{rho}`; only `unpolarized` is supported"
        )));
    }
    let names: Vec<&str> = ctx.split(',').map(str::trim).collect();
    let [a, b] = names[..] else {
        return Err(CliError::Usage(
            "--ctx takes exactly two names, e.g. z,x".into(),
        ));
    };
    let d = m.dim();
    let pa = PrepContext::mixture(a, decomposition(a, d)?);
    let pb = PrepContext::mixture(b, decomposition(b, d)?);
    let r = prep_context_distance(
        m.as_ref(),
        &DensityOperator::maximally_mixed(d),
        &pa,
        &pb,
        &engine,
    )?;
    let declared = m.declared().preparation_contextual;
    let agrees = match r.verdict {
        PrepVerdict::Contextual => declared,
        PrepVerdict::Noncontextual => !declared,
        PrepVerdict::Indeterminate => false,
    };
    let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
    let verdict_str = verdict.as_str().unwrap_or("?").to_string();
    let csv = vec![
        ["model", "contexts", "distance", "std_error", "verdict"]
            .map(String::from)
            .to_vec(),
        vec![
            m.name(),
            format!("{a}|{b}"),
            num(r.distance.value),
            num(r.distance.std_error),
            verdict_str.clone(),
        ],
    ];
    let text = format!(
        "{}: TV({a}, {b}) = {} ({}), declared {}\n",
        m.name(),
        num(r.distance.value),
        verdict_str,
        if declared {
            "contextual"
        } else {
            "noncontextual"
        }
    );
    Ok(Outcome {
        code: if agrees { 0 } else { 1 },
        engine: engine.to_string(),
        inputs: Vec::new(),
        result: json!({
            "model": m.name(),
            "rho": rho,
            "contexts": [a, b],
            "distance": r.distance,
            "verdict": verdict,
            "declared_contextual": declared,
        }),
        csv,
        text,
    })
}
