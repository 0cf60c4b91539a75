use ontic::framework::*;
use ontic::zoo::{self, fixtures};

fn budget(seed: u64) -> Budget {
    Budget {
        states: 10,
        draws: 300,
        seed,
        probe: ProbeKind::Random,
    }
}

fn row(r: bool, d: bool, c: bool) -> TableRow {
    TableRow {
        reciprocity: r,
        determinism: d,
        contextual: c,
    }
}

#[test]
fn catalogue_rows_are_reproduced() {
    for e in zoo::CATALOGUE.iter().filter(|e| e.registry.is_some()) {
        let m = zoo::from_name(e.registry.unwrap()).unwrap();
        let rep = classify(m.as_ref(), &budget(1)).unwrap();
        assert_eq!(
            rep.row(),
            row(e.reciprocity, e.determinism, e.contextual),
            "{}",
            e.name
        );
        assert!(
            rep.mismatches().is_empty(),
            "{}: {:?}",
            e.name,
            rep.mismatches()
        );
        for p in [Predicate::QuantumCertainty, Predicate::SupportChain] {
            assert_eq!(rep.status(p).holds(), Some(true), "{} {p:?}", e.name);
        }
    }
}

#[test]
fn statuses_distinguish_analytic_from_sampled() {
    let ks = classify(&zoo::make_ks(), &budget(2)).unwrap();
    assert_eq!(
        ks.status(Predicate::Reciprocity),
        &Status::ConfirmedAnalytic
    );
    assert_eq!(
        ks.status(Predicate::NonDeficiency),
        &Status::ConfirmedAnalytic
    );
    assert!(matches!(
        ks.status(Predicate::PreparationNoncontextuality),
        Status::Falsified { .. }
    ));
    assert!((ks.prep_distance.unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-9);

    let ws = classify(&zoo::make_ws(3), &budget(2)).unwrap();
    assert!(matches!(
        ws.status(Predicate::Reciprocity),
        Status::Falsified { .. }
    ));
    assert!(matches!(
        ws.status(Predicate::NonDeficiency),
        Status::Falsified { .. }
    ));
    assert_eq!(
        ws.status(Predicate::Determinism),
        &Status::ConfirmedAnalytic
    );
    assert!(matches!(
        ws.status(Predicate::MeasurementNoncontextuality),
        Status::Falsified { .. }
    ));

    let ws2 = classify(&zoo::make_ws(2), &budget(2)).unwrap();
    assert!(!ws2.row().contextual);

    let bb = classify(&zoo::make_bb(3), &budget(2)).unwrap();
    assert!(matches!(
        bb.status(Predicate::Determinism),
        Status::Falsified { .. }
    ));
    assert!(matches!(
        bb.status(Predicate::FunctionalEpistemicity),
        Status::NotApplicable { .. }
    ));
}

#[test]
fn falsified_witnesses_replay() {
    let models: Vec<Box<dyn OntologicalModel>> = zoo::NAMES
        .iter()
        .map(|n| zoo::from_name(n).unwrap())
        .collect();
    let mut replayed = 0;
    for m in &models {
        let rep = classify(m.as_ref(), &budget(3)).unwrap();
        for s in rep.statuses.values() {
            if let Some(w) = s.witness() {
                let r = replay(m.as_ref(), w).unwrap();
                assert!(r.identical && r.violated, "{} {:?}", m.name(), w.predicate);
                replayed += 1;
            }
        }
    }
    assert!(replayed >= 8, "{replayed}");
}

#[test]
fn determinism_verdict_does_not_depend_on_probe() {
    for name in zoo::NAMES {
        let m = zoo::from_name(name).unwrap();
        let a = classify(m.as_ref(), &budget(4)).unwrap();
        let b = classify(
            m.as_ref(),
            &Budget {
                probe: ProbeKind::Quadrature { level: 17 },
                ..budget(4)
            },
        )
        .unwrap();
        assert_eq!(a.row().determinism, b.row().determinism, "{name}");
    }
}

#[test]
fn maximal_epistemicity() {
    let ks = is_maximally_epistemic(&zoo::make_ks(), 30, &Engine::quadrature(17), 5).unwrap();
    assert_eq!(ks.status, Status::ConfirmedAnalytic);
    assert!(ks.equivalence_consistent && ks.corollary_consistent && ks.noncontextual);
    assert!((ks.min_fraction - 1.0).abs() < 1e-6);

    let bb = is_maximally_epistemic(&zoo::make_bb(3), 30, &Engine::closed_form(), 5).unwrap();
    let w = bb.status.witness().expect("falsified");
    assert_eq!(w.value, Some(0.0));
    assert!(bb.equivalence_consistent && bb.framework_error.is_none());

    let ws = zoo::make_ws(3);
    let r = is_maximally_epistemic(&ws, 10, &Engine::monte_carlo(2000, 1), 5).unwrap();
    assert!(!r.is_maximal() && r.equivalence_consistent);
    let w = r.status.witness().unwrap();
    let again = replay(&ws, w).unwrap();
    assert!(again.identical && again.violated);

    let b2 =
        is_maximally_epistemic(&zoo::make_bell2(), 10, &Engine::monte_carlo(2000, 1), 5).unwrap();
    assert!(!b2.is_maximal() && b2.equivalence_consistent);
}

#[test]
fn functional_dependence() {
    let ks = functional_dependence_test(&zoo::make_ks(), 20, 1).unwrap();
    assert_eq!(ks.verdict, FunctionalVerdict::FunctionallyEpistemic);
    assert_eq!(ks.status, Status::ConfirmedAnalytic);
    for m in [
        Box::new(zoo::make_ws(3)) as Box<dyn OntologicalModel>,
        Box::new(zoo::make_bell2()),
    ] {
        let r = functional_dependence_test(m.as_ref(), 20, 1).unwrap();
        assert_eq!(
            r.verdict,
            FunctionalVerdict::FunctionallyOntic,
            "{}",
            m.name()
        );
        let w = r.status.witness().unwrap();
        assert!(replay(m.as_ref(), w).unwrap().violated);
    }
    let bb = functional_dependence_test(&zoo::make_bb(3), 20, 1).unwrap();
    assert_eq!(bb.verdict, FunctionalVerdict::Degenerate);
}

#[test]
fn ks_om_consistency_checks() {
    let bb = zoo::make_bb(3);
    let ws = zoo::make_ws(3);
    let b2 = zoo::make_bell2();
    let ks = zoo::make_ks();
    let r = ks_om_consistency(&[&bb, &ws, &b2], &budget(6)).unwrap();
    assert!(r.pass);
    assert!(r.rows[2].skipped);
    let r = ks_om_consistency(&[&ks], &budget(6)).unwrap();
    assert!(r.pass && r.rows.iter().all(|r| r.skipped));

    let fake = fixtures::DeterministicFake::new(3);
    let r = ks_om_consistency(&[&bb, &fake], &budget(6)).unwrap();
    assert!(!r.pass);
    assert!(r.rows[1].deterministic && r.rows[1].noncontextual);
}

#[test]
fn misdeclared_model_is_caught() {
    let m = fixtures::Misdeclared {
        inner: zoo::make_bb(3),
    };
    let rep = classify(&m, &budget(7)).unwrap();
    assert_eq!(rep.mismatches().len(), 1);
    assert!(rep.mismatches()[0].starts_with("reciprocity"));
}

#[test]
fn report_json_shape() {
    let rep = classify(&zoo::make_bb(3), &budget(8)).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    assert_eq!(v["model"], "bb:3");
    assert_eq!(v["dim"], 3);
    let det = &v["predicates"]["determinism"];
    assert_eq!(det["status"], "falsified");
    assert_eq!(det["seed"], 8);
    assert!(det["n_trials"].as_u64().unwrap() > 0);
    assert!(det["witness"]["draw"]["index"].is_u64());
    assert_eq!(
        v["predicates"]["reciprocity"]["status"],
        "confirmed_analytic"
    );
    assert!(v["predicates"]["reciprocity"].get("witness").is_none());
}
