use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use ontic::bound::*;
use ontic::framework::{verify_born, Engine};
use ontic::hilbert::{Basis, PureState};
use ontic::valuation::{build_graph, find_valuation, load_vector_set};
use ontic::Error;
use proptest::prelude::*;
use rand::SeedableRng;

fn frag(name: &str) -> Fragment {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/fragments")
        .join(name);
    load_fragment(p).unwrap()
}

fn solve(lp: &LinearProgram) -> LpOutcome {
    simplex_solve(lp).unwrap()
}

#[test]
fn simplex_small_cases() {
    let mut lp = LinearProgram::new(1).maximize(vec![1.0]);
    lp.add_le(vec![1.0], 1.0);
    assert_eq!(
        solve(&lp),
        LpOutcome::Optimal {
            value: 1.0,
            x: vec![1.0]
        }
    );

    let mut lp = LinearProgram::new(1).maximize(vec![1.0]);
    lp.add_le(vec![-1.0], -2.0);
    lp.add_le(vec![1.0], 1.0);
    let LpOutcome::Infeasible { certificate } = solve(&lp) else {
        panic!("expected infeasible")
    };
    assert!(certificate.verify(&lp, 1e-9));

    let mut lp = LinearProgram::new(2).maximize(vec![1.0, 0.0]);
    lp.add_le(vec![1.0, -1.0], 1.0);
    assert_eq!(solve(&lp), LpOutcome::Unbounded);

    let mut lp = LinearProgram::new(2);
    lp.add_eq(vec![1.0], 1.0);
    assert!(matches!(simplex_solve(&lp), Err(Error::MalformedLp(_))));
}

#[test]
fn simplex_redundant_equalities() {
    // x + y = 1 stated three ways and x = y: by hand, x = y = 1/2
    let mut lp = LinearProgram::new(2).maximize(vec![1.0, 2.0]);
    lp.add_eq(vec![1.0, 1.0], 1.0);
    lp.add_eq(vec![2.0, 2.0], 2.0);
    lp.add_eq(vec![-1.0, -1.0], -1.0);
    lp.add_eq(vec![1.0, -1.0], 0.0);
    let LpOutcome::Optimal { value, x } = solve(&lp) else {
        panic!()
    };
    assert!((value - 1.5).abs() < 1e-12);
    assert!((x[0] - 0.5).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12);
}

/// Best objective over all vertices, by solving every square subsystem.
fn vertex_oracle(lp: &LinearProgram) -> Option<f64> {
    let n = lp.n_vars;
    let mut rows: Vec<(Vec<f64>, f64)> = lp.eq.clone();
    rows.extend(lp.le.iter().cloned());
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e, 0.0));
    }
    let mut best: Option<f64> = None;
    let m = rows.len();
    for mask in 0u32..(1 << m) {
        // a vertex makes n independent constraints tight; equalities are
        // tight anywhere feasible, so any n rows may be picked
        if mask.count_ones() as usize != n {
            continue;
        }
        let pick: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let a = DMatrix::from_fn(n, n, |r, c| rows[pick[r]].0[c]);
        let b = DVector::from_fn(n, |r, _| rows[pick[r]].1);
        let Some(x) = a.lu().solve(&b) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        if lp.violation(&x) < 1e-7 {
            let v: f64 = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
            best = Some(best.map_or(v, |b| b.max(v)));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_matches_vertex_enumeration(
        n in 1usize..4,
        coeffs in prop::collection::vec(-3i32..=3, 40),
        n_eq in 0usize..2,
        n_le in 1usize..4,
        feasible in any::<bool>(),
    ) {
        let mut it = coeffs.iter().map(|&c| f64::from(c));
        let mut next = || it.next().unwrap_or(1.0);
        let x0: Vec<f64> = (0..n).map(|_| next().abs()).collect();
        let c: Vec<f64> = (0..n).map(|_| next()).collect();
        let mut lp = LinearProgram::new(n).maximize(c);
        for _ in 0..n_eq {
            let row: Vec<f64> = (0..n).map(|_| next()).collect();
            let b: f64 = row.iter().zip(&x0).map(|(a, x)| a * x).sum();
            lp.add_eq(row, b);
        }
        for _ in 0..n_le {
            let row: Vec<f64> = (0..n).map(|_| next()).collect();
            let b: f64 = row.iter().zip(&x0).map(|(a, x)| a * x).sum::<f64>() + next().abs();
            lp.add_le(row, b);
        }
        // keep it bounded
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            lp.add_le(e, 5.0);
        }
        if !feasible {
            let row = vec![1.0; n];
            lp.add_le(row.clone(), -1.0);
        }
        match solve(&lp) {
            LpOutcome::Optimal { value, x } => {
                prop_assert!(feasible);
                prop_assert!(lp.violation(&x) < 1e-9);
                let oracle = vertex_oracle(&lp).expect("a vertex exists");
                prop_assert!((value - oracle).abs() < 1e-7, "{value} vs {oracle}");
            }
            LpOutcome::Infeasible { certificate } => {
                prop_assert!(certificate.verify(&lp, 1e-9));
                prop_assert!(vertex_oracle(&lp).is_none());
            }
            LpOutcome::Unbounded => prop_assert!(false, "box constraints bound the program"),
        }
    }
}

fn born_check(f: &Fragment, model: &FiniteModel) {
    assert!(model.violation(f) < 1e-9);
    let m = AtomModel::new(f, model);
    let mut states = Vec::new();
    let mut bases = Vec::new();
    for s in &f.states {
        for b in &f.bases {
            states.push(s.clone());
            bases.push(b.clone());
        }
    }
    let report = verify_born(&m, &states, &bases, &Engine::closed_form()).unwrap();
    assert!(report.pass);
    assert!(report.max_deviation < 1e-9);
}

#[test]
fn qubit_fragment_is_maximally_epistemic() {
    let f = frag("d2_zx.frag");
    let atoms = enumerate_atoms(&f).unwrap();
    assert_eq!(atoms.len(), 4);
    let Feasibility::Feasible { model } = feasibility_max_epistemic(&f, &atoms).unwrap() else {
        panic!("expected feasible")
    };
    born_check(&f, &model);
    let r = max_overlap_fraction(&f, &atoms).unwrap();
    assert!((r.f_star - 1.0).abs() < 1e-9);
    assert_eq!(r.caveat, CAVEAT);
    assert_eq!(r.pairs.len(), 2);
    for p in &r.pairs {
        assert!((p.born - 0.5).abs() < 1e-12);
        assert!(p.fraction >= 1.0 - 1e-9);
    }
    born_check(&f, &r.model);
}

#[test]
fn single_state_is_a_point_mass() {
    let f = frag("single.frag");
    let atoms = enumerate_atoms(&f).unwrap();
    assert_eq!(atoms.len(), 3);
    let Feasibility::Feasible { model } = feasibility_max_epistemic(&f, &atoms).unwrap() else {
        panic!()
    };
    let w = &model.weights[0];
    let a = atoms.iter().position(|a| a.outcomes == vec![0]).unwrap();
    assert!((w[a] - 1.0).abs() < 1e-12);
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    born_check(&f, &model);
    let r = max_overlap_fraction(&f, &atoms).unwrap();
    assert!((r.f_star - 1.0).abs() < 1e-12);
    assert!(r.pairs.is_empty());
}

#[test]
fn qutrit_fragments_fall_short() {
    for (name, n_atoms) in [("d3_three_bases.frag", 19), ("d3_four_bases.frag", 33)] {
        let f = frag(name);
        assert!(f.exact);
        let atoms = enumerate_atoms(&f).unwrap();
        assert_eq!(atoms.len(), n_atoms, "{name}");
        let Feasibility::Feasible { model } = feasibility_max_epistemic(&f, &atoms).unwrap() else {
            panic!("{name}: each state alone admits a model")
        };
        born_check(&f, &model);
        let r = max_overlap_fraction(&f, &atoms).unwrap();
        assert!((r.f_star - 1.0 / 6.0).abs() < 1e-9, "{name}: {}", r.f_star);
        assert!(r.model.violation(&f) < 1e-9);
        for p in &r.pairs {
            assert!(p.fraction >= r.f_star - 1e-9);
        }
        // the same fragment in floating point
        let g = Fragment::new(f.states.clone(), f.bases.clone()).unwrap();
        assert_eq!(enumerate_atoms(&g).unwrap().len(), n_atoms);
        let rg = max_overlap_fraction(&g, &enumerate_atoms(&g).unwrap()).unwrap();
        assert!((rg.f_star - r.f_star).abs() < 1e-9);
    }
}

#[test]
fn overlap_bound_is_monotone_under_nesting() {
    let full = frag("d3_four_bases.frag");
    let f_full = max_overlap_fraction(&full, &enumerate_atoms(&full).unwrap())
        .unwrap()
        .f_star;
    let nb = full.bases.len();
    let ns = full.states.len();
    for bmask in 1u32..(1 << nb) {
        for smask in 1u32..(1 << ns) {
            let bases: Vec<Basis> = (0..nb)
                .filter(|b| bmask & (1 << b) != 0)
                .map(|b| full.bases[b].clone())
                .collect();
            let states: Vec<PureState> = (0..ns)
                .filter(|s| smask & (1 << s) != 0)
                .map(|s| full.states[s].clone())
                .collect();
            let sub = Fragment::new(states, bases).unwrap();
            let f = max_overlap_fraction(&sub, &enumerate_atoms(&sub).unwrap())
                .unwrap()
                .f_star;
            assert!(f >= f_full - 1e-9, "bases {bmask:b} states {smask:b}: {f}");
        }
    }
}

#[test]
fn uncolourable_fragment_has_no_atoms() {
    let f = frag("d3_peres.frag");
    assert_eq!(f.rays.len(), 33);
    assert_eq!(f.bases.len(), 16);
    let atoms = enumerate_atoms(&f).unwrap();
    assert!(atoms.is_empty());
    let set =
        load_vector_set(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/peres33.vec"))
            .unwrap();
    assert!(!find_valuation(&build_graph(&set), 3).is_sat());
    let Feasibility::Infeasible { state, certificate } =
        feasibility_max_epistemic(&f, &atoms).unwrap()
    else {
        panic!("expected infeasible")
    };
    assert!(certificate.verify(&feasibility_lp(&f, &atoms, state), 1e-9));
    assert!(matches!(
        max_overlap_fraction(&f, &atoms),
        Err(Error::EmptyAtomSet)
    ));
}

#[test]
fn atoms_exist_iff_rays_are_colourable() {
    let full = frag("d3_peres.frag");
    let set =
        load_vector_set(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/peres33.vec"))
            .unwrap();
    let exact_rays: Vec<PureState> = set
        .to_f64()
        .iter()
        .map(|v| PureState::from_real(v).unwrap())
        .collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for trial in 0..40 {
        let keep: Vec<Basis> = full
            .bases
            .iter()
            .filter(|_| rand::Rng::random_bool(&mut rng, 0.8) || trial == 0)
            .cloned()
            .collect();
        if keep.is_empty() {
            continue;
        }
        let sub = Fragment::new(vec![], keep).unwrap();
        let atoms = enumerate_atoms(&sub).unwrap();
        let idx: Vec<usize> = sub
            .rays
            .iter()
            .map(|r| exact_rays.iter().position(|e| e.same_ray(r)).unwrap())
            .collect();
        let removed: Vec<usize> = (0..set.len()).filter(|i| !idx.contains(i)).collect();
        let sat = find_valuation(&build_graph(&set.without(&removed)), 3).is_sat();
        assert_eq!(atoms.is_empty(), !sat, "trial {trial}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn qubit_two_basis_fragments_reach_one(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let b1 = Basis::random(2, &mut rng);
        let b2 = Basis::random(2, &mut rng);
        let states = vec![b1.vectors()[0].clone(), b2.vectors()[0].clone()];
        let f = Fragment::new(states, vec![b1, b2]).unwrap();
        let atoms = enumerate_atoms(&f).unwrap();
        prop_assert_eq!(atoms.len(), 4);
        let r = max_overlap_fraction(&f, &atoms).unwrap();
        prop_assert!((r.f_star - 1.0).abs() < 1e-9);
        prop_assert!(r.model.violation(&f) < 1e-9);
    }
}
