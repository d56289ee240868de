mod common;

use empeq::ccost::{
    build_spline, calibrate_game, cc_equilibrium_check, induced_qrf, vanishing_sequence, ControlCostSpline, KnotCase,
};
use empeq::corpus;
use empeq::empirical::{empirical_membership, Decision};
use empeq::monotone::{is_payoff_monotone, DEFAULT_TOL};
use empeq::nash::enumerate_nash;
use empeq::qre::{
    default_lambda_schedule, logistic_qrf, perturbed_monotone_point, qre_fixed_point, qrf_regularity_audit,
    trace_logit_path, Qrf,
};
use empeq::{Game, MixedProfile};

fn pure(g: &Game, p: &[usize]) -> MixedProfile {
    MixedProfile::pure(&g.action_counts(), p)
}

#[test]
fn logit_paths_end_near_nash() {
    for (name, g) in common::corpus_games() {
        let path = trace_logit_path(&g, &default_lambda_schedule(1e3), &MixedProfile::uniform(&g.action_counts()))
            .unwrap();
        let (_, d) = path.nearest_nash.clone().unwrap();
        assert!(d < 1e-3, "{}: {}", name, d);
        assert!(path.points.iter().all(|p| p.residual < 1e-10));
    }
}

#[test]
fn logit_path_selects_a1_b1() {
    for g in [corpus::gamma1(), corpus::gamma2c(0.5, 0.5).unwrap()] {
        let path = trace_logit_path(&g, &default_lambda_schedule(1e3), &MixedProfile::uniform(&g.action_counts()))
            .unwrap();
        assert!(path.terminal().profile.distance(&pure(&g, &[0, 0])) < 1e-3);
        let bad = pure(&g, &[1, 1]);
        assert!(path.points.iter().all(|p| p.profile.distance(&bad) > 0.4));
    }
}

#[test]
fn path_with_only_zero() {
    let g = corpus::phi();
    let path = trace_logit_path(&g, &[0.0], &pure(&g, &[0, 0])).unwrap();
    assert_eq!(path.points.len(), 1);
    assert!(path.points[0].profile.distance(&MixedProfile::uniform(&[3, 3])) < 1e-12);
    assert!(trace_logit_path(&g, &[1.0, 2.0], &pure(&g, &[0, 0])).is_err());
}

#[test]
fn logit_qre_is_payoff_monotone() {
    for (name, g) in common::corpus_games() {
        for lambda in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let q = qre_fixed_point(&g, &[logistic_qrf(lambda).unwrap()], &MixedProfile::uniform(&g.action_counts()))
                .unwrap();
            assert!(q.residual < 1e-10);
            let v = is_payoff_monotone(&g, &q.profile, DEFAULT_TOL).unwrap();
            assert!(v.satisfied, "{} lambda {}: {:?}", name, lambda, v.violations);
        }
    }
}

#[test]
fn identical_payoffs_give_uniform() {
    let g = Game::from_fn(
        vec!["A".into(), "B".into()],
        vec![vec!["x".into(), "y".into(), "z".into()], vec!["u".into(), "v".into()]],
        |_| vec![3.0, 3.0],
    )
    .unwrap();
    let s = build_spline(&[0.5, 0.3, 0.2], &[2.0, 1.0, 0.5], 0.05, 0.1, None).unwrap();
    let q = qre_fixed_point(&g, &[Qrf::ControlCost(Box::new(s))], &pure(&g, &[0, 1])).unwrap();
    assert!(q.profile.distance(&MixedProfile::uniform(&[3, 2])) < 1e-10);
}

#[test]
fn perturbed_point_examples() {
    let g = corpus::gamma1();
    let mu = MixedProfile::new(vec![vec![0.75, 0.25], vec![0.75, 0.25]]).unwrap();
    let p = perturbed_monotone_point(&g, &mu, 0.01, 1.0).unwrap();
    assert!(p.profile.is_interior() && p.verdict.satisfied);
    assert!(p.distance <= 0.02);
    let mut last = f64::INFINITY;
    for (zeta, bound) in [(0.1, 0.2), (0.01, 0.02), (0.001, 0.002)] {
        let d = perturbed_monotone_point(&g, &mu, zeta, 1.0).unwrap().distance;
        assert!(d < bound && d < last);
        last = d;
    }
    let sym = Game::bimatrix(["A", "B"], &["x", "y"], &["x", "y"], &[vec![1.0, 0.0], vec![0.0, 1.0]], &[
        vec![1.0, 0.0],
        vec![0.0, 1.0],
    ])
    .unwrap();
    let u = MixedProfile::uniform(&[2, 2]);
    assert!(perturbed_monotone_point(&sym, &u, 0.3, 1.0).unwrap().distance < 1e-12);
    let not_weak = pure(&g, &[1, 1]);
    assert!(perturbed_monotone_point(&g, &not_weak, 0.01, 1.0).is_err());
}

#[test]
fn spline_examples() {
    let s = build_spline(&[0.7, 0.3], &[0.7, 0.0], 0.1, 0.1, None).unwrap();
    assert!((s.derivative(0.7) - s.derivative(0.3) - 0.7).abs() < 1e-12);
    assert_eq!(s.value(1.0), 0.0);
    let m0 = s.slopes()[0];
    let y0 = s.y0();
    assert!(s.value(1e-9) >= s.value(y0) + m0.abs() * y0 * y0 * (1e9 - 1.0 / y0) * (1.0 - 1e-12));
    assert!(s.value(1e-9) > 1e6);
}

#[test]
fn calibrated_spline_round_trip_and_perturbation() {
    let g = corpus::gamma1();
    let sigma = qre_fixed_point(&g, &[logistic_qrf(2.0).unwrap()], &MixedProfile::uniform(&[2, 2]))
        .unwrap()
        .profile;
    let ccg = calibrate_game(&g, &sigma, 0.1, 0.05).unwrap();
    let c = cc_equilibrium_check(&ccg, &sigma).unwrap();
    assert!(c.equilibrium && c.max_defect < 1e-12, "{:?}", c);
    let mut v = sigma.as_vecs().to_vec();
    v[0][0] += 0.05;
    let total: f64 = v[0].iter().sum();
    v[0].iter_mut().for_each(|x| *x /= total);
    let bumped = MixedProfile::new(v).unwrap();
    assert!(cc_equilibrium_check(&ccg, &bumped).unwrap().max_defect > 1e-3);
    for i in 0..2 {
        let u = empeq::expected_utility(&g, &sigma, i).unwrap();
        let back = induced_qrf(&ccg.splines()[i], &u).unwrap();
        for (a, b) in back.iter().zip(sigma.player(i)) {
            assert!((a - b).abs() < 1e-9);
        }
    }
    assert!(cc_equilibrium_check(&ccg, &pure(&g, &[0, 0])).is_err());
}

#[test]
fn one_action_players_trivially_pass() {
    let g = Game::new(vec!["P".into(), "Q".into()], vec![vec!["x".into()], vec!["y".into()]], vec![1.0, 2.0]).unwrap();
    let s = pure(&g, &[0, 0]);
    let ccg = calibrate_game(&g, &s, 0.1, 0.5).unwrap();
    assert!(cc_equilibrium_check(&ccg, &s).unwrap().equilibrium);
}

#[test]
fn control_cost_audit_is_clean() {
    let s = build_spline(&[0.5, 0.3, 0.2], &[2.0, 1.0, 0.5], 0.05, 0.1, Some(0.45)).unwrap();
    let r = qrf_regularity_audit(&Qrf::ControlCost(Box::new(s)), 300, 3);
    assert!(r.is_clean(), "{:?}", r.counterexamples.first());
}

fn logit_sequence(g: &Game, lambdas: &[f64]) -> Vec<MixedProfile> {
    let mut start = MixedProfile::uniform(&g.action_counts());
    lambdas
        .iter()
        .map(|&l| {
            let p = qre_fixed_point(g, &[logistic_qrf(l).unwrap()], &start).unwrap().profile;
            start = p.clone();
            p
        })
        .collect()
}

#[test]
fn vanishing_along_gamma1_logit() {
    let g = corpus::gamma1();
    let seq = logit_sequence(&g, &[1.0, 10.0, 20.0, 30.0]);
    let limit = pure(&g, &[0, 0]);
    let v = vanishing_sequence(&g, &seq, &limit).unwrap();
    assert!(v.terminal_nash_defect < 1e-6);
    assert!(v.entries.len() >= 3, "{:?}", v.skipped);
    for w in v.entries.windows(2) {
        assert!(w[1].sup_norm <= w[0].sup_norm && w[1].lambda > w[0].lambda);
    }
    assert!(v.entries.last().unwrap().sup_norm < 0.05);
    for e in &v.entries {
        assert!(e.equilibrium_defect < 1e-9);
    }
}

#[test]
fn vanishing_certifies_a2_b2() {
    let g = corpus::gamma2c(2.0, 2.0).unwrap();
    let limit = pure(&g, &[1, 1]);
    let deltas: Vec<f64> = (1..=8).map(|k| 10f64.powi(-k)).collect();
    let v = empirical_membership(&g, &limit, &deltas, 1.0).unwrap();
    assert_eq!(v.decision, Decision::Member, "{:?}", v.diagnostics);
    let seq: Vec<MixedProfile> = v.witnesses.iter().map(|w| w.profile.clone()).collect();
    let out = vanishing_sequence(&g, &seq, &limit).unwrap();
    assert!(out.terminal_nash_defect < 1e-6, "{}", out.terminal_nash_defect);
    // a1 and b1 are best responses at the limit with limit probability 0
    for e in &out.entries {
        assert_eq!(e.cases, vec![KnotCase::ZeroLimit, KnotCase::ZeroLimit]);
    }
    assert!(out.entries.last().unwrap().sup_norm < out.entries[0].sup_norm);
}

#[test]
fn vanishing_rejects_bad_inputs() {
    let g = corpus::gamma1();
    let seq = vec![pure(&g, &[0, 0])];
    assert!(vanishing_sequence(&g, &seq, &pure(&g, &[0, 0])).is_err());
    let seq = logit_sequence(&g, &[1.0]);
    assert!(vanishing_sequence(&g, &seq, &pure(&g, &[0, 1])).is_err());
}

#[test]
fn spline_json_survives_round_trip() {
    let s = build_spline(&[0.45, 0.3, 0.25], &[1.0, 0.2, -0.3], 0.01, 0.2, Some(0.35)).unwrap();
    let t = s.to_json();
    let back = ControlCostSpline::from_json(&t).unwrap();
    assert_eq!(back.to_json(), t);
}

#[test]
fn nash_of_logit_limit_is_enumerated() {
    let g = corpus::psi();
    let e = enumerate_nash(&g).unwrap();
    assert_eq!(e.components.len(), 1);
}
