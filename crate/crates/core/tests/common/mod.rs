#![allow(dead_code)]

use empeq::monotone::{is_payoff_monotone, is_weakly_payoff_monotone, DEFAULT_TOL};
use empeq::qre::{logistic_qrf, qre_fixed_point};
use empeq::{Game, MixedProfile};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Uniform point on the simplex with `k` vertices.
pub fn simplex_point(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

pub fn random_profile(rng: &mut ChaCha8Rng, g: &Game) -> MixedProfile {
    MixedProfile::new(g.action_counts().iter().map(|&k| simplex_point(rng, k)).collect()).unwrap()
}

/// Rejection sampling of weakly payoff-monotone profiles.
pub fn weakly_monotone_samples(rng: &mut ChaCha8Rng, g: &Game, count: usize) -> Vec<MixedProfile> {
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        assert!(tries < 10_000_000, "weakly monotone region too small to sample");
        let p = random_profile(rng, g);
        if is_weakly_payoff_monotone(g, &p, DEFAULT_TOL).unwrap().satisfied {
            out.push(p);
        }
    }
    out
}

/// Random two-player game with the given action counts and payoffs in
/// `[-scale, scale]`.
pub fn random_game(rng: &mut ChaCha8Rng, k1: usize, k2: usize, scale: f64) -> Game {
    let players = vec!["P1".to_string(), "P2".to_string()];
    let actions = vec![
        (0..k1).map(|a| format!("a{}", a + 1)).collect(),
        (0..k2).map(|b| format!("b{}", b + 1)).collect(),
    ];
    let payoffs = (0..k1 * k2 * 2).map(|_| rng.gen_range(-scale..=scale)).collect();
    Game::new(players, actions, payoffs).unwrap()
}

/// Expected utility of each action of `player`, computed directly from
/// the payoff table.
pub fn utilities(g: &Game, p: &MixedProfile, player: usize) -> Vec<f64> {
    let mut u = vec![0.0; g.num_actions(player)];
    for prof in g.profiles() {
        let w: f64 = (0..g.num_players())
            .filter(|&j| j != player)
            .map(|j| p.prob(j, prof[j]))
            .product();
        u[prof[player]] += w * g.payoff(&prof, player);
    }
    u
}

pub fn corpus_games() -> Vec<(String, Game)> {
    vec![
        ("gamma1".into(), empeq::corpus::gamma1()),
        ("psi".into(), empeq::corpus::psi()),
        ("gamma2c(2,2)".into(), empeq::corpus::gamma2c(2.0, 2.0).unwrap()),
        ("gamma2c(0.5,0.5)".into(), empeq::corpus::gamma2c(0.5, 0.5).unwrap()),
        ("phi".into(), empeq::corpus::phi()),
    ]
}

/// Interior payoff-monotone profile: alternately re-sort each player's
/// probabilities to match its utility order until both agree, falling back
/// to a logit equilibrium.
pub fn monotone_profile(g: &Game, rng: &mut ChaCha8Rng) -> MixedProfile {
    let mut probs: Vec<Vec<f64>> = g.action_counts().iter().map(|&k| simplex_point(rng, k)).collect();
    for _ in 0..20 {
        let p = MixedProfile::new(probs.clone()).unwrap();
        if is_payoff_monotone(g, &p, DEFAULT_TOL).unwrap().satisfied {
            return p;
        }
        for i in 0..g.num_players() {
            let u = utilities(g, &MixedProfile::new(probs.clone()).unwrap(), i);
            let mut idx: Vec<usize> = (0..u.len()).collect();
            idx.sort_by(|&a, &b| u[a].total_cmp(&u[b]));
            let mut vals = probs[i].clone();
            vals.sort_by(f64::total_cmp);
            for (r, &a) in idx.iter().enumerate() {
                probs[i][a] = vals[r];
            }
        }
    }
    let lambda = rng.gen_range(0.1..3.0);
    qre_fixed_point(g, &[logistic_qrf(lambda).unwrap()], &MixedProfile::uniform(&g.action_counts()))
        .unwrap()
        .profile
}
