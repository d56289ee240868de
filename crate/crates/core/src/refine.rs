//! Undominated, perfect and proper refinements of Nash equilibria.
//!
//! For two-player games both trembling-hand checks are exact at each
//! scheduled `ε`: the search space near `σ` splits into finitely many
//! linear programs (one per choice of best-response sets, or per pair of
//! weak orders of utilities), so infeasibility of all of them refutes the
//! candidate and any feasible one yields an explicit witness. Games with
//! more players fall back to a penalty search that can only verify.

use crate::error::{Error, Result};
use crate::game::{nash_defect_unchecked, weak_dominance, DominanceReport, Game, MixedProfile};
use crate::lp::Lp;
use crate::monotone::util_gt;
use crate::nash::{EquilibriumSet, NashComponent, NASH_TOL};
use crate::orders::{all_weak_orders, WeakOrder};
use crate::search::{minimize, Bounds};

pub const DEFAULT_EPSILON_SCHEDULE: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Interior slack below which a linear program counts as infeasible.
const SLACK_TOL: f64 = 1e-9;

/// Tolerance used when validating witnesses.
pub const WITNESS_TOL: f64 = 1e-9;

/// Neighborhood radius searched at a given `ε`.
pub fn radius(epsilon: f64) -> f64 {
    10.0 * epsilon
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Verified,
    Refuted,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Refuted => "refuted",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub epsilon: f64,
    pub delta: f64,
    pub profile: MixedProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementVerdict {
    pub status: Status,
    pub witnesses: Vec<Witness>,
    pub reason: String,
}

/// Interior profile in which every action that is not a best response
/// (beyond `tol`) has probability at most `ε`.
pub fn is_epsilon_perfect(g: &Game, tau: &MixedProfile, epsilon: f64, tol: f64) -> Result<bool> {
    g.check_profile(tau)?;
    if !tau.is_interior() {
        return Ok(false);
    }
    for i in 0..g.num_players() {
        let u = g.utilities(tau, i);
        let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (a, &x) in u.iter().enumerate() {
            if util_gt(best, x, tol) && tau.prob(i, a) > epsilon * (1.0 + tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Interior profile in which `U(a) > U(â)` implies `τ(â) <= ε τ(a)`.
pub fn is_epsilon_proper(g: &Game, tau: &MixedProfile, epsilon: f64, tol: f64) -> Result<bool> {
    g.check_profile(tau)?;
    if !tau.is_interior() {
        return Ok(false);
    }
    for i in 0..g.num_players() {
        let u = g.utilities(tau, i);
        let s = tau.player(i);
        for a in 0..u.len() {
            for b in 0..u.len() {
                if util_gt(u[a], u[b], tol) && s[b] > epsilon * s[a] * (1.0 + tol) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty epsilon schedule".into()));
    }
    if schedule.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::InvalidArgument("epsilon values must lie in (0, 1)".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("epsilon schedule must be decreasing".into()));
    }
    Ok(())
}

fn require_nash(g: &Game, sigma: &MixedProfile) -> Result<()> {
    g.check_profile(sigma)?;
    let d = nash_defect_unchecked(g, sigma);
    if d > NASH_TOL {
        return Err(Error::NotNash { defect: d });
    }
    Ok(())
}

fn dominance_obstruction(g: &Game, sigma: &MixedProfile, report: &DominanceReport) -> Option<String> {
    for (i, list) in report.per_player.iter().enumerate() {
        for d in list {
            if sigma.prob(i, d.dominated) > 0.0 {
                return Some(format!(
                    "{} plays {} with probability {}, weakly dominated by {}",
                    g.players()[i],
                    g.actions(i)[d.dominated],
                    sigma.prob(i, d.dominated),
                    g.actions(i)[d.dominating]
                ));
            }
        }
    }
    None
}

enum Stage {
    Witness(MixedProfile),
    Infeasible,
    Unresolved(String),
}

fn assemble(stages: Vec<(f64, Stage)>, what: &str) -> RefinementVerdict {
    let mut witnesses = Vec::new();
    let mut unresolved = None;
    for (eps, stage) in stages {
        match stage {
            Stage::Witness(p) => witnesses.push(Witness {
                epsilon: eps,
                delta: radius(eps),
                profile: p,
            }),
            Stage::Infeasible => {
                return RefinementVerdict {
                    status: Status::Refuted,
                    witnesses,
                    reason: format!(
                        "no {}-{} profile within distance {} exists",
                        eps,
                        what,
                        radius(eps)
                    ),
                }
            }
            Stage::Unresolved(msg) => {
                if unresolved.is_none() {
                    unresolved = Some(format!("epsilon {}: {}", eps, msg));
                }
            }
        }
    }
    match unresolved {
        None => RefinementVerdict {
            status: Status::Verified,
            witnesses,
            reason: format!("{} witness found at every scheduled epsilon", what),
        },
        Some(msg) => RefinementVerdict {
            status: Status::Inconclusive,
            witnesses,
            reason: msg,
        },
    }
}

/// Checks whether `σ` is a perfect equilibrium.
pub fn check_perfect(g: &Game, sigma: &MixedProfile, schedule: &[f64]) -> Result<RefinementVerdict> {
    validate_schedule(schedule)?;
    require_nash(g, sigma)?;
    if let Some(reason) = dominance_obstruction(g, sigma, &weak_dominance(g)) {
        return Ok(RefinementVerdict {
            status: Status::Refuted,
            witnesses: vec![],
            reason,
        });
    }
    let stages = schedule
        .iter()
        .map(|&eps| {
            let stage = match g.num_players() {
                1 | 2 => perfect_lp(g, sigma, eps),
                _ => perfect_search(g, sigma, eps),
            };
            (eps, stage)
        })
        .collect();
    Ok(assemble(stages, "perfect"))
}

/// Checks whether `σ` is a proper equilibrium.
pub fn check_proper(g: &Game, sigma: &MixedProfile, schedule: &[f64]) -> Result<RefinementVerdict> {
    validate_schedule(schedule)?;
    require_nash(g, sigma)?;
    if let Some(reason) = dominance_obstruction(g, sigma, &weak_dominance(g)) {
        return Ok(RefinementVerdict {
            status: Status::Refuted,
            witnesses: vec![],
            reason,
        });
    }
    let stages = schedule
        .iter()
        .map(|&eps| {
            let stage = match g.num_players() {
                1 | 2 => proper_lp(g, sigma, eps),
                _ => proper_search(g, sigma, eps),
            };
            (eps, stage)
        })
        .collect();
    Ok(assemble(stages, "proper"))
}

fn subsets(k: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << k))
        .map(|m| (0..k).filter(|&a| m & (1 << a) != 0).collect())
        .collect()
}

/// Opponent payoffs as a function of player `i`'s mixed strategy:
/// `coef[b][a]` is the opponent's payoff from action `b` when `i` plays `a`.
fn opponent_coefficients(g: &Game, i: usize) -> Option<Vec<Vec<f64>>> {
    if g.num_players() == 2 {
        Some(g.own_matrix(1 - i))
    } else {
        None
    }
}

/// Constant utilities of the single player of a one-player game.
fn solo_utilities(g: &Game) -> Vec<f64> {
    (0..g.num_actions(0)).map(|a| g.payoff(&[a], 0)).collect()
}

/// Linear program for player `i`'s strategy in the perfect check: caps on
/// actions outside `own`, and `opp` must be best responses of the opponent.
fn perfect_player_lp(
    g: &Game,
    sigma: &MixedProfile,
    i: usize,
    own: &[usize],
    opp: Option<&[usize]>,
    eps: f64,
) -> Option<Vec<f64>> {
    let delta = radius(eps);
    let k = g.num_actions(i);
    let mut lp = Lp::maximize();
    let t = lp.var(1.0, f64::NEG_INFINITY, 1.0);
    let x: Vec<usize> = (0..k)
        .map(|a| {
            let s = sigma.prob(i, a);
            let hi = if own.contains(&a) { (s + delta).min(1.0) } else { (s + delta).min(eps) };
            lp.var(0.0, (s - delta).max(0.0), hi)
        })
        .collect();
    lp.eq(&x.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(), 1.0);
    for a in 0..k {
        let w = if own.contains(&a) { 1.0 } else { eps };
        lp.ge(&[(x[a], 1.0), (t, -w)], 0.0);
    }
    if let (Some(opp), Some(coef)) = (opp, opponent_coefficients(g, i)) {
        for &b in opp {
            for c in 0..coef.len() {
                if c != b {
                    let terms: Vec<(usize, f64)> = (0..k).map(|a| (x[a], coef[b][a] - coef[c][a])).collect();
                    lp.ge(&terms, 0.0);
                }
            }
        }
    }
    let sol = lp.solve()?;
    if sol.objective <= SLACK_TOL {
        return None;
    }
    Some(normalize(x.iter().map(|&v| sol.values[v].max(0.0)).collect()))
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn perfect_lp(g: &Game, sigma: &MixedProfile, eps: f64) -> Stage {
    let delta = radius(eps);
    let n = g.num_players();
    let forced = |i: usize| -> Vec<usize> {
        (0..g.num_actions(i))
            .filter(|&a| sigma.prob(i, a) - delta > eps)
            .collect()
    };
    let candidates: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|i| {
            let f = forced(i);
            let mut sets: Vec<Vec<usize>> = subsets(g.num_actions(i))
                .into_iter()
                .filter(|s| f.iter().all(|a| s.contains(a)))
                .collect();
            if n == 1 {
                let u = solo_utilities(g);
                let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                sets.retain(|s| s.iter().all(|&a| u[a] == best));
            }
            sets
        })
        .collect();
    let mut numerical = false;
    if n == 1 {
        for own in &candidates[0] {
            if let Some(x) = perfect_player_lp(g, sigma, 0, own, None, eps) {
                let tau = MixedProfile::from_raw(vec![x]);
                if accept(g, sigma, &tau, delta, |t| is_epsilon_perfect(g, t, eps, WITNESS_TOL)) {
                    return Stage::Witness(tau);
                }
                numerical = true;
            }
        }
    } else {
        let mut cache: std::collections::HashMap<(usize, Vec<usize>, Vec<usize>), Option<Vec<f64>>> =
            std::collections::HashMap::new();
        let mut solve = |i: usize, own: &Vec<usize>, opp: &Vec<usize>| -> Option<Vec<f64>> {
            cache
                .entry((i, own.clone(), opp.clone()))
                .or_insert_with(|| perfect_player_lp(g, sigma, i, own, Some(opp), eps))
                .clone()
        };
        for b1 in &candidates[0] {
            for b2 in &candidates[1] {
                let Some(x) = solve(0, b1, b2) else { continue };
                let Some(y) = solve(1, b2, b1) else { continue };
                let tau = MixedProfile::from_raw(vec![x, y]);
                if accept(g, sigma, &tau, delta, |t| is_epsilon_perfect(g, t, eps, WITNESS_TOL)) {
                    return Stage::Witness(tau);
                }
                numerical = true;
            }
        }
    }
    if numerical {
        Stage::Unresolved("a feasible program produced a witness that failed validation".into())
    } else {
        Stage::Infeasible
    }
}

fn accept<F>(g: &Game, sigma: &MixedProfile, tau: &MixedProfile, delta: f64, check: F) -> bool
where
    F: Fn(&MixedProfile) -> Result<bool>,
{
    g.check_profile(tau).is_ok()
        && tau.distance(sigma) <= delta * (1.0 + 1e-9) + 1e-12
        && check(tau).unwrap_or(false)
}

/// Linear program for player `i`'s strategy in the proper check. Variables
/// are rescaled by `ε^depth` so that every class has unit-scale unknowns.
fn proper_player_lp(
    g: &Game,
    sigma: &MixedProfile,
    i: usize,
    own: &WeakOrder,
    opp: Option<&WeakOrder>,
    eps: f64,
) -> Option<Vec<f64>> {
    let delta = radius(eps);
    let k = g.num_actions(i);
    let top = own.num_classes() - 1;
    let scale: Vec<f64> = (0..k).map(|a| eps.powi((top - own.ranks()[a]) as i32)).collect();
    let mut lp = Lp::maximize();
    let t = lp.var(1.0, f64::NEG_INFINITY, 1.0);
    let z: Vec<usize> = (0..k)
        .map(|a| {
            let s = sigma.prob(i, a);
            lp.var(0.0, (s - delta).max(0.0) / scale[a], (s + delta).min(1.0) / scale[a])
        })
        .collect();
    lp.eq(&(0..k).map(|a| (z[a], scale[a])).collect::<Vec<_>>(), 1.0);
    for a in 0..k {
        lp.ge(&[(z[a], 1.0), (t, -1.0)], 0.0);
    }
    for hi in 0..k {
        for lo in 0..k {
            if own.ranks()[hi] == own.ranks()[lo] + 1 {
                lp.le(&[(z[lo], 1.0), (z[hi], -1.0)], 0.0);
            }
        }
    }
    if let (Some(opp), Some(coef)) = (opp, opponent_coefficients(g, i)) {
        let r = opp.ranks();
        for b in 0..coef.len() {
            for c in 0..coef.len() {
                let terms: Vec<(usize, f64)> = (0..k).map(|a| (z[a], scale[a] * (coef[b][a] - coef[c][a]))).collect();
                if r[b] == r[c] && b < c {
                    lp.eq(&terms, 0.0);
                } else if r[b] == r[c] + 1 {
                    lp.ge(&terms, 0.0);
                }
            }
        }
    }
    let sol = lp.solve()?;
    if sol.objective <= SLACK_TOL {
        return None;
    }
    Some(normalize((0..k).map(|a| sol.values[z[a]].max(0.0) * scale[a]).collect()))
}

fn proper_lp(g: &Game, sigma: &MixedProfile, eps: f64) -> Stage {
    let delta = radius(eps);
    let n = g.num_players();
    let candidates: Vec<Vec<WeakOrder>> = (0..n)
        .map(|i| {
            if n == 1 {
                return vec![WeakOrder::from_values(&solo_utilities(g), 0.0)];
            }
            all_weak_orders(g.num_actions(i))
                .into_iter()
                .filter(|o| {
                    let top = o.num_classes() - 1;
                    (0..g.num_actions(i)).all(|a| sigma.prob(i, a) - delta <= eps || o.ranks()[a] == top)
                })
                .collect()
        })
        .collect();
    let mut numerical = false;
    if n == 1 {
        if let Some(x) = proper_player_lp(g, sigma, 0, &candidates[0][0], None, eps) {
            let tau = MixedProfile::from_raw(vec![x]);
            if accept(g, sigma, &tau, delta, |t| is_epsilon_proper(g, t, eps, WITNESS_TOL)) {
                return Stage::Witness(tau);
            }
            numerical = true;
        }
    } else {
        let mut cache: std::collections::HashMap<(usize, Vec<usize>, Vec<usize>), Option<Vec<f64>>> =
            std::collections::HashMap::new();
        let mut solve = |i: usize, own: &WeakOrder, opp: &WeakOrder| -> Option<Vec<f64>> {
            cache
                .entry((i, own.ranks().to_vec(), opp.ranks().to_vec()))
                .or_insert_with(|| proper_player_lp(g, sigma, i, own, Some(opp), eps))
                .clone()
        };
        for r1 in &candidates[0] {
            for r2 in &candidates[1] {
                let Some(x) = solve(0, r1, r2) else { continue };
                let Some(y) = solve(1, r2, r1) else { continue };
                let tau = MixedProfile::from_raw(vec![x, y]);
                if accept(g, sigma, &tau, delta, |t| is_epsilon_proper(g, t, eps, WITNESS_TOL)) {
                    return Stage::Witness(tau);
                }
                numerical = true;
            }
        }
    }
    if numerical {
        Stage::Unresolved("a feasible program produced a witness that failed validation".into())
    } else {
        Stage::Infeasible
    }
}

fn hinge(x: f64) -> f64 {
    if x > 0.0 {
        x * x
    } else {
        0.0
    }
}

fn perfect_search(g: &Game, sigma: &MixedProfile, eps: f64) -> Stage {
    let delta = radius(eps);
    let n = g.num_players();
    let best: Vec<Vec<usize>> = (0..n)
        .map(|i| crate::game::argmax_set(&g.utilities(sigma, i), NASH_TOL))
        .collect();
    let floor = 1e-3 * eps;
    let mut bounds = Bounds::around(sigma, delta, floor);
    for i in 0..n {
        for a in 0..g.num_actions(i) {
            if !best[i].contains(&a) {
                bounds.hi[i][a] = bounds.hi[i][a].min(eps);
            }
        }
    }
    let penalty = |p: &MixedProfile| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            let u = g.utilities(p, i);
            for &a in &best[i] {
                for &v in &u {
                    acc += hinge(v - u[a]);
                }
            }
        }
        acc
    };
    match minimize(penalty, &bounds, &[sigma.clone()], 32, 0x9e37_79b9, 300) {
        Some((tau, _)) if accept(g, sigma, &tau, delta, |t| is_epsilon_perfect(g, t, eps, WITNESS_TOL)) => {
            Stage::Witness(tau)
        }
        _ => Stage::Unresolved("penalty search found no witness".into()),
    }
}

fn proper_search(g: &Game, sigma: &MixedProfile, eps: f64) -> Stage {
    let delta = radius(eps);
    let n = g.num_players();
    let orders: Vec<WeakOrder> = (0..n)
        .map(|i| WeakOrder::from_values(&g.utilities(sigma, i), NASH_TOL))
        .collect();
    let floor = 1e-3 * eps.powi(g.action_counts().into_iter().max().unwrap_or(1) as i32);
    let bounds = Bounds::around(sigma, delta, floor);
    let penalty = |p: &MixedProfile| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            let u = g.utilities(p, i);
            let r = orders[i].ranks();
            let s = p.player(i);
            for a in 0..u.len() {
                for b in 0..u.len() {
                    if r[a] > r[b] {
                        acc += hinge(u[b] - u[a]);
                        acc += hinge(s[b] - eps * s[a]) / (eps * eps);
                    } else if r[a] == r[b] && a < b {
                        acc += (u[a] - u[b]).powi(2);
                    }
                }
            }
        }
        acc
    };
    match minimize(penalty, &bounds, &[sigma.clone()], 32, 0x85eb_ca6b, 300) {
        Some((tau, _)) if accept(g, sigma, &tau, delta, |t| is_epsilon_proper(g, t, eps, WITNESS_TOL)) => {
            Stage::Witness(tau)
        }
        _ => Stage::Unresolved("penalty search found no witness".into()),
    }
}

/// Undominated flags for an equilibrium set.
#[derive(Debug, Clone, PartialEq)]
pub struct UndominatedReport {
    pub isolated: Vec<bool>,
    /// For each component, the face on which no weakly dominated action is
    /// played, if nonempty.
    pub components: Vec<Option<NashComponent>>,
}

/// True when no player puts positive probability on a weakly dominated action.
pub fn is_undominated(report: &DominanceReport, sigma: &MixedProfile) -> bool {
    (0..sigma.num_players()).all(|i| {
        sigma
            .player(i)
            .iter()
            .enumerate()
            .all(|(a, &x)| x == 0.0 || !report.is_dominated(i, a))
    })
}

pub fn filter_undominated(g: &Game, e: &EquilibriumSet) -> UndominatedReport {
    let report = weak_dominance(g);
    let isolated = e.isolated.iter().map(|p| is_undominated(&report, p)).collect();
    let components = e
        .components
        .iter()
        .map(|c| {
            let vertices: Vec<Vec<Vec<f64>>> = c
                .vertices
                .iter()
                .enumerate()
                .map(|(i, vs)| {
                    vs.iter()
                        .filter(|v| v.iter().enumerate().all(|(a, &x)| x == 0.0 || !report.is_dominated(i, a)))
                        .cloned()
                        .collect()
                })
                .collect();
            if vertices.iter().all(|v: &Vec<Vec<f64>>| !v.is_empty()) {
                Some(NashComponent { vertices })
            } else {
                None
            }
        })
        .collect();
    UndominatedReport { isolated, components }
}

/// All three refinement flags for one equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementTag {
    pub undominated: bool,
    pub perfect: RefinementVerdict,
    pub proper: RefinementVerdict,
}

pub fn classify(g: &Game, sigma: &MixedProfile, schedule: &[f64]) -> Result<RefinementTag> {
    let report = weak_dominance(g);
    Ok(RefinementTag {
        undominated: is_undominated(&report, sigma),
        perfect: check_perfect(g, sigma, schedule)?,
        proper: check_proper(g, sigma, schedule)?,
    })
}
