//! Empirical equilibrium membership.
//!
//! A Nash equilibrium is empirical when it is a limit of weakly payoff
//! monotone profiles, equivalently of interior payoff-monotone ones. With
//! `m < 1` the weaker `m`-monotonicity is used instead.
//!
//! For one or two players membership is decided exactly. A payoff-monotone
//! profile near `σ` fixes a weak order per player that its probabilities
//! and utilities both realize. Since each player's utilities depend only on
//! the other player's strategy, each order pair gives two independent
//! linear programs, one per player. Closure forces `σ` to realize the same
//! orders weakly, so only those pairs are tried. A feasible pair yields a
//! direction `s` such that every point strictly between `σ` and `s` is a
//! witness. If no pair is feasible, no such sequence exists.

use crate::error::{Error, Result};
use crate::game::{nash_defect_unchecked, weak_dominance, Game, MixedProfile};
use crate::lp::Lp;
use crate::monotone::{is_m_weakly_payoff_monotone, is_payoff_monotone, is_weakly_payoff_monotone, DEFAULT_TOL};
use crate::nash::{enumerate_nash, EquilibriumSet, NashComponent, NASH_TOL};
use crate::orders::{all_weak_orders, WeakOrder};
use crate::qre::{default_lambda_schedule, perturbed_monotone_point, trace_logit_path};
use crate::search::{minimize, Bounds};

pub const DEFAULT_DELTA_SCHEDULE: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Grid size along each component.
pub const COMPONENT_GRID: usize = 101;

/// Slack below which a linear program counts as infeasible.
const SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Member,
    NonMember,
    Inconclusive,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Member => "member",
            Decision::NonMember => "non-member",
            Decision::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipWitness {
    pub delta: f64,
    pub profile: MixedProfile,
}

/// Why a candidate cannot be approximated.
#[derive(Debug, Clone, PartialEq)]
pub enum Refutation {
    /// `dominating` weakly dominates `dominated`, so every `m`-weakly
    /// monotone profile has `σ(dominating) >= m σ(dominated)`; the candidate
    /// breaks this.
    Dominance {
        player: usize,
        dominating: usize,
        dominated: usize,
        m: f64,
    },
    /// No pair of weak orders consistent with the candidate admits
    /// monotone profiles nearby.
    OrderExhaustion { pairs_checked: usize, m: f64 },
}

impl Refutation {
    /// Does `τ` satisfy the inequality this certificate says is forced?
    /// Always true for order exhaustion, which forces nothing pointwise.
    pub fn forced_inequality_holds(&self, tau: &MixedProfile, tol: f64) -> bool {
        match *self {
            Refutation::Dominance {
                player,
                dominating,
                dominated,
                m,
            } => {
                let (a, b) = (tau.prob(player, dominating), tau.prob(player, dominated));
                a - m * b >= -tol * a.max(b)
            }
            Refutation::OrderExhaustion { .. } => true,
        }
    }

    /// Re-checks the certificate against the game and candidate.
    pub fn reverify(&self, g: &Game, sigma: &MixedProfile) -> Result<bool> {
        g.check_profile(sigma)?;
        match *self {
            Refutation::Dominance {
                player,
                dominating,
                dominated,
                ..
            } => {
                g.check_player(player)?;
                let report = weak_dominance(g);
                Ok(report.dominates(player, dominating, dominated)
                    && !self.forced_inequality_holds(sigma, DEFAULT_TOL))
            }
            Refutation::OrderExhaustion { m, .. } => {
                if g.num_players() > 2 {
                    return Ok(false);
                }
                Ok(exact_direction(g, sigma, m).0.is_none())
            }
        }
    }

    pub fn describe(&self, g: &Game) -> String {
        match *self {
            Refutation::Dominance {
                player,
                dominating,
                dominated,
                m,
            } => {
                let p = &g.players()[player];
                let (a, b) = (&g.actions(player)[dominating], &g.actions(player)[dominated]);
                if m == 1.0 {
                    format!("{} weakly dominates {} for {}, forcing sigma({}) >= sigma({})", a, b, p, a, b)
                } else {
                    format!(
                        "{} weakly dominates {} for {}, forcing sigma({}) >= {} * sigma({})",
                        a, b, p, a, m, b
                    )
                }
            }
            Refutation::OrderExhaustion { pairs_checked, .. } => format!(
                "none of the {} weak-order pairs consistent with the candidate admits nearby monotone profiles",
                pairs_checked
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVerdict {
    pub decision: Decision,
    pub m: f64,
    /// One witness per scheduled `δ` reached, in schedule order.
    pub witnesses: Vec<MembershipWitness>,
    pub refutation: Option<Refutation>,
    /// The weak orders realized by the witnesses, when found exactly.
    pub orders: Option<Vec<WeakOrder>>,
    pub diagnostics: Vec<String>,
}

impl MembershipVerdict {
    fn refuted(m: f64, r: Refutation) -> Self {
        MembershipVerdict {
            decision: Decision::NonMember,
            m,
            witnesses: vec![],
            refutation: Some(r),
            orders: None,
            diagnostics: vec![],
        }
    }
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty delta schedule".into()));
    }
    if schedule.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
        return Err(Error::InvalidArgument("delta values must lie in (0, 1]".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("delta schedule must be decreasing".into()));
    }
    Ok(())
}

/// Decides whether the Nash equilibrium `σ` is an (`m`-)empirical
/// equilibrium, producing one witness per `δ` or a certificate.
pub fn empirical_membership(g: &Game, sigma: &MixedProfile, schedule: &[f64], m: f64) -> Result<MembershipVerdict> {
    validate_schedule(schedule)?;
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::InvalidArgument(format!("m must lie in [0, 1], got {}", m)));
    }
    g.check_profile(sigma)?;
    let d = nash_defect_unchecked(g, sigma);
    if d > NASH_TOL {
        return Err(Error::NotNash { defect: d });
    }
    if let Some(r) = dominance_refutation(g, sigma, m) {
        return Ok(MembershipVerdict::refuted(m, r));
    }
    if g.num_players() <= 2 {
        let (dir, pairs) = exact_direction(g, sigma, m);
        let Some((s, orders, slack)) = dir else {
            return Ok(MembershipVerdict::refuted(m, Refutation::OrderExhaustion { pairs_checked: pairs, m }));
        };
        let mut witnesses = Vec::new();
        let mut diagnostics = vec![format!("{} order pairs tried, slack {:e}", pairs, slack)];
        for &delta in schedule {
            match segment_witness(g, sigma, &s, delta, m) {
                Some(p) => witnesses.push(MembershipWitness { delta, profile: p }),
                None => diagnostics.push(format!("witness at delta {} failed validation", delta)),
            }
        }
        let decision = if witnesses.len() == schedule.len() {
            Decision::Member
        } else {
            Decision::Inconclusive
        };
        return Ok(MembershipVerdict {
            decision,
            m,
            witnesses,
            refutation: None,
            orders: Some(orders),
            diagnostics,
        });
    }
    Ok(search_membership(g, sigma, schedule, m))
}

fn dominance_refutation(g: &Game, sigma: &MixedProfile, m: f64) -> Option<Refutation> {
    let report = weak_dominance(g);
    for (player, list) in report.per_player.iter().enumerate() {
        for d in list {
            let r = Refutation::Dominance {
                player,
                dominating: d.dominating,
                dominated: d.dominated,
                m,
            };
            if !r.forced_inequality_holds(sigma, DEFAULT_TOL) {
                return Some(r);
            }
        }
    }
    None
}

fn ge_tol(a: f64, b: f64) -> bool {
    a - b >= -DEFAULT_TOL * a.abs().max(b.abs()).max(1.0)
}

fn eq_tol(a: f64, b: f64) -> bool {
    ge_tol(a, b) && ge_tol(b, a)
}

/// `v` weakly realizes `r`: higher classes are at least as large, and
/// equal classes are equal.
fn weakly_realizes(v: &[f64], r: &WeakOrder) -> bool {
    let rk = r.ranks();
    (0..v.len()).all(|a| {
        (0..v.len()).all(|b| match rk[a].cmp(&rk[b]) {
            std::cmp::Ordering::Greater => ge_tol(v[a], v[b]),
            std::cmp::Ordering::Equal => eq_tol(v[a], v[b]),
            std::cmp::Ordering::Less => true,
        })
    })
}

fn m_consistent(v: &[f64], r: &WeakOrder, m: f64) -> bool {
    let rk = r.ranks();
    (0..v.len()).all(|a| (0..v.len()).all(|b| rk[a] < rk[b] || ge_tol(v[a], m * v[b])))
}

/// Searches order pairs for a direction `s` from `σ`. Returns the
/// direction with the largest slack, its orders and slack, and the number
/// of pairs that passed the closure filters.
fn exact_direction(g: &Game, sigma: &MixedProfile, m: f64) -> (Option<(MixedProfile, Vec<WeakOrder>, f64)>, usize) {
    let n = g.num_players();
    let utilities: Vec<Vec<f64>> = (0..n).map(|i| g.utilities(sigma, i)).collect();
    let candidates: Vec<Vec<WeakOrder>> = (0..n)
        .map(|i| {
            all_weak_orders(g.num_actions(i))
                .into_iter()
                .filter(|r| {
                    weakly_realizes(&utilities[i], r)
                        && if m == 1.0 {
                            weakly_realizes(sigma.player(i), r)
                        } else {
                            m_consistent(sigma.player(i), r, m)
                        }
                })
                .collect()
        })
        .collect();
    let mut best: Option<(MixedProfile, Vec<WeakOrder>, f64)> = None;
    let mut pairs = 0;
    let combos: Vec<Vec<&WeakOrder>> = match n {
        1 => candidates[0].iter().map(|r| vec![r]).collect(),
        _ => candidates[0]
            .iter()
            .flat_map(|r1| candidates[1].iter().map(move |r2| vec![r1, r2]))
            .collect(),
    };
    for orders in combos {
        pairs += 1;
        let mut parts = Vec::with_capacity(n);
        let mut slack = f64::INFINITY;
        for i in 0..n {
            let opp = if n == 2 { Some((g.own_matrix(1 - i), orders[1 - i])) } else { None };
            match player_lp(g.num_actions(i), orders[i], opp.as_ref().map(|(c, r)| (c, *r)), m) {
                Some((x, t)) => {
                    parts.push(x);
                    slack = slack.min(t);
                }
                None => break,
            }
        }
        if parts.len() == n && best.as_ref().is_none_or(|b| slack > b.2) {
            best = Some((
                MixedProfile::from_raw(parts),
                orders.into_iter().cloned().collect(),
                slack,
            ));
        }
    }
    (best, pairs)
}

/// Linear program for one player's strategy: the own order constraints of
/// `r` and, with an opponent, the opponent's utility order `r_opp` strictly
/// realized. `coef[b][a]` is the opponent's payoff from `b` when this
/// player plays `a`.
fn player_lp(k: usize, r: &WeakOrder, opp: Option<(&Vec<Vec<f64>>, &WeakOrder)>, m: f64) -> Option<(Vec<f64>, f64)> {
    let mut lp = Lp::maximize();
    let t = lp.var(1.0, f64::NEG_INFINITY, 1.0);
    let x: Vec<usize> = (0..k).map(|_| lp.var(0.0, 0.0, 1.0)).collect();
    lp.eq(&x.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(), 1.0);
    let classes = r.classes();
    if m == 1.0 {
        for &v in &x {
            lp.ge(&[(v, 1.0), (t, -1.0)], 0.0);
        }
        chain(&mut lp, &classes, t, |a| vec![(x[a], 1.0)]);
    } else {
        let rk = r.ranks();
        for a in 0..k {
            for b in 0..k {
                if a != b && rk[a] >= rk[b] {
                    lp.ge(&[(x[a], 1.0), (x[b], -m)], 0.0);
                }
            }
        }
    }
    if let Some((coef, ro)) = opp {
        let utility = |b: usize| -> Vec<(usize, f64)> { (0..k).map(|a| (x[a], coef[b][a])).collect() };
        chain(&mut lp, &ro.classes(), t, utility);
    }
    let sol = lp.solve()?;
    if sol.objective <= SLACK_TOL {
        return None;
    }
    let v: Vec<f64> = x.iter().map(|&i| sol.values[i].max(0.0)).collect();
    let s: f64 = v.iter().sum();
    Some((v.into_iter().map(|p| p / s).collect(), sol.objective))
}

/// Equal values within classes and a gap of at least `t` between
/// consecutive classes, for the linear form `value(a)`.
fn chain<F>(lp: &mut Lp, classes: &[Vec<usize>], t: usize, value: F)
where
    F: Fn(usize) -> Vec<(usize, f64)>,
{
    let neg = |terms: Vec<(usize, f64)>| -> Vec<(usize, f64)> { terms.into_iter().map(|(v, c)| (v, -c)).collect() };
    for class in classes {
        for w in class.windows(2) {
            let mut terms = value(w[0]);
            terms.extend(neg(value(w[1])));
            lp.eq(&terms, 0.0);
        }
    }
    for w in classes.windows(2) {
        let mut terms = value(w[1][0]);
        terms.extend(neg(value(w[0][0])));
        terms.push((t, -1.0));
        lp.ge(&terms, 0.0);
    }
}

/// Point on the segment from `σ` to `s` at max-norm distance `δ` (or `s`
/// itself if closer), checked against the target property.
fn segment_witness(g: &Game, sigma: &MixedProfile, s: &MixedProfile, delta: f64, m: f64) -> Option<MixedProfile> {
    let dist = s.distance(sigma);
    // a hair inside the ball so rounding cannot push it out
    let theta = if dist > 0.0 { (delta * (1.0 - 1e-6) / dist).min(1.0) } else { 1.0 };
    let probs: Vec<Vec<f64>> = sigma
        .as_vecs()
        .iter()
        .zip(s.as_vecs())
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (1.0 - theta) * x + theta * y).collect())
        .collect();
    let p = MixedProfile::from_raw(probs);
    valid_witness(g, sigma, &p, delta, m).then_some(p)
}

fn valid_witness(g: &Game, sigma: &MixedProfile, p: &MixedProfile, delta: f64, m: f64) -> bool {
    if p.distance(sigma) > delta {
        return false;
    }
    if m == 1.0 {
        p.is_interior() && is_payoff_monotone(g, p, DEFAULT_TOL).is_ok_and(|v| v.satisfied)
    } else {
        is_m_weakly_payoff_monotone(g, p, m, DEFAULT_TOL).is_ok_and(|v| v.satisfied)
    }
}

/// Penalty for breaking weak (`m = 1`) or `m`-weak monotonicity.
fn monotonicity_penalty(g: &Game, p: &MixedProfile, m: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..g.num_players() {
        let u = g.utilities(p, i);
        let s = p.player(i);
        for a in 0..u.len() {
            for b in 0..u.len() {
                if a == b {
                    continue;
                }
                let gap = if m == 1.0 {
                    if u[a] <= u[b] {
                        s[a] - s[b]
                    } else {
                        0.0
                    }
                } else if u[a] >= u[b] {
                    m * s[b] - s[a]
                } else {
                    0.0
                };
                if gap > 0.0 {
                    total += gap * gap;
                }
            }
        }
    }
    total
}

/// Witness search for games with more than two players: find a weakly
/// monotone profile near `σ`, then move it into the interior with the
/// logit perturbation.
fn search_membership(g: &Game, sigma: &MixedProfile, schedule: &[f64], m: f64) -> MembershipVerdict {
    let mut witnesses = Vec::new();
    let mut diagnostics = vec!["more than two players: witness search only".to_string()];
    for (k, &delta) in schedule.iter().enumerate() {
        let bounds = Bounds::around(sigma, 0.5 * delta, 0.0);
        let found = minimize(|p| monotonicity_penalty(g, p, m), &bounds, &[sigma.clone()], 32, 7 + k as u64, 400);
        let mut done = false;
        if let Some((tau, pen)) = found {
            let weak = if m == 1.0 {
                is_weakly_payoff_monotone(g, &tau, DEFAULT_TOL)
            } else {
                is_m_weakly_payoff_monotone(g, &tau, m, DEFAULT_TOL)
            };
            if pen == 0.0 && weak.is_ok_and(|v| v.satisfied) {
                if m < 1.0 && valid_witness(g, sigma, &tau, delta, m) {
                    witnesses.push(MembershipWitness { delta, profile: tau });
                    done = true;
                } else {
                    for zeta in [0.25 * delta, 0.025 * delta, 0.0025 * delta] {
                        if let Ok(pp) = perturbed_monotone_point(g, &tau, zeta, 1.0) {
                            if valid_witness(g, sigma, &pp.profile, delta, 1.0) {
                                witnesses.push(MembershipWitness {
                                    delta,
                                    profile: pp.profile,
                                });
                                done = true;
                                break;
                            }
                        }
                    }
                }
            }
        }
        if !done {
            diagnostics.push(format!("no witness found at delta {}", delta));
            break;
        }
    }
    MembershipVerdict {
        decision: if witnesses.len() == schedule.len() {
            Decision::Member
        } else {
            Decision::Inconclusive
        },
        m,
        witnesses,
        refutation: None,
        orders: None,
        diagnostics,
    }
}

/// A maximal run of member grid points on a one-parameter component,
/// with endpoints refined by bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberInterval {
    /// Parameter range in `[0, 1]` along the component.
    pub lo: f64,
    pub hi: f64,
    pub lo_profile: MixedProfile,
    pub hi_profile: MixedProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    /// Parameter along a one-parameter component; `None` otherwise.
    pub parameter: Option<f64>,
    pub profile: MixedProfile,
    pub verdict: MembershipVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMembership {
    pub component: NashComponent,
    pub grid: Vec<GridPoint>,
    /// Member intervals; empty for components with more than one parameter.
    pub intervals: Vec<MemberInterval>,
}

impl ComponentMembership {
    pub fn member_count(&self) -> usize {
        self.grid.iter().filter(|p| p.verdict.decision == Decision::Member).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalReport {
    pub nash: EquilibriumSet,
    pub isolated: Vec<MembershipVerdict>,
    pub components: Vec<ComponentMembership>,
}

impl EmpiricalReport {
    /// Isolated members followed by sampled component members.
    pub fn members(&self) -> Vec<&MixedProfile> {
        let iso = self
            .nash
            .isolated
            .iter()
            .zip(&self.isolated)
            .filter(|(_, v)| v.decision == Decision::Member)
            .map(|(p, _)| p);
        let comp = self
            .components
            .iter()
            .flat_map(|c| c.grid.iter())
            .filter(|p| p.verdict.decision == Decision::Member)
            .map(|p| &p.profile);
        iso.chain(comp).collect()
    }
}

const BISECTION_STEPS: usize = 30;

/// Runs membership on every equilibrium and on a grid over each component.
pub fn enumerate_empirical(g: &Game, schedule: &[f64], m: f64) -> Result<EmpiricalReport> {
    validate_schedule(schedule)?;
    let nash = enumerate_nash(g)?;
    let isolated = nash
        .isolated
        .iter()
        .map(|p| empirical_membership(g, p, schedule, m))
        .collect::<Result<Vec<_>>>()?;
    let mut components = Vec::new();
    for c in &nash.components {
        let one = c.segment_player().is_some();
        let grid: Vec<GridPoint> = c
            .grid(COMPONENT_GRID)
            .into_iter()
            .enumerate()
            .map(|(k, profile)| {
                let verdict = empirical_membership(g, &profile, schedule, m)?;
                Ok(GridPoint {
                    parameter: one.then(|| k as f64 / (COMPONENT_GRID - 1) as f64),
                    profile,
                    verdict,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let intervals = if one { member_intervals(g, c, &grid, schedule, m)? } else { vec![] };
        components.push(ComponentMembership {
            component: c.clone(),
            grid,
            intervals,
        });
    }
    Ok(EmpiricalReport {
        nash,
        isolated,
        components,
    })
}

fn member_intervals(
    g: &Game,
    c: &NashComponent,
    grid: &[GridPoint],
    schedule: &[f64],
    m: f64,
) -> Result<Vec<MemberInterval>> {
    let is_member = |t: f64| -> Result<bool> {
        let p = c.segment_point(t).expect("one-parameter component");
        Ok(empirical_membership(g, &p, schedule, m)?.decision == Decision::Member)
    };
    let refine = |inside: f64, outside: f64| -> Result<f64> {
        let (mut a, mut b) = (inside, outside);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (a + b);
            if is_member(mid)? {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(a)
    };
    let member: Vec<bool> = grid.iter().map(|p| p.verdict.decision == Decision::Member).collect();
    let param = |k: usize| grid[k].parameter.expect("one-parameter component");
    let mut out = Vec::new();
    let mut k = 0;
    while k < member.len() {
        if !member[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < member.len() && member[k + 1] {
            k += 1;
        }
        let lo = if start == 0 { param(0) } else { refine(param(start), param(start - 1))? };
        let hi = if k + 1 == member.len() { param(k) } else { refine(param(k), param(k + 1))? };
        out.push(MemberInterval {
            lo,
            hi,
            lo_profile: c.segment_point(lo).expect("segment"),
            hi_profile: c.segment_point(hi).expect("segment"),
        });
        k += 1;
    }
    Ok(out)
}

/// The equilibrium nearest the end of the logit path, with its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub equilibrium: MixedProfile,
    /// Max-norm distance from the path's last point.
    pub distance: f64,
    pub verdict: MembershipVerdict,
}

/// Follows the logit path to large `λ` and tests the nearest equilibrium.
pub fn nonemptiness_probe(g: &Game) -> Result<Probe> {
    let start = MixedProfile::uniform(&g.action_counts());
    let path = trace_logit_path(g, &default_lambda_schedule(1e3), &start)?;
    let (equilibrium, distance) = path
        .nearest_nash
        .clone()
        .ok_or_else(|| Error::Unsupported("no equilibrium set for this game".into()))?;
    let verdict = empirical_membership(g, &equilibrium, &DEFAULT_DELTA_SCHEDULE, 1.0)?;
    Ok(Probe {
        equilibrium,
        distance,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn pure(g: &Game, p: &[usize]) -> MixedProfile {
        MixedProfile::pure(&g.action_counts(), p)
    }

    #[test]
    fn gamma1_verdicts() {
        let g = corpus::gamma1();
        let v = empirical_membership(&g, &pure(&g, &[0, 0]), &DEFAULT_DELTA_SCHEDULE, 1.0).unwrap();
        assert_eq!(v.decision, Decision::Member, "{:?}", v);
        assert_eq!(v.witnesses.len(), 4);
        let v = empirical_membership(&g, &pure(&g, &[1, 1]), &DEFAULT_DELTA_SCHEDULE, 1.0).unwrap();
        assert_eq!(v.decision, Decision::NonMember);
        assert!(matches!(
            v.refutation,
            Some(Refutation::Dominance {
                player: 0,
                dominating: 0,
                dominated: 1,
                ..
            })
        ));
        assert!(v.refutation.unwrap().reverify(&g, &pure(&g, &[1, 1])).unwrap());
    }

    #[test]
    fn rejects_non_nash() {
        let g = corpus::gamma1();
        let e = empirical_membership(&g, &pure(&g, &[0, 1]), &DEFAULT_DELTA_SCHEDULE, 1.0).unwrap_err();
        assert!(matches!(e, Error::NotNash { .. }));
    }

    #[test]
    fn one_by_one_is_member() {
        let g = Game::new(vec!["P".into(), "Q".into()], vec![vec!["x".into()], vec!["y".into()]], vec![0.0, 0.0]).unwrap();
        let v = empirical_membership(&g, &pure(&g, &[0, 0]), &DEFAULT_DELTA_SCHEDULE, 1.0).unwrap();
        assert_eq!(v.decision, Decision::Member);
    }
}
