//! Spline control costs, control-cost games and their induced response
//! functions.
//!
//! A spline is convex and decreasing on `(0, 1]` with `f(1) = 0`. It is a
//! hyperbola on `(0, y_0)` and a quadratic between consecutive breakpoints,
//! with first derivative continuous everywhere. Breakpoint slopes are chosen
//! so that a given interior payoff-monotone strategy satisfies the
//! first-order conditions of the control-cost game.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{nash_defect_unchecked, Game, MixedProfile};
use crate::monotone::{is_payoff_monotone, DEFAULT_TOL};

/// Probabilities within this relative distance share a level.
pub const LEVEL_TOL: f64 = 1e-12;

fn same_level(p: f64, q: f64) -> bool {
    (p - q).abs() <= LEVEL_TOL * p.max(q)
}

/// Equal-probability actions may differ in utility by at most this much.
pub const UTILITY_TOL: f64 = 1e-9;

/// Threshold on the first-order-condition defect of an equilibrium.
pub const FOC_TOL: f64 = 1e-9;

/// Grid used for sup-norm reporting.
pub fn sup_norm_grid() -> Vec<f64> {
    (1..=100).map(|k| k as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlCostSpline {
    /// `y_0 < ... < 1`, including the calibration point if any.
    breakpoints: Vec<f64>,
    /// `f'` at each breakpoint; strictly increasing, last entry 0.
    slopes: Vec<f64>,
    /// `f` at each breakpoint; last entry 0.
    values: Vec<f64>,
    /// Coefficient `c` of the tail `f(y) = f(y_0) - c / y_0 + c / y`.
    tail_coefficient: f64,
    epsilon: f64,
    calibration_point: Option<f64>,
    /// Probability levels and their utilities from the construction.
    levels: Vec<f64>,
    level_utilities: Vec<f64>,
}

struct Levels {
    probs: Vec<f64>,
    utils: Vec<f64>,
}

fn group_levels(sigma: &[f64], u: &[f64]) -> Result<Levels> {
    let mut idx: Vec<usize> = (0..sigma.len()).collect();
    idx.sort_by(|&a, &b| sigma[a].total_cmp(&sigma[b]).then(u[a].total_cmp(&u[b])));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &a in &idx {
        match groups.last_mut() {
            Some(g) if same_level(sigma[a], sigma[g[0]]) => g.push(a),
            _ => groups.push(vec![a]),
        }
    }
    let mut probs = Vec::new();
    let mut utils = Vec::new();
    for g in &groups {
        let lo = g.iter().map(|&a| u[a]).fold(f64::INFINITY, f64::min);
        let hi = g.iter().map(|&a| u[a]).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > UTILITY_TOL * hi.abs().max(1.0) {
            return Err(Error::NotMonotone {
                property: "payoff monotone",
                detail: format!(
                    "actions with probability {} have utilities {} and {}",
                    sigma[g[0]], lo, hi
                ),
            });
        }
        probs.push(g.iter().map(|&a| sigma[a]).sum::<f64>() / g.len() as f64);
        utils.push(g.iter().map(|&a| u[a]).sum::<f64>() / g.len() as f64);
    }
    for l in 1..utils.len() {
        if utils[l] - utils[l - 1] <= UTILITY_TOL * utils[l].abs().max(1.0) {
            return Err(Error::NotMonotone {
                property: "payoff monotone",
                detail: format!(
                    "probability {} exceeds {} but utility {} does not exceed {}",
                    probs[l],
                    probs[l - 1],
                    utils[l],
                    utils[l - 1]
                ),
            });
        }
    }
    Ok(Levels { probs, utils })
}

/// Builds the spline for one player from an interior payoff-monotone
/// strategy `sigma` and the matching utilities `u`.
///
/// With `y_star`, an extra knot is placed there with a slope chosen so that
/// `f(y_star) < f(y_next) + ε`, where `y_next` is the first breakpoint above
/// `y_star`.
pub fn build_spline(sigma: &[f64], u: &[f64], epsilon: f64, y0: f64, y_star: Option<f64>) -> Result<ControlCostSpline> {
    build(sigma, u, epsilon, y0, y_star.map(|y| (y, None)))
}

/// Like [`build_spline`] with an explicit slope at the extra knot. The slope
/// must lie strictly between the slopes of the neighbouring breakpoints; no
/// bound on `f(y_star)` is enforced.
pub fn build_spline_with_knot(
    sigma: &[f64],
    u: &[f64],
    epsilon: f64,
    y0: f64,
    knot: (f64, f64),
) -> Result<ControlCostSpline> {
    build(sigma, u, epsilon, y0, Some((knot.0, Some(knot.1))))
}

fn build(
    sigma: &[f64],
    u: &[f64],
    epsilon: f64,
    y0: f64,
    knot: Option<(f64, Option<f64>)>,
) -> Result<ControlCostSpline> {
    if sigma.is_empty() || sigma.len() != u.len() {
        return Err(Error::Spline(format!(
            "{} probabilities for {} utilities",
            sigma.len(),
            u.len()
        )));
    }
    if sigma.iter().chain(u).any(|x| !x.is_finite()) {
        return Err(Error::Spline("inputs must be finite".into()));
    }
    if sigma.iter().any(|&x| x <= 0.0) || (sigma.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Spline("strategy must be interior and sum to one".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Spline(format!("epsilon must be positive, got {}", epsilon)));
    }
    let min_sigma = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    if !(y0 > 0.0 && y0 < min_sigma) {
        return Err(Error::Spline(format!(
            "y0 = {} must lie in (0, {}) (the smallest probability)",
            y0, min_sigma
        )));
    }
    let levels = if sigma.len() == 1 {
        Levels {
            probs: vec![],
            utils: vec![],
        }
    } else {
        group_levels(sigma, u)?
    };
    if levels.probs.last().is_some_and(|&y| y >= 1.0) {
        return Err(Error::Spline(
            "top probability level is indistinguishable from 1".into(),
        ));
    }
    let l = levels.probs.len();
    let mut slopes = vec![0.0; l + 2];
    if l > 0 {
        slopes[l] = -epsilon;
        for k in (1..l).rev() {
            slopes[k] = slopes[k + 1] - (levels.utils[k] - levels.utils[k - 1]);
        }
        slopes[0] = slopes[1] - epsilon;
    } else {
        slopes[0] = -epsilon;
    }
    if l == 0 {
        slopes.truncate(2);
    }
    let mut breakpoints = vec![y0];
    breakpoints.extend(&levels.probs);
    breakpoints.push(1.0);
    let mut calibration_point = None;
    if let Some((y_star, slope)) = knot {
        if !(y_star > y0 && y_star < 1.0) {
            return Err(Error::Spline(format!(
                "calibration point {} must lie in (y0, 1) = ({}, 1)",
                y_star, y0
            )));
        }
        if levels.probs.iter().any(|&y| same_level(y, y_star)) {
            return Err(Error::Spline(format!(
                "calibration point {} collides with a probability level",
                y_star
            )));
        }
        let j = breakpoints.iter().rposition(|&y| y < y_star).expect("y_star > y0");
        let (s_lo, s_hi) = (slopes[j], slopes[j + 1]);
        let h = breakpoints[j + 1] - y_star;
        let s = match slope {
            Some(s) => {
                if !(s > s_lo && s < s_hi) {
                    return Err(Error::Spline(format!(
                        "knot slope {} must lie strictly between {} and {}",
                        s, s_lo, s_hi
                    )));
                }
                s
            }
            None => {
                let kappa_max = 2.0 * (epsilon / h + s_hi);
                if kappa_max <= 0.0 {
                    return Err(Error::CalibrationUnattainable {
                        point: y_star,
                        detail: format!(
                            "slope {} at the next breakpoint {} is too steep for epsilon {}",
                            s_hi,
                            breakpoints[j + 1],
                            epsilon
                        ),
                    });
                }
                s_hi - 0.5 * kappa_max.min(s_hi - s_lo)
            }
        };
        breakpoints.insert(j + 1, y_star);
        slopes.insert(j + 1, s);
        calibration_point = Some(y_star);
    }
    let mut values = vec![0.0; breakpoints.len()];
    for k in (0..breakpoints.len() - 1).rev() {
        let h = breakpoints[k + 1] - breakpoints[k];
        values[k] = values[k + 1] - h * (slopes[k] + slopes[k + 1]) / 2.0;
    }
    let spline = ControlCostSpline {
        tail_coefficient: -slopes[0] * y0 * y0,
        breakpoints,
        slopes,
        values,
        epsilon,
        calibration_point,
        levels: levels.probs,
        level_utilities: levels.utils,
    };
    if let (Some(y), Some((_, None))) = (calibration_point, knot) {
        let j = spline.breakpoints.iter().position(|&b| b == y).expect("inserted");
        let gap = spline.values[j] - spline.values[j + 1];
        if !(gap < epsilon) {
            return Err(Error::CalibrationUnattainable {
                point: y,
                detail: format!("f rises by {} above the next breakpoint", gap),
            });
        }
    }
    spline.validate()?;
    Ok(spline)
}

impl ControlCostSpline {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn y0(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn tail_coefficient(&self) -> f64 {
        self.tail_coefficient
    }

    pub fn calibration_point(&self) -> Option<f64> {
        self.calibration_point
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level_utilities(&self) -> &[f64] {
        &self.level_utilities
    }

    /// Checks structural invariants: increasing breakpoints ending at 1,
    /// strictly increasing slopes ending at 0, values consistent with the
    /// slopes, and a positive tail coefficient.
    pub fn validate(&self) -> Result<()> {
        let k = self.breakpoints.len();
        if k < 2 || self.slopes.len() != k || self.values.len() != k {
            return Err(Error::Spline("breakpoints, slopes and values must align".into()));
        }
        if self.breakpoints[0] <= 0.0 || self.breakpoints[k - 1] != 1.0 {
            return Err(Error::Spline("breakpoints must start above 0 and end at 1".into()));
        }
        if self.breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Spline("breakpoints must be strictly increasing".into()));
        }
        if self.slopes.windows(2).any(|w| w[1] <= w[0]) || self.slopes[k - 1] != 0.0 {
            return Err(Error::Spline("slopes must increase strictly to 0".into()));
        }
        if self.values[k - 1] != 0.0 {
            return Err(Error::Spline("f(1) must be 0".into()));
        }
        for j in (0..k - 1).rev() {
            let h = self.breakpoints[j + 1] - self.breakpoints[j];
            let expect = self.values[j + 1] - h * (self.slopes[j] + self.slopes[j + 1]) / 2.0;
            if (expect - self.values[j]).abs() > 1e-9 * expect.abs().max(1.0) {
                return Err(Error::Spline(format!("value at breakpoint {} is inconsistent", j)));
            }
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Spline("epsilon must be positive".into()));
        }
        let tail = -self.slopes[0] * self.breakpoints[0] * self.breakpoints[0];
        if self.tail_coefficient < 0.0 || (tail - self.tail_coefficient).abs() > 1e-12 * tail.abs() {
            return Err(Error::Spline("tail coefficient does not match the first slope".into()));
        }
        Ok(())
    }

    fn segment(&self, y: f64) -> usize {
        match self.breakpoints.iter().rposition(|&b| b <= y) {
            Some(j) if j + 1 < self.breakpoints.len() => j,
            Some(j) => j - 1,
            None => 0,
        }
    }

    /// `f(y)`; `+inf` for `y <= 0`. Arguments above 1 are clamped.
    pub fn value(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return f64::INFINITY;
        }
        let y = y.min(1.0);
        let y0 = self.breakpoints[0];
        if y < y0 {
            return self.values[0] - self.slopes[0] * y0 * (y0 / y - 1.0);
        }
        let j = self.segment(y);
        let (ya, yb) = (self.breakpoints[j], self.breakpoints[j + 1]);
        let (sa, sb) = (self.slopes[j], self.slopes[j + 1]);
        let d = y - yb;
        self.values[j + 1] + sb * d + (sb - sa) / (2.0 * (yb - ya)) * d * d
    }

    /// `f'(y)`; `-inf` for `y <= 0`. Arguments above 1 are clamped.
    pub fn derivative(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let y = y.min(1.0);
        let y0 = self.breakpoints[0];
        if y < y0 {
            let r = y0 / y;
            return self.slopes[0] * r * r;
        }
        self.piece_derivative(self.segment(y), y)
    }

    /// `|f'(y-) - f'(y+)|` at each breakpoint below 1, from the formulas of
    /// the two adjacent pieces (the tail counts as the piece below `y_0`).
    pub fn derivative_jumps(&self) -> Vec<f64> {
        let k = self.breakpoints.len();
        (0..k - 1)
            .map(|j| {
                let y = self.breakpoints[j];
                let right = self.piece_derivative(j, y);
                let left = if j == 0 { self.slopes[0] } else { self.piece_derivative(j - 1, y) };
                (left - right).abs()
            })
            .collect()
    }

    fn piece_derivative(&self, j: usize, y: f64) -> f64 {
        let (ya, yb) = (self.breakpoints[j], self.breakpoints[j + 1]);
        let (sa, sb) = (self.slopes[j], self.slopes[j + 1]);
        sb + (sb - sa) * (y - yb) / (yb - ya)
    }

    /// Inverse of `f'`: the `y` in `(0, 1]` with `f'(y) = s`, and 1 for `s >= 0`.
    pub fn inverse_derivative(&self, s: f64) -> f64 {
        if s >= 0.0 {
            return 1.0;
        }
        if s <= self.slopes[0] {
            return self.breakpoints[0] * (self.slopes[0] / s).sqrt();
        }
        let j = self.slopes.iter().rposition(|&m| m <= s).expect("s above first slope");
        if j + 1 == self.slopes.len() {
            return 1.0;
        }
        let (ya, yb) = (self.breakpoints[j], self.breakpoints[j + 1]);
        let (sa, sb) = (self.slopes[j], self.slopes[j + 1]);
        (ya + (s - sa) / (sb - sa) * (yb - ya)).min(yb)
    }

    /// Largest value of `f` on the grid `{0.01, ..., 1.0}`.
    pub fn sup_norm(&self) -> f64 {
        sup_norm_grid()
            .into_iter()
            .map(|y| self.value(y).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spline serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: ControlCostSpline = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        s.validate()?;
        Ok(s)
    }
}

/// A game whose players additionally pay `Σ_a f_i(σ_i(a))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlCostGame {
    game: Game,
    splines: Vec<ControlCostSpline>,
}

impl ControlCostGame {
    pub fn new(game: Game, splines: Vec<ControlCostSpline>) -> Result<Self> {
        if splines.len() != game.num_players() {
            return Err(Error::ShapeMismatch(format!(
                "{} splines for {} players",
                splines.len(),
                game.num_players()
            )));
        }
        Ok(ControlCostGame { game, splines })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn splines(&self) -> &[ControlCostSpline] {
        &self.splines
    }

    /// `U_i(σ) - Σ_a f_i(σ_i(a))`.
    pub fn payoff(&self, sigma: &MixedProfile, player: usize) -> Result<f64> {
        self.game.check_profile(sigma)?;
        self.game.check_player(player)?;
        let u = self.game.profile_utility(sigma, player);
        let cost: f64 = sigma.player(player).iter().map(|&y| self.splines[player].value(y)).sum();
        Ok(u - cost)
    }

    /// Largest grid sup-norm over players.
    pub fn sup_norm(&self) -> f64 {
        self.splines.iter().map(|s| s.sup_norm()).fold(0.0, f64::max)
    }
}

/// Outcome of [`cc_equilibrium_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct CcCheck {
    pub equilibrium: bool,
    pub max_defect: f64,
    pub per_player: Vec<f64>,
}

/// Evaluates the first-order conditions `U_i(a) - f_i'(σ_i(a))` equal
/// across actions for every player.
pub fn cc_equilibrium_check(ccg: &ControlCostGame, sigma: &MixedProfile) -> Result<CcCheck> {
    ccg.game.check_profile(sigma)?;
    if !sigma.is_interior() {
        return Err(Error::InvalidProfile(
            "control-cost equilibria are interior; profile has a zero entry".into(),
        ));
    }
    let per_player: Vec<f64> = (0..ccg.game.num_players())
        .map(|i| {
            let u = ccg.game.utilities(sigma, i);
            let r: Vec<f64> = u
                .iter()
                .zip(sigma.player(i))
                .map(|(x, &y)| x - ccg.splines[i].derivative(y))
                .collect();
            let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .collect();
    let max_defect = per_player.iter().copied().fold(0.0, f64::max);
    Ok(CcCheck {
        equilibrium: max_defect < FOC_TOL,
        max_defect,
        per_player,
    })
}

/// Unique maximizer of `Σ σ(a) x_a - Σ f(σ(a))` over the simplex.
pub fn induced_qrf(spline: &ControlCostSpline, x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("utility vector must be finite and nonempty".into()));
    }
    if x.len() == 1 {
        return Ok(vec![1.0]);
    }
    let total = |nu: f64| -> f64 { x.iter().map(|&v| spline.inverse_derivative(v - nu)).sum() };
    let mut lo = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut width = 1.0;
    let mut hi = lo + width;
    let mut doublings = 0;
    while total(hi) >= 1.0 {
        lo = hi;
        width *= 2.0;
        hi = lo + width;
        doublings += 1;
        if doublings > 2000 {
            return Err(Error::RootFinder {
                lo,
                hi,
                sum_lo: total(lo),
                sum_hi: total(hi),
            });
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..400 {
        mid = 0.5 * (lo + hi);
        let t = total(mid);
        if (t - 1.0).abs() <= 1e-13 {
            break;
        }
        if t > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    let p: Vec<f64> = x.iter().map(|&v| spline.inverse_derivative(v - mid)).collect();
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 || p.iter().any(|&v| v <= 0.0) {
        return Err(Error::RootFinder {
            lo,
            hi,
            sum_lo: total(lo),
            sum_hi: total(hi),
        });
    }
    Ok(p.into_iter().map(|v| v / s).collect())
}

/// Builds the control-cost game in which an interior payoff-monotone `σ`
/// is an equilibrium, one spline per player.
pub fn calibrate_game(g: &Game, sigma: &MixedProfile, epsilon: f64, y0: f64) -> Result<ControlCostGame> {
    g.check_profile(sigma)?;
    let splines = (0..g.num_players())
        .map(|i| build_spline(sigma.player(i), &g.utilities(sigma, i), epsilon, y0, None))
        .collect::<Result<Vec<_>>>()?;
    ControlCostGame::new(g.clone(), splines)
}

/// How the spline of one player was adjusted in a vanishing sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum KnotCase {
    /// The lowest-probability best response of the limit has limit
    /// probability 0; no extra knot.
    ZeroLimit,
    /// Some non-best responses sit below the lowest best response, which
    /// keeps positive probability in the limit; an extra knot is placed
    /// between the two levels.
    Knot { point: f64, slope: f64 },
    /// The lowest-probability action is a best response of the limit; no
    /// extra knot.
    LowestIsBest,
}

impl KnotCase {
    pub fn label(&self) -> &'static str {
        match self {
            KnotCase::ZeroLimit => "zero-limit",
            KnotCase::Knot { .. } => "knot",
            KnotCase::LowestIsBest => "lowest-is-best",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingEntry {
    /// Position in the input sequence.
    pub index: usize,
    /// Sequence parameter; `ε = 1 / (2 Λ)` and `y_0 <= 1 / (2 Λ)`.
    pub lambda: f64,
    pub epsilon: f64,
    pub cases: Vec<KnotCase>,
    pub game: ControlCostGame,
    pub sup_norm: f64,
    pub equilibrium_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingSequence {
    /// Retained elements, in input order.
    pub entries: Vec<VanishingEntry>,
    /// Input indices that were skipped to keep parameters increasing and
    /// sup-norms nonincreasing.
    pub skipped: Vec<usize>,
    /// Nash defect of the last retained profile.
    pub terminal_nash_defect: f64,
}

const LAMBDA_CAP: f64 = 1e12;

/// Builds control-cost games along a sequence of interior payoff-monotone
/// profiles converging to the Nash equilibrium `limit`, with costs that
/// vanish pointwise along the retained subsequence.
pub fn vanishing_sequence(g: &Game, seq: &[MixedProfile], limit: &MixedProfile) -> Result<VanishingSequence> {
    g.check_profile(limit)?;
    let d = nash_defect_unchecked(g, limit);
    if d > 1e-9 {
        return Err(Error::NotNash { defect: d });
    }
    if seq.is_empty() {
        return Err(Error::InvalidArgument("empty profile sequence".into()));
    }
    for (j, p) in seq.iter().enumerate() {
        g.check_profile(p)?;
        if !p.is_interior() {
            return Err(Error::NotMonotone {
                property: "interior",
                detail: format!("sequence element {} has a zero entry", j),
            });
        }
        let v = is_payoff_monotone(g, p, DEFAULT_TOL)?;
        if !v.satisfied {
            return Err(Error::NotMonotone {
                property: "payoff monotone",
                detail: format!("sequence element {} violates payoff monotonicity", j),
            });
        }
    }
    let n = g.num_players();
    let mut entries: Vec<VanishingEntry> = Vec::new();
    let mut skipped = Vec::new();
    for (j, p) in seq.iter().enumerate() {
        let dist = p.distance(limit);
        let lambda = ((j + 1) as f64).max(if dist > 0.0 { 1.0 / dist } else { LAMBDA_CAP }).min(LAMBDA_CAP);
        let epsilon = 1.0 / (2.0 * lambda);
        let mut splines = Vec::with_capacity(n);
        let mut cases = Vec::with_capacity(n);
        for i in 0..n {
            let s = p.player(i);
            let u = g.utilities(p, i);
            let y0 = (s.iter().copied().fold(f64::INFINITY, f64::min) / 2.0).min(epsilon);
            let (spline, case) = player_spline(g, limit, i, s, &u, epsilon, y0, lambda)?;
            splines.push(spline);
            cases.push(case);
        }
        let game = ControlCostGame::new(g.clone(), splines)?;
        let check = cc_equilibrium_check(&game, p)?;
        let sup_norm = game.sup_norm();
        let keep = match entries.last() {
            None => true,
            Some(prev) => lambda > prev.lambda && sup_norm <= prev.sup_norm,
        };
        if keep {
            entries.push(VanishingEntry {
                index: j,
                lambda,
                epsilon,
                cases,
                game,
                sup_norm,
                equilibrium_defect: check.max_defect,
            });
        } else {
            skipped.push(j);
        }
    }
    let last = &seq[entries.last().expect("first element kept").index];
    Ok(VanishingSequence {
        terminal_nash_defect: nash_defect_unchecked(g, last),
        entries,
        skipped,
    })
}

#[allow(clippy::too_many_arguments)]
fn player_spline(
    g: &Game,
    limit: &MixedProfile,
    i: usize,
    s: &[f64],
    u: &[f64],
    epsilon: f64,
    y0: f64,
    lambda: f64,
) -> Result<(ControlCostSpline, KnotCase)> {
    if s.len() == 1 {
        return Ok((build_spline(s, u, epsilon, y0, None)?, KnotCase::LowestIsBest));
    }
    let best = crate::game::argmax_set(&g.utilities(limit, i), 1e-9);
    let base = build_spline(s, u, epsilon, y0, None)?;
    let levels = base.levels().to_vec();
    let level_of = |a: usize| -> usize {
        levels
            .iter()
            .position(|&y| same_level(y, s[a]))
            .unwrap_or_else(|| {
                levels
                    .iter()
                    .enumerate()
                    .min_by(|x, y| (x.1 - s[a]).abs().total_cmp(&(y.1 - s[a]).abs()))
                    .map(|(k, _)| k)
                    .unwrap_or(0)
            })
    };
    let k = best.iter().map(|&a| level_of(a)).min().expect("nonempty best responses");
    let limit_prob = best
        .iter()
        .filter(|&&a| level_of(a) == k)
        .map(|&a| limit.prob(i, a))
        .fold(f64::INFINITY, f64::min);
    if limit_prob <= 1e-12 {
        return Ok((base, KnotCase::ZeroLimit));
    }
    if k == 0 {
        return Ok((base, KnotCase::LowestIsBest));
    }
    let (below, at) = (levels[k - 1], levels[k]);
    let mut point = 1.0 / lambda;
    if !(point > below * (1.0 + 1e-6) && point < at * (1.0 - 1e-6)) {
        point = (below * at).sqrt();
    }
    // Slopes at the two levels; breakpoint 0 is y0, so level l is at index l + 1.
    let (m_below, m_at) = (base.slopes()[k], base.slopes()[k + 1]);
    let mut slope = -3.0 / lambda;
    if !(slope > m_below && slope < m_at) {
        slope = 0.5 * (m_below + m_at);
    }
    let spline = build_spline_with_knot(s, u, epsilon, y0, (point, slope))?;
    Ok((spline, KnotCase::Knot { point, slope }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_spline_matches_utility_gap() {
        let s = build_spline(&[0.7, 0.3], &[0.7, 0.0], 0.1, 0.1, None).unwrap();
        let gap = s.derivative(0.7) - s.derivative(0.3);
        assert!((gap - 0.7).abs() < 1e-12, "{}", gap);
        assert_eq!(s.value(1.0), 0.0);
        for (a, b) in s.slopes().iter().zip([-0.9, -0.8, -0.1, 0.0]) {
            assert!((a - b).abs() < 1e-15, "{:?}", s.slopes());
        }
    }

    #[test]
    fn single_level_spline() {
        let s = build_spline(&[0.5, 0.5], &[1.0, 1.0], 0.1, 0.2, None).unwrap();
        assert_eq!(s.levels(), &[0.5]);
        assert_eq!(s.derivative(0.5), -0.1);
    }

    #[test]
    fn input_errors() {
        assert!(matches!(
            build_spline(&[0.5, 0.5], &[1.0, 0.0], 0.1, 0.2, None),
            Err(Error::NotMonotone { .. })
        ));
        assert!(matches!(
            build_spline(&[0.6, 0.4], &[0.0, 1.0], 0.1, 0.2, None),
            Err(Error::NotMonotone { .. })
        ));
        assert!(build_spline(&[0.6, 0.4], &[1.0, 0.0], 0.1, 0.4, None).is_err());
        assert!(build_spline(&[0.6, 0.4], &[1.0, 0.0], 0.1, 0.2, Some(0.4)).is_err());
        assert!(build_spline(&[0.6, 0.4], &[1.0, 0.0], 0.1, 0.2, Some(0.1)).is_err());
        assert!(build_spline(&[1.0, 0.0], &[1.0, 0.0], 0.1, 0.2, None).is_err());
    }

    #[test]
    fn calibration_bound() {
        let s = build_spline(&[0.6, 0.4], &[1.0, 0.0], 0.1, 0.2, Some(0.5)).unwrap();
        let f_star = s.value(0.5);
        assert!(f_star < s.value(0.6) + 0.1);
        assert_eq!(s.calibration_point(), Some(0.5));
        let e = build_spline(&[0.6, 0.4], &[10.0, 0.0], 0.01, 0.2, Some(0.3)).unwrap_err();
        assert!(matches!(e, Error::CalibrationUnattainable { .. }), "{:?}", e);
    }

    #[test]
    fn tail_is_continuous_and_unbounded() {
        let s = build_spline(&[0.7, 0.3], &[0.7, 0.0], 0.1, 0.1, None).unwrap();
        let y0 = s.y0();
        assert!((s.value(y0 * (1.0 - 1e-12)) - s.value(y0)).abs() < 1e-9);
        assert!((s.derivative(y0 * (1.0 - 1e-12)) - s.derivative(y0)).abs() < 1e-9);
        assert!(s.value(1e-9) > 1e6 * s.epsilon());
    }

    #[test]
    fn inverse_derivative_round_trip() {
        let s = build_spline(&[0.5, 0.3, 0.2], &[2.0, 1.0, 0.5], 0.05, 0.1, Some(0.4)).unwrap();
        for &y in &[0.01, 0.1, 0.15, 0.2, 0.25, 0.3, 0.45, 0.5, 0.9, 1.0] {
            let back = s.inverse_derivative(s.derivative(y));
            assert!((back - y).abs() < 1e-12, "y={} back={}", y, back);
        }
        assert_eq!(s.inverse_derivative(0.5), 1.0);
    }

    #[test]
    fn json_round_trip() {
        let s = build_spline(&[0.5, 0.3, 0.2], &[2.0, 1.0, 0.5], 0.05, 0.1, Some(0.4)).unwrap();
        let text = s.to_json();
        let back = ControlCostSpline::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
        let broken = text.replace("\"epsilon\"", "\"epsilonx\"");
        assert!(ControlCostSpline::from_json(&broken).is_err());
    }

    #[test]
    fn induced_qrf_equal_utilities_is_uniform() {
        let s = build_spline(&[0.5, 0.3, 0.2], &[2.0, 1.0, 0.5], 0.05, 0.1, None).unwrap();
        let p = induced_qrf(&s, &[0.3, 0.3, 0.3]).unwrap();
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }
}
