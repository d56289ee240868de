//! Finite normal-form games, mixed profiles, expected utility and dominance.

use crate::error::{Error, Result};

/// Tolerance on the probability simplex used when validating profiles.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Largest accepted deviation of a probability vector's sum from one before
/// renormalization.
pub const SUM_TOL: f64 = 1e-6;

/// A finite game in normal form.
///
/// Payoffs are stored densely: the record for pure profile `a` starts at
/// `index(a) * n` and holds one entry per player. Profile indices are
/// lexicographic with the first player outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    strides: Vec<usize>,
    payoffs: Vec<f64>,
}

impl Game {
    /// Builds a game from a flat payoff tensor laid out as described on [`Game`].
    pub fn new(players: Vec<String>, actions: Vec<Vec<String>>, payoffs: Vec<f64>) -> Result<Self> {
        let n = players.len();
        if n == 0 {
            return Err(Error::InvalidGame("a game needs at least one player".into()));
        }
        if actions.len() != n {
            return Err(Error::InvalidGame(format!(
                "{} players but {} action lists",
                n,
                actions.len()
            )));
        }
        for (i, a) in actions.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidGame(format!("player {} has no actions", players[i])));
            }
            for (k, name) in a.iter().enumerate() {
                if a[..k].contains(name) {
                    return Err(Error::InvalidGame(format!(
                        "player {} lists action {} twice",
                        players[i], name
                    )));
                }
            }
        }
        for (k, p) in players.iter().enumerate() {
            if players[..k].contains(p) {
                return Err(Error::InvalidGame(format!("player {} listed twice", p)));
            }
        }
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * actions[i + 1].len();
        }
        let count = strides[0] * actions[0].len();
        if payoffs.len() != count * n {
            return Err(Error::InvalidGame(format!(
                "payoff tensor has {} entries, expected {}",
                payoffs.len(),
                count * n
            )));
        }
        if let Some(pos) = payoffs.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidGame(format!("payoff entry {} is not finite", pos)));
        }
        Ok(Game {
            players,
            actions,
            strides,
            payoffs,
        })
    }

    /// Builds a game by evaluating `f` on every pure profile.
    pub fn from_fn<F>(players: Vec<String>, actions: Vec<Vec<String>>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<f64>,
    {
        let counts: Vec<usize> = actions.iter().map(Vec::len).collect();
        let n = players.len();
        let mut payoffs = Vec::new();
        for profile in PureProfiles::new(&counts) {
            let u = f(&profile);
            if u.len() != n {
                return Err(Error::InvalidGame(format!(
                    "payoff function returned {} entries for {} players",
                    u.len(),
                    n
                )));
            }
            payoffs.extend(u);
        }
        Game::new(players, actions, payoffs)
    }

    /// Convenience constructor for two-player games from row/column matrices.
    ///
    /// `a[r][c]` is the row player's payoff, `b[r][c]` the column player's.
    pub fn bimatrix(
        players: [&str; 2],
        rows: &[&str],
        cols: &[&str],
        a: &[Vec<f64>],
        b: &[Vec<f64>],
    ) -> Result<Self> {
        if a.len() != rows.len() || b.len() != rows.len() {
            return Err(Error::InvalidGame("matrix row count mismatch".into()));
        }
        if a.iter().chain(b.iter()).any(|r| r.len() != cols.len()) {
            return Err(Error::InvalidGame("matrix column count mismatch".into()));
        }
        Game::from_fn(
            players.iter().map(|s| s.to_string()).collect(),
            vec![
                rows.iter().map(|s| s.to_string()).collect(),
                cols.iter().map(|s| s.to_string()).collect(),
            ],
            |p| vec![a[p[0]][p[1]], b[p[0]][p[1]]],
        )
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.actions[player].len()
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.actions.iter().map(Vec::len).collect()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn actions(&self, player: usize) -> &[String] {
        &self.actions[player]
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p == name)
    }

    pub fn action_index(&self, player: usize, name: &str) -> Option<usize> {
        self.actions[player].iter().position(|a| a == name)
    }

    /// Number of pure profiles.
    pub fn profile_count(&self) -> usize {
        self.strides[0] * self.actions[0].len()
    }

    /// Index of a pure profile in lexicographic order.
    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    /// Iterates over pure profiles in lexicographic order.
    pub fn profiles(&self) -> PureProfiles {
        PureProfiles::new(&self.action_counts())
    }

    /// Payoff of `player` at a pure profile.
    pub fn payoff(&self, profile: &[usize], player: usize) -> f64 {
        self.payoffs[self.profile_index(profile) * self.num_players() + player]
    }

    /// Payoff vector of all players at a pure profile.
    pub fn payoff_vector(&self, profile: &[usize]) -> &[f64] {
        let n = self.num_players();
        let k = self.profile_index(profile) * n;
        &self.payoffs[k..k + n]
    }

    /// Raw payoff tensor in the layout described on [`Game`].
    pub fn payoff_tensor(&self) -> &[f64] {
        &self.payoffs
    }

    /// Two-player payoff matrix of `player`: rows are the player's own
    /// actions, columns the opponent's.
    ///
    /// Panics unless the game has exactly two players.
    pub fn own_matrix(&self, player: usize) -> Vec<Vec<f64>> {
        assert_eq!(self.num_players(), 2, "own_matrix needs a two-player game");
        let other = 1 - player;
        (0..self.num_actions(player))
            .map(|a| {
                (0..self.num_actions(other))
                    .map(|b| {
                        let mut p = [0usize; 2];
                        p[player] = a;
                        p[other] = b;
                        self.payoff(&p, player)
                    })
                    .collect()
            })
            .collect()
    }

    /// Expected utility of each of `player`'s actions against the others'
    /// mixed strategies. Shapes are assumed valid.
    pub(crate) fn utilities(&self, p: &MixedProfile, player: usize) -> Vec<f64> {
        let n = self.num_players();
        let mut out = vec![0.0; self.num_actions(player)];
        if n == 2 {
            let other = 1 - player;
            let q = p.player(other);
            for a in 0..out.len() {
                let mut prof = [0usize; 2];
                prof[player] = a;
                let mut acc = 0.0;
                for (b, &w) in q.iter().enumerate() {
                    if w != 0.0 {
                        prof[other] = b;
                        acc += w * self.payoff(&prof, player);
                    }
                }
                out[a] = acc;
            }
            return out;
        }
        for (k, profile) in self.profiles().enumerate() {
            let mut w = 1.0;
            for (j, &a) in profile.iter().enumerate() {
                if j != player {
                    w *= p.player(j)[a];
                }
            }
            if w != 0.0 {
                out[profile[player]] += w * self.payoffs[k * n + player];
            }
        }
        out
    }

    /// Expected utility of `player` under the full profile.
    pub(crate) fn profile_utility(&self, p: &MixedProfile, player: usize) -> f64 {
        self.utilities(p, player)
            .iter()
            .zip(p.player(player))
            .map(|(u, s)| u * s)
            .sum()
    }

    pub(crate) fn check_profile(&self, p: &MixedProfile) -> Result<()> {
        if p.num_players() != self.num_players() {
            return Err(Error::ShapeMismatch(format!(
                "profile has {} players, game has {}",
                p.num_players(),
                self.num_players()
            )));
        }
        for i in 0..self.num_players() {
            if p.player(i).len() != self.num_actions(i) {
                return Err(Error::ShapeMismatch(format!(
                    "player {} has {} actions, profile gives {} probabilities",
                    self.players[i],
                    self.num_actions(i),
                    p.player(i).len()
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.num_players() {
            return Err(Error::ShapeMismatch(format!(
                "player index {} out of range for {} players",
                player,
                self.num_players()
            )));
        }
        Ok(())
    }
}

/// Odometer over pure profiles, last player fastest.
#[derive(Debug, Clone)]
pub struct PureProfiles {
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl PureProfiles {
    pub fn new(counts: &[usize]) -> Self {
        let next = if counts.iter().all(|&c| c > 0) {
            Some(vec![0; counts.len()])
        } else {
            None
        };
        PureProfiles {
            counts: counts.to_vec(),
            next,
        }
    }
}

impl Iterator for PureProfiles {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut nxt = cur.clone();
        let mut k = nxt.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            nxt[k] += 1;
            if nxt[k] < self.counts[k] {
                self.next = Some(nxt);
                break;
            }
            nxt[k] = 0;
        }
        Some(cur)
    }
}

/// One probability vector per player.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile {
    probs: Vec<Vec<f64>>,
}

impl MixedProfile {
    /// Validates and renormalizes per-player probability vectors.
    ///
    /// Entries below `-1e-12` or sums further than `1e-6` from one are
    /// rejected; small negative entries are clamped to zero before the
    /// vector is rescaled to sum to one.
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(probs.len());
        for (i, v) in probs.into_iter().enumerate() {
            if v.is_empty() {
                return Err(Error::InvalidProfile(format!("player {} has an empty vector", i)));
            }
            if let Some(x) = v.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidProfile(format!("player {} has entry {}", i, x)));
            }
            if let Some(x) = v.iter().find(|&&x| x < -SIMPLEX_TOL) {
                return Err(Error::InvalidProfile(format!(
                    "player {} has negative probability {}",
                    i, x
                )));
            }
            let v: Vec<f64> = v.into_iter().map(|x| x.max(0.0)).collect();
            let s: f64 = v.iter().sum();
            if (s - 1.0).abs() > SUM_TOL {
                return Err(Error::InvalidProfile(format!(
                    "player {} probabilities sum to {}",
                    i, s
                )));
            }
            out.push(if s == 1.0 { v } else { v.iter().map(|x| x / s).collect() });
        }
        Ok(MixedProfile { probs: out })
    }

    /// Builds a profile without validation. Callers guarantee simplex vectors.
    pub(crate) fn from_raw(probs: Vec<Vec<f64>>) -> Self {
        MixedProfile { probs }
    }

    /// Every player mixes uniformly.
    pub fn uniform(counts: &[usize]) -> Self {
        MixedProfile {
            probs: counts.iter().map(|&k| vec![1.0 / k as f64; k]).collect(),
        }
    }

    /// Degenerate profile on a pure action profile.
    pub fn pure(counts: &[usize], profile: &[usize]) -> Self {
        MixedProfile {
            probs: counts
                .iter()
                .zip(profile)
                .map(|(&k, &a)| {
                    let mut v = vec![0.0; k];
                    v[a] = 1.0;
                    v
                })
                .collect(),
        }
    }

    pub fn num_players(&self) -> usize {
        self.probs.len()
    }

    pub fn player(&self, i: usize) -> &[f64] {
        &self.probs[i]
    }

    pub fn prob(&self, player: usize, action: usize) -> f64 {
        self.probs[player][action]
    }

    pub fn as_vecs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn into_vecs(self) -> Vec<Vec<f64>> {
        self.probs
    }

    /// True when every entry is strictly positive.
    pub fn is_interior(&self) -> bool {
        self.probs.iter().flatten().all(|&x| x > 0.0)
    }

    /// Max-norm distance between two profiles of the same shape.
    pub fn distance(&self, other: &MixedProfile) -> f64 {
        self.probs
            .iter()
            .flatten()
            .zip(other.probs.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Replaces one player's vector, returning a new profile.
    pub fn with_player(&self, i: usize, v: Vec<f64>) -> MixedProfile {
        let mut probs = self.probs.clone();
        probs[i] = v;
        MixedProfile { probs }
    }

    /// Support of a player's strategy (entries above `tol`).
    pub fn support(&self, player: usize, tol: f64) -> Vec<usize> {
        self.probs[player]
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > tol)
            .map(|(a, _)| a)
            .collect()
    }

    /// Flattened entries in player-major order.
    pub fn flat(&self) -> Vec<f64> {
        self.probs.iter().flatten().copied().collect()
    }
}

/// Expected utility of each of `player`'s actions against `p_{-i}`.
pub fn expected_utility(g: &Game, p: &MixedProfile, player: usize) -> Result<Vec<f64>> {
    g.check_profile(p)?;
    g.check_player(player)?;
    Ok(g.utilities(p, player))
}

/// Actions within `tol` of the best expected utility.
pub fn best_responses(g: &Game, p: &MixedProfile, player: usize, tol: f64) -> Result<Vec<usize>> {
    let u = expected_utility(g, p, player)?;
    Ok(argmax_set(&u, tol))
}

pub(crate) fn argmax_set(u: &[f64], tol: f64) -> Vec<usize> {
    let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..u.len()).filter(|&a| u[a] >= best - tol).collect()
}

/// Largest gain any player could obtain by a unilateral deviation.
pub fn nash_defect(g: &Game, p: &MixedProfile) -> Result<f64> {
    g.check_profile(p)?;
    Ok(nash_defect_unchecked(g, p))
}

pub(crate) fn nash_defect_unchecked(g: &Game, p: &MixedProfile) -> f64 {
    (0..g.num_players())
        .map(|i| {
            let u = g.utilities(p, i);
            let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let cur: f64 = u.iter().zip(p.player(i)).map(|(a, b)| a * b).sum();
            best - cur
        })
        .fold(0.0, f64::max)
}

/// One weak-dominance relation between two actions of the same player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dominance {
    pub dominated: usize,
    pub dominating: usize,
    /// Opponents' pure actions (in player order, the dominated player omitted)
    /// at which the dominating action does strictly better.
    pub witness: Vec<usize>,
    /// True when the dominating action is strictly better against every
    /// opponent profile.
    pub strict: bool,
}

/// Weak-dominance relations, one list per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceReport {
    pub per_player: Vec<Vec<Dominance>>,
}

impl DominanceReport {
    pub fn is_empty(&self) -> bool {
        self.per_player.iter().all(Vec::is_empty)
    }

    /// True when `action` of `player` is weakly dominated by some action.
    pub fn is_dominated(&self, player: usize, action: usize) -> bool {
        self.per_player[player].iter().any(|d| d.dominated == action)
    }

    /// Whether `dominating` weakly dominates `dominated` for `player`.
    pub fn dominates(&self, player: usize, dominating: usize, dominated: usize) -> bool {
        self.per_player[player]
            .iter()
            .any(|d| d.dominating == dominating && d.dominated == dominated)
    }
}

/// Exhaustive weak-dominance check over ordered action pairs.
///
/// Comparisons are exact on the stored payoffs.
pub fn weak_dominance(g: &Game) -> DominanceReport {
    let n = g.num_players();
    let mut per_player = Vec::with_capacity(n);
    for i in 0..n {
        let mut others: Vec<usize> = g.action_counts();
        others.remove(i);
        let mut list = Vec::new();
        for dominated in 0..g.num_actions(i) {
            for dominating in 0..g.num_actions(i) {
                if dominated == dominating {
                    continue;
                }
                let mut weakly = true;
                let mut witness = None;
                let mut strict = true;
                for rest in PureProfiles::new(&others) {
                    let mut full = rest.clone();
                    full.insert(i, dominated);
                    let lo = g.payoff(&full, i);
                    full[i] = dominating;
                    let hi = g.payoff(&full, i);
                    if hi < lo {
                        weakly = false;
                        break;
                    }
                    if hi > lo {
                        if witness.is_none() {
                            witness = Some(rest);
                        }
                    } else {
                        strict = false;
                    }
                }
                if weakly {
                    if let Some(witness) = witness {
                        list.push(Dominance {
                            dominated,
                            dominating,
                            witness,
                            strict,
                        });
                    }
                }
            }
        }
        per_player.push(list);
    }
    DominanceReport { per_player }
}
