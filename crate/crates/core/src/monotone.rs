//! Payoff-monotonicity predicates and region sampling.
//!
//! Probability comparisons use a relative tolerance: `p > q` means
//! `p - q > tol * max(p, q)`. Utility comparisons use `tol` absolutely.

use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile, PureProfiles};

pub const DEFAULT_TOL: f64 = 1e-9;

/// A pair of actions of one player that breaks the tested property.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub player: usize,
    pub action: usize,
    pub other: usize,
    /// Probabilities of `action` and `other`.
    pub probs: (f64, f64),
    /// Expected utilities of `action` and `other`.
    pub utilities: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityVerdict {
    pub satisfied: bool,
    pub violations: Vec<Violation>,
}

impl MonotonicityVerdict {
    fn from_violations(violations: Vec<Violation>) -> Self {
        MonotonicityVerdict {
            satisfied: violations.is_empty(),
            violations,
        }
    }
}

pub(crate) fn prob_gt(p: f64, q: f64, tol: f64) -> bool {
    p - q > tol * p.max(q)
}

pub(crate) fn util_gt(u: f64, v: f64, tol: f64) -> bool {
    u - v > tol
}

fn scan<F>(g: &Game, p: &MixedProfile, mut bad: F) -> Vec<Violation>
where
    F: FnMut(f64, f64, f64, f64) -> bool,
{
    let mut out = Vec::new();
    for i in 0..g.num_players() {
        let u = g.utilities(p, i);
        let s = p.player(i);
        for a in 0..u.len() {
            for b in 0..u.len() {
                if a != b && bad(s[a], s[b], u[a], u[b]) {
                    out.push(Violation {
                        player: i,
                        action: a,
                        other: b,
                        probs: (s[a], s[b]),
                        utilities: (u[a], u[b]),
                    });
                }
            }
        }
    }
    out
}

/// Whenever an action is played strictly more often than another, its
/// expected utility must be strictly higher.
pub fn is_weakly_payoff_monotone(g: &Game, p: &MixedProfile, tol: f64) -> Result<MonotonicityVerdict> {
    g.check_profile(p)?;
    Ok(MonotonicityVerdict::from_violations(scan(g, p, |pa, pb, ua, ub| {
        prob_gt(pa, pb, tol) && !util_gt(ua, ub, tol)
    })))
}

/// Probabilities and expected utilities are ordinally equivalent per player.
pub fn is_payoff_monotone(g: &Game, p: &MixedProfile, tol: f64) -> Result<MonotonicityVerdict> {
    g.check_profile(p)?;
    Ok(MonotonicityVerdict::from_violations(scan(g, p, |pa, pb, ua, ub| {
        !prob_gt(pb, pa, tol) != !util_gt(ub, ua, tol)
    })))
}

/// Whenever an action is at least as good as another, it receives at least
/// `m` times the other's probability.
pub fn is_m_weakly_payoff_monotone(
    g: &Game,
    p: &MixedProfile,
    m: f64,
    tol: f64,
) -> Result<MonotonicityVerdict> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::InvalidArgument(format!("m must lie in [0, 1], got {}", m)));
    }
    g.check_profile(p)?;
    Ok(MonotonicityVerdict::from_violations(scan(g, p, |pa, pb, ua, ub| {
        ua >= ub - tol && pa - m * pb < -tol * pa.max(pb)
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    /// Weak payoff monotonicity.
    Weak,
    /// Payoff monotonicity.
    Strict,
}

/// One grid point of [`sample_monotone_region`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    /// Probability of each player's first action.
    pub coords: Vec<f64>,
    pub satisfied: bool,
}

/// Evaluates monotonicity on the grid `{0, 1/r, ..., 1}^n` of first-action
/// probabilities. Points come in lexicographic order with the first player
/// outermost. Only games where every player has two actions are accepted.
pub fn sample_monotone_region(g: &Game, resolution: usize, kind: RegionKind) -> Result<Vec<RegionPoint>> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    if let Some(i) = (0..g.num_players()).find(|&i| g.num_actions(i) != 2) {
        return Err(Error::Unsupported(format!(
            "region sampling needs two actions per player; {} has {}",
            g.players()[i],
            g.num_actions(i)
        )));
    }
    let n = g.num_players();
    let steps = vec![resolution + 1; n];
    let mut out = Vec::with_capacity((resolution + 1).pow(n as u32));
    for idx in PureProfiles::new(&steps) {
        let coords: Vec<f64> = idx.iter().map(|&k| k as f64 / resolution as f64).collect();
        let p = MixedProfile::from_raw(coords.iter().map(|&x| vec![x, 1.0 - x]).collect());
        let v = match kind {
            RegionKind::Weak => is_weakly_payoff_monotone(g, &p, DEFAULT_TOL)?,
            RegionKind::Strict => is_payoff_monotone(g, &p, DEFAULT_TOL)?,
        };
        out.push(RegionPoint {
            coords,
            satisfied: v.satisfied,
        });
    }
    Ok(out)
}

/// Fraction of satisfied grid points.
pub fn region_fraction(points: &[RegionPoint]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    points.iter().filter(|p| p.satisfied).count() as f64 / points.len() as f64
}

/// CSV with header `coord_1,...,coord_k,satisfied`.
pub fn region_csv(points: &[RegionPoint]) -> String {
    let k = points.first().map_or(0, |p| p.coords.len());
    let mut out = String::new();
    for j in 1..=k {
        out.push_str(&format!("coord_{},", j));
    }
    out.push_str("satisfied\n");
    for p in points {
        for c in &p.coords {
            out.push_str(&format!("{},", c));
        }
        out.push_str(if p.satisfied { "1\n" } else { "0\n" });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn prof(a: &[f64], b: &[f64]) -> MixedProfile {
        MixedProfile::new(vec![a.to_vec(), b.to_vec()]).unwrap()
    }

    #[test]
    fn weak_examples_on_gamma1() {
        let g = corpus::gamma1();
        let inside = prof(&[0.75, 0.25], &[0.75, 0.25]);
        assert!(is_weakly_payoff_monotone(&g, &inside, DEFAULT_TOL).unwrap().satisfied);
        let v = is_weakly_payoff_monotone(&g, &prof(&[0.0, 1.0], &[0.0, 1.0]), DEFAULT_TOL).unwrap();
        assert!(!v.satisfied);
        assert!(v.violations.iter().any(|x| x.player == 0 && x.action == 1 && x.other == 0));
    }

    #[test]
    fn strict_examples() {
        let psi = corpus::psi();
        assert!(is_payoff_monotone(&psi, &prof(&[0.5, 0.5], &[1.0, 0.0]), DEFAULT_TOL).unwrap().satisfied);
        let g = corpus::gamma1();
        assert!(!is_payoff_monotone(&g, &prof(&[0.5, 0.5], &[1.0, 0.0]), DEFAULT_TOL).unwrap().satisfied);
    }

    #[test]
    fn m_weak_example() {
        let g = corpus::gamma1();
        let p = prof(&[0.4, 0.6], &[0.9, 0.1]);
        assert!(is_m_weakly_payoff_monotone(&g, &p, 0.5, DEFAULT_TOL).unwrap().satisfied);
        assert!(!is_m_weakly_payoff_monotone(&g, &p, 1.0, DEFAULT_TOL).unwrap().satisfied);
        assert!(is_m_weakly_payoff_monotone(&g, &p, 0.0, DEFAULT_TOL).unwrap().satisfied);
        assert!(is_m_weakly_payoff_monotone(&g, &p, 1.5, DEFAULT_TOL).is_err());
    }

    #[test]
    fn tiny_probabilities_compare_relatively() {
        let g = corpus::gamma1();
        let p = prof(&[1.0 - 2e-30, 2e-30], &[1.0 - 1e-30, 1e-30]);
        assert!(is_payoff_monotone(&g, &p, DEFAULT_TOL).unwrap().satisfied);
    }

    #[test]
    fn region_corners_and_csv() {
        let g = corpus::gamma1();
        let pts = sample_monotone_region(&g, 1, RegionKind::Weak).unwrap();
        let coords: Vec<Vec<f64>> = pts.iter().map(|p| p.coords.clone()).collect();
        assert_eq!(coords, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
        let csv = region_csv(&pts);
        assert!(csv.starts_with("coord_1,coord_2,satisfied\n0,0,0\n"));
        assert!(sample_monotone_region(&corpus::phi(), 10, RegionKind::Weak).is_err());
    }
}
