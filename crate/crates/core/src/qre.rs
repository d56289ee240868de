//! Quantal response functions, their equilibria, logit path tracing and
//! the perturbation that turns a weakly payoff-monotone profile into a
//! nearby interior payoff-monotone one.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ccost::{induced_qrf, ControlCostSpline};
use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};
use crate::monotone::{is_payoff_monotone, is_weakly_payoff_monotone, MonotonicityVerdict, DEFAULT_TOL};
use crate::nash::enumerate_nash;

/// Accepted fixed points have max-norm residual below this.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100_000;
/// Consecutive path points farther apart than this trigger step halving.
pub const JUMP_TOL: f64 = 0.25;
const MAX_HALVINGS: usize = 12;
const FD_STEP: f64 = 1e-7;

/// A quantal response function, applied to each player's utility vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Qrf {
    Logistic { lambda: f64 },
    ControlCost(Box<ControlCostSpline>),
}

pub fn logistic_qrf(lambda: f64) -> Result<Qrf> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be finite and nonnegative, got {}",
            lambda
        )));
    }
    Ok(Qrf::Logistic { lambda })
}

/// Softmax with inverse temperature `lambda`, shifted by the maximum.
/// Entries are floored at the smallest positive normal so outputs stay
/// interior.
pub fn logit(lambda: f64, x: &[f64]) -> Vec<f64> {
    let top = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|&v| (lambda * (v - top)).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| (v / s).max(f64::MIN_POSITIVE)).collect()
}

impl Qrf {
    pub fn kind(&self) -> &'static str {
        match self {
            Qrf::Logistic { .. } => "logistic",
            Qrf::ControlCost(_) => "control-cost",
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            Qrf::Logistic { lambda } => Some(*lambda),
            Qrf::ControlCost(_) => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Qrf::Logistic { lambda } => Ok(logit(*lambda, x)),
            Qrf::ControlCost(s) => induced_qrf(s, x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QrePoint {
    pub lambda: Option<f64>,
    pub profile: MixedProfile,
    /// Max-norm distance between the profile and its image.
    pub residual: f64,
    pub iterations: usize,
}

pub(crate) struct FixedPoint {
    pub x: Vec<Vec<f64>>,
    pub residual: f64,
    pub iterations: usize,
}

fn residual(x: &[Vec<f64>], fx: &[Vec<f64>]) -> f64 {
    x.iter()
        .flatten()
        .zip(fx.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn mix(x: &[Vec<f64>], y: &[Vec<f64>], alpha: f64) -> Vec<Vec<f64>> {
    x.iter()
        .zip(y)
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| (1.0 - alpha) * p + alpha * q).collect())
        .collect()
}

/// Finds `x = map(x)` on a product of simplices by damped iteration,
/// halving the step when the residual grows, with a Newton fallback when
/// progress stalls.
pub(crate) fn solve_fixed_point<F>(map: F, start: Vec<Vec<f64>>, tol: f64, max_iter: usize) -> Result<FixedPoint>
where
    F: Fn(&[Vec<f64>]) -> Result<Vec<Vec<f64>>>,
{
    let mut x = start;
    let mut fx = map(&x)?;
    let mut r = residual(&x, &fx);
    let mut best = (x.clone(), r);
    let mut alpha = 1.0;
    let mut streak = 0;
    let mut checkpoint = r;
    let mut it = 0;
    while it < max_iter {
        if r < tol {
            return Ok(FixedPoint {
                x,
                residual: r,
                iterations: it,
            });
        }
        let trial = mix(&x, &fx, alpha);
        let ft = map(&trial)?;
        let rt = residual(&trial, &ft);
        if rt > r {
            alpha = (alpha * 0.5).max(1e-4);
            streak = 0;
        } else {
            streak += 1;
            if streak >= 20 {
                alpha = (alpha * 2.0).min(1.0);
                streak = 0;
            }
        }
        x = trial;
        fx = ft;
        r = rt;
        if r < best.1 {
            best = (x.clone(), r);
        }
        it += 1;
        if it % 500 == 0 {
            if best.1 > 0.5 * checkpoint {
                if let Some((nx, nr, used)) = newton(&map, &best.0, tol)? {
                    it += used;
                    if nr < best.1 {
                        best = (nx.clone(), nr);
                        x = nx;
                        fx = map(&x)?;
                        r = residual(&x, &fx);
                        alpha = 1.0;
                    }
                }
            }
            checkpoint = best.1;
        }
    }
    if best.1 >= tol {
        if let Some((nx, nr, used)) = newton(&map, &best.0, tol)? {
            it += used;
            if nr < best.1 {
                best = (nx, nr);
            }
        }
    }
    if best.1 < tol {
        return Ok(FixedPoint {
            x: best.0,
            residual: best.1,
            iterations: it,
        });
    }
    Err(Error::NonConvergence {
        iterations: it,
        residual: best.1,
        lambda: None,
    })
}

/// Newton's method on `map(x) - x` in coordinates that drop each player's
/// last probability.
fn newton<F>(map: &F, start: &[Vec<f64>], tol: f64) -> Result<Option<(Vec<Vec<f64>>, f64, usize)>>
where
    F: Fn(&[Vec<f64>]) -> Result<Vec<Vec<f64>>>,
{
    let dims: Vec<usize> = start.iter().map(|v| v.len()).collect();
    let reduce = |x: &[Vec<f64>]| -> Vec<f64> {
        x.iter().flat_map(|v| v[..v.len() - 1].iter().copied()).collect()
    };
    let expand = |z: &[f64]| -> Vec<Vec<f64>> {
        let mut k = 0;
        dims.iter()
            .map(|&d| {
                let mut v = z[k..k + d - 1].to_vec();
                k += d - 1;
                v.push(1.0 - v.iter().sum::<f64>());
                v
            })
            .collect()
    };
    let defect = |x: &[Vec<f64>]| -> Result<Vec<f64>> {
        let fx = map(x)?;
        let g: Vec<Vec<f64>> = fx
            .iter()
            .zip(x)
            .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p - q).collect())
            .collect();
        Ok(reduce(&g))
    };
    let mut z = reduce(start);
    let dim = z.len();
    if dim == 0 {
        return Ok(None);
    }
    let mut x = expand(&z);
    let mut r = residual(&x, &map(&x)?);
    let mut steps = 0;
    for _ in 0..50 {
        if r < tol {
            break;
        }
        steps += 1;
        let g0 = defect(&x)?;
        let mut jac = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            let mut zp = z.clone();
            zp[k] += FD_STEP;
            let gp = defect(&expand(&zp))?;
            for row in 0..dim {
                jac[(row, k)] = (gp[row] - g0[row]) / FD_STEP;
            }
        }
        let rhs = -DVector::from_vec(g0);
        let Some(dz) = jac.lu().solve(&rhs) else {
            break;
        };
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-8 {
            let zt: Vec<f64> = z.iter().zip(dz.iter()).map(|(a, b)| a + t * b).collect();
            let xt = expand(&zt);
            if xt.iter().flatten().all(|&p| p > 0.0 && p <= 1.0) {
                let rt = residual(&xt, &map(&xt)?);
                if rt < r {
                    z = zt;
                    x = xt;
                    r = rt;
                    moved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Ok(Some((x, r, steps)))
}

fn qrf_map<'a>(g: &'a Game, q: &'a [Qrf]) -> impl Fn(&[Vec<f64>]) -> Result<Vec<Vec<f64>>> + 'a {
    move |x: &[Vec<f64>]| {
        let p = MixedProfile::from_raw(x.to_vec());
        (0..g.num_players())
            .map(|i| q[if q.len() == 1 { 0 } else { i }].eval(&g.utilities(&p, i)))
            .collect()
    }
}

/// A fixed point of `σ_i = q_i(U_i(σ_{-i}, ·))`. `q` holds one response
/// function per player, or a single one shared by all.
pub fn qre_fixed_point(g: &Game, q: &[Qrf], start: &MixedProfile) -> Result<QrePoint> {
    g.check_profile(start)?;
    if q.len() != 1 && q.len() != g.num_players() {
        return Err(Error::ShapeMismatch(format!(
            "{} response functions for {} players",
            q.len(),
            g.num_players()
        )));
    }
    let lambda = q[0].lambda().filter(|_| q.iter().all(|r| r.lambda() == q[0].lambda()));
    let fp = solve_fixed_point(qrf_map(g, q), start.as_vecs().to_vec(), RESIDUAL_TOL, MAX_ITERATIONS).map_err(
        |e| match e {
            Error::NonConvergence {
                iterations, residual, ..
            } => Error::NonConvergence {
                iterations,
                residual,
                lambda,
            },
            other => other,
        },
    )?;
    Ok(QrePoint {
        lambda,
        profile: MixedProfile::from_raw(fp.x),
        residual: fp.residual,
        iterations: fp.iterations,
    })
}

/// `0` followed by 40 log-spaced points in `[1e-2, lambda_max]`.
pub fn default_lambda_schedule(lambda_max: f64) -> Vec<f64> {
    let (a, b) = (1e-2f64.ln(), lambda_max.ln());
    std::iter::once(0.0)
        .chain((0..40).map(|k| (a + (b - a) * k as f64 / 39.0).exp()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogitPath {
    /// Accepted points in increasing `λ`, including any inserted by step
    /// halving.
    pub points: Vec<QrePoint>,
    /// Nash equilibrium nearest the last point, with its max-norm distance.
    pub nearest_nash: Option<(MixedProfile, f64)>,
    pub diagnostics: Vec<String>,
}

impl LogitPath {
    pub fn terminal(&self) -> &QrePoint {
        self.points.last().expect("path has a point")
    }

    /// One row per point: `lambda`, every probability, residual.
    pub fn to_csv(&self, g: &Game) -> String {
        let mut out = String::from("lambda");
        for i in 0..g.num_players() {
            for a in g.actions(i) {
                out.push_str(&format!(",{}:{}", g.players()[i], a));
            }
        }
        out.push_str(",residual\n");
        for p in &self.points {
            out.push_str(&crate::format::format_number(p.lambda.unwrap_or(f64::NAN)));
            for v in p.profile.flat() {
                out.push(',');
                out.push_str(&crate::format::format_number(v));
            }
            out.push(',');
            out.push_str(&crate::format::format_number(p.residual));
            out.push('\n');
        }
        out
    }
}

/// Follows logit equilibria along `schedule`, which must start at 0 and
/// increase. Each solve is warm-started from the previous point.
pub fn trace_logit_path(g: &Game, schedule: &[f64], start: &MixedProfile) -> Result<LogitPath> {
    g.check_profile(start)?;
    if schedule.first() != Some(&0.0) {
        return Err(Error::InvalidArgument("lambda schedule must start at 0".into()));
    }
    if schedule.windows(2).any(|w| !(w[1] > w[0])) || schedule.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidArgument("lambda schedule must be finite and increasing".into()));
    }
    let mut diagnostics = Vec::new();
    let first = qre_fixed_point(g, &[logistic_qrf(0.0)?], start)?;
    let mut points = vec![first];
    for &lambda in &schedule[1..] {
        let prev = points.last().expect("nonempty").clone();
        advance(g, &prev, lambda, 0, &mut points, &mut diagnostics)?;
    }
    let nearest_nash = match enumerate_nash(g) {
        Ok(e) => e.nearest(&points.last().expect("nonempty").profile),
        Err(e) => {
            diagnostics.push(format!("no nearest equilibrium: {}", e));
            None
        }
    };
    Ok(LogitPath {
        points,
        nearest_nash,
        diagnostics,
    })
}

fn advance(
    g: &Game,
    prev: &QrePoint,
    lambda: f64,
    depth: usize,
    points: &mut Vec<QrePoint>,
    diagnostics: &mut Vec<String>,
) -> Result<()> {
    let from = prev.lambda.unwrap_or(0.0);
    let attempt = qre_fixed_point(g, &[logistic_qrf(lambda)?], &prev.profile);
    let ok = match &attempt {
        Ok(p) => p.profile.distance(&prev.profile) <= JUMP_TOL,
        Err(_) => false,
    };
    if ok || depth >= MAX_HALVINGS {
        let p = attempt?;
        if !ok {
            diagnostics.push(format!(
                "jump of {:.3} between lambda {} and {} persists after halving",
                p.profile.distance(&prev.profile),
                from,
                lambda
            ));
        }
        points.push(p);
        return Ok(());
    }
    let mid = 0.5 * (from + lambda);
    advance(g, prev, mid, depth + 1, points, diagnostics)?;
    let last = points.last().expect("just pushed").clone();
    advance(g, &last, lambda, depth + 1, points, diagnostics)
}

/// Result of [`perturbed_monotone_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedPoint {
    pub profile: MixedProfile,
    /// Max-norm distance to the input profile.
    pub distance: f64,
    pub verdict: MonotonicityVerdict,
    pub residual: f64,
}

/// Fixed point of `β ↦ (1 - ζ) μ + ζ l^λ(U(β))` for a weakly payoff-monotone
/// `μ`. For small enough `ζ` it is interior and payoff monotone.
pub fn perturbed_monotone_point(g: &Game, mu: &MixedProfile, zeta: f64, lambda: f64) -> Result<PerturbedPoint> {
    g.check_profile(mu)?;
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::InvalidArgument(format!("zeta must lie in (0, 1), got {}", zeta)));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {}", lambda)));
    }
    let weak = is_weakly_payoff_monotone(g, mu, DEFAULT_TOL)?;
    if !weak.satisfied {
        return Err(Error::NotMonotone {
            property: "weakly payoff monotone",
            detail: format!("{} violating pairs", weak.violations.len()),
        });
    }
    let map = |x: &[Vec<f64>]| -> Result<Vec<Vec<f64>>> {
        let p = MixedProfile::from_raw(x.to_vec());
        Ok((0..g.num_players())
            .map(|i| {
                let l = logit(lambda, &g.utilities(&p, i));
                mu.player(i)
                    .iter()
                    .zip(l)
                    .map(|(m, v)| (1.0 - zeta) * m + zeta * v)
                    .collect()
            })
            .collect())
    };
    let fp = solve_fixed_point(map, mu.as_vecs().to_vec(), RESIDUAL_TOL, MAX_ITERATIONS)?;
    let profile = MixedProfile::from_raw(fp.x);
    let verdict = is_payoff_monotone(g, &profile, DEFAULT_TOL)?;
    Ok(PerturbedPoint {
        distance: profile.distance(mu),
        profile,
        verdict,
        residual: fp.residual,
    })
}

/// Which regularity property a counterexample breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Interiority,
    Continuity,
    Responsiveness,
    Monotonicity,
}

impl Axiom {
    pub fn as_str(self) -> &'static str {
        match self {
            Axiom::Interiority => "interiority",
            Axiom::Continuity => "continuity",
            Axiom::Responsiveness => "responsiveness",
            Axiom::Monotonicity => "monotonicity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub axiom: Axiom,
    pub input: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub samples: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn fails(&self, axiom: Axiom) -> bool {
        self.counterexamples.iter().any(|c| c.axiom == axiom)
    }
}

const RESPONSIVENESS_STEP: f64 = 0.1;
const CONTINUITY_STEP: f64 = 1e-6;

/// Samples utility vectors with 2 to 4 entries in `[-1, 1]` and checks the
/// four regularity properties on each.
pub fn qrf_regularity_audit(q: &Qrf, sample_count: usize, seed: u64) -> AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = Vec::new();
    for _ in 0..sample_count {
        let dim = rng.gen_range(2..=4);
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        audit_one(q, &x, &dir, &mut found);
    }
    AuditReport {
        samples: sample_count,
        counterexamples: found,
    }
}

fn audit_one(q: &Qrf, x: &[f64], dir: &[f64], found: &mut Vec<Counterexample>) {
    let mut push = |axiom, detail: String| {
        found.push(Counterexample {
            axiom,
            input: x.to_vec(),
            detail,
        })
    };
    let p = match q.eval(x) {
        Ok(p) => p,
        Err(e) => {
            push(Axiom::Interiority, format!("evaluation failed: {}", e));
            return;
        }
    };
    let sum: f64 = p.iter().sum();
    if p.iter().any(|&v| !(v > 0.0)) || (sum - 1.0).abs() > 1e-9 {
        push(Axiom::Interiority, format!("output {:?}", p));
    }
    for a in 0..x.len() {
        for b in 0..x.len() {
            if x[a] > x[b] && !(p[a] > p[b]) {
                push(
                    Axiom::Monotonicity,
                    format!("x[{}] > x[{}] but p = {} vs {}", a, b, p[a], p[b]),
                );
            }
        }
        let mut y = x.to_vec();
        y[a] += RESPONSIVENESS_STEP;
        match q.eval(&y) {
            Ok(py) if py[a] > p[a] => {}
            Ok(py) => push(
                Axiom::Responsiveness,
                format!("raising x[{}] by {} moves p from {} to {}", a, RESPONSIVENESS_STEP, p[a], py[a]),
            ),
            Err(e) => push(Axiom::Interiority, format!("evaluation failed: {}", e)),
        }
    }
    let shifted = |h: f64| -> Option<f64> {
        let y: Vec<f64> = x.iter().zip(dir).map(|(v, d)| v + h * d).collect();
        let py = q.eval(&y).ok()?;
        Some(py.iter().zip(&p).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max))
    };
    match (shifted(CONTINUITY_STEP), shifted(CONTINUITY_STEP / 10.0)) {
        (Some(d1), Some(d2)) if d1 <= 1e-3 && d2 <= 0.5 * d1 + 1e-12 => {}
        (d1, d2) => push(
            Axiom::Continuity,
            format!("output moves by {:?} and {:?} for steps {} and {}", d1, d2, CONTINUITY_STEP, CONTINUITY_STEP / 10.0),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn logit_values() {
        let p = logit(1.0, &[1.0, 0.0]);
        let e = std::f64::consts::E;
        assert!((p[0] - e / (e + 1.0)).abs() < 1e-15);
        assert_eq!(logit(0.0, &[3.0, -1.0, 2.0]), vec![1.0 / 3.0; 3]);
        let big = logit(1e6, &[1.0, 0.0]);
        assert!(big[1] > 0.0);
    }

    #[test]
    fn lambda_zero_gives_uniform() {
        let g = corpus::phi();
        let q = qre_fixed_point(&g, &[logistic_qrf(0.0).unwrap()], &MixedProfile::pure(&[3, 3], &[0, 2])).unwrap();
        assert!(q.profile.distance(&MixedProfile::uniform(&[3, 3])) < 1e-12);
    }

    #[test]
    fn gamma1_logit_favors_a1() {
        let g = corpus::gamma1();
        let q = qre_fixed_point(&g, &[logistic_qrf(10.0).unwrap()], &MixedProfile::uniform(&[2, 2])).unwrap();
        assert!(q.residual < RESIDUAL_TOL);
        assert!(q.profile.prob(0, 0) > 0.5);
    }

    #[test]
    fn schedule_shape() {
        let s = default_lambda_schedule(1e3);
        assert_eq!(s.len(), 41);
        assert_eq!(s[0], 0.0);
        assert!((s[1] - 1e-2).abs() < 1e-15 && (s[40] - 1e3).abs() < 1e-9);
    }

    #[test]
    fn audit_logistic() {
        assert!(qrf_regularity_audit(&logistic_qrf(2.0).unwrap(), 200, 1).is_clean());
        let r = qrf_regularity_audit(&logistic_qrf(0.0).unwrap(), 50, 1);
        assert!(r.fails(Axiom::Responsiveness));
    }
}
