//! Projected-gradient penalty minimization over boxes intersected with
//! probability simplices. Used as the witness search for games with more
//! than two players, where the exact linear programs do not apply.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::MixedProfile;

/// Per-player lower and upper bounds on probabilities.
#[derive(Debug, Clone)]
pub(crate) struct Bounds {
    pub lo: Vec<Vec<f64>>,
    pub hi: Vec<Vec<f64>>,
}

impl Bounds {
    /// Max-norm ball of radius `r` around `center`, clipped to `[floor, 1]`.
    pub fn around(center: &MixedProfile, r: f64, floor: f64) -> Bounds {
        let lo = center
            .as_vecs()
            .iter()
            .map(|v| v.iter().map(|x| (x - r).max(floor)).collect())
            .collect();
        let hi = center
            .as_vecs()
            .iter()
            .map(|v| v.iter().map(|x| (x + r).min(1.0)).collect())
            .collect();
        Bounds { lo, hi }
    }

    pub fn feasible(&self) -> bool {
        self.lo.iter().zip(&self.hi).all(|(l, h)| {
            l.iter().zip(h).all(|(a, b)| a <= b) && l.iter().sum::<f64>() <= 1.0 && h.iter().sum::<f64>() >= 1.0
        })
    }

    fn project(&self, probs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        probs
            .iter()
            .enumerate()
            .map(|(i, v)| project_box_simplex(v, &self.lo[i], &self.hi[i]))
            .collect()
    }
}

/// Euclidean projection of `v` onto `{x : sum x = 1, lo <= x <= hi}` by
/// bisection on the shift.
pub(crate) fn project_box_simplex(v: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let at = |s: f64| -> f64 { v.iter().zip(lo).zip(hi).map(|((x, l), h)| (x - s).clamp(*l, *h)).sum() };
    let mut a = v.iter().zip(hi).map(|(x, h)| x - h).fold(f64::INFINITY, f64::min) - 1.0;
    let mut b = v.iter().zip(lo).map(|(x, l)| x - l).fold(f64::NEG_INFINITY, f64::max) + 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if at(mid) > 1.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-16 {
            break;
        }
    }
    let s = 0.5 * (a + b);
    v.iter().zip(lo).zip(hi).map(|((x, l), h)| (x - s).clamp(*l, *h)).collect()
}

/// Minimizes `penalty` over `bounds` from `seeds` random starts plus
/// `starts`, returning the best point found.
pub(crate) fn minimize<F>(
    penalty: F,
    bounds: &Bounds,
    starts: &[MixedProfile],
    seeds: usize,
    rng_seed: u64,
    iterations: usize,
) -> Option<(MixedProfile, f64)>
where
    F: Fn(&MixedProfile) -> f64,
{
    if !bounds.feasible() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut initial: Vec<Vec<Vec<f64>>> = starts.iter().map(|s| bounds.project(s.as_vecs())).collect();
    for _ in 0..seeds {
        let raw: Vec<Vec<f64>> = bounds
            .lo
            .iter()
            .zip(&bounds.hi)
            .map(|(l, h)| l.iter().zip(h).map(|(a, b)| a + (b - a) * rng.gen::<f64>()).collect())
            .collect();
        initial.push(bounds.project(&raw));
    }
    let eval = |x: &[Vec<f64>]| penalty(&MixedProfile::from_raw(x.to_vec()));
    let mut best: Option<(Vec<Vec<f64>>, f64)> = None;
    for x0 in initial {
        let (x, f) = descend(&eval, bounds, x0, iterations);
        if best.as_ref().is_none_or(|b| f < b.1) {
            best = Some((x, f));
        }
        if f == 0.0 {
            break;
        }
    }
    best.map(|(x, f)| (MixedProfile::from_raw(x), f))
}

fn descend<F>(eval: &F, bounds: &Bounds, mut x: Vec<Vec<f64>>, iterations: usize) -> (Vec<Vec<f64>>, f64)
where
    F: Fn(&[Vec<f64>]) -> f64,
{
    let mut f = eval(&x);
    let mut step = 1.0;
    for _ in 0..iterations {
        if f == 0.0 {
            break;
        }
        let h = 1e-8;
        let mut grad: Vec<Vec<f64>> = x.iter().map(|v| vec![0.0; v.len()]).collect();
        for i in 0..x.len() {
            for a in 0..x[i].len() {
                let mut xp = x.clone();
                xp[i][a] += h;
                let mut xm = x.clone();
                xm[i][a] -= h;
                grad[i][a] = (eval(&xp) - eval(&xm)) / (2.0 * h);
            }
        }
        let gnorm: f64 = grad.iter().flatten().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm == 0.0 || !gnorm.is_finite() {
            break;
        }
        let mut improved = false;
        while step > 1e-14 {
            let trial: Vec<Vec<f64>> = x
                .iter()
                .zip(&grad)
                .map(|(v, g)| v.iter().zip(g).map(|(a, b)| a - step * b / gnorm).collect())
                .collect();
            let trial = bounds.project(&trial);
            let ft = eval(&trial);
            if ft < f {
                x = trial;
                f = ft;
                step *= 2.0;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_respects_bounds() {
        let x = project_box_simplex(&[0.9, 0.9, -0.5], &[0.0, 0.0, 0.1], &[0.6, 1.0, 1.0]);
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(x[0] <= 0.6 + 1e-15 && x[2] >= 0.1 - 1e-15);
    }

    #[test]
    fn finds_a_target_point() {
        let center = MixedProfile::uniform(&[2, 3]);
        let b = Bounds::around(&center, 1.0, 0.0);
        let target = [0.2, 0.8];
        let (p, f) = minimize(
            |p| {
                let d = p.prob(0, 0) - target[0];
                let e = p.prob(1, 2) - 0.5;
                d * d + e * e
            },
            &b,
            &[center.clone()],
            4,
            7,
            500,
        )
        .unwrap();
        assert!(f < 1e-10, "{}", f);
        assert!((p.prob(0, 1) - target[1]).abs() < 1e-4);
    }
}
