//! Nash equilibrium enumeration.
//!
//! Two-player games are solved exactly by enumerating the vertices of both
//! best-response polytopes, pairing completely labeled vertices into extreme
//! equilibria and grouping them into maximal convex sets (maximal bicliques
//! of the extreme-equilibrium graph). Degenerate games are handled by the
//! same construction: every maximal convex set of equilibria is the product
//! of the convex hulls of one biclique's two vertex sets.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::game::{argmax_set, nash_defect_unchecked, Game, MixedProfile};
use crate::lp::Lp;

/// Largest number of pure profiles accepted by [`enumerate_nash`].
pub const PROFILE_LIMIT: usize = 4096;

/// Tolerance on Nash inequalities for reported profiles.
pub const NASH_TOL: f64 = 1e-9;

const TIGHT_TOL: f64 = 1e-9;

/// A maximal convex set of equilibria: the product over players of the
/// convex hulls of `vertices[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NashComponent {
    pub vertices: Vec<Vec<Vec<f64>>>,
}

impl NashComponent {
    /// Actions played with positive probability at some member, per player.
    pub fn support(&self) -> Vec<Vec<usize>> {
        self.vertices
            .iter()
            .map(|vs| {
                let k = vs[0].len();
                (0..k).filter(|&a| vs.iter().any(|v| v[a] > 0.0)).collect()
            })
            .collect()
    }

    /// Dimension of the parameterization: the number of extra vertices
    /// summed over players.
    pub fn num_parameters(&self) -> usize {
        self.vertices.iter().map(|v| v.len() - 1).sum()
    }

    /// The convex combination with per-player weights over vertices.
    pub fn point(&self, weights: &[Vec<f64>]) -> MixedProfile {
        let probs = self
            .vertices
            .iter()
            .zip(weights)
            .map(|(vs, w)| {
                let mut out = vec![0.0; vs[0].len()];
                for (v, &c) in vs.iter().zip(w) {
                    for (o, x) in out.iter_mut().zip(v) {
                        *o += c * x;
                    }
                }
                out
            })
            .collect();
        MixedProfile::from_raw(probs)
    }

    /// The player whose strategy varies along a one-parameter component.
    pub fn segment_player(&self) -> Option<usize> {
        if self.num_parameters() != 1 {
            return None;
        }
        self.vertices.iter().position(|v| v.len() == 2)
    }

    /// Point at parameter `t` in `[0, 1]` of a one-parameter component
    /// (`t = 0` is the first vertex of the varying player).
    pub fn segment_point(&self, t: f64) -> Option<MixedProfile> {
        let j = self.segment_player()?;
        let weights = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| if i == j { vec![1.0 - t, t] } else { vec![1.0; v.len()] })
            .collect::<Vec<_>>();
        Some(self.point(&weights))
    }

    /// Every vertex combination (extreme points of the component).
    pub fn extreme_points(&self) -> Vec<MixedProfile> {
        let counts: Vec<usize> = self.vertices.iter().map(Vec::len).collect();
        crate::game::PureProfiles::new(&counts)
            .map(|pick| {
                MixedProfile::from_raw(
                    pick.iter()
                        .enumerate()
                        .map(|(i, &k)| self.vertices[i][k].clone())
                        .collect(),
                )
            })
            .collect()
    }

    /// Barycenter of the vertices, per player.
    pub fn centroid(&self) -> MixedProfile {
        let weights: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| vec![1.0 / v.len() as f64; v.len()])
            .collect();
        self.point(&weights)
    }

    /// Sample points: for one-parameter components `points` evenly spaced
    /// parameter values; otherwise the extreme points, the centroid and
    /// `points` values along each segment from the centroid to an extreme
    /// point.
    pub fn grid(&self, points: usize) -> Vec<MixedProfile> {
        let points = points.max(2);
        if self.num_parameters() == 1 {
            return (0..points)
                .map(|k| self.segment_point(k as f64 / (points - 1) as f64).expect("segment"))
                .collect();
        }
        let c = self.centroid();
        let mut out = vec![c.clone()];
        for e in self.extreme_points() {
            for k in 1..points {
                let t = k as f64 / (points - 1) as f64;
                let probs = c
                    .as_vecs()
                    .iter()
                    .zip(e.as_vecs())
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect())
                    .collect();
                out.push(MixedProfile::from_raw(probs));
            }
        }
        out
    }

    /// Max-norm distance from `p` to the component.
    pub fn distance_to(&self, p: &MixedProfile) -> f64 {
        self.closest_point(p).map_or(f64::INFINITY, |(_, d)| d)
    }

    /// Point of the component nearest to `p` in max norm, with the distance.
    pub fn closest_point(&self, p: &MixedProfile) -> Option<(MixedProfile, f64)> {
        let mut lp = Lp::minimize();
        let r = lp.var(1.0, 0.0, f64::INFINITY);
        let mut weights = Vec::new();
        for (i, vs) in self.vertices.iter().enumerate() {
            let w: Vec<usize> = vs.iter().map(|_| lp.var(0.0, 0.0, 1.0)).collect();
            lp.eq(&w.iter().map(|&k| (k, 1.0)).collect::<Vec<_>>(), 1.0);
            for a in 0..vs[0].len() {
                let mut terms: Vec<(usize, f64)> = w.iter().zip(vs).map(|(&k, v)| (k, v[a])).collect();
                terms.push((r, 1.0));
                lp.ge(&terms, p.prob(i, a));
                let mut terms: Vec<(usize, f64)> = w.iter().zip(vs).map(|(&k, v)| (k, -v[a])).collect();
                terms.push((r, 1.0));
                lp.ge(&terms, -p.prob(i, a));
            }
            weights.push(w);
        }
        let sol = lp.solve()?;
        let w: Vec<Vec<f64>> = weights
            .iter()
            .map(|ws| {
                let v: Vec<f64> = ws.iter().map(|&k| sol.values[k].max(0.0)).collect();
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect()
            })
            .collect();
        let q = self.point(&w);
        let d = q.distance(p);
        Some((q, d))
    }
}

/// Result of [`enumerate_nash`].
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    pub isolated: Vec<MixedProfile>,
    pub components: Vec<NashComponent>,
    /// Notes on degenerate vertices and discarded candidates.
    pub diagnostics: Vec<String>,
}

impl EquilibriumSet {
    /// The equilibrium nearest to `p` in max norm, with its distance.
    pub fn nearest(&self, p: &MixedProfile) -> Option<(MixedProfile, f64)> {
        let mut best: Option<(MixedProfile, f64)> = None;
        let candidates = self
            .isolated
            .iter()
            .map(|e| (e.clone(), e.distance(p)))
            .chain(self.components.iter().filter_map(|c| c.closest_point(p)));
        for (q, d) in candidates {
            if best.as_ref().is_none_or(|b| d < b.1) {
                best = Some((q, d));
            }
        }
        best
    }

    pub fn len(&self) -> usize {
        self.isolated.len() + self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Enumerates all Nash equilibria of a one- or two-player game.
pub fn enumerate_nash(g: &Game) -> Result<EquilibriumSet> {
    if g.profile_count() > PROFILE_LIMIT {
        return Err(Error::Unsupported(format!(
            "{} pure profiles exceed the enumeration limit of {}",
            g.profile_count(),
            PROFILE_LIMIT
        )));
    }
    match g.num_players() {
        1 => Ok(single_player(g)),
        2 => two_player(g),
        n => Err(Error::Unsupported(format!(
            "equilibrium enumeration handles one or two players, game has {}",
            n
        ))),
    }
}

fn single_player(g: &Game) -> EquilibriumSet {
    let u: Vec<f64> = (0..g.num_actions(0)).map(|a| g.payoff(&[a], 0)).collect();
    let best = argmax_set(&u, 0.0);
    let k = u.len();
    let pure = |a: usize| {
        let mut v = vec![0.0; k];
        v[a] = 1.0;
        v
    };
    if best.len() == 1 {
        EquilibriumSet {
            isolated: vec![MixedProfile::from_raw(vec![pure(best[0])])],
            components: vec![],
            diagnostics: vec![],
        }
    } else {
        EquilibriumSet {
            isolated: vec![],
            components: vec![NashComponent {
                vertices: vec![best.into_iter().map(pure).collect()],
            }],
            diagnostics: vec![],
        }
    }
}

/// Vertex of a best-response polytope with its set of tight constraints.
struct Vertex {
    point: Vec<f64>,
    labels: Vec<bool>,
}

/// Vertices of `{z >= 0, M z <= 1}` where `M` has `rows` rows and `dim`
/// columns. Label `k < dim` marks `z_k = 0`; label `dim + r` marks row `r`
/// tight. When `swap` is set, the two label blocks are exchanged so that
/// both polytopes share the same label numbering.
fn polytope_vertices(m: &[Vec<f64>], dim: usize, diagnostics: &mut Vec<String>, who: &str) -> Vec<Vertex> {
    let rows = m.len();
    let total = dim + rows;
    let mut out: Vec<Vertex> = Vec::new();
    let mut pick: Vec<usize> = (0..dim).collect();
    loop {
        let mut a = DMatrix::<f64>::zeros(dim, dim);
        let mut b = DVector::<f64>::zeros(dim);
        for (r, &c) in pick.iter().enumerate() {
            if c < dim {
                a[(r, c)] = 1.0;
            } else {
                for k in 0..dim {
                    a[(r, k)] = m[c - dim][k];
                }
                b[r] = 1.0;
            }
        }
        let lu = a.clone().full_piv_lu();
        let scale: f64 = (0..dim)
            .map(|r| a.row(r).iter().map(|x| x * x).sum::<f64>().sqrt())
            .product();
        if lu.determinant().abs() > 1e-10 * scale {
            if let Some(z) = lu.solve(&b) {
                let z: Vec<f64> = z.iter().copied().collect();
                let feasible = z.iter().all(|&x| x >= -1e-10)
                    && m.iter().all(|row| dot(row, &z) <= 1.0 + 1e-10);
                if feasible {
                    let z: Vec<f64> = z.into_iter().map(|x| if x < 0.0 { 0.0 } else { x }).collect();
                    if !out.iter().any(|v| max_gap(&v.point, &z) < 1e-9) {
                        let mut labels = vec![false; total];
                        for k in 0..dim {
                            labels[k] = z[k] <= TIGHT_TOL;
                        }
                        for (r, row) in m.iter().enumerate() {
                            labels[dim + r] = (1.0 - dot(row, &z)).abs() <= TIGHT_TOL;
                        }
                        let tight = labels.iter().filter(|&&l| l).count();
                        if tight > dim && z.iter().any(|&x| x > 0.0) {
                            diagnostics.push(format!(
                                "degenerate {} vertex with {} tight constraints in dimension {}",
                                who, tight, dim
                            ));
                        }
                        out.push(Vertex { point: z, labels });
                    }
                }
            }
        }
        if !next_combination(&mut pick, total) {
            break;
        }
    }
    out
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Scales to the simplex, dropping pivoting residue below `1e-12`.
fn normalized(z: &[f64]) -> Vec<f64> {
    let s: f64 = z.iter().sum();
    let snapped: Vec<f64> = z.iter().map(|&x| if x.abs() <= 1e-12 * s { 0.0 } else { x }).collect();
    let t: f64 = snapped.iter().sum();
    snapped.into_iter().map(|x| x / t).collect()
}

fn positive_shift(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let lo = m.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let hi = m.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = (hi - lo).max(1.0);
    m.iter()
        .map(|r| r.iter().map(|x| (x - lo) / scale + 1.0).collect())
        .collect()
}

fn two_player(g: &Game) -> Result<EquilibriumSet> {
    let m = g.num_actions(0);
    let n = g.num_actions(1);
    let mut diagnostics = Vec::new();
    // Player 1's polytope P = {x >= 0, B^T x <= 1}: rows indexed by player 2's actions.
    let bt = positive_shift(&g.own_matrix(1));
    // Player 2's polytope Q = {y >= 0, A y <= 1}: rows indexed by player 1's actions.
    let a = positive_shift(&g.own_matrix(0));
    let px = polytope_vertices(&bt, m, &mut diagnostics, "P1");
    let qy = polytope_vertices(&a, n, &mut diagnostics, "P2");
    // Common labels: 0..m are player 1's actions, m..m+n player 2's.
    // In P, label k < m is x_k = 0 and m + j is column j tight: already aligned.
    // In Q, label j < n is y_j = 0 (global m + j) and n + i is row i tight (global i).
    let x_labels: Vec<Vec<bool>> = px.iter().map(|v| v.labels.clone()).collect();
    let y_labels: Vec<Vec<bool>> = qy
        .iter()
        .map(|v| {
            let mut l = vec![false; m + n];
            for j in 0..n {
                l[m + j] = v.labels[j];
            }
            for i in 0..m {
                l[i] = v.labels[n + i];
            }
            l
        })
        .collect();
    let xs: Vec<usize> = (0..px.len()).filter(|&k| px[k].point.iter().any(|&x| x > 0.0)).collect();
    let ys: Vec<usize> = (0..qy.len()).filter(|&k| qy[k].point.iter().any(|&x| x > 0.0)).collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for &i in &xs {
        for &j in &ys {
            if (0..m + n).all(|l| x_labels[i][l] || y_labels[j][l]) {
                edges.push((i, j));
            }
        }
    }
    let bicliques = maximal_bicliques(&edges)?;
    let mut isolated = Vec::new();
    let mut components = Vec::new();
    for (left, right) in bicliques {
        let xv: Vec<Vec<f64>> = left.iter().map(|&i| normalized(&px[i].point)).collect();
        let yv: Vec<Vec<f64>> = right.iter().map(|&j| normalized(&qy[j].point)).collect();
        let mut ok = true;
        for x in &xv {
            for y in &yv {
                let p = MixedProfile::from_raw(vec![x.clone(), y.clone()]);
                let d = nash_defect_unchecked(g, &p);
                if d > NASH_TOL {
                    diagnostics.push(format!("discarded extreme pair with Nash defect {:e}", d));
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        if xv.len() == 1 && yv.len() == 1 {
            isolated.push(MixedProfile::from_raw(vec![xv[0].clone(), yv[0].clone()]));
        } else {
            components.push(NashComponent {
                vertices: vec![xv, yv],
            });
        }
    }
    Ok(EquilibriumSet {
        isolated,
        components,
        diagnostics,
    })
}

type Biclique = (Vec<usize>, Vec<usize>);

/// Maximal complete bipartite subgraphs of the given edge set.
fn maximal_bicliques(edges: &[(usize, usize)]) -> Result<Vec<Biclique>> {
    let mut left: Vec<usize> = edges.iter().map(|e| e.0).collect();
    left.sort_unstable();
    left.dedup();
    if left.len() > 20 {
        return Err(Error::Unsupported(format!(
            "{} extreme strategies exceed the clique search limit",
            left.len()
        )));
    }
    let nbrs = |i: usize| -> Vec<usize> { edges.iter().filter(|e| e.0 == i).map(|e| e.1).collect() };
    let mut found: Vec<Biclique> = Vec::new();
    for mask in 1u32..(1u32 << left.len()) {
        let subset: Vec<usize> = (0..left.len()).filter(|b| mask & (1 << b) != 0).map(|b| left[b]).collect();
        let mut common = nbrs(subset[0]);
        for &i in &subset[1..] {
            let ni = nbrs(i);
            common.retain(|j| ni.contains(j));
        }
        if common.is_empty() {
            continue;
        }
        let closure: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| {
                let ni = nbrs(i);
                common.iter().all(|j| ni.contains(j))
            })
            .collect();
        let cand = (closure, common);
        if !found.contains(&cand) {
            found.push(cand);
        }
    }
    let maximal: Vec<Biclique> = found
        .iter()
        .filter(|(l, r)| {
            !found.iter().any(|(l2, r2)| {
                (l2.len() + r2.len() > l.len() + r.len())
                    && l.iter().all(|x| l2.contains(x))
                    && r.iter().all(|y| r2.contains(y))
            })
        })
        .cloned()
        .collect();
    Ok(maximal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn combinations_cover_all_subsets() {
        let mut pick = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut pick, 4) {
            count += 1;
        }
        assert_eq!(count, 6);
    }

    #[test]
    fn gamma1_has_two_pure_equilibria() {
        let e = enumerate_nash(&corpus::gamma1()).unwrap();
        assert!(e.components.is_empty());
        assert_eq!(e.isolated.len(), 2);
    }

    #[test]
    fn psi_has_one_segment() {
        let e = enumerate_nash(&corpus::psi()).unwrap();
        assert!(e.isolated.is_empty());
        assert_eq!(e.components.len(), 1);
        let c = &e.components[0];
        assert_eq!(c.segment_player(), Some(0));
        assert_eq!(c.vertices[1], vec![vec![1.0, 0.0]]);
    }

    #[test]
    fn single_player_ties_form_a_component() {
        let g = Game::new(vec!["A".into()], vec![vec!["x".into(), "y".into(), "z".into()]], vec![1.0, 1.0, 0.0]).unwrap();
        let e = enumerate_nash(&g).unwrap();
        assert_eq!(e.components.len(), 1);
        assert_eq!(e.components[0].vertices[0].len(), 2);
    }

    #[test]
    fn three_players_unsupported() {
        let g = Game::from_fn(
            vec!["A".into(), "B".into(), "C".into()],
            vec![vec!["x".into()], vec!["y".into()], vec!["z".into()]],
            |_| vec![0.0; 3],
        )
        .unwrap();
        assert!(matches!(enumerate_nash(&g), Err(Error::Unsupported(_))));
    }
}
