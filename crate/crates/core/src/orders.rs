//! Weak orders over small action sets.

use crate::game::PureProfiles;

/// A weak order over `0..n`, stored as a rank per item. Ranks are
/// contiguous from 0 (lowest class) upward.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeakOrder {
    ranks: Vec<usize>,
}

impl WeakOrder {
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.ranks.iter().max().map_or(0, |m| m + 1)
    }

    /// Items grouped by class, lowest class first.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (a, &r) in self.ranks.iter().enumerate() {
            out[r].push(a);
        }
        out
    }

    /// Weak order induced by real values; values within `tol` of the
    /// running class minimum share a class.
    pub fn from_values(values: &[f64], tol: f64) -> WeakOrder {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut ranks = vec![0; values.len()];
        let mut rank = 0;
        let mut anchor = None;
        for &a in &idx {
            match anchor {
                None => anchor = Some(values[a]),
                Some(v) if values[a] - v > tol => {
                    rank += 1;
                    anchor = Some(values[a]);
                }
                _ => {}
            }
            ranks[a] = rank;
        }
        WeakOrder { ranks }
    }
}

/// Every weak order on `n` items (ordered set partitions).
pub fn all_weak_orders(n: usize) -> Vec<WeakOrder> {
    let mut out = Vec::new();
    for ranks in PureProfiles::new(&vec![n.max(1); n]) {
        let k = ranks.iter().max().map_or(0, |m| m + 1);
        if (0..k).all(|r| ranks.contains(&r)) {
            out.push(WeakOrder { ranks });
        }
    }
    out
}
