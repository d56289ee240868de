//! Thin wrapper over the `microlp` simplex solver.

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};

pub(crate) struct Lp {
    problem: Problem,
    vars: Vec<Variable>,
}

pub(crate) struct LpSolution {
    pub objective: f64,
    pub values: Vec<f64>,
}

impl Lp {
    pub fn maximize() -> Self {
        Lp {
            problem: Problem::new(OptimizationDirection::Maximize),
            vars: Vec::new(),
        }
    }

    pub fn minimize() -> Self {
        Lp {
            problem: Problem::new(OptimizationDirection::Minimize),
            vars: Vec::new(),
        }
    }

    pub fn var(&mut self, objective: f64, lo: f64, hi: f64) -> usize {
        self.vars.push(self.problem.add_var(objective, (lo, hi)));
        self.vars.len() - 1
    }

    fn expr(&self, terms: &[(usize, f64)]) -> LinearExpr {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for &(v, c) in terms {
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some(slot) => slot.1 += c,
                None => merged.push((v, c)),
            }
        }
        merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(v, c)| (self.vars[v], c))
            .collect()
    }

    pub fn eq(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let e = self.expr(terms);
        self.problem.add_constraint(e, ComparisonOp::Eq, rhs);
    }

    pub fn ge(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let e = self.expr(terms);
        self.problem.add_constraint(e, ComparisonOp::Ge, rhs);
    }

    pub fn le(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let e = self.expr(terms);
        self.problem.add_constraint(e, ComparisonOp::Le, rhs);
    }

    /// Optimal solution, or `None` when infeasible, unbounded or interrupted.
    pub fn solve(&self) -> Option<LpSolution> {
        let outcome = self.problem.solve().ok()?;
        let sol = outcome.into_solution().ok()?;
        Some(LpSolution {
            objective: sol.objective(),
            values: self.vars.iter().map(|&v| sol.var_value(v)).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_program() {
        let mut lp = Lp::maximize();
        let x = lp.var(1.0, 0.0, f64::INFINITY);
        let y = lp.var(1.0, 0.0, 3.0);
        lp.le(&[(x, 1.0), (y, 1.0), (x, 1.0)], 4.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 3.5).abs() < 1e-9);
        assert!((s.values[x] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_program() {
        let mut lp = Lp::minimize();
        let x = lp.var(1.0, 0.0, 1.0);
        lp.ge(&[(x, 1.0)], 2.0);
        assert!(lp.solve().is_none());
    }
}
