//! Embedded propositional engine: incremental CNF construction, CDCL solving
//! with assumptions, totalizer cardinality constraints, and soft-clause
//! maximization by descending linear search on the at-most bound.

mod solver;
mod totalizer;

pub use solver::{Lit, Model, SolveResult, Solver, Var};
pub use totalizer::Totalizer;

use crate::deadline::Deadline;

/// Outcome of [`Solver::maximize_soft`]. Every improvement is certified by a
/// model; `Optimum` additionally carries an UNSAT certificate at the next
/// tighter bound.
#[derive(Debug)]
pub enum MaxSatResult {
    Optimum { model: Model, satisfied: usize },
    Timeout { best: Option<(Model, usize)> },
    Unsat,
}

impl Solver {
    /// At most `k` of `lits` may be true. `k = 0` degenerates to unit
    /// clauses; `k >= lits.len()` adds nothing.
    pub fn add_at_most(&mut self, lits: &[Lit], k: usize) {
        if k >= lits.len() {
            return;
        }
        if k == 0 {
            for &l in lits {
                self.add_clause(&[!l]);
            }
            return;
        }
        let tot = Totalizer::build(self, lits);
        tot.limit(self, k);
    }

    /// Registers a unit-weight soft literal for [`Solver::maximize_soft`].
    pub fn add_soft(&mut self, lit: Lit) {
        self.softs.push(lit);
    }

    pub fn soft_literals(&self) -> &[Lit] {
        &self.softs
    }

    /// Maximizes the number of true soft literals among models of the hard
    /// clauses. Descending linear search: each improvement is a model, and
    /// the final UNSAT at bound `m - 1` falsified-softs certifies optimality.
    pub fn maximize_soft(&mut self, deadline: Deadline) -> MaxSatResult {
        let softs = self.softs.clone();
        let mut best = match self.solve(&[], deadline) {
            SolveResult::Unsat => return MaxSatResult::Unsat,
            SolveResult::Timeout => return MaxSatResult::Timeout { best: None },
            SolveResult::Sat(model) => {
                let satisfied = softs.iter().filter(|&&l| model.lit(l)).count();
                (model, satisfied)
            }
        };
        if best.1 == softs.len() {
            return MaxSatResult::Optimum {
                model: best.0,
                satisfied: best.1,
            };
        }
        let falsified: Vec<Lit> = softs.iter().map(|&l| !l).collect();
        let tot = Totalizer::build(self, &falsified);
        loop {
            let falsified_now = softs.len() - best.1;
            tot.limit(self, falsified_now - 1);
            match self.solve(&[], deadline) {
                SolveResult::Sat(model) => {
                    let satisfied = softs.iter().filter(|&&l| model.lit(l)).count();
                    debug_assert!(satisfied > best.1);
                    best = (model, satisfied);
                    if best.1 == softs.len() {
                        return MaxSatResult::Optimum {
                            model: best.0,
                            satisfied: best.1,
                        };
                    }
                }
                SolveResult::Unsat => {
                    return MaxSatResult::Optimum {
                        model: best.0,
                        satisfied: best.1,
                    }
                }
                SolveResult::Timeout => return MaxSatResult::Timeout { best: Some(best) },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(x: i32) -> Lit {
        assert!(x != 0);
        let v = (x.unsigned_abs() - 1) as Var;
        Lit::new(v, x > 0)
    }

    fn solver_with_vars(n: usize) -> Solver {
        let mut s = Solver::new();
        for _ in 0..n {
            s.new_var();
        }
        s
    }

    #[test]
    fn contradictory_units_are_unsat() {
        let mut s = solver_with_vars(1);
        s.add_clause(&[lit(1)]);
        s.add_clause(&[lit(-1)]);
        assert!(s.solve(&[], Deadline::none()).is_unsat());
    }

    #[test]
    fn unit_propagation_fixes_model() {
        let mut s = solver_with_vars(2);
        s.add_clause(&[lit(1), lit(2)]);
        s.add_clause(&[lit(-1)]);
        match s.solve(&[], Deadline::none()) {
            SolveResult::Sat(m) => {
                assert!(!m.value(0));
                assert!(m.value(1));
            }
            other => panic!("expected SAT, got {other:?}"),
        }
    }

    #[test]
    fn tautologies_are_dropped() {
        let mut s = solver_with_vars(1);
        let before = s.clause_count();
        s.add_clause(&[lit(1), lit(-1)]);
        assert_eq!(s.clause_count(), before);
        assert!(s.solve(&[], Deadline::none()).is_sat());
    }

    #[test]
    fn empty_clause_is_recorded_as_unsat() {
        let mut s = solver_with_vars(1);
        s.add_clause(&[]);
        assert!(s.solve(&[], Deadline::none()).is_unsat());
    }

    #[test]
    fn empty_instance_is_sat() {
        let mut s = Solver::new();
        match s.solve(&[], Deadline::none()) {
            SolveResult::Sat(m) => assert_eq!(m.num_vars(), 0),
            other => panic!("expected SAT, got {other:?}"),
        }
    }

    #[test]
    fn assumptions_restrict_models() {
        let mut s = solver_with_vars(2);
        s.add_clause(&[lit(1), lit(2)]);
        s.add_clause(&[lit(-1), lit(2)]);
        match s.solve(&[], Deadline::none()) {
            SolveResult::Sat(m) => assert!(m.value(1)),
            other => panic!("expected SAT, got {other:?}"),
        }
        assert!(s.solve(&[lit(-2)], Deadline::none()).is_unsat());
        // The instance itself stays satisfiable after an assumption failure.
        assert!(s.solve(&[], Deadline::none()).is_sat());
    }

    #[test]
    fn pigeonhole_4_into_3_is_unsat() {
        // Variables p[i][j]: pigeon i sits in hole j.
        let mut s = solver_with_vars(12);
        let p = |i: usize, j: usize| lit((i * 3 + j + 1) as i32);
        for i in 0..4 {
            s.add_clause(&[p(i, 0), p(i, 1), p(i, 2)]);
        }
        for j in 0..3 {
            for i in 0..4 {
                for i2 in i + 1..4 {
                    s.add_clause(&[!p(i, j), !p(i2, j)]);
                }
            }
        }
        assert!(s.solve(&[], Deadline::none()).is_unsat());
    }

    #[test]
    fn at_most_one_of_three() {
        // Enumerate all 8 assignments against the constraint via assumptions.
        let mut s = solver_with_vars(3);
        s.add_at_most(&[lit(1), lit(2), lit(3)], 1);
        for mask in 0..8u32 {
            let assumptions: Vec<Lit> = (0..3)
                .map(|v| Lit::new(v as Var, mask >> v & 1 == 1))
                .collect();
            let expect_sat = mask.count_ones() <= 1;
            let got = s.solve(&assumptions, Deadline::none()).is_sat();
            assert_eq!(got, expect_sat, "mask {mask:03b}");
        }
    }

    #[test]
    fn at_most_zero_and_full_bounds() {
        let mut s = solver_with_vars(3);
        let before = s.clause_count();
        s.add_at_most(&[lit(1), lit(2), lit(3)], 3);
        assert_eq!(s.clause_count(), before);
        s.add_at_most(&[lit(1), lit(2)], 0);
        assert!(s.solve(&[lit(1)], Deadline::none()).is_unsat());
        assert!(s.solve(&[lit(-1), lit(-2)], Deadline::none()).is_sat());
    }

    #[test]
    fn maxsat_contradictory_obligations() {
        // hard: s1 -> x, s2 -> !x; soft: s1, s2. Optimum satisfies one.
        let mut s = solver_with_vars(3);
        let (x, s1, s2) = (lit(1), lit(2), lit(3));
        s.add_clause(&[!s1, x]);
        s.add_clause(&[!s2, !x]);
        s.add_soft(s1);
        s.add_soft(s2);
        match s.maximize_soft(Deadline::none()) {
            MaxSatResult::Optimum { satisfied, .. } => assert_eq!(satisfied, 1),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn maxsat_without_softs_is_plain_solve() {
        let mut s = solver_with_vars(1);
        s.add_clause(&[lit(1)]);
        match s.maximize_soft(Deadline::none()) {
            MaxSatResult::Optimum { satisfied, model } => {
                assert_eq!(satisfied, 0);
                assert!(model.value(0));
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn maxsat_unsat_hard_clauses() {
        let mut s = solver_with_vars(2);
        s.add_clause(&[lit(1)]);
        s.add_clause(&[lit(-1)]);
        s.add_soft(lit(2));
        assert!(matches!(
            s.maximize_soft(Deadline::none()),
            MaxSatResult::Unsat
        ));
    }

    #[test]
    fn maxsat_forced_three_false() {
        // 10 softs; hard clauses force softs 1..3 false. Optimum = 7.
        let mut s = solver_with_vars(10);
        for v in 0..10 {
            s.add_soft(Lit::positive(v));
        }
        for v in 0..3 {
            s.add_clause(&[Lit::negative(v)]);
        }
        match s.maximize_soft(Deadline::none()) {
            MaxSatResult::Optimum { satisfied, model } => {
                assert_eq!(satisfied, 7);
                for v in 3..10 {
                    assert!(model.value(v));
                }
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn dimacs_export_shape() {
        let mut s = solver_with_vars(2);
        s.add_clause(&[lit(1), lit(-2)]);
        s.add_clause(&[lit(2)]);
        let text = s.to_dimacs();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("p cnf 2 2"));
        assert_eq!(lines.next(), Some("1 -2 0"));
        assert_eq!(lines.next(), Some("2 0"));
    }
}
