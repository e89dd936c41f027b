//! Randomized cross-checks of the CDCL engine against a truth-table oracle.

use ltlearn::deadline::Deadline;
use ltlearn::rng::SplitMix64;
use ltlearn::sat::{Lit, MaxSatResult, SolveResult, Solver, Var};

/// Bit-parallel truth-table SAT check, independent of the solver. Lanes of a
/// `u64` enumerate the low six variables; the block index enumerates the rest.
fn brute_force_sat(num_vars: usize, clauses: &[Vec<i32>]) -> Option<Vec<bool>> {
    assert!(num_vars <= 22);
    let lane_vars = num_vars.min(6);
    let lane_count = 1usize << lane_vars;
    let lane_mask: u64 = if lane_count == 64 {
        !0
    } else {
        (1u64 << lane_count) - 1
    };
    let mut lane_pattern = [0u64; 6];
    for (v, pat) in lane_pattern.iter_mut().enumerate() {
        for lane in 0..lane_count {
            if lane >> v & 1 == 1 {
                *pat |= 1 << lane;
            }
        }
    }
    let blocks = 1usize << (num_vars - lane_vars);
    for block in 0..blocks {
        let mut mask = lane_mask;
        for clause in clauses {
            let mut cmask = 0u64;
            for &lit in clause {
                let v = lit.unsigned_abs() as usize - 1;
                let positive = lit > 0;
                if v < lane_vars {
                    cmask |= if positive {
                        lane_pattern[v]
                    } else {
                        !lane_pattern[v] & lane_mask
                    };
                } else if (block >> (v - lane_vars) & 1 == 1) == positive {
                    cmask = lane_mask;
                    break;
                }
            }
            mask &= cmask;
            if mask == 0 {
                break;
            }
        }
        if mask != 0 {
            let lane = mask.trailing_zeros() as usize;
            let mut assignment = vec![false; num_vars];
            for (v, slot) in assignment.iter_mut().enumerate() {
                *slot = if v < lane_vars {
                    lane >> v & 1 == 1
                } else {
                    block >> (v - lane_vars) & 1 == 1
                };
            }
            return Some(assignment);
        }
    }
    None
}

fn lit(x: i32) -> Lit {
    Lit::new((x.unsigned_abs() - 1) as Var, x > 0)
}

fn build_solver(num_vars: usize, clauses: &[Vec<i32>]) -> Solver {
    let mut s = Solver::new();
    for _ in 0..num_vars {
        s.new_var();
    }
    for c in clauses {
        let lits: Vec<Lit> = c.iter().map(|&x| lit(x)).collect();
        s.add_clause(&lits);
    }
    s
}

fn satisfies(clauses: &[Vec<i32>], assignment: &dyn Fn(usize) -> bool) -> bool {
    clauses.iter().all(|c| {
        c.iter()
            .any(|&x| assignment(x.unsigned_abs() as usize - 1) == (x > 0))
    })
}

fn random_3cnf(rng: &mut SplitMix64, num_vars: usize, num_clauses: usize) -> Vec<Vec<i32>> {
    let mut clauses = Vec::with_capacity(num_clauses);
    for _ in 0..num_clauses {
        let mut vars = Vec::new();
        while vars.len() < 3.min(num_vars) {
            let v = rng.next_below(num_vars as u64) as i32 + 1;
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        clauses.push(
            vars.into_iter()
                .map(|v| if rng.next_bool() { v } else { -v })
                .collect(),
        );
    }
    clauses
}

#[test]
fn random_3cnf_agrees_with_brute_force() {
    let mut rng = SplitMix64::new(0xC0FFEE);
    for round in 0..100 {
        let num_vars = 5 + rng.next_below(16) as usize; // 5..=20
        let ratio = [30, 43, 55][rng.next_below(3) as usize];
        let num_clauses = (num_vars * ratio / 10).max(1);
        let clauses = random_3cnf(&mut rng, num_vars, num_clauses);
        let oracle = brute_force_sat(num_vars, &clauses);
        let mut solver = build_solver(num_vars, &clauses);
        match solver.solve(&[], Deadline::none()) {
            SolveResult::Sat(model) => {
                assert!(
                    oracle.is_some(),
                    "round {round}: solver SAT but oracle UNSAT"
                );
                assert!(
                    satisfies(&clauses, &|v| model.value(v as Var)),
                    "round {round}: solver model does not satisfy the instance"
                );
            }
            SolveResult::Unsat => {
                assert!(
                    oracle.is_none(),
                    "round {round}: solver UNSAT but oracle SAT"
                );
            }
            SolveResult::Timeout => panic!("round {round}: unexpected timeout"),
        }
    }
}

#[test]
fn learnt_clauses_are_implied() {
    let mut rng = SplitMix64::new(0xBEEF);
    for _ in 0..20 {
        let num_vars = 6 + rng.next_below(6) as usize;
        let clauses = random_3cnf(&mut rng, num_vars, num_vars * 4);
        let base = brute_force_sat(num_vars, &clauses).is_some();
        let mut solver = build_solver(num_vars, &clauses);
        solver.solve(&[], Deadline::none());
        let learnts = solver.learnt_clauses();
        let mut extended = clauses.clone();
        for l in &learnts {
            extended.push(
                l.iter()
                    .map(|&q| {
                        let v = q.var() as i32 + 1;
                        if q.is_positive() {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect(),
            );
        }
        assert_eq!(
            base,
            brute_force_sat(num_vars, &extended).is_some(),
            "appending learnt clauses changed satisfiability"
        );
    }
}

#[test]
fn at_most_projections_match_brute_force() {
    for len in 1..=6usize {
        for k in 0..=len {
            let mut s = Solver::new();
            let vars: Vec<Var> = (0..len).map(|_| s.new_var()).collect();
            let lits: Vec<Lit> = vars.iter().map(|&v| Lit::positive(v)).collect();
            s.add_at_most(&lits, k);
            for mask in 0..1u32 << len {
                let assumptions: Vec<Lit> = vars
                    .iter()
                    .map(|&v| Lit::new(v, mask >> v & 1 == 1))
                    .collect();
                let expect = (mask.count_ones() as usize) <= k;
                let got = s.solve(&assumptions, Deadline::none()).is_sat();
                assert_eq!(got, expect, "len {len} k {k} mask {mask:b}");
            }
        }
    }
}

#[test]
fn maxsat_optimum_matches_brute_force() {
    let mut rng = SplitMix64::new(0xFACade);
    for round in 0..30 {
        let num_vars = 4 + rng.next_below(6) as usize; // 4..=9
        let num_clauses = rng.next_below(3 * num_vars as u64 + 1) as usize;
        let clauses = random_3cnf(&mut rng, num_vars, num_clauses);
        let num_softs = (1 + rng.next_below(12) as usize).min(num_vars * 2);
        let softs: Vec<i32> = (0..num_softs)
            .map(|_| {
                let v = rng.next_below(num_vars as u64) as i32 + 1;
                if rng.next_bool() {
                    v
                } else {
                    -v
                }
            })
            .collect();

        // Oracle: scan every assignment satisfying the hard clauses.
        let mut best: Option<usize> = None;
        for mask in 0..1u64 << num_vars {
            let assign = |v: usize| mask >> v & 1 == 1;
            if !satisfies(&clauses, &assign) {
                continue;
            }
            let count = softs
                .iter()
                .filter(|&&x| assign(x.unsigned_abs() as usize - 1) == (x > 0))
                .count();
            best = Some(best.map_or(count, |b: usize| b.max(count)));
        }

        let mut solver = build_solver(num_vars, &clauses);
        for &x in &softs {
            solver.add_soft(lit(x));
        }
        match solver.maximize_soft(Deadline::none()) {
            MaxSatResult::Optimum { satisfied, model } => {
                assert_eq!(Some(satisfied), best, "round {round}");
                assert!(satisfies(&clauses, &|v| model.value(v as Var)));
            }
            MaxSatResult::Unsat => assert_eq!(best, None, "round {round}"),
            MaxSatResult::Timeout { .. } => panic!("round {round}: unexpected timeout"),
        }
    }
}

#[test]
fn solver_is_deterministic() {
    let mut rng = SplitMix64::new(7);
    let clauses = random_3cnf(&mut rng, 14, 50);
    let run = || {
        let mut s = build_solver(14, &clauses);
        match s.solve(&[], Deadline::none()) {
            SolveResult::Sat(m) => Some((0..14).map(|v| m.value(v as Var)).collect::<Vec<_>>()),
            _ => None,
        }
    };
    assert_eq!(run(), run());
}
