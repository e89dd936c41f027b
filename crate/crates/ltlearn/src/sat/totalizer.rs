//! Totalizer cardinality encoding (layered unary counting network).
//!
//! The network only needs the input-to-output direction for at-most-k
//! constraints: if more than `k` inputs hold, output `k` (0-based) is forced
//! and a single unit clause closes the contradiction. Keeping the outputs
//! around lets the MaxSAT descent tighten the bound incrementally with one
//! unit per step instead of re-encoding.

use super::solver::{Lit, Solver};

pub struct Totalizer {
    outputs: Vec<Lit>,
}

impl Totalizer {
    /// Builds the counting network over `inputs`. `outputs()[j]` is forced
    /// true whenever at least `j + 1` inputs are true.
    pub fn build(solver: &mut Solver, inputs: &[Lit]) -> Totalizer {
        Totalizer {
            outputs: build_tree(solver, inputs),
        }
    }

    pub fn outputs(&self) -> &[Lit] {
        &self.outputs
    }

    /// Constrains at most `k` of the inputs to be true. Monotone: tightening
    /// an already-limited network just adds one more unit clause.
    pub fn limit(&self, solver: &mut Solver, k: usize) {
        if k < self.outputs.len() {
            solver.add_clause(&[!self.outputs[k]]);
        }
    }
}

fn build_tree(solver: &mut Solver, inputs: &[Lit]) -> Vec<Lit> {
    match inputs.len() {
        0 => Vec::new(),
        1 => vec![inputs[0]],
        n => {
            let (a, b) = inputs.split_at(n / 2);
            let left = build_tree(solver, a);
            let right = build_tree(solver, b);
            merge(solver, &left, &right)
        }
    }
}

fn merge(solver: &mut Solver, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
    let (p, q) = (a.len(), b.len());
    let out: Vec<Lit> = (0..p + q).map(|_| Lit::positive(solver.new_var())).collect();
    for alpha in 0..=p {
        for beta in 0..=q {
            if alpha + beta == 0 {
                continue;
            }
            let mut clause = Vec::with_capacity(3);
            if alpha > 0 {
                clause.push(!a[alpha - 1]);
            }
            if beta > 0 {
                clause.push(!b[beta - 1]);
            }
            clause.push(out[alpha + beta - 1]);
            solver.add_clause(&clause);
        }
    }
    out
}
