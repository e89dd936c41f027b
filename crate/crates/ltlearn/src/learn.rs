//! SAT/MaxSAT learning of bounded-size syntax DAGs from labeled traces.
//!
//! The encoding places `n` numbered nodes with the root at node `n`; children
//! point strictly downward and node 1 always carries a proposition, which
//! prunes symmetric numberings. Per-node label variables `x[i, lab]` and
//! child selectors `l[i, j]`, `r[i, j]` describe the structure; per-trace
//! variables `y[u, i, t]` mirror the finite-trace semantics of node `i` at
//! position `t`. Consistency with a labeled trace is a unit on the root's
//! `y` at position 0 — or, in noisy mode, a unit relaxed by a per-trace
//! selector that a cardinality bound (decision) or soft maximization
//! (optimize) keeps in check.
//!
//! Every learned formula is re-audited with the evaluator before it is
//! returned; solver-side `y` variables are never trusted for reporting.

use crate::deadline::Deadline;
use crate::ltl::{BinaryOp, FormulaBuilder, LtlFormula, LtlNode, UnaryOp};
use crate::sat::{Lit, MaxSatResult, Model, SolveResult, Solver, Var};
use crate::trace::{Sample, Trace};
use std::collections::HashMap;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Not,
    And,
    Or,
    Implies,
    Next,
    Finally,
    Globally,
    Until,
}

const OPS: [Op; 8] = [
    Op::Not,
    Op::And,
    Op::Or,
    Op::Implies,
    Op::Next,
    Op::Finally,
    Op::Globally,
    Op::Until,
];

impl Op {
    fn is_binary(self) -> bool {
        matches!(self, Op::And | Op::Or | Op::Implies | Op::Until)
    }

    fn index(self) -> usize {
        OPS.iter().position(|&o| o == self).unwrap()
    }
}

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("sample has no negative traces; exact learning needs both labels")]
    EmptyNegatives,
    #[error("kappa {0} is outside [0, 1]")]
    KappaRange(f64),
    #[error("formula of size {size} exceeds the encoding budget {budget}")]
    FormulaTooLarge { size: usize, budget: usize },
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnStatus {
    Exact,
    WithinThreshold,
    Unsat,
    Timeout,
}

impl LearnStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LearnStatus::Exact => "Exact",
            LearnStatus::WithinThreshold => "WithinThreshold",
            LearnStatus::Unsat => "Unsat",
            LearnStatus::Timeout => "Timeout",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LearnResult {
    pub formula: Option<LtlFormula>,
    pub size: Option<u32>,
    pub misclassified: usize,
    pub rate: f64,
    pub status: LearnStatus,
    pub elapsed: Duration,
}

impl LearnResult {
    fn empty(status: LearnStatus, start: Instant) -> LearnResult {
        LearnResult {
            formula: None,
            size: None,
            misclassified: 0,
            rate: 0.0,
            status,
            elapsed: start.elapsed(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisyMode {
    Decision,
    Optimize,
}

/// `floor(x)` robust against products like `0.3 * 10` landing just below the
/// true integer; fractional gaps at sample scale are far larger than the
/// guard.
pub(crate) fn floor_with_guard(x: f64) -> usize {
    (x + 1e-9).floor().max(0.0) as usize
}

// ---------------------------------------------------------------------------
// Encoding

/// One size-`n` syntax-DAG encoding bound to a solver. Traces can be added
/// incrementally; structure variables stay fixed.
pub struct DagEncoding {
    size: usize,
    props: Vec<String>,
    num_labels: usize,
    x: Vec<Var>,
    left: Vec<Var>,
    right: Vec<Var>,
    child_offset: Vec<usize>,
    words: Vec<WordVars>,
}

struct WordVars {
    y: Vec<Var>,
    len: usize,
}

impl DagEncoding {
    /// Allocates structure variables and posts the structural constraints:
    /// exactly one label per node, exactly one left and right child below
    /// each non-bottom node, and a proposition label on node 1.
    pub fn new(solver: &mut Solver, props: &[String], size: usize) -> DagEncoding {
        assert!(size >= 1 && !props.is_empty());
        let num_labels = props.len() + OPS.len();
        let x: Vec<Var> = (0..size * num_labels).map(|_| solver.new_var()).collect();
        let mut child_offset = vec![0usize; size];
        let mut total = 0;
        for (i, off) in child_offset.iter_mut().enumerate() {
            *off = total;
            total += i;
        }
        let left: Vec<Var> = (0..total).map(|_| solver.new_var()).collect();
        let right: Vec<Var> = (0..total).map(|_| solver.new_var()).collect();
        let enc = DagEncoding {
            size,
            props: props.to_vec(),
            num_labels,
            x,
            left,
            right,
            child_offset,
            words: Vec::new(),
        };

        for node in 0..size {
            let row: Vec<Lit> = (0..num_labels)
                .map(|lab| Lit::positive(enc.x_var(node, lab)))
                .collect();
            solver.add_clause(&row);
            exactly_one_pairwise(solver, &row);
        }
        // Node 1 (index 0) carries a proposition.
        let prop_row: Vec<Lit> = (0..enc.props.len())
            .map(|p| Lit::positive(enc.x_var(0, p)))
            .collect();
        solver.add_clause(&prop_row);
        for node in 1..size {
            for table in [&enc.left, &enc.right] {
                let row: Vec<Lit> = (0..node)
                    .map(|j| Lit::positive(table[enc.child_offset[node] + j]))
                    .collect();
                solver.add_clause(&row);
                exactly_one_pairwise(solver, &row);
            }
        }
        enc
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    fn x_var(&self, node: usize, label: usize) -> Var {
        self.x[node * self.num_labels + label]
    }

    fn left_var(&self, node: usize, child: usize) -> Var {
        self.left[self.child_offset[node] + child]
    }

    fn right_var(&self, node: usize, child: usize) -> Var {
        self.right[self.child_offset[node] + child]
    }

    fn op_label(&self, op: Op) -> usize {
        self.props.len() + op.index()
    }

    /// Posts the semantic constraints of one trace and returns its word
    /// index. Semantics are conditioned on labels and child selectors;
    /// temporal operators use the backward recurrence with the past-the-end
    /// value false (true for `G`), which realizes strong Next and reflexive
    /// `F`/`G`/`U` on finite traces.
    pub fn add_trace(&mut self, solver: &mut Solver, trace: &Trace) -> usize {
        assert_eq!(trace.width(), self.props.len());
        let n = self.size;
        let k = trace.len();
        let y: Vec<Var> = (0..n * k).map(|_| solver.new_var()).collect();
        let yl = |node: usize, t: usize| Lit::positive(y[node * k + t]);

        for node in 0..n {
            for p in 0..self.props.len() {
                let gx = !Lit::positive(self.x_var(node, p));
                for t in 0..k {
                    let lit = if trace.step(t).bit(p) {
                        yl(node, t)
                    } else {
                        !yl(node, t)
                    };
                    solver.add_clause(&[gx, lit]);
                }
            }
            if node == 0 {
                continue;
            }
            for child in 0..node {
                let gl = !Lit::positive(self.left_var(node, child));
                for op in [Op::Not, Op::Next, Op::Finally, Op::Globally] {
                    let gx = !Lit::positive(self.x_var(node, self.op_label(op)));
                    for t in 0..k {
                        let a = yl(node, t);
                        let b = yl(child, t);
                        let last = t + 1 == k;
                        match op {
                            Op::Not => {
                                solver.add_clause(&[gx, gl, !a, !b]);
                                solver.add_clause(&[gx, gl, a, b]);
                            }
                            Op::Next => {
                                if last {
                                    solver.add_clause(&[gx, gl, !a]);
                                } else {
                                    let bn = yl(child, t + 1);
                                    solver.add_clause(&[gx, gl, !a, bn]);
                                    solver.add_clause(&[gx, gl, a, !bn]);
                                }
                            }
                            Op::Finally => {
                                if last {
                                    solver.add_clause(&[gx, gl, !a, b]);
                                    solver.add_clause(&[gx, gl, a, !b]);
                                } else {
                                    let d = yl(node, t + 1);
                                    solver.add_clause(&[gx, gl, !a, b, d]);
                                    solver.add_clause(&[gx, gl, a, !b]);
                                    solver.add_clause(&[gx, gl, a, !d]);
                                }
                            }
                            Op::Globally => {
                                if last {
                                    solver.add_clause(&[gx, gl, !a, b]);
                                    solver.add_clause(&[gx, gl, a, !b]);
                                } else {
                                    let d = yl(node, t + 1);
                                    solver.add_clause(&[gx, gl, a, !b, !d]);
                                    solver.add_clause(&[gx, gl, !a, b]);
                                    solver.add_clause(&[gx, gl, !a, d]);
                                }
                            }
                            _ => unreachable!(),
                        }
                    }
                }
                for right_child in 0..node {
                    let gr = !Lit::positive(self.right_var(node, right_child));
                    for op in [Op::And, Op::Or, Op::Implies, Op::Until] {
                        let gx = !Lit::positive(self.x_var(node, self.op_label(op)));
                        for t in 0..k {
                            let a = yl(node, t);
                            let b = yl(child, t);
                            let c = yl(right_child, t);
                            match op {
                                Op::And => {
                                    solver.add_clause(&[gx, gl, gr, !a, b]);
                                    solver.add_clause(&[gx, gl, gr, !a, c]);
                                    solver.add_clause(&[gx, gl, gr, a, !b, !c]);
                                }
                                Op::Or => {
                                    solver.add_clause(&[gx, gl, gr, !a, b, c]);
                                    solver.add_clause(&[gx, gl, gr, a, !b]);
                                    solver.add_clause(&[gx, gl, gr, a, !c]);
                                }
                                Op::Implies => {
                                    solver.add_clause(&[gx, gl, gr, !a, !b, c]);
                                    solver.add_clause(&[gx, gl, gr, a, b]);
                                    solver.add_clause(&[gx, gl, gr, a, !c]);
                                }
                                Op::Until => {
                                    if t + 1 == k {
                                        solver.add_clause(&[gx, gl, gr, !a, c]);
                                        solver.add_clause(&[gx, gl, gr, a, !c]);
                                    } else {
                                        let d = yl(node, t + 1);
                                        solver.add_clause(&[gx, gl, gr, !a, c, b]);
                                        solver.add_clause(&[gx, gl, gr, !a, c, d]);
                                        solver.add_clause(&[gx, gl, gr, a, !c]);
                                        solver.add_clause(&[gx, gl, gr, a, !b, !d]);
                                    }
                                }
                                _ => unreachable!(),
                            }
                        }
                    }
                }
            }
        }
        self.words.push(WordVars { y, len: k });
        self.words.len() - 1
    }

    /// The root's semantic variable at position 0 for an added word.
    pub fn root_lit(&self, word: usize) -> Lit {
        let w = &self.words[word];
        Lit::positive(w.y[(self.size - 1) * w.len])
    }

    /// All structure variables in allocation order (labels, left, right).
    pub fn structure_vars(&self) -> Vec<Var> {
        let mut vars = self.x.clone();
        vars.extend_from_slice(&self.left);
        vars.extend_from_slice(&self.right);
        vars
    }

    /// Reads the structure out of a model. Unreachable nodes are dropped and
    /// the result is re-interned, so its size never exceeds the budget.
    pub fn decode(&self, model: &Model) -> LtlFormula {
        let mut builder = FormulaBuilder::new();
        let mut refs = Vec::with_capacity(self.size);
        for node in 0..self.size {
            let labels: Vec<usize> = (0..self.num_labels)
                .filter(|&lab| model.value(self.x_var(node, lab)))
                .collect();
            assert_eq!(labels.len(), 1, "model violates exactly-one label");
            let lab = labels[0];
            let nref = if lab < self.props.len() {
                builder.atom(&self.props[lab])
            } else {
                assert!(node > 0, "node 1 must carry a proposition label");
                let op = OPS[lab - self.props.len()];
                let lefts: Vec<usize> = (0..node)
                    .filter(|&j| model.value(self.left_var(node, j)))
                    .collect();
                assert_eq!(lefts.len(), 1, "model violates exactly-one left child");
                let l = refs[lefts[0]];
                if op.is_binary() {
                    let rights: Vec<usize> = (0..node)
                        .filter(|&j| model.value(self.right_var(node, j)))
                        .collect();
                    assert_eq!(rights.len(), 1, "model violates exactly-one right child");
                    let r = refs[rights[0]];
                    match op {
                        Op::And => builder.and(l, r),
                        Op::Or => builder.or(l, r),
                        Op::Implies => builder.implies(l, r),
                        Op::Until => builder.until(l, r),
                        _ => unreachable!(),
                    }
                } else {
                    match op {
                        Op::Not => builder.not(l),
                        Op::Next => builder.next(l),
                        Op::Finally => builder.finally(l),
                        Op::Globally => builder.globally(l),
                        _ => unreachable!(),
                    }
                }
            };
            refs.push(nref);
        }
        builder.build(refs[self.size - 1])
    }

    /// The positive structure literals of the part of a model reachable from
    /// the root; negating them blocks every padding of this configuration.
    pub fn reachable_structure_lits(&self, model: &Model) -> Vec<Lit> {
        let mut lits = Vec::new();
        let mut stack = vec![self.size - 1];
        let mut seen = vec![false; self.size];
        while let Some(node) = stack.pop() {
            if seen[node] {
                continue;
            }
            seen[node] = true;
            let lab = (0..self.num_labels)
                .find(|&lab| model.value(self.x_var(node, lab)))
                .expect("labeled node");
            lits.push(Lit::positive(self.x_var(node, lab)));
            if lab < self.props.len() {
                continue;
            }
            let op = OPS[lab - self.props.len()];
            let l = (0..node)
                .find(|&j| model.value(self.left_var(node, j)))
                .expect("left child");
            lits.push(Lit::positive(self.left_var(node, l)));
            stack.push(l);
            if op.is_binary() {
                let r = (0..node)
                    .find(|&j| model.value(self.right_var(node, j)))
                    .expect("right child");
                lits.push(Lit::positive(self.right_var(node, r)));
                stack.push(r);
            }
        }
        lits
    }

    /// Assumption literals pinning `f`'s structure into the encoding: `f`'s
    /// canonical nodes map to the bottom of the node range and its root to
    /// the encoding root. Unmapped nodes are left free.
    pub fn assumptions_for(&self, f: &LtlFormula) -> Result<Vec<Lit>, LearnError> {
        let m = f.dag_size();
        if m > self.size {
            return Err(LearnError::FormulaTooLarge {
                size: m,
                budget: self.size,
            });
        }
        let enc = |v: usize| if v == m - 1 { self.size - 1 } else { v };
        let mut lits = Vec::new();
        for (v, node) in f.nodes().iter().enumerate() {
            let e = enc(v);
            match node {
                LtlNode::Atom(name) => {
                    let p = self
                        .props
                        .iter()
                        .position(|q| q == name)
                        .ok_or_else(|| LearnError::UnknownProposition(name.clone()))?;
                    lits.push(Lit::positive(self.x_var(e, p)));
                }
                LtlNode::Unary(op, c) => {
                    let lab = self.op_label(match op {
                        UnaryOp::Not => Op::Not,
                        UnaryOp::Next => Op::Next,
                        UnaryOp::Finally => Op::Finally,
                        UnaryOp::Globally => Op::Globally,
                    });
                    lits.push(Lit::positive(self.x_var(e, lab)));
                    lits.push(Lit::positive(self.left_var(e, enc(*c))));
                }
                LtlNode::Binary(op, l, r) => {
                    let lab = self.op_label(match op {
                        BinaryOp::And => Op::And,
                        BinaryOp::Or => Op::Or,
                        BinaryOp::Implies => Op::Implies,
                        BinaryOp::Until => Op::Until,
                    });
                    lits.push(Lit::positive(self.x_var(e, lab)));
                    lits.push(Lit::positive(self.left_var(e, enc(*l))));
                    lits.push(Lit::positive(self.right_var(e, enc(*r))));
                }
            }
        }
        Ok(lits)
    }
}

fn exactly_one_pairwise(solver: &mut Solver, lits: &[Lit]) {
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            solver.add_clause(&[!lits[i], !lits[j]]);
        }
    }
}

// ---------------------------------------------------------------------------
// Learners

/// Builds the per-word semantics once and returns `(word, positive)` per
/// trace occurrence; duplicate words share one `y` block.
fn encode_words<'a>(
    solver: &mut Solver,
    enc: &mut DagEncoding,
    labeled: impl Iterator<Item = (&'a Trace, bool)>,
) -> Vec<(usize, bool)> {
    let mut index: HashMap<&Trace, usize> = HashMap::new();
    let mut units = Vec::new();
    for (trace, positive) in labeled {
        let w = match index.get(trace) {
            Some(&w) => w,
            None => {
                let w = enc.add_trace(solver, trace);
                index.insert(trace, w);
                w
            }
        };
        units.push((w, positive));
    }
    units
}

/// Iterative deepening over the exact (kappa = 0) encoding. The first SAT
/// size carries its own minimality certificate: every smaller size was UNSAT.
pub fn learn_exact(
    sample: &Sample,
    max_size: u32,
    deadline: Deadline,
) -> Result<LearnResult, LearnError> {
    if sample.negatives().is_empty() {
        return Err(LearnError::EmptyNegatives);
    }
    let start = Instant::now();
    for n in 1..=max_size {
        if deadline.expired() {
            return Ok(LearnResult::empty(LearnStatus::Timeout, start));
        }
        match consistent_at_size(sample, n as usize, deadline) {
            ConsistencyAnswer::Sat(formula) => {
                let mis = sample
                    .misclassification(&formula)
                    .expect("decoded formula uses sample propositions");
                assert_eq!(mis.count, 0, "exact learner returned inconsistent formula");
                return Ok(LearnResult {
                    size: Some(formula.dag_size() as u32),
                    formula: Some(formula),
                    misclassified: 0,
                    rate: 0.0,
                    status: LearnStatus::Exact,
                    elapsed: start.elapsed(),
                });
            }
            ConsistencyAnswer::Unsat => continue,
            ConsistencyAnswer::Timeout => {
                return Ok(LearnResult::empty(LearnStatus::Timeout, start))
            }
        }
    }
    Ok(LearnResult::empty(LearnStatus::Unsat, start))
}

#[derive(Debug)]
pub enum ConsistencyAnswer {
    Sat(LtlFormula),
    Unsat,
    Timeout,
}

/// Direct satisfiability of the size-at-most-`size` consistency query.
/// Exposed so minimality certificates (`UNSAT at n - 1`) can be checked
/// independently of the deepening loop.
pub fn consistent_at_size(sample: &Sample, size: usize, deadline: Deadline) -> ConsistencyAnswer {
    let mut solver = Solver::new();
    let mut enc = DagEncoding::new(&mut solver, sample.propositions(), size);
    let units = encode_words(&mut solver, &mut enc, sample.labeled());
    for (w, positive) in units {
        let root = enc.root_lit(w);
        solver.add_clause(&[if positive { root } else { !root }]);
    }
    match solver.solve(&[], deadline) {
        SolveResult::Sat(model) => ConsistencyAnswer::Sat(enc.decode(&model)),
        SolveResult::Unsat => ConsistencyAnswer::Unsat,
        SolveResult::Timeout => ConsistencyAnswer::Timeout,
    }
}

/// Problem-1 learner with tolerated misclassification `kappa`.
///
/// Decision mode bounds the relaxation selectors by `floor(kappa * |S|)` and
/// deepens until SAT. Optimize mode maximizes satisfied traces per size and
/// accepts the first size whose optimum reaches `ceil((1 - kappa) * |S|)`.
/// `kappa = 0` reproduces `learn_exact`'s answers.
pub fn learn_noisy(
    sample: &Sample,
    kappa: f64,
    max_size: u32,
    mode: NoisyMode,
    deadline: Deadline,
) -> Result<LearnResult, LearnError> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(LearnError::KappaRange(kappa));
    }
    let start = Instant::now();
    let total = sample.total();
    let budget = floor_with_guard(kappa * total as f64).min(total);
    let needed = total - budget;

    for n in 1..=max_size {
        if deadline.expired() {
            return Ok(LearnResult::empty(LearnStatus::Timeout, start));
        }
        let mut solver = Solver::new();
        let mut enc = DagEncoding::new(&mut solver, sample.propositions(), n as usize);
        let units = encode_words(&mut solver, &mut enc, sample.labeled());
        let mut relax = Vec::with_capacity(units.len());
        for (w, positive) in units {
            let root = enc.root_lit(w);
            let s_u = Lit::positive(solver.new_var());
            solver.add_clause(&[s_u, if positive { root } else { !root }]);
            relax.push(s_u);
        }

        let model = match mode {
            NoisyMode::Decision => {
                solver.add_at_most(&relax, budget);
                match solver.solve(&[], deadline) {
                    SolveResult::Sat(model) => Some(model),
                    SolveResult::Unsat => None,
                    SolveResult::Timeout => {
                        return Ok(LearnResult::empty(LearnStatus::Timeout, start))
                    }
                }
            }
            NoisyMode::Optimize => {
                for &s_u in &relax {
                    solver.add_soft(!s_u);
                }
                match solver.maximize_soft(deadline) {
                    MaxSatResult::Optimum { model, satisfied } => {
                        if satisfied >= needed {
                            Some(model)
                        } else {
                            None
                        }
                    }
                    MaxSatResult::Timeout {
                        best: Some((model, satisfied)),
                    } if satisfied >= needed => Some(model),
                    MaxSatResult::Timeout { .. } => {
                        return Ok(LearnResult::empty(LearnStatus::Timeout, start))
                    }
                    MaxSatResult::Unsat => {
                        unreachable!("relaxed consistency encoding is always satisfiable")
                    }
                }
            }
        };

        if let Some(model) = model {
            let formula = enc.decode(&model);
            let mis = sample
                .misclassification(&formula)
                .expect("decoded formula uses sample propositions");
            assert!(
                mis.count <= budget,
                "noisy learner exceeded the kappa budget"
            );
            return Ok(LearnResult {
                size: Some(formula.dag_size() as u32),
                formula: Some(formula),
                misclassified: mis.count,
                rate: mis.rate,
                status: LearnStatus::WithinThreshold,
                elapsed: start.elapsed(),
            });
        }
    }
    Ok(LearnResult::empty(LearnStatus::Unsat, start))
}

/// Best classifier of size at most `size` for a split subsample, by soft
/// maximization of per-trace correctness. Used by the decision-tree layer.
/// Returns the formula (best-so-far under a deadline) and whether the
/// optimization timed out.
pub(crate) fn best_classifier(
    props: &[String],
    positives: &[&Trace],
    negatives: &[&Trace],
    size: u32,
    deadline: Deadline,
) -> (Option<LtlFormula>, bool) {
    let mut solver = Solver::new();
    let mut enc = DagEncoding::new(&mut solver, props, size as usize);
    let labeled = positives
        .iter()
        .map(|&t| (t, true))
        .chain(negatives.iter().map(|&t| (t, false)));
    let units = encode_words(&mut solver, &mut enc, labeled);
    for (w, positive) in units {
        let root = enc.root_lit(w);
        let s_u = Lit::positive(solver.new_var());
        solver.add_clause(&[s_u, if positive { root } else { !root }]);
        solver.add_soft(!s_u);
    }
    match solver.maximize_soft(deadline) {
        MaxSatResult::Optimum { model, .. } => (Some(enc.decode(&model)), false),
        MaxSatResult::Timeout { best: Some((m, _)) } => (Some(enc.decode(&m)), true),
        MaxSatResult::Timeout { best: None } => (None, true),
        MaxSatResult::Unsat => unreachable!("relaxed encoding is always satisfiable"),
    }
}

// ---------------------------------------------------------------------------
// Model enumeration

/// Blocking-clause AllSAT over the structure variables of the size-bounded
/// consistency encoding. Yields one formula per structure-distinct model;
/// distinct structures may decode to the same formula or language.
pub struct ConsistentEnumerator {
    solver: Solver,
    enc: DagEncoding,
    deadline: Deadline,
    timed_out: bool,
    exhausted: bool,
}

impl ConsistentEnumerator {
    /// True when enumeration stopped at the deadline instead of completing.
    pub fn timed_out(&self) -> bool {
        self.timed_out
    }
}

impl Iterator for ConsistentEnumerator {
    type Item = LtlFormula;

    fn next(&mut self) -> Option<LtlFormula> {
        if self.exhausted {
            return None;
        }
        match self.solver.solve(&[], self.deadline) {
            SolveResult::Sat(model) => {
                let formula = self.enc.decode(&model);
                let block: Vec<Lit> = self
                    .enc
                    .structure_vars()
                    .iter()
                    .map(|&v| {
                        if model.value(v) {
                            Lit::negative(v)
                        } else {
                            Lit::positive(v)
                        }
                    })
                    .collect();
                self.solver.add_clause(&block);
                Some(formula)
            }
            SolveResult::Unsat => {
                self.exhausted = true;
                None
            }
            SolveResult::Timeout => {
                self.exhausted = true;
                self.timed_out = true;
                None
            }
        }
    }
}

/// Streams every structure-distinct consistent model at the given size.
/// Negatives may be empty (the one-class case).
pub fn enumerate_consistent(
    sample: &Sample,
    size: u32,
    deadline: Deadline,
) -> ConsistentEnumerator {
    let mut solver = Solver::new();
    let mut enc = DagEncoding::new(&mut solver, sample.propositions(), size as usize);
    let units = encode_words(&mut solver, &mut enc, sample.labeled());
    for (w, positive) in units {
        let root = enc.root_lit(w);
        solver.add_clause(&[if positive { root } else { !root }]);
    }
    ConsistentEnumerator {
        solver,
        enc,
        deadline,
        timed_out: false,
        exhausted: false,
    }
}
