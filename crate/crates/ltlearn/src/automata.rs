//! LTLf-to-DFA compilation by formula progression, plus the language queries
//! that make minimality checkable: inclusion with shortest witnesses,
//! equivalence, and shortest-accepted-word search.
//!
//! Progression rewrites a residual expression by one input letter; a word is
//! accepted when the residual left after consuming all letters discharges to
//! true (`G` obligations discharge true, `X`/`F`/`U` obligations and residual
//! bare atoms discharge false — the strong-Next convention). States are
//! residuals canonicalized by their truth table over the original formula's
//! atoms and temporal-rooted subterms, so propositionally equivalent
//! residuals merge, the constant-false table is the unique dead state, and
//! the constant-true table is the unique accepting sink.

use crate::ltl::{BinaryOp, LtlFormula, LtlNode, UnaryOp};
use crate::trace::{Trace, Valuation};
use std::collections::HashMap;
use std::collections::VecDeque;
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AutomataError {
    #[error("proposition count {0} exceeds the alphabet guard {1}")]
    TooManyPropositions(usize, usize),
    #[error("state cap {0} exceeded during DFA construction")]
    StateCapExceeded(usize),
    #[error("canonicalization table too large ({0} variables)")]
    TooManyTableVariables(usize),
    #[error("alphabet mismatch: {0} vs {1} propositions")]
    AlphabetMismatch(usize, usize),
    #[error("unknown atomic proposition `{0}`")]
    UnknownAtom(String),
}

#[derive(Debug, Clone, Copy)]
pub struct DfaLimits {
    pub max_states: usize,
    pub max_props: usize,
}

impl Default for DfaLimits {
    fn default() -> Self {
        DfaLimits {
            max_states: 100_000,
            max_props: 10,
        }
    }
}

// ---------------------------------------------------------------------------
// Residual expressions and progression

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Expr {
    True,
    False,
    Atom(usize),
    /// "The remaining word is nonempty." Unwrapping `X f` must keep the
    /// strong-next obligation alive: `f` alone would mis-discharge at word
    /// end whenever `f` is not a bare positive atom (e.g. `X (!p)` on a
    /// one-letter word), so every unwrap conjoins this marker. It progresses
    /// to true (a letter was consumed) and discharges to false at the end.
    Alive,
    Not(Rc<Expr>),
    And(Rc<Expr>, Rc<Expr>),
    Or(Rc<Expr>, Rc<Expr>),
    Next(Rc<Expr>),
    Finally(Rc<Expr>),
    Globally(Rc<Expr>),
    Until(Rc<Expr>, Rc<Expr>),
}

fn enot(e: Rc<Expr>) -> Rc<Expr> {
    match &*e {
        Expr::True => Rc::new(Expr::False),
        Expr::False => Rc::new(Expr::True),
        Expr::Not(inner) => inner.clone(),
        _ => Rc::new(Expr::Not(e)),
    }
}

fn eand(a: Rc<Expr>, b: Rc<Expr>) -> Rc<Expr> {
    if matches!(*a, Expr::False) || matches!(*b, Expr::False) {
        return Rc::new(Expr::False);
    }
    if matches!(*a, Expr::True) {
        return b;
    }
    if matches!(*b, Expr::True) {
        return a;
    }
    if a == b {
        return a;
    }
    Rc::new(Expr::And(a, b))
}

fn eor(a: Rc<Expr>, b: Rc<Expr>) -> Rc<Expr> {
    if matches!(*a, Expr::True) || matches!(*b, Expr::True) {
        return Rc::new(Expr::True);
    }
    if matches!(*a, Expr::False) {
        return b;
    }
    if matches!(*b, Expr::False) {
        return a;
    }
    if a == b {
        return a;
    }
    Rc::new(Expr::Or(a, b))
}

fn progress_expr(e: &Rc<Expr>, letter: &Valuation) -> Rc<Expr> {
    match &**e {
        Expr::True | Expr::False => e.clone(),
        Expr::Alive => Rc::new(Expr::True),
        Expr::Atom(i) => Rc::new(if letter.bit(*i) {
            Expr::True
        } else {
            Expr::False
        }),
        Expr::Not(c) => enot(progress_expr(c, letter)),
        Expr::And(a, b) => eand(progress_expr(a, letter), progress_expr(b, letter)),
        Expr::Or(a, b) => eor(progress_expr(a, letter), progress_expr(b, letter)),
        Expr::Next(c) => eand(c.clone(), Rc::new(Expr::Alive)),
        Expr::Finally(c) => eor(progress_expr(c, letter), e.clone()),
        Expr::Globally(c) => eand(progress_expr(c, letter), e.clone()),
        Expr::Until(a, b) => eor(
            progress_expr(b, letter),
            eand(progress_expr(a, letter), e.clone()),
        ),
    }
}

fn end_eval_expr(e: &Expr) -> bool {
    match e {
        Expr::True => true,
        Expr::False => false,
        // Residual atoms and the nonempty-suffix marker are strong-next
        // obligations that outlived the word; they discharge to false.
        Expr::Atom(_) | Expr::Alive => false,
        Expr::Not(c) => !end_eval_expr(c),
        Expr::And(a, b) => end_eval_expr(a) && end_eval_expr(b),
        Expr::Or(a, b) => end_eval_expr(a) || end_eval_expr(b),
        Expr::Next(_) | Expr::Finally(_) | Expr::Until(_, _) => false,
        Expr::Globally(_) => true,
    }
}

/// A residual formula expression as rewritten by progression. For any word
/// `u` with `|u| >= 1`, `end_eval` after progressing through all letters of
/// `u` equals the evaluator's verdict at position 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Residual(Rc<Expr>);

impl Residual {
    /// Converts a formula, resolving atoms against `props`. `->` expands to
    /// `!a | b` (pointwise equivalent on finite traces).
    pub fn from_formula(f: &LtlFormula, props: &[String]) -> Result<Residual, AutomataError> {
        let mut map: Vec<Rc<Expr>> = Vec::with_capacity(f.dag_size());
        for node in f.nodes() {
            let e = match node {
                LtlNode::Atom(name) => {
                    let i = props
                        .iter()
                        .position(|p| p == name)
                        .ok_or_else(|| AutomataError::UnknownAtom(name.clone()))?;
                    Rc::new(Expr::Atom(i))
                }
                LtlNode::Unary(op, c) => {
                    let c = map[*c].clone();
                    match op {
                        UnaryOp::Not => enot(c),
                        UnaryOp::Next => Rc::new(Expr::Next(c)),
                        UnaryOp::Finally => Rc::new(Expr::Finally(c)),
                        UnaryOp::Globally => Rc::new(Expr::Globally(c)),
                    }
                }
                LtlNode::Binary(op, l, r) => {
                    let (l, r) = (map[*l].clone(), map[*r].clone());
                    match op {
                        BinaryOp::And => eand(l, r),
                        BinaryOp::Or => eor(l, r),
                        BinaryOp::Implies => eor(enot(l), r),
                        BinaryOp::Until => Rc::new(Expr::Until(l, r)),
                    }
                }
            };
            map.push(e);
        }
        Ok(Residual(map.pop().expect("nonempty formula")))
    }

    /// One-letter progression.
    pub fn progress(&self, letter: &Valuation) -> Residual {
        Residual(progress_expr(&self.0, letter))
    }

    /// Discharges end-of-word obligations and evaluates.
    pub fn end_eval(&self) -> bool {
        end_eval_expr(&self.0)
    }

    pub fn is_true(&self) -> bool {
        matches!(*self.0, Expr::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(*self.0, Expr::False)
    }
}

// ---------------------------------------------------------------------------
// Canonicalization

/// Table variables: the original formula's atoms, the nonempty-suffix
/// marker, then the formula's temporal-rooted subterms in first-visit order.
/// Progression never invents temporal terms, so this universe covers every
/// reachable residual.
struct Universe {
    num_props: usize,
    temporals: Vec<Rc<Expr>>,
    index: HashMap<Rc<Expr>, usize>,
}

const MAX_TABLE_VARS: usize = 22;

impl Universe {
    fn collect(num_props: usize, root: &Rc<Expr>) -> Result<Universe, AutomataError> {
        let mut uni = Universe {
            num_props,
            temporals: Vec::new(),
            index: HashMap::new(),
        };
        uni.visit(root);
        let vars = uni.num_props + uni.temporals.len();
        if vars > MAX_TABLE_VARS {
            return Err(AutomataError::TooManyTableVariables(vars));
        }
        Ok(uni)
    }

    fn visit(&mut self, e: &Rc<Expr>) {
        match &**e {
            Expr::True | Expr::False | Expr::Atom(_) | Expr::Alive => {}
            Expr::Not(c) => self.visit(c),
            Expr::And(a, b) | Expr::Or(a, b) => {
                self.visit(a);
                self.visit(b);
            }
            Expr::Next(c) | Expr::Finally(c) | Expr::Globally(c) => {
                self.note(e);
                self.visit(c);
            }
            Expr::Until(a, b) => {
                self.note(e);
                self.visit(a);
                self.visit(b);
            }
        }
    }

    fn note(&mut self, e: &Rc<Expr>) {
        if !self.index.contains_key(e) {
            self.index.insert(e.clone(), self.temporals.len());
            self.temporals.push(e.clone());
        }
    }

    fn num_vars(&self) -> usize {
        // Atoms, the nonempty-suffix marker, then temporal subterms.
        self.num_props + 1 + self.temporals.len()
    }

    /// Truth table of `e` over all assignments of the universe variables.
    fn table(&self, e: &Rc<Expr>) -> Vec<u64> {
        let m = self.num_vars();
        let rows = 1usize << m;
        let blocks = rows.div_ceil(64);
        let mut out = vec![0u64; blocks];
        for sigma in 0..rows {
            if self.eval(e, sigma) {
                out[sigma / 64] |= 1 << (sigma % 64);
            }
        }
        out
    }

    fn eval(&self, e: &Rc<Expr>, sigma: usize) -> bool {
        match &**e {
            Expr::True => true,
            Expr::False => false,
            Expr::Atom(i) => sigma >> i & 1 == 1,
            Expr::Not(c) => !self.eval(c, sigma),
            Expr::And(a, b) => self.eval(a, sigma) && self.eval(b, sigma),
            Expr::Or(a, b) => self.eval(a, sigma) || self.eval(b, sigma),
            Expr::Next(_) | Expr::Finally(_) | Expr::Globally(_) | Expr::Until(_, _) => {
                let i = self.num_props + self.index[e];
                sigma >> i & 1 == 1
            }
        }
    }

    fn constant_of_table(&self, table: &[u64]) -> Option<bool> {
        let rows = 1usize << self.num_vars();
        if table.iter().all(|&b| b == 0) {
            return Some(false);
        }
        let all_true = (0..rows).all(|r| table[r / 64] >> (r % 64) & 1 == 1);
        if all_true {
            return Some(true);
        }
        None
    }
}

// ---------------------------------------------------------------------------
// DFA

/// Deterministic automaton over the alphabet of all `2^k` valuations; letter
/// `a` is the valuation with bitmask `a` (proposition 0 least significant).
/// Accepts exactly the words (of length >= 1) the source formula satisfies.
#[derive(Debug, Clone)]
pub struct Dfa {
    num_props: usize,
    initial: usize,
    accepting: Vec<bool>,
    transitions: Vec<Vec<usize>>,
}

impl Dfa {
    pub fn num_props(&self) -> usize {
        self.num_props
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_letters(&self) -> usize {
        1 << self.num_props
    }

    pub fn accepts(&self, u: &Trace) -> bool {
        assert_eq!(u.width(), self.num_props);
        let mut state = self.initial;
        for step in u.steps() {
            state = self.transitions[state][step.to_mask()];
        }
        self.accepting[state]
    }

    /// GraphViz rendering for debugging; edge labels are valuation bits in
    /// proposition order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n  rankdir=LR;\n");
        for s in 0..self.num_states() {
            let shape = if self.accepting[s] {
                "doublecircle"
            } else {
                "circle"
            };
            out.push_str(&format!("  q{s} [shape={shape}];\n"));
        }
        out.push_str(&format!(
            "  init [shape=point];\n  init -> q{};\n",
            self.initial
        ));
        for s in 0..self.num_states() {
            for letter in 0..self.num_letters() {
                let bits: String = (0..self.num_props)
                    .map(|i| if letter >> i & 1 == 1 { '1' } else { '0' })
                    .collect();
                out.push_str(&format!(
                    "  q{s} -> q{} [label=\"{bits}\"];\n",
                    self.transitions[s][letter]
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Compiles a formula by breadth-first progression from its residual.
pub fn to_dfa(f: &LtlFormula, props: &[String], limits: &DfaLimits) -> Result<Dfa, AutomataError> {
    if props.len() > limits.max_props {
        return Err(AutomataError::TooManyPropositions(
            props.len(),
            limits.max_props,
        ));
    }
    let init = Residual::from_formula(f, props)?;
    let uni = Universe::collect(props.len(), &init.0)?;
    let letters = 1usize << props.len();

    let mut exprs: Vec<Rc<Expr>> = Vec::new();
    let mut tables: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut accepting: Vec<bool> = Vec::new();
    let mut constants: Vec<Option<bool>> = Vec::new();
    let mut transitions: Vec<Vec<usize>> = Vec::new();

    let mut intern = |e: Rc<Expr>,
                      exprs: &mut Vec<Rc<Expr>>,
                      accepting: &mut Vec<bool>,
                      constants: &mut Vec<Option<bool>>|
     -> Result<usize, AutomataError> {
        let table = uni.table(&e);
        if let Some(&i) = tables.get(&table) {
            return Ok(i);
        }
        let i = exprs.len();
        if i >= limits.max_states {
            return Err(AutomataError::StateCapExceeded(limits.max_states));
        }
        constants.push(uni.constant_of_table(&table));
        tables.insert(table, i);
        accepting.push(end_eval_expr(&e));
        exprs.push(e);
        Ok(i)
    };

    let initial = intern(
        init.0,
        &mut exprs,
        &mut accepting,
        &mut constants,
    )?;
    let mut cursor = 0;
    while cursor < exprs.len() {
        let state = cursor;
        cursor += 1;
        // Dead and universal states only loop to themselves.
        if constants[state].is_some() {
            transitions.push(vec![state; letters]);
            continue;
        }
        let mut row = Vec::with_capacity(letters);
        for letter in 0..letters {
            let valuation = Valuation::from_mask(letter, props.len());
            let succ = progress_expr(&exprs[state], &valuation);
            row.push(intern(succ, &mut exprs, &mut accepting, &mut constants)?);
        }
        transitions.push(row);
    }

    Ok(Dfa {
        num_props: props.len(),
        initial,
        accepting,
        transitions,
    })
}

// ---------------------------------------------------------------------------
// Language queries

#[derive(Debug, Clone, PartialEq)]
pub enum Inclusion {
    Included,
    NotIncluded(Trace),
}

impl Inclusion {
    pub fn is_included(&self) -> bool {
        matches!(self, Inclusion::Included)
    }
}

/// Product search for a word matching `condition`, shortest first and
/// lexicographic by valuation bitmask among equals. Only words of length
/// >= 1 are considered.
fn product_search(
    a: &Dfa,
    b: &Dfa,
    condition: impl Fn(bool, bool) -> bool,
) -> Result<Option<Trace>, AutomataError> {
    if a.num_props != b.num_props {
        return Err(AutomataError::AlphabetMismatch(a.num_props, b.num_props));
    }
    let letters = a.num_letters();
    let mut order: Vec<(usize, usize)> = vec![(a.initial, b.initial)];
    let mut parent: Vec<(usize, usize)> = vec![(usize::MAX, 0)];
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    seen.insert((a.initial, b.initial), 0);
    let mut queue = VecDeque::new();
    queue.push_back(0usize);
    while let Some(idx) = queue.pop_front() {
        let (sa, sb) = order[idx];
        for letter in 0..letters {
            let pair = (a.transitions[sa][letter], b.transitions[sb][letter]);
            if seen.contains_key(&pair) {
                continue;
            }
            if condition(a.accepting[pair.0], b.accepting[pair.1]) {
                let mut letters_path = vec![letter];
                let mut at = idx;
                while parent[at].0 != usize::MAX {
                    letters_path.push(parent[at].1);
                    at = parent[at].0;
                }
                letters_path.reverse();
                let steps = letters_path
                    .into_iter()
                    .map(|l| Valuation::from_mask(l, a.num_props))
                    .collect();
                return Ok(Some(Trace::new(steps).expect("nonempty witness")));
            }
            let at = order.len();
            order.push(pair);
            parent.push((idx, letter));
            seen.insert(pair, at);
            queue.push_back(at);
        }
    }
    Ok(None)
}

/// Is `L(a)` a subset of `L(b)`? `NotIncluded` carries a shortest witness in
/// `L(a) \ L(b)` (ties broken lexicographically).
pub fn inclusion(a: &Dfa, b: &Dfa) -> Result<Inclusion, AutomataError> {
    match product_search(a, b, |acc_a, acc_b| acc_a && !acc_b)? {
        Some(w) => Ok(Inclusion::NotIncluded(w)),
        None => Ok(Inclusion::Included),
    }
}

/// Language equality via one product pass.
pub fn equivalent(a: &Dfa, b: &Dfa) -> Result<bool, AutomataError> {
    Ok(product_search(a, b, |acc_a, acc_b| acc_a != acc_b)?.is_none())
}

/// True iff `L(f)` is strictly contained in `L(g)`; the witness lies in
/// `L(g) \ L(f)`.
pub fn strictly_smaller(
    f: &LtlFormula,
    g: &LtlFormula,
    props: &[String],
    limits: &DfaLimits,
) -> Result<Option<Trace>, AutomataError> {
    let df = to_dfa(f, props, limits)?;
    let dg = to_dfa(g, props, limits)?;
    strictly_smaller_dfa(&df, &dg)
}

/// DFA-level variant of [`strictly_smaller`] for callers that cache automata.
pub fn strictly_smaller_dfa(df: &Dfa, dg: &Dfa) -> Result<Option<Trace>, AutomataError> {
    match inclusion(df, dg)? {
        Inclusion::NotIncluded(_) => Ok(None),
        Inclusion::Included => match inclusion(dg, df)? {
            Inclusion::NotIncluded(w) => Ok(Some(w)),
            Inclusion::Included => Ok(None),
        },
    }
}

/// Shortest word accepted by `a` that is not in `exclude`, up to `max_len`;
/// ties break lexicographically. The finite exclusion set rides along as a
/// trie in the product.
pub fn shortest_accepted_excluding(a: &Dfa, exclude: &[Trace], max_len: usize) -> Option<Trace> {
    let letters = a.num_letters();
    // Trie over letters; node 0 is the root.
    let mut next: Vec<Vec<Option<usize>>> = vec![vec![None; letters]];
    let mut terminal = vec![false];
    for w in exclude {
        assert_eq!(w.width(), a.num_props, "exclusion words share the alphabet");
        let mut at = 0;
        for step in w.steps() {
            let l = step.to_mask();
            at = match next[at][l] {
                Some(n) => n,
                None => {
                    next.push(vec![None; letters]);
                    terminal.push(false);
                    let n = next.len() - 1;
                    next[at][l] = Some(n);
                    n
                }
            };
        }
        terminal[at] = true;
    }

    let mut order: Vec<(usize, Option<usize>, usize)> = vec![(a.initial, Some(0), 0)];
    let mut parent: Vec<(usize, usize)> = vec![(usize::MAX, 0)];
    let mut seen: HashMap<(usize, Option<usize>), usize> = HashMap::new();
    seen.insert((a.initial, Some(0)), 0);
    let mut queue = VecDeque::new();
    queue.push_back(0usize);
    while let Some(idx) = queue.pop_front() {
        let (state, trie, depth) = order[idx];
        if depth >= max_len {
            continue;
        }
        for letter in 0..letters {
            let nstate = a.transitions[state][letter];
            let ntrie = trie.and_then(|t| next[t][letter]);
            let key = (nstate, ntrie);
            if seen.contains_key(&key) {
                continue;
            }
            let excluded = ntrie.map(|t| terminal[t]).unwrap_or(false);
            if a.accepting[nstate] && !excluded {
                let mut letters_path = vec![letter];
                let mut at = idx;
                while parent[at].0 != usize::MAX {
                    letters_path.push(parent[at].1);
                    at = parent[at].0;
                }
                letters_path.reverse();
                let steps = letters_path
                    .into_iter()
                    .map(|l| Valuation::from_mask(l, a.num_props))
                    .collect();
                return Some(Trace::new(steps).expect("nonempty"));
            }
            let at = order.len();
            order.push((nstate, ntrie, depth + 1));
            parent.push((idx, letter));
            seen.insert(key, at);
            queue.push_back(at);
        }
    }
    None
}
