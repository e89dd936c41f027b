//! LTL syntax DAGs, the concrete grammar, and finite-trace evaluation.
//!
//! Formulas are stored as a node table in which structurally identical
//! subterms share a single node; `dag_size` is the number of distinct nodes.
//! Nodes are kept in a canonical order (children before parents, derived from
//! a left-to-right post-order walk of the root), so structural equality is
//! plain `==` on the table.
//!
//! Grammar (ASCII), loosest to tightest: `->` (right-associative), `|`, `&`,
//! `U` (right-associative), unary `!` `X` `F` `G`. Atoms are identifiers
//! matching `[A-Za-z_][A-Za-z0-9_]*` other than the operator keywords
//! `X F G U`. There are no Boolean constants.
//!
//! Semantics over a finite trace `u` of length `k` at position `t`:
//! `X f` requires `t + 1 < k` (strong Next — false at the last position);
//! `F`, `G`, and `U` quantify over `[t, k)` with `U` reflexive in its right
//! argument.

use crate::trace::Trace;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Not,
    Next,
    Finally,
    Globally,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    And,
    Or,
    Implies,
    Until,
}

/// One node of a syntax DAG; children are indices into the node table and are
/// always smaller than the node's own index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LtlNode {
    Atom(String),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize, usize),
}

/// An immutable LTL formula as a maximally shared syntax DAG.
///
/// The node table is in canonical child-before-parent order and the root is
/// the last node, so two formulas are structurally equal iff their tables are.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LtlFormula {
    nodes: Vec<LtlNode>,
}

impl LtlFormula {
    pub fn parse(text: &str) -> Result<Self, FormulaParseError> {
        parse::parse(text)
    }

    /// Number of distinct DAG nodes.
    pub fn dag_size(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in canonical order: children strictly before parents.
    pub fn nodes(&self) -> &[LtlNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Distinct atom names in canonical node order.
    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().filter_map(|n| match n {
            LtlNode::Atom(name) => Some(name.as_str()),
            _ => None,
        })
    }
}

/// Constructs formulas with hash-consing; structurally equal subterms built
/// through one builder always share a node.
#[derive(Debug, Default)]
pub struct FormulaBuilder {
    nodes: Vec<LtlNode>,
    index: HashMap<LtlNode, usize>,
}

/// Reference to a node inside a [`FormulaBuilder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeRef(usize);

impl FormulaBuilder {
    pub fn new() -> Self {
        FormulaBuilder::default()
    }

    fn intern(&mut self, node: LtlNode) -> NodeRef {
        if let Some(&i) = self.index.get(&node) {
            return NodeRef(i);
        }
        let i = self.nodes.len();
        self.nodes.push(node.clone());
        self.index.insert(node, i);
        NodeRef(i)
    }

    pub fn atom(&mut self, name: &str) -> NodeRef {
        self.intern(LtlNode::Atom(name.to_string()))
    }

    pub fn unary(&mut self, op: UnaryOp, child: NodeRef) -> NodeRef {
        self.intern(LtlNode::Unary(op, child.0))
    }

    pub fn binary(&mut self, op: BinaryOp, left: NodeRef, right: NodeRef) -> NodeRef {
        self.intern(LtlNode::Binary(op, left.0, right.0))
    }

    pub fn not(&mut self, c: NodeRef) -> NodeRef {
        self.unary(UnaryOp::Not, c)
    }

    pub fn next(&mut self, c: NodeRef) -> NodeRef {
        self.unary(UnaryOp::Next, c)
    }

    pub fn finally(&mut self, c: NodeRef) -> NodeRef {
        self.unary(UnaryOp::Finally, c)
    }

    pub fn globally(&mut self, c: NodeRef) -> NodeRef {
        self.unary(UnaryOp::Globally, c)
    }

    pub fn and(&mut self, l: NodeRef, r: NodeRef) -> NodeRef {
        self.binary(BinaryOp::And, l, r)
    }

    pub fn or(&mut self, l: NodeRef, r: NodeRef) -> NodeRef {
        self.binary(BinaryOp::Or, l, r)
    }

    pub fn implies(&mut self, l: NodeRef, r: NodeRef) -> NodeRef {
        self.binary(BinaryOp::Implies, l, r)
    }

    pub fn until(&mut self, l: NodeRef, r: NodeRef) -> NodeRef {
        self.binary(BinaryOp::Until, l, r)
    }

    /// Re-interns the DAG reachable from `root` in canonical order, dropping
    /// unreachable nodes.
    pub fn build(self, root: NodeRef) -> LtlFormula {
        let mut out = Vec::new();
        let mut out_index: HashMap<LtlNode, usize> = HashMap::new();
        let mut remap: Vec<Option<usize>> = vec![None; self.nodes.len()];
        // Iterative post-order walk, left child first.
        let mut stack = vec![(root.0, false)];
        while let Some((id, expanded)) = stack.pop() {
            if remap[id].is_some() {
                continue;
            }
            if expanded {
                let node = match &self.nodes[id] {
                    LtlNode::Atom(name) => LtlNode::Atom(name.clone()),
                    LtlNode::Unary(op, c) => LtlNode::Unary(*op, remap[*c].unwrap()),
                    LtlNode::Binary(op, l, r) => {
                        LtlNode::Binary(*op, remap[*l].unwrap(), remap[*r].unwrap())
                    }
                };
                let new_id = match out_index.get(&node) {
                    Some(&i) => i,
                    None => {
                        let i = out.len();
                        out.push(node.clone());
                        out_index.insert(node, i);
                        i
                    }
                };
                remap[id] = Some(new_id);
            } else {
                stack.push((id, true));
                match &self.nodes[id] {
                    LtlNode::Atom(_) => {}
                    LtlNode::Unary(_, c) => stack.push((*c, false)),
                    LtlNode::Binary(_, l, r) => {
                        // Right pushed first so the left child is visited first.
                        stack.push((*r, false));
                        stack.push((*l, false));
                    }
                }
            }
        }
        debug_assert_eq!(remap[root.0], Some(out.len() - 1));
        LtlFormula { nodes: out }
    }
}

// ---------------------------------------------------------------------------
// Printing

// A child is printed in parentheses when it is itself a binary term, when its
// parent is `->`, or when its parent is a unary operator — unless it is a
// bare atom. This reproduces the conventional shapes `(F x3) -> (G x3)`,
// `F p & !(F q)`, and `p U q` while staying unambiguous under the grammar.
impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.nodes, self.root(), Ctx::Root)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    Root,
    Unary,
    Implies,
    OtherBinary,
}

fn needs_parens(nodes: &[LtlNode], id: usize, ctx: Ctx) -> bool {
    match &nodes[id] {
        LtlNode::Atom(_) => false,
        LtlNode::Unary(..) => matches!(ctx, Ctx::Unary | Ctx::Implies),
        LtlNode::Binary(..) => ctx != Ctx::Root,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, nodes: &[LtlNode], id: usize, ctx: Ctx) -> fmt::Result {
    let parens = needs_parens(nodes, id, ctx);
    if parens {
        f.write_str("(")?;
    }
    match &nodes[id] {
        LtlNode::Atom(name) => f.write_str(name)?,
        LtlNode::Unary(op, c) => {
            match op {
                UnaryOp::Not => f.write_str("!")?,
                UnaryOp::Next => f.write_str("X ")?,
                UnaryOp::Finally => f.write_str("F ")?,
                UnaryOp::Globally => f.write_str("G ")?,
            }
            write_node(f, nodes, *c, Ctx::Unary)?;
        }
        LtlNode::Binary(op, l, r) => {
            let (sym, child_ctx) = match op {
                BinaryOp::And => (" & ", Ctx::OtherBinary),
                BinaryOp::Or => (" | ", Ctx::OtherBinary),
                BinaryOp::Implies => (" -> ", Ctx::Implies),
                BinaryOp::Until => (" U ", Ctx::OtherBinary),
            };
            write_node(f, nodes, *l, child_ctx)?;
            f.write_str(sym)?;
            write_node(f, nodes, *r, child_ctx)?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Evaluation

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("unknown atomic proposition `{0}`")]
    UnknownAtom(String),
    #[error("position {position} out of range for trace of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("trace width {found} does not match proposition count {expected}")]
    WidthMismatch { expected: usize, found: usize },
}

/// Maps each atom node to its column in `props`; non-atom nodes get 0.
fn atom_columns(f: &LtlFormula, props: &[String]) -> Result<Vec<usize>, EvalError> {
    f.nodes()
        .iter()
        .map(|n| match n {
            LtlNode::Atom(name) => props
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| EvalError::UnknownAtom(name.clone())),
            _ => Ok(0),
        })
        .collect()
}

/// Finite-trace semantics of `f` on `u` at position `t`, with atom names
/// resolved against `props` (index-aligned with the trace's valuations).
pub fn evaluate(f: &LtlFormula, u: &Trace, props: &[String], t: usize) -> Result<bool, EvalError> {
    if u.width() != props.len() {
        return Err(EvalError::WidthMismatch {
            expected: props.len(),
            found: u.width(),
        });
    }
    if t >= u.len() {
        return Err(EvalError::PositionOutOfRange {
            position: t,
            len: u.len(),
        });
    }
    let cols = atom_columns(f, props)?;
    Ok(eval_with_columns(f, u, &cols, t))
}

/// Backward dynamic programming over positions; `next[i]` holds node `i`'s
/// value at position `pos + 1` (temporal defaults apply past the end).
pub(crate) fn eval_with_columns(f: &LtlFormula, u: &Trace, cols: &[usize], t: usize) -> bool {
    let n = f.dag_size();
    let k = u.len();
    let mut next = vec![false; n];
    let mut cur = vec![false; n];
    for pos in (t..k).rev() {
        let last = pos + 1 == k;
        let step = u.step(pos);
        for (i, node) in f.nodes().iter().enumerate() {
            cur[i] = match node {
                LtlNode::Atom(_) => step.bit(cols[i]),
                LtlNode::Unary(UnaryOp::Not, c) => !cur[*c],
                LtlNode::Unary(UnaryOp::Next, c) => !last && next[*c],
                LtlNode::Unary(UnaryOp::Finally, c) => cur[*c] || (!last && next[i]),
                LtlNode::Unary(UnaryOp::Globally, c) => cur[*c] && (last || next[i]),
                LtlNode::Binary(BinaryOp::And, l, r) => cur[*l] && cur[*r],
                LtlNode::Binary(BinaryOp::Or, l, r) => cur[*l] || cur[*r],
                LtlNode::Binary(BinaryOp::Implies, l, r) => !cur[*l] || cur[*r],
                LtlNode::Binary(BinaryOp::Until, l, r) => {
                    cur[*r] || (cur[*l] && !last && next[i])
                }
            };
        }
        std::mem::swap(&mut next, &mut cur);
    }
    next[f.root()]
}

/// Evaluation helper bound to a fixed proposition list, for hot loops.
pub struct BoundFormula<'a> {
    formula: &'a LtlFormula,
    cols: Vec<usize>,
}

impl<'a> BoundFormula<'a> {
    pub fn bind(formula: &'a LtlFormula, props: &[String]) -> Result<Self, EvalError> {
        Ok(BoundFormula {
            formula,
            cols: atom_columns(formula, props)?,
        })
    }

    pub fn accepts(&self, u: &Trace) -> bool {
        eval_with_columns(self.formula, u, &self.cols, 0)
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Error, PartialEq)]
#[error("formula parse error at offset {offset}: {message}")]
pub struct FormulaParseError {
    pub offset: usize,
    pub message: String,
}

mod parse {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    enum Token {
        Ident(String),
        Bang,
        Amp,
        Pipe,
        Arrow,
        LParen,
        RParen,
        KwX,
        KwF,
        KwG,
        KwU,
    }

    fn err(offset: usize, message: impl Into<String>) -> FormulaParseError {
        FormulaParseError {
            offset,
            message: message.into(),
        }
    }

    fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, FormulaParseError> {
        let bytes = text.as_bytes();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\r' | '\n' => i += 1,
                '(' => {
                    tokens.push((i, Token::LParen));
                    i += 1;
                }
                ')' => {
                    tokens.push((i, Token::RParen));
                    i += 1;
                }
                '!' => {
                    tokens.push((i, Token::Bang));
                    i += 1;
                }
                '&' => {
                    tokens.push((i, Token::Amp));
                    i += 1;
                }
                '|' => {
                    tokens.push((i, Token::Pipe));
                    i += 1;
                }
                '-' => {
                    if bytes.get(i + 1) == Some(&b'>') {
                        tokens.push((i, Token::Arrow));
                        i += 2;
                    } else {
                        return Err(err(i, "expected `->`"));
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < bytes.len()
                        && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    let word = &text[start..i];
                    let tok = match word {
                        "X" => Token::KwX,
                        "F" => Token::KwF,
                        "G" => Token::KwG,
                        "U" => Token::KwU,
                        _ => Token::Ident(word.to_string()),
                    };
                    tokens.push((start, tok));
                }
                other => return Err(err(i, format!("unknown operator token `{other}`"))),
            }
        }
        Ok(tokens)
    }

    struct Parser {
        tokens: Vec<(usize, Token)>,
        pos: usize,
        end: usize,
        builder: FormulaBuilder,
    }

    impl Parser {
        fn peek(&self) -> Option<&Token> {
            self.tokens.get(self.pos).map(|(_, t)| t)
        }

        fn offset(&self) -> usize {
            self.tokens
                .get(self.pos)
                .map(|(o, _)| *o)
                .unwrap_or(self.end)
        }

        fn bump(&mut self) -> Option<Token> {
            let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
            self.pos += 1;
            t
        }

        // implies := or ('->' implies)?
        fn implies(&mut self) -> Result<NodeRef, FormulaParseError> {
            let left = self.or()?;
            if self.peek() == Some(&Token::Arrow) {
                self.bump();
                let right = self.implies()?;
                return Ok(self.builder.implies(left, right));
            }
            Ok(left)
        }

        // or := and ('|' and)*
        fn or(&mut self) -> Result<NodeRef, FormulaParseError> {
            let mut node = self.and()?;
            while self.peek() == Some(&Token::Pipe) {
                self.bump();
                let rhs = self.and()?;
                node = self.builder.or(node, rhs);
            }
            Ok(node)
        }

        // and := until ('&' until)*
        fn and(&mut self) -> Result<NodeRef, FormulaParseError> {
            let mut node = self.until()?;
            while self.peek() == Some(&Token::Amp) {
                self.bump();
                let rhs = self.until()?;
                node = self.builder.and(node, rhs);
            }
            Ok(node)
        }

        // until := unary ('U' until)?
        fn until(&mut self) -> Result<NodeRef, FormulaParseError> {
            let left = self.unary()?;
            if self.peek() == Some(&Token::KwU) {
                self.bump();
                let right = self.until()?;
                return Ok(self.builder.until(left, right));
            }
            Ok(left)
        }

        fn unary(&mut self) -> Result<NodeRef, FormulaParseError> {
            match self.peek() {
                Some(Token::Bang) => {
                    self.bump();
                    let c = self.unary()?;
                    Ok(self.builder.not(c))
                }
                Some(Token::KwX) => {
                    self.bump();
                    let c = self.unary()?;
                    Ok(self.builder.next(c))
                }
                Some(Token::KwF) => {
                    self.bump();
                    let c = self.unary()?;
                    Ok(self.builder.finally(c))
                }
                Some(Token::KwG) => {
                    self.bump();
                    let c = self.unary()?;
                    Ok(self.builder.globally(c))
                }
                _ => self.primary(),
            }
        }

        fn primary(&mut self) -> Result<NodeRef, FormulaParseError> {
            let offset = self.offset();
            match self.bump() {
                Some(Token::Ident(name)) => Ok(self.builder.atom(&name)),
                Some(Token::LParen) => {
                    let node = self.implies()?;
                    let close = self.offset();
                    match self.bump() {
                        Some(Token::RParen) => Ok(node),
                        _ => Err(err(close, "expected `)`")),
                    }
                }
                Some(tok) => Err(err(offset, format!("unexpected token {tok:?}"))),
                None => Err(err(offset, "unexpected end of input")),
            }
        }
    }

    pub(super) fn parse(text: &str) -> Result<LtlFormula, FormulaParseError> {
        let tokens = tokenize(text)?;
        if tokens.is_empty() {
            return Err(err(0, "empty formula"));
        }
        let mut parser = Parser {
            tokens,
            pos: 0,
            end: text.len(),
            builder: FormulaBuilder::new(),
        };
        let root = parser.implies()?;
        if parser.pos != parser.tokens.len() {
            return Err(err(parser.offset(), "trailing input after formula"));
        }
        Ok(parser.builder.build(root))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::trace_from_str;

    fn props(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_uav_formula_with_size_4() {
        let f = LtlFormula::parse("(F x3) -> (G x3)").unwrap();
        assert_eq!(f.dag_size(), 4);
        assert_eq!(f.to_string(), "(F x3) -> (G x3)");
    }

    #[test]
    fn parse_and_size_basics() {
        let f = LtlFormula::parse("G x0").unwrap();
        assert_eq!(f.dag_size(), 2);
        assert_eq!(f.to_string(), "G x0");

        let shared = LtlFormula::parse("x0 & x0").unwrap();
        assert_eq!(shared.dag_size(), 2);

        let atom = LtlFormula::parse("p").unwrap();
        assert_eq!(atom.dag_size(), 1);
    }

    #[test]
    fn print_shapes() {
        let f = LtlFormula::parse("p U q").unwrap();
        assert_eq!(f.to_string(), "p U q");
        let g = LtlFormula::parse("G p").unwrap();
        assert_eq!(g.to_string(), "G p");
        let x = LtlFormula::parse("(F p & !(F q)) | (!(F p) & F q)").unwrap();
        assert_eq!(x.to_string(), "(F p & !(F q)) | (!(F p) & F q)");
        let t = LtlFormula::parse("p & !p").unwrap();
        assert_eq!(t.to_string(), "p & !p");
    }

    #[test]
    fn print_parse_roundtrip_is_structural_identity() {
        for text in [
            "(F x3) -> (G x3)",
            "a -> b -> c",
            "p U q U r",
            "X (X p)",
            "G (p -> F q)",
            "(p | q) & !(p & q)",
        ] {
            let f = LtlFormula::parse(text).unwrap();
            let printed = f.to_string();
            let g = LtlFormula::parse(&printed).unwrap();
            assert_eq!(f, g, "roundtrip changed {text} -> {printed}");
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = LtlFormula::parse("p & ").unwrap_err();
        assert_eq!(e.offset, 4);
        let e = LtlFormula::parse("p % q").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(e.message.contains("unknown operator token"));
    }

    #[test]
    fn precedence_matches_grammar() {
        // -> loosest, then |, &, U, unary tightest.
        let a = LtlFormula::parse("F p U q").unwrap();
        let b = LtlFormula::parse("(F p) U q").unwrap();
        assert_eq!(a, b);
        let c = LtlFormula::parse("p & q | r").unwrap();
        let d = LtlFormula::parse("(p & q) | r").unwrap();
        assert_eq!(c, d);
        let e = LtlFormula::parse("p | q -> r").unwrap();
        let f = LtlFormula::parse("(p | q) -> r").unwrap();
        assert_eq!(e, f);
        let g = LtlFormula::parse("p U q & r").unwrap();
        let h = LtlFormula::parse("(p U q) & r").unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn evaluate_globally_and_next() {
        let ps = props(&["p"]);
        let g = LtlFormula::parse("G p").unwrap();
        let u = trace_from_str("1;1;1").unwrap();
        assert!(evaluate(&g, &u, &ps, 0).unwrap());

        let x = LtlFormula::parse("X p").unwrap();
        assert!(!evaluate(&x, &trace_from_str("1;0").unwrap(), &ps, 0).unwrap());
        assert!(evaluate(&x, &trace_from_str("0;1").unwrap(), &ps, 0).unwrap());
        // Strong next: false on a single-step trace.
        assert!(!evaluate(&x, &trace_from_str("1").unwrap(), &ps, 0).unwrap());
    }

    #[test]
    fn evaluate_until() {
        let ps = props(&["p", "q"]);
        let f = LtlFormula::parse("p U q").unwrap();
        let yes = trace_from_str("1,0;1,0;0,1").unwrap();
        let no = trace_from_str("1,0;0,0;0,1").unwrap();
        assert!(evaluate(&f, &yes, &ps, 0).unwrap());
        assert!(!evaluate(&f, &no, &ps, 0).unwrap());
    }

    #[test]
    fn evaluate_at_positions_and_errors() {
        let ps = props(&["p"]);
        let f = LtlFormula::parse("p").unwrap();
        let u = trace_from_str("0;1").unwrap();
        assert!(!evaluate(&f, &u, &ps, 0).unwrap());
        assert!(evaluate(&f, &u, &ps, 1).unwrap());
        assert!(matches!(
            evaluate(&f, &u, &ps, 2),
            Err(EvalError::PositionOutOfRange { .. })
        ));
        let unknown = LtlFormula::parse("q").unwrap();
        assert!(matches!(
            evaluate(&unknown, &u, &ps, 0),
            Err(EvalError::UnknownAtom(_))
        ));
    }

    #[test]
    fn strong_next_false_at_last_position_for_any_body() {
        let ps = props(&["p", "q"]);
        let u = trace_from_str("1,1;1,1").unwrap();
        for body in ["p", "q", "p U q", "G p", "F q"] {
            let f = LtlFormula::parse(&format!("X ({body})")).unwrap();
            assert!(!evaluate(&f, &u, &ps, 1).unwrap(), "X {body} at last pos");
        }
    }

    #[test]
    fn semantic_identities_hold_pointwise() {
        // F f == (p | !p) U f ; G f == !F !f ; a -> b == !a | b,
        // on every trace of length <= 6 over two propositions.
        let ps = props(&["p", "q"]);
        let pairs = [
            ("F q", "(p | !p) U q"),
            ("G q", "!(F (!q))"),
            ("p -> q", "(!p) | q"),
            ("F (p & q)", "(p | !p) U (p & q)"),
            ("G (p | q)", "!(F (!(p | q)))"),
        ];
        for (lhs, rhs) in pairs {
            let f = LtlFormula::parse(lhs).unwrap();
            let g = LtlFormula::parse(rhs).unwrap();
            for len in 1..=6usize {
                for code in 0..(1usize << (2 * len)) {
                    let steps = (0..len)
                        .map(|t| crate::trace::Valuation::from_mask(code >> (2 * t) & 3, 2))
                        .collect();
                    let u = Trace::new(steps).unwrap();
                    assert_eq!(
                        evaluate(&f, &u, &ps, 0).unwrap(),
                        evaluate(&g, &u, &ps, 0).unwrap(),
                        "{lhs} vs {rhs} on {u}"
                    );
                }
            }
        }
    }

    #[test]
    fn subformula_order_is_topological() {
        let f = LtlFormula::parse("(F x3) -> (G x3)").unwrap();
        for (i, node) in f.nodes().iter().enumerate() {
            match node {
                LtlNode::Atom(_) => {}
                LtlNode::Unary(_, c) => assert!(*c < i),
                LtlNode::Binary(_, l, r) => assert!(*l < i && *r < i),
            }
        }
        // Maximal sharing: the two x3 occurrences are one node.
        assert_eq!(f.atoms().count(), 1);
    }
}
