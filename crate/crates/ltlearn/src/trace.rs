//! Traces, labeled samples, and the `.trc` file format.
//!
//! A sample file is UTF-8 text (LF or CRLF accepted on input, LF emitted):
//!
//! ```text
//! # comment lines and blank lines are ignored
//! aps: p,q          <- optional header naming the propositions
//! 1,0;0,1           <- a trace: valuations joined by ';', bits by ','
//! ---               <- separator; negative traces follow (may be absent)
//! 0,0;0,1
//! ```
//!
//! Without a header, propositions are named `x0..x{k-1}`. A file without a
//! `---` line contains positive traces only (the one-class input shape).

use crate::ltl::{EvalError, LtlFormula};
use std::fmt;
use thiserror::Error;

/// One time step: the truth value of every proposition, index-aligned with
/// the sample's proposition list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation {
    bits: Vec<bool>,
}

impl Valuation {
    pub fn new(bits: Vec<bool>) -> Self {
        assert!(!bits.is_empty(), "valuation must have width >= 1");
        Valuation { bits }
    }

    /// Builds a valuation from the low `width` bits of `mask`; proposition 0
    /// is the least significant bit.
    pub fn from_mask(mask: usize, width: usize) -> Self {
        Valuation::new((0..width).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// The valuation as a bitmask, proposition 0 in the least significant bit.
    pub fn to_mask(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |m, (i, &b)| if b { m | 1 << i } else { m })
    }
}

/// A finite, nonempty word of valuations of equal width.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace {
    steps: Vec<Valuation>,
}

impl Trace {
    pub fn new(steps: Vec<Valuation>) -> Result<Self, SampleError> {
        if steps.is_empty() {
            return Err(SampleError::EmptyTrace);
        }
        let w = steps[0].width();
        if steps.iter().any(|s| s.width() != w) {
            return Err(SampleError::MixedWidth);
        }
        Ok(Trace { steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn width(&self) -> usize {
        self.steps[0].width()
    }

    pub fn step(&self, t: usize) -> &Valuation {
        &self.steps[t]
    }

    pub fn steps(&self) -> &[Valuation] {
        &self.steps
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, step) in self.steps.iter().enumerate() {
            if t > 0 {
                f.write_str(";")?;
            }
            for (i, &b) in step.bits().iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                f.write_str(if b { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

/// Labeled traces over a shared proposition list. Negatives may be empty
/// (the one-class input shape).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    propositions: Vec<String>,
    positives: Vec<Trace>,
    negatives: Vec<Trace>,
}

/// Misclassification of a sample by a formula: positives the formula rejects
/// plus negatives it accepts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Misclassification {
    pub count: usize,
    pub rate: f64,
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: inconsistent valuation width (expected {expected}, found {found})")]
    InconsistentWidth {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid proposition name `{name}`")]
    BadPropositionName { line: usize, name: String },
    #[error("line {line}: duplicate proposition name `{name}`")]
    DuplicateProposition { line: usize, name: String },
    #[error("sample contains no positive traces")]
    NoPositives,
    #[error("trace must have length >= 1")]
    EmptyTrace,
    #[error("valuations in a trace must all have the same width")]
    MixedWidth,
    #[error("trace width {found} does not match proposition count {expected}")]
    WidthMismatch { expected: usize, found: usize },
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Operator keywords of the formula grammar; rejected as proposition names so
/// every parsed sample stays usable with `eval --formula`.
const RESERVED: [&str; 4] = ["X", "F", "G", "U"];

/// Default proposition names `x0..x{k-1}`.
pub fn default_propositions(width: usize) -> Vec<String> {
    (0..width).map(|i| format!("x{i}")).collect()
}

impl Sample {
    pub fn new(
        propositions: Vec<String>,
        positives: Vec<Trace>,
        negatives: Vec<Trace>,
    ) -> Result<Self, SampleError> {
        if positives.is_empty() {
            return Err(SampleError::NoPositives);
        }
        let width = propositions.len();
        assert!(width >= 1, "sample must have at least one proposition");
        for t in positives.iter().chain(negatives.iter()) {
            if t.width() != width {
                return Err(SampleError::WidthMismatch {
                    expected: width,
                    found: t.width(),
                });
            }
        }
        Ok(Sample {
            propositions,
            positives,
            negatives,
        })
    }

    pub fn propositions(&self) -> &[String] {
        &self.propositions
    }

    pub fn positives(&self) -> &[Trace] {
        &self.positives
    }

    pub fn negatives(&self) -> &[Trace] {
        &self.negatives
    }

    pub fn total(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    /// All traces with their labels, positives first (`true` = positive).
    pub fn labeled(&self) -> impl Iterator<Item = (&Trace, bool)> {
        self.positives
            .iter()
            .map(|t| (t, true))
            .chain(self.negatives.iter().map(|t| (t, false)))
    }

    /// Parses the sample file format. Trace order matches file order.
    pub fn parse(text: &str) -> Result<Self, SampleError> {
        let mut props: Option<Vec<String>> = None;
        let mut width: Option<usize> = None;
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        let mut in_negatives = false;
        let mut seen_meaningful = false;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !seen_meaningful {
                seen_meaningful = true;
                if let Some(rest) = line.strip_prefix("aps:") {
                    let mut names = Vec::new();
                    for piece in rest.split(',') {
                        let name = piece.trim();
                        if !valid_name(name) {
                            return Err(SampleError::BadPropositionName {
                                line: line_no,
                                name: name.to_string(),
                            });
                        }
                        if RESERVED.contains(&name) {
                            return Err(SampleError::BadPropositionName {
                                line: line_no,
                                name: name.to_string(),
                            });
                        }
                        if names.iter().any(|n| n == name) {
                            return Err(SampleError::DuplicateProposition {
                                line: line_no,
                                name: name.to_string(),
                            });
                        }
                        names.push(name.to_string());
                    }
                    if names.is_empty() {
                        return Err(SampleError::Malformed {
                            line: line_no,
                            reason: "empty proposition list".to_string(),
                        });
                    }
                    width = Some(names.len());
                    props = Some(names);
                    continue;
                }
            }
            if line == "---" {
                if in_negatives {
                    return Err(SampleError::Malformed {
                        line: line_no,
                        reason: "second `---` separator".to_string(),
                    });
                }
                in_negatives = true;
                continue;
            }
            let trace = parse_trace_line(line, line_no, &mut width)?;
            if in_negatives {
                negatives.push(trace);
            } else {
                positives.push(trace);
            }
        }

        if positives.is_empty() {
            return Err(SampleError::NoPositives);
        }
        let width = width.expect("width fixed by first trace");
        let props = props.unwrap_or_else(|| default_propositions(width));
        Sample::new(props, positives, negatives)
    }

    /// Serializes to the sample file format; `Sample::parse` of the output
    /// reproduces `self` exactly. The `aps:` header is emitted only when the
    /// proposition names differ from the defaults.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.propositions != default_propositions(self.propositions.len()) {
            out.push_str("aps: ");
            out.push_str(&self.propositions.join(","));
            out.push('\n');
        }
        for t in &self.positives {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out.push_str("---\n");
        for t in &self.negatives {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }

    /// Counts the traces `f` misclassifies: positives it rejects plus
    /// negatives it accepts.
    pub fn misclassification(&self, f: &LtlFormula) -> Result<Misclassification, EvalError> {
        let mut count = 0;
        for (trace, label) in self.labeled() {
            let sat = crate::ltl::evaluate(f, trace, &self.propositions, 0)?;
            if sat != label {
                count += 1;
            }
        }
        Ok(Misclassification {
            count,
            rate: count as f64 / self.total() as f64,
        })
    }
}

fn parse_trace_line(
    line: &str,
    line_no: usize,
    width: &mut Option<usize>,
) -> Result<Trace, SampleError> {
    let mut steps = Vec::new();
    for val_text in line.split(';') {
        let val_text = val_text.trim();
        if val_text.is_empty() {
            return Err(SampleError::Malformed {
                line: line_no,
                reason: "empty valuation".to_string(),
            });
        }
        let mut bits = Vec::new();
        for bit_text in val_text.split(',') {
            match bit_text.trim() {
                "0" => bits.push(false),
                "1" => bits.push(true),
                other => {
                    return Err(SampleError::Malformed {
                        line: line_no,
                        reason: format!("expected 0 or 1, found `{other}`"),
                    })
                }
            }
        }
        match *width {
            Some(w) if w != bits.len() => {
                return Err(SampleError::InconsistentWidth {
                    line: line_no,
                    expected: w,
                    found: bits.len(),
                })
            }
            Some(_) => {}
            None => *width = Some(bits.len()),
        }
        steps.push(Valuation::new(bits));
    }
    Trace::new(steps)
}

/// Convenience for tests and the harness: parses `"1,0;0,1"` into a trace.
pub fn trace_from_str(text: &str) -> Result<Trace, SampleError> {
    let mut width = None;
    parse_trace_line(text.trim(), 0, &mut width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::LtlFormula;

    #[test]
    fn parse_basic_sample() {
        let s = Sample::parse("1;1;1\n---\n1;0;1\n").unwrap();
        assert_eq!(s.propositions(), ["x0".to_string()]);
        assert_eq!(s.positives().len(), 1);
        assert_eq!(s.negatives().len(), 1);
        assert_eq!(s.positives()[0].len(), 3);
        assert!(s.positives()[0].step(0).bit(0));
        assert!(!s.negatives()[0].step(1).bit(0));
    }

    #[test]
    fn parse_header_and_empty_negatives() {
        let s = Sample::parse("aps: p,q\n1,0;0,1\n---\n").unwrap();
        assert_eq!(s.propositions(), ["p".to_string(), "q".to_string()]);
        assert_eq!(s.positives().len(), 1);
        assert!(s.negatives().is_empty());
    }

    #[test]
    fn parse_positives_only_without_separator() {
        let s = Sample::parse("1\n0\n").unwrap();
        assert_eq!(s.positives().len(), 2);
        assert!(s.negatives().is_empty());
    }

    #[test]
    fn parse_rejects_inconsistent_width() {
        let err = Sample::parse("1,0;1\n---\n1\n").unwrap_err();
        match err {
            SampleError::InconsistentWidth { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = Sample::parse("# comment\n1\n2\n").unwrap_err();
        match err {
            SampleError::Malformed { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_empty_and_reserved() {
        assert!(matches!(
            Sample::parse("---\n1\n"),
            Err(SampleError::NoPositives)
        ));
        assert!(matches!(
            Sample::parse("aps: X\n1\n"),
            Err(SampleError::BadPropositionName { .. })
        ));
    }

    #[test]
    fn parse_accepts_crlf_and_comments() {
        let s = Sample::parse("# c\r\naps: p\r\n1;1\r\n---\r\n0\r\n").unwrap();
        assert_eq!(s.propositions(), ["p".to_string()]);
        assert_eq!(s.positives()[0].len(), 2);
    }

    #[test]
    fn serialize_matches_expected_form() {
        let s = Sample::parse("1;1;1\n---\n1;0;1\n").unwrap();
        assert_eq!(s.to_text(), "1;1;1\n---\n1;0;1\n");

        let named = Sample::parse("aps: p,q\n1,0;0,1\n---\n").unwrap();
        assert!(named.to_text().starts_with("aps: p,q\n"));

        let occ = Sample::parse("1\n0\n").unwrap();
        assert_eq!(occ.to_text(), "1\n0\n---\n");
    }

    #[test]
    fn roundtrip_identity() {
        for text in ["1;1;1\n---\n1;0;1\n", "aps: p,q\n1,0;0,1\n---\n", "1\n0\n"] {
            let s = Sample::parse(text).unwrap();
            assert_eq!(Sample::parse(&s.to_text()).unwrap(), s);
        }
    }

    #[test]
    fn misclassification_examples() {
        let s = Sample::parse("1;1;1\n---\n1;0;1\n").unwrap();
        let f = LtlFormula::parse("G x0").unwrap();
        let m = s.misclassification(&f).unwrap();
        assert_eq!(m.count, 0);
        assert_eq!(m.rate, 0.0);

        let s2 = Sample::parse("1;1;1\n1;0;1\n---\n").unwrap();
        let m2 = s2.misclassification(&f).unwrap();
        assert_eq!(m2.count, 1);
        assert_eq!(m2.rate, 0.5);
    }

    #[test]
    fn misclassification_rejects_unknown_proposition() {
        let s = Sample::parse("1\n---\n0\n").unwrap();
        let f = LtlFormula::parse("G zz").unwrap();
        assert!(s.misclassification(&f).is_err());
    }
}
