//! Sample generation from ground-truth formulas, label-noise injection, and
//! the benchmark grid.
//!
//! Everything here is seeded with the portable generator in [`crate::rng`];
//! identical seeds reproduce samples and benchmark grids byte for byte.

use crate::deadline::Deadline;
use crate::learn::{learn_exact, learn_noisy, LearnError, LearnResult, LearnStatus, NoisyMode};
use crate::ltl::{BoundFormula, EvalError, FormulaBuilder, FormulaParseError, LtlFormula, NodeRef};
use crate::rng::{derive_seed, SplitMix64};
use crate::trace::{Sample, SampleError, Trace, Valuation};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;
use thiserror::Error;

/// Default ground-truth formulas for the benchmark grid: absence, existence,
/// universality, until/response and disjunctive patterns over two
/// propositions. Artifact-chosen common patterns.
pub const DEFAULT_GROUND_TRUTHS: [&str; 12] = [
    "G x0",
    "F x0",
    "G (!x0)",
    "x0 U x1",
    "F (x0 & x1)",
    "G (x0 -> F x1)",
    "(F x0) -> (G x0)",
    "G (x0 | x1)",
    "X x1",
    "F (G x0)",
    "(G x0) | (G x1)",
    "!(F (x0 & x1))",
];

const ATTEMPTS_PER_TRACE: usize = 5000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(
        "sample quota unreachable after {attempts} attempts \
         ({found_pos} positive, {found_neg} negative traces found)"
    )]
    QuotaUnreachable {
        attempts: usize,
        found_pos: usize,
        found_neg: usize,
    },
    #[error("noise rate {0} is outside [0, 1]")]
    RateRange(f64),
    #[error("noise injection left no positive traces")]
    NoPositivesAfterNoise,
    #[error("invalid bench spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Formula(#[from] FormulaParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

/// Rejection sampling against `formula`: uniform lengths in
/// `[len_min, len_max]`, uniform valuation bits (proposition 0 first), traces
/// routed by the evaluator until both quotas fill. Deterministic per seed.
/// `num_neg = 0` generates positives only (the one-class shape).
pub fn gen_sample(
    formula: &LtlFormula,
    props: &[String],
    num_pos: usize,
    num_neg: usize,
    len_min: usize,
    len_max: usize,
    seed: u64,
) -> Result<Sample, HarnessError> {
    if num_pos == 0 {
        return Err(HarnessError::InvalidSpec(
            "positive trace count must be >= 1".into(),
        ));
    }
    if len_min < 1 || len_min > len_max {
        return Err(HarnessError::InvalidSpec(format!(
            "bad length range [{len_min}, {len_max}]"
        )));
    }
    let bound = BoundFormula::bind(formula, props)?;
    let mut rng = SplitMix64::new(seed);
    let mut positives = Vec::with_capacity(num_pos);
    let mut negatives = Vec::with_capacity(num_neg);
    let budget = ATTEMPTS_PER_TRACE * (num_pos + num_neg);
    let mut attempts = 0;
    while positives.len() < num_pos || negatives.len() < num_neg {
        if attempts >= budget {
            return Err(HarnessError::QuotaUnreachable {
                attempts,
                found_pos: positives.len(),
                found_neg: negatives.len(),
            });
        }
        attempts += 1;
        let len = len_min + rng.next_below((len_max - len_min + 1) as u64) as usize;
        let steps: Vec<Valuation> = (0..len)
            .map(|_| Valuation::new((0..props.len()).map(|_| rng.next_bool()).collect()))
            .collect();
        let trace = Trace::new(steps).expect("generated traces are nonempty");
        if bound.accepts(&trace) {
            if positives.len() < num_pos {
                positives.push(trace);
            }
        } else if negatives.len() < num_neg {
            negatives.push(trace);
        }
    }
    Ok(Sample::new(props.to_vec(), positives, negatives)?)
}

/// Round-half-up with a guard against products landing just below the true
/// value (`0.35 * 10` in f64).
fn round_half_up(x: f64) -> usize {
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// Moves exactly `round(rate * total)` distinct traces (chosen uniformly by a
/// seeded partial Fisher-Yates shuffle over positions, positives first) to
/// the opposite label list. Unmoved traces keep their relative order; moved
/// traces append in their original order.
pub fn inject_noise(sample: &Sample, rate: f64, seed: u64) -> Result<Sample, HarnessError> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(HarnessError::RateRange(rate));
    }
    let total = sample.total();
    let flips = round_half_up(rate * total as f64).min(total);
    let mut idx: Vec<usize> = (0..total).collect();
    let mut rng = SplitMix64::new(seed);
    for i in 0..flips {
        let j = i + rng.next_below((total - i) as u64) as usize;
        idx.swap(i, j);
    }
    let flipped: HashSet<usize> = idx[..flips].iter().copied().collect();

    let np = sample.positives().len();
    let mut new_pos = Vec::new();
    let mut new_neg = Vec::new();
    let mut moved_to_neg = Vec::new();
    let mut moved_to_pos = Vec::new();
    for (i, t) in sample.positives().iter().enumerate() {
        if flipped.contains(&i) {
            moved_to_neg.push(t.clone());
        } else {
            new_pos.push(t.clone());
        }
    }
    for (i, t) in sample.negatives().iter().enumerate() {
        if flipped.contains(&(np + i)) {
            moved_to_pos.push(t.clone());
        } else {
            new_neg.push(t.clone());
        }
    }
    new_pos.extend(moved_to_pos);
    new_neg.extend(moved_to_neg);
    if new_pos.is_empty() {
        return Err(HarnessError::NoPositivesAfterNoise);
    }
    Ok(Sample::new(sample.propositions().to_vec(), new_pos, new_neg)?)
}

// ---------------------------------------------------------------------------
// Benchmark grid

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchSpec {
    /// Ground-truth formulas; empty means [`DEFAULT_GROUND_TRUTHS`].
    #[serde(default)]
    pub formulas: Vec<String>,
    pub positives: usize,
    pub negatives: usize,
    pub len_min: usize,
    pub len_max: usize,
    pub noise_rates: Vec<f64>,
    pub kappas: Vec<f64>,
    /// Any of `exact`, `noisy-decision`, `noisy-optimize`.
    pub modes: Vec<String>,
    pub max_size: u32,
    pub timeout_secs: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub ground_truth: String,
    pub noise: f64,
    pub mode: String,
    pub kappa: f64,
    pub size: Option<u32>,
    pub misclassified: Option<usize>,
    pub rate: Option<f64>,
    pub elapsed_ms: u128,
    pub status: LearnStatus,
}

fn validate_spec(spec: &BenchSpec) -> Result<Vec<(String, LtlFormula)>, HarnessError> {
    let bad = |m: String| Err(HarnessError::InvalidSpec(m));
    if spec.positives < 1 || spec.negatives < 1 {
        return bad("positives and negatives must be >= 1".into());
    }
    if spec.len_min < 1 || spec.len_min > spec.len_max {
        return bad(format!(
            "bad length range [{}, {}]",
            spec.len_min, spec.len_max
        ));
    }
    if spec.timeout_secs <= 0.0 {
        return bad("timeout_secs must be positive".into());
    }
    if spec.max_size < 1 {
        return bad("max_size must be >= 1".into());
    }
    if spec.modes.is_empty() {
        return bad("at least one mode required".into());
    }
    for m in &spec.modes {
        match m.as_str() {
            "exact" => {}
            "noisy-decision" | "noisy-optimize" => {
                if spec.kappas.is_empty() {
                    return bad(format!("mode {m} needs at least one kappa"));
                }
            }
            other => return bad(format!("unknown mode `{other}`")),
        }
    }
    for r in &spec.noise_rates {
        if !(0.0..=1.0).contains(r) {
            return Err(HarnessError::RateRange(*r));
        }
    }
    for k in &spec.kappas {
        if !(0.0..=1.0).contains(k) {
            return bad(format!("kappa {k} outside [0, 1]"));
        }
    }
    if spec.noise_rates.is_empty() {
        return bad("at least one noise rate required".into());
    }
    let texts: Vec<String> = if spec.formulas.is_empty() {
        DEFAULT_GROUND_TRUTHS
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        spec.formulas.clone()
    };
    let mut parsed = Vec::new();
    for t in texts {
        let f = LtlFormula::parse(&t)?;
        parsed.push((t, f));
    }
    Ok(parsed)
}

/// Mode/kappa combinations of a spec: `exact` contributes one combo with
/// kappa 0, each noisy mode one combo per kappa.
pub fn mode_combos(spec: &BenchSpec) -> Vec<(String, f64)> {
    let mut combos = Vec::new();
    for m in &spec.modes {
        if m == "exact" {
            combos.push((m.clone(), 0.0));
        } else {
            for &k in &spec.kappas {
                combos.push((m.clone(), k));
            }
        }
    }
    combos
}

/// Propositions covering every atom of the ground-truth formulas: default
/// names up to the highest `x<i>` mentioned (at least one).
fn grid_props(formulas: &[(String, LtlFormula)]) -> Result<Vec<String>, HarnessError> {
    let mut width = 1;
    for (text, f) in formulas {
        for atom in f.atoms() {
            match atom.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                Some(i) => width = width.max(i + 1),
                None => {
                    return Err(HarnessError::InvalidSpec(format!(
                        "bench formulas must use default proposition names x0, x1, ...: `{text}`"
                    )))
                }
            }
        }
    }
    Ok(crate::trace::default_propositions(width))
}

/// Runs the full grid: for each ground truth and noise rate one shared
/// sample, learned once per mode/kappa combo. Rows come back in spec order
/// regardless of `jobs`.
pub fn run_bench(spec: &BenchSpec, jobs: usize) -> Result<Vec<BenchRow>, HarnessError> {
    let formulas = validate_spec(spec)?;
    let combos = mode_combos(spec);
    let props = grid_props(&formulas)?;

    // Shared samples per (ground truth, noise rate).
    let mut samples = Vec::new();
    for (gi, (_, f)) in formulas.iter().enumerate() {
        let base = gen_sample(
            f,
            &props,
            spec.positives,
            spec.negatives,
            spec.len_min,
            spec.len_max,
            derive_seed(spec.seed, &[1, gi as u64]),
        )?;
        for (ni, &rate) in spec.noise_rates.iter().enumerate() {
            let noisy = inject_noise(
                &base,
                rate,
                derive_seed(spec.seed, &[2, gi as u64, ni as u64]),
            )?;
            samples.push(noisy);
        }
    }

    struct Cell {
        gi: usize,
        ni: usize,
        ci: usize,
        sample_idx: usize,
    }
    let mut cells = Vec::new();
    for gi in 0..formulas.len() {
        for ni in 0..spec.noise_rates.len() {
            for ci in 0..combos.len() {
                cells.push(Cell {
                    gi,
                    ni,
                    ci,
                    sample_idx: gi * spec.noise_rates.len() + ni,
                });
            }
        }
    }

    let run_cell = |cell: &Cell| -> Result<BenchRow, HarnessError> {
        let (mode, kappa) = &combos[cell.ci];
        let sample = &samples[cell.sample_idx];
        let deadline = Deadline::after(Duration::from_secs_f64(spec.timeout_secs));
        let result: LearnResult = match mode.as_str() {
            "exact" => learn_exact(sample, spec.max_size, deadline)?,
            "noisy-decision" => {
                learn_noisy(sample, *kappa, spec.max_size, NoisyMode::Decision, deadline)?
            }
            "noisy-optimize" => {
                learn_noisy(sample, *kappa, spec.max_size, NoisyMode::Optimize, deadline)?
            }
            _ => unreachable!("modes validated"),
        };
        Ok(BenchRow {
            ground_truth: formulas[cell.gi].0.clone(),
            noise: spec.noise_rates[cell.ni],
            mode: mode.clone(),
            kappa: *kappa,
            size: result.size,
            misclassified: result.formula.as_ref().map(|_| result.misclassified),
            rate: result.formula.as_ref().map(|_| result.rate),
            elapsed_ms: result.elapsed.as_millis(),
            status: result.status,
        })
    };

    if jobs <= 1 {
        let mut rows = Vec::with_capacity(cells.len());
        for cell in &cells {
            rows.push(run_cell(cell)?);
        }
        return Ok(rows);
    }
    let slots: Vec<Mutex<Option<Result<BenchRow, HarnessError>>>> =
        (0..cells.len()).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= cells.len() {
                    break;
                }
                let row = run_cell(&cells[i]);
                *slots[i].lock().unwrap() = Some(row);
            });
        }
    });
    let mut rows = Vec::with_capacity(cells.len());
    for slot in slots {
        rows.push(slot.into_inner().unwrap().expect("cell computed")?);
    }
    Ok(rows)
}

/// CSV with the fixed header; `size`, `misclassified`, and `rate` are empty
/// when no formula was produced (Unsat/Timeout rows).
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out =
        String::from("ground_truth,noise,mode,kappa,size,misclassified,rate,elapsed_ms,status\n");
    for r in rows {
        let size = r.size.map(|s| s.to_string()).unwrap_or_default();
        let mis = r.misclassified.map(|m| m.to_string()).unwrap_or_default();
        let rate = r.rate.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.ground_truth,
            r.noise,
            r.mode,
            r.kappa,
            size,
            mis,
            rate,
            r.elapsed_ms,
            r.status.as_str()
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Test-support generators (also used by the acceptance suite)

/// Seeded random formula with tree size exactly `size` (DAG size may shrink
/// under sharing). Atoms draw uniformly from `props`.
pub fn random_formula(rng: &mut SplitMix64, size: usize, props: &[String]) -> LtlFormula {
    let mut builder = FormulaBuilder::new();
    let root = random_node(rng, &mut builder, size.max(1), props);
    builder.build(root)
}

fn random_node(
    rng: &mut SplitMix64,
    builder: &mut FormulaBuilder,
    size: usize,
    props: &[String],
) -> NodeRef {
    if size == 1 {
        let p = rng.next_below(props.len() as u64) as usize;
        return builder.atom(&props[p]);
    }
    let binary_ok = size >= 3;
    let choice = if binary_ok {
        rng.next_below(8)
    } else {
        rng.next_below(4)
    };
    match choice {
        0..=3 => {
            let child = random_node(rng, builder, size - 1, props);
            match choice {
                0 => builder.not(child),
                1 => builder.next(child),
                2 => builder.finally(child),
                _ => builder.globally(child),
            }
        }
        _ => {
            let left_size = 1 + rng.next_below((size - 2) as u64) as usize;
            let right_size = size - 1 - left_size;
            let left = random_node(rng, builder, left_size, props);
            let right = random_node(rng, builder, right_size, props);
            match choice {
                4 => builder.and(left, right),
                5 => builder.or(left, right),
                6 => builder.implies(left, right),
                _ => builder.until(left, right),
            }
        }
    }
}

/// Every trace of length `1..=max_len` over `width` propositions, shortest
/// first, lexicographic by valuation bitmask within a length.
pub fn all_traces(width: usize, max_len: usize) -> Vec<Trace> {
    let letters = 1usize << width;
    let mut out = Vec::new();
    for len in 1..=max_len {
        for code in 0..letters.pow(len as u32) {
            let mut c = code;
            let mut steps = Vec::with_capacity(len);
            for _ in 0..len {
                steps.push(Valuation::from_mask(c % letters, width));
                c /= letters;
            }
            out.push(Trace::new(steps).expect("nonempty"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::evaluate;

    #[test]
    fn gen_sample_g_p_shape() {
        let f = LtlFormula::parse("G x0").unwrap();
        let props = crate::trace::default_propositions(1);
        let s = gen_sample(&f, &props, 5, 5, 2, 4, 7).unwrap();
        assert_eq!(s.positives().len(), 5);
        assert_eq!(s.negatives().len(), 5);
        for t in s.positives() {
            assert!(t.steps().iter().all(|v| v.bit(0)), "positive not all-ones");
            assert!(evaluate(&f, t, &props, 0).unwrap());
        }
        for t in s.negatives() {
            assert!(t.steps().iter().any(|v| !v.bit(0)));
            assert!(!evaluate(&f, t, &props, 0).unwrap());
        }
        // Determinism.
        assert_eq!(gen_sample(&f, &props, 5, 5, 2, 4, 7).unwrap(), s);
    }

    #[test]
    fn gen_sample_empty_language_fails() {
        let f = LtlFormula::parse("x0 & !x0").unwrap();
        let props = crate::trace::default_propositions(1);
        assert!(matches!(
            gen_sample(&f, &props, 1, 1, 1, 3, 1),
            Err(HarnessError::QuotaUnreachable { .. })
        ));
    }

    #[test]
    fn noise_flips_exact_count() {
        let f = LtlFormula::parse("F x0").unwrap();
        let props = crate::trace::default_propositions(1);
        let s = gen_sample(&f, &props, 50, 50, 2, 6, 3).unwrap();
        let noisy = inject_noise(&s, 0.05, 11).unwrap();
        assert_eq!(noisy.total(), 100);
        // Exactly 5 flips: ground-truth misclassification equals 5/100.
        let m = noisy.misclassification(&f).unwrap();
        assert_eq!(m.count, 5);
        // Determinism.
        assert_eq!(inject_noise(&s, 0.05, 11).unwrap(), noisy);
    }

    #[test]
    fn noise_rate_zero_and_one() {
        let f = LtlFormula::parse("F x0").unwrap();
        let props = crate::trace::default_propositions(1);
        let s = gen_sample(&f, &props, 10, 10, 2, 5, 5).unwrap();
        assert_eq!(inject_noise(&s, 0.0, 1).unwrap(), s);
        let swapped = inject_noise(&s, 1.0, 1).unwrap();
        let m = swapped.misclassification(&f).unwrap();
        assert_eq!(m.count, 20);
        assert_eq!(m.rate, 1.0);
    }

    #[test]
    fn default_ground_truths_parse() {
        for text in DEFAULT_GROUND_TRUTHS {
            let f = LtlFormula::parse(text).unwrap();
            assert!(f.dag_size() <= 6, "{text} too large");
        }
    }

    #[test]
    fn bench_grid_shape_and_determinism() {
        let spec = BenchSpec {
            formulas: vec!["G x0".into(), "F x0".into()],
            positives: 6,
            negatives: 6,
            len_min: 2,
            len_max: 4,
            noise_rates: vec![0.0, 0.05],
            kappas: vec![0.1],
            modes: vec!["exact".into(), "noisy-decision".into()],
            max_size: 3,
            timeout_secs: 30.0,
            seed: 42,
        };
        let rows = run_bench(&spec, 1).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        for r in &rows {
            if r.noise == 0.0 && r.mode == "exact" && r.status != LearnStatus::Timeout {
                assert_eq!(r.misclassified, Some(0));
            }
        }
        // Byte-identical CSV modulo the elapsed_ms column, across jobs counts.
        let strip = |rows: &[BenchRow]| {
            rows_to_csv(rows)
                .lines()
                .map(|l| {
                    let mut cols: Vec<&str> = l.split(',').collect();
                    if cols.len() > 7 {
                        cols[7] = "-";
                    }
                    cols.join(",")
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        let again = run_bench(&spec, 2).unwrap();
        assert_eq!(strip(&rows), strip(&again));
    }

    #[test]
    fn random_formula_sizes_bounded() {
        let props = crate::trace::default_propositions(2);
        let mut rng = SplitMix64::new(1);
        for _ in 0..50 {
            let size = 1 + rng.next_below(4) as usize;
            let f = random_formula(&mut rng, size, &props);
            assert!(f.dag_size() >= 1 && f.dag_size() <= size);
        }
    }

    #[test]
    fn all_traces_counts() {
        assert_eq!(all_traces(1, 3).len(), 2 + 4 + 8);
        assert_eq!(all_traces(2, 2).len(), 4 + 16);
    }
}
