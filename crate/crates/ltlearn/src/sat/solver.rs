//! CDCL core: two-literal watching, 1-UIP clause learning with basic
//! minimization, VSIDS-style activity branching, phase saving, and Luby
//! restarts. Fully deterministic: branching ties break toward the lowest
//! variable index, so identical input always yields an identical model.

use crate::deadline::Deadline;
use std::fmt;

pub type Var = u32;

/// A literal; internally `2*var + sign` so watch lists index directly.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        if positive {
            Lit::positive(var)
        } else {
            Lit::negative(var)
        }
    }

    pub fn positive(var: Var) -> Lit {
        Lit(var << 1)
    }

    pub fn negative(var: Var) -> Lit {
        Lit(var << 1 | 1)
    }

    pub fn var(self) -> Var {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // DIMACS numbering: variable v prints as v+1.
        if self.is_positive() {
            write!(f, "{}", self.var() + 1)
        } else {
            write!(f, "-{}", self.var() + 1)
        }
    }
}

/// A total assignment extracted from a satisfying search state.
#[derive(Debug, Clone)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn value(&self, v: Var) -> bool {
        self.values[v as usize]
    }

    pub fn lit(&self, l: Lit) -> bool {
        self.value(l.var()) == l.is_positive()
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug)]
pub enum SolveResult {
    Sat(Model),
    Unsat,
    Timeout,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat)
    }
}

const INVALID: u32 = u32::MAX;

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

pub struct Solver {
    num_vars: usize,
    clauses: Vec<Clause>,
    /// Clauses as added (tautologies dropped, duplicate literals merged);
    /// the instance for DIMACS export and clause counting.
    original: Vec<Vec<Lit>>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<Option<bool>>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    heap: VarHeap,
    polarity: Vec<bool>,
    var_inc: f64,
    cla_inc: f64,
    ok: bool,
    seen: Vec<bool>,
    pub(crate) softs: Vec<Lit>,
    num_learnts: usize,
    conflicts: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            num_vars: 0,
            clauses: Vec::new(),
            original: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            heap: VarHeap::new(),
            polarity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            ok: true,
            seen: Vec::new(),
            softs: Vec::new(),
            num_learnts: 0,
            conflicts: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of non-tautological clauses added to the instance.
    pub fn clause_count(&self) -> usize {
        self.original.len()
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.num_vars as Var;
        self.num_vars += 1;
        self.assigns.push(None);
        self.level.push(0);
        self.reason.push(INVALID);
        self.polarity.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.push_var();
        self.heap.insert(v);
        v
    }

    fn value(&self, l: Lit) -> Option<bool> {
        self.assigns[l.var() as usize].map(|b| b == l.is_positive())
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Adds a clause. Tautologies are silently dropped; an empty clause makes
    /// the instance permanently unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        debug_assert!(lits.iter().all(|l| (l.var() as usize) < self.num_vars));
        self.pop_to(0);
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        // After sorting by the internal encoding, v and !v are adjacent.
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        self.original.push(c.clone());
        if !self.ok {
            return;
        }
        if c.is_empty() {
            self.ok = false;
            return;
        }
        if c.iter().any(|&l| self.value(l) == Some(true)) {
            return;
        }
        c.retain(|&l| self.value(l).is_none());
        match c.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(c[0], INVALID);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.push_clause(c, false);
            }
        }
    }

    fn push_clause(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        debug_assert!(lits.len() >= 2);
        let id = self.clauses.len() as u32;
        self.watches[(!lits[0]).index()].push(Watcher {
            clause: id,
            blocker: lits[1],
        });
        self.watches[(!lits[1]).index()].push(Watcher {
            clause: id,
            blocker: lits[0],
        });
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        if learnt {
            self.num_learnts += 1;
        }
        id
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        debug_assert!(self.value(l).is_none());
        let v = l.var() as usize;
        self.assigns[v] = Some(l.is_positive());
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn pop_to(&mut self, target: usize) {
        if self.decision_level() <= target {
            return;
        }
        let sep = self.trail_lim[target];
        for i in (sep..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var() as usize;
            self.polarity[v] = l.is_positive();
            self.assigns[v] = None;
            self.reason[v] = INVALID;
            self.heap.insert(l.var());
        }
        self.trail.truncate(sep);
        self.trail_lim.truncate(target);
        self.qhead = sep;
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let widx = p.index();
            let mut ws = std::mem::take(&mut self.watches[widx]);
            let mut i = 0;
            let mut j = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                if self.value(w.blocker) == Some(true) {
                    ws[j] = w;
                    j += 1;
                    i += 1;
                    continue;
                }
                let cid = w.clause as usize;
                // Make lits[1] the falsified watched literal.
                let first = {
                    let c = &mut self.clauses[cid];
                    debug_assert!(!c.deleted);
                    if c.lits[0] == !p {
                        c.lits.swap(0, 1);
                    }
                    debug_assert_eq!(c.lits[1], !p);
                    c.lits[0]
                };
                if first != w.blocker && self.value(first) == Some(true) {
                    ws[j] = Watcher {
                        clause: w.clause,
                        blocker: first,
                    };
                    j += 1;
                    i += 1;
                    continue;
                }
                // Look for a non-false replacement watch.
                let len = self.clauses[cid].lits.len();
                for k in 2..len {
                    let lk = self.clauses[cid].lits[k];
                    if self.value(lk) != Some(false) {
                        self.clauses[cid].lits.swap(1, k);
                        // lk cannot equal !p (it is not false), so this never
                        // pushes into the list we took out.
                        self.watches[(!lk).index()].push(Watcher {
                            clause: w.clause,
                            blocker: first,
                        });
                        i += 1;
                        continue 'watchers;
                    }
                }
                // Unit or conflict.
                ws[j] = Watcher {
                    clause: w.clause,
                    blocker: first,
                };
                j += 1;
                i += 1;
                if self.value(first) == Some(false) {
                    // Conflict: keep the remaining watchers and bail out.
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    ws.truncate(j);
                    self.watches[widx] = ws;
                    self.qhead = self.trail.len();
                    return Some(w.clause);
                }
                self.enqueue(first, w.clause);
            }
            ws.truncate(j);
            self.watches[widx] = ws;
        }
        None
    }

    fn var_bump(&mut self, v: Var) {
        if self.heap.bump(v, self.var_inc) {
            self.heap.rescale();
            self.var_inc *= 1e-100;
        }
    }

    fn cla_bump(&mut self, cid: usize) {
        self.clauses[cid].activity += self.cla_inc;
        if self.clauses[cid].activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// 1-UIP conflict analysis; returns the learnt clause (asserting literal
    /// first) and the backtrack level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize) {
        let current = self.decision_level() as u32;
        let mut learnt: Vec<Lit> = vec![Lit(0)];
        let mut path = 0usize;
        let mut index = self.trail.len();
        let mut p: Option<Lit> = None;

        loop {
            debug_assert_ne!(confl, INVALID);
            if self.clauses[confl as usize].learnt {
                self.cla_bump(confl as usize);
            }
            let skip = usize::from(p.is_some());
            // Copy out to appease the borrow checker; conflict clauses are short.
            let lits: Vec<Lit> = self.clauses[confl as usize].lits[skip..].to_vec();
            for q in lits {
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.var_bump(q.var());
                    if self.level[v] == current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[lit.var() as usize] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var() as usize];
        }
        learnt[0] = !p.unwrap();

        // Basic minimization: a literal is redundant when its reason clause
        // resolves away without introducing new literals.
        let to_clear: Vec<Var> = learnt[1..].iter().map(|l| l.var()).collect();
        let mut j = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            let r = self.reason[l.var() as usize];
            let redundant = r != INVALID
                && self.clauses[r as usize].lits.iter().all(|&q| {
                    q.var() == l.var()
                        || self.seen[q.var() as usize]
                        || self.level[q.var() as usize] == 0
                });
            if !redundant {
                learnt[j] = l;
                j += 1;
            }
        }
        learnt.truncate(j);
        for v in to_clear {
            self.seen[v as usize] = false;
        }

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var() as usize] > self.level[learnt[max_i].var() as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var() as usize] as usize
        };
        (learnt, bt)
    }

    fn locked(&self, cid: u32) -> bool {
        let c = &self.clauses[cid as usize];
        self.value(c.lits[0]) == Some(true) && self.reason[c.lits[0].var() as usize] == cid
    }

    fn detach(&mut self, cid: u32) {
        let (w0, w1) = {
            let c = &self.clauses[cid as usize];
            ((!c.lits[0]).index(), (!c.lits[1]).index())
        };
        for widx in [w0, w1] {
            let ws = &mut self.watches[widx];
            let at = ws
                .iter()
                .position(|w| w.clause == cid)
                .expect("watcher present");
            ws.swap_remove(at);
        }
    }

    fn reduce_db(&mut self) {
        let mut victims: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|&id| {
                let c = &self.clauses[id as usize];
                c.learnt && !c.deleted && c.lits.len() > 2 && !self.locked(id)
            })
            .collect();
        victims.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            ca.activity
                .partial_cmp(&cb.activity)
                .unwrap()
                .then(a.cmp(&b))
        });
        for &id in &victims[..victims.len() / 2] {
            self.detach(id);
            self.clauses[id as usize].deleted = true;
            self.clauses[id as usize].lits.clear();
            self.clauses[id as usize].lits.shrink_to_fit();
            self.num_learnts -= 1;
        }
    }

    /// Complete search. Under assumptions, `Unsat` means no model extends
    /// them; without assumptions it is definitive for the instance.
    pub fn solve(&mut self, assumptions: &[Lit], deadline: Deadline) -> SolveResult {
        if !self.ok {
            return SolveResult::Unsat;
        }
        self.pop_to(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SolveResult::Unsat;
        }
        let originals = self.clauses.len() - self.num_learnts;
        let mut max_learnts = (originals as f64 / 3.0).max(4000.0);
        let mut restart_num = 0u32;
        let mut restart_limit = luby(restart_num) * 100.0;
        let mut conflicts_here = 0u64;
        let mut decisions = 0u64;

        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveResult::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.pop_to(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], INVALID);
                } else {
                    let first = learnt[0];
                    let cid = self.push_clause(learnt, true);
                    self.cla_bump(cid as usize);
                    self.enqueue(first, cid);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if self.conflicts % 1024 == 0 && deadline.expired() {
                    self.pop_to(0);
                    return SolveResult::Timeout;
                }
            } else {
                if conflicts_here as f64 >= restart_limit {
                    restart_num += 1;
                    conflicts_here = 0;
                    restart_limit = luby(restart_num) * 100.0;
                    self.pop_to(0);
                    if deadline.expired() {
                        return SolveResult::Timeout;
                    }
                    continue;
                }
                if self.num_learnts as f64 >= max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    max_learnts *= 1.1;
                }
                let dl = self.decision_level();
                if dl < assumptions.len() {
                    let a = assumptions[dl];
                    match self.value(a) {
                        Some(true) => self.trail_lim.push(self.trail.len()),
                        Some(false) => {
                            self.pop_to(0);
                            return SolveResult::Unsat;
                        }
                        None => {
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(a, INVALID);
                        }
                    }
                } else {
                    decisions += 1;
                    if decisions % 4096 == 0 && deadline.expired() {
                        self.pop_to(0);
                        return SolveResult::Timeout;
                    }
                    match self.pick_branch() {
                        None => {
                            let model = Model {
                                values: self.assigns.iter().map(|a| a.unwrap()).collect(),
                            };
                            self.pop_to(0);
                            return SolveResult::Sat(model);
                        }
                        Some(v) => {
                            self.trail_lim.push(self.trail.len());
                            let phase = self.polarity[v as usize];
                            self.enqueue(Lit::new(v, phase), INVALID);
                        }
                    }
                }
            }
        }
    }

    fn pick_branch(&mut self) -> Option<Var> {
        while let Some(v) = self.heap.pop() {
            if self.assigns[v as usize].is_none() {
                return Some(v);
            }
        }
        None
    }

    /// Live learnt clauses, for implication spot checks in tests.
    pub fn learnt_clauses(&self) -> Vec<Vec<Lit>> {
        self.clauses
            .iter()
            .filter(|c| c.learnt && !c.deleted)
            .map(|c| c.lits.clone())
            .collect()
    }

    /// DIMACS CNF text of the instance (a debugging aid).
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.original.len());
        for clause in &self.original {
            for l in clause {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

fn luby(mut x: u32) -> f64 {
    // Position x (0-based) of the Luby sequence 1,1,2,1,1,2,4,...
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < (x as u64) + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x as u64 {
        size = (size - 1) / 2;
        seq -= 1;
        x %= size as u32;
    }
    2f64.powi(seq as i32)
}

/// Indexed binary max-heap over variable activities; ties break toward the
/// lowest variable index.
struct VarHeap {
    heap: Vec<Var>,
    pos: Vec<Option<u32>>,
    activity: Vec<f64>,
}

impl VarHeap {
    fn new() -> VarHeap {
        VarHeap {
            heap: Vec::new(),
            pos: Vec::new(),
            activity: Vec::new(),
        }
    }

    fn push_var(&mut self) {
        self.pos.push(None);
        self.activity.push(0.0);
    }

    fn gt(&self, a: Var, b: Var) -> bool {
        let (aa, ab) = (self.activity[a as usize], self.activity[b as usize]);
        aa > ab || (aa == ab && a < b)
    }

    fn insert(&mut self, v: Var) {
        if self.pos[v as usize].is_some() {
            return;
        }
        let i = self.heap.len();
        self.heap.push(v);
        self.pos[v as usize] = Some(i as u32);
        self.sift_up(i);
    }

    fn pop(&mut self) -> Option<Var> {
        let top = *self.heap.first()?;
        self.pos[top as usize] = None;
        let last = self.heap.pop().unwrap();
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = Some(0);
            self.sift_down(0);
        }
        Some(top)
    }

    /// Returns true when activities must be rescaled.
    fn bump(&mut self, v: Var, inc: f64) -> bool {
        self.activity[v as usize] += inc;
        if let Some(i) = self.pos[v as usize] {
            self.sift_up(i as usize);
        }
        self.activity[v as usize] > 1e100
    }

    fn rescale(&mut self) {
        for a in &mut self.activity {
            *a *= 1e-100;
        }
    }

    fn sift_up(&mut self, mut i: usize) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.gt(v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = Some(i as u32);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i as u32);
    }

    fn sift_down(&mut self, mut i: usize) {
        let v = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && self.gt(self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !self.gt(self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = Some(i as u32);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i as u32);
    }
}
