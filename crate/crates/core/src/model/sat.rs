//! A small CDCL SAT solver: two watched literals, first-UIP learning,
//! VSIDS with phase saving and Luby restarts.

use std::ops::Not;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(var: usize) -> Lit {
        Lit((var as u32) << 1)
    }

    pub fn neg(var: usize) -> Lit {
        Lit(((var as u32) << 1) | 1)
    }

    pub fn new(var: usize, positive: bool) -> Lit {
        if positive {
            Lit::pos(var)
        } else {
            Lit::neg(var)
        }
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// The deadline passed first.
    Unknown,
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

/// Max-heap of variables keyed by activity.
#[derive(Default)]
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn grow(&mut self) {
        self.pos.push(None);
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[parent]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && act[self.heap[r]] > act[self.heap[l]] {
                r
            } else {
                l
            };
            if act[self.heap[child]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v] = Some(i);
        self.up(i, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(mut i: u64) -> u64 {
    // Position i (0-based) of 1 1 2 1 1 2 4 1 1 2 ...
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) / 2;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

pub struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assigns: Vec<i8>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    unsat: bool,
    rng: Option<ChaCha8Rng>,
    pub conflicts: u64,
    pub decisions: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            clauses: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            phase: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            unsat: false,
            rng: None,
            conflicts: 0,
            decisions: 0,
        }
    }

    /// Randomizes the initial variable order. Has no effect on the answer.
    pub fn with_seed(seed: u64) -> Self {
        let mut s = Solver::new();
        s.rng = Some(ChaCha8Rng::seed_from_u64(seed));
        s
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn new_var(&mut self) -> usize {
        let v = self.assigns.len();
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(None);
        self.phase.push(false);
        let jitter = match &mut self.rng {
            Some(r) => r.gen::<f64>() * 1e-3,
            None => 0.0,
        };
        self.activity.push(jitter);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow();
        self.heap.insert(v, &self.activity);
        v
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.assigns[l.var()];
        if l.is_positive() {
            v
        } else {
            -v
        }
    }

    /// Value of a variable in the last satisfying assignment.
    pub fn value(&self, var: usize) -> bool {
        self.assigns[var] == TRUE
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var();
        self.assigns[v] = if l.is_positive() { TRUE } else { FALSE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause at decision level 0. Returns false once the clause set is
    /// known to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if self.unsat {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        if c.iter().any(|&l| self.lit_value(l) == TRUE) {
            return true;
        }
        c.retain(|&l| self.lit_value(l) != FALSE);
        match c.len() {
            0 => {
                self.unsat = true;
                false
            }
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
                !self.unsat
            }
            _ => {
                let idx = self.clauses.len();
                self.watches[c[0].index()].push(idx);
                self.watches[c[1].index()].push(idx);
                self.clauses.push(c);
                true
            }
        }
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = {
                    let v = self.assigns[first.var()];
                    if first.is_positive() {
                        v
                    } else {
                        -v
                    }
                };
                if first_val == TRUE {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.assigns[l.var()];
                    let val = if l.is_positive() { v } else { -v };
                    if val != FALSE {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[new_watch.index()].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = ci;
                j += 1;
                if first_val == FALSE {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(ci));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, usize) {
        let mut learnt = vec![Lit(0)];
        let mut counter = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            let clause = self.clauses[confl].clone();
            for &q in &clause {
                if Some(q) == p {
                    continue;
                }
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[lit.var()] = false;
            counter -= 1;
            p = Some(lit);
            if counter == 0 {
                break;
            }
            confl = self.reason[lit.var()].expect("implied literal has a reason");
        }
        learnt[0] = !p.unwrap();
        for l in &learnt[1..] {
            self.seen[l.var()] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            back = self.level[learnt[1].var()];
        }
        (learnt, back)
    }

    fn backtrack(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.phase[v] = l.is_positive();
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(Lit::new(v, self.phase[v]));
            }
        }
        None
    }

    /// Runs until satisfiable, unsatisfiable, or past `deadline`.
    pub fn solve(&mut self, deadline: Option<Instant>) -> SolveResult {
        if self.unsat {
            return SolveResult::Unsat;
        }
        if self.propagate().is_some() {
            self.unsat = true;
            return SolveResult::Unsat;
        }
        let mut restart = 0u64;
        loop {
            let budget = luby(restart) * 64;
            restart += 1;
            let mut local = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    self.conflicts += 1;
                    local += 1;
                    if self.decision_level() == 0 {
                        self.unsat = true;
                        return SolveResult::Unsat;
                    }
                    let (learnt, back) = self.analyze(confl);
                    self.backtrack(back);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], None);
                    } else {
                        let idx = self.clauses.len();
                        self.watches[learnt[0].index()].push(idx);
                        self.watches[learnt[1].index()].push(idx);
                        let first = learnt[0];
                        self.clauses.push(learnt);
                        self.enqueue(first, Some(idx));
                    }
                    self.var_inc /= 0.95;
                    if self.conflicts.is_multiple_of(256) {
                        if let Some(d) = deadline {
                            if Instant::now() >= d {
                                self.backtrack(0);
                                return SolveResult::Unknown;
                            }
                        }
                    }
                } else {
                    if local >= budget {
                        self.backtrack(0);
                        break;
                    }
                    match self.pick_branch() {
                        None => return SolveResult::Sat,
                        Some(l) => {
                            self.decisions += 1;
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(l, None);
                        }
                    }
                }
            }
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    return SolveResult::Unknown;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(n: usize, clauses: &[Vec<Lit>]) -> bool {
        (0..1u32 << n).any(|bits| {
            clauses.iter().all(|c| {
                c.iter()
                    .any(|l| ((bits >> l.var()) & 1 == 1) == l.is_positive())
            })
        })
    }

    fn run(n: usize, clauses: &[Vec<Lit>], seed: Option<u64>) -> (SolveResult, Vec<bool>) {
        let mut s = match seed {
            Some(seed) => Solver::with_seed(seed),
            None => Solver::new(),
        };
        for _ in 0..n {
            s.new_var();
        }
        for c in clauses {
            s.add_clause(c);
        }
        let r = s.solve(None);
        (r, (0..n).map(|v| s.value(v)).collect())
    }

    #[test]
    fn luby_sequence() {
        let got: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(got, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 4 pigeons, 3 holes.
        let var = |p: usize, h: usize| p * 3 + h;
        let mut clauses = Vec::new();
        for p in 0..4 {
            clauses.push((0..3).map(|h| Lit::pos(var(p, h))).collect());
        }
        for h in 0..3 {
            for p in 0..4 {
                for q in p + 1..4 {
                    clauses.push(vec![Lit::neg(var(p, h)), Lit::neg(var(q, h))]);
                }
            }
        }
        assert_eq!(run(12, &clauses, None).0, SolveResult::Unsat);
    }

    fn clause_strategy(n: usize) -> impl Strategy<Value = Vec<Lit>> {
        prop::collection::vec((0..n, any::<bool>()), 1..4)
            .prop_map(|ls| ls.into_iter().map(|(v, p)| Lit::new(v, p)).collect())
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            clauses in prop::collection::vec(clause_strategy(8), 0..40),
            seed in any::<u64>(),
        ) {
            let expected = brute_force(8, &clauses);
            let (r, model) = run(8, &clauses, Some(seed));
            prop_assert_eq!(r == SolveResult::Sat, expected);
            if r == SolveResult::Sat {
                for c in &clauses {
                    prop_assert!(c.iter().any(|l| model[l.var()] == l.is_positive()));
                }
            }
        }
    }
}
