//! Built-in 0-1 branch-and-bound engine.
//!
//! Depth-first search over binary variables with
//!
//! * slack-counter propagation of every linear row (min/max activity),
//!   watched-literal propagation for rows that are plain clauses,
//! * an objective row `obj ≤ incumbent − 1` tightened after each
//!   improvement, plus a cover bound that adds the cheapest member of every
//!   disjoint "at least one" row still unhit,
//! * conflict analysis on the propagation reasons (first unique implication
//!   point), non-chronological backtracking and the learned clauses that
//!   result,
//! * activity-ordered branching seeded by constraint counts, phase saving,
//!   and Luby restarts.
//!
//! Everything is deterministic for a given model and limits (apart from
//! where a wall-clock limit cuts the search).

use std::time::{Duration, Instant};

use super::model::{LinearConstraint, Model};
use crate::error::SolveError;

#[derive(Debug, Clone, Default)]
pub struct SolveLimits {
    pub time_limit: Option<Duration>,
    /// Maximum number of branching decisions.
    pub node_limit: Option<u64>,
    /// A lower bound on the optimum known by the caller; an incumbent
    /// reaching it is reported optimal without further search.
    pub objective_floor: Option<i64>,
}

impl SolveLimits {
    pub fn with_time_limit(seconds: f64) -> Self {
        SolveLimits { time_limit: Some(Duration::from_secs_f64(seconds)), ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Timeout,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Branching decisions.
    pub nodes: u64,
    /// Literals processed by the propagation queue.
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub learned: u64,
    pub wall_time: Duration,
}

impl SolveStats {
    pub fn accumulate(&mut self, other: &SolveStats) {
        self.nodes += other.nodes;
        self.propagations += other.propagations;
        self.conflicts += other.conflicts;
        self.restarts += other.restarts;
        self.learned += other.learned;
        self.wall_time += other.wall_time;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub assignment: Option<Vec<bool>>,
    pub objective_value: Option<i64>,
    pub best_bound: i64,
    pub stats: SolveStats,
}

/// Solves `model` to optimality (or to the first solution when it has no
/// objective) within `limits`. A warm-start hint stored on the model is
/// checked first and used as the initial incumbent when feasible.
pub fn solve(model: &Model, limits: &SolveLimits) -> Result<SolveOutcome, SolveError> {
    let start = Instant::now();
    let mut solver = Solver::new(model, limits, start);
    let mut outcome = solver.run(model);
    outcome.stats = solver.stats.clone();
    outcome.stats.wall_time = start.elapsed();
    if let Some(assignment) = &outcome.assignment {
        if let Some(index) = model.first_violation(assignment) {
            return Err(SolveError::Unsound { index, tag: model.constraints()[index].tag.clone() });
        }
    }
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Lit(u32);

impl Lit {
    fn new(var: usize, negated: bool) -> Self {
        Lit((var as u32) << 1 | negated as u32)
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn negated(self) -> bool {
        self.0 & 1 == 1
    }
    fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const UNDEF: i8 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reason {
    None,
    Clause(u32),
    Pb(u32),
    Cover,
}

/// `Σ coef·lit ≥ rhs` with positive coefficients sorted in decreasing order.
#[derive(Debug, Clone)]
struct PbRow {
    lits: Vec<Lit>,
    coefs: Vec<i64>,
    rhs: i64,
    total: i64,
    /// `Σ coef over literals not (processed) false − rhs`.
    slack: i64,
}

#[derive(Debug, Clone)]
struct ClauseRow {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
    lbd: u32,
}

/// Cover bound state: disjoint "at least one" rows over objective variables.
#[derive(Debug, Clone, Default)]
struct Cover {
    enabled: bool,
    cost: Vec<i64>,
    group_of: Vec<Option<usize>>,
    group_min: Vec<i64>,
    hits: Vec<u32>,
    true_sum: i64,
    unhit_min_sum: i64,
    max_cost: i64,
    obj_vars: Vec<usize>,
}

impl Cover {
    fn bound(&self) -> i64 {
        self.true_sum + self.unhit_min_sum
    }

    fn delta(&self, var: usize) -> i64 {
        let c = self.cost[var];
        match self.group_of[var] {
            Some(g) if self.hits[g] == 0 => c - self.group_min[g],
            _ => c,
        }
    }

    fn on_true(&mut self, var: usize) {
        self.true_sum += self.cost[var];
        if let Some(g) = self.group_of[var] {
            if self.hits[g] == 0 {
                self.unhit_min_sum -= self.group_min[g];
            }
            self.hits[g] += 1;
        }
    }

    fn on_undo(&mut self, var: usize) {
        self.true_sum -= self.cost[var];
        if let Some(g) = self.group_of[var] {
            self.hits[g] -= 1;
            if self.hits[g] == 0 {
                self.unhit_min_sum += self.group_min[g];
            }
        }
    }
}

/// Max-activity heap over variables, ties broken by lower id.
#[derive(Debug, Clone, Default)]
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
    activity: Vec<f64>,
}

impl VarHeap {
    fn better(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn push(&mut self, v: usize) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = Some(self.heap.len());
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1);
    }

    fn pop(&mut self) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.sift_down(0);
        }
        Some(top)
    }

    fn increased(&mut self, v: usize) {
        if let Some(i) = self.pos[v] {
            self.sift_up(i);
        }
    }

    fn sift_up(&mut self, mut i: usize) {
        let act = &self.activity;
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if !Self::better(act, v, p) {
                break;
            }
            self.heap[i] = p;
            self.pos[p] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize) {
        let act = &self.activity;
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) { r } else { l };
            let c = self.heap[child];
            if !Self::better(act, c, v) {
                break;
            }
            self.heap[i] = c;
            self.pos[c] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }
}

enum SearchResult {
    Sat,
    Unsat,
    Limit,
}

struct Solver<'a> {
    limits: &'a SolveLimits,
    start: Instant,
    num_vars: usize,
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Reason>,
    trail_pos: Vec<usize>,
    phase: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    pbs: Vec<PbRow>,
    /// For literal `l`: rows containing `l`, with its coefficient.
    occ: Vec<Vec<(u32, i64)>>,
    clauses: Vec<ClauseRow>,
    watches: Vec<Vec<u32>>,
    num_learnt: usize,
    max_learnt: f64,
    clause_inc: f64,

    obj_row: Option<u32>,
    obj_terms: Vec<(i64, usize)>,
    /// Objective constant shift used when turning `obj ≤ limit` into a row.
    obj_shift: i64,
    limit: i64,
    cover: Cover,

    var_inc: f64,
    heap: VarHeap,
    seen: Vec<bool>,

    root_conflict: bool,
    stats: SolveStats,
}

impl<'a> Solver<'a> {
    fn new(model: &Model, limits: &'a SolveLimits, start: Instant) -> Self {
        let n = model.num_vars();
        let mut s = Solver {
            limits,
            start,
            num_vars: n,
            value: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![Reason::None; n],
            trail_pos: vec![0; n],
            phase: model.hint().map(|h| h.to_vec()).unwrap_or_else(|| vec![false; n]),
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            pbs: Vec::new(),
            occ: vec![Vec::new(); 2 * n],
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            num_learnt: 0,
            max_learnt: 0.0,
            clause_inc: 1.0,
            obj_row: None,
            obj_terms: Vec::new(),
            obj_shift: 0,
            limit: i64::MAX,
            cover: Cover::default(),
            var_inc: 1.0,
            heap: VarHeap { heap: Vec::new(), pos: vec![None; n], activity: vec![0.0; n] },
            seen: vec![false; n],
            root_conflict: false,
            stats: SolveStats::default(),
        };
        s.load(model);
        s
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var()];
        if v == UNDEF {
            UNDEF
        } else {
            v ^ l.negated() as i8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Converts `lower ≤ Σ c·x` (or the negated upper side) into rows.
    fn normalize_side(terms: &[(i64, usize)], bound: i64) -> (Vec<(i64, Lit)>, i64) {
        let mut out = Vec::with_capacity(terms.len());
        let mut rhs = bound;
        for &(c, v) in terms {
            if c > 0 {
                out.push((c, Lit::new(v, false)));
            } else {
                out.push((-c, Lit::new(v, true)));
                rhs -= c;
            }
        }
        (out, rhs)
    }

    fn load(&mut self, model: &Model) {
        let mut static_count = vec![0usize; self.num_vars];
        let mut unit_clause_rows: Vec<Vec<usize>> = Vec::new();
        for c in model.constraints() {
            for &(_, v) in &c.terms {
                static_count[v.0] += 1;
            }
            self.add_linear(c, &mut unit_clause_rows);
            if self.root_conflict {
                return;
            }
        }
        for v in 0..self.num_vars {
            self.heap.activity[v] = static_count[v] as f64 * 1e-6;
        }
        self.max_learnt = (model.num_constraints() as f64 / 3.0).max(2000.0);

        if let Some(obj) = model.objective() {
            self.obj_terms = obj.terms.iter().map(|&(c, v)| (c, v.0)).collect();
            // obj ≤ limit  ⇔  Σ (−c)·x ≥ −limit
            let neg: Vec<(i64, usize)> = self.obj_terms.iter().map(|&(c, v)| (-c, v)).collect();
            let (lits, shift) = Self::normalize_side(&neg, 0);
            self.obj_shift = shift;
            let max_obj: i64 = self.obj_terms.iter().filter(|t| t.0 > 0).map(|t| t.0).sum();
            self.limit = max_obj;
            let idx = self.add_pb(lits, shift - max_obj);
            self.obj_row = Some(idx);
            self.setup_cover(&unit_clause_rows);
        }

        for v in 0..self.num_vars {
            self.heap.push(v);
        }
    }

    fn add_linear(&mut self, c: &LinearConstraint, at_least_one: &mut Vec<Vec<usize>>) {
        let terms: Vec<(i64, usize)> = c.terms.iter().map(|&(k, v)| (k, v.0)).collect();
        if let Some(lower) = c.lower {
            let (lits, rhs) = Self::normalize_side(&terms, lower);
            if lower == 1 && terms.iter().all(|&(k, _)| k == 1) {
                at_least_one.push(terms.iter().map(|&(_, v)| v).collect());
            }
            self.add_row(lits, rhs);
        }
        if let Some(upper) = c.upper {
            let neg: Vec<(i64, usize)> = terms.iter().map(|&(k, v)| (-k, v)).collect();
            let (lits, rhs) = Self::normalize_side(&neg, -upper);
            self.add_row(lits, rhs);
        }
    }

    /// Adds a normalized row at level 0, as a clause when all saturated
    /// coefficients equal the right-hand side.
    fn add_row(&mut self, mut lits: Vec<(i64, Lit)>, rhs: i64) {
        if rhs <= 0 {
            return;
        }
        for t in &mut lits {
            t.0 = t.0.min(rhs);
        }
        let total: i64 = lits.iter().map(|t| t.0).sum();
        if total < rhs {
            self.root_conflict = true;
            return;
        }
        if lits.iter().all(|t| t.0 == rhs) {
            let lits: Vec<Lit> = lits.into_iter().map(|t| t.1).collect();
            self.add_clause_root(lits);
        } else {
            self.add_pb(lits, rhs);
        }
    }

    fn add_pb(&mut self, mut lits: Vec<(i64, Lit)>, rhs: i64) -> u32 {
        lits.sort_by(|a, b| b.0.cmp(&a.0).then(a.1 .0.cmp(&b.1 .0)));
        let idx = self.pbs.len() as u32;
        let total: i64 = lits.iter().map(|t| t.0).sum();
        for &(c, l) in &lits {
            self.occ[l.code()].push((idx, c));
        }
        let mut row = PbRow {
            coefs: lits.iter().map(|t| t.0).collect(),
            lits: lits.into_iter().map(|t| t.1).collect(),
            rhs,
            total,
            slack: total - rhs,
        };
        // Account for literals already false at level 0.
        for (i, &l) in row.lits.iter().enumerate() {
            if self.lit_value(l) == 0 && self.trail_pos[l.var()] < self.qhead {
                row.slack -= row.coefs[i];
            }
        }
        self.pbs.push(row);
        if self.scan_pb(idx).is_some() {
            self.root_conflict = true;
        }
        idx
    }

    fn add_clause_root(&mut self, lits: Vec<Lit>) {
        match lits.len() {
            0 => self.root_conflict = true,
            1 => match self.lit_value(lits[0]) {
                0 => self.root_conflict = true,
                1 => {}
                _ => self.assign(lits[0], Reason::None),
            },
            _ => {
                let cid = self.clauses.len() as u32;
                self.watches[lits[0].code()].push(cid);
                self.watches[lits[1].code()].push(cid);
                self.clauses.push(ClauseRow { lits, learnt: false, deleted: false, activity: 0.0, lbd: 0 });
            }
        }
    }

    fn setup_cover(&mut self, at_least_one: &[Vec<usize>]) {
        let n = self.num_vars;
        let mut cost = vec![0i64; n];
        for &(c, v) in &self.obj_terms {
            if c < 0 {
                return;
            }
            cost[v] = c;
        }
        let mut group_of = vec![None; n];
        let mut group_min = Vec::new();
        for row in at_least_one {
            if row.is_empty() || row.iter().any(|&v| cost[v] <= 0 || group_of[v].is_some()) {
                continue;
            }
            let g = group_min.len();
            for &v in row {
                group_of[v] = Some(g);
            }
            group_min.push(row.iter().map(|&v| cost[v]).min().unwrap_or(0));
        }
        let obj_vars: Vec<usize> = (0..n).filter(|&v| cost[v] > 0).collect();
        self.cover = Cover {
            enabled: true,
            max_cost: obj_vars.iter().map(|&v| cost[v]).max().unwrap_or(0),
            unhit_min_sum: group_min.iter().sum(),
            hits: vec![0; group_min.len()],
            cost,
            group_of,
            group_min,
            true_sum: 0,
            obj_vars,
        };
        // Level-0 facts already processed.
        for i in 0..self.qhead {
            let l = self.trail[i];
            if !l.negated() && self.cover.cost[l.var()] > 0 {
                self.cover.on_true(l.var());
            }
        }
    }

    fn assign(&mut self, l: Lit, reason: Reason) {
        let v = l.var();
        debug_assert_eq!(self.value[v], UNDEF);
        self.value[v] = (!l.negated()) as i8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail_pos[v] = self.trail.len();
        self.trail.push(l);
    }

    /// Checks a row after its slack dropped; returns conflict literals.
    fn scan_pb(&mut self, idx: u32) -> Option<Vec<Lit>> {
        let row = &self.pbs[idx as usize];
        if row.slack < 0 {
            return Some(self.pb_conflict_lits(idx));
        }
        let slack = row.slack;
        let mut forced = Vec::new();
        for (i, &c) in row.coefs.iter().enumerate() {
            if c <= slack {
                break;
            }
            let l = row.lits[i];
            if self.lit_value(l) == UNDEF {
                forced.push(l);
            }
        }
        for l in forced {
            if self.lit_value(l) == UNDEF {
                self.assign(l, Reason::Pb(idx));
            }
        }
        None
    }

    fn pb_conflict_lits(&self, idx: u32) -> Vec<Lit> {
        let row = &self.pbs[idx as usize];
        let need = row.total - row.rhs;
        let mut sum = 0;
        let mut out = Vec::new();
        for (i, &l) in row.lits.iter().enumerate() {
            if self.lit_value(l) == 0 {
                sum += row.coefs[i];
                out.push(l);
                if sum > need {
                    break;
                }
            }
        }
        out
    }

    /// False literals of the reason clause for the current value of `var`.
    fn explain(&self, var: usize) -> Vec<Lit> {
        let pos = self.trail_pos[var];
        match self.reason[var] {
            Reason::None => Vec::new(),
            Reason::Clause(cid) => self.clauses[cid as usize].lits.iter().copied().filter(|l| l.var() != var).collect(),
            Reason::Pb(idx) => {
                let row = &self.pbs[idx as usize];
                let own = row.lits.iter().position(|l| l.var() == var).expect("reason row contains var");
                let need = row.total - row.coefs[own] - row.rhs;
                let mut sum = 0;
                let mut out = Vec::new();
                for (i, &l) in row.lits.iter().enumerate() {
                    if i != own && self.lit_value(l) == 0 && self.trail_pos[l.var()] < pos {
                        sum += row.coefs[i];
                        out.push(l);
                        if sum > need {
                            break;
                        }
                    }
                }
                out
            }
            Reason::Cover => self
                .cover
                .obj_vars
                .iter()
                .copied()
                .filter(|&t| self.value[t] == 1 && self.trail_pos[t] < pos)
                .map(|t| Lit::new(t, true))
                .collect(),
        }
    }

    fn cover_conflict_lits(&self) -> Vec<Lit> {
        self.cover
            .obj_vars
            .iter()
            .copied()
            .filter(|&t| self.value[t] == 1 && self.trail_pos[t] < self.qhead)
            .map(|t| Lit::new(t, true))
            .collect()
    }

    fn cover_check(&mut self) -> Option<Vec<Lit>> {
        if !self.cover.enabled || self.limit == i64::MAX {
            return None;
        }
        let lb = self.cover.bound();
        if lb > self.limit {
            return Some(self.cover_conflict_lits());
        }
        if lb + self.cover.max_cost <= self.limit {
            return None;
        }
        let mut forced = Vec::new();
        for &v in &self.cover.obj_vars {
            if self.value[v] == UNDEF && lb + self.cover.delta(v) > self.limit {
                forced.push(v);
            }
        }
        for v in forced {
            self.assign(Lit::new(v, true), Reason::Cover);
        }
        None
    }

    fn propagate(&mut self) -> Option<Vec<Lit>> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let falsified = !p;

            let cover_touched = self.cover.enabled && !p.negated() && self.cover.cost[p.var()] > 0;
            if cover_touched {
                self.cover.on_true(p.var());
            }

            let occ = std::mem::take(&mut self.occ[falsified.code()]);
            let mut conflict_row = None;
            for &(idx, c) in &occ {
                let row = &mut self.pbs[idx as usize];
                row.slack -= c;
                if row.slack < 0 && conflict_row.is_none() {
                    conflict_row = Some(idx);
                }
            }
            if let Some(idx) = conflict_row {
                self.occ[falsified.code()] = occ;
                return Some(self.pb_conflict_lits(idx));
            }
            for &(idx, _) in &occ {
                let row = &self.pbs[idx as usize];
                if row.coefs.first().is_some_and(|&c| c > row.slack) {
                    if let Some(conf) = self.scan_pb(idx) {
                        self.occ[falsified.code()] = occ;
                        return Some(conf);
                    }
                }
            }
            self.occ[falsified.code()] = occ;

            if let Some(conf) = self.propagate_clauses(falsified) {
                return Some(conf);
            }
            if cover_touched {
                if let Some(conf) = self.cover_check() {
                    return Some(conf);
                }
            }
        }
        None
    }

    fn propagate_clauses(&mut self, falsified: Lit) -> Option<Vec<Lit>> {
        let mut ws = std::mem::take(&mut self.watches[falsified.code()]);
        let mut i = 0;
        let mut j = 0;
        let mut conflict = None;
        while i < ws.len() {
            let cid = ws[i];
            i += 1;
            let clause = &mut self.clauses[cid as usize];
            if clause.deleted {
                continue;
            }
            if clause.lits[0] == falsified {
                clause.lits.swap(0, 1);
            }
            let first = clause.lits[0];
            let first_val = {
                let v = self.value[first.var()];
                if v == UNDEF {
                    UNDEF
                } else {
                    v ^ first.negated() as i8
                }
            };
            if first_val == 1 {
                ws[j] = cid;
                j += 1;
                continue;
            }
            let mut moved = false;
            for k in 2..clause.lits.len() {
                let l = clause.lits[k];
                let v = self.value[l.var()];
                let lv = if v == UNDEF { UNDEF } else { v ^ l.negated() as i8 };
                if lv != 0 {
                    clause.lits.swap(1, k);
                    let new_watch = clause.lits[1];
                    self.watches[new_watch.code()].push(cid);
                    moved = true;
                    break;
                }
            }
            if moved {
                continue;
            }
            ws[j] = cid;
            j += 1;
            if first_val == 0 {
                conflict = Some(self.clauses[cid as usize].lits.clone());
                while i < ws.len() {
                    ws[j] = ws[i];
                    j += 1;
                    i += 1;
                }
                break;
            }
            self.assign(first, Reason::Clause(cid));
        }
        ws.truncate(j);
        self.watches[falsified.code()] = ws;
        conflict
    }

    fn backtrack(&mut self, target: u32) {
        if self.decision_level() <= target {
            return;
        }
        let keep = self.trail_lim[target as usize];
        for i in (keep..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            if i < self.qhead {
                let falsified = !l;
                for &(idx, c) in &self.occ[falsified.code()] {
                    self.pbs[idx as usize].slack += c;
                }
                if self.cover.enabled && !l.negated() && self.cover.cost[v] > 0 {
                    self.cover.on_undo(v);
                }
            }
            self.phase[v] = !l.negated();
            self.value[v] = UNDEF;
            self.reason[v] = Reason::None;
            self.heap.push(v);
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(target as usize);
        self.qhead = keep;
    }

    fn bump_var(&mut self, v: usize) {
        self.heap.activity[v] += self.var_inc;
        if self.heap.activity[v] > 1e100 {
            for a in &mut self.heap.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v);
    }

    fn bump_clause(&mut self, cid: u32) {
        let c = &mut self.clauses[cid as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.clause_inc;
        if c.activity > 1e20 {
            for cl in &mut self.clauses {
                cl.activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    /// First-UIP analysis; returns the learned clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, conflict: Vec<Lit>) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut learnt: Vec<Lit> = vec![Lit(0)];
        let mut path_count = 0;
        let mut idx = self.trail.len();
        let mut clause = conflict;
        let mut touched: Vec<usize> = Vec::new();
        let asserting;
        loop {
            for &q in &clause {
                let v = q.var();
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                touched.push(v);
                self.bump_var(v);
                if self.level[v] >= current {
                    path_count += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let p = self.trail[idx];
            self.seen[p.var()] = false;
            path_count -= 1;
            if path_count == 0 {
                asserting = !p;
                break;
            }
            if let Reason::Clause(cid) = self.reason[p.var()] {
                self.bump_clause(cid);
            }
            clause = self.explain(p.var());
        }
        learnt[0] = asserting;

        // Drop literals whose reasons are covered by the rest of the clause.
        let mut kept = vec![learnt[0]];
        for &q in &learnt[1..] {
            let redundant = self.reason[q.var()] != Reason::None
                && self.explain(q.var()).iter().all(|r| self.seen[r.var()] || self.level[r.var()] == 0);
            if !redundant {
                kept.push(q);
            }
        }
        for v in touched {
            self.seen[v] = false;
        }
        let mut learnt = kept;

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[best].var()] {
                    best = i;
                }
            }
            learnt.swap(1, best);
            bt = self.level[learnt[1].var()];
        }
        (learnt, bt)
    }

    fn add_learnt(&mut self, lits: Vec<Lit>) {
        self.stats.learned += 1;
        if lits.len() == 1 {
            self.assign(lits[0], Reason::None);
            return;
        }
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var()]).collect();
        levels.sort_unstable();
        levels.dedup();
        let cid = self.clauses.len() as u32;
        self.watches[lits[0].code()].push(cid);
        self.watches[lits[1].code()].push(cid);
        let asserting = lits[0];
        self.clauses.push(ClauseRow {
            lits,
            learnt: true,
            deleted: false,
            activity: self.clause_inc,
            lbd: levels.len() as u32,
        });
        self.num_learnt += 1;
        self.assign(asserting, Reason::Clause(cid));
    }

    fn reduce_learnts(&mut self) {
        let mut candidates: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|&cid| {
                let c = &self.clauses[cid as usize];
                c.learnt && !c.deleted && c.lbd > 2 && !self.locked(cid)
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd.cmp(&ca.lbd).then(ca.activity.partial_cmp(&cb.activity).unwrap_or(std::cmp::Ordering::Equal))
        });
        for &cid in candidates.iter().take(candidates.len() / 2) {
            let c = &mut self.clauses[cid as usize];
            c.deleted = true;
            c.lits = Vec::new();
            self.num_learnt -= 1;
        }
        self.max_learnt *= 1.1;
    }

    fn locked(&self, cid: u32) -> bool {
        let first = self.clauses[cid as usize].lits[0];
        self.lit_value(first) == 1 && self.reason[first.var()] == Reason::Clause(cid)
    }

    fn limits_hit(&self) -> bool {
        if let Some(n) = self.limits.node_limit {
            if self.stats.nodes >= n {
                return true;
            }
        }
        if let Some(t) = self.limits.time_limit {
            if self.start.elapsed() >= t {
                return true;
            }
        }
        false
    }

    fn luby(mut i: u64) -> u64 {
        // Luby sequence 1 1 2 1 1 2 4 ..., 0-based index.
        let mut size = 1u64;
        let mut seq = 0u32;
        while size < i + 1 {
            seq += 1;
            size = 2 * size + 1;
        }
        while size - 1 != i {
            size = (size - 1) >> 1;
            seq -= 1;
            i %= size;
        }
        1u64 << seq
    }

    fn search(&mut self) -> SearchResult {
        let mut conflicts_here = 0u64;
        let mut restart_budget = 100 * Self::luby(self.stats.restarts);
        let mut ticks = 0u32;
        loop {
            ticks = ticks.wrapping_add(1);
            if ticks.is_multiple_of(64) && self.limits_hit() {
                return SearchResult::Limit;
            }
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    return SearchResult::Unsat;
                }
                let (learnt, bt) = self.analyze(conflict);
                self.backtrack(bt);
                self.add_learnt(learnt);
                self.var_inc /= 0.95;
                self.clause_inc /= 0.999;
                continue;
            }
            if conflicts_here >= restart_budget {
                self.backtrack(0);
                self.stats.restarts += 1;
                conflicts_here = 0;
                restart_budget = 100 * Self::luby(self.stats.restarts);
                continue;
            }
            if self.num_learnt as f64 > self.max_learnt + self.trail.len() as f64 {
                self.reduce_learnts();
            }
            let mut next = None;
            while let Some(v) = self.heap.pop() {
                if self.value[v] == UNDEF {
                    next = Some(v);
                    break;
                }
            }
            let Some(v) = next else {
                return SearchResult::Sat;
            };
            if self.limits.node_limit.is_some_and(|n| self.stats.nodes >= n) {
                self.heap.push(v);
                return SearchResult::Limit;
            }
            self.stats.nodes += 1;
            self.trail_lim.push(self.trail.len());
            self.assign(Lit::new(v, !self.phase[v]), Reason::None);
        }
    }

    /// Lower bound on the objective from the level-0 assignment.
    fn root_bound(&self) -> i64 {
        let mut activity_bound = 0;
        for &(c, v) in &self.obj_terms {
            let fixed = self.value[v] != UNDEF && self.level[v] == 0;
            if fixed {
                if self.value[v] == 1 {
                    activity_bound += c;
                }
            } else if c < 0 {
                activity_bound += c;
            }
        }
        if !self.cover.enabled {
            return activity_bound;
        }
        let mut hit = vec![false; self.cover.group_min.len()];
        let mut cover_bound = 0;
        for &v in &self.cover.obj_vars {
            if self.value[v] == 1 && self.level[v] == 0 {
                cover_bound += self.cover.cost[v];
                if let Some(g) = self.cover.group_of[v] {
                    hit[g] = true;
                }
            }
        }
        for (g, &m) in self.cover.group_min.iter().enumerate() {
            if !hit[g] {
                cover_bound += m;
            }
        }
        activity_bound.max(cover_bound)
    }

    /// Tightens the objective row to `obj ≤ limit` at level 0.
    fn tighten(&mut self, limit: i64) -> bool {
        self.backtrack(0);
        let idx = self.obj_row.expect("objective row present");
        let new_rhs = self.obj_shift - limit;
        let row = &mut self.pbs[idx as usize];
        row.slack += row.rhs - new_rhs;
        row.rhs = new_rhs;
        self.limit = limit;
        if self.scan_pb(idx).is_some() {
            return false;
        }
        if self.cover_check().is_some() {
            return false;
        }
        self.propagate().is_none()
    }

    fn run(&mut self, model: &Model) -> SolveOutcome {
        let has_objective = model.objective().is_some();
        let floor = self.limits.objective_floor;
        let mut incumbent: Option<(Vec<bool>, i64)> = None;

        if let Some(h) = model.hint() {
            if model.is_feasible(h) {
                incumbent = Some((h.to_vec(), model.objective_value(h)));
            }
        }
        if self.root_conflict || self.propagate().is_some() {
            return self.finish(None, SolveStatus::Infeasible, i64::MIN, model);
        }
        let mut bound = self.root_bound().max(floor.unwrap_or(i64::MIN));
        if let Some((a, value)) = incumbent.clone() {
            if !has_objective {
                return self.finish(Some((a, value)), SolveStatus::Feasible, 0, model);
            }
            if value <= bound {
                return self.finish(Some((a, value)), SolveStatus::Optimal, value, model);
            }
            if !self.tighten(value - 1) {
                return self.finish(Some((a, value)), SolveStatus::Optimal, value, model);
            }
        }
        loop {
            match self.search() {
                SearchResult::Sat => {
                    let assignment: Vec<bool> = self.value.iter().map(|&v| v == 1).collect();
                    let value = model.objective_value(&assignment);
                    if !has_objective {
                        return self.finish(Some((assignment, value)), SolveStatus::Feasible, 0, model);
                    }
                    incumbent = Some((assignment, value));
                    bound = bound.max(self.root_bound());
                    if value <= bound || !self.tighten(value - 1) {
                        return self.finish(incumbent, SolveStatus::Optimal, value, model);
                    }
                }
                SearchResult::Unsat => {
                    return match incumbent {
                        Some((a, value)) => self.finish(Some((a, value)), SolveStatus::Optimal, value, model),
                        None => self.finish(None, SolveStatus::Infeasible, bound, model),
                    };
                }
                SearchResult::Limit => {
                    self.backtrack(0);
                    let b = bound.max(self.root_bound());
                    let b = match &incumbent {
                        Some((_, v)) => b.min(*v),
                        None => b,
                    };
                    return self.finish(incumbent, SolveStatus::Timeout, b, model);
                }
            }
        }
    }

    fn finish(
        &mut self,
        incumbent: Option<(Vec<bool>, i64)>,
        status: SolveStatus,
        bound: i64,
        model: &Model,
    ) -> SolveOutcome {
        let has_objective = model.objective().is_some();
        match incumbent {
            Some((assignment, value)) => SolveOutcome {
                status,
                objective_value: Some(value),
                best_bound: if has_objective { bound } else { 0 },
                assignment: Some(assignment),
                stats: SolveStats::default(),
            },
            None => SolveOutcome {
                status,
                assignment: None,
                objective_value: None,
                best_bound: if bound == i64::MIN { 0 } else { bound },
                stats: SolveStats::default(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::model::{LinearConstraint, VarId};

    fn vars(m: &mut Model, n: usize) -> Vec<VarId> {
        (0..n).map(|i| m.add_var(format!("x{i}")).unwrap()).collect()
    }

    #[test]
    fn minimize_with_cover() {
        let mut m = Model::new();
        let x = vars(&mut m, 2);
        m.add_constraint(LinearConstraint::at_least(vec![(1, x[0]), (1, x[1])], 1, "c")).unwrap();
        m.set_objective(vec![(1, x[0])]).unwrap();
        let out = solve(&m, &SolveLimits::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective_value, Some(0));
        assert_eq!(out.best_bound, 0);
        assert_eq!(out.assignment, Some(vec![false, true]));
    }

    #[test]
    fn contradictory_bounds() {
        let mut m = Model::new();
        let x = vars(&mut m, 1);
        m.add_constraint(LinearConstraint::at_least(vec![(1, x[0])], 1, "a")).unwrap();
        m.add_constraint(LinearConstraint::at_most(vec![(1, x[0])], 0, "b")).unwrap();
        let out = solve(&m, &SolveLimits::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
        assert!(out.assignment.is_none());
    }

    #[test]
    fn empty_row_infeasible() {
        let mut m = Model::new();
        vars(&mut m, 1);
        m.add_constraint(LinearConstraint::at_least(vec![], 1, "empty")).unwrap();
        assert_eq!(solve(&m, &SolveLimits::default()).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn feasibility_without_objective() {
        let mut m = Model::new();
        let x = vars(&mut m, 3);
        m.add_constraint(LinearConstraint::equal(vec![(1, x[0]), (1, x[1]), (1, x[2])], 2, "c")).unwrap();
        let out = solve(&m, &SolveLimits::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Feasible);
        assert!(m.is_feasible(out.assignment.as_ref().unwrap()));
    }

    #[test]
    fn weighted_knapsack_style() {
        // min 3a + 2b + 4c  s.t. 2a + 3b + c >= 4, a + b <= 1
        let mut m = Model::new();
        let x = vars(&mut m, 3);
        m.add_constraint(LinearConstraint::at_least(vec![(2, x[0]), (3, x[1]), (1, x[2])], 4, "k")).unwrap();
        m.add_constraint(LinearConstraint::at_most(vec![(1, x[0]), (1, x[1])], 1, "p")).unwrap();
        m.set_objective(vec![(3, x[0]), (2, x[1]), (4, x[2])]).unwrap();
        let out = solve(&m, &SolveLimits::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective_value, Some(6));
        assert_eq!(out.assignment, Some(vec![false, true, true]));
    }

    #[test]
    fn negative_objective_coefficients() {
        // min -a - b + c  s.t. a + b <= 1, c >= a
        let mut m = Model::new();
        let x = vars(&mut m, 3);
        m.add_constraint(LinearConstraint::at_most(vec![(1, x[0]), (1, x[1])], 1, "p")).unwrap();
        m.add_constraint(LinearConstraint::at_least(vec![(1, x[2]), (-1, x[0])], 0, "q")).unwrap();
        m.set_objective(vec![(-1, x[0]), (-1, x[1]), (1, x[2])]).unwrap();
        let out = solve(&m, &SolveLimits::default()).unwrap();
        assert_eq!(out.objective_value, Some(-1));
        assert_eq!(out.status, SolveStatus::Optimal);
    }

    #[test]
    fn hint_seeds_incumbent() {
        let mut m = Model::new();
        let x = vars(&mut m, 4);
        m.add_constraint(LinearConstraint::at_least(x.iter().map(|&v| (1, v)).collect(), 1, "c")).unwrap();
        m.set_objective(x.iter().map(|&v| (1, v)).collect()).unwrap();
        m.set_hint(vec![false, false, true, false]).unwrap();
        let out = solve(&m, &SolveLimits::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.assignment, Some(vec![false, false, true, false]));
        assert_eq!(out.stats.nodes, 0);
    }

    #[test]
    fn infeasible_hint_ignored() {
        let mut m = Model::new();
        let x = vars(&mut m, 2);
        m.add_constraint(LinearConstraint::at_least(vec![(1, x[0]), (1, x[1])], 2, "c")).unwrap();
        m.set_hint(vec![false, false]).unwrap();
        let out = solve(&m, &SolveLimits::default()).unwrap();
        assert_eq!(out.assignment, Some(vec![true, true]));
    }

    #[test]
    fn node_limit_reports_timeout() {
        // pigeonhole 7 into 6 needs many decisions
        let mut m = Model::new();
        let p = 7;
        let h = 6;
        let v: Vec<Vec<VarId>> =
            (0..p).map(|i| (0..h).map(|j| m.add_var(format!("p{i}_{j}")).unwrap()).collect()).collect();
        for row in &v {
            m.add_constraint(LinearConstraint::at_least(row.iter().map(|&x| (1, x)).collect(), 1, "p")).unwrap();
        }
        for j in 0..h {
            m.add_constraint(LinearConstraint::at_most(v.iter().map(|r| (1, r[j])).collect(), 1, "h")).unwrap();
        }
        let out = solve(&m, &SolveLimits { node_limit: Some(3), ..Default::default() }).unwrap();
        assert_eq!(out.status, SolveStatus::Timeout);
        assert!(out.stats.nodes <= 3);
        let full = solve(&m, &SolveLimits::default()).unwrap();
        assert_eq!(full.status, SolveStatus::Infeasible);
    }

    #[test]
    fn objective_floor_stops_early() {
        let mut m = Model::new();
        let x = vars(&mut m, 3);
        m.add_constraint(LinearConstraint::at_least(vec![(1, x[0]), (1, x[1]), (2, x[2])], 2, "c")).unwrap();
        m.set_objective(vec![(1, x[0]), (1, x[1]), (1, x[2])]).unwrap();
        let out = solve(&m, &SolveLimits { objective_floor: Some(1), ..Default::default() }).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective_value, Some(1));
        assert_eq!(out.best_bound, 1);
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(Solver::luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }
}
