//! Partial transversal solvers: exact branch-and-bound, a brute-force
//! oracle, randomized greedy, and a semi-random nibble finder.

use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{validate_transversal, Cell, Grid, PartialTransversal};

pub const DEFAULT_HARD_CAP: u32 = 24;
pub const BRUTE_HARD_CAP: u32 = 7;

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub size: u32,
    pub witness: PartialTransversal,
    /// True iff the search completed, i.e. no larger transversal exists.
    pub optimal: bool,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

/// Serializable report for CLI output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: String,
    pub size: u32,
    pub optimal: bool,
    pub nodes_explored: u64,
    pub elapsed_ms: u64,
    pub witness: PartialTransversal,
}

impl SolveResult {
    pub fn report(&self, method: &str) -> SolveReport {
        SolveReport {
            method: method.to_string(),
            size: self.size,
            optimal: self.optimal,
            nodes_explored: self.nodes_explored,
            elapsed_ms: self.elapsed.as_millis() as u64,
            witness: self.witness.clone(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("order {n} exceeds the exact-solver cap {cap}; pass force to override")]
    HardCapExceeded { n: u32, cap: u32 },
    #[error("grid has {m} symbols; the exact solver supports at most 128")]
    TooManySymbols { m: u32 },
}

#[derive(Clone, Copy, Debug)]
pub struct NibbleConfig {
    pub epsilon: f64,
    /// Fraction of still-active rows targeted per round.
    pub round_fraction: f64,
    pub max_rounds: u32,
    pub seed: u64,
    pub greedy_finish: bool,
}

impl Default for NibbleConfig {
    fn default() -> Self {
        NibbleConfig {
            epsilon: 0.05,
            round_fraction: 0.1,
            max_rounds: 50,
            seed: 0,
            greedy_finish: true,
        }
    }
}

/// Row-indexed adjacency: feasible (col, symbol) pairs per row.
struct Instance {
    n: usize,
    rows: Vec<Vec<(u32, u32)>>,
}

impl Instance {
    fn new(g: &Grid) -> Result<Self, SolveError> {
        if g.symbol_count() > 128 {
            return Err(SolveError::TooManySymbols {
                m: g.symbol_count(),
            });
        }
        let n = g.n() as usize;
        let rows = (1..=g.n())
            .map(|r| {
                (1..=g.n())
                    .filter_map(|c| g.symbol_at(r, c).map(|s| (c, s)))
                    .collect()
            })
            .collect();
        Ok(Instance { n, rows })
    }
}

/// State shared by all search threads.
struct Shared {
    best_len: AtomicU32,
    best: Mutex<Vec<Cell>>,
    timed_out: AtomicBool,
    deadline: Option<Instant>,
}

impl Shared {
    fn offer(&self, candidate: &[Cell]) {
        let mut best = self.best.lock().unwrap();
        if candidate.len() > best.len() {
            *best = candidate.to_vec();
            self.best_len.store(best.len() as u32, Ordering::Relaxed);
        }
    }
}

struct SearchState<'a> {
    cols_used: u64,
    syms_used: u128,
    chosen: Vec<Cell>,
    nodes: u64,
    shared: &'a Shared,
}

fn dfs(inst: &Instance, row_mask: u64, state: &mut SearchState) {
    state.nodes += 1;
    if state.nodes % 1024 == 1 {
        if let Some(deadline) = state.shared.deadline {
            if Instant::now() >= deadline {
                state.shared.timed_out.store(true, Ordering::Relaxed);
            }
        }
    }
    if state.shared.timed_out.load(Ordering::Relaxed) {
        return;
    }
    if state.chosen.len() as u32 > state.shared.best_len.load(Ordering::Relaxed) {
        state.shared.offer(&state.chosen);
    }
    if row_mask == 0 {
        return;
    }

    // One scan: pick the open row with fewest choices and collect the
    // pruning quantities.
    let mut pick: Option<(usize, Vec<(u32, u32)>)> = None;
    let mut assignable = 0u32;
    let mut sym_union = 0u128;
    let mut mask = row_mask;
    while mask != 0 {
        let r = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        let choices: Vec<(u32, u32)> = inst.rows[r]
            .iter()
            .copied()
            .filter(|&(c, s)| {
                state.cols_used & (1 << (c - 1)) == 0 && state.syms_used & (1 << (s - 1)) == 0
            })
            .collect();
        for &(_, s) in &choices {
            sym_union |= 1 << (s - 1);
        }
        if !choices.is_empty() {
            assignable += 1;
            let better = match &pick {
                Some((_, best_choices)) => choices.len() < best_choices.len(),
                None => true,
            };
            if better {
                pick = Some((r, choices));
            }
        }
    }

    let bound = state.chosen.len() as u32 + assignable.min(sym_union.count_ones());
    if bound <= state.shared.best_len.load(Ordering::Relaxed) {
        return;
    }
    let Some((r, choices)) = pick else {
        return;
    };

    for (c, s) in choices {
        state.cols_used |= 1 << (c - 1);
        state.syms_used |= 1 << (s - 1);
        state.chosen.push(Cell::new(r as u32 + 1, c));
        dfs(inst, row_mask & !(1 << r), state);
        state.chosen.pop();
        state.cols_used &= !(1 << (c - 1));
        state.syms_used &= !(1 << (s - 1));
        if state.shared.timed_out.load(Ordering::Relaxed) {
            return;
        }
    }
    // Skip this row entirely.
    dfs(inst, row_mask & !(1 << r), state);
}

/// Exact maximum partial transversal by depth-first branch-and-bound.
///
/// Deterministic: rows are chosen by fewest feasible choices with
/// lowest-index tie-breaking, and column branches in index order.
pub fn solve_exact(g: &Grid, time_limit: Option<Duration>) -> Result<SolveResult, SolveError> {
    solve_exact_with_cap(g, time_limit, DEFAULT_HARD_CAP)
}

/// As [`solve_exact`] but with an explicit order cap (≤ 64).
pub fn solve_exact_with_cap(
    g: &Grid,
    time_limit: Option<Duration>,
    cap: u32,
) -> Result<SolveResult, SolveError> {
    solve_exact_with_opts(g, time_limit, cap, 1)
}

/// Full-control entry point. With `threads > 1` the first-level branches
/// are searched in parallel against a shared incumbent; the optimum size is
/// still deterministic, the witness only in single-threaded mode.
pub fn solve_exact_with_opts(
    g: &Grid,
    time_limit: Option<Duration>,
    cap: u32,
    threads: u32,
) -> Result<SolveResult, SolveError> {
    if g.n() > cap || g.n() > 64 {
        return Err(SolveError::HardCapExceeded {
            n: g.n(),
            cap: cap.min(64),
        });
    }
    let inst = Instance::new(g)?;
    let start = Instant::now();
    let shared = Shared {
        best_len: AtomicU32::new(0),
        best: Mutex::new(Vec::new()),
        timed_out: AtomicBool::new(false),
        deadline: time_limit.map(|d| start + d),
    };
    let full_mask = if inst.n == 64 {
        u64::MAX
    } else {
        (1u64 << inst.n) - 1
    };

    let nodes = if threads <= 1 || inst.n == 0 {
        let mut state = SearchState {
            cols_used: 0,
            syms_used: 0,
            chosen: Vec::new(),
            nodes: 0,
            shared: &shared,
        };
        dfs(&inst, full_mask, &mut state);
        state.nodes
    } else {
        // Split on the first row's choices plus the skip branch and farm
        // the subtrees out to worker threads.
        shared.offer(&[]);
        let mut branches: Vec<Option<(u32, u32)>> = inst.rows[0]
            .iter()
            .map(|&(c, s)| Some((c, s)))
            .collect();
        branches.push(None);
        let next = std::sync::atomic::AtomicUsize::new(0);
        std::thread::scope(|scope| {
            let workers: Vec<_> = (0..threads)
                .map(|_| {
                    scope.spawn(|| {
                        let mut local_nodes = 0u64;
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= branches.len() {
                                break;
                            }
                            let mut state = SearchState {
                                cols_used: 0,
                                syms_used: 0,
                                chosen: Vec::new(),
                                nodes: 0,
                                shared: &shared,
                            };
                            if let Some((c, s)) = branches[i] {
                                state.cols_used = 1 << (c - 1);
                                state.syms_used = 1 << (s - 1);
                                state.chosen.push(Cell::new(1, c));
                            }
                            dfs(&inst, full_mask & !1, &mut state);
                            local_nodes += state.nodes;
                        }
                        local_nodes
                    })
                })
                .collect();
            workers.into_iter().map(|w| w.join().unwrap()).sum()
        })
    };

    let witness = PartialTransversal::new(shared.best.into_inner().unwrap());
    debug_assert!(validate_transversal(g, &witness));
    Ok(SolveResult {
        size: witness.len() as u32,
        witness,
        optimal: !shared.timed_out.load(Ordering::Relaxed),
        nodes_explored: nodes,
        elapsed: start.elapsed(),
    })
}

/// Exhaustive recursion over rows with skip and no pruning beyond
/// feasibility. Ground truth for testing; keep it independent of the
/// branch-and-bound path.
pub fn solve_brute(g: &Grid) -> Result<SolveResult, SolveError> {
    if g.n() > BRUTE_HARD_CAP {
        return Err(SolveError::HardCapExceeded {
            n: g.n(),
            cap: BRUTE_HARD_CAP,
        });
    }
    let start = Instant::now();
    let mut best: Vec<Cell> = Vec::new();
    let mut chosen: Vec<Cell> = Vec::new();
    let mut nodes = 0u64;

    fn recurse(
        g: &Grid,
        row: u32,
        chosen: &mut Vec<Cell>,
        best: &mut Vec<Cell>,
        nodes: &mut u64,
    ) {
        *nodes += 1;
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        if row > g.n() {
            return;
        }
        for c in 1..=g.n() {
            let cell = Cell::new(row, c);
            chosen.push(cell);
            if validate_transversal(g, &PartialTransversal::new(chosen.clone())) {
                recurse(g, row + 1, chosen, best, nodes);
            }
            chosen.pop();
        }
        recurse(g, row + 1, chosen, best, nodes);
    }
    recurse(g, 1, &mut chosen, &mut best, &mut nodes);

    let witness = PartialTransversal::new(best);
    Ok(SolveResult {
        size: witness.len() as u32,
        witness,
        optimal: true,
        nodes_explored: nodes,
        elapsed: start.elapsed(),
    })
}

struct UsedSets {
    rows: Vec<bool>,
    cols: Vec<bool>,
    syms: Vec<bool>,
}

impl UsedSets {
    fn new(n: u32, m: u32) -> Self {
        UsedSets {
            rows: vec![false; n as usize],
            cols: vec![false; n as usize],
            syms: vec![false; m as usize],
        }
    }

    fn try_insert(&mut self, r: u32, c: u32, s: u32) -> bool {
        let (ri, ci, si) = (r as usize - 1, c as usize - 1, s as usize - 1);
        if self.rows[ri] || self.cols[ci] || self.syms[si] {
            return false;
        }
        self.rows[ri] = true;
        self.cols[ci] = true;
        self.syms[si] = true;
        true
    }
}

/// Repeated randomized maximal extension; best over `restarts`.
pub fn solve_greedy(g: &Grid, restarts: u32, seed: u64) -> SolveResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: Vec<(u32, u32, u32)> = Vec::new();
    for r in 1..=g.n() {
        for c in 1..=g.n() {
            if let Some(s) = g.symbol_at(r, c) {
                cells.push((r, c, s));
            }
        }
    }
    let mut best: Vec<Cell> = Vec::new();
    for _ in 0..restarts.max(1) {
        cells.shuffle(&mut rng);
        let mut used = UsedSets::new(g.n(), g.symbol_count());
        let mut current = Vec::new();
        for &(r, c, s) in &cells {
            if used.try_insert(r, c, s) {
                current.push(Cell::new(r, c));
            }
        }
        if current.len() > best.len() {
            best = current;
        }
    }
    let witness = PartialTransversal::new(best);
    debug_assert!(validate_transversal(g, &witness));
    SolveResult {
        size: witness.len() as u32,
        witness,
        optimal: false,
        nodes_explored: restarts.max(1) as u64,
        elapsed: start.elapsed(),
    }
}

/// Semi-random nibble on the 3-partite hypergraph whose vertex classes are
/// rows, columns, and symbols and whose edges are the non-forbidden cells.
///
/// Each round samples candidate cells whose three endpoints are all still
/// active, keeps a conflict-free subset (lowest index survives), and
/// deactivates the covered vertices.
pub fn solve_nibble(g: &Grid, cfg: &NibbleConfig) -> SolveResult {
    let start = Instant::now();
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut row_active = vec![true; n as usize];
    let mut col_active = vec![true; n as usize];
    let mut sym_active = vec![true; g.symbol_count() as usize];
    let mut chosen: Vec<Cell> = Vec::new();
    let mut rounds = 0u64;

    for _ in 0..cfg.max_rounds {
        let active_rows = row_active.iter().filter(|&&a| a).count();
        if active_rows == 0 {
            break;
        }
        // Count candidates, then sample each with the probability that
        // targets round_fraction of the remaining rows in expectation.
        let mut candidates = 0u64;
        for r in 1..=n {
            if !row_active[r as usize - 1] {
                continue;
            }
            for c in 1..=n {
                if !col_active[c as usize - 1] {
                    continue;
                }
                if let Some(s) = g.symbol_at(r, c) {
                    if sym_active[s as usize - 1] {
                        candidates += 1;
                    }
                }
            }
        }
        if candidates == 0 {
            break;
        }
        let p = (cfg.round_fraction * active_rows as f64 / candidates as f64).min(1.0);
        let mut sampled: Vec<(u32, u32, u32)> = Vec::new();
        for r in 1..=n {
            if !row_active[r as usize - 1] {
                continue;
            }
            for c in 1..=n {
                if !col_active[c as usize - 1] {
                    continue;
                }
                if let Some(s) = g.symbol_at(r, c) {
                    if sym_active[s as usize - 1] && rng.gen::<f64>() < p {
                        sampled.push((r, c, s));
                    }
                }
            }
        }
        rounds += 1;
        // Conflict resolution in index order.
        let mut round_rows = vec![false; n as usize];
        let mut round_cols = vec![false; n as usize];
        let mut round_syms = vec![false; g.symbol_count() as usize];
        for (r, c, s) in sampled {
            let (ri, ci, si) = (r as usize - 1, c as usize - 1, s as usize - 1);
            if round_rows[ri] || round_cols[ci] || round_syms[si] {
                continue;
            }
            round_rows[ri] = true;
            round_cols[ci] = true;
            round_syms[si] = true;
            row_active[ri] = false;
            col_active[ci] = false;
            sym_active[si] = false;
            chosen.push(Cell::new(r, c));
        }
    }

    if cfg.greedy_finish {
        for r in 1..=n {
            if !row_active[r as usize - 1] {
                continue;
            }
            for c in 1..=n {
                if !col_active[c as usize - 1] {
                    continue;
                }
                if let Some(s) = g.symbol_at(r, c) {
                    if sym_active[s as usize - 1] {
                        row_active[r as usize - 1] = false;
                        col_active[c as usize - 1] = false;
                        sym_active[s as usize - 1] = false;
                        chosen.push(Cell::new(r, c));
                        break;
                    }
                }
            }
        }
    }

    let witness = PartialTransversal::new(chosen);
    debug_assert!(validate_transversal(g, &witness));
    SolveResult {
        size: witness.len() as u32,
        witness,
        optimal: false,
        nodes_explored: rounds,
        elapsed: start.elapsed(),
    }
}
