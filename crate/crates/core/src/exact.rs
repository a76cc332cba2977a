//! Ground-truth solvers.
//!
//! [`exact_burning_number`] is a branch-and-bound over ball covers and serves
//! as the oracle for everything else. [`path_dp`] is the polynomial dynamic
//! program for forests with a constant number of paths, and
//! [`coverage_burnable`] is the odd-sizes characterization used as a second,
//! independent check on path forests.

use std::collections::HashSet;

use thiserror::Error;

use crate::graph::{bfs_distances, classify, Graph, PathForest, ShapeKind};
use crate::schedule::{canonicalize, simulate, BurningSchedule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("oracle too large: {n} vertices exceeds cap {cap}")]
    OracleTooLarge { n: usize, cap: usize },
    #[error("dp too large: {states} states exceeds cap {cap}")]
    DpTooLarge { states: u128, cap: u128 },
}

/// Size limits for the exact solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Vertex cap for the brute-force oracle on general graphs.
    pub oracle_general: usize,
    /// Vertex cap for the brute-force oracle on path forests.
    pub oracle_path_forest: usize,
    /// Cap on `b * prod(n_i + 1)` for the path DP.
    pub dp_states: u128,
    /// Vertex cap for the coverage characterization.
    pub coverage_vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { oracle_general: 12, oracle_path_forest: 40, dp_states: 20_000_000, coverage_vertices: 400 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub burning_number: usize,
    pub schedule: BurningSchedule,
    /// Search nodes (oracle) or reachable states (DP) visited.
    pub explored: u64,
}

/// Burning number by iterative deepening over `t`. For each `t` the search
/// picks the lowest uncovered vertex and branches on which unused radius
/// (round) and which center covers it; failed `(uncovered, radii)` states
/// are memoized.
pub fn exact_burning_number(g: &Graph, caps: &Caps) -> Result<ExactResult, ExactError> {
    let n = g.n();
    let cap = if classify(g).kind == ShapeKind::PathForest { caps.oracle_path_forest } else { caps.oracle_general };
    if n > cap || n > 64 {
        return Err(ExactError::OracleTooLarge { n, cap: cap.min(64) });
    }
    if n == 0 {
        return Ok(ExactResult { burning_number: 0, schedule: BurningSchedule::default(), explored: 0 });
    }
    let upper = if g.is_connected() { 2 * ceil_sqrt(n) - 1 } else { n };
    let dist: Vec<Vec<Option<usize>>> = (0..n).map(|v| bfs_distances(g, v, None)).collect();
    let mut explored = 0;
    for t in 1..=upper {
        let mut search = CoverSearch::new(g, &dist, t);
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let radii_mask = (1u32 << t) - 1;
        let found = search.solve(full, radii_mask);
        explored += search.nodes;
        if found {
            let schedule = search.schedule(g);
            debug_assert_eq!(simulate(g, &schedule).completion_round, t);
            return Ok(ExactResult { burning_number: t, schedule, explored });
        }
    }
    unreachable!("a graph on n vertices burns within n rounds");
}

pub(crate) fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

struct CoverSearch {
    t: usize,
    /// ball[r][v]: vertices within distance r of v
    ball: Vec<Vec<u64>>,
    /// largest ball of each radius
    max_ball: Vec<u32>,
    isolated: u64,
    failed: HashSet<(u64, u32)>,
    /// chosen center per radius
    chosen: Vec<Option<usize>>,
    nodes: u64,
}

impl CoverSearch {
    fn new(g: &Graph, dist: &[Vec<Option<usize>>], t: usize) -> Self {
        let n = g.n();
        let ball: Vec<Vec<u64>> = (0..t)
            .map(|r| {
                (0..n)
                    .map(|v| {
                        dist[v]
                            .iter()
                            .enumerate()
                            .filter(|(_, d)| d.is_some_and(|d| d <= r))
                            .fold(0u64, |acc, (u, _)| acc | (1 << u))
                    })
                    .collect()
            })
            .collect();
        let max_ball = ball.iter().map(|row| row.iter().map(|b| b.count_ones()).max().unwrap_or(0)).collect();
        let isolated = (0..n).filter(|&v| g.degree(v) == 0).fold(0u64, |acc, v| acc | (1 << v));
        CoverSearch { t, ball, max_ball, isolated, failed: HashSet::new(), chosen: vec![None; t], nodes: 0 }
    }

    /// Can the balls of the radii in `radii` cover `uncovered`?
    fn solve(&mut self, uncovered: u64, radii: u32) -> bool {
        self.nodes += 1;
        if uncovered == 0 {
            return true;
        }
        if radii == 0 || self.failed.contains(&(uncovered, radii)) {
            return false;
        }
        let capacity: u32 = (0..self.t).filter(|r| radii >> r & 1 == 1).map(|r| self.max_ball[r]).sum();
        if capacity < uncovered.count_ones() {
            self.failed.insert((uncovered, radii));
            return false;
        }
        let u = uncovered.trailing_zeros() as usize;
        if self.isolated >> u & 1 == 1 {
            // any radius covers only u itself; the smallest dominates
            let r = radii.trailing_zeros() as usize;
            self.chosen[r] = Some(u);
            if self.solve(uncovered & !(1 << u), radii & !(1 << r)) {
                return true;
            }
            self.chosen[r] = None;
        } else {
            for r in (0..self.t).rev().filter(|r| radii >> r & 1 == 1) {
                // centers whose r-ball contains u are exactly ball[r][u]
                let mut cands = self.ball[r][u];
                let mut seen_new: Vec<u64> = Vec::new();
                while cands != 0 {
                    let x = cands.trailing_zeros() as usize;
                    cands &= cands - 1;
                    let gain = self.ball[r][x] & uncovered;
                    // skip centers whose new coverage is dominated by an earlier one
                    if seen_new.iter().any(|&s| gain & !s == 0) {
                        continue;
                    }
                    seen_new.push(gain);
                    self.chosen[r] = Some(x);
                    if self.solve(uncovered & !gain, radii & !(1 << r)) {
                        return true;
                    }
                    self.chosen[r] = None;
                }
            }
        }
        self.failed.insert((uncovered, radii));
        false
    }

    /// Radius r belongs to round t - r. Unused rounds get a filler that is
    /// repaired by canonicalization.
    fn schedule(&self, g: &Graph) -> BurningSchedule {
        let mut seq: Vec<Option<usize>> = (1..=self.t).map(|round| self.chosen[self.t - round]).collect();
        while seq.last() == Some(&None) {
            seq.pop();
        }
        let filled: Vec<usize> = seq.into_iter().map(|c| c.unwrap_or(0)).collect();
        canonicalize(g, &BurningSchedule::new(filled))
    }
}

/// Mixed-radix encoding of burned-length vectors.
struct Radix {
    lengths: Vec<usize>,
    strides: Vec<u64>,
}

impl Radix {
    fn new(lengths: &[usize]) -> Self {
        let mut strides = Vec::with_capacity(lengths.len());
        let mut acc = 1u64;
        for &l in lengths {
            strides.push(acc);
            acc *= (l + 1) as u64;
        }
        Radix { lengths: lengths.to_vec(), strides }
    }

    fn component(&self, code: u64, j: usize) -> usize {
        ((code / self.strides[j]) % (self.lengths[j] as u64 + 1)) as usize
    }

    fn full(&self) -> u64 {
        self.lengths.iter().zip(&self.strides).map(|(&l, &s)| l as u64 * s).sum()
    }
}

/// One DP move: the fire of this level shortened path `path` by `amount`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reduction {
    pub path: usize,
    pub amount: usize,
}

const UNREACHED: u8 = u8::MAX;

/// For every burned-length vector (mixed-radix code), the first deadline
/// `t` at which it is reachable. Reachability is monotone in `t` because a
/// fire may go unused.
#[derive(Debug, Clone)]
pub struct DpTable {
    pub lengths: Vec<usize>,
    first: Vec<u8>,
    /// Level at which the full vector became reachable.
    pub t_star: usize,
}

impl DpTable {
    pub fn decode(&self, code: u64) -> Vec<usize> {
        let radix = Radix::new(&self.lengths);
        (0..self.lengths.len()).map(|j| radix.component(code, j)).collect()
    }

    pub fn encode(&self, v: &[usize]) -> u64 {
        let radix = Radix::new(&self.lengths);
        v.iter().zip(&radix.strides).map(|(&x, &s)| x as u64 * s).sum()
    }

    pub fn reachable(&self, code: u64, t: usize) -> bool {
        let f = self.first[code as usize];
        f != UNREACHED && f as usize <= t
    }

    /// Number of vectors reachable at level `t`.
    pub fn level_size(&self, t: usize) -> usize {
        self.first.iter().filter(|&&f| f != UNREACHED && f as usize <= t).count()
    }

    /// A move from a vector reachable at `t - 1` to `code` at `t`, longest
    /// reduction first.
    fn predecessor(&self, radix: &Radix, code: u64, t: usize) -> Reduction {
        for (j, &stride) in radix.strides.iter().enumerate() {
            let x = radix.component(code, j);
            for i in (1..=x.min(2 * t - 1)).rev() {
                if self.reachable(code - i as u64 * stride, t - 1) {
                    return Reduction { path: j, amount: i };
                }
            }
        }
        debug_assert!(self.reachable(code, t - 1));
        Reduction { path: 0, amount: 0 }
    }
}

/// Fills the table level by level: `v` is reachable at `t` iff some path
/// `j` and `i <= min(v_j, 2t - 1)` make `v - i e_j` reachable at `t - 1`.
/// Each level is one sweep per axis keeping the last reachable position on
/// the line, so a level costs `O(b * states)`. Stops at the first level
/// containing the full vector.
pub fn fill_dp(f: &PathForest, caps: &Caps) -> Result<DpTable, ExactError> {
    let lengths = f.lengths().to_vec();
    let b = lengths.len() as u128;
    let states = lengths.iter().fold(b, |acc: u128, &l| acc.saturating_mul(l as u128 + 1));
    if states > caps.dp_states {
        return Err(ExactError::DpTooLarge { states, cap: caps.dp_states });
    }
    let radix = Radix::new(&lengths);
    let size = (radix.full() + 1) as usize;
    let mut first = vec![UNREACHED; size];
    first[0] = 0;
    let mut t = 0;
    while first[size - 1] == UNREACHED {
        t += 1;
        // the burning number of n vertices never exceeds n
        assert!(t < UNREACHED as usize, "level overflow");
        let window = 2 * t - 1;
        let prev = |f: u8| f != UNREACHED && (f as usize) < t;
        for (j, &len) in lengths.iter().enumerate() {
            let stride = radix.strides[j] as usize;
            let span = stride * (len + 1);
            for base in (0..size).filter(|c| (c % span) < stride) {
                let mut last: Option<usize> = None;
                for x in 0..=len {
                    let code = base + x * stride;
                    if prev(first[code]) {
                        last = Some(x);
                    } else if first[code] == UNREACHED && last.is_some_and(|l| x - l <= window) {
                        first[code] = t as u8;
                    }
                }
            }
        }
    }
    Ok(DpTable { lengths, first, t_star: t })
}

/// Optimal schedule for a path forest via [`fill_dp`]. The move recovered
/// at level `t` becomes the fire of round `t* - t + 1`, placed `t - 1` steps
/// past the already-claimed prefix of its path (clamped to the path end).
pub fn path_dp(f: &PathForest, caps: &Caps) -> Result<ExactResult, ExactError> {
    let table = fill_dp(f, caps)?;
    let t_star = table.t_star;
    let radix = Radix::new(&table.lengths);
    let offsets = f.offsets();
    let mut claimed = vec![0usize; table.lengths.len()];
    let mut code = radix.full();
    let mut activators = vec![0usize; t_star];
    for t in (1..=t_star).rev() {
        let mv = table.predecessor(&radix, code, t);
        let len = table.lengths[mv.path];
        let pos = (claimed[mv.path] + t - 1).min(len - 1);
        activators[t_star - t] = offsets[mv.path] + pos;
        claimed[mv.path] += mv.amount;
        code -= mv.amount as u64 * radix.strides[mv.path];
    }
    debug_assert_eq!(code, 0);
    let g = crate::graph::expand_forest(f);
    let schedule = canonicalize(&g, &BurningSchedule::new(activators));
    let explored = (0..=t_star).map(|t| table.level_size(t) as u64).sum();
    Ok(ExactResult { burning_number: t_star, schedule, explored })
}

/// Can the sizes `1, 3, ..., 2t - 1` (each used at most once) be split so
/// that path `j` receives total size at least `n_j`?
pub fn coverage_burnable(lengths: &[usize], t: usize) -> bool {
    let mut demand: Vec<usize> = lengths.to_vec();
    demand.sort_unstable_by(|a, b| b.cmp(a));
    let total: usize = demand.iter().sum();
    if total > t * t || lengths.len() > t {
        return false;
    }
    let mut failed = HashSet::new();
    cover_from(t, demand, &mut failed)
}

/// Sizes 2r - 1 for r = r_max down to 1 remain; demands sorted descending.
fn cover_from(r_max: usize, mut demand: Vec<usize>, failed: &mut HashSet<(usize, Vec<usize>)>) -> bool {
    demand.retain(|&d| d > 0);
    if demand.is_empty() {
        return true;
    }
    if r_max == 0 || demand.len() > r_max || demand.iter().sum::<usize>() > r_max * r_max {
        return false;
    }
    demand.sort_unstable_by(|a, b| b.cmp(a));
    let key = (r_max, demand.clone());
    if failed.contains(&key) {
        return false;
    }
    let size = 2 * r_max - 1;
    let mut tried = HashSet::new();
    for j in 0..demand.len() {
        if !tried.insert(demand[j]) {
            continue;
        }
        let mut next = demand.clone();
        next[j] = next[j].saturating_sub(size);
        if cover_from(r_max - 1, next, failed) {
            return true;
        }
    }
    // leaving this size unused
    if cover_from(r_max - 1, demand, failed) {
        return true;
    }
    failed.insert(key);
    false
}

/// Smallest `t` with [`coverage_burnable`], or an error past the vertex cap.
pub fn coverage_burning_number(f: &PathForest, caps: &Caps) -> Result<usize, ExactError> {
    if f.total() > caps.coverage_vertices {
        return Err(ExactError::OracleTooLarge { n: f.total(), cap: caps.coverage_vertices });
    }
    let mut t = ceil_sqrt(f.total()).max(f.path_count());
    while !coverage_burnable(f.lengths(), t) {
        t += 1;
    }
    Ok(t)
}
