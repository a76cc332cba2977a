//! Bin covering reduction for path forests whose lengths are roughly equal.
//!
//! All sizes are integers over a shared capacity, so "a bin is covered" is
//! an exact integer comparison. Path `i` with `m_i = ceil((n_i + 1) / 2)`
//! becomes a large item `C - m_i` (with `C = 3 m_b`), and the fire lit `j`
//! rounds before the deadline becomes a small item `min(j, m_b)`.

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::graph::{expand_forest, PathForest};
use crate::result::{ApproxResult, Counters, LowerBound};
use crate::schedule::{canonicalize, simulate, BurningSchedule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("covering instance has {items} items, exact solver cap is {cap}")]
    TooManyItems { items: usize, cap: usize },
    #[error("cannot normalize covering: {0}")]
    NotNormalizable(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("reduction needs at least two paths, got {0}")]
    TooFewPaths(usize),
    #[error("no covering found up to k = {0}")]
    Exhausted(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ItemLabel {
    /// Large item of path `i` (0-based, in sorted forest order).
    Large(usize),
    /// Small item with index `j` (1-based).
    Small(usize),
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Item {
    pub size: u64,
    pub label: ItemLabel,
}

impl Item {
    pub fn free(size: u64) -> Self {
        Item { size, label: ItemLabel::Free }
    }
}

/// Items with sizes `size / capacity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringInstance {
    pub capacity: u64,
    pub items: Vec<Item>,
}

impl CoveringInstance {
    /// Unlabelled items given as numerators over `capacity`.
    pub fn from_sizes(capacity: u64, sizes: &[u64]) -> Self {
        CoveringInstance { capacity, items: sizes.iter().map(|&s| Item::free(s)).collect() }
    }

    fn is_large(&self, item: &Item) -> bool {
        3 * item.size >= 2 * self.capacity
    }
}

/// The k-instance built from a path forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KInstance {
    pub k: usize,
    /// `m_i = ceil((n_i + 1) / 2)` per path.
    pub m: Vec<u64>,
    /// Common denominator `C = 3 m_b`.
    pub c: u64,
    /// `c* = 1 - m_1 / (3 m_b)`.
    pub canonical_constant: Ratio<u64>,
    /// Large items, then small items `q_1..q_k`.
    pub instance: CoveringInstance,
}

impl KInstance {
    /// Large items plus `q_1..q_{k-1}`: the items a `k`-round schedule can
    /// actually use (`q_k` would need a fire lit in round 0).
    pub fn usable(&self) -> CoveringInstance {
        CoveringInstance {
            capacity: self.c,
            items: self
                .instance
                .items
                .iter()
                .copied()
                .filter(|it| !matches!(it.label, ItemLabel::Small(j) if j >= self.k))
                .collect(),
        }
    }
}

pub fn build_k_instance(f: &PathForest, k: usize) -> KInstance {
    let m: Vec<u64> = f.lengths().iter().map(|&n| (n as u64 + 2) / 2).collect();
    let m_b = *m.last().expect("forest is non-empty");
    let c = 3 * m_b;
    let mut items: Vec<Item> =
        m.iter().enumerate().map(|(i, &mi)| Item { size: c - mi, label: ItemLabel::Large(i) }).collect();
    items.extend((1..=k).map(|j| Item { size: (j as u64).min(m_b), label: ItemLabel::Small(j) }));
    KInstance {
        k,
        canonical_constant: Ratio::new(c - m[0], c),
        m,
        c,
        instance: CoveringInstance { capacity: c, items },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringSolution {
    pub capacity: u64,
    pub bins: Vec<Vec<Item>>,
}

impl CoveringSolution {
    pub fn is_covered(&self, bin: &[Item]) -> bool {
        bin.iter().map(|it| it.size).sum::<u64>() >= self.capacity
    }

    pub fn covered_count(&self) -> usize {
        self.bins.iter().filter(|b| self.is_covered(b)).count()
    }
}

impl fmt::Display for CoveringSolution {
    /// One line per covered bin: `bin i: large p_i, smalls j1 j2 ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, bin) in self.bins.iter().filter(|b| self.is_covered(b)).enumerate() {
            write!(f, "bin {idx}:")?;
            let large: Vec<String> = bin
                .iter()
                .filter_map(|it| match it.label {
                    ItemLabel::Large(i) => Some(format!("p_{}", i + 1)),
                    _ => None,
                })
                .collect();
            if !large.is_empty() {
                write!(f, " large {},", large.join(" "))?;
            }
            write!(f, " smalls")?;
            for it in bin {
                match it.label {
                    ItemLabel::Small(j) => write!(f, " {j}")?,
                    ItemLabel::Free => write!(f, " {}/{}", it.size, self.capacity)?,
                    ItemLabel::Large(_) => {}
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverMode {
    #[default]
    Exact,
    Greedy,
}

/// Default item cap for the exact solver.
pub const EXACT_ITEM_CAP: usize = 64;

/// Maximum number of covered bins (exact) or next-fit-decreasing (greedy).
pub fn solve_covering(inst: &CoveringInstance, mode: CoverMode) -> Result<CoveringSolution, CoverError> {
    let mut nodes = 0;
    solve_covering_counted(inst, mode, EXACT_ITEM_CAP, &mut nodes)
}

pub fn solve_covering_counted(
    inst: &CoveringInstance,
    mode: CoverMode,
    item_cap: usize,
    nodes: &mut u64,
) -> Result<CoveringSolution, CoverError> {
    match mode {
        CoverMode::Greedy => Ok(next_fit_decreasing(inst)),
        CoverMode::Exact => {
            if inst.items.len() > item_cap {
                return Err(CoverError::TooManyItems { items: inst.items.len(), cap: item_cap });
            }
            let total: u64 = inst.items.iter().map(|it| it.size).sum();
            let upper = ((total / inst.capacity) as usize).min(inst.items.len());
            for target in (1..=upper).rev() {
                if let Some(sol) = cover_target(inst, target, nodes) {
                    return Ok(sol);
                }
            }
            Ok(CoveringSolution { capacity: inst.capacity, bins: Vec::new() })
        }
    }
}

/// Exact check whether `target` bins can be covered; on success returns
/// exactly `target` covered bins (leftover items are dropped).
pub fn cover_target(inst: &CoveringInstance, target: usize, nodes: &mut u64) -> Option<CoveringSolution> {
    let bins = fill_bins(&inst.items, vec![inst.capacity; target], nodes)?;
    Some(CoveringSolution { capacity: inst.capacity, bins })
}

/// Exact check whether the usable items of a k-instance cover one bin per
/// path. A covering of `b` bins can always be rearranged so each bin holds
/// exactly one large item (see [`normalize_bins`]), so bin `i` starts with
/// large item `i` and only the small items are searched, against the
/// deficits `m_i`.
pub fn cover_k_instance(ki: &KInstance, nodes: &mut u64) -> Option<CoveringSolution> {
    let usable = ki.usable();
    let (large, small): (Vec<Item>, Vec<Item>) =
        usable.items.iter().partition(|it| matches!(it.label, ItemLabel::Large(_)));
    let filled = fill_bins(&small, ki.m.clone(), nodes)?;
    let bins = large
        .into_iter()
        .zip(filled)
        .map(|(l, mut rest)| {
            rest.insert(0, l);
            rest
        })
        .collect();
    Some(CoveringSolution { capacity: ki.c, bins })
}

/// Assigns items to bins with the given residual demands so that every
/// demand is met; unassigned items are dropped.
fn fill_bins(items: &[Item], residual: Vec<u64>, nodes: &mut u64) -> Option<Vec<Vec<Item>>> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(items[i].size));
    let sizes: Vec<u64> = order.iter().map(|&i| items[i].size).collect();
    let mut suffix = vec![0u64; sizes.len() + 1];
    for i in (0..sizes.len()).rev() {
        suffix[i] = suffix[i + 1] + sizes[i];
    }
    let bin_count = residual.len();
    let mut search = TargetSearch {
        sizes: &sizes,
        suffix: &suffix,
        residual,
        assign: vec![None; sizes.len()],
        failed: HashSet::new(),
        nodes: 0,
    };
    let ok = search.run(0);
    *nodes += search.nodes;
    if !ok {
        return None;
    }
    let mut bins = vec![Vec::new(); bin_count];
    for (pos, slot) in search.assign.iter().enumerate() {
        if let Some(b) = slot {
            bins[*b].push(items[order[pos]]);
        }
    }
    Some(bins)
}

struct TargetSearch<'a> {
    sizes: &'a [u64],
    suffix: &'a [u64],
    residual: Vec<u64>,
    assign: Vec<Option<usize>>,
    failed: HashSet<(usize, Vec<u64>)>,
    nodes: u64,
}

impl TargetSearch<'_> {
    fn run(&mut self, idx: usize) -> bool {
        self.nodes += 1;
        let need: u64 = self.residual.iter().sum();
        if need == 0 {
            return true;
        }
        let open = self.residual.iter().filter(|&&r| r > 0).count();
        if self.suffix[idx] < need || self.sizes.len() - idx < open {
            return false;
        }
        let mut key_res = self.residual.clone();
        key_res.sort_unstable();
        let key = (idx, key_res);
        if self.failed.contains(&key) {
            return false;
        }
        let size = self.sizes[idx];
        let mut tried = HashSet::new();
        for b in 0..self.residual.len() {
            let r = self.residual[b];
            if r == 0 || !tried.insert(r) {
                continue;
            }
            self.residual[b] = r.saturating_sub(size);
            self.assign[idx] = Some(b);
            if self.run(idx + 1) {
                return true;
            }
            self.residual[b] = r;
        }
        self.assign[idx] = None;
        if self.run(idx + 1) {
            return true;
        }
        self.failed.insert(key);
        false
    }
}

fn next_fit_decreasing(inst: &CoveringInstance) -> CoveringSolution {
    let mut items = inst.items.clone();
    items.sort_by_key(|it| std::cmp::Reverse(it.size));
    let mut bins = Vec::new();
    let mut cur = Vec::new();
    let mut fill = 0;
    for it in items {
        fill += it.size;
        cur.push(it);
        if fill >= inst.capacity {
            bins.push(std::mem::take(&mut cur));
            fill = 0;
        }
    }
    if !cur.is_empty() {
        bins.push(cur);
    }
    CoveringSolution { capacity: inst.capacity, bins }
}

/// One bin per large item (largest deficit first), then small items in
/// decreasing size, each into the current bin until it is covered.
fn seeded_next_fit(inst: &CoveringInstance, b: usize) -> CoveringSolution {
    let (mut bins, mut smalls): (Vec<Vec<Item>>, Vec<Item>) = (Vec::new(), Vec::new());
    for it in &inst.items {
        match it.label {
            ItemLabel::Large(_) => bins.push(vec![*it]),
            _ => smalls.push(*it),
        }
    }
    debug_assert_eq!(bins.len(), b);
    bins.sort_by_key(|bin| bin[0].size);
    smalls.sort_by_key(|it| std::cmp::Reverse(it.size));
    let mut cur = 0;
    for it in smalls {
        if cur == bins.len() {
            break;
        }
        bins[cur].push(it);
        if bins[cur].iter().map(|i| i.size).sum::<u64>() >= inst.capacity {
            cur += 1;
        }
    }
    CoveringSolution { capacity: inst.capacity, bins }
}

/// Rearranges a covering so every covered bin holds exactly one large item
/// (size at least 2/3), without reducing the covered count. A covered bin
/// of small items trades a sub-multiset with sum in (1/3, 2/3] for a
/// surplus large item from another bin. Covered bins come first in the
/// result.
pub fn normalize_bins(sol: &CoveringSolution) -> Result<CoveringSolution, CoverError> {
    let cap = sol.capacity;
    let probe = CoveringInstance { capacity: cap, items: Vec::new() };
    let is_large = |it: &Item| probe.is_large(it);
    if sol.bins.iter().flatten().any(|it| !is_large(it) && 3 * it.size > cap) {
        return Err(CoverError::NotNormalizable("item strictly between 1/3 and 2/3"));
    }
    let (mut covered, mut rest): (Vec<Vec<Item>>, Vec<Vec<Item>>) =
        sol.bins.iter().cloned().partition(|b| sol.is_covered(b));
    let large_count = |b: &[Item]| b.iter().filter(|it| is_large(it)).count();
    loop {
        let small_only = covered.iter().position(|b| large_count(b) == 0);
        let multi = covered.iter().position(|b| large_count(b) >= 2);
        let (Some(i), Some(j)) = (small_only, multi) else { break };
        let mut moved = Vec::new();
        let mut sum = 0;
        covered[i].retain(|it| {
            if 3 * sum > cap {
                return true;
            }
            sum += it.size;
            moved.push(*it);
            false
        });
        let large_pos = covered[j].iter().position(is_large).unwrap();
        let large = covered[j].remove(large_pos);
        covered[j].extend(moved);
        covered[i].push(large);
    }
    for bin in &mut covered {
        if large_count(bin) > 0 {
            continue;
        }
        let spare = rest.iter().enumerate().find_map(|(b, bin)| bin.iter().position(&is_large).map(|p| (b, p)));
        match spare {
            Some((b, p)) => {
                let large = rest[b].remove(p);
                bin.push(large);
            }
            None => return Err(CoverError::NotNormalizable("more covered bins than large items")),
        }
    }
    // shed extra large items where the bin stays covered
    for bin in &mut covered {
        while large_count(bin) > 1 {
            let pos = bin.iter().rposition(&is_large).unwrap();
            let without: u64 = bin.iter().map(|it| it.size).sum::<u64>() - bin[pos].size;
            if without < cap {
                break;
            }
            rest.push(vec![bin.remove(pos)]);
        }
    }
    rest.retain(|b| !b.is_empty());
    covered.extend(rest);
    Ok(CoveringSolution { capacity: cap, bins: covered })
}

/// Turns a covering of at least `b` bins (small indices at most `k - 1`)
/// into a schedule finishing within `k` rounds: small item `q_j` in the bin
/// of path `i` becomes a fire in round `k - j`, `j` steps past the claimed
/// prefix of that path, claiming `2j + 1` more vertices.
pub fn covering_to_schedule(
    f: &PathForest,
    k: usize,
    sol: &CoveringSolution,
) -> Result<BurningSchedule, CoverError> {
    let b = f.path_count();
    for it in sol.bins.iter().flatten() {
        match it.label {
            ItemLabel::Small(j) if j == 0 || j >= k => {
                return Err(CoverError::Precondition(format!("small item q_{j} unusable with k = {k}")))
            }
            ItemLabel::Free => return Err(CoverError::Precondition("unlabelled item".into())),
            _ => {}
        }
    }
    let mut trimmed = sol.clone();
    let has_large = |bin: &[Item]| bin.iter().any(|it| matches!(it.label, ItemLabel::Large(_)));
    while trimmed.covered_count() > b {
        let Some(pos) = trimmed.bins.iter().position(|bin| trimmed.is_covered(bin) && !has_large(bin)) else {
            break;
        };
        trimmed.bins.remove(pos);
    }
    if trimmed.covered_count() < b {
        return Err(CoverError::Precondition(format!("only {} of {b} bins covered", trimmed.covered_count())));
    }
    let norm = normalize_bins(&trimmed)?;
    let offsets = f.offsets();
    let mut rounds: Vec<Option<usize>> = vec![None; k.saturating_sub(1)];
    let mut seen_path = vec![false; b];
    for bin in norm.bins.iter().take_while(|bin| norm.is_covered(bin)) {
        let path = bin
            .iter()
            .find_map(|it| match it.label {
                ItemLabel::Large(i) => Some(i),
                _ => None,
            })
            .unwrap();
        seen_path[path] = true;
        let len = f.lengths()[path];
        let mut smalls: Vec<usize> = bin
            .iter()
            .filter_map(|it| match it.label {
                ItemLabel::Small(j) => Some(j),
                _ => None,
            })
            .collect();
        smalls.sort_unstable_by(|a, b| b.cmp(a));
        let mut claimed = 0;
        for j in smalls {
            let pos = (claimed + j).min(len - 1);
            rounds[k - j - 1] = Some(offsets[path] + pos);
            claimed += 2 * j + 1;
        }
    }
    if seen_path.iter().any(|s| !s) {
        return Err(CoverError::Precondition("some path has no covered bin".into()));
    }
    while rounds.last() == Some(&None) {
        rounds.pop();
    }
    let filled: Vec<usize> = rounds.into_iter().map(|r| r.unwrap_or(0)).collect();
    Ok(canonicalize(&expand_forest(f), &BurningSchedule::new(filled)))
}

/// Maps a schedule finishing within `k - 1` rounds onto the `k`-instance:
/// a fire in round `r` on path `i` contributes `q_{k-r}` to bin `i`.
pub fn schedule_to_covering(
    f: &PathForest,
    k: usize,
    s: &BurningSchedule,
) -> Result<CoveringSolution, CoverError> {
    let g = expand_forest(f);
    let out = simulate(&g, s);
    if !out.complete || out.completion_round + 1 > k {
        return Err(CoverError::Precondition(format!(
            "schedule must finish within {} rounds (complete = {}, rounds = {})",
            k.saturating_sub(1),
            out.complete,
            out.completion_round
        )));
    }
    let ki = build_k_instance(f, k);
    let m_b = *ki.m.last().unwrap();
    let offsets = f.offsets();
    let path_of = |v: usize| offsets.partition_point(|&o| o <= v) - 1;
    let mut bins: Vec<Vec<Item>> = ki.instance.items[..f.path_count()].iter().map(|&it| vec![it]).collect();
    for (idx, &v) in s.activators.iter().enumerate() {
        let round = idx + 1;
        if round >= k {
            break;
        }
        let y = k - round;
        bins[path_of(v)].push(Item { size: (y as u64).min(m_b), label: ItemLabel::Small(y) });
    }
    let sol = CoveringSolution { capacity: ki.c, bins };
    if sol.covered_count() < f.path_count() {
        return Err(CoverError::Precondition("mapped covering leaves a bin uncovered".into()));
    }
    Ok(sol)
}

/// Audit data from [`fptas_driver`].
#[derive(Debug, Clone, PartialEq)]
pub struct FptasReport {
    pub result: ApproxResult,
    pub canonical_constant: Ratio<u64>,
    /// `(1 - c*) eps / (4 + (5 - c*) eps)`; recorded, not used by the exact solver.
    pub eps0: f64,
    pub warnings: Vec<String>,
}

/// Ascending scan for the smallest `k` whose usable k-instance covers `b`
/// bins. With the exact solver, failure at `k* - 1` rules out any schedule
/// of `k* - 2` rounds, so the result is within one round of optimal.
pub fn fptas_driver(f: &PathForest, eps: Ratio<u64>, mode: CoverMode) -> Result<FptasReport, CoverError> {
    let b = f.path_count();
    if b < 2 {
        return Err(CoverError::TooFewPaths(b));
    }
    let probe = build_k_instance(f, 1);
    let c_star = probe.canonical_constant;
    let cs = ratio_f64(c_star);
    let e = ratio_f64(eps);
    let eps0 = (1.0 - cs) * e / (4.0 + (5.0 - cs) * e);
    let mut warnings = Vec::new();
    if 10 * (probe.c - probe.m[0]) >= 9 * probe.c {
        let msg = format!("canonical constant {cs:.3} >= 0.9: lengths far from regular, 1+eps analysis degrades");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let mut counters = Counters::default();
    let g = expand_forest(f);
    let k_limit = 2 * f.total() + 2;
    for k in 2..=k_limit {
        let ki = build_k_instance(f, k);
        counters.guess_calls += 1;
        let sol = match mode {
            CoverMode::Exact => {
                let items = b + k - 1;
                if items > EXACT_ITEM_CAP {
                    return Err(CoverError::TooManyItems { items, cap: EXACT_ITEM_CAP });
                }
                cover_k_instance(&ki, &mut counters.covering_nodes)
            }
            CoverMode::Greedy => {
                let sol = seeded_next_fit(&ki.usable(), b);
                (sol.covered_count() >= b).then_some(sol)
            }
        };
        let Some(sol) = sol else { continue };
        let schedule = match covering_to_schedule(f, k, &sol) {
            Ok(s) => s,
            // greedy coverings need not normalize; keep scanning
            Err(_) if mode == CoverMode::Greedy => continue,
            Err(e) => return Err(e),
        };
        let out = simulate(&g, &schedule);
        if !out.complete || out.completion_round > k {
            return Err(CoverError::Precondition(format!(
                "covering for k = {k} produced a schedule finishing in {}",
                out.completion_round
            )));
        }
        let opt_lower_bound = match mode {
            CoverMode::Exact => LowerBound::Certified((k - 1).max(1)),
            CoverMode::Greedy => LowerBound::Analytical(k as f64 / (1.0 + e)),
        };
        let result = ApproxResult {
            schedule,
            rounds: out.completion_round,
            opt_lower_bound,
            ratio_bound: Ratio::from_integer(1) + eps,
            guess: k,
            certificate: None,
            counters,
        };
        return Ok(FptasReport { result, canonical_constant: c_star, eps0, warnings });
    }
    Err(CoverError::Exhausted(k_limit))
}

pub(crate) fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
