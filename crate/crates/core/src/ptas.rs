//! Radius grouping for arbitrary path forests.
//!
//! In a `g`-round schedule the fire lit in round `t` has radius `g - t + 1`
//! and can burn at most `2r - 1` vertices of a path. The radii `1..=g` are
//! split into groups of `beta = g / k`; the weak instance drops the first
//! group and rounds the rest down to their group minimum, leaving few
//! distinct radii so the short paths can be decided exhaustively.

use std::collections::{BTreeMap, HashSet};

use num_rational::Ratio;
use thiserror::Error;

use crate::exact::{coverage_burning_number, Caps};
use crate::graph::{expand_forest, PathForest};
use crate::result::{ApproxResult, Counters, LowerBound};
use crate::schedule::{canonicalize, simulate, BurningSchedule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PtasError {
    #[error("need g >= k >= 1, got g = {g}, k = {k}")]
    BadParameters { g: usize, k: usize },
    #[error("radius {radius} is not above g / k = {floor}")]
    RadiusTooSmall { radius: usize, floor: usize },
}

/// One radius value and the base radii that were rounded to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusClass {
    pub radius: usize,
    /// Base radii, descending. Multiplicity of the class is its length.
    pub originals: Vec<usize>,
}

impl RadiusClass {
    pub fn count(&self) -> usize {
        self.originals.len()
    }

    fn reach(&self) -> usize {
        2 * self.radius - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusMultiset {
    pub g: usize,
    pub k: usize,
    /// Classes by descending radius.
    pub classes: Vec<RadiusClass>,
}

impl RadiusMultiset {
    /// Unrounded fires `radius: count`, each its own provenance.
    pub fn from_counts(g: usize, k: usize, counts: &[(usize, usize)]) -> Self {
        let mut map: BTreeMap<usize, usize> = BTreeMap::new();
        for &(r, c) in counts {
            *map.entry(r).or_default() += c;
        }
        Self::from_map(g, k, map.into_iter().map(|(r, c)| (r, vec![r; c])))
    }

    fn from_map(g: usize, k: usize, classes: impl Iterator<Item = (usize, Vec<usize>)>) -> Self {
        let mut classes: Vec<RadiusClass> = classes
            .filter(|(_, o)| !o.is_empty())
            .map(|(radius, mut originals)| {
                originals.sort_unstable_by(|a, b| b.cmp(a));
                RadiusClass { radius, originals }
            })
            .collect();
        classes.sort_by_key(|c| std::cmp::Reverse(c.radius));
        RadiusMultiset { g, k, classes }
    }

    pub fn fire_count(&self) -> usize {
        self.classes.iter().map(RadiusClass::count).sum()
    }

    /// `sum (2r - 1)` over all fires.
    pub fn capacity(&self) -> usize {
        self.classes.iter().map(|c| c.count() * c.reach()).sum()
    }

    /// `radius -> multiplicity`, ascending.
    pub fn counts(&self) -> BTreeMap<usize, usize> {
        self.classes.iter().map(|c| (c.radius, c.count())).collect()
    }
}

/// Weak and strong instances for radii `1..=g` in groups of `g / k`.
pub fn build_instances(g: usize, k: usize) -> Result<(RadiusMultiset, RadiusMultiset), PtasError> {
    if k == 0 || g < k {
        return Err(PtasError::BadParameters { g, k });
    }
    let beta = g / k;
    let mut weak = BTreeMap::new();
    let mut strong = BTreeMap::new();
    let mut lo = 0;
    let mut first = true;
    while lo < g {
        let hi = (lo + beta).min(g);
        let group: Vec<usize> = (lo + 1..=hi).collect();
        if !first {
            weak.insert(lo + 1, group.clone());
        }
        strong.insert(hi, group);
        first = false;
        lo = hi;
    }
    Ok((
        RadiusMultiset::from_map(g, k, weak.into_iter()),
        RadiusMultiset::from_map(g, k, strong.into_iter()),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoReason {
    MorePathsThanFires,
    Capacity,
    Exhausted,
}

/// Fires per path, as class indices into the multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtasWitness {
    pub per_path: Vec<Vec<usize>>,
    pub short: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PtasDecision {
    Yes(PtasWitness),
    No(NoReason),
}

impl PtasDecision {
    pub fn is_yes(&self) -> bool {
        matches!(self, PtasDecision::Yes(_))
    }
}

/// Decides whether `fires` can cover every path of `f`. Short paths
/// (length at most `alpha * g`) are searched exhaustively over the
/// residual class-count vector; leftover fires then go to the long paths
/// largest first.
pub fn ptas_decide(f: &PathForest, fires: &RadiusMultiset, alpha: Ratio<u64>) -> Result<PtasDecision, PtasError> {
    let floor = fires.g / fires.k.max(1);
    if let Some(c) = fires.classes.iter().find(|c| c.radius <= floor) {
        return Err(PtasError::RadiusTooSmall { radius: c.radius, floor });
    }
    let mut states = 0;
    Ok(decide_counted(f, fires, alpha, &mut states))
}

fn decide_counted(f: &PathForest, fires: &RadiusMultiset, alpha: Ratio<u64>, states: &mut u64) -> PtasDecision {
    let lengths = f.lengths();
    if lengths.len() > fires.fire_count() {
        return PtasDecision::No(NoReason::MorePathsThanFires);
    }
    if f.total() > fires.capacity() {
        return PtasDecision::No(NoReason::Capacity);
    }
    let is_short: Vec<bool> = lengths
        .iter()
        .map(|&n| n as u128 * *alpha.denom() as u128 <= *alpha.numer() as u128 * fires.g as u128)
        .collect();
    // longest short paths first prunes earlier
    let mut short: Vec<usize> = (0..lengths.len()).filter(|&i| is_short[i]).collect();
    short.sort_by(|&a, &b| lengths[b].cmp(&lengths[a]));
    let long: Vec<usize> = (0..lengths.len()).filter(|&i| !is_short[i]).rev().collect();
    let mut search = ShortSearch {
        lengths,
        fires,
        short: &short,
        long: &long,
        failed: HashSet::new(),
        chosen: vec![Vec::new(); lengths.len()],
        states: 0,
    };
    let residual: Vec<usize> = fires.classes.iter().map(RadiusClass::count).collect();
    let found = search.run(0, residual);
    *states += search.states;
    match found {
        Some(per_path) => PtasDecision::Yes(PtasWitness { per_path, short: is_short }),
        None => PtasDecision::No(NoReason::Exhausted),
    }
}

struct ShortSearch<'a> {
    lengths: &'a [usize],
    fires: &'a RadiusMultiset,
    short: &'a [usize],
    long: &'a [usize],
    failed: HashSet<(usize, Vec<usize>)>,
    chosen: Vec<Vec<usize>>,
    states: u64,
}

impl ShortSearch<'_> {
    fn run(&mut self, idx: usize, residual: Vec<usize>) -> Option<Vec<Vec<usize>>> {
        self.states += 1;
        if idx == self.short.len() {
            return self.fill_long(&residual);
        }
        let key = (idx, residual);
        if self.failed.contains(&key) {
            return None;
        }
        let residual = key.1.clone();
        let path = self.short[idx];
        for take in self.minimal_subvectors(self.lengths[path], &residual) {
            let next: Vec<usize> = residual.iter().zip(&take).map(|(r, t)| r - t).collect();
            self.chosen[path] =
                take.iter().enumerate().flat_map(|(c, &t)| std::iter::repeat_n(c, t)).collect();
            if let Some(w) = self.run(idx + 1, next) {
                return Some(w);
            }
        }
        self.chosen[path].clear();
        self.failed.insert(key);
        None
    }

    /// Sub-vectors of `residual` covering `len` from which no single fire
    /// can be dropped, larger radii tried first.
    fn minimal_subvectors(&self, len: usize, residual: &[usize]) -> Vec<Vec<usize>> {
        let classes = &self.fires.classes;
        let mut out = Vec::new();
        let mut cur = vec![0; classes.len()];
        fn rec(
            c: usize,
            need: usize,
            classes: &[RadiusClass],
            residual: &[usize],
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if need == 0 {
                out.push(cur.clone());
                return;
            }
            if c == classes.len() {
                return;
            }
            let reach = classes[c].reach();
            let most = residual[c].min(need.div_ceil(reach));
            for t in (0..=most).rev() {
                cur[c] = t;
                rec(c + 1, need.saturating_sub(t * reach), classes, residual, cur, out);
            }
            cur[c] = 0;
        }
        rec(0, len, classes, residual, &mut cur, &mut out);
        // minimal iff dropping the smallest used fire uncovers the path
        out.retain(|v| {
            let over: usize = v.iter().zip(classes).map(|(t, cl)| t * cl.reach()).sum();
            let smallest = (0..v.len()).rev().find(|&i| v[i] > 0).unwrap();
            over - classes[smallest].reach() < len
        });
        out
    }

    fn fill_long(&mut self, residual: &[usize]) -> Option<Vec<Vec<usize>>> {
        let mut pool = residual
            .iter()
            .enumerate()
            .flat_map(|(c, &cnt)| std::iter::repeat_n(c, cnt));
        let mut per_path = self.chosen.clone();
        for &path in self.long {
            let mut covered = 0;
            while covered < self.lengths[path] {
                let c = pool.next()?;
                covered += self.fires.classes[c].reach();
                per_path[path].push(c);
            }
        }
        Some(per_path)
    }
}

/// Places a yes-witness: each fire takes a distinct base radius from its
/// class (largest first), radius `r` lights in round `g - r + 1`, and on
/// each path fires go left to right in decreasing radius, centred
/// `r - 1` past the claimed prefix.
pub fn materialize(f: &PathForest, fires: &RadiusMultiset, witness: &PtasWitness) -> BurningSchedule {
    let g = fires.g;
    let offsets = f.offsets();
    let mut next_original = vec![0; fires.classes.len()];
    let mut rounds: Vec<Option<usize>> = vec![None; g];
    for (path, classes) in witness.per_path.iter().enumerate() {
        let mut radii: Vec<usize> = classes
            .iter()
            .map(|&c| {
                let r = fires.classes[c].originals[next_original[c]];
                next_original[c] += 1;
                r
            })
            .collect();
        radii.sort_unstable_by(|a, b| b.cmp(a));
        let len = f.lengths()[path];
        let mut claimed = 0;
        for r in radii {
            let pos = (claimed + r - 1).min(len - 1);
            rounds[g - r] = Some(offsets[path] + pos);
            claimed += 2 * r - 1;
        }
    }
    while rounds.last() == Some(&None) {
        rounds.pop();
    }
    let filled = rounds.into_iter().map(|r| r.unwrap_or(0)).collect();
    canonicalize(&expand_forest(f), &BurningSchedule::new(filled))
}

/// `k = ceil(1 / eps) + 1`, then the smallest `g >= k` whose weak instance
/// is accepted. The lower bound is exact when the forest is small enough
/// for the coverage check.
pub fn ptas_driver(f: &PathForest, eps: Ratio<u64>, alpha: Ratio<u64>, caps: &Caps) -> ApproxResult {
    let k = eps.denom().div_ceil(*eps.numer()) as usize + 1;
    let graph = expand_forest(f);
    let mut counters = Counters::default();
    let mut g = k;
    loop {
        let (weak, _) = build_instances(g, k).expect("g >= k");
        counters.guess_calls += 1;
        if let PtasDecision::Yes(w) = decide_counted(f, &weak, alpha, &mut counters.dp_states) {
            let schedule = materialize(f, &weak, &w);
            let out = simulate(&graph, &schedule);
            assert!(out.complete && out.completion_round <= g, "weak-instance witness must burn within g");
            let opt_lower_bound = match coverage_burning_number(f, caps) {
                Ok(opt) => LowerBound::Certified(opt),
                Err(_) => LowerBound::Analytical(g as f64 * (k - 1) as f64 / k as f64),
            };
            return ApproxResult {
                schedule,
                rounds: out.completion_round,
                opt_lower_bound,
                ratio_bound: Ratio::new(k as u64, k as u64 - 1),
                guess: g,
                certificate: None,
                counters,
            };
        }
        g += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::path_dp;

    fn forest(l: &[usize]) -> PathForest {
        PathForest::new(l.to_vec()).unwrap()
    }

    fn counts(m: &RadiusMultiset) -> Vec<(usize, usize)> {
        m.counts().into_iter().collect()
    }

    #[test]
    fn instances_six_three() {
        let (weak, strong) = build_instances(6, 3).unwrap();
        assert_eq!(counts(&weak), vec![(3, 2), (5, 2)]);
        assert_eq!(counts(&strong), vec![(2, 2), (4, 2), (6, 2)]);
        assert_eq!(weak.classes[0].originals, vec![6, 5]);
    }

    #[test]
    fn instances_beta_one() {
        let (weak, _) = build_instances(5, 5).unwrap();
        assert_eq!(counts(&weak), vec![(2, 1), (3, 1), (4, 1), (5, 1)]);
        assert!(build_instances(2, 3).is_err());
    }

    #[test]
    fn rounding_direction() {
        for g in 1..30 {
            for k in 1..=g {
                let (weak, strong) = build_instances(g, k).unwrap();
                for c in &weak.classes {
                    assert!(c.originals.iter().all(|&o| o >= c.radius));
                }
                for c in &strong.classes {
                    assert!(c.originals.iter().all(|&o| o <= c.radius));
                }
                assert_eq!(strong.fire_count(), g);
            }
        }
    }

    #[test]
    fn decide_examples() {
        let three = |g| RadiusMultiset::from_counts(g, 3, &[(3, 1)]);
        assert!(ptas_decide(&forest(&[3]), &three(3), Ratio::from_integer(1)).unwrap().is_yes());
        assert_eq!(
            ptas_decide(&forest(&[3, 3]), &three(3), Ratio::from_integer(1)).unwrap(),
            PtasDecision::No(NoReason::MorePathsThanFires)
        );
        let fires = RadiusMultiset::from_counts(3, 2, &[(2, 2), (3, 1)]);
        let PtasDecision::Yes(w) = ptas_decide(&forest(&[5, 5]), &fires, Ratio::from_integer(2)).unwrap() else {
            panic!()
        };
        let mut radii: Vec<Vec<usize>> =
            w.per_path.iter().map(|p| p.iter().map(|&c| fires.classes[c].radius).collect()).collect();
        radii.sort();
        assert_eq!(radii, vec![vec![2, 2], vec![3]]);
    }

    #[test]
    fn decide_rejects_small_radius() {
        let fires = RadiusMultiset::from_counts(6, 3, &[(2, 1)]);
        assert!(matches!(ptas_decide(&forest(&[1]), &fires, Ratio::from_integer(3)), Err(PtasError::RadiusTooSmall { .. })));
    }

    #[test]
    fn long_paths_take_leftovers() {
        let fires = RadiusMultiset::from_counts(3, 3, &[(3, 3)]);
        let d = ptas_decide(&forest(&[2, 9]), &fires, Ratio::new(1, 1)).unwrap();
        let PtasDecision::Yes(w) = d else { panic!() };
        assert_eq!(w.short, vec![true, false]);
        assert_eq!(w.per_path[1].len(), 2);
    }

    #[test]
    fn driver_examples() {
        let caps = Caps::default();
        let r = ptas_driver(&forest(&[1]), Ratio::new(1, 2), Ratio::from_integer(3), &caps);
        assert_eq!(r.rounds, 1);
        let r = ptas_driver(&forest(&[2, 2]), Ratio::from_integer(1), Ratio::from_integer(3), &caps);
        assert!((3..=6).contains(&r.rounds));
        assert_eq!(r.opt_lower_bound, LowerBound::Certified(3));
        assert_eq!(r.ratio_bound, Ratio::from_integer(2));
    }

    #[test]
    fn driver_within_factor_on_small_forests() {
        let caps = Caps::default();
        for lengths in [vec![1, 2, 3], vec![4, 9], vec![16], vec![3, 3, 3, 7], vec![1, 1, 1, 1, 1]] {
            let f = forest(&lengths);
            let opt = path_dp(&f, &caps).unwrap().burning_number;
            let r = ptas_driver(&f, Ratio::from_integer(1), Ratio::from_integer(3), &caps);
            assert!(r.rounds <= 2 * opt, "{lengths:?}: {} vs {opt}", r.rounds);
            assert!(r.rounds >= opt);
        }
    }
}
