//! Burning-process semantics.
//!
//! Activator `x_i` ignites at the start of round `i`; a fire lit in round
//! `i` has spread `t - i` at the end of round `t`. Simulation is lenient:
//! an activator that is already burning is a no-op.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{bfs_distances, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BurningSchedule {
    pub activators: Vec<usize>,
}

impl BurningSchedule {
    pub fn new(activators: Vec<usize>) -> Self {
        BurningSchedule { activators }
    }

    pub fn len(&self) -> usize {
        self.activators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.activators.is_empty()
    }

    /// Activator of 1-based round `round`.
    pub fn at_round(&self, round: usize) -> Option<usize> {
        round.checked_sub(1).and_then(|i| self.activators.get(i).copied())
    }
}

impl From<Vec<usize>> for BurningSchedule {
    fn from(activators: Vec<usize>) -> Self {
        BurningSchedule { activators }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurnOutcome {
    /// Round in which each vertex starts burning, `None` if never.
    pub burn_time: Vec<Option<usize>>,
    pub completion_round: usize,
    pub complete: bool,
}

/// `r` witnesses at pairwise distance at least `2r - 1`; any schedule then
/// needs at least `r` rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceCertificate {
    pub r: usize,
    pub witnesses: Vec<usize>,
}

/// Runs the process round by round, O(n + m + len).
pub fn simulate(g: &Graph, s: &BurningSchedule) -> BurnOutcome {
    let n = g.n();
    let mut burn_time = vec![None; n];
    let mut frontier = Vec::new();
    let mut next = Vec::new();
    let mut round = 0;
    while round < s.len() || !frontier.is_empty() {
        round += 1;
        next.clear();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if burn_time[w].is_none() {
                    burn_time[w] = Some(round);
                    next.push(w);
                }
            }
        }
        if let Some(x) = s.at_round(round) {
            if burn_time[x].is_none() {
                burn_time[x] = Some(round);
                next.push(x);
            }
        }
        std::mem::swap(&mut frontier, &mut next);
    }
    let complete = burn_time.iter().all(Option::is_some);
    let completion_round = burn_time.iter().flatten().copied().max().unwrap_or(0);
    BurnOutcome { burn_time, completion_round, complete }
}

/// True iff activators are distinct and each is not yet burning when lit,
/// i.e. `d(x_i, x_j) >= j - i` for all `i < j`.
pub fn validate_strict(g: &Graph, s: &BurningSchedule) -> bool {
    let len = s.len();
    for (i, &x) in s.activators.iter().enumerate() {
        // only distances < len - i can violate a later pair
        let dist = bfs_distances(g, x, Some(len.saturating_sub(i + 1)));
        for (j, &y) in s.activators.iter().enumerate().skip(i + 1) {
            if let Some(d) = dist[y] {
                if d < j - i {
                    return false;
                }
            }
        }
    }
    true
}

/// Repairs a lenient schedule into a strict one. An activator that is
/// already burning is replaced by the lowest-index vertex not yet burning,
/// or dropped (together with every later one) once everything burns.
/// Completion never gets later, since fires are only ever added.
pub fn canonicalize(g: &Graph, s: &BurningSchedule) -> BurningSchedule {
    let n = g.n();
    let mut burning = vec![false; n];
    let mut frontier: Vec<usize> = Vec::new();
    let mut next = Vec::new();
    let mut lowest = 0;
    let mut out = Vec::with_capacity(s.len());
    let mut burned = 0;
    for &x in &s.activators {
        // state at start of this round = end of previous round
        while lowest < n && burning[lowest] {
            lowest += 1;
        }
        if burned == n {
            break;
        }
        let pick = if burning[x] { lowest } else { x };
        out.push(pick);
        next.clear();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if !burning[w] {
                    burning[w] = true;
                    burned += 1;
                    next.push(w);
                }
            }
        }
        if !burning[pick] {
            burning[pick] = true;
            burned += 1;
            next.push(pick);
        }
        std::mem::swap(&mut frontier, &mut next);
    }
    BurningSchedule::new(out)
}

/// Checks `c.r >= 1`, exactly `r` witnesses, and pairwise distance at least
/// `2r - 1` (unreachable counts as far enough).
pub fn verify_certificate(g: &Graph, c: &DistanceCertificate) -> bool {
    if c.r == 0 || c.witnesses.len() != c.r || c.witnesses.iter().any(|&w| w >= g.n()) {
        return false;
    }
    let limit = 2 * c.r - 2;
    let mut is_witness = vec![false; g.n()];
    for &w in &c.witnesses {
        if is_witness[w] {
            return false;
        }
        is_witness[w] = true;
    }
    for &w in &c.witnesses {
        let dist = bfs_distances(g, w, Some(limit));
        if c.witnesses.iter().any(|&o| o != w && dist[o].is_some()) {
            return false;
        }
    }
    true
}

/// Distances from every activator, for closed-form checks in tests and the
/// verifier report. O(len * (n + m)).
pub fn burn_times_closed_form(g: &Graph, s: &BurningSchedule) -> Vec<Option<usize>> {
    let mut best: Vec<Option<usize>> = vec![None; g.n()];
    for (i, &x) in s.activators.iter().enumerate() {
        let round = i + 1;
        let mut dist = vec![usize::MAX; g.n()];
        dist[x] = 0;
        let mut q = VecDeque::from([x]);
        while let Some(u) = q.pop_front() {
            let t = round + dist[u];
            match best[u] {
                Some(b) if b <= t => {}
                _ => best[u] = Some(t),
            }
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
    }
    best
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleFormatError {
    #[error("line {line}: malformed schedule line {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: expected round {expected}, found {found}")]
    RoundOrder { line: usize, expected: usize, found: usize },
    #[error("activator {vertex} out of range for n = {n}")]
    VertexRange { vertex: usize, n: usize },
}

/// Writes `<round> <vertex>` lines followed by `rounds <t>`.
pub fn format_schedule(s: &BurningSchedule, rounds: usize) -> String {
    let mut out = String::new();
    for (i, v) in s.activators.iter().enumerate() {
        let _ = writeln!(out, "{} {}", i + 1, v);
    }
    let _ = writeln!(out, "rounds {rounds}");
    out
}

/// Reads `<round> <vertex>` lines with rounds 1, 2, 3, ... in order. Lines
/// starting with `#` and `key value` lines whose key starts with a letter
/// (report lines such as `rounds 5`) are skipped.
pub fn parse_schedule(text: &str) -> Result<BurningSchedule, ScheduleFormatError> {
    let mut activators = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim_end_matches('\r').trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if content.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let malformed = || ScheduleFormatError::Malformed { line, text: content.to_string() };
        if toks.len() != 2 {
            return Err(malformed());
        }
        let round: usize = toks[0].parse().map_err(|_| malformed())?;
        let vertex: usize = toks[1].parse().map_err(|_| malformed())?;
        let expected = activators.len() + 1;
        if round != expected {
            return Err(ScheduleFormatError::RoundOrder { line, expected, found: round });
        }
        activators.push(vertex);
    }
    Ok(BurningSchedule::new(activators))
}

/// Rejects activators outside `0..n`.
pub fn check_range(s: &BurningSchedule, n: usize) -> Result<(), ScheduleFormatError> {
    match s.activators.iter().find(|&&v| v >= n) {
        Some(&vertex) => Err(ScheduleFormatError::VertexRange { vertex, n }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{expand_forest, PathForest};

    fn path(n: usize) -> Graph {
        expand_forest(&PathForest::new(vec![n]).unwrap())
    }

    /// Small instance: A at the centre of a star-like blob, B two
    /// steps away, C an extra leaf three steps from A.
    fn three_round_graph() -> (Graph, [usize; 3]) {
        // A=0 with neighbours 1,2,3; B=4 adjacent to 3 with neighbour 5;
        // C=6 hanging off 2 via 7, at distance 3 from A.
        let g = Graph::from_edges(8, [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (2, 7), (7, 6)]);
        (g, [0, 4, 6])
    }

    #[test]
    fn single_center() {
        let out = simulate(&path(3), &vec![1].into());
        assert_eq!(out.burn_time, vec![Some(2), Some(1), Some(2)]);
        assert_eq!((out.completion_round, out.complete), (2, true));
    }

    #[test]
    fn path_nine() {
        let out = simulate(&path(9), &vec![2, 6, 8].into());
        assert!(out.complete);
        assert_eq!(out.completion_round, 3);
        assert_eq!(out.burn_time[0], Some(3));
        assert_eq!(out.burn_time[5], Some(3));
    }

    #[test]
    fn three_rounds() {
        let (g, [a, b, c]) = three_round_graph();
        let out = simulate(&g, &vec![a, b, c].into());
        assert!(out.complete);
        assert_eq!(out.completion_round, 3);
        assert_eq!(out.burn_time[c], Some(3));
    }

    #[test]
    fn empty_and_single() {
        let out = simulate(&Graph::empty(0), &BurningSchedule::default());
        assert_eq!((out.completion_round, out.complete), (0, true));
        let out = simulate(&Graph::empty(1), &vec![0].into());
        assert_eq!((out.completion_round, out.complete), (1, true));
        let out = simulate(&Graph::empty(2), &vec![0].into());
        assert!(!out.complete);
    }

    #[test]
    fn strict_examples() {
        let g = path(3);
        assert!(validate_strict(&g, &vec![0, 2].into()));
        assert!(validate_strict(&g, &vec![0, 1].into()));
        assert!(validate_strict(&g, &vec![0, 1, 2].into()));
        assert!(!validate_strict(&g, &vec![1, 1].into()));
        assert!(!validate_strict(&path(5), &vec![2, 0, 3].into()));
        assert!(!validate_strict(&Graph::empty(3), &vec![0, 1, 0].into()));
    }

    #[test]
    fn canonicalize_examples() {
        let g = path(3);
        let s: BurningSchedule = vec![0, 2].into();
        assert_eq!(canonicalize(&g, &s), s);
        let s: BurningSchedule = vec![1, 0].into();
        assert_eq!(canonicalize(&g, &s), s);
        let c = canonicalize(&g, &vec![1, 1].into());
        assert!(validate_strict(&g, &c));
        assert_eq!(simulate(&g, &c).completion_round, 2);
        assert_eq!(c.activators, vec![1, 0]);
    }

    #[test]
    fn canonicalize_drops_after_full_burn() {
        let g = path(3);
        let c = canonicalize(&g, &vec![1, 0, 2, 1].into());
        assert_eq!(c.activators, vec![1, 0]);
    }

    #[test]
    fn certificate_examples() {
        let iso = Graph::empty(3);
        assert!(verify_certificate(&iso, &DistanceCertificate { r: 3, witnesses: vec![0, 1, 2] }));
        assert!(verify_certificate(&path(9), &DistanceCertificate { r: 2, witnesses: vec![0, 8] }));
        let k5 = Graph::from_edges(5, (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))));
        assert!(!verify_certificate(&k5, &DistanceCertificate { r: 2, witnesses: vec![0, 3] }));
        assert!(!verify_certificate(&iso, &DistanceCertificate { r: 2, witnesses: vec![0] }));
        assert!(!verify_certificate(&iso, &DistanceCertificate { r: 2, witnesses: vec![1, 1] }));
        assert!(!verify_certificate(&iso, &DistanceCertificate { r: 0, witnesses: vec![] }));
    }

    #[test]
    fn schedule_text_roundtrip() {
        let s: BurningSchedule = vec![4, 0, 7].into();
        let text = format_schedule(&s, 3);
        assert_eq!(text, "1 4\n2 0\n3 7\nrounds 3\n");
        assert_eq!(parse_schedule(&text).unwrap(), s);
        assert_eq!(parse_schedule("algo greedy3\n# x\n1 1\r\n").unwrap().activators, vec![1]);
        assert!(matches!(parse_schedule("1 0\n3 2"), Err(ScheduleFormatError::RoundOrder { .. })));
        assert!(matches!(parse_schedule("1 x"), Err(ScheduleFormatError::Malformed { .. })));
        assert!(check_range(&s, 5).is_err());
    }
}
