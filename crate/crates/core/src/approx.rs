//! Center selection for arbitrary graphs.
//!
//! `burn_guess` walks the vertices in a given order and opens a new center
//! whenever a vertex is farther than `2g - 2` from every existing center.
//! Reaching `g` centers proves (via the distance certificate) that no
//! schedule finishes in fewer than `g` rounds; otherwise the centers, lit in
//! selection order, finish within `3g - 3` rounds.

use std::collections::VecDeque;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::result::{ApproxResult, Counters, LowerBound};
use crate::schedule::{simulate, BurningSchedule, DistanceCertificate};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuessOutcome {
    Schedule(Vec<usize>),
    BadGuess(DistanceCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessResult {
    pub guess: usize,
    pub outcome: GuessOutcome,
    /// Adjacency entries scanned by the truncated searches.
    pub edge_traversals: u64,
}

impl GuessResult {
    pub fn is_schedule(&self) -> bool {
        matches!(self.outcome, GuessOutcome::Schedule(_))
    }
}

/// Processing order for `burn_guess`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum VertexOrder {
    #[default]
    Ascending,
    Random(u64),
    Explicit(Vec<usize>),
}

impl VertexOrder {
    pub fn materialize(&self, n: usize) -> Vec<usize> {
        match self {
            VertexOrder::Ascending => (0..n).collect(),
            VertexOrder::Random(seed) => {
                let mut v: Vec<usize> = (0..n).collect();
                v.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
                v
            }
            VertexOrder::Explicit(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    Linear,
    #[default]
    Binary,
}

/// One pass of center selection with guess `guess >= 1`.
///
/// Marking uses a label-correcting truncated BFS: each vertex keeps its
/// distance to the nearest center found so far, and a new center's search
/// only continues through vertices it strictly improves. The labels are
/// therefore exact, which keeps centers `2g - 1` apart even when a shortest
/// path runs through vertices that an earlier center already marked.
pub fn burn_guess(g: &Graph, guess: usize, order: &[usize]) -> GuessResult {
    assert!(guess >= 1, "guess must be positive");
    debug_assert_eq!(order.len(), g.n());
    let limit = 2 * guess - 2;
    let mut label = vec![usize::MAX; g.n()];
    let mut centers = Vec::new();
    let mut queue = VecDeque::new();
    let mut traversals = 0u64;
    for &v in order {
        if label[v] != usize::MAX {
            continue;
        }
        centers.push(v);
        if centers.len() == guess {
            return GuessResult {
                guess,
                outcome: GuessOutcome::BadGuess(DistanceCertificate { r: guess, witnesses: centers }),
                edge_traversals: traversals,
            };
        }
        label[v] = 0;
        queue.push_back((v, 0));
        while let Some((u, d)) = queue.pop_front() {
            if d >= limit {
                continue;
            }
            let nbrs = g.neighbors(u);
            traversals += nbrs.len() as u64;
            for &w in nbrs {
                if d + 1 < label[w] {
                    label[w] = d + 1;
                    queue.push_back((w, d + 1));
                }
            }
        }
    }
    GuessResult { guess, outcome: GuessOutcome::Schedule(centers), edge_traversals: traversals }
}

/// Minimal accepting guess search shared by the graph and tree drivers.
/// Binary mode re-runs both sides of the boundary and falls back to a
/// linear scan if they disagree with monotonicity.
pub(crate) fn find_min_accepting<R, F>(lo: usize, hi: usize, mode: SearchMode, mut run: F) -> (R, Option<R>)
where
    F: FnMut(usize) -> R,
    R: Accepting,
{
    let linear = |run: &mut F| {
        let mut prev = None;
        for g in lo..=hi {
            let r = run(g);
            if r.accepted() {
                return (r, prev);
            }
            prev = Some(r);
        }
        unreachable!("guess {hi} always accepts");
    };
    if mode == SearchMode::Linear {
        return linear(&mut run);
    }
    let (mut a, mut b) = (lo, hi);
    while a < b {
        let mid = a + (b - a) / 2;
        if run(mid).accepted() {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    let at = run(a);
    let below = (a > lo).then(|| run(a - 1));
    if at.accepted() && below.as_ref().is_none_or(|r| !r.accepted()) {
        (at, below)
    } else {
        log::warn!("guess acceptance not monotone around {a}; scanning linearly");
        linear(&mut run)
    }
}

pub(crate) trait Accepting {
    fn accepted(&self) -> bool;
}

impl Accepting for GuessResult {
    fn accepted(&self) -> bool {
        self.is_schedule()
    }
}

/// Counts calls and traversals while forwarding to `burn_guess`.
struct Instrumented<'a> {
    g: &'a Graph,
    order: Vec<usize>,
    counters: Counters,
}

impl Instrumented<'_> {
    fn run(&mut self, guess: usize) -> GuessResult {
        let r = burn_guess(self.g, guess, &self.order);
        self.counters.guess_calls += 1;
        self.counters.edge_traversals += r.edge_traversals;
        r
    }
}

/// The 3-approximation: smallest accepting guess `g*` in `[1, n + 1]`,
/// schedule from that call, lower bound `g* - 1` from the certificate of
/// the rejected guess below it.
pub fn approx3(g: &Graph, order: &VertexOrder, search: SearchMode) -> ApproxResult {
    let n = g.n();
    let mut inst = Instrumented { g, order: order.materialize(n), counters: Counters::default() };
    let (accepted, below) = find_min_accepting(1, n + 1, search, |guess| inst.run(guess));
    let centers = match accepted.outcome {
        GuessOutcome::Schedule(c) => c,
        GuessOutcome::BadGuess(_) => unreachable!(),
    };
    let certificate = below.and_then(|r| match r.outcome {
        GuessOutcome::BadGuess(c) => Some(c),
        GuessOutcome::Schedule(_) => None,
    });
    let g_star = accepted.guess;
    let schedule = BurningSchedule::new(centers);
    let rounds = simulate(g, &schedule).completion_round;
    let lower = if n == 0 { 0 } else { (g_star - 1).max(1) };
    ApproxResult {
        schedule,
        rounds,
        opt_lower_bound: LowerBound::Certified(lower),
        ratio_bound: Ratio::from_integer(3),
        guess: g_star,
        certificate,
        counters: inst.counters,
    }
}
