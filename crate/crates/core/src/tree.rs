//! Deepest-vertex center selection for trees (2-approximation).

use std::collections::VecDeque;

use num_rational::Ratio;
use thiserror::Error;

use crate::approx::{find_min_accepting, Accepting, SearchMode};
use crate::graph::{bfs_distances, Graph};
use crate::result::{ApproxResult, Counters, LowerBound};
use crate::schedule::{canonicalize, simulate, BurningSchedule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("not a tree: {0}")]
    NotATree(&'static str),
    #[error("root {root} out of range for n = {n}")]
    RootRange { root: usize, n: usize },
}

/// A tree with a chosen root, parent links and levels.
#[derive(Debug, Clone)]
pub struct RootedTree<'a> {
    graph: &'a Graph,
    root: usize,
    parent: Vec<usize>,
    level: Vec<usize>,
}

impl<'a> RootedTree<'a> {
    pub fn new(graph: &'a Graph, root: usize) -> Result<Self, TreeError> {
        let n = graph.n();
        if n == 0 {
            return Err(TreeError::NotATree("empty graph"));
        }
        if root >= n {
            return Err(TreeError::RootRange { root, n });
        }
        if graph.m() != n - 1 {
            return Err(TreeError::NotATree("edge count differs from n - 1"));
        }
        let mut parent = vec![usize::MAX; n];
        let mut level = vec![usize::MAX; n];
        level[root] = 0;
        parent[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in graph.neighbors(u) {
                if level[w] == usize::MAX {
                    level[w] = level[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if level.contains(&usize::MAX) {
            return Err(TreeError::NotATree("disconnected"));
        }
        Ok(RootedTree { graph, root, parent, level })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    /// `None` for the root.
    pub fn parent(&self, v: usize) -> Option<usize> {
        (v != self.root).then_some(self.parent[v])
    }

    /// The vertex `k` steps up from `v`, or the root if `v` is shallower.
    pub fn ancestor(&self, mut v: usize, k: usize) -> usize {
        for _ in 0..k.min(self.level[v]) {
            v = self.parent[v];
        }
        v
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeOutcome {
    Schedule(Vec<usize>),
    BadGuess,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeGuessResult {
    pub guess: usize,
    pub outcome: TreeOutcome,
    /// `(deepest unmarked vertex, chosen center)` per step.
    pub transcript: Vec<(usize, usize)>,
    /// Adjacency entries scanned while marking.
    pub edge_traversals: u64,
}

impl Accepting for TreeGuessResult {
    fn accepted(&self) -> bool {
        matches!(self.outcome, TreeOutcome::Schedule(_))
    }
}

/// Repeatedly takes the unmarked vertex of highest level (smallest index on
/// ties), opens a center at its `guess`-ancestor (the root when it is too
/// shallow) and marks everything within `guess` of that center. Fails once
/// a `(guess + 1)`-th center would be needed.
pub fn burn_guess_tree(t: &RootedTree<'_>, guess: usize) -> TreeGuessResult {
    let n = t.graph.n();
    let mut by_depth: Vec<usize> = (0..n).collect();
    by_depth.sort_by_key(|&v| (std::cmp::Reverse(t.level[v]), v));
    let mut marked = vec![false; n];
    let mut transcript = Vec::new();
    let mut cursor = 0;
    let mut edge_traversals = 0;
    loop {
        while cursor < n && marked[by_depth[cursor]] {
            cursor += 1;
        }
        if cursor == n {
            let centers = transcript.iter().map(|&(_, c)| c).collect();
            return TreeGuessResult { guess, outcome: TreeOutcome::Schedule(centers), transcript, edge_traversals };
        }
        if transcript.len() == guess {
            return TreeGuessResult { guess, outcome: TreeOutcome::BadGuess, transcript, edge_traversals };
        }
        let v = by_depth[cursor];
        let center = t.ancestor(v, guess);
        transcript.push((v, center));
        for (u, d) in bfs_distances(t.graph, center, Some(guess)).into_iter().enumerate() {
            if let Some(d) = d {
                marked[u] = true;
                if d < guess {
                    edge_traversals += t.graph.degree(u) as u64;
                }
            }
        }
    }
}

/// The tree 2-approximation: smallest accepting guess `g*` in `[1, n]`;
/// the rejection at `g* - 1` rules out any schedule of `g* - 1` rounds.
pub fn approx2(g: &Graph, root: Option<usize>, search: SearchMode) -> Result<ApproxResult, TreeError> {
    let tree = RootedTree::new(g, root.unwrap_or(0))?;
    let mut counters = Counters::default();
    let (accepted, _) = find_min_accepting(1, g.n(), search, |guess| {
        counters.guess_calls += 1;
        let r = burn_guess_tree(&tree, guess);
        counters.edge_traversals += r.edge_traversals;
        r
    });
    let TreeOutcome::Schedule(centers) = accepted.outcome else { unreachable!() };
    let schedule = canonicalize(g, &BurningSchedule::new(centers));
    let rounds = simulate(g, &schedule).completion_round;
    Ok(ApproxResult {
        schedule,
        rounds,
        opt_lower_bound: LowerBound::Certified(accepted.guess),
        ratio_bound: Ratio::from_integer(2),
        guess: accepted.guess,
        certificate: None,
        counters,
    })
}
