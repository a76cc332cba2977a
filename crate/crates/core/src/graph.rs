//! Undirected simple graphs, the two text formats, BFS distances and
//! instance generators.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Parse failure in one of the text formats. Line numbers are 1-based.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed line {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: negative vertex index")]
    NegativeIndex { line: usize },
    #[error("line {line}: vertex {index} out of range for declared n = {n}")]
    OutOfRange { line: usize, index: usize, n: usize },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: path lengths must be positive")]
    InvalidLength { line: usize },
    #[error("no path lengths given")]
    EmptyForest,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("edge probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("gadget needs k >= 2, got {0}")]
    GadgetSize(usize),
    #[error("invalid path length range [{min}, {max}]")]
    LengthRange { min: usize, max: usize },
    #[error("paths generator needs at least one path")]
    NoPaths,
}

/// Undirected, unweighted simple graph on dense vertex ids `0..n`.
///
/// Adjacency lists are sorted and symmetric; every unordered edge is
/// counted once in `m`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n()).field("m", &self.m).finish()
    }
}

impl Graph {
    /// Graph with `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph from an edge iterator. Duplicates (in either
    /// orientation) collapse; self-loops are dropped.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut m = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        Graph { adj, m: m / 2 }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Each edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Component id per vertex plus the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// When every component is a simple path, returns each path's vertices
    /// in walk order (isolated vertices are paths of one vertex).
    pub fn path_components(&self) -> Option<Vec<Vec<usize>>> {
        if self.adj.iter().any(|a| a.len() > 2) {
            return None;
        }
        let n = self.n();
        let mut seen = vec![false; n];
        let mut paths = Vec::new();
        for s in 0..n {
            if seen[s] || self.degree(s) == 2 {
                continue;
            }
            // s is an endpoint (degree 0 or 1)
            let mut path = vec![s];
            seen[s] = true;
            let mut prev = usize::MAX;
            let mut cur = s;
            loop {
                let next = self.adj[cur].iter().copied().find(|&w| w != prev);
                match next {
                    Some(w) if !seen[w] => {
                        seen[w] = true;
                        path.push(w);
                        prev = cur;
                        cur = w;
                    }
                    _ => break,
                }
            }
            paths.push(path);
        }
        // anything left unseen lies on a cycle
        if seen.iter().all(|&x| x) {
            Some(paths)
        } else {
            None
        }
    }
}

/// Lengths (vertex counts) of the paths in a path forest, sorted
/// non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathForest {
    lengths: Vec<usize>,
}

impl PathForest {
    pub fn new(mut lengths: Vec<usize>) -> Result<Self, ParseError> {
        if lengths.is_empty() {
            return Err(ParseError::EmptyForest);
        }
        if lengths.contains(&0) {
            return Err(ParseError::InvalidLength { line: 0 });
        }
        lengths.sort_unstable();
        Ok(PathForest { lengths })
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn path_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn total(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// First vertex id of each path in the [`expand_forest`] layout.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.lengths
            .iter()
            .map(|&l| {
                let start = acc;
                acc += l;
                start
            })
            .collect()
    }
}

impl fmt::Display for PathForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "paths")?;
        for l in &self.lengths {
            write!(f, " {l}")?;
        }
        Ok(())
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_index(tok: &str, line: usize) -> Result<usize, ParseError> {
    if tok.starts_with('-') && tok.len() > 1 && tok[1..].bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::NegativeIndex { line });
    }
    if !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::Malformed { line, text: tok.to_string() });
    }
    tok.parse().map_err(|_| ParseError::Malformed { line, text: tok.to_string() })
}

/// Parses the edge-list format: optional header `n <count>`, then one
/// `<u> <v>` pair per line. `#` lines are comments.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut declared = None;
    let mut edges = Vec::new();
    let mut first = true;
    for (line, content) in content_lines(text) {
        let toks: Vec<&str> = content.split_whitespace().collect();
        if first && toks.first() == Some(&"n") {
            first = false;
            if toks.len() != 2 {
                return Err(ParseError::Malformed { line, text: content.to_string() });
            }
            declared = Some(parse_index(toks[1], line)?);
            continue;
        }
        first = false;
        if toks.len() != 2 {
            return Err(ParseError::Malformed { line, text: content.to_string() });
        }
        let u = parse_index(toks[0], line)?;
        let v = parse_index(toks[1], line)?;
        if let Some(n) = declared {
            for idx in [u, v] {
                if idx >= n {
                    return Err(ParseError::OutOfRange { line, index: idx, n });
                }
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, vertex: u });
        }
        edges.push((u, v));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    Ok(Graph::from_edges(n, edges))
}

/// Parses the single-line `paths n1 n2 ...` format.
pub fn parse_path_forest(text: &str) -> Result<PathForest, ParseError> {
    let mut lines = content_lines(text);
    let (line, content) = lines.next().ok_or(ParseError::EmptyForest)?;
    let mut toks = content.split_whitespace();
    if toks.next() != Some("paths") {
        return Err(ParseError::Malformed { line, text: content.to_string() });
    }
    let mut lengths = Vec::new();
    for tok in toks {
        let l = parse_index(tok, line).map_err(|e| match e {
            ParseError::NegativeIndex { line } => ParseError::InvalidLength { line },
            other => other,
        })?;
        if l == 0 {
            return Err(ParseError::InvalidLength { line });
        }
        lengths.push(l);
    }
    if let Some((line, content)) = lines.next() {
        return Err(ParseError::Malformed { line, text: content.to_string() });
    }
    if lengths.is_empty() {
        return Err(ParseError::EmptyForest);
    }
    PathForest::new(lengths)
}

/// Edge-list text for `g`, always with an `n` header.
pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Disjoint union of paths; path `i` occupies consecutive ids starting at
/// `forest.offsets()[i]`.
pub fn expand_forest(forest: &PathForest) -> Graph {
    let mut edges = Vec::with_capacity(forest.total());
    for (start, &len) in forest.offsets().into_iter().zip(forest.lengths()) {
        edges.extend((start..start + len - 1).map(|v| (v, v + 1)));
    }
    Graph::from_edges(forest.total(), edges)
}

/// Unweighted distances from `source`. Vertices farther than `depth_limit`
/// (or unreachable) are `None`.
pub fn bfs_distances(g: &Graph, source: usize, depth_limit: Option<usize>) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        if depth_limit.is_some_and(|lim| du >= lim) {
            continue;
        }
        for &w in g.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    General,
    ForestOfTrees,
    SingleTree,
    PathForest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphShape {
    pub kind: ShapeKind,
    pub component_count: usize,
}

/// Most specific structural class. A single path counts as a path forest.
pub fn classify(g: &Graph) -> GraphShape {
    let (_, components) = g.components();
    let acyclic = g.n() > 0 && g.m() + components == g.n();
    let kind = if !acyclic {
        ShapeKind::General
    } else if g.adj.iter().all(|a| a.len() <= 2) {
        ShapeKind::PathForest
    } else if components == 1 {
        ShapeKind::SingleTree
    } else {
        ShapeKind::ForestOfTrees
    };
    GraphShape { kind, component_count: components }
}

/// Generator recipes understood by [`gen_instance`].
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Gnp { n: usize, p: f64 },
    RandomTree { n: usize },
    Paths { b: usize, min_len: usize, max_len: usize },
    Gadget { k: usize },
}

/// Named vertices of the tightness gadget built by [`gadget`].
#[derive(Debug, Clone)]
pub struct Gadget {
    pub graph: Graph,
    pub hub: usize,
    pub tips: Vec<usize>,
    /// Pendant path from the last tip to the terminal, excluding the tip.
    pub pendant: Vec<usize>,
    pub terminal: usize,
}

impl Gadget {
    /// Vertex order listing the tips first, then everything else ascending.
    pub fn tip_first_order(&self) -> Vec<usize> {
        let mut order = self.tips.clone();
        let mut is_tip = vec![false; self.graph.n()];
        for &t in &self.tips {
            is_tip[t] = true;
        }
        order.extend((0..self.graph.n()).filter(|&v| !is_tip[v]));
        order
    }

    /// A (k+1)-round schedule: hub, then the pendant midpoint, then the
    /// remaining tips.
    pub fn short_schedule(&self) -> Vec<usize> {
        let k = self.tips.len();
        // pendant[k-2] sits k-1 steps from the last tip and from the terminal
        let mut seq = vec![self.hub, self.pendant[k - 2]];
        seq.extend(&self.tips[..k - 1]);
        seq
    }
}

/// Tightness gadget for the general-graph greedy: a hub with `k` spokes of
/// `k + 1` edges ending in tips, plus a pendant path of `2k - 2` edges hung
/// off the last tip. Tips are pairwise `2k + 2` apart.
pub fn gadget(k: usize) -> Result<Gadget, GenError> {
    if k < 2 {
        return Err(GenError::GadgetSize(k));
    }
    let spoke = k + 1;
    let n = 1 + k * spoke + (2 * k - 2);
    let hub = 0;
    let mut edges = Vec::with_capacity(n);
    let mut tips = Vec::with_capacity(k);
    let mut next = 1;
    for _ in 0..k {
        let mut prev = hub;
        for _ in 0..spoke {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        tips.push(prev);
    }
    let mut pendant = Vec::with_capacity(2 * k - 2);
    let mut prev = *tips.last().unwrap();
    for _ in 0..2 * k - 2 {
        edges.push((prev, next));
        pendant.push(next);
        prev = next;
        next += 1;
    }
    debug_assert_eq!(next, n);
    Ok(Gadget { graph: Graph::from_edges(n, edges), hub, tips, terminal: prev, pendant })
}

/// Deterministic instance for `(spec, seed)`.
pub fn gen_instance(spec: &GenSpec, seed: u64) -> Result<Graph, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *spec {
        GenSpec::Gnp { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(GenError::Probability(p));
            }
            Ok(gnp(n, p, &mut rng))
        }
        GenSpec::RandomTree { n } => Ok(random_tree(n, &mut rng)),
        GenSpec::Paths { b, min_len, max_len } => {
            if b == 0 {
                return Err(GenError::NoPaths);
            }
            if min_len == 0 || min_len > max_len {
                return Err(GenError::LengthRange { min: min_len, max: max_len });
            }
            let lengths = (0..b).map(|_| rng.gen_range(min_len..=max_len)).collect();
            Ok(expand_forest(&PathForest::new(lengths).expect("lengths are positive")))
        }
        GenSpec::Gadget { k } => gadget(k).map(|g| g.graph),
    }
}

/// G(n, p) by geometric skipping over the lower triangle, O(n + m).
fn gnp(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    if n < 2 || p <= 0.0 {
        return Graph::empty(n);
    }
    if p >= 1.0 {
        return Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))));
    }
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    // walk pairs (v, w) with w < v
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.gen::<f64>();
        let skip = ((1.0 - r).ln() / log_q).floor() as i64;
        w += 1 + skip;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Graph::from_edges(n, edges)
}

/// Random recursive tree with shuffled labels.
fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let edges: Vec<_> = (1..n).map(|i| (labels[rng.gen_range(0..i)], labels[i])).collect();
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        expand_forest(&PathForest::new(vec![n]).unwrap())
    }

    #[test]
    fn parse_examples() {
        let g = parse_graph("n 3\n0 1\n1 2").unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        let g = parse_graph("n 1").unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
        let g = parse_graph("0 1\n0 1\n1 0").unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
    }

    #[test]
    fn parse_accepts_crlf_and_comments() {
        let g = parse_graph("# header\r\nn 4\r\n0 1\r\n# mid\r\n2 3\r\n").unwrap();
        assert_eq!((g.n(), g.m()), (4, 2));
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert_eq!(
            parse_graph("n 3\n0 1\n1 x").unwrap_err(),
            ParseError::Malformed { line: 3, text: "x".into() }
        );
        assert_eq!(parse_graph("0 -1").unwrap_err(), ParseError::NegativeIndex { line: 1 });
        assert_eq!(
            parse_graph("n 2\n0 2").unwrap_err(),
            ParseError::OutOfRange { line: 2, index: 2, n: 2 }
        );
        assert_eq!(parse_graph("n 3\n1 1").unwrap_err(), ParseError::SelfLoop { line: 2, vertex: 1 });
        assert!(matches!(parse_graph("0 1 2"), Err(ParseError::Malformed { line: 1, .. })));
    }

    #[test]
    fn parse_forest_examples() {
        assert_eq!(parse_path_forest("paths 9").unwrap().lengths(), &[9]);
        assert_eq!(parse_path_forest("paths 4 1 3").unwrap().lengths(), &[1, 3, 4]);
        assert!(matches!(parse_path_forest("paths 0 2"), Err(ParseError::InvalidLength { .. })));
        assert!(matches!(parse_path_forest("paths"), Err(ParseError::EmptyForest)));
        assert!(matches!(parse_path_forest("paths -2"), Err(ParseError::InvalidLength { .. })));
    }

    #[test]
    fn expand_layout() {
        let g = path(3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let g = expand_forest(&PathForest::new(vec![1, 1]).unwrap());
        assert_eq!((g.n(), g.m()), (2, 0));
        let g = expand_forest(&PathForest::new(vec![3, 2]).unwrap());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 3), (3, 4)]);
    }

    #[test]
    fn bfs_examples() {
        let g = path(3);
        assert_eq!(bfs_distances(&g, 0, None), vec![Some(0), Some(1), Some(2)]);
        assert_eq!(bfs_distances(&g, 0, Some(1)), vec![Some(0), Some(1), None]);
        let g = expand_forest(&PathForest::new(vec![2, 2]).unwrap());
        assert_eq!(bfs_distances(&g, 0, None), vec![Some(0), Some(1), None, None]);
    }

    #[test]
    fn classify_examples() {
        let g = expand_forest(&PathForest::new(vec![3, 4]).unwrap());
        assert_eq!(classify(&g), GraphShape { kind: ShapeKind::PathForest, component_count: 2 });
        let star = Graph::from_edges(5, (1..5).map(|v| (0, v)));
        assert_eq!(classify(&star).kind, ShapeKind::SingleTree);
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        assert_eq!(classify(&tri).kind, ShapeKind::General);
        let two_stars = Graph::from_edges(8, (1..4).map(|v| (0, v)).chain((5..8).map(|v| (4, v))));
        assert_eq!(classify(&two_stars), GraphShape { kind: ShapeKind::ForestOfTrees, component_count: 2 });
    }

    #[test]
    fn path_components_roundtrip() {
        let g = Graph::from_edges(6, [(5, 2), (2, 0), (1, 4)]);
        let mut paths = g.path_components().unwrap();
        paths.sort();
        assert_eq!(paths, vec![vec![0, 2, 5], vec![1, 4], vec![3]]);
        let cycle = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(cycle.path_components().is_none());
    }

    #[test]
    fn gadget_shape() {
        for k in 2..=10 {
            let gd = gadget(k).unwrap();
            assert_eq!(gd.graph.n(), 1 + k * (k + 1) + 2 * k - 2);
            let from_hub = bfs_distances(&gd.graph, gd.hub, None);
            for (i, &c) in gd.tips.iter().enumerate() {
                assert_eq!(from_hub[c], Some(k + 1));
                let d = bfs_distances(&gd.graph, c, None);
                for &c2 in &gd.tips[i + 1..] {
                    assert_eq!(d[c2], Some(2 * k + 2));
                }
            }
            let last = *gd.tips.last().unwrap();
            assert_eq!(bfs_distances(&gd.graph, last, None)[gd.terminal], Some(2 * k - 2));
        }
        assert!(matches!(gadget(1), Err(GenError::GadgetSize(1))));
    }

    #[test]
    fn generators_are_deterministic_and_valid() {
        assert_eq!(gen_instance(&GenSpec::Gnp { n: 10, p: 0.0 }, 1).unwrap().m(), 0);
        let a = gen_instance(&GenSpec::Gnp { n: 200, p: 0.05 }, 7).unwrap();
        let b = gen_instance(&GenSpec::Gnp { n: 200, p: 0.05 }, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.m() > 0);
        assert!(gen_instance(&GenSpec::Gnp { n: 3, p: 1.5 }, 0).is_err());
        assert!(gen_instance(&GenSpec::Paths { b: 2, min_len: 3, max_len: 2 }, 0).is_err());
        let t = gen_instance(&GenSpec::RandomTree { n: 30 }, 3).unwrap();
        assert_eq!(classify(&t).kind, ShapeKind::SingleTree);
        let p = gen_instance(&GenSpec::Paths { b: 4, min_len: 1, max_len: 6 }, 5).unwrap();
        assert_eq!(classify(&p).kind, ShapeKind::PathForest);
    }

    #[test]
    fn gnp_complete_and_density() {
        let g = gen_instance(&GenSpec::Gnp { n: 6, p: 1.0 }, 0).unwrap();
        assert_eq!(g.m(), 15);
        let g = gen_instance(&GenSpec::Gnp { n: 2000, p: 0.01 }, 11).unwrap();
        let expected = 0.01 * 2000.0 * 1999.0 / 2.0;
        assert!((g.m() as f64 - expected).abs() < 0.1 * expected, "m = {}", g.m());
    }
}
