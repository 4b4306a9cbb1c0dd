//! Vertex-cover-to-tokenization instance construction, usable both as a
//! generator of structured instances and as an executable equivalence
//! check: a graph has a vertex cover of size `k` exactly when the derived
//! instance admits `k` tokens reaching the partition threshold.
//!
//! The construction works over synthetic symbol ids rather than bytes:
//! vertex `i` becomes symbol `i`, and symbol `0` is a separator. Each edge
//! `{i, j}` becomes the five-symbol word `(0, i, 0, j, 0)`; the candidates
//! are `(0, i, 0)` for every vertex.

use std::fs;
use std::path::Path;

use crate::baselines::exhaustive_best_subset;
use crate::error::{Error, Result};

/// Largest vertex count accepted by the brute-force equivalence check.
pub const EQUIVALENCE_MAX_VERTICES: usize = 12;

/// Simple undirected graph on vertices `1..=n`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Edges are normalized to `i < j`; self loops and duplicates are
    /// rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::parse("<graph>", 0, "self loop"));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if i < 1 || j as usize > n {
                return Err(Error::parse("<graph>", 0, "vertex out of range"));
            }
            normalized.push((i, j));
        }
        normalized.sort_unstable();
        let before = normalized.len();
        normalized.dedup();
        if normalized.len() != before {
            return Err(Error::parse("<graph>", 0, "duplicate edge"));
        }
        Ok(Graph {
            n,
            edges: normalized,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Edge-list file: first line the vertex count, then one `i j` line per
    /// edge (1-based).
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "missing vertex count"))?;
        let n: usize = first
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, 1, "invalid vertex count"))?;
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let mut it = line.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::parse(path, lineno + 1, "expected `i j`"));
            };
            let a: u32 = a
                .parse()
                .map_err(|_| Error::parse(path, lineno + 1, "invalid vertex"))?;
            let b: u32 = b
                .parse()
                .map_err(|_| Error::parse(path, lineno + 1, "invalid vertex"))?;
            edges.push((a, b));
        }
        Graph::new(n, edges).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::parse(path, 0, msg),
            other => other,
        })
    }

    /// Does any vertex subset of size at most `k` touch every edge?
    /// Exhaustive search, for small graphs.
    pub fn has_vertex_cover(&self, k: usize) -> bool {
        fn covers(edges: &[(u32, u32)], chosen: &[u32]) -> bool {
            edges
                .iter()
                .all(|&(i, j)| chosen.contains(&i) || chosen.contains(&j))
        }
        fn recurse(n: usize, edges: &[(u32, u32)], k: usize, start: u32, stack: &mut Vec<u32>) -> bool {
            if covers(edges, stack) {
                return true;
            }
            if stack.len() == k {
                return false;
            }
            for v in start..=n as u32 {
                stack.push(v);
                if recurse(n, edges, k, v + 1, stack) {
                    return true;
                }
                stack.pop();
            }
            false
        }
        recurse(self.n, &self.edges, k, 1, &mut Vec::new())
    }
}

/// A tokenization instance over synthetic symbols.
#[derive(Debug, Clone)]
pub struct TokInstance {
    /// Vertex symbols plus the separator.
    pub alphabet_size: usize,
    /// One five-symbol word per edge, each with count 1.
    pub words: Vec<(Vec<u32>, u64)>,
    /// One candidate per vertex.
    pub candidates: Vec<Vec<u32>>,
    /// Total-partition threshold for the decision problem: three tokens per
    /// word.
    pub threshold: u64,
}

/// Build the tokenization instance derived from a graph.
pub fn graph_to_tok(graph: &Graph) -> TokInstance {
    const SEP: u32 = 0;
    let words = graph
        .edges()
        .iter()
        .map(|&(i, j)| (vec![SEP, i, SEP, j, SEP], 1))
        .collect();
    let candidates = (1..=graph.vertex_count() as u32)
        .map(|i| vec![SEP, i, SEP])
        .collect();
    TokInstance {
        alphabet_size: graph.vertex_count() + 1,
        words,
        candidates,
        threshold: 3 * graph.edges().len() as u64,
    }
}

impl TokInstance {
    /// Best objective over all candidate subsets of size at most `k`, and
    /// the corresponding total partition count.
    pub fn brute_force(&self, k: usize) -> (u64, u64) {
        let words: Vec<&[u32]> = self.words.iter().map(|(w, _)| w.as_slice()).collect();
        let counts: Vec<u64> = self.words.iter().map(|&(_, c)| c).collect();
        let (_, objective) = exhaustive_best_subset(&words, &counts, &self.candidates, k);
        let total_symbols: u64 = self
            .words
            .iter()
            .map(|(w, c)| c * w.len() as u64)
            .sum();
        (objective, total_symbols - objective)
    }

    /// Does some subset of at most `k` candidates reach the threshold?
    pub fn decide(&self, k: usize) -> bool {
        self.brute_force(k).1 <= self.threshold
    }
}

/// Decide both sides — vertex cover on the graph, tokenization on the
/// derived instance — by brute force. The two answers agree; callers may
/// assert so.
pub fn check_equivalence(graph: &Graph, k: usize) -> Result<(bool, bool)> {
    if graph.vertex_count() > EQUIVALENCE_MAX_VERTICES {
        return Err(Error::ReductionGuard {
            vertices: graph.vertex_count(),
            limit: EQUIVALENCE_MAX_VERTICES,
        });
    }
    let vc_yes = graph.has_vertex_cover(k);
    let tok_yes = graph_to_tok(graph).decide(k);
    Ok((vc_yes, tok_yes))
}

/// The 5-vertex, 6-edge example graph whose derived instance has threshold
/// 18 and smallest cover {1, 3, 4}.
pub fn example_graph() -> Graph {
    Graph::new(5, [(1, 2), (1, 4), (1, 5), (2, 3), (2, 4), (3, 5)]).unwrap()
}
