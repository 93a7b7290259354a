use super::{CombinatorialMap, MapClass};
use std::fmt;

/// Multigraph obtained by forgetting the dart structure of a map.
///
/// Vertices `0..n_external` are the externals in order, the rest internal.
/// The edge list is canonical: internal vertices are relabeled to give the
/// lexicographically smallest sorted edge list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbstractGraph {
    pub n_external: usize,
    pub n_internal: usize,
    pub edges: Vec<(usize, usize)>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

impl AbstractGraph {
    pub fn from_edges(n_external: usize, n_internal: usize, edges: &[(usize, usize)]) -> Self {
        let mut best: Option<Vec<(usize, usize)>> = None;
        for perm in permutations(n_internal) {
            let relabel = |v: usize| if v < n_external { v } else { n_external + perm[v - n_external] };
            let mut list: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(a, b)| {
                    let (a, b) = (relabel(a), relabel(b));
                    (a.min(b), a.max(b))
                })
                .collect();
            list.sort_unstable();
            if best.as_ref().is_none_or(|b| list < *b) {
                best = Some(list);
            }
        }
        Self {
            n_external,
            n_internal,
            edges: best.unwrap_or_default(),
        }
    }

    /// Parses a list like `x1z1, z1z1, z1x2` (externals `x`, internals `z`, 1-based).
    pub fn parse_compact(n_external: usize, n_internal: usize, text: &str) -> Option<Self> {
        let vertex = |s: &str| -> Option<(usize, usize)> {
            let kind = s.chars().next()?;
            let digits: String = s[1..].chars().take_while(char::is_ascii_digit).collect();
            let idx: usize = digits.parse().ok()?;
            let v = match kind {
                'x' if (1..=n_external).contains(&idx) => idx - 1,
                'z' if (1..=n_internal).contains(&idx) => n_external + idx - 1,
                _ => return None,
            };
            Some((v, 1 + digits.len()))
        };
        let mut edges = Vec::new();
        for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (a, used) = vertex(tok)?;
            let (b, used2) = vertex(&tok[used..])?;
            if used + used2 != tok.len() {
                return None;
            }
            edges.push((a, b));
        }
        Some(Self::from_edges(n_external, n_internal, &edges))
    }
}

impl fmt::Display for AbstractGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: usize| {
            if v < self.n_external {
                format!("x{}", v + 1)
            } else {
                format!("z{}", v - self.n_external + 1)
            }
        };
        let parts: Vec<String> = self
            .edges
            .iter()
            .map(|&(a, b)| format!("{}{}", name(a), name(b)))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl CombinatorialMap {
    pub fn to_abstract_graph(&self) -> AbstractGraph {
        let of = self.vertex_of();
        let edges: Vec<(usize, usize)> = self.edges().iter().map(|&(a, b)| (of[a], of[b])).collect();
        AbstractGraph::from_edges(self.n_external(), self.internal_count(), &edges)
    }
}

/// Number of unlabeled maps among `classes` whose abstract graph is `graph`.
pub fn count_embeddings(graph: &AbstractGraph, classes: &[MapClass]) -> usize {
    classes
        .iter()
        .filter(|c| c.map.to_abstract_graph() == *graph)
        .count()
}
