use super::StochasticError;
use crate::maps::CombinatorialMap;
use crate::operator::ForestPoset;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

/// Tree edges `(parent dart, child dart)` rooted at the externals, plus the
/// remaining edges as unoriented noise edges `(a, b)` with `a < b`.
///
/// Tree edges are kept in breadth-first order from the externals, so every
/// parent appears before its children; the child dart is the child's first dart.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpanningForest {
    tree_edges: Vec<(usize, usize)>,
    noise_edges: Vec<(usize, usize)>,
}

impl SpanningForest {
    /// Builds the forest from its tree edges; nothing is validated here.
    pub fn new(map: &CombinatorialMap, tree_edges: Vec<(usize, usize)>) -> Self {
        let of = map.vertex_of();
        let mut sorted = tree_edges;
        sorted.sort_unstable();
        sorted.dedup();
        let mut used = vec![false; sorted.len()];
        let mut ordered = Vec::with_capacity(sorted.len());
        let mut queue: VecDeque<usize> = (0..map.n_external()).collect();
        while let Some(v) = queue.pop_front() {
            for (i, &(a, b)) in sorted.iter().enumerate() {
                if !used[i] && of[a] == v {
                    used[i] = true;
                    ordered.push((a, b));
                    queue.push_back(of[b]);
                }
            }
        }
        for (i, &e) in sorted.iter().enumerate() {
            if !used[i] {
                ordered.push(e);
            }
        }
        let tree: BTreeSet<(usize, usize)> = ordered.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let noise_edges = map.edges().into_iter().filter(|e| !tree.contains(e)).collect();
        Self {
            tree_edges: ordered,
            noise_edges,
        }
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    pub fn noise_edges(&self) -> &[(usize, usize)] {
        &self.noise_edges
    }

    /// Sorted tree edges; two forests are equal iff their keys are.
    pub fn key(&self) -> Vec<(usize, usize)> {
        let mut k = self.tree_edges.clone();
        k.sort_unstable();
        k
    }

    pub fn validate(&self, map: &CombinatorialMap) -> Result<(), StochasticError> {
        let bad = |m: String| Err(StochasticError::NotSpanning(m));
        let d = map.dart_count();
        let of = map.vertex_of();
        let n_ext = map.n_external();
        let mut parent_of = vec![None; map.vertices().len()];
        for &(a, b) in &self.tree_edges {
            if a >= d || b >= d || map.alpha()[a] != b {
                return bad(format!("({a}, {b}) is not an edge"));
            }
            if of[b] < n_ext {
                return bad(format!("tree edge ({a}, {b}) points into an external vertex"));
            }
            if of[a] == of[b] {
                return bad(format!("tree edge ({a}, {b}) is a loop"));
            }
            if parent_of[of[b]].replace(of[a]).is_some() {
                return bad(format!("vertex of dart {b} has two parents"));
            }
        }
        for v in n_ext..parent_of.len() {
            let mut cur = v;
            let mut steps = 0;
            while cur >= n_ext {
                match parent_of[cur] {
                    Some(p) if steps <= parent_of.len() => {
                        cur = p;
                        steps += 1;
                    }
                    Some(_) => return bad("tree edges contain a cycle".into()),
                    None => return bad(format!("internal vertex {v} is not reached from an external")),
                }
            }
        }
        Ok(())
    }

    /// Tree order on internal vertices (index = vertex index − number of externals).
    pub fn poset(&self, map: &CombinatorialMap) -> ForestPoset {
        let of = map.vertex_of();
        let n_ext = map.n_external();
        let mut parent = vec![None; map.internal_count()];
        for &(a, b) in &self.tree_edges {
            parent[of[b] - n_ext] = of[a].checked_sub(n_ext);
        }
        ForestPoset::new(parent).expect("validated forests are acyclic")
    }
}

impl fmt::Display for SpanningForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tree: Vec<String> = self.tree_edges.iter().map(|(a, b)| format!("{a}>{b}")).collect();
        let noise: Vec<String> = self.noise_edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "T[{}] N[{}]", tree.join(" "), noise.join(" "))
    }
}

/// Every run of the step-by-step procedure: starting from the externals, add one
/// new vertex per step through an edge from the vertices already placed.
/// Returns the tree edges of each run in step order.
pub fn choice_sequences(map: &CombinatorialMap) -> Vec<Vec<(usize, usize)>> {
    let mut placed = vec![false; map.vertices().len()];
    for p in placed.iter_mut().take(map.n_external()) {
        *p = true;
    }
    sequences_from(map, placed)
}

fn sequences_from(map: &CombinatorialMap, placed: Vec<bool>) -> Vec<Vec<(usize, usize)>> {
    struct State<'a> {
        alpha: &'a [usize],
        of: Vec<usize>,
        placed: Vec<bool>,
        noise: BTreeSet<(usize, usize)>,
        steps: Vec<(usize, usize)>,
        out: Vec<Vec<(usize, usize)>>,
    }
    fn norm(a: usize, b: usize) -> (usize, usize) {
        (a.min(b), a.max(b))
    }
    fn rec(s: &mut State<'_>, remaining: usize) {
        if remaining == 0 {
            s.out.push(s.steps.clone());
            return;
        }
        let d = s.alpha.len();
        for h in 0..d {
            let w = s.of[s.alpha[h]];
            if !s.placed[s.of[h]] || s.placed[w] || s.noise.contains(&norm(h, s.alpha[h])) {
                continue;
            }
            let entry = s.alpha[h];
            s.placed[w] = true;
            s.steps.push((h, entry));
            // non-tree edges from the new vertex into placed vertices, loops included
            let added: Vec<(usize, usize)> = (0..d)
                .filter(|&g| s.of[g] == w && g != entry && s.placed[s.of[s.alpha[g]]])
                .map(|g| norm(g, s.alpha[g]))
                .filter(|e| !s.noise.contains(e))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            for &e in &added {
                s.noise.insert(e);
            }
            rec(s, remaining - 1);
            for e in &added {
                s.noise.remove(e);
            }
            s.steps.pop();
            s.placed[w] = false;
        }
    }
    let of = map.vertex_of();
    let remaining = placed.iter().filter(|&&p| !p).count();
    // step 0: edges joining placed vertices directly are noise
    let noise = map
        .edges()
        .into_iter()
        .filter(|&(a, b)| placed[of[a]] && placed[of[b]])
        .collect();
    let mut s = State {
        alpha: map.alpha(),
        of,
        placed,
        noise,
        steps: Vec::new(),
        out: Vec::new(),
    };
    rec(&mut s, remaining);
    s.out
}

fn dedup_forests(map: &CombinatorialMap, sequences: Vec<Vec<(usize, usize)>>) -> Vec<SpanningForest> {
    let keys: BTreeSet<Vec<(usize, usize)>> = sequences
        .into_iter()
        .map(|mut s| {
            s.sort_unstable();
            s
        })
        .collect();
    keys.into_iter().map(|k| SpanningForest::new(map, k)).collect()
}

/// Distinct forests over all choice sequences of the whole map.
pub fn enumerate_spanning_forests_monolithic(map: &CombinatorialMap) -> Vec<SpanningForest> {
    dedup_forests(map, choice_sequences(map))
}

/// Distinct spanning forests, sorted by key.
///
/// The procedure runs on each connected component separately and the
/// results are combined as a product.
pub fn enumerate_spanning_forests(map: &CombinatorialMap) -> Vec<SpanningForest> {
    let of = map.vertex_of();
    let comp = map.component_of();
    let nv = map.vertices().len();
    let mut vertex_comp = vec![0; nv];
    for h in 0..map.dart_count() {
        vertex_comp[of[h]] = comp[h];
    }
    let labels: BTreeSet<usize> = vertex_comp.iter().copied().collect();
    let mut partial: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for c in labels {
        let placed: Vec<bool> = (0..nv)
            .map(|v| v < map.n_external() || vertex_comp[v] != c)
            .collect();
        let mut keys: Vec<Vec<(usize, usize)>> = sequences_from(map, placed)
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        partial = partial
            .iter()
            .flat_map(|p| {
                keys.iter().map(move |k| {
                    let mut e = p.clone();
                    e.extend_from_slice(k);
                    e
                })
            })
            .collect();
    }
    dedup_forests(map, partial)
}

/// Independent enumeration: every internal vertex picks one incoming edge;
/// keep the choices where all parent chains end at an external.
pub fn enumerate_forests_by_parents(map: &CombinatorialMap) -> Vec<SpanningForest> {
    let of = map.vertex_of();
    let alpha = map.alpha();
    let vertices = map.vertices();
    let n_ext = map.n_external();
    let options: Vec<Vec<(usize, usize)>> = vertices[n_ext..]
        .iter()
        .map(|cycle| {
            cycle
                .iter()
                .filter(|&&h| of[alpha[h]] != of[h])
                .map(|&h| (alpha[h], h))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; options.len()];
    if options.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let edges: Vec<(usize, usize)> = pick.iter().zip(&options).map(|(&i, o)| o[i]).collect();
        let forest = SpanningForest::new(map, edges);
        if forest.validate(map).is_ok() {
            out.push(forest);
        }
        let mut i = 0;
        loop {
            if i == pick.len() {
                out.sort_by_key(SpanningForest::key);
                return out;
            }
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Choice sequences grouped by the vertices they join at each step.
///
/// Each group is one term of the step-by-step Taylor interpolation when
/// parallel edges are not told apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaylorTerm {
    /// `(parent vertex, child vertex)` per step, vertices as in [`CombinatorialMap::vertices`].
    pub steps: Vec<(usize, usize)>,
    /// Dart-level tree edges of each member sequence, in step order.
    pub sequences: Vec<Vec<(usize, usize)>>,
    n_external: usize,
}

impl TaylorTerm {
    pub fn multiplicity(&self) -> usize {
        self.sequences.len()
    }
}

impl fmt::Display for TaylorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: usize| {
            if v < self.n_external {
                format!("x{}", v + 1)
            } else {
                format!("z{}", v - self.n_external + 1)
            }
        };
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|&(a, b)| format!("{}>{}", name(a), name(b)))
            .collect();
        write!(f, "{} [{}]", parts.join(" "), self.multiplicity())
    }
}

pub fn taylor_terms(map: &CombinatorialMap) -> Vec<TaylorTerm> {
    let of = map.vertex_of();
    let mut groups: BTreeMap<Vec<(usize, usize)>, Vec<Vec<(usize, usize)>>> = BTreeMap::new();
    for seq in choice_sequences(map) {
        let steps = seq.iter().map(|&(a, b)| (of[a], of[b])).collect();
        groups.entry(steps).or_default().push(seq);
    }
    groups
        .into_iter()
        .map(|(steps, sequences)| TaylorTerm {
            steps,
            sequences,
            n_external: map.n_external(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{enumerate_maps, EnumerateOptions};

    fn single_edge() -> CombinatorialMap {
        CombinatorialMap::from_cycles(2, &[], &[(0, 1)], vec![0, 1]).unwrap()
    }

    fn tadpole() -> CombinatorialMap {
        CombinatorialMap::from_cycles(6, &[vec![2, 3, 4, 5]], &[(0, 2), (3, 4), (5, 1)], vec![0, 1]).unwrap()
    }

    fn sunset() -> CombinatorialMap {
        CombinatorialMap::from_cycles(
            10,
            &[vec![2, 3, 4, 5], vec![6, 7, 8, 9]],
            &[(0, 2), (3, 6), (4, 7), (5, 8), (9, 1)],
            vec![0, 1],
        )
        .unwrap()
    }

    #[test]
    fn single_edge_has_one_empty_forest() {
        let f = enumerate_spanning_forests(&single_edge());
        assert_eq!(f.len(), 1);
        assert!(f[0].tree_edges().is_empty());
        assert_eq!(f[0].noise_edges(), &[(0, 1)]);
    }

    #[test]
    fn tadpole_has_left_and_right_forests() {
        let f = enumerate_spanning_forests(&tadpole());
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].tree_edges(), &[(0, 2)]);
        assert_eq!(f[0].noise_edges(), &[(1, 5), (3, 4)]);
        assert_eq!(f[1].tree_edges(), &[(1, 5)]);
    }

    #[test]
    fn sunset_forests_and_taylor_terms() {
        let m = sunset();
        assert_eq!(enumerate_spanning_forests(&m).len(), 7);
        assert_eq!(choice_sequences(&m).len(), 8);
        let terms = taylor_terms(&m);
        assert_eq!(terms.len(), 4);
        let mut mult: Vec<usize> = terms.iter().map(TaylorTerm::multiplicity).collect();
        mult.sort_unstable();
        assert_eq!(mult, vec![1, 1, 3, 3]);
        assert_eq!(terms[0].to_string(), "x1>z1 x2>z2 [1]");
    }

    #[test]
    fn three_enumerations_agree() {
        let mut maps = Vec::new();
        for (n, deg, pmax) in [(2, vec![4], 3), (1, vec![3], 3), (2, vec![3], 2), (2, vec![3, 4], 2), (4, vec![4], 1)] {
            for p in 0..=pmax {
                for c in enumerate_maps(&EnumerateOptions::new(n, deg.clone(), p)).unwrap_or_default() {
                    maps.push(c.map);
                }
            }
        }
        let disconnected = maps.iter().filter(|m| !m.is_connected()).count();
        assert!(disconnected > 0);
        for m in &maps {
            let a = enumerate_spanning_forests(m);
            let b = enumerate_spanning_forests_monolithic(m);
            let c = enumerate_forests_by_parents(m);
            assert!(!a.is_empty());
            assert_eq!(a, b, "{m}");
            assert_eq!(a, c, "{m}");
            for f in &a {
                f.validate(m).unwrap();
                assert_eq!(f.tree_edges().len(), m.internal_count());
                assert_eq!(f.tree_edges().len() + f.noise_edges().len(), m.edges().len());
            }
            // each forest arises from as many sequences as its tree order has linear extensions
            let seqs = choice_sequences(m);
            let total: usize = a.iter().map(|f| f.poset(m).linear_extensions().len()).sum();
            assert_eq!(seqs.len(), total);
        }
    }

    #[test]
    fn validate_rejects_non_forests() {
        let m = sunset();
        let err = |edges: Vec<(usize, usize)>| SpanningForest::new(&m, edges).validate(&m).unwrap_err();
        assert!(matches!(err(vec![(0, 2)]), StochasticError::NotSpanning(_)));
        assert!(matches!(err(vec![(0, 2), (0, 3)]), StochasticError::NotSpanning(_)));
        assert!(matches!(err(vec![(3, 6), (7, 4)]), StochasticError::NotSpanning(_)));
        assert!(matches!(err(vec![(2, 0), (9, 1)]), StochasticError::NotSpanning(_)));
    }
}
