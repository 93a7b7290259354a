use super::CombinatorialMap;
use crate::stochastic::SpanningForest;

/// Depth-first "keep to the right" spanning tree.
///
/// At each vertex the darts are scanned in rotation order starting after the
/// entering dart; the first edge leading to an unvisited vertex is taken and
/// the walk continues from its far end, backtracking when nothing is left.
/// Disconnected maps get one tree per component, grown from its first external.
pub fn keep_to_right_tree(map: &CombinatorialMap) -> SpanningForest {
    let of = map.vertex_of();
    let mut visited = vec![false; map.vertices().len()];
    let mut edges = Vec::new();
    for (i, &root) in map.externals().iter().enumerate() {
        if visited[i] {
            continue;
        }
        visited[i] = true;
        grow(map, &of, root, true, &mut visited, &mut edges);
    }
    SpanningForest::new(map, edges)
}

fn grow(
    map: &CombinatorialMap,
    of: &[usize],
    entry: usize,
    is_root: bool,
    visited: &mut [bool],
    edges: &mut Vec<(usize, usize)>,
) {
    let sigma = map.sigma();
    let mut darts = Vec::new();
    if is_root {
        darts.push(entry);
    } else {
        let mut h = sigma[entry];
        while h != entry {
            darts.push(h);
            h = sigma[h];
        }
    }
    for h in darts {
        let far = map.alpha()[h];
        if !visited[of[far]] {
            visited[of[far]] = true;
            edges.push((h, far));
            grow(map, of, far, false, visited, edges);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{enumerate_maps, EnumerateOptions};
    use super::*;

    fn assert_spanning_tree(map: &CombinatorialMap, forest: &SpanningForest) {
        let of = map.vertex_of();
        let nv = map.vertices().len();
        assert_eq!(forest.tree_edges().len(), nv - 1);
        let mut reached = vec![false; nv];
        reached[0] = true;
        for &(parent, child) in forest.tree_edges() {
            assert!(reached[of[parent]], "edges must be listed parent first");
            assert!(!reached[of[child]], "cycle through {child}");
            reached[of[child]] = true;
        }
        assert!(reached.iter().all(|&r| r));
        let root = map.externals()[0];
        assert_eq!(forest.tree_edges()[0], (root, map.alpha()[root]));
    }

    #[test]
    fn single_edge_tree_is_the_edge() {
        let m = single_edge();
        let t = keep_to_right_tree(&m);
        assert_eq!(t.tree_edges(), &[(0, 1)]);
        assert!(t.noise_edges().is_empty());
    }

    #[test]
    fn cubic_tadpole_drops_the_loop() {
        let m = CombinatorialMap::from_cycles(4, &[vec![1, 2, 3]], &[(0, 1), (2, 3)], vec![0]).unwrap();
        let t = keep_to_right_tree(&m);
        assert_eq!(t.tree_edges(), &[(0, 1)]);
        assert_eq!(t.noise_edges(), &[(2, 3)]);
    }

    #[test]
    fn example_map_walk() {
        let m = example_map();
        let t = keep_to_right_tree(&m);
        assert_spanning_tree(&m, &t);
        // from v¹ the walk takes v² to w¹, then from w¹ it continues to w²
        // (edge to u²), and reaches no further vertices
        assert_eq!(t.tree_edges(), &[(0, 1), (2, 5), (6, 9)]);
    }

    #[test]
    fn cubic_one_point_maps_up_to_three_vertices() {
        for p in [1, 3] {
            for c in enumerate_maps(&EnumerateOptions::new(1, vec![3], p).connected()).unwrap() {
                assert_spanning_tree(&c.map, &keep_to_right_tree(&c.map));
            }
        }
    }
}
