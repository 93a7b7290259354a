use crate::Rational;
use num_traits::One;

/// Tree order on internal vertices: `parent[v] = None` hangs `v` from a root
/// sitting at the shared top time. Ancestors carry later times.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ForestPoset {
    parent: Vec<Option<usize>>,
}

impl ForestPoset {
    /// Returns `None` if the parent pointers contain a cycle or point out of range.
    pub fn new(parent: Vec<Option<usize>>) -> Option<Self> {
        let n = parent.len();
        for start in 0..n {
            let mut v = start;
            let mut steps = 0;
            while let Some(p) = parent[v] {
                if p >= n || steps > n {
                    return None;
                }
                v = p;
                steps += 1;
            }
            if steps > n {
                return None;
            }
        }
        Some(Self { parent })
    }

    /// A chain `0 > 1 > … > p-1` hanging from the top.
    pub fn chain(p: usize) -> Self {
        Self::new((0..p).map(|v| v.checked_sub(1)).collect()).expect("chain is acyclic")
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&w| self.parent[w] == Some(v))
    }

    /// Size of the subtree rooted at each vertex (the hook lengths).
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let n = self.len();
        let mut sizes = vec![1; n];
        for v in 0..n {
            let mut cur = self.parent[v];
            while let Some(p) = cur {
                sizes[p] += 1;
                cur = self.parent[p];
            }
        }
        sizes
    }

    /// All total orders (latest time first) compatible with the tree order.
    pub fn linear_extensions(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out = Vec::new();
        let mut placed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        self.extend(&mut placed, &mut order, &mut out);
        out
    }

    fn extend(&self, placed: &mut [bool], order: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if order.len() == self.len() {
            out.push(order.clone());
            return;
        }
        for v in 0..self.len() {
            if placed[v] {
                continue;
            }
            if self.parent[v].is_some_and(|p| !placed[p]) {
                continue;
            }
            placed[v] = true;
            order.push(v);
            self.extend(placed, order, out);
            order.pop();
            placed[v] = false;
        }
    }
}

/// Volume constant `c` with `vol{0 ≤ t_w ≤ t_v ≤ t for w below v} = c·t^p`.
///
/// Hook-length product `Π_v 1/|subtree(v)|`.
pub fn simplex_integral_bounded(poset: &ForestPoset) -> Rational {
    poset
        .subtree_sizes()
        .into_iter()
        .fold(Rational::one(), |acc, h| acc / Rational::from_integer(h as i64))
}

pub fn simplex_integral_value(poset: &ForestPoset, t: f64) -> f64 {
    let c = simplex_integral_bounded(poset);
    (*c.numer() as f64 / *c.denom() as f64) * t.powi(poset.len() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> i64 {
        (1..=n as i64).product()
    }

    #[test]
    fn plane_tree_table() {
        let r = |n, d| Rational::new(n, d);
        let table = [
            (vec![None], r(1, 1)),
            (vec![None, Some(0)], r(1, 2)),
            (vec![None, Some(0), Some(1)], r(1, 6)),
            (vec![None, Some(0), Some(0)], r(1, 3)),
            (vec![None, Some(0), Some(1), Some(2)], r(1, 24)),
            (vec![None, Some(0), Some(1), Some(1)], r(1, 12)),
            (vec![None, Some(0), Some(0), Some(2)], r(1, 8)),
            (vec![None, Some(0), Some(0), Some(0)], r(1, 4)),
        ];
        for (parents, expected) in table {
            let poset = ForestPoset::new(parents).unwrap();
            assert_eq!(simplex_integral_bounded(&poset), expected);
            let count = poset.linear_extensions().len() as i64;
            assert_eq!(
                Rational::new(count, factorial(poset.len())),
                expected,
                "extension count disagrees with hook product"
            );
        }
        let chain = ForestPoset::chain(3);
        assert!((simplex_integral_value(&chain, 2.0) - 8.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn forests_with_several_tops() {
        let poset = ForestPoset::new(vec![None, None]).unwrap();
        assert_eq!(poset.linear_extensions().len(), 2);
        assert_eq!(simplex_integral_bounded(&poset), Rational::one());
    }

    #[test]
    fn rejects_cycles() {
        assert!(ForestPoset::new(vec![Some(1), Some(0)]).is_none());
        assert!(ForestPoset::new(vec![Some(5)]).is_none());
    }
}
