//! Rooted trees: recursive, unlabeled, plane and q-ary, their counts, and
//! tree-series solutions of `dφ/dt = f(φ)`, `φ(0) = 0`.
//!
//! Every tree here hangs below an implicit univalent root `r`; vertex 0 is
//! the vertex attached to `r`.

mod ode;

pub use ode::{dormand_prince, majorant_tail, ode_tree_series, series_coefficients, SeriesKind, TaylorFunction};

use crate::operator::{simplex_integral_bounded, ForestPoset};
use crate::Rational;
use std::collections::BTreeMap;
use std::fmt;

/// Labeled tree whose labels increase away from the root: `parent[i] < i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RecursiveTree {
    parent: Vec<Option<usize>>,
}

impl RecursiveTree {
    /// `parent[0]` must be `None` and `parent[i] = Some(j)` with `j < i` otherwise.
    pub fn new(parent: Vec<Option<usize>>) -> Option<Self> {
        let ok = !parent.is_empty()
            && parent[0].is_none()
            && parent.iter().enumerate().skip(1).all(|(i, p)| p.is_some_and(|j| j < i));
        ok.then_some(Self { parent })
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

    /// Number of children of each vertex (`d_T(v) − 1`).
    pub fn child_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.len()];
        for p in self.parent.iter().flatten() {
            c[*p] += 1;
        }
        c
    }

    pub fn shape(&self) -> UnlabeledTree {
        let mut children = vec![Vec::new(); self.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        UnlabeledTree::from_children(&children)
    }
}

/// All `(p−1)!` recursive trees on `p` vertices.
pub fn enumerate_recursive_trees(p: usize) -> Vec<RecursiveTree> {
    if p == 0 {
        return Vec::new();
    }
    let mut out = vec![vec![None]];
    for v in 1..p {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Option<usize>>| {
                (0..v).map(move |j| {
                    let mut a = prefix.clone();
                    a.push(Some(j));
                    a
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|a| RecursiveTree::new(a).expect("parents precede children"))
        .collect()
}

/// Tree with ordered children; vertices are numbered in preorder.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaneTree {
    children: Vec<Vec<usize>>,
}

impl PlaneTree {
    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Edges among the non-root vertices.
    pub fn edge_count(&self) -> usize {
        self.len() - 1
    }

    pub fn child_counts(&self) -> Vec<usize> {
        self.children.iter().map(Vec::len).collect()
    }

    pub fn poset(&self) -> ForestPoset {
        let mut parent = vec![None; self.len()];
        for (v, cs) in self.children.iter().enumerate() {
            for &c in cs {
                parent[c] = Some(v);
            }
        }
        ForestPoset::new(parent).expect("trees are acyclic")
    }

    pub fn shape(&self) -> UnlabeledTree {
        UnlabeledTree::from_children(&self.children)
    }

    /// Nested-bracket encoding in embedding order, e.g. `[[][]]`.
    fn encode(&self, v: usize, out: &mut String) {
        out.push('[');
        for &c in &self.children[v] {
            self.encode(c, out);
        }
        out.push(']');
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.encode(0, &mut s);
        f.write_str(&s)
    }
}

/// Ordered forests of `n` vertices as child lists of each tree, preorder from `offset`.
fn plane_forests(n: usize, offset: usize, allowed: &dyn Fn(usize) -> bool) -> Vec<(Vec<usize>, Vec<Vec<usize>>)> {
    // returns (roots, children lists for vertices offset..offset+n)
    if n == 0 {
        return vec![(Vec::new(), Vec::new())];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for tree in plane_subtrees(first, offset, allowed) {
            for (mut roots, rest) in plane_forests(n - first, offset + first, allowed) {
                let mut children = tree.clone();
                children.extend(rest);
                roots.insert(0, offset);
                out.push((roots, children));
            }
        }
    }
    out
}

fn plane_subtrees(n: usize, offset: usize, allowed: &dyn Fn(usize) -> bool) -> Vec<Vec<Vec<usize>>> {
    plane_forests(n - 1, offset + 1, allowed)
        .into_iter()
        .filter(|(roots, _)| allowed(roots.len()))
        .map(|(roots, rest)| {
            let mut children = vec![roots];
            children.extend(rest);
            children
        })
        .collect()
}

/// All plane trees with `e` edges below the vertex attached to the root
/// (`e + 1` non-root vertices); there are `Catalan(e)` of them.
pub fn enumerate_plane_trees(e: usize) -> Vec<PlaneTree> {
    plane_subtrees(e + 1, 0, &|_| true)
        .into_iter()
        .map(|children| PlaneTree { children })
        .collect()
}

/// Plane trees whose vertices have either no child or exactly `q` children,
/// with `k` of the latter.
pub fn enumerate_qary_trees(q: usize, k: usize) -> Vec<PlaneTree> {
    plane_subtrees(q * k + 1, 0, &|c| c == 0 || c == q)
        .into_iter()
        .map(|children| PlaneTree { children })
        .collect()
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn catalan(e: u64) -> u64 {
    (binomial(2 * e, e) / (e as u128 + 1)) as u64
}

/// `(qk)! / (k! (qk − k + 1)!)`.
pub fn fuss_catalan(q: u64, k: u64) -> u64 {
    (binomial(q * k + 1, k) / (q * k + 1) as u128) as u64
}

/// Isomorphism class of a rooted tree, stored as its canonical bracket code
/// (children codes sorted at every vertex).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnlabeledTree {
    code: String,
}

impl UnlabeledTree {
    /// Canonical class of the tree given by child lists with vertex 0 on top.
    pub fn from_children(children: &[Vec<usize>]) -> Self {
        fn canon(children: &[Vec<usize>], v: usize) -> String {
            let mut parts: Vec<String> = children[v].iter().map(|&c| canon(children, c)).collect();
            parts.sort_unstable();
            format!("[{}]", parts.concat())
        }
        Self {
            code: canon(children, 0),
        }
    }

    /// Parses a bracket code such as `[[][]]` and canonicalizes it.
    pub fn parse(code: &str) -> Option<Self> {
        let mut children: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        for (i, ch) in code.chars().enumerate() {
            match ch {
                '[' => {
                    let v = children.len();
                    children.push(Vec::new());
                    match stack.last() {
                        Some(&p) => children[p].push(v),
                        None if i != 0 => return None,
                        None => {}
                    }
                    stack.push(v);
                }
                ']' => {
                    stack.pop()?;
                    if stack.is_empty() && i + 1 != code.len() {
                        return None;
                    }
                }
                _ => return None,
            }
        }
        (stack.is_empty() && !children.is_empty()).then(|| Self::from_children(&children))
    }

    fn to_children(&self) -> Vec<Vec<usize>> {
        let mut children: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        for ch in self.code.chars() {
            if ch == '[' {
                let v = children.len();
                children.push(Vec::new());
                if let Some(&p) = stack.last() {
                    children[p].push(v);
                }
                stack.push(v);
            } else {
                stack.pop();
            }
        }
        children
    }

    pub fn len(&self) -> usize {
        self.code.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    pub fn child_counts(&self) -> Vec<usize> {
        self.to_children().iter().map(Vec::len).collect()
    }

    pub fn poset(&self) -> ForestPoset {
        PlaneTree {
            children: self.to_children(),
        }
        .poset()
    }
}

impl fmt::Display for UnlabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

/// Unlabeled classes on `p` vertices with `α`, the number of recursive trees in each.
pub fn unlabeled_classes(p: usize) -> BTreeMap<UnlabeledTree, u64> {
    let mut out = BTreeMap::new();
    for t in enumerate_recursive_trees(p) {
        *out.entry(t.shape()).or_insert(0) += 1;
    }
    out
}

/// `α(𝔱)`: recursive trees of shape `t`.
pub fn alpha_multiplicity(t: &UnlabeledTree) -> u64 {
    enumerate_recursive_trees(t.len())
        .iter()
        .filter(|r| r.shape() == *t)
        .count() as u64
}

/// `N(𝔱)`: plane trees of shape `t`.
pub fn plane_multiplicity(t: &UnlabeledTree) -> u64 {
    enumerate_plane_trees(t.len() - 1)
        .iter()
        .filter(|p| p.shape() == *t)
        .count() as u64
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Checks `α(𝔱)/p! = N(𝔱) · vol(𝔱) / Π_v (d(v) − 1)!` exactly.
pub fn consistency_alpha_identity(t: &UnlabeledTree) -> bool {
    let p = t.len();
    let lhs = Rational::new(alpha_multiplicity(t) as i64, factorial(p));
    let denom: i64 = t.child_counts().into_iter().map(factorial).product();
    let rhs = Rational::from_integer(plane_multiplicity(t) as i64) * simplex_integral_bounded(&t.poset())
        / Rational::from_integer(denom);
    lhs == rhs
}
