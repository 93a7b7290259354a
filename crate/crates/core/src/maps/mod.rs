//! Rooted combinatorial maps.
//!
//! A map is a set of darts `0..D` with a rotation `sigma` (its cycles are
//! vertices) and a fixed-point-free involution `alpha` (its cycles are edges).
//! External vertices are univalent, i.e. fixed points of `sigma`, and are
//! listed in order in `externals`.

mod canonical;
mod enumerate;
mod format;
mod graph;
mod tree;

pub use canonical::CanonicalKey;
pub use enumerate::{enumerate_maps, expected_multiplicity, EnumerateOptions, MapClass, DEFAULT_MAX_DARTS};
pub use graph::{count_embeddings, AbstractGraph};
pub use tree::keep_to_right_tree;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("sigma has {sigma} entries but alpha has {alpha}")]
    LengthMismatch { sigma: usize, alpha: usize },
    #[error("{which} is not a permutation of the darts")]
    NotPermutation { which: &'static str },
    #[error("alpha is not an involution at dart {dart}")]
    NotInvolution { dart: usize },
    #[error("alpha fixes dart {dart}")]
    FixedPointAlpha { dart: usize },
    #[error("external dart {dart} is out of range, repeated, or not a fixed point of sigma")]
    BadExternal { dart: usize },
    #[error("the component containing dart {dart} has no external vertex")]
    OrphanComponent { dart: usize },
    #[error("dart {dart} is a fixed point of sigma but not an external: internal vertices need degree >= 2")]
    UnivalentInternal { dart: usize },
    #[error("total dart count {darts} is odd for every admissible degree sequence")]
    DegreeParityImpossible { darts: usize },
    #[error("enumeration needs {darts} darts, above the cap of {cap}")]
    TooManyDarts { darts: usize, cap: usize },
    #[error("degree {degree} is below 2")]
    DegreeTooSmall { degree: usize },
    #[error("map record field `{field}`: {message}")]
    Parse { field: String, message: String },
}

/// A validated rooted combinatorial map.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CombinatorialMap {
    sigma: Vec<usize>,
    alpha: Vec<usize>,
    externals: Vec<usize>,
}

impl CombinatorialMap {
    pub fn new(
        sigma: Vec<usize>,
        alpha: Vec<usize>,
        externals: Vec<usize>,
    ) -> Result<Self, MapError> {
        let map = Self {
            sigma,
            alpha,
            externals,
        };
        map.validate()?;
        Ok(map)
    }

    /// Builds a map from cycle notation; darts missing from `sigma_cycles` are fixed points.
    pub fn from_cycles(
        darts: usize,
        sigma_cycles: &[Vec<usize>],
        alpha_pairs: &[(usize, usize)],
        externals: Vec<usize>,
    ) -> Result<Self, MapError> {
        let mut sigma: Vec<usize> = (0..darts).collect();
        let mut seen = vec![false; darts];
        for cycle in sigma_cycles {
            for (i, &d) in cycle.iter().enumerate() {
                if d >= darts || seen[d] {
                    return Err(MapError::NotPermutation { which: "sigma" });
                }
                seen[d] = true;
                sigma[d] = cycle[(i + 1) % cycle.len()];
            }
        }
        let mut alpha = vec![usize::MAX; darts];
        for &(a, b) in alpha_pairs {
            if a >= darts || b >= darts || alpha[a] != usize::MAX || alpha[b] != usize::MAX {
                return Err(MapError::NotPermutation { which: "alpha" });
            }
            alpha[a] = b;
            alpha[b] = a;
        }
        if let Some(d) = alpha.iter().position(|&x| x == usize::MAX) {
            return Err(MapError::FixedPointAlpha { dart: d });
        }
        Self::new(sigma, alpha, externals)
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<(), MapError> {
        let d = self.sigma.len();
        if self.alpha.len() != d {
            return Err(MapError::LengthMismatch {
                sigma: d,
                alpha: self.alpha.len(),
            });
        }
        for (perm, which) in [(&self.sigma, "sigma"), (&self.alpha, "alpha")] {
            let mut seen = vec![false; d];
            for &x in perm.iter() {
                if x >= d || seen[x] {
                    return Err(MapError::NotPermutation { which });
                }
                seen[x] = true;
            }
        }
        for h in 0..d {
            if self.alpha[h] == h {
                return Err(MapError::FixedPointAlpha { dart: h });
            }
            if self.alpha[self.alpha[h]] != h {
                return Err(MapError::NotInvolution { dart: h });
            }
        }
        let mut is_ext = vec![false; d];
        for &e in &self.externals {
            if e >= d || is_ext[e] || self.sigma[e] != e {
                return Err(MapError::BadExternal { dart: e });
            }
            is_ext[e] = true;
        }
        for h in 0..d {
            if self.sigma[h] == h && !is_ext[h] {
                return Err(MapError::UnivalentInternal { dart: h });
            }
        }
        let comp = self.component_of();
        let mut has_ext = vec![false; d];
        for &e in &self.externals {
            has_ext[comp[e]] = true;
        }
        for h in 0..d {
            if !has_ext[comp[h]] {
                return Err(MapError::OrphanComponent { dart: h });
            }
        }
        Ok(())
    }

    pub fn dart_count(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn externals(&self) -> &[usize] {
        &self.externals
    }

    pub fn n_external(&self) -> usize {
        self.externals.len()
    }

    /// Vertices as dart cycles: externals first in declared order, then
    /// internal vertices ordered by their smallest dart, each cycle starting there.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        let d = self.dart_count();
        let mut out: Vec<Vec<usize>> = self.externals.iter().map(|&e| vec![e]).collect();
        let mut seen = vec![false; d];
        for &e in &self.externals {
            seen[e] = true;
        }
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut h = self.sigma[start];
            while h != start {
                seen[h] = true;
                cycle.push(h);
                h = self.sigma[h];
            }
            out.push(cycle);
        }
        out
    }

    /// Vertex index of every dart, in the order of [`vertices`](Self::vertices).
    pub fn vertex_of(&self) -> Vec<usize> {
        let mut of = vec![0; self.dart_count()];
        for (v, cycle) in self.vertices().iter().enumerate() {
            for &h in cycle {
                of[h] = v;
            }
        }
        of
    }

    pub fn internal_count(&self) -> usize {
        self.vertices().len() - self.n_external()
    }

    /// Degrees of the internal vertices in vertex order.
    pub fn internal_degrees(&self) -> Vec<usize> {
        self.vertices()
            .into_iter()
            .skip(self.n_external())
            .map(|c| c.len())
            .collect()
    }

    /// Edges as dart pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.dart_count())
            .filter(|&h| h < self.alpha[h])
            .map(|h| (h, self.alpha[h]))
            .collect()
    }

    /// Component label (smallest dart of the component) for every dart.
    pub fn component_of(&self) -> Vec<usize> {
        let d = self.sigma.len();
        let mut comp = vec![usize::MAX; d];
        for start in 0..d {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = start;
            while let Some(h) = stack.pop() {
                for next in [self.sigma[h], self.alpha[h]] {
                    if next < d && comp[next] == usize::MAX {
                        comp[next] = start;
                        stack.push(next);
                    }
                }
            }
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        let comp = self.component_of();
        comp.iter().all(|&c| c == comp[0])
    }

    /// Conjugates by the dart bijection `tau`: `sigma' = tau sigma tau⁻¹`, same for alpha.
    pub fn relabel(&self, tau: &[usize]) -> Result<Self, MapError> {
        let d = self.dart_count();
        let mut sigma = vec![0; d];
        let mut alpha = vec![0; d];
        for h in 0..d {
            sigma[tau[h]] = tau[self.sigma[h]];
            alpha[tau[h]] = tau[self.alpha[h]];
        }
        let externals = self.externals.iter().map(|&e| tau[e]).collect();
        Self::new(sigma, alpha, externals)
    }
}
