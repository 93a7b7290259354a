//! Path-integral side: Gaussian moments, theories, and Feynman amplitudes.

mod config;
mod oracle;
mod theory;

pub use config::{parse_theory, ConfigError};
pub use oracle::{quadrature_moment_oracle, quadrature_moments};
#[cfg(test)]
pub(crate) use oracle::action;
pub use theory::{KernelKind, Theory, TheoryError, VertexKernel};

use crate::maps::{enumerate_maps, CombinatorialMap, EnumerateOptions, MapClass, MapError};
use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeynmanError {
    #[error("internal vertex of degree {degree} has no kernel of that arity")]
    ArityMismatch { degree: usize },
    #[error("map has {map} externals but the theory has {theory}")]
    ExternalCountMismatch { map: usize, theory: usize },
    #[error("action is not bounded below: {0}")]
    Unbounded(String),
    #[error("quadrature oracle supports at most 3 sites, got {0}")]
    DimensionTooLarge(usize),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Gaussian moment `⟨φ_{x¹}…φ_{xⁿ}⟩` as a sum over pairings of covariance entries.
pub fn wick_moment(cov: &DMatrix<f64>, sites: &[usize]) -> f64 {
    if sites.len() % 2 == 1 {
        return 0.0;
    }
    fn rec(cov: &DMatrix<f64>, rest: &mut Vec<usize>) -> f64 {
        if rest.is_empty() {
            return 1.0;
        }
        let first = rest.remove(0);
        let mut total = 0.0;
        for i in 0..rest.len() {
            let partner = rest.remove(i);
            total += cov[(first, partner)] * rec(cov, rest);
            rest.insert(i, partner);
        }
        rest.insert(0, first);
        total
    }
    rec(cov, &mut sites.to_vec())
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Fixed(usize),
    Var(usize),
}

/// Contraction of a map against per-edge site matrices and the vertex kernels.
///
/// Every internal dart carries a site summed over `0..N`; local vertices
/// collapse to one shared site.
pub(crate) struct SiteContraction<'a> {
    theory: &'a Theory,
    edges: Vec<(usize, usize)>,
    slot: Vec<Slot>,
    /// Per internal vertex: kernel index and its darts in rotation order.
    vertices: Vec<(usize, Vec<usize>)>,
    n_vars: usize,
}

impl<'a> SiteContraction<'a> {
    pub(crate) fn new(map: &CombinatorialMap, theory: &'a Theory) -> Result<Self, FeynmanError> {
        check_compatible(map, theory)?;
        let mut slot = vec![Slot::Fixed(0); map.dart_count()];
        for (i, &e) in map.externals().iter().enumerate() {
            slot[e] = Slot::Fixed(theory.external_sites()[i]);
        }
        let mut n_vars = 0;
        let mut vertices = Vec::new();
        for cycle in map.vertices().into_iter().skip(map.n_external()) {
            let k = theory
                .kernel_index(cycle.len())
                .ok_or(FeynmanError::ArityMismatch { degree: cycle.len() })?;
            match theory.kernels()[k].kind {
                KernelKind::Local => {
                    for &h in &cycle {
                        slot[h] = Slot::Var(n_vars);
                    }
                    n_vars += 1;
                }
                KernelKind::Dense(_) => {
                    for &h in &cycle {
                        slot[h] = Slot::Var(n_vars);
                        n_vars += 1;
                    }
                }
            }
            vertices.push((k, cycle));
        }
        Ok(Self {
            theory,
            edges: map.edges(),
            slot,
            vertices,
            n_vars,
        })
    }

    pub(crate) fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `Σ_sites Π_e M_e[x_a, x_b] · Π_v (−g K_v)` with `mats` indexed like [`edges`](Self::edges).
    pub(crate) fn evaluate(&self, mats: &[DMatrix<f64>]) -> f64 {
        let n = self.theory.dim();
        let mut assign = vec![0usize; self.n_vars];
        let site = |s: Slot, assign: &[usize]| match s {
            Slot::Fixed(x) => x,
            Slot::Var(i) => assign[i],
        };
        let mut sites_buf = Vec::new();
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for (m, &(a, b)) in mats.iter().zip(&self.edges) {
                w *= m[(site(self.slot[a], &assign), site(self.slot[b], &assign))];
                if w == 0.0 {
                    break;
                }
            }
            if w != 0.0 {
                for (k, darts) in &self.vertices {
                    let kernel = &self.theory.kernels()[*k];
                    sites_buf.clear();
                    sites_buf.extend(darts.iter().map(|&h| site(self.slot[h], &assign)));
                    w *= -kernel.coupling * kernel.entry(n, &sites_buf);
                }
                total += w;
            }
            // odometer
            let mut i = 0;
            loop {
                if i == self.n_vars {
                    return total;
                }
                assign[i] += 1;
                if assign[i] < n {
                    break;
                }
                assign[i] = 0;
                i += 1;
            }
        }
    }
}

pub(crate) fn check_compatible(map: &CombinatorialMap, theory: &Theory) -> Result<(), FeynmanError> {
    if map.n_external() != theory.n_external() {
        return Err(FeynmanError::ExternalCountMismatch {
            map: map.n_external(),
            theory: theory.n_external(),
        });
    }
    for d in map.internal_degrees() {
        if theory.kernel_index(d).is_none() {
            return Err(FeynmanError::ArityMismatch { degree: d });
        }
    }
    Ok(())
}

/// Feynman amplitude: `Σ Π_edges C · Π_vertices (−V)` over internal sites.
pub fn feynman_amplitude(map: &CombinatorialMap, theory: &Theory) -> Result<f64, FeynmanError> {
    let contraction = SiteContraction::new(map, theory)?;
    let c = theory.op().covariance();
    let mats = vec![c; contraction.edges().len()];
    Ok(contraction.evaluate(&mats))
}

/// One monomial `coefficient · Π_k g_k^{exponents[k]}` of a perturbative coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTerm {
    /// Power of each kernel's coupling, in theory kernel order.
    pub exponents: Vec<u32>,
    pub coefficient: f64,
    /// Number of unlabeled maps contributing.
    pub maps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderCoefficient {
    /// Number of internal vertices.
    pub order: usize,
    pub terms: Vec<MomentTerm>,
    /// Sum of the terms at the theory's couplings.
    pub value: f64,
}

/// Maps of the theory's moment with `p` internal vertices; empty when parity forbids any.
pub fn maps_at_order(theory: &Theory, p: usize) -> Result<Vec<MapClass>, FeynmanError> {
    if p > 0 && theory.kernels().is_empty() {
        return Ok(Vec::new());
    }
    let arities = if theory.kernels().is_empty() {
        vec![2]
    } else {
        theory.arities()
    };
    match enumerate_maps(&EnumerateOptions::new(theory.n_external(), arities, p)) {
        Ok(c) => Ok(c),
        Err(MapError::DegreeParityImpossible { .. }) => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

fn exponents_of(theory: &Theory, degrees: &[usize]) -> Vec<u32> {
    let mut e = vec![0u32; theory.kernels().len()];
    for &d in degrees {
        e[theory.kernel_index(d).expect("enumerated from theory arities")] += 1;
    }
    e
}

/// Order-by-order coefficients of `⟨φ_{x¹}…φ_{xⁿ}⟩`, orders `0..=max_order`.
pub fn perturbative_moment(theory: &Theory, max_order: usize) -> Result<Vec<OrderCoefficient>, FeynmanError> {
    let unit = theory.with_unit_couplings();
    (0..=max_order)
        .map(|p| {
            let classes = maps_at_order(theory, p)?;
            let values: Vec<(Vec<u32>, f64)> = classes
                .par_iter()
                .map(|c| Ok((exponents_of(theory, &c.degrees), feynman_amplitude(&c.map, &unit)?)))
                .collect::<Result<_, FeynmanError>>()?;
            let mut terms: Vec<MomentTerm> = Vec::new();
            for (exponents, v) in values {
                match terms.iter_mut().find(|t| t.exponents == exponents) {
                    Some(t) => {
                        t.coefficient += v;
                        t.maps += 1;
                    }
                    None => terms.push(MomentTerm {
                        exponents,
                        coefficient: v,
                        maps: 1,
                    }),
                }
            }
            terms.sort_by(|a, b| b.exponents.cmp(&a.exponents));
            let value = terms
                .iter()
                .map(|t| {
                    t.coefficient
                        * t.exponents
                            .iter()
                            .zip(theory.kernels())
                            .map(|(&e, k)| k.coupling.powi(e as i32))
                            .product::<f64>()
                })
                .sum();
            Ok(OrderCoefficient {
                order: p,
                terms,
                value,
            })
        })
        .collect()
}
