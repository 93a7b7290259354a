use super::{SpanningForest, StochasticError, TaylorTerm, MAX_INTERNAL_VERTICES};
use crate::feynman::{check_compatible, SiteContraction, Theory};
use crate::maps::CombinatorialMap;
use crate::operator::{gap_crossings, integrate_linear_extension, Operator, TimedEdge};
use crate::quad::GeometricPanels;
use nalgebra::DMatrix;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// Time window of the quadrature method, in units of `1/λ_min`.
const HORIZON_DECAYS: f64 = 40.0;
/// Gauss–Legendre points per geometric panel.
const PANEL_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Eigenbasis sum with exact gap products per linear extension.
    ClosedForm,
    /// Nested numerical time integration in the site basis.
    Quadrature,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed",
            Method::Quadrature => "quadrature",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" | "closed-form" | "closed_form" => Ok(Method::ClosedForm),
            "quadrature" => Ok(Method::Quadrature),
            _ => Err(format!("unknown method `{s}` (expected `closed` or `quadrature`)")),
        }
    }
}

fn check_inputs(map: &CombinatorialMap, forest: &SpanningForest, theory: &Theory) -> Result<(), StochasticError> {
    check_compatible(map, theory)?;
    let count = map.internal_count();
    if count > MAX_INTERNAL_VERTICES {
        return Err(StochasticError::TooManyVertices {
            count,
            cap: MAX_INTERNAL_VERTICES,
        });
    }
    forest.validate(map)
}

/// Stochastic amplitude of `forest` at equal external times.
pub fn stochastic_amplitude(
    map: &CombinatorialMap,
    forest: &SpanningForest,
    theory: &Theory,
    method: Method,
) -> Result<f64, StochasticError> {
    check_inputs(map, forest, theory)?;
    match method {
        Method::ClosedForm => {
            let orders = forest.poset(map).linear_extensions();
            closed_form(map, forest, theory, &orders)
        }
        Method::Quadrature => quadrature(map, forest, theory, 0.0),
    }
}

/// Quadrature amplitude with all externals at time `top_time`.
pub fn stochastic_amplitude_at(
    map: &CombinatorialMap,
    forest: &SpanningForest,
    theory: &Theory,
    top_time: f64,
) -> Result<f64, StochasticError> {
    check_inputs(map, forest, theory)?;
    quadrature(map, forest, theory, top_time)
}

/// Each Taylor term with its value: the sum over member sequences of the
/// amplitude restricted to that sequence's time order.
pub fn taylor_term_values(
    map: &CombinatorialMap,
    terms: &[TaylorTerm],
    theory: &Theory,
) -> Result<Vec<f64>, StochasticError> {
    let of = map.vertex_of();
    let n_ext = map.n_external();
    terms
        .iter()
        .map(|term| {
            let mut total = 0.0;
            for seq in &term.sequences {
                let forest = SpanningForest::new(map, seq.clone());
                check_inputs(map, &forest, theory)?;
                let order: Vec<usize> = seq.iter().map(|&(_, child)| of[child] - n_ext).collect();
                total += closed_form(map, &forest, theory, &[order])?;
            }
            Ok(total)
        })
        .collect()
}

fn tree_flags(forest: &SpanningForest, edges: &[(usize, usize)]) -> Vec<bool> {
    let tree: BTreeSet<(usize, usize)> = forest
        .tree_edges()
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.iter().map(|e| tree.contains(e)).collect()
}

fn positions(map: &CombinatorialMap, order: &[usize]) -> Vec<usize> {
    let n_ext = map.n_external();
    let mut pos = vec![0; n_ext + order.len()];
    for (k, &i) in order.iter().enumerate() {
        pos[n_ext + i] = k + 1;
    }
    pos
}

/// `Σ_k Π U · Π Ṽ · Π_noise 1/λ · Σ_orders Π_gaps 1/R` over eigenindices `k` per edge.
fn closed_form(
    map: &CombinatorialMap,
    forest: &SpanningForest,
    theory: &Theory,
    orders: &[Vec<usize>],
) -> Result<f64, StochasticError> {
    let n = theory.dim();
    let lambda = theory.op().eigenvalues();
    let u = theory.op().eigenvectors();
    let of = map.vertex_of();
    let edges = map.edges();
    let tree = tree_flags(forest, &edges);
    let mut edge_of = vec![0; map.dart_count()];
    for (i, &(a, b)) in edges.iter().enumerate() {
        edge_of[a] = i;
        edge_of[b] = i;
    }
    let vertices: Vec<(usize, Vec<usize>)> = map
        .vertices()
        .into_iter()
        .skip(map.n_external())
        .map(|cycle| {
            let k = theory.kernel_index(cycle.len()).expect("checked compatible");
            (k, cycle.iter().map(|&h| edge_of[h]).collect())
        })
        .collect();
    let externals: Vec<(usize, usize)> = map
        .externals()
        .iter()
        .zip(theory.external_sites())
        .map(|(&h, &x)| (x, edge_of[h]))
        .collect();
    let pos: Vec<Vec<usize>> = orders.iter().map(|o| positions(map, o)).collect();
    let p = map.internal_count();

    let mut k = vec![0usize; edges.len()];
    let mut total = 0.0;
    loop {
        let mut spatial: f64 = externals.iter().map(|&(x, e)| u[(x, k[e])]).product();
        for (kernel, slots) in &vertices {
            if spatial == 0.0 {
                break;
            }
            let flat = slots.iter().fold(0, |acc, &e| acc * n + k[e]);
            spatial *= theory.eigen_vertex(*kernel)[flat];
        }
        if spatial != 0.0 {
            let mut prefactor = 1.0;
            for (i, &t) in tree.iter().enumerate() {
                if !t {
                    prefactor /= lambda[k[i]];
                }
            }
            let mut time = 0.0;
            for pos in &pos {
                let timed: Vec<TimedEdge> = edges
                    .iter()
                    .enumerate()
                    .map(|(i, &(a, b))| TimedEdge::new(pos[of[a]], pos[of[b]], lambda[k[i]]))
                    .collect();
                time += integrate_linear_extension(&gap_crossings(p, &timed))?.value;
            }
            total += spatial * prefactor * time;
        }
        let mut i = 0;
        loop {
            if i == k.len() {
                return Ok(total);
            }
            k[i] += 1;
            if k[i] < n {
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}

/// Site-basis integrand `Π_tree e^{−Δt A} · Π_noise e^{−|Δt|A}/A · Π(−V)` integrated
/// numerically over internal times below `top_time`, one linear extension at a time.
fn quadrature(
    map: &CombinatorialMap,
    forest: &SpanningForest,
    theory: &Theory,
    top_time: f64,
) -> Result<f64, StochasticError> {
    let contraction = SiteContraction::new(map, theory)?;
    let op = theory.op();
    let edges = contraction.edges().to_vec();
    let tree = tree_flags(forest, &edges);
    let of = map.vertex_of();
    let horizon = HORIZON_DECAYS / op.lambda_min();
    let panels = GeometricPanels::new(op.lambda_max() * edges.len().max(1) as f64, PANEL_ORDER);
    let p = map.internal_count();

    struct Ctx<'a> {
        op: &'a Operator,
        contraction: &'a SiteContraction<'a>,
        edges: &'a [(usize, usize)],
        tree: &'a [bool],
        of: &'a [usize],
        pos: Vec<usize>,
        panels: &'a GeometricPanels,
        floor: f64,
        p: usize,
    }

    fn integrand(c: &Ctx<'_>, times: &[f64]) -> f64 {
        let mats: Vec<DMatrix<f64>> = c
            .edges
            .iter()
            .zip(c.tree)
            .map(|(&(a, b), &is_tree)| {
                let ta = times[c.pos[c.of[a]]];
                let tb = times[c.pos[c.of[b]]];
                if is_tree {
                    let dt = (ta - tb).abs();
                    c.op.spectral(|l| (-l * dt).exp())
                } else {
                    c.op.noise_propagator(ta, tb)
                }
            })
            .collect();
        c.contraction.evaluate(&mats)
    }

    fn nested(c: &Ctx<'_>, level: usize, times: &mut Vec<f64>) -> f64 {
        if level > c.p {
            return integrand(c, times);
        }
        let mut total = 0.0;
        for (t, w) in c.panels.points(c.floor, times[level - 1]) {
            times[level] = t;
            total += w * nested(c, level + 1, times);
        }
        total
    }

    let mut total = 0.0;
    for order in forest.poset(map).linear_extensions() {
        let ctx = Ctx {
            op,
            contraction: &contraction,
            edges: &edges,
            tree: &tree,
            of: &of,
            pos: positions(map, &order),
            panels: &panels,
            floor: top_time - horizon,
            p,
        };
        let mut times = vec![top_time; p + 1];
        total += nested(&ctx, 1, &mut times);
    }
    Ok(total)
}

/// `∫_{−∞}^{min(t,s)} du e^{−(t−u)A} · 2 · e^{−(s−u)A}`, the noise contraction of two
/// free stochastic fields, by direct quadrature.
pub fn free_two_point_quadrature(op: &Operator, t: f64, s: f64) -> DMatrix<f64> {
    let top = t.min(s);
    let horizon = HORIZON_DECAYS / op.lambda_min();
    let panels = GeometricPanels::new(2.0 * op.lambda_max(), PANEL_ORDER);
    let n = op.dim();
    let mut acc = DMatrix::zeros(n, n);
    for (u, w) in panels.points(top - horizon, top) {
        let left = op.spectral(|l| (-l * (t - u)).exp());
        let right = op.spectral(|l| (-l * (s - u)).exp());
        acc += (left * right) * (2.0 * w);
    }
    acc
}
