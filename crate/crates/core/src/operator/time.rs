//! Nested exponential time integrals over one linear extension.
//!
//! Positions `0..=p` label the times of a linear extension: position `0` is
//! the shared top time `t`, positions `1..=p` are internal times with
//! `t = u_0 ≥ u_1 ≥ … ≥ u_p`. Substituting the gaps `s_k = u_{k-1} - u_k`
//! turns `∫ Π_e e^{-rate_e (u_upper - u_lower)}` into `Π_k ∫₀^∞ e^{-R_k s_k}`
//! where `R_k` sums the rates of the edges spanning gap `k`.

use super::OperatorError;
use crate::quad::GeometricPanels;

/// Value of one linear-extension integral: `Π_k 1/R_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProduct {
    pub gap_rates: Vec<f64>,
    pub value: f64,
}

/// An edge between two positions of a linear extension, `upper ≤ lower`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedEdge {
    pub upper: usize,
    pub lower: usize,
    pub rate: f64,
}

impl TimedEdge {
    pub fn new(a: usize, b: usize, rate: f64) -> Self {
        Self {
            upper: a.min(b),
            lower: a.max(b),
            rate,
        }
    }
}

/// Rates crossing each gap `1..=positions`; gap `k` sits between positions `k-1` and `k`.
pub fn gap_crossings(positions: usize, edges: &[TimedEdge]) -> Vec<Vec<f64>> {
    let mut gaps = vec![Vec::new(); positions];
    for e in edges {
        for gap in gaps.iter_mut().take(e.lower).skip(e.upper) {
            gap.push(e.rate);
        }
    }
    gaps
}

/// Closed-form value of the nested integral given the rates crossing each gap.
pub fn integrate_linear_extension(gap_crossings: &[Vec<f64>]) -> Result<GapProduct, OperatorError> {
    let mut gap_rates = Vec::with_capacity(gap_crossings.len());
    let mut value = 1.0;
    for (gap, rates) in gap_crossings.iter().enumerate() {
        if rates.is_empty() {
            return Err(OperatorError::EmptyGap { gap: gap + 1 });
        }
        let mut total = 0.0;
        for &r in rates {
            if !(r > 0.0) {
                return Err(OperatorError::NonPositiveRate(r));
            }
            total += r;
        }
        gap_rates.push(total);
        value /= total;
    }
    Ok(GapProduct { gap_rates, value })
}

/// Direct nested quadrature of the same integral over `[top - horizon, top]`.
///
/// The integrand `Π_e e^{-rate_e (u_upper - u_lower)}` is evaluated in the
/// original time variables; nothing here uses the gap factorization.
pub fn integrate_ordered_quadrature(
    positions: usize,
    edges: &[TimedEdge],
    top_time: f64,
    horizon: f64,
) -> f64 {
    let rate_scale: f64 = edges.iter().map(|e| e.rate).sum::<f64>().max(1e-12);
    let panels = GeometricPanels::new(rate_scale, 8);
    let mut by_lower: Vec<Vec<TimedEdge>> = vec![Vec::new(); positions + 1];
    for e in edges {
        by_lower[e.lower].push(*e);
    }
    let mut times = vec![top_time; positions + 1];
    nested(
        1,
        positions,
        top_time - horizon,
        &panels,
        &by_lower,
        &mut times,
    )
}

fn nested(
    level: usize,
    positions: usize,
    floor: f64,
    panels: &GeometricPanels,
    by_lower: &[Vec<TimedEdge>],
    times: &mut Vec<f64>,
) -> f64 {
    if level > positions {
        return 1.0;
    }
    let upper = times[level - 1];
    let mut total = 0.0;
    for (u, w) in panels.points(floor, upper) {
        times[level] = u;
        let mut factor = 1.0;
        for e in &by_lower[level] {
            factor *= (-e.rate * (times[e.upper] - u)).exp();
        }
        total += w * factor * nested(level + 1, positions, floor, panels, by_lower, times);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_gap_single_edge() {
        let g = integrate_linear_extension(&[vec![2.5]]).unwrap();
        assert_eq!(g.value, 1.0 / 2.5);
        assert_eq!(g.gap_rates, vec![2.5]);
    }

    #[test]
    fn chain_of_equal_rates() {
        let a = 1.3;
        let edges = [TimedEdge::new(0, 1, a), TimedEdge::new(1, 2, a)];
        let g = integrate_linear_extension(&gap_crossings(2, &edges)).unwrap();
        assert!((g.value - 1.0 / (a * a)).abs() < 1e-15);
    }

    #[test]
    fn tadpole_two_edges_one_gap() {
        let edges = [TimedEdge::new(0, 1, 1.0), TimedEdge::new(0, 1, 1.0)];
        let g = integrate_linear_extension(&gap_crossings(1, &edges)).unwrap();
        assert_eq!(g.value, 0.5);
    }

    #[test]
    fn errors() {
        assert_eq!(
            integrate_linear_extension(&[vec![1.0], vec![]]).unwrap_err(),
            OperatorError::EmptyGap { gap: 2 }
        );
        assert_eq!(
            integrate_linear_extension(&[vec![0.0]]).unwrap_err(),
            OperatorError::NonPositiveRate(0.0)
        );
    }

    #[test]
    fn quadrature_agrees_and_is_shift_invariant() {
        let edges = [
            TimedEdge::new(0, 1, 1.0),
            TimedEdge::new(0, 2, 3.0),
            TimedEdge::new(1, 2, 1.0),
            TimedEdge::new(1, 3, 3.0),
            TimedEdge::new(2, 3, 1.0),
        ];
        let exact = integrate_linear_extension(&gap_crossings(3, &edges))
            .unwrap()
            .value;
        let q0 = integrate_ordered_quadrature(3, &edges, 0.0, 40.0);
        let q1 = integrate_ordered_quadrature(3, &edges, 7.5, 40.0);
        assert!(((q0 - exact) / exact).abs() < 1e-6, "{q0} vs {exact}");
        assert!(((q0 - q1) / exact).abs() < 1e-6);
    }

    #[test]
    fn quadrature_agrees_on_all_small_posets() {
        use crate::operator::ForestPoset;
        fn parent_arrays(p: usize) -> Vec<Vec<Option<usize>>> {
            let mut out = vec![Vec::new()];
            for v in 0..p {
                let mut next = Vec::new();
                for prefix in &out {
                    for choice in std::iter::once(None).chain((0..v).map(Some)) {
                        let mut a: Vec<Option<usize>> = prefix.clone();
                        a.push(choice);
                        next.push(a);
                    }
                }
                out = next;
            }
            out
        }
        for p in 1..=4 {
            for parents in parent_arrays(p) {
                let poset = ForestPoset::new(parents).unwrap();
                let order = &poset.linear_extensions()[0];
                let mut pos = vec![0; p];
                for (k, &v) in order.iter().enumerate() {
                    pos[v] = k + 1;
                }
                let edges: Vec<TimedEdge> = (0..p)
                    .map(|v| {
                        let up = poset.parent(v).map_or(0, |w| pos[w]);
                        TimedEdge::new(up, pos[v], 1.0 + 0.5 * v as f64)
                    })
                    .collect();
                let exact = integrate_linear_extension(&gap_crossings(p, &edges))
                    .unwrap()
                    .value;
                let q = integrate_ordered_quadrature(p, &edges, 0.0, 40.0);
                assert!(((q - exact) / exact).abs() < 1e-6, "{q} vs {exact}");
            }
        }
    }
}
