use super::{
    enumerate_spanning_forests, stochastic_amplitude, Method, StochasticError, CLOSED_FORM_TOL, QUADRATURE_TOL,
    REL_EPSILON,
};
use crate::feynman::{feynman_amplitude, maps_at_order, perturbative_moment, Theory};
use crate::maps::{CanonicalKey, CombinatorialMap};
use rayon::prelude::*;

/// Forest-sum check of one map.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeReport {
    pub map_key: CanonicalKey,
    pub map: CombinatorialMap,
    pub order: usize,
    pub feynman_value: f64,
    /// `(forest, value)` in forest-key order.
    pub forest_values: Vec<(String, f64)>,
    pub forest_sum: f64,
    pub abs_discrepancy: f64,
    pub rel_discrepancy: f64,
    pub method: Method,
    pub pass: bool,
}

fn tolerance(method: Method) -> f64 {
    match method {
        Method::ClosedForm => CLOSED_FORM_TOL,
        Method::Quadrature => QUADRATURE_TOL,
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(REL_EPSILON)
}

/// Compares the Feynman amplitude of `map` with the sum of its forest amplitudes.
pub fn verify_forest_sum(
    map: &CombinatorialMap,
    theory: &Theory,
    method: Method,
) -> Result<AmplitudeReport, StochasticError> {
    let feynman_value = feynman_amplitude(map, theory)?;
    let forests = enumerate_spanning_forests(map);
    let forest_values: Vec<(String, f64)> = forests
        .par_iter()
        .map(|f| Ok((f.to_string(), stochastic_amplitude(map, f, theory, method)?)))
        .collect::<Result<_, StochasticError>>()?;
    let forest_sum: f64 = forest_values.iter().map(|(_, v)| v).sum();
    let rel_discrepancy = relative(forest_sum, feynman_value);
    Ok(AmplitudeReport {
        map_key: map.canonical_key(),
        map: map.clone(),
        order: map.internal_count(),
        feynman_value,
        forest_values,
        forest_sum,
        abs_discrepancy: (forest_sum - feynman_value).abs(),
        rel_discrepancy,
        method,
        pass: rel_discrepancy < tolerance(method),
    })
}

/// All maps of one perturbative order, plus the summed moment coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub order: usize,
    pub method: Method,
    /// One report per map, by canonical key.
    pub reports: Vec<AmplitudeReport>,
    pub worst_rel_discrepancy: f64,
    /// `Σ 𝒜` over the maps.
    pub feynman_total: f64,
    /// `Σ` of all forest sums.
    pub stochastic_total: f64,
    /// The order's coefficient from the perturbative assembler.
    pub moment_reference: f64,
    pub moment_rel_discrepancy: f64,
    pub pass: bool,
}

pub fn verify_order(theory: &Theory, order: usize, method: Method) -> Result<OrderReport, StochasticError> {
    let mut classes = maps_at_order(theory, order)?;
    classes.sort_by(|a, b| a.key.cmp(&b.key));
    let reports: Vec<AmplitudeReport> = classes
        .par_iter()
        .map(|c| verify_forest_sum(&c.map, theory, method))
        .collect::<Result<_, _>>()?;
    let worst_rel_discrepancy = reports.iter().map(|r| r.rel_discrepancy).fold(0.0, f64::max);
    let feynman_total: f64 = reports.iter().map(|r| r.feynman_value).sum();
    let stochastic_total: f64 = reports.iter().map(|r| r.forest_sum).sum();
    let moment_reference = perturbative_moment(theory, order)?[order].value;
    let moment_rel_discrepancy = relative(stochastic_total, moment_reference);
    let tol = tolerance(method);
    let pass = reports.iter().all(|r| r.pass) && moment_rel_discrepancy < tol;
    Ok(OrderReport {
        order,
        method,
        reports,
        worst_rel_discrepancy,
        feynman_total,
        stochastic_total,
        moment_reference,
        moment_rel_discrepancy,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feynman::VertexKernel;
    use crate::operator::Operator;

    fn quartic0d() -> Theory {
        Theory::new(Operator::scalar(1.0).unwrap(), vec![VertexKernel::local(4, 1.0)], vec![0, 0]).unwrap()
    }

    #[test]
    fn order_zero_free_theory() {
        let op = Operator::from_row_major(2, &[2.0, -1.0, -1.0, 2.0]).unwrap();
        let t = Theory::new(op, vec![], vec![0, 1, 1, 0]).unwrap();
        let r = verify_order(&t, 0, Method::ClosedForm).unwrap();
        assert!(r.pass);
        assert_eq!(r.reports.len(), 3);
    }

    #[test]
    fn quartic_tadpoles() {
        let r = verify_order(&quartic0d(), 1, Method::ClosedForm).unwrap();
        assert_eq!(r.reports.len(), 3);
        for rep in &r.reports {
            assert!(rep.pass);
            assert_eq!(rep.feynman_value, -1.0);
            assert_eq!(rep.forest_values.iter().map(|f| f.1).collect::<Vec<_>>(), vec![-0.5, -0.5]);
        }
        assert_eq!(r.moment_reference, -3.0);
    }

    #[test]
    fn quartic_order_two_quadrature() {
        let r = verify_order(&quartic0d(), 2, Method::Quadrature).unwrap();
        assert_eq!(r.reports.len(), 24);
        assert!(r.pass, "worst {}", r.worst_rel_discrepancy);
    }

    #[test]
    fn cubic_matrix_theory() {
        let op = Operator::from_row_major(2, &[2.0, -1.0, -1.0, 2.0]).unwrap();
        let t = Theory::new(op, vec![VertexKernel::local(3, 0.7)], vec![0]).unwrap();
        for p in 0..=2 {
            let r = verify_order(&t, p, Method::ClosedForm).unwrap();
            assert!(r.pass, "order {p}: {}", r.worst_rel_discrepancy);
        }
    }
}
