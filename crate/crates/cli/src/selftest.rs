//! Golden checks: diagram multiplicities, low-order moment coefficients,
//! free two-point reduction and the tadpole/sunset forest decompositions.

use sqv_core::feynman::{perturbative_moment, Theory, VertexKernel};
use sqv_core::maps::{enumerate_maps, AbstractGraph, CombinatorialMap, EnumerateOptions};
use sqv_core::operator::Operator;
use sqv_core::stochastic::{
    choice_sequences, enumerate_spanning_forests, free_two_point_quadrature, stochastic_amplitude,
    taylor_term_values, taylor_terms, verify_forest_sum, verify_order, Method,
};
use std::collections::BTreeMap;

const TADPOLE: &str = "darts=6; sigma=(2 3 4 5); alpha=(0 2)(3 4)(5 1); externals=[0,1]";
const SUNSET: &str = "darts=10; sigma=(2 3 4 5)(6 7 8 9); alpha=(0 2)(3 6)(4 7)(5 8)(9 1); externals=[0,1]";

pub struct Check {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

fn check(name: &str, expected: impl ToString, got: impl ToString, pass: bool) -> Check {
    Check {
        name: name.into(),
        expected: expected.to_string(),
        got: got.to_string(),
        pass,
    }
}

fn exact<T: PartialEq + std::fmt::Debug>(name: &str, expected: T, got: T) -> Check {
    let pass = expected == got;
    check(name, format!("{expected:?}"), format!("{got:?}"), pass)
}

fn close(name: &str, expected: f64, got: f64, tol: f64) -> Check {
    let pass = (expected - got).abs() <= tol * expected.abs().max(1.0);
    check(name, crate::output::fmt_float(expected), crate::output::fmt_float(got), pass)
}

fn quartic0d() -> Theory {
    Theory::new(Operator::scalar(1.0).unwrap(), vec![VertexKernel::local(4, 1.0)], vec![0, 0]).unwrap()
}

/// Unlabeled connected quartic two-point maps of order `p`, counted per abstract graph.
pub fn embedding_counts(p: usize) -> BTreeMap<AbstractGraph, usize> {
    let classes = enumerate_maps(&EnumerateOptions::new(2, vec![4], p).connected()).unwrap_or_default();
    let mut out = BTreeMap::new();
    for c in classes {
        *out.entry(c.map.to_abstract_graph()).or_insert(0) += 1;
    }
    out
}

fn sorted_counts(p: usize) -> Vec<usize> {
    let mut v: Vec<usize> = embedding_counts(p).into_values().collect();
    v.sort_unstable();
    v
}

fn map(text: &str) -> CombinatorialMap {
    text.parse().expect("built-in map")
}

pub fn run_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let theory = quartic0d();

    // diagram multiplicities and moment coefficients
    let golden: [&[usize]; 4] = [&[1], &[3], &[6, 9, 9], &[18, 18, 18, 27, 27, 27, 27, 27, 54, 54]];
    for (p, want) in golden.iter().enumerate() {
        out.push(exact(&format!("A: embeddings, order {p}"), want.to_vec(), sorted_counts(p)));
    }
    match perturbative_moment(&theory, 3) {
        Ok(coeffs) => {
            for (p, want) in [1.0, -3.0, 24.0, -297.0].into_iter().enumerate() {
                out.push(close(&format!("A: <phi^2> coefficient, order {p}"), want, coeffs[p].value, 1e-12));
            }
        }
        Err(e) => out.push(check("A: <phi^2> coefficients", "ok", e, false)),
    }

    // free two-point function
    let ops = [
        Operator::scalar(1.0).unwrap(),
        Operator::from_row_major(2, &[2.0, -1.0, -1.0, 2.0]).unwrap(),
    ];
    for op in &ops {
        for dt in [0.0, 0.5, 2.0] {
            let got = free_two_point_quadrature(op, 1.0 + dt, 1.0);
            let want = op.spectral(|l| (-l * dt).exp() / l);
            let err = (got - &want).abs().max();
            out.push(check(
                &format!("B: free two-point, N={}, t-s={dt}", op.dim()),
                "< 1e-10",
                crate::output::fmt_float(err),
                err < 1e-10,
            ));
        }
    }

    // tadpole and sunset decompositions
    let tadpole = map(TADPOLE);
    let forests = enumerate_spanning_forests(&tadpole);
    let values: Vec<f64> = forests
        .iter()
        .filter_map(|f| stochastic_amplitude(&tadpole, f, &theory, Method::ClosedForm).ok())
        .collect();
    out.push(exact("C: tadpole forests", 2, forests.len()));
    out.push(exact("B: tadpole forest values", vec![-0.5, -0.5], values));
    let sunset = map(SUNSET);
    out.push(exact("C: sunset forests", 7, enumerate_spanning_forests(&sunset).len()));
    out.push(exact("C: sunset choice sequences", 8, choice_sequences(&sunset).len()));
    let terms = taylor_terms(&sunset);
    match taylor_term_values(&sunset, &terms, &theory) {
        Ok(v) => {
            // (sequences, value) per term, in a labeling-independent order
            let mut got: Vec<(usize, f64)> = terms.iter().map(|t| t.multiplicity()).zip(v).collect();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let want = [(1, 0.125), (1, 0.125), (3, 0.375), (3, 0.375)];
            out.push(exact(
                "C: sunset Taylor term sequences",
                want.map(|w| w.0).to_vec(),
                got.iter().map(|g| g.0).collect(),
            ));
            for (i, (w, g)) in want.iter().zip(&got).enumerate() {
                out.push(close(&format!("C: sunset Taylor term {}", i + 1), w.1, g.1, 1e-12));
            }
        }
        Err(e) => out.push(check("C: sunset Taylor terms", "ok", e, false)),
    }
    for (name, p, graph, want) in [
        ("B: tadpole factor", 1, tadpole.to_abstract_graph(), -3.0),
        ("B: sunset factor", 2, sunset.to_abstract_graph(), 6.0),
    ] {
        let total: Result<f64, String> = enumerate_maps(&EnumerateOptions::new(2, vec![4], p).connected())
            .map_err(|e| e.to_string())
            .and_then(|cs| {
                cs.iter()
                    .filter(|c| c.map.to_abstract_graph() == graph)
                    .map(|c| {
                        verify_forest_sum(&c.map, &theory, Method::ClosedForm)
                            .map(|r| r.forest_sum)
                            .map_err(|e| e.to_string())
                    })
                    .sum()
            });
        match total {
            Ok(t) => out.push(close(name, want, t, 1e-12)),
            Err(e) => out.push(check(name, want, e, false)),
        }
    }
    for p in 0..=2 {
        let name = format!("forest sums, quartic order {p}");
        match verify_order(&theory, p, Method::ClosedForm) {
            Ok(r) => out.push(check(
                &name,
                "rel < 1e-8",
                crate::output::fmt_float(r.worst_rel_discrepancy),
                r.pass,
            )),
            Err(e) => out.push(check(&name, "ok", e, false)),
        }
    }
    out
}
