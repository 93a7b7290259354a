//! Direct numerical integration of `∫ dφ e^{−S(φ)} Π φ / Z` for a few sites.

use super::{FeynmanError, KernelKind, Theory, VertexKernel};
use crate::quad::adaptive_gk;

/// Per-dimension absolute tolerance of the nested Gauss–Kronrod rule.
const QUAD_TOL: f64 = 1e-13;
/// Required drop of `S` from its interior minimum to the window boundary.
const TAIL_ACTION: f64 = 40.0;
const MAX_DIM: usize = 3;

/// `(g/d) Σ K(x¹..x^d) φ_{x¹}…φ_{x^d}` for one kernel.
fn interaction(k: &VertexKernel, phi: &[f64]) -> f64 {
    let n = phi.len();
    let d = k.arity;
    let v = match &k.kind {
        KernelKind::Local => phi.iter().map(|p| p.powi(d as i32)).sum::<f64>(),
        KernelKind::Dense(t) => t
            .iter()
            .enumerate()
            .map(|(flat, &entry)| {
                let mut r = flat;
                let mut prod = entry;
                for _ in 0..d {
                    prod *= phi[r % n];
                    r /= n;
                }
                prod
            })
            .sum(),
    };
    k.coupling / d as f64 * v
}

/// `S(φ) = ½ φAφ + V(φ)`.
pub(crate) fn action(theory: &Theory, phi: &[f64]) -> f64 {
    let a = theory.op().matrix();
    let n = theory.dim();
    let mut s = 0.0;
    for x in 0..n {
        for y in 0..n {
            s += 0.5 * phi[x] * a[(x, y)] * phi[y];
        }
    }
    s + theory.kernels().iter().map(|k| interaction(k, phi)).sum::<f64>()
}

fn sphere_directions(n: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    match n {
        1 => dirs.push(vec![1.0]),
        2 => {
            for i in 0..360 {
                let a = i as f64 * std::f64::consts::PI / 180.0;
                dirs.push(vec![a.cos(), a.sin()]);
            }
        }
        _ => {
            // Fibonacci sphere
            let m = 2000;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            for i in 0..m {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
                let r = (1.0 - z * z).sqrt();
                let th = golden * i as f64;
                dirs.push(vec![r * th.cos(), r * th.sin(), z]);
            }
        }
    }
    dirs
}

/// Refuses actions whose leading interaction is odd or not positive on sampled directions.
fn check_bounded(theory: &Theory) -> Result<(), FeynmanError> {
    let n = theory.dim();
    let Some(top) = theory
        .kernels()
        .iter()
        .filter(|k| k.coupling != 0.0)
        .max_by_key(|k| k.arity)
    else {
        return Ok(());
    };
    if top.arity % 2 == 1 {
        return Err(FeynmanError::Unbounded(format!(
            "leading interaction has odd arity {}",
            top.arity
        )));
    }
    for dir in sphere_directions(n) {
        if !(interaction(top, &dir) > 0.0) {
            return Err(FeynmanError::Unbounded(format!(
                "leading interaction is not positive along {dir:?}"
            )));
        }
    }
    Ok(())
}

fn grid_points(n: usize, l: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let total = per_axis.pow(n as u32);
    (0..total)
        .map(|code| {
            (0..n)
                .map(|i| {
                    let j = (code / per_axis.pow(i as u32)) % per_axis;
                    -l + 2.0 * l * j as f64 / (per_axis - 1) as f64
                })
                .collect()
        })
        .collect()
}

/// Window half-width and reference action so that `e^{−(S − S_ref)}` is
/// below `e^{−TAIL_ACTION}` on the boundary.
fn window(theory: &Theory) -> Result<(f64, f64), FeynmanError> {
    let n = theory.dim();
    let mut l = (2.0 * TAIL_ACTION / theory.op().lambda_min()).sqrt();
    for _ in 0..12 {
        let pts = grid_points(n, l, 41);
        let s_ref = pts
            .iter()
            .map(|p| action(theory, p))
            .fold(0.0f64, f64::min);
        let boundary_min = pts
            .iter()
            .filter(|p| p.iter().any(|x| (x.abs() - l).abs() < 1e-12 * l))
            .map(|p| action(theory, p))
            .fold(f64::INFINITY, f64::min);
        if boundary_min - s_ref >= TAIL_ACTION {
            return Ok((l, s_ref));
        }
        l *= 2.0;
    }
    Err(FeynmanError::Unbounded("no integration window found".into()))
}

/// `⟨Π φ⟩` for each monomial (a list of site indices), from one quadrature pass.
pub fn quadrature_moments(theory: &Theory, monomials: &[Vec<usize>]) -> Result<Vec<f64>, FeynmanError> {
    let n = theory.dim();
    if n > MAX_DIM {
        return Err(FeynmanError::DimensionTooLarge(n));
    }
    check_bounded(theory)?;
    let (l, s_ref) = window(theory)?;
    let mut phi = vec![0.0; n];
    let totals = nested(theory, monomials, &mut phi, 0, l, s_ref);
    let z = totals[0];
    Ok(totals[1..].iter().map(|v| v / z).collect())
}

/// `⟨φ_{x¹}…φ_{xⁿ}⟩` of the interacting measure by tensorized adaptive quadrature.
pub fn quadrature_moment_oracle(theory: &Theory, sites: &[usize]) -> Result<f64, FeynmanError> {
    Ok(quadrature_moments(theory, &[sites.to_vec()])?[0])
}

fn nested(
    theory: &Theory,
    monomials: &[Vec<usize>],
    phi: &mut [f64],
    dim: usize,
    l: f64,
    s_ref: f64,
) -> Vec<f64> {
    let n = theory.dim();
    let mut f = |x: f64| -> Vec<f64> {
        phi[dim] = x;
        if dim + 1 == n {
            let w = (-(action(theory, phi) - s_ref)).exp();
            let mut out = Vec::with_capacity(1 + monomials.len());
            out.push(w);
            for m in monomials {
                out.push(w * m.iter().map(|&s| phi[s]).product::<f64>());
            }
            out
        } else {
            let mut inner = phi.to_vec();
            nested(theory, monomials, &mut inner, dim + 1, l, s_ref)
        }
    };
    adaptive_gk(&mut f, -l, l, QUAD_TOL)
}

#[cfg(test)]
mod tests {
    use super::super::{perturbative_moment, wick_moment, VertexKernel};
    use crate::Rational;
    use super::*;
    use crate::operator::Operator;

    #[test]
    fn gaussian_moments() {
        let op = Operator::from_row_major(2, &[2.0, -1.0, -1.0, 2.0]).unwrap();
        let t = Theory::new(op.clone(), vec![], vec![]).unwrap();
        let c = op.covariance();
        let monos = vec![vec![0, 0], vec![0, 1], vec![0, 0, 1, 1], vec![0]];
        let vals = quadrature_moments(&t, &monos).unwrap();
        for (m, v) in monos.iter().zip(vals) {
            assert!((v - wick_moment(&c, m)).abs() < 1e-9, "{m:?}");
        }
    }

    /// ⟨φ²⟩ coefficients of `S = φ²/2 + gφ⁴/4` from Gaussian moments and series division.
    fn exact_series_coefficients(terms: usize) -> Vec<f64> {
        let gauss = |k: usize| -> i64 { (1..k as i64).step_by(2).product() };
        let fact = |k: usize| -> i64 { (1..=k as i64).product() };
        let weight = |p: usize| Rational::new((-1i64).pow(p as u32), 4i64.pow(p as u32) * fact(p));
        let z: Vec<Rational> = (0..terms).map(|p| weight(p) * gauss(4 * p)).collect();
        let num: Vec<Rational> = (0..terms).map(|p| weight(p) * gauss(2 + 4 * p)).collect();
        let mut c: Vec<Rational> = Vec::new();
        for p in 0..terms {
            let mut s = num[p];
            for i in 0..p {
                s -= c[i] * z[p - i];
            }
            c.push(s / z[0]);
        }
        c.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect()
    }

    #[test]
    fn series_matches_exact_expansion() {
        let t = Theory::new(Operator::scalar(1.0).unwrap(), vec![VertexKernel::local(4, 1.0)], vec![0, 0]).unwrap();
        let exact = exact_series_coefficients(4);
        for (o, e) in perturbative_moment(&t, 3).unwrap().iter().zip(exact) {
            assert_eq!(o.value, e);
        }
    }

    #[test]
    fn quartic_against_series() {
        let g = 0.1;
        let t = Theory::new(Operator::scalar(1.0).unwrap(), vec![VertexKernel::local(4, g)], vec![0, 0]).unwrap();
        let series: f64 = perturbative_moment(&t, 3).unwrap().iter().map(|o| o.value).sum();
        let exact = quadrature_moment_oracle(&t, &[0, 0]).unwrap();
        let bound = exact_series_coefficients(5)[4].abs() * g.powi(4);
        assert!((exact - series).abs() < bound, "{exact} vs {series}");
        assert!(quadrature_moment_oracle(&t, &[0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn refuses_unbounded_actions() {
        let op = Operator::scalar(1.0).unwrap();
        let cubic = Theory::new(op.clone(), vec![VertexKernel::local(3, 0.1)], vec![]).unwrap();
        assert!(matches!(quadrature_moment_oracle(&cubic, &[0]), Err(FeynmanError::Unbounded(_))));
        let negative = Theory::new(op, vec![VertexKernel::local(4, -0.1)], vec![]).unwrap();
        assert!(matches!(quadrature_moment_oracle(&negative, &[0]), Err(FeynmanError::Unbounded(_))));
        let big = Theory::new(Operator::identity(4), vec![], vec![]).unwrap();
        assert_eq!(quadrature_moment_oracle(&big, &[0]), Err(FeynmanError::DimensionTooLarge(4)));
    }
}
