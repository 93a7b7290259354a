//! Numerical quadrature used by the cross-check paths.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Panel layout for integrands that decay away from an upper endpoint.
///
/// Breakpoints sit at distances `0, s0, 2 s0, 4 s0, ...` below the upper
/// limit, so resolution is finest where exponentials are largest.
#[derive(Debug, Clone)]
pub struct GeometricPanels {
    first: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GeometricPanels {
    /// `rate_scale` is the largest decay rate expected along one direction.
    pub fn new(rate_scale: f64, order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self {
            first: 0.25 / rate_scale.max(1e-300),
            nodes,
            weights,
        }
    }

    /// Quadrature points `(u, w)` covering `[lower, upper]`.
    pub fn points(&self, lower: f64, upper: f64) -> Vec<(f64, f64)> {
        let length = upper - lower;
        let mut out = Vec::new();
        if length <= 0.0 {
            return out;
        }
        let mut a = 0.0;
        let mut b = self.first.min(length);
        loop {
            let half = 0.5 * (b - a);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let dist = a + half * (x + 1.0);
                out.push((upper - dist, half * w));
            }
            if b >= length {
                break;
            }
            a = b;
            b = (2.0 * b).min(length);
        }
        out
    }
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7–K15 panel for a vector-valued integrand; returns (Kronrod, |K - G|).
fn gk15(f: &mut dyn FnMut(f64) -> Vec<f64>, a: f64, b: f64) -> (Vec<f64>, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let dim = fc.len();
    let mut kron: Vec<f64> = fc.iter().map(|v| v * KRONROD_WEIGHTS[7]).collect();
    let mut gauss: Vec<f64> = fc.iter().map(|v| v * GAUSS_WEIGHTS[3]).collect();
    for j in 0..7 {
        let dx = half * KRONROD_NODES[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for d in 0..dim {
            let s = f1[d] + f2[d];
            kron[d] += KRONROD_WEIGHTS[j] * s;
            if j % 2 == 1 {
                gauss[d] += GAUSS_WEIGHTS[j / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for d in 0..dim {
        kron[d] *= half;
        gauss[d] *= half;
        err = err.max((kron[d] - gauss[d]).abs());
    }
    (kron, err)
}

/// Adaptive Gauss–Kronrod integration of a vector-valued function.
///
/// Panels are bisected until each panel's Kronrod/Gauss discrepancy is below
/// `tol` scaled by the panel's share of the interval.
pub fn adaptive_gk(f: &mut dyn FnMut(f64) -> Vec<f64>, a: f64, b: f64, tol: f64) -> Vec<f64> {
    fn recurse(
        f: &mut dyn FnMut(f64) -> Vec<f64>,
        a: f64,
        b: f64,
        tol: f64,
        depth: usize,
        out: &mut Vec<f64>,
    ) {
        let (est, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            if out.is_empty() {
                out.resize(est.len(), 0.0);
            }
            for (o, e) in out.iter_mut().zip(est) {
                *o += e;
            }
            return;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth - 1, out);
        recurse(f, mid, b, 0.5 * tol, depth - 1, out);
    }
    let mut out = Vec::new();
    recurse(f, a, b, tol, 40, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // ∫ x^14 = 2/15
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn geometric_panels_exponential() {
        let panels = GeometricPanels::new(12.0, 8);
        let v: f64 = panels
            .points(-40.0, 0.0)
            .iter()
            .map(|(u, w)| w * (12.0 * u).exp())
            .sum();
        assert!((v - 1.0 / 12.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_gaussian() {
        let mut f = |x: f64| vec![(-x * x / 2.0).exp(), x * x * (-x * x / 2.0).exp()];
        let v = adaptive_gk(&mut f, -12.0, 12.0, 1e-13);
        let z = (2.0 * PI).sqrt();
        assert!((v[0] - z).abs() < 1e-12);
        assert!((v[1] - z).abs() < 1e-12);
    }
}
