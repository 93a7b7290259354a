use super::{enumerate_plane_trees, enumerate_recursive_trees, unlabeled_classes};
use crate::operator::simplex_integral_bounded;

/// Polynomial `f(φ) = Σ_q f_q φ^q` with `f_q = f^{(q)}(0)/q!`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorFunction {
    pub coeffs: Vec<f64>,
}

impl TaylorFunction {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeff(&self, q: usize) -> f64 {
        self.coeffs.get(q).copied().unwrap_or(0.0)
    }

    /// `f^{(q)}(0)`.
    pub fn derivative_at_zero(&self, q: usize) -> f64 {
        self.coeff(q) * (1..=q).map(|i| i as f64).product::<f64>()
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * phi + c)
    }
}

/// Which tree sum produces the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// `Σ_p t^p/p! Σ_T Π f^{(d−1)}` over recursive trees.
    Recursive,
    /// `Σ_𝔱 t^p/p! α(𝔱) Π f^{(d−1)}` over unlabeled trees.
    Unlabeled,
    /// `Σ_𝒯 Π f_{d−1} · ∫ Π θ` over plane trees.
    Plane,
}

/// Taylor coefficients `c_0..=c_p` of `φ(t)`; `c_0 = 0`.
pub fn series_coefficients(f: &TaylorFunction, p: usize, kind: SeriesKind) -> Vec<f64> {
    let mut c = vec![0.0; p + 1];
    for (n, slot) in c.iter_mut().enumerate().skip(1) {
        let inv_fact = 1.0 / (1..=n).map(|i| i as f64).product::<f64>();
        *slot = match kind {
            SeriesKind::Recursive => {
                inv_fact
                    * enumerate_recursive_trees(n)
                        .iter()
                        .map(|t| t.child_counts().iter().map(|&k| f.derivative_at_zero(k)).product::<f64>())
                        .sum::<f64>()
            }
            SeriesKind::Unlabeled => {
                inv_fact
                    * unlabeled_classes(n)
                        .iter()
                        .map(|(t, &alpha)| {
                            alpha as f64 * t.child_counts().iter().map(|&k| f.derivative_at_zero(k)).product::<f64>()
                        })
                        .sum::<f64>()
            }
            SeriesKind::Plane => enumerate_plane_trees(n - 1)
                .iter()
                .map(|t| {
                    let vol = simplex_integral_bounded(&t.poset());
                    let vol = *vol.numer() as f64 / *vol.denom() as f64;
                    vol * t.child_counts().iter().map(|&k| f.coeff(k)).product::<f64>()
                })
                .sum(),
        };
    }
    c
}

/// Tree series of `φ(t)` truncated at order `p`.
pub fn ode_tree_series(f: &TaylorFunction, t: f64, p: usize, kind: SeriesKind) -> f64 {
    series_coefficients(f, p, kind)
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * t + c)
}

/// Adaptive Dormand–Prince 5(4) solution of `dφ/dt = f(φ)`, `φ(0) = 0`, at time `t ≥ 0`.
pub fn dormand_prince(f: &TaylorFunction, t: f64, abs_tol: f64) -> f64 {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut y = 0.0;
    let mut s = 0.0;
    let mut h = (t / 100.0).max(1e-6);
    while s < t {
        h = h.min(t - s);
        let mut k = [0.0; 7];
        for i in 0..7 {
            let yi = y + h * (0..i).map(|j| A[i][j] * k[j]).sum::<f64>();
            k[i] = f.eval(yi);
        }
        let y5 = y + h * (0..7).map(|i| B5[i] * k[i]).sum::<f64>();
        let y4 = y + h * (0..7).map(|i| B4[i] * k[i]).sum::<f64>();
        let err = (y5 - y4).abs();
        if err <= abs_tol || h < 1e-12 {
            s += h;
            y = y5;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * (abs_tol / err).powf(0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    y
}

/// Power-series solution `Σ M_n t^n` of `Φ' = Σ_q a_q Φ^q`, `Φ(0) = 0`, up to `degree`.
fn power_series_solution(a: &[f64], degree: usize) -> Vec<f64> {
    let q_max = a.len().saturating_sub(1);
    let mut m = vec![0.0; degree + 1];
    // pow[q][k] = [t^k] Φ^q
    let mut pow = vec![vec![0.0; degree + 1]; q_max + 1];
    pow[0][0] = 1.0;
    for n in 1..=degree {
        let k = n - 1;
        for q in 1..=q_max {
            pow[q][k] = if q == 1 {
                m[k]
            } else {
                (1..=k).map(|i| m[i] * pow[q - 1][k - i]).sum()
            };
        }
        m[n] = (0..=q_max).map(|q| a[q] * pow[q][k]).sum::<f64>() / n as f64;
    }
    m
}

/// Bound on `|φ(t) − Σ_{n≤p} c_n t^n|` from the majorant `Φ' = Σ |f_q| Φ^q`.
///
/// Returns infinity when the majorant series does not visibly converge at `t`.
pub fn majorant_tail(f: &TaylorFunction, t: f64, p: usize) -> f64 {
    const DEGREE: usize = 400;
    let a: Vec<f64> = f.coeffs.iter().map(|c| c.abs()).collect();
    let m = power_series_solution(&a, DEGREE);
    let t = t.abs();
    let mut tail: f64 = (p + 1..=DEGREE).map(|n| m[n] * t.powi(n as i32)).sum();
    // geometric estimate of the rest; two-step ratio since odd or even terms may vanish
    let term = |n: usize| m[n] * t.powi(n as i32);
    let last = term(DEGREE).max(term(DEGREE - 1));
    let before = term(DEGREE - 2).max(term(DEGREE - 3));
    if last > 0.0 {
        let ratio = (last / before).sqrt();
        if !(ratio < 0.999) {
            return f64::INFINITY;
        }
        tail += 2.0 * last * ratio / (1.0 - ratio);
    }
    tail
}
