//! Finite-dimensional positive operators and the time integrals built on them.
//!
//! An [`Operator`] is a symmetric positive-definite matrix `A` with a cached
//! eigen-decomposition `A = U diag(λ) Uᵀ`. Every kernel the engine needs is a
//! spectral function of `A`:
//!
//! * heat kernel `e^{-tA}`,
//! * covariance `C = A⁻¹ = ∫₀^∞ e^{-tA} dt`,
//! * noise propagator `e^{-|t-s|A} / A`.

mod poset;
mod time;

pub use poset::{simplex_integral_bounded, simplex_integral_value, ForestPoset};
pub use time::{
    gap_crossings, integrate_linear_extension, integrate_ordered_quadrature, GapProduct,
    TimedEdge,
};

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

/// Relative tolerance on `|A - Aᵀ|`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative tolerance on `|U Λ Uᵀ - A|`.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Eigenvalues at or below this fraction of `λ_max` count as zero modes.
pub const ZERO_MODE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("matrix must be non-empty")]
    Empty,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive definite (eigenvalue {eigenvalue:e} <= {threshold:e})")]
    NotPositiveDefinite { eigenvalue: f64, threshold: f64 },
    #[error("eigen-decomposition does not reconstruct the matrix (relative residual {residual:e})")]
    Reconstruction { residual: f64 },
    #[error("heat kernel requested at negative time {0}")]
    NegativeTime(f64),
    #[error("time gap {gap} is crossed by no edge")]
    EmptyGap { gap: usize },
    #[error("rate {0} is not strictly positive")]
    NonPositiveRate(f64),
}

/// Symmetric positive-definite operator with its spectral decomposition.
#[derive(Debug, Clone)]
pub struct Operator {
    matrix: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

/// Validates `matrix` and builds its [`Operator`].
pub fn spd_build(matrix: DMatrix<f64>) -> Result<Operator, OperatorError> {
    Operator::new(matrix)
}

impl Operator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self, OperatorError> {
        let (rows, cols) = matrix.shape();
        if rows == 0 || cols == 0 {
            return Err(OperatorError::Empty);
        }
        if rows != cols {
            return Err(OperatorError::NotSquare { rows, cols });
        }
        for row in 0..rows {
            for col in 0..cols {
                if !matrix[(row, col)].is_finite() {
                    return Err(OperatorError::NonFinite { row, col });
                }
            }
        }
        let scale = matrix.amax();
        let asymmetry = (&matrix - matrix.transpose()).amax();
        if asymmetry > SYMMETRY_TOL * scale {
            return Err(OperatorError::NotSymmetric {
                asymmetry: if scale > 0.0 { asymmetry / scale } else { asymmetry },
            });
        }
        let symmetric = (&matrix + matrix.transpose()) * 0.5;
        let eigen = SymmetricEigen::new(symmetric.clone());

        let n = rows;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eigen.eigenvalues[k]).collect();
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (col, &k) in order.iter().enumerate() {
            let mut v = eigen.eigenvectors.column(k).into_owned();
            // Sign convention: first non-negligible component is positive.
            if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-12) {
                if first < 0.0 {
                    v.neg_mut();
                }
            }
            eigenvectors.set_column(col, &v);
        }

        let lambda_max = eigenvalues[n - 1];
        let threshold = ZERO_MODE_TOL * lambda_max.abs();
        if eigenvalues[0] <= threshold || lambda_max <= 0.0 {
            return Err(OperatorError::NotPositiveDefinite {
                eigenvalue: eigenvalues[0],
                threshold,
            });
        }

        let op = Self {
            matrix: symmetric,
            eigenvalues,
            eigenvectors,
        };
        let residual = (op.spectral(|l| l) - &op.matrix).amax() / scale;
        if residual > RECONSTRUCTION_TOL {
            return Err(OperatorError::Reconstruction { residual });
        }
        Ok(op)
    }

    /// Builds an operator from `n*n` row-major entries.
    pub fn from_row_major(n: usize, entries: &[f64]) -> Result<Self, OperatorError> {
        if n == 0 {
            return Err(OperatorError::Empty);
        }
        if entries.len() != n * n {
            return Err(OperatorError::NotSquare {
                rows: n,
                cols: entries.len() / n,
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    /// The 1x1 operator `[[a]]`.
    pub fn scalar(a: f64) -> Result<Self, OperatorError> {
        Self::new(DMatrix::from_element(1, 1, a))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthogonal matrix whose columns are the eigenvectors, in eigenvalue order.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// `U diag(f(λ_k)) Uᵀ`.
    pub fn spectral(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.dim();
        let u = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        DMatrix::from_fn(n, n, |x, y| {
            (0..n).map(|k| u[(x, k)] * weights[k] * u[(y, k)]).sum()
        })
    }

    /// `e^{-tA}`; identity at `t = 0`.
    pub fn heat_kernel(&self, t: f64) -> Result<DMatrix<f64>, OperatorError> {
        if t < 0.0 {
            return Err(OperatorError::NegativeTime(t));
        }
        Ok(self.spectral(|l| (-t * l).exp()))
    }

    /// `C = A⁻¹`.
    pub fn covariance(&self) -> DMatrix<f64> {
        self.spectral(|l| 1.0 / l)
    }

    /// `e^{-|t-s|A} / A`, the free stochastic two-point function.
    pub fn noise_propagator(&self, t: f64, s: f64) -> DMatrix<f64> {
        let gap = (t - s).abs();
        self.spectral(|l| (-gap * l).exp() / l)
    }
}
