//! Euler–Maruyama simulation of `dφ = −∂S/∂φ dt + √2 dW` and equilibrium
//! moment estimates with blocking errors.
//!
//! Randomness: trajectory `i` of a run seeded with `seed` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `i`; each step consumes one
//! standard normal per site, sites in increasing order.

use crate::feynman::{KernelKind, Theory};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

/// `|φ|∞` above which a trajectory is declared diverged.
pub const DIVERGENCE_BOUND: f64 = 1e8;
/// Number of blocks in the blocking error estimate.
pub const BLOCKS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LangevinError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("trajectory diverged at step {step}")]
    Diverged { step: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Time step `h`.
    pub step: f64,
    pub burn_in: u64,
    pub samples: u64,
    /// Steps between recorded samples.
    pub thin: u64,
    pub seed: u64,
    /// Starting point; zero when `None`.
    pub initial: Option<Vec<f64>>,
}

impl SimConfig {
    pub fn new(step: f64, burn_in: u64, samples: u64, thin: u64, seed: u64) -> Self {
        Self {
            step,
            burn_in,
            samples,
            thin,
            seed,
            initial: None,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<(), LangevinError> {
        let bad = |m: &str| Err(LangevinError::InvalidConfig(m.into()));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step must be positive");
        }
        if self.samples == 0 {
            return bad("samples must be at least 1");
        }
        if self.thin == 0 {
            return bad("thin must be at least 1");
        }
        if let Some(init) = &self.initial {
            if init.len() != dim {
                return bad("initial state has the wrong dimension");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Sample count corrected for autocorrelation.
    pub n_effective: f64,
}

/// Precomputed force terms of the interaction.
enum Force {
    Local { g: f64, power: i32 },
    Dense { g: f64, arity: usize, tensor: Vec<f64> },
}

struct Dynamics {
    n: usize,
    a: Vec<f64>,
    forces: Vec<Force>,
}

impl Dynamics {
    fn new(theory: &Theory) -> Self {
        let n = theory.dim();
        let m = theory.op().matrix();
        let a = (0..n * n).map(|i| m[(i / n, i % n)]).collect();
        let forces = theory
            .kernels()
            .iter()
            .map(|k| match &k.kind {
                KernelKind::Local => Force::Local {
                    g: k.coupling,
                    power: k.arity as i32 - 1,
                },
                KernelKind::Dense(t) => Force::Dense {
                    g: k.coupling,
                    arity: k.arity,
                    tensor: t.clone(),
                },
            })
            .collect();
        Self { n, a, forces }
    }

    fn drift_into(&self, phi: &[f64], out: &mut [f64]) {
        let n = self.n;
        for x in 0..n {
            out[x] = -(0..n).map(|y| self.a[x * n + y] * phi[y]).sum::<f64>();
        }
        for f in &self.forces {
            match f {
                Force::Local { g, power } => {
                    for x in 0..n {
                        out[x] -= g * phi[x].powi(*power);
                    }
                }
                Force::Dense { g, arity, tensor } => {
                    // first slot is x, the remaining arity−1 slots contract with φ
                    let block = n.pow(*arity as u32 - 1);
                    for x in 0..n {
                        let mut s = 0.0;
                        for (r, &entry) in tensor[x * block..(x + 1) * block].iter().enumerate() {
                            let mut prod = entry;
                            let mut rest = r;
                            for _ in 1..*arity {
                                prod *= phi[rest % n];
                                rest /= n;
                            }
                            s += prod;
                        }
                        out[x] -= g * s;
                    }
                }
            }
        }
    }
}

/// `−∂S/∂φ = −Aφ − Σ_k g_k Σ K_k(x, y, …) φ_y…`.
pub fn drift(theory: &Theory, phi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; phi.len()];
    Dynamics::new(theory).drift_into(phi, &mut out);
    out
}

/// Runs one trajectory and calls `record(step, φ)` on every kept sample.
pub fn simulate_with(
    theory: &Theory,
    cfg: &SimConfig,
    stream: u64,
    mut record: impl FnMut(u64, &[f64]),
) -> Result<(), LangevinError> {
    let n = theory.dim();
    cfg.validate(n)?;
    let dynamics = Dynamics::new(theory);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut phi = cfg.initial.clone().unwrap_or_else(|| vec![0.0; n]);
    let mut force = vec![0.0; n];
    let h = cfg.step;
    let noise = (2.0 * h).sqrt();
    let total = cfg.burn_in + cfg.samples * cfg.thin;
    // steps left until the next recorded sample
    let mut countdown = cfg.burn_in + cfg.thin;
    for step in 1..=total {
        dynamics.drift_into(&phi, &mut force);
        let mut big = false;
        for x in 0..n {
            let eta: f64 = StandardNormal.sample(&mut rng);
            phi[x] += h * force[x] + noise * eta;
            big |= !(phi[x].abs() <= DIVERGENCE_BOUND);
        }
        if big {
            return Err(LangevinError::Diverged { step });
        }
        countdown -= 1;
        if countdown == 0 {
            record(step, &phi);
            countdown = cfg.thin;
        }
    }
    Ok(())
}

/// The kept samples of trajectory 0.
pub fn simulate(theory: &Theory, cfg: &SimConfig) -> Result<Vec<Vec<f64>>, LangevinError> {
    let mut out = Vec::with_capacity(cfg.samples as usize);
    simulate_with(theory, cfg, 0, |_, phi| out.push(phi.to_vec()))?;
    Ok(out)
}

/// Blocked time averages of `Π_{x ∈ m} φ_x` for each monomial `m`, from trajectory `stream`.
pub fn equilibrium_moments_on_stream(
    theory: &Theory,
    cfg: &SimConfig,
    monomials: &[Vec<usize>],
    stream: u64,
) -> Result<Vec<MomentEstimate>, LangevinError> {
    if let Some(&bad) = monomials.iter().flatten().find(|&&x| x >= theory.dim()) {
        return Err(LangevinError::InvalidConfig(format!("site {bad} out of range")));
    }
    let samples = cfg.samples;
    let blocks = (BLOCKS as u64).min(samples) as usize;
    let mut sums = vec![vec![0.0; blocks]; monomials.len()];
    let mut sq = vec![0.0; monomials.len()];
    let mut counts = vec![0u64; blocks];
    let mut k = 0u64;
    simulate_with(theory, cfg, stream, |_, phi| {
        let b = (k * blocks as u64 / samples) as usize;
        counts[b] += 1;
        for (i, m) in monomials.iter().enumerate() {
            let v: f64 = m.iter().map(|&x| phi[x]).product();
            sums[i][b] += v;
            sq[i] += v * v;
        }
        k += 1;
    })?;
    let n = samples as f64;
    Ok(sums
        .iter()
        .zip(&sq)
        .map(|(s, &sq)| {
            let value = s.iter().sum::<f64>() / n;
            let var = (sq / n - value * value).max(0.0);
            if blocks < 2 {
                return MomentEstimate {
                    value,
                    std_error: f64::INFINITY,
                    n_effective: 1.0,
                };
            }
            let spread: f64 = s
                .iter()
                .zip(&counts)
                .map(|(&bs, &c)| (bs / c as f64 - value).powi(2))
                .sum();
            let std_error = (spread / (blocks * (blocks - 1)) as f64).sqrt();
            let n_effective = if std_error > 0.0 { (var / (std_error * std_error)).min(n) } else { n };
            MomentEstimate {
                value,
                std_error,
                n_effective,
            }
        })
        .collect())
}

/// Estimates from trajectory 0 of `cfg`.
pub fn equilibrium_moments(
    theory: &Theory,
    cfg: &SimConfig,
    monomials: &[Vec<usize>],
) -> Result<Vec<MomentEstimate>, LangevinError> {
    equilibrium_moments_on_stream(theory, cfg, monomials, 0)
}

/// Runs `chains` independent trajectories in parallel and pools them with
/// inverse-variance weights.
pub fn pooled_moments(
    theory: &Theory,
    cfg: &SimConfig,
    monomials: &[Vec<usize>],
    chains: u64,
) -> Result<Vec<MomentEstimate>, LangevinError> {
    let runs: Vec<Vec<MomentEstimate>> = (0..chains.max(1))
        .into_par_iter()
        .map(|c| equilibrium_moments_on_stream(theory, cfg, monomials, c))
        .collect::<Result<_, _>>()?;
    Ok((0..monomials.len())
        .map(|i| pool(&runs.iter().map(|r| r[i]).collect::<Vec<_>>()))
        .collect())
}

/// Inverse-variance weighted mean of independent estimates.
pub fn pool(estimates: &[MomentEstimate]) -> MomentEstimate {
    let mut w_sum = 0.0;
    let mut v_sum = 0.0;
    let n_effective = estimates.iter().map(|e| e.n_effective).sum();
    for e in estimates {
        let w = 1.0 / (e.std_error * e.std_error).max(f64::MIN_POSITIVE);
        w_sum += w;
        v_sum += w * e.value;
    }
    MomentEstimate {
        value: v_sum / w_sum,
        std_error: (1.0 / w_sum).sqrt(),
        n_effective,
    }
}
