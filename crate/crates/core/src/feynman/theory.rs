use crate::operator::Operator;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("kernel arity {0} is below 2")]
    ArityTooSmall(usize),
    #[error("two kernels share arity {0}")]
    DuplicateArity(usize),
    #[error("dense kernel of arity {arity} needs {expected} entries, got {got}")]
    TensorSize {
        arity: usize,
        expected: usize,
        got: usize,
    },
    #[error("external site {site} is outside 0..{dim}")]
    SiteOutOfRange { site: usize, dim: usize },
    #[error("kernel entry is not finite")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// `V(x¹..x^{q+1}) = Π δ`, scaled by the coupling.
    Local,
    /// Fully symmetrized tensor over sites, row-major, scaled by the coupling.
    Dense(Vec<f64>),
}

/// One interaction monomial `V(φ) = (g/(q+1)) Σ K(x¹..x^{q+1}) φ_{x¹}…φ_{x^{q+1}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexKernel {
    pub arity: usize,
    pub coupling: f64,
    pub kind: KernelKind,
}

impl VertexKernel {
    pub fn local(arity: usize, g: f64) -> Self {
        Self {
            arity,
            coupling: g,
            kind: KernelKind::Local,
        }
    }

    /// Dense kernel; the tensor is symmetrized over all index permutations.
    pub fn dense(arity: usize, g: f64, tensor: Vec<f64>) -> Self {
        Self {
            arity,
            coupling: g,
            kind: KernelKind::Dense(tensor),
        }
    }

    /// Unscaled kernel entry at the given sites.
    pub fn entry(&self, n: usize, sites: &[usize]) -> f64 {
        match &self.kind {
            KernelKind::Local => {
                if sites.iter().all(|&s| s == sites[0]) {
                    1.0
                } else {
                    0.0
                }
            }
            KernelKind::Dense(t) => t[flat_index(n, sites)],
        }
    }
}

pub(crate) fn flat_index(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

fn symmetrize(n: usize, arity: usize, t: &[f64]) -> Vec<f64> {
    let perms = permutations(arity);
    let total = n.pow(arity as u32);
    let mut out = vec![0.0; total];
    let mut idx = vec![0; arity];
    let mut permuted = vec![0; arity];
    for (flat, slot) in out.iter_mut().enumerate() {
        let mut r = flat;
        for i in (0..arity).rev() {
            idx[i] = r % n;
            r /= n;
        }
        let mut s = 0.0;
        for p in &perms {
            for i in 0..arity {
                permuted[i] = idx[p[i]];
            }
            s += t[flat_index(n, &permuted)];
        }
        *slot = s / perms.len() as f64;
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

/// `A`, the interaction kernels, and the external sites `x¹..xⁿ`.
#[derive(Debug, Clone)]
pub struct Theory {
    op: Operator,
    kernels: Vec<VertexKernel>,
    external_sites: Vec<usize>,
    /// Per kernel: `−g·K` transformed to the eigenbasis of `A`, row-major over eigenindices.
    eigen_vertices: Vec<Vec<f64>>,
}

impl Theory {
    pub fn new(
        op: Operator,
        kernels: Vec<VertexKernel>,
        external_sites: Vec<usize>,
    ) -> Result<Self, TheoryError> {
        let n = op.dim();
        let mut kernels = kernels;
        for k in kernels.iter_mut() {
            if k.arity < 2 {
                return Err(TheoryError::ArityTooSmall(k.arity));
            }
            if !k.coupling.is_finite() {
                return Err(TheoryError::NonFinite);
            }
            if let KernelKind::Dense(t) = &mut k.kind {
                let expected = n.pow(k.arity as u32);
                if t.len() != expected {
                    return Err(TheoryError::TensorSize {
                        arity: k.arity,
                        expected,
                        got: t.len(),
                    });
                }
                if t.iter().any(|x| !x.is_finite()) {
                    return Err(TheoryError::NonFinite);
                }
                *t = symmetrize(n, k.arity, t);
            }
        }
        let mut arities: Vec<usize> = kernels.iter().map(|k| k.arity).collect();
        arities.sort_unstable();
        for w in arities.windows(2) {
            if w[0] == w[1] {
                return Err(TheoryError::DuplicateArity(w[0]));
            }
        }
        if let Some(&site) = external_sites.iter().find(|&&s| s >= n) {
            return Err(TheoryError::SiteOutOfRange { site, dim: n });
        }
        let eigen_vertices = kernels.iter().map(|k| eigen_vertex(&op, k)).collect();
        Ok(Self {
            op,
            kernels,
            external_sites,
            eigen_vertices,
        })
    }

    /// Same theory with different external sites.
    pub fn with_externals(&self, external_sites: Vec<usize>) -> Result<Self, TheoryError> {
        let n = self.dim();
        if let Some(&site) = external_sites.iter().find(|&&s| s >= n) {
            return Err(TheoryError::SiteOutOfRange { site, dim: n });
        }
        Ok(Self {
            external_sites,
            ..self.clone()
        })
    }

    /// Same theory with every coupling set to 1.
    pub fn with_unit_couplings(&self) -> Self {
        let kernels: Vec<VertexKernel> = self
            .kernels
            .iter()
            .map(|k| VertexKernel {
                coupling: 1.0,
                ..k.clone()
            })
            .collect();
        let eigen_vertices = kernels.iter().map(|k| eigen_vertex(&self.op, k)).collect();
        Self {
            op: self.op.clone(),
            kernels,
            external_sites: self.external_sites.clone(),
            eigen_vertices,
        }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn kernels(&self) -> &[VertexKernel] {
        &self.kernels
    }

    pub fn external_sites(&self) -> &[usize] {
        &self.external_sites
    }

    pub fn n_external(&self) -> usize {
        self.external_sites.len()
    }

    pub fn arities(&self) -> Vec<usize> {
        self.kernels.iter().map(|k| k.arity).collect()
    }

    pub fn kernel_index(&self, arity: usize) -> Option<usize> {
        self.kernels.iter().position(|k| k.arity == arity)
    }

    /// `−g·K` in the eigenbasis, indexed row-major by eigenindices.
    pub fn eigen_vertex(&self, kernel: usize) -> &[f64] {
        &self.eigen_vertices[kernel]
    }
}

/// `Ṽ(k¹..k^d) = −g Σ_x K(x¹..x^d) Π_i U_{x^i k^i}`.
fn eigen_vertex(op: &Operator, k: &VertexKernel) -> Vec<f64> {
    let n = op.dim();
    let u = op.eigenvectors();
    let d = k.arity;
    let total = n.pow(d as u32);
    let mut out = vec![0.0; total];
    match &k.kind {
        KernelKind::Local => {
            let mut idx = vec![0; d];
            for (flat, slot) in out.iter_mut().enumerate() {
                let mut r = flat;
                for i in (0..d).rev() {
                    idx[i] = r % n;
                    r /= n;
                }
                *slot = -k.coupling
                    * (0..n)
                        .map(|x| idx.iter().map(|&ki| u[(x, ki)]).product::<f64>())
                        .sum::<f64>();
            }
        }
        KernelKind::Dense(t) => {
            // one mode product per tensor slot
            let mut cur = t.clone();
            for slot in 0..d {
                let stride = n.pow((d - 1 - slot) as u32);
                let mut next = vec![0.0; total];
                for (flat, v) in next.iter_mut().enumerate() {
                    let kk = (flat / stride) % n;
                    let base = flat - kk * stride;
                    *v = (0..n).map(|x| cur[base + x * stride] * u[(x, kk)]).sum();
                }
                cur = next;
            }
            for (o, c) in out.iter_mut().zip(cur) {
                *o = -k.coupling * c;
            }
        }
    }
    out
}
