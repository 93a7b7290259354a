use super::canonical::{bfs_labels, key_from_labels};
use super::{CanonicalKey, CombinatorialMap, MapError};
use rayon::prelude::*;
use std::collections::HashMap;

/// Largest dart count enumerated unless the caller raises it.
pub const DEFAULT_MAX_DARTS: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub n_external: usize,
    /// Admissible internal vertex degrees.
    pub degrees: Vec<usize>,
    /// Number of internal vertices.
    pub p: usize,
    pub connected_only: bool,
    pub max_darts: usize,
}

impl EnumerateOptions {
    pub fn new(n_external: usize, degrees: Vec<usize>, p: usize) -> Self {
        Self {
            n_external,
            degrees,
            p,
            connected_only: false,
            max_darts: DEFAULT_MAX_DARTS,
        }
    }

    pub fn connected(mut self) -> Self {
        self.connected_only = true;
        self
    }
}

/// One unlabeled map together with the number of labeled pairings producing it.
#[derive(Debug, Clone)]
pub struct MapClass {
    pub key: CanonicalKey,
    pub map: CombinatorialMap,
    /// Internal degrees, non-decreasing.
    pub degrees: Vec<usize>,
    pub multiplicity: u64,
}

impl MapClass {
    pub fn expected_multiplicity(&self) -> u64 {
        expected_multiplicity(&self.degrees)
    }

    pub fn law_holds(&self) -> bool {
        self.multiplicity == self.expected_multiplicity()
    }
}

/// `Π_q m_q! · Π_v d_v` for a degree sequence with `m_q` vertices of degree `q`;
/// equals `p!·d^p` when all degrees are `d`.
pub fn expected_multiplicity(degrees: &[usize]) -> u64 {
    let mut counts: HashMap<usize, u64> = HashMap::new();
    for &d in degrees {
        *counts.entry(d).or_default() += 1;
    }
    let perms: u64 = counts.values().map(|&m| (1..=m).product::<u64>()).product();
    perms * degrees.iter().map(|&d| d as u64).product::<u64>()
}

fn degree_sequences(allowed: &[usize], p: usize) -> Vec<Vec<usize>> {
    fn rec(allowed: &[usize], p: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in from..allowed.len() {
            cur.push(allowed[i]);
            rec(allowed, p, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(allowed, p, 0, &mut Vec::new(), &mut out);
    out
}

/// All unlabeled maps with the given externals and internal vertices, one
/// [`MapClass`] per canonical key, sorted by degree sequence then key.
pub fn enumerate_maps(opts: &EnumerateOptions) -> Result<Vec<MapClass>, MapError> {
    let mut allowed = opts.degrees.clone();
    allowed.sort_unstable();
    allowed.dedup();
    if let Some(&d) = allowed.iter().find(|&&d| d < 2) {
        return Err(MapError::DegreeTooSmall { degree: d });
    }
    if opts.n_external == 0 {
        return Ok(Vec::new());
    }
    let sequences = if opts.p == 0 {
        vec![Vec::new()]
    } else {
        degree_sequences(&allowed, opts.p)
    };
    let mut admissible = Vec::new();
    let mut odd = None;
    for seq in sequences {
        let darts = opts.n_external + seq.iter().sum::<usize>();
        if darts % 2 == 1 {
            odd = Some(darts);
            continue;
        }
        if darts > opts.max_darts {
            return Err(MapError::TooManyDarts {
                darts,
                cap: opts.max_darts,
            });
        }
        admissible.push(seq);
    }
    if admissible.is_empty() {
        if let Some(darts) = odd {
            return Err(MapError::DegreeParityImpossible { darts });
        }
    }
    let mut out = Vec::new();
    for seq in admissible {
        out.extend(enumerate_sequence(opts, &seq));
    }
    for class in &out {
        if !class.law_holds() {
            log::warn!(
                "multiplicity {} differs from expected {} for {}",
                class.multiplicity,
                class.expected_multiplicity(),
                class.key
            );
        }
    }
    Ok(out)
}

fn enumerate_sequence(opts: &EnumerateOptions, seq: &[usize]) -> Vec<MapClass> {
    let n = opts.n_external;
    let darts = n + seq.iter().sum::<usize>();
    let mut sigma: Vec<usize> = (0..darts).collect();
    let mut start = n;
    for &d in seq {
        for i in 0..d {
            sigma[start + i] = start + (i + 1) % d;
        }
        start += d;
    }
    let externals: Vec<usize> = (0..n).collect();
    let ctx = Ctx {
        sigma: &sigma,
        externals: &externals,
        connected_only: opts.connected_only,
    };
    let counts = (1..darts)
        .into_par_iter()
        .map(|first| {
            let mut alpha = vec![usize::MAX; darts];
            alpha[0] = first;
            alpha[first] = 0;
            let mut counts = HashMap::new();
            ctx.pair(&mut alpha, &mut counts);
            counts
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_insert(0) += c;
            }
            a
        });
    let mut classes: Vec<MapClass> = counts
        .into_iter()
        .map(|(key, multiplicity)| MapClass {
            map: key.to_map(),
            key,
            degrees: seq.to_vec(),
            multiplicity,
        })
        .collect();
    classes.sort_by(|a, b| a.key.cmp(&b.key));
    classes
}

struct Ctx<'a> {
    sigma: &'a [usize],
    externals: &'a [usize],
    connected_only: bool,
}

impl Ctx<'_> {
    fn pair(&self, alpha: &mut [usize], counts: &mut HashMap<CanonicalKey, u64>) {
        let Some(h) = alpha.iter().position(|&x| x == usize::MAX) else {
            self.record(alpha, counts);
            return;
        };
        for partner in h + 1..alpha.len() {
            if alpha[partner] != usize::MAX {
                continue;
            }
            alpha[h] = partner;
            alpha[partner] = h;
            self.pair(alpha, counts);
            alpha[h] = usize::MAX;
            alpha[partner] = usize::MAX;
        }
    }

    fn record(&self, alpha: &[usize], counts: &mut HashMap<CanonicalKey, u64>) {
        let Some(label) = bfs_labels(self.sigma, alpha, self.externals) else {
            return;
        };
        if self.connected_only && bfs_labels(self.sigma, alpha, &self.externals[..1]).is_none() {
            return;
        }
        let key = key_from_labels(self.sigma, alpha, self.externals.len(), &label);
        *counts.entry(key).or_insert(0) += 1;
    }
}
