use super::CombinatorialMap;
use std::fmt;

/// Serialization of the canonically relabeled map; equal keys mean isomorphic
/// maps with the external order preserved.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub bytes: Vec<u8>,
}

/// Breadth-first relabeling from the externals in order, following `alpha`
/// before `sigma`. Returns `None` if some dart is unreachable from every
/// external (a vacuum component).
pub(crate) fn bfs_labels(sigma: &[usize], alpha: &[usize], externals: &[usize]) -> Option<Vec<usize>> {
    let d = sigma.len();
    let mut label = vec![usize::MAX; d];
    let mut queue = Vec::with_capacity(d);
    for (i, &e) in externals.iter().enumerate() {
        label[e] = i;
        queue.push(e);
    }
    let mut next = externals.len();
    let mut head = 0;
    while head < queue.len() {
        let h = queue[head];
        head += 1;
        for x in [alpha[h], sigma[h]] {
            if label[x] == usize::MAX {
                label[x] = next;
                next += 1;
                queue.push(x);
            }
        }
    }
    (next == d).then_some(label)
}

pub(crate) fn key_from_labels(sigma: &[usize], alpha: &[usize], n_external: usize, label: &[usize]) -> CanonicalKey {
    let d = sigma.len();
    let mut s = vec![0u32; d];
    let mut a = vec![0u32; d];
    for h in 0..d {
        s[label[h]] = label[sigma[h]] as u32;
        a[label[h]] = label[alpha[h]] as u32;
    }
    let mut bytes = Vec::with_capacity(8 + 8 * d);
    bytes.extend_from_slice(&(n_external as u32).to_be_bytes());
    bytes.extend_from_slice(&(d as u32).to_be_bytes());
    for x in s.into_iter().chain(a) {
        bytes.extend_from_slice(&x.to_be_bytes());
    }
    CanonicalKey { bytes }
}

impl CanonicalKey {
    fn word(&self, i: usize) -> usize {
        let b = &self.bytes[4 * i..4 * i + 4];
        u32::from_be_bytes([b[0], b[1], b[2], b[3]]) as usize
    }

    /// The canonical representative encoded by this key.
    pub fn to_map(&self) -> CombinatorialMap {
        let n = self.word(0);
        let d = self.word(1);
        let sigma = (0..d).map(|h| self.word(2 + h)).collect();
        let alpha = (0..d).map(|h| self.word(2 + d + h)).collect();
        CombinatorialMap::new(sigma, alpha, (0..n).collect()).expect("key encodes a valid map")
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_map())
    }
}

impl CombinatorialMap {
    /// Representative with externals at `0..n` and darts numbered in BFS order.
    pub fn canonical_form(&self) -> CombinatorialMap {
        self.canonical_key().to_map()
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        let label = bfs_labels(self.sigma(), self.alpha(), self.externals())
            .expect("validated maps have no vacuum component");
        key_from_labels(self.sigma(), self.alpha(), self.n_external(), &label)
    }
}
