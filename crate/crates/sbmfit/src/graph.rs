//! Core matrix and label types.
//!
//! All matrices are dense, row-major and symmetric with a zero diagonal;
//! symmetry is enforced by construction (setters write both triangles).
//! Node and community indices are 0-based in memory; the text formats in
//! [`crate::io`] use 1-based ids.

use crate::error::{Result, SbmError};

/// Symmetric binary adjacency matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    bits: Vec<u8>,
}

impl AdjacencyMatrix {
    /// Empty graph on `n` nodes.
    pub fn new(n: usize) -> Self {
        AdjacencyMatrix { n, bits: vec![0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True when `{i, j}` is an edge. The diagonal is always false.
    #[inline]
    pub fn edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j] != 0
    }

    /// Set both `(i, j)` and `(j, i)`. Self-loops are not representable.
    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        assert_ne!(i, j, "self-loops are not representable");
        let v = present as u8;
        self.bits[i * self.n + j] = v;
        self.bits[j * self.n + i] = v;
    }

    /// Number of (unordered) edges.
    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum::<usize>() / 2
    }

    /// Iterator over the unordered edges, `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).filter(move |&j| self.edge(i, j)).map(move |j| (i, j)))
    }
}

/// Symmetric binary matrix marking which adjacency entries are observed.
/// By convention the diagonal is never observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingMask {
    n: usize,
    bits: Vec<u8>,
}

impl SamplingMask {
    /// Nothing observed.
    pub fn new(n: usize) -> Self {
        SamplingMask { n, bits: vec![0; n * n] }
    }

    /// Every off-diagonal entry observed.
    pub fn full(n: usize) -> Self {
        let mut m = SamplingMask::new(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m.bits[i * n + j] = 1;
                }
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn observed(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j] != 0
    }

    pub fn set_observed(&mut self, i: usize, j: usize, obs: bool) {
        assert_ne!(i, j, "the diagonal is never observed");
        let v = obs as u8;
        self.bits[i * self.n + j] = v;
        self.bits[j * self.n + i] = v;
    }

    /// Number of observed unordered pairs.
    pub fn observed_pairs(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum::<usize>() / 2
    }

    /// Sum of the full mask matrix (each observed pair counted twice).
    pub fn observed_entries(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    /// Iterator over observed unordered pairs, `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n)
            .flat_map(move |i| (i + 1..self.n).filter(move |&j| self.observed(i, j)).map(move |j| (i, j)))
    }
}

/// Symmetric matrix of connection-probability estimates in `[0, 1]`,
/// zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMatrix {
    n: usize,
    vals: Vec<f64>,
}

impl ThetaMatrix {
    pub fn zeros(n: usize) -> Self {
        ThetaMatrix { n, vals: vec![0.0; n * n] }
    }

    /// Build from a function of the unordered pair `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = ThetaMatrix::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                t.set_sym(i, j, f(i, j));
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.vals[i * self.n + j]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        assert_ne!(i, j, "the diagonal is fixed at zero");
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "probability out of range: {v}");
        let v = v.clamp(0.0, 1.0);
        self.vals[i * self.n + j] = v;
        self.vals[j * self.n + i] = v;
    }
}

/// Symmetric `k x k` matrix of inter-community connection probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    k: usize,
    vals: Vec<f64>,
}

impl BlockMatrix {
    /// All entries equal to `v`.
    pub fn constant(k: usize, v: f64) -> Self {
        BlockMatrix { k, vals: vec![v; k * k] }
    }

    /// Build from nested rows; must be square and symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(SbmError::InvalidParameter("block matrix must be non-empty".into()));
        }
        let mut m = BlockMatrix::constant(k, 0.0);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(SbmError::InvalidParameter(format!(
                    "block matrix row {a} has length {} (expected {k})",
                    row.len()
                )));
            }
            for (b, &v) in row.iter().enumerate() {
                m.vals[a * k + b] = v;
            }
        }
        for a in 0..k {
            for b in a + 1..k {
                if (m.get(a, b) - m.get(b, a)).abs() > 1e-12 {
                    return Err(SbmError::InvalidParameter(format!(
                        "block matrix is not symmetric at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.vals[a * self.k + b]
    }

    pub fn set_sym(&mut self, a: usize, b: usize, v: f64) {
        self.vals[a * self.k + b] = v;
        self.vals[b * self.k + a] = v;
    }

    /// Entrywise map preserving symmetry.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        BlockMatrix { k: self.k, vals: self.vals.iter().map(|&v| f(v)).collect() }
    }

    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        self.vals.iter().copied()
    }
}

/// Assignment of each node to one of `k` communities (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAssignment {
    k: usize,
    z: Vec<usize>,
}

impl LabelAssignment {
    pub fn new(z: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(SbmError::InvalidParameter("community count must be at least 1".into()));
        }
        if let Some((i, &bad)) = z.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(SbmError::Consistency(format!(
                "label {bad} of node {i} is outside 0..{k}"
            )));
        }
        Ok(LabelAssignment { k, z })
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.z[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.z
    }

    /// Community sizes.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0usize; self.k];
        for &l in &self.z {
            c[l] += 1;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_is_symmetric_with_zero_diagonal() {
        let mut a = AdjacencyMatrix::new(4);
        a.set_edge(0, 2, true);
        assert!(a.edge(2, 0) && a.edge(0, 2));
        assert!(!a.edge(1, 1));
        assert_eq!(a.edge_count(), 1);
        assert_eq!(a.edges().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn full_mask_counts() {
        let m = SamplingMask::full(5);
        assert_eq!(m.observed_pairs(), 10);
        assert_eq!(m.observed_entries(), 20);
        assert!(!m.observed(3, 3));
    }

    #[test]
    fn block_matrix_rejects_asymmetry() {
        let r = BlockMatrix::from_rows(&[vec![0.5, 0.1], vec![0.2, 0.5]]);
        assert!(matches!(r, Err(SbmError::InvalidParameter(_))));
    }

    #[test]
    fn labels_reject_out_of_range() {
        assert!(LabelAssignment::new(vec![0, 2], 2).is_err());
        let z = LabelAssignment::new(vec![0, 1, 1], 2).unwrap();
        assert_eq!(z.counts(), vec![1, 2]);
    }
}
