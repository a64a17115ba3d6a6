//! Undirected weighted graphs and the second eigenpair of the π-normalized
//! Laplacian `𝓛 = D_π^{-1/2} (D − A) D_π^{-1/2}`.
//!
//! `𝓛` always has the null vector `D_π^{1/2}·1`. The solvers here work in its
//! orthogonal complement, so the smallest eigenvalue they find is `λ₂`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypergraph::NodeWeights;

/// Symmetric weighted adjacency accumulator; parallel edges sum.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymmetricGraph {
    adj: Vec<BTreeMap<usize, f64>>,
    degrees: Vec<f64>,
}

impl SymmetricGraph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![BTreeMap::new(); n], degrees: vec![0.0; n] }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) {
        assert_ne!(u, v, "self-loops are not allowed");
        if w == 0.0 {
            return;
        }
        *self.adj[u].entry(v).or_insert(0.0) += w;
        *self.adj[v].entry(u).or_insert(0.0) += w;
        self.degrees[u] += w;
        self.degrees[v] += w;
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adj[u].get(&v).copied().unwrap_or(0.0)
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[v].iter().map(|(&u, &w)| (u, w))
    }

    /// Edges `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.range(u + 1..).map(move |(&v, &w)| (u, v, w)))
    }

    pub fn cut_mask(&self, mask: &[bool]) -> f64 {
        self.edges().filter(|&(u, v, _)| mask[u] != mask[v]).map(|(_, _, w)| w).sum()
    }

    /// `cut(S)/min(π(S), π(V \ S))`; infinite for a trivial side.
    pub fn pi_expansion_mask(&self, pi: &NodeWeights, mask: &[bool]) -> f64 {
        let inside = pi.of_mask(mask);
        let denom = inside.min(pi.total() - inside);
        if denom <= 0.0 || mask.iter().all(|&b| b) || !mask.iter().any(|&b| b) {
            return f64::INFINITY;
        }
        self.cut_mask(mask) / denom
    }

    /// Connected component label of each node, numbered by first occurrence.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }
}

/// `𝓛 = D_π^{-1/2} (D − A) D_π^{-1/2}` in compressed row form.
#[derive(Debug, Clone)]
pub struct NormalizedLaplacian {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    degrees: Vec<f64>,
    inv_sqrt_pi: Vec<f64>,
    null: Vec<f64>,
}

impl NormalizedLaplacian {
    pub fn new(graph: &SymmetricGraph, pi: &NodeWeights) -> Self {
        let n = graph.node_count();
        assert_eq!(pi.len(), n, "node weights do not match the graph");
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for v in 0..n {
            for (u, w) in graph.neighbors(v) {
                cols.push(u);
                vals.push(w);
            }
            row_start.push(cols.len());
        }
        let inv_sqrt_pi = pi.as_slice().iter().map(|p| 1.0 / p.sqrt()).collect();
        let norm = pi.total().sqrt();
        let null = pi.as_slice().iter().map(|p| p.sqrt() / norm).collect();
        Self { row_start, cols, vals, degrees: graph.degrees().to_vec(), inv_sqrt_pi, null }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Unit vector `D_π^{1/2}·1 / ‖D_π^{1/2}·1‖`.
    pub fn null_vector(&self) -> &[f64] {
        &self.null
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for v in 0..n {
            let mut acc = self.degrees[v] * x[v] * self.inv_sqrt_pi[v];
            for idx in self.row_start[v]..self.row_start[v + 1] {
                let u = self.cols[idx];
                acc -= self.vals[idx] * x[u] * self.inv_sqrt_pi[u];
            }
            out[v] = acc * self.inv_sqrt_pi[v];
        }
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for v in 0..n {
            m[(v, v)] = self.degrees[v] * self.inv_sqrt_pi[v] * self.inv_sqrt_pi[v];
            for idx in self.row_start[v]..self.row_start[v + 1] {
                let u = self.cols[idx];
                m[(v, u)] -= self.vals[idx] * self.inv_sqrt_pi[v] * self.inv_sqrt_pi[u];
            }
        }
        m
    }

    /// `D_π^{-1/2} y`, the vector whose entries are thresholded.
    pub fn unnormalize(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.inv_sqrt_pi).map(|(a, b)| a * b).collect()
    }

    /// Removes the null-vector component of `x` in place.
    pub fn deflate(&self, x: &mut [f64]) {
        let c = dot(x, &self.null);
        for (a, z) in x.iter_mut().zip(&self.null) {
            *a -= c * z;
        }
    }

    /// Gershgorin bound on the largest eigenvalue.
    pub fn spectral_bound(&self) -> f64 {
        (0..self.dim())
            .map(|v| {
                let off: f64 = (self.row_start[v]..self.row_start[v + 1])
                    .map(|idx| self.vals[idx] * self.inv_sqrt_pi[self.cols[idx]])
                    .sum();
                (self.degrees[v] * self.inv_sqrt_pi[v] + off) * self.inv_sqrt_pi[v]
            })
            .fold(0.0, f64::max)
    }

    /// `‖𝓛y − λy‖`.
    pub fn residual(&self, value: f64, y: &[f64]) -> f64 {
        let mut out = vec![0.0; y.len()];
        self.apply(y, &mut out);
        out.iter().zip(y).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (b, a) in y.iter_mut().zip(x) {
        *b += alpha * a;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenConfig {
    /// Residual target relative to `‖y‖`.
    pub tol: f64,
    pub max_applications: usize,
    /// Krylov subspace dimension per restart.
    pub krylov: usize,
    /// Problems up to this size are solved densely.
    pub dense_below: usize,
    pub seed: u64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self { tol: 1e-8, max_applications: 5000, krylov: 100, dense_below: 160, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit vector orthogonal to the null vector.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub applications: usize,
}

/// Second smallest eigenpair of `op`, assuming the underlying graph is
/// connected. The eigenvector's sign is fixed so its largest-magnitude entry
/// (lowest index on ties) is positive.
pub fn fiedler(op: &NormalizedLaplacian, warm: Option<&[f64]>, cfg: &EigenConfig) -> Result<EigenPair> {
    let n = op.dim();
    assert!(n >= 2, "need at least two nodes");
    let mut pair = if n <= cfg.dense_below { dense_fiedler(op) } else { lanczos(op, warm, cfg)? };
    let pivot = pair
        .vector
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, &v)| if v.abs() > best.1 * (1.0 + 1e-12) { (i, v.abs()) } else { best })
        .0;
    if pair.vector[pivot] < 0.0 {
        pair.vector.iter_mut().for_each(|v| *v = -*v);
    }
    if pair.residual > cfg.tol {
        return Err(Error::EigenNoConvergence { residual: pair.residual, applications: pair.applications });
    }
    Ok(pair)
}

fn dense_fiedler(op: &NormalizedLaplacian) -> EigenPair {
    let n = op.dim();
    let mut m = op.dense();
    // move the null direction above the spectrum
    let shift = 1.0 + (0..n).map(|i| m[(i, i)]).sum::<f64>() * 2.0;
    let z = DVector::from_column_slice(op.null_vector());
    m += &z * z.transpose() * shift;
    let eig = SymmetricEigen::new(m);
    let idx = eig.eigenvalues.imin();
    let mut y: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    op.deflate(&mut y);
    let len = norm(&y);
    y.iter_mut().for_each(|v| *v /= len);
    let value = eig.eigenvalues[idx];
    let residual = op.residual(value, &y);
    EigenPair { value, vector: y, residual, applications: 1 }
}

fn lanczos(op: &NormalizedLaplacian, warm: Option<&[f64]>, cfg: &EigenConfig) -> Result<EigenPair> {
    let n = op.dim();
    let dim = cfg.krylov.min(n - 1).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    if let Some(w) = warm.filter(|w| w.len() == n) {
        let scale = norm(w).max(f64::MIN_POSITIVE);
        for (s, x) in start.iter_mut().zip(w) {
            *s = x / scale + 1e-3 * *s;
        }
    }
    let mut applications = 0;
    let mut best: Option<EigenPair> = None;
    let mut out = vec![0.0; n];
    while applications < cfg.max_applications {
        op.deflate(&mut start);
        let len = norm(&start);
        if len == 0.0 {
            start = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
            continue;
        }
        start.iter_mut().for_each(|v| *v /= len);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut diag = Vec::with_capacity(dim);
        let mut off: Vec<f64> = Vec::with_capacity(dim);
        for j in 0..dim {
            op.apply(&basis[j], &mut out);
            applications += 1;
            let mut w = out.clone();
            let a = dot(&basis[j], &w);
            diag.push(a);
            for _ in 0..2 {
                op.deflate(&mut w);
                for v in &basis {
                    let c = dot(v, &w);
                    axpy(-c, v, &mut w);
                }
            }
            let b = norm(&w);
            if j + 1 == dim || b <= 1e-12 * a.abs().max(1e-300) || applications >= cfg.max_applications {
                break;
            }
            off.push(b);
            w.iter_mut().for_each(|v| *v /= b);
            basis.push(w);
        }
        let k = diag.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = diag[i];
            if i + 1 < k {
                t[(i, i + 1)] = off[i];
                t[(i + 1, i)] = off[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let idx = eig.eigenvalues.imin();
        let theta = eig.eigenvalues[idx];
        let mut y = vec![0.0; n];
        for (i, v) in basis.iter().take(k).enumerate() {
            axpy(eig.eigenvectors[(i, idx)], v, &mut y);
        }
        op.deflate(&mut y);
        let len = norm(&y);
        y.iter_mut().for_each(|v| *v /= len);
        let residual = op.residual(theta, &y);
        applications += 1;
        let pair = EigenPair { value: theta, vector: y.clone(), residual, applications };
        if residual <= cfg.tol {
            return Ok(pair);
        }
        if best.as_ref().map_or(true, |b| residual < b.residual) {
            best = Some(pair);
        }
        start = y;
    }
    let best = best.expect("at least one restart");
    Err(Error::EigenNoConvergence { residual: best.residual, applications })
}

/// Approximates `exp(−τ𝓛)·x` for a random `x` orthogonal to the null vector.
/// The walk is split into `⌈τ·‖𝓛‖⌉` substeps, each a Taylor series truncated
/// after `order` terms.
pub fn heat_kernel_vector(op: &NormalizedLaplacian, tau: f64, order: usize, rng: &mut impl Rng) -> Vec<f64> {
    let n = op.dim();
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    op.deflate(&mut x);
    let steps = (tau * op.spectral_bound()).ceil().max(1.0) as usize;
    let h = tau / steps as f64;
    let mut out = vec![0.0; n];
    for _ in 0..steps {
        let mut term = x.clone();
        for j in 1..=order {
            op.apply(&term, &mut out);
            let c = -h / j as f64;
            for (t, o) in term.iter_mut().zip(&out) {
                *t = c * o;
            }
            axpy(1.0, &term, &mut x);
        }
        op.deflate(&mut x);
        let len = norm(&x);
        if len > 0.0 {
            x.iter_mut().for_each(|v| *v /= len);
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> SymmetricGraph {
        let mut g = SymmetricGraph::new(3);
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 2, 1.0);
        g
    }

    #[test]
    fn accumulate_and_query() {
        let mut g = SymmetricGraph::new(4);
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 0, 0.5);
        g.add_edge(2, 3, 2.0);
        assert_eq!(g.weight(0, 1), 1.5);
        assert_eq!(g.weight(1, 0), 1.5);
        assert_eq!(g.degree(0), 1.5);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 1.5), (2, 3, 2.0)]);
        assert_eq!(g.components(), vec![0, 0, 1, 1]);
        assert!(!g.is_connected());
    }

    #[test]
    fn single_edge_spectrum() {
        let mut g = SymmetricGraph::new(2);
        g.add_edge(0, 1, 1.0);
        let op = NormalizedLaplacian::new(&g, &NodeWeights::unit(2));
        let pair = fiedler(&op, None, &EigenConfig::default()).unwrap();
        assert!((pair.value - 2.0).abs() < 1e-12);
        assert!((pair.vector[0] + pair.vector[1]).abs() < 1e-12);
    }

    #[test]
    fn path_spectrum() {
        let op = NormalizedLaplacian::new(&path3(), &NodeWeights::unit(3));
        let pair = fiedler(&op, None, &EigenConfig::default()).unwrap();
        assert!((pair.value - 1.0).abs() < 1e-12);
        assert!(pair.vector[1].abs() < 1e-9);
        assert!((pair.vector[0] + pair.vector[2]).abs() < 1e-9);
    }

    #[test]
    fn null_vector_is_null() {
        let pi = NodeWeights::new(vec![1.0, 2.0, 3.0]).unwrap();
        let op = NormalizedLaplacian::new(&path3(), &pi);
        assert!(op.residual(0.0, op.null_vector()) < 1e-14);
    }

    fn ring_with_chords(n: usize) -> SymmetricGraph {
        let mut g = SymmetricGraph::new(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n, 1.0 + (i % 3) as f64);
            if i % 7 == 0 {
                g.add_edge(i, (i * 5 + 11) % n, 0.5);
            }
        }
        g
    }

    #[test]
    fn lanczos_matches_dense() {
        let n = 120;
        let g = ring_with_chords(n);
        let pi = NodeWeights::new((0..n).map(|i| 1.0 + (i % 4) as f64).collect()).unwrap();
        let op = NormalizedLaplacian::new(&g, &pi);
        let dense = fiedler(&op, None, &EigenConfig::default()).unwrap();
        let cfg = EigenConfig { dense_below: 0, krylov: 40, ..EigenConfig::default() };
        let lanczos = fiedler(&op, None, &cfg).unwrap();
        assert!((dense.value - lanczos.value).abs() < 1e-9);
        assert!(lanczos.residual <= 1e-8);
        assert!(dot(&lanczos.vector, op.null_vector()).abs() < 1e-8);
        let warm = fiedler(&op, Some(&lanczos.vector), &cfg).unwrap();
        assert!(warm.applications <= lanczos.applications);
    }

    #[test]
    fn application_cap() {
        let g = ring_with_chords(300);
        let op = NormalizedLaplacian::new(&g, &NodeWeights::unit(300));
        let cfg = EigenConfig { dense_below: 0, krylov: 5, max_applications: 12, ..EigenConfig::default() };
        assert!(matches!(fiedler(&op, None, &cfg), Err(Error::EigenNoConvergence { .. })));
    }

    #[test]
    fn heat_kernel_small_tau_is_identity() {
        let op = NormalizedLaplacian::new(&path3(), &NodeWeights::unit(3));
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        let hk = heat_kernel_vector(&op, 0.0, 10, &mut a);
        let mut raw: Vec<f64> = (0..3).map(|_| b.gen::<f64>() - 0.5).collect();
        op.deflate(&mut raw);
        let len = norm(&raw);
        assert!(hk.iter().zip(&raw).all(|(x, y)| (x - y / len).abs() < 1e-15));
    }
}
