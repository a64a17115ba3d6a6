//! Clique-expansion baseline: replace every hyperedge by a clique with one
//! uniform weight `p`, then take the best spectral sweep cut measured in the
//! original hypergraph.
//!
//! `p` is the smallest value with `w_i ≤ p·i·(k−i)` for all `i`, and the
//! distortion `C` is the smallest value with `p·i·(k−i) ≤ C·w_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodeWeights};
use crate::spectral::{fiedler, EigenConfig, NormalizedLaplacian, SymmetricGraph};

#[derive(Debug, Clone)]
pub struct CliqueExpansion {
    pub graph: SymmetricGraph,
    /// Clique edge weight of each hyperedge, including its weight.
    pub p: Vec<f64>,
    /// Distortion of each hyperedge.
    pub distortion: Vec<f64>,
}

impl CliqueExpansion {
    pub fn max_distortion(&self) -> f64 {
        self.distortion.iter().copied().fold(1.0, f64::max)
    }
}

/// `(p, C)` for one splitting penalty vector with unit edge weight.
pub fn clique_weight(k: usize, penalties: &[f64]) -> (f64, f64) {
    let scaled = |i: usize| (i * (k - i)) as f64;
    let p = penalties.iter().enumerate().map(|(j, &w)| w / scaled(j + 1)).fold(0.0, f64::max);
    let c = penalties.iter().enumerate().map(|(j, &w)| p * scaled(j + 1) / w).fold(0.0, f64::max);
    (p, c)
}

pub fn expand(h: &Hypergraph) -> Result<CliqueExpansion> {
    let mut graph = SymmetricGraph::new(h.node_count());
    let mut p = Vec::with_capacity(h.edge_count());
    let mut distortion = Vec::with_capacity(h.edge_count());
    for idx in 0..h.edge_count() {
        let sf = h.splitting(idx);
        if let Some(j) = sf.penalties().iter().position(|&w| w <= 0.0) {
            return Err(Error::ZeroPenalty { edge: idx, index: j + 1 });
        }
        let (unit_p, c) = clique_weight(sf.size(), sf.penalties());
        let weight = unit_p * h.edge_weight(idx);
        let e = h.edge(idx);
        for (a, &u) in e.iter().enumerate() {
            for &v in &e[a + 1..] {
                graph.add_edge(u, v, weight);
            }
        }
        p.push(weight);
        distortion.push(c);
    }
    Ok(CliqueExpansion { graph, p, distortion })
}

/// Degrees used to normalize the clique-expansion Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Normalization {
    /// Weighted degrees in the expansion graph.
    #[default]
    Graph,
    /// Generalized degrees in the hypergraph.
    Hypergraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub set: Vec<usize>,
    pub phi: f64,
    pub lambda2: f64,
}

/// Sorts nodes by the second eigenvector of the normalized expansion
/// Laplacian and returns the prefix with the smallest hypergraph π-expansion.
pub fn sweep_cut(
    ce: &CliqueExpansion,
    h: &Hypergraph,
    pi: &NodeWeights,
    normalization: Normalization,
    cfg: &EigenConfig,
) -> Result<SweepResult> {
    let n = h.node_count();
    if n < 2 {
        return Err(Error::EmptySide);
    }
    let (order, values, lambda2) = if ce.graph.is_connected() {
        let degrees = match normalization {
            Normalization::Graph => NodeWeights::new(ce.graph.degrees().to_vec())?,
            Normalization::Hypergraph => h.generalized_degrees()?,
        };
        let op = NormalizedLaplacian::new(&ce.graph, &degrees);
        let pair = fiedler(&op, None, cfg)?;
        let x = op.unnormalize(&pair.vector);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
        (order, x, pair.value)
    } else {
        let labels = ce.graph.components();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (labels[v], v));
        (order, labels.iter().map(|&l| l as f64).collect(), 0.0)
    };

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for idx in 0..h.edge_count() {
        for &v in h.edge(idx) {
            incident[v].push(idx);
        }
    }
    let mut inside = vec![0usize; h.edge_count()];
    let mut mask = vec![false; n];
    let mut cut = 0.0;
    let mut weight = 0.0;
    let total = pi.total();
    let mut best = (f64::INFINITY, 0usize);
    for (pos, &v) in order.iter().enumerate().take(n - 1) {
        mask[v] = true;
        weight += pi.get(v);
        for &e in &incident[v] {
            let sf = h.splitting(e);
            let w = h.edge_weight(e);
            cut += w * (sf.eval(inside[e] + 1) - sf.eval(inside[e]));
            inside[e] += 1;
        }
        if values[order[pos + 1]] == values[v] {
            continue;
        }
        let phi = cut / weight.min(total - weight);
        if phi < best.0 {
            best = (phi, pos + 1);
        }
    }
    if best.0.is_infinite() {
        return Err(Error::EmptySide);
    }
    let mut set = order[..best.1].to_vec();
    set.sort_unstable();
    // report the exact value of the returned set
    let phi = h.pi_expansion(pi, &set)?;
    Ok(SweepResult { set, phi, lambda2 })
}
