//! Exhaustive ground truth for small instances.

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodeWeights};
use crate::maxflow::FlowNetwork;
use crate::reduction::{gadget_mincut, ReducedGraph};
use crate::spectral::SymmetricGraph;

/// Largest sizes the exhaustive searches accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    /// Hypergraph nodes for minimum expansion.
    pub expansion: usize,
    /// Hypergraph nodes for the preserver check.
    pub preserver: usize,
    /// Network nodes for minimum s-t cut.
    pub st_cut: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self { expansion: 22, preserver: 8, st_cut: 12 }
    }
}

/// Minimum over nontrivial sets of `score(mask)`, ties broken towards the
/// lexicographically smallest set not containing node 0.
fn brute_min(n: usize, mut score: impl FnMut(&[bool]) -> f64) -> (f64, Vec<usize>) {
    let mut best = f64::INFINITY;
    let mut arg: Vec<usize> = Vec::new();
    let mut mask = vec![false; n];
    for bits in 1u64..(1u64 << (n - 1)) {
        for (v, m) in mask.iter_mut().enumerate().skip(1) {
            *m = bits >> (v - 1) & 1 == 1;
        }
        let val = score(&mask);
        let set: Vec<usize> = (1..n).filter(|&v| mask[v]).collect();
        if best.is_infinite() {
            if val < best {
                best = val;
                arg = set;
            }
            continue;
        }
        let tol = 1e-12 * best.abs().max(1e-300);
        if val < best - tol || (val <= best + tol && set < arg) {
            if val < best {
                best = val;
            }
            arg = set;
        }
    }
    (best, arg)
}

/// Exact minimum π-expansion and a minimizing set that excludes node 0.
pub fn brute_min_expansion(h: &Hypergraph, pi: &NodeWeights) -> Result<(f64, Vec<usize>)> {
    brute_min_expansion_capped(h, pi, OracleCaps::default().expansion)
}

pub fn brute_min_expansion_capped(h: &Hypergraph, pi: &NodeWeights, cap: usize) -> Result<(f64, Vec<usize>)> {
    let n = h.node_count();
    if n > cap {
        return Err(Error::TooLarge { what: "nodes", size: n, cap });
    }
    if n < 2 {
        return Err(Error::EmptySide);
    }
    let total = pi.total();
    Ok(brute_min(n, |mask| {
        let inside = pi.of_mask(mask);
        h.cut_value_mask(mask) / inside.min(total - inside)
    }))
}

/// Exact minimum π-expansion of an undirected graph.
pub fn brute_min_graph_expansion(g: &SymmetricGraph, pi: &NodeWeights) -> Result<(f64, Vec<usize>)> {
    let n = g.node_count();
    let cap = OracleCaps::default().expansion;
    if n > cap {
        return Err(Error::TooLarge { what: "nodes", size: n, cap });
    }
    if n < 2 {
        return Err(Error::EmptySide);
    }
    Ok(brute_min(n, |mask| g.pi_expansion_mask(pi, mask)))
}

/// Checks that `g` preserves every cut of `h`: for each `S ⊆ V`, the
/// hypergraph cut equals both the sum of the per-gadget closed-form minima
/// and the minimum directed cut over all placements of auxiliary nodes,
/// evaluated on the actual arcs.
pub fn brute_preserver_check(h: &Hypergraph, g: &ReducedGraph) -> Result<bool> {
    brute_preserver_check_capped(h, g, OracleCaps::default().preserver)
}

pub fn brute_preserver_check_capped(h: &Hypergraph, g: &ReducedGraph, cap: usize) -> Result<bool> {
    let n = h.node_count();
    if n > cap {
        return Err(Error::TooLarge { what: "nodes", size: n, cap });
    }
    if g.original_count() != n || g.node_count() != n + 2 * g.gadgets().len() {
        return Ok(false);
    }
    // owner gadget of each auxiliary node
    let mut owner = vec![usize::MAX; g.node_count()];
    for (idx, info) in g.gadgets().iter().enumerate() {
        if info.entry < n || info.exit < n || owner[info.entry] != usize::MAX || owner[info.exit] != usize::MAX {
            return Ok(false);
        }
        owner[info.entry] = idx;
        owner[info.exit] = idx;
    }
    if owner[n..].iter().any(|&o| o == usize::MAX) {
        return Ok(false);
    }
    let mut plain = Vec::new();
    let mut local: Vec<Vec<usize>> = vec![Vec::new(); g.gadgets().len()];
    for (a, arc) in g.arcs().iter().enumerate() {
        let (ot, oh) = (owner[arc.tail], owner[arc.head]);
        match (ot == usize::MAX, oh == usize::MAX) {
            (true, true) => plain.push(a),
            (false, true) => local[ot].push(a),
            (true, false) => local[oh].push(a),
            (false, false) if ot == oh => local[ot].push(a),
            (false, false) => return Ok(false),
        }
    }

    let mut full = vec![false; g.node_count()];
    for bits in 0u64..(1u64 << n) {
        for (v, m) in full.iter_mut().enumerate().take(n) {
            *m = bits >> v & 1 == 1;
        }
        let expected = h.cut_value_mask(&full[..n]);
        let mut formula = 0.0;
        let mut actual: f64 = plain
            .iter()
            .map(|&a| &g.arcs()[a])
            .filter(|arc| full[arc.tail] && !full[arc.head])
            .map(|arc| arc.weight)
            .sum();
        for (idx, info) in g.gadgets().iter().enumerate() {
            let inside = h.edge(info.hyperedge).iter().filter(|&&v| full[v]).count();
            formula += gadget_mincut(info.gadget, info.size, inside);
            let mut best = f64::INFINITY;
            for place in 0..4u8 {
                full[info.entry] = place & 1 == 1;
                full[info.exit] = place & 2 == 2;
                let cut: f64 = local[idx]
                    .iter()
                    .map(|&a| &g.arcs()[a])
                    .filter(|arc| full[arc.tail] && !full[arc.head])
                    .map(|arc| arc.weight)
                    .sum();
                best = best.min(cut);
            }
            full[info.entry] = false;
            full[info.exit] = false;
            actual += best;
        }
        let tol = 1e-9 * expected.abs().max(1e-300);
        if (formula - expected).abs() > tol || (actual - expected).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimum s-t cut capacity by enumerating the source sides.
pub fn brute_min_st_cut(net: &FlowNetwork) -> Result<f64> {
    brute_min_st_cut_capped(net, OracleCaps::default().st_cut)
}

pub fn brute_min_st_cut_capped(net: &FlowNetwork, cap: usize) -> Result<f64> {
    let n = net.node_count();
    if n > cap {
        return Err(Error::TooLarge { what: "network nodes", size: n, cap });
    }
    let free: Vec<usize> = (0..n).filter(|&v| v != net.source() && v != net.sink()).collect();
    let mut mask = vec![false; n];
    mask[net.source()] = true;
    let mut best = f64::INFINITY;
    for bits in 0u64..(1u64 << free.len()) {
        for (i, &v) in free.iter().enumerate() {
            mask[v] = bits >> i & 1 == 1;
        }
        best = best.min(net.cut_capacity(&mask));
    }
    Ok(best)
}
