//! Cut-or-embed: one maximum flow on the auxiliary graph `G(H, R, α)` either
//! finds a set with π-expansion below `α`, or yields a π-regular bipartite
//! graph between `R` and its complement that embeds in the cut preserver
//! with congestion `1/α`.
//!
//! The auxiliary graph is the reduced graph with every arc scaled by `1/α`,
//! plus a source `s` with arcs `(s, r)` of capacity `π(r)` for `r ∈ R`, and a
//! sink `t` with arcs `(v, t)` of capacity `η·π(v)` for `v ∉ R`, where
//! `η = π(R)/π(V \ R)`. Its minimum cut value is
//!
//! ```text
//! min_S  cut(S)/α + π(R \ S) + η·π(S \ R)
//! ```
//!
//! and `S = ∅` always achieves `π(R)`.

use crate::error::{Error, Result};
use crate::hypergraph::{members, membership, Hypergraph, NodeWeights};
use crate::maxflow::{decompose, max_flow, FlowNetwork, FlowResult, PathDecomposition};
use crate::reduction::ReducedGraph;

/// Relative slack under which a flow counts as saturating `π(R)`.
pub const SATURATION_TOL: f64 = 1e-9;

/// Flow network `G(H, R, α)`. Node ids `0..N` are those of the reduced graph,
/// followed by the source and the sink; the first arcs mirror the reduced
/// graph's arcs in order.
#[derive(Debug, Clone)]
pub struct AuxiliaryGraph {
    network: FlowNetwork,
    reduced_arcs: usize,
    original: usize,
    side: Vec<bool>,
    weights: NodeWeights,
    eta: f64,
    alpha: f64,
    side_weight: f64,
}

impl AuxiliaryGraph {
    pub fn network(&self) -> &FlowNetwork {
        &self.network
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `η = π(R)/π(V \ R)`.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `π(R)`.
    pub fn side_weight(&self) -> f64 {
        self.side_weight
    }

    /// Membership of `R`.
    pub fn side(&self) -> &[bool] {
        &self.side
    }

    pub fn reduced_arc_count(&self) -> usize {
        self.reduced_arcs
    }

    /// Hypergraph nodes on the source side of an s-t cut.
    pub fn cut_to_set(&self, cutside: &[bool]) -> Vec<usize> {
        members(&cutside[..self.original])
    }

    /// The s-t cut objective `cut(S)/α + π(R \ S) + η·π(S \ R)` of a node set.
    pub fn objective(&self, h: &Hypergraph, set: &[usize]) -> f64 {
        let mask = membership(self.original, set);
        let mut missed = 0.0;
        let mut extra = 0.0;
        for v in 0..self.original {
            match (self.side[v], mask[v]) {
                (true, false) => missed += self.weights.get(v),
                (false, true) => extra += self.weights.get(v),
                _ => {}
            }
        }
        h.cut_value_mask(&mask) / self.alpha + missed + self.eta * extra
    }

    /// Whether a flow value reaches `π(R)` up to [`SATURATION_TOL`].
    pub fn is_saturating(&self, value: f64) -> bool {
        value >= self.side_weight * (1.0 - SATURATION_TOL)
    }
}

pub fn build_auxiliary(
    g: &ReducedGraph,
    pi: &NodeWeights,
    side: &[usize],
    alpha: f64,
) -> Result<AuxiliaryGraph> {
    assert!(alpha > 0.0 && alpha.is_finite(), "alpha must be positive and finite");
    let n = g.original_count();
    assert_eq!(pi.len(), n, "node weights do not match the reduced graph");
    let mask = membership(n, side);
    let count = mask.iter().filter(|&&b| b).count();
    if count == 0 {
        return Err(Error::EmptySide);
    }
    let side_weight = pi.of_mask(&mask);
    let rest = pi.total() - side_weight;
    if count == n || side_weight > rest {
        return Err(Error::UnbalancedSides { pi_r: side_weight, pi_rest: rest });
    }
    let eta = side_weight / rest;
    let nodes = g.node_count();
    let (source, sink) = (nodes, nodes + 1);
    let mut network = FlowNetwork::new(nodes + 2, source, sink);
    for arc in g.arcs() {
        network.add_arc(arc.tail, arc.head, arc.weight / alpha);
    }
    for v in 0..n {
        if mask[v] {
            network.add_arc(source, v, pi.get(v));
        }
    }
    for v in 0..n {
        if !mask[v] {
            network.add_arc(v, sink, eta * pi.get(v));
        }
    }
    Ok(AuxiliaryGraph {
        network,
        reduced_arcs: g.arc_count(),
        original: n,
        side: mask,
        weights: pi.clone(),
        eta,
        alpha,
        side_weight,
    })
}

/// A π-regular bipartite demand graph `M_R` and the congestion `1/α` with
/// which it embeds in the reduced graph.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteCertificate {
    n: usize,
    side: Vec<bool>,
    /// `(r, v, weight)` with `r ∈ R`, `v ∉ R`, sorted and merged.
    entries: Vec<(usize, usize, f64)>,
    alpha: f64,
    eta: f64,
    paths: Option<PathDecomposition>,
    reduced_arcs: usize,
}

impl BipartiteCertificate {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// The `α` of the auxiliary graph the certificate was built from.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Congestion bound `1/α`.
    pub fn congestion(&self) -> f64 {
        1.0 / self.alpha
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Membership of the lighter side `R`.
    pub fn side(&self) -> &[bool] {
        &self.side
    }

    pub fn paths(&self) -> Option<&PathDecomposition> {
        self.paths.as_ref()
    }

    /// Weighted degree of every node in `M_R`.
    pub fn degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.n];
        for &(r, v, w) in &self.entries {
            deg[r] += w;
            deg[v] += w;
        }
        deg
    }

    /// Largest relative deviation from degrees `π(r)` on `R` and `η·π(u)` off it.
    pub fn regularity_error(&self, pi: &NodeWeights) -> f64 {
        self.degrees()
            .iter()
            .enumerate()
            .map(|(v, &d)| {
                let target = if self.side[v] { pi.get(v) } else { self.eta * pi.get(v) };
                (d - target).abs() / target
            })
            .fold(0.0, f64::max)
    }

    pub fn is_pi_regular(&self, pi: &NodeWeights, rel_tol: f64) -> bool {
        self.regularity_error(pi) <= rel_tol
    }

    /// Drops the retained flow paths.
    pub fn without_paths(mut self) -> Self {
        self.paths = None;
        self
    }
}

/// Turns a saturating flow on `G(H, R, α)` into `M_R`.
pub fn flow_embed(aux: &AuxiliaryGraph, flow: &FlowResult, retain_paths: bool) -> Result<BipartiteCertificate> {
    if !aux.is_saturating(flow.value) {
        return Err(Error::NotSaturating { value: flow.value, target: aux.side_weight });
    }
    let net = aux.network();
    let decomposition = decompose(net, flow)?;
    let mut entries: Vec<(usize, usize, f64)> = decomposition
        .paths
        .iter()
        .map(|p| {
            let k = p.nodes.len();
            debug_assert!(k >= 4, "s-t paths pass through at least two hypergraph nodes");
            (p.nodes[1], p.nodes[k - 2], p.amount)
        })
        .collect();
    entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
    for (r, v, w) in entries {
        match merged.last_mut() {
            Some(last) if last.0 == r && last.1 == v => last.2 += w,
            _ => merged.push((r, v, w)),
        }
    }
    Ok(BipartiteCertificate {
        n: aux.original,
        side: aux.side.clone(),
        entries: merged,
        alpha: aux.alpha,
        eta: aux.eta,
        paths: retain_paths.then_some(decomposition),
        reduced_arcs: aux.reduced_arcs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EmbedOptions {
    /// Keep the flow paths of each certificate for later verification.
    pub retain_paths: bool,
}

/// Outcome of a cut-or-embed call.
#[derive(Debug, Clone)]
pub struct CutOrEmbed {
    /// Embeds with congestion `1/alpha`.
    pub certificate: BipartiteCertificate,
    pub set: Vec<usize>,
    /// `φ(set)`.
    pub phi: f64,
    /// `α` of the returned certificate.
    pub alpha: f64,
    /// Every `α` a flow was solved at, in order.
    pub alphas: Vec<f64>,
}

impl CutOrEmbed {
    pub fn flow_solves(&self) -> usize {
        self.alphas.len()
    }
}

/// The lighter of `side` and its complement, sorted.
pub fn lighter_side(pi: &NodeWeights, side: &[usize]) -> Result<Vec<usize>> {
    let n = pi.len();
    let mask = membership(n, side);
    let count = mask.iter().filter(|&&b| b).count();
    if count == 0 || count == n {
        return Err(Error::EmptySide);
    }
    let weight = pi.of_mask(&mask);
    if weight > pi.total() - weight {
        Ok((0..n).filter(|&v| !mask[v]).collect())
    } else {
        Ok(members(&mask))
    }
}

/// `⌈log₂(U·m·π(V))⌉ + 4`.
pub fn iteration_cap(h: &Hypergraph, pi: &NodeWeights) -> usize {
    let product = h.max_cut_penalty() * h.edge_count() as f64 * pi.total();
    product.log2().ceil().max(0.0) as usize + 4
}

fn solve(g: &ReducedGraph, pi: &NodeWeights, side: &[usize], alpha: f64) -> Result<(AuxiliaryGraph, FlowResult)> {
    let aux = build_auxiliary(g, pi, side, alpha)?;
    let flow = max_flow(aux.network());
    Ok((aux, flow))
}

fn proper_cut(aux: &AuxiliaryGraph, flow: &FlowResult, n: usize) -> Result<Vec<usize>> {
    let set = aux.cut_to_set(&flow.source_side);
    if set.is_empty() || set.len() == n {
        return Err(Error::InternalBoundExceeded(format!(
            "flow {} below pi(R) = {} but the minimum cut isolates a terminal",
            flow.value,
            aux.side_weight()
        )));
    }
    Ok(set)
}

/// Doubling variant: `α` starts at `2/π(V)` and doubles after every
/// saturating flow, until a cut is found.
///
/// The returned certificate embeds with congestion `1/alpha` and the returned
/// set satisfies `φ(set) < 2·alpha`.
pub fn hyper_cut_or_embed(
    h: &Hypergraph,
    g: &ReducedGraph,
    pi: &NodeWeights,
    side: &[usize],
    options: EmbedOptions,
) -> Result<CutOrEmbed> {
    let side = lighter_side(pi, side)?;
    let cap = iteration_cap(h, pi);
    let mut alpha = 2.0 / pi.total();
    let mut alphas = Vec::new();
    let mut last: Option<BipartiteCertificate> = None;
    loop {
        if alphas.len() >= cap {
            return Err(Error::InternalBoundExceeded(format!("doubling exceeded {cap} flow solves")));
        }
        alphas.push(alpha);
        let (aux, flow) = solve(g, pi, &side, alpha)?;
        if aux.is_saturating(flow.value) {
            last = Some(flow_embed(&aux, &flow, options.retain_paths)?);
            alpha *= 2.0;
            continue;
        }
        let set = proper_cut(&aux, &flow, h.node_count())?;
        let certificate = last.ok_or_else(|| {
            Error::InternalBoundExceeded("no saturating flow at alpha = 2/pi(V)".into())
        })?;
        let phi = h.pi_expansion(pi, &set)?;
        return Ok(CutOrEmbed { alpha: certificate.alpha(), certificate, set, phi, alphas });
    }
}

/// Refinement variant: `α` starts at `φ(R)` and drops to the expansion of
/// every improved set until the flow saturates. The returned set has
/// `φ(set) = alpha` up to rounding, and the certificate embeds with
/// congestion `1/alpha`.
pub fn refine_cut_or_embed(
    h: &Hypergraph,
    g: &ReducedGraph,
    pi: &NodeWeights,
    side: &[usize],
    options: EmbedOptions,
) -> Result<CutOrEmbed> {
    let side = lighter_side(pi, side)?;
    let cap = iteration_cap(h, pi).max(64);
    let mut best = side.clone();
    let mut best_phi = h.pi_expansion(pi, &best)?;
    let mut alpha = best_phi;
    let mut alphas = Vec::new();
    loop {
        if alphas.len() >= cap {
            return Err(Error::InternalBoundExceeded(format!("refinement exceeded {cap} flow solves")));
        }
        alphas.push(alpha);
        let (aux, flow) = solve(g, pi, &side, alpha)?;
        if aux.is_saturating(flow.value) {
            let certificate = flow_embed(&aux, &flow, options.retain_paths)?;
            return Ok(CutOrEmbed { certificate, set: best, phi: best_phi, alpha, alphas });
        }
        let set = proper_cut(&aux, &flow, h.node_count())?;
        let phi = h.pi_expansion(pi, &set)?;
        if phi < best_phi {
            best = set;
            best_phi = phi;
        }
        alpha = if phi < alpha { phi } else { alpha * (1.0 - SATURATION_TOL) };
    }
}

/// Maximum congestion of routing every demand of `cert` that crosses
/// `{S, V \ S}` from its `S` endpoint to the other one.
///
/// Paths already oriented from `S` to the complement are kept. Paths from
/// `R \ S` to `S \ R` are reversed gadget by gadget: a hop
/// `x → e' → e'' → y` becomes `y → e' → e'' → x`, using the arcs `(y, e')`
/// and `(e'', x)` which carry the same weight.
pub fn verify_embedding(g: &ReducedGraph, cert: &BipartiteCertificate, set: &[usize]) -> Result<f64> {
    let paths = cert.paths().ok_or(Error::MissingDecomposition)?;
    let mask = membership(cert.n, set);
    let mut load = vec![0.0; g.arc_count()];
    for p in &paths.paths {
        let k = p.nodes.len();
        let (r, v) = (p.nodes[1], p.nodes[k - 2]);
        let inner_nodes = &p.nodes[1..k - 1];
        let inner_arcs = &p.arcs[1..k - 2];
        if mask[r] && !mask[v] {
            for &a in inner_arcs {
                load[a] += p.amount;
            }
        } else if !mask[r] && mask[v] {
            for hop in inner_nodes.windows(4).step_by(3) {
                let (x, entry, y) = (hop[0], hop[1], hop[3]);
                let gadget = g.gadget_of(entry).expect("hop passes through a gadget");
                let forward = g.entry_arc(gadget, y).expect("y belongs to the gadget's hyperedge");
                let back = g.exit_arc(gadget, x).expect("x belongs to the gadget's hyperedge");
                load[forward] += p.amount;
                load[g.middle_arc(gadget)] += p.amount;
                load[back] += p.amount;
            }
        }
    }
    Ok(load
        .iter()
        .zip(g.arcs())
        .filter(|(l, _)| **l > 0.0)
        .map(|(l, a)| l / a.weight)
        .fold(0.0, f64::max))
}
