//! Ingestion: cleaning a raw hypergraph, restricting it to its largest
//! connected component, choosing node weights and normalizing scales.
//!
//! After normalization the cheapest way to cut any hyperedge costs exactly 1
//! and the lightest node has weight exactly 1. Both scale factors are kept so
//! expansion values can be reported in the input's units.

use std::collections::HashMap;

use log::warn;

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodeWeights, SplittingFunction, SplittingKind};
use crate::io::RawHypergraph;

/// How node weights π are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightChoice {
    /// π ≡ 1 (expansion).
    Unit,
    /// π = generalized degree (conductance).
    Degree,
    /// Explicit weights for every node of the raw input.
    Explicit(Vec<f64>),
}

impl WeightChoice {
    pub fn label(&self) -> &'static str {
        match self {
            WeightChoice::Unit => "unit",
            WeightChoice::Degree => "degree",
            WeightChoice::Explicit(_) => "file",
        }
    }
}

/// Splitting functions for every hyperedge size.
#[derive(Debug, Clone, PartialEq)]
pub enum SplittingSpec {
    /// One parametric family for all sizes.
    Family(SplittingKind),
    /// Explicit penalty vectors keyed by hyperedge size.
    PerSize(HashMap<usize, Vec<f64>>),
}

impl SplittingSpec {
    pub fn function(&self, k: usize) -> Result<SplittingFunction> {
        match self {
            SplittingSpec::Family(kind) => SplittingFunction::new(kind, k),
            SplittingSpec::PerSize(table) => {
                let w = table.get(&k).ok_or_else(|| {
                    Error::InvalidSplitting(format!("no penalty vector given for hyperedge size {k}"))
                })?;
                SplittingFunction::from_penalties(k, w.clone())
            }
        }
    }
}

impl From<SplittingKind> for SplittingSpec {
    fn from(kind: SplittingKind) -> Self {
        SplittingSpec::Family(kind)
    }
}

/// Cleaned raw hypergraph restricted to its largest component, in input units.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub hypergraph: Hypergraph,
    /// Raw id of each kept node.
    pub original_ids: Vec<usize>,
    pub original_n: usize,
    pub dropped_singletons: usize,
    pub merged_duplicates: usize,
    pub dropped_nodes: usize,
}

/// Cleans `raw` and instantiates its splitting functions.
///
/// Repeated nodes inside a hyperedge are collapsed, hyperedges with fewer than
/// two distinct nodes are dropped, identical hyperedges are merged by summing
/// their weights and only the largest hyperedge-connected component is kept.
pub fn ingest(raw: &RawHypergraph, spec: &SplittingSpec) -> Result<Ingested> {
    let mut merged: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut dropped_singletons = 0;
    let mut merged_duplicates = 0;
    let mut collapsed = 0;
    for (e, &w) in raw.edges.iter().zip(&raw.weights) {
        if let Some(&v) = e.iter().find(|&&v| v >= raw.n) {
            return Err(Error::NodeOutOfRange { node: v, n: raw.n });
        }
        let mut e = e.clone();
        let before = e.len();
        e.sort_unstable();
        e.dedup();
        if e.len() != before {
            collapsed += 1;
        }
        if e.len() < 2 {
            dropped_singletons += 1;
            continue;
        }
        match merged.get(&e) {
            Some(&idx) => {
                weights[idx] += w;
                merged_duplicates += 1;
            }
            None => {
                merged.insert(e.clone(), edges.len());
                edges.push(e);
                weights.push(w);
            }
        }
    }
    if collapsed > 0 {
        warn!("{collapsed} hyperedges listed a node more than once; repeats were collapsed");
    }
    if dropped_singletons > 0 {
        warn!("dropped {dropped_singletons} hyperedges with fewer than two nodes");
    }
    if merged_duplicates > 0 {
        warn!("merged {merged_duplicates} duplicate hyperedges by summing weights");
    }
    if edges.is_empty() {
        return Err(Error::NoHyperedges);
    }

    let splitting = edges.iter().map(|e| spec.function(e.len())).collect::<Result<Vec<_>>>()?;
    let full = Hypergraph::new(raw.n, edges, weights, splitting)?;
    let labels = full.components();
    let count = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    let keep = (0..count).max_by_key(|&l| (sizes[l], std::cmp::Reverse(l))).unwrap_or(0);
    let original_ids: Vec<usize> = (0..raw.n).filter(|&v| labels[v] == keep).collect();
    let dropped_nodes = raw.n - original_ids.len();
    if dropped_nodes > 0 {
        warn!(
            "hypergraph is disconnected; keeping the largest component ({} of {} nodes)",
            original_ids.len(),
            raw.n
        );
    }
    let mut new_id = vec![usize::MAX; raw.n];
    for (i, &v) in original_ids.iter().enumerate() {
        new_id[v] = i;
    }
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut splitting = Vec::new();
    for idx in 0..full.edge_count() {
        let e = full.edge(idx);
        if labels[e[0]] != keep {
            continue;
        }
        edges.push(e.iter().map(|&v| new_id[v]).collect());
        weights.push(full.edge_weight(idx));
        splitting.push(full.splitting(idx).clone());
    }
    let hypergraph = Hypergraph::new(original_ids.len(), edges, weights, splitting)?;
    Ok(Ingested {
        hypergraph,
        original_ids,
        original_n: raw.n,
        dropped_singletons,
        merged_duplicates,
        dropped_nodes,
    })
}

/// A normalized, connected problem instance ready for the solver.
#[derive(Debug, Clone)]
pub struct Instance {
    /// Hypergraph with `min_e weight·w_1 = 1`.
    pub hypergraph: Hypergraph,
    /// Node weights with `min π = 1`.
    pub weights: NodeWeights,
    pub original_ids: Vec<usize>,
    pub original_n: usize,
    /// Factor applied to every hyperedge weight.
    pub edge_scale: f64,
    /// Factor applied to every node weight.
    pub weight_scale: f64,
}

impl Instance {
    pub fn prepare(raw: &RawHypergraph, spec: &SplittingSpec, choice: &WeightChoice) -> Result<Self> {
        if let WeightChoice::Explicit(w) = choice {
            if w.len() != raw.n {
                return Err(Error::WeightLength { expected: raw.n, got: w.len() });
            }
            NodeWeights::new(w.clone())?;
        }
        let ingested = ingest(raw, spec)?;
        Self::from_ingested(ingested, choice)
    }

    pub fn from_ingested(ingested: Ingested, choice: &WeightChoice) -> Result<Self> {
        let h = ingested.hypergraph;
        let pi = match choice {
            WeightChoice::Unit => NodeWeights::unit(h.node_count()),
            WeightChoice::Degree => h.generalized_degrees()?,
            WeightChoice::Explicit(w) => {
                NodeWeights::new(ingested.original_ids.iter().map(|&v| w[v]).collect())?
            }
        };
        let min_penalty = h.min_cut_penalty();
        if !(min_penalty > 0.0) {
            return Err(Error::InvalidSplitting("some hyperedge has zero singleton penalty".into()));
        }
        let edge_scale = 1.0 / min_penalty;
        let weight_scale = 1.0 / pi.min();
        Ok(Self {
            hypergraph: h.scaled(edge_scale),
            weights: pi.scaled(weight_scale),
            original_ids: ingested.original_ids,
            original_n: ingested.original_n,
            edge_scale,
            weight_scale,
        })
    }

    /// Converts an expansion value of the normalized instance to input units.
    pub fn to_input_scale(&self, phi: f64) -> f64 {
        phi * self.weight_scale / self.edge_scale
    }

    /// Converts an expansion value in input units to the normalized instance.
    pub fn to_internal_scale(&self, phi: f64) -> f64 {
        phi * self.edge_scale / self.weight_scale
    }

    /// Maps instance node ids back to raw (0-based) ids.
    pub fn to_original(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&v| self.original_ids[v]).collect();
        out.sort_unstable();
        out
    }

    /// Maps raw ids to instance ids; raw ids outside the kept component are
    /// skipped.
    pub fn from_original(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> =
            set.iter().filter_map(|v| self.original_ids.binary_search(v).ok()).collect();
        out.sort_unstable();
        out
    }
}
