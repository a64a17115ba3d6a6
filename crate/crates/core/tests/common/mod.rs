#![allow(dead_code)]

use std::collections::HashMap;

use hypercut::hypergraph::{Hypergraph, SplittingFunction, SplittingKind};
use hypercut::instance::{Instance, SplittingSpec, WeightChoice};
use hypercut::io::RawHypergraph;
use hypercut::maxflow::FlowNetwork;
use rand::seq::SliceRandom;
use rand::Rng;

/// Penalties with random nonincreasing nonnegative increments.
pub fn random_penalties(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let r = k / 2;
    let mut deltas: Vec<f64> = (0..r).map(|_| rng.gen_range(0.0..1.0)).collect();
    deltas.sort_by(|a, b| b.total_cmp(a));
    if let Some(first) = deltas.first_mut() {
        *first += 0.05;
    }
    // occasionally flat tails, as in delta-linear functions
    if r > 1 && rng.gen_bool(0.3) {
        let cut = rng.gen_range(1..r);
        deltas[cut..].iter_mut().for_each(|d| *d = 0.0);
    }
    deltas
        .iter()
        .scan(0.0, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect()
}

pub fn random_splitting(rng: &mut impl Rng, k: usize) -> SplittingFunction {
    SplittingFunction::from_penalties(k, random_penalties(rng, k)).unwrap()
}

pub fn random_edges(rng: &mut impl Rng, n: usize, m: usize, max_size: usize) -> Vec<Vec<usize>> {
    let nodes: Vec<usize> = (0..n).collect();
    (0..m)
        .map(|_| {
            let k = rng.gen_range(2..=max_size.min(n));
            let mut e: Vec<usize> = nodes.choose_multiple(rng, k).copied().collect();
            e.sort_unstable();
            e
        })
        .collect()
}

/// Random hypergraph with per-edge random splitting functions and weights.
pub fn random_hypergraph(rng: &mut impl Rng, n: usize, m: usize, max_size: usize) -> Hypergraph {
    let edges = random_edges(rng, n, m, max_size);
    let weights = (0..m).map(|_| rng.gen_range(0.5..2.0)).collect();
    let splitting = edges.iter().map(|e| random_splitting(rng, e.len())).collect();
    Hypergraph::new(n, edges, weights, splitting).unwrap()
}

pub fn random_family(rng: &mut impl Rng) -> SplittingKind {
    match rng.gen_range(0..4) {
        0 => SplittingKind::AllOrNothing,
        1 => SplittingKind::DeltaLinear(2.0),
        2 => SplittingKind::DeltaLinear(3.0),
        _ => SplittingKind::Limi(0.25),
    }
}

/// Random normalized connected instance; `None` if too little survives.
pub fn random_instance(
    rng: &mut impl Rng,
    n: usize,
    m: usize,
    max_size: usize,
    spec: &SplittingSpec,
    choice: &WeightChoice,
) -> Option<Instance> {
    let edges = random_edges(rng, n, m, max_size);
    let weights = (0..m).map(|_| rng.gen_range(0.5..2.0)).collect();
    let raw = RawHypergraph { n, edges, weights };
    let inst = Instance::prepare(&raw, spec, choice).ok()?;
    (inst.hypergraph.node_count() >= 3).then_some(inst)
}

/// Splitting table with one random vector per size.
pub fn random_table(rng: &mut impl Rng, max_size: usize) -> SplittingSpec {
    let table: HashMap<usize, Vec<f64>> = (2..=max_size).map(|k| (k, random_penalties(rng, k))).collect();
    SplittingSpec::PerSize(table)
}

pub fn random_network(rng: &mut impl Rng, nodes: usize) -> FlowNetwork {
    let mut net = FlowNetwork::new(nodes, 0, nodes - 1);
    let density = rng.gen_range(0.2..0.7);
    for u in 0..nodes {
        for v in 0..nodes {
            if u != v && rng.gen_bool(density) {
                let cap = if rng.gen_bool(0.2) { rng.gen_range(1..5) as f64 } else { rng.gen_range(0.01..10.0) };
                net.add_arc(u, v, cap);
            }
        }
    }
    net
}

pub fn t1() -> Hypergraph {
    Hypergraph::unweighted(4, vec![vec![0, 1, 2], vec![1, 2, 3], vec![0, 3]], &SplittingKind::AllOrNothing).unwrap()
}
