//! The cut-matching driver.
//!
//! Each round the cut player proposes a bisection `R_i`, and the refinement
//! cut-or-embed returns a set `S_i` and a bipartite graph `M_i` embeddable with
//! congestion `1/α_i`. The union `H_t` of the `M_i` embeds with congestion
//! `γ_t = Σ 1/α_i`, so `λ₂(𝓛_t)/(2γ_t)` is a lower bound on the minimum
//! π-expansion, where `𝓛_t = D_π^{-1/2} L_t D_π^{-1/2}`.

use std::time::Instant;

use log::debug;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{refine_cut_or_embed, BipartiteCertificate, EmbedOptions};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodeWeights};
use crate::reduction::{build_preserver, ReducedGraph};
use crate::spectral::{fiedler, heat_kernel_vector, EigenConfig, NormalizedLaplacian, SymmetricGraph};

/// Strategy for choosing the next bisection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CutPlayer {
    /// Threshold the second eigenvector of `𝓛_t`.
    Spectral,
    /// Threshold a truncated heat-kernel walk from a random vector. Best
    /// effort; no round guarantee is claimed.
    HeatKernel { tau: f64, order: usize },
    /// A fresh random bisection every round.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutMatchConfig {
    /// `None` runs `⌈5·log₂ n⌉` rounds.
    pub iterations: Option<usize>,
    pub seed: u64,
    pub player: CutPlayer,
    /// Keep flow paths in the returned certificates.
    pub retain_paths: bool,
    pub eigen: EigenConfig,
}

impl Default for CutMatchConfig {
    fn default() -> Self {
        Self { iterations: None, seed: 0, player: CutPlayer::Spectral, retain_paths: false, eigen: EigenConfig::default() }
    }
}

/// `⌈5·log₂ n⌉`, at least 1.
pub fn default_iterations(n: usize) -> usize {
    ((5.0 * (n.max(2) as f64).log2()).ceil() as usize).max(1)
}

/// One round of the driver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// The cut player's `R_i` (before orienting to the lighter side).
    pub bisection: Vec<usize>,
    pub alpha: f64,
    pub phi: f64,
    pub best_phi: f64,
    pub lambda2: f64,
    pub gamma: f64,
    /// `λ₂(𝓛_i)/(2γ_i)` of this round alone.
    pub round_bound: f64,
    /// Best bound so far.
    pub lower_bound: f64,
    pub rho: f64,
    pub flow_solves: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct CutMatchState {
    t: usize,
    graph: SymmetricGraph,
    gamma: f64,
    alphas: Vec<f64>,
    best_set: Vec<usize>,
    best_phi: f64,
    lambda2: f64,
    lower_bound: f64,
    eigvec: Option<Vec<f64>>,
    records: Vec<IterationRecord>,
}

impl CutMatchState {
    fn new(n: usize) -> Self {
        Self {
            t: 0,
            graph: SymmetricGraph::new(n),
            gamma: 0.0,
            alphas: Vec::new(),
            best_set: Vec::new(),
            best_phi: f64::INFINITY,
            lambda2: 0.0,
            lower_bound: 0.0,
            eigvec: None,
            records: Vec::new(),
        }
    }

    pub fn iteration(&self) -> usize {
        self.t
    }

    /// `H_t`.
    pub fn graph(&self) -> &SymmetricGraph {
        &self.graph
    }

    /// `γ_t = Σ 1/α_i`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn best_set(&self) -> &[usize] {
        &self.best_set
    }

    pub fn best_phi(&self) -> f64 {
        self.best_phi
    }

    /// `λ₂(𝓛_t)` of the latest round.
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Largest `λ₂(𝓛_i)/(2γ_i)` over all rounds so far.
    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    /// `φ(S*)/lower_bound`; infinite while no positive bound exists.
    pub fn approx_ratio(&self) -> f64 {
        if self.lower_bound > 0.0 {
            self.best_phi / self.lower_bound
        } else {
            f64::INFINITY
        }
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    /// Eigenvector of `𝓛_t` for `λ₂`, when `H_t` is connected.
    pub fn eigenvector(&self) -> Option<&[f64]> {
        self.eigvec.as_deref()
    }
}

/// Splits `order` at the π-weighted median: the longest prefix weighing at
/// most `π(V)/2` (at least one node), or its complement if lighter.
pub fn median_split(order: &[usize], pi: &NodeWeights) -> Vec<usize> {
    let half = pi.total() / 2.0;
    let mut acc = 0.0;
    let mut cut = 0;
    for &v in order {
        if acc + pi.get(v) > half {
            break;
        }
        acc += pi.get(v);
        cut += 1;
    }
    let cut = cut.max(1);
    let weight: f64 = order[..cut].iter().map(|&v| pi.get(v)).sum();
    let mut side: Vec<usize> =
        if weight <= pi.total() - weight { order[..cut].to_vec() } else { order[cut..].to_vec() };
    side.sort_unstable();
    side
}

/// Random balanced bisection: nodes are visited in random order and added
/// whenever the side stays within `π(V)/2`.
pub fn initial_bisection(pi: &NodeWeights, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_bisection(pi, &mut rng)
}

fn random_bisection(pi: &NodeWeights, rng: &mut impl Rng) -> Vec<usize> {
    let n = pi.len();
    assert!(n >= 2, "need at least two nodes");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let half = pi.total() / 2.0;
    let mut acc = 0.0;
    let mut side = Vec::new();
    for v in order {
        if acc + pi.get(v) <= half {
            acc += pi.get(v);
            side.push(v);
        }
    }
    side.sort_unstable();
    side
}

/// Packs connected components into two groups, heaviest first into the
/// lighter group, and returns the lighter group.
pub fn component_split(graph: &SymmetricGraph, pi: &NodeWeights) -> Vec<usize> {
    let labels = graph.components();
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut weight = vec![0.0; count];
    for (v, &c) in labels.iter().enumerate() {
        weight[c] += pi.get(v);
    }
    let mut comps: Vec<usize> = (0..count).collect();
    comps.sort_by(|&a, &b| weight[b].total_cmp(&weight[a]).then(a.cmp(&b)));
    let mut group = vec![false; count];
    let (mut left, mut right) = (0.0, 0.0);
    for c in comps {
        if left <= right {
            left += weight[c];
            group[c] = true;
        } else {
            right += weight[c];
        }
    }
    let pick = left <= right;
    (0..labels.len()).filter(|&v| group[labels[v]] == pick).collect()
}

fn threshold_split(op: &NormalizedLaplacian, y: &[f64], pi: &NodeWeights) -> Vec<usize> {
    let x = op.unnormalize(y);
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    median_split(&order, pi)
}

/// Thresholds the second eigenvector of `𝓛_t` (or splits components when
/// `H_t` is disconnected) and returns the lighter side.
pub fn spectral_partition(state: &CutMatchState, pi: &NodeWeights, cfg: &EigenConfig) -> Result<Vec<usize>> {
    if !state.graph.is_connected() {
        return Ok(component_split(&state.graph, pi));
    }
    let op = NormalizedLaplacian::new(&state.graph, pi);
    let y = match &state.eigvec {
        Some(y) => y.clone(),
        None => fiedler(&op, None, cfg)?.vector,
    };
    Ok(threshold_split(&op, &y, pi))
}

/// Thresholds `exp(−τ𝓛_t)·x` for a random `x`.
pub fn heat_kernel_partition(
    state: &CutMatchState,
    pi: &NodeWeights,
    tau: f64,
    order: usize,
    rng: &mut impl Rng,
) -> Vec<usize> {
    if !state.graph.is_connected() {
        return component_split(&state.graph, pi);
    }
    let op = NormalizedLaplacian::new(&state.graph, pi);
    let y = heat_kernel_vector(&op, tau, order, rng);
    threshold_split(&op, &y, pi)
}

/// Result of one round.
#[derive(Debug, Clone)]
pub struct Step {
    pub record: IterationRecord,
    pub certificate: BipartiteCertificate,
    pub set: Vec<usize>,
}

/// Stepwise driver over a fixed instance.
#[derive(Debug, Clone)]
pub struct CutMatch<'a> {
    h: &'a Hypergraph,
    pi: &'a NodeWeights,
    reduced: ReducedGraph,
    config: CutMatchConfig,
    state: CutMatchState,
    rng: ChaCha8Rng,
}

impl<'a> CutMatch<'a> {
    pub fn new(h: &'a Hypergraph, pi: &'a NodeWeights, config: CutMatchConfig) -> Result<Self> {
        if h.node_count() < 2 {
            return Err(Error::EmptySide);
        }
        if h.edge_count() == 0 {
            return Err(Error::NoHyperedges);
        }
        if pi.len() != h.node_count() {
            return Err(Error::WeightLength { expected: h.node_count(), got: pi.len() });
        }
        let reduced = build_preserver(h)?;
        let rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
        Ok(Self { h, pi, reduced, state: CutMatchState::new(h.node_count()), config, rng })
    }

    pub fn reduced(&self) -> &ReducedGraph {
        &self.reduced
    }

    pub fn state(&self) -> &CutMatchState {
        &self.state
    }

    pub fn into_state(self) -> CutMatchState {
        self.state
    }

    pub fn iterations(&self) -> usize {
        self.config.iterations.unwrap_or_else(|| default_iterations(self.h.node_count()))
    }

    fn next_bisection(&mut self) -> Result<Vec<usize>> {
        if self.state.t == 0 {
            return Ok(initial_bisection(self.pi, self.config.seed));
        }
        match self.config.player.clone() {
            CutPlayer::Spectral => spectral_partition(&self.state, self.pi, &self.config.eigen),
            CutPlayer::HeatKernel { tau, order } => {
                Ok(heat_kernel_partition(&self.state, self.pi, tau, order, &mut self.rng))
            }
            CutPlayer::Random => Ok(random_bisection(self.pi, &mut self.rng)),
        }
    }

    pub fn step(&mut self) -> Result<Step> {
        let started = Instant::now();
        let bisection = self.next_bisection()?;
        let out = refine_cut_or_embed(
            self.h,
            &self.reduced,
            self.pi,
            &bisection,
            EmbedOptions { retain_paths: self.config.retain_paths },
        )?;
        let state = &mut self.state;
        state.t += 1;
        for &(r, v, w) in out.certificate.entries() {
            state.graph.add_edge(r, v, w);
        }
        state.gamma += 1.0 / out.alpha;
        state.alphas.push(out.alpha);
        if out.phi < state.best_phi {
            state.best_phi = out.phi;
            state.best_set = out.set.clone();
        }

        let (lambda2, eigvec) = if state.graph.is_connected() {
            let op = NormalizedLaplacian::new(&state.graph, self.pi);
            let pair = fiedler(&op, state.eigvec.as_deref(), &self.config.eigen)?;
            (pair.value.max(0.0), Some(pair.vector))
        } else {
            (0.0, None)
        };
        state.lambda2 = lambda2;
        state.eigvec = eigvec;
        let round_bound = lambda2 / (2.0 * state.gamma);
        state.lower_bound = state.lower_bound.max(round_bound);
        if state.lower_bound > state.best_phi * (1.0 + 1e-6) {
            return Err(Error::InternalBoundExceeded(format!(
                "lower bound {} exceeds the best expansion found {}",
                state.lower_bound, state.best_phi
            )));
        }
        let record = IterationRecord {
            iteration: state.t,
            bisection,
            alpha: out.alpha,
            phi: out.phi,
            best_phi: state.best_phi,
            lambda2,
            gamma: state.gamma,
            round_bound,
            lower_bound: state.lower_bound,
            rho: state.approx_ratio(),
            flow_solves: out.flow_solves(),
            seconds: started.elapsed().as_secs_f64(),
        };
        debug!(
            "round {}: alpha {:.6} phi {:.6} lambda2 {:.6} bound {:.6}",
            record.iteration, record.alpha, record.phi, record.lambda2, record.lower_bound
        );
        state.records.push(record.clone());
        Ok(Step { record, certificate: out.certificate, set: out.set })
    }
}

/// Runs the configured number of rounds.
pub fn run(h: &Hypergraph, pi: &NodeWeights, config: CutMatchConfig) -> Result<CutMatchState> {
    let mut driver = CutMatch::new(h, pi, config)?;
    for _ in 0..driver.iterations() {
        driver.step()?;
    }
    Ok(driver.into_state())
}
