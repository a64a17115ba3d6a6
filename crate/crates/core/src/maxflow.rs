//! Maximum s-t flow by highest-label push-relabel (gap heuristic, periodic
//! global relabeling) on floating-point capacities, minimum cut extraction,
//! and decomposition of a flow into simple s-t paths after cycle removal.

use crate::error::{Error, Result};

/// Residual capacities at or below `EPS_CAP · max capacity` count as saturated.
const EPS_CAP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowArc {
    pub tail: usize,
    pub head: usize,
    pub capacity: f64,
}

/// A directed network with a designated source and sink.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    nodes: usize,
    source: usize,
    sink: usize,
    arcs: Vec<FlowArc>,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        assert!(source < nodes && sink < nodes, "terminal out of range");
        assert_ne!(source, sink, "source and sink must differ");
        Self { nodes, source, sink, arcs: Vec::new() }
    }

    /// Adds an arc and returns its index.
    pub fn add_arc(&mut self, tail: usize, head: usize, capacity: f64) -> usize {
        assert!(tail < self.nodes && head < self.nodes, "arc endpoint out of range");
        assert!(capacity >= 0.0 && capacity.is_finite(), "capacity must be finite and nonnegative");
        self.arcs.push(FlowArc { tail, head, capacity });
        self.arcs.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[FlowArc] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Capacity of arcs leaving the set marked in `mask`.
    pub fn cut_capacity(&self, mask: &[bool]) -> f64 {
        self.arcs.iter().filter(|a| mask[a.tail] && !mask[a.head]).map(|a| a.capacity).sum()
    }

    /// Net inflow minus outflow of `flows` at every node.
    pub fn imbalance(&self, flows: &[f64]) -> Vec<f64> {
        let mut net = vec![0.0; self.nodes];
        for (a, &f) in self.arcs.iter().zip(flows) {
            net[a.tail] -= f;
            net[a.head] += f;
        }
        net
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub value: f64,
    /// Flow on every arc of the network, in arc order.
    pub flows: Vec<f64>,
    /// Nodes reachable from the source in the residual network.
    pub source_side: Vec<bool>,
}

impl FlowResult {
    pub fn source_side_nodes(&self) -> Vec<usize> {
        crate::hypergraph::members(&self.source_side)
    }
}

struct PushRelabel {
    n: usize,
    source: usize,
    sink: usize,
    /// Residual edges: `2i` is arc `i`, `2i + 1` its reverse.
    to: Vec<usize>,
    resid: Vec<f64>,
    adj_start: Vec<usize>,
    adj: Vec<usize>,
    current: Vec<usize>,
    height: Vec<usize>,
    excess: Vec<f64>,
    count: Vec<usize>,
    buckets: Vec<Vec<usize>>,
    queued: Vec<bool>,
    highest: usize,
    eps: f64,
    work: usize,
    relabel_period: usize,
}

impl PushRelabel {
    fn new(net: &FlowNetwork) -> Self {
        let n = net.nodes;
        let m = net.arcs.len();
        let mut to = Vec::with_capacity(2 * m);
        let mut resid = Vec::with_capacity(2 * m);
        let mut degree = vec![0usize; n + 1];
        for a in &net.arcs {
            to.push(a.head);
            resid.push(a.capacity);
            to.push(a.tail);
            resid.push(0.0);
            degree[a.tail] += 1;
            degree[a.head] += 1;
        }
        let mut adj_start = vec![0usize; n + 1];
        for v in 0..n {
            adj_start[v + 1] = adj_start[v] + degree[v];
        }
        let mut fill = adj_start.clone();
        let mut adj = vec![0usize; 2 * m];
        for (i, a) in net.arcs.iter().enumerate() {
            adj[fill[a.tail]] = 2 * i;
            fill[a.tail] += 1;
            adj[fill[a.head]] = 2 * i + 1;
            fill[a.head] += 1;
        }
        let max_cap = net.arcs.iter().map(|a| a.capacity).fold(0.0, f64::max);
        Self {
            n,
            source: net.source,
            sink: net.sink,
            to,
            resid,
            current: adj_start[..n].to_vec(),
            adj_start,
            adj,
            height: vec![0; n],
            excess: vec![0.0; n],
            count: vec![0; 2 * n + 1],
            buckets: vec![Vec::new(); 2 * n + 1],
            queued: vec![false; n],
            highest: 0,
            eps: EPS_CAP * max_cap,
            work: 0,
            relabel_period: 6 * n + 2 * m,
        }
    }

    fn edges(&self, v: usize) -> std::ops::Range<usize> {
        self.adj_start[v]..self.adj_start[v + 1]
    }

    fn activate(&mut self, v: usize) {
        if v != self.source && v != self.sink && !self.queued[v] && self.height[v] < 2 * self.n {
            self.queued[v] = true;
            let h = self.height[v];
            self.buckets[h].push(v);
            self.highest = self.highest.max(h);
        }
    }

    fn push(&mut self, e: usize, delta: f64) {
        let w = self.to[e];
        let v = self.to[e ^ 1];
        self.resid[e] -= delta;
        self.resid[e ^ 1] += delta;
        self.excess[v] -= delta;
        self.excess[w] += delta;
        self.activate(w);
    }

    /// Exact distance labels: distance to the sink, or `n` + distance to the
    /// source for nodes that can no longer reach the sink.
    fn global_relabel(&mut self) {
        let n = self.n;
        let unset = usize::MAX;
        self.height.iter_mut().for_each(|h| *h = unset);
        self.height[self.source] = n;
        self.height[self.sink] = 0;
        let mut queue = std::collections::VecDeque::new();
        for (root, base) in [(self.sink, 0), (self.source, n)] {
            self.height[root] = base;
            queue.push_back(root);
            while let Some(w) = queue.pop_front() {
                for idx in self.edges(w) {
                    let e = self.adj[idx];
                    let x = self.to[e];
                    if x == self.source || x == self.sink {
                        continue;
                    }
                    if self.height[x] == unset && self.resid[e ^ 1] > self.eps {
                        self.height[x] = self.height[w] + 1;
                        queue.push_back(x);
                    }
                }
            }
        }
        self.count.iter_mut().for_each(|c| *c = 0);
        self.buckets.iter_mut().for_each(Vec::clear);
        self.queued.iter_mut().for_each(|q| *q = false);
        self.highest = 0;
        for v in 0..n {
            if self.height[v] == unset || self.height[v] > 2 * n {
                self.height[v] = 2 * n;
            }
            self.count[self.height[v]] += 1;
            self.current[v] = self.adj_start[v];
        }
        for v in 0..n {
            if self.excess[v] > self.eps {
                self.activate(v);
            }
        }
        self.work = 0;
    }

    fn set_height(&mut self, v: usize, h: usize) {
        self.count[self.height[v]] -= 1;
        self.height[v] = h;
        self.count[h] += 1;
    }

    fn relabel(&mut self, v: usize) {
        let old = self.height[v];
        let mut best = 2 * self.n;
        for idx in self.edges(v) {
            let e = self.adj[idx];
            if self.resid[e] > self.eps {
                best = best.min(self.height[self.to[e]] + 1);
            }
        }
        self.work += self.adj_start[v + 1] - self.adj_start[v] + 12;
        self.set_height(v, best.min(2 * self.n));
        self.current[v] = self.adj_start[v];
        if old < self.n && self.count[old] == 0 {
            // gap: nothing below can reach the sink through these heights
            for u in 0..self.n {
                let h = self.height[u];
                if h > old && h < self.n {
                    self.set_height(u, self.n + 1);
                    self.current[u] = self.adj_start[u];
                }
            }
        }
    }

    fn discharge(&mut self, v: usize) {
        while self.excess[v] > self.eps {
            if self.height[v] >= 2 * self.n {
                return;
            }
            if self.current[v] == self.adj_start[v + 1] {
                self.relabel(v);
                continue;
            }
            let e = self.adj[self.current[v]];
            let w = self.to[e];
            if self.resid[e] > self.eps && self.height[v] == self.height[w] + 1 {
                let delta = self.excess[v].min(self.resid[e]);
                self.push(e, delta);
            } else {
                self.current[v] += 1;
            }
        }
    }

    fn run(&mut self) {
        let s = self.source;
        self.height[s] = self.n;
        for idx in self.edges(s) {
            let e = self.adj[idx];
            let cap = self.resid[e];
            if cap > 0.0 {
                self.excess[s] += cap;
                self.push(e, cap);
            }
        }
        self.global_relabel();
        loop {
            while self.highest > 0 && self.buckets[self.highest].is_empty() {
                self.highest -= 1;
            }
            let Some(v) = self.buckets[self.highest].pop() else {
                break;
            };
            self.queued[v] = false;
            if self.excess[v] <= self.eps {
                continue;
            }
            if self.height[v] != self.highest {
                // height changed by a gap after queueing
                self.activate(v);
                continue;
            }
            self.discharge(v);
            if self.work > self.relabel_period {
                self.global_relabel();
            }
        }
    }

    fn source_side(&self) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[self.source] = true;
        let mut stack = vec![self.source];
        while let Some(v) = stack.pop() {
            for idx in self.edges(v) {
                let e = self.adj[idx];
                let w = self.to[e];
                if !seen[w] && self.resid[e] > self.eps {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

/// Maximum s-t flow; the cut side is the residual reachability set of `s`.
pub fn max_flow(net: &FlowNetwork) -> FlowResult {
    let mut pr = PushRelabel::new(net);
    pr.run();
    let flows: Vec<f64> = net
        .arcs
        .iter()
        .enumerate()
        .map(|(i, a)| (a.capacity - pr.resid[2 * i]).clamp(0.0, a.capacity))
        .collect();
    let value = pr.excess[net.sink];
    FlowResult { value, flows, source_side: pr.source_side() }
}

/// One unit of a path decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPath {
    /// Node sequence from the source to the sink.
    pub nodes: Vec<usize>,
    /// Arc indices along the path; `arcs.len() == nodes.len() - 1`.
    pub arcs: Vec<usize>,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathDecomposition {
    pub paths: Vec<FlowPath>,
}

impl PathDecomposition {
    /// Per-arc flow obtained by summing the paths.
    pub fn arc_flows(&self, arc_count: usize) -> Vec<f64> {
        let mut out = vec![0.0; arc_count];
        for p in &self.paths {
            for &a in &p.arcs {
                out[a] += p.amount;
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.paths.iter().map(|p| p.amount).sum()
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Out-arcs of every node sorted by head id (then arc id).
fn sorted_out_arcs(net: &FlowNetwork) -> (Vec<usize>, Vec<usize>) {
    let n = net.nodes;
    let mut start = vec![0usize; n + 1];
    for a in &net.arcs {
        start[a.tail + 1] += 1;
    }
    for v in 0..n {
        start[v + 1] += start[v];
    }
    let mut order: Vec<usize> = (0..net.arcs.len()).collect();
    order.sort_by_key(|&i| (net.arcs[i].tail, net.arcs[i].head, i));
    (start, order)
}

/// Removes every directed cycle from `flow` by cancelling its bottleneck.
fn cancel_cycles(net: &FlowNetwork, flow: &mut [f64], start: &[usize], order: &[usize], tiny: f64) {
    let n = net.nodes;
    const NEW: u8 = 0;
    const OPEN: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![NEW; n];
    let mut ptr: Vec<usize> = start[..n].to_vec();
    let mut stack: Vec<usize> = Vec::new();
    let mut via: Vec<usize> = Vec::new(); // arc used to enter stack[i + 1]
    for root in 0..n {
        if state[root] != NEW {
            continue;
        }
        stack.push(root);
        state[root] = OPEN;
        while let Some(&v) = stack.last() {
            while ptr[v] < start[v + 1] && flow[order[ptr[v]]] <= tiny {
                ptr[v] += 1;
            }
            if ptr[v] == start[v + 1] {
                state[v] = DONE;
                stack.pop();
                via.pop();
                continue;
            }
            let arc = order[ptr[v]];
            let w = net.arcs[arc].head;
            match state[w] {
                NEW => {
                    state[w] = OPEN;
                    stack.push(w);
                    via.push(arc);
                }
                OPEN => {
                    let pos = stack.iter().rposition(|&x| x == w).expect("open node is on the stack");
                    let mut cycle: Vec<usize> = via[pos..].to_vec();
                    cycle.push(arc);
                    let delta = cycle.iter().map(|&a| flow[a]).fold(f64::INFINITY, f64::min);
                    for &a in &cycle {
                        flow[a] -= delta;
                        if flow[a] <= tiny {
                            flow[a] = 0.0;
                        }
                    }
                    // unwind to w; nodes above it may be revisited later
                    while stack.len() > pos + 1 {
                        let u = stack.pop().expect("nonempty");
                        via.pop();
                        state[u] = NEW;
                    }
                }
                _ => ptr[v] += 1,
            }
        }
    }
}

/// Decomposes a flow into simple source-to-sink paths, discarding cycles.
///
/// Paths are peeled by always following the positive-flow arc with the
/// smallest head id, so the result is deterministic.
pub fn decompose(net: &FlowNetwork, flow: &FlowResult) -> Result<PathDecomposition> {
    let n = net.nodes;
    let scale = flow.flows.iter().copied().fold(flow.value.abs(), f64::max);
    let tol = 1e-9 * flow.value.abs() + 1e-12;
    let imbalance = net.imbalance(&flow.flows);
    for (v, &d) in imbalance.iter().enumerate() {
        if v != net.source && v != net.sink && d.abs() > tol {
            return Err(Error::ConservationViolation { node: v, imbalance: d });
        }
    }
    let tiny = 1e-14 * scale;
    let mut f: Vec<f64> = flow.flows.iter().map(|&x| if x > tiny { x } else { 0.0 }).collect();
    let (start, order) = sorted_out_arcs(net);
    cancel_cycles(net, &mut f, &start, &order, tiny);

    let mut ptr: Vec<usize> = start[..n].to_vec();
    let mut paths = Vec::new();
    let mut visited = vec![false; n];
    loop {
        let s = net.source;
        let mut nodes = vec![s];
        let mut arcs = Vec::new();
        let mut v = s;
        let mut stuck = false;
        while v != net.sink {
            while ptr[v] < start[v + 1] && f[order[ptr[v]]] <= tiny {
                ptr[v] += 1;
            }
            if ptr[v] == start[v + 1] {
                stuck = true;
                break;
            }
            let arc = order[ptr[v]];
            let w = net.arcs[arc].head;
            if visited[w] || w == s {
                // only reachable through numerical residue of a cycle
                f[arc] = 0.0;
                continue;
            }
            visited[w] = true;
            arcs.push(arc);
            nodes.push(w);
            v = w;
        }
        for &u in &nodes {
            visited[u] = false;
        }
        if arcs.is_empty() {
            break;
        }
        let amount = arcs.iter().map(|&a| f[a]).fold(f64::INFINITY, f64::min);
        for &a in &arcs {
            f[a] -= amount;
            if f[a] <= tiny {
                f[a] = 0.0;
            }
        }
        if stuck {
            if amount > tol {
                return Err(Error::ConservationViolation { node: v, imbalance: amount });
            }
            continue;
        }
        paths.push(FlowPath { nodes, arcs, amount });
    }
    Ok(PathDecomposition { paths })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// s=0, a=1, b=2, t=3
    fn four_node() -> FlowNetwork {
        let mut net = FlowNetwork::new(4, 0, 3);
        net.add_arc(0, 1, 3.0);
        net.add_arc(0, 2, 2.0);
        net.add_arc(1, 2, 1.0);
        net.add_arc(1, 3, 2.0);
        net.add_arc(2, 3, 3.0);
        net
    }

    #[test]
    fn four_node_value() {
        let net = four_node();
        let res = max_flow(&net);
        assert!((res.value - 5.0).abs() < 1e-12);
        assert!(res.source_side[0] && !res.source_side[3]);
        assert!((net.cut_capacity(&res.source_side) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn single_arc() {
        let mut net = FlowNetwork::new(2, 0, 1);
        net.add_arc(0, 1, 7.0);
        let res = max_flow(&net);
        assert_eq!(res.value, 7.0);
        let d = decompose(&net, &res).unwrap();
        assert_eq!(d.paths, vec![FlowPath { nodes: vec![0, 1], arcs: vec![0], amount: 7.0 }]);
    }

    #[test]
    fn disconnected_terminals() {
        let mut net = FlowNetwork::new(4, 0, 3);
        net.add_arc(0, 1, 2.0);
        net.add_arc(2, 3, 2.0);
        let res = max_flow(&net);
        assert_eq!(res.value, 0.0);
        assert_eq!(res.source_side_nodes(), vec![0, 1]);
        assert!(decompose(&net, &res).unwrap().is_empty());
    }

    #[test]
    fn four_node_decomposition() {
        let net = four_node();
        let res = max_flow(&net);
        let d = decompose(&net, &res).unwrap();
        assert!((d.total() - 5.0).abs() < 1e-12);
        assert!(d.len() <= net.arc_count() + net.node_count());
        let rebuilt = d.arc_flows(net.arc_count());
        for (r, f) in rebuilt.iter().zip(&res.flows) {
            assert!(*r <= f + 1e-12);
        }
        for p in &d.paths {
            assert_eq!(p.nodes.first(), Some(&0));
            assert_eq!(p.nodes.last(), Some(&3));
        }
    }

    #[test]
    fn cycles_are_removed() {
        // s -> a -> t plus a cycle a -> b -> c -> a carrying flow
        let mut net = FlowNetwork::new(5, 0, 4);
        net.add_arc(0, 1, 1.0);
        net.add_arc(1, 4, 1.0);
        net.add_arc(1, 2, 1.0);
        net.add_arc(2, 3, 1.0);
        net.add_arc(3, 1, 1.0);
        let flow = FlowResult {
            value: 1.0,
            flows: vec![1.0, 1.0, 0.5, 0.5, 0.5],
            source_side: vec![true, false, false, false, false],
        };
        let d = decompose(&net, &flow).unwrap();
        assert_eq!(d.paths, vec![FlowPath { nodes: vec![0, 1, 4], arcs: vec![0, 1], amount: 1.0 }]);
    }

    #[test]
    fn conservation_violation_detected() {
        let mut net = FlowNetwork::new(3, 0, 2);
        net.add_arc(0, 1, 1.0);
        net.add_arc(1, 2, 1.0);
        let flow = FlowResult { value: 0.5, flows: vec![1.0, 0.5], source_side: vec![true, false, false] };
        assert!(matches!(decompose(&net, &flow), Err(Error::ConservationViolation { node: 1, .. })));
    }

    #[test]
    fn deterministic() {
        let net = four_node();
        assert_eq!(max_flow(&net), max_flow(&net));
    }

    #[test]
    fn zero_flow_decomposes_to_nothing() {
        let net = four_node();
        let flow = FlowResult { value: 0.0, flows: vec![0.0; 5], source_side: vec![true, false, false, false] };
        assert!(decompose(&net, &flow).unwrap().is_empty());
    }
}
