//! Hypergraphs with symmetric, submodular, cardinality-based splitting
//! functions, and the generalized cut and π-expansion they induce.
//!
//! A splitting function for a hyperedge of size `k` is stored as its penalty
//! vector `w_1..w_r` with `r = ⌊k/2⌋`. The value for a split that puts `j`
//! nodes of the hyperedge on one side is `w_{min(j, k-j)}`, and `w_0 = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when checking the submodularity of penalty vectors.
const PENALTY_TOL: f64 = 1e-12;

/// The parametric families a [`SplittingFunction`] can be built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SplittingKind {
    /// Every nontrivial split costs 1.
    AllOrNothing,
    /// `w(A) = min{|A|, |e \ A|, δ}`.
    DeltaLinear(f64),
    /// `w(A) = 1/2 + 1/2·min{1, |A|/⌈αk⌉, |e \ A|/⌈αk⌉}` for nontrivial splits.
    Limi(f64),
    /// An explicit penalty vector `w_1..w_⌊k/2⌋`, used for every size it fits.
    Custom(Vec<f64>),
}

impl std::fmt::Display for SplittingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplittingKind::AllOrNothing => write!(f, "aon"),
            SplittingKind::DeltaLinear(d) => write!(f, "delta-linear:{d}"),
            SplittingKind::Limi(a) => write!(f, "limi:{a}"),
            SplittingKind::Custom(w) => write!(f, "custom:{w:?}"),
        }
    }
}

/// Penalty vector of a symmetric submodular cardinality-based splitting
/// function for one hyperedge size.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingFunction {
    size: usize,
    penalties: Vec<f64>,
}

impl SplittingFunction {
    /// Instantiates `kind` for hyperedges of size `k`.
    pub fn new(kind: &SplittingKind, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSplitting(format!("hyperedge size {k} < 2")));
        }
        let r = k / 2;
        let penalties = match kind {
            SplittingKind::AllOrNothing => vec![1.0; r],
            SplittingKind::DeltaLinear(delta) => {
                if !(*delta >= 1.0) || !delta.is_finite() {
                    return Err(Error::InvalidSplitting(format!("delta must be >= 1, got {delta}")));
                }
                (1..=r).map(|i| (i as f64).min((k - i) as f64).min(*delta)).collect()
            }
            SplittingKind::Limi(frac) => {
                if !(*frac > 0.0 && *frac < 1.0) {
                    return Err(Error::InvalidSplitting(format!(
                        "limi fraction must lie in (0, 1), got {frac}"
                    )));
                }
                let c = (frac * k as f64).ceil().max(1.0);
                (1..=r)
                    .map(|i| {
                        let small = (i as f64 / c).min((k - i) as f64 / c);
                        0.5 + 0.5 * small.min(1.0)
                    })
                    .collect()
            }
            SplittingKind::Custom(w) => {
                if w.len() != r {
                    return Err(Error::InvalidSplitting(format!(
                        "custom vector for size {k} must have length {r}, got {}",
                        w.len()
                    )));
                }
                w.clone()
            }
        };
        Self::from_penalties(k, penalties)
    }

    /// Validates an explicit penalty vector `w_1..w_⌊k/2⌋`.
    ///
    /// The symmetric extension `0, w_1, .., w_r, .., w_1, 0` must be concave,
    /// which for the half vector means nonincreasing first differences and a
    /// nonnegative last difference.
    pub fn from_penalties(k: usize, penalties: Vec<f64>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSplitting(format!("hyperedge size {k} < 2")));
        }
        let r = k / 2;
        if penalties.len() != r {
            return Err(Error::InvalidSplitting(format!(
                "penalty vector for size {k} must have length {r}, got {}",
                penalties.len()
            )));
        }
        for (i, &w) in penalties.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::InvalidSplitting(format!("non-finite penalty w_{}", i + 1)));
            }
            if w < 0.0 {
                return Err(Error::NegativePenalty { size: k, index: i + 1, value: w });
            }
        }
        let scale = penalties.iter().fold(0.0f64, |m, &w| m.max(w.abs()));
        let tol = PENALTY_TOL * scale.max(f64::MIN_POSITIVE);
        let mut prev_w = 0.0;
        let mut prev_delta = f64::INFINITY;
        for (i, &w) in penalties.iter().enumerate() {
            let delta = w - prev_w;
            if delta > prev_delta + tol {
                return Err(Error::SubmodularityViolation { size: k, index: i + 1 });
            }
            prev_delta = delta;
            prev_w = w;
        }
        // the mirrored half starts with -Δ_r (even k) or 0 (odd k)
        if prev_delta < -tol {
            return Err(Error::SubmodularityViolation { size: k, index: r + 1 });
        }
        Ok(Self { size: k, penalties })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `w_1..w_⌊k/2⌋`.
    pub fn penalties(&self) -> &[f64] {
        &self.penalties
    }

    /// Penalty for a split with `j` nodes on one side.
    pub fn eval(&self, j: usize) -> f64 {
        debug_assert!(j <= self.size);
        let i = j.min(self.size - j);
        if i == 0 {
            0.0
        } else {
            self.penalties[i - 1]
        }
    }

    /// Penalty of separating a single node, `w_1`.
    pub fn singleton(&self) -> f64 {
        self.penalties[0]
    }

    pub fn max_penalty(&self) -> f64 {
        self.penalties.iter().copied().fold(0.0, f64::max)
    }
}

/// Positive node weights π and their total π(V).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeWeights {
    pi: Vec<f64>,
    total: f64,
}

impl NodeWeights {
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        for (node, &value) in pi.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveNodeWeight { node, value });
            }
        }
        let total = pi.iter().sum();
        Ok(Self { pi, total })
    }

    pub fn unit(n: usize) -> Self {
        Self { pi: vec![1.0; n], total: n as f64 }
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.pi[v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.pi
    }

    /// π(V).
    pub fn total(&self) -> f64 {
        self.total
    }

    /// π(S).
    pub fn of_set(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.pi[v]).sum()
    }

    pub fn of_mask(&self, mask: &[bool]) -> f64 {
        mask.iter().zip(&self.pi).filter(|(m, _)| **m).map(|(_, p)| p).sum()
    }

    pub fn min(&self) -> f64 {
        self.pi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Returns the weights multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let pi: Vec<f64> = self.pi.iter().map(|p| p * c).collect();
        let total = pi.iter().sum();
        Self { pi, total }
    }
}

/// A hypergraph on nodes `0..n` with a weighted splitting function per
/// hyperedge. Hyperedges are sorted, duplicate-free and have at least two
/// nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    weights: Vec<f64>,
    splitting: Vec<SplittingFunction>,
}

impl Hypergraph {
    pub fn new(
        n: usize,
        edges: Vec<Vec<usize>>,
        weights: Vec<f64>,
        splitting: Vec<SplittingFunction>,
    ) -> Result<Self> {
        if weights.len() != edges.len() || splitting.len() != edges.len() {
            return Err(Error::InvalidSplitting(format!(
                "{} hyperedges but {} weights and {} splitting functions",
                edges.len(),
                weights.len(),
                splitting.len()
            )));
        }
        let mut sorted = Vec::with_capacity(edges.len());
        for (idx, mut e) in edges.into_iter().enumerate() {
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidHyperedge { edge: idx, reason: "duplicate node".into() });
            }
            if e.len() < 2 {
                return Err(Error::InvalidHyperedge {
                    edge: idx,
                    reason: format!("size {} < 2", e.len()),
                });
            }
            if let Some(&v) = e.last() {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
            }
            if splitting[idx].size() != e.len() {
                return Err(Error::InvalidHyperedge {
                    edge: idx,
                    reason: format!(
                        "splitting function is for size {}, hyperedge has {} nodes",
                        splitting[idx].size(),
                        e.len()
                    ),
                });
            }
            let w = weights[idx];
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidEdgeWeight { edge: idx, value: w });
            }
            sorted.push(e);
        }
        Ok(Self { n, edges: sorted, weights, splitting })
    }

    /// Builds a hypergraph whose hyperedges all use the family `kind`.
    pub fn with_kind(
        n: usize,
        edges: Vec<Vec<usize>>,
        weights: Vec<f64>,
        kind: &SplittingKind,
    ) -> Result<Self> {
        let splitting = edges
            .iter()
            .map(|e| SplittingFunction::new(kind, e.len()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, edges, weights, splitting)
    }

    /// Unit-weight hypergraph with one splitting family.
    pub fn unweighted(n: usize, edges: Vec<Vec<usize>>, kind: &SplittingKind) -> Result<Self> {
        let m = edges.len();
        Self::with_kind(n, edges, vec![1.0; m], kind)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    pub fn edge_weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn splitting(&self, e: usize) -> &SplittingFunction {
        &self.splitting[e]
    }

    /// μ = Σ|e|.
    pub fn total_size(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// U, the largest weighted penalty any hyperedge can contribute.
    pub fn max_cut_penalty(&self) -> f64 {
        (0..self.edges.len())
            .map(|e| self.weights[e] * self.splitting[e].max_penalty())
            .fold(0.0, f64::max)
    }

    /// Smallest nonzero penalty of cutting any hyperedge, `min_e weight·w_1`.
    pub fn min_cut_penalty(&self) -> f64 {
        (0..self.edges.len())
            .map(|e| self.weights[e] * self.splitting[e].singleton())
            .fold(f64::INFINITY, f64::min)
    }

    /// Returns a copy with every hyperedge weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.weights.iter_mut().for_each(|w| *w *= c);
        out
    }

    /// Generalized cut of the node set `set`.
    pub fn cut_value(&self, set: &[usize]) -> f64 {
        self.cut_value_mask(&membership(self.n, set))
    }

    /// Generalized cut of the set marked `true` in `mask`.
    pub fn cut_value_mask(&self, mask: &[bool]) -> f64 {
        self.edges
            .iter()
            .enumerate()
            .map(|(idx, e)| {
                let inside = e.iter().filter(|&&v| mask[v]).count();
                if inside == 0 || inside == e.len() {
                    0.0
                } else {
                    self.weights[idx] * self.splitting[idx].eval(inside)
                }
            })
            .sum()
    }

    /// `cut(S) / min{π(S), π(V \ S)}`.
    pub fn pi_expansion(&self, pi: &NodeWeights, set: &[usize]) -> Result<f64> {
        self.pi_expansion_mask(pi, &membership(self.n, set))
    }

    pub fn pi_expansion_mask(&self, pi: &NodeWeights, mask: &[bool]) -> Result<f64> {
        let inside = pi.of_mask(mask);
        let count = mask.iter().filter(|&&b| b).count();
        if count == 0 || count == self.n {
            return Err(Error::EmptySide);
        }
        let denom = inside.min(pi.total() - inside);
        Ok(self.cut_value_mask(mask) / denom)
    }

    /// Degrees `d_v = Σ_{e ∋ v} weight(e)·w_e({v})`.
    pub fn generalized_degrees(&self) -> Result<NodeWeights> {
        let mut deg = vec![0.0; self.n];
        for (idx, e) in self.edges.iter().enumerate() {
            let d = self.weights[idx] * self.splitting[idx].singleton();
            for &v in e {
                deg[v] += d;
            }
        }
        if let Some(v) = deg.iter().position(|&d| d == 0.0) {
            return Err(Error::IsolatedNode(v));
        }
        NodeWeights::new(deg)
    }

    /// Whether every node is reachable from node 0 through hyperedges.
    pub fn is_connected(&self) -> bool {
        let comp = self.components();
        comp.iter().all(|&c| c == comp[0])
    }

    /// Component label per node; labels are dense and ordered by first node.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let root = find(&mut parent, e[0]);
            for &v in &e[1..] {
                let other = find(&mut parent, v);
                if other != root {
                    parent[other] = root;
                }
            }
        }
        let mut label = vec![usize::MAX; self.n];
        let mut out = vec![0; self.n];
        let mut next = 0;
        for v in 0..self.n {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out[v] = label[r];
        }
        out
    }
}

/// Boolean membership vector of `set` over `0..n`.
pub fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in set {
        mask[v] = true;
    }
    mask
}

/// Sorted members of a boolean mask.
pub fn members(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1() -> Hypergraph {
        Hypergraph::unweighted(4, vec![vec![0, 1, 2], vec![1, 2, 3], vec![0, 3]], &SplittingKind::AllOrNothing)
            .unwrap()
    }

    #[test]
    fn delta_linear_vector() {
        let sf = SplittingFunction::new(&SplittingKind::DeltaLinear(2.0), 4).unwrap();
        assert_eq!(sf.penalties(), &[1.0, 2.0]);
    }

    #[test]
    fn all_or_nothing_vector() {
        let sf = SplittingFunction::new(&SplittingKind::AllOrNothing, 5).unwrap();
        assert_eq!(sf.penalties(), &[1.0, 1.0]);
    }

    #[test]
    fn limi_vector() {
        let sf = SplittingFunction::new(&SplittingKind::Limi(0.25), 8).unwrap();
        assert_eq!(sf.penalties(), &[0.75, 1.0, 1.0, 1.0]);
        assert_eq!(sf.eval(0), 0.0);
        assert_eq!(sf.eval(8), 0.0);
        assert_eq!(sf.eval(7), 0.75);
    }

    #[test]
    fn custom_increasing_differences_rejected() {
        let err = SplittingFunction::new(&SplittingKind::Custom(vec![0.0, 1.0]), 4).unwrap_err();
        assert!(matches!(err, Error::SubmodularityViolation { size: 4, index: 2 }));
    }

    #[test]
    fn custom_dip_in_the_middle_rejected() {
        // 0, 2, 1, 2, 0 is not concave
        let err = SplittingFunction::new(&SplittingKind::Custom(vec![2.0, 1.0]), 4).unwrap_err();
        assert!(matches!(err, Error::SubmodularityViolation { index: 3, .. }));
        // odd sizes tolerate a flat middle but not a drop
        assert!(SplittingFunction::new(&SplittingKind::Custom(vec![2.0, 2.0]), 5).is_ok());
        assert!(SplittingFunction::new(&SplittingKind::Custom(vec![2.0, 1.5]), 5).is_err());
    }

    #[test]
    fn negative_penalty_rejected() {
        let err = SplittingFunction::new(&SplittingKind::Custom(vec![-1.0]), 3).unwrap_err();
        assert!(matches!(err, Error::NegativePenalty { .. }));
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(SplittingFunction::new(&SplittingKind::DeltaLinear(0.5), 4).is_err());
        assert!(SplittingFunction::new(&SplittingKind::Limi(1.0), 4).is_err());
        assert!(SplittingFunction::new(&SplittingKind::Limi(0.0), 4).is_err());
        assert!(SplittingFunction::new(&SplittingKind::AllOrNothing, 1).is_err());
        assert!(SplittingFunction::new(&SplittingKind::Custom(vec![1.0]), 4).is_err());
    }

    #[test]
    fn delta_linear_limits() {
        for k in 2..12 {
            let r = k / 2;
            let big = SplittingFunction::new(&SplittingKind::DeltaLinear(r as f64), k).unwrap();
            let linear: Vec<f64> = (1..=r).map(|i| i.min(k - i) as f64).collect();
            assert_eq!(big.penalties(), linear.as_slice());
            let one = SplittingFunction::new(&SplittingKind::DeltaLinear(1.0), k).unwrap();
            let aon = SplittingFunction::new(&SplittingKind::AllOrNothing, k).unwrap();
            assert_eq!(one, aon);
        }
    }

    #[test]
    fn t1_cuts() {
        let h = t1();
        assert_eq!(h.cut_value(&[0]), 2.0);
        assert_eq!(h.cut_value(&[]), 0.0);
        assert_eq!(h.cut_value(&[0, 1, 2, 3]), 0.0);
        assert_eq!(h.cut_value(&[0, 3]), 2.0);
    }

    #[test]
    fn t1_expansion() {
        let h = t1();
        let pi = NodeWeights::unit(4);
        assert_eq!(h.pi_expansion(&pi, &[0, 3]).unwrap(), 1.0);
        assert_eq!(h.pi_expansion(&pi, &[0, 1]).unwrap(), 1.5);
        assert_eq!(h.pi_expansion(&pi, &[0]).unwrap(), 2.0);
        assert_eq!(h.pi_expansion(&pi, &[]).unwrap_err(), Error::EmptySide);
        assert_eq!(h.pi_expansion(&pi, &[0, 1, 2, 3]).unwrap_err(), Error::EmptySide);
    }

    #[test]
    fn degrees() {
        assert_eq!(t1().generalized_degrees().unwrap().as_slice(), &[2.0; 4]);
        let single =
            Hypergraph::unweighted(3, vec![vec![0, 1, 2]], &SplittingKind::DeltaLinear(2.0)).unwrap();
        assert_eq!(single.generalized_degrees().unwrap().as_slice(), &[1.0; 3]);
        let isolated = Hypergraph::unweighted(6, vec![vec![0, 1, 2], vec![3, 4]], &SplittingKind::AllOrNothing)
            .unwrap();
        assert_eq!(isolated.generalized_degrees().unwrap_err(), Error::IsolatedNode(5));
    }

    #[test]
    fn invalid_hyperedges_rejected() {
        let aon = SplittingKind::AllOrNothing;
        assert!(Hypergraph::unweighted(3, vec![vec![0, 0, 1]], &aon).is_err());
        assert!(Hypergraph::unweighted(3, vec![vec![0, 5]], &aon).is_err());
        assert!(Hypergraph::with_kind(3, vec![vec![0, 1]], vec![0.0], &aon).is_err());
        let h = Hypergraph::unweighted(3, vec![vec![2, 0, 1]], &aon).unwrap();
        assert_eq!(h.edge(0), &[0, 1, 2]);
    }

    #[test]
    fn zero_node_weight_rejected() {
        assert!(matches!(
            NodeWeights::new(vec![1.0, 0.0]),
            Err(Error::NonPositiveNodeWeight { node: 1, .. })
        ));
    }

    #[test]
    fn components_and_connectivity() {
        let h = Hypergraph::unweighted(5, vec![vec![0, 1], vec![3, 4]], &SplittingKind::AllOrNothing).unwrap();
        assert_eq!(h.components(), vec![0, 0, 1, 2, 2]);
        assert!(!h.is_connected());
        assert!(t1().is_connected());
    }
}
