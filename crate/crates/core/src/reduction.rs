//! Reduction of a hypergraph to a directed graph on `V ∪ A` whose cut
//! function, minimized over the auxiliary nodes `A`, equals the generalized
//! hypergraph cut.
//!
//! Each hyperedge `e` is replaced by one or more CB-gadgets. A gadget with
//! parameters `(a, b)` adds two auxiliary nodes `e'`, `e''`, arcs `(v, e')` and
//! `(e'', v)` of weight `a` for every `v ∈ e`, and one arc `(e', e'')` of weight
//! `a·b`. Its cut, minimized over the placements of `e'` and `e''`, is
//! `a·min(i, k - i, b)` when `i` nodes of `e` lie on the source side.

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, SplittingFunction};

/// Gadgets with a coefficient below this fraction of the largest one are dropped.
const ZERO_GADGET: f64 = 1e-12;

/// One CB-gadget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gadget {
    /// Weight `a > 0` of the node arcs.
    pub weight: f64,
    /// Cap `b`, `1 ≤ b ≤ ⌊k/2⌋`.
    pub cap: usize,
}

/// The gadgets modelling one weighted splitting function, ordered by cap.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GadgetSpec {
    pub gadgets: Vec<Gadget>,
}

impl GadgetSpec {
    /// `Σ_j a_j·min(i, k - i, b_j)`.
    pub fn penalty(&self, k: usize, i: usize) -> f64 {
        let side = i.min(k - i);
        self.gadgets.iter().map(|g| g.weight * side.min(g.cap) as f64).sum()
    }

    pub fn len(&self) -> usize {
        self.gadgets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gadgets.is_empty()
    }
}

/// Splits `edge_weight·w` into CB-gadgets.
///
/// With `Δ_i = w_i - w_{i-1}`, the gadget with cap `j` gets weight
/// `Δ_j - Δ_{j+1}` (and `Δ_r` for the last cap), scaled by the edge weight.
pub fn decompose_gadgets(sf: &SplittingFunction, edge_weight: f64) -> Result<GadgetSpec> {
    let w = sf.penalties();
    let r = w.len();
    let deltas: Vec<f64> =
        (0..r).map(|i| w[i] - if i == 0 { 0.0 } else { w[i - 1] }).collect();
    let mut coeffs: Vec<f64> = (0..r)
        .map(|j| edge_weight * (deltas[j] - if j + 1 < r { deltas[j + 1] } else { 0.0 }))
        .collect();
    let largest = coeffs.iter().fold(0.0f64, |m, &a| m.max(a.abs()));
    let tol = ZERO_GADGET * largest.max(f64::MIN_POSITIVE);
    for (j, a) in coeffs.iter_mut().enumerate() {
        if *a < -tol {
            return Err(Error::SubmodularityViolation { size: sf.size(), index: j + 1 });
        }
        if *a < tol {
            *a = 0.0;
        }
    }
    let gadgets = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, a)| *a > 0.0)
        .map(|(j, a)| Gadget { weight: a, cap: j + 1 })
        .collect();
    Ok(GadgetSpec { gadgets })
}

/// Minimum over the four placements of `e'`, `e''` of the directed cut of one
/// gadget when `i` of its `k` nodes are on the source side.
pub fn gadget_mincut(gadget: Gadget, k: usize, i: usize) -> f64 {
    assert!(i <= k, "i = {i} exceeds hyperedge size {k}");
    let a = gadget.weight;
    let inside = i as f64;
    let outside = (k - i) as f64;
    // (e' on source side?, e'' on source side?)
    let placements = [(false, false), (true, true), (true, false), (false, true)];
    placements
        .iter()
        .map(|&(first, second)| {
            let mut cut = 0.0;
            if !first {
                cut += a * inside; // (v, e') with v inside
            }
            if first && !second {
                cut += a * gadget.cap as f64; // (e', e'')
            }
            if second {
                cut += a * outside; // (e'', v) with v outside
            }
            cut
        })
        .fold(f64::INFINITY, f64::min)
}

/// Source of gadget parameters for each hyperedge. The exact decomposition is
/// the default; an approximate sparsifier can be slotted in here.
pub trait GadgetProvider {
    fn gadgets(&self, sf: &SplittingFunction, edge_weight: f64) -> Result<GadgetSpec>;
}

/// Exact decomposition with at most `⌊k/2⌋` gadgets per hyperedge.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactGadgets;

impl GadgetProvider for ExactGadgets {
    fn gadgets(&self, sf: &SplittingFunction, edge_weight: f64) -> Result<GadgetSpec> {
        decompose_gadgets(sf, edge_weight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
}

/// Where a gadget lives inside a [`ReducedGraph`].
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetInfo {
    pub hyperedge: usize,
    /// Hyperedge size `k`.
    pub size: usize,
    pub gadget: Gadget,
    /// `e'`.
    pub entry: usize,
    /// `e''`.
    pub exit: usize,
    /// First arc of the gadget; arcs are `(v, e')` for `v ∈ e`, then
    /// `(e'', v)` in the same order, then `(e', e'')`.
    pub first_arc: usize,
}

/// Augmented cut preserver `G(H)`. Nodes `0..n` are the hypergraph's nodes;
/// auxiliary nodes follow, two per gadget, in hyperedge order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGraph {
    original: usize,
    nodes: usize,
    arcs: Vec<Arc>,
    gadgets: Vec<GadgetInfo>,
}

impl ReducedGraph {
    pub fn original_count(&self) -> usize {
        self.original
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn gadgets(&self) -> &[GadgetInfo] {
        &self.gadgets
    }

    /// Capacity of arcs leaving the set marked in `mask` (length `node_count`).
    pub fn directed_cut(&self, mask: &[bool]) -> f64 {
        self.arcs.iter().filter(|a| mask[a.tail] && !mask[a.head]).map(|a| a.weight).sum()
    }

    /// Gadget owning an auxiliary node.
    pub fn gadget_of(&self, aux: usize) -> Option<usize> {
        (aux >= self.original && aux < self.nodes).then(|| (aux - self.original) / 2)
    }

    /// Arc `(v, e')` of a gadget, if `v` belongs to its hyperedge.
    pub fn entry_arc(&self, gadget: usize, v: usize) -> Option<usize> {
        let info = &self.gadgets[gadget];
        (info.first_arc..info.first_arc + info.size).find(|&a| self.arcs[a].tail == v)
    }

    /// Arc `(e'', v)` of a gadget, if `v` belongs to its hyperedge.
    pub fn exit_arc(&self, gadget: usize, v: usize) -> Option<usize> {
        let info = &self.gadgets[gadget];
        let first = info.first_arc + info.size;
        (first..first + info.size).find(|&a| self.arcs[a].head == v)
    }

    /// Arc `(e', e'')` of a gadget.
    pub fn middle_arc(&self, gadget: usize) -> usize {
        let info = &self.gadgets[gadget];
        info.first_arc + 2 * info.size
    }

    /// Mutable arc access for tests that corrupt a preserver.
    #[doc(hidden)]
    pub fn arcs_mut(&mut self) -> &mut [Arc] {
        &mut self.arcs
    }
}

pub fn build_preserver(h: &Hypergraph) -> Result<ReducedGraph> {
    build_preserver_with(h, &ExactGadgets)
}

pub fn build_preserver_with<P: GadgetProvider>(h: &Hypergraph, provider: &P) -> Result<ReducedGraph> {
    let n = h.node_count();
    let mut nodes = n;
    let mut arcs = Vec::new();
    let mut gadgets = Vec::new();
    for idx in 0..h.edge_count() {
        let e = h.edge(idx);
        let spec = provider.gadgets(h.splitting(idx), h.edge_weight(idx))?;
        for gadget in spec.gadgets {
            let entry = nodes;
            let exit = nodes + 1;
            nodes += 2;
            let first_arc = arcs.len();
            arcs.extend(e.iter().map(|&v| Arc { tail: v, head: entry, weight: gadget.weight }));
            arcs.extend(e.iter().map(|&v| Arc { tail: exit, head: v, weight: gadget.weight }));
            arcs.push(Arc { tail: entry, head: exit, weight: gadget.weight * gadget.cap as f64 });
            gadgets.push(GadgetInfo { hyperedge: idx, size: e.len(), gadget, entry, exit, first_arc });
        }
    }
    Ok(ReducedGraph { original: n, nodes, arcs, gadgets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::SplittingKind;

    fn sf(kind: SplittingKind, k: usize) -> SplittingFunction {
        SplittingFunction::new(&kind, k).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let d = decompose_gadgets(&sf(SplittingKind::DeltaLinear(2.0), 4), 1.0).unwrap();
        assert_eq!(d.gadgets, vec![Gadget { weight: 1.0, cap: 2 }]);
        let d = decompose_gadgets(&sf(SplittingKind::AllOrNothing, 5), 1.0).unwrap();
        assert_eq!(d.gadgets, vec![Gadget { weight: 1.0, cap: 1 }]);
        let d = decompose_gadgets(&sf(SplittingKind::Limi(0.25), 8), 1.0).unwrap();
        assert_eq!(d.gadgets, vec![Gadget { weight: 0.5, cap: 1 }, Gadget { weight: 0.25, cap: 2 }]);
        for i in 0..=8 {
            let expect = sf(SplittingKind::Limi(0.25), 8).eval(i);
            assert!((d.penalty(8, i) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn decompose_scales_with_weight() {
        let d = decompose_gadgets(&sf(SplittingKind::AllOrNothing, 3), 2.5).unwrap();
        assert_eq!(d.gadgets, vec![Gadget { weight: 2.5, cap: 1 }]);
    }

    #[test]
    fn gadget_mincut_examples() {
        assert_eq!(gadget_mincut(Gadget { weight: 1.0, cap: 1 }, 3, 1), 1.0);
        assert_eq!(gadget_mincut(Gadget { weight: 2.0, cap: 3 }, 10, 5), 6.0);
        assert_eq!(gadget_mincut(Gadget { weight: 3.0, cap: 2 }, 7, 0), 0.0);
        assert_eq!(gadget_mincut(Gadget { weight: 3.0, cap: 2 }, 7, 7), 0.0);
    }

    #[test]
    fn single_hyperedge_preserver() {
        let h = Hypergraph::unweighted(3, vec![vec![0, 1, 2]], &SplittingKind::AllOrNothing).unwrap();
        let g = build_preserver(&h).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.arc_count(), 7);
        let into: Vec<_> = g.arcs().iter().filter(|a| a.head == 3).collect();
        assert_eq!(into.len(), 3);
        let out: Vec<_> = g.arcs().iter().filter(|a| a.tail == 4).collect();
        assert_eq!(out.len(), 3);
        assert!(g.arcs().contains(&Arc { tail: 3, head: 4, weight: 1.0 }));
        assert!(g.arcs().iter().all(|a| a.weight == 1.0));
    }

    #[test]
    fn t1_preserver_counts() {
        let h = Hypergraph::unweighted(4, vec![vec![0, 1, 2], vec![1, 2, 3], vec![0, 3]], &SplittingKind::AllOrNothing)
            .unwrap();
        let g = build_preserver(&h).unwrap();
        assert_eq!(g.node_count(), 10);
        assert_eq!(g.arc_count(), 19);
        assert_eq!(g.gadget_of(4), Some(0));
        assert_eq!(g.gadget_of(9), Some(2));
        assert_eq!(g.gadget_of(3), None);
        // no arc joins two original nodes or auxiliaries of different gadgets
        for a in g.arcs() {
            assert!(a.tail >= 4 || a.head >= 4);
            if let (Some(x), Some(y)) = (g.gadget_of(a.tail), g.gadget_of(a.head)) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn empty_hypergraph_preserver() {
        let h = Hypergraph::new(3, vec![], vec![], vec![]).unwrap();
        let g = build_preserver(&h).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.arc_count(), 0);
    }
}
