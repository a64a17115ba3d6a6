//! Approximate minimum π-expansion in hypergraphs with submodular
//! cardinality-based splitting functions.
//!
//! The solver plays a cut-matching game over a directed graph that preserves
//! every hypergraph cut. Each round embeds a bipartite graph into the
//! hypergraph with known congestion, and the spectral gap of their union
//! certifies a lower bound on the optimum.
//!
//! ```
//! use hypercut::cutmatch::{run, CutMatchConfig};
//! use hypercut::hypergraph::{Hypergraph, NodeWeights, SplittingKind};
//!
//! let h = Hypergraph::unweighted(4, vec![vec![0, 1, 2], vec![1, 2, 3], vec![0, 3]], &SplittingKind::AllOrNothing)?;
//! let pi = NodeWeights::unit(4);
//! let state = run(&h, &pi, CutMatchConfig::default())?;
//! assert!(state.lower_bound() <= state.best_phi());
//! # Ok::<(), hypercut::Error>(())
//! ```

pub mod cebaseline;
pub mod cutmatch;
pub mod embed;
pub mod error;
pub mod hypergraph;
pub mod instance;
pub mod io;
pub mod maxflow;
pub mod oracle;
pub mod reduction;
pub mod spectral;

pub use error::{Error, Result};
