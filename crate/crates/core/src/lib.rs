//! Two-way graph partitioning.
//!
//! The centerpiece is an unsupervised partitioner: a small graph convolutional
//! network is trained per instance against a differentiable surrogate of the
//! cut/balance objective, and a hard bisection is decoded from its per-node
//! probabilities. Kernighan-Lin and spectral bisection are included as
//! baselines, together with a benchmark harness that sweeps graph sizes and
//! reports cut and imbalance percentages.
//!
//! ```
//! use gpart_core::graph::{generate, cut_metrics};
//! use gpart_core::baselines::{kernighan_lin, KlConfig};
//!
//! let (g, _) = generate::two_cliques_bridge(4);
//! let part = kernighan_lin(&g, &KlConfig::default()).unwrap();
//! let m = cut_metrics(&g, &part).unwrap();
//! assert_eq!(m.cut_weight, 1.0);
//! ```

pub mod baselines;
pub mod bench;
pub mod error;
pub mod gnn;
pub mod graph;
pub mod loss;
pub mod train;

pub use error::{Error, Result};
pub use graph::{Graph, Metrics, Partition};
