//! Folding, cut-set pipelining and lifetime-based register minimization for
//! adder/delay dataflow graphs, with a bit-exact simulator to check that a
//! transformed architecture still computes the same filter.

pub mod bundled;
pub mod cli;
pub mod dfg;
pub mod lifetime;
pub mod sim;
pub mod transforms;

pub use dfg::{check_cutset, critical_path, feedforward_cutsets, CutSet, Dfg, DfgEdge, DfgNode, NodeKind, OpClass};
pub use lifetime::{allocate_registers, lifetime_table, max_live, LifetimeInterval, LifetimeTable};
pub use sim::{equivalence_check, simulate_dfg, simulate_folded, FixedPointConfig, SimTrace, Stimulus};
pub use transforms::{fold, pipeline, search_folding_orders, FoldedArch, FoldingSpec};
