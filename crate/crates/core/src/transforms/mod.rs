//! Architecture transformations: cut-set pipelining and folding.

mod fold;
mod pipeline;
mod search;

pub use fold::{
    fold, folded_edge_delay, Connection, FoldError, FoldedArch, FoldingSpec, InputTap, IoSchedule, OutputSource,
    OutputTap, SpecError,
};
pub use pipeline::{pipeline, PipelineError, PipelineResult};
pub use search::{search_folding_orders, SearchError, MAX_SEARCH_COMBINATIONS, MAX_SEARCH_NODES};
