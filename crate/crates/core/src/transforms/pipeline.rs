use std::collections::HashMap;

use thiserror::Error;

use crate::dfg::{check_cutset, CutSet, CutSetViolation, Dfg};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("invalid cut-set: {0}")]
    InvalidCutSet(#[from] CutSetViolation),
    #[error("registers per edge must be positive")]
    ZeroRegisters,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineResult {
    pub dfg: Dfg,
    pub inserted_registers: u64,
    pub stages: usize,
    /// Samples of latency added to every input-to-output path.
    pub added_latency: u32,
}

/// Inserts `registers_per_edge` registers on every edge of a feed-forward
/// cut-set. Each input-to-output path crosses the cut once, so every path
/// gains the same latency and the filter's response is only delayed.
pub fn pipeline(dfg: &Dfg, cut: &CutSet, registers_per_edge: u32) -> Result<PipelineResult, PipelineError> {
    if registers_per_edge == 0 {
        return Err(PipelineError::ZeroRegisters);
    }
    check_cutset(dfg, cut)?;
    let updates: HashMap<String, u32> = cut
        .iter()
        .map(|id| (id.to_string(), dfg.edge(id).unwrap().delays + registers_per_edge))
        .collect();
    let out = dfg
        .with_delays(&updates)
        .expect("adding delays cannot invalidate a graph");
    Ok(PipelineResult {
        dfg: out,
        inserted_registers: cut.len() as u64 * registers_per_edge as u64,
        stages: 2,
        added_latency: registers_per_edge,
    })
}
