//! Folding: time-multiplexing several operations onto one hardware unit.
//!
//! With folding factor `N`, the folded machine runs `N` clock cycles per input
//! sample. A node placed at position `u` of its unit executes at cycles
//! `l*N + u`, and its result leaves the unit `P_u` cycles later. An edge
//! `U -> V` carrying `w` sample delays then needs
//!
//! ```text
//! D_F(U -> V) = N*w - P_u + v - u
//! ```
//!
//! registers between the two units. A negative value means the ordering is
//! not realizable without retiming.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::dfg::{Dfg, DfgEdge, NodeKind, OpClass};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("folding factor must be at least 1")]
    ZeroFactor,
    #[error("unit `{unit}` lists {len} slots but the folding factor is {factor}")]
    UnitTooLong { unit: String, len: usize, factor: usize },
    #[error("node `{node}` is placed more than once")]
    DuplicateNode { node: String },
}

/// Folding factor, ordered folding sets and per-class unit pipeline depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldingSpec {
    factor: usize,
    /// Slot lists; position is the fold order, `None` is an idle slot.
    units: BTreeMap<String, Vec<Option<String>>>,
    stages: BTreeMap<OpClass, u32>,
    placement: HashMap<String, (String, usize)>,
}

pub const DEFAULT_STAGES: u32 = 1;

impl FoldingSpec {
    pub fn new(
        factor: usize,
        units: BTreeMap<String, Vec<Option<String>>>,
        stages: BTreeMap<OpClass, u32>,
    ) -> Result<Self, SpecError> {
        if factor == 0 {
            return Err(SpecError::ZeroFactor);
        }
        let mut units = units;
        let mut placement = HashMap::new();
        for (unit, slots) in units.iter_mut() {
            while slots.last() == Some(&None) {
                slots.pop();
            }
            if slots.len() > factor {
                return Err(SpecError::UnitTooLong {
                    unit: unit.clone(),
                    len: slots.len(),
                    factor,
                });
            }
            for (pos, node) in slots.iter().enumerate() {
                if let Some(node) = node {
                    if placement.insert(node.clone(), (unit.clone(), pos)).is_some() {
                        return Err(SpecError::DuplicateNode { node: node.clone() });
                    }
                }
            }
        }
        Ok(FoldingSpec {
            factor,
            units,
            stages,
            placement,
        })
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn units(&self) -> &BTreeMap<String, Vec<Option<String>>> {
        &self.units
    }

    pub fn stage_overrides(&self) -> &BTreeMap<OpClass, u32> {
        &self.stages
    }

    /// `P` for units executing `class`.
    pub fn stages(&self, class: OpClass) -> u32 {
        self.stages.get(&class).copied().unwrap_or(DEFAULT_STAGES)
    }

    /// Unit and fold order of `node`.
    pub fn placement(&self, node: &str) -> Option<(&str, usize)> {
        self.placement.get(node).map(|(u, p)| (u.as_str(), *p))
    }

    /// Same spec with a different folding factor.
    pub fn with_factor(&self, factor: usize) -> Result<Self, SpecError> {
        FoldingSpec::new(factor, self.units.clone(), self.stages.clone())
    }
}

impl fmt::Display for FoldingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={}", self.factor)?;
        for (unit, slots) in &self.units {
            let names: Vec<&str> = slots.iter().map(|s| s.as_deref().unwrap_or("_")).collect();
            write!(f, " {unit}={{{}}}", names.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FoldError {
    #[error("node `{node}` is not assigned to any folding set")]
    UnmappedNode { node: String },
    #[error("folding set places `{node}`, which is not a compute node of the graph")]
    NotCompute { node: String },
    #[error("unit `{unit}` mixes operation classes ({classes})")]
    MixedKinds { unit: String, classes: String },
    #[error("folding infeasible: {}", .0.iter().map(|(e, d)| format!("D_F({e}) = {d}")).collect::<Vec<_>>().join(", "))]
    Infeasible(Vec<(String, i64)>),
}

/// One internal edge of the source graph, realized between two units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    pub edge: String,
    pub src: String,
    pub dst: String,
    pub producer_unit: String,
    pub consumer_unit: String,
    pub dst_port: usize,
    pub produce_slot: usize,
    pub consume_slot: usize,
    pub delays: u32,
    pub producer_stages: u32,
    pub folded_delay: u32,
}

/// External input presented to a unit's port, `folded_delay` cycles after
/// it was sampled at the start of a frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputTap {
    pub edge: String,
    pub input: String,
    pub dst: String,
    pub consumer_unit: String,
    pub dst_port: usize,
    pub consume_slot: usize,
    pub folded_delay: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutputSource {
    Input {
        input: String,
    },
    Unit {
        unit: String,
        node: String,
        slot: usize,
        stages: u32,
    },
}

/// Output register: captured once per frame at cycle offset
/// [`IoSchedule::capture_offset`], reading the source `folded_delay` cycles
/// back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputTap {
    pub edge: String,
    pub output: String,
    pub source: OutputSource,
    pub folded_delay: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IoSchedule {
    pub inputs: Vec<InputTap>,
    pub outputs: Vec<OutputTap>,
    /// Cycle within the run (relative to frame start `l*N`) at which the
    /// outputs for sample `l` are registered. Shared by all outputs.
    pub capture_offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldedArch {
    source: Dfg,
    spec: FoldingSpec,
    connections: Vec<Connection>,
    io: IoSchedule,
    unit_class: BTreeMap<String, OpClass>,
}

impl FoldedArch {
    pub fn source(&self) -> &Dfg {
        &self.source
    }

    pub fn spec(&self) -> &FoldingSpec {
        &self.spec
    }

    pub fn connections(&self) -> &[Connection] {
        &self.connections
    }

    pub fn io_schedule(&self) -> &IoSchedule {
        &self.io
    }

    pub fn factor(&self) -> usize {
        self.spec.factor
    }

    /// Operation class of each non-empty unit.
    pub fn unit_classes(&self) -> &BTreeMap<String, OpClass> {
        &self.unit_class
    }

    /// Whole samples between an input sample and the matching output of the
    /// folded machine, when its output is read once per frame.
    pub fn latency_samples(&self) -> usize {
        self.io.capture_offset / self.spec.factor
    }

    /// Cycle within each frame at which outputs are registered.
    pub fn output_phase(&self) -> usize {
        self.io.capture_offset % self.spec.factor
    }

    pub fn total_folded_delay(&self) -> u64 {
        self.connections.iter().map(|c| c.folded_delay as u64).sum()
    }
}

/// `N*w(e) - P_u + v - u` for an edge between two compute nodes.
pub fn folded_edge_delay(dfg: &Dfg, edge: &DfgEdge, spec: &FoldingSpec) -> Result<i64, FoldError> {
    let (_, u) = spec
        .placement(&edge.src)
        .ok_or_else(|| FoldError::UnmappedNode { node: edge.src.clone() })?;
    let (_, v) = spec
        .placement(&edge.dst)
        .ok_or_else(|| FoldError::UnmappedNode { node: edge.dst.clone() })?;
    let class = dfg
        .node(&edge.src)
        .and_then(|n| n.kind.op_class())
        .ok_or_else(|| FoldError::NotCompute { node: edge.src.clone() })?;
    let p = spec.stages(class) as i64;
    Ok(spec.factor as i64 * edge.delays as i64 - p + v as i64 - u as i64)
}

/// Checks that `spec` places every compute node of `dfg` exactly once and
/// only groups nodes of one class per unit.
pub(crate) fn check_coverage(dfg: &Dfg, spec: &FoldingSpec) -> Result<BTreeMap<String, OpClass>, FoldError> {
    for node in spec.placement.keys() {
        if !dfg.node(node).is_some_and(|n| n.kind.is_compute()) {
            return Err(FoldError::NotCompute { node: node.clone() });
        }
    }
    for n in dfg.compute_nodes() {
        if spec.placement(&n.id).is_none() {
            return Err(FoldError::UnmappedNode { node: n.id.clone() });
        }
    }
    let mut unit_class = BTreeMap::new();
    for (unit, slots) in &spec.units {
        let mut classes: Vec<OpClass> = slots
            .iter()
            .flatten()
            .filter_map(|n| dfg.node(n).and_then(|n| n.kind.op_class()))
            .collect();
        classes.sort();
        classes.dedup();
        match classes.as_slice() {
            [] => {}
            [one] => {
                unit_class.insert(unit.clone(), *one);
            }
            many => {
                return Err(FoldError::MixedKinds {
                    unit: unit.clone(),
                    classes: many.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", "),
                })
            }
        }
    }
    Ok(unit_class)
}

pub fn fold(dfg: &Dfg, spec: &FoldingSpec) -> Result<FoldedArch, FoldError> {
    let unit_class = check_coverage(dfg, spec)?;
    let n = spec.factor;

    let mut connections = Vec::new();
    let mut inputs = Vec::new();
    let mut output_edges = Vec::new();
    let mut negative = Vec::new();

    for e in dfg.edges() {
        let src_kind = dfg.node(&e.src).unwrap().kind;
        let dst_kind = dfg.node(&e.dst).unwrap().kind;
        match (src_kind, dst_kind) {
            (_, NodeKind::Output) => output_edges.push(e),
            (NodeKind::Input, _) => {
                let (unit, v) = spec.placement(&e.dst).unwrap();
                inputs.push(InputTap {
                    edge: e.id.clone(),
                    input: e.src.clone(),
                    dst: e.dst.clone(),
                    consumer_unit: unit.to_string(),
                    dst_port: e.dst_port,
                    consume_slot: v,
                    // input behaves as a producer at slot 0 with no pipeline
                    folded_delay: (n * e.delays as usize + v) as u32,
                });
            }
            _ => {
                let d = folded_edge_delay(dfg, e, spec)?;
                if d < 0 {
                    negative.push((e.id.clone(), d));
                    continue;
                }
                let (pu, u) = spec.placement(&e.src).unwrap();
                let (cu, v) = spec.placement(&e.dst).unwrap();
                connections.push(Connection {
                    edge: e.id.clone(),
                    src: e.src.clone(),
                    dst: e.dst.clone(),
                    producer_unit: pu.to_string(),
                    consumer_unit: cu.to_string(),
                    dst_port: e.dst_port,
                    produce_slot: u,
                    consume_slot: v,
                    delays: e.delays,
                    producer_stages: spec.stages(src_kind.op_class().unwrap()),
                    folded_delay: d as u32,
                });
            }
        }
    }
    if !negative.is_empty() {
        return Err(FoldError::Infeasible(negative));
    }

    // Result for sample l of an output's source appears at l*N + u + P.
    let sources: Vec<(OutputSource, usize)> = output_edges
        .iter()
        .map(|e| match dfg.node(&e.src).unwrap().kind.op_class() {
            None => (OutputSource::Input { input: e.src.clone() }, 0),
            Some(class) => {
                let (unit, slot) = spec.placement(&e.src).unwrap();
                let stages = spec.stages(class);
                (
                    OutputSource::Unit {
                        unit: unit.to_string(),
                        node: e.src.clone(),
                        slot,
                        stages,
                    },
                    slot + stages as usize,
                )
            }
        })
        .collect();
    let capture_offset = sources.iter().map(|(_, ready)| *ready).max().unwrap_or(0);
    let outputs = output_edges
        .iter()
        .zip(sources)
        .map(|(e, (source, ready))| OutputTap {
            edge: e.id.clone(),
            output: e.dst.clone(),
            source,
            folded_delay: (n * e.delays as usize + capture_offset - ready) as u32,
        })
        .collect();

    Ok(FoldedArch {
        source: dfg.clone(),
        spec: spec.clone(),
        connections,
        io: IoSchedule {
            inputs,
            outputs,
            capture_offset,
        },
        unit_class,
    })
}
