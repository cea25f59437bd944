#![allow(dead_code)]

use std::collections::BTreeMap;

use dfg_fold::dfg::{Dfg, DfgEdge, DfgNode, NodeKind};
use rand::Rng;

/// Random single-input, single-output graph of `adders` compute nodes.
/// Each port is fed by an earlier node (any delay) or, with probability
/// `feedback`, by a later or the same node through at least one delay.
/// Gains with shifts in `gain_shifts` replace some adders when non-empty.
pub fn random_graph<R: Rng>(rng: &mut R, adders: usize, feedback: f64, gain_shifts: &[i32]) -> Dfg {
    let mut nodes = vec![DfgNode::new("IN", NodeKind::Input)];
    for i in 0..adders {
        let kind = if !gain_shifts.is_empty() && rng.random_bool(0.3) {
            NodeKind::Gain {
                shift: gain_shifts[rng.random_range(0..gain_shifts.len())],
            }
        } else {
            NodeKind::Add
        };
        nodes.push(DfgNode::new(format!("A{i}"), kind));
    }
    nodes.push(DfgNode::new("OUT", NodeKind::Output));

    let mut edges = Vec::new();
    for i in 1..=adders {
        for port in 0..nodes[i].kind.in_ports() {
            let (src, w) = if rng.random_bool(feedback) {
                (rng.random_range(i..=adders), rng.random_range(1..=2))
            } else {
                (rng.random_range(0..i), rng.random_range(0..=2))
            };
            edges.push(DfgEdge::new(
                format!("e{}", edges.len()),
                nodes[src].id.clone(),
                nodes[i].id.clone(),
                port,
                w,
            ));
        }
    }
    let src = if rng.random_bool(0.8) {
        adders
    } else {
        rng.random_range(0..=adders)
    };
    edges.push(DfgEdge::new(
        "y",
        nodes[src].id.clone(),
        "OUT",
        0,
        rng.random_range(0..=1),
    ));
    Dfg::new(nodes, edges).expect("generator builds valid graphs")
}

/// Random assignment of compute nodes to units holding at most `factor`
/// nodes of a single class.
pub fn random_assignment<R: Rng>(rng: &mut R, dfg: &Dfg, factor: usize) -> BTreeMap<String, String> {
    let mut load: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for (i, n) in dfg.compute_nodes().enumerate() {
        let class = n.kind.op_class().unwrap().to_string();
        let open: Vec<String> = load
            .iter()
            .filter(|(_, (k, c))| *k < factor && *c == class)
            .map(|(u, _)| u.clone())
            .collect();
        let unit = if open.is_empty() || rng.random_bool(0.3) {
            format!("U{i}")
        } else {
            open[rng.random_range(0..open.len())].clone()
        };
        let slot = load.entry(unit.clone()).or_insert((0, class));
        slot.0 += 1;
        out.insert(n.id.clone(), unit);
    }
    out
}

pub fn random_samples<R: Rng>(rng: &mut R, len: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..len).map(|_| rng.random_range(lo..=hi)).collect()
}
