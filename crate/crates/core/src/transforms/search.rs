//! Exhaustive search over fold orders for a fixed unit assignment.

use std::collections::BTreeMap;

use thiserror::Error;

use super::fold::{check_coverage, folded_edge_delay, FoldError, FoldingSpec, SpecError};
use crate::dfg::{Dfg, OpClass};

pub const MAX_SEARCH_NODES: usize = 8;
pub const MAX_SEARCH_COMBINATIONS: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("{nodes} compute nodes and {combinations} orderings exceed the exhaustive bound ({max_nodes} nodes, {max_combinations} orderings)")]
    TooLarge {
        nodes: usize,
        combinations: u128,
        max_nodes: usize,
        max_combinations: u64,
    },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Fold(#[from] FoldError),
}

/// Every placement of each unit's nodes into the `factor` time partitions
/// whose folded delays are all non-negative, ordered by total folded delay
/// and then by slot lists.
pub fn search_folding_orders(
    dfg: &Dfg,
    factor: usize,
    assignment: &BTreeMap<String, String>,
    stages: &BTreeMap<OpClass, u32>,
) -> Result<Vec<FoldingSpec>, SearchError> {
    if factor == 0 {
        return Err(SpecError::ZeroFactor.into());
    }
    let mut groups: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (node, unit) in assignment {
        groups.entry(unit.as_str()).or_default().push(node.as_str());
    }
    for (unit, members) in &groups {
        if members.len() > factor {
            return Err(SpecError::UnitTooLong {
                unit: unit.to_string(),
                len: members.len(),
                factor,
            }
            .into());
        }
    }

    let combinations: u128 = groups
        .values()
        .map(|m| (0..m.len()).map(|i| (factor - i) as u128).product::<u128>())
        .product();
    if assignment.len() > MAX_SEARCH_NODES || combinations > MAX_SEARCH_COMBINATIONS as u128 {
        return Err(SearchError::TooLarge {
            nodes: assignment.len(),
            combinations,
            max_nodes: MAX_SEARCH_NODES,
            max_combinations: MAX_SEARCH_COMBINATIONS,
        });
    }

    let template = |slots: &[Vec<Option<String>>]| -> BTreeMap<String, Vec<Option<String>>> {
        groups
            .keys()
            .map(|u| u.to_string())
            .zip(slots.iter().cloned())
            .collect()
    };
    // validate coverage/kinds once with an arbitrary packing
    let packed: Vec<Vec<Option<String>>> = groups
        .values()
        .map(|m| m.iter().map(|n| Some(n.to_string())).collect())
        .collect();
    check_coverage(dfg, &FoldingSpec::new(factor, template(&packed), stages.clone())?)?;

    let internal: Vec<_> = dfg
        .edges()
        .iter()
        .filter(|e| dfg.node(&e.src).unwrap().kind.is_compute() && dfg.node(&e.dst).unwrap().kind.is_compute())
        .collect();

    let mut found: Vec<(i64, Vec<Vec<String>>, FoldingSpec)> = Vec::new();
    let members: Vec<&Vec<&str>> = groups.values().collect();
    let mut slots: Vec<Vec<Option<String>>> = vec![vec![None; factor]; members.len()];
    place(&members, 0, 0, &mut slots, &mut |slots| {
        let spec = FoldingSpec::new(factor, template(slots), stages.clone())
            .expect("placements are injective and within the factor");
        let mut total = 0;
        for e in &internal {
            let d = folded_edge_delay(dfg, e, &spec).expect("coverage checked");
            if d < 0 {
                return;
            }
            total += d;
        }
        let key = spec
            .units()
            .values()
            .map(|s| s.iter().map(|n| n.clone().unwrap_or_else(|| "_".into())).collect())
            .collect();
        found.push((total, key, spec));
    });
    found.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(found.into_iter().map(|(_, _, s)| s).collect())
}

/// Slot lists of every unit, in unit order.
type Placement = [Vec<Option<String>>];

fn place(
    members: &[&Vec<&str>],
    unit: usize,
    idx: usize,
    slots: &mut Vec<Vec<Option<String>>>,
    visit: &mut dyn FnMut(&Placement),
) {
    if unit == members.len() {
        visit(slots);
        return;
    }
    if idx == members[unit].len() {
        place(members, unit + 1, 0, slots, visit);
        return;
    }
    for pos in 0..slots[unit].len() {
        if slots[unit][pos].is_none() {
            slots[unit][pos] = Some(members[unit][idx].to_string());
            place(members, unit, idx + 1, slots, visit);
            slots[unit][pos] = None;
        }
    }
}
