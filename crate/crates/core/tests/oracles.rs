//! Independent brute-force checks of graph analyses and the folding
//! equation.

mod common;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use dfg_fold::bundled;
use dfg_fold::dfg::{check_cutset, critical_path, feedforward_cutsets, CutSet, Dfg, DfgEdge, DfgNode, NodeKind};
use dfg_fold::transforms::{fold, FoldingSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// All simple paths over zero-delay edges; best by (length desc, ids asc).
fn brute_critical_path(g: &Dfg) -> (u64, Vec<String>) {
    fn walk(g: &Dfg, at: usize, path: &mut Vec<usize>, best: &mut (u64, Vec<String>)) {
        let len: u64 = path.iter().map(|&i| g.nodes()[i].latency as u64).sum();
        let ids: Vec<String> = path.iter().map(|&i| g.nodes()[i].id.clone()).collect();
        if len > best.0 || (len == best.0 && ids < best.1) {
            *best = (len, ids);
        }
        for e in g.fanout(at).filter(|e| e.delays == 0) {
            let next = g.node_pos(&e.dst).unwrap();
            if !path.contains(&next) {
                path.push(next);
                walk(g, next, path, best);
                path.pop();
            }
        }
    }
    let mut best = (0, Vec::new());
    for start in 0..g.nodes().len() {
        if best.1.is_empty() {
            best = (g.nodes()[start].latency as u64, vec![g.nodes()[start].id.clone()]);
        }
        walk(g, start, &mut vec![start], &mut best);
    }
    best
}

/// Any input-to-output walk crosses the set exactly once, checked over
/// (node, crossings so far) states with crossings capped at 2.
fn walk_oracle(g: &Dfg, cut: &BTreeSet<&str>) -> bool {
    let n = g.nodes().len();
    let mut seen = vec![[false; 3]; n];
    let mut queue = VecDeque::new();
    for (i, node) in g.nodes().iter().enumerate() {
        if node.kind == NodeKind::Input {
            seen[i][0] = true;
            queue.push_back((i, 0usize));
        }
    }
    while let Some((at, c)) = queue.pop_front() {
        for e in g.fanout(at) {
            let next = g.node_pos(&e.dst).unwrap();
            let c2 = (c + usize::from(cut.contains(e.id.as_str()))).min(2);
            if !seen[next][c2] {
                seen[next][c2] = true;
                queue.push_back((next, c2));
            }
        }
    }
    g.nodes()
        .iter()
        .enumerate()
        .filter(|(_, nd)| nd.kind == NodeKind::Output)
        .all(|(i, _)| !seen[i][0] && !seen[i][2])
}

/// Edges on some input-to-output walk.
fn on_io_walk(g: &Dfg) -> BTreeSet<String> {
    let reach = |from: NodeKind, forward: bool| {
        let mut mark: Vec<bool> = g.nodes().iter().map(|n| n.kind == from).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for e in g.edges() {
                let (a, b) = (g.node_pos(&e.src).unwrap(), g.node_pos(&e.dst).unwrap());
                let (a, b) = if forward { (a, b) } else { (b, a) };
                if mark[a] && !mark[b] {
                    mark[b] = true;
                    changed = true;
                }
            }
        }
        mark
    };
    let (fwd, bwd) = (reach(NodeKind::Input, true), reach(NodeKind::Output, false));
    g.edges()
        .iter()
        .filter(|e| fwd[g.node_pos(&e.src).unwrap()] && bwd[g.node_pos(&e.dst).unwrap()])
        .map(|e| e.id.clone())
        .collect()
}

fn oracle_cutsets(g: &Dfg) -> Vec<BTreeSet<String>> {
    let edges: Vec<String> = on_io_walk(g).into_iter().collect();
    let mut out: Vec<BTreeSet<String>> = (1u32..(1 << edges.len()))
        .map(|mask| {
            (0..edges.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| edges[i].clone())
                .collect()
        })
        .filter(|s: &BTreeSet<String>| walk_oracle(g, &s.iter().map(String::as_str).collect()))
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Every simple input-to-output path has exactly one cut edge.
fn simple_path_oracle(g: &Dfg, cut: &CutSet) -> bool {
    fn walk(g: &Dfg, at: usize, crossings: usize, visited: &mut Vec<usize>, cut: &CutSet) -> bool {
        if g.nodes()[at].kind == NodeKind::Output {
            return crossings == 1;
        }
        g.fanout(at).all(|e| {
            let next = g.node_pos(&e.dst).unwrap();
            if visited.contains(&next) {
                return true;
            }
            visited.push(next);
            let ok = walk(g, next, crossings + usize::from(cut.contains(&e.id)), visited, cut);
            visited.pop();
            ok
        })
    }
    g.nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.kind == NodeKind::Input)
        .all(|(i, _)| walk(g, i, 0, &mut vec![i], cut))
}

/// Random graph with up to two inputs and outputs and arbitrary fan-out.
fn random_general(rng: &mut ChaCha8Rng) -> Dfg {
    let inputs = rng.random_range(1..=2);
    let adders = rng.random_range(1..=6);
    let outputs = rng.random_range(1..=2);
    let mut nodes: Vec<DfgNode> = (0..inputs)
        .map(|i| DfgNode::new(format!("I{i}"), NodeKind::Input))
        .collect();
    for i in 0..adders {
        let kind = if rng.random_bool(0.25) {
            NodeKind::Gain { shift: 1 }
        } else {
            NodeKind::Add
        };
        let mut n = DfgNode::new(format!("A{i}"), kind);
        n.latency = rng.random_range(0..=2);
        nodes.push(n);
    }
    let compute_end = nodes.len();
    let mut edges = Vec::new();
    for i in inputs..compute_end {
        for port in 0..nodes[i].kind.in_ports() {
            let (src, w) = if rng.random_bool(0.1) {
                (rng.random_range(i..compute_end), 1)
            } else {
                (rng.random_range(0..i), rng.random_range(0..=1))
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
    for o in 0..outputs {
        let id = format!("O{o}");
        let src = rng.random_range(0..compute_end);
        edges.push(DfgEdge::new(
            format!("y{o}"),
            nodes[src].id.clone(),
            id.clone(),
            0,
            rng.random_range(0..=1),
        ));
        nodes.push(DfgNode::new(id, NodeKind::Output));
    }
    Dfg::new(nodes, edges).unwrap()
}

#[test]
fn critical_path_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let g = random_general(&mut rng);
        let cp = critical_path(&g);
        assert_eq!((cp.length, cp.nodes.clone()), brute_critical_path(&g), "{g:?}");
    }
    let cp = critical_path(&bundled::lpf());
    assert_eq!((cp.length, cp.nodes), brute_critical_path(&bundled::lpf()));
}

#[test]
fn cutsets_match_subset_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut nonempty = 0;
    for _ in 0..500 {
        let g = random_general(&mut rng);
        if g.edges().len() > 12 {
            continue;
        }
        let found: Vec<BTreeSet<String>> = feedforward_cutsets(&g, usize::MAX)
            .iter()
            .map(|c| c.iter().map(str::to_string).collect())
            .collect();
        assert_eq!(found, oracle_cutsets(&g), "{g:?}");
        for c in feedforward_cutsets(&g, usize::MAX) {
            assert!(simple_path_oracle(&g, &c), "{c} on {g:?}");
            assert_eq!(check_cutset(&g, &c), Ok(()));
        }
        nonempty += usize::from(!found.is_empty());
    }
    assert!(nonempty > 100);
}

#[test]
fn lpf_cutsets_from_oracle() {
    let g = bundled::lpf();
    let want = oracle_cutsets(&g);
    let abd: BTreeSet<String> = ["a", "b", "d"].map(String::from).into();
    assert!(want.contains(&abd));
    let found: Vec<BTreeSet<String>> = feedforward_cutsets(&g, usize::MAX)
        .iter()
        .map(|c| c.iter().map(str::to_string).collect())
        .collect();
    assert_eq!(found, want);
}

#[test]
fn rejected_sets_fail_the_walk_oracle() {
    let g = bundled::lpf();
    let ids: Vec<&str> = g.edges().iter().map(|e| e.id.as_str()).collect();
    for mask in 1u32..(1 << ids.len()) {
        let set: BTreeSet<&str> = (0..ids.len()).filter(|i| mask >> i & 1 == 1).map(|i| ids[i]).collect();
        let ours = check_cutset(&g, &CutSet::new(set.iter().copied())).is_ok();
        assert_eq!(ours, walk_oracle(&g, &set), "{set:?}");
    }
}

#[test]
fn folded_delays_match_hand_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..500 {
        let adders = rng.random_range(1..=6);
        let g = common::random_graph(&mut rng, adders, 0.2, &[]);
        let factor = rng.random_range(1..=4);
        let assignment = common::random_assignment(&mut rng, &g, factor);
        let p = rng.random_range(0..=2);
        let mut units: BTreeMap<String, Vec<Option<String>>> = BTreeMap::new();
        for (node, unit) in &assignment {
            units.entry(unit.clone()).or_default().push(Some(node.clone()));
        }
        // random positions inside each unit
        for slots in units.values_mut() {
            slots.resize(factor, None);
            for i in (1..slots.len()).rev() {
                slots.swap(i, rng.random_range(0..=i));
            }
        }
        let spec = FoldingSpec::new(factor, units.clone(), [(dfg_fold::dfg::OpClass::Add, p)].into()).unwrap();
        let slot = |n: &str| {
            units
                .values()
                .find_map(|s| s.iter().position(|x| x.as_deref() == Some(n)))
                .unwrap()
        };
        let expect: Vec<(String, i64)> = g
            .edges()
            .iter()
            .filter(|e| g.node(&e.src).unwrap().kind.is_compute() && g.node(&e.dst).unwrap().kind.is_compute())
            .map(|e| {
                let v = factor as i64 * e.delays as i64 - p as i64 + slot(&e.dst) as i64 - slot(&e.src) as i64;
                (e.id.clone(), v)
            })
            .collect();
        match fold(&g, &spec) {
            Ok(arch) => {
                let got: Vec<(String, i64)> = arch
                    .connections()
                    .iter()
                    .map(|c| (c.edge.clone(), c.folded_delay as i64))
                    .collect();
                assert_eq!(got, expect);
            }
            Err(dfg_fold::transforms::FoldError::Infeasible(neg)) => {
                let want: Vec<(String, i64)> = expect.into_iter().filter(|(_, d)| *d < 0).collect();
                assert_eq!(neg, want);
            }
            Err(e) => panic!("{e}"),
        }
    }
}
