//! Validated synchronous dataflow graphs.
//!
//! Nodes are inputs, outputs, two-input adders and power-of-two gains. Edges
//! carry a non-negative number of sample delays (registers). A [`Dfg`] can only
//! be obtained through [`validate`] (or [`Dfg::new`]), so every graph in the
//! crate is known to be fully driven and free of combinational loops.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Operation class of a compute node. Units of a folded design execute a
/// single class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpClass {
    Add,
    Gain,
}

impl OpClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            OpClass::Add => "add",
            OpClass::Gain => "gain",
        }
    }
}

impl fmt::Display for OpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OpClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "add" => Ok(OpClass::Add),
            "gain" => Ok(OpClass::Gain),
            other => Err(format!("unknown operation class `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Input,
    Output,
    Add,
    /// Multiply by `2^shift`; negative shifts are arithmetic right shifts.
    Gain {
        shift: i32,
    },
}

impl NodeKind {
    pub fn in_ports(&self) -> usize {
        match self {
            NodeKind::Input => 0,
            NodeKind::Output | NodeKind::Gain { .. } => 1,
            NodeKind::Add => 2,
        }
    }

    pub fn has_output(&self) -> bool {
        !matches!(self, NodeKind::Output)
    }

    pub fn is_compute(&self) -> bool {
        self.op_class().is_some()
    }

    pub fn op_class(&self) -> Option<OpClass> {
        match self {
            NodeKind::Add => Some(OpClass::Add),
            NodeKind::Gain { .. } => Some(OpClass::Gain),
            NodeKind::Input | NodeKind::Output => None,
        }
    }

    pub fn default_latency(&self) -> u32 {
        if self.is_compute() {
            1
        } else {
            0
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::Input => f.write_str("input"),
            NodeKind::Output => f.write_str("output"),
            NodeKind::Add => f.write_str("add"),
            NodeKind::Gain { shift } => write!(f, "gain:{shift}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfgNode {
    pub id: String,
    pub kind: NodeKind,
    pub latency: u32,
}

impl DfgNode {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Self {
        DfgNode {
            id: id.into(),
            kind,
            latency: kind.default_latency(),
        }
    }
}

/// A delay-weighted connection from the (single) output of `src` to input
/// port `dst_port` of `dst`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfgEdge {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub dst_port: usize,
    pub delays: u32,
}

impl DfgEdge {
    pub fn new(
        id: impl Into<String>,
        src: impl Into<String>,
        dst: impl Into<String>,
        dst_port: usize,
        delays: u32,
    ) -> Self {
        DfgEdge {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
            dst_port,
            delays,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    DuplicateId {
        id: String,
    },
    UnknownNode {
        edge: String,
        node: String,
    },
    BadPort {
        edge: String,
        node: String,
        port: usize,
    },
    NoOutputPort {
        edge: String,
        node: String,
    },
    MultipleDrivers {
        node: String,
        port: usize,
        edges: Vec<String>,
    },
    DanglingPort {
        node: String,
        port: usize,
    },
    /// Node ids around a cycle whose edges all carry zero delays.
    CombinationalLoop {
        cycle: Vec<String>,
    },
    NoInput,
    NoOutput,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DuplicateId { id } => write!(f, "duplicate id `{id}`"),
            Diagnostic::UnknownNode { edge, node } => {
                write!(f, "edge `{edge}` refers to undeclared node `{node}`")
            }
            Diagnostic::BadPort { edge, node, port } => {
                write!(f, "edge `{edge}` targets nonexistent port p{port} of `{node}`")
            }
            Diagnostic::NoOutputPort { edge, node } => {
                write!(f, "edge `{edge}` leaves `{node}`, which has no output port")
            }
            Diagnostic::MultipleDrivers { node, port, edges } => {
                write!(f, "port {node}.p{port} is driven by {}", edges.join(", "))
            }
            Diagnostic::DanglingPort { node, port } => {
                write!(f, "dangling port: {node}.p{port} is not driven")
            }
            Diagnostic::CombinationalLoop { cycle } => {
                write!(f, "combinational loop: {}", cycle.join(" -> "))
            }
            Diagnostic::NoInput => f.write_str("graph has no input node"),
            Diagnostic::NoOutput => f.write_str("graph has no output node"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid dataflow graph: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationError(pub Vec<Diagnostic>);

/// An immutable, validated dataflow graph.
#[derive(Clone, Debug)]
pub struct Dfg {
    nodes: Vec<DfgNode>,
    edges: Vec<DfgEdge>,
    node_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    /// `drivers[n][p]` is the edge feeding port `p` of node `n`.
    drivers: Vec<Vec<usize>>,
    fanout: Vec<Vec<usize>>,
}

impl PartialEq for Dfg {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Dfg {}

pub fn validate(nodes: Vec<DfgNode>, edges: Vec<DfgEdge>) -> Result<Dfg, ValidationError> {
    let mut diags = Vec::new();

    let mut seen = HashSet::new();
    for id in nodes.iter().map(|n| &n.id).chain(edges.iter().map(|e| &e.id)) {
        if !seen.insert(id.as_str()) {
            diags.push(Diagnostic::DuplicateId { id: id.clone() });
        }
    }

    let mut node_index = HashMap::new();
    for (i, n) in nodes.iter().enumerate() {
        node_index.entry(n.id.clone()).or_insert(i);
    }
    let mut edge_index = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        edge_index.entry(e.id.clone()).or_insert(i);
    }

    let mut port_edges: Vec<Vec<Vec<usize>>> = nodes.iter().map(|n| vec![Vec::new(); n.kind.in_ports()]).collect();
    let mut fanout = vec![Vec::new(); nodes.len()];
    let mut endpoints_ok = true;
    for (ei, e) in edges.iter().enumerate() {
        let src = node_index.get(&e.src).copied();
        let dst = node_index.get(&e.dst).copied();
        for (name, idx) in [(&e.src, src), (&e.dst, dst)] {
            if idx.is_none() {
                diags.push(Diagnostic::UnknownNode {
                    edge: e.id.clone(),
                    node: name.clone(),
                });
            }
        }
        let (Some(src), Some(dst)) = (src, dst) else {
            endpoints_ok = false;
            continue;
        };
        if !nodes[src].kind.has_output() {
            diags.push(Diagnostic::NoOutputPort {
                edge: e.id.clone(),
                node: e.src.clone(),
            });
            endpoints_ok = false;
            continue;
        }
        if e.dst_port >= nodes[dst].kind.in_ports() {
            diags.push(Diagnostic::BadPort {
                edge: e.id.clone(),
                node: e.dst.clone(),
                port: e.dst_port,
            });
            endpoints_ok = false;
            continue;
        }
        port_edges[dst][e.dst_port].push(ei);
        fanout[src].push(ei);
    }

    let mut drivers = vec![Vec::new(); nodes.len()];
    for (ni, ports) in port_edges.iter().enumerate() {
        for (p, driving) in ports.iter().enumerate() {
            match driving.as_slice() {
                [] => diags.push(Diagnostic::DanglingPort {
                    node: nodes[ni].id.clone(),
                    port: p,
                }),
                [one] => drivers[ni].push(*one),
                many => {
                    diags.push(Diagnostic::MultipleDrivers {
                        node: nodes[ni].id.clone(),
                        port: p,
                        edges: many.iter().map(|&i| edges[i].id.clone()).collect(),
                    });
                    drivers[ni].push(many[0]);
                }
            }
        }
    }

    if !nodes.iter().any(|n| n.kind == NodeKind::Input) {
        diags.push(Diagnostic::NoInput);
    }
    if !nodes.iter().any(|n| n.kind == NodeKind::Output) {
        diags.push(Diagnostic::NoOutput);
    }

    if endpoints_ok {
        if let Some(cycle) = find_zero_delay_cycle(&nodes, &edges, &fanout) {
            diags.push(Diagnostic::CombinationalLoop { cycle });
        }
    }

    if !diags.is_empty() {
        return Err(ValidationError(diags));
    }
    Ok(Dfg {
        nodes,
        edges,
        node_index,
        edge_index,
        drivers,
        fanout,
    })
}

/// Iterative DFS over zero-delay edges; returns the node ids of the first
/// cycle found.
fn find_zero_delay_cycle(nodes: &[DfgNode], edges: &[DfgEdge], fanout: &[Vec<usize>]) -> Option<Vec<String>> {
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let succ: Vec<Vec<usize>> = fanout
        .iter()
        .map(|out| {
            out.iter()
                .filter(|&&e| edges[e].delays == 0)
                .map(|&e| index[edges[e].dst.as_str()])
                .collect()
        })
        .collect();

    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; nodes.len()];
    for root in 0..nodes.len() {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        state[root] = 1;
        while let Some(&mut (n, ref mut next)) = stack.last_mut() {
            if *next < succ[n].len() {
                let m = succ[n][*next];
                *next += 1;
                match state[m] {
                    0 => {
                        state[m] = 1;
                        stack.push((m, 0));
                    }
                    1 => {
                        let start = stack.iter().position(|&(s, _)| s == m).unwrap();
                        let mut cycle: Vec<String> = stack[start..].iter().map(|&(s, _)| nodes[s].id.clone()).collect();
                        cycle.push(nodes[m].id.clone());
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[n] = 2;
                stack.pop();
            }
        }
    }
    None
}

impl Dfg {
    pub fn new(nodes: Vec<DfgNode>, edges: Vec<DfgEdge>) -> Result<Self, ValidationError> {
        validate(nodes, edges)
    }

    pub fn nodes(&self) -> &[DfgNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[DfgEdge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&DfgNode> {
        self.node_index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn edge(&self, id: &str) -> Option<&DfgEdge> {
        self.edge_index.get(id).map(|&i| &self.edges[i])
    }

    pub fn node_pos(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn edge_pos(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// Edges feeding each in-port of the node at `pos`, in port order.
    pub fn drivers(&self, pos: usize) -> impl Iterator<Item = &DfgEdge> {
        self.drivers[pos].iter().map(move |&e| &self.edges[e])
    }

    pub fn fanout(&self, pos: usize) -> impl Iterator<Item = &DfgEdge> {
        self.fanout[pos].iter().map(move |&e| &self.edges[e])
    }

    pub fn inputs(&self) -> impl Iterator<Item = &DfgNode> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &DfgNode> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Output)
    }

    pub fn compute_nodes(&self) -> impl Iterator<Item = &DfgNode> {
        self.nodes.iter().filter(|n| n.kind.is_compute())
    }

    pub fn total_delays(&self) -> u64 {
        self.edges.iter().map(|e| e.delays as u64).sum()
    }

    /// Node positions ordered so that every zero-delay edge points forward.
    pub fn zero_delay_order(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        for e in self.edges.iter().filter(|e| e.delays == 0) {
            indeg[self.node_index[&e.dst]] += 1;
        }
        let mut ready: std::collections::VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_front() {
            order.push(i);
            for e in self.fanout(i).filter(|e| e.delays == 0) {
                let d = self.node_index[&e.dst];
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    ready.push_back(d);
                }
            }
        }
        debug_assert_eq!(order.len(), n, "validated graph has a zero-delay cycle");
        order
    }

    /// Copy of the graph with some edge delay counts replaced.
    pub fn with_delays(&self, updates: &HashMap<String, u32>) -> Result<Dfg, ValidationError> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut e = e.clone();
                if let Some(&w) = updates.get(&e.id) {
                    e.delays = w;
                }
                e
            })
            .collect();
        validate(self.nodes.clone(), edges)
    }

    /// Nodes reachable from an input and able to reach an output.
    pub(crate) fn io_relevant(&self) -> Vec<bool> {
        let n = self.nodes.len();
        let mut fwd = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| self.nodes[i].kind == NodeKind::Input).collect();
        for &i in &stack {
            fwd[i] = true;
        }
        while let Some(i) = stack.pop() {
            for e in self.fanout(i) {
                let d = self.node_index[&e.dst];
                if !fwd[d] {
                    fwd[d] = true;
                    stack.push(d);
                }
            }
        }
        let mut bwd = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| self.nodes[i].kind == NodeKind::Output).collect();
        for &i in &stack {
            bwd[i] = true;
        }
        while let Some(i) = stack.pop() {
            for e in self.drivers(i) {
                let s = self.node_index[&e.src];
                if !bwd[s] {
                    bwd[s] = true;
                    stack.push(s);
                }
            }
        }
        fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPath {
    pub nodes: Vec<String>,
    pub length: u64,
}

/// Longest path through zero-delay edges, measured as the sum of node
/// latencies. Ties go to the lexicographically smallest node-id sequence.
pub fn critical_path(dfg: &Dfg) -> CriticalPath {
    let order = dfg.zero_delay_order();
    // best[n] = (length, sequence) of the best zero-delay path starting at n
    let mut best: Vec<Option<(u64, Vec<usize>)>> = vec![None; dfg.nodes.len()];
    let id = |i: usize| dfg.nodes[i].id.as_str();
    let lex_less = |a: &[usize], b: &[usize]| a.iter().map(|&i| id(i)).lt(b.iter().map(|&i| id(i)));

    for &n in order.iter().rev() {
        let own = dfg.nodes[n].latency as u64;
        let mut chosen: (u64, Vec<usize>) = (own, vec![n]);
        for e in dfg.fanout(n).filter(|e| e.delays == 0) {
            let (len, seq) = best[dfg.node_index[&e.dst]].as_ref().unwrap();
            let cand_len = own + len;
            let better = cand_len > chosen.0 || (cand_len == chosen.0 && lex_less(seq, &chosen.1[1..]));
            if better {
                let mut s = Vec::with_capacity(seq.len() + 1);
                s.push(n);
                s.extend_from_slice(seq);
                chosen = (cand_len, s);
            }
        }
        best[n] = Some(chosen);
    }

    let mut overall: Option<&(u64, Vec<usize>)> = None;
    for cand in best.iter().flatten() {
        overall = match overall {
            None => Some(cand),
            Some(cur) if cand.0 > cur.0 || (cand.0 == cur.0 && lex_less(&cand.1, &cur.1)) => Some(cand),
            keep => keep,
        };
    }
    let (length, seq) = overall.cloned().unwrap_or((0, Vec::new()));
    CriticalPath {
        nodes: seq.into_iter().map(|i| dfg.nodes[i].id.clone()).collect(),
        length,
    }
}

/// A set of edge ids, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CutSet(BTreeSet<String>);

impl CutSet {
    pub fn new<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        CutSet(ids.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, edge: &str) -> bool {
        self.0.contains(edge)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl fmt::Display for CutSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().cloned().collect::<Vec<_>>().join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CutSetViolation {
    #[error("cut-set is empty")]
    Empty,
    #[error("cut-set names unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge `{0}` lies on no input-to-output path")]
    OffPath(String),
    #[error("path {} never crosses the cut-set", .path.join(" -> "))]
    Uncut { path: Vec<String> },
    #[error("path {} crosses the cut-set again at edge `{edge}`", .path.join(" -> "))]
    Recrossing { edge: String, path: Vec<String> },
}

/// Checks the feed-forward cut-set property: every input-to-output walk
/// crosses `cut` exactly once. On failure the error carries a witnessing path.
pub fn check_cutset(dfg: &Dfg, cut: &CutSet) -> Result<(), CutSetViolation> {
    if cut.is_empty() {
        return Err(CutSetViolation::Empty);
    }
    let mut in_cut = vec![false; dfg.edges.len()];
    for id in cut.iter() {
        let e = dfg
            .edge_pos(id)
            .ok_or_else(|| CutSetViolation::UnknownEdge(id.to_string()))?;
        in_cut[e] = true;
    }
    check_cut_mask(dfg, &dfg.io_relevant(), &in_cut)
}

/// Partition form of the check. `S` is everything reachable from the inputs
/// without crossing the cut; a valid cut has all outputs outside `S`, every
/// cut edge leaving `S`, and no relevant edge re-entering `S`.
fn check_cut_mask(dfg: &Dfg, relevant: &[bool], in_cut: &[bool]) -> Result<(), CutSetViolation> {
    let n = dfg.nodes.len();
    let src = |e: &DfgEdge| dfg.node_index[&e.src];
    let dst = |e: &DfgEdge| dfg.node_index[&e.dst];
    let edge_relevant = |e: &DfgEdge| relevant[src(e)] && relevant[dst(e)];

    for (i, e) in dfg.edges.iter().enumerate() {
        if in_cut[i] && !edge_relevant(e) {
            return Err(CutSetViolation::OffPath(e.id.clone()));
        }
    }

    // BFS over non-cut relevant edges, remembering parents for witnesses.
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut in_s = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for i in (0..n).filter(|&i| dfg.nodes[i].kind == NodeKind::Input && relevant[i]) {
        in_s[i] = true;
        queue.push_back(i);
    }
    while let Some(i) = queue.pop_front() {
        for &ei in &dfg.fanout[i] {
            let e = &dfg.edges[ei];
            let d = dst(e);
            if in_cut[ei] || !relevant[d] || in_s[d] {
                continue;
            }
            in_s[d] = true;
            parent[d] = Some(ei);
            queue.push_back(d);
        }
    }
    let path_to = |node: usize| -> Vec<String> {
        let mut path = vec![dfg.nodes[node].id.clone()];
        let mut cur = node;
        while let Some(ei) = parent[cur] {
            cur = src(&dfg.edges[ei]);
            path.push(dfg.nodes[cur].id.clone());
        }
        path.reverse();
        path
    };

    if let Some(o) = (0..n).find(|&i| dfg.nodes[i].kind == NodeKind::Output && in_s[i]) {
        return Err(CutSetViolation::Uncut { path: path_to(o) });
    }
    for (i, e) in dfg.edges.iter().enumerate() {
        if !edge_relevant(e) {
            continue;
        }
        let (s, d) = (src(e), dst(e));
        let bad = if in_cut[i] {
            !in_s[s] || in_s[d]
        } else {
            !in_s[s] && in_s[d]
        };
        if bad {
            let mut path = any_walk_to(dfg, relevant, s);
            path.push(e.dst.clone());
            return Err(CutSetViolation::Recrossing {
                edge: e.id.clone(),
                path,
            });
        }
    }
    Ok(())
}

/// Shortest walk from any input to `target` over relevant edges.
fn any_walk_to(dfg: &Dfg, relevant: &[bool], target: usize) -> Vec<String> {
    let n = dfg.nodes.len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue: std::collections::VecDeque<usize> = (0..n)
        .filter(|&i| dfg.nodes[i].kind == NodeKind::Input && relevant[i])
        .collect();
    for &i in &queue {
        seen[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        if i == target {
            break;
        }
        for &ei in &dfg.fanout[i] {
            let d = dfg.node_index[&dfg.edges[ei].dst];
            if relevant[d] && !seen[d] {
                seen[d] = true;
                parent[d] = Some(i);
                queue.push_back(d);
            }
        }
    }
    let mut path = vec![dfg.nodes[target].id.clone()];
    let mut cur = target;
    while let Some(p) = parent[cur] {
        cur = p;
        path.push(dfg.nodes[cur].id.clone());
    }
    path.reverse();
    path
}

/// Enumerates feed-forward cut-sets, smallest first and lexicographic within a
/// size. Exhaustive when the graph has at most [`EXHAUSTIVE_CUT_EDGES`]
/// input-to-output edges; larger graphs are searched up to a fixed budget.
pub fn feedforward_cutsets(dfg: &Dfg, max_results: usize) -> Vec<CutSet> {
    let relevant = dfg.io_relevant();
    let mut candidates: Vec<usize> = (0..dfg.edges.len())
        .filter(|&i| {
            let e = &dfg.edges[i];
            relevant[dfg.node_index[&e.src]] && relevant[dfg.node_index[&e.dst]]
        })
        .collect();
    candidates.sort_by(|&a, &b| dfg.edges[a].id.cmp(&dfg.edges[b].id));

    let mut out = Vec::new();
    let mut budget: u64 = 1 << EXHAUSTIVE_CUT_EDGES;
    let mut in_cut = vec![false; dfg.edges.len()];
    for size in 1..=candidates.len() {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if out.len() >= max_results {
                return out;
            }
            if candidates.len() > EXHAUSTIVE_CUT_EDGES {
                if budget == 0 {
                    return out;
                }
                budget -= 1;
            }
            for &c in &combo {
                in_cut[candidates[c]] = true;
            }
            if check_cut_mask(dfg, &relevant, &in_cut).is_ok() {
                out.push(CutSet::new(combo.iter().map(|&c| dfg.edges[candidates[c]].id.clone())));
            }
            for &c in &combo {
                in_cut[candidates[c]] = false;
            }
            if !next_combination(&mut combo, candidates.len()) {
                break;
            }
        }
    }
    out
}

pub const EXHAUSTIVE_CUT_EDGES: usize = 20;

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
