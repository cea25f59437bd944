//! Line-oriented text formats for graphs, folding specs and unit
//! assignments. `#` starts a comment anywhere on a line.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::dfg::{validate, Dfg, DfgEdge, DfgNode, NodeKind, OpClass, ValidationError};
use crate::transforms::{FoldingSpec, SpecError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap().trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_kind(s: &str) -> Option<NodeKind> {
    match s {
        "input" => Some(NodeKind::Input),
        "output" => Some(NodeKind::Output),
        "add" => Some(NodeKind::Add),
        _ => s
            .strip_prefix("gain:")?
            .parse()
            .ok()
            .map(|shift| NodeKind::Gain { shift }),
    }
}

fn parse_key<T: std::str::FromStr>(line: usize, tok: &str, key: &str) -> Result<T, FormatError> {
    tok.strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| syntax(line, format!("expected `{key}=<n>`, found `{tok}`")))
}

/// ```text
/// node <id> <input|output|add|gain:k> [latency=n]
/// edge <label>: <src>[.out] -> <dst>.p<k> [delays=w]
/// ```
pub fn parse_dfg_file(text: &str) -> Result<Dfg, FormatError> {
    let mut nodes = Vec::new();
    let mut edges: Vec<(usize, DfgEdge, String)> = Vec::new();
    for (ln, l) in lines(text) {
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match head {
            "node" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let (id, kind) = match toks.as_slice() {
                    [id, kind, ..] if toks.len() <= 3 => (*id, *kind),
                    _ => return Err(syntax(ln, "expected `node <id> <kind> [latency=n]`")),
                };
                let kind = parse_kind(kind).ok_or_else(|| syntax(ln, format!("unknown node kind `{kind}`")))?;
                let mut node = DfgNode::new(id, kind);
                if let Some(tok) = toks.get(2) {
                    node.latency = parse_key(ln, tok, "latency")?;
                }
                nodes.push(node);
            }
            "edge" => {
                let (label, conn) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax(ln, "expected `edge <label>: <src> -> <dst>.p<k>`"))?;
                let label = label.trim();
                if label.is_empty() || label.contains(char::is_whitespace) {
                    return Err(syntax(ln, format!("bad edge label `{label}`")));
                }
                let toks: Vec<&str> = conn.split_whitespace().collect();
                let (src, dst, extra) = match toks.as_slice() {
                    [src, "->", dst, extra @ ..] if extra.len() <= 1 => (*src, *dst, extra.first()),
                    _ => return Err(syntax(ln, "expected `<src> -> <dst>.p<k> [delays=w]`")),
                };
                let src = match src.split_once('.') {
                    None => src,
                    Some((s, "out" | "o0")) => s,
                    Some((_, port)) => return Err(syntax(ln, format!("unknown output port `{port}`"))),
                };
                let (dst, port) = dst
                    .split_once('.')
                    .and_then(|(d, p)| Some((d, p.strip_prefix('p')?.parse::<usize>().ok()?)))
                    .ok_or_else(|| syntax(ln, format!("destination `{dst}` needs an input port like `.p0`")))?;
                let delays = match extra {
                    Some(tok) => parse_key(ln, tok, "delays")?,
                    None => 0,
                };
                edges.push((ln, DfgEdge::new(label, src, dst, port, delays), label.to_string()));
            }
            other => return Err(syntax(ln, format!("unknown directive `{other}`"))),
        }
    }
    let declared: HashSet<&str> = nodes.iter().map(|n| n.id.as_str()).collect();
    for (ln, e, _) in &edges {
        for end in [&e.src, &e.dst] {
            if !declared.contains(end.as_str()) {
                return Err(syntax(*ln, format!("undeclared node `{end}`")));
            }
        }
    }
    Ok(validate(nodes, edges.into_iter().map(|(_, e, _)| e).collect())?)
}

pub fn serialize_dfg(dfg: &Dfg) -> String {
    let mut out = String::new();
    for n in dfg.nodes() {
        let _ = write!(out, "node {} {}", n.id, n.kind);
        if n.latency != n.kind.default_latency() {
            let _ = write!(out, " latency={}", n.latency);
        }
        out.push('\n');
    }
    for e in dfg.edges() {
        let _ = write!(out, "edge {}: {} -> {}.p{}", e.id, e.src, e.dst, e.dst_port);
        if e.delays > 0 {
            let _ = write!(out, " delays={}", e.delays);
        }
        out.push('\n');
    }
    out
}

/// Fields shared by folding specs and unit-assignment files.
struct SpecLines {
    factor: Option<usize>,
    units: BTreeMap<String, Vec<Option<String>>>,
    stages: BTreeMap<OpClass, u32>,
}

fn parse_spec_lines(text: &str, order_keyword: bool) -> Result<SpecLines, FormatError> {
    let mut spec = SpecLines {
        factor: None,
        units: BTreeMap::new(),
        stages: BTreeMap::new(),
    };
    for (ln, l) in lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["factor", n] => {
                let n = n.parse().map_err(|_| syntax(ln, format!("bad folding factor `{n}`")))?;
                if spec.factor.replace(n).is_some() {
                    return Err(syntax(ln, "`factor` given twice"));
                }
            }
            ["unit", id, "order", list] => add_unit(&mut spec, ln, id, list)?,
            ["unit", id, list] if !order_keyword => add_unit(&mut spec, ln, id, list)?,
            ["stages", kind, p] => {
                let class: OpClass = kind.parse().map_err(|m: String| syntax(ln, m))?;
                let p = p.parse().map_err(|_| syntax(ln, format!("bad stage count `{p}`")))?;
                spec.stages.insert(class, p);
            }
            _ => {
                let form = if order_keyword {
                    "unit <id> order <n1>,<n2>,..."
                } else {
                    "unit <id> [order] <n1>,..."
                };
                return Err(syntax(
                    ln,
                    format!("expected `factor <N>`, `{form}` or `stages <kind> <P>`"),
                ));
            }
        }
    }
    Ok(spec)
}

fn add_unit(spec: &mut SpecLines, ln: usize, id: &str, list: &str) -> Result<(), FormatError> {
    let slots = list
        .split(',')
        .map(|s| match s.trim() {
            "" => Err(syntax(ln, "empty slot in order list (use `_` for an idle slot)")),
            "_" => Ok(None),
            n => Ok(Some(n.to_string())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if spec.units.insert(id.to_string(), slots).is_some() {
        return Err(syntax(ln, format!("unit `{id}` declared twice")));
    }
    Ok(())
}

/// ```text
/// factor <N>
/// unit <id> order <n1>,<n2>,...   # `_` is an idle slot
/// stages <add|gain> <P>
/// ```
pub fn parse_folding_spec(text: &str) -> Result<FoldingSpec, FormatError> {
    let s = parse_spec_lines(text, true)?;
    let factor = s.factor.ok_or_else(|| syntax(0, "missing `factor <N>`"))?;
    Ok(FoldingSpec::new(factor, s.units, s.stages)?)
}

pub fn serialize_folding_spec(spec: &FoldingSpec) -> String {
    let mut out = format!("factor {}\n", spec.factor());
    for (unit, slots) in spec.units() {
        let names: Vec<&str> = slots.iter().map(|s| s.as_deref().unwrap_or("_")).collect();
        let _ = writeln!(out, "unit {unit} order {}", names.join(","));
    }
    for (class, p) in spec.stage_overrides() {
        let _ = writeln!(out, "stages {class} {p}");
    }
    out
}

/// Node-to-unit assignment for the fold-order search; order within a unit
/// and the factor are optional here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitAssignment {
    pub factor: Option<usize>,
    pub assignment: BTreeMap<String, String>,
    pub stages: BTreeMap<OpClass, u32>,
}

pub fn parse_unit_assignment(text: &str) -> Result<UnitAssignment, FormatError> {
    let s = parse_spec_lines(text, false)?;
    let mut assignment = BTreeMap::new();
    for (unit, slots) in &s.units {
        for node in slots.iter().flatten() {
            if assignment.insert(node.clone(), unit.clone()).is_some() {
                return Err(SpecError::DuplicateNode { node: node.clone() }.into());
            }
        }
    }
    Ok(UnitAssignment {
        factor: s.factor,
        assignment,
        stages: s.stages,
    })
}
