//! Lifetime analysis of values produced inside a folded architecture, and
//! register allocation over those lifetimes.
//!
//! A value occupies storage during the half-open window `[birth, death)`;
//! a zero-length window needs no register.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::transforms::FoldedArch;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LifetimeInterval {
    /// Producing node.
    pub variable: String,
    pub unit: String,
    pub slot: usize,
    pub stages: u32,
    pub birth: u64,
    pub death: u64,
}

impl LifetimeInterval {
    pub fn new(variable: impl Into<String>, birth: u64, death: u64) -> Self {
        assert!(death >= birth, "lifetime ends before it starts");
        LifetimeInterval {
            variable: variable.into(),
            unit: String::new(),
            slot: 0,
            stages: 0,
            birth,
            death,
        }
    }

    pub fn len(&self) -> u64 {
        self.death - self.birth
    }

    pub fn is_empty(&self) -> bool {
        self.death == self.birth
    }

    pub fn overlaps(&self, other: &LifetimeInterval) -> bool {
        self.birth < other.death && other.birth < self.death
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LifetimeTable {
    pub intervals: Vec<LifetimeInterval>,
    pub frame: usize,
}

/// Birth is `u + P` (the cycle the result leaves its unit); death is birth
/// plus the longest folded delay the value has to wait before its last
/// consumer reads it. Rows are ordered by unit, then fold order.
pub fn lifetime_table(arch: &FoldedArch) -> LifetimeTable {
    let spec = arch.spec();
    let mut longest: BTreeMap<&str, u32> = BTreeMap::new();
    for c in arch.connections() {
        let e = longest.entry(c.src.as_str()).or_default();
        *e = (*e).max(c.folded_delay);
    }
    let mut intervals = Vec::new();
    for (unit, slots) in spec.units() {
        for (slot, node) in slots.iter().enumerate() {
            let Some(node) = node else { continue };
            let class = arch.source().node(node).and_then(|n| n.kind.op_class()).unwrap();
            let stages = spec.stages(class);
            let birth = slot as u64 + stages as u64;
            let death = birth + longest.get(node.as_str()).copied().unwrap_or(0) as u64;
            intervals.push(LifetimeInterval {
                variable: node.clone(),
                unit: unit.clone(),
                slot,
                stages,
                birth,
                death,
            });
        }
    }
    LifetimeTable {
        intervals,
        frame: arch.factor(),
    }
}

/// Peak number of simultaneously stored values, scanning every cycle
/// covered by the table.
pub fn max_live(table: &LifetimeTable) -> usize {
    // sweep over sorted endpoints; deaths before births at the same cycle
    let mut events: Vec<(u64, i32)> = Vec::new();
    for iv in table.intervals.iter().filter(|iv| !iv.is_empty()) {
        events.push((iv.birth, 1));
        events.push((iv.death, -1));
    }
    events.sort();
    let mut live = 0i32;
    let mut peak = 0i32;
    for (_, delta) in events {
        live += delta;
        peak = peak.max(live);
    }
    peak as usize
}

/// Peak occupancy in the steady state of the periodic schedule: every value
/// is produced again each frame, so a window also covers the cycles shifted
/// by multiples of the frame length.
pub fn max_live_periodic(table: &LifetimeTable) -> usize {
    let n = table.frame.max(1) as i64;
    (0..n)
        .map(|t| {
            table
                .intervals
                .iter()
                .map(|iv| {
                    // number of k with birth + k*n <= t < death + k*n
                    ((t - iv.birth as i64).div_euclid(n) - (t - iv.death as i64).div_euclid(n)) as usize
                })
                .sum::<usize>()
        })
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterAllocation {
    /// Register holding each stored value. Zero-length lifetimes are absent.
    pub assignment: BTreeMap<String, usize>,
    pub registers: usize,
}

impl RegisterAllocation {
    /// Variables held by `reg`, in the order they were assigned.
    pub fn occupants<'a>(&'a self, table: &'a LifetimeTable, reg: usize) -> Vec<&'a LifetimeInterval> {
        let mut out: Vec<&LifetimeInterval> = table
            .intervals
            .iter()
            .filter(|iv| self.assignment.get(&iv.variable) == Some(&reg))
            .collect();
        out.sort_by(|a, b| (a.birth, &a.variable).cmp(&(b.birth, &b.variable)));
        out
    }
}

/// First-fit over intervals sorted by birth then id. On interval lifetimes
/// this uses exactly [`max_live`] registers.
pub fn allocate_registers(table: &LifetimeTable) -> RegisterAllocation {
    let mut order: Vec<&LifetimeInterval> = table.intervals.iter().filter(|iv| !iv.is_empty()).collect();
    order.sort_by(|a, b| (a.birth, &a.variable).cmp(&(b.birth, &b.variable)));

    // free_at[r] = cycle at which register r becomes free
    let mut free_at: Vec<u64> = Vec::new();
    let mut assignment = BTreeMap::new();
    for iv in order {
        let reg = match free_at.iter().position(|&f| f <= iv.birth) {
            Some(r) => r,
            None => {
                free_at.push(0);
                free_at.len() - 1
            }
        };
        free_at[reg] = iv.death;
        assignment.insert(iv.variable.clone(), reg);
    }
    RegisterAllocation {
        assignment,
        registers: free_at.len(),
    }
}

/// Aligned text table: node, symbolic window and numeric window.
pub fn render_table(table: &LifetimeTable) -> String {
    let mut rows = vec![(
        "Nodes (Adder Block)".to_string(),
        "T_Input to T_Output".to_string(),
        "T_Input to T_Output".to_string(),
    )];
    for (i, iv) in table.intervals.iter().enumerate() {
        let wait = iv.death - iv.birth;
        rows.push((
            format!("N{} ({})", i + 1, iv.variable),
            format!("{}+{} to {}+{}+{}", iv.slot, iv.stages, iv.slot, iv.stages, wait),
            format!("{} - {}", iv.birth, iv.death),
        ));
    }
    let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (a, b, c) in rows {
        let _ = writeln!(out, "{a:<w0$}  {b:<w1$}  {c}");
    }
    out
}

pub fn table_csv(table: &LifetimeTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["node", "unit", "slot", "t_input", "t_output"]).unwrap();
    for iv in &table.intervals {
        w.write_record([
            iv.variable.clone(),
            iv.unit.clone(),
            iv.slot.to_string(),
            iv.birth.to_string(),
            iv.death.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// The bundled filter's lifetime table exactly as it appears in the
/// reference design notes: (row, node, printed window, birth, death). The
/// printed death terms do not follow from the folded delays; kept for
/// comparison only.
pub const REFERENCE_LPF_LIFETIMES: [(&str, &str, &str, u64, u64); 4] = [
    ("N1", "A1", "0+1 to 0+1+0", 1, 1),
    ("N2", "A0", "1+1 to 1+1+0", 2, 2),
    ("N3", "A2", "0+1 to 0+1+1", 1, 2),
    ("N4", "A3", "1+1 to 1+1+1", 2, 3),
];

pub fn reference_lpf_table() -> LifetimeTable {
    LifetimeTable {
        intervals: REFERENCE_LPF_LIFETIMES
            .iter()
            .map(|(_, node, _, b, d)| LifetimeInterval::new(*node, *b, *d))
            .collect(),
        frame: 2,
    }
}
