//! Structural cost counts before and after folding, optionally weighted by
//! per-cell area.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::dfg::{Dfg, NodeKind};
use crate::lifetime::{allocate_registers, lifetime_table};
use crate::transforms::{FoldedArch, OutputSource};

use super::format::FormatError;

pub const ROLES: [&str; 4] = ["add", "gain", "register", "mux"];

/// Synthesized figures of the published folded filter. Printed for
/// comparison only; nothing here is computed by the toolkit.
pub const REFERENCE_ADDER_AREA_BEFORE_UM2: f64 = 1067.229;
pub const REFERENCE_ADDER_AREA_AFTER_UM2: f64 = 551.0232;
pub const REFERENCE_ADDER_AREA_REDUCTION_PCT: f64 = 48.37;
pub const REFERENCE_POWER_MW: f64 = 0.7575;
pub const REFERENCE_CELLS_BEFORE: u32 = 452;
pub const REFERENCE_CELLS_AFTER: u32 = 1361;

/// Area weight per cell role.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CostTable {
    pub weights: BTreeMap<String, f64>,
}

impl CostTable {
    /// `<role> <weight>` lines; roles are `add`, `gain`, `register`, `mux`.
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut weights = BTreeMap::new();
        for (i, l) in text.lines().enumerate() {
            let l = l.split('#').next().unwrap().trim();
            if l.is_empty() {
                continue;
            }
            let bad = |message: String| FormatError::Syntax { line: i + 1, message };
            let (role, w) = match l.split_whitespace().collect::<Vec<_>>().as_slice() {
                [role, w] => (role.to_string(), *w),
                _ => return Err(bad("expected `<role> <weight>`".into())),
            };
            if !ROLES.contains(&role.as_str()) {
                return Err(bad(format!("unknown cell role `{role}`")));
            }
            let w: f64 = w.parse().map_err(|_| bad(format!("bad weight `{w}`")))?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(bad(format!("weight for `{role}` must be non-negative")));
            }
            weights.insert(role, w);
        }
        Ok(CostTable { weights })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DesignCounts {
    pub adders: usize,
    pub gains: usize,
    /// Hardware operators: one per compute node unfolded, one per unit folded.
    pub units: usize,
    /// Unfolded: total edge delays. Folded: allocated lifetime registers
    /// plus the input delay line.
    pub registers: u64,
    /// Folded designs only.
    pub lifetime_registers: Option<usize>,
    /// 2:1 multiplexer equivalents in front of unit ports.
    pub muxes: usize,
}

impl DesignCounts {
    pub fn of_dfg(dfg: &Dfg) -> Self {
        let adders = dfg.nodes().iter().filter(|n| n.kind == NodeKind::Add).count();
        let gains = dfg
            .nodes()
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Gain { .. }))
            .count();
        DesignCounts {
            adders,
            gains,
            units: adders + gains,
            registers: dfg.total_delays(),
            lifetime_registers: None,
            muxes: 0,
        }
    }

    pub fn of_folded(arch: &FoldedArch) -> Self {
        let classes = arch.unit_classes();
        let adders = classes.values().filter(|c| **c == crate::dfg::OpClass::Add).count();
        let lifetime = allocate_registers(&lifetime_table(arch)).registers;
        let io = arch.io_schedule();
        let input_line = io
            .inputs
            .iter()
            .map(|t| t.folded_delay as u64)
            .chain(io.outputs.iter().filter_map(|o| match o.source {
                OutputSource::Input { .. } => Some(o.folded_delay as u64),
                OutputSource::Unit { .. } => None,
            }))
            .max()
            .unwrap_or(0);

        // distinct (source, tap) pairs feeding each unit port
        let mut sources: BTreeMap<(&str, usize), BTreeSet<(String, u32)>> = BTreeMap::new();
        for c in arch.connections() {
            sources
                .entry((c.consumer_unit.as_str(), c.dst_port))
                .or_default()
                .insert((format!("unit:{}", c.producer_unit), c.folded_delay));
        }
        for t in &io.inputs {
            sources
                .entry((t.consumer_unit.as_str(), t.dst_port))
                .or_default()
                .insert((format!("input:{}", t.input), t.folded_delay));
        }
        let muxes = sources.values().map(|s| s.len().saturating_sub(1)).sum();

        DesignCounts {
            adders,
            gains: classes.len() - adders,
            units: classes.len(),
            registers: lifetime as u64 + input_line,
            lifetime_registers: Some(lifetime),
            muxes,
        }
    }

    fn role_counts(&self) -> [(&'static str, f64); 4] {
        [
            ("add", self.adders as f64),
            ("gain", self.gains as f64),
            ("register", self.registers as f64),
            ("mux", self.muxes as f64),
        ]
    }

    /// Fails with every role present in the design that has no weight.
    pub fn weighted(&self, table: &CostTable) -> Result<f64, Vec<String>> {
        let mut total = 0.0;
        let mut missing = Vec::new();
        for (role, n) in self.role_counts().into_iter().filter(|(_, n)| *n > 0.0) {
            match table.weights.get(role) {
                Some(w) => total += w * n,
                None => missing.push(role.to_string()),
            }
        }
        if missing.is_empty() {
            Ok(total)
        } else {
            Err(missing)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostReport {
    pub before: DesignCounts,
    pub after: DesignCounts,
    pub weighted: Option<(f64, f64)>,
    /// Roles without a weight; weighted totals are omitted when non-empty.
    pub missing_weights: Vec<String>,
}

/// `(before - after) / before` in percent; `None` when `before` is zero.
pub fn reduction_pct(before: f64, after: f64) -> Option<f64> {
    (before != 0.0).then(|| (before - after) / before * 100.0)
}

pub fn cost_report(before: &Dfg, after: &FoldedArch, table: &CostTable) -> CostReport {
    let before = DesignCounts::of_dfg(before);
    let after = DesignCounts::of_folded(after);
    let mut missing = BTreeSet::new();
    let b = before.weighted(table).map_err(|r| missing.extend(r));
    let a = after.weighted(table).map_err(|r| missing.extend(r));
    let weighted = match (b, a) {
        (Ok(b), Ok(a)) => Some((b, a)),
        _ => None,
    };
    CostReport {
        before,
        after,
        weighted,
        missing_weights: missing.into_iter().collect(),
    }
}

fn change(before: f64, after: f64) -> String {
    match reduction_pct(before, after) {
        Some(p) if p >= 0.0 => format!("{p:.2}% reduction"),
        Some(p) => format!("{:.2}% increase", -p),
        None => "n/a".to_string(),
    }
}

impl CostReport {
    /// `key: value` lines, a reference block, then a `design,metric,value`
    /// CSV block.
    pub fn render(&self) -> String {
        let (b, a) = (&self.before, &self.after);
        let mut out = String::new();
        let mut line = |key: &str, x: f64, y: f64| {
            let _ = writeln!(out, "{key}: {x} -> {y} ({})", change(x, y));
        };
        line("adders", b.adders as f64, a.adders as f64);
        if b.gains + a.gains > 0 {
            line("gains", b.gains as f64, a.gains as f64);
        }
        line("compute units", b.units as f64, a.units as f64);
        line("registers", b.registers as f64, a.registers as f64);
        line("multiplexers", b.muxes as f64, a.muxes as f64);
        let _ = writeln!(out, "lifetime registers: {}", a.lifetime_registers.unwrap_or(0));
        match self.weighted {
            Some((wb, wa)) => {
                let _ = writeln!(out, "weighted area (um^2): {wb:.4} -> {wa:.4} ({})", change(wb, wa));
            }
            None => {
                let _ = writeln!(
                    out,
                    "warning: no weight for {}; weighted area omitted, counts only",
                    self.missing_weights.join(", ")
                );
            }
        }
        let _ = writeln!(
            out,
            "reference adder cell area (synthesized, not computed): {REFERENCE_ADDER_AREA_BEFORE_UM2} -> \
             {REFERENCE_ADDER_AREA_AFTER_UM2} um^2 ({REFERENCE_ADDER_AREA_REDUCTION_PCT:.2}% reduction)"
        );
        let _ = writeln!(
            out,
            "reference total power (synthesized, not computed): {REFERENCE_POWER_MW} mW"
        );
        let _ = writeln!(
            out,
            "reference standard cells (synthesized, not computed): {REFERENCE_CELLS_BEFORE} -> \
             {REFERENCE_CELLS_AFTER} (cell mapping and control logic are not modeled)"
        );

        out.push('\n');
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["design", "metric", "value"]).unwrap();
        for (design, c, area) in [
            ("before", b, self.weighted.map(|x| x.0)),
            ("after", a, self.weighted.map(|x| x.1)),
        ] {
            let mut rows = vec![
                ("adders", c.adders.to_string()),
                ("gains", c.gains.to_string()),
                ("compute_units", c.units.to_string()),
                ("registers", c.registers.to_string()),
                ("multiplexers", c.muxes.to_string()),
            ];
            if let Some(l) = c.lifetime_registers {
                rows.push(("lifetime_registers", l.to_string()));
            }
            if let Some(area) = area {
                rows.push(("area_um2", format!("{area:.4}")));
            }
            for (metric, value) in rows {
                w.write_record([design, metric, value.as_str()]).unwrap();
            }
        }
        out.push_str(std::str::from_utf8(&w.into_inner().unwrap()).unwrap());
        out
    }
}
