//! Folded-machine simulator.
//!
//! Each unit keeps a ring of its recent results; a connection with folded
//! delay `D` and producer depth `P` reads the result computed `D + P`
//! cycles earlier, which is how a tapped register chain behind a `P`-stage
//! unit behaves. Inputs are latched for a whole frame and read through
//! their own tap chains. Everything resets to zero.

use super::{gen_stimulus, quantize_inputs, FixedPointConfig, OverflowLog, SimError, SimTrace, Stimulus};
use crate::dfg::NodeKind;
use crate::transforms::{FoldedArch, OutputSource};

#[derive(Clone, Copy)]
enum Operand {
    Input { input: usize, delay: usize },
    Unit { unit: usize, delay: usize },
}

struct Ring {
    data: Vec<i64>,
}

impl Ring {
    fn new(depth: usize) -> Self {
        Ring {
            data: vec![0; depth.max(1)],
        }
    }

    fn write(&mut self, cycle: usize, v: i64) {
        let n = self.data.len();
        self.data[cycle % n] = v;
    }

    /// Value written `back` cycles before `cycle`; reset value before time 0.
    fn read(&self, cycle: usize, back: usize) -> i64 {
        if back > cycle {
            return 0;
        }
        debug_assert!(back < self.data.len());
        self.data[(cycle - back) % self.data.len()]
    }
}

pub fn simulate_folded(arch: &FoldedArch, stim: &Stimulus, cfg: &FixedPointConfig) -> Result<SimTrace, SimError> {
    let samples = gen_stimulus(stim)?;
    let (raw, count, first) = quantize_inputs(&[samples], cfg);
    let mut trace = simulate_folded_raw(arch, &raw, cfg)?;
    trace.overflow_count += count;
    trace.first_overflow = match (trace.first_overflow, first.map(|s| s * arch.factor() as u64)) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    trace.sample_rate = stim.sample_rate();
    Ok(trace)
}

/// Runs the folded machine for `len + latency` frames so the response to
/// every input sample is observed. Output probes hold the output registers;
/// `unit:<id>` probes show each unit's result per cycle (zero when idle).
pub fn simulate_folded_raw(
    arch: &FoldedArch,
    inputs: &[Vec<i64>],
    cfg: &FixedPointConfig,
) -> Result<SimTrace, SimError> {
    let dfg = arch.source();
    let spec = arch.spec();
    let n = arch.factor();

    let input_ids: Vec<&str> = dfg.inputs().map(|i| i.id.as_str()).collect();
    if input_ids.len() != inputs.len() {
        return Err(SimError::InputCount {
            expected: input_ids.len(),
            got: inputs.len(),
        });
    }
    let input_index = |id: &str| input_ids.iter().position(|&i| i == id).unwrap();

    let unit_ids: Vec<&str> = spec.units().keys().map(String::as_str).collect();
    let unit_index = |id: &str| unit_ids.iter().position(|&u| u == id).unwrap();
    let unit_stages: Vec<usize> = unit_ids
        .iter()
        .map(|u| arch.unit_classes().get(*u).map_or(0, |c| spec.stages(*c) as usize))
        .collect();

    // operand wiring per compute node (indexed by graph position)
    let mut operands: Vec<Vec<Option<Operand>>> = dfg.nodes().iter().map(|nd| vec![None; nd.kind.in_ports()]).collect();
    let mut unit_reach = vec![0usize; unit_ids.len()];
    let mut input_reach = vec![0usize; input_ids.len()];
    for c in arch.connections() {
        let u = unit_index(&c.producer_unit);
        let back = c.folded_delay as usize;
        unit_reach[u] = unit_reach[u].max(back + unit_stages[u]);
        operands[dfg.node_pos(&c.dst).unwrap()][c.dst_port] = Some(Operand::Unit { unit: u, delay: back });
    }
    for t in &arch.io_schedule().inputs {
        let i = input_index(&t.input);
        let back = t.folded_delay as usize;
        input_reach[i] = input_reach[i].max(back);
        operands[dfg.node_pos(&t.dst).unwrap()][t.dst_port] = Some(Operand::Input { input: i, delay: back });
    }
    let outputs: Vec<(usize, Operand)> = arch
        .io_schedule()
        .outputs
        .iter()
        .map(|o| {
            let back = o.folded_delay as usize;
            let op = match &o.source {
                OutputSource::Input { input } => {
                    let i = input_index(input);
                    input_reach[i] = input_reach[i].max(back);
                    Operand::Input { input: i, delay: back }
                }
                OutputSource::Unit { unit, .. } => {
                    let u = unit_index(unit);
                    unit_reach[u] = unit_reach[u].max(back + unit_stages[u]);
                    Operand::Unit { unit: u, delay: back }
                }
            };
            (dfg.node_pos(&o.output).unwrap(), op)
        })
        .collect();

    // nodes active in each phase, in zero-delay dependency order so that
    // same-cycle reads through P = 0 units see this cycle's result
    let rank: Vec<usize> = {
        let mut r = vec![0; dfg.nodes().len()];
        for (i, p) in dfg.zero_delay_order().into_iter().enumerate() {
            r[p] = i;
        }
        r
    };
    let mut schedule: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (u, slots) in spec.units().values().enumerate() {
        for (phase, node) in slots.iter().enumerate() {
            if let Some(node) = node {
                schedule[phase].push((u, dfg.node_pos(node).unwrap()));
            }
        }
    }
    for phase in &mut schedule {
        phase.sort_by_key(|&(_, node)| rank[node]);
    }

    let frames = inputs.iter().map(Vec::len).max().unwrap_or(0) + arch.latency_samples();
    let cycles = frames * n;
    let capture_phase = arch.output_phase();

    let mut unit_rings: Vec<Ring> = unit_reach.iter().map(|&r| Ring::new(r + 1)).collect();
    let mut input_rings: Vec<Ring> = input_reach.iter().map(|&r| Ring::new(r + 1)).collect();
    let mut out_regs = vec![0i64; outputs.len()];
    let mut unit_trace = vec![Vec::with_capacity(cycles); unit_ids.len()];
    let mut out_trace = vec![Vec::with_capacity(cycles); outputs.len()];
    let mut log = OverflowLog::default();

    let fetch = |op: Operand, t: usize, units: &[Ring], ins: &[Ring]| -> i64 {
        match op {
            Operand::Input { input, delay } => ins[input].read(t, delay),
            Operand::Unit { unit, delay } => units[unit].read(t, delay + unit_stages[unit]),
        }
    };

    for t in 0..cycles {
        let frame = t / n;
        for (i, ring) in input_rings.iter_mut().enumerate() {
            let raw = inputs[i].get(frame).copied().unwrap_or(0);
            let (v, of) = cfg.fit(raw as i128);
            log.note(of && t % n == 0, t as u64);
            ring.write(t, v);
        }
        let mut computed = vec![0i64; unit_ids.len()];
        for &(u, node) in &schedule[t % n] {
            let ops = &operands[node];
            let arg = |k: usize, rings: &[Ring]| fetch(ops[k].expect("every port is wired"), t, rings, &input_rings);
            let (v, of) = match dfg.nodes()[node].kind {
                NodeKind::Add => cfg.add(arg(0, &unit_rings), arg(1, &unit_rings)),
                NodeKind::Gain { shift } => cfg.shift(arg(0, &unit_rings), shift),
                NodeKind::Input | NodeKind::Output => unreachable!("only compute nodes are folded"),
            };
            log.note(of, t as u64);
            computed[u] = v;
            // visible to same-cycle readers of a zero-stage unit
            unit_rings[u].write(t, v);
        }
        for (u, ring) in unit_rings.iter_mut().enumerate() {
            if !schedule[t % n].iter().any(|&(su, _)| su == u) {
                ring.write(t, 0);
            }
            unit_trace[u].push(computed[u]);
        }
        if t % n == capture_phase {
            for (k, &(_, op)) in outputs.iter().enumerate() {
                out_regs[k] = fetch(op, t, &unit_rings, &input_rings);
            }
        }
        for (k, v) in out_regs.iter().enumerate() {
            out_trace[k].push(*v);
        }
    }

    let mut probes: Vec<String> = outputs.iter().map(|&(pos, _)| dfg.nodes()[pos].id.clone()).collect();
    probes.extend(unit_ids.iter().map(|u| format!("unit:{u}")));
    let mut values = out_trace;
    values.extend(unit_trace);
    let first_output = dfg.outputs().next().unwrap().id.as_str();
    let primary = probes.iter().position(|p| p == first_output).unwrap();

    Ok(SimTrace {
        probes,
        values,
        primary,
        cycles_per_sample: n,
        sample_phase: capture_phase,
        latency: Some(arch.latency_samples()),
        format: *cfg,
        sample_rate: None,
        overflow_count: log.count,
        first_overflow: log.first,
    })
}
