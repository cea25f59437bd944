//! Bit-exact, cycle-accurate simulation of dataflow graphs and of their
//! folded architectures.

mod equiv;
mod fixed;
mod folded;
mod graph;
mod stimulus;
mod trace;

pub use equiv::{equivalence_check, EquivalenceReport};
pub use fixed::{FixedPointConfig, Overflow};
pub use folded::{simulate_folded, simulate_folded_raw};
pub use graph::{simulate_dfg, simulate_dfg_raw};
pub use stimulus::{
    gen_stimulus, Stimulus, StimulusError, StimulusKind, DEFAULT_BASELINE_HZ, DEFAULT_POWER_LINE_HZ, QRS_BAND_HZ,
};
pub use trace::SimTrace;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("fixed-point format {total_bits}.{frac_bits} invalid (need 1 <= F < W <= 64)")]
    BadFormat { total_bits: u32, frac_bits: u32 },
    #[error("cannot parse fixed-point format `{0}` (expected W.F)")]
    BadFormatText(String),
    #[error("graph has {expected} inputs but {got} stimuli were given")]
    InputCount { expected: usize, got: usize },
    #[error("overflow detected: {count} saturation events, first at cycle {first_cycle}")]
    OverflowDetected { count: u64, first_cycle: u64 },
    #[error("traces cannot be aligned: both are all-zero and carry no latency metadata")]
    NoAlignment,
    #[error(transparent)]
    Stimulus(#[from] StimulusError),
}

/// Quantizes one stimulus per graph input, in declaration order.
pub(crate) fn quantize_inputs(stimuli: &[Vec<f64>], cfg: &FixedPointConfig) -> (Vec<Vec<i64>>, u64, Option<u64>) {
    let mut count = 0;
    let mut first = None;
    let raw = stimuli
        .iter()
        .map(|s| {
            s.iter()
                .enumerate()
                .map(|(i, &x)| {
                    let (v, of) = cfg.quantize(x);
                    if of {
                        count += 1;
                        first = Some(first.map_or(i as u64, |f: u64| f.min(i as u64)));
                    }
                    v
                })
                .collect()
        })
        .collect();
    (raw, count, first)
}

/// Overflow bookkeeping shared by both simulators.
#[derive(Default)]
pub(crate) struct OverflowLog {
    pub count: u64,
    pub first: Option<u64>,
}

impl OverflowLog {
    pub fn note(&mut self, hit: bool, cycle: u64) {
        if hit {
            self.count += 1;
            self.first.get_or_insert(cycle);
        }
    }
}
