use std::fmt;

use super::{SimError, SimTrace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Candidate sample index = reference sample index + offset.
    pub offset: i64,
    pub matched: usize,
    pub max_abs_diff: u64,
    /// First reference sample index that differs.
    pub first_mismatch: Option<usize>,
}

impl EquivalenceReport {
    pub fn equivalent(&self) -> bool {
        self.max_abs_diff == 0 && self.matched > 0
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.equivalent() {
            "equivalent"
        } else {
            "NOT equivalent"
        };
        write!(f, "{verdict}, offset={}, max_diff={}", self.offset, self.max_abs_diff)
    }
}

/// Compares the primary output sample streams of two traces. The offset
/// comes from the traces' latency metadata when both carry it, otherwise
/// from the first nonzero sample of each.
pub fn equivalence_check(reference: &SimTrace, candidate: &SimTrace) -> Result<EquivalenceReport, SimError> {
    let r = reference.output_samples();
    let c = candidate.output_samples();
    let offset = match (reference.latency, candidate.latency) {
        (Some(a), Some(b)) => b as i64 - a as i64,
        _ => {
            let first = |v: &[i64]| v.iter().position(|&x| x != 0);
            match (first(&r), first(&c)) {
                (Some(a), Some(b)) => b as i64 - a as i64,
                (None, None) => return Err(SimError::NoAlignment),
                _ => 0,
            }
        }
    };

    let mut matched = 0;
    let mut max_abs_diff = 0u64;
    let mut first_mismatch = None;
    for (i, &rv) in r.iter().enumerate() {
        let j = i as i64 + offset;
        if j < 0 {
            continue;
        }
        let Some(&cv) = c.get(j as usize) else { break };
        matched += 1;
        let d = (rv as i128 - cv as i128).unsigned_abs() as u64;
        if d > 0 && first_mismatch.is_none() {
            first_mismatch = Some(i);
        }
        max_abs_diff = max_abs_diff.max(d);
    }
    Ok(EquivalenceReport {
        offset,
        matched,
        max_abs_diff,
        first_mismatch,
    })
}
