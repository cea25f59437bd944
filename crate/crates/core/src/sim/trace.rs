use super::{FixedPointConfig, Overflow, SimError};

/// Dense per-cycle values of every probe of one simulation run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    pub probes: Vec<String>,
    /// `values[p][cycle]`
    pub values: Vec<Vec<i64>>,
    /// Probe index of the primary output.
    pub primary: usize,
    pub cycles_per_sample: usize,
    /// Cycle within a frame at which output samples are read.
    pub sample_phase: usize,
    /// Analytic output latency in samples, when known.
    pub latency: Option<usize>,
    pub format: FixedPointConfig,
    pub sample_rate: Option<f64>,
    pub overflow_count: u64,
    pub first_overflow: Option<u64>,
}

impl SimTrace {
    pub fn cycles(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn probe(&self, name: &str) -> Option<&[i64]> {
        self.probes
            .iter()
            .position(|p| p == name)
            .map(|i| self.values[i].as_slice())
    }

    pub fn primary_name(&self) -> &str {
        &self.probes[self.primary]
    }

    /// Per-sample values of a probe: one reading per frame at the sample phase.
    pub fn samples(&self, name: &str) -> Option<Vec<i64>> {
        let v = self.probe(name)?;
        Some(
            v.iter()
                .skip(self.sample_phase)
                .step_by(self.cycles_per_sample)
                .copied()
                .collect(),
        )
    }

    pub fn output_samples(&self) -> Vec<i64> {
        self.samples(self.primary_name()).unwrap()
    }

    pub fn with_latency(mut self, latency: usize) -> Self {
        self.latency = Some(latency);
        self
    }

    /// Fails if saturation fired during the run.
    pub fn check_overflow(&self) -> Result<(), SimError> {
        match (self.format.overflow(), self.first_overflow) {
            (Overflow::Saturate, Some(first_cycle)) => Err(SimError::OverflowDetected {
                count: self.overflow_count,
                first_cycle,
            }),
            _ => Ok(()),
        }
    }

    /// `cycle,signal,value` records with raw scaled integers, preceded by a
    /// comment line carrying the number format.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# fixed={}.{} overflow={} cycles_per_sample={}\n",
            self.format.total_bits(),
            self.format.frac_bits(),
            self.format.overflow(),
            self.cycles_per_sample
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["cycle", "signal", "value"]).unwrap();
        for cycle in 0..self.cycles() {
            for (p, name) in self.probes.iter().enumerate() {
                w.write_record([cycle.to_string(), name.clone(), self.values[p][cycle].to_string()])
                    .unwrap();
            }
        }
        out.push_str(std::str::from_utf8(&w.into_inner().unwrap()).unwrap());
        out
    }
}
