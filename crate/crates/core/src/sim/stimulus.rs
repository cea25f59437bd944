//! Test-signal generators.
//!
//! The synthetic ECG is a caricature: each beat is three Gaussian bumps
//! (P, QRS, T) whose widths put the QRS energy below 45 Hz and the P/T
//! energy in the 0.5-5 Hz band. Interference defaults follow the usual ECG
//! noise sources: 50-60 Hz power line and 0.15-0.3 Hz baseline wander.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

/// Upper edge of the QRS band.
pub const QRS_BAND_HZ: f64 = 45.0;
pub const DEFAULT_POWER_LINE_HZ: f64 = 50.0;
pub const DEFAULT_BASELINE_HZ: f64 = 0.2;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("bad stimulus `{field}`: {reason}")]
pub struct StimulusError {
    pub field: &'static str,
    pub reason: String,
}

fn bad(field: &'static str, reason: impl Into<String>) -> StimulusError {
    StimulusError {
        field,
        reason: reason.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StimulusKind {
    Impulse {
        amplitude: f64,
    },
    Step {
        amplitude: f64,
    },
    Sine {
        freq_hz: f64,
        sample_rate_hz: f64,
        amplitude: f64,
        phase: f64,
    },
    SyntheticEcg {
        heart_rate_bpm: f64,
        sample_rate_hz: f64,
        amplitude: f64,
    },
    /// Synthetic ECG plus power-line hum, baseline wander and white noise.
    NoiseMix {
        heart_rate_bpm: f64,
        sample_rate_hz: f64,
        power_line_hz: f64,
        baseline_hz: f64,
        power_line_amplitude: f64,
        baseline_amplitude: f64,
        white_amplitude: f64,
        seed: u64,
    },
    /// Uniform samples in `[-amplitude, amplitude]`.
    Random {
        amplitude: f64,
        seed: u64,
    },
    External(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stimulus {
    pub kind: StimulusKind,
    pub length: usize,
}

impl Stimulus {
    pub fn new(kind: StimulusKind, length: usize) -> Self {
        Stimulus { kind, length }
    }

    pub fn impulse(length: usize) -> Self {
        Stimulus::new(StimulusKind::Impulse { amplitude: 1.0 }, length)
    }

    pub fn sine(freq_hz: f64, sample_rate_hz: f64, amplitude: f64, length: usize) -> Self {
        Stimulus::new(
            StimulusKind::Sine {
                freq_hz,
                sample_rate_hz,
                amplitude,
                phase: 0.0,
            },
            length,
        )
    }

    pub fn sample_rate(&self) -> Option<f64> {
        match &self.kind {
            StimulusKind::Sine { sample_rate_hz, .. }
            | StimulusKind::SyntheticEcg { sample_rate_hz, .. }
            | StimulusKind::NoiseMix { sample_rate_hz, .. } => Some(*sample_rate_hz),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), StimulusError> {
        if self.length == 0 {
            return Err(bad("length", "must be at least 1"));
        }
        let finite = |field, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(bad(field, "must be finite"))
            }
        };
        let positive = |field, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(bad(field, format!("must be positive, got {v}")))
            }
        };
        let below_nyquist = |field, f: f64, fs: f64| {
            if f >= 0.0 && fs > 2.0 * f {
                Ok(())
            } else {
                Err(bad(field, format!("{f} Hz is not below half the {fs} Hz sample rate")))
            }
        };
        match &self.kind {
            StimulusKind::Impulse { amplitude } | StimulusKind::Step { amplitude } => finite("amplitude", *amplitude),
            StimulusKind::Sine {
                freq_hz,
                sample_rate_hz,
                amplitude,
                phase,
            } => {
                positive("sample_rate", *sample_rate_hz)?;
                finite("amplitude", *amplitude)?;
                finite("phase", *phase)?;
                // exactly half the sample rate is allowed for a pure tone
                if !(*freq_hz >= 0.0 && *sample_rate_hz >= 2.0 * freq_hz) {
                    return Err(bad(
                        "freq",
                        format!("{freq_hz} Hz exceeds half the {sample_rate_hz} Hz sample rate"),
                    ));
                }
                Ok(())
            }
            StimulusKind::SyntheticEcg {
                heart_rate_bpm,
                sample_rate_hz,
                amplitude,
            } => {
                positive("bpm", *heart_rate_bpm)?;
                positive("sample_rate", *sample_rate_hz)?;
                finite("amplitude", *amplitude)?;
                below_nyquist("sample_rate", QRS_BAND_HZ, *sample_rate_hz)
            }
            StimulusKind::NoiseMix {
                heart_rate_bpm,
                sample_rate_hz,
                power_line_hz,
                baseline_hz,
                power_line_amplitude,
                baseline_amplitude,
                white_amplitude,
                ..
            } => {
                positive("bpm", *heart_rate_bpm)?;
                positive("sample_rate", *sample_rate_hz)?;
                below_nyquist("sample_rate", QRS_BAND_HZ, *sample_rate_hz)?;
                below_nyquist("line", *power_line_hz, *sample_rate_hz)?;
                below_nyquist("baseline", *baseline_hz, *sample_rate_hz)?;
                finite("line_amp", *power_line_amplitude)?;
                finite("baseline_amp", *baseline_amplitude)?;
                if !(white_amplitude.is_finite() && *white_amplitude >= 0.0) {
                    return Err(bad("white", "must be a non-negative standard deviation"));
                }
                Ok(())
            }
            StimulusKind::Random { amplitude, .. } => {
                if amplitude.is_finite() && *amplitude >= 0.0 {
                    Ok(())
                } else {
                    Err(bad("amp", "must be non-negative"))
                }
            }
            StimulusKind::External(samples) => {
                if samples.iter().all(|s| s.is_finite()) {
                    Ok(())
                } else {
                    Err(bad("samples", "must be finite"))
                }
            }
        }
    }
}

/// Generates the (unquantized) sample sequence.
pub fn gen_stimulus(spec: &Stimulus) -> Result<Vec<f64>, StimulusError> {
    spec.validate()?;
    let n = spec.length;
    let out = match &spec.kind {
        StimulusKind::Impulse { amplitude } => {
            let mut v = vec![0.0; n];
            v[0] = *amplitude;
            v
        }
        StimulusKind::Step { amplitude } => vec![*amplitude; n],
        StimulusKind::Sine {
            freq_hz,
            sample_rate_hz,
            amplitude,
            phase,
        } => (0..n)
            .map(|i| amplitude * (2.0 * PI * freq_hz * i as f64 / sample_rate_hz + phase).sin())
            .collect(),
        StimulusKind::SyntheticEcg {
            heart_rate_bpm,
            sample_rate_hz,
            amplitude,
        } => (0..n)
            .map(|i| amplitude * ecg_value(i as f64 / sample_rate_hz, 60.0 / heart_rate_bpm))
            .collect(),
        StimulusKind::NoiseMix {
            heart_rate_bpm,
            sample_rate_hz,
            power_line_hz,
            baseline_hz,
            power_line_amplitude,
            baseline_amplitude,
            white_amplitude,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let white = Normal::new(0.0, *white_amplitude).expect("validated deviation");
            (0..n)
                .map(|i| {
                    let t = i as f64 / sample_rate_hz;
                    ecg_value(t, 60.0 / heart_rate_bpm)
                        + power_line_amplitude * (2.0 * PI * power_line_hz * t).sin()
                        + baseline_amplitude * (2.0 * PI * baseline_hz * t).sin()
                        + white.sample(&mut rng)
                })
                .collect()
        }
        StimulusKind::Random { amplitude, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..n).map(|_| rng.random_range(-*amplitude..=*amplitude)).collect()
        }
        StimulusKind::External(samples) => {
            let mut v = samples.clone();
            v.resize(n, 0.0);
            v
        }
    };
    Ok(out)
}

// (offset from R peak in s, width sigma in s, amplitude)
const BUMPS: [(f64, f64, f64); 3] = [(-0.2, 0.040, 0.15), (0.0, 0.012, 1.0), (0.3, 0.060, 0.3)];

/// One beat per `period` seconds, R peak in the middle of each period.
fn ecg_value(t: f64, period: f64) -> f64 {
    let beat = (t / period).floor() as i64;
    let mut v = 0.0;
    for k in beat - 2..=beat + 2 {
        let r = (k as f64 + 0.5) * period;
        for (offset, sigma, amp) in BUMPS {
            let x = (t - r - offset) / sigma;
            v += amp * (-0.5 * x * x).exp();
        }
    }
    v
}
