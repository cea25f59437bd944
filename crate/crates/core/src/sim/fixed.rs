use std::fmt;
use std::str::FromStr;

use super::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overflow {
    Saturate,
    Wrap,
}

impl fmt::Display for Overflow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Overflow::Saturate => "saturate",
            Overflow::Wrap => "wrap",
        })
    }
}

impl FromStr for Overflow {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "saturate" | "sat" => Ok(Overflow::Saturate),
            "wrap" => Ok(Overflow::Wrap),
            other => Err(format!("unknown overflow mode `{other}` (expected saturate or wrap)")),
        }
    }
}

/// Two's-complement fixed point with `total_bits` bits, `frac_bits` of them
/// fractional. Values are carried as raw scaled integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedPointConfig {
    total_bits: u32,
    frac_bits: u32,
    overflow: Overflow,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            total_bits: 16,
            frac_bits: 8,
            overflow: Overflow::Saturate,
        }
    }
}

impl fmt::Display for FixedPointConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{} {}", self.total_bits, self.frac_bits, self.overflow)
    }
}

impl FixedPointConfig {
    pub fn new(total_bits: u32, frac_bits: u32, overflow: Overflow) -> Result<Self, SimError> {
        if !(1 <= frac_bits && frac_bits < total_bits && total_bits <= 64) {
            return Err(SimError::BadFormat { total_bits, frac_bits });
        }
        Ok(FixedPointConfig {
            total_bits,
            frac_bits,
            overflow,
        })
    }

    /// Parses `W.F`.
    pub fn parse(text: &str, overflow: Overflow) -> Result<Self, SimError> {
        let bad = || SimError::BadFormatText(text.to_string());
        let (w, f) = text.split_once('.').ok_or_else(bad)?;
        let w = w.trim().parse().map_err(|_| bad())?;
        let f = f.trim().parse().map_err(|_| bad())?;
        FixedPointConfig::new(w, f, overflow)
    }

    pub fn total_bits(&self) -> u32 {
        self.total_bits
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn overflow(&self) -> Overflow {
        self.overflow
    }

    pub fn min_raw(&self) -> i64 {
        (-(1i128 << (self.total_bits - 1))) as i64
    }

    pub fn max_raw(&self) -> i64 {
        ((1i128 << (self.total_bits - 1)) - 1) as i64
    }

    /// Brings an exact result into range; the flag reports whether the
    /// overflow mode had to act.
    pub fn fit(&self, v: i128) -> (i64, bool) {
        let (lo, hi) = (self.min_raw() as i128, self.max_raw() as i128);
        if (lo..=hi).contains(&v) {
            return (v as i64, false);
        }
        let out = match self.overflow {
            Overflow::Saturate => v.clamp(lo, hi),
            Overflow::Wrap => {
                let m = 1i128 << self.total_bits;
                let r = v.rem_euclid(m);
                if r > hi {
                    r - m
                } else {
                    r
                }
            }
        };
        (out as i64, true)
    }

    /// Round-to-nearest quantization of a real value.
    pub fn quantize(&self, x: f64) -> (i64, bool) {
        let scaled = (x * (1u64 << self.frac_bits) as f64).round();
        if !scaled.is_finite() {
            return self.fit(if scaled > 0.0 { i128::MAX } else { i128::MIN });
        }
        // f64 -> i128 saturates at the i128 bounds, far outside any W <= 64
        self.fit(scaled as i128)
    }

    pub fn to_real(&self, raw: i64) -> f64 {
        raw as f64 / (1u64 << self.frac_bits) as f64
    }

    pub fn add(&self, a: i64, b: i64) -> (i64, bool) {
        self.fit(a as i128 + b as i128)
    }

    /// Multiply by `2^shift`; right shifts round toward negative infinity.
    pub fn shift(&self, a: i64, shift: i32) -> (i64, bool) {
        if shift >= 0 {
            if a == 0 {
                return (0, false);
            }
            if shift as u32 >= 64 {
                // every in-range bit is shifted out of the word
                return match self.overflow {
                    Overflow::Saturate => (if a > 0 { self.max_raw() } else { self.min_raw() }, true),
                    Overflow::Wrap => (0, true),
                };
            }
            self.fit((a as i128) << shift)
        } else {
            let s = shift.unsigned_abs().min(63);
            (a >> s, false)
        }
    }
}
