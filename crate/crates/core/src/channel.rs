//! Scenario definition, line geometry and Rayleigh channel sampling.
//!
//! Channels are `g` (S1-S2 direct link), `h` (S1-R) and `f` (R-S2). Only
//! squared magnitudes enter any SNR expression, so realizations store the
//! exponential power gains directly and derive magnitudes on demand.

use std::ops::Range;

use crate::error::{invalid, Result};
use crate::stream::{CounterStream, StreamCursor};

/// Channel variances and per-terminal power `E` of a static scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingProfile {
    omega_g: f64,
    omega_h: f64,
    omega_f: f64,
    energy_e: f64,
}

impl FadingProfile {
    /// `omega_g == 0` is the scenario without a direct S1-S2 link.
    pub fn new(omega_g: f64, omega_h: f64, omega_f: f64, energy_e: f64) -> Result<Self> {
        if !(omega_h.is_finite() && omega_h > 0.0) {
            return Err(invalid(format!("omega_h must be positive, got {omega_h}")));
        }
        if !(omega_f.is_finite() && omega_f > 0.0) {
            return Err(invalid(format!("omega_f must be positive, got {omega_f}")));
        }
        if !(omega_g.is_finite() && omega_g >= 0.0) {
            return Err(invalid(format!("omega_g must be nonnegative, got {omega_g}")));
        }
        if !(energy_e.is_finite() && energy_e > 0.0) {
            return Err(invalid(format!("energy E must be positive, got {energy_e}")));
        }
        Ok(Self {
            omega_g,
            omega_h,
            omega_f,
            energy_e,
        })
    }

    /// Relay on the S1-S2 line at fractional distance `distance_d` from S1.
    pub fn from_geometry(distance_d: f64, pathloss_exponent: f64, energy_e: f64) -> Result<Self> {
        let (g, h, f) = line_geometry(distance_d, pathloss_exponent)?;
        Self::new(g, h, f, energy_e)
    }

    pub fn omega_g(&self) -> f64 {
        self.omega_g
    }

    pub fn omega_h(&self) -> f64 {
        self.omega_h
    }

    pub fn omega_f(&self) -> f64 {
        self.omega_f
    }

    pub fn energy(&self) -> f64 {
        self.energy_e
    }

    pub fn has_direct_link(&self) -> bool {
        self.omega_g > 0.0
    }

    /// Same variances at a different power.
    pub fn with_energy(&self, energy_e: f64) -> Result<Self> {
        Self::new(self.omega_g, self.omega_h, self.omega_f, energy_e)
    }

    /// Same relay links and power, direct link removed.
    pub fn without_direct_link(&self) -> Self {
        Self {
            omega_g: 0.0,
            ..*self
        }
    }
}

/// Variances `(omega_g, omega_h, omega_f)` for three collinear terminals with
/// unit S1-S2 distance and the relay at `distance_d` from S1.
pub fn line_geometry(distance_d: f64, pathloss_exponent: f64) -> Result<(f64, f64, f64)> {
    if !(distance_d > 0.0 && distance_d < 1.0) {
        return Err(invalid(format!(
            "relay distance must lie in (0, 1), got {distance_d}"
        )));
    }
    if !(pathloss_exponent.is_finite() && pathloss_exponent > 0.0) {
        return Err(invalid(format!(
            "path-loss exponent must be positive, got {pathloss_exponent}"
        )));
    }
    Ok((
        1.0,
        distance_d.powf(-pathloss_exponent),
        (1.0 - distance_d).powf(-pathloss_exponent),
    ))
}

/// One draw of the squared channel gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    /// `|h|^2`, S1-R.
    pub gain_h2: f64,
    /// `|f|^2`, R-S2.
    pub gain_f2: f64,
    /// `|g|^2`, S1-S2.
    pub gain_g2: f64,
}

impl ChannelRealization {
    pub fn new(gain_h2: f64, gain_f2: f64, gain_g2: f64) -> Result<Self> {
        for (name, v) in [("|h|^2", gain_h2), ("|f|^2", gain_f2), ("|g|^2", gain_g2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be a nonnegative number, got {v}")));
            }
        }
        Ok(Self {
            gain_h2,
            gain_f2,
            gain_g2,
        })
    }

    /// Realization with the given channel magnitudes.
    pub fn from_magnitudes(mag_h: f64, mag_f: f64, mag_g: f64) -> Result<Self> {
        Self::new(mag_h * mag_h, mag_f * mag_f, mag_g * mag_g)
    }

    pub fn mag_h(&self) -> f64 {
        self.gain_h2.sqrt()
    }

    pub fn mag_f(&self) -> f64 {
        self.gain_f2.sqrt()
    }

    pub fn mag_g(&self) -> f64 {
        self.gain_g2.sqrt()
    }
}

/// Words consumed per realization: one each for `h`, `f` and `g`.
const WORDS_PER_REALIZATION: u64 = 3;

/// Deterministic sampler: realization `i` is a pure function of
/// `(profile variances, seed, i)`.
#[derive(Debug, Clone, Copy)]
pub struct ChannelSampler {
    omega_g: f64,
    omega_h: f64,
    omega_f: f64,
    stream: CounterStream,
}

impl ChannelSampler {
    pub fn new(profile: &FadingProfile, seed: u64) -> Self {
        Self {
            omega_g: profile.omega_g,
            omega_h: profile.omega_h,
            omega_f: profile.omega_f,
            stream: CounterStream::new(seed, WORDS_PER_REALIZATION),
        }
    }

    pub fn seed(&self) -> u64 {
        self.stream.seed()
    }

    /// The `index`-th realization.
    pub fn sample(&self, index: u64) -> ChannelRealization {
        self.range(index..index + 1)
            .next()
            .expect("single-element range")
    }

    /// Realizations `range.start .. range.end`, in index order.
    pub fn range(&self, range: Range<u64>) -> Realizations {
        Realizations {
            cursor: self.stream.cursor(range.start),
            remaining: range.end.saturating_sub(range.start),
            omega_g: self.omega_g,
            omega_h: self.omega_h,
            omega_f: self.omega_f,
        }
    }
}

/// Iterator returned by [`ChannelSampler::range`].
pub struct Realizations {
    cursor: StreamCursor,
    remaining: u64,
    omega_g: f64,
    omega_h: f64,
    omega_f: f64,
}

impl Iterator for Realizations {
    type Item = ChannelRealization;

    #[inline]
    fn next(&mut self) -> Option<ChannelRealization> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let gain_h2 = self.cursor.next_exponential(self.omega_h);
        let gain_f2 = self.cursor.next_exponential(self.omega_f);
        // The word is consumed even without a direct link so indices stay aligned.
        let g_word = self.cursor.next_open_unit();
        let gain_g2 = if self.omega_g > 0.0 {
            -self.omega_g * g_word.ln()
        } else {
            0.0
        };
        Some(ChannelRealization {
            gain_h2,
            gain_f2,
            gain_g2,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

/// Draws realization `index` of `profile` under `seed`.
pub fn sample_realization(profile: &FadingProfile, seed: u64, index: u64) -> ChannelRealization {
    ChannelSampler::new(profile, seed).sample(index)
}
