use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitude envelope of a tone over its segment, peak value 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Envelope {
    Flat,
    /// Cosine ramps of `ramp`·T at each end, flat in between.
    FlatTop { ramp: f64 },
    /// exp(−(τ − T/2)² / 2(σT)²), truncated to the segment.
    Gaussian { sigma: f64 },
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope::FlatTop { ramp: 0.1 }
    }
}

const GAUSSIAN_QUADRATURE_INTERVALS: usize = 4096;

impl Envelope {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Envelope::Flat => Ok(()),
            Envelope::FlatTop { ramp } if (0.0..=0.5).contains(&ramp) => Ok(()),
            Envelope::FlatTop { ramp } => Err(Error::invalid(
                "envelope.ramp",
                format!("ramp fraction {ramp} outside [0, 0.5]"),
            )),
            Envelope::Gaussian { sigma } if sigma > 0.0 && sigma.is_finite() => Ok(()),
            Envelope::Gaussian { sigma } => Err(Error::invalid(
                "envelope.sigma",
                format!("width {sigma} must be positive"),
            )),
        }
    }

    /// Envelope value at local time `tau` ∈ [0, duration].
    pub fn value(&self, tau: f64, duration: f64) -> f64 {
        match *self {
            Envelope::Flat => 1.0,
            Envelope::FlatTop { ramp } => {
                let r = ramp * duration;
                if r <= 0.0 {
                    1.0
                } else if tau < r {
                    0.5 * (1.0 - (PI * tau / r).cos())
                } else if tau > duration - r {
                    0.5 * (1.0 - (PI * (duration - tau) / r).cos())
                } else {
                    1.0
                }
            }
            Envelope::Gaussian { sigma } => {
                let s = sigma * duration;
                let x = tau - 0.5 * duration;
                (-x * x / (2.0 * s * s)).exp()
            }
        }
    }

    /// ∫₀ᵀ envelope dτ.
    pub fn area(&self, duration: f64) -> f64 {
        match *self {
            Envelope::Flat => duration,
            Envelope::FlatTop { ramp } => duration * (1.0 - ramp),
            Envelope::Gaussian { .. } => {
                let n = GAUSSIAN_QUADRATURE_INTERVALS;
                let h = duration / n as f64;
                let interior: f64 = (1..n)
                    .map(|k| {
                        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                        w * self.value(k as f64 * h, duration)
                    })
                    .sum();
                h / 3.0 * (self.value(0.0, duration) + interior + self.value(duration, duration))
            }
        }
    }

    /// Area per unit duration; a pulse needs duration = area / fill.
    pub fn fill_factor(&self) -> f64 {
        self.area(1.0)
    }

    /// True when the envelope has no ramps, so a tone with zero carrier
    /// produces a constant drive over its segment.
    pub fn is_flat(&self) -> bool {
        matches!(self, Envelope::Flat) || matches!(self, Envelope::FlatTop { ramp } if *ramp == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid(e: &Envelope, t: f64) -> f64 {
        let n = 200_000;
        let h = t / n as f64;
        (0..=n)
            .map(|k| {
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                w * e.value(k as f64 * h, t)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn areas_match_quadrature() {
        for e in [
            Envelope::Flat,
            Envelope::FlatTop { ramp: 0.1 },
            Envelope::FlatTop { ramp: 0.5 },
            Envelope::Gaussian { sigma: 0.15 },
        ] {
            let t = 37.0;
            assert!((e.area(t) - trapezoid(&e, t)).abs() < 1e-7 * t, "{e:?}");
        }
    }

    #[test]
    fn flat_top_is_continuous_and_peaks_at_one() {
        let e = Envelope::FlatTop { ramp: 0.1 };
        assert_eq!(e.value(0.0, 10.0), 0.0);
        assert!((e.value(1.0, 10.0) - 1.0).abs() < 1e-15);
        assert_eq!(e.value(5.0, 10.0), 1.0);
        assert!(e.value(10.0, 10.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Envelope::FlatTop { ramp: 0.7 }.validate().is_err());
        assert!(Envelope::Gaussian { sigma: 0.0 }.validate().is_err());
        assert!(Envelope::default().validate().is_ok());
    }
}
