use std::io::Write;

use serde::{Deserialize, Serialize};

use super::envelope::Envelope;
use crate::error::{Error, Result};

/// One sinusoidal component of the global drive:
/// amplitude · envelope(τ) · cos(carrier · t + phase), with `t` the
/// schedule clock so that phases stay coherent across segments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tone {
    pub carrier: f64,
    #[serde(default)]
    pub phase: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub envelope: Envelope,
}

impl Tone {
    pub fn new(carrier: f64, phase: f64, amplitude: f64) -> Self {
        Tone {
            carrier,
            phase,
            amplitude,
            envelope: Envelope::default(),
        }
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = envelope;
        self
    }

    /// Constant drive of the given strength (zero carrier, flat envelope).
    pub fn constant(strength: f64) -> Self {
        Tone {
            carrier: 0.0,
            phase: if strength < 0.0 { std::f64::consts::PI } else { 0.0 },
            amplitude: strength.abs(),
            envelope: Envelope::Flat,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.carrier.is_finite() && self.carrier >= 0.0) {
            return Err(Error::invalid("tone.carrier", format!("{} is not a valid carrier", self.carrier)));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::invalid("tone.amplitude", format!("{} must be non-negative", self.amplitude)));
        }
        if !self.phase.is_finite() {
            return Err(Error::invalid("tone.phase", "must be finite"));
        }
        self.envelope.validate()
    }

    pub fn value(&self, t: f64, tau: f64, duration: f64) -> f64 {
        self.amplitude * self.envelope.value(tau, duration) * (self.carrier * t + self.phase).cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Segment {
    Delay { duration: f64 },
    Tones { duration: f64, tones: Vec<Tone> },
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match self {
            Segment::Delay { duration } | Segment::Tones { duration, .. } => *duration,
        }
    }

    pub fn tones(&self) -> &[Tone] {
        match self {
            Segment::Delay { .. } => &[],
            Segment::Tones { tones, .. } => tones,
        }
    }

    /// No tone carries any amplitude.
    pub fn is_idle(&self) -> bool {
        self.tones().iter().all(|t| t.amplitude == 0.0)
    }

    /// Drive is constant in time across the segment.
    pub fn is_constant(&self) -> bool {
        self.tones()
            .iter()
            .all(|t| t.amplitude == 0.0 || (t.carrier == 0.0 && t.envelope.is_flat()))
    }

    /// γ(t) for a segment starting at `start`.
    pub fn drive(&self, t: f64, start: f64) -> f64 {
        let duration = self.duration();
        self.tones()
            .iter()
            .map(|tone| tone.value(t, t - start, duration))
            .sum()
    }

    fn validate(&self) -> Result<()> {
        let d = self.duration();
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::invalid("segment.duration", format!("{d} must be positive")));
        }
        self.tones().iter().try_for_each(Tone::validate)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    segments: Vec<Segment>,
}

/// Contiguous sequence of delays and simultaneous-tone segments, starting
/// at t = 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct PulseSchedule {
    segments: Vec<Segment>,
}

impl TryFrom<RawSchedule> for PulseSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        let mut s = PulseSchedule::new();
        for seg in raw.segments {
            s.push(seg)?;
        }
        Ok(s)
    }
}

impl PulseSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, segment: Segment) -> Result<()> {
        segment.validate()?;
        self.segments.push(segment);
        Ok(())
    }

    pub fn delay(&mut self, duration: f64) -> Result<()> {
        self.push(Segment::Delay { duration })
    }

    pub fn tones(&mut self, duration: f64, tones: Vec<Tone>) -> Result<()> {
        self.push(Segment::Tones { duration, tones })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    /// (start, end, segment) triples.
    pub fn timeline(&self) -> Vec<(f64, f64, &Segment)> {
        let mut t = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = t;
                t += s.duration();
                (start, t, s)
            })
            .collect()
    }

    /// Highest carrier of any tone with non-zero amplitude.
    pub fn max_carrier(&self) -> f64 {
        self.segments
            .iter()
            .flat_map(|s| s.tones())
            .filter(|t| t.amplitude > 0.0)
            .map(|t| t.carrier)
            .fold(0.0, f64::max)
    }

    pub fn evaluate_drive(&self, t: f64) -> Result<f64> {
        let total = self.duration();
        let slack = 1e-12 * total.max(1.0);
        if !(t >= -slack && t <= total + slack) {
            return Err(Error::OutsideSchedule { t, duration: total });
        }
        let timeline = self.timeline();
        let (start, _, seg) = timeline
            .iter()
            .find(|(_, end, _)| t < *end)
            .or(timeline.last())
            .ok_or(Error::OutsideSchedule { t, duration: total })?;
        Ok(seg.drive(t, *start))
    }

    /// Schedule whose drive is γ_rev(t) = γ(T − t).
    pub fn reversed(&self) -> PulseSchedule {
        let total = self.duration();
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|seg| match seg {
                Segment::Delay { duration } => Segment::Delay { duration: *duration },
                Segment::Tones { duration, tones } => Segment::Tones {
                    duration: *duration,
                    tones: tones
                        .iter()
                        .map(|tone| Tone {
                            phase: -(tone.carrier * total + tone.phase),
                            ..*tone
                        })
                        .collect(),
                },
            })
            .collect();
        PulseSchedule { segments }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// CSV with columns `t,gamma`, sampled every 1/`sample_rate` time units
    /// from 0 to the end of the schedule.
    pub fn write_waveform_csv<W: Write>(&self, out: W, sample_rate: f64) -> Result<()> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::invalid("sample_rate", "must be positive"));
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "gamma"])?;
        let total = self.duration();
        let count = (total * sample_rate).floor() as usize;
        for k in 0..=count {
            let t = (k as f64 / sample_rate).min(total);
            w.write_record([format!("{t}"), format!("{}", self.evaluate_drive(t)?)])?;
        }
        w.flush()?;
        Ok(())
    }
}
