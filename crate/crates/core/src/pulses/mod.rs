//! Global drive waveforms: tones, delays and multi-tone compensated
//! envelopes, plus the rotating-wave generators they induce.

mod compensation;
mod envelope;
mod rwa;
mod schedule;

pub use compensation::{band_lines, compensated_tones, target_band, Band, BandLine, TransitionTarget};
pub use envelope::Envelope;
pub use rwa::{resonance_window, rwa_generator, RwaGenerator, DEGENERACY_TOLERANCE};
pub use schedule::{PulseSchedule, Segment, Tone};
