//! Audio substrate shared by every perturbation: an immutable multi-channel
//! PCM buffer, 16-bit WAV I/O, and the measurement routines (RMS, spectra,
//! dominant frequency, SNR) that the transform test suites use as oracles.

pub mod analysis;
pub mod buffer;
pub mod digest;
pub mod dsp;
pub mod wav;

mod error;

pub use analysis::{dominant_frequency, measure_snr, rms, rms_total, spectrum, Snr, Spectrum};
pub use buffer::AudioBuffer;
pub use digest::{canonical_pcm_bytes, content_digest};
pub use error::AudioError;
pub use wav::{read_wav, wav_bytes, write_wav};

pub type Result<T, E = AudioError> = std::result::Result<T, E>;
