//! Seven compound perturbations. Each one is a composition of the basic
//! families in `sonomorph_mr_basic`:
//!
//! | perturbation      | composed of                          |
//! |-------------------|--------------------------------------|
//! | [`compress`]      | time, frequency, amplitude           |
//! | [`ring_modulate`] | time, frequency, amplitude           |
//! | [`bass_boost`]    | frequency, amplitude                 |
//! | [`tremolo`]       | time, frequency, amplitude           |
//! | [`distort`]       | time, frequency, amplitude           |
//! | [`echo`]          | time, injection                      |
//! | [`reverb`]        | space, injection                     |
//!
//! All outputs are clamped to full scale.

mod compression;
mod distortion;
mod echo;
mod filter;
mod modulation;
mod perturbation;
mod reverb;

pub use compression::{compress, compress_with, CompressorTiming};
pub use distortion::{distort, distort_with_kernel, hard_clip, HarmonicKernel};
pub use echo::echo;
pub use filter::{bass_boost, low_pass};
pub use modulation::{ring_modulate, tremolo};
pub use perturbation::CompoundPerturbation;
pub use reverb::{impulse_response, reverb};

pub use sonomorph_mr_basic::{MrError, Result};

pub(crate) fn param_err(msg: impl Into<String>) -> MrError {
    MrError::Parameter(msg.into())
}
