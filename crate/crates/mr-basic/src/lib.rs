//! The five basic signal-level perturbation families. Every function takes a
//! buffer by reference and returns a new one; nothing here mutates shared
//! state, so the functions can be fanned out across worker threads freely.
//!
//! | family      | functions                                  |
//! |-------------|--------------------------------------------|
//! | time        | [`time_stretch`], [`time_shift`]           |
//! | space       | [`pan`], [`surround`]                      |
//! | frequency   | [`pitch_shift`], [`resample`]              |
//! | injection   | [`inject_noise`], [`repeat_segment`]       |
//! | amplitude   | [`gain`]                                   |

mod amplitude;
mod error;
mod frequency;
mod injection;
mod perturbation;
mod spatial;
mod temporal;

pub use amplitude::{db_to_linear, gain, scale};
pub use error::MrError;
pub use frequency::{pitch_shift, resample};
pub use injection::{gaussian_noise, inject_noise, repeat_segment, scaled_noise};
pub use perturbation::BasicPerturbation;
pub use spatial::{pan, pan_gains, surround};
pub use temporal::{delay, time_shift, time_stretch};

pub type Result<T, E = MrError> = std::result::Result<T, E>;

pub(crate) fn param_err(msg: impl Into<String>) -> MrError {
    MrError::Parameter(msg.into())
}
