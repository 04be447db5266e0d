//! Content addressing: a SHA-256 over the canonical 16-bit PCM rendering of a
//! buffer, so the digest identifies exactly what `write_wav` stores.

use sha2::{Digest, Sha256};

use crate::wav::to_pcm16;
use crate::AudioBuffer;

/// `sample_rate` (u32 LE), channel count (u16 LE), then interleaved i16 LE
/// samples as `write_wav` would quantize them.
pub fn canonical_pcm_bytes(buffer: &AudioBuffer) -> Vec<u8> {
    let mut out = Vec::with_capacity(6 + 2 * buffer.frames() * buffer.channel_count());
    out.extend_from_slice(&buffer.sample_rate().to_le_bytes());
    out.extend_from_slice(&(buffer.channel_count() as u16).to_le_bytes());
    for i in 0..buffer.frames() {
        for c in buffer.channels() {
            out.extend_from_slice(&to_pcm16(c[i]).to_le_bytes());
        }
    }
    out
}

/// Lowercase hex SHA-256 of [`canonical_pcm_bytes`].
pub fn content_digest(buffer: &AudioBuffer) -> String {
    hex::encode(Sha256::digest(canonical_pcm_bytes(buffer)))
}
