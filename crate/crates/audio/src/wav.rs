//! RIFF/WAV I/O. Reads 8/16/24/32-bit integer PCM and 32-bit float; always
//! writes 16-bit integer PCM with hard clamping at full scale.

use std::fs::File;
use std::io::{BufReader, BufWriter, Cursor, Read, Seek, Write};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::{AudioBuffer, AudioError, Result};

const PCM16_SCALE: f64 = 32_768.0;

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let file = File::open(path.as_ref())?;
    decode(BufReader::new(file))
}

/// Decodes a WAV stream held in memory or any seekable reader.
pub fn decode<R: Read>(reader: R) -> Result<AudioBuffer> {
    let reader = WavReader::new(reader).map_err(map_hound)?;
    let spec = reader.spec();
    if !(1..=2).contains(&spec.channels) {
        return Err(AudioError::UnsupportedCodec(format!(
            "{} channels (only mono and stereo are supported)",
            spec.channels
        )));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = (1_i64 << (bits - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) / scale).map_err(map_hound))
                .collect::<Result<_>>()?
        }
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from).map_err(map_hound))
            .collect::<Result<_>>()?,
        (format, bits) => {
            return Err(AudioError::UnsupportedCodec(format!("{format:?} with {bits} bits")));
        }
    };
    let n = usize::from(spec.channels);
    let mut channels = vec![Vec::with_capacity(interleaved.len() / n); n];
    for frame in interleaved.chunks_exact(n) {
        for (c, &s) in channels.iter_mut().zip(frame) {
            c.push(s);
        }
    }
    AudioBuffer::new(channels, spec.sample_rate)
}

/// Writes 16-bit PCM. Only `bit_depth == 16` is accepted.
pub fn write_wav(buffer: &AudioBuffer, path: impl AsRef<Path>, bit_depth: u16) -> Result<()> {
    check_depth(bit_depth)?;
    let file = File::create(path.as_ref())?;
    encode(buffer, BufWriter::new(file))
}

/// The bytes `write_wav` would produce for `buffer`.
pub fn wav_bytes(buffer: &AudioBuffer) -> Result<Vec<u8>> {
    let mut cursor = Cursor::new(Vec::new());
    encode(buffer, &mut cursor)?;
    Ok(cursor.into_inner())
}

fn encode<W: Write + Seek>(buffer: &AudioBuffer, sink: W) -> Result<()> {
    let spec = WavSpec {
        channels: buffer.channel_count() as u16,
        sample_rate: buffer.sample_rate(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::new(sink, spec).map_err(map_hound)?;
    {
        let mut w = writer.get_i16_writer((buffer.frames() * buffer.channel_count()) as u32);
        for i in 0..buffer.frames() {
            for c in buffer.channels() {
                w.write_sample(to_pcm16(c[i]));
            }
        }
        w.flush().map_err(map_hound)?;
    }
    writer.finalize().map_err(map_hound)
}

/// Quantizes one sample: `round(x * 32768)` clamped to the i16 range, so
/// `1.0` maps to `32767` and `-1.0` to `-32768`.
pub fn to_pcm16(sample: f64) -> i16 {
    (sample * PCM16_SCALE).round().clamp(-PCM16_SCALE, PCM16_SCALE - 1.0) as i16
}

pub fn from_pcm16(value: i16) -> f64 {
    f64::from(value) / PCM16_SCALE
}

fn check_depth(bit_depth: u16) -> Result<()> {
    if bit_depth == 16 {
        Ok(())
    } else {
        Err(AudioError::UnsupportedCodec(format!("{bit_depth}-bit output (only 16-bit is written)")))
    }
}

fn map_hound(err: hound::Error) -> AudioError {
    match err {
        hound::Error::IoError(e) => AudioError::Io(e),
        hound::Error::Unsupported => AudioError::UnsupportedCodec("non-PCM WAV encoding".into()),
        hound::Error::FormatError(msg) => AudioError::Format(msg.into()),
        other => AudioError::Format(other.to_string()),
    }
}
