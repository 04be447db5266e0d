use proptest::prelude::*;
use sonomorph_audio::{read_wav, rms, write_wav, AudioBuffer};

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..=1.0, 1..400)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wav_round_trip_within_one_step(left in samples(), stereo in any::<bool>()) {
        let buffer = if stereo {
            let right: Vec<f64> = left.iter().map(|s| -s * 0.5).collect();
            AudioBuffer::stereo(left, right, 16_000).unwrap()
        } else {
            AudioBuffer::mono(left, 16_000).unwrap()
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.wav");
        write_wav(&buffer, &path, 16).unwrap();
        let back = read_wav(&path).unwrap();
        prop_assert_eq!(back.frames(), buffer.frames());
        prop_assert_eq!(back.channel_count(), buffer.channel_count());
        for (a, b) in buffer.channels().iter().flatten().zip(back.channels().iter().flatten()) {
            prop_assert!((a - b).abs() <= 1.0 / 32_768.0);
        }
    }

    #[test]
    fn rms_is_scale_equivariant(x in samples(), g in 0.0f64..8.0) {
        let buffer = AudioBuffer::mono(x, 8_000).unwrap();
        let scaled = buffer.map_samples(|s| s * g);
        let a = rms(&buffer).unwrap()[0] * g;
        let b = rms(&scaled).unwrap()[0];
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}
