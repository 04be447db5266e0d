use proptest::prelude::*;
use sonomorph_audio::AudioBuffer;
use sonomorph_mr_compound::CompoundPerturbation;

const RATE: u32 = 8_000;

fn clip() -> impl Strategy<Value = AudioBuffer> {
    (prop::collection::vec(-1.0f64..=1.0, 400..1_600), 0.1f64..1.0).prop_map(|(s, g)| {
        AudioBuffer::mono(s.into_iter().map(|v| v * g).collect(), RATE).unwrap()
    })
}

fn perturbations() -> Vec<CompoundPerturbation> {
    use CompoundPerturbation::*;
    vec![
        Compression { threshold_db: -18.0, ratio: 3.0 },
        RingMod { carrier_hz: 35.0 },
        BassBoost { cutoff_hz: 150.0, gain_db: 12.0 },
        Tremolo { rate_hz: 5.0, depth: 0.9 },
        Distortion { clip_threshold: 0.3, drive: 2.0 },
        Echo { delay_s: 0.02, decay: 0.9, taps: 3 },
        Reverb { intensity: 2.0, duration_s: 0.05, seed: 4 },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn outputs_are_finite_and_in_range(x in clip()) {
        for p in perturbations() {
            let y = p.apply(&x).unwrap();
            prop_assert_eq!(y.sample_rate(), RATE);
            prop_assert!(y.channels().iter().flatten().all(|s| s.is_finite() && s.abs() <= 1.0), "{}", p.name());
        }
    }

    #[test]
    fn outputs_are_deterministic(x in clip()) {
        for p in perturbations() {
            prop_assert_eq!(p.apply(&x).unwrap(), p.apply(&x).unwrap());
        }
    }
}
