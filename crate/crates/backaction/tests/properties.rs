//! Property tests for the state-update invariants.

use proptest::prelude::*;

use backaction::params::{Outcome, StrengthParams};
use backaction::update::{update_general, update_plus_y};
use backaction::BlochVector;

fn pure_state() -> impl Strategy<Value = BlochVector> {
    // Uniform-ish pure states from two angles.
    (0.0..std::f64::consts::PI, 0.0..(2.0 * std::f64::consts::PI)).prop_map(|(polar, azimuth)| {
        BlochVector::new(
            polar.sin() * azimuth.cos(),
            polar.sin() * azimuth.sin(),
            polar.cos(),
        )
    })
}

fn outcome() -> impl Strategy<Value = Outcome> {
    (-8.0..8.0f64, -8.0..8.0f64).prop_map(|(i, q)| Outcome::new(i, q))
}

proptest! {
    #[test]
    fn efficient_updates_preserve_purity(
        init in pure_state(),
        out in outcome(),
        s in 0.0..3.0f64,
        qbar in -4.0..4.0f64,
    ) {
        let sp = StrengthParams::scaled(s, qbar);
        let b = update_general(init, out, &sp, 1.0);
        prop_assert!((b.purity() - 1.0).abs() < 1e-12, "purity = {}", b.purity());
    }

    #[test]
    fn plus_y_norm_is_hyperbolic_identity(
        out in outcome(),
        s in 0.0..3.0f64,
    ) {
        // sech^2 + tanh^2 = 1: the +y update has unit norm for eta = 1.
        let sp = StrengthParams::scaled(s, 0.0);
        let b = update_plus_y(out, &sp, 1.0);
        prop_assert!((b.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poles_are_fixed(
        out in outcome(),
        s in 0.0..3.0f64,
        eta in 0.05..=1.0f64,
        up in any::<bool>(),
    ) {
        let sp = StrengthParams::scaled(s, 1.28 * s);
        let z0 = if up { 1.0 } else { -1.0 };
        let b = update_general(BlochVector::new(0.0, 0.0, z0), out, &sp, eta);
        prop_assert_eq!(b.z, z0);
        prop_assert_eq!((b.x, b.y), (0.0, 0.0));
    }

    #[test]
    fn population_pull_is_monotone(
        i1 in -5.0..5.0f64,
        delta in 0.001..3.0f64,
        s in 0.05..2.9f64,
        z0 in -0.99..0.99f64,
    ) {
        // Strictly increasing while the hyperbolics are unsaturated.
        let i2 = i1 + delta;
        prop_assume!(i2.abs() * s < 15.0 && i1.abs() * s < 15.0);
        let sp = StrengthParams::scaled(s, 0.0);
        let init = BlochVector::new(0.0, (1.0 - z0 * z0).sqrt(), z0);
        let a = update_general(init, Outcome::new(i1, 0.0), &sp, 1.0);
        let b = update_general(init, Outcome::new(i2, 0.0), &sp, 1.0);
        prop_assert!(b.z > a.z, "z({i2}) = {} <= z({i1}) = {}", b.z, a.z);
    }

    #[test]
    fn inefficiency_damping_is_outcome_independent(
        out in outcome(),
        s in 0.05..2.0f64,
        eta in 0.1..0.999f64,
    ) {
        let sp = StrengthParams::scaled(s, 1.28 * s);
        let full = update_plus_y(out, &sp, 1.0);
        let lossy = update_plus_y(out, &sp, eta);
        let c_full = (full.x * full.x + full.y * full.y).sqrt();
        prop_assume!(c_full > 1e-8);
        let c_lossy = (lossy.x * lossy.x + lossy.y * lossy.y).sqrt();
        let expected = (-s * s * (1.0 - eta) / eta).exp();
        prop_assert!(
            (c_lossy / c_full - expected).abs() < 1e-10,
            "ratio = {}, expected {expected}", c_lossy / c_full
        );
    }

    #[test]
    fn reduction_to_plus_y_is_bitwise(
        out in outcome(),
        s in 0.0..3.0f64,
        eta in 0.05..=1.0f64,
    ) {
        let sp = StrengthParams::scaled(s, 1.28 * s);
        let a = update_plus_y(out, &sp, eta);
        let b = update_general(BlochVector::PLUS_Y, out, &sp, eta);
        prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
        prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
        prop_assert_eq!(a.z.to_bits(), b.z.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn binary_record_roundtrip(
        seeds in proptest::collection::vec(any::<u64>(), 1..4),
        len in 1usize..64,
    ) {
        use backaction::record::{read_binary, write_binary, Record};
        let records: Vec<Record> = seeds
            .iter()
            .enumerate()
            .map(|(k, &seed)| {
                let mut rng = backaction::SeedPlan::new(seed).rng();
                Record {
                    samples: (0..len + k).map(|_| backaction::rng::normal(&mut rng)).collect(),
                    dt: 20e-9,
                    seed,
                    truth: None,
                }
            })
            .collect();
        let mut buf = Vec::new();
        write_binary(&records, &mut buf).unwrap();
        let back = read_binary(&buf[..]).unwrap();
        prop_assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            prop_assert_eq!(a.seed, b.seed);
            prop_assert_eq!(&a.samples, &b.samples);
        }
    }
}
