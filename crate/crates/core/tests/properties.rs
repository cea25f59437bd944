mod common;

use dfg_fold::bundled;
use dfg_fold::cli::format::{parse_dfg_file, parse_folding_spec, serialize_dfg, serialize_folding_spec};
use dfg_fold::lifetime::{allocate_registers, lifetime_table, max_live};
use dfg_fold::sim::{
    equivalence_check, gen_stimulus, simulate_dfg, simulate_dfg_raw, simulate_folded, FixedPointConfig, Overflow,
    Stimulus, StimulusKind,
};
use dfg_fold::transforms::{fold, search_folding_orders};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dfg_text_round_trips(seed in any::<u64>(), adders in 1usize..8, gains in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shifts: &[i32] = if gains { &[-3, 0, 2] } else { &[] };
        let g = common::random_graph(&mut rng, adders, 0.2, shifts);
        let text = serialize_dfg(&g);
        let back = parse_dfg_file(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize_dfg(&back), text);
    }

    #[test]
    fn searched_specs_round_trip(seed in any::<u64>(), factor in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_graph(&mut rng, 4, 0.2, &[]);
        let a = common::random_assignment(&mut rng, &g, factor);
        for s in search_folding_orders(&g, factor, &a, &Default::default()).unwrap() {
            prop_assert_eq!(parse_folding_spec(&serialize_folding_spec(&s)).unwrap(), s);
        }
    }

    #[test]
    fn wrap_results_are_congruent(a in -40_000i64..40_000, b in -40_000i64..40_000) {
        let cfg = FixedPointConfig::new(12, 4, Overflow::Wrap).unwrap();
        let (fa, _) = cfg.fit(a as i128);
        let (fb, _) = cfg.fit(b as i128);
        let (s, _) = cfg.add(fa, fb);
        prop_assert_eq!((s - fa - fb).rem_euclid(1 << 12), 0);
        prop_assert!((cfg.min_raw()..=cfg.max_raw()).contains(&s));
    }

    #[test]
    fn lifetime_registers_equal_max_live_for_searched_orders(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_graph(&mut rng, 5, 0.2, &[]);
        let a = common::random_assignment(&mut rng, &g, 3);
        for s in search_folding_orders(&g, 3, &a, &Default::default()).unwrap() {
            let table = lifetime_table(&fold(&g, &s).unwrap());
            prop_assert_eq!(allocate_registers(&table).registers, max_live(&table));
        }
    }
}

#[test]
fn bundled_files_round_trip() {
    let g = bundled::lpf();
    assert_eq!(parse_dfg_file(&serialize_dfg(&g)).unwrap(), g);
    let s = bundled::lpf_spec();
    assert_eq!(parse_folding_spec(&serialize_folding_spec(&s)).unwrap(), s);
}

#[test]
fn both_bundled_orders_equivalent_on_ecg_with_noise() {
    let g = bundled::lpf();
    let stim = Stimulus::new(
        StimulusKind::NoiseMix {
            heart_rate_bpm: 75.0,
            sample_rate_hz: 360.0,
            power_line_hz: 60.0,
            baseline_hz: 0.3,
            power_line_amplitude: 0.2,
            baseline_amplitude: 0.4,
            white_amplitude: 0.05,
            seed: 3,
        },
        3600,
    );
    let cfg = FixedPointConfig::default();
    let reference = simulate_dfg(&g, &stim, &cfg).unwrap();
    for spec in [bundled::lpf_spec(), bundled::swapped_spec()] {
        let arch = fold(&g, &spec).unwrap();
        let rep = equivalence_check(&reference, &simulate_folded(&arch, &stim, &cfg).unwrap()).unwrap();
        assert!(rep.equivalent(), "{spec}: {rep}");
        assert_eq!(rep.matched, 3600);
    }
}

#[test]
fn impulse_response_is_three_z_inverse_times_one_plus_z_inverse() {
    let cfg = FixedPointConfig::default();
    let h = simulate_dfg(&bundled::lpf(), &Stimulus::impulse(6), &cfg)
        .unwrap()
        .output_samples();
    let x = gen_stimulus(&Stimulus::impulse(6)).unwrap();
    // direct-form evaluation of 3(x[n-1] + x[n-2])
    let direct: Vec<i64> = (0..6)
        .map(|n| {
            let at = |k: usize| if n >= k { x[n - k] } else { 0.0 };
            cfg.quantize(3.0 * (at(1) + at(2))).0
        })
        .collect();
    assert_eq!(h, direct);
}

#[test]
fn truncating_gain_breaks_superposition() {
    // a right shift floors, so halving two odd inputs separately differs
    let g = parse_dfg_file("node IN input\nnode G gain:-1\nnode OUT output\nedge a: IN -> G.p0\nedge b: G -> OUT.p0\n")
        .unwrap();
    let cfg = FixedPointConfig::default();
    let run = |x: i64| simulate_dfg_raw(&g, &[vec![x]], &cfg).unwrap().output_samples()[0];
    assert_ne!(run(1) + run(1), run(2));
}
