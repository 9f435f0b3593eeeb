//! Randomized invariant checks across the whole pipeline.

use proptest::prelude::*;

use cvqrng::bits::Bits;
use cvqrng::*;

fn arb_config() -> impl Strategy<Value = QuantizerConfig> {
    (0.5f64..30.0, 1u32..=14).prop_map(|(range, bits)| QuantizerConfig::new(range, bits).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn quantize_is_total_and_in_range(a in -1e6f64..1e6, cfg in arb_config()) {
        let i = quantize(a, &cfg).unwrap();
        prop_assert!(i >= cfg.i_min() && i <= cfg.i_max());
    }

    #[test]
    fn quantize_is_monotone(a in -100.0f64..100.0, b in -100.0f64..100.0, cfg in arb_config()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(quantize(lo, &cfg).unwrap() <= quantize(hi, &cfg).unwrap());
    }

    #[test]
    fn interior_round_trip(cfg in arb_config(), frac in -0.499f64..0.499) {
        for i in [cfg.i_min() + 1, 0, cfg.i_max() - 1] {
            if i <= cfg.i_min() || i >= cfg.i_max() {
                continue;
            }
            let a = bin_center(i, &cfg).unwrap() + frac * cfg.bin_width();
            prop_assert_eq!(quantize(a, &cfg).unwrap(), i);
        }
    }

    #[test]
    fn pdis_is_a_distribution(cfg in arb_config(), sigma in 0.05f64..5.0) {
        let d = analytic_pdis(sigma, &cfg).unwrap();
        let sum: f64 = d.probabilities.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        prop_assert!(d.probabilities.iter().all(|&p| (0.0..=1.0).contains(&p)));
        let h = d.shannon_entropy();
        prop_assert!(h >= -1e-12 && h <= f64::from(cfg.bits) + 1e-12);
    }

    #[test]
    fn upper_variance_dominates_discrete_variance(cfg in arb_config(), sigma in 0.1f64..4.0) {
        let d = analytic_pdis(sigma, &cfg).unwrap();
        let a_lim = cfg.range.max(10.0 * sigma);
        let mean: f64 = d.iter_bins().map(|(_, a, p)| p * a).sum();
        let var: f64 = d.iter_bins().map(|(_, a, p)| p * (a - mean).powi(2)).sum();
        prop_assert!(upper_variance(&d, a_lim).unwrap() >= var - 1e-12);
    }

    #[test]
    fn von_neumann_is_monotone(a in 1.0f64..50.0, b in 1.0f64..50.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(gaussian_von_neumann(lo).unwrap() <= gaussian_von_neumann(hi).unwrap() + 1e-12);
    }

    #[test]
    fn holevo_floor(eps in 0.001f64..10.0, bits in 2u32..=12, nsig in 2.0f64..12.0) {
        let sigma2 = 1.0 + eps;
        let eval = evaluate_pipeline(&PipelineParams::symmetric(
            sigma2,
            nsig * sigma2.sqrt(),
            bits,
        ))
        .unwrap();
        prop_assert!(eval.s >= ideal_holevo(eps).unwrap() - 1e-9);
    }

    #[test]
    fn rate_accounting_is_consistent(
        r_dis in 0.0f64..16.0,
        n_tot in 1_000u64..10_000_000,
        frac in 0.0f64..0.5,
    ) {
        let n_c = (n_tot as f64 * frac) as u64;
        let t = seed_length(n_tot, n_c).unwrap();
        prop_assert!(t <= n_tot);
        let r_sec = secure_rate(r_dis, n_tot, n_c, t).unwrap();
        prop_assert!(r_sec <= r_dis + 1e-12);
        // symmetric binomial
        prop_assert_eq!(t, seed_length(n_tot, n_tot - n_c).unwrap());
    }

    #[test]
    fn schedule_size_and_bounds(n_tot in 1u64..10_000, frac in 0.0f64..1.0) {
        let n_c = ((n_tot as f64) * frac) as u64;
        let s = build_schedule(n_tot, n_c, &mut SeedStream::from_seed(7)).unwrap();
        prop_assert_eq!(s.check_positions.len() as u64, n_c);
        prop_assert!(s.check_positions.iter().all(|&p| p < n_tot));
    }

    #[test]
    fn bits_bytes_round_trip(words in proptest::collection::vec(any::<u64>(), 0..8), drop in 0usize..64) {
        let full = words.len() * 64;
        let len = full.saturating_sub(drop);
        let b = Bits::from_words(words, len);
        prop_assert_eq!(Bits::from_bytes(&b.to_bytes(), len), b);
    }

    #[test]
    fn toeplitz_linearity_random(l in 1usize..256, seed in any::<u64>()) {
        use rand::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let m = 1 + (rng.next_u64() as usize) % l;
        let mut mk = |len: usize| {
            let mut b = Bits::with_capacity(len);
            let mut left = len;
            while left > 0 {
                let take = left.min(64);
                b.push_low_bits(rng.next_u64(), take);
                left -= take;
            }
            b
        };
        let spec = ToeplitzSpec::new(l, m, mk(m + l - 1)).unwrap();
        let x = mk(l);
        let y = mk(l);
        let mut xy = x.clone();
        xy.xor_with(&y);
        let mut lhs = toeplitz_extract(&x, &spec).unwrap();
        lhs.xor_with(&toeplitz_extract(&y, &spec).unwrap());
        prop_assert_eq!(lhs, toeplitz_extract(&xy, &spec).unwrap());
    }

    #[test]
    fn energy_test_is_monotone_in_bound(
        samples in proptest::collection::vec(-5.0f64..5.0, 1..50),
        bound in 0.1f64..6.0,
    ) {
        if energy_test(&samples, bound).unwrap() {
            prop_assert!(energy_test(&samples, bound * 2.0).unwrap());
        }
    }

    #[test]
    fn histogram_matches_direct_quantization(
        samples in proptest::collection::vec(-8.0f64..8.0, 1..200),
    ) {
        let cfg = QuantizerConfig::new(5.0, 6).unwrap();
        let h = SampleHistogram::from_samples(samples.iter().copied(), cfg, Quadrature::X).unwrap();
        prop_assert_eq!(h.total as usize, samples.len());
        for &a in &samples {
            let i = quantize(a, &cfg).unwrap();
            prop_assert!(h.counts[(i - cfg.i_min()) as usize] > 0);
        }
        let d = h.to_distribution().unwrap();
        let sum: f64 = d.probabilities.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
    }
}
