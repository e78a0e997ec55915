//! Statistical properties of the photon pipeline at desk scale: the
//! background-mixing law for g²(0), Poissonian calibration of the
//! normalization, oracle-checked pair counting, and bit-level determinism.

use photonbench::photonstats::{
    fit_g2, g2_histogram, hbt_split, run_g2_pipeline, simulate_emitter, ClickStream, EmitterSpec,
    G2PipelineConfig,
};

/// All-pairs reference counter, written against the published binning rule:
/// bins centered on k·Δ for k ∈ [−K, K], pairs outside dropped.
fn brute_force_counts(a: &ClickStream, b: &ClickStream, bin_width: f64, max_tau: f64) -> Vec<u64> {
    let k_max = (max_tau / bin_width).round() as i64;
    let nbins = (2 * k_max + 1) as usize;
    let half = (k_max as f64 + 0.5) * bin_width;
    let mut raw = vec![0u64; nbins];
    for &ta in &a.timestamps {
        for &tb in &b.timestamps {
            let tau = tb - ta;
            if tau.abs() <= half {
                let idx = (tau / bin_width).round() as i64 + k_max;
                if (0..nbins as i64).contains(&idx) {
                    raw[idx as usize] += 1;
                }
            }
        }
    }
    raw
}

fn emitter(seed: u64, duration: f64, rho: f64) -> EmitterSpec {
    EmitterSpec {
        pump_rate: 2e8,
        lifetime: 2.5e-9,
        background_rate: 0.0,
        duration,
        seed,
    }
    .with_signal_fraction(rho)
    .unwrap()
}

#[test]
fn mixing_law_holds_across_signal_fractions() {
    // An uncorrelated background of fraction 1 − ρ lifts the zero-delay
    // correlation to 1 − ρ²; check the fitted value at three fractions
    // against its own standard error.
    for (seed, rho) in [(101u64, 0.5), (102, 0.8), (103, 0.959)] {
        let mut config = G2PipelineConfig::default();
        config.emitter = emitter(seed, 1.6e-3, rho);
        let result = run_g2_pipeline(&config).unwrap();
        let predicted = 1.0 - rho * rho;
        let sigma = result.fit.sigma_g2_0().max(5e-3);
        assert!(
            (result.fit.g2_0 - predicted).abs() < 3.0 * sigma,
            "rho = {rho}: fitted {} vs predicted {predicted} (sigma {sigma:.4})",
            result.fit.g2_0,
        );

        // The same physics on a short window, counted by the O(n²) oracle:
        // the optimized histogram is bit-identical.
        let small = EmitterSpec {
            duration: 2e-5,
            ..config.emitter
        };
        let s = simulate_emitter(&small).unwrap();
        let (a, b) = hbt_split(&s, 0.5, 1.0, 0.0, seed ^ 0xabcd).unwrap();
        let h = g2_histogram(&a, &b, 128e-12, 3.2e-9).unwrap();
        assert_eq!(h.raw, brute_force_counts(&a, &b, 128e-12, 3.2e-9));
    }
}

#[test]
fn poisson_normalization_is_calibrated_over_100_seeds() {
    // For uncorrelated Poisson arms every bin is a Poisson count with mean
    // equal to the normalization constant; the fraction of bins farther
    // than 3σ from g = 1 must stay below 1%.
    let mut outside = 0usize;
    let mut total = 0usize;
    for seed in 0..100u64 {
        let spec = EmitterSpec {
            pump_rate: 0.0,
            lifetime: 1e-9,
            background_rate: 8e7,
            duration: 1e-3,
            seed,
        };
        let s = simulate_emitter(&spec).unwrap();
        let (a, b) = hbt_split(&s, 0.5, 1.0, 0.0, seed.wrapping_mul(0x9e37)).unwrap();
        let h = g2_histogram(&a, &b, 128e-12, 6.4e-9).unwrap();
        let sigma = 1.0 / h.normalization.sqrt();
        for &g in &h.g {
            total += 1;
            if (g - 1.0).abs() > 3.0 * sigma {
                outside += 1;
            }
        }
    }
    let fraction = outside as f64 / total as f64;
    assert!(
        fraction < 0.01,
        "{outside}/{total} bins outside 3 sigma ({fraction:.4})"
    );
}

#[test]
fn chunked_counting_matches_the_oracle_past_the_partition_size() {
    // More than one internal partition (8192 clicks per chunk), so merged
    // counts must agree with the single-pass oracle across chunk seams.
    let spec = emitter(7, 2.2e-4, 0.9);
    let s = simulate_emitter(&spec).unwrap();
    let (a, b) = hbt_split(&s, 0.5, 1.0, 0.0, 77).unwrap();
    assert!(a.len() > 10_000, "need several chunks, got {}", a.len());
    let h = g2_histogram(&a, &b, 128e-12, 2e-9).unwrap();
    assert_eq!(h.raw, brute_force_counts(&a, &b, 128e-12, 2e-9));
}

#[test]
fn ideal_emitter_antibunches_at_zero_delay() {
    // No background, recovery time much longer than a bin: the center bin
    // sits near zero.
    let spec = EmitterSpec {
        pump_rate: 2e8,
        lifetime: 2.5e-9,
        background_rate: 0.0,
        duration: 2.5e-3,
        seed: 42,
    };
    let s = simulate_emitter(&spec).unwrap();
    let (a, b) = hbt_split(&s, 0.5, 1.0, 0.0, 43).unwrap();
    let h = g2_histogram(&a, &b, 128e-12, 3.2e-8).unwrap();
    assert!(
        h.g_at_zero() < 0.05,
        "center bin g(0) = {}",
        h.g_at_zero()
    );
    let fit = fit_g2(&h).unwrap();
    assert!(fit.g2_0 < 0.05);
}

#[test]
fn streams_histograms_and_fits_are_bit_identical_across_reruns() {
    let spec = emitter(99, 4e-4, 0.9);
    let one = simulate_emitter(&spec).unwrap();
    let two = simulate_emitter(&spec).unwrap();
    assert_eq!(one, two);
    assert_eq!(one.to_binary(), two.to_binary());

    let (a1, b1) = hbt_split(&one, 0.5, 0.8, 1e3, 5).unwrap();
    let (a2, b2) = hbt_split(&two, 0.5, 0.8, 1e3, 5).unwrap();
    assert_eq!(a1, a2);
    assert_eq!(b1, b2);

    let h1 = g2_histogram(&a1, &b1, 128e-12, 3.2e-8).unwrap();
    let h2 = g2_histogram(&a2, &b2, 128e-12, 3.2e-8).unwrap();
    assert_eq!(h1, h2);

    let f1 = fit_g2(&h1).unwrap();
    let f2 = fit_g2(&h2).unwrap();
    assert_eq!(serde_json::to_string(&f1).unwrap(), serde_json::to_string(&f2).unwrap());
}
