//! Click-stream generation: the renewal-process emitter, the beamsplitter
//! with imperfect detectors, and optional detector timing jitter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp, Normal};

use super::{ClickStream, EmitterSpec, PhotonStatsError};

/// Independent generator lanes carved out of one seed, so each random
/// sub-process consumes its own counter stream.
fn lane(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw a homogeneous Poisson process on [0, duration) by exponential
/// increments. Zero rate yields no events.
fn poisson_times(rng: &mut ChaCha12Rng, rate: f64, duration: f64) -> Vec<f64> {
    let mut times = Vec::new();
    if rate <= 0.0 {
        return times;
    }
    let exp = Exp::new(rate).expect("positive rate");
    let mut t = exp.sample(rng);
    while t < duration {
        times.push(t);
        t += exp.sample(rng);
    }
    times
}

/// Merge-sort already generated event lists into one strictly increasing
/// stream; exact ties (measure zero, but possible after jitter) collapse to
/// a single click, as they would in a real detector.
fn merge_sorted(mut times: Vec<f64>) -> Vec<f64> {
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

/// Simulate the emitter: a renewal process whose intervals are an
/// Exp(pump_rate) re-excitation wait plus an Exp(1/τ₀) radiative decay,
/// merged with an independent homogeneous Poisson background. Deterministic
/// given `spec.seed`.
pub fn simulate_emitter(spec: &EmitterSpec) -> Result<ClickStream, PhotonStatsError> {
    spec.validate()?;
    let mut events = Vec::new();

    if spec.pump_rate > 0.0 {
        let mut rng = lane(spec.seed, 0);
        let excite = Exp::new(spec.pump_rate).expect("positive pump rate");
        let decay = Exp::new(1.0 / spec.lifetime).expect("positive decay rate");
        let mut t = 0.0;
        loop {
            t += excite.sample(&mut rng) + decay.sample(&mut rng);
            if t >= spec.duration {
                break;
            }
            events.push(t);
        }
    }

    let mut bg_rng = lane(spec.seed, 1);
    events.extend(poisson_times(&mut bg_rng, spec.background_rate, spec.duration));

    let stream = ClickStream {
        timestamps: merge_sorted(events),
        duration: spec.duration,
        det_eff: 1.0,
        dark_rate: 0.0,
    };
    stream.check()?;
    Ok(stream)
}

/// Split a stream on a beamsplitter and detect both outputs: each photon is
/// routed to arm A with probability `split` (exclusively — no timestamp
/// appears in both arms), each detector keeps a click with probability
/// `det_eff` and adds its own Poissonian dark counts. Streams come back
/// re-sorted. Deterministic given `seed`.
pub fn hbt_split(
    stream: &ClickStream,
    split: f64,
    det_eff: f64,
    dark_rate: f64,
    seed: u64,
) -> Result<(ClickStream, ClickStream), PhotonStatsError> {
    if !(0.0..=1.0).contains(&split) {
        return Err(PhotonStatsError::Invalid(
            "split ratio must lie in [0, 1]".into(),
        ));
    }
    if !(0.0..=1.0).contains(&det_eff) {
        return Err(PhotonStatsError::Invalid(
            "detector efficiency must lie in [0, 1]".into(),
        ));
    }
    if !(dark_rate >= 0.0) || !dark_rate.is_finite() {
        return Err(PhotonStatsError::Invalid(
            "dark rate must be finite and >= 0".into(),
        ));
    }
    stream.check()?;

    let mut route_rng = lane(seed, 0);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &t in &stream.timestamps {
        // Two draws per photon regardless of outcome keeps the consumption
        // pattern independent of the parameters.
        let to_a = route_rng.gen::<f64>() < split;
        let kept = route_rng.gen::<f64>() < det_eff;
        if kept {
            if to_a { &mut a } else { &mut b }.push(t);
        }
    }

    let mut dark_rng = lane(seed, 1);
    a.extend(poisson_times(&mut dark_rng, dark_rate, stream.duration));
    b.extend(poisson_times(&mut dark_rng, dark_rate, stream.duration));

    let wrap = |times: Vec<f64>| ClickStream {
        timestamps: merge_sorted(times),
        duration: stream.duration,
        det_eff,
        dark_rate,
    };
    let (a, b) = (wrap(a), wrap(b));
    a.check()?;
    b.check()?;
    Ok((a, b))
}

/// Add Gaussian timing jitter of standard deviation `sigma` to every click
/// (clamped to the observation window), re-sorting afterwards. Off by
/// default in the pipeline; a sensitivity knob, not part of the baseline
/// model.
pub fn with_jitter(
    stream: &ClickStream,
    sigma: f64,
    seed: u64,
) -> Result<ClickStream, PhotonStatsError> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(PhotonStatsError::Invalid(
            "jitter sigma must be finite and >= 0".into(),
        ));
    }
    if sigma == 0.0 {
        return Ok(stream.clone());
    }
    let mut rng = lane(seed, 0);
    let noise = Normal::new(0.0, sigma).expect("valid sigma");
    let eps = stream.duration * 1e-15;
    let jittered = stream
        .timestamps
        .iter()
        .map(|&t| (t + noise.sample(&mut rng)).clamp(0.0, stream.duration - eps))
        .collect();
    let out = ClickStream {
        timestamps: merge_sorted(jittered),
        duration: stream.duration,
        det_eff: stream.det_eff,
        dark_rate: stream.dark_rate,
    };
    out.check()?;
    Ok(out)
}
