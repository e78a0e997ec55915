//! End-to-end photon-statistics run: emitter → beamsplitter → detectors →
//! coincidence histogram → antibunching fit → single-photon verdict, all
//! from one JSON-serializable config.

use serde::{Deserialize, Serialize};

use super::{
    classify_single_photon, fit_g2, g2_histogram, hbt_split, simulate_emitter, with_jitter,
    Classification, EmitterSpec, G2Fit, G2Histogram, PhotonStatsError, DEFAULT_BIN_WIDTH,
    RNG_ALGORITHM,
};

/// Seed salt separating the beamsplitter/detector randomness from the
/// emitter's; the jitter lanes (when enabled) hang off the same constant.
const SPLIT_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

fn default_split() -> f64 {
    0.5
}

fn default_det_eff() -> f64 {
    1.0
}

fn default_bin_width() -> f64 {
    DEFAULT_BIN_WIDTH
}

fn default_max_tau() -> f64 {
    3.2e-8
}

/// Full-pipeline configuration; every field has a default, so sparse JSON
/// configs fill in the rest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct G2PipelineConfig {
    #[serde(default)]
    pub emitter: EmitterSpec,
    /// Beamsplitter routing probability toward arm A.
    #[serde(default = "default_split")]
    pub split: f64,
    /// Detector efficiency per arm. Thinning preserves the signal fraction;
    /// dark counts dilute it.
    #[serde(default = "default_det_eff")]
    pub det_eff: f64,
    /// Dark-count rate per detector (1/s).
    #[serde(default)]
    pub dark_rate: f64,
    /// Gaussian detector timing jitter σ (s); 0 disables it (the baseline
    /// model fits raw arrival times).
    #[serde(default)]
    pub jitter: f64,
    #[serde(default = "default_bin_width")]
    pub bin_width: f64,
    /// Histogram half-span (s).
    #[serde(default = "default_max_tau")]
    pub max_tau: f64,
}

impl Default for G2PipelineConfig {
    fn default() -> Self {
        Self {
            emitter: EmitterSpec::default(),
            split: default_split(),
            det_eff: default_det_eff(),
            dark_rate: 0.0,
            jitter: 0.0,
            bin_width: default_bin_width(),
            max_tau: default_max_tau(),
        }
    }
}

/// Everything a run produces, JSON-ready: the config echo, the generator
/// identity, per-arm statistics, the histogram, the fit, and the verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct G2PipelineResult {
    pub rng_algorithm: String,
    pub config: G2PipelineConfig,
    /// Signal fraction ρ of the emitter spec (detected ρ equals it when
    /// dark counts are off).
    pub signal_fraction: f64,
    /// Detected events per arm.
    pub events: [usize; 2],
    /// Mean click rate per arm (1/s).
    pub rates: [f64; 2],
    pub histogram: G2Histogram,
    pub fit: G2Fit,
    pub classification: Classification,
}

impl G2PipelineResult {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable result");
        s.push('\n');
        s
    }

    /// Histogram rows; the scalar story lives in the JSON.
    pub fn to_csv(&self) -> String {
        self.histogram.to_csv()
    }
}

/// Run emitter, splitter, histogram, fit, and classification in sequence.
/// Deterministic given the emitter seed; the splitter and jitter lanes are
/// derived from it.
pub fn run_g2_pipeline(config: &G2PipelineConfig) -> Result<G2PipelineResult, PhotonStatsError> {
    if !(config.jitter >= 0.0) || !config.jitter.is_finite() {
        return Err(PhotonStatsError::Invalid(
            "jitter must be finite and >= 0".into(),
        ));
    }
    let stream = simulate_emitter(&config.emitter)?;
    let split_seed = config.emitter.seed ^ SPLIT_SEED_SALT;
    let (mut a, mut b) = hbt_split(
        &stream,
        config.split,
        config.det_eff,
        config.dark_rate,
        split_seed,
    )?;
    if config.jitter > 0.0 {
        a = with_jitter(&a, config.jitter, split_seed.wrapping_add(1))?;
        b = with_jitter(&b, config.jitter, split_seed.wrapping_add(2))?;
    }
    let histogram = g2_histogram(&a, &b, config.bin_width, config.max_tau)?;
    let fit = fit_g2(&histogram)?;
    let classification = classify_single_photon(&fit);
    Ok(G2PipelineResult {
        rng_algorithm: RNG_ALGORITHM.to_string(),
        config: config.clone(),
        signal_fraction: config.emitter.signal_fraction(),
        events: [a.len(), b.len()],
        rates: [a.rate(), b.rate()],
        histogram,
        fit,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quick() -> G2PipelineConfig {
        let mut c = G2PipelineConfig::default();
        c.emitter.duration = 1.5e-3;
        c
    }

    #[test]
    fn sparse_json_fills_every_default() {
        let c: G2PipelineConfig = serde_json::from_str("{}").unwrap();
        let d = G2PipelineConfig::default();
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            serde_json::to_string(&d).unwrap()
        );
        assert_abs_diff_eq!(c.emitter.signal_fraction(), 0.959, epsilon = 1e-12);
    }

    #[test]
    fn pipeline_is_deterministic() {
        let c = quick();
        let r1 = run_g2_pipeline(&c).unwrap();
        let r2 = run_g2_pipeline(&c).unwrap();
        assert_eq!(r1.to_json(), r2.to_json());
        assert_eq!(r1.to_csv(), r2.to_csv());
    }

    #[test]
    fn desk_scale_run_lands_near_the_mixing_prediction() {
        let r = run_g2_pipeline(&quick()).unwrap();
        let rho = r.signal_fraction;
        let predicted = 1.0 - rho * rho;
        assert!(
            (r.fit.g2_0 - predicted).abs() < 0.035,
            "fitted {} vs mixing prediction {}",
            r.fit.g2_0,
            predicted
        );
        assert!(r.classification.single_photon);
        assert!(r.events[0] + r.events[1] > 100_000);
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let mut c = quick();
        c.split = 1.5;
        assert!(run_g2_pipeline(&c).is_err());
        let mut c = quick();
        c.max_tau = 3.0 * c.bin_width;
        assert!(run_g2_pipeline(&c).is_err());
        let mut c = quick();
        c.jitter = -1.0;
        assert!(run_g2_pipeline(&c).is_err());
    }
}
