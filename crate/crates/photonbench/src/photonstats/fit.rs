//! Least-squares fit of the antibunching model
//! g²(τ) = 1 − (1 − g²(0))·exp(−|τ|/τ₀) to a coincidence histogram, as
//! measured — no dark-count subtraction, no deconvolution.

use serde::{Deserialize, Serialize};

use super::{G2Histogram, PhotonStatsError};

const MAX_ITERATIONS: usize = 200;
const RELATIVE_STEP_TOL: f64 = 1e-9;

/// Quality flags a fit can carry; absent for a clean antibunching dip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitFlag {
    /// Fitted g²(0) > 1.5: the model describes a dip, not bunching.
    BunchingInvalidModel,
    /// No statistically significant dip; g²(0) is the plateau mean and τ₀
    /// carries no information (reported as 0).
    DegenerateNoDip,
}

/// Two-parameter antibunching fit. `eval(0)` returns `g2_0` and the model
/// tends to 1 as |τ| → ∞.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct G2Fit {
    /// Zero-delay correlation, clamped to the physical range [0, ∞).
    pub g2_0: f64,
    /// Recovery time of the dip (s).
    pub tau0: f64,
    /// Sum of squared residuals at the solution.
    pub residual: f64,
    /// Covariance estimate of (g2_0, tau0) from the final Jacobian.
    pub covariance: [[f64; 2]; 2],
    pub iterations: usize,
    pub flag: Option<FitFlag>,
}

impl G2Fit {
    /// The fitted model curve.
    pub fn eval(&self, tau: f64) -> f64 {
        if self.tau0 > 0.0 {
            1.0 - (1.0 - self.g2_0) * (-tau.abs() / self.tau0).exp()
        } else {
            self.g2_0
        }
    }

    /// Standard error of the zero-delay value.
    pub fn sigma_g2_0(&self) -> f64 {
        self.covariance[0][0].max(0.0).sqrt()
    }
}

/// Fit the antibunching model to a histogram by damped Gauss–Newton.
/// Initial guesses come from the data itself: g²(0) from the center bin and
/// τ₀ from the first bin whose deviation from the plateau has decayed by
/// 1/e. Iterates until the relative step drops below 1e-9 (at most 200
/// iterations); a histogram with no significant dip short-circuits to a
/// flagged degenerate fit instead.
pub fn fit_g2(h: &G2Histogram) -> Result<G2Fit, PhotonStatsError> {
    let n = h.g.len();
    if n < 20 {
        return Err(PhotonStatsError::UnfittableHistogram(
            "needs at least 20 bins".into(),
        ));
    }
    let centers = h.centers();
    let c = h.center_index();
    let g0_init = h.g[c];

    // Flat input: the dip depth is indistinguishable from shot noise on the
    // center bin, so the two-parameter model is unidentifiable.
    let dip = 1.0 - g0_init;
    if dip.abs() < 3.0 * h.sigma_g(c) {
        return Ok(degenerate_fit(h));
    }

    // First bin (moving outward) whose deviation from 1 has shrunk to 1/e
    // of the center deviation sets the decay-time guess.
    let target = dip.abs() / std::f64::consts::E;
    let tau0_init = centers
        .iter()
        .enumerate()
        .skip(c + 1)
        .find(|(k, _)| (h.g[*k] - 1.0).abs() <= target)
        .map(|(_, &tau)| tau)
        .ok_or_else(|| {
            PhotonStatsError::UnfittableHistogram(
                "the dip never recovers to the plateau inside the window".into(),
            )
        })?;
    let span = *centers.last().expect("nonempty");
    if span <= 5.0 * tau0_init {
        return Err(PhotonStatsError::UnfittableHistogram(
            "window shorter than five initial decay times; no plateau region".into(),
        ));
    }

    let mut g0 = g0_init.max(0.0);
    let mut tau0 = tau0_init;
    let mut cost = sum_sq(h, &centers, g0, tau0);

    for iteration in 1..=MAX_ITERATIONS {
        // Normal equations from the analytic Jacobian.
        let (mut a11, mut a12, mut a22) = (0.0, 0.0, 0.0);
        let (mut b1, mut b2) = (0.0, 0.0);
        for (k, &tau) in centers.iter().enumerate() {
            let e = (-tau.abs() / tau0).exp();
            let r = 1.0 - (1.0 - g0) * e - h.g[k];
            let jg = e;
            let jt = -(1.0 - g0) * e * tau.abs() / (tau0 * tau0);
            a11 += jg * jg;
            a12 += jg * jt;
            a22 += jt * jt;
            b1 -= jg * r;
            b2 -= jt * r;
        }
        let det = a11 * a22 - a12 * a12;
        if det.abs() < 1e-300 {
            return Err(PhotonStatsError::FitDidNotConverge {
                iterations: iteration,
                g2_0: g0,
                tau0,
                residual: cost,
            });
        }
        let dg = (a22 * b1 - a12 * b2) / det;
        let dt = (a11 * b2 - a12 * b1) / det;

        // Damp the step: keep tau0 positive, then halve until the cost
        // improves.
        let mut alpha = 1.0;
        while tau0 + alpha * dt <= 0.0 {
            alpha *= 0.5;
        }
        let mut improved = false;
        while alpha >= 1e-6 {
            let trial = sum_sq(h, &centers, g0 + alpha * dg, tau0 + alpha * dt);
            if trial < cost {
                g0 += alpha * dg;
                tau0 += alpha * dt;
                cost = trial;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        let step = (alpha * dg).hypot(alpha * dt) / g0.hypot(tau0).max(1e-30);
        if step < RELATIVE_STEP_TOL {
            return Ok(finish(g0, tau0, cost, [[a11, a12], [a12, a22]], iteration, n));
        }
        if !improved {
            return Err(PhotonStatsError::FitDidNotConverge {
                iterations: iteration,
                g2_0: g0,
                tau0,
                residual: cost,
            });
        }
    }
    Err(PhotonStatsError::FitDidNotConverge {
        iterations: MAX_ITERATIONS,
        g2_0: g0,
        tau0,
        residual: cost,
    })
}

fn sum_sq(h: &G2Histogram, centers: &[f64], g0: f64, tau0: f64) -> f64 {
    centers
        .iter()
        .enumerate()
        .map(|(k, &tau)| {
            let r = 1.0 - (1.0 - g0) * (-tau.abs() / tau0).exp() - h.g[k];
            r * r
        })
        .sum()
}

fn finish(
    g0: f64,
    tau0: f64,
    cost: f64,
    a: [[f64; 2]; 2],
    iterations: usize,
    n: usize,
) -> G2Fit {
    // Covariance = s² (JᵀJ)⁻¹ with the residual variance estimate
    // s² = SSR / (n − 2).
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let s2 = cost / (n as f64 - 2.0);
    let covariance = if det.abs() > 1e-300 {
        [
            [s2 * a[1][1] / det, -s2 * a[0][1] / det],
            [-s2 * a[1][0] / det, s2 * a[0][0] / det],
        ]
    } else {
        [[f64::INFINITY, 0.0], [0.0, f64::INFINITY]]
    };
    let flag = (g0 > 1.5).then_some(FitFlag::BunchingInvalidModel);
    G2Fit {
        g2_0: g0.max(0.0),
        tau0,
        residual: cost,
        covariance,
        iterations,
        flag,
    }
}

/// Fit for a histogram with no significant dip: g²(0) is the plateau mean
/// with its standard error, τ₀ is unidentifiable and reported as 0.
fn degenerate_fit(h: &G2Histogram) -> G2Fit {
    let n = h.g.len() as f64;
    let mean = h.g.iter().sum::<f64>() / n;
    let ssr = h.g.iter().map(|&g| (g - mean) * (g - mean)).sum::<f64>();
    let sem2 = if n > 1.0 { ssr / ((n - 1.0) * n) } else { 0.0 };
    G2Fit {
        g2_0: mean.max(0.0),
        tau0: 0.0,
        residual: ssr,
        covariance: [[sem2, 0.0], [0.0, 0.0]],
        iterations: 0,
        flag: Some(FitFlag::DegenerateNoDip),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonstats::classify_single_photon;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Noiseless histogram sampled from the model itself, with raw counts
    /// large enough that shot noise on the center bin is negligible.
    fn synthetic(g0: f64, tau0: f64, bin_width: f64, k_max: usize) -> G2Histogram {
        let nbins = 2 * k_max + 1;
        let norm = 1e16;
        let bin_edges: Vec<f64> = (0..=nbins)
            .map(|m| (m as f64 - (k_max as f64 + 0.5)) * bin_width)
            .collect();
        let centers: Vec<f64> = bin_edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect();
        let g: Vec<f64> = centers
            .iter()
            .map(|&tau| 1.0 - (1.0 - g0) * (-tau.abs() / tau0).exp())
            .collect();
        let raw = g.iter().map(|&v| (v * norm).round() as u64).collect();
        G2Histogram {
            bin_edges,
            raw,
            g,
            normalization: norm,
        }
    }

    #[test]
    fn recovers_a_deep_dip_to_1e6() {
        let h = synthetic(0.08, 1e-9, 128e-12, 100);
        let fit = fit_g2(&h).unwrap();
        assert_abs_diff_eq!(fit.g2_0, 0.08, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.tau0, 1e-9, epsilon = 1e-15);
        assert!(fit.flag.is_none());
        assert!(fit.residual < 1e-12);
        // The curve itself honors the boundary conditions.
        assert_abs_diff_eq!(fit.eval(0.0), fit.g2_0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.eval(1e-3), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn flat_histogram_is_flagged_degenerate() {
        let mut h = synthetic(1.0, 1e-9, 128e-12, 60);
        h.g.iter_mut().for_each(|g| *g = 1.0);
        let fit = fit_g2(&h).unwrap();
        assert_eq!(fit.flag, Some(FitFlag::DegenerateNoDip));
        assert_abs_diff_eq!(fit.g2_0, 1.0, epsilon = 1e-12);
        assert_eq!(fit.tau0, 0.0);
        assert!(!classify_single_photon(&fit).single_photon);
    }

    #[test]
    fn bunching_is_flagged() {
        let h = synthetic(2.0, 1e-9, 128e-12, 100);
        let fit = fit_g2(&h).unwrap();
        assert_eq!(fit.flag, Some(FitFlag::BunchingInvalidModel));
        assert!(fit.g2_0 > 1.5);
    }

    #[test]
    fn short_windows_are_rejected() {
        // 15 bins: below the 20-bin floor.
        let h = synthetic(0.1, 1e-9, 128e-12, 7);
        assert!(matches!(
            fit_g2(&h),
            Err(PhotonStatsError::UnfittableHistogram(_))
        ));
        // Wide bins relative to the window: no plateau past five decay
        // times.
        let h = synthetic(0.1, 2e-9, 128e-12, 35);
        assert!(fit_g2(&h).is_err());
    }

    #[test]
    fn classification_thresholds_are_strict() {
        for (g0, expect) in [(0.08, true), (0.36, true), (0.5, false)] {
            let h = synthetic(g0, 1e-9, 128e-12, 100);
            let fit = fit_g2(&h).unwrap();
            let verdict = classify_single_photon(&fit);
            assert_eq!(verdict.single_photon, expect, "g2_0 = {g0}");
            assert_abs_diff_eq!(verdict.margin, 0.5 - g0, epsilon = 1e-6);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn round_trips_its_own_model(g0 in 0.0..1.0f64, tau0 in 2e-10..2e-9f64) {
            let h = synthetic(g0, tau0, 128e-12, 100);
            let fit = fit_g2(&h).unwrap();
            prop_assert!((fit.g2_0 - g0).abs() < 1e-6, "g2_0 {} vs {}", fit.g2_0, g0);
            // tau0 is only identifiable while a dip exists at all.
            if 1.0 - g0 > 1e-3 {
                prop_assert!(
                    ((fit.tau0 - tau0) / tau0).abs() < 1e-6,
                    "tau0 {} vs {}",
                    fit.tau0,
                    tau0
                );
            }
        }
    }
}
