//! Coincidence histogramming: windowed pair counting between two click
//! streams, normalized so an uncorrelated pair of streams plateaus at 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClickStream, PhotonStatsError};

/// Streams are chunked along the first arm for parallel counting; each pair
/// is owned by exactly one chunk, so the merged counts are bit-identical to
/// a serial pass for any chunk size or thread count.
const CHUNK: usize = 8192;

/// Normalized second-order correlation histogram. Bins are centered on
/// k·bin_width for k ∈ [−K, K], so the edges are symmetric about τ = 0 and
/// the middle bin straddles zero delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G2Histogram {
    /// Bin edges (s), length `raw.len() + 1`.
    pub bin_edges: Vec<f64>,
    /// Integer coincidence counts per bin.
    pub raw: Vec<u64>,
    /// Normalized correlation g(τ) = raw / normalization.
    pub g: Vec<f64>,
    /// Uncorrelated-pair expectation per bin: r_a · r_b · T · bin_width.
    pub normalization: f64,
}

impl G2Histogram {
    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    /// Bin centers (s), one per bin.
    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|e| 0.5 * (e[0] + e[1]))
            .collect()
    }

    /// Index of the bin straddling τ = 0.
    pub fn center_index(&self) -> usize {
        self.raw.len() / 2
    }

    /// Normalized correlation at zero delay (the center bin).
    pub fn g_at_zero(&self) -> f64 {
        self.g[self.center_index()]
    }

    /// Poisson standard error of g in bin `k`.
    pub fn sigma_g(&self, k: usize) -> f64 {
        (self.raw[k] as f64).max(1.0).sqrt() / self.normalization
    }

    /// Rows of (bin center, raw count, g), 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,raw,g2\n");
        for (k, tau) in self.centers().into_iter().enumerate() {
            out.push_str(&format!("{tau:.15e},{},{:.15e}\n", self.raw[k], self.g[k]));
        }
        out
    }
}

/// Count all pairs (t_b − t_a) within ±max_tau into bins of `bin_width` and
/// normalize by the uncorrelated-rate expectation r_a·r_b·T·bin_width, so
/// the long-delay plateau of independent streams sits at 1. Requires a
/// window of at least 10 bins per side.
pub fn g2_histogram(
    a: &ClickStream,
    b: &ClickStream,
    bin_width: f64,
    max_tau: f64,
) -> Result<G2Histogram, PhotonStatsError> {
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(PhotonStatsError::Invalid("bin width must be > 0".into()));
    }
    if !(max_tau >= 10.0 * bin_width) {
        return Err(PhotonStatsError::Invalid(
            "max_tau must cover at least 10 bins".into(),
        ));
    }
    if a.is_empty() || b.is_empty() {
        return Err(PhotonStatsError::EmptyStream);
    }
    a.check()?;
    b.check()?;
    let rel = (a.duration - b.duration).abs() / a.duration.max(b.duration);
    if rel > 1e-12 {
        return Err(PhotonStatsError::Invalid(
            "streams cover different observation windows".into(),
        ));
    }

    let k_max = (max_tau / bin_width).round() as usize;
    let nbins = 2 * k_max + 1;
    let half = (k_max as f64 + 0.5) * bin_width;

    let raw = a
        .timestamps
        .par_chunks(CHUNK)
        .map(|chunk| count_chunk(chunk, &b.timestamps, bin_width, half, k_max, nbins))
        .reduce(
            || vec![0u64; nbins],
            |mut acc, local| {
                for (t, s) in acc.iter_mut().zip(&local) {
                    *t += s;
                }
                acc
            },
        );

    let duration = a.duration;
    let normalization = a.rate() * b.rate() * duration * bin_width;
    let g = raw.iter().map(|&c| c as f64 / normalization).collect();
    let bin_edges = (0..=nbins)
        .map(|m| (m as f64 - (k_max as f64 + 0.5)) * bin_width)
        .collect();

    Ok(G2Histogram {
        bin_edges,
        raw,
        g,
        normalization,
    })
}

/// Two-pointer window scan for one chunk of the first arm. The binning rule
/// (|τ| ≤ half, index round(τ/Δ) + K, out-of-range dropped) is the single
/// source of truth shared with the brute-force oracle in the tests.
fn count_chunk(
    chunk: &[f64],
    b: &[f64],
    bin_width: f64,
    half: f64,
    k_max: usize,
    nbins: usize,
) -> Vec<u64> {
    let mut raw = vec![0u64; nbins];
    let mut lo = b.partition_point(|&t| t < chunk[0] - half);
    let mut hi = lo;
    for &ta in chunk {
        while lo < b.len() && b[lo] < ta - half {
            lo += 1;
        }
        if hi < lo {
            hi = lo;
        }
        while hi < b.len() && b[hi] <= ta + half {
            hi += 1;
        }
        for &tb in &b[lo..hi] {
            let tau = tb - ta;
            let idx = (tau / bin_width).round() as i64 + k_max as i64;
            if (0..nbins as i64).contains(&idx) {
                raw[idx as usize] += 1;
            }
        }
    }
    raw
}
