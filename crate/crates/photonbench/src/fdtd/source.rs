//! Time envelopes and source descriptions for the FDTD engine.

use serde::{Deserialize, Serialize};

/// Temporal excitation waveform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Envelope {
    /// Sine-modulated Gaussian pulse. `fwhm_freq` is the FWHM of the
    /// amplitude spectrum.
    Gaussian { center_freq: f64, fwhm_freq: f64 },
    /// Continuous wave with a sin^2 turn-on over `ramp_cycles` optical
    /// cycles.
    CwRamp { freq: f64, ramp_cycles: f64 },
}

/// Start-time offset and switch-off point of the Gaussian pulse, in units
/// of its temporal sigma.
const GAUSS_OFFSET_SIGMAS: f64 = 4.5;

impl Envelope {
    pub fn center_freq(&self) -> f64 {
        match self {
            Envelope::Gaussian { center_freq, .. } => *center_freq,
            Envelope::CwRamp { freq, .. } => *freq,
        }
    }

    /// Frequency band the source meaningfully excites; monitors must stay
    /// inside it.
    pub fn band(&self) -> (f64, f64) {
        match self {
            Envelope::Gaussian {
                center_freq,
                fwhm_freq,
            } => (
                center_freq - 1.5 * fwhm_freq,
                center_freq + 1.5 * fwhm_freq,
            ),
            Envelope::CwRamp { freq, .. } => (freq * (1.0 - 1e-9), freq * (1.0 + 1e-9)),
        }
    }

    fn sigma_t(&self) -> f64 {
        match self {
            Envelope::Gaussian { fwhm_freq, .. } => {
                let sigma_f = fwhm_freq / (8.0 * 2f64.ln()).sqrt();
                1.0 / (2.0 * std::f64::consts::PI * sigma_f)
            }
            Envelope::CwRamp { .. } => 0.0,
        }
    }

    /// Time after which the source is negligible (infinite for CW).
    pub fn active_until(&self) -> f64 {
        match self {
            Envelope::Gaussian { .. } => 2.0 * GAUSS_OFFSET_SIGMAS * self.sigma_t(),
            Envelope::CwRamp { .. } => f64::INFINITY,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Envelope::Gaussian { center_freq, .. } => {
                let st = self.sigma_t();
                let tc = t - GAUSS_OFFSET_SIGMAS * st;
                (-0.5 * (tc / st).powi(2)).exp()
                    * (2.0 * std::f64::consts::PI * center_freq * tc).sin()
            }
            Envelope::CwRamp { freq, ramp_cycles } => {
                let t_ramp = ramp_cycles / freq;
                let ramp = if t < t_ramp {
                    let s = (std::f64::consts::FRAC_PI_2 * t / t_ramp).sin();
                    s * s
                } else {
                    1.0
                };
                ramp * (2.0 * std::f64::consts::PI * freq * t).sin()
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            Envelope::Gaussian {
                center_freq,
                fwhm_freq,
            } => {
                if *center_freq <= 0.0 || *fwhm_freq <= 0.0 {
                    return Err("gaussian envelope needs positive frequencies".into());
                }
                if *fwhm_freq >= *center_freq {
                    return Err("gaussian bandwidth must be below the carrier".into());
                }
            }
            Envelope::CwRamp { freq, ramp_cycles } => {
                if *freq <= 0.0 || *ramp_cycles <= 0.0 {
                    return Err("cw envelope needs positive frequency and ramp".into());
                }
            }
        }
        Ok(())
    }
}

/// Dipole orientation; Z is the out-of-plane component (TE), X/Y the
/// in-plane components (TM).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SourceKind {
    /// Soft point source at grid node (i, j).
    PointDipole {
        i: usize,
        j: usize,
        orientation: Orientation,
    },
    /// Soft line source on the vertical node line x = i·dx, spanning
    /// `len` nodes from j0, weighted by `profile` (a sampled mode field or
    /// uniform weights for a plane wave).
    ModeLine {
        i: usize,
        j0: usize,
        profile: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Source {
    pub kind: SourceKind,
    pub envelope: Envelope,
    pub amplitude: f64,
}

impl Source {
    pub fn point(i: usize, j: usize, orientation: Orientation, envelope: Envelope) -> Self {
        Self {
            kind: SourceKind::PointDipole { i, j, orientation },
            envelope,
            amplitude: 1.0,
        }
    }

    pub fn line(i: usize, j0: usize, profile: Vec<f64>, envelope: Envelope) -> Self {
        Self {
            kind: SourceKind::ModeLine { i, j0, profile },
            envelope,
            amplitude: 1.0,
        }
    }
}
