//! Beam-to-strip transfer across the adiabatic width taper: a swept FDTD
//! mode-to-mode efficiency, plus a sliced mode-matching estimate used as an
//! independent cross-check on the swept values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::views::{
    beam_profile, default_scale, envelope_for, lateral_modes, lateral_port, loaded_profile,
    strip_profile, study_device, study_stop, top_view,
};
use super::{ExperimentError, SweepResult};
use crate::fdtd::monitor::{mode_amplitudes, mode_expand, LineMonitor, ReferencePower};
use crate::fdtd::source::Source;
use crate::fdtd::{run, SimulationSpec};
use crate::geometry::DeviceParams;
use crate::modesolver::{mode_overlap, Polarization};
use crate::units::C0;

fn default_lengths() -> Vec<f64> {
    vec![1e-6, 3e-6, 5e-6, 7e-6, 1e-5]
}

/// Config for [`taper_sweep`]: the device template (its own taper length is
/// ignored) and the lengths to sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaperSweepConfig {
    #[serde(default = "study_device")]
    pub device: DeviceParams,
    /// Taper lengths to sweep (m); 0 is the butt joint.
    #[serde(default = "default_lengths")]
    pub lengths: Vec<f64>,
    #[serde(default = "default_scale")]
    pub resolution_scale: f64,
}

impl Default for TaperSweepConfig {
    fn default() -> Self {
        Self {
            device: study_device(),
            lengths: default_lengths(),
            resolution_scale: 1.0,
        }
    }
}

/// Transfer efficiency of the fundamental beam mode into the fundamental
/// strip mode, per taper length. Points are independent jobs executed
/// concurrently and re-assembled by length, so results never depend on
/// scheduling; an unconverged point is flagged, not fatal.
pub fn taper_sweep(config: &TaperSweepConfig) -> Result<SweepResult, ExperimentError> {
    if config.lengths.is_empty() {
        return Err(ExperimentError::Invalid(
            "at least one taper length is required".into(),
        ));
    }
    if config.lengths.iter().any(|&l| !(l.is_finite() && l >= 0.0)) {
        return Err(ExperimentError::Invalid(
            "taper lengths must be finite and non-negative".into(),
        ));
    }
    if !config.lengths.windows(2).all(|w| w[0] < w[1]) {
        return Err(ExperimentError::Invalid(
            "taper lengths must be strictly increasing".into(),
        ));
    }
    if config.device.beam_length < 3e-6 {
        return Err(ExperimentError::Invalid(
            "straight beam section must be at least 3 um to fit the launch ports".into(),
        ));
    }
    if config.device.ln_lead < 1e-6 {
        return Err(ExperimentError::Invalid(
            "strip lead must be at least 1 um to fit the output port".into(),
        ));
    }
    let mut points: Vec<(f64, f64, bool)> = config
        .lengths
        .par_iter()
        .map(|&length| taper_point(config, length).map(|(eff, conv)| (length, eff, conv)))
        .collect::<Result<_, _>>()?;
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    SweepResult::new(
        points.iter().map(|p| p.0).collect(),
        points.iter().map(|p| p.1).collect(),
        points.iter().map(|p| p.2).collect(),
    )
}

/// One sweep point: launch the beam fundamental a sixth of the way down the
/// straight section, measure the launched power at its middle, expand the
/// strip fundamental in the lead, and take the ratio. Normalization comes
/// from the same run, so port calibration cancels between lengths.
fn taper_point(config: &TaperSweepConfig, length: f64) -> Result<(f64, bool), ExperimentError> {
    let mut p = config.device.clone();
    p.taper_length = length;
    p.bragg_count = 0; // the joint alone is under test
    let view = top_view(&p, config.resolution_scale)?;

    let x_src = p.margin + p.beam_length / 6.0;
    let x_in = p.margin + p.beam_length / 2.0;
    let x_out = p.margin + p.beam_length + length + 0.5 * p.ln_lead;

    let beam0 = lateral_modes(&beam_profile(&p)?, p.wavelength)?.remove(0);
    let strip0 = lateral_modes(&strip_profile(&p)?, p.wavelength)?.remove(0);
    let in_port = lateral_port(&view, &beam0, &p);
    let out_port = lateral_port(&view, &strip0, &p);

    let freqs = vec![C0 / p.wavelength];
    let envelope = envelope_for(&freqs);
    let i_src = view.i_of_x(x_src);
    let in_span = view.vertical_line(x_in);
    let out_span = view.vertical_line(x_out);

    let mut spec = SimulationSpec::new(view.map, Polarization::Te);
    spec.sources = vec![Source::line(i_src, 0, in_port.values.clone(), envelope)];
    spec.monitors = vec![
        LineMonitor::new("in", in_span, freqs.clone()),
        LineMonitor::new("out", out_span, freqs),
    ];
    spec.stop = study_stop();
    let result = run(spec)?;

    let in_spectra = result.monitor("in").expect("launch port present");
    let out_spectra = result.monitor("out").expect("output port present");
    let reference = ReferencePower::from_amplitudes(&mode_amplitudes(in_spectra, &in_port)?);
    let expanded = mode_expand(out_spectra, &out_port, Some(&reference))?;
    Ok((expanded[0], result.converged))
}

/// Mode-matching estimate of the taper transfer: cut the taper into
/// `slices` uniform-width sections and chain the power overlaps of the
/// local fundamentals, beam in, bare strip out. The estimate depends only
/// on the cross-section sequence — it is the adiabatic-limit transfer — so
/// it cross-checks the long-taper end of the FDTD sweep.
pub fn taper_cascade_estimate(
    device: &DeviceParams,
    slices: usize,
) -> Result<f64, ExperimentError> {
    if slices == 0 {
        return Err(ExperimentError::Invalid(
            "cascade needs at least one slice".into(),
        ));
    }
    let wl = device.wavelength;
    let mut current = lateral_modes(&beam_profile(device)?, wl)?.remove(0);
    let mut efficiency = 1.0;
    for k in 0..slices {
        let frac = (k as f64 + 0.5) / slices as f64;
        let width = device.beam_width + (device.taper_tip - device.beam_width) * frac;
        let next = lateral_modes(&loaded_profile(device, width)?, wl)?.remove(0);
        efficiency *= mode_overlap(&current, &next)?;
        current = next;
    }
    let strip0 = lateral_modes(&strip_profile(device)?, wl)?.remove(0);
    efficiency *= mode_overlap(&current, &strip0)?;
    Ok(efficiency)
}
