//! Reflection and transmission spectrum of the hole-array mirror, measured
//! by feeding the fundamental beam mode at a straight section and reading
//! directional mode amplitudes on either side of the array. Normalization
//! comes from the forward amplitude at the upstream port of the same run,
//! so no separate calibration run is needed.
//!
//! The bench is the free-standing beam (air cladding on every side), the
//! environment the mirror is patterned in: there the hole-loaded Bragg
//! condition sits in the telecom band and scattered light has no slab to
//! tunnel through, so ten periods reflect strongly. On the assembled
//! device the niobate under and beside the beam drags the stopband out of
//! band and shorts the holes — the plan-view mirror only works suspended.

use serde::{Deserialize, Serialize};

use super::views::{
    check_wavelengths, default_scale, envelope_for, frequencies_of, lateral_modes,
    membrane_profile, membrane_view, port_at, study_device, study_stop, wavelength_grid,
};
use super::ExperimentError;
use crate::fdtd::monitor::{mode_amplitudes, LineMonitor};
use crate::fdtd::source::Source;
use crate::fdtd::{run, SimulationSpec};
use crate::geometry::DeviceParams;
use crate::modesolver::Polarization;

/// Straight guide on each side of the mirror (m): room for the source, the
/// ports, and 2 um of standoff around the array.
const LEAD: f64 = 4.0e-6;
/// Port standoff from the mirror ends (m).
const STANDOFF: f64 = 2.0e-6;

fn default_band() -> Vec<f64> {
    wavelength_grid(1.2e-6, 1.4e-6, 15)
}

/// Config for [`bragg_spectrum`]: the mirror is taken from the device
/// template's `bragg_*` fields; `count = 0` measures the bare guide.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BraggConfig {
    #[serde(default = "study_device")]
    pub device: DeviceParams,
    #[serde(default = "default_band")]
    pub wavelengths: Vec<f64>,
    #[serde(default = "default_scale")]
    pub resolution_scale: f64,
}

impl Default for BraggConfig {
    fn default() -> Self {
        Self {
            device: study_device(),
            wavelengths: default_band(),
            resolution_scale: 1.0,
        }
    }
}

/// Mirror spectrum: per-wavelength power reflectance and transmittance of
/// the fundamental mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BraggSpectrum {
    pub wavelengths: Vec<f64>,
    pub reflectance: Vec<f64>,
    pub transmittance: Vec<f64>,
    pub converged: bool,
}

impl BraggSpectrum {
    /// Reflectance at the sampled wavelength nearest to `wavelength`.
    pub fn reflectance_near(&self, wavelength: f64) -> f64 {
        let k = self
            .wavelengths
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - wavelength)
                    .abs()
                    .total_cmp(&(b.1 - wavelength).abs())
            })
            .map(|(k, _)| k)
            .expect("nonempty spectrum");
        self.reflectance[k]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("wavelength,reflectance,transmittance\n");
        for k in 0..self.wavelengths.len() {
            out.push_str(&format!(
                "{:.15e},{:.15e},{:.15e}\n",
                self.wavelengths[k], self.reflectance[k], self.transmittance[k]
            ));
        }
        out
    }
}

/// Feed the beam fundamental through the hole array and split the response
/// into modal R and T. The backward amplitude at the upstream port is the
/// reflection; the forward amplitude at the downstream port over the
/// upstream forward amplitude is the transmission.
pub fn bragg_spectrum(config: &BraggConfig) -> Result<BraggSpectrum, ExperimentError> {
    check_wavelengths(&config.wavelengths)?;
    let p = config.device.clone();
    if p.bragg_count > 0 && 2.0 * p.bragg_radius >= p.beam_width {
        return Err(ExperimentError::Invalid(
            "mirror holes must be narrower than the beam".into(),
        ));
    }

    let mirror_len = p.bragg_count as f64 * p.bragg_period;
    let length = 2.0 * LEAD + mirror_len;
    let x_mirror = LEAD;
    let x_src = 0.7e-6;
    let x_in = x_mirror - STANDOFF;
    let x_out = x_mirror + mirror_len + STANDOFF;

    let view = membrane_view(&p, length, Some(x_mirror), config.resolution_scale)?;
    let beam0 = lateral_modes(&membrane_profile(&p)?, p.wavelength)?.remove(0);
    let port = port_at(&view, &beam0, -0.5 * p.beam_width);

    let freqs = frequencies_of(&config.wavelengths);
    let envelope = envelope_for(&freqs);
    let i_src = view.i_of_x(x_src);
    let in_span = view.vertical_line(x_in);
    let out_span = view.vertical_line(x_out);

    let mut spec = SimulationSpec::new(view.map, Polarization::Te);
    spec.sources = vec![Source::line(i_src, 0, port.values.clone(), envelope)];
    spec.monitors = vec![
        LineMonitor::new("in", in_span, freqs.clone()),
        LineMonitor::new("out", out_span, freqs),
    ];
    spec.stop = study_stop();
    let result = run(spec)?;

    let in_amps = mode_amplitudes(result.monitor("in").expect("upstream port"), &port)?;
    let out_amps = mode_amplitudes(result.monitor("out").expect("downstream port"), &port)?;

    let n = config.wavelengths.len();
    let mut reflectance = Vec::with_capacity(n);
    let mut transmittance = Vec::with_capacity(n);
    for k in 0..n {
        let fed = in_amps.forward[k];
        if !(fed > 0.0) {
            return Err(ExperimentError::Invalid(
                "no forward power at the upstream port".into(),
            ));
        }
        reflectance.push(in_amps.backward[k] / fed);
        transmittance.push(out_amps.forward[k] / fed);
    }
    Ok(BraggSpectrum {
        wavelengths: config.wavelengths.clone(),
        reflectance,
        transmittance,
        converged: result.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oversized_holes_are_rejected() {
        let mut c = BraggConfig::default();
        c.device.bragg_radius = 0.3e-6; // diameter exceeds the 0.5 um beam
        assert!(bragg_spectrum(&c).is_err());
    }

    #[test]
    fn band_must_be_increasing() {
        let mut c = BraggConfig::default();
        c.wavelengths = vec![1.4e-6, 1.2e-6];
        assert!(bragg_spectrum(&c).is_err());
    }

    #[test]
    fn default_band_brackets_the_design_wavelength() {
        let c = BraggConfig::default();
        assert!(c.wavelengths.first().unwrap() < &1.3e-6);
        assert!(c.wavelengths.last().unwrap() > &1.3e-6);
        assert!(c
            .wavelengths
            .iter()
            .any(|&w| (w - 1.3e-6).abs() < 1e-12));
    }
}
