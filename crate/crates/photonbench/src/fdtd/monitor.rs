//! Frequency-domain line monitors, Poynting flux, and mode expansion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::modesolver::{Mode, Polarization};

use super::kernel::Fields;
use super::FdtdError;

/// Orientation and placement of a line monitor in grid indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineSpan {
    /// Vertical line x = i·dx, covering `len` samples from j0.
    Vertical { i: usize, j0: usize, len: usize },
    /// Horizontal line y = j·dy, covering `len` samples from i0.
    Horizontal { j: usize, i0: usize, len: usize },
}

impl LineSpan {
    pub fn len(&self) -> usize {
        match self {
            LineSpan::Vertical { len, .. } | LineSpan::Horizontal { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A DFT line monitor: accumulates complex E and H spectra along a grid line
/// at a list of frequencies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineMonitor {
    pub name: String,
    pub span: LineSpan,
    pub freqs: Vec<f64>,
}

impl LineMonitor {
    pub fn new(name: &str, span: LineSpan, freqs: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            span,
            freqs,
        }
    }
}

/// Accumulated spectra of one monitor. `e[fi][k]` and `h[fi][k]` hold the
/// tangential E and (spatially averaged, normalized) H̃ at frequency index
/// `fi` and line sample `k`. The Poynting convention per polarization:
/// TE vertical Sx = -½Re(Êz·H̃ŷ*), TE horizontal Sy = +½Re(Êz·H̃x̂*),
/// TM vertical Sx = +½Re(Êy·H̃ẑ*), TM horizontal Sy = -½Re(Êx·H̃ẑ*).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonitorSpectra {
    pub name: String,
    pub span: LineSpan,
    pub polarization: Polarization,
    pub freqs: Vec<f64>,
    pub e: Vec<Vec<Complex64>>,
    pub h: Vec<Vec<Complex64>>,
    /// Sample spacing along the line (m).
    pub dl: f64,
}

/// Running DFT state for one monitor during a simulation.
pub(super) struct DftAccumulator {
    pub monitor: LineMonitor,
    dl: f64,
    /// Per-frequency phase rotators e^{-i·2πf·dt}.
    rot: Vec<Complex64>,
    /// Current phase at E-sample times t = (n+1)·dt.
    cur_e: Vec<Complex64>,
    /// Current phase at H-sample times t = (n+1/2)·dt.
    cur_h: Vec<Complex64>,
    e: Vec<Vec<Complex64>>,
    h: Vec<Vec<Complex64>>,
}

impl DftAccumulator {
    pub fn new(monitor: LineMonitor, dt: f64, dl: f64) -> Self {
        let n = monitor.span.len();
        let nf = monitor.freqs.len();
        let rot: Vec<Complex64> = monitor
            .freqs
            .iter()
            .map(|f| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * dt))
            .collect();
        let cur_e = rot.clone();
        let cur_h: Vec<Complex64> = monitor
            .freqs
            .iter()
            .map(|f| Complex64::from_polar(1.0, -std::f64::consts::PI * f * dt))
            .collect();
        Self {
            monitor,
            dl,
            rot,
            cur_e,
            cur_h,
            e: vec![vec![Complex64::new(0.0, 0.0); n]; nf],
            h: vec![vec![Complex64::new(0.0, 0.0); n]; nf],
        }
    }

    /// Accumulate one step: E at its integer-step time, H̃ (averaged onto the
    /// E sample positions) at the preceding half-step time.
    pub fn accumulate(&mut self, fields: &Fields) {
        let n = self.monitor.span.len();
        let mut e_line = Vec::with_capacity(n);
        let mut h_line = Vec::with_capacity(n);
        sample_lines(fields, &self.monitor.span, &mut e_line, &mut h_line);
        for fi in 0..self.rot.len() {
            let pe = self.cur_e[fi];
            let ph = self.cur_h[fi];
            let accf_e = &mut self.e[fi];
            let accf_h = &mut self.h[fi];
            for k in 0..n {
                accf_e[k] += pe * e_line[k];
                accf_h[k] += ph * h_line[k];
            }
            self.cur_e[fi] = pe * self.rot[fi];
            self.cur_h[fi] = ph * self.rot[fi];
        }
    }

    pub fn finish(self, dt: f64, polarization: Polarization) -> MonitorSpectra {
        let scale = Complex64::new(dt, 0.0);
        MonitorSpectra {
            name: self.monitor.name,
            span: self.monitor.span,
            polarization,
            freqs: self.monitor.freqs,
            e: self
                .e
                .into_iter()
                .map(|row| row.into_iter().map(|v| v * scale).collect())
                .collect(),
            h: self
                .h
                .into_iter()
                .map(|row| row.into_iter().map(|v| v * scale).collect())
                .collect(),
            dl: self.dl,
        }
    }
}

/// Sample tangential E and spatially averaged H̃ along a line.
/// TE vertical: (Ez[i,j], avg_i H̃y). TE horizontal: (Ez[i,j], avg_j H̃x).
/// TM vertical: (Ey[i,j+1/2], avg_i H̃z). TM horizontal: (Ex[i+1/2,j], avg_j H̃z).
pub(super) fn sample_lines(
    fields: &Fields,
    span: &LineSpan,
    e_out: &mut Vec<f64>,
    h_out: &mut Vec<f64>,
) {
    match (fields.polarization, span) {
        (Polarization::Te, LineSpan::Vertical { i, j0, len }) => {
            for k in 0..*len {
                let j = j0 + k;
                e_out.push(fields.ez[fields.ez_idx(*i, j)]);
                let hl = fields.hy[fields.hy_idx(*i as isize - 1, j)];
                let hr = fields.hy[fields.hy_idx(*i as isize, j)];
                h_out.push(0.5 * (hl + hr));
            }
        }
        (Polarization::Te, LineSpan::Horizontal { j, i0, len }) => {
            for k in 0..*len {
                let i = i0 + k;
                e_out.push(fields.ez[fields.ez_idx(i, *j)]);
                let hd = fields.hx[fields.hx_idx(i, *j as isize - 1)];
                let hu = fields.hx[fields.hx_idx(i, *j as isize)];
                h_out.push(0.5 * (hd + hu));
            }
        }
        (Polarization::Tm, LineSpan::Vertical { i, j0, len }) => {
            for k in 0..*len {
                let j = j0 + k;
                e_out.push(fields.ey[fields.ey_idx(*i, j)]);
                let hl = if *i > 0 {
                    fields.hz[fields.hz_idx(i - 1, j)]
                } else {
                    0.0
                };
                let hr = if *i < fields.nx {
                    fields.hz[fields.hz_idx(*i, j)]
                } else {
                    0.0
                };
                h_out.push(0.5 * (hl + hr));
            }
        }
        (Polarization::Tm, LineSpan::Horizontal { j, i0, len }) => {
            for k in 0..*len {
                let i = i0 + k;
                e_out.push(fields.ex[fields.ex_idx(i, *j)]);
                let hd = if *j > 0 {
                    fields.hz[fields.hz_idx(i, j - 1)]
                } else {
                    0.0
                };
                let hu = if *j < fields.ny {
                    fields.hz[fields.hz_idx(i, *j)]
                } else {
                    0.0
                };
                h_out.push(0.5 * (hd + hu));
            }
        }
    }
}

/// Flux sign convention: positive along the +axis normal of the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FluxDirection {
    Plus,
    Minus,
}

/// Directed time-averaged Poynting flux per frequency, integrated along the
/// monitor line: ½Re(E×H̃*)·c per unit length, in the workbench's
/// ε0-normalized units (consistent with the kernel's energy bookkeeping).
pub fn poynting_flux(spectra: &MonitorSpectra, direction: FluxDirection) -> Vec<f64> {
    let sign_axis = match (spectra.polarization, &spectra.span) {
        (Polarization::Te, LineSpan::Vertical { .. }) => -1.0,
        (Polarization::Te, LineSpan::Horizontal { .. }) => 1.0,
        (Polarization::Tm, LineSpan::Vertical { .. }) => 1.0,
        (Polarization::Tm, LineSpan::Horizontal { .. }) => -1.0,
    };
    let dir = match direction {
        FluxDirection::Plus => 1.0,
        FluxDirection::Minus => -1.0,
    };
    spectra
        .freqs
        .iter()
        .enumerate()
        .map(|(fi, _)| {
            let s: f64 = spectra.e[fi]
                .iter()
                .zip(&spectra.h[fi])
                .map(|(e, h)| (e * h.conj()).re)
                .sum();
            dir * sign_axis * 0.5 * s * spectra.dl * crate::units::C0
        })
        .collect()
}

/// A guided-mode profile resampled onto a monitor line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledMode {
    pub values: Vec<f64>,
    pub n_eff: f64,
    /// Discrete norm Σe²·dl of the sampled profile.
    pub norm: f64,
    pub dl: f64,
}

/// Resample a solver mode onto `len` grid samples spaced `dl`, where
/// `line_start` is the physical coordinate of the first sample and
/// `mode_origin` the physical coordinate of the mode profile's origin.
pub fn sample_mode(
    mode: &Mode,
    line_start: f64,
    dl: f64,
    len: usize,
    mode_origin: f64,
) -> SampledMode {
    let values: Vec<f64> = (0..len)
        .map(|k| mode.profile.sample_at(line_start + k as f64 * dl - mode_origin))
        .collect();
    let norm = values.iter().map(|v| v * v).sum::<f64>() * dl;
    SampledMode {
        values,
        n_eff: mode.n_eff,
        norm,
        dl,
    }
}

/// Forward/backward modal power at each monitor frequency, in the same units
/// as [`poynting_flux`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeAmplitudes {
    pub freqs: Vec<f64>,
    pub forward: Vec<f64>,
    pub backward: Vec<f64>,
}

/// Decompose a vertical-line TE monitor into the forward/backward power
/// carried by one guided mode. The line must span at least 3 decay lengths
/// of the mode (checked via its tail amplitudes).
pub fn mode_amplitudes(
    spectra: &MonitorSpectra,
    mode: &SampledMode,
) -> Result<ModeAmplitudes, FdtdError> {
    if spectra.polarization != Polarization::Te {
        return Err(FdtdError::Unsupported(
            "mode expansion is implemented for TE monitors".into(),
        ));
    }
    if !matches!(spectra.span, LineSpan::Vertical { .. }) {
        return Err(FdtdError::Unsupported(
            "mode expansion needs a vertical monitor line".into(),
        ));
    }
    if mode.values.len() != spectra.span.len() {
        return Err(FdtdError::Validation(
            "mode sampling does not match the monitor line".into(),
        ));
    }
    let peak = mode.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tail = mode.values[0]
        .abs()
        .max(mode.values[mode.values.len() - 1].abs());
    if peak == 0.0 || mode.norm == 0.0 {
        return Err(FdtdError::Validation("mode profile is zero on the line".into()));
    }
    // e^{-3} ≈ 0.0498: both tails must have decayed by 3 decay lengths.
    if tail > 0.05 * peak {
        return Err(FdtdError::MonitorSpanTooShort {
            tail_fraction: tail / peak,
        });
    }

    let n = mode.n_eff;
    let mut forward = Vec::with_capacity(spectra.freqs.len());
    let mut backward = Vec::with_capacity(spectra.freqs.len());
    for fi in 0..spectra.freqs.len() {
        let mut pe = Complex64::new(0.0, 0.0);
        let mut ph = Complex64::new(0.0, 0.0);
        for (k, v) in mode.values.iter().enumerate() {
            pe += spectra.e[fi][k] * v;
            ph += spectra.h[fi][k] * v;
        }
        let pe = pe * mode.dl / mode.norm;
        let ph = ph * mode.dl / mode.norm;
        // Forward (+x) mode carries H̃y = -n_eff·Ez.
        let a = 0.5 * (pe - ph / n);
        let b = 0.5 * (pe + ph / n);
        forward.push(0.5 * n * a.norm_sqr() * mode.norm * crate::units::C0);
        backward.push(0.5 * n * b.norm_sqr() * mode.norm * crate::units::C0);
    }
    Ok(ModeAmplitudes {
        freqs: spectra.freqs.clone(),
        forward,
        backward,
    })
}

/// Forward power of a normalization run, used to turn modal powers into
/// transmission fractions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferencePower {
    pub freqs: Vec<f64>,
    pub forward: Vec<f64>,
}

impl ReferencePower {
    pub fn from_amplitudes(a: &ModeAmplitudes) -> Self {
        Self {
            freqs: a.freqs.clone(),
            forward: a.forward.clone(),
        }
    }
}

/// Forward-propagating power fraction carried in a mode, normalized by a
/// matching reference run. Errors when the normalization run is missing.
pub fn mode_expand(
    spectra: &MonitorSpectra,
    mode: &SampledMode,
    reference: Option<&ReferencePower>,
) -> Result<Vec<f64>, FdtdError> {
    let reference = reference.ok_or(FdtdError::NormalizationMissing)?;
    let amps = mode_amplitudes(spectra, mode)?;
    if reference.freqs.len() != amps.freqs.len()
        || reference
            .freqs
            .iter()
            .zip(&amps.freqs)
            .any(|(a, b)| (a - b).abs() > 1e-6 * a.abs())
    {
        return Err(FdtdError::Validation(
            "reference frequencies do not match the monitor".into(),
        ));
    }
    Ok(amps
        .forward
        .iter()
        .zip(&reference.forward)
        .map(|(p, r)| p / r)
        .collect())
}

/// Time-domain energy tally through a line: Σ c·E×H̃·dl·dt with E averaged
/// across the update straddling each H sample. Positive along +axis.
#[derive(Debug, Clone)]
pub(super) struct FluxTally {
    pub span: LineSpan,
    prev_e: Vec<f64>,
    pub energy: f64,
}

impl FluxTally {
    pub fn new(span: LineSpan) -> Self {
        Self {
            prev_e: vec![0.0; span.len()],
            span,
            energy: 0.0,
        }
    }

    pub fn accumulate(&mut self, fields: &Fields, dl: f64, dt: f64) {
        let sign_axis = match (fields.polarization, &self.span) {
            (Polarization::Te, LineSpan::Vertical { .. }) => -1.0,
            (Polarization::Te, LineSpan::Horizontal { .. }) => 1.0,
            (Polarization::Tm, LineSpan::Vertical { .. }) => 1.0,
            (Polarization::Tm, LineSpan::Horizontal { .. }) => -1.0,
        };
        let n = self.span.len();
        let mut e_line = Vec::with_capacity(n);
        let mut h_line = Vec::with_capacity(n);
        sample_lines(fields, &self.span, &mut e_line, &mut h_line);
        let mut s = 0.0;
        for k in 0..n {
            s += 0.5 * (e_line[k] + self.prev_e[k]) * h_line[k];
        }
        self.energy += sign_axis * s * dl * dt * crate::units::C0;
        self.prev_e = e_line;
    }
}

/// A field snapshot with its JSON sidecar description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub field: String,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub data: Vec<f64>,
}

impl Snapshot {
    pub fn raster_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.data.len() * 8);
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn sidecar_json(&self, polarization: Polarization) -> serde_json::Value {
        serde_json::json!({
            "nx": self.nx,
            "ny": self.ny,
            "dx_m": self.dx,
            "dy_m": self.dy,
            "step": self.step,
            "field": self.field,
            "polarization": polarization.to_string(),
            "dtype": "float64-le",
            "layout": "row-major-x-fastest",
        })
    }
}
