//! Shared scaffolding for the studies: effective-index device views,
//! grid coordinate bookkeeping, lateral port modes, and source envelopes.
//!
//! Plan views collapse the layer stack to its column-wise effective
//! indices; the grating study instead slices the device vertically and
//! keeps the raw material indices. Both reuse the same [`View`] wrapper so
//! the studies speak physical coordinates, not grid indices.

use super::ExperimentError;
use crate::fdtd::monitor::{sample_mode, LineSpan, SampledMode};
use crate::fdtd::source::Envelope;
use crate::fdtd::StopCondition;
use crate::geometry::{
    build_paper_device, rasterize, DeviceGeometry, DeviceParams, PermittivityMap, Shape,
    ShapeKind,
};
use crate::modesolver::{solve_slab_modes, Layer, Mode, Polarization, SlabProfile};
use crate::units::C0;

/// Spatial sampling of the shortest material wavelength in a view.
pub(crate) const CELLS_PER_WAVELENGTH: f64 = 25.0;
/// Safety factor over the rasterizer's 10-cells-per-feature floor.
const FEATURE_CELLS: f64 = 10.5;

/// Grid density (cells per meter) for a view: enough cells per material
/// wavelength for dispersion control and enough across the smallest
/// feature for faithful rasterization, times a user refinement factor.
pub(crate) fn grid_resolution(
    wavelength: f64,
    n_max: f64,
    smallest_feature: f64,
    scale: f64,
) -> Result<f64, ExperimentError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(ExperimentError::Invalid(
            "resolution_scale must be positive and finite".into(),
        ));
    }
    let by_wavelength = CELLS_PER_WAVELENGTH * n_max / wavelength;
    let by_feature = FEATURE_CELLS / smallest_feature;
    Ok(by_wavelength.max(by_feature) * scale)
}

/// A rasterized view plus the physical coordinates of its grid origin.
pub(crate) struct View {
    pub map: PermittivityMap,
    pub x_min: f64,
    pub y_min: f64,
}

impl View {
    pub fn build(geom: &DeviceGeometry, resolution: f64) -> Result<Self, ExperimentError> {
        Ok(Self {
            map: rasterize(geom, resolution)?,
            x_min: geom.bounds.x_min,
            y_min: geom.bounds.y_min,
        })
    }

    /// Node column nearest to physical x.
    pub fn i_of_x(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.map.dx).round();
        (i.max(0.0) as usize).min(self.map.nx)
    }

    /// Node row nearest to physical y.
    pub fn j_of_y(&self, y: f64) -> usize {
        let j = ((y - self.y_min) / self.map.dy).round();
        (j.max(0.0) as usize).min(self.map.ny)
    }

    /// Full-height vertical node line at x.
    pub fn vertical_line(&self, x: f64) -> LineSpan {
        LineSpan::Vertical {
            i: self.i_of_x(x),
            j0: 0,
            len: self.map.ny + 1,
        }
    }

    /// Vertical node segment at x covering y0..y1.
    pub fn vertical_segment(&self, x: f64, y0: f64, y1: f64) -> LineSpan {
        let j0 = self.j_of_y(y0);
        LineSpan::Vertical {
            i: self.i_of_x(x),
            j0,
            len: self.j_of_y(y1) - j0 + 1,
        }
    }

    /// Horizontal node segment at y covering x0..x1.
    pub fn horizontal_segment(&self, y: f64, x0: f64, x1: f64) -> LineSpan {
        let i0 = self.i_of_x(x0);
        LineSpan::Horizontal {
            j: self.j_of_y(y),
            i0,
            len: self.i_of_x(x1) - i0 + 1,
        }
    }
}

/// Plan view of the full device at its column effective indices.
pub(crate) fn top_view(params: &DeviceParams, scale: f64) -> Result<View, ExperimentError> {
    let geom = build_paper_device(params)?;
    let em = params
        .stack
        .effective_materials(params.wavelength, Polarization::Te)?;
    let res = grid_resolution(
        params.wavelength,
        em.hybrid.refractive_index,
        geom.smallest_feature(),
        scale,
    )?;
    View::build(&geom, res)
}

/// Plan view of an endless straight beam on its strip: no taper and no
/// bare lead, optionally a centered hole array starting at `mirror_at`.
/// Studies that need translation-invariant ports around one local feature
/// build on this. The half-height is the strip half-width plus the margin,
/// raised to `min_half_height` when a study needs extra clearance.
pub(crate) fn straight_view(
    params: &DeviceParams,
    length: f64,
    mirror_at: Option<f64>,
    min_half_height: f64,
    scale: f64,
) -> Result<View, ExperimentError> {
    let em = params
        .stack
        .effective_materials(params.wavelength, Polarization::Te)?;
    let half_h = (0.5 * params.ln_width.max(params.beam_width) + params.margin)
        .max(min_half_height);
    let mut shapes = Vec::new();
    if params.ln_width > 0.0 {
        shapes.push(Shape::rectangle(
            0.0,
            -0.5 * params.ln_width,
            length,
            params.ln_width,
            em.ridge.clone(),
        ));
    }
    if params.beam_width > 0.0 {
        shapes.push(Shape::rectangle(
            0.0,
            -0.5 * params.beam_width,
            length,
            params.beam_width,
            em.hybrid.clone(),
        ));
    }
    if let Some(x0) = mirror_at {
        if params.bragg_count > 0 {
            if 2.0 * params.bragg_radius >= params.beam_width {
                return Err(ExperimentError::Invalid(
                    "mirror holes must be narrower than the beam".into(),
                ));
            }
            let mirror_len = params.bragg_count as f64 * params.bragg_period;
            if x0 < params.margin || x0 + mirror_len > length - params.margin {
                return Err(ExperimentError::Invalid(
                    "mirror does not fit inside the straight section".into(),
                ));
            }
            // Holes are open perforations, same as in the assembled device.
            shapes.push(Shape {
                kind: ShapeKind::HoleArray {
                    period: params.bragg_period,
                    radius: params.bragg_radius,
                    count: params.bragg_count,
                },
                anchor: (x0, -0.5 * params.beam_width),
                extent: (mirror_len, params.beam_width),
                material: params.stack.materials.air.clone(),
            });
        }
    }
    let geom = DeviceGeometry {
        shapes,
        background: em.background.clone(),
        bounds: crate::geometry::Bounds {
            x_min: 0.0,
            x_max: length,
            y_min: -half_h,
            y_max: half_h,
        },
    };
    let res = grid_resolution(
        params.wavelength,
        em.hybrid.refractive_index,
        geom.smallest_feature(),
        scale,
    )?;
    View::build(&geom, res)
}

/// Air clearance around the free-standing beam (m). The air-clad mode
/// decays within ~100 nm of the sidewall, so a micron of clearance
/// swallows the tails and keeps the absorber out of the near field.
const MEMBRANE_MARGIN: f64 = 1.0e-6;

/// Plan view of the free-standing beam — air cladding all around, as the
/// beam is patterned before transfer — optionally with the hole array
/// starting at `mirror_at`. With no slab beside the beam, hole scattering
/// has nowhere to tunnel through, which is the environment the mirror is
/// designed in: the Bragg condition of the hole-loaded membrane sits in
/// the telecom band, where the on-strip plan view would push it far out.
pub(crate) fn membrane_view(
    params: &DeviceParams,
    length: f64,
    mirror_at: Option<f64>,
    scale: f64,
) -> Result<View, ExperimentError> {
    if params.beam_width <= 0.0 {
        return Err(ExperimentError::Invalid(
            "the free-standing view needs a beam".into(),
        ));
    }
    let membrane = params
        .stack
        .membrane_material(params.wavelength, Polarization::Te)?;
    let air = params.stack.materials.air.clone();
    let half_h = 0.5 * params.beam_width + MEMBRANE_MARGIN;
    let mut shapes = vec![Shape::rectangle(
        0.0,
        -0.5 * params.beam_width,
        length,
        params.beam_width,
        membrane.clone(),
    )];
    if let Some(x0) = mirror_at {
        if params.bragg_count > 0 {
            if 2.0 * params.bragg_radius >= params.beam_width {
                return Err(ExperimentError::Invalid(
                    "mirror holes must be narrower than the beam".into(),
                ));
            }
            let mirror_len = params.bragg_count as f64 * params.bragg_period;
            if x0 < 0.0 || x0 + mirror_len > length {
                return Err(ExperimentError::Invalid(
                    "mirror does not fit inside the straight section".into(),
                ));
            }
            shapes.push(Shape {
                kind: ShapeKind::HoleArray {
                    period: params.bragg_period,
                    radius: params.bragg_radius,
                    count: params.bragg_count,
                },
                anchor: (x0, -0.5 * params.beam_width),
                extent: (mirror_len, params.beam_width),
                material: air.clone(),
            });
        }
    }
    let geom = DeviceGeometry {
        shapes,
        background: air,
        bounds: crate::geometry::Bounds {
            x_min: 0.0,
            x_max: length,
            y_min: -half_h,
            y_max: half_h,
        },
    };
    let res = grid_resolution(
        params.wavelength,
        membrane.refractive_index,
        geom.smallest_feature(),
        scale,
    )?;
    View::build(&geom, res)
}

/// Lateral index profile of the free-standing beam in air.
pub(crate) fn membrane_profile(params: &DeviceParams) -> Result<SlabProfile, ExperimentError> {
    let membrane = params
        .stack
        .membrane_material(params.wavelength, Polarization::Te)?;
    Ok(SlabProfile::new(
        1.0,
        vec![Layer {
            index: membrane.refractive_index,
            thickness: params.beam_width,
        }],
        1.0,
    ))
}

/// Lateral (plan-view) index profile of the strip loaded by a hybrid core
/// of width `core` centered on the axis. `core = 0` gives the bare strip;
/// a zero-width strip gives a uniform profile with no layers.
pub(crate) fn loaded_profile(
    params: &DeviceParams,
    core: f64,
) -> Result<SlabProfile, ExperimentError> {
    let em = params
        .stack
        .effective_materials(params.wavelength, Polarization::Te)?;
    if core > params.ln_width + 1e-15 {
        return Err(ExperimentError::Invalid(
            "hybrid core cannot be wider than the strip".into(),
        ));
    }
    let shoulder = 0.5 * (params.ln_width - core);
    let mut layers: Vec<Layer> = Vec::new();
    let push = |layers: &mut Vec<Layer>, index: f64, thickness: f64| {
        if thickness <= 1e-15 {
            return;
        }
        // Coalesce equal-index neighbors so a vanished core leaves one
        // canonical strip layer.
        if let Some(last) = layers.last_mut() {
            if last.index == index {
                last.thickness += thickness;
                return;
            }
        }
        layers.push(Layer { index, thickness });
    };
    push(&mut layers, em.ridge.refractive_index, shoulder);
    push(&mut layers, em.hybrid.refractive_index, core);
    push(&mut layers, em.ridge.refractive_index, shoulder);
    Ok(SlabProfile::new(
        em.background.refractive_index,
        layers,
        em.background.refractive_index,
    ))
}

/// Profile of the loaded beam: hybrid core between ridge shoulders.
pub(crate) fn beam_profile(params: &DeviceParams) -> Result<SlabProfile, ExperimentError> {
    loaded_profile(params, params.beam_width)
}

/// Profile of the bare strip past the taper.
pub(crate) fn strip_profile(params: &DeviceParams) -> Result<SlabProfile, ExperimentError> {
    loaded_profile(params, 0.0)
}

/// Guided lateral modes of a profile, fundamental first. A profile with no
/// contrast is reported as [`ExperimentError::NoGuidedMode`] so the
/// studies can demand a guide explicitly.
pub(crate) fn lateral_modes(
    profile: &SlabProfile,
    wavelength: f64,
) -> Result<Vec<Mode>, ExperimentError> {
    if profile.layers.is_empty() {
        return Err(ExperimentError::NoGuidedMode(
            "uniform cross-section".into(),
        ));
    }
    let modes = solve_slab_modes(profile, wavelength, Polarization::Te)?;
    if modes.is_empty() {
        return Err(ExperimentError::NoGuidedMode(
            "no bound lateral solution at this wavelength".into(),
        ));
    }
    Ok(modes)
}

/// Sample a lateral mode onto a full-height port line of a plan view with
/// the profile's origin at physical `origin_y`.
pub(crate) fn port_at(view: &View, mode: &Mode, origin_y: f64) -> SampledMode {
    sample_mode(mode, view.y_min, view.map.dy, view.map.ny + 1, origin_y)
}

/// Port for a strip-based profile: the origin sits on the strip's lower
/// edge at y = -ln_width/2.
pub(crate) fn lateral_port(view: &View, mode: &Mode, params: &DeviceParams) -> SampledMode {
    port_at(view, mode, -0.5 * params.ln_width)
}

/// Gaussian drive whose declared band covers every requested frequency
/// with a margin; narrow requests get a width floor so pulses stay short.
pub(crate) fn envelope_for(freqs: &[f64]) -> Envelope {
    let f_min = freqs.iter().cloned().fold(f64::INFINITY, f64::min);
    let f_max = freqs.iter().cloned().fold(0.0_f64, f64::max);
    let center = 0.5 * (f_min + f_max);
    let half = f_max - center;
    Envelope::Gaussian {
        center_freq: center,
        fwhm_freq: (half * 1.3 / 1.5).max(0.15 * center),
    }
}

/// Frequencies for a wavelength list, in matching order.
pub(crate) fn frequencies_of(wavelengths: &[f64]) -> Vec<f64> {
    wavelengths.iter().map(|&w| C0 / w).collect()
}

/// Wavelength-list validation shared by the spectral studies.
pub(crate) fn check_wavelengths(wavelengths: &[f64]) -> Result<(), ExperimentError> {
    if wavelengths.is_empty() {
        return Err(ExperimentError::Invalid(
            "at least one wavelength is required".into(),
        ));
    }
    if wavelengths.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
        return Err(ExperimentError::Invalid(
            "wavelengths must be positive and finite".into(),
        ));
    }
    if !wavelengths.windows(2).all(|w| w[0] < w[1]) {
        return Err(ExperimentError::Invalid(
            "wavelengths must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Ring-down stop shared by the studies: tight enough for clean spectra,
/// capped so a stalled run flags itself instead of hanging.
pub(crate) fn study_stop() -> StopCondition {
    StopCondition::EnergyDecay {
        threshold: 1e-5,
        max_steps: 60_000,
    }
}

/// Wavelength grid helper for config defaults: `count` evenly spaced
/// points across [lo, hi].
pub(crate) fn wavelength_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1).max(1) as f64)
        .collect()
}

/// Serde default helpers shared by the study configs.
pub(crate) fn default_scale() -> f64 {
    1.0
}

/// Margin wide enough that the weakly guided strip mode's tails clear the
/// walls of a plan view (the tail sits below 2% of peak at the wall); study
/// configs default to this instead of the tighter layout default.
pub(crate) const PORT_MARGIN: f64 = 2.2e-6;

/// A `DeviceParams` preset for the studies: the standard device with the
/// port-friendly margin and straight sections cut down to measurement
/// plumbing — long enough to separate source, ports, and junction, short
/// enough that a full sweep stays affordable on one core.
pub(crate) fn study_device() -> DeviceParams {
    let mut d = DeviceParams::default();
    d.margin = PORT_MARGIN;
    d.beam_length = 4e-6;
    d.ln_lead = 3e-6;
    d
}
