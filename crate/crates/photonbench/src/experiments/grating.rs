//! Out-of-plane extraction at the surface grating, in a side view that
//! keeps the raw material stack: silica below, the film with etched teeth,
//! air above. A closed box of flux lines around the grating splits the fed
//! power four ways — up, down, transmitted, reflected — normalized by the
//! incident power of a tooth-free reference run on the identical grid.

use serde::{Deserialize, Serialize};

use super::views::{
    check_wavelengths, default_scale, envelope_for, frequencies_of, grid_resolution, study_stop,
    wavelength_grid, View,
};
use super::ExperimentError;
use crate::fdtd::monitor::{poynting_flux, FluxDirection, LineMonitor};
use crate::fdtd::source::Source;
use crate::fdtd::{run, SimulationSpec};
use crate::geometry::{Bounds, DeviceGeometry, LayerStack, Shape, ShapeKind};
use crate::modesolver::{solve_slab_modes, Layer, Polarization, SlabProfile};
use crate::units::C0;

/// Buried-oxide depth kept below the film (m); the lower boundary sits
/// inside effectively infinite silica.
const SILICA_DEPTH: f64 = 1.8e-6;
/// Clear air kept above the film (m).
const AIR_ABOVE: f64 = 2.6e-6;
/// Up-line height above the film surface (m).
const UP_OFFSET: f64 = 1.0e-6;
/// Down-line depth below the film bottom (m).
const DOWN_OFFSET: f64 = 1.0e-6;
/// Box standoff around the grating (m).
const STANDOFF: f64 = 2.0e-6;
/// Source position and left lead (m).
const X_SOURCE: f64 = 1.2e-6;
const X_GRATING: f64 = 4.5e-6;
const TAIL: f64 = 1.5e-6;

fn default_band() -> Vec<f64> {
    wavelength_grid(1.26e-6, 1.34e-6, 5)
}

fn default_stack() -> LayerStack {
    LayerStack::standard(1.3e-6)
}

fn default_period() -> f64 {
    7.0e-7
}

fn default_duty() -> f64 {
    0.5
}

fn default_teeth() -> usize {
    10
}

/// Config for [`grating_extraction`]. The etch depth defaults to the
/// stack's ridge etch; period, duty and tooth count are free.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GratingConfig {
    #[serde(default = "default_stack")]
    pub stack: LayerStack,
    #[serde(default = "default_period")]
    pub period: f64,
    #[serde(default = "default_duty")]
    pub duty: f64,
    #[serde(default = "default_teeth")]
    pub teeth: usize,
    /// Tooth depth into the film (m); `None` uses the stack's etch depth.
    #[serde(default)]
    pub etch_depth: Option<f64>,
    #[serde(default = "default_band")]
    pub wavelengths: Vec<f64>,
    #[serde(default = "default_scale")]
    pub resolution_scale: f64,
}

impl Default for GratingConfig {
    fn default() -> Self {
        Self {
            stack: default_stack(),
            period: default_period(),
            duty: default_duty(),
            teeth: default_teeth(),
            etch_depth: None,
            wavelengths: default_band(),
            resolution_scale: 1.0,
        }
    }
}

/// Four-way power partition of the fed slab mode, per wavelength.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GratingPartition {
    pub wavelengths: Vec<f64>,
    pub up: Vec<f64>,
    pub down: Vec<f64>,
    pub transmitted: Vec<f64>,
    pub reflected: Vec<f64>,
    pub converged: bool,
}

impl GratingPartition {
    /// Partition sum per wavelength; 1 up to discretization.
    pub fn sums(&self) -> Vec<f64> {
        (0..self.wavelengths.len())
            .map(|k| self.up[k] + self.down[k] + self.transmitted[k] + self.reflected[k])
            .collect()
    }

    /// Up-fraction at the middle of the band.
    pub fn up_at_center(&self) -> f64 {
        self.up[self.up.len() / 2]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("wavelength,up,down,transmitted,reflected\n");
        for k in 0..self.wavelengths.len() {
            out.push_str(&format!(
                "{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}\n",
                self.wavelengths[k],
                self.up[k],
                self.down[k],
                self.transmitted[k],
                self.reflected[k]
            ));
        }
        out
    }
}

struct SideLayout {
    length: f64,
    height: f64,
    ln_top: f64,
    x_in: f64,
    x_out: f64,
    y_up: f64,
    y_dn: f64,
}

impl SideLayout {
    fn new(stack: &LayerStack, grating_len: f64) -> Self {
        let ln_top = SILICA_DEPTH + stack.ln_film;
        Self {
            length: X_GRATING + grating_len + STANDOFF + TAIL,
            height: ln_top + AIR_ABOVE,
            ln_top,
            x_in: X_GRATING - STANDOFF,
            x_out: X_GRATING + grating_len + STANDOFF,
            y_up: ln_top + UP_OFFSET,
            y_dn: SILICA_DEPTH - DOWN_OFFSET,
        }
    }
}

/// Side-view geometry: oxide sheet, film sheet, optional air teeth.
fn side_geometry(
    config: &GratingConfig,
    layout: &SideLayout,
    teeth: usize,
    etch: f64,
) -> DeviceGeometry {
    let m = &config.stack.materials;
    let mut shapes = vec![
        Shape::rectangle(0.0, 0.0, layout.length, SILICA_DEPTH, m.silica.clone()),
        Shape::rectangle(
            0.0,
            SILICA_DEPTH,
            layout.length,
            config.stack.ln_film,
            m.lithium_niobate.clone(),
        ),
    ];
    if teeth > 0 {
        shapes.push(Shape {
            kind: ShapeKind::ToothArray {
                period: config.period,
                duty: config.duty,
                count: teeth,
            },
            anchor: (X_GRATING, layout.ln_top - etch),
            extent: (teeth as f64 * config.period, etch),
            material: m.air.clone(),
        });
    }
    DeviceGeometry {
        shapes,
        background: m.air.clone(),
        bounds: Bounds {
            x_min: 0.0,
            x_max: layout.length,
            y_min: 0.0,
            y_max: layout.height,
        },
    }
}

struct BoxFluxes {
    into: Vec<f64>,
    out: Vec<f64>,
    up: Vec<f64>,
    down: Vec<f64>,
    converged: bool,
}

/// One side-view run: feed the slab fundamental from the left, read the
/// four box fluxes.
fn box_run(
    geom: &DeviceGeometry,
    layout: &SideLayout,
    resolution: f64,
    port_values: &[f64],
    freqs: &[f64],
) -> Result<BoxFluxes, ExperimentError> {
    let view = View::build(geom, resolution)?;
    let monitors = vec![
        LineMonitor::new(
            "in",
            view.vertical_segment(layout.x_in, layout.y_dn, layout.y_up),
            freqs.to_vec(),
        ),
        LineMonitor::new(
            "out",
            view.vertical_segment(layout.x_out, layout.y_dn, layout.y_up),
            freqs.to_vec(),
        ),
        LineMonitor::new(
            "up",
            view.horizontal_segment(layout.y_up, layout.x_in, layout.x_out),
            freqs.to_vec(),
        ),
        LineMonitor::new(
            "down",
            view.horizontal_segment(layout.y_dn, layout.x_in, layout.x_out),
            freqs.to_vec(),
        ),
    ];
    let i_src = view.i_of_x(X_SOURCE);
    let mut spec = SimulationSpec::new(view.map, Polarization::Te);
    spec.sources = vec![Source::line(
        i_src,
        0,
        port_values.to_vec(),
        envelope_for(freqs),
    )];
    spec.monitors = monitors;
    spec.stop = study_stop();
    let result = run(spec)?;
    let flux = |name: &str, dir: FluxDirection| {
        poynting_flux(result.monitor(name).expect("box monitor present"), dir)
    };
    Ok(BoxFluxes {
        into: flux("in", FluxDirection::Plus),
        out: flux("out", FluxDirection::Plus),
        up: flux("up", FluxDirection::Plus),
        down: flux("down", FluxDirection::Minus),
        converged: result.converged,
    })
}

/// Partition the power a slab mode feeds into the grating region. Both the
/// grating run and the tooth-free reference run use the grid that the
/// toothed geometry demands, so their incident powers subtract cleanly.
pub fn grating_extraction(config: &GratingConfig) -> Result<GratingPartition, ExperimentError> {
    check_wavelengths(&config.wavelengths)?;
    if !(config.period > 0.0 && config.period.is_finite()) {
        return Err(ExperimentError::Invalid("period must be positive".into()));
    }
    if !(config.duty > 0.0 && config.duty < 1.0) {
        return Err(ExperimentError::Invalid(
            "duty cycle must lie strictly between 0 and 1".into(),
        ));
    }
    let etch = config.etch_depth.unwrap_or(config.stack.ln_etch_depth);
    if !(etch > 0.0 && etch <= config.stack.ln_film) {
        return Err(ExperimentError::Invalid(
            "etch depth must be positive and at most the film thickness".into(),
        ));
    }

    let freqs = frequencies_of(&config.wavelengths);
    let f_center = 0.5
        * (freqs.iter().cloned().fold(f64::INFINITY, f64::min)
            + freqs.iter().cloned().fold(0.0_f64, f64::max));
    let band_center = C0 / f_center;

    let m = &config.stack.materials;
    let profile = SlabProfile::new(
        m.silica.refractive_index,
        vec![Layer {
            index: m.lithium_niobate.refractive_index,
            thickness: config.stack.ln_film,
        }],
        m.air.refractive_index,
    );
    let modes = solve_slab_modes(&profile, band_center, Polarization::Te)?;
    let slab0 = modes
        .into_iter()
        .next()
        .ok_or_else(|| ExperimentError::NoGuidedMode("bare film guides nothing".into()))?;

    let layout = SideLayout::new(&config.stack, config.teeth as f64 * config.period);
    // Tooth-independent grid so reference and device runs are identical
    // except for the teeth themselves.
    let feature = (config.duty * config.period)
        .min((1.0 - config.duty) * config.period)
        .min(etch);
    let resolution = grid_resolution(
        band_center,
        m.lithium_niobate.refractive_index,
        feature,
        config.resolution_scale,
    )?;

    let reference_geom = side_geometry(config, &layout, 0, etch);
    let device_geom = side_geometry(config, &layout, config.teeth, etch);

    // Sample the mode on the reference grid; both runs share its spacing.
    let probe = View::build(&reference_geom, resolution)?;
    let port = crate::fdtd::monitor::sample_mode(
        &slab0,
        probe.y_min,
        probe.map.dy,
        probe.map.ny + 1,
        SILICA_DEPTH,
    );

    let reference = box_run(&reference_geom, &layout, resolution, &port.values, &freqs)?;
    let device = box_run(&device_geom, &layout, resolution, &port.values, &freqs)?;

    let n = freqs.len();
    let mut up = Vec::with_capacity(n);
    let mut down = Vec::with_capacity(n);
    let mut transmitted = Vec::with_capacity(n);
    let mut reflected = Vec::with_capacity(n);
    for k in 0..n {
        let fed = reference.into[k];
        if !(fed > 0.0) {
            return Err(ExperimentError::Invalid(
                "reference run fed no power into the box".into(),
            ));
        }
        up.push(device.up[k] / fed);
        down.push(device.down[k] / fed);
        transmitted.push(device.out[k] / fed);
        reflected.push((fed - device.into[k]) / fed);
    }
    Ok(GratingPartition {
        wavelengths: config.wavelengths.clone(),
        up,
        down,
        transmitted,
        reflected,
        converged: reference.converged && device.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation_catches_bad_inputs() {
        let mut c = GratingConfig::default();
        c.duty = 1.0;
        assert!(grating_extraction(&c).is_err());
        let mut c = GratingConfig::default();
        c.period = 0.0;
        assert!(grating_extraction(&c).is_err());
        let mut c = GratingConfig::default();
        c.etch_depth = Some(1e-5); // deeper than the film
        assert!(grating_extraction(&c).is_err());
        let mut c = GratingConfig::default();
        c.wavelengths = vec![];
        assert!(grating_extraction(&c).is_err());
    }

    #[test]
    fn defaults_describe_the_surface_coupler() {
        let c = GratingConfig::default();
        assert_eq!(c.period, 7.0e-7);
        assert_eq!(c.duty, 0.5);
        assert!(c.teeth > 0);
        assert!(c.etch_depth.is_none());
        let sparse: GratingConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(sparse.period, c.period);
    }

    #[test]
    fn side_layout_keeps_the_box_inside_the_domain() {
        let c = GratingConfig::default();
        let layout = SideLayout::new(&c.stack, c.teeth as f64 * c.period);
        assert!(layout.x_in > X_SOURCE);
        assert!(layout.x_out < layout.length);
        assert!(layout.y_dn > 0.0);
        assert!(layout.y_up < layout.height);
    }
}
