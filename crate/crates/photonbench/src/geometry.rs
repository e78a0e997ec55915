//! Parametric 2D device layouts and permittivity rasterization.
//!
//! Devices are top-view shape lists in physical units, painted in order onto a
//! background material and rasterized to relative-permittivity grids with
//! area-weighted subpixel averaging. A vertical layer stack is reduced to 2D
//! effective materials through the fundamental slab mode of each column.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modesolver::{self, Layer, Polarization, SlabProfile};
use crate::units::nm;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid geometry parameter: {0}")]
    InvalidParams(String),
    #[error("shape {index} extends outside the device bounds")]
    OutOfBounds { index: usize },
    #[error("geometry has no shapes")]
    EmptyGeometry,
    #[error(
        "resolution {got:.3e} cells/m gives fewer than 10 cells across the \
         smallest feature ({feature:.3e} m); need at least {required:.3e} cells/m"
    )]
    InsufficientResolution { got: f64, required: f64, feature: f64 },
    #[error("stack not guiding: no layer index exceeds the outer claddings")]
    NotGuiding,
    #[error("materials tagged at different wavelengths ({0:.4e} vs {1:.4e} m)")]
    WavelengthMismatch(f64, f64),
    #[error(transparent)]
    ModeSolver(#[from] modesolver::ModeSolverError),
}

/// A material with its refractive index at a stated wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    pub refractive_index: f64,
    /// Wavelength (m) at which the index is quoted.
    pub wavelength: f64,
}

impl Material {
    pub fn new(name: &str, refractive_index: f64, wavelength: f64) -> Self {
        Self {
            name: name.to_string(),
            refractive_index,
            wavelength,
        }
    }

    pub fn eps(&self) -> f64 {
        self.refractive_index * self.refractive_index
    }
}

/// The named materials of the platform with overridable indices.
///
/// Defaults are handbook values at 1300 nm; nothing downstream hard-codes
/// them — kernels only ever see rasterized permittivity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaterialSet {
    pub inp: Material,
    pub lithium_niobate: Material,
    pub silica: Material,
    pub silicon: Material,
    pub air: Material,
}

impl MaterialSet {
    pub fn standard(wavelength: f64) -> Self {
        Self {
            inp: Material::new("InP", 3.17, wavelength),
            lithium_niobate: Material::new("LiNbO3", 2.21, wavelength),
            silica: Material::new("SiO2", 1.45, wavelength),
            silicon: Material::new("Si", 3.5, wavelength),
            air: Material::new("air", 1.0, wavelength),
        }
    }
}

/// Shape-specific parameters; geometry common to all kinds (anchor, extent,
/// material) lives on [`Shape`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    /// Fills its bounding box.
    Rectangle,
    /// Trapezoid along x: width `extent.1` at the left edge tapering linearly
    /// to `width_end` at the right edge, centered on the box midline.
    LinearTaper { width_end: f64 },
    /// `count` circles of `radius` on the box midline, centers at
    /// `anchor.0 + (i + 1/2)·period`.
    HoleArray { period: f64, radius: f64, count: usize },
    /// `count` full-height rectangles of width `duty·period` at spacing
    /// `period`, starting at the left edge of the box.
    ToothArray { period: f64, duty: f64, count: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Shape {
    pub kind: ShapeKind,
    /// Lower-left corner of the bounding box (m).
    pub anchor: (f64, f64),
    /// Bounding box size (m).
    pub extent: (f64, f64),
    pub material: Material,
}

impl Shape {
    pub fn rectangle(x: f64, y: f64, w: f64, h: f64, material: Material) -> Self {
        Self {
            kind: ShapeKind::Rectangle,
            anchor: (x, y),
            extent: (w, h),
            material,
        }
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let err = |m: &str| Err(GeometryError::InvalidParams(m.to_string()));
        if !(self.extent.0 > 0.0 && self.extent.1 > 0.0) {
            return err("shape extent must be positive");
        }
        match self.kind {
            ShapeKind::Rectangle => {}
            ShapeKind::LinearTaper { width_end } => {
                if width_end < 0.0 || width_end > self.extent.1 {
                    return err("taper end width must lie in [0, start width]");
                }
            }
            ShapeKind::HoleArray { period, radius, count } => {
                if period <= 0.0 || radius <= 0.0 {
                    return err("hole array needs positive period and radius");
                }
                if 2.0 * radius > self.extent.1 {
                    return err("holes taller than their bounding box");
                }
                if count as f64 * period > self.extent.0 * (1.0 + 1e-9) {
                    return err("hole array longer than its bounding box");
                }
            }
            ShapeKind::ToothArray { period, duty, count } => {
                if period <= 0.0 || !(0.0 < duty && duty < 1.0) {
                    return err("tooth array needs positive period and duty in (0,1)");
                }
                if count as f64 * period > self.extent.0 * (1.0 + 1e-9) {
                    return err("tooth array longer than its bounding box");
                }
            }
        }
        Ok(())
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let (x0, y0) = self.anchor;
        let (w, h) = self.extent;
        if x < x0 || x > x0 + w || y < y0 || y > y0 + h {
            return false;
        }
        match self.kind {
            ShapeKind::Rectangle => true,
            ShapeKind::LinearTaper { width_end } => {
                let t = (x - x0) / w;
                let half = 0.5 * (h + (width_end - h) * t);
                (y - (y0 + 0.5 * h)).abs() <= half
            }
            ShapeKind::HoleArray { period, radius, count } => {
                if count == 0 {
                    return false;
                }
                let yc = y0 + 0.5 * h;
                let fi = ((x - x0) / period - 0.5).round();
                let i = fi.clamp(0.0, (count - 1) as f64);
                let cx = x0 + (i + 0.5) * period;
                let dx = x - cx;
                let dy = y - yc;
                dx * dx + dy * dy <= radius * radius
            }
            ShapeKind::ToothArray { period, duty, count } => {
                let rel = x - x0;
                let i = (rel / period).floor();
                if i < 0.0 || i >= count as f64 {
                    return false;
                }
                rel - i * period <= duty * period
            }
        }
    }

    /// Smallest painted dimension, for the rasterizer's resolution floor.
    /// Zero-width taper tips are excluded (never resolvable); gaps between
    /// repeated elements are not features of the painted shape.
    fn smallest_feature(&self) -> f64 {
        match self.kind {
            ShapeKind::Rectangle => self.extent.0.min(self.extent.1),
            ShapeKind::LinearTaper { width_end } => {
                let mut f = self.extent.0.min(self.extent.1);
                if width_end > 0.0 {
                    f = f.min(width_end);
                }
                f
            }
            ShapeKind::HoleArray { radius, .. } => 2.0 * radius,
            ShapeKind::ToothArray { period, duty, .. } => (duty * period).min(self.extent.1),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    fn contains_box(&self, anchor: (f64, f64), extent: (f64, f64)) -> bool {
        let tol = 1e-12;
        anchor.0 >= self.x_min - tol
            && anchor.1 >= self.y_min - tol
            && anchor.0 + extent.0 <= self.x_max + tol
            && anchor.1 + extent.1 <= self.y_max + tol
    }
}

/// An ordered shape list over a background material; later shapes overwrite
/// earlier ones where they overlap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviceGeometry {
    pub shapes: Vec<Shape>,
    pub background: Material,
    pub bounds: Bounds,
}

impl DeviceGeometry {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.shapes.is_empty() {
            return Err(GeometryError::EmptyGeometry);
        }
        for (index, s) in self.shapes.iter().enumerate() {
            s.validate()?;
            if !self.bounds.contains_box(s.anchor, s.extent) {
                return Err(GeometryError::OutOfBounds { index });
            }
        }
        Ok(())
    }

    /// Material covering a point: the last listed shape containing it, else
    /// the background.
    pub fn material_at(&self, x: f64, y: f64) -> &Material {
        self.shapes
            .iter()
            .rev()
            .find(|s| s.contains(x, y))
            .map(|s| &s.material)
            .unwrap_or(&self.background)
    }

    pub fn smallest_feature(&self) -> f64 {
        self.shapes
            .iter()
            .map(Shape::smallest_feature)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("geometry serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, GeometryError> {
        let g: Self = serde_json::from_str(s)
            .map_err(|e| GeometryError::InvalidParams(format!("geometry JSON: {e}")))?;
        g.validate()?;
        Ok(g)
    }
}

/// Relative permittivity on a uniform grid; `eps[i + nx*j]` is the cell
/// centered at `(x_min + (i+1/2)dx, y_min + (j+1/2)dy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermittivityMap {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub eps: Vec<f64>,
}

impl PermittivityMap {
    pub fn uniform(nx: usize, ny: usize, dx: f64, dy: f64, eps: f64) -> Self {
        Self {
            nx,
            ny,
            dx,
            dy,
            eps: vec![eps; nx * ny],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.eps[i + self.nx * j]
    }

    /// Total integrated permittivity over the map area.
    pub fn integrated_eps(&self) -> f64 {
        self.eps.iter().sum::<f64>() * self.dx * self.dy
    }

    /// Little-endian float64 raster, x-fastest row-major.
    pub fn raster_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.eps.len() * 8);
        for v in &self.eps {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn sidecar_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nx": self.nx,
            "ny": self.ny,
            "dx_m": self.dx,
            "dy_m": self.dy,
            "dtype": "float64-le",
            "layout": "row-major-x-fastest",
        })
    }
}

/// Supersampling density per axis for subpixel averaging.
const SUBSAMPLES: usize = 4;
const MIN_CELLS_PER_FEATURE: f64 = 10.0;

/// Rasterize a geometry at `resolution` cells per meter (square cells).
/// Boundary cells get area-weighted average permittivity via 4x4
/// supersampling; the resolution must put at least 10 cells across the
/// smallest painted feature.
pub fn rasterize(
    geom: &DeviceGeometry,
    resolution: f64,
) -> Result<PermittivityMap, GeometryError> {
    geom.validate()?;
    if !(resolution > 0.0) {
        return Err(GeometryError::InvalidParams(
            "resolution must be positive".into(),
        ));
    }
    let feature = geom.smallest_feature();
    let required = MIN_CELLS_PER_FEATURE / feature;
    if resolution < required {
        return Err(GeometryError::InsufficientResolution {
            got: resolution,
            required,
            feature,
        });
    }

    let d = 1.0 / resolution;
    let nx = (geom.bounds.width() / d).round().max(1.0) as usize;
    let ny = (geom.bounds.height() / d).round().max(1.0) as usize;
    let mut eps = Vec::with_capacity(nx * ny);
    let inv = 1.0 / (SUBSAMPLES * SUBSAMPLES) as f64;
    for j in 0..ny {
        for i in 0..nx {
            let x0 = geom.bounds.x_min + i as f64 * d;
            let y0 = geom.bounds.y_min + j as f64 * d;
            let mut acc = 0.0;
            for sj in 0..SUBSAMPLES {
                let y = y0 + (sj as f64 + 0.5) / SUBSAMPLES as f64 * d;
                for si in 0..SUBSAMPLES {
                    let x = x0 + (si as f64 + 0.5) / SUBSAMPLES as f64 * d;
                    acc += geom.material_at(x, y).eps();
                }
            }
            eps.push(acc * inv);
        }
    }
    Ok(PermittivityMap {
        nx,
        ny,
        dx: d,
        dy: d,
        eps,
    })
}

/// Reduce a vertical stack to a single effective material: the fundamental
/// slab-mode index of the column. First and last entries are the
/// semi-infinite outer claddings (their thicknesses are ignored).
pub fn effective_index_reduce(
    stack: &[(Material, f64)],
    wavelength: f64,
    polarization: Polarization,
) -> Result<Material, GeometryError> {
    if stack.is_empty() {
        return Err(GeometryError::InvalidParams("empty stack".into()));
    }
    for (m, _) in stack {
        if (m.wavelength - wavelength).abs() > 1e-15 {
            return Err(GeometryError::WavelengthMismatch(m.wavelength, wavelength));
        }
    }
    let names: Vec<&str> = stack.iter().map(|(m, _)| m.name.as_str()).collect();
    let name = format!("eff({})", names.join("/"));

    let uniform = stack
        .iter()
        .all(|(m, _)| (m.refractive_index - stack[0].0.refractive_index).abs() < 1e-15);
    if uniform {
        return Ok(Material::new(&name, stack[0].0.refractive_index, wavelength));
    }
    if stack.len() < 3 {
        return Err(GeometryError::NotGuiding);
    }

    let n_left = stack[0].0.refractive_index;
    let n_right = stack[stack.len() - 1].0.refractive_index;
    let layers: Vec<Layer> = stack[1..stack.len() - 1]
        .iter()
        .map(|(m, t)| Layer {
            index: m.refractive_index,
            thickness: *t,
        })
        .collect();
    if layers
        .iter()
        .map(|l| l.index)
        .fold(0.0f64, f64::max)
        <= n_left.max(n_right)
    {
        return Err(GeometryError::NotGuiding);
    }
    let profile = SlabProfile::new(n_left, layers, n_right);
    let modes = modesolver::solve_slab_modes(&profile, wavelength, polarization)?;
    let fundamental = modes.first().ok_or(GeometryError::NotGuiding)?;
    Ok(Material::new(&name, fundamental.n_eff, wavelength))
}

/// Vertical layer stack of the platform: InP beam on a partially etched
/// LiNbO3 film over silica. The etch depth sets the background slab height
/// outside the ridge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerStack {
    pub inp_thickness: f64,
    pub ln_film: f64,
    pub ln_etch_depth: f64,
    pub materials: MaterialSet,
}

impl LayerStack {
    pub fn standard(wavelength: f64) -> Self {
        Self {
            inp_thickness: nm(280.0),
            ln_film: nm(600.0),
            ln_etch_depth: nm(120.0),
            materials: MaterialSet::standard(wavelength),
        }
    }

    fn validate(&self) -> Result<(), GeometryError> {
        if self.inp_thickness <= 0.0 || self.ln_film <= 0.0 {
            return Err(GeometryError::InvalidParams(
                "stack thicknesses must be positive".into(),
            ));
        }
        if self.ln_etch_depth < 0.0 || self.ln_etch_depth > self.ln_film {
            return Err(GeometryError::InvalidParams(
                "etch depth must lie in [0, film thickness]".into(),
            ));
        }
        Ok(())
    }

    /// Effective materials of the three top-view regions.
    pub fn effective_materials(
        &self,
        wavelength: f64,
        polarization: Polarization,
    ) -> Result<EffectiveMaterials, GeometryError> {
        self.validate()?;
        let m = &self.materials;
        let hybrid = effective_index_reduce(
            &[
                (m.air.clone(), 0.0),
                (m.inp.clone(), self.inp_thickness),
                (m.lithium_niobate.clone(), self.ln_film),
                (m.silica.clone(), 0.0),
            ],
            wavelength,
            polarization,
        )?;
        let ridge = effective_index_reduce(
            &[
                (m.air.clone(), 0.0),
                (m.lithium_niobate.clone(), self.ln_film),
                (m.silica.clone(), 0.0),
            ],
            wavelength,
            polarization,
        )?;
        let slab = self.ln_film - self.ln_etch_depth;
        let background = if slab > 0.0 {
            effective_index_reduce(
                &[
                    (m.air.clone(), 0.0),
                    (m.lithium_niobate.clone(), slab),
                    (m.silica.clone(), 0.0),
                ],
                wavelength,
                polarization,
            )?
        } else {
            m.silica.clone()
        };
        Ok(EffectiveMaterials {
            hybrid,
            ridge,
            background,
        })
    }

    /// Effective material of the free-standing beam column: air above and
    /// below the InP membrane, the environment the beam is patterned in
    /// before it is set down on the niobate.
    pub fn membrane_material(
        &self,
        wavelength: f64,
        polarization: Polarization,
    ) -> Result<Material, GeometryError> {
        self.validate()?;
        let m = &self.materials;
        effective_index_reduce(
            &[
                (m.air.clone(), 0.0),
                (m.inp.clone(), self.inp_thickness),
                (m.air.clone(), 0.0),
            ],
            wavelength,
            polarization,
        )
    }
}

/// Effective 2D materials: InP-on-LN column (`hybrid`), bare LN ridge
/// (`ridge`), and the etched field outside the ridge (`background`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectiveMaterials {
    pub hybrid: Material,
    pub ridge: Material,
    pub background: Material,
}

/// Dimensions of the hybrid device; defaults are the platform values at
/// 1300 nm. All lengths in meters. Fields omitted from a JSON document fall
/// back to the defaults, so configs only name what they change.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DeviceParams {
    pub wavelength: f64,
    /// InP nanobeam width.
    pub beam_width: f64,
    /// LN waveguide strip width.
    pub ln_width: f64,
    /// Straight beam section between the mirror and the taper.
    pub beam_length: f64,
    pub taper_length: f64,
    /// Taper end width where the beam terminates on the LN strip.
    pub taper_tip: f64,
    pub bragg_period: f64,
    pub bragg_radius: f64,
    pub bragg_count: usize,
    /// LN strip continuation past the taper end.
    pub ln_lead: f64,
    /// Clear margin around the device on all sides.
    pub margin: f64,
    pub stack: LayerStack,
}

impl Default for DeviceParams {
    fn default() -> Self {
        let wavelength = nm(1300.0);
        Self {
            wavelength,
            beam_width: nm(500.0),
            ln_width: nm(1200.0),
            beam_length: 6e-6,
            taper_length: 5e-6,
            taper_tip: nm(140.0),
            bragg_period: nm(290.0),
            bragg_radius: nm(100.0),
            bragg_count: 10,
            ln_lead: 5e-6,
            margin: 1.5e-6,
            stack: LayerStack::standard(wavelength),
        }
    }
}

/// Build the top-view hybrid device: an LN strip under an InP nanobeam with
/// a Bragg hole array on the left end and a linear taper on the right,
/// painted in effective-index materials.
pub fn build_paper_device(params: &DeviceParams) -> Result<DeviceGeometry, GeometryError> {
    if params.taper_length < 0.0 {
        return Err(GeometryError::InvalidParams(
            "taper length must be non-negative".into(),
        ));
    }
    if params.beam_width <= 0.0 || params.ln_width <= 0.0 || params.beam_length <= 0.0 {
        return Err(GeometryError::InvalidParams(
            "widths and beam length must be positive".into(),
        ));
    }
    if params.bragg_count > 0 && 2.0 * params.bragg_radius >= params.beam_width {
        return Err(GeometryError::InvalidParams(
            "hole radius must be below half the beam width".into(),
        ));
    }
    if params.taper_tip < 0.0 || params.taper_tip > params.beam_width {
        return Err(GeometryError::InvalidParams(
            "taper tip must lie in [0, beam width]".into(),
        ));
    }

    let em = params
        .stack
        .effective_materials(params.wavelength, Polarization::Te)?;

    let bragg_len = params.bragg_count as f64 * params.bragg_period;
    let x_beam = params.margin;
    let x_taper = x_beam + bragg_len + params.beam_length;
    let x_end = x_taper + params.taper_length + params.ln_lead + params.margin;
    let half_h = 0.5 * params.ln_width.max(params.beam_width) + params.margin;

    let bounds = Bounds {
        x_min: 0.0,
        x_max: x_end,
        y_min: -half_h,
        y_max: half_h,
    };

    let mut shapes = vec![Shape::rectangle(
        0.0,
        -0.5 * params.ln_width,
        x_end,
        params.ln_width,
        em.ridge.clone(),
    )];
    shapes.push(Shape::rectangle(
        x_beam,
        -0.5 * params.beam_width,
        bragg_len + params.beam_length,
        params.beam_width,
        em.hybrid.clone(),
    ));
    if params.taper_length > 0.0 {
        shapes.push(Shape {
            kind: ShapeKind::LinearTaper {
                width_end: params.taper_tip,
            },
            anchor: (x_taper, -0.5 * params.beam_width),
            extent: (params.taper_length, params.beam_width),
            material: em.hybrid.clone(),
        });
    }
    if params.bragg_count > 0 {
        // Holes rasterize as open perforations. Filling them with the
        // under-ridge stack instead leaves an index swing too weak for a
        // ten-period mirror to reflect strongly at the design wavelength.
        shapes.push(Shape {
            kind: ShapeKind::HoleArray {
                period: params.bragg_period,
                radius: params.bragg_radius,
                count: params.bragg_count,
            },
            anchor: (x_beam, -0.5 * params.beam_width),
            extent: (bragg_len, params.beam_width),
            material: params.stack.materials.air.clone(),
        });
    }

    let geom = DeviceGeometry {
        shapes,
        background: em.background,
        bounds,
    };
    geom.validate()?;
    Ok(geom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{nm, um};
    use approx::assert_abs_diff_eq;

    fn vacuum(wl: f64) -> Material {
        Material::new("air", 1.0, wl)
    }

    fn simple_geom(shapes: Vec<Shape>, w: f64, h: f64) -> DeviceGeometry {
        DeviceGeometry {
            shapes,
            background: vacuum(nm(1300.0)),
            bounds: Bounds {
                x_min: 0.0,
                x_max: w,
                y_min: 0.0,
                y_max: h,
            },
        }
    }

    #[test]
    fn vacuum_only_rasterizes_to_unity() {
        let g = simple_geom(
            vec![Shape::rectangle(0.0, 0.0, um(2.0), um(2.0), vacuum(nm(1300.0)))],
            um(2.0),
            um(2.0),
        );
        let map = rasterize(&g, 1.0 / nm(50.0)).unwrap();
        assert!(map.eps.iter().all(|&e| e == 1.0));
    }

    #[test]
    fn interior_cells_get_exact_material_eps() {
        let inp = Material::new("InP", 3.17, nm(1300.0));
        let g = simple_geom(
            vec![Shape::rectangle(um(0.5), um(0.5), um(1.0), um(1.0), inp)],
            um(2.0),
            um(2.0),
        );
        // 40 nm cells put the 0.5 um rectangle edge mid-cell.
        let map = rasterize(&g, 1.0 / nm(40.0)).unwrap();
        // Cell centered near (1.0, 1.0) um is deep inside the rectangle.
        let i = (um(1.0) / map.dx) as usize;
        let j = (um(1.0) / map.dy) as usize;
        assert_abs_diff_eq!(map.at(i, j), 3.17 * 3.17, epsilon = 1e-12);
        // The straddling cell is strictly between vacuum and InP.
        let ib = (um(0.5) / map.dx) as usize;
        let e = map.at(ib, j);
        assert!(e > 1.0 && e < 3.17 * 3.17, "boundary eps {e}");
    }

    #[test]
    fn rasterization_is_idempotent() {
        let g = build_paper_device(&DeviceParams::default()).unwrap();
        let a = rasterize(&g, 1.0 / nm(13.0)).unwrap();
        let b = rasterize(&g, 1.0 / nm(13.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn refinement_changes_integrated_eps_below_one_percent() {
        let g = build_paper_device(&DeviceParams::default()).unwrap();
        let coarse = rasterize(&g, 1.0 / nm(13.0)).unwrap().integrated_eps();
        let fine = rasterize(&g, 2.0 / nm(13.0)).unwrap().integrated_eps();
        assert!(
            ((fine - coarse) / coarse).abs() < 0.01,
            "refinement drift {:.3e}",
            (fine - coarse) / coarse
        );
    }

    #[test]
    fn later_shapes_overwrite_earlier() {
        let a = Material::new("a", 2.0, nm(1300.0));
        let b = Material::new("b", 3.0, nm(1300.0));
        let g = simple_geom(
            vec![
                Shape::rectangle(0.0, 0.0, um(2.0), um(2.0), a),
                Shape::rectangle(um(0.5), um(0.5), um(1.0), um(1.0), b),
            ],
            um(2.0),
            um(2.0),
        );
        assert_eq!(g.material_at(um(1.0), um(1.0)).name, "b");
        let map = rasterize(&g, 1.0 / nm(50.0)).unwrap();
        let i = (um(1.0) / map.dx) as usize;
        assert_abs_diff_eq!(map.at(i, i), 9.0, epsilon = 1e-12);
    }

    #[test]
    fn resolution_floor_enforced() {
        let g = build_paper_device(&DeviceParams::default()).unwrap();
        // Smallest feature is the 140 nm taper tip: 50 nm cells give fewer
        // than 3 cells across it.
        let err = rasterize(&g, 1.0 / nm(50.0)).unwrap_err();
        assert!(matches!(err, GeometryError::InsufficientResolution { .. }));
        assert!(rasterize(&g, 1.0 / nm(13.0)).is_ok());
    }

    #[test]
    fn default_device_matches_platform_dimensions() {
        let p = DeviceParams::default();
        assert_abs_diff_eq!(p.taper_length, 5e-6);
        assert_abs_diff_eq!(p.bragg_period, nm(290.0));
        assert_abs_diff_eq!(p.bragg_radius, nm(100.0));
        let g = build_paper_device(&p).unwrap();
        let taper = g
            .shapes
            .iter()
            .find(|s| matches!(s.kind, ShapeKind::LinearTaper { .. }))
            .expect("taper present");
        assert_abs_diff_eq!(taper.extent.0, 5e-6);
        assert!(g
            .shapes
            .iter()
            .any(|s| matches!(s.kind, ShapeKind::HoleArray { period, radius, count }
                if period == nm(290.0) && radius == nm(100.0) && count == 10)));
    }

    #[test]
    fn zero_taper_emits_no_trapezoid() {
        let p = DeviceParams {
            taper_length: 0.0,
            ..DeviceParams::default()
        };
        let g = build_paper_device(&p).unwrap();
        assert!(!g
            .shapes
            .iter()
            .any(|s| matches!(s.kind, ShapeKind::LinearTaper { .. })));
    }

    #[test]
    fn oversized_holes_rejected() {
        let p = DeviceParams {
            bragg_radius: nm(260.0),
            ..DeviceParams::default()
        };
        assert!(build_paper_device(&p).is_err());
        let p = DeviceParams {
            taper_length: -1e-6,
            ..DeviceParams::default()
        };
        assert!(build_paper_device(&p).is_err());
    }

    #[test]
    fn geometry_json_roundtrip() {
        let g = build_paper_device(&DeviceParams::default()).unwrap();
        let s = g.to_json_string();
        let back = DeviceGeometry::from_json_str(&s).unwrap();
        assert_eq!(back.shapes.len(), g.shapes.len());
        assert_abs_diff_eq!(back.bounds.x_max, g.bounds.x_max);
        assert_eq!(
            back.material_at(um(3.0), 0.0).name,
            g.material_at(um(3.0), 0.0).name
        );
    }

    #[test]
    fn uniform_stack_reduces_to_itself() {
        let wl = nm(1300.0);
        let m = Material::new("LiNbO3", 2.21, wl);
        let stack = vec![(m.clone(), 0.0), (m.clone(), nm(600.0)), (m, 0.0)];
        let eff = effective_index_reduce(&stack, wl, Polarization::Te).unwrap();
        assert_abs_diff_eq!(eff.refractive_index, 2.21);
    }

    #[test]
    fn slab_reduction_delegates_to_mode_solver() {
        let wl = nm(1300.0);
        let air = vacuum(wl);
        let inp = Material::new("InP", 3.17, wl);
        let stack = vec![(air.clone(), 0.0), (inp, nm(280.0)), (air, 0.0)];
        let eff = effective_index_reduce(&stack, wl, Polarization::Te).unwrap();
        let profile = SlabProfile::symmetric(1.0, 3.17, nm(280.0));
        let modes = modesolver::solve_slab_modes(&profile, wl, Polarization::Te).unwrap();
        assert_abs_diff_eq!(eff.refractive_index, modes[0].n_eff, epsilon = 1e-12);
    }

    #[test]
    fn thick_guiding_layer_approaches_core_index() {
        let wl = nm(1300.0);
        let air = vacuum(wl);
        let inp = Material::new("InP", 3.17, wl);
        let stack = vec![(air.clone(), 0.0), (inp, 5e-6), (air, 0.0)];
        let eff = effective_index_reduce(&stack, wl, Polarization::Te).unwrap();
        assert!(3.17 - eff.refractive_index < 5e-3);
    }

    #[test]
    fn non_guiding_stack_errors() {
        let wl = nm(1300.0);
        let si = Material::new("Si", 3.5, wl);
        let sio2 = Material::new("SiO2", 1.45, wl);
        let stack = vec![(si.clone(), 0.0), (sio2, nm(500.0)), (si, 0.0)];
        assert!(matches!(
            effective_index_reduce(&stack, wl, Polarization::Te),
            Err(GeometryError::NotGuiding)
        ));
    }

    #[test]
    fn standard_stack_orders_region_indices() {
        let stack = LayerStack::standard(nm(1300.0));
        let em = stack.effective_materials(nm(1300.0), Polarization::Te).unwrap();
        assert!(
            em.hybrid.refractive_index > em.ridge.refractive_index,
            "hybrid {} vs ridge {}",
            em.hybrid.refractive_index,
            em.ridge.refractive_index
        );
        assert!(
            em.ridge.refractive_index > em.background.refractive_index,
            "ridge {} vs background {}",
            em.ridge.refractive_index,
            em.background.refractive_index
        );
        assert!(em.background.refractive_index > 1.45);
    }

    #[test]
    fn ln_strip_cut_is_single_mode() {
        // Lateral cut across the LN waveguide: ridge core between etched
        // slab claddings must guide exactly one TE mode.
        let stack = LayerStack::standard(nm(1300.0));
        let em = stack.effective_materials(nm(1300.0), Polarization::Te).unwrap();
        let cut = SlabProfile::symmetric(
            em.background.refractive_index,
            em.ridge.refractive_index,
            nm(1200.0),
        );
        let modes = modesolver::solve_slab_modes(&cut, nm(1300.0), Polarization::Te).unwrap();
        assert_eq!(modes.len(), 1, "n_ridge {} n_bg {}", em.ridge.refractive_index, em.background.refractive_index);
    }

    #[test]
    fn raster_export_roundtrips() {
        let g = simple_geom(
            vec![Shape::rectangle(0.0, 0.0, um(1.0), um(1.0), vacuum(nm(1300.0)))],
            um(1.0),
            um(1.0),
        );
        let map = rasterize(&g, 1.0 / nm(100.0)).unwrap();
        let bytes = map.raster_bytes();
        assert_eq!(bytes.len(), map.nx * map.ny * 8);
        let first = f64::from_le_bytes(bytes[0..8].try_into().unwrap());
        assert_eq!(first, map.eps[0]);
        let sc = map.sidecar_json();
        assert_eq!(sc["nx"], map.nx);
    }
}
